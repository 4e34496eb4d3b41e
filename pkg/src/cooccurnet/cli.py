"""Command-line entry point: ingest -> recognize -> build -> rank -> evaluate.

Subcommands: ingest, build, rank, eval, sweep, stats, synth.  A flat
``key=value`` config file can supply any long flag's value; explicit flags
override the file.  Exit codes: 0 success, 2 I/O error, 64 usage error,
65 data/consistency error.

Identical invocations with identical seeds produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import evaluation, export, ranking, synthetic
from .corpus import AnnotationFormat, Corpus, LabelSource, clean, load_corpus, serialize_corpus
from .errors import CooccurnetError, ParameterError, UnknownTargetError
from .network import BuildParams, build_network
from .recognition import RecognizerConfig, RecognizerMode, recognize
from .synthetic import SynthParams

EXIT_OK = 0
EXIT_IO = 2
EXIT_USAGE = 64
EXIT_DATA = 65


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # noqa: D102 - argparse hook
        raise _UsageError(message)


_CONFIG_CONVERTERS = {
    "threshold": int,
    "max_layers": int,
    "seed": int,
    "noise_accuracy": float,
    "log_base": float,
    "solo_rate": float,
    "n_communities": int,
    "clean": lambda v: v.lower() in ("1", "true", "yes", "on"),
}


def _load_config_file(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line_no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise _UsageError(f"config line {line_no}: expected key=value, got {line!r}")
        values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(args: argparse.Namespace) -> None:
    if not getattr(args, "config", None):
        return
    known = vars(args)
    for key, value in _load_config_file(args.config).items():
        if key not in known:
            raise _UsageError(f"config key {key!r} does not match any flag of this subcommand")
        if known[key] in (None, False):
            converter = _CONFIG_CONVERTERS.get(key, str)
            try:
                setattr(args, key, converter(value))
            except ValueError as exc:
                raise _UsageError(f"config key {key!r}: {exc}") from exc


def _defaults(args: argparse.Namespace, **defaults) -> None:
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)


def _add_io_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--corpus", help="annotation file to ingest")
    parser.add_argument("--format", choices=[f.value for f in AnnotationFormat],
                        help="annotation format (default generic_tsv)")
    parser.add_argument("--config", help="flat key=value config file; flags override it")
    parser.add_argument("--out", help="output directory (default .)")


def _add_recognizer_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--recognizer", choices=["oracle", "file", "noise"],
                        help="identity source for predicted labels (default oracle)")
    parser.add_argument("--predictions", help="predictions TSV (recognizer=file)")
    parser.add_argument("--noise-accuracy", type=float, dest="noise_accuracy",
                        help="per-face accuracy p (recognizer=noise)")
    parser.add_argument("--seed", type=int, help="seed for stochastic modes (default 0)")


def _add_build_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--threshold", type=int, help="minimum face frequency; membership is strictly greater (default 0)")
    parser.add_argument("--max-layers", type=int, dest="max_layers", help="cap on expansion depth")


def build_parser() -> _Parser:
    parser = _Parser(prog="cooccurnet", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", metavar="command")

    p = sub.add_parser("ingest", help="parse annotations and write the canonical corpus TSV")
    _add_io_flags(p)
    p.add_argument("--clean", action="store_true", help="drop rejected instances before writing")

    p = sub.add_parser("build", help="build one target-centered community graph")
    _add_io_flags(p)
    _add_recognizer_flags(p)
    _add_build_flags(p)
    p.add_argument("--target", help="root identity")
    p.add_argument("--target-face", dest="target_face",
                   help="root as photo_id:face_index, resolved through the recognizer")
    p.add_argument("--log-base", type=float, dest="log_base", help="IDF log base (default 10)")
    p.add_argument("--export", help="comma subset of json,dot,csv (default json)")

    p = sub.add_parser("rank", help="export the IDF and photo-score tables")
    _add_io_flags(p)
    _add_recognizer_flags(p)
    p.add_argument("--log-base", type=float, dest="log_base", help="IDF log base (default 10)")

    p = sub.add_parser("eval", help="precision/recall of predicted networks against truth")
    _add_io_flags(p)
    _add_recognizer_flags(p)
    _add_build_flags(p)
    p.add_argument("--targets", help="comma-separated target identities (default: all)")
    p.add_argument("--targets-file", dest="targets_file", help="file with one target per line")

    p = sub.add_parser("sweep", help="precision/recall across a threshold sweep")
    _add_io_flags(p)
    _add_recognizer_flags(p)
    p.add_argument("--thresholds", help="comma list or lo..hi range (default 0..5)")
    p.add_argument("--targets", help="comma-separated target identities (default: all)")
    p.add_argument("--targets-file", dest="targets_file", help="file with one target per line")
    p.add_argument("--max-layers", type=int, dest="max_layers", help="cap on expansion depth")

    p = sub.add_parser("stats", help="community size histogram and per-size density")
    _add_io_flags(p)
    _add_recognizer_flags(p)
    _add_build_flags(p)

    p = sub.add_parser("synth", help="generate a planted-community synthetic corpus")
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--n-communities", type=int, dest="n_communities")
    p.add_argument("--sizes", help="community size range lo:hi (default 3:6)")
    p.add_argument("--photos", help="group photos per community lo:hi (default 10:20)")
    p.add_argument("--persons", help="persons per group photo lo:hi (default 2:3)")
    p.add_argument("--solo-rate", type=float, dest="solo_rate", help="solo photo rate (default 0)")
    p.add_argument("--seed", type=int, help="generator seed (default 0)")

    return parser


def _out_dir(args: argparse.Namespace) -> Path:
    out = Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write(path: Path, text: str) -> None:
    path.write_text(text, encoding="utf-8")
    print(f"wrote {path}")


def _load(args: argparse.Namespace) -> Corpus:
    if not args.corpus:
        raise _UsageError("--corpus is required")
    fmt = AnnotationFormat(args.format or AnnotationFormat.GENERIC_TSV.value)
    return load_corpus(args.corpus, fmt)


def _recognizer_config(args: argparse.Namespace) -> RecognizerConfig:
    mode = {
        "oracle": RecognizerMode.ORACLE,
        "file": RecognizerMode.PREDICTIONS_FILE,
        "noise": RecognizerMode.NOISE,
    }[args.recognizer or "oracle"]
    return RecognizerConfig(
        mode=mode,
        predictions_path=args.predictions,
        noise_accuracy=args.noise_accuracy,
        seed=args.seed if args.seed is not None else 0,
    )


def _parse_range(text: str, flag: str) -> tuple[int, int]:
    lo, sep, hi = text.partition(":")
    if not sep:
        raise _UsageError(f"{flag} expects lo:hi, got {text!r}")
    try:
        return (int(lo), int(hi))
    except ValueError as exc:
        raise _UsageError(f"{flag} expects integers, got {text!r}") from exc


def _parse_thresholds(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",") if t != ""]
    except ValueError as exc:
        raise _UsageError(f"--thresholds expects a comma list or lo..hi, got {text!r}") from exc


def _resolve_targets(args: argparse.Namespace, corpus: Corpus) -> list[str]:
    if getattr(args, "targets", None):
        return [t for t in args.targets.split(",") if t]
    if getattr(args, "targets_file", None):
        lines = Path(args.targets_file).read_text(encoding="utf-8").splitlines()
        return [t.strip() for t in lines if t.strip() and not t.startswith("#")]
    return list(corpus.identities(LabelSource.TRUE))


def _cmd_ingest(args: argparse.Namespace) -> int:
    corpus = _load(args)
    if args.clean:
        corpus = clean(corpus)
    out = _out_dir(args)
    _write(out / "corpus.tsv", serialize_corpus(corpus))
    print(
        f"ingested {len(corpus)} instances, {len(corpus.photos)} photos, "
        f"{len(corpus.identities())} identities"
    )
    return EXIT_OK


def _resolve_target(args: argparse.Namespace, recognized: Corpus) -> str:
    if args.target and args.target_face:
        raise _UsageError("give either --target or --target-face, not both")
    if args.target:
        return args.target
    if not args.target_face:
        raise _UsageError("a target is required (--target or --target-face)")
    photo_s, sep, index_s = args.target_face.rpartition(":")
    if not sep or not photo_s:
        raise _UsageError(f"--target-face expects photo_id:face_index, got {args.target_face!r}")
    try:
        face_index = int(index_s)
    except ValueError as exc:
        raise _UsageError(f"--target-face face_index must be an integer") from exc
    for inst in recognized:
        if inst.photo.photo == photo_s and inst.face_index == face_index:
            if inst.predicted_identity is None:
                raise UnknownTargetError(f"face {args.target_face} has no predicted identity")
            return inst.predicted_identity
    raise UnknownTargetError(f"face {args.target_face} not found in corpus")


def _cmd_build(args: argparse.Namespace) -> int:
    _defaults(args, threshold=0, log_base=ranking.DEFAULT_LOG_BASE, export="json")
    corpus = clean(_load(args))
    recognized = recognize(corpus, _recognizer_config(args))
    target = _resolve_target(args, recognized)
    params = BuildParams(args.threshold, args.max_layers, LabelSource.PREDICTED)
    graph = build_network(recognized, target, params)

    group_set = ranking.group_photos(recognized, LabelSource.PREDICTED)
    if group_set.size:
        scores = ranking.photo_scores(group_set, ranking.idf_table(group_set, args.log_base))
        graph = ranking.relationship_strengths(graph, scores)

    formats = {f.strip() for f in args.export.split(",") if f.strip()}
    unknown = formats - {"json", "dot", "csv"}
    if unknown:
        raise _UsageError(f"unknown export format(s): {', '.join(sorted(unknown))}")
    out = _out_dir(args)
    if "json" in formats:
        _write(out / "community.json", export.graph_to_json(graph))
    if "dot" in formats:
        _write(out / "community.dot", export.graph_to_dot(graph))
    if "csv" in formats:
        _write(out / "community_edges.csv", export.edges_to_csv(graph))
    print(f"built network for {target}: {graph.n_members} members, {graph.n_edges} edges")
    return EXIT_OK


def _cmd_rank(args: argparse.Namespace) -> int:
    _defaults(args, log_base=ranking.DEFAULT_LOG_BASE)
    corpus = clean(_load(args))
    recognized = recognize(corpus, _recognizer_config(args))
    group_set = ranking.group_photos(recognized, LabelSource.PREDICTED)
    idf = ranking.idf_table(group_set, args.log_base)
    scores = ranking.photo_scores(group_set, idf)
    out = _out_dir(args)
    _write(out / "idf.tsv", ranking.idf_to_tsv(idf))
    _write(out / "photo_scores.tsv", ranking.scores_to_tsv(scores))
    for name, values in (("IDF", idf.idf.values()), ("photo score", scores.scores.values())):
        s = evaluation.summary(values)
        print(f"{name}: min {s.minimum:.6f}, max {s.maximum:.6f}, average {s.average:.6f}")
    return EXIT_OK


def _reports_csv(reports: list[tuple[str, evaluation.EvalReport]]) -> str:
    lines = ["target,tp,fp,fn,precision,recall"]
    lines += [
        f"{t},{r.tp},{r.fp},{r.fn},{r.precision:.4f},{r.recall:.4f}" for t, r in reports
    ]
    return "\n".join(lines) + "\n"


def _cmd_eval(args: argparse.Namespace) -> int:
    _defaults(args, threshold=0)
    corpus = clean(_load(args))
    recognized = recognize(corpus, _recognizer_config(args))
    targets = _resolve_targets(args, corpus)
    if not targets:
        raise ParameterError("no targets to evaluate")
    reports = evaluation.per_target_reports(
        corpus, recognized, targets, args.threshold, args.max_layers
    )
    micro = evaluation.aggregate_micro(r for _, r in reports)
    macro_p, macro_r = evaluation.aggregate_macro([r for _, r in reports])
    out = _out_dir(args)
    _write(out / "eval.csv", _reports_csv(reports))
    summary_lines = [
        "kind,tp,fp,fn,precision,recall",
        f"micro,{micro.tp},{micro.fp},{micro.fn},{micro.precision:.4f},{micro.recall:.4f}",
        f"macro,,,,{macro_p:.4f},{macro_r:.4f}",
    ]
    _write(out / "eval_summary.csv", "\n".join(summary_lines) + "\n")
    print(f"precision,recall = {micro.precision:.4f},{micro.recall:.4f} "
          f"(micro over {len(targets)} targets)")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    corpus = clean(_load(args))
    thresholds = _parse_thresholds(args.thresholds or "0..5")
    targets = _resolve_targets(args, corpus)
    result = evaluation.threshold_sweep(
        corpus, _recognizer_config(args), thresholds, targets, args.max_layers
    )
    out = _out_dir(args)
    _write(out / "sweep.csv", result.to_csv())
    return EXIT_OK


def _cmd_stats(args: argparse.Namespace) -> int:
    _defaults(args, threshold=0)
    corpus = clean(_load(args))
    if args.recognizer and args.recognizer != "oracle":
        corpus = recognize(corpus, _recognizer_config(args))
        source = LabelSource.PREDICTED
    else:
        source = LabelSource.TRUE
    params = BuildParams(args.threshold, args.max_layers, source)
    targets = corpus.identities(source)
    pairs = evaluation.enumerate_communities_with_roots(corpus, params, targets)
    stats = evaluation.community_stats(pairs)
    out = _out_dir(args)
    _write(out / "size_histogram.csv", evaluation.histogram_to_csv(stats))
    _write(out / "density_by_size.csv", evaluation.density_by_size_to_csv(stats))
    sizes = stats.size_histogram
    print(f"{sum(sizes.values())} distinct communities, sizes {min(sizes)}..{max(sizes)}"
          if sizes else "no communities")
    return EXIT_OK


def _cmd_synth(args: argparse.Namespace) -> int:
    _defaults(args, n_communities=3, sizes="3:6", photos="10:20", persons="2:3",
              solo_rate=0.0, seed=0)
    params = SynthParams(
        n_communities=args.n_communities,
        size_range=_parse_range(args.sizes, "--sizes"),
        photos_range=_parse_range(args.photos, "--photos"),
        persons_range=_parse_range(args.persons, "--persons"),
        solo_photo_rate=args.solo_rate,
        seed=args.seed,
    )
    corpus, partition = synthetic.generate(params)
    out = _out_dir(args)
    _write(out / "synthetic.tsv", serialize_corpus(corpus))
    _write(out / "planted.tsv", synthetic.partition_to_tsv(partition))
    print(f"generated {len(corpus)} instances across {params.n_communities} communities")
    return EXIT_OK


_COMMANDS = {
    "ingest": _cmd_ingest,
    "build": _cmd_build,
    "rank": _cmd_rank,
    "eval": _cmd_eval,
    "sweep": _cmd_sweep,
    "stats": _cmd_stats,
    "synth": _cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            parser.print_help()
            return EXIT_USAGE
        _apply_config(args)
        return _COMMANDS[args.command](args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CooccurnetError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
