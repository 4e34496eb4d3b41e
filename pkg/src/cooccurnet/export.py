"""Graph export: canonical JSON schema, Graphviz DOT and a flat edge CSV.

The JSON schema is the interchange format for community graphs:

    {"root": ..., "members": [{"id", "layer"}...], "edges":
     [{"a", "b", "frequency", "shared_photos", "strength"}...]}

members are sorted by (layer, id) and edges by (a, b), so identical graphs
serialize to identical bytes.  Photos appear in their single-string display
form (``album/photo`` when an album is present).
"""

from __future__ import annotations

import json
from typing import Any

from .corpus import PhotoId
from .errors import ParseError
from .network import CommunityGraph, Edge


def _photo_from_display(display: str) -> PhotoId:
    album, sep, photo = display.partition("/")
    if sep:
        return PhotoId(photo=photo, album=album)
    return PhotoId(photo=display)


def graph_to_json_dict(graph: CommunityGraph) -> dict[str, Any]:
    members = [
        {"id": identity, "layer": layer}
        for identity, layer in sorted(graph.layer.items(), key=lambda kv: (kv[1], kv[0]))
    ]
    edges = [
        {
            "a": edge.a,
            "b": edge.b,
            "frequency": edge.frequency,
            "shared_photos": sorted(p.display for p in edge.shared_photos),
            "strength": edge.strength,
        }
        for edge in sorted(graph.edges, key=lambda e: (e.a, e.b))
    ]
    return {"root": graph.root, "members": members, "edges": edges}


def graph_to_json(graph: CommunityGraph) -> str:
    return json.dumps(graph_to_json_dict(graph), indent=2, sort_keys=True) + "\n"


def graph_from_json(text: str) -> CommunityGraph:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid graph JSON: {exc}") from exc
    try:
        layer = {m["id"]: int(m["layer"]) for m in data["members"]}
        edges = tuple(
            Edge(
                a=e["a"],
                b=e["b"],
                frequency=int(e["frequency"]),
                shared_photos=frozenset(_photo_from_display(p) for p in e["shared_photos"]),
                strength=None if e.get("strength") is None else float(e["strength"]),
            )
            for e in data["edges"]
        )
        return CommunityGraph(root=data["root"], layer=layer, edges=edges)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"graph JSON missing or malformed field: {exc}") from exc


def _dot_quote(token: str) -> str:
    return '"' + token.replace("\\", "\\\\").replace('"', '\\"') + '"'


def graph_to_dot(graph: CommunityGraph) -> str:
    """Graphviz DOT with strength-labeled edges, pen width proportional to strength.

    Falls back to frequency labels/widths when strengths have not been filled.
    """
    def weight_of(edge: Edge) -> float:
        return edge.strength if edge.strength is not None else float(edge.frequency)

    max_weight = max((weight_of(e) for e in graph.edges), default=1.0) or 1.0
    lines = ["graph community {"]
    for identity, layer in sorted(graph.layer.items(), key=lambda kv: (kv[1], kv[0])):
        label = f"{identity}\\nlayer {layer}"
        lines.append(f"  {_dot_quote(identity)} [label={_dot_quote(label)}];")
    for edge in sorted(graph.edges, key=lambda e: (e.a, e.b)):
        weight = weight_of(edge)
        width = max(0.3, 3.0 * weight / max_weight)
        lines.append(
            f"  {_dot_quote(edge.a)} -- {_dot_quote(edge.b)} "
            f'[label="{weight:.2f}", penwidth={width:.2f}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def edges_to_csv(graph: CommunityGraph) -> str:
    lines = ["a,b,frequency,strength,shared_photos"]
    for edge in sorted(graph.edges, key=lambda e: (e.a, e.b)):
        strength = "" if edge.strength is None else f"{edge.strength:.6f}"
        photos = "|".join(sorted(p.display for p in edge.shared_photos))
        lines.append(f"{edge.a},{edge.b},{edge.frequency},{strength},{photos}")
    return "\n".join(lines) + "\n"
