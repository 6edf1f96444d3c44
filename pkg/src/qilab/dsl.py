"""Textual serialization of map expressions.

Documents are JSON trees with an "op" discriminator per node, wrapped in
{"dimension": n, "map": {...}}. Round trip guarantee: parsing the printed
form of a map yields a structurally equal expression.
"""
from __future__ import annotations

import json

from . import maps
from .errors import ParseError
from .maps import (Affine, BallGadget, BlockRotation, Clamp, Compose,
                   Dilation, GadgetData, Identity, LinearOverLog, LogDrift,
                   MapExpr, PolarExp, Reflection, Translation)


def map_to_dict(m: MapExpr) -> dict:
    if isinstance(m, Identity):
        return {"op": "identity"}
    if isinstance(m, Translation):
        return {"op": "translation", "v": list(m.v)}
    if isinstance(m, Dilation):
        return {"op": "dilation", "factor": m.factor}
    if isinstance(m, Affine):
        return {"op": "affine", "matrix": [list(row) for row in m.matrix],
                "offset": list(m.offset)}
    if isinstance(m, BlockRotation):
        return {"op": "blockrotation", "theta": m.theta, "plane": list(m.plane)}
    if isinstance(m, Reflection):
        return {"op": "reflection"}
    if isinstance(m, LogDrift):
        return {"op": "logdrift", "A": m.A, "v": list(m.v)}
    if isinstance(m, LinearOverLog):
        return {"op": "linearoverlog"}
    if isinstance(m, PolarExp):
        return {"op": "polarexp"}
    if isinstance(m, BallGadget):
        g = m.gadget
        return {"op": "gadget", "centers": [list(c) for c in g.centers],
                "radii": list(g.radii), "drift_fraction": g.drift_fraction,
                "axis": g.axis}
    if isinstance(m, Clamp):
        return {"op": "clamp", "inner": map_to_dict(m.inner),
                "alpha": m.alpha, "C": m.C, "R0": m.R0}
    if isinstance(m, Compose):
        return {"op": "compose", "outer": map_to_dict(m.outer),
                "inner": map_to_dict(m.inner)}
    raise TypeError(f"not a map expression: {m!r}")


def _need(node: dict, key: str, path: str):
    if key not in node:
        raise ParseError(f"missing field {key!r}", position=path)
    return node[key]


def dict_to_map(node, path: str = "map") -> MapExpr:
    if not isinstance(node, dict):
        raise ParseError("map node must be a JSON object", position=path)
    op = _need(node, "op", path)
    try:
        if op == "identity":
            return Identity()
        if op == "translation":
            return Translation(tuple(_need(node, "v", path)))
        if op == "dilation":
            return Dilation(_need(node, "factor", path))
        if op == "affine":
            return Affine(tuple(map(tuple, _need(node, "matrix", path))),
                          tuple(_need(node, "offset", path)))
        if op == "blockrotation":
            return BlockRotation(_need(node, "theta", path),
                                 tuple(node.get("plane", (0, 1))))
        if op == "reflection":
            return Reflection()
        if op == "logdrift":
            return LogDrift(_need(node, "A", path),
                            tuple(_need(node, "v", path)))
        if op == "linearoverlog":
            return LinearOverLog()
        if op == "polarexp":
            return PolarExp()
        if op == "gadget":
            return BallGadget(GadgetData(
                centers=tuple(map(tuple, _need(node, "centers", path))),
                radii=tuple(_need(node, "radii", path)),
                drift_fraction=node.get("drift_fraction", 0.25),
                axis=_need(node, "axis", path)))
        if op == "clamp":
            return Clamp(dict_to_map(_need(node, "inner", path), path + ".inner"),
                         _need(node, "alpha", path), _need(node, "C", path),
                         _need(node, "R0", path))
        if op == "compose":
            return Compose(dict_to_map(_need(node, "outer", path), path + ".outer"),
                           dict_to_map(_need(node, "inner", path), path + ".inner"))
    except ParseError:
        raise
    except (TypeError, ValueError) as exc:
        raise ParseError(f"invalid {op!r} node: {exc}", position=path) from exc
    raise ParseError(f"unknown op {op!r}", position=path)


def doc_to_dict(m: MapExpr, dimension: int | None = None) -> dict:
    dim = dimension if dimension is not None else maps.dimension_of(m)
    return {"dimension": dim, "map": map_to_dict(m)}


def dumps_map(m: MapExpr, dimension: int | None = None, indent=None) -> str:
    return json.dumps(doc_to_dict(m, dimension), sort_keys=True, indent=indent)


def parse_map_doc(doc) -> tuple[MapExpr, int | None]:
    """Parse a {"dimension": n, "map": {...}} document (dict or JSON text)."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}",
                             position=f"offset {exc.pos}") from exc
    if not isinstance(doc, dict):
        raise ParseError("document must be a JSON object")
    if "map" in doc:
        m = dict_to_map(doc["map"])
        dim = doc.get("dimension")
    else:
        # bare node form is accepted for convenience
        m = dict_to_map(doc)
        dim = None
    if dim is not None:
        dim = int(dim)
        exact, minimum = maps.required_dimension(m)
        if exact is not None and exact != dim:
            raise ParseError(
                f"document dimension {dim} conflicts with map dimension {exact}")
        if dim < minimum:
            raise ParseError(
                f"document dimension {dim} below map minimum {minimum}")
    return m, dim


def loads_map(text: str) -> tuple[MapExpr, int | None]:
    return parse_map_doc(text)


def load_map_file(path) -> tuple[MapExpr, int | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_map_doc(fh.read())
