"""JSON body specification files.

A body file is a JSON object with a ``type`` discriminator::

    {"type": "ball", "radius": 1.0, "n": 3}
    {"type": "ellipsoid", "matrix": [[1, 0], [0, 0.25]]}
    {"type": "polytope_h", "normals": [[1, 0], [0, 1]], "offsets": [1, 1]}
    {"type": "cylinder", "r": 0.5, "k": 1, "n": 3}
    {"type": "polytope_v", "vertices": [[0, 0], [1, 0], [0, 1]]}

Each ``polytope_h`` row stands for an antipodal pair of halfspaces.
``polytope_v`` bodies need not be symmetric and are only accepted by the
``lemma`` and ``bm`` commands.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .bodies import Ball, Ellipsoid, GeneralPolytopeV, PolytopeH, ProductCylinder
from .errors import ParseError

TYPES = ("ball", "ellipsoid", "polytope_h", "cylinder", "polytope_v")


def _number(doc, key, where, positive=False):
    if key not in doc:
        raise ParseError(f"{where}: missing field '{key}'")
    val = doc[key]
    if isinstance(val, bool) or not isinstance(val, (int, float)) or not math.isfinite(val):
        raise ParseError(f"{where}: field '{key}' must be a finite number")
    if positive and val <= 0:
        raise ParseError(f"{where}: field '{key}' must be positive")
    return float(val)


def _integer(doc, key, where):
    val = _number(doc, key, where)
    if val != int(val):
        raise ParseError(f"{where}: field '{key}' must be an integer")
    return int(val)


def _matrix(doc, key, where, cols=None):
    if key not in doc:
        raise ParseError(f"{where}: missing field '{key}'")
    rows = doc[key]
    if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
        raise ParseError(f"{where}: field '{key}' must be a non-empty list of rows")
    width = len(rows[0])
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ParseError(f"{where}: field '{key}' row {i} has {len(row)} entries, expected {width}")
        for x in row:
            if isinstance(x, bool) or not isinstance(x, (int, float)) or not math.isfinite(x):
                raise ParseError(f"{where}: field '{key}' row {i} holds a non-numeric entry")
    if cols is not None and width != cols:
        raise ParseError(f"{where}: field '{key}' has {width} columns, dimension is {cols}")
    return np.array(rows, dtype=float)


def body_from_dict(doc: dict, where: str = "body"):
    if not isinstance(doc, dict):
        raise ParseError(f"{where}: expected a JSON object")
    kind = doc.get("type")
    if kind not in TYPES:
        raise ParseError(f"{where}: field 'type' must be one of {', '.join(TYPES)}")
    dim = _integer(doc, "n", where) if "n" in doc else None
    try:
        if kind == "ball":
            return Ball(_number(doc, "radius", where, positive=True), _integer(doc, "n", where))
        if kind == "ellipsoid":
            a = _matrix(doc, "matrix", where, dim)
            if a.shape[0] != a.shape[1]:
                raise ParseError(f"{where}: field 'matrix' must be square")
            return Ellipsoid(a)
        if kind == "polytope_h":
            a = _matrix(doc, "normals", where, dim)
            offsets = doc.get("offsets")
            if not isinstance(offsets, list):
                raise ParseError(f"{where}: field 'offsets' must be a list")
            if len(offsets) != len(a):
                raise ParseError(f"{where}: field 'offsets' has {len(offsets)} entries for {len(a)} normals")
            b = _matrix({"offsets": [[x] for x in offsets]}, "offsets", where)[:, 0]
            if np.any(b <= 0):
                raise ParseError(f"{where}: field 'offsets': origin not interior (offsets must be positive)")
            return PolytopeH(a, b)
        if kind == "cylinder":
            return ProductCylinder(_number(doc, "r", where, positive=True), _integer(doc, "k", where),
                                   _integer(doc, "n", where), _number(doc, "r2", where, True) if "r2" in doc else 1.0)
        return GeneralPolytopeV(_matrix(doc, "vertices", where, dim))
    except ValueError as exc:
        raise ParseError(f"{where}: {exc}") from exc


def parse_body(path):
    """Read a body specification file.

    Raises
    ------
    ParseError
        With the file name and the offending field or JSON line.
    """
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    return body_from_dict(doc, str(path))


def body_to_dict(body) -> dict:
    if isinstance(body, Ball):
        return {"type": "ball", "radius": body.radius, "n": body.n}
    if isinstance(body, Ellipsoid):
        return {"type": "ellipsoid", "matrix": body.matrix.tolist()}
    if isinstance(body, PolytopeH):
        return {"type": "polytope_h", "normals": body.normals.tolist(), "offsets": body.offsets.tolist()}
    if isinstance(body, ProductCylinder):
        doc = {"type": "cylinder", "r": body.r, "k": body.k, "n": body.n}
        if body.r2 != 1.0:
            doc["r2"] = body.r2
        return doc
    if isinstance(body, GeneralPolytopeV):
        return {"type": "polytope_v", "vertices": body.vertices.tolist()}
    raise TypeError(f"cannot serialise {type(body).__name__}")


def dump_body(body, path) -> None:
    Path(path).write_text(json.dumps(body_to_dict(body), indent=2) + "\n", encoding="utf-8")
