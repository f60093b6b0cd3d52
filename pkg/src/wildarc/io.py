"""Report and geometry exports.

Every float goes out with 17 significant digits and every collection in a
fixed order, so identical inputs give byte-identical files.
"""
from __future__ import annotations

import json
import math
import struct
from pathlib import Path
from typing import Iterable

import numpy as np

COVER_HEADER = struct.Struct("<dII")
COVER_DTYPE = np.dtype("<u4")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


def _encode(obj, indent: int, level: int) -> str:
    pad = " " * (indent * (level + 1))
    end = " " * (indent * level)
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{_encode(str(k), indent, level + 1)}: {_encode(v, indent, level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        # short numeric rows stay on one line
        if all(isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool) for v in obj) and len(obj) <= 4:
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        items = [pad + _encode(v, indent, level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot encode {type(obj).__name__}")


def dumps(obj, indent: int = 2) -> str:
    """JSON text with '.17g' floats and non-finite values written as null."""
    return _encode(obj, indent, 0) + "\n"


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def write_json(path, obj) -> Path:
    return write_text(path, dumps(obj))


# --------------------------------------------------------------------------
# fixed points and separatrices


def fixed_point_report(records: Iterable) -> list[dict]:
    return [r.to_json() for r in records]


def separatrix_csv(trace) -> str:
    lines = ["t,x1,x2,x3"]
    for t, p in zip(trace.chart[:, 0], trace.points):
        lines.append(",".join(fmt(v) for v in (t, *p)))
    return "\n".join(lines) + "\n"


def polyline_obj(points: np.ndarray, name: str = "separatrix") -> str:
    pts = np.asarray(points, dtype=float)
    out = [f"o {name}"]
    out += ["v " + " ".join(fmt(c) for c in p) for p in pts]
    out.append("l " + " ".join(str(i) for i in range(1, len(pts) + 1)))
    return "\n".join(out) + "\n"


def curve_obj(curve, t0: float = 0.0, t1: float = 1.0, samples: int = 512) -> str:
    """The knot over ``[t0, t1]`` as an OBJ polyline (endpoints included)."""
    t = t0 + (t1 - t0) * np.arange(samples + 1) / samples
    return polyline_obj(curve.gamma(t), "knot")


def tube_obj(chart, t0: float = 0.0, t1: float = 1.0, rings: int = 256, sides: int = 16) -> str:
    """Boundary of the tube over ``[t0, t1]`` as an OBJ triangle mesh.

    Vertex ``ring * sides + k`` sits at parameter ``t0 + ring*(t1-t0)/rings`` and
    angle ``2*pi*k/sides``; faces are listed ring by ring.
    """
    t = t0 + (t1 - t0) * np.arange(rings + 1) / rings
    ang = 2.0 * np.pi * np.arange(sides) / sides
    y = np.empty(((rings + 1) * sides, 3))
    y[:, 0] = np.repeat(t, sides)
    y[:, 1] = np.tile(2.0 * np.cos(ang), rings + 1)
    y[:, 2] = np.tile(2.0 * np.sin(ang), rings + 1)
    pts = chart.embed(y)
    out = ["o tube"]
    out += ["v " + " ".join(fmt(c) for c in p) for p in pts]
    for i in range(rings):
        for k in range(sides):
            a = i * sides + k + 1
            b = i * sides + (k + 1) % sides + 1
            out.append(f"f {a} {b} {b + sides}")
            out.append(f"f {a} {b + sides} {a + sides}")
    return "\n".join(out) + "\n"


# --------------------------------------------------------------------------
# box graphs


def edges_csv(graph) -> str:
    """One row per edge, ``depth,bx,by,bz -> bx,by,bz``; the infinity cell is ``inf,inf,inf``."""
    cover = graph.cover
    inf = graph.inf_cell
    src, dst = graph.edge_array()
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    n = cover.count
    trip = cover.triples(np.arange(n))
    names = [f"{a},{b},{c}" for a, b, c in trip.tolist()]
    if inf is not None:
        names.append("inf,inf,inf")
    d = cover.depth
    lines = ["depth,bx,by,bz -> bx,by,bz"]
    lines += [f"{d},{names[s]} -> {names[t]}" for s, t in zip(src.tolist(), dst.tolist())]
    return "\n".join(lines) + "\n"


def decomposition_document(dec) -> dict:
    g = dec.graph
    cover = g.cover
    comps = []
    for cid, comp in enumerate(dec.components):
        comp = np.sort(np.asarray(comp))
        boxes = comp[comp < cover.count]
        entry = {
            "component_id": cid,
            "boxes": cover.triples(boxes).tolist(),
            "lyapunov_value": float(dec.lyapunov[comp[0]]),
        }
        if g.inf_cell is not None and g.inf_cell in comp:
            entry["infinity"] = True
        comps.append(entry)
    return {
        "R": cover.R,
        "depth": cover.depth,
        "epsilon": g.epsilon,
        "component_count": dec.count,
        "components": comps,
    }


def write_cover_binary(path, cover, boxes=None) -> Path:
    """Header ``<dII`` (R, depth, count), then count little-endian u32 triples."""
    idx = np.arange(cover.count) if boxes is None else np.sort(np.asarray(boxes, dtype=np.int64))
    trip = cover.triples(idx).astype(COVER_DTYPE)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(COVER_HEADER.pack(float(cover.R), int(cover.depth), len(idx)))
        fh.write(np.ascontiguousarray(trip).tobytes())
    return path


def read_cover_binary(path) -> tuple[float, int, np.ndarray]:
    data = Path(path).read_bytes()
    if len(data) < COVER_HEADER.size:
        raise ValueError("truncated box-cover file")
    R, depth, count = COVER_HEADER.unpack_from(data)
    body = np.frombuffer(data, dtype=COVER_DTYPE, offset=COVER_HEADER.size)
    if body.size != 3 * count:
        raise ValueError(f"expected {count} boxes, found {body.size / 3:g}")
    return R, depth, body.reshape(count, 3).astype(np.int64)
