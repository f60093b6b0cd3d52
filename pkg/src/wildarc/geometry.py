"""Charts shared by the rest of the package.

Points of R^3 are plain float arrays of shape ``(3,)`` (or ``(N, 3)`` for
the batch helpers).  The north pole of S^3 never gets coordinates in the
R^3 chart; it is represented by the :data:`NORTH` sentinel.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .errors import NorthPole, OriginNotCovered

FORWARD = "forward"
INVERSE = "inverse"

#: below this norm log2 would overflow towards -inf
ORIGIN_GUARD = 1e-300
#: S^1 coordinates this close to 1 are wrapped to 0
WRAP_TOL = 1e-12


class _North:
    __slots__ = ()

    def __repr__(self) -> str:
        return "NORTH"

    def __reduce__(self):
        return (_north, ())


def _north():
    return NORTH


NORTH = _North()


class HopfPoint(NamedTuple):
    """A point of S^2 x S^1: unit vector ``u`` and circle coordinate ``s`` in [0, 1)."""

    u: np.ndarray
    s: float


def _check_direction(direction: str) -> None:
    if direction not in (FORWARD, INVERSE):
        raise ValueError(f"direction must be {FORWARD!r} or {INVERSE!r}, got {direction!r}")


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a point of R^3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def homothety(p, direction: str = FORWARD) -> np.ndarray:
    """Apply h(x) = x/2 (forward) or its inverse x -> 2x.

    Works on single points and on ``(N, 3)`` batches; scaling by a power of
    two is exact in binary floating point, so the round trip is bit-exact.
    """
    _check_direction(direction)
    arr = np.asarray(p, dtype=float)
    return arr * 0.5 if direction == FORWARD else arr * 2.0


def wrap_unit(s):
    """Reduce to [0, 1) with values within WRAP_TOL of 1 sent to 0."""
    s = np.asarray(s, dtype=float)
    r = s - np.floor(s)
    r = np.where(r >= 1.0 - WRAP_TOL, 0.0, r)
    return float(r) if r.ndim == 0 else r


def project_p(p) -> HopfPoint:
    """Covering projection R^3 \\ O -> S^2 x S^1, x -> (x/|x|, log2|x| mod 1)."""
    x = as_point(p)
    nrm = float(np.linalg.norm(x))
    if nrm <= ORIGIN_GUARD:
        raise OriginNotCovered("the origin has no image under the covering projection")
    return HopfPoint(x / nrm, wrap_unit(math.log2(nrm)))


def project_p_batch(points) -> tuple[np.ndarray, np.ndarray]:
    """Vectorised :func:`project_p`; returns ``(u, s)`` arrays."""
    x = np.asarray(points, dtype=float)
    nrm = np.linalg.norm(x, axis=-1)
    if np.any(nrm <= ORIGIN_GUARD):
        raise OriginNotCovered("the origin has no image under the covering projection")
    return x / nrm[..., None], wrap_unit(np.log2(nrm))


def hopf_embed(u, s) -> np.ndarray:
    """Embed S^2 x S^1 in R^5 (unit circle scaled to circumference 1).

    Euclidean distance in this embedding is the metric used for Hausdorff
    comparisons of curves in S^2 x S^1.
    """
    u = np.asarray(u, dtype=float)
    s = np.asarray(s, dtype=float)
    ang = 2.0 * np.pi * s
    c = np.stack([np.cos(ang), np.sin(ang)], axis=-1) / (2.0 * np.pi)
    return np.concatenate([u, c], axis=-1)


def stereo(p, direction: str = FORWARD):
    """Stereographic projection from the north pole N = (0, 0, 0, 1).

    forward: S^3 \\ N -> R^3, inverse: R^3 -> S^3 \\ N.  The inverse maps
    :data:`NORTH` to itself so callers can push the symbolic pole through.
    """
    _check_direction(direction)
    if direction == FORWARD:
        if p is NORTH:
            raise NorthPole("the north pole has no stereographic image")
        x = np.asarray(p, dtype=float)
        if x.shape != (4,):
            raise ValueError(f"expected a point of S^3 in R^4, got shape {x.shape}")
        denom = 1.0 - x[3]
        if denom <= 0.0 or np.allclose(x, (0.0, 0.0, 0.0, 1.0), atol=1e-15):
            raise NorthPole("the north pole has no stereographic image")
        return x[:3] / denom
    if p is NORTH:
        return NORTH
    y = as_point(p)
    q = float(y @ y)
    return np.concatenate([2.0 * y, [q - 1.0]]) / (q + 1.0)


def inversion(y) -> np.ndarray:
    """The chart change x -> x/|x|^2 between the two stereographic charts."""
    y = np.asarray(y, dtype=float)
    return y / np.sum(y * y, axis=-1, keepdims=True)


def linking_number(a, b) -> float:
    """Gauss linking integral of two closed polylines (midpoint rule).

    Both inputs are (m, 3) vertex arrays; the closing segment back to the
    first vertex is implied.  The result is a float close to an integer
    when the polylines are fine enough and well separated.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    da = np.roll(a, -1, axis=0) - a
    db = np.roll(b, -1, axis=0) - b
    r = (a + 0.5 * da)[:, None, :] - (b + 0.5 * db)[None, :, :]
    dist = np.linalg.norm(r, axis=-1)
    num = np.einsum("ijk,ijk->ij", r, np.cross(da[:, None, :], db[None, :, :]))
    return float(np.sum(num / dist ** 3) / (4.0 * np.pi))
