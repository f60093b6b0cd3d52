"""Generalized Mazur knots as h-equivariant curves in R^3 \\ O, and their tube charts.

The lifted knot is written as

    gamma(t) = 2**(-t) * Rz(2*pi*w*t) @ c(t)

with ``c`` a 1-periodic cubic spline in R^3 and ``w`` the winding of the
curve around the x3 axis (0 for the standard knot, 1 otherwise).  Because
``Rz`` has period 1 and the prefactor halves under t -> t+1, the identity
gamma(t+1) = h(gamma(t)) holds by construction.  All evaluations reduce t
to its fractional part and rescale with ``ldexp`` so the identity is exact
up to a single rounding.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.spatial import cKDTree

from .errors import InfeasibleSpec, OutsideTube
from .geometry import FORWARD, INVERSE, ORIGIN_GUARD, _check_direction, as_point, linking_number

CONTROL_POINTS_VERSION = 1
LN2 = math.log(2.0)
_J = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]])

# shape of the hooks, in units of the smallest anchor gap (angles) or of the
# shell K in log2-radius (depths)
HOOK_LO = 0.25
HOOK_HI = 0.75
OVERLAP = 0.22
INSET = 0.22
LIFT = 0.3


@dataclass(frozen=True)
class KnotSpec:
    """Parameters of the generalized Mazur knot with n clasps.

    ``anchors`` are the angles of the 2n+1 anchor points on the unit circle
    of the x1x2-plane, in radians.  ``control_points`` optionally pins the
    spline data (see :func:`mazur_control_points`); when absent it is
    generated from the anchors.
    """

    n: int
    anchors: tuple[float, ...]
    clearance: float
    tube_radius: float
    smoothing: float = 0.6
    control_points: dict | None = field(default=None, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise InfeasibleSpec(f"n must be a nonnegative integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "anchors", tuple(float(a) for a in self.anchors))
        a = self.anchors
        if len(a) != 2 * self.n + 1:
            raise InfeasibleSpec(f"need {2 * self.n + 1} anchors for n={self.n}, got {len(a)}")
        if any(not (0.0 <= x < 2.0 * math.pi) for x in a):
            raise InfeasibleSpec("anchor angles must lie in [0, 2*pi)")
        if any(y <= x for x, y in zip(a, a[1:])):
            raise InfeasibleSpec("anchors must be strictly increasing (counter-clockwise order)")
        if not (self.clearance > 0 and self.tube_radius > 0):
            raise InfeasibleSpec("clearance and tube_radius must be positive")
        if not self.tube_radius < self.clearance / 2:
            raise InfeasibleSpec("tube_radius must be below clearance/2")
        if not (0.0 < self.smoothing <= 1.0):
            raise InfeasibleSpec("smoothing must lie in (0, 1]")

    @classmethod
    def standard(cls, n: int, **overrides) -> "KnotSpec":
        """Equally spaced anchors starting at angle 0, with shipped defaults."""
        anchors = tuple(2.0 * math.pi * k / (2 * n + 1) for k in range(2 * n + 1))
        if n == 0:
            kw = dict(clearance=2.0, tube_radius=0.6)
        else:
            gap = 2.0 * math.pi / (2 * n + 1)
            kw = dict(clearance=0.1 * gap, tube_radius=min(0.02, 0.01 * gap))
        kw.update(overrides)
        return cls(n=n, anchors=anchors, **kw)

    @classmethod
    def from_json(cls, doc: dict | str | Path) -> "KnotSpec":
        """Build from the JSON document ``{"n", "anchors_deg", "clearance", ...}``."""
        if isinstance(doc, (str, Path)):
            doc = json.loads(Path(doc).read_text())
        doc = dict(doc)
        try:
            n = doc["n"]
        except KeyError as exc:
            raise InfeasibleSpec("knot document needs an 'n' field") from exc
        base = cls.standard(int(n))
        if "anchors_deg" in doc:
            anchors = tuple(math.radians(x) for x in doc["anchors_deg"])
        elif "anchors" in doc:
            anchors = tuple(doc["anchors"])
        else:
            anchors = base.anchors
        return cls(
            n=n,
            anchors=anchors,
            clearance=float(doc.get("clearance", base.clearance)),
            tube_radius=float(doc.get("tube_radius", base.tube_radius)),
            smoothing=float(doc.get("smoothing", base.smoothing)),
            control_points=doc.get("control_points"),
        )

    def to_json(self) -> dict:
        doc = {
            "n": self.n,
            "anchors_deg": [math.degrees(a) for a in self.anchors],
            "clearance": self.clearance,
            "tube_radius": self.tube_radius,
            "smoothing": self.smoothing,
        }
        if self.control_points is not None:
            doc["control_points"] = self.control_points
        return doc


# --------------------------------------------------------------------------
# control polygon


def _hook_polygon(spec: KnotSpec):
    """Vertices (theta, phi, S) of one period of the knot, plus anchor labels.

    S is -log2 of the radius, so the unit shell is 0 <= S <= 1 and halving adds 1
    to S.  The period runs from the last anchor (S=0) to its half (S=1, excluded):
    B, then h(A_1), A_2, h(A_3), ..., A_{2n}.
    """
    n = spec.n
    th = list(spec.anchors)
    if n == 0:
        return [(th[0], 0.0, 0.0), (th[0], 0.0, 0.5)], {0: "alpha1"}
    two_pi = 2.0 * math.pi
    gaps = [b - a for a, b in zip(th, th[1:])] + [th[0] + two_pi - th[-1]]
    g = min(gaps)
    d_in, d_ov = INSET * g, OVERLAP * g
    lift = min(LIFT * g, 0.6)
    lo, hi = HOOK_LO, HOOK_HI
    TH = [x + two_pi for x in th]

    verts = [(th[-1], 0.0, 0.0), (th[-1] + d_in, 0.0, 0.2), (TH[0] - d_in, 0.0, 0.8)]
    labels = {0: f"alpha{2 * n + 1}"}
    for j in range(1, n + 1):
        a, b, c = TH[2 * j - 2], TH[2 * j - 1], TH[2 * j]
        labels[len(verts)] = f"h(alpha{2 * j - 1})"
        verts.append((a, 0.0, 1.0))
        # h(A_{2j-1}): planar hook hanging one shell further in
        verts += [(a + d_in, 0.0, 1.2), (a + d_in, 0.0, 1.0 + hi),
                  (b + d_ov, 0.0, 1.0 + hi), (b + d_ov, 0.0, 1.2)]
        labels[len(verts)] = f"h(alpha{2 * j})"
        verts.append((b, 0.0, 1.0))
        # A_{2j}: passes over the tip of A_{2j-1}, pierces its disk, then
        # runs under its far leg
        verts += [(b - d_ov, lift, 0.85), (b - d_ov, lift, 0.62),
                  (b - d_ov, 0.0, 0.45), (b - d_ov, -lift, 0.33), (b - d_ov, -lift, lo),
                  (c - d_in, -lift, lo), (c - d_in, 0.0, 0.55), (c - d_in, 0.0, 0.8)]
    # the halved last anchor starts the next period
    return verts, labels


def _log_length(p, q) -> float:
    ph = 0.5 * (p[1] + q[1])
    return math.sqrt(((q[0] - p[0]) * math.cos(ph)) ** 2 + (q[1] - p[1]) ** 2 + (LN2 * (q[2] - p[2])) ** 2)


def _densify(verts, labels, smoothing, wind, spacing=0.02):
    """Round the polygon corners and resample it densely.

    Every corner is replaced by a quadratic Bezier fillet whose legs have
    log-radius length up to ``0.3 * smoothing``; the straight runs between
    fillets are sampled at most ``spacing`` apart.  Anchor vertices are
    first straightened (pinned between two collinear helpers) so the curve
    still passes through them exactly.
    """
    fillet = 0.3 * smoothing
    n = len(verts)

    def vert(k):
        return np.array(_shift(verts[k % n], k // n, wind))

    period = np.array(_shift((0.0, 0.0, 0.0), 1, wind))
    pts, pinned, out_labels, tail = [], set(), {}, []
    for k in range(n):
        v = vert(k)
        if k in labels:
            p, q = vert(k - 1), vert(k + 1)
            ell = min(0.5 * fillet, 0.25 * _log_length(p, v), 0.25 * _log_length(v, q))
            off = (q - p) * (ell / _log_length(p, q))
            # keep the period starting exactly at vertex 0
            if k == 0:
                tail.append(v - off + period)
            else:
                pts.append(v - off)
            pinned.add(len(pts))
            out_labels[len(pts)] = labels[k]
            pts.append(v)
            pts.append(v + off)
        else:
            pts.append(v)
    pts += tail
    m = len(pts)

    def pt(k):
        return pts[k % m] + (k // m) * period

    def legs(k):
        if k % m in pinned:
            return pt(k), pt(k)
        p, v, q = pt(k - 1), pt(k), pt(k + 1)
        a = min(fillet, 0.45 * _log_length(p, v))
        b = min(fillet, 0.45 * _log_length(v, q))
        a, b = min(a, b), min(a, b)
        return v + (p - v) * (a / _log_length(p, v)), v + (q - v) * (b / _log_length(v, q))

    out, labels_out = [], {}
    for k in range(m):
        if k in out_labels:
            labels_out[len(out)] = out_labels[k]
        start, end = legs(k)
        v = pt(k)
        if k in pinned:
            out.append(tuple(v))
        else:
            count = max(6, int(math.ceil(2.0 * _log_length(start, end) / spacing)))
            for u in np.arange(count) / count:
                out.append(tuple((1 - u) ** 2 * start + 2 * u * (1 - u) * v + u ** 2 * end))
        nxt, _ = legs(k + 1)
        length = _log_length(end, nxt)
        steps = int(math.ceil(length / spacing))
        for u in np.arange(1 if k in pinned else 0, steps) / max(steps, 1):
            out.append(tuple(end + u * (nxt - end)))
    return out, labels_out


def _shift(v, k, wind=1):
    th, ph, s = v
    return (th + 2.0 * math.pi * k * wind, ph, s + k)


def _to_xyz(v) -> np.ndarray:
    th, ph, s = v
    rho = 2.0 ** (-s)
    return rho * np.array([math.cos(ph) * math.cos(th), math.cos(ph) * math.sin(th), math.sin(ph)])


def mazur_control_points(spec: KnotSpec) -> dict:
    """Spline control data for ``spec``: parameters, points in R^3, anchor labels.

    The parameter is cumulative chord length in the log-radius metric
    (d theta cos phi, d phi, ln2 dS), normalised to one period.
    """
    wind = 0 if spec.n == 0 else 1
    verts, labels = _hook_polygon(spec)
    verts, labels = _densify(verts, labels, spec.smoothing, wind)
    closed = verts + [_shift(verts[0], 1, wind)]
    seg = np.array([_log_length(p, q) for p, q in zip(closed, closed[1:])])
    t = np.concatenate([[0.0], np.cumsum(seg)])
    t /= t[-1]
    xyz = np.array([_to_xyz(v) for v in verts])
    return {
        "version": CONTROL_POINTS_VERSION,
        "wind": wind,
        "t": [float(x) for x in t[:-1]],
        "xyz": xyz.tolist(),
        "anchors": {labels[i]: float(t[i]) for i in sorted(labels)},
    }


# --------------------------------------------------------------------------
# curve


def _rz(angle):
    c, s = np.cos(angle), np.sin(angle)
    out = np.zeros(np.shape(angle) + (3, 3))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    out[..., 2, 2] = 1.0
    return out


def _split(t):
    t = np.asarray(t, dtype=float)
    k = np.floor(t)
    return t - k, k.astype(np.int64)


class KnotCurve:
    """The lifted knot gamma: R -> R^3 \\ O with gamma(t+1) = h(gamma(t)).

    The fundamental window t in [0, 1) is traversed as B, h(A_1), A_2, ...,
    A_{2n}; :meth:`arcs` reports where each arc of the shell K sits.
    """

    def __init__(self, spec: KnotSpec, control: dict):
        if control.get("version") != CONTROL_POINTS_VERSION:
            raise InfeasibleSpec(f"unsupported control point version {control.get('version')!r}")
        self.spec = spec
        self.n = spec.n
        self.control = control
        self.wind = int(control["wind"])
        self._omega = 2.0 * math.pi * self.wind
        tk = np.asarray(control["t"], dtype=float)
        pk = np.asarray(control["xyz"], dtype=float)
        if tk[0] != 0.0 or np.any(np.diff(tk) <= 0) or tk[-1] >= 1.0:
            raise InfeasibleSpec("control parameters must increase within [0, 1)")
        self.anchor_t = dict(control["anchors"])
        # periodic residual c(t) = 2**t Rz(-omega t) gamma(t)
        ck = (2.0 ** tk)[:, None] * np.einsum("kij,kj->ki", _rz(-self._omega * tk), pk)
        tt = np.append(tk, 1.0)
        cc = np.vstack([ck, ck[:1]])
        if np.ptp(cc, axis=0).max() < 1e-14:
            cc = np.repeat(cc[:1], len(tt), axis=0)
        self._c = CubicSpline(tt, cc, bc_type="periodic", axis=0)
        self._dc = self._c.derivative(1)
        self._d2c = self._c.derivative(2)

    # evaluation -----------------------------------------------------------

    def _base(self, tau, order=0):
        """Value (order 0..2) of the curve on the reference period."""
        tau = np.asarray(tau, dtype=float)
        scale = (2.0 ** (-tau))[..., None]
        rot = _rz(self._omega * tau)
        c = self._c(tau)
        if order == 0:
            v = c
        else:
            a = -LN2
            Dc = a * c + self._omega * (c @ _J.T)
            c1 = self._dc(tau)
            if order == 1:
                v = Dc + c1
            else:
                DDc = a * Dc + self._omega * (Dc @ _J.T)
                Dc1 = a * c1 + self._omega * (c1 @ _J.T)
                v = DDc + 2.0 * Dc1 + self._d2c(tau)
        return scale * np.einsum("...ij,...j->...i", rot, v)

    def gamma(self, t, order: int = 0) -> np.ndarray:
        """gamma(t) or its first/second t-derivative; vectorised over t."""
        tau, k = _split(t)
        return np.ldexp(self._base(tau, order), -k[..., None])

    def __call__(self, t):
        return self.gamma(t)

    def tangent(self, t) -> np.ndarray:
        d = self.gamma(t, 1)
        return d / np.linalg.norm(d, axis=-1, keepdims=True)

    # geometry bookkeeping --------------------------------------------------

    def anchor_point(self, i: int) -> np.ndarray:
        """Anchor point i on the unit circle (1-based)."""
        th = self.spec.anchors[i - 1]
        return np.array([math.cos(th), math.sin(th), 0.0])

    def arcs(self) -> dict[str, tuple[float, float, int]]:
        """Map arc label -> (t_start, t_end, k) with h^k(gamma([t_start, t_end])) in K."""
        n = self.n
        if n == 0:
            return {"B": (0.0, 1.0, 0)}
        at = self.anchor_t
        out = {"B": (0.0, at["h(alpha1)"], 0)}
        for j in range(1, n + 1):
            t0 = at[f"h(alpha{2 * j - 1})"]
            t1 = at[f"h(alpha{2 * j})"]
            t2 = at[f"h(alpha{2 * j + 1})"] if j < n else 1.0
            out[f"A{2 * j - 1}"] = (t0, t1, -1)
            out[f"A{2 * j}"] = (t1, t2, 0)
        return out

    def arc_samples(self, label: str, count: int = 400) -> np.ndarray:
        t0, t1, k = self.arcs()[label]
        pts = self.gamma(np.linspace(t0, t1, count))
        return np.ldexp(pts, -k)

    def clasp_loop(self, k: int, count: int = 2000) -> np.ndarray:
        """Closed polyline A_k plus the circle arc joining its endpoints.

        Odd arcs close along the unit circle, even arcs along the circle of
        radius 1/2 (their endpoints sit on the inner boundary of K).
        """
        pts = self.arc_samples(f"A{k}", count)
        a, b = self.spec.anchors[k - 1], self.spec.anchors[k % len(self.spec.anchors)]
        if b <= a:
            b += 2.0 * math.pi
        rad = 1.0 if k % 2 else 0.5
        ang = np.linspace(b, a, count // 4)[1:-1]
        return np.vstack([pts, rad * np.stack([np.cos(ang), np.sin(ang), np.zeros_like(ang)], axis=1)])

    def linking_matrix(self, count: int = 2000) -> np.ndarray:
        """Pairwise linking numbers of the clasp loops (zero diagonal)."""
        m = 2 * self.n
        loops = [self.clasp_loop(k, count) for k in range(1, m + 1)]
        out = np.zeros((m, m))
        for i in range(m):
            for j in range(i + 1, m):
                out[i, j] = out[j, i] = linking_number(loops[i], loops[j])
        return out

    def sample_window(self, count: int = 1024) -> np.ndarray:
        return self.gamma(np.arange(count) / count)

    def equivariance_residual(self, count: int = 1024) -> float:
        t = np.arange(count) / count * 3.0 - 1.0
        return float(np.max(np.linalg.norm(self.gamma(t + 1.0) - 0.5 * self.gamma(t), axis=-1)))

    def min_speed(self, count: int = 4096) -> float:
        t = np.arange(count) / count
        return float(np.min(np.linalg.norm(self.gamma(t, 1), axis=-1)))

    def join_mismatch(self) -> float:
        """Largest relative tangent jump across the anchor joins and the period seam.

        Compares the analytic derivative just left and just right of each join.
        """
        eps = 1e-12
        ts = np.array(sorted(set(self.anchor_t.values()) | {0.0, 1.0}))
        left = self.gamma(ts - eps, 1)
        right = self.gamma(ts + eps, 1)
        return float(np.max(np.linalg.norm(left - right, axis=1) / np.linalg.norm(right, axis=1)))

    def min_strand_distance(self, clearance: float, count: int = 1500) -> float:
        """Min distance between window samples that are not adjacent along the curve.

        Samples count as adjacent when their arclength separation is below
        ``clearance`` or their parameters differ by less than 0.05.
        """
        t = np.arange(count) / count
        pts = self.gamma(t)
        seg = np.linalg.norm(np.diff(np.vstack([pts, self.gamma(1.0)]), axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)[:-1]])
        dist = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)
        far = (np.abs(s[:, None] - s[None, :]) >= clearance) & (np.abs(t[:, None] - t[None, :]) >= 0.05)
        if not far.any():
            return math.inf
        return float(dist[far].min())


def build_knot(spec: KnotSpec) -> KnotCurve:
    """Realise the lifted knot for ``spec`` and check the clearance requirement."""
    control = spec.control_points if spec.control_points is not None else mazur_control_points(spec)
    curve = KnotCurve(spec, control)
    if spec.n > 0:
        gap = curve.min_strand_distance(spec.clearance)
        if gap < spec.clearance / 2:
            raise InfeasibleSpec(
                f"strands come within {gap:.4g} of each other; clearance {spec.clearance} cannot be met"
            )
    return curve


def genus_of(spec: KnotSpec) -> int:
    """Genus of the Hopf knot (a stored invariant: it equals n)."""
    return spec.n


# --------------------------------------------------------------------------
# tube chart


def _rmf_frame(curve: KnotCurve, samples: int) -> np.ndarray:
    """Rotation-minimising frame over one period, closed up by spreading the holonomy."""
    tau = np.arange(samples + 1) / samples
    x = curve._base(tau)
    T = curve._base(tau, 1)
    T /= np.linalg.norm(T, axis=1, keepdims=True)
    T0 = T[0]
    ref = np.array([0.0, 0.0, 1.0]) if abs(T0[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    r = ref - (ref @ T0) * T0
    r /= np.linalg.norm(r)
    frames = np.empty_like(T)
    frames[0] = r
    # double reflection on the scaled-out curve (the x-axis direction is
    # periodic, so the frame can be computed on any period representative)
    for i in range(samples):
        v1 = x[i + 1] - x[i]
        c1 = v1 @ v1
        rl = r - (2.0 / c1) * (v1 @ r) * v1
        tl = T[i] - (2.0 / c1) * (v1 @ T[i]) * v1
        v2 = T[i + 1] - tl
        c2 = v2 @ v2
        r = rl - (2.0 / c2) * (v2 @ rl) * v2 if c2 > 0 else rl
        r -= (r @ T[i + 1]) * T[i + 1]
        r /= np.linalg.norm(r)
        frames[i + 1] = r
    # tangent is periodic; measure how far the frame turned around it
    s0 = np.cross(T[0], frames[0])
    hol = math.atan2(frames[-1] @ s0, frames[-1] @ frames[0])
    ang = -hol * tau
    s = np.cross(T, frames)
    return np.cos(ang)[:, None] * frames + np.sin(ang)[:, None] * s


class TubeChart:
    """Equivariant tubular chart from the knot tube onto the cylinder x2^2 + x3^2 <= 4.

    A tube point gamma(t) + a e1(t) + b e2(t) with a^2 + b^2 <= r(t)^2 maps
    to (t, 2a/r(t), 2b/r(t)); r(t) = r0 2**(-t), so halving p adds (1, 0, 0) to its chart image.
    """

    SHELL_LO, SHELL_HI = 0.5, 1.0

    def __init__(self, curve: KnotCurve, tube_radius: float | None = None, frame_samples: int = 4096):
        self.curve = curve
        self.r0 = float(curve.spec.tube_radius if tube_radius is None else tube_radius)
        E = _rmf_frame(curve, frame_samples)
        tau = np.arange(frame_samples + 1) / frame_samples
        E[-1] = E[0]
        self._E = CubicSpline(tau, E, bc_type="periodic", axis=0)
        self._build_index()

    # frame and radius ------------------------------------------------------

    def radius(self, t):
        tau, k = _split(t)
        return np.ldexp(self.r0 * 2.0 ** (-tau), -k)

    def frame(self, t) -> tuple[np.ndarray, np.ndarray]:
        """Orthonormal normal pair (e1, e2); periodic in t."""
        tau, _ = _split(t)
        T = self.curve._base(tau, 1)
        T = T / np.linalg.norm(T, axis=-1, keepdims=True)
        E = self._E(tau)
        e1 = E - np.sum(E * T, axis=-1, keepdims=True) * T
        e1 /= np.linalg.norm(e1, axis=-1, keepdims=True)
        return e1, np.cross(T, e1)

    # parameter search ------------------------------------------------------

    def _build_index(self):
        """KD-tree over curve samples whose tube can meet the shell 1/2 <= |q| < 1."""
        probe = np.arange(2048) / 2048
        g = np.linalg.norm(self.curve.gamma(probe), axis=1)
        r = self.radius(probe)
        if np.any(r >= g):
            raise InfeasibleSpec("tube radius too large: the tube would swallow the origin")
        lo, hi = self.SHELL_LO * 0.95, self.SHELL_HI * 1.05
        # period t+k has norms scaled by 2**-k; keep every k that can reach the shell
        k_lo = int(math.floor(np.min(np.log2((g - r) / hi))))
        k_hi = int(math.ceil(np.max(np.log2((g + r) / lo))))
        t_lo, t_hi = float(k_lo - 1), float(k_hi + 1)
        per = 2048
        ts = np.arange(int(round((t_hi - t_lo) * per)) + 1) / per + t_lo
        pts = self.curve.gamma(ts)
        keep = np.linalg.norm(pts, axis=1) - self.radius(ts) < self.SHELL_HI * 1.2
        keep &= np.linalg.norm(pts, axis=1) + self.radius(ts) > self.SHELL_LO * 0.8
        self._ts = ts[keep]
        self._tree = cKDTree(pts[keep])
        spacing = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        self._query_bound = float(np.max(self.radius(self._ts)) + spacing.max() + 1e-9)

    def _foot(self, q: np.ndarray, t0: np.ndarray, iters: int = 40) -> np.ndarray:
        """Newton on (q - gamma(t)) . gamma'(t) = 0 starting from t0."""
        t = t0.copy()
        active = np.ones(len(t), dtype=bool)
        for _ in range(iters):
            if not active.any():
                break
            ta = t[active]
            qa = q[active]
            g0 = self.curve.gamma(ta)
            g1 = self.curve.gamma(ta, 1)
            g2 = self.curve.gamma(ta, 2)
            d = qa - g0
            F = np.sum(d * g1, axis=1)
            dF = -np.sum(g1 * g1, axis=1) + np.sum(d * g2, axis=1)
            step = F / dF
            step = np.clip(step, -0.02, 0.02)
            t[active] = ta - step
            done = np.abs(step) <= 1e-15 * np.maximum(1.0, np.abs(ta)) + 1e-16
            idx = np.flatnonzero(active)
            active[idx[done]] = False
        return t

    def locate(self, points) -> tuple[np.ndarray, np.ndarray]:
        """Chart coordinates and tube membership for an ``(N, 3)`` batch.

        Returns ``(y, inside)``; rows with ``inside`` False carry NaN.
        """
        p = np.atleast_2d(np.asarray(points, dtype=float))
        N = len(p)
        y = np.full((N, 3), np.nan)
        inside = np.zeros(N, dtype=bool)
        nrm = np.linalg.norm(p, axis=1)
        ok = nrm > ORIGIN_GUARD
        if not ok.any():
            return y, inside
        idx = np.flatnonzero(ok)
        _, e = np.frexp(nrm[idx])
        q = np.ldexp(p[idx], -e[:, None])
        dist, nn = self._tree.query(q, distance_upper_bound=self._query_bound)
        hit = np.isfinite(dist)
        if not hit.any():
            return y, inside
        idx, q, e, nn = idx[hit], q[hit], e[hit], nn[hit]
        tq = self._foot(q, self._ts[nn])
        foot = self.curve.gamma(tq)
        off = q - foot
        e1, e2 = self.frame(tq)
        r = self.radius(tq)
        a = np.sum(off * e1, axis=1)
        b = np.sum(off * e2, axis=1)
        resid = np.abs(np.sum(off * self.curve.tangent(tq), axis=1))
        rho2 = a * a + b * b
        good = (rho2 <= r * r * (1.0 + 1e-12)) & (resid <= 1e-10 * np.maximum(1.0, np.sqrt(rho2)) + 1e-12)
        sel = idx[good]
        y[sel, 0] = tq[good] - e[good]
        y[sel, 1] = 2.0 * a[good] / r[good]
        y[sel, 2] = 2.0 * b[good] / r[good]
        inside[sel] = True
        return y, inside

    def embed(self, y) -> np.ndarray:
        """Inverse chart: cylinder coordinates -> R^3 (vectorised)."""
        y = np.atleast_2d(np.asarray(y, dtype=float))
        t = y[:, 0]
        e1, e2 = self.frame(t)
        r = self.radius(t)
        return self.curve.gamma(t) + (0.5 * r)[:, None] * (y[:, 1:2] * e1 + y[:, 2:3] * e2)

    def contains(self, points) -> np.ndarray:
        return self.locate(points)[1]

    # diagnostics -----------------------------------------------------------

    def frame_orthonormality(self, count: int = 1024) -> float:
        t = np.arange(count) / count
        e1, e2 = self.frame(t)
        T = self.curve.tangent(t)
        M = np.stack([T, e1, e2], axis=1)
        G = np.einsum("nij,nkj->nik", M, M)
        return float(np.max(np.abs(G - np.eye(3))))

    def disjointness_margin(self, count: int = 1200) -> float:
        """Smallest (distance - r - r') / min(r, r') over well-separated centre pairs.

        Pairs are compared across the window and its neighbours t +/- 1;
        centres closer along the curve than the local tube diameter (plus
        |dt| < 0.05) are treated as the same strand and skipped.  A value
        of at least 1/4 means the tube is self-disjoint with the required
        margin; locally the tube must also satisfy curvature * r < 1, which
        :meth:`max_curvature_ratio` reports.
        """
        t = np.arange(count) / count
        tt = np.concatenate([t - 1.0, t, t + 1.0])
        pts = self.curve.gamma(tt)
        r = self.radius(tt)
        seg = np.linalg.norm(np.diff(pts, axis=0), axis=1)
        s = np.concatenate([[0.0], np.cumsum(seg)])
        w = slice(count, 2 * count)
        d = np.linalg.norm(pts[w][:, None, :] - pts[None, :, :], axis=-1)
        rr = r[w][:, None] + r[None, :]
        rmin = np.minimum(r[w][:, None], r[None, :])
        arc = np.abs(s[w][:, None] - s[None, :])
        far = (arc > 2.0 * rr) & (np.abs(tt[w][:, None] - tt[None, :]) >= 0.05)
        if not far.any():
            return math.inf
        return float(np.min(((d - rr) / rmin)[far]))

    def max_curvature_ratio(self, count: int = 4096) -> float:
        t = np.arange(count) / count
        g1 = self.curve.gamma(t, 1)
        g2 = self.curve.gamma(t, 2)
        kappa = np.linalg.norm(np.cross(g1, g2), axis=1) / np.linalg.norm(g1, axis=1) ** 3
        return float(np.max(kappa * self.radius(t)))


def zeta(chart: TubeChart, p, direction: str = FORWARD) -> np.ndarray:
    """Tube chart on a single point: R^3 tube -> cylinder (forward) or back."""
    _check_direction(direction)
    x = as_point(p)
    if direction == INVERSE:
        if x[1] ** 2 + x[2] ** 2 > 4.0 * (1.0 + 1e-12):
            raise OutsideTube("cylinder point lies outside x2^2 + x3^2 <= 4")
        return chart.embed(x)[0]
    y, inside = chart.locate(x)
    if not inside[0]:
        raise OutsideTube(f"point {x.tolist()} is not inside the knot tube")
    return y[0]


# --------------------------------------------------------------------------
# knot documents


DATA_DIR = Path(__file__).with_name("data")


def shipped_knot(n: int) -> KnotSpec:
    """The knot spec shipped for ``n`` (falls back to generated control points)."""
    path = DATA_DIR / f"knot_n{n}.json"
    if path.exists():
        return KnotSpec.from_json(path)
    return KnotSpec.standard(n)


def knot_document(spec: KnotSpec) -> dict[str, Any]:
    doc = spec.to_json()
    doc["control_points"] = spec.control_points or mazur_control_points(spec)
    return doc
