"""The model diffeomorphism: a cherry flow planted in the knot tube, the homothety elsewhere.

Coordinates: points of R^3 are the stereographic chart of S^3 with the
north pole N kept as the symbolic :data:`~wildarc.geometry.NORTH`.  Inside
the tube the map is the time-one map of the cherry flow conjugated by the
tube chart, shifted along the cylinder by ``center``; everywhere else
it is the homothety x -> x/2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import EscapedTube, NonSmoothNeighborhood, NoConvergence, StepTooCoarse
from .geometry import (
    FORWARD,
    INVERSE,
    NORTH,
    _check_direction,
    as_point,
    hopf_embed,
    inversion,
    project_p_batch,
    stereo,
)
from .knots import KnotCurve, KnotSpec, TubeChart, build_knot

DEFAULT_STEP = 1.0 / 128.0
CHERRY_CENTER = 0.0
RICHARDSON_TOL = 1e-7
RESIDUAL_TOL = 1e-10
HYPERBOLIC_GAP = 1e-3

SADDLE_CHART = np.array([1.0, 0.0, 0.0])
SINK_CHART = np.array([-1.0, 0.0, 0.0])

# branch codes reported by PiecewiseDiffeo.apply
OUTSIDE, TRANSLATE, FLOW = 0, 1, 2


def cherry_rhs(x) -> np.ndarray:
    """Cherry vector field on the cylinder (single point, exact branch evaluation)."""
    x1, x2, x3 = (float(v) for v in as_point(x))
    s = x1 * x1 + x2 * x2 + x3 * x3
    if s > 4.0:
        return np.array([1.0, 0.0, 0.0])
    d1 = 1.0 - (s - 4.0) ** 2 / 9.0
    if s <= 2.0:
        return np.array([d1, -x2, -x3])
    w = 0.5 * (math.sin(0.5 * math.pi * (s - 3.0)) - 1.0)
    return np.array([d1, w * x2, w * x3])


def cherry_jacobian(x) -> np.ndarray:
    """Analytic derivative of :func:`cherry_rhs` (used by the variational oracle)."""
    x = as_point(x)
    s = float(x @ x)
    J = np.zeros((3, 3))
    if s > 4.0:
        return J
    J[0] = -(4.0 / 9.0) * (s - 4.0) * x
    if s <= 2.0:
        J[1, 1] = J[2, 2] = -1.0
        return J
    arg = 0.5 * math.pi * (s - 3.0)
    w = 0.5 * (math.sin(arg) - 1.0)
    dw = 0.5 * math.pi * math.cos(arg) * x  # gradient of w
    for i in (1, 2):
        J[i] = x[i] * dw
        J[i, i] += w
    return J


@dataclass(frozen=True)
class CherryFlow:
    """Fixed-step RK4 integrator for the cherry field.

    ``step`` must divide 1 so the time-one map lands exactly on t = 1.
    """

    step: float = DEFAULT_STEP

    def __post_init__(self):
        if not self.step > 0:
            raise ValueError("integrator step must be positive")
        n = 1.0 / self.step
        if abs(n - round(n)) > 1e-9:
            raise ValueError(f"integrator step {self.step} does not divide 1")

    @property
    def nsteps(self) -> int:
        return int(round(1.0 / self.step))

    def rhs(self, x) -> np.ndarray:
        return cherry_rhs(x)

    def map(self, z, direction: str = FORWARD, nsteps: int | None = None) -> np.ndarray:
        """Batch time-one map on ``(N, 3)`` chart points."""
        _check_direction(direction)
        sign = 1.0 if direction == FORWARD else -1.0
        z = np.asarray(z, dtype=float).reshape(-1, 3)
        return kernels.flow_batch(z, sign, self.nsteps if nsteps is None else nsteps)

    def richardson(self, z, direction: str = FORWARD) -> float:
        """Largest gap between the step and half-step time-one maps."""
        a = self.map(z, direction)
        b = self.map(z, direction, 2 * self.nsteps)
        return float(np.max(np.linalg.norm(a - b, axis=1), initial=0.0))

    def validate(self, samples: int = 2000, seed: int = 0) -> float:
        """Richardson check on a fixed probe set of the ball; raises StepTooCoarse."""
        rng = np.random.default_rng(seed)
        v = rng.normal(size=(samples, 3))
        v *= (2.2 * rng.uniform(size=samples) ** (1 / 3) / np.linalg.norm(v, axis=1))[:, None]
        worst = max(self.richardson(v, FORWARD), self.richardson(v, INVERSE))
        if worst > RICHARDSON_TOL:
            raise StepTooCoarse(f"step {self.step} vs step/2 differ by {worst:.3g} > {RICHARDSON_TOL}")
        return worst

    def path(self, z, duration: float = 1.0, substeps: int = 8) -> np.ndarray:
        """Points along one trajectory at every RK4 substep (refined step for drawing)."""
        z = as_point(z).copy()
        n = int(round(duration * self.nsteps * substeps))
        h = duration / n
        out = np.empty((n + 1, 3))
        out[0] = z
        f = kernels.cherry_rhs_batch
        x = z[None, :]
        for i in range(n):
            k1 = f(x)
            k2 = f(x + 0.5 * h * k1)
            k3 = f(x + 0.5 * h * k2)
            k4 = f(x + h * k3)
            x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
            out[i + 1] = x[0]
        return out


def time_one_map(flow: CherryFlow, x, direction: str = FORWARD, check: bool = False) -> np.ndarray:
    """phi^1 (or its inverse) at a single chart point; optional Richardson guard."""
    z = as_point(x)[None, :]
    if check:
        gap = flow.richardson(z, direction)
        if gap > RICHARDSON_TOL:
            raise StepTooCoarse(f"Richardson gap {gap:.3g} exceeds {RICHARDSON_TOL}")
    return flow.map(z, direction)[0]


def _segment_misses_ball(z: np.ndarray, sign: float) -> np.ndarray:
    x = z[:, 0]
    perp = z[:, 1] ** 2 + z[:, 2] ** 2
    c = np.clip(0.0, np.minimum(x, x + sign), np.maximum(x, x + sign))
    return perp + c * c > 4.0


class PiecewiseDiffeo:
    """The assembled model map on the stereographic chart of S^3."""

    north = NORTH

    def __init__(self, chart: TubeChart, flow: CherryFlow | None = None, center: float = CHERRY_CENTER,
                 validate: bool = True):
        self.chart = chart
        self.flow = flow if flow is not None else CherryFlow()
        self.center = float(center)
        self._shift = np.array([self.center, 0.0, 0.0])
        if validate:
            self.flow.validate()

    @classmethod
    def for_spec(cls, spec: KnotSpec, step: float = DEFAULT_STEP, center: float = CHERRY_CENTER,
                 validate: bool = True) -> "PiecewiseDiffeo":
        curve = build_knot(spec)
        return cls(TubeChart(curve), CherryFlow(step), center, validate)

    @property
    def curve(self) -> KnotCurve:
        return self.chart.curve

    @property
    def n(self) -> int:
        return self.curve.n

    # construction data ------------------------------------------------------

    def chart_to_space(self, z) -> np.ndarray:
        """Cherry coordinates (ball centred at 0) -> R^3."""
        z = np.atleast_2d(np.asarray(z, dtype=float))
        return self.chart.embed(z + self._shift)

    def space_to_chart(self, p) -> tuple[np.ndarray, np.ndarray]:
        y, inside = self.chart.locate(p)
        return y - self._shift, inside

    @property
    def omega_bar(self) -> np.ndarray:
        return self.chart_to_space(SINK_CHART)[0]

    @property
    def sigma_bar(self) -> np.ndarray:
        return self.chart_to_space(SADDLE_CHART)[0]

    # evaluation -------------------------------------------------------------

    def apply(self, points, direction: str = FORWARD, return_branch: bool = False):
        """Vectorised f (or f^-1) on an ``(N, 3)`` batch of finite points."""
        _check_direction(direction)
        p = np.atleast_2d(np.asarray(points, dtype=float))
        out = np.ldexp(p, -1 if direction == FORWARD else 1)
        branch = np.full(len(p), OUTSIDE, dtype=np.int8)
        z, inside = self.space_to_chart(p)
        idx = np.flatnonzero(inside)
        if idx.size:
            sign = 1.0 if direction == FORWARD else -1.0
            zi = z[idx]
            free = _segment_misses_ball(zi, sign)
            branch[idx[free]] = TRANSLATE
            moving = idx[~free]
            if moving.size:
                branch[moving] = FLOW
                out[moving] = self.chart_to_space(self.flow.map(zi[~free], direction))
        if return_branch:
            return out, branch
        return out

    def __call__(self, x, direction: str = FORWARD):
        if x is NORTH:
            return NORTH
        return self.apply(as_point(x)[None, :], direction)[0]

    def on_sphere(self, w, direction: str = FORWARD) -> np.ndarray:
        """f on S^3 in R^4 coordinates (north pole (0,0,0,1) is fixed)."""
        w = np.asarray(w, dtype=float)
        if np.allclose(w, [0.0, 0.0, 0.0, 1.0], atol=0.0):
            return w.copy()
        x = stereo(w, FORWARD)
        return np.asarray(stereo(self(x, direction), INVERSE), dtype=float)


def model_map(f: PiecewiseDiffeo, x, direction: str = FORWARD):
    """f(x) for a point of R^3 or the symbolic NORTH."""
    return f(x, direction)


# --------------------------------------------------------------------------
# derivatives and fixed points


def _stencil(x: np.ndarray, step: float) -> np.ndarray:
    E = np.eye(3) * step
    return np.concatenate([x + E, x - E])


def _fd(values: np.ndarray, step: float) -> np.ndarray:
    return ((values[:3] - values[3:]) / (2.0 * step)).T


def jacobian(f, x, step: float = 1e-5, tol: float = 1e-3) -> np.ndarray:
    """Central-difference Jacobian with a step / step/2 consistency check.

    For a :class:`PiecewiseDiffeo` the stencil must not straddle the tube
    boundary while part of it is moved by the flow; that raises
    NonSmoothNeighborhood, as does a failed consistency check.
    """
    x = as_point(x)
    if isinstance(f, PiecewiseDiffeo):
        pts = np.concatenate([_stencil(x, step), _stencil(x, 0.5 * step)])
        vals, branch = f.apply(pts, return_branch=True)
        outside = branch == OUTSIDE
        if outside.any() and not outside.all() and (branch == FLOW).any():
            raise NonSmoothNeighborhood(f"stencil at {x.tolist()} straddles the tube boundary")
        v1, v2 = vals[:6], vals[6:]
    else:
        v1 = np.array([f(p) for p in _stencil(x, step)], dtype=float)
        v2 = np.array([f(p) for p in _stencil(x, 0.5 * step)], dtype=float)
    J1 = _fd(v1, step)
    J2 = _fd(v2, 0.5 * step)
    if np.max(np.abs(J1 - J2)) > tol * max(1.0, float(np.max(np.abs(J2)))):
        raise NonSmoothNeighborhood(f"finite differences at {x.tolist()} are inconsistent")
    return (4.0 * J2 - J1) / 3.0


def north_jacobian(f: PiecewiseDiffeo, delta: float = 1e-3) -> np.ndarray:
    """Jacobian at N computed in the inversion chart u = y/|y|^2 (N at u = 0)."""
    pts = _stencil(np.zeros(3), delta)
    far = np.array([inversion(u) for u in pts])
    img = f.apply(far)
    vals = np.array([inversion(v) for v in img])
    return _fd(vals, delta)


def eigvals3(J) -> np.ndarray:
    """Eigenvalues of a real 3x3 matrix from its characteristic polynomial.

    Cardano's formula (trigonometric form for three real roots) with a
    companion-matrix fallback when the closed form is ill-conditioned;
    every root is then polished by Newton on the cubic.
    """
    J = np.asarray(J, dtype=float)
    a2 = -np.trace(J)
    a1 = 0.5 * (np.trace(J) ** 2 - np.trace(J @ J))
    a0 = -np.linalg.det(J)
    coeffs = np.array([1.0, a2, a1, a0])
    # depressed cubic t^3 + p t + q with lambda = t - a2/3
    p = a1 - a2 * a2 / 3.0
    q = 2.0 * a2 ** 3 / 27.0 - a2 * a1 / 3.0 + a0
    shift = -a2 / 3.0
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    scale = max(1.0, abs(a2), abs(a1), abs(a0))
    roots: np.ndarray
    if abs(p) <= 1e-14 * scale and abs(q) <= 1e-14 * scale:
        roots = np.full(3, shift, dtype=complex)
    elif disc < 0:
        m = 2.0 * math.sqrt(-p / 3.0)
        arg = max(-1.0, min(1.0, 3.0 * q / (p * m)))
        th = math.acos(arg) / 3.0
        roots = np.array([m * math.cos(th - 2.0 * math.pi * k / 3.0) for k in range(3)], dtype=complex) + shift
    elif disc > 1e-12 * scale ** 2:
        sd = math.sqrt(disc)
        u = np.cbrt(-q / 2.0 + sd)
        v = np.cbrt(-q / 2.0 - sd)
        w = complex(-0.5, math.sqrt(3.0) / 2.0)
        roots = np.array([u + v, w * u + w.conjugate() * v, w.conjugate() * u + w * v], dtype=complex) + shift
    else:
        roots = np.roots(coeffs).astype(complex)
    poly = np.poly1d(coeffs)
    dpoly = poly.deriv()
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        for i, r in enumerate(roots):
            for _ in range(3):
                d = dpoly(r)
                if d == 0:
                    break
                nr = r - poly(r) / d
                if not np.isfinite(nr) or abs(poly(nr)) >= abs(poly(r)):
                    break
                r = nr
            roots[i] = r
    return roots[np.argsort(-np.abs(roots), kind="stable")]


KIND_BY_INDEX = {0: "sink", 3: "source"}


@dataclass
class FixedPointRecord:
    name: str
    location: object  # np.ndarray or NORTH
    residual: float
    eigenvalues: np.ndarray
    morse_index: int = field(init=False)
    kind: str = field(init=False)

    def __post_init__(self):
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=complex)
        mods = np.abs(self.eigenvalues)
        self.morse_index = int(np.sum(mods > 1.0))
        self.kind = KIND_BY_INDEX.get(self.morse_index, "saddle")

    @property
    def hyperbolic(self) -> bool:
        return bool(np.all(np.abs(np.abs(self.eigenvalues) - 1.0) >= HYPERBOLIC_GAP))

    @property
    def is_north(self) -> bool:
        return self.location is NORTH

    def to_json(self) -> dict:
        loc = None if self.is_north else [float(v) for v in self.location]
        return {
            "name": self.name,
            "x": loc,
            "eigenvalues": [[float(e.real), float(e.imag)] for e in self.eigenvalues],
            "morse_index": self.morse_index,
            "kind": self.kind,
            "residual": float(self.residual),
        }


def _residual(f, x) -> float:
    return float(np.linalg.norm(f(x) - x))


def find_fixed_point(f, guess, name: str = "", max_iter: int = 50, tol: float = RESIDUAL_TOL) -> FixedPointRecord:
    """Damped Newton on f(x) - x; eigenvalues from the Jacobian at the root."""
    x = as_point(guess).copy()
    F = f(x) - x
    res = float(np.linalg.norm(F))
    for _ in range(max_iter):
        if res <= 1e-3 * tol:
            break
        J = jacobian(f, x)
        try:
            dx = np.linalg.solve(J - np.eye(3), -F)
        except np.linalg.LinAlgError as exc:
            raise NoConvergence(f"singular Newton system at {x.tolist()}") from exc
        lam = 1.0
        for _ in range(30):
            xn = x + lam * dx
            Fn = f(xn) - xn
            rn = float(np.linalg.norm(Fn))
            if rn < res or rn <= 1e-3 * tol:
                break
            lam *= 0.5
        else:
            break
        if rn >= res:
            break
        x, F, res = xn, Fn, rn
    if not res <= tol:
        raise NoConvergence(f"Newton from {as_point(guess).tolist()} stalled at residual {res:.3g}")
    return FixedPointRecord(name, x, res, eigvals3(jacobian(f, x)))


def north_record(f: PiecewiseDiffeo) -> FixedPointRecord:
    return FixedPointRecord("N", NORTH, 0.0, eigvals3(north_jacobian(f)))


def construction_seeds(f: PiecewiseDiffeo, offset: float = 1e-3) -> dict[str, np.ndarray]:
    """Newton seeds near omega, S and sigma, displaced by ``offset`` times the local tube radius."""
    d = np.array([0.6, -0.48, 0.64])
    r_omega = float(f.chart.radius(f.center - 1.0))
    r_sigma = float(f.chart.radius(f.center + 1.0))
    return {
        "omega": f.omega_bar + offset * r_omega * d,
        "S": offset * d,
        "sigma": f.sigma_bar + offset * r_sigma * d,
    }


def fixed_point_census(f: PiecewiseDiffeo) -> list[FixedPointRecord]:
    """The four fixed points omega, S, sigma (chart) and N."""
    out = [find_fixed_point(f, seed, name) for name, seed in construction_seeds(f).items()]
    out.append(north_record(f))
    return out


def sweep_fixed_points(f: PiecewiseDiffeo, seeds: np.ndarray, max_iter: int = 50, step: float = 1e-6,
                       escape: float = 1e6) -> tuple[np.ndarray, np.ndarray]:
    """Batch damped Newton from many seeds.

    Returns ``(points, residuals)`` for every seed; seeds whose iterates
    leave the ball of radius ``escape`` (they run off towards N) get NaN.
    """
    x = np.array(seeds, dtype=float).reshape(-1, 3)
    E = np.eye(3) * step

    def F(pts):
        return f.apply(pts) - pts

    Fx = F(x)
    res = np.linalg.norm(Fx, axis=1)
    active = np.isfinite(res)
    for _ in range(max_iter):
        active &= res > 1e-3 * RESIDUAL_TOL
        if not active.any():
            break
        ia = np.flatnonzero(active)
        xa = x[ia]
        stencil = np.concatenate([xa[:, None, :] + E[None], xa[:, None, :] - E[None]], axis=1).reshape(-1, 3)
        vals = F(stencil).reshape(len(ia), 6, 3)
        J = np.transpose((vals[:, :3] - vals[:, 3:]) / (2.0 * step), (0, 2, 1))
        try:
            dx = np.linalg.solve(J, -Fx[ia][..., None])[..., 0]
        except np.linalg.LinAlgError:
            dx = np.zeros_like(xa)
        lam = np.ones(len(ia))
        pending = np.ones(len(ia), dtype=bool)
        newx = xa.copy()
        newF = Fx[ia].copy()
        newr = res[ia].copy()
        for _ in range(20):
            if not pending.any():
                break
            ip = np.flatnonzero(pending)
            cand = xa[ip] + lam[ip, None] * dx[ip]
            cand[~np.isfinite(cand)] = np.nan
            good_pts = np.all(np.isfinite(cand), axis=1) & (np.linalg.norm(np.nan_to_num(cand), axis=1) < escape)
            Fc = np.full_like(cand, np.nan)
            if good_pts.any():
                Fc[good_pts] = F(cand[good_pts])
            rc = np.linalg.norm(Fc, axis=1)
            ok = np.isfinite(rc) & (rc < res[ia][ip])
            sel = ip[ok]
            newx[sel], newF[sel], newr[sel] = cand[ok], Fc[ok], rc[ok]
            pending[sel] = False
            lam[ip[~ok]] *= 0.5
        stalled = pending
        x[ia], Fx[ia], res[ia] = newx, newF, newr
        active[ia[stalled]] = False
        gone = np.linalg.norm(x[ia], axis=1) >= escape
        x[ia[gone]] = np.nan
        res[ia[gone]] = np.nan
    return x, res


def distinct_fixed_points(points: np.ndarray, residuals: np.ndarray, tol: float = RESIDUAL_TOL,
                          merge: float = 1e-6) -> np.ndarray:
    """Cluster converged sweep results into distinct fixed points."""
    ok = np.isfinite(residuals) & (residuals <= tol)
    found: list[np.ndarray] = []
    for p in points[ok]:
        if not any(np.linalg.norm(p - q) <= merge * max(1.0, np.linalg.norm(q)) for q in found):
            found.append(p)
    return np.array(found).reshape(-1, 3)


# --------------------------------------------------------------------------
# separatrices


@dataclass
class SeparatrixTrace:
    """A resampled unstable separatrix of the saddle.

    ``points`` is the polyline in R^3, ``chart`` its cylinder coordinates
    (t, y2, y3), and ``iterates`` the indices of the exact f-iterates
    inside the polyline.  ``tail`` holds one densely sampled unit of the
    chart parameter at the end of the toward-O branch.
    """

    points: np.ndarray
    chart: np.ndarray
    iterates: np.ndarray
    origin: FixedPointRecord
    branch: int
    target: str
    final_gap: float
    tail: np.ndarray | None = None

    @property
    def iterate_points(self) -> np.ndarray:
        return self.points[self.iterates]


def unstable_direction(f: PiecewiseDiffeo, saddle: FixedPointRecord) -> np.ndarray:
    J = jacobian(f, saddle.location)
    w, V = np.linalg.eig(J)
    k = int(np.argmax(np.abs(w)))
    v = np.real(V[:, k])
    v /= np.linalg.norm(v)
    # orient along increasing tube parameter
    t_axis = f.curve.tangent(f.center + 1.0)
    return v if v @ t_axis >= 0 else -v


def trace_separatrix(f: PiecewiseDiffeo, saddle: FixedPointRecord, branch: int = 1, count: int = 40,
                     samples_per_unit: int = 256, seed_distance: float = 1e-6,
                     tail_samples: int = 1 << 16) -> SeparatrixTrace:
    """Follow one unstable branch of the saddle by iterating f.

    ``branch=+1`` runs along the tube towards O (the knot branch), ``-1``
    towards the sink omega.  Between consecutive iterates the polyline is
    filled in with the flow (exact translation where the flow is one).
    """
    if saddle.morse_index != 1 or saddle.is_north:
        raise ValueError("trace_separatrix needs a saddle of Morse index 1")
    if branch not in (1, -1):
        raise ValueError("branch must be +1 or -1")
    v = unstable_direction(f, saddle)
    p = np.asarray(saddle.location, dtype=float) + branch * seed_distance * v
    iterates = [p]
    for _ in range(count):
        p = f(p)
        iterates.append(p)
    iters = np.array(iterates)
    z, inside = f.space_to_chart(iters)
    if not inside.all():
        bad = int(np.flatnonzero(~inside)[0])
        raise EscapedTube(f"iterate {bad} of the separatrix left the tube")
    chart_pts, marks = [], []
    for k in range(count):
        marks.append(sum(len(c) for c in chart_pts))
        seg = _segment_samples(f, z[k], samples_per_unit)
        chart_pts.append(seg[:-1])
    marks.append(sum(len(c) for c in chart_pts))
    chart_pts.append(z[-1:])
    zc = np.concatenate(chart_pts)
    pts = f.chart_to_space(zc)
    idx = np.array(marks)
    pts[idx] = iters  # the exact iterates sit inside the polyline
    if np.any(zc[:, 1] ** 2 + zc[:, 2] ** 2 > 4.0 * (1.0 + 1e-9)):
        raise EscapedTube("separatrix polyline left the cylinder")
    target_pt = np.zeros(3) if branch > 0 else f.omega_bar
    gap = float(np.linalg.norm(iters[-1] - target_pt))
    tail = None
    if branch > 0:
        start = z[-2]
        if not _segment_misses_ball(start[None, :], 1.0)[0]:
            raise ValueError("trace too short: the tail still meets the cherry ball")
        s = np.arange(tail_samples + 1) / tail_samples
        tail = f.chart_to_space(start + s[:, None] * np.array([1.0, 0.0, 0.0]))
    chart_out = zc + f._shift
    return SeparatrixTrace(pts, chart_out, idx, saddle, branch, "S" if branch > 0 else "omega", gap, tail)


def _segment_samples(f: PiecewiseDiffeo, z: np.ndarray, per_unit: int) -> np.ndarray:
    """Chart points from z to phi(z), endpoints included."""
    if _segment_misses_ball(z[None, :], 1.0)[0]:
        s = np.arange(per_unit + 1) / per_unit
        return z + s[:, None] * np.array([1.0, 0.0, 0.0])
    sub = max(1, int(math.ceil(per_unit / f.flow.nsteps)))
    path = f.flow.path(z, 1.0, sub)
    path[-1] = f.flow.map(z[None, :])[0]
    return path


def knot_hausdorff(points: np.ndarray, curve: KnotCurve, samples: int = 1 << 16) -> float:
    """Hausdorff distance in S^2 x S^1 between project_p(points) and the knot.

    ``points`` should cover one unit of the knot parameter so its projection
    sweeps the whole knot; both sides are compared as dense samples in the
    R^5 embedding.
    """
    from scipy.spatial import cKDTree

    a = hopf_embed(*project_p_batch(points))
    g = curve.gamma(np.arange(samples) / samples)
    b = hopf_embed(*project_p_batch(g))
    da, _ = cKDTree(b).query(a)
    db, _ = cKDTree(a).query(b)
    return float(max(da.max(), db.max()))
