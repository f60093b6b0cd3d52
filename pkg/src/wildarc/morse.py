"""Critical-point bookkeeping for the quasi-energy function of the model map.

Nothing here builds a smooth function on the sphere.  The blueprint records
which critical points the construction places where, and the audit checks a
numerical candidate for monotone decrease along actual orbits.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NegativeGenus

FIXED_POINT_NAMES = ("omega", "S", "sigma", "N")

# (index, stage) for the four fixed points seeded in the first step
_SEEDS = {
    "omega": (0, "sink_ball"),
    "S": (0, "contracting_body"),
    "sigma": (1, "saddle_tube"),
    "N": (3, "source_ball"),
}


@dataclass(frozen=True)
class CriticalPointInventory:
    k0: int
    k1: int
    k2: int
    k3: int

    def __post_init__(self):
        for name in ("k0", "k1", "k2", "k3"):
            v = getattr(self, name)
            if int(v) != v or v < 0:
                raise ValueError(f"{name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, name, int(v))

    @property
    def counts(self) -> tuple[int, int, int, int]:
        return (self.k0, self.k1, self.k2, self.k3)

    @property
    def total(self) -> int:
        return self.k0 + self.k1 + self.k2 + self.k3

    @property
    def euler(self) -> int:
        """Alternating sum; the sphere requires zero."""
        return self.k0 - self.k1 + self.k2 - self.k3


@dataclass(frozen=True)
class Attachment:
    index: int
    label: str
    disk: str
    step: int
    stage: str

    def to_json(self) -> dict:
        return {"index": self.index, "label": self.label, "disk": self.disk,
                "step": self.step, "stage": self.stage}


@dataclass(frozen=True)
class HandleProgram:
    """Ordered handle attachments.  Disks are named ``d1`` .. ``d2n``."""

    n: int
    attachments: tuple[Attachment, ...]

    def __post_init__(self):
        labels = [a.label for a in self.attachments]
        if len(set(labels)) != len(labels):
            raise ValueError("handle labels must be unique")
        disks = [a.disk for a in self.attachments if a.disk.startswith("d")]
        if len(set(disks)) != len(disks):
            raise ValueError("a disk carries at most one critical point")
        for a in self.attachments:
            if a.step not in (1, 2, 3):
                raise ValueError(f"unknown step {a.step}")
            if a.step == 1:
                if a.disk not in FIXED_POINT_NAMES:
                    raise ValueError(f"step-1 entry {a.label} must sit at a fixed point")
                continue
            k = _disk_number(a.disk)
            if k is None or not 1 <= k <= 2 * self.n:
                raise ValueError(f"bad disk label {a.disk!r}")
            if (a.step == 2) != (k % 2 == 1):
                raise ValueError(f"{a.label}: step {a.step} handles live on {'odd' if a.step == 2 else 'even'} disks")

    def __iter__(self):
        return iter(self.attachments)

    def __len__(self):
        return len(self.attachments)

    def step(self, s: int) -> list[Attachment]:
        return [a for a in self.attachments if a.step == s]

    def disks(self, s: int) -> set[str]:
        return {a.disk for a in self.step(s)}

    def inventory(self) -> CriticalPointInventory:
        k = [0, 0, 0, 0]
        for a in self.attachments:
            k[a.index] += 1
        return CriticalPointInventory(*k)


def _disk_number(label: str) -> int | None:
    if not label.startswith("d"):
        return None
    try:
        return int(label[1:])
    except ValueError:
        return None


def _check_n(n) -> int:
    if int(n) != n or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return int(n)


def quasi_energy_blueprint(n: int) -> tuple[CriticalPointInventory, HandleProgram]:
    """Critical points of the quasi-energy function for knot n, in attachment order.

    Step 1 seeds the four fixed points.  Step 2 puts one index-1 point on
    each odd disk, step 3 one index-2 point on each even disk.
    """
    n = _check_n(n)
    items = [Attachment(q, name, name, 1, stage) for name, (q, stage) in _SEEDS.items()]
    items += [Attachment(1, f"h1_d{k}", f"d{k}", 2, "upper") for k in range(1, 2 * n, 2)]
    items += [Attachment(2, f"h2_d{k}", f"d{k}", 3, "lower") for k in range(2, 2 * n + 1, 2)]
    program = HandleProgram(n, tuple(items))
    return program.inventory(), program


def lower_bound(genus: int) -> int:
    """Minimal number of critical points forced by a Hopf knot of this genus."""
    return 4 + 2 * _check_n(genus)


def genus_from_counts(k0: int, k1: int) -> int:
    g = 1 + k1 - k0
    if g < 0:
        raise NegativeGenus(f"1 + k1 - k0 = {g} < 0 for k0={k0}, k1={k1}")
    return g


def blueprint_document(n: int) -> dict:
    inv, prog = quasi_energy_blueprint(n)
    return {
        "n": prog.n,
        "inventory": list(inv.counts),
        "total": inv.total,
        "lower_bound": lower_bound(prog.n),
        "euler": inv.euler,
        "handles": [a.to_json() for a in prog],
    }


def blueprint_json(n: int) -> str:
    return json.dumps(blueprint_document(n), indent=2, sort_keys=False) + "\n"


# --------------------------------------------------------------------------
# orbit audit


@dataclass(frozen=True)
class OrbitViolation:
    seed: int
    step: int
    point: tuple[float, float, float]
    before: float
    after: float


@dataclass
class AuditReport:
    violations: list[OrbitViolation] = field(default_factory=list)
    seeds: int = 0
    steps: int = 0

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self):
        return len(self.violations)

    def wandering_seeds(self) -> set[int]:
        return {v.seed for v in self.violations}


def _batch(f) -> Callable[[np.ndarray], np.ndarray]:
    if hasattr(f, "apply"):
        return f.apply
    return lambda pts: np.asarray(f(pts), dtype=float)


def _values(candidate, pts: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(candidate(pts), dtype=float)
        if out.shape == (len(pts),):
            return out
    except Exception:  # scalar-only candidates fall through
        pass
    return np.array([float(candidate(p)) for p in pts])


def audit_lyapunov_on_orbits(f, candidate, orbit_seeds: Sequence, steps: int = 100,
                             fixed_points: Iterable | None = None, exempt_radius: float = 1e-6,
                             rtol: float = 1e-12, exempt: Callable[[np.ndarray], np.ndarray] | None = None
                             ) -> AuditReport:
    """Iterate every seed ``steps`` times and flag steps without strict decrease.

    A step x -> f(x) is flagged when ``candidate(f(x)) >= candidate(x) - rtol*|candidate(x)|``,
    unless x lies within ``exempt_radius`` of a fixed point or ``exempt(x)``
    is true (used to skip boxes that approximate the recurrent set).
    ``fixed_points`` defaults to the census of ``f`` when ``f`` is a
    :class:`~wildarc.dynamics.PiecewiseDiffeo`.
    """
    x = np.atleast_2d(np.asarray(orbit_seeds, dtype=float)).copy()
    if fixed_points is None:
        fixed_points = _default_fixed_points(f)
    fps = np.array([p for p in fixed_points], dtype=float).reshape(-1, 3)
    step = _batch(f)
    report = AuditReport(seeds=len(x), steps=steps)
    phi = _values(candidate, x)
    alive = np.ones(len(x), dtype=bool)
    for k in range(steps):
        y = step(x)
        alive &= np.isfinite(y).all(axis=1)
        psi = np.full(len(x), np.nan)
        psi[alive] = _values(candidate, y[alive])
        bad = alive & (psi >= phi - rtol * np.abs(phi))
        if fps.size:
            near = (np.linalg.norm(x[:, None, :] - fps[None, :, :], axis=2) < exempt_radius).any(axis=1)
            bad &= ~near
        if exempt is not None and bad.any():
            bad &= ~np.asarray(exempt(x), dtype=bool)
        for i in np.flatnonzero(bad):
            report.violations.append(OrbitViolation(int(i), k, tuple(float(c) for c in x[i]),
                                                    float(phi[i]), float(psi[i])))
        x, phi = y, psi
    return report


def _default_fixed_points(f) -> list:
    from .dynamics import PiecewiseDiffeo, fixed_point_census

    if isinstance(f, PiecewiseDiffeo):
        return [r.location for r in fixed_point_census(f) if not r.is_north]
    return []


def box_candidate(decomposition) -> tuple[Callable[[np.ndarray], np.ndarray], Callable[[np.ndarray], np.ndarray]]:
    """Piecewise-constant candidate from a chain decomposition, plus its recurrent mask.

    Points outside the cube get the value of the infinity cell (or 1.0).
    """
    g = decomposition.graph
    cover = g.cover
    values = np.asarray(decomposition.lyapunov, dtype=float)
    recurrent = np.asarray(decomposition.recurrent, dtype=bool)
    top = values[g.inf_cell] if g.inf_cell is not None else 1.0

    def boxes(pts):
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        inside = (np.abs(pts) <= cover.R).all(axis=1)
        idx = np.full(len(pts), -1, dtype=np.int64)
        if inside.any():
            idx[inside] = cover.index_of(pts[inside])
        return idx

    def candidate(pts):
        idx = boxes(pts)
        return np.where(idx >= 0, values[np.maximum(idx, 0)], top)

    def mask(pts):
        idx = boxes(pts)
        return (idx >= 0) & recurrent[np.maximum(idx, 0)]

    return candidate, mask


__all__ = [
    "CriticalPointInventory",
    "Attachment",
    "HandleProgram",
    "quasi_energy_blueprint",
    "lower_bound",
    "genus_from_counts",
    "blueprint_document",
    "blueprint_json",
    "OrbitViolation",
    "AuditReport",
    "audit_lyapunov_on_orbits",
    "box_candidate",
]
