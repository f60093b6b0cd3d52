"""Set-oriented chain recurrence: dyadic box covers, transition graphs, Lyapunov values.

The cover of [-R, R]^3 at depth d has 2^d boxes per axis; a box (i, j, k)
has linear index (i * 2^d + j) * 2^d + k.  The transition graph has one
vertex per box plus a final vertex ``inf_cell`` standing for a small
neighbourhood of the north pole N.

Images are estimated from a lattice of samples per box (corners included)
inflated by a padded Lipschitz bound.  This is an outer approximation in
practice, not a rigorous enclosure.
"""
from __future__ import annotations

import heapq
import math
import os
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from . import kernels
from .errors import DepthTooLarge, DomainEscape, EdgeBudgetExceeded

MAX_DEPTH = 10
ESCAPE_TOL = 1e-12
#: edge candidates one x-slab may produce before the build is abandoned
SLAB_EDGE_BUDGET = 8_000_000


def worker_count(requested: int | None = None) -> int:
    """Thread count for box sampling, capped by WILDARC_THREADS."""
    n = requested if requested is not None else (os.cpu_count() or 1)
    cap = os.environ.get("WILDARC_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            pass
    return max(1, n)


@dataclass(frozen=True)
class BoxCover:
    """Full dyadic cover of the cube [-R, R]^3."""

    R: float
    depth: int

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError("domain half-width R must be positive")
        if int(self.depth) != self.depth or self.depth < 0:
            raise ValueError("depth must be a nonnegative integer")
        if self.depth > MAX_DEPTH:
            raise DepthTooLarge(f"depth {self.depth} exceeds the limit {MAX_DEPTH}")

    @property
    def side(self) -> int:
        return 1 << self.depth

    @property
    def width(self) -> float:
        return 2.0 * self.R / self.side

    @property
    def count(self) -> int:
        return self.side ** 3

    @property
    def diameter(self) -> float:
        return self.width * math.sqrt(3.0)

    @property
    def boxes(self) -> np.ndarray:
        """All box triples, in linear-index order."""
        return self.triples(np.arange(self.count))

    def triples(self, idx) -> np.ndarray:
        idx = np.asarray(idx, dtype=np.int64)
        s = self.side
        return np.stack([idx // (s * s), (idx // s) % s, idx % s], axis=-1)

    def linear(self, triples) -> np.ndarray:
        t = np.asarray(triples, dtype=np.int64)
        return (t[..., 0] * self.side + t[..., 1]) * self.side + t[..., 2]

    def index_of(self, points) -> np.ndarray:
        """Linear box index of each point (-1 outside the cube)."""
        p = np.atleast_2d(np.asarray(points, dtype=float))
        ijk = np.floor((p + self.R) / self.width).astype(np.int64)
        # points on the far faces belong to the last box
        on_face = np.isclose(p, self.R, rtol=0.0, atol=ESCAPE_TOL)
        ijk[on_face] = self.side - 1
        ok = np.all((ijk >= 0) & (ijk < self.side), axis=1) & np.all(np.isfinite(p), axis=1)
        out = np.full(len(p), -1, dtype=np.int64)
        out[ok] = self.linear(ijk[ok])
        return out

    def lower_corner(self, idx) -> np.ndarray:
        return self.triples(idx) * self.width - self.R

    def center(self, idx) -> np.ndarray:
        return self.lower_corner(idx) + 0.5 * self.width

    def boundary_mask(self) -> np.ndarray:
        t = self.boxes
        return np.any((t == 0) | (t == self.side - 1), axis=1)

    def coarsen(self, idx, depth: int) -> np.ndarray:
        """Parent indices at a shallower depth."""
        if depth > self.depth:
            raise ValueError("can only coarsen to a smaller depth")
        shift = self.depth - depth
        t = self.triples(idx) >> shift
        s = 1 << depth
        return (t[..., 0] * s + t[..., 1]) * s + t[..., 2]


def build_cover(R: float, depth: int) -> BoxCover:
    return BoxCover(float(R), int(depth))


@dataclass
class TransitionGraph:
    """Directed graph on boxes plus the symbolic ``inf_cell`` (CSR storage)."""

    cover: BoxCover
    indptr: np.ndarray
    indices: np.ndarray
    samples_per_axis: int
    padding: float
    epsilon: float
    seed: int | None = None
    with_infinity: bool = True

    @property
    def n_vertices(self) -> int:
        return len(self.indptr) - 1

    @property
    def inf_cell(self) -> int | None:
        return self.cover.count if self.with_infinity else None

    @property
    def n_edges(self) -> int:
        return int(self.indptr[-1])

    def successors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def has_edge(self, u: int, v: int) -> bool:
        row = self.successors(u)
        k = np.searchsorted(row, v)
        return bool(k < len(row) and row[k] == v)

    def edge_array(self) -> tuple[np.ndarray, np.ndarray]:
        src = np.repeat(np.arange(self.n_vertices, dtype=np.int64), np.diff(self.indptr))
        return src, self.indices

    def self_loops(self) -> np.ndarray:
        src, dst = self.edge_array()
        mask = np.zeros(self.n_vertices, dtype=bool)
        mask[src[src == dst]] = True
        return mask

    def box_of(self, point) -> int:
        return int(self.cover.index_of(np.asarray(point, dtype=float)[None, :])[0])


def _as_batch(f) -> Callable[[np.ndarray], np.ndarray]:
    if hasattr(f, "apply"):
        return f.apply
    return f


def _box_windows(a: np.ndarray, m: int, shape=(None, None)) -> np.ndarray:
    """Per-box views of a slab lattice array ``(mx, L, L, ...)`` -> ``(side, side, ...)`` maxima."""
    wy, wz = shape
    v = sliding_window_view(a, (wy, wz), axis=(1, 2))[:, :: m - 1, :: m - 1]
    return v.max(axis=(0, -2, -1))


def _slab_edges(f, cover: BoxCover, i: int, m: int, padding: float, extra: np.ndarray | None,
                enclosure: str, budget: int = SLAB_EDGE_BUDGET):
    """Edge keys src * (count + 1) + dst and the largest inflation for x-slab i."""
    side, w, R = cover.side, cover.width, cover.R
    s = w / (m - 1)
    L = side * (m - 1) + 1
    gx = -R + (i * (m - 1) + np.arange(m)) * s
    g = -R + np.arange(L) * s
    gx[-1] = -R + (i + 1) * w  # land exactly on the far faces
    g[-1] = R
    X, Y, Z = np.meshgrid(gx, g, g, indexing="ij")
    pts = np.stack([X, Y, Z], axis=-1).reshape(-1, 3)
    img = np.asarray(f(pts), dtype=float).reshape(m, L, L, 3)
    escaped = ~np.all(np.abs(img) <= R + ESCAPE_TOL, axis=-1)
    if escaped.any():
        where = pts.reshape(m, L, L, 3)[tuple(np.argwhere(escaped)[0])]
        raise DomainEscape(f"the image of {where.tolist()} leaves [-{R}, {R}]^3; enlarge R")
    win = sliding_window_view(img, (m, m), axis=(1, 2))[:, :: m - 1, :: m - 1]  # (m, side, side, 3, m, m)
    samples = np.transpose(win, (1, 2, 0, 4, 5, 3)).reshape(side, side, m ** 3, 3)
    if extra is not None:
        samples = np.concatenate([samples, extra], axis=2)
    jj, kk = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    src_box = ((i * side + jj) * side + kk).reshape(-1)
    if enclosure == "hull" and m >= 3:
        # trilinear interpolation error <= 3/8 s^2 max|f''| along the axes
        d2x = np.linalg.norm(img[2:] - 2 * img[1:-1] + img[:-2], axis=-1)
        d2y = np.linalg.norm(img[:, 2:] - 2 * img[:, 1:-1] + img[:, :-2], axis=-1)
        d2z = np.linalg.norm(img[:, :, 2:] - 2 * img[:, :, 1:-1] + img[:, :, :-2], axis=-1)
        bend = np.maximum.reduce([_box_windows(d2x, m, (m, m)), _box_windows(d2y, m, (m - 2, m)),
                                  _box_windows(d2z, m, (m, m - 2))])
        eps = padding * 0.375 * bend
    else:
        dx = np.linalg.norm(np.diff(img, axis=0), axis=-1)
        dy = np.linalg.norm(np.diff(img, axis=1), axis=-1)
        dz = np.linalg.norm(np.diff(img, axis=2), axis=-1)
        lip = np.maximum.reduce([_box_windows(dx, m, (m, m)), _box_windows(dy, m, (m - 1, m)),
                                 _box_windows(dz, m, (m, m - 1))]) / s
        eps = padding * lip * s * math.sqrt(3.0) / 2.0
    if enclosure == "hull":
        e = eps.reshape(-1, 1)
        lo_pt = samples.min(axis=2).reshape(-1, 3) - e
        hi_pt = samples.max(axis=2).reshape(-1, 3) + e
        src = src_box
    else:
        k = samples.shape[2]
        flat = samples.reshape(-1, 3)
        e = np.repeat(eps.reshape(-1), k)[:, None]
        lo_pt, hi_pt = flat - e, flat + e
        src = np.repeat(src_box, k)
    # boxes meeting the enclosure in more than a face
    lo = np.floor((lo_pt + R) / w).astype(np.int64)
    hi = np.maximum(np.ceil((hi_pt + R) / w).astype(np.int64) - 1, lo)
    lo = np.clip(lo, 0, side - 1)
    hi = np.clip(hi, 0, side - 1)
    total = int(np.prod(hi - lo + 1, axis=1).sum())
    if total > budget:
        raise EdgeBudgetExceeded(
            f"slab {i} would emit {total} edges (budget {budget}); the boxes are too coarse "
            f"for this map (largest inflation {float(eps.max()):.3g})")
    es, ed = kernels.expand_ranges(src, lo, hi, side)
    key = np.unique(es * (cover.count + 1) + ed)
    return key, float(eps.max(initial=0.0))


ENCLOSURES = ("hull", "lipschitz")


def transition_graph(cover: BoxCover, f, samples_per_axis: int = 3, padding: float = 1.2,
                     random_samples: int = 1, seed: int | None = 0, threads: int | None = None,
                     with_infinity: bool = True, enclosure: str = "hull",
                     edge_budget: int = SLAB_EDGE_BUDGET) -> TransitionGraph:
    """Outer-approximation transition graph of ``f`` on ``cover``.

    ``f`` is a :class:`~wildarc.dynamics.PiecewiseDiffeo` or any function
    mapping an ``(N, 3)`` array to an ``(N, 3)`` array.  Each box contributes
    a ``samples_per_axis``^3 lattice (corners included) and
    ``random_samples`` seeded uniform points.

    ``enclosure="hull"`` takes the bounding box of the sample images padded
    by ``padding`` times a second-difference bound (exact for affine maps);
    ``"lipschitz"`` pads every sample image by ``padding`` times the local
    Lipschitz estimate times the lattice half-diagonal, which is looser.
    Raises :class:`EdgeBudgetExceeded` when one x-slab would produce more
    than ``edge_budget`` edge candidates.
    """
    if enclosure not in ENCLOSURES:
        raise ValueError(f"enclosure must be one of {ENCLOSURES}")
    m = int(samples_per_axis)
    if m < 2:
        raise ValueError("samples_per_axis must be at least 2")
    if not padding > 0:
        raise ValueError("padding must be positive")
    fb = _as_batch(f)
    side = cover.side
    rng = np.random.default_rng(seed)
    extras: list[np.ndarray | None] = []
    for i in range(side):
        if random_samples > 0:
            u = rng.uniform(size=(side, side, random_samples, 3))
            jj, kk = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
            base = np.stack([np.full_like(jj, i), jj, kk], axis=-1)[:, :, None, :]
            extras.append((base + u) * cover.width - cover.R)
        else:
            extras.append(None)

    def run(i):
        ex = extras[i]
        if ex is not None:
            shape = ex.shape
            ex = np.asarray(fb(ex.reshape(-1, 3)), dtype=float)
            if not np.all(np.abs(ex) <= cover.R + ESCAPE_TOL):
                raise DomainEscape(f"a random sample image in slab {i} leaves the domain cube")
            ex = ex.reshape(shape)
        return _slab_edges(fb, cover, i, m, padding, ex, enclosure, edge_budget)

    nw = worker_count(threads)
    if nw > 1 and side > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(run, range(side)))
    else:
        parts = [run(i) for i in range(side)]
    keys = [p[0] for p in parts]
    eps_max = max((p[1] for p in parts), default=0.0)
    nv = cover.count + 1
    if with_infinity:
        inf = cover.count
        bnd = np.flatnonzero(cover.boundary_mask())
        keys.append(inf * nv + np.concatenate([bnd, [inf]]))
    key = np.concatenate(keys) if keys else np.zeros(0, np.int64)
    key = np.unique(key)
    src, dst = key // nv, key % nv
    n_vertices = nv if with_infinity else cover.count
    indptr = np.zeros(n_vertices + 1, dtype=np.int64)
    np.add.at(indptr, src + 1, 1)
    indptr = np.cumsum(indptr)
    return TransitionGraph(cover, indptr, dst.astype(np.int64), m, float(padding),
                           cover.diameter + 2.0 * eps_max, seed, with_infinity)


# --------------------------------------------------------------------------
# decomposition


@dataclass
class ChainDecomposition:
    """SCC structure, recurrent clusters, and the discrete Lyapunov function.

    ``labels`` maps each vertex to its SCC, ``order`` lists SCC ids in
    topological order of the condensation, ``components`` holds the
    vertex sets of the recurrent SCCs (in that order) and ``lyapunov`` one
    value per vertex.
    """

    graph: TransitionGraph
    labels: np.ndarray
    recurrent: np.ndarray
    order: list[int]
    components: list[np.ndarray]
    lyapunov: np.ndarray
    cond_edges: np.ndarray = field(repr=False)

    @property
    def count(self) -> int:
        return len(self.components)

    def component_of(self, point) -> int | None:
        """Position in ``components`` of the cluster containing ``point`` (None if wandering)."""
        b = self.graph.box_of(point)
        if b < 0 or not self.recurrent[b]:
            return None
        lab = self.labels[b]
        for k, comp in enumerate(self.components):
            if self.labels[comp[0]] == lab:
                return k
        return None

    def chart_components(self) -> list[np.ndarray]:
        inf = self.graph.inf_cell
        return [c for c in self.components if inf is None or not (len(c) == 1 and c[0] == inf)]

    def recurrent_boxes(self) -> np.ndarray:
        n = self.graph.cover.count
        return np.flatnonzero(self.recurrent[:n])

    def diameter(self, comp: np.ndarray) -> float:
        """Max-norm diameter of the union of a cluster's boxes."""
        cov = self.graph.cover
        comp = comp[comp < cov.count]
        if comp.size == 0:
            return 0.0
        t = cov.triples(comp)
        return float((t.max(axis=0) - t.min(axis=0) + 1).max() * cov.width)


def _csr(n: int, src: np.ndarray, dst: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    key = np.unique(src * n + dst)
    s, d = key // n, key % n
    indptr = np.concatenate([[0], np.cumsum(np.bincount(s, minlength=n))]).astype(np.int64)
    return indptr, d.astype(np.int64)


def _touching(cover: BoxCover, boxes: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pairs of boxes in ``boxes`` sharing a face, edge or corner."""
    side = cover.side
    mask = np.zeros((side, side, side), dtype=bool)
    t = cover.triples(boxes)
    mask[t[:, 0], t[:, 1], t[:, 2]] = True
    out_a, out_b = [], []
    for off in np.ndindex(3, 3, 3):
        d = np.array(off) - 1
        if tuple(d) <= (0, 0, 0):
            continue  # each unordered pair once
        nb = t + d
        ok = np.all((nb >= 0) & (nb < side), axis=1)
        ok[ok] = mask[nb[ok, 0], nb[ok, 1], nb[ok, 2]]
        out_a.append(boxes[ok])
        out_b.append(cover.linear(nb[ok]))
    return np.concatenate(out_a), np.concatenate(out_b)


def chain_components(g: TransitionGraph, merge_touching: bool = True) -> ChainDecomposition:
    """Recurrent clusters, condensation order, and longest-path Lyapunov values.

    Recurrent vertices are members of SCCs with more than one vertex or a
    self-loop.  With ``merge_touching`` recurrent boxes that touch are
    joined in both directions before the final SCC pass: at box
    resolution they are within one epsilon-step of each other.
    """
    n = g.n_vertices
    cover = g.cover
    src, dst = g.edge_array()
    indptr, indices = g.indptr, g.indices
    while True:
        labels = kernels.strong_components(n, indptr, indices)
        ncomp = int(labels.max()) + 1 if n else 0
        sizes = np.bincount(labels, minlength=ncomp)
        loops = src[src == dst]
        rec_comp = sizes > 1
        rec_comp[labels[loops]] = True
        recurrent = rec_comp[labels]
        if not merge_touching:
            break
        boxes = np.flatnonzero(recurrent[: cover.count])
        a, b = _touching(cover, boxes)
        split = labels[a] != labels[b]
        if not split.any():
            break
        src = np.concatenate([src, a[split], b[split]])
        dst = np.concatenate([dst, b[split], a[split]])
        indptr, indices = _csr(n, src, dst)
    cs, cd = labels[src], labels[dst]
    keep = cs != cd
    cond = np.unique(cs[keep] * ncomp + cd[keep])
    c_src, c_dst = cond // ncomp, cond % ncomp
    # Kahn's algorithm, ties broken by the smallest member vertex
    first = np.full(ncomp, n, dtype=np.int64)
    np.minimum.at(first, labels, np.arange(n))
    indeg = np.bincount(c_dst, minlength=ncomp)
    cptr = np.concatenate([[0], np.cumsum(np.bincount(c_src, minlength=ncomp))])
    heap = [(int(first[c]), int(c)) for c in np.flatnonzero(indeg == 0)]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        _, c = heapq.heappop(heap)
        order.append(c)
        for d in c_dst[cptr[c]:cptr[c + 1]]:
            indeg[d] -= 1
            if indeg[d] == 0:
                heapq.heappush(heap, (int(first[d]), int(d)))
    # longest path from the sources
    depth = np.zeros(ncomp, dtype=np.int64)
    for c in order:
        nxt = c_dst[cptr[c]:cptr[c + 1]]
        if nxt.size:
            np.maximum.at(depth, nxt, depth[c] + 1)
    top = int(depth.max(initial=0))
    value = 1.0 - depth / top if top > 0 else np.ones(ncomp)
    lyap = value[labels]
    members = np.argsort(labels, kind="stable")
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    components = [members[bounds[c]:bounds[c + 1]] for c in order if rec_comp[c]]
    return ChainDecomposition(g, labels, recurrent, order, components, lyap, np.stack([c_src, c_dst], axis=1))


def epsilon_chain_exists(g: TransitionGraph, x, y) -> bool:
    """Whether a nonempty box path leads from box(x) to box(y)."""
    a, b = g.box_of(x), g.box_of(y)
    if a < 0 or b < 0:
        raise ValueError("both points must lie in the domain cube")
    seen = np.zeros(g.n_vertices, dtype=bool)
    queue = deque(int(v) for v in g.successors(a))
    for v in queue:
        seen[v] = True
    while queue:
        v = queue.popleft()
        if v == b:
            return True
        for w in g.successors(v):
            if not seen[w]:
                seen[w] = True
                queue.append(int(w))
    return False


@dataclass
class LyapunovReport:
    increasing_edges: list[tuple[int, int, float, float]]
    not_decreasing: list[int]

    @property
    def ok(self) -> bool:
        return not self.increasing_edges and not self.not_decreasing

    def __len__(self):
        return len(self.increasing_edges) + len(self.not_decreasing)


def verify_lyapunov(values, g: TransitionGraph, recurrent: np.ndarray | None = None) -> LyapunovReport:
    """Check that ``values`` is a discrete Lyapunov function for ``g``.

    Flags every edge along which the value increases and every
    non-recurrent vertex with an out-edge that fails to decrease strictly.
    ``values`` is an array over vertices or a mapping vertex -> value.
    """
    n = g.n_vertices
    if isinstance(values, dict):
        arr = np.array([values[v] for v in range(n)], dtype=float)
    else:
        arr = np.asarray(values, dtype=float)
        if len(arr) == n - 1 and g.with_infinity:
            arr = np.append(arr, np.inf)
        if len(arr) != n:
            raise ValueError(f"expected {n} values, got {len(arr)}")
    if recurrent is None:
        recurrent = chain_components(g).recurrent
    src, dst = g.edge_array()
    up = arr[dst] > arr[src]
    inc = [(int(a), int(b), float(arr[a]), float(arr[b])) for a, b in zip(src[up], dst[up])]
    weak = (arr[dst] >= arr[src]) & ~recurrent[src]
    bad = np.unique(src[weak]).tolist()
    return LyapunovReport(inc, bad)
