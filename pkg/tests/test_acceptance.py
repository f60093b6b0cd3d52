"""Acceptance criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -v`` and the verdict lines are
printed even when pytest captures output.
"""
import math
import time

import numpy as np
import pytest
from scipy.integrate import solve_ivp

from wildarc import cli
from wildarc.chainrec import build_cover, chain_components, transition_graph, verify_lyapunov
from wildarc.config import RunConfig
from wildarc.dynamics import (SADDLE_CHART, SINK_CHART, CherryFlow, cherry_jacobian, cherry_rhs, eigvals3, jacobian,
                              knot_hausdorff, trace_separatrix)
from wildarc.geometry import homothety
from wildarc.knots import KnotSpec, genus_of
from wildarc.morse import lower_bound, quasi_energy_blueprint

from conftest import tube_samples


@pytest.fixture
def verdict(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


@pytest.fixture(scope="module")
def ladder(diffeos):
    """Transition graphs and decompositions of the standard-knot map at depths 3..6, with timings."""
    out = {}
    for d in (3, 4, 5, 6):
        t0 = time.perf_counter()
        g = transition_graph(build_cover(2.0, d), diffeos[0])
        dec = chain_components(g)
        out[d] = (g, dec, time.perf_counter() - t0)
    return out


def test_criterion_1_fixed_point_census(tmp_path, verdict, capsys):
    details, ok = [], True
    for n in (0, 1, 2):
        t0 = time.perf_counter()
        code = cli.cmd_fixed_points(RunConfig(n=n, out=str(tmp_path / f"n{n}")))
        dt = time.perf_counter() - t0
        ok &= code == 0 and dt < 10.0
        details.append(f"n={n} exit {code} in {dt:.1f}s")
    capsys.readouterr()
    verdict(1, ok, "4 hyperbolic points, indices {0,0,1,3}, residual <= 1e-10; " + ", ".join(details))


def _variational(x0):
    def rhs(t, y):
        return np.concatenate([cherry_rhs(y[:3]), (cherry_jacobian(y[:3]) @ y[3:].reshape(3, 3)).ravel()])

    sol = solve_ivp(rhs, (0, 1), np.concatenate([x0, np.eye(3).ravel()]), method="DOP853",
                    rtol=1e-12, atol=1e-13)
    return sol.y[3:, -1].reshape(3, 3)


def test_criterion_2_eigenvalue_oracle(verdict):
    t0 = time.perf_counter()
    flow = CherryFlow()
    worst = 0.0
    for point, rate in ((SADDLE_CHART, 4 / 3), (SINK_CHART, -4 / 3)):
        want = np.sort([math.exp(rate), math.exp(-1), math.exp(-1)])
        J = jacobian(lambda x: flow.map(x[None, :])[0], point)
        got = np.sort(np.abs(eigvals3(J)))
        oracle = np.sort(np.abs(np.linalg.eigvals(_variational(point))))
        worst = max(worst, np.max(np.abs(got - want)), np.max(np.abs(oracle - want)))
    dt = time.perf_counter() - t0
    verdict(2, worst <= 1e-5 and dt < 1.0, f"max eigenvalue error {worst:.2e} (tol 1e-5) in {dt:.2f}s")


def test_criterion_3_conjugacy(charts, verdict):
    rng = np.random.default_rng(2024)
    worst = 0.0
    for n, ch in charts.items():
        _, p = tube_samples(ch, 10_000, rng, t_range=(-1.0, 2.0), rmax=1.999)
        y, inside = ch.locate(p)
        yh, inside_h = ch.locate(homothety(p))
        assert inside.all() and inside_h.all()
        worst = max(worst, float(np.max(np.linalg.norm(yh - (y + [1.0, 0.0, 0.0]), axis=1))))
    verdict(3, worst <= 1e-8, f"max conjugacy residual {worst:.2e} over 3 x 10^4 samples (tol 1e-8)")


def test_criterion_4_chain_components(ladder, census, verdict):
    fps = [r.location for r in census[0] if not r.is_north]
    parts, ok = [], True
    for d in (5, 6):
        g, dec, dt = ladder[d]
        homes = [dec.component_of(p) for p in fps]
        clusters = dec.chart_components()
        one_each = None not in homes and len(set(homes)) == 3 and len(clusters) == 3
        lyap = verify_lyapunov(dec.lyapunov, g, dec.recurrent)
        good = dec.count == 4 and one_each and lyap.ok and dt < 300
        ok &= good
        parts.append(f"depth {d}: {dec.count} components, fixed points {homes}, "
                     f"{len(lyap)} Lyapunov violations, eps {g.epsilon:.3g}, {dt:.0f}s")
    verdict(4, ok, "n=0, R=2; " + "; ".join(parts))


def test_criterion_5_count_identity(verdict):
    bad = []
    for n in range(33):
        inv, _ = quasi_energy_blueprint(n)
        if not (inv.total == 4 + 2 * n == lower_bound(genus_of(KnotSpec.standard(n))) and inv.euler == 0):
            bad.append(n)
    verdict(5, not bad, f"total = 4+2n = lower bound, Euler sum 0 for n in 0..32; failures {bad}")


def test_criterion_6_separatrix(diffeos, census, verdict):
    parts, ok = [], True
    for n in (0, 1):
        t0 = time.perf_counter()
        sigma = next(r for r in census[n] if r.name == "sigma")
        tr = trace_separatrix(diffeos[n], sigma, branch=1)
        haus = knot_hausdorff(tr.tail, diffeos[n].curve)
        dt = time.perf_counter() - t0
        ok &= haus <= 1e-3 and dt < 30
        parts.append(f"n={n} Hausdorff {haus:.2e} in {dt:.1f}s")
    verdict(6, ok, "; ".join(parts) + " (tol 1e-3)")


def test_criterion_7_refinement(ladder, verdict):
    parts, ok = [], True
    for d in (3, 4, 5):
        coarse, fine = ladder[d][1], ladder[d + 1][1]
        parents = fine.graph.cover.coarsen(fine.recurrent_boxes(), d)
        stray = int(np.count_nonzero(~np.isin(parents, coarse.recurrent_boxes())))
        ok &= stray == 0
        parts.append(f"{d + 1}->{d}: {stray} stray boxes")
    verdict(7, ok, "; ".join(parts))


def test_criterion_8_determinism(tmp_path, verdict, capsys):
    runs = {}
    for tag in ("a", "b"):
        out = tmp_path / tag
        for cmd in ("fixed-points", "chainrec", "blueprint", "separatrix"):
            cli.main([cmd, "--n", "0", "--depth", "5", "--seed", "11", "--out", str(out)])
        runs[tag] = {p.name: p.read_bytes() for p in sorted(out.iterdir())}
    capsys.readouterr()
    same = runs["a"] == runs["b"] and len(runs["a"]) >= 9
    verdict(8, same, f"{len(runs['a'])} exported files byte-identical across two runs")


def test_clusters_shrink_with_depth(ladder, census):
    # supporting check for criterion 4: each fixed point's cluster tightens from depth 5 to 6
    fps = [r.location for r in census[0] if not r.is_north]
    for p in fps:
        size = {}
        for d in (5, 6):
            dec = ladder[d][1]
            size[d] = dec.diameter(dec.components[dec.component_of(p)])
        assert size[6] * 1.5 <= size[5]
