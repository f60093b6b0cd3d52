"""Command-line front end.

    wildarc fixed-points|chainrec|blueprint|separatrix --config <path>
            [--n <int>] [--depth <int>] [--seed <u64>] [--out <dir>]

Exit codes: 0 ok, 1 property failed, 2 numerical failure, 3 configuration,
4 domain escape, 5 separatrix left the tube.
"""
from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

import numpy as np

from . import io
from .chainrec import build_cover, chain_components, transition_graph, verify_lyapunov
from .config import RunConfig, load_config
from .dynamics import (PiecewiseDiffeo, fixed_point_census, knot_hausdorff, trace_separatrix)
from .errors import (ConfigError, DepthTooLarge, DomainEscape, EdgeBudgetExceeded, EscapedTube, InfeasibleSpec,
                     NoConvergence, NonSmoothNeighborhood, StepTooCoarse)
from .morse import blueprint_document, lower_bound

EXIT_OK = 0
EXIT_PROPERTY = 1
EXIT_NUMERICAL = 2
EXIT_CONFIG = 3
EXIT_DOMAIN = 4
EXIT_GEOMETRY = 5

EXPECTED_INDICES = [0, 0, 1, 3]
HAUSDORFF_TOL = 1e-3
OMEGA_GAP_TOL = 1e-8


def _say(msg: str) -> None:
    print(msg, flush=True)


def _diffeo(cfg: RunConfig) -> PiecewiseDiffeo:
    return PiecewiseDiffeo.for_spec(cfg.knot_spec(), step=cfg.step, center=cfg.center)


def cmd_fixed_points(cfg: RunConfig) -> int:
    f = _diffeo(cfg)
    records = fixed_point_census(f)
    out = Path(cfg.out)
    io.write_json(out / "fixed_points.json", io.fixed_point_report(records))
    for r in records:
        mods = " ".join(f"{m:.6f}" for m in np.abs(r.eigenvalues))
        _say(f"{r.name:6s} index {r.morse_index}  residual {r.residual:.2e}  |eig| {mods}")
    indices = sorted(r.morse_index for r in records)
    ok = (len(records) == 4 and indices == EXPECTED_INDICES
          and all(r.hyperbolic for r in records) and all(r.residual <= 1e-10 for r in records))
    _say(f"{len(records)} fixed points, indices {indices}: {'ok' if ok else 'FAILED'}")
    return EXIT_OK if ok else EXIT_PROPERTY


def cmd_chainrec(cfg: RunConfig) -> int:
    f = _diffeo(cfg)
    cover = build_cover(cfg.R, cfg.depth)
    t0 = time.perf_counter()
    g = transition_graph(cover, f, samples_per_axis=cfg.samples_per_axis, padding=cfg.padding,
                         random_samples=cfg.random_samples, seed=cfg.seed, threads=cfg.threads,
                         enclosure=cfg.enclosure)
    dec = chain_components(g)
    elapsed = time.perf_counter() - t0
    out = Path(cfg.out)
    io.write_text(out / "edges.csv", io.edges_csv(g))
    io.write_json(out / "decomposition.json", io.decomposition_document(dec))
    io.write_cover_binary(out / "recurrent.bin", cover, dec.recurrent_boxes())
    _say(f"depth {cfg.depth}: {g.n_vertices} vertices, {g.n_edges} edges, realized epsilon {g.epsilon:.4g}"
         f" ({elapsed:.1f} s)")
    sizes = [len(c) for c in dec.components]
    _say(f"{dec.count} chain components, sizes {sizes}")
    census = [r for r in fixed_point_census(f) if not r.is_north]
    for r in census:
        _say(f"  {r.name} lies in component {dec.component_of(r.location)}")
    report = verify_lyapunov(dec.lyapunov, g, dec.recurrent)
    if not report.ok:
        _say(f"discrete Lyapunov check: {len(report)} violations")
    if dec.count != 4:
        _say("expected 4 components (three chart clusters and the infinity cell); "
             "the cover is probably too coarse")
        return EXIT_PROPERTY
    return EXIT_OK


def cmd_blueprint(cfg: RunConfig) -> int:
    doc = blueprint_document(cfg.n)
    io.write_json(Path(cfg.out) / f"blueprint_n{cfg.n}.json", doc)
    _say(f"inventory (k0,k1,k2,k3) = {tuple(doc['inventory'])}")
    _say(f"rho = {doc['total']}")
    return EXIT_OK if doc["total"] == lower_bound(cfg.n) and doc["euler"] == 0 else EXIT_PROPERTY


def cmd_separatrix(cfg: RunConfig) -> int:
    f = _diffeo(cfg)
    saddle = next(r for r in fixed_point_census(f) if r.name == "sigma")
    out = Path(cfg.out)
    to_s = trace_separatrix(f, saddle, branch=1)
    to_w = trace_separatrix(f, saddle, branch=-1)
    for tr, name in ((to_s, "S"), (to_w, "omega")):
        io.write_text(out / f"separatrix_{name}.obj", io.polyline_obj(tr.points, f"separatrix_{name}"))
        io.write_text(out / f"separatrix_{name}.csv", io.separatrix_csv(tr))
    haus = knot_hausdorff(to_s.tail, f.curve)
    _say(f"S-branch: {len(to_s.points)} points, Hausdorff to the knot {haus:.3e}")
    _say(f"omega-branch: final gap {to_w.final_gap:.3e}")
    ok = haus <= HAUSDORFF_TOL and to_w.final_gap <= OMEGA_GAP_TOL
    return EXIT_OK if ok else EXIT_PROPERTY


COMMANDS = {
    "fixed-points": cmd_fixed_points,
    "chainrec": cmd_chainrec,
    "blueprint": cmd_blueprint,
    "separatrix": cmd_separatrix,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="wildarc", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", type=Path, default=None, help="TOML or JSON run configuration")
        s.add_argument("--n", type=int, default=None, help="knot family index")
        s.add_argument("--depth", type=int, default=None, help="box subdivision depth")
        s.add_argument("--seed", type=int, default=None, help="seed for random box samples")
        s.add_argument("--out", type=str, default=None, help="output directory")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, n=args.n, depth=args.depth, seed=args.seed, out=args.out)
        return COMMANDS[args.command](cfg)
    except (ConfigError, DepthTooLarge, InfeasibleSpec) as exc:
        _say(f"configuration error: {exc}")
        return EXIT_CONFIG
    except (NoConvergence, StepTooCoarse, NonSmoothNeighborhood) as exc:
        _say(f"numerical failure: {exc}")
        return EXIT_NUMERICAL
    except DomainEscape as exc:
        _say(f"domain escape: {exc}")
        return EXIT_DOMAIN
    except EdgeBudgetExceeded as exc:
        _say(f"cover too coarse: {exc}")
        return EXIT_PROPERTY
    except EscapedTube as exc:
        _say(f"geometry failure: {exc}")
        return EXIT_GEOMETRY


if __name__ == "__main__":
    sys.exit(main())
