import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from wildarc.chainrec import build_cover, chain_components, transition_graph
from wildarc.errors import NegativeGenus
from wildarc.knots import KnotSpec, genus_of
from wildarc.morse import (Attachment, CriticalPointInventory, HandleProgram, audit_lyapunov_on_orbits,
                           blueprint_document, blueprint_json, box_candidate, genus_from_counts, lower_bound,
                           quasi_energy_blueprint)


@pytest.mark.parametrize("n, counts", [(0, (2, 1, 0, 1)), (1, (2, 2, 1, 1)), (3, (2, 4, 3, 1))])
def test_blueprint_examples(n, counts):
    inv, prog = quasi_energy_blueprint(n)
    assert inv.counts == counts
    assert inv.total == 4 + 2 * n
    assert len(prog) == inv.total


def test_lower_bound_examples():
    assert lower_bound(0) == 4
    assert lower_bound(1) == 6
    with pytest.raises(ValueError):
        lower_bound(-1)


@pytest.mark.parametrize("n", range(33))
def test_count_identity(n):
    inv, _ = quasi_energy_blueprint(n)
    assert inv.total == lower_bound(genus_of(KnotSpec.standard(n))) == 4 + 2 * n
    assert inv.euler == 0


@given(st.integers(0, 500))
def test_disk_sets(n):
    _, prog = quasi_energy_blueprint(n)
    assert prog.disks(2) == {f"d{k}" for k in range(1, 2 * n, 2)}
    assert prog.disks(3) == {f"d{k}" for k in range(2, 2 * n + 1, 2)}
    assert [a.index for a in prog.step(1)] == [0, 0, 1, 3]
    assert [a.label for a in prog.step(1)] == ["omega", "S", "sigma", "N"]


@given(st.integers(0, 200))
def test_genus_from_blueprint_counts(n):
    inv, _ = quasi_energy_blueprint(n)
    # the handlebody around omega, S and sigma: both minima, n+1 index-1 points
    assert genus_from_counts(inv.k0, inv.k1) == n
    # the sub-body with a single minimum
    assert genus_from_counts(1, n) == n


def test_genus_from_counts_examples():
    assert genus_from_counts(1, 1) == 1
    assert genus_from_counts(1, 0) == 0
    with pytest.raises(NegativeGenus):
        genus_from_counts(3, 0)


def test_inventory_validation():
    with pytest.raises(ValueError):
        CriticalPointInventory(-1, 0, 0, 0)
    with pytest.raises(ValueError):
        CriticalPointInventory(1.5, 0, 0, 0)
    assert CriticalPointInventory(1, 1, 1, 1).euler == 0


def test_program_invariants():
    good = Attachment(1, "h1_d1", "d1", 2, "upper")
    HandleProgram(1, (good,))
    with pytest.raises(ValueError):
        HandleProgram(1, (good, Attachment(2, "h1_d1", "d2", 3, "lower")))  # duplicate label
    with pytest.raises(ValueError):
        HandleProgram(1, (good, Attachment(2, "x", "d1", 3, "lower")))  # disk reused
    with pytest.raises(ValueError):
        HandleProgram(1, (Attachment(1, "a", "d2", 2, "upper"),))  # step 2 on an even disk
    with pytest.raises(ValueError):
        HandleProgram(1, (Attachment(2, "a", "d1", 3, "lower"),))  # step 3 on an odd disk
    with pytest.raises(ValueError):
        HandleProgram(1, (Attachment(1, "a", "d3", 2, "upper"),))  # no such disk
    with pytest.raises(ValueError):
        HandleProgram(1, (Attachment(0, "a", "d1", 1, "B"),))  # seeds sit at fixed points


def test_blueprint_document():
    doc = blueprint_document(2)
    assert doc["inventory"] == [2, 3, 2, 1]
    assert doc["total"] == doc["lower_bound"] == 8
    assert doc["handles"][4] == {"index": 1, "label": "h1_d1", "disk": "d1", "step": 2, "stage": "upper"}
    assert json.loads(blueprint_json(2)) == doc
    with pytest.raises(ValueError):
        blueprint_document(-1)


# ---------------------------------------------------------------- orbit audit


def halve(p):
    return 0.5 * np.asarray(p, dtype=float)


def norm2(p):
    return np.sum(np.asarray(p) ** 2, axis=-1)


def test_audit_norm_squared_under_homothety(rng):
    seeds = rng.uniform(-2, 2, size=(200, 3))
    rep = audit_lyapunov_on_orbits(halve, norm2, seeds, fixed_points=[[0, 0, 0]])
    assert rep.ok and rep.seeds == 200 and rep.steps == 100


def test_audit_constant_candidate_flags_every_seed(rng):
    seeds = rng.uniform(-2, 2, size=(50, 3))
    rep = audit_lyapunov_on_orbits(halve, lambda p: 1.0, seeds, steps=5, fixed_points=[[0, 0, 0]])
    assert rep.wandering_seeds() == set(range(50))
    assert len(rep) == 250


def test_audit_exempts_fixed_point_balls():
    rep = audit_lyapunov_on_orbits(halve, lambda p: 1.0, [[0, 0, 0]], steps=3, fixed_points=[[0, 0, 0]])
    assert rep.ok
    rep = audit_lyapunov_on_orbits(halve, lambda p: 1.0, [[0, 0, 0]], steps=3, fixed_points=[])
    assert len(rep) == 3


def test_audit_of_the_chainrec_candidate(diffeos, rng):
    f = diffeos[0]
    g = transition_graph(build_cover(2.0, 5), f)
    dec = chain_components(g)
    candidate, recurrent = box_candidate(dec)
    x = rng.uniform(-2, 2, size=(300, 3))
    seeds = x[~recurrent(x)]
    assert len(seeds) > 200
    assert audit_lyapunov_on_orbits(f, candidate, seeds, exempt=recurrent).ok
    # without the recurrent mask the piecewise-constant values stall inside clusters
    assert not audit_lyapunov_on_orbits(f, candidate, seeds).ok
