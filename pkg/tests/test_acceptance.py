"""Acceptance suite: one test per criterion, summarized as PASS/FAIL lines at the end of the run."""

import numpy as np
import pytest

from conftest import random_state
from densecoding.capacities import (
    capacity_global,
    capacity_single_receiver,
    global_excess,
    lo_capacity,
    locc_upper_bound,
    split_entropies,
    two_copy_chi,
    werner_dc_threshold,
    werner_threshold,
)
from densecoding.criteria import bipartitions, classify, is_ppt, min_pt_eigenvalue
from densecoding.measures import (
    Ensemble,
    chi_locc,
    holevo_chi,
    mutual_information,
    shannon_entropy,
    von_neumann_entropy,
)
from densecoding.protocols import (
    ghz4_ensemble,
    ghz4_joint_distribution,
    ghz4_listed_states,
    ghz4_transcripts,
    weyl_encoding,
)
from densecoding.states import (
    DenseCodingLayout,
    bell,
    frank_state,
    ghz,
    make_state,
    permute_parties,
    pure_state,
    smolin,
    werner,
)

PAIRED = DenseCodingLayout.paired({"A1": "B1", "A2": "B2"})
SINGLE = DenseCodingLayout.single(["A"], "B")
FOUR = ["A1", "A2", "B1", "B2"]


def _raw_capacity(state, layout):
    r = capacity_single_receiver(state, layout)
    return r.classical_baseline + r.raw_excess


def test_criterion_01_werner_threshold():
    p = werner_dc_threshold()
    assert 0.74755 <= p <= 0.74765
    res = werner_threshold()
    assert res.root == p
    assert abs(von_neumann_entropy(werner(p)) - 1.0) <= 1e-6
    assert res.residual <= 1e-6


def test_criterion_02_werner_distillability_boundary():
    for p in (1 / 3 - 1e-6, 1 / 3 + 1e-6):
        lam = min_pt_eigenvalue(werner(p), (["A"], ["B"]))
        assert lam == pytest.approx((1 - 3 * p) / 4, abs=1e-12)
    below = min_pt_eigenvalue(werner(1 / 3 - 1e-6), (["A"], ["B"]))
    above = min_pt_eigenvalue(werner(1 / 3 + 1e-6), (["A"], ["B"]))
    assert below > 0 > above


def test_criterion_03_singlet_capacity():
    assert capacity_single_receiver(werner(1.0), SINGLE).capacity == pytest.approx(2.0, abs=1e-9)


def test_criterion_04_ghz4_locc():
    assert locc_upper_bound(ghz(4, FOUR), PAIRED) == pytest.approx(3.0, abs=1e-9)
    records = ghz4_transcripts()
    assert len(records) == 8
    assert sum(r.decoded == r.message for r in records) == 8
    assert all(r.success_probability == pytest.approx(1.0, abs=1e-9) for r in records)
    assert mutual_information(ghz4_joint_distribution(records)) == pytest.approx(3.0, abs=1e-9)
    fids = [f for r in records for b in r.branches for f in b.fidelities]
    assert fids and min(fids) >= 1 - 1e-9


def test_criterion_05_ghz4_ensemble_structure():
    listed = ghz4_listed_states()
    states = ghz4_ensemble().states
    for psi, rho in zip(listed, states):
        assert np.real(psi.conj() @ rho.matrix @ psi) >= 1 - 1e-9
    gram = np.array([[np.trace(a.matrix @ b.matrix).real for b in states] for a in states])
    assert np.allclose(gram, np.eye(8), atol=1e-9)
    listed_gram = np.array([[a.conj() @ b for b in listed] for a in listed])
    assert np.allclose(listed_gram, np.eye(8), atol=1e-9)


def test_criterion_06_chi_examples():
    parties = [("B1", 2), ("B2", 2)]
    zero, one = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    classical = Ensemble(((0.5, pure_state(parties, np.kron(zero, zero))), (0.5, pure_state(parties, np.kron(one, one)))))
    cut = (["B1"], ["B2"])
    assert holevo_chi(classical) == pytest.approx(1.0, abs=1e-9)
    assert chi_locc(classical, cut) == pytest.approx(2.0, abs=1e-9)
    for probs in ((0.25,) * 4, (0.4, 0.3, 0.2, 0.1)):
        e = Ensemble(tuple((p, bell(k, ("B1", "B2"))) for k, p in enumerate(probs)))
        assert holevo_chi(e) == pytest.approx(shannon_entropy(probs), abs=1e-9)
        assert chi_locc(e, cut) == pytest.approx(1.0, abs=1e-9)
    h = -sum(p * np.log2(p) for p in (0.4, 0.3, 0.2, 0.1))
    assert h == pytest.approx(1.8464393446710154, abs=1e-12)
    e = Ensemble(tuple((p, bell(k, ("B1", "B2"))) for k, p in enumerate((0.4, 0.3, 0.2, 0.1))))
    assert holevo_chi(e) == pytest.approx(h, abs=1e-9)


def test_criterion_07_smolin():
    s = smolin()
    r = capacity_single_receiver(s, DenseCodingLayout.single(["A1", "A2", "B1"], "B2"))
    assert r.raw_excess == pytest.approx(-1.0, abs=1e-9)
    assert r.capacity == pytest.approx(3.0, abs=1e-9)
    cuts = bipartitions(s.labels)
    two_two = [c for c in cuts if len(c[0]) == 2]
    one_three = [c for c in cuts if min(len(c[0]), len(c[1])) == 1]
    assert len(two_two) == 3 and len(one_three) == 4
    assert all(is_ppt(s, c)[0] for c in two_two)
    for c in one_three:
        flag, lam = is_ppt(s, c)
        assert not flag
        # eigensolve oracle: the partial transpose on one qubit has eigenvalues +-1/8
        assert lam == pytest.approx(-0.125, abs=1e-9)


def test_criterion_08_lo_example(singlet_pair, pair_layout):
    assert lo_capacity(singlet_pair, pair_layout) == pytest.approx(4.0, abs=1e-9)
    assert classify(singlet_pair, pair_layout).shell == "LO-DC"


def test_criterion_09_achievability(rng):
    for _ in range(25):
        dims = [int(rng.integers(2, 4)), int(rng.integers(2, 4))]
        s = random_state(dims, rng, ["A", "B"], rank=int(rng.integers(1, dims[0] * dims[1] + 1)))
        assert holevo_chi(weyl_encoding(s, SINGLE)) == pytest.approx(_raw_capacity(s, SINGLE), abs=1e-9)
    lay = DenseCodingLayout.single(["A1", "A2"], "B")
    for _ in range(10):
        s = random_state([2, 2, 2], rng, ["A1", "A2", "B"], rank=int(rng.integers(1, 9)))
        assert holevo_chi(weyl_encoding(s, lay)) == pytest.approx(_raw_capacity(s, lay), abs=1e-9)


def test_criterion_10_two_copy_additivity(rng):
    for _ in range(10):
        s = random_state([2, 2], rng, ["A", "B"], rank=int(rng.integers(1, 5)))
        assert two_copy_chi(s, SINGLE) == pytest.approx(_raw_capacity(s, SINGLE), abs=1e-9)


def test_criterion_11_bound_identity(rng):
    for _ in range(25):
        s = random_state([2, 2, 2, 2], rng, FOUR, rank=int(rng.integers(1, 17)))
        e = split_entropies(s, PAIRED)
        gap = locc_upper_bound(s, PAIRED) - lo_capacity(s, PAIRED, clamped=False)
        assert gap == pytest.approx(min(e.side1, e.side2), abs=1e-9)


def test_criterion_12_mixture_closure(rng):
    trials = 0
    while trials < 100:
        s1 = random_state([2, 2, 2, 2], rng, FOUR, rank=int(rng.integers(1, 17)))
        s2 = random_state([2, 2, 2, 2], rng, FOUR, rank=int(rng.integers(1, 17)))
        if global_excess(s1, PAIRED) > 0 or global_excess(s2, PAIRED) > 0:
            continue
        trials += 1
        t = rng.uniform()
        mix = make_state(s1.parties, t * s1.matrix + (1 - t) * s2.matrix)
        assert global_excess(mix, PAIRED) <= 1e-9


def test_criterion_13_frank_state(record_property):
    ket_order = frank_state()
    assert capacity_global(ket_order, PAIRED) == pytest.approx(3.5, abs=1e-9)
    interleaved = permute_parties(frank_state(("A1", "B1", "A2", "B2")), FOUR)
    bounds = {
        "ket order A1 A2 B1 B2": locc_upper_bound(ket_order, PAIRED),
        "ket order A1 B1 A2 B2": locc_upper_bound(interleaved, PAIRED),
    }
    for name, value in bounds.items():
        assert np.isfinite(value)
        record_property(f"frank bound ({name})", value)
