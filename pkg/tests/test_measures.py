import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densecoding.measures import (
    DistributionError,
    Ensemble,
    JointDistribution,
    chi_locc,
    entropy_of,
    holevo_chi,
    mutual_information,
    shannon_entropy,
    von_neumann_entropy,
)
from densecoding.states import StateError, bell, make_state, pure_state, singlet, werner
from conftest import random_state, random_unitary

QUBITS2 = [("B1", 2), ("B2", 2)]


def ket(bits):
    v = np.zeros(2 ** len(bits))
    v[int(bits, 2)] = 1
    return v


def h(ps):
    return -sum(p * math.log2(p) for p in ps if p > 0)


def test_shannon_examples():
    assert shannon_entropy([1, 0]) == 0
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(1, abs=1e-12)
    assert shannon_entropy([0.25] * 4) == pytest.approx(2, abs=1e-12)


def test_shannon_errors():
    with pytest.raises(DistributionError):
        shannon_entropy([0.5, 0.6])
    with pytest.raises(DistributionError):
        shannon_entropy([1.5, -0.5])


@given(st.lists(st.floats(min_value=0, max_value=1), min_size=1, max_size=12).filter(lambda xs: sum(xs) > 1e-3))
def test_shannon_bounds(xs):
    p = np.array(xs) / sum(xs)
    value = shannon_entropy(p)
    assert -1e-12 <= value <= math.log2(len(p)) + 1e-9


def test_von_neumann_examples():
    assert von_neumann_entropy(singlet()) == pytest.approx(0, abs=1e-12)
    for d in (2, 3, 5):
        assert von_neumann_entropy(np.eye(d) / d) == pytest.approx(math.log2(d), abs=1e-12)
    assert von_neumann_entropy(werner(0.5)) == pytest.approx(h([0.625, 0.125, 0.125, 0.125]), abs=1e-12)
    assert von_neumann_entropy(werner(0.5)) == pytest.approx(1.5488, abs=1e-4)


def test_von_neumann_rejects_negative_matrix():
    with pytest.raises(StateError):
        von_neumann_entropy(np.diag([1.1, -0.1]))


def test_mutual_information_examples():
    assert mutual_information(np.outer([0.3, 0.7], [0.2, 0.5, 0.3])) == pytest.approx(0, abs=1e-12)
    assert mutual_information(np.eye(8) / 8) == pytest.approx(3, abs=1e-12)
    # H(p_i) - sum_m q_m H(p_i|m) evaluated by hand: 1 - H(0.8, 0.2)
    expected = 1 - h([0.8, 0.2])
    assert mutual_information(np.array([[0.4, 0.1], [0.1, 0.4]])) == pytest.approx(expected, abs=1e-12)
    assert expected == pytest.approx(0.278, abs=1e-3)


def test_mutual_information_skips_empty_outcomes():
    p = np.array([[0.5, 0.0, 0.0], [0.0, 0.0, 0.5]])
    assert mutual_information(p) == pytest.approx(1, abs=1e-12)
    with pytest.raises(DistributionError):
        JointDistribution(np.array([[0.5, 0.6]]))


@settings(max_examples=50)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_mutual_information_nonnegative_and_bounded(seed):
    p = np.random.default_rng(seed).random((3, 4))
    p /= p.sum()
    value = mutual_information(p)
    assert -1e-12 <= value <= min(shannon_entropy(p.sum(1)), shannon_entropy(p.sum(0))) + 1e-9


def _ens(*pairs):
    return Ensemble(tuple(pairs))


def test_holevo_classical_pair():
    e = _ens((0.5, pure_state(QUBITS2, ket("00"))), (0.5, pure_state(QUBITS2, ket("11"))))
    assert holevo_chi(e) == pytest.approx(1, abs=1e-9)
    assert chi_locc(e, (["B1"], ["B2"])) == pytest.approx(2, abs=1e-9)


@pytest.mark.parametrize("probs", [(0.25,) * 4, (0.4, 0.3, 0.2, 0.1), (0.7, 0.1, 0.1, 0.1)])
def test_holevo_bell_ensembles(probs):
    e = _ens(*((p, bell(k, ("B1", "B2"))) for k, p in enumerate(probs)))
    assert holevo_chi(e) == pytest.approx(h(probs), abs=1e-9)
    assert chi_locc(e, (["B1"], ["B2"])) == pytest.approx(1, abs=1e-9)


def test_single_member_ensembles():
    s = random_state([2, 2], np.random.default_rng(3), labels=["B1", "B2"])
    assert holevo_chi(_ens((1.0, s))) == pytest.approx(0, abs=1e-9)
    product = pure_state(QUBITS2, ket("01"))
    assert chi_locc(_ens((1.0, product)), (["B1"], ["B2"])) == pytest.approx(0, abs=1e-9)


def test_chi_locc_bad_cut():
    e = _ens((1.0, singlet(("B1", "B2"))))
    with pytest.raises(ValueError):
        chi_locc(e, (["B1"], ["B1", "B2"]))
    with pytest.raises(ValueError):
        chi_locc(e, (["B1"], []))


def test_ensemble_validation():
    with pytest.raises(DistributionError):
        _ens((0.5, singlet()), (0.4, singlet()))
    with pytest.raises(ValueError):
        _ens((0.5, singlet()), (0.5, singlet(("X", "Y"))))


def test_entropy_unitary_invariance(rng):
    for _ in range(5):
        s = random_state([2, 3], rng)
        u = random_unitary(6, rng)
        assert von_neumann_entropy(u @ s.matrix @ u.conj().T) == pytest.approx(von_neumann_entropy(s), abs=1e-9)


def test_subadditivity(rng):
    for _ in range(20):
        s = random_state([2, 3], rng, rank=int(rng.integers(1, 7)))
        assert von_neumann_entropy(s) <= entropy_of(s, ["P0"]) + entropy_of(s, ["P1"]) + 1e-9


def test_holevo_zero_iff_identical(rng):
    s = random_state([2, 2], rng)
    assert holevo_chi(_ens((0.3, s), (0.7, s))) == pytest.approx(0, abs=1e-9)
    t = random_state([2, 2], rng)
    assert holevo_chi(_ens((0.3, s), (0.7, t))) > 1e-6
    # zero-weight members do not count
    assert holevo_chi(_ens((1.0, s), (0.0, t))) == pytest.approx(0, abs=1e-9)


def test_conditional_entropy_concavity(rng):
    for _ in range(50):
        r = random_state([2, 2], rng, rank=int(rng.integers(1, 5)))
        s = random_state([2, 2], rng, rank=int(rng.integers(1, 5)))
        lam = rng.random()
        mix = make_state(r.parties, lam * r.matrix + (1 - lam) * s.matrix)

        def cond(x):
            return von_neumann_entropy(x) - entropy_of(x, ["P1"])

        assert cond(mix) >= lam * cond(r) + (1 - lam) * cond(s) - 1e-9


def test_chi_locc_both_directions():
    classical = _ens((0.5, pure_state(QUBITS2, ket("00"))), (0.5, pure_state(QUBITS2, ket("11"))))
    bells = _ens(*((0.25, bell(k, ("B1", "B2"))) for k in range(4)))
    cut = (["B1"], ["B2"])
    assert chi_locc(classical, cut) > holevo_chi(classical)
    assert chi_locc(bells, cut) < holevo_chi(bells)
