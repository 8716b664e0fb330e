"""Entropies and information bounds, all in bits."""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from densecoding.states import MultipartiteState, PartyError, StateError
from densecoding.tensor import DEFAULT_TOL, hermitian_eigenvalues


class DistributionError(ValueError):
    pass


def _check_distribution(p, tol: float) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if np.any(p < -tol):
        raise DistributionError(f"negative probability {p.min():.3g}")
    if abs(p.sum() - 1.0) > tol:
        raise DistributionError(f"probabilities sum to {p.sum():.12g}, expected 1")
    return np.clip(p, 0.0, None)


def shannon_entropy(dist: Iterable[float], tol: float = DEFAULT_TOL) -> float:
    p = _check_distribution(list(dist), tol)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def _spectrum_entropy(lam: np.ndarray, tol: float) -> float:
    trace = lam.sum()
    if lam[0] < -tol * max(trace, 1.0):
        raise StateError(f"matrix is not positive semidefinite (eigenvalue {lam[0]:.3g})")
    lam = lam[lam > tol * max(trace, 1.0)]
    return float(-np.sum(lam * np.log2(lam)))


def von_neumann_entropy(state, tol: float = DEFAULT_TOL) -> float:
    """S(rho) = -tr rho log2 rho for a state or a PSD matrix.

    Eigenvalues within ``tol`` (relative to the trace) of zero count as zero.
    """
    mat = state.matrix if isinstance(state, MultipartiteState) else state
    return _spectrum_entropy(hermitian_eigenvalues(mat), tol)


def entropy_of(state: MultipartiteState, labels: Iterable[str], tol: float = DEFAULT_TOL) -> float:
    """Entropy of the marginal of ``state`` on ``labels``."""
    labels = list(labels)
    if not labels:
        return 0.0
    return von_neumann_entropy(state.marginal(labels), tol)


@dataclass(frozen=True)
class JointDistribution:
    """Joint probabilities ``p[i, m]`` of message ``i`` and measurement outcome ``m``."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 2:
            raise DistributionError("joint distribution must be a 2-D table")
        _check_distribution(p.ravel(), DEFAULT_TOL)
        object.__setattr__(self, "p", np.clip(p, 0.0, None))

    @property
    def messages(self) -> np.ndarray:
        return self.p.sum(axis=1)

    @property
    def outcomes(self) -> np.ndarray:
        return self.p.sum(axis=0)


def mutual_information(joint: JointDistribution | np.ndarray) -> float:
    """I(i:m) = H(p_i) - sum_m q_m H(p_{i|m}); outcomes with q_m = 0 are skipped."""
    if not isinstance(joint, JointDistribution):
        joint = JointDistribution(joint)
    p = joint.p
    total = p.sum()
    p = p / total
    h_msg = shannon_entropy(p.sum(axis=1))
    remaining = 0.0
    for m, q in enumerate(p.sum(axis=0)):
        if q <= 0:
            continue
        remaining += q * shannon_entropy(p[:, m] / q)
    return max(h_msg - remaining, 0.0)


@dataclass(frozen=True, eq=False)
class Ensemble:
    """Weighted family of states on one common party structure."""

    items: tuple[tuple[float, MultipartiteState], ...]

    def __post_init__(self):
        items = tuple((float(p), s) for p, s in self.items)
        if not items:
            raise DistributionError("ensemble is empty")
        _check_distribution([p for p, _ in items], DEFAULT_TOL)
        parties = items[0][1].parties
        for _, s in items[1:]:
            if s.parties != parties:
                raise PartyError("ensemble members live on different party structures")
        object.__setattr__(self, "items", items)

    @property
    def probabilities(self) -> np.ndarray:
        return np.array([p for p, _ in self.items])

    @property
    def states(self) -> list[MultipartiteState]:
        return [s for _, s in self.items]

    @property
    def parties(self):
        return self.items[0][1].parties

    @property
    def labels(self) -> tuple[str, ...]:
        return self.items[0][1].labels

    def __len__(self) -> int:
        return len(self.items)

    def average(self) -> MultipartiteState:
        mat = sum(p * s.matrix for p, s in self.items)
        return MultipartiteState(self.parties, mat)

    def marginal(self, labels: Iterable[str]) -> Ensemble:
        labels = list(labels)
        return Ensemble(tuple((p, s.marginal(labels)) for p, s in self.items))


def holevo_chi(ensemble: Ensemble, tol: float = DEFAULT_TOL) -> float:
    """S(average) - sum_i p_i S(rho_i)."""
    avg = von_neumann_entropy(ensemble.average(), tol)
    mean = sum(p * von_neumann_entropy(s, tol) for p, s in ensemble.items if p > 0)
    return max(avg - mean, 0.0)


def _check_cut(labels: Sequence[str], side1: Sequence[str], side2: Sequence[str]) -> None:
    s1, s2 = set(side1), set(side2)
    if not s1 or not s2:
        raise PartyError("both sides of a cut must be non-empty")
    if s1 & s2:
        raise PartyError(f"cut sides overlap on {sorted(s1 & s2)}")
    if s1 | s2 != set(labels):
        raise PartyError(f"cut {sorted(s1)} | {sorted(s2)} does not cover parties {list(labels)}")


def chi_locc(ensemble: Ensemble, cut: tuple[Sequence[str], Sequence[str]], tol: float = DEFAULT_TOL) -> float:
    """Local bound for two receivers holding the two sides of ``cut``.

    S(avg^1) + S(avg^2) - max_Z sum_i p_i S(rho_i^Z), Z ranging over the sides.
    """
    side1, side2 = (list(c) for c in cut)
    _check_cut(ensemble.labels, side1, side2)
    total = 0.0
    member_terms = []
    for side in (side1, side2):
        marg = ensemble.marginal(side)
        total += von_neumann_entropy(marg.average(), tol)
        member_terms.append(sum(p * von_neumann_entropy(s, tol) for p, s in marg.items if p > 0))
    return total - max(member_terms)
