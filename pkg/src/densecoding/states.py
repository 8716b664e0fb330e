"""Multipartite density matrices with labelled parties, and the named states.

Bell-state index convention used throughout the package::

    0: |psi->  = (|01> - |10>)/sqrt2      (the singlet)
    1: |psi+>  = (|01> + |10>)/sqrt2
    2: |phi->  = (|00> - |11>)/sqrt2
    3: |phi+>  = (|00> + |11>)/sqrt2
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np

from densecoding.tensor import (
    DEFAULT_TOL,
    DimensionError,
    hermitian_eigenvalues,
    is_hermitian,
    kron,
    outer,
    partial_trace,
    permute_subsystems,
)


class StateError(ValueError):
    """Base class for invalid density matrices."""


class NotHermitianError(StateError):
    pass


class NotPSDError(StateError):
    pass


class TraceError(StateError):
    pass


class PartyError(StateError):
    """Bad, duplicate or unknown party labels."""


class LayoutError(ValueError):
    """A dense-coding layout does not fit the state it is used with."""


@dataclass(frozen=True, eq=False)
class MultipartiteState:
    """Validated density operator on an ordered list of labelled parties.

    Use :func:`make_state` rather than calling the constructor directly, so
    that the matrix is checked.
    """

    parties: tuple[tuple[str, int], ...]
    matrix: np.ndarray = field(repr=False)

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(label for label, _ in self.parties)

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(d for _, d in self.parties)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label)
        except ValueError:
            raise PartyError(f"unknown party {label!r}; parties are {list(self.labels)}") from None

    def indices(self, labels: Iterable[str]) -> list[int]:
        return [self.index(lab) for lab in labels]

    def dim_of(self, labels: Iterable[str]) -> int:
        return int(np.prod([self.dims[k] for k in self.indices(labels)], dtype=int))

    def marginal(self, labels: Iterable[str]) -> MultipartiteState:
        """Reduced state on ``labels`` (kept in the state's own party order)."""
        keep = sorted(set(self.indices(labels)))
        mat = partial_trace(self.matrix, self.dims, keep)
        return MultipartiteState(tuple(self.parties[k] for k in keep), _frozen(mat))

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def __repr__(self) -> str:
        parties = ", ".join(f"{lab}:{d}" for lab, d in self.parties)
        return f"MultipartiteState({parties})"


def _frozen(mat: np.ndarray) -> np.ndarray:
    mat = np.array(mat, dtype=complex)
    mat.setflags(write=False)
    return mat


def _normalize_parties(parties) -> tuple[tuple[str, int], ...]:
    out = []
    for item in parties:
        label, d = item
        if not isinstance(label, str) or not label:
            raise PartyError(f"party labels must be non-empty strings, got {label!r}")
        d = int(d)
        if d < 2:
            raise PartyError(f"party {label!r} has dimension {d}; need at least 2")
        out.append((label, d))
    labels = [lab for lab, _ in out]
    if len(set(labels)) != len(labels):
        raise PartyError(f"duplicate party labels in {labels}")
    if not out:
        raise PartyError("a state needs at least one party")
    return tuple(out)


def make_state(parties, matrix, tol: float = DEFAULT_TOL) -> MultipartiteState:
    """Validate ``matrix`` as a density operator on ``parties``.

    Args:
        parties: sequence of ``(label, dim)`` pairs in tensor-factor order.
        matrix: square complex array of size ``prod(dims)``.
        tol: absolute tolerance for Hermiticity, positivity and unit trace.

    Raises:
        DimensionError, PartyError, NotHermitianError, TraceError, NotPSDError
    """
    parties = _normalize_parties(parties)
    mat = np.asarray(matrix, dtype=complex)
    total = int(np.prod([d for _, d in parties]))
    if mat.shape != (total, total):
        raise DimensionError(f"matrix shape {mat.shape} does not match party dimensions (total {total})")
    if not is_hermitian(mat, tol):
        raise NotHermitianError("density matrix is not Hermitian")
    tr = np.trace(mat).real
    if abs(tr - 1.0) > tol:
        raise TraceError(f"density matrix has trace {tr:.12g}, expected 1")
    lam_min = hermitian_eigenvalues(mat, tol)[0]
    if lam_min < -tol:
        raise NotPSDError(f"density matrix has negative eigenvalue {lam_min:.3g}")
    return MultipartiteState(parties, _frozen((mat + mat.conj().T) / 2))


def pure_state(parties, amplitudes, tol: float = DEFAULT_TOL) -> MultipartiteState:
    return make_state(parties, outer(amplitudes, tol), tol)


def qubit_labels(n: int) -> tuple[str, ...]:
    """Default labels for ``n`` qubits: senders ``A1..`` followed by two receivers."""
    if n == 2:
        return ("A", "B")
    return tuple(f"A{k + 1}" for k in range(n - 2)) + ("B1", "B2")


def _qubits(labels: Sequence[str]) -> list[tuple[str, int]]:
    return [(lab, 2) for lab in labels]


def _basis_ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def bell_vector(k: int) -> np.ndarray:
    """Amplitudes of Bell state ``k`` (see the module docstring for the ordering)."""
    s = 1 / np.sqrt(2)
    vectors = {
        0: s * (_basis_ket("01") - _basis_ket("10")),
        1: s * (_basis_ket("01") + _basis_ket("10")),
        2: s * (_basis_ket("00") - _basis_ket("11")),
        3: s * (_basis_ket("00") + _basis_ket("11")),
    }
    if k not in vectors:
        raise ValueError(f"Bell index must be 0..3, got {k}")
    return vectors[k]


def bell(k: int, labels: Sequence[str] = ("A", "B")) -> MultipartiteState:
    return pure_state(_qubits(labels), bell_vector(k))


def singlet(labels: Sequence[str] = ("A", "B")) -> MultipartiteState:
    return bell(0, labels)


def _psd_range_check(name: str, p: float, low: float, high: float = 1.0, tol: float = DEFAULT_TOL):
    if not (low - tol <= p <= high + tol):
        raise ValueError(f"{name} parameter p={p} outside the positive range [{low:.6g}, {high}]")


def werner(p: float, labels: Sequence[str] = ("A", "B")) -> MultipartiteState:
    """Singlet weight ``p`` mixed with white noise; positive for p in [-1/3, 1]."""
    _psd_range_check("werner", p, -1 / 3)
    mat = p * outer(bell_vector(0)) + (1 - p) * np.eye(4) / 4
    return make_state(_qubits(labels), mat)


def ghz_vector(n: int) -> np.ndarray:
    if n < 2:
        raise ValueError(f"GHZ needs at least 2 qubits, got {n}")
    v = np.zeros(2**n, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return v


def ghz(n: int, labels: Sequence[str] | None = None) -> MultipartiteState:
    labels = qubit_labels(n) if labels is None else labels
    if len(labels) != n:
        raise PartyError(f"{n} qubits need {n} labels, got {len(labels)}")
    return pure_state(_qubits(labels), ghz_vector(n))


def noisy_ghz(n: int, p: float, labels: Sequence[str] | None = None) -> MultipartiteState:
    """``p |GHZ><GHZ| + (1-p) I/2^n``, positive for p in [-1/(2^n - 1), 1]."""
    dim = 2**n
    _psd_range_check("noisy_ghz", p, -1 / (dim - 1))
    labels = qubit_labels(n) if labels is None else labels
    if len(labels) != n:
        raise PartyError(f"{n} qubits need {n} labels, got {len(labels)}")
    mat = p * outer(ghz_vector(n)) + (1 - p) * np.eye(dim) / dim
    return make_state(_qubits(labels), mat)


def smolin(labels: Sequence[str] = ("A1", "A2", "B1", "B2")) -> MultipartiteState:
    """Equal mixture of |b_k>|b_k> over the four Bell states ``b_k``.

    The first Bell pair sits on ``labels[0:2]``, the second on ``labels[2:4]``.
    """
    mat = sum(kron(outer(bell_vector(k)), outer(bell_vector(k))) for k in range(4)) / 4
    return make_state(_qubits(labels), mat)


FRANK_KETS = ("0000", "0101", "1000", "1110")


def frank_state(labels: Sequence[str] = ("A1", "A2", "B1", "B2")) -> MultipartiteState:
    """(|0000> + |0101> + |1000> + |1110>)/2 with qubits in ``labels`` order.

    The default reads the ket as (A1, A2, B1, B2). For the interleaved reading
    (A1, B1, A2, B2) pass those labels instead.
    """
    v = sum(_basis_ket(bits) for bits in FRANK_KETS) / 2
    return pure_state(_qubits(labels), v)


def tensor_states(s1: MultipartiteState, s2: MultipartiteState) -> MultipartiteState:
    clash = set(s1.labels) & set(s2.labels)
    if clash:
        raise PartyError(f"party labels collide: {sorted(clash)}")
    return MultipartiteState(s1.parties + s2.parties, _frozen(np.kron(s1.matrix, s2.matrix)))


def permute_parties(s: MultipartiteState, permutation: Sequence) -> MultipartiteState:
    """Reorder parties; ``permutation`` lists the new order by label or old index."""
    order = [s.index(p) if isinstance(p, str) else int(p) for p in permutation]
    if sorted(order) != list(range(len(s.parties))):
        raise PartyError(f"{list(permutation)} is not a permutation of {list(s.labels)}")
    mat = permute_subsystems(s.matrix, s.dims, order)
    return MultipartiteState(tuple(s.parties[k] for k in order), _frozen(mat))


def relabel(s: MultipartiteState, mapping: Mapping[str, str]) -> MultipartiteState:
    parties = _normalize_parties((mapping.get(lab, lab), d) for lab, d in s.parties)
    return MultipartiteState(parties, s.matrix)


def apply_local_unitaries(s: MultipartiteState, unitaries: Mapping[str, np.ndarray]) -> MultipartiteState:
    """Conjugate ``s`` by a tensor product of per-party unitaries (identity elsewhere)."""
    factors = [np.asarray(unitaries.get(lab, np.eye(d)), dtype=complex) for lab, d in s.parties]
    for (lab, d), u in zip(s.parties, factors):
        if u.shape != (d, d):
            raise DimensionError(f"unitary for {lab!r} has shape {u.shape}, party dimension is {d}")
    u = kron(*factors)
    return MultipartiteState(s.parties, _frozen(u @ s.matrix @ u.conj().T))


@dataclass(frozen=True)
class DenseCodingLayout:
    """Who sends, who receives, and which receiver each sender's system goes to."""

    senders: tuple[str, ...]
    receivers: tuple[str, ...]
    routing: Mapping[str, str]

    def __post_init__(self):
        object.__setattr__(self, "senders", tuple(self.senders))
        object.__setattr__(self, "receivers", tuple(self.receivers))
        if not self.senders:
            raise LayoutError("layout needs at least one sender")
        if len(self.receivers) not in (1, 2):
            raise LayoutError(f"layout needs one or two receivers, got {len(self.receivers)}")
        everyone = self.senders + self.receivers
        if len(set(everyone)) != len(everyone):
            raise LayoutError("sender and receiver labels must be distinct")
        routing = dict(self.routing)
        if len(self.receivers) == 1:
            for a in self.senders:
                routing.setdefault(a, self.receivers[0])
        for a in self.senders:
            if a not in routing:
                raise LayoutError(f"sender {a!r} has no receiver in routing")
            if routing[a] not in self.receivers:
                raise LayoutError(f"sender {a!r} routes to unknown receiver {routing[a]!r}")
        extra = set(routing) - set(self.senders)
        if extra:
            raise LayoutError(f"routing names non-senders {sorted(extra)}")
        object.__setattr__(self, "routing", dict(routing))

    @classmethod
    def single(cls, senders: Sequence[str], receiver: str) -> DenseCodingLayout:
        return cls(tuple(senders), (receiver,), {})

    @classmethod
    def paired(cls, pairs: Mapping[str, str]) -> DenseCodingLayout:
        """Two-receiver layout from a ``sender -> receiver`` map, receivers in first-seen order."""
        receivers = tuple(dict.fromkeys(pairs.values()))
        return cls(tuple(pairs), receivers, dict(pairs))

    @property
    def two_receivers(self) -> bool:
        return len(self.receivers) == 2

    def senders_to(self, receiver: str) -> tuple[str, ...]:
        return tuple(a for a in self.senders if self.routing[a] == receiver)

    def side(self, receiver: str) -> tuple[str, ...]:
        """Parties held by ``receiver`` once the senders have transmitted."""
        return self.senders_to(receiver) + (receiver,)

    def check(self, state: MultipartiteState) -> None:
        mine = set(self.senders) | set(self.receivers)
        theirs = set(state.labels)
        if mine != theirs:
            raise LayoutError(
                f"layout parties {sorted(mine)} do not match state parties {sorted(theirs)}"
            )

    def to_dict(self) -> dict:
        return {"senders": list(self.senders), "receivers": list(self.receivers), "routing": dict(self.routing)}
