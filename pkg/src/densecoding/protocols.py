"""Unitary encodings, projective measurements and the four-qubit GHZ protocol.

The GHZ protocol: two senders each hold one qubit of |0000> + |1111>
(order A1, A2, B1, B2). A1 applies one of I, X, Y, Z and A2 one of I, X, then
A1's qubit travels to B1 and A2's to B2. Each receiver now holds a pair
(A1 B1 for B1, A2 B2 for B2). Decoding is three rounds of local projective
measurements with classical communication between the receivers:

1. B1 measures P0 = |00><00| + |11><11| versus P1 = |01><01| + |10><10|.
2. B2 does the same on its pair.
3. Each receiver measures its pair in {|00> +- |11>} if its earlier outcome
   was P0, otherwise in {|01> +- |10>}.
"""

from __future__ import annotations

import itertools
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from densecoding.measures import Ensemble, JointDistribution, mutual_information
from densecoding.states import (
    DenseCodingLayout,
    LayoutError,
    MultipartiteState,
    PartyError,
    ghz,
    permute_parties,
    relabel,
)
from densecoding.tensor import DEFAULT_TOL, DimensionError, embed_operator, kron, outer

MAX_ENSEMBLE = 4096

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class EnsembleTooLarge(ValueError):
    pass


class MeasurementError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class UnitarySet:
    """A list of ``dim x dim`` unitaries used as an encoding alphabet."""

    dim: int
    members: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.members)

    def is_unitary(self, tol: float = DEFAULT_TOL) -> bool:
        eye = np.eye(self.dim)
        return all(np.max(np.abs(w.conj().T @ w - eye)) <= tol for w in self.members)

    def gram(self) -> np.ndarray:
        """Hilbert-Schmidt inner products Tr(W_j^dagger W_k)."""
        flat = np.array([w.ravel() for w in self.members])
        return flat.conj() @ flat.T

    def is_orthogonal(self, tol: float = DEFAULT_TOL) -> bool:
        return bool(np.max(np.abs(self.gram() - self.dim * np.eye(len(self)))) <= tol)

    def twirl(self, op) -> np.ndarray:
        """(1/d) sum_j W_j^dagger op W_j; equals Tr(op) I for a complete set."""
        op = np.asarray(op, dtype=complex)
        return sum(w.conj().T @ op @ w for w in self.members) / self.dim

    def satisfies_trace_rule(self, op, tol: float = DEFAULT_TOL) -> bool:
        target = np.trace(op) * np.eye(self.dim)
        return bool(np.max(np.abs(self.twirl(op) - target)) <= tol)

    def tensor(self, other: UnitarySet) -> UnitarySet:
        members = tuple(np.kron(a, b) for a in self.members for b in other.members)
        return UnitarySet(self.dim * other.dim, members)


def weyl_set(d: int) -> UnitarySet:
    """The d^2 shift-and-clock operators X^a Z^b, a, b = 0..d-1.

    X|j> = |j+1 mod d>, Z|j> = w^j |j> with w = exp(2 pi i / d). For d = 2 this
    is {I, Z, X, XZ}, i.e. the Paulis up to a phase on Y.
    """
    if d < 2:
        raise ValueError(f"need d >= 2, got {d}")
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    members = tuple(
        np.linalg.matrix_power(shift, a) @ np.linalg.matrix_power(clock, b)
        for a in range(d)
        for b in range(d)
    )
    return UnitarySet(d, members)


def pauli_set(names: str = "IXYZ") -> UnitarySet:
    return UnitarySet(2, tuple(PAULI[c] for c in names))


def _group_key(key) -> tuple[str, ...]:
    return (key,) if isinstance(key, str) else tuple(key)


def encode_ensemble(
    state: MultipartiteState,
    layout: DenseCodingLayout,
    sets: Mapping,
    probs: Mapping | None = None,
    max_members: int = MAX_ENSEMBLE,
) -> Ensemble:
    """Ensemble produced by independent local unitary encodings of the senders.

    Args:
        state: shared state, parties matching ``layout``.
        layout: senders and receivers.
        sets: ``sender -> UnitarySet``. A key may also be a tuple of senders,
            in which case the set acts jointly on those senders' combined
            space (in the tuple's order). The keys must partition the senders.
        probs: optional ``key -> probabilities`` per set; uniform by default.
        max_members: refuse to build larger ensembles.

    The member for index string (i_1, ..., i_K) is U rho U^dagger with
    U = U_{i_1} (x) ... (x) U_{i_K} (x) I, and its weight is the product of
    the per-set probabilities.
    """
    layout.check(state)
    groups = [(_group_key(k), v) for k, v in sets.items()]
    covered = [a for g, _ in groups for a in g]
    if sorted(covered) != sorted(layout.senders):
        raise LayoutError(f"encoding sets cover {sorted(covered)}, senders are {sorted(layout.senders)}")
    probs = probs or {}
    size = int(np.prod([len(u) for _, u in groups]))
    if size > max_members:
        raise EnsembleTooLarge(f"ensemble would have {size} members (cap {max_members})")

    lifted = []
    weights = []
    for (group, uset), key in zip(groups, sets):
        targets = state.indices(group)
        if uset.dim != state.dim_of(group):
            raise DimensionError(f"set for {group} has dimension {uset.dim}, parties span {state.dim_of(group)}")
        p = probs.get(key)
        p = np.full(len(uset), 1 / len(uset)) if p is None else np.asarray(p, dtype=float)
        if len(p) != len(uset) or np.any(p < 0) or abs(p.sum() - 1) > DEFAULT_TOL:
            raise ValueError(f"bad encoding probabilities for {group}")
        lifted.append([embed_operator(w, state.dims, targets) for w in uset.members])
        weights.append(p)

    items = []
    for idx in itertools.product(*(range(len(w)) for w in weights)):
        weight = float(np.prod([w[i] for w, i in zip(weights, idx)]))
        u = np.eye(state.dim, dtype=complex)
        for ops, i in zip(lifted, idx):
            u = ops[i] @ u
        items.append((weight, MultipartiteState(state.parties, u @ state.matrix @ u.conj().T)))
    return Ensemble(tuple(items))


def weyl_encoding(state: MultipartiteState, layout: DenseCodingLayout, **kwargs) -> Ensemble:
    """Uniform full shift-and-clock encoding by every sender separately."""
    sets = {a: weyl_set(state.dim_of([a])) for a in layout.senders}
    return encode_ensemble(state, layout, sets, **kwargs)


@dataclass(frozen=True)
class Branch:
    outcome: int
    probability: float
    state: MultipartiteState


def projective_measure(
    state: MultipartiteState,
    projectors: Sequence,
    parties: Sequence[str],
    tol: float = DEFAULT_TOL,
) -> list[Branch]:
    """Measure ``projectors`` on the ``parties`` factors of ``state``.

    Returns the non-zero-probability branches with renormalized post-states.

    Raises:
        MeasurementError: if an operator is not an orthogonal projector or the
            set does not resolve the identity on ``parties``.
    """
    targets = state.indices(parties)
    d = state.dim_of(parties)
    projectors = [np.asarray(p, dtype=complex) for p in projectors]
    for k, p in enumerate(projectors):
        if p.shape != (d, d):
            raise MeasurementError(f"projector {k} has shape {p.shape}, parties span {d}")
        if np.max(np.abs(p - p.conj().T)) > tol or np.max(np.abs(p @ p - p)) > tol:
            raise MeasurementError(f"operator {k} is not an orthogonal projector")
    if np.max(np.abs(sum(projectors) - np.eye(d))) > tol:
        raise MeasurementError("projectors do not sum to the identity")

    branches = []
    for k, p in enumerate(projectors):
        big = embed_operator(p, state.dims, targets)
        post = big @ state.matrix @ big
        prob = float(np.trace(post).real)
        if prob > tol:
            branches.append(Branch(k, prob, MultipartiteState(state.parties, post / prob)))
    return branches


def fidelity_pure(psi: np.ndarray, state: MultipartiteState) -> float:
    return float(np.real(psi.conj() @ state.matrix @ psi))


# --- four-qubit GHZ protocol -------------------------------------------------

# message k <-> (A1 unitary, A2 unitary); produces psi_{k+1} of the list below
GHZ4_ENCODINGS = (
    ("I", "I"), ("Z", "I"), ("I", "X"), ("Z", "X"),
    ("X", "I"), ("Y", "I"), ("X", "X"), ("Y", "X"),
)

# receiver-side order: B1 holds (A1, B1), B2 holds (A2, B2)
GHZ4_RECEIVED_ORDER = ("A1", "B1", "A2", "B2")
GHZ4_PAIRS = (("A1", "B1"), ("A2", "B2"))


def _ket(bits: str) -> np.ndarray:
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1
    return v


def ghz4_listed_states() -> list[np.ndarray]:
    """psi_1..psi_8 as written, in (B1 pair)(B2 pair) qubit order, normalized."""
    blocks = (("00", "00", "11", "11"), ("00", "10", "11", "01"), ("10", "00", "01", "11"), ("10", "10", "01", "01"))
    out = []
    for a, b, c, e in blocks:
        for sign in (1, -1):
            out.append((_ket(a + b) + sign * _ket(c + e)) / np.sqrt(2))
    return out


P0 = outer(_ket("00")) + outer(_ket("11"))
P1 = outer(_ket("01")) + outer(_ket("10"))
PARITY_PROJECTORS = (P0, P1)


def _final_basis(parity_outcome: int) -> tuple[np.ndarray, ...]:
    """{|00>+|11>, |00>-|11>} after P0, {|01>+|10>, |01>-|10>} after P1, plus the complement."""
    s = 1 / np.sqrt(2)
    if parity_outcome == 0:
        plus, minus = s * (_ket("00") + _ket("11")), s * (_ket("00") - _ket("11"))
        rest = P1
    else:
        plus, minus = s * (_ket("01") + _ket("10")), s * (_ket("01") - _ket("10"))
        rest = P0
    return (outer(plus), outer(minus), rest)


def ghz4_ensemble(shared: MultipartiteState | None = None) -> Ensemble:
    """Eight equiprobable encoded states, parties ordered (A1, B1, A2, B2).

    ``shared`` defaults to the GHZ state on (A1, A2, B1, B2).
    """
    shared = ghz(4) if shared is None else shared
    if shared.labels != ("A1", "A2", "B1", "B2") or shared.dims != (2, 2, 2, 2):
        raise PartyError("GHZ protocol expects four qubits labelled A1, A2, B1, B2")
    items = []
    for u1, u2 in GHZ4_ENCODINGS:
        u = kron(PAULI[u1], PAULI[u2], np.eye(4))
        member = MultipartiteState(shared.parties, u @ shared.matrix @ u.conj().T)
        items.append((1 / 8, permute_parties(member, GHZ4_RECEIVED_ORDER)))
    return Ensemble(tuple(items))


def _decoding_table() -> dict[tuple[int, int, int, int], int]:
    """Outcome string (r1, r2, o1, o2) -> message, built from the listed states.

    Raises if two messages could produce the same outcome string, i.e. if the
    measurement tree did not perfectly separate the list.
    """
    table: dict[tuple[int, int, int, int], int] = {}
    for k, psi in enumerate(ghz4_listed_states()):
        rho = MultipartiteState(tuple((lab, 2) for lab in GHZ4_RECEIVED_ORDER), outer(psi))
        for outcomes, prob, _ in _branches(rho):
            if prob <= DEFAULT_TOL:
                continue
            if outcomes in table and table[outcomes] != k:
                raise AssertionError(f"outcome {outcomes} is ambiguous between messages")
            table[outcomes] = k
    return table


@dataclass(frozen=True)
class ProtocolBranch:
    """One path through the measurement tree."""

    outcomes: tuple[tuple[int, str, int], ...]  # (round, receiver, projector index)
    probability: float
    decoded: int | None
    post_state: MultipartiteState
    fidelities: tuple[float, ...]  # overlap with the pre-measurement state after rounds 1 and 2


@dataclass(frozen=True)
class MeasurementOutcomeRecord:
    message: int
    encoding: tuple[str, str]
    branches: tuple[ProtocolBranch, ...] = field(repr=False)

    @property
    def decoded(self) -> int | None:
        """The decoded message if every branch agrees, else ``None``."""
        values = {b.decoded for b in self.branches}
        return values.pop() if len(values) == 1 else None

    @property
    def success_probability(self) -> float:
        return sum(b.probability for b in self.branches if b.decoded == self.message)

    @property
    def outcome_probabilities(self) -> dict[tuple[int, int, int, int], float]:
        return {tuple(o[2] for o in b.outcomes): b.probability for b in self.branches}


def _branches(rho: MultipartiteState):
    """Enumerate (outcome string, probability, post-state) through the three rounds."""
    for b1 in projective_measure(rho, PARITY_PROJECTORS, GHZ4_PAIRS[0]):
        for b2 in projective_measure(b1.state, PARITY_PROJECTORS, GHZ4_PAIRS[1]):
            for c1 in projective_measure(b2.state, _final_basis(b1.outcome), GHZ4_PAIRS[0]):
                for c2 in projective_measure(c1.state, _final_basis(b2.outcome), GHZ4_PAIRS[1]):
                    prob = b1.probability * b2.probability * c1.probability * c2.probability
                    yield (b1.outcome, b2.outcome, c1.outcome, c2.outcome), prob, (b1, b2, c1, c2)


def _overlap(a: MultipartiteState, b: MultipartiteState) -> float:
    """Tr(a b); equals the fidelity when one of them is pure."""
    return float(np.real(np.trace(a.matrix @ b.matrix)))


def _run_message(rho: MultipartiteState, message: int, table) -> MeasurementOutcomeRecord:
    branches = []
    for outcomes, prob, (b1, b2, c1, c2) in _branches(rho):
        labelled = ((1, "B1", outcomes[0]), (2, "B2", outcomes[1]), (3, "B1", outcomes[2]), (3, "B2", outcomes[3]))
        fids = (_overlap(b1.state, rho), _overlap(b2.state, rho))
        branches.append(ProtocolBranch(labelled, prob, table.get(outcomes), c2.state, fids))
    return MeasurementOutcomeRecord(message, GHZ4_ENCODINGS[message], tuple(branches))


def ghz4_locc_decode(message: int, shared: MultipartiteState | None = None) -> MeasurementOutcomeRecord:
    """Encode ``message`` (0..7) on the shared state and run the decoding tree."""
    if not 0 <= int(message) < len(GHZ4_ENCODINGS):
        raise ValueError(f"message must be in 0..7, got {message}")
    ensemble = ghz4_ensemble(shared)
    return _run_message(ensemble.states[message], int(message), _decoding_table())


def ghz4_transcripts(shared: MultipartiteState | None = None) -> list[MeasurementOutcomeRecord]:
    ensemble = ghz4_ensemble(shared)
    table = _decoding_table()
    return [_run_message(s, k, table) for k, s in enumerate(ensemble.states)]


def ghz4_joint_distribution(records: Sequence[MeasurementOutcomeRecord]) -> JointDistribution:
    """p(message, outcome string) for equiprobable messages."""
    outcomes = sorted({o for r in records for o in r.outcome_probabilities})
    col = {o: j for j, o in enumerate(outcomes)}
    p = np.zeros((len(records), len(outcomes)))
    for r in records:
        for o, q in r.outcome_probabilities.items():
            p[r.message, col[o]] += q / len(records)
    return JointDistribution(p)


def _su2(theta: np.ndarray) -> np.ndarray:
    t = np.linalg.norm(theta)
    if t < 1e-15:
        return np.eye(2, dtype=complex)
    n = theta / t
    gen = n[0] * PAULI["X"] + n[1] * PAULI["Y"] + n[2] * PAULI["Z"]
    return np.cos(t) * np.eye(2) - 1j * np.sin(t) * gen


def _frame(params: np.ndarray) -> np.ndarray:
    return kron(*(_su2(params[3 * k: 3 * k + 3]) for k in range(4)))


def align_to_ghz4(shared: MultipartiteState, restarts: int = 8, seed: int = 0) -> tuple[np.ndarray, float]:
    """Local unitary V maximizing <GHZ|V rho V^dagger|GHZ>, found numerically.

    The receivers and senders can agree on V in advance, so running the
    protocol on V rho V^dagger is still local. Returns (V, fidelity).
    """
    g = ghz(4).matrix[:, 0] * np.sqrt(2)
    g = g / np.linalg.norm(g)
    rho = shared.matrix

    def loss(x):
        v = _frame(x)
        w = v.conj().T @ g
        return 1.0 - float(np.real(w.conj() @ rho @ w))

    rng = np.random.default_rng(seed)
    best_x, best = np.zeros(12), loss(np.zeros(12))
    starts = [np.zeros(12)] + [rng.uniform(-np.pi, np.pi, 12) for _ in range(restarts)]
    for x0 in starts:
        if best < 1e-12:
            break
        res = minimize(loss, x0, method="BFGS", options={"gtol": 1e-12})
        if res.fun < best:
            best_x, best = res.x, res.fun
    return _frame(best_x), 1.0 - best


class GHZ4Protocol:
    """Registry entry: certifies an LOCC rate by simulating the GHZ decoding tree."""

    name = "ghz4"

    def canonical(self, state: MultipartiteState, layout: DenseCodingLayout) -> MultipartiteState | None:
        """``state`` reordered/relabelled to (A1, A2, B1, B2), or None if the layout does not fit."""
        if not layout.two_receivers or len(layout.senders) != 2 or set(state.dims) != {2}:
            return None
        r1, r2 = layout.receivers
        s1, s2 = layout.senders_to(r1), layout.senders_to(r2)
        if len(s1) != 1 or len(s2) != 1:
            return None
        order = [s1[0], s2[0], r1, r2]
        moved = permute_parties(state, order)
        return relabel(moved, dict(zip(order, ("A1", "A2", "B1", "B2"))))

    def rate(self, state: MultipartiteState, layout: DenseCodingLayout, search_frame: bool = True) -> float | None:
        """Mutual information (bits) the protocol achieves, or None if not applicable."""
        shared = self.canonical(state, layout)
        if shared is None:
            return None
        best = mutual_information(ghz4_joint_distribution(ghz4_transcripts(shared)))
        if search_frame and best < 3.0 - 1e-9:
            v, _ = align_to_ghz4(shared)
            rotated = MultipartiteState(shared.parties, v @ shared.matrix @ v.conj().T)
            best = max(best, mutual_information(ghz4_joint_distribution(ghz4_transcripts(rotated))))
        return float(best)


DEFAULT_PROTOCOLS = (GHZ4Protocol(),)
