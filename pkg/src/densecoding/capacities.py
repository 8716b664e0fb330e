"""Dense-coding capacities for one and two receivers, and threshold solvers.

Unitary encodings only. With senders A_1..A_N, receiver(s) B and shared state
rho, the quantities reported are

* single receiver:  sum_k log2 d_{A_k} + S(rho^B) - S(rho)
* global (receivers together):  the same with B = B1 B2
* LOCC upper bound:  sum_k log2 d_{A_k} + S(rho^{B1}) + S(rho^{B2}) - max(S(rho^1), S(rho^2))
* no-communication capacity:  C(rho^1) + C(rho^2)

where rho^1 / rho^2 are the states held by B1 / B2 after transmission.
Capacities are clamped below at the classical baseline sum_k log2 d_{A_k}
(no encoding can do worse than sending the systems without using the
entanglement); the unclamped excess is always reported alongside.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import asdict, dataclass, field

import numpy as np

from densecoding.measures import entropy_of, holevo_chi, von_neumann_entropy
from densecoding.protocols import encode_ensemble, weyl_set
from densecoding.states import (
    DenseCodingLayout,
    LayoutError,
    MultipartiteState,
    noisy_ghz,
    relabel,
    tensor_states,
    werner,
)
from densecoding.tensor import DEFAULT_TOL

MAX_ITER = 200


@dataclass(frozen=True)
class SplitEntropies:
    receiver1: float
    receiver2: float
    side1: float
    side2: float


@dataclass(frozen=True)
class CapacityReport:
    layout: DenseCodingLayout
    classical_baseline: float
    capacity: float
    raw_excess: float
    locc_upper_bound: float | None = None
    lo_capacity: float | None = None
    lo_raw_excess: float | None = None
    split_entropies: SplitEntropies | None = None

    @property
    def useful(self) -> bool:
        return self.raw_excess > 0

    def to_dict(self) -> dict:
        out = {
            "layout": self.layout.to_dict(),
            "classical_baseline": self.classical_baseline,
            "capacity": self.capacity,
            "raw_excess": self.raw_excess,
        }
        if self.layout.two_receivers:
            out["locc_upper_bound"] = self.locc_upper_bound
            out["lo_capacity"] = self.lo_capacity
            out["lo_raw_excess"] = self.lo_raw_excess
            out["split_entropies"] = asdict(self.split_entropies)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> CapacityReport:
        lay = data["layout"]
        layout = DenseCodingLayout(tuple(lay["senders"]), tuple(lay["receivers"]), lay["routing"])
        split = data.get("split_entropies")
        return cls(
            layout=layout,
            classical_baseline=data["classical_baseline"],
            capacity=data["capacity"],
            raw_excess=data["raw_excess"],
            locc_upper_bound=data.get("locc_upper_bound"),
            lo_capacity=data.get("lo_capacity"),
            lo_raw_excess=data.get("lo_raw_excess"),
            split_entropies=SplitEntropies(**split) if split else None,
        )


def classical_baseline(state: MultipartiteState, layout: DenseCodingLayout) -> float:
    """sum_k log2 d_{A_k}: what the senders get without shared entanglement."""
    return float(sum(np.log2(state.dim_of([a])) for a in layout.senders))


def _excess(state: MultipartiteState, receivers, tol: float) -> float:
    return entropy_of(state, receivers, tol) - von_neumann_entropy(state, tol)


def capacity_single_receiver(
    state: MultipartiteState, layout: DenseCodingLayout, tol: float = DEFAULT_TOL
) -> CapacityReport:
    layout.check(state)
    if layout.two_receivers:
        raise LayoutError("capacity_single_receiver needs a layout with one receiver")
    base = classical_baseline(state, layout)
    raw = _excess(state, layout.receivers, tol)
    return CapacityReport(layout, base, base + max(0.0, raw), raw)


def _require_two(state: MultipartiteState, layout: DenseCodingLayout) -> None:
    layout.check(state)
    if not layout.two_receivers:
        raise LayoutError("this quantity needs a layout with two receivers")


def global_excess(state: MultipartiteState, layout: DenseCodingLayout, tol: float = DEFAULT_TOL) -> float:
    """S(rho^{B1 B2}) - S(rho), or S(rho^B) - S(rho) for one receiver."""
    layout.check(state)
    return _excess(state, layout.receivers, tol)


def capacity_global(state: MultipartiteState, layout: DenseCodingLayout, tol: float = DEFAULT_TOL) -> float:
    """Capacity when both receivers measure jointly (clamped at the baseline)."""
    _require_two(state, layout)
    return classical_baseline(state, layout) + max(0.0, global_excess(state, layout, tol))


def split_entropies(state: MultipartiteState, layout: DenseCodingLayout, tol: float = DEFAULT_TOL) -> SplitEntropies:
    _require_two(state, layout)
    b1, b2 = layout.receivers
    return SplitEntropies(
        receiver1=entropy_of(state, [b1], tol),
        receiver2=entropy_of(state, [b2], tol),
        side1=entropy_of(state, layout.side(b1), tol),
        side2=entropy_of(state, layout.side(b2), tol),
    )


def locc_upper_bound(state: MultipartiteState, layout: DenseCodingLayout, tol: float = DEFAULT_TOL) -> float:
    """Upper bound on the capacity with separated receivers using LOCC (unclamped)."""
    e = split_entropies(state, layout, tol)
    return classical_baseline(state, layout) + e.receiver1 + e.receiver2 - max(e.side1, e.side2)


def _side_capacity(state: MultipartiteState, layout: DenseCodingLayout, receiver: str, clamped: bool, tol: float):
    senders = layout.senders_to(receiver)
    if not senders:
        return 0.0
    side = state.marginal(layout.side(receiver))
    report = capacity_single_receiver(side, DenseCodingLayout.single(senders, receiver), tol)
    return report.capacity if clamped else report.classical_baseline + report.raw_excess


def lo_capacity(
    state: MultipartiteState, layout: DenseCodingLayout, clamped: bool = True, tol: float = DEFAULT_TOL
) -> float:
    """Capacity with separated, non-communicating receivers: C(rho^1) + C(rho^2)."""
    _require_two(state, layout)
    return sum(_side_capacity(state, layout, r, clamped, tol) for r in layout.receivers)


def capacity_report(state: MultipartiteState, layout: DenseCodingLayout, tol: float = DEFAULT_TOL) -> CapacityReport:
    """Every capacity quantity that applies to ``layout``."""
    if not layout.two_receivers:
        return capacity_single_receiver(state, layout, tol)
    base = classical_baseline(state, layout)
    raw = global_excess(state, layout, tol)
    lo_raw = lo_capacity(state, layout, clamped=False, tol=tol)
    return CapacityReport(
        layout=layout,
        classical_baseline=base,
        capacity=base + max(0.0, raw),
        raw_excess=raw,
        locc_upper_bound=locc_upper_bound(state, layout, tol),
        lo_capacity=lo_capacity(state, layout, tol=tol),
        lo_raw_excess=lo_raw - base,
        split_entropies=split_entropies(state, layout, tol),
    )


def two_copy_chi(
    state: MultipartiteState, layout: DenseCodingLayout, max_dim: int = 4096, tol: float = DEFAULT_TOL
) -> float:
    """Half the Holevo quantity of the product shift-and-clock encoding on two copies.

    Each sender encodes each copy independently with its full d^2 set, so the
    ensemble has prod_k d_k^4 members on the doubled space.
    """
    layout.check(state)
    if layout.two_receivers:
        raise LayoutError("two_copy_chi is defined for a single receiver")
    if state.dim**2 > max_dim:
        raise ValueError(f"doubled space has dimension {state.dim ** 2}, cap is {max_dim}")
    first = relabel(state, {lab: f"{lab}#1" for lab in state.labels})
    second = relabel(state, {lab: f"{lab}#2" for lab in state.labels})
    doubled = tensor_states(first, second)
    receiver = layout.receivers[0]
    # copy c of every sender goes to copy c of the receiver
    routing = {f"{a}#{c}": f"{receiver}#{c}" for c in (1, 2) for a in layout.senders}
    dlayout = DenseCodingLayout(tuple(routing), (f"{receiver}#1", f"{receiver}#2"), routing)
    sets = {a: weyl_set(doubled.dim_of([a])) for a in routing}
    ensemble = encode_ensemble(doubled, dlayout, sets)
    return holevo_chi(ensemble, tol) / 2


@dataclass(frozen=True)
class ThresholdResult:
    root: float
    bracket: tuple[float, float]
    residual: float
    iterations: int
    values: tuple[float, float] = field(default=(np.nan, np.nan))


class NoSignChange(ValueError):
    pass


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-12, max_iter: int = MAX_ITER) -> ThresholdResult:
    """Plain bisection for a sign change of ``f`` on ``[lo, hi]``."""
    f_lo, f_hi = f(lo), f(hi)
    if f_lo == 0:
        return ThresholdResult(lo, (lo, lo), 0.0, 0, (f_lo, f_hi))
    if f_hi == 0:
        return ThresholdResult(hi, (hi, hi), 0.0, 0, (f_lo, f_hi))
    if np.sign(f_lo) == np.sign(f_hi):
        raise NoSignChange(f"no sign change on [{lo}, {hi}]: f = {f_lo:.6g}, {f_hi:.6g}")
    ends = (f_lo, f_hi)
    it = 0
    while hi - lo > xtol and it < max_iter:
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        it += 1
        if f_mid == 0:
            lo = hi = mid
            break
        if np.sign(f_mid) == np.sign(f_lo):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    root = 0.5 * (lo + hi)
    return ThresholdResult(root, (lo, hi), abs(f(root)), it, ends)


def werner_excess(p: float) -> float:
    """S(rho^B) - S(rho) for the Werner state with singlet weight p."""
    return _excess(werner(p), ["B"], DEFAULT_TOL)


def werner_threshold(xtol: float = 1e-12) -> ThresholdResult:
    return bisect(werner_excess, 1 / 3, 1.0, xtol)


def werner_dc_threshold() -> float:
    """Smallest singlet weight p at which the Werner state beats 1 bit per qubit."""
    return werner_threshold().root


def noisy_ghz_threshold(n: int, layout: DenseCodingLayout | None = None, xtol: float = 1e-12) -> ThresholdResult:
    if n < 3:
        raise ValueError(f"noisy GHZ threshold needs n >= 3, got {n}")
    if layout is None:
        labels = noisy_ghz(n, 1.0).labels
        layout = DenseCodingLayout(labels[:-2], labels[-2:], {a: labels[-2] for a in labels[:-2]})
    # GHZ is permutation symmetric, so the qubit order of the labels is immaterial
    labels = layout.senders + layout.receivers
    if len(labels) != n:
        raise LayoutError(f"layout names {len(labels)} parties, state has {n} qubits")
    return bisect(lambda p: global_excess(noisy_ghz(n, p, labels), layout), 0.0, 1.0, xtol)


def noisy_ghz_dc_threshold(n: int, layout: DenseCodingLayout | None = None) -> float:
    """Noise level p at which the receivers' excess S(rho^B) - S(rho) changes sign.

    The default layout makes the last two qubits the receivers.
    """
    return noisy_ghz_threshold(n, layout).root
