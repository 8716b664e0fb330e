"""Partial-transpose and reduction criteria, and the dense-coding shell ladder.

Separability is never certified here. A state that is PPT across the
senders:receivers cut is reported as ``S-or-PBE``; an NPT state without a
distillability witness is ``NPT-undetermined``. LOCC usefulness is only
asserted when a registered protocol actually achieves a rate above the
classical baseline, and only refuted when the LOCC upper bound does not exceed
it.
"""

from __future__ import annotations

import itertools
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field

from densecoding.capacities import capacity_report
from densecoding.measures import _check_cut
from densecoding.protocols import DEFAULT_PROTOCOLS
from densecoding.states import DenseCodingLayout, MultipartiteState
from densecoding.tensor import DEFAULT_TOL, embed_operator, hermitian_eigenvalues, partial_transpose

SHELLS = ("S-or-PBE", "NPT-undetermined", "D", "G-DC", "LOCC-DC", "LO-DC")

Cut = tuple[Sequence[str], Sequence[str]]


def _sides(state: MultipartiteState, cut: Cut) -> tuple[list[str], list[str]]:
    side1, side2 = (list(c) for c in cut)
    _check_cut(state.labels, side1, side2)
    return side1, side2


def min_pt_eigenvalue(state: MultipartiteState, cut: Cut) -> float:
    _, side2 = _sides(state, cut)
    pt = partial_transpose(state.matrix, state.dims, state.indices(side2))
    return float(hermitian_eigenvalues(pt)[0])


def is_ppt(state: MultipartiteState, cut: Cut, tol: float = DEFAULT_TOL) -> tuple[bool, float]:
    """(PPT?, smallest eigenvalue of the partial transpose) across ``cut``."""
    lam = min_pt_eigenvalue(state, cut)
    return lam >= -tol, lam


def reduction_violated(state: MultipartiteState, cut: Cut, tol: float = DEFAULT_TOL) -> tuple[bool, float, float]:
    """Check rho^1 (x) I >= rho and I (x) rho^2 >= rho across ``cut``.

    Returns (violated?, min eigenvalue of rho^1 (x) I - rho, min eigenvalue of
    I (x) rho^2 - rho). A violation certifies distillability across the cut.
    """
    side1, side2 = _sides(state, cut)
    mins = []
    for side in (side1, side2):
        reduced = state.marginal(side)
        # marginal() keeps state order, so targets are the sorted indices
        lifted = embed_operator(reduced.matrix, state.dims, sorted(state.indices(side)))
        mins.append(float(hermitian_eigenvalues(lifted - state.matrix)[0]))
    return min(mins) < -tol, mins[0], mins[1]


@dataclass(frozen=True)
class CutResult:
    side1: tuple[str, ...]
    side2: tuple[str, ...]
    ppt: bool
    pt_min_eigenvalue: float
    reduction_violated: bool
    reduction_min_eigenvalues: tuple[float, float]


def analyse_cut(state: MultipartiteState, cut: Cut, tol: float = DEFAULT_TOL) -> CutResult:
    ppt, lam = is_ppt(state, cut, tol)
    red, m1, m2 = reduction_violated(state, cut, tol)
    return CutResult(tuple(cut[0]), tuple(cut[1]), ppt, lam, red, (m1, m2))


def bipartitions(labels: Sequence[str]) -> list[tuple[tuple[str, ...], tuple[str, ...]]]:
    """All 2^(n-1) - 1 unordered splits; the first side holds ``labels[0]``, smaller sides first."""
    labels = list(labels)
    first, rest = labels[0], labels[1:]
    cuts = []
    for size in range(len(rest)):
        for extra in itertools.combinations(rest, size):
            side1 = (first, *extra)
            side2 = tuple(x for x in labels if x not in side1)
            cuts.append((side1, side2))
    cuts.sort(key=lambda c: (min(len(c[0]), len(c[1])), c))
    return cuts


@dataclass(frozen=True)
class Evidence:
    verdict: str  # "yes" | "no" | "unknown"
    value: float
    source: str


@dataclass(frozen=True)
class ClassificationReport:
    shell: str
    evidence: dict[str, Evidence]
    cut_results: tuple[CutResult, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "shell": self.shell,
            "evidence": {k: asdict(v) for k, v in self.evidence.items()},
            "cut_results": [
                {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(c).items()} for c in self.cut_results
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> ClassificationReport:
        cuts = tuple(
            CutResult(
                tuple(c["side1"]), tuple(c["side2"]), c["ppt"], c["pt_min_eigenvalue"],
                c["reduction_violated"], tuple(c["reduction_min_eigenvalues"]),
            )
            for c in data.get("cut_results", [])
        )
        evidence = {k: Evidence(**v) for k, v in data["evidence"].items()}
        return cls(data["shell"], evidence, cuts)


def _yes_no(flag: bool) -> str:
    return "yes" if flag else "no"


def classify(
    state: MultipartiteState,
    layout: DenseCodingLayout,
    protocols=DEFAULT_PROTOCOLS,
    tol: float = DEFAULT_TOL,
    all_cuts: bool = False,
) -> ClassificationReport:
    """Place ``state`` in the dense-coding shell ladder for ``layout``.

    Single-receiver layouts stop at G-DC; the LOCC-DC and LO-DC rungs need two
    receivers.
    """
    layout.check(state)
    cut = (layout.senders, layout.receivers)
    main = analyse_cut(state, cut, tol)
    report = capacity_report(state, layout, tol)
    ev: dict[str, Evidence] = {
        "ppt": Evidence(_yes_no(main.ppt), main.pt_min_eigenvalue, "is_ppt"),
        "reduction_violated": Evidence(
            _yes_no(main.reduction_violated), min(main.reduction_min_eigenvalues), "reduction_violated"
        ),
        "global_excess_positive": Evidence(_yes_no(report.raw_excess > tol), report.raw_excess, "global_excess"),
    }
    two = layout.two_receivers
    if two:
        ev["lo_excess_positive"] = Evidence(_yes_no(report.lo_raw_excess > tol), report.lo_raw_excess, "lo_capacity")

    witnessed = main.reduction_violated or report.raw_excess > tol
    if main.ppt:
        ev["distillable"] = Evidence("no", main.pt_min_eigenvalue, "is_ppt")
    elif witnessed:
        source = "reduction_violated" if main.reduction_violated else "global_excess"
        value = min(main.reduction_min_eigenvalues) if main.reduction_violated else report.raw_excess
        ev["distillable"] = Evidence("yes", value, source)
    else:
        ev["distillable"] = Evidence("unknown", main.pt_min_eigenvalue, "is_ppt")

    if two:
        ev["locc_dc"] = _locc_evidence(state, layout, report, protocols, tol)

    if main.ppt:
        shell = "S-or-PBE"
    elif not witnessed:
        shell = "NPT-undetermined"
    elif report.raw_excess <= tol:
        shell = "D"
    elif two and report.lo_raw_excess > tol:
        shell = "LO-DC"
    elif two and ev["locc_dc"].verdict == "yes":
        shell = "LOCC-DC"
    else:
        shell = "G-DC"

    cuts = tuple(analyse_cut(state, c, tol) for c in bipartitions(state.labels)) if all_cuts else (main,)
    return ClassificationReport(shell, ev, cuts)


def _locc_evidence(state, layout, report, protocols, tol) -> Evidence:
    base = report.classical_baseline
    if report.locc_upper_bound <= base + tol:
        return Evidence("no", report.locc_upper_bound, "locc_upper_bound")
    if report.lo_raw_excess > tol:
        return Evidence("yes", base + report.lo_raw_excess, "lo_capacity")
    if report.raw_excess <= tol:
        # the global capacity caps every LOCC rate
        return Evidence("no", report.capacity, "capacity_global")
    for proto in protocols:
        rate = proto.rate(state, layout)
        if rate is not None and rate > base + tol:
            return Evidence("yes", rate, f"protocol:{proto.name}")
    return Evidence("unknown", report.locc_upper_bound, "locc_upper_bound")
