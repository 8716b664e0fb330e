"""Command-line front end.

Exit codes: 0 success, 1 invalid input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from densecoding import capacities, criteria, protocols, states
from densecoding.measures import mutual_information
from densecoding.states import DenseCodingLayout, MultipartiteState
from densecoding.tensor import DEFAULT_TOL

CONSTRUCTORS = ("bell", "singlet", "werner", "ghz", "noisy_ghz", "smolin", "frank", "tensor", "explicit")


class InputError(Exception):
    """Bad spec file or argument; maps to exit code 1."""


class NumericalError(Exception):
    """Computation failed; maps to exit code 2."""


# --- spec documents ------------------------------------------------------------


def _decode_matrix(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"matrix: entries must be [re, im] pairs ({exc})") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise InputError(f"matrix: expected a nested array of [re, im] pairs, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def encode_matrix(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def state_from_spec(doc: dict) -> MultipartiteState:
    """Build a state from a constructor or explicit spec document."""
    if not isinstance(doc, dict):
        raise InputError("state spec must be a JSON object")
    name = doc.get("constructor", "explicit" if "matrix" in doc else None)
    if name not in CONSTRUCTORS:
        raise InputError(f"constructor: must be one of {', '.join(CONSTRUCTORS)}, got {name!r}")
    params = dict(doc.get("params", {}))
    try:
        if name == "explicit":
            if "parties" not in doc or "matrix" not in doc:
                raise InputError("explicit state needs 'parties' and 'matrix'")
            parties = [tuple(p) for p in doc["parties"]]
            return states.make_state(parties, _decode_matrix(doc["matrix"]))
        labels = params.pop("labels", None)
        kw = {} if labels is None else {"labels": labels}
        if name == "bell":
            return states.bell(int(params["k"]), **kw)
        if name == "singlet":
            return states.singlet(**kw)
        if name == "werner":
            return states.werner(float(params["p"]), **kw)
        if name == "ghz":
            return states.ghz(int(params["n"]), **kw)
        if name == "noisy_ghz":
            return states.noisy_ghz(int(params["n"]), float(params["p"]), **kw)
        if name == "smolin":
            return states.smolin(**kw)
        if name == "frank":
            return states.frank_state(**kw)
        # tensor
        parts = params.get("states")
        if not isinstance(parts, list) or len(parts) < 2:
            raise InputError("tensor: params.states must list at least two state specs")
        out = state_from_spec(parts[0])
        for part in parts[1:]:
            out = states.tensor_states(out, state_from_spec(part))
        if "order" in params:
            out = states.permute_parties(out, params["order"])
        return out
    except KeyError as exc:
        raise InputError(f"{name}: missing parameter {exc.args[0]!r}") from None
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(f"{name}: {exc}") from None


def layout_from_spec(doc: dict) -> DenseCodingLayout:
    if not isinstance(doc, dict):
        raise InputError("layout spec must be a JSON object")
    for key in ("senders", "receivers"):
        if not isinstance(doc.get(key), list):
            raise InputError(f"{key}: expected a list of party labels")
    try:
        return DenseCodingLayout(tuple(doc["senders"]), tuple(doc["receivers"]), doc.get("routing", {}))
    except ValueError as exc:
        raise InputError(f"layout: {exc}") from None


def load_json(source) -> dict:
    """Parse a path (or an already-decoded document)."""
    if isinstance(source, (dict, list)):
        return source
    try:
        return json.loads(Path(source).read_text(encoding="utf-8"))
    except OSError as exc:
        raise InputError(f"cannot read {source}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{source}: malformed JSON ({exc.msg} at line {exc.lineno})") from None


# --- commands ------------------------------------------------------------------------


def _checked(state, layout):
    try:
        layout.check(state)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def run_capacity(state_doc, layout_doc, tol: float = DEFAULT_TOL) -> dict:
    state, layout = state_from_spec(load_json(state_doc)), layout_from_spec(load_json(layout_doc))
    _checked(state, layout)
    return capacities.capacity_report(state, layout, tol).to_dict()


def run_classify(state_doc, layout_doc, all_cuts: bool = False, tol: float = DEFAULT_TOL) -> dict:
    state, layout = state_from_spec(load_json(state_doc)), layout_from_spec(load_json(layout_doc))
    _checked(state, layout)
    return criteria.classify(state, layout, tol=tol, all_cuts=all_cuts).to_dict()


def _record_dict(rec: protocols.MeasurementOutcomeRecord) -> dict:
    return {
        "message": rec.message,
        "encoding": list(rec.encoding),
        "decoded": rec.decoded,
        "correct": rec.decoded == rec.message,
        "branches": [
            {
                "outcomes": [list(o) for o in b.outcomes],
                "probability": b.probability,
                "decoded": b.decoded,
                "fidelity_after_rounds": list(b.fidelities),
            }
            for b in rec.branches
        ],
    }


def run_simulate_ghz4(message: int | None = None) -> dict:
    records = protocols.ghz4_transcripts()
    info = mutual_information(protocols.ghz4_joint_distribution(records))
    if message is not None:
        if not 0 <= message < len(records):
            raise InputError(f"--message must be in 0..{len(records) - 1}, got {message}")
        shown = [records[message]]
    else:
        shown = records
    return {
        "transcripts": [_record_dict(r) for r in shown],
        "decoded_correctly": sum(r.decoded == r.message for r in shown),
        "messages": len(shown),
        "mutual_information": info,
        "summary": f"I = {info:.6f} bits",
    }


def run_threshold(family: str, params: dict | None = None) -> dict:
    params = dict(params or {})
    try:
        if family == "werner":
            res = capacities.werner_threshold()
        elif family == "noisy-ghz":
            n = int(params.get("n", 4))
            layout = layout_from_spec(params["layout"]) if "layout" in params else None
            res = capacities.noisy_ghz_threshold(n, layout)
        else:
            raise InputError(f"--family must be 'werner' or 'noisy-ghz', got {family!r}")
    except capacities.NoSignChange as exc:
        raise NumericalError(str(exc)) from None
    except (ValueError, TypeError) as exc:
        if isinstance(exc, InputError):
            raise
        raise InputError(str(exc)) from None
    return {
        "family": family,
        "root": res.root,
        "root_str": f"{res.root:.7f}",
        "bracket": list(res.bracket),
        "residual": res.residual,
        "iterations": res.iterations,
    }


COMMANDS = {"capacity": run_capacity, "classify": run_classify}


def _batch_entry(entry, base: Path, tol: float) -> dict:
    try:
        if not isinstance(entry, dict):
            raise InputError("manifest entry must be an object")
        command = entry.get("command")
        if command not in COMMANDS:
            raise InputError(f"command must be one of {sorted(COMMANDS)}, got {command!r}")
        docs = []
        for key in ("state", "layout"):
            src = entry.get(key)
            if src is None:
                raise InputError(f"entry is missing {key!r}")
            docs.append(src if isinstance(src, dict) else base / src)
        kwargs = {"tol": tol}
        if command == "classify":
            kwargs["all_cuts"] = bool(entry.get("all_cuts", False))
        return {"command": command, "result": COMMANDS[command](*docs, **kwargs)}
    except InputError as exc:
        return {"command": entry.get("command") if isinstance(entry, dict) else None,
                "error": {"kind": "input", "message": str(exc)}}
    except (np.linalg.LinAlgError, ArithmeticError, ValueError) as exc:
        return {"command": entry.get("command"), "error": {"kind": "numerical", "message": str(exc)}}


def run_batch(manifest, parallelism: int = 1, tol: float = DEFAULT_TOL) -> dict:
    doc = load_json(manifest)
    entries = doc.get("entries") if isinstance(doc, dict) else doc
    if not isinstance(entries, list):
        raise InputError("manifest must be a list of entries or an object with an 'entries' list")
    base = Path(manifest).parent if not isinstance(manifest, (dict, list)) else Path.cwd()
    if parallelism > 1 and len(entries) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(lambda e: _batch_entry(e, base, tol), entries))
    else:
        results = [_batch_entry(e, base, tol) for e in entries]
    return {"entries": [{"index": i, **r} for i, r in enumerate(results)]}


# --- output ------------------------------------------------------------------------


def _flatten(obj, prefix: str = ""):
    if isinstance(obj, dict):
        for k, v in obj.items():
            yield from _flatten(v, f"{prefix}.{k}" if prefix else str(k))
    elif isinstance(obj, list) and obj and any(isinstance(x, (dict, list)) for x in obj):
        for i, v in enumerate(obj):
            yield from _flatten(v, f"{prefix}[{i}]")
    else:
        yield prefix, obj


def _cell(value) -> str:
    if isinstance(value, bool) or value is None:
        return str(value).lower() if value is not None else "-"
    if isinstance(value, float):
        return f"{value:.6f}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_cell(v) for v in value) + "]"
    return str(value)


def format_table(data: dict) -> str:
    rows = [(k, _cell(v)) for k, v in _flatten(data)]
    width = max((len(k) for k, _ in rows), default=0)
    return "\n".join(f"{k.ljust(width)}  {v}" for k, v in rows)


def _emit(data: dict, table: bool, extra: str | None = None) -> None:
    if table:
        print(format_table(data))
        if extra:
            print(extra)
    else:
        print(json.dumps(data, indent=2))


# --- argument parsing -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="densecoding", description="Dense-coding capacities and classification.")
    sub = parser.add_subparsers(dest="command", required=True)

    def output_flags(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--json", dest="table", action="store_false", help="JSON output (default)")
        g.add_argument("--table", dest="table", action="store_true", help="aligned table output")
        p.add_argument("--tol", type=float, default=DEFAULT_TOL)
        p.set_defaults(table=False)

    p = sub.add_parser("capacity", help="capacity report for a state and layout")
    p.add_argument("state")
    p.add_argument("layout")
    output_flags(p)

    p = sub.add_parser("classify", help="dense-coding shell of a state")
    p.add_argument("state")
    p.add_argument("layout")
    p.add_argument("--all-cuts", action="store_true", help="add PPT/reduction results for every bipartition")
    output_flags(p)

    p = sub.add_parser("simulate-ghz4", help="run the four-qubit GHZ decoding protocol")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--message", type=int)
    g.add_argument("--all", action="store_true")
    output_flags(p)

    p = sub.add_parser("threshold", help="dense-coding threshold of a noisy family")
    p.add_argument("--family", required=True)
    p.add_argument("--params", default="{}", help="JSON object, e.g. '{\"n\": 4}'")
    output_flags(p)

    p = sub.add_parser("batch", help="run a manifest of capacity/classify jobs")
    p.add_argument("manifest")
    p.add_argument("--parallel", type=int, default=1)
    output_flags(p)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "capacity":
            _emit(run_capacity(args.state, args.layout, args.tol), args.table)
        elif args.command == "classify":
            _emit(run_classify(args.state, args.layout, args.all_cuts, args.tol), args.table)
        elif args.command == "simulate-ghz4":
            out = run_simulate_ghz4(None if args.all else args.message)
            _emit(out, args.table)
        elif args.command == "threshold":
            try:
                params = json.loads(args.params)
            except json.JSONDecodeError as exc:
                raise InputError(f"--params: malformed JSON ({exc.msg})") from None
            if not isinstance(params, dict):
                raise InputError("--params must be a JSON object")
            out = run_threshold(args.family, params)
            _emit(out, args.table, f"root = {out['root_str']} in [{out['bracket'][0]:.10f}, {out['bracket'][1]:.10f}]")
        else:
            _emit(run_batch(args.manifest, args.parallel, args.tol), args.table)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (NumericalError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
