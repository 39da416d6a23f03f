"""Command-line entry point: ``stabcap <subcommand> ...``.

Every output embeds a manifest (subcommand, parameters, seed, version, timestamp).
The timestamp comes from ``SOURCE_DATE_EPOCH`` when set, so reruns with the same
manifest produce the same bytes.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from stabcap import __version__
from stabcap.bounds import (
    RATE_CURVE_COLUMNS,
    asymptotic_bound,
    curve_row,
    random_coding_majorant,
    rate_curve,
)
from stabcap.census import (
    census_f2,
    census_f4,
    find_code_with_distance,
    gv_bound_general,
    gv_bound_linear,
    uniform_vector_count,
    check_f4_vector_counts,
)
from stabcap.channel import (
    PAULI_LABELS,
    QuantumChannel,
    channel_distance,
    decompose_pauli,
    load_channel,
    parse_preset,
)
from stabcap.code import build_coset_leaders, load_code, make_code, minimum_distance, uncorrectable_words
from stabcap.errors import BudgetExceeded, StabcapError
from stabcap.fidelity import (
    EncodedState,
    best_half_subcode,
    bootstrap_mean_ci,
    code_space_basis,
    exact_fidelity,
    logical_basis_state,
    random_code_state,
    random_coding_trial,
)

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_BUDGET = 3

CENSUS_COLUMNS = ("n", "dim", "total", "min_count", "max_count", "bound", "verdict")


@dataclass(frozen=True)
class RunManifest:
    subcommand: str
    parameters: dict[str, Any]
    seed: int | None
    version: str = __version__
    timestamp: str = field(default_factory=lambda: _timestamp())


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.strftime("%Y-%m-%dT%H:%M:%SZ")


def _jsonable(x: Any) -> Any:
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float) and not math.isfinite(x):
        return repr(x)
    return x


def _cell(x: Any) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render_csv(manifest: RunManifest, columns: Sequence[str], rows: list[dict[str, Any]]) -> str:
    buf = io.StringIO()
    buf.write("# manifest: " + json.dumps(_jsonable(asdict(manifest)), sort_keys=True) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def render_json(manifest: RunManifest, body: dict[str, Any]) -> str:
    doc = {"manifest": asdict(manifest), **body}
    return json.dumps(_jsonable(doc), indent=2, sort_keys=True) + "\n"


def _parse_cell(text: str) -> Any:
    if text in ("true", "false"):
        return text == "true"
    for conv in (int, float):
        try:
            return conv(text)
        except ValueError:
            pass
    return text


def read_csv(text: str) -> tuple[dict[str, Any], list[dict[str, Any]]]:
    """Inverse of :func:`render_csv`: ``(manifest, rows)`` with numbers parsed back."""
    lines = text.splitlines()
    manifest: dict[str, Any] = {}
    body = []
    for line in lines:
        if line.startswith("# manifest: "):
            manifest = json.loads(line[len("# manifest: ") :])
        elif not line.startswith("#"):
            body.append(line)
    reader = csv.DictReader(body)
    return manifest, [{k: _parse_cell(v) for k, v in row.items()} for row in reader]


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _int_list(text: str) -> list[int]:
    """``"50,100,200"`` or ``"start:stop:step"`` (stop inclusive)."""
    try:
        if ":" in text:
            parts = [int(x) for x in text.split(":")]
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) > 2 else 1
            if step < 1:
                raise ValueError
            return list(range(start, stop + 1, step))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _channel_from_args(args: argparse.Namespace, required: bool = True) -> QuantumChannel | None:
    if getattr(args, "preset", None):
        return parse_preset(args.preset)
    if getattr(args, "channel", None):
        return load_channel(args.channel)
    if required:
        raise StabcapError("need --channel or --preset")
    return None


def _params(args: argparse.Namespace) -> dict[str, Any]:
    skip = {"func", "out", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def cmd_bounds(args: argparse.Namespace) -> str:
    if args.p is not None:
        p: Any = args.p
    else:
        ch = _channel_from_args(args, required=False)
        if ch is None:
            raise StabcapError("bounds needs --p, --channel or --preset")
        p = channel_distance(ch).p
    ns = args.n or [50, 100, 200, 500, 1000]
    if any(n < 2 for n in ns):
        raise StabcapError("block lengths must be >= 2")
    points = rate_curve(p, ns, args.delta)
    manifest = RunManifest("bounds", _params(args), None)
    rows = [curve_row(pt) for pt in points]
    if args.format == "json":
        return render_json(manifest, {"p": float(points[0].p) if points else None,
                                      "asymptote": asymptotic_bound(float(points[0].p)) if points else None,
                                      "rows": rows})
    return render_csv(manifest, RATE_CURVE_COLUMNS, rows)


def cmd_census(args: argparse.Namespace) -> str:
    n = _single(args.n, "--n")
    if args.k is None or not 0 <= args.k <= n:
        raise StabcapError("census needs 0 <= --k <= --n")
    dim = n - args.k
    if args.field == "f4":
        if dim % 2:
            raise StabcapError("an F_4-linear code needs n - k even")
        report = check_f4_vector_counts(n, dim // 2)
        res = census_f4(n, dim // 2)
        lo, hi = res.count_range()
        bound = report.general_bound
        verdict = "ok" if report.ok else "violated"
    else:
        res = census_f2(n, dim)
        lo, hi = res.count_range()
        bound = uniform_vector_count(n, args.k, res.total)
        verdict = "equal" if lo == hi == bound else ("ok" if hi <= bound else "violated")
    row = {"n": n, "dim": res.dim, "total": res.total, "min_count": lo, "max_count": hi,
           "bound": str(bound), "verdict": verdict}
    manifest = RunManifest("census", _params(args), None)
    if args.format == "json":
        return render_json(manifest, {"rows": [row]})
    return render_csv(manifest, CENSUS_COLUMNS, [row])


def _single(ns: list[int] | None, flag: str) -> int:
    if not ns or len(ns) != 1:
        raise StabcapError(f"{flag} takes a single integer here")
    return ns[0]


def cmd_gv(args: argparse.Namespace) -> str:
    n = _single(args.n, "--n")
    if args.k is None or args.d is None:
        raise StabcapError("gv needs --k and --d")
    check = gv_bound_linear if args.linear else gv_bound_general
    res = check(n, args.k, args.d)
    row: dict[str, Any] = {"n": n, "k": args.k, "d": args.d, "exists": res.holds,
                           "lhs": float(res.lhs), "lhs_exact": str(res.lhs)}
    if args.search:
        space = find_code_with_distance(n, args.k, args.d, seed=args.seed or 0)
        row["found"] = space is not None
        row["distance"] = None if space is None else minimum_distance(make_code(space, args.k))
        row["stabilizers"] = None if space is None else [str(p) for p in make_code(space, args.k).generator_paulis()]
    manifest = RunManifest("gv", _params(args), args.seed)
    if args.format == "json":
        return render_json(manifest, {"rows": [row]})
    if args.format == "csv":
        return render_csv(manifest, [c for c in row if c != "stabilizers"], [row])
    yes = "yes" if res.holds else "no"
    line = f"n={n} k={args.k} d={args.d} exists: {yes}, LHS ≈ {float(res.lhs):.3f} ({res.lhs})"
    if args.search:
        line += f"\nsearch: found={'yes' if row['found'] else 'no'} distance={row['distance']}"
    return line + "\n"


def cmd_channel(args: argparse.Namespace) -> str:
    ch = _channel_from_args(args)
    dist = channel_distance(ch)
    dec = decompose_pauli(ch)
    body = {
        "name": ch.name,
        "p": dist.p,
        "q": dist.q,
        "tp_error": ch.tp_error(),
        "masses": dict(zip(PAULI_LABELS, dec.masses().tolist())),
        "decomposition": [
            {lab: [float(c.real), float(c.imag)] for lab, c in zip(PAULI_LABELS, row)} for row in dec.coeffs
        ],
    }
    return render_json(RunManifest("channel", _params(args), None), body)


def cmd_simulate(args: argparse.Namespace) -> str:
    code = load_code(args.code)
    ch = _channel_from_args(args)
    rng = np.random.default_rng(args.seed)
    unc = uncorrectable_words(code)
    leaders = build_coset_leaders(code)
    states: list[EncodedState] = []
    if args.state == "logical":
        states = [logical_basis_state(code, x) for x in range(1 << code.k)]
    else:
        basis = code_space_basis(code)
        states = [random_code_state(code, rng, basis) for _ in range(args.trials)]
    results = [exact_fidelity(code, ch, s, unc, leaders) for s in states]
    rows = [asdict(r) for r in results]
    body: dict[str, Any] = {
        "code": {"n": code.n, "k": code.k, "stabilizers": [str(p) for p in code.generator_paulis()]},
        "channel": ch.name,
        "p": channel_distance(ch).p,
        "uncorrectable_words": int(len(unc)),
        "results": rows,
        "min_margin": min(r.exact_fidelity - r.vector_bound for r in results),
        "bound_holds": all(r.exact_fidelity >= r.vector_bound - 1e-9 for r in results),
    }
    if code.k >= 1:
        sub = best_half_subcode(code, ch, unc)
        sub_states = [EncodedState(code, sub.basis[:, j], f"subcode {x}") for j, x in enumerate(sub.kept)]
        sub_res = [exact_fidelity(code, ch, s, unc, leaders) for s in sub_states]
        body["subcode"] = {
            "heuristic": "top half of logical basis states by per-state bound",
            "kept": list(sub.kept),
            "results": [asdict(r) for r in sub_res],
        }
    return render_json(RunManifest("simulate", _params(args), args.seed), body)


def cmd_random_coding(args: argparse.Namespace) -> str:
    ch = _channel_from_args(args)
    p = channel_distance(ch).p
    delta = args.delta
    rows = []
    for n in args.n or [8, 12, 16]:
        k = args.k if args.k is not None else math.ceil(args.rate * n)
        stats = random_coding_trial(n, k, ch, args.trials, delta, seed=args.seed)
        lo, hi = bootstrap_mean_ci(stats.masses, seed=args.seed)
        rows.append({"n": n, "k": k, "max_weight": stats.max_weight, "mean": stats.mean,
                     "ci_low": lo, "ci_high": hi, "worst": stats.worst,
                     "majorant": random_coding_majorant(n, k, delta, p)})
    manifest = RunManifest("random-coding", _params(args), args.seed)
    if args.format == "json":
        return render_json(manifest, {"rows": rows})
    return render_csv(manifest, list(rows[0]) if rows else [], rows)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stabcap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"stabcap {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable[[argparse.Namespace], str], help_: str, fmt: str | None = "csv") -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help_)
        sp.set_defaults(func=func)
        sp.add_argument("--out", help="write to this file instead of stdout")
        if fmt is not None:
            sp.add_argument("--format", choices=("csv", "json"), default=fmt if fmt != "table" else None)
        return sp

    def channel_flags(sp: argparse.ArgumentParser) -> None:
        sp.add_argument("--channel", help="preset string, JSON object or path to a JSON file")
        sp.add_argument("--preset", help="e.g. depolarizing:0.95, dephasing(0.1), amplitude_damping:0.2")

    sp = add("bounds", cmd_bounds, "finite-n and asymptotic rate curves")
    channel_flags(sp)
    sp.add_argument("--p", type=str, default=None, help="channel distance p directly (parsed exactly)")
    sp.add_argument("--n", type=_int_list, help="block lengths: 50,100,200 or 50:1000:50")
    sp.add_argument("--delta", default="margin", help="margin | margin:x | optimize | fixed:x | x")

    sp = add("census", cmd_census, "exhaustive self-orthogonal subspace census")
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--field", choices=("f2", "f4"), default="f2")

    sp = add("gv", cmd_gv, "check the GV counting condition", fmt="table")
    sp.add_argument("--n", type=_int_list, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--d", type=int, required=True)
    sp.add_argument("--linear", action="store_true", help="use the F_4-linear form of the condition")
    sp.add_argument("--search", action="store_true", help="also look for a code reaching distance d")
    sp.add_argument("--seed", type=int, default=0)

    sp = add("channel", cmd_channel, "Pauli decomposition and distance of a channel", fmt=None)
    channel_flags(sp)

    sp = add("simulate", cmd_simulate, "dense fidelity simulation of a code", fmt=None)
    channel_flags(sp)
    sp.add_argument("--code", default="five_qubit", help="preset name, JSON object or path")
    sp.add_argument("--state", choices=("logical", "random"), default="logical")
    sp.add_argument("--trials", type=int, default=20)
    sp.add_argument("--seed", type=int, default=0)

    sp = add("random-coding", cmd_random_coding, "uncorrectable mass of random codes")
    channel_flags(sp)
    sp.add_argument("--n", type=_int_list)
    sp.add_argument("--k", type=int)
    sp.add_argument("--rate", type=float, default=0.1)
    sp.add_argument("--delta", type=float, default=0.2, help="truncation weight is floor(delta n)")
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if getattr(args, "trials", 1) is not None and getattr(args, "trials", 1) < 1:
            raise StabcapError("--trials must be positive")
        text = args.func(args)
        _emit(text, args.out)
    except BudgetExceeded as exc:
        print(f"stabcap: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (StabcapError, OSError) as exc:
        print(f"stabcap: error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
