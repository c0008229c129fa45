"""Command-line driver.

Exit codes: 0 success, 1 verification mismatch, 2 usage or input error,
3 finiteness error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from fractions import Fraction
from typing import Any, Sequence

from feyncount import checks, combinatorics, engine, orders, wick
from feyncount.errors import CapExceeded, FinitenessError, UsageError

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_FINITENESS = 0, 1, 2, 3
SEQUENCES = ("bell", "stirling", "partitions", "bell-squared")


def _q(x: Fraction | int) -> str:
    return str(Fraction(x))


def _record(command: str, params: dict[str, Any], results: dict[str, Any],
            status: str) -> dict[str, Any]:
    return {"command": command, "parameters": params, "results": results, "status": status}


def cmd_series(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    model = engine.load_model(args.model)
    z = engine.partition_function(model, args.eps_order, args.g_order)
    table = engine.free_energy(z) if args.connected else z
    rows = [{"eps": i, "g": j, "coef": _q(c)} for (i, j), c in table.items()]
    params = {"model": args.model, "eps_order": args.eps_order, "g_order": args.g_order,
              "connected": args.connected}
    results = {"quantity": "lnZ" if args.connected else "Z", "rows": rows}
    return _record("series", params, results, "ok"), EXIT_OK


def cmd_seq(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    n = args.n
    if n < 0:
        raise UsageError("--n must be >= 0")
    if args.name == "bell":
        rec = combinatorics.bell_numbers(n)
    elif args.name == "partitions":
        rec = combinatorics.partition_counts(n)
    elif args.name == "bell-squared":
        z = engine.partition_function(engine.builtin_model("bell-squared"), n)
        values = tuple(int(v) for v in engine.egf_row(z))
        rec = combinatorics.SequenceRecord("bell-squared", values, "series")
    else:
        if n < 1:
            raise UsageError("stirling needs --n >= 1")
        table = combinatorics.stirling2_table(n)
        rows = [{"n": k, "k": j, "value": str(table[k, j])}
                for k in range(1, n + 1) for j in range(1, k + 1)]
        results = {"name": "stirling", "provenance": "recurrence", "rows": rows}
        return _record("seq", {"name": args.name, "n": n}, results, "ok"), EXIT_OK
    rows = [{"n": k, "value": str(v)} for k, v in enumerate(rec.values)]
    results = {"name": rec.name, "provenance": rec.provenance,
               "values": [str(v) for v in rec.values], "rows": rows}
    return _record("seq", {"name": args.name, "n": n}, results, "ok"), EXIT_OK


def cmd_verify(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    res = checks.run_check(args.check, args.n, seed=args.seed)
    params: dict[str, Any] = {"check": args.check, "n": args.n}
    if args.check == "oracle-agreement":
        params["seed"] = args.seed
    results = {"details": res.details, "mismatches": res.mismatches}
    status = "PASS" if res.passed else "FAIL"
    return _record("verify", params, results, status), EXIT_OK if res.passed else EXIT_MISMATCH


def _relation_json(r: orders.Relation) -> list[str]:
    return ["".join(str(b) for b in row) for row in r.matrix()]


def _diagram_json(s: wick.SymmetryDatum) -> dict[str, Any]:
    d = s.diagram
    return {"lines": list(d.line_arities), "vertices": list(d.vertex_arities),
            "incidence": [list(r) for r in d.incidence], "aut_order": s.aut_order,
            "symmetry_number": _q(s.symmetry_number), "connected": s.connected}


def cmd_enumerate(args: argparse.Namespace) -> tuple[dict[str, Any], int]:
    params: dict[str, Any] = {"structure": args.structure, "n": args.n,
                              "connected": args.connected, "unlabelled": args.unlabelled}
    results: dict[str, Any] = {}
    if args.structure == "diagrams":
        params["model"] = args.model
        data = wick.enumerate_diagrams(engine.load_model(args.model), args.n)
        if args.connected:
            data = wick.connected_filter(data)
        results["count"] = str(len(data))
        results["symmetry_sum"] = _q(wick.symmetry_sum(data))
        if args.representatives:
            results["rows"] = [_diagram_json(s) for s in data]
    else:
        if args.override_cap:
            params["override_cap"] = True
        source = orders.enumerate_posets if args.structure == "posets" else orders.enumerate_preorders
        data = source(args.n, allow_large=args.override_cap)
        if args.connected:
            data = [r for r in data if orders.is_connected(r)]
        if args.unlabelled:
            reps = orders.unlabelled_representatives(data)
            results["count"] = str(len(reps))
            if args.representatives:
                results["rows"] = [{"relation": _relation_json(r),
                                    "orbit_size": str(math.factorial(r.n) // stab)}
                                   for r, stab in reps]
        else:
            results["count"] = str(len(data))
            if args.representatives:
                results["rows"] = [{"relation": _relation_json(r)} for r in data]
    return _record("enumerate", params, results, "ok"), EXIT_OK


def _flat_rows(record: dict[str, Any]) -> list[dict[str, Any]]:
    results = record["results"]
    if "rows" in results:
        return [{k: json.dumps(v) if isinstance(v, (list, dict)) else v for k, v in row.items()}
                for row in results["rows"]]
    flat = [{"key": "status", "value": record["status"]}]
    for key, value in results.items():
        flat.append({"key": key, "value": value if isinstance(value, str) else json.dumps(value)})
    return flat


def render(record: dict[str, Any], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    rows = _flat_rows(record)
    columns = list(rows[0]) if rows else []
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return buf.getvalue()
    header = f"{record['command']} {record['status']}"
    if "count" in record["results"]:
        header += f"  count={record['results']['count']}"
    if not rows:
        return header + "\n"
    widths = {c: max(len(c), *(len(str(r[c])) for r in rows)) for c in columns}
    lines = [header, "  ".join(c.ljust(widths[c]) for c in columns)]
    lines += ["  ".join(str(r[c]).ljust(widths[c]) for c in columns) for r in rows]
    return "\n".join(line.rstrip() for line in lines) + "\n"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="feyncount",
        description="Generating functions of zero-dimensional field theories, checked "
                    "against brute-force enumeration.")
    fmt = argparse.ArgumentParser(add_help=False)
    fmt.add_argument("--format", choices=("json", "csv", "table"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("series", parents=[fmt], help="coefficient table of Z or ln Z")
    p.add_argument("--model", required=True, help="built-in name or path to a model JSON file")
    p.add_argument("--eps-order", type=int, required=True)
    p.add_argument("--g-order", type=int, default=None)
    p.add_argument("--connected", action="store_true", help="emit ln Z instead of Z")
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("seq", parents=[fmt], help="integer sequences")
    p.add_argument("--name", choices=SEQUENCES, required=True)
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_seq)

    p = sub.add_parser("verify", parents=[fmt], help="run a cross-check")
    p.add_argument("--check", choices=checks.CHECKS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("enumerate", parents=[fmt], help="count preorders, posets or diagrams")
    p.add_argument("--structure", choices=("preorders", "posets", "diagrams"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--model", default="bell-squared", help="model for --structure diagrams")
    p.add_argument("--connected", action="store_true")
    p.add_argument("--unlabelled", action="store_true")
    p.add_argument("--representatives", action="store_true",
                   help="also emit canonical representatives")
    p.add_argument("--override-cap", action="store_true",
                   help="allow n=6 for preorders/posets (about 1e9 candidates)")
    p.set_defaults(func=cmd_enumerate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record, code = args.func(args)
    except FinitenessError as exc:
        print(f"feyncount: finiteness error: {exc}", file=sys.stderr)
        return EXIT_FINITENESS
    except (UsageError, CapExceeded, ValueError) as exc:
        print(f"feyncount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    sys.stdout.write(render(record, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
