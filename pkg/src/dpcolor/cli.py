"""Command-line front end.

Every run prints a header line carrying the command, graph and seed, then
deterministic content.  Wall time goes to stderr so stdout is byte-identical
across repeated runs and across shard counts.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time

from . import constructions, graphs, search, verify
from .covers import format_cover, parse_cover
from .errors import BudgetExceeded, CertificationError, DpColorError, ParseError

EXIT_OK, EXIT_FAIL, EXIT_REFUSED, EXIT_INPUT = 0, 1, 2, 3


class InputError(Exception):
    pass


# -- argument parsing helpers -------------------------------------------------------


def parse_family(text: str) -> graphs.Graph:
    """``cycle:N``, ``path:N``, ``complete:N``, ``wheel:N``, ``join:p:cycle:N``,
    ``cone-cycles:N1,N2,...`` or ``bowtie``."""
    parts = text.strip().split(":")
    head = parts[0]
    try:
        if head == "bowtie" and len(parts) == 1:
            return graphs.bowtie()
        if head in ("cycle", "path", "complete") and len(parts) == 2:
            return graphs.build_family(head, int(parts[1]))
        if head == "wheel" and len(parts) == 2:
            return graphs.wheel(int(parts[1]))
        if head == "join" and len(parts) == 4 and parts[2] == "cycle":
            return graphs.complete_join_cycle(int(parts[1]), int(parts[3]))
        if head == "cone-cycles" and len(parts) == 2:
            return graphs.cone_of_cycles([int(x) for x in parts[1].split(",")])
    except ValueError as exc:
        raise InputError(f"bad family {text!r}: {exc}") from None
    raise InputError(f"unknown family spec {text!r}")


def parse_m_range(text: str):
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"bad m range {text!r}") from None
    if not values or min(values) < 0:
        raise InputError(f"bad m range {text!r}")
    return values


def parse_budget(text):
    if text is None:
        text = os.environ.get("DPCOLOR_BUDGET")
    if text is None:
        return search.DEFAULT_BUDGET
    if str(text).lower() in ("none", "inf", "unlimited"):
        return None
    try:
        return int(float(text)) if "e" in str(text).lower() else int(text)
    except ValueError:
        raise InputError(f"bad budget {text!r}") from None


def resolve_shards(value):
    if value is not None:
        return max(int(value), 1)
    return max(search.default_workers(), 1)


def load_graph(args) -> graphs.Graph:
    if args.family and args.file:
        raise InputError("give either --family or --file, not both")
    if args.family:
        return parse_family(args.family)
    if args.file:
        try:
            with open(args.file) as fh:
                return graphs.parse_graph(fh.read())
        except OSError as exc:
            raise InputError(str(exc)) from None
    raise InputError("a graph is required (--family or --file)")


def graph_label(args):
    return args.family if args.family else f"file:{args.file}"


# -- output -------------------------------------------------------------------------------


class Emitter:
    def __init__(self, fmt, stream):
        self.fmt = fmt
        self.stream = stream
        self.doc = {}

    def header(self, **fields):
        if self.fmt == "json":
            self.doc["header"] = fields
        else:
            self.line("# dpcolor " + " ".join(f"{k}={v}" for k, v in fields.items()))

    def line(self, text=""):
        if self.fmt == "table":
            self.stream.write(text + "\n")

    def put(self, key, value):
        self.doc[key] = value

    def close(self):
        if self.fmt == "json":
            self.stream.write(json.dumps(self.doc, indent=2, sort_keys=True) + "\n")


def _table(rows, headers):
    widths = [max(len(str(x)) for x in col) for col in zip(headers, *rows)]
    out = ["  ".join(str(h).ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in rows:
        out.append("  ".join(str(x).ljust(w) for x, w in zip(row, widths)).rstrip())
    return out


# -- commands ----------------------------------------------------------------------------


def cmd_chromatic(args, out: Emitter):
    g = load_graph(args)
    ms = parse_m_range(args.m)
    poly = graphs.chromatic_polynomial(g)
    out.header(command="chromatic", graph=graph_label(args), seed=args.seed)
    values = [(m, poly(m)) for m in ms]
    out.line(f"polynomial: {poly}")
    out.line("coefficients: " + " ".join(map(str, poly.coefficients)))
    for line in _table(values, ("m", "P")):
        out.line(line)
    out.put("polynomial", str(poly))
    out.put("coefficients", list(poly.coefficients))
    out.put("values", {str(m): v for m, v in values})
    return EXIT_OK


def cmd_dp(args, out: Emitter):
    g = load_graph(args)
    ms = parse_m_range(args.m)
    budget = parse_budget(args.budget)
    shards = resolve_shards(args.shards)
    out.header(command="dp", graph=graph_label(args), seed=args.seed)
    results, status = [], EXIT_OK
    for m in ms:
        try:
            if g.is_connected():
                res = search.dp_exact(g, m, budget=budget, workers=shards, shards=shards)
                value, witnesses, size = res.value, res.witnesses, res.search_size
            else:
                value = search.dp_value(g, m, budget=budget, workers=shards, shards=shards)
                witnesses, size = [], None
        except BudgetExceeded as exc:
            out.line(f"m={m} refused: needs {exc.required_covers} covers, budget {exc.budget}")
            results.append({"m": m, "refused": True, "required_covers": exc.required_covers})
            if not args.allow_refusal:
                status = EXIT_REFUSED
            continue
        chrom = graphs.chromatic_polynomial(g)(m)
        out.line(f"m={m} dp={value} chromatic={chrom} search_size={size}")
        entry = {"m": m, "value": value, "chromatic": chrom, "search_size": size}
        if witnesses:
            text = format_cover(witnesses[0])
            out.line("witness:")
            for line in text.splitlines():
                out.line("  " + line)
            entry["witness"] = text
        results.append(entry)
    out.put("results", results)
    return status


def cmd_verify(args, out: Emitter):
    if args.suite != "all" and args.suite not in verify.SUITES:
        raise InputError(f"unknown suite {args.suite!r}; choose from all, {', '.join(verify.SUITES)}")
    out.header(command="verify", suite=args.suite, seed=args.seed)
    rows = verify.run_suite(args.suite, seed=args.seed)
    table = [(r.claim, r.instance, r.expected, r.computed, r.status) for r in rows]
    for line in _table(table, ("claim", "instance", "expected", "computed", "status")):
        out.line(line)
    failed = sum(r.status == "fail" for r in rows)
    recorded = sum(r.status == "recorded" for r in rows)
    out.line(f"# {len(rows)} checks, {failed} failed, {recorded} recorded")
    out.put("rows", [r.__dict__ for r in rows])
    out.put("failed", failed)
    return EXIT_FAIL if failed else EXIT_OK


def cmd_construct(args, out: Emitter):
    params = {}
    for key in ("k", "m", "p"):
        if getattr(args, key) is not None:
            params[key] = getattr(args, key)
    if args.lengths:
        try:
            params["lengths"] = [int(x) for x in args.lengths.split(",")]
        except ValueError:
            raise InputError(f"bad lengths {args.lengths!r}") from None
    out.header(command="construct", name=args.name, seed=args.seed)
    try:
        cover, value, expect = constructions.build(args.name, **params)
    except CertificationError as exc:
        out.line(f"certification failed: {exc}")
        out.put("error", str(exc))
        return EXIT_FAIL
    except ValueError as exc:
        raise InputError(str(exc)) from None
    text = format_cover(cover)
    if parse_cover(text) != cover:
        raise CertificationError("serialization round-trip failed")
    for line in text.splitlines():
        out.line(line)
    out.line(f"count={value} expected={expect}")
    out.put("cover", text)
    out.put("count", value)
    out.put("expected", expect)
    return EXIT_OK


def cmd_threshold(args, out: Emitter):
    g = load_graph(args)
    budget = parse_budget(args.budget)
    shards = resolve_shards(args.shards)
    out.header(command="threshold", graph=graph_label(args), seed=args.seed)
    report = search.threshold_report(
        g, args.m_max, budget=budget, samples=args.samples, seed=args.seed, workers=shards
    )
    rows = [(r.m, r.status, r.method, r.value, r.chromatic, r.note) for r in report.rows]
    for line in _table(rows, ("m", "status", "method", "dp", "chromatic", "note")):
        out.line(line)
    out.line(f"family={report.family} claimed_tau={report.claimed_tau}")
    for flag in report.flags:
        out.line(f"flag: {flag}")
    out.put("rows", [dict(zip(("m", "status", "method", "dp", "chromatic", "note"), r)) for r in rows])
    out.put("family", report.family)
    out.put("claimed_tau", report.claimed_tau)
    out.put("flags", report.flags)
    return EXIT_OK


# -- entry point ---------------------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(prog="dpcolor", description="Exact DP-coloring computations.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", choices=("table", "json"), default="table")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--output", help="write stdout content to this file")
    common.add_argument("-v", "--verbose", action="store_true")

    source = argparse.ArgumentParser(add_help=False)
    source.add_argument("--family", help="family spec, e.g. cycle:4, wheel:4, join:2:cycle:4")
    source.add_argument("--file", help="graph file: 'n e' then one 'u v' per line")

    compute = argparse.ArgumentParser(add_help=False)
    compute.add_argument("--budget", help="max cover-count units (or 'none'); env DPCOLOR_BUDGET")
    compute.add_argument("--shards", type=int, help="worker/shard count; env DPCOLOR_SHARDS")

    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("chromatic", parents=[common, source], help="chromatic polynomial")
    p.add_argument("--m", default="1..5", help="value or range such as 2..4")
    p.set_defaults(func=cmd_chromatic)

    p = sub.add_parser("dp", parents=[common, source, compute], help="exhaustive DP color function")
    p.add_argument("--m", required=True)
    p.add_argument("--allow-refusal", action="store_true", help="a budget refusal is not an error")
    p.set_defaults(func=cmd_dp)

    p = sub.add_parser("verify", parents=[common], help="run a named verification suite")
    p.add_argument("--suite", default="all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("construct", parents=[common], help="build and certify a named cover")
    p.add_argument("name", choices=constructions.CONSTRUCTIONS)
    p.add_argument("--k", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--p", type=int)
    p.add_argument("--lengths", help="comma-separated cycle lengths")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("threshold", parents=[common, source, compute], help="P_DP vs P over an m range")
    p.add_argument("--m-max", type=int, required=True)
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(func=cmd_threshold)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verbose:
        import logging

        logging.basicConfig(level=logging.DEBUG, stream=sys.stderr)
    stream = sys.stdout
    handle = None
    if args.output:
        try:
            handle = open(args.output, "w")
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INPUT
        stream = handle
    out = Emitter(args.emit, stream)
    start = time.perf_counter()
    try:
        code = args.func(args, out)
        out.close()
    except (InputError, ParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BudgetExceeded as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except (CertificationError, DpColorError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    finally:
        if handle is not None:
            handle.close()
    print(f"wall_time={time.perf_counter() - start:.3f}s", file=sys.stderr)
    return code
