"""Command-line front end: analyze, enumerate, render, validate.

Exit codes: 0 complete and consistent, 1 usage or parse error, 2 budget
exhausted (partial output), 3 a theorem check failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from collections import Counter
from pathlib import Path

from homotiles.bitsets import bitgroup
from homotiles.charsums import zero_set
from homotiles.errors import BudgetExceeded, TheoremFalsified
from homotiles.groups import GroupSpec, crt_join
from homotiles.ptree import BranchLevelSet, DigitTree, homogeneity
from homotiles.structure import classify_tile_pp, classify_tile_pq, i_omega
from homotiles.tiling import (
    DEFAULT_SEARCH_BUDGET,
    DEFAULT_TILE_BUDGET,
    candidate_count,
    cm_guaranteed,
    cm_report,
    find_complements,
    tiles_with_prefix,
)
from homotiles import validation

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_FALSIFIED = 0, 1, 2, 3
PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_json(text: str, what: str):
    if not text.lstrip().startswith(("{", "[")) and Path(text).is_file():
        text = Path(text).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what}: {exc.msg} at line {exc.lineno} column {exc.colno} (char {exc.pos})") from None


def parse_group(text: str) -> GroupSpec:
    d = _load_json(text, "--group")
    if not isinstance(d, dict):
        raise UsageError("--group must be a JSON object")
    try:
        return GroupSpec.from_json(d)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"--group: {exc}") from None


def parse_set(G: GroupSpec, text: str) -> frozenset:
    raw = _load_json(text, "--set")
    if not isinstance(raw, list):
        raise UsageError("--set must be a JSON array")
    if not raw:
        raise UsageError("--set is empty")
    try:
        return G.subset(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"--set: {exc}") from None


def _dump(obj, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(obj, sort_keys=True)
    return _text(obj)


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and any(isinstance(x, (dict, list)) for x in (v.values() if isinstance(v, dict) else v)):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v, sort_keys=True)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_text(x, indent) if isinstance(x, dict) else f"{pad}- {json.dumps(x)}" for x in obj)
    return f"{pad}{obj}"


# -- analyze ---------------------------------------------------------------------------


def _cyclic_form(G: GroupSpec, omega) -> tuple[list[int], int] | None:
    if G.family == "pn":
        return sorted(x for (x,) in omega), G.pn
    if G.family == "pnq":
        return sorted(crt_join(x, G.p, G.n, G.q) for x in omega), G.order
    return None


def classify(G: GroupSpec, omega, T) -> dict:
    if G.family == "pn":
        h = homogeneity([x for (x,) in omega], G.p, G.n)
        return {"branch_levels": sorted(h.levels)} if isinstance(h, BranchLevelSet) else {"homogeneous": False}
    if G.family == "pnq":
        return classify_tile_pq(G, omega, T, verify=False).to_json()
    return classify_tile_pp(G, omega, T, verify=False).to_json()


def analyze(G: GroupSpec, omega, budget: int = DEFAULT_SEARCH_BUDGET) -> tuple[dict, int]:
    report: dict = {"group": G.to_json(), "set": G.encode_set(omega), "size": len(omega)}
    report["zero_set"] = zero_set(G, omega).to_json()
    if G.family == "pn":
        h = homogeneity([x for (x,) in omega], G.p, G.n)
        report["homogeneous"] = isinstance(h, BranchLevelSet)
        if isinstance(h, BranchLevelSet):
            report["branch_levels"] = h.to_json()
        else:
            report["mixed_at"] = {"level": h.level, "vertex": h.vertex, "children": h.descendants}
    else:
        report["I_omega"] = sorted(i_omega(G, omega))
    cyc = _cyclic_form(G, omega)
    if cyc is not None:
        A, N = cyc
        report["cm"] = cm_report(A, N).to_json() | {"guaranteed": cm_guaranteed(N)}
    code = EXIT_OK
    try:
        comps = find_complements(G, omega, budget)
    except BudgetExceeded as exc:
        partial = exc.partial or []
        comps = sorted(tuple(sorted(T)) for T in partial)
        report["incomplete"] = True
        code = EXIT_BUDGET
    report["tile"] = bool(comps)
    if comps:
        T = comps[0]
        report["complement"] = G.encode_set(T)
        report["complement_count"] = len(comps)
        try:
            report["classification"] = classify(G, omega, T)
        except TheoremFalsified as exc:
            report["falsified"] = str(exc)
            code = EXIT_FALSIFIED
    return report, code


def cmd_analyze(args) -> int:
    G = parse_group(args.group)
    omega = parse_set(G, args.set)
    report, code = analyze(G, omega, args.budget or DEFAULT_SEARCH_BUDGET)
    print(_dump(report, args.format))
    return code


# -- enumerate ---------------------------------------------------------------------------


def _enumerate_task(G: GroupSpec, k: int, prefix: tuple[int, ...]) -> list[dict]:
    bg = bitgroup(G)
    out = []
    for mask, T in tiles_with_prefix(G.factors, k, prefix):
        omega = frozenset(bg.members(mask))
        T = sorted(T)
        entry = {"omega": G.encode_set(omega), "complement": G.encode_set(T)}
        try:
            entry["report"] = classify(G, omega, T)
        except TheoremFalsified as exc:
            entry["falsified"] = str(exc)
        out.append(entry)
    return out


def cmd_enumerate(args) -> int:
    G = parse_group(args.group)
    if args.size is None:
        raise UsageError("enumerate needs --size")
    k = args.size
    budget = args.budget or DEFAULT_TILE_BUDGET
    needed = candidate_count(G, k)
    summary = {"group": G.to_json(), "size": k, "candidates": needed}
    if needed > budget:
        summary |= {"complete": False, "reason": f"needs {needed} candidates, budget {budget}"}
        print(_dump({"summary": summary}, args.format))
        return EXIT_BUDGET
    tasks = [(G, k, pre) for pre in validation.prefixes(G.order, k)]
    entries = [e for part in validation.run_tasks(_enumerate_task, tasks, args.jobs) for e in part]
    entries.sort(key=lambda e: json.dumps(e["omega"]))
    cases: Counter = Counter()
    falsified = 0
    for e in entries:
        if "falsified" in e:
            falsified += 1
        elif "case" in e["report"]:
            cases[str(e["report"]["case"])] += 1
        print(_dump(e, args.format))
        if args.format == "text":
            print()
    summary |= {"complete": True, "tiles": len(entries), "cases": dict(sorted(cases.items())), "falsifications": falsified}
    print(_dump({"summary": summary}, args.format))
    return EXIT_FALSIFIED if falsified else EXIT_OK


# -- render ---------------------------------------------------------------------------------


def render(G: GroupSpec, omega, fmt: str = "dot") -> str:
    """Digit tree(s) of a set in Z_{p^n}, or of the structure of a tile of Z_{p^n} x Z_p.

    For Z_{p^n} x Z_p tiles: case 1 draws the projection, case 2 one tree per
    slice, case 3 the sheared set with each edge colored by the y value of
    the points below it (edges shared by several y values stay black).
    """
    if G.family == "pn":
        tree = DigitTree.of([x for (x,) in omega], G.p, G.n)
        return tree.to_dot() if fmt == "dot" else tree.to_ascii()
    if G.family != "pnp":
        raise UsageError(f"tree rendering needs a Z_(p^n) or Z_(p^n) x Z_p group, got {G}")
    comps = find_complements(G, omega)
    if not comps:
        raise UsageError("set is not a tile; nothing to render")
    rep = classify_tile_pp(G, omega, comps[0], verify=False)
    p, n = G.p, G.n
    if rep.case == 1:
        trees = [("projection", DigitTree.of(rep.projection, p, n), None)]
    elif rep.case == 2:
        trees = [(f"slice{b}", DigitTree.of(s, p, n), None) for b, s in sorted(rep.slices.items())]
    else:
        j0, b0 = rep.gamma
        shear = p ** (n - j0 - 1)
        ys: dict[tuple[int, int], set[int]] = {}
        for x, y in omega:
            v = (x + b0 * y * shear) % G.pn
            for g in range(n):
                ys.setdefault((g, v % p ** (g + 1)), set()).add(y)
        colors = {e: PALETTE[next(iter(s)) % len(PALETTE)] for e, s in ys.items() if len(s) == 1 and len(set(y for _, y in omega)) > 1}
        trees = [("sheared", DigitTree.of(rep.omega_tilde, p, n), colors)]
    if fmt == "dot":
        return "".join(t.to_dot(c, name) for name, t, c in trees)
    return "".join(f"{name}\n{t.to_ascii()}" for name, t, _ in trees)


def cmd_render(args) -> int:
    G = parse_group(args.group)
    omega = parse_set(G, args.set)
    fmt = "dot" if args.format in ("dot", "json") else "text"
    sys.stdout.write(render(G, omega, fmt))
    return EXIT_OK


# -- validate ---------------------------------------------------------------------------------

HOMOGENEITY_GROUPS = ((2, 2), (2, 3), (2, 4), (3, 2), (3, 3))
PQ_GROUPS = (GroupSpec.pnq(2, 2, 3), GroupSpec.pnq(2, 3, 3), GroupSpec.pnq(3, 2, 2))
PP_GROUPS = (GroupSpec.pnp(2, 2), GroupSpec.pnp(2, 3), GroupSpec.pnp(3, 2))
CONCORDANCE_GROUPS = (
    GroupSpec.cyclic(2, 2), GroupSpec.cyclic(2, 3), GroupSpec.cyclic(2, 4), GroupSpec.cyclic(3, 2),
    GroupSpec.cyclic(3, 3), 12, 18, *PQ_GROUPS, *PP_GROUPS,
)
SUITES = ("homogeneity", "cm", "pq", "pp", "concordance", "lemmas")


def run_suite(name: str, jobs: int, seed: int, probes: int = 10_000) -> tuple[dict, bool]:
    if name == "homogeneity":
        rows, ok = [], True
        for p, n in HOMOGENEITY_GROUPS:
            for k in range(n + 1):
                r = validation.tile_homogeneity_run(p, n, p**k, jobs)
                ok &= r.ok
                rows.append({"group": f"Z_{p**n}", "size": p**k, "candidates": r.candidates, "tiles": r.tiles,
                             "homogeneous": r.homogeneous, "mismatches": [list(m[0]) for m in r.mismatches]})
        return {"runs": rows}, ok
    if name == "cm":
        rows, ok = [], True
        for N in (12, 18):
            r = validation.cm_run(N, jobs)
            ok &= not r.exceptions
            rows.append({"N": N, "subsets": r.subsets, "tiles": r.tiles, "exceptions": [list(e[0]) for e in r.exceptions]})
        return {"runs": rows}, ok
    if name in ("pq", "pp"):
        runs = [validation.theorem_run(G, jobs) for G in (PQ_GROUPS if name == "pq" else PP_GROUPS)]
        return {"runs": [r.to_json() for r in runs]}, not any(r.falsifications for r in runs)
    if name == "concordance":
        rows, ok = [], True
        for i, G in enumerate(CONCORDANCE_GROUPS):
            r = validation.concordance_run(G, probes, seed + i)
            ok &= not r.disagreements
            rows.append({"group": r.label, "probes": r.probes, "vanishing": r.vanishing, "disagreements": len(r.disagreements)})
        return {"runs": rows}, ok
    if name == "lemmas":
        res = validation.lemma_suite(seed)
        return {k: {"checked": v.checked, "failures": len(v.failures)} for k, v in res.items()}, all(v.ok for v in res.values())
    raise UsageError(f"unknown suite {name}")


def cmd_validate(args) -> int:
    names = SUITES if args.suite == "all" else (args.suite,)
    ok = True
    out = {}
    for name in names:
        out[name], good = run_suite(name, args.jobs, args.seed)
        ok &= good
    out["consistent"] = ok
    print(_dump(out, args.format))
    return EXIT_OK if ok else EXIT_FALSIFIED


# -- entry point -------------------------------------------------------------------------------


def _common(fmt: str = "json") -> argparse.ArgumentParser:
    # a fresh parent per verb: parents share Action objects, so set_defaults would leak across verbs
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text", "dot"), default=fmt)
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1)
    common.add_argument("--budget", type=int, default=None, help="search-node budget (analyze) or candidate budget (enumerate)")
    common.add_argument("--seed", type=int, default=0)
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="homotiles", description="Tiles, digit trees and character sums in small abelian groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    a = sub.add_parser("analyze", parents=[_common()], help="zero set, homogeneity, CM checks, tiling and structure of one set")
    a.add_argument("--group", required=True)
    a.add_argument("--set", required=True)
    a.set_defaults(func=cmd_analyze)
    e = sub.add_parser("enumerate", parents=[_common()], help="all tiles of one size containing 0, classified")
    e.add_argument("--group", required=True)
    e.add_argument("--size", type=int)
    e.set_defaults(func=cmd_enumerate)
    r = sub.add_parser("render", parents=[_common("dot")], help="digit tree as Graphviz DOT (or ASCII with --format text)")
    r.add_argument("--group", required=True)
    r.add_argument("--set", required=True)
    r.set_defaults(func=cmd_render)
    v = sub.add_parser("validate", parents=[_common()], help="run exhaustive and randomized validation suites")
    v.add_argument("--suite", choices=(*SUITES, "all"), default="all")
    v.set_defaults(func=cmd_validate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.jobs < 1 or (args.budget is not None and args.budget < 1):
        parser.error("--jobs and --budget must be positive")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"homotiles: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"homotiles: budget exhausted: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except TheoremFalsified as exc:
        print(f"homotiles: falsified: {exc}", file=sys.stderr)
        return EXIT_FALSIFIED


if __name__ == "__main__":
    sys.exit(main())
