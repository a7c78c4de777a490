"""Exhaustive and randomized validation runs.

Each run returns a plain dataclass with counts and every failing witness.
Enumeration work is split by the second-smallest element of the candidate
set ("prefix") so it can be spread over processes; results are merged in
sorted order, so the output does not depend on ``jobs``.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from homotiles.bitsets import bitgroup
from homotiles.charsums import (
    ExponentVector,
    character_sum,
    decompose_vanishing_sum,
    fold_character,
    slice_zeros,
    translation_invariance_check,
    unit_scaling_closure_check,
    vanishes,
    vanishes_at,
)
from homotiles.errors import TheoremFalsified
from homotiles.groups import GroupSpec
from homotiles.ptree import homogeneity, BranchLevelSet
from homotiles.structure import (
    check_zero_chain_divisibility,
    classify_tile_pp,
    classify_tile_pq,
    equidistribution_check,
)
from homotiles.tiling import (
    _cover_search,
    DEFAULT_SEARCH_BUDGET,
    cm_report,
    cm_tile_equivalence,
    divisibility_bound,
    is_tiling_pair,
    scale_complement,
    tiles_with_prefix,
)

FLOAT_ZERO = 1e-9


def prefixes(order: int, k: int) -> list[tuple[int, ...]]:
    if k <= 1:
        return [()]
    return [(i,) for i in range(1, order - k + 2)]


def run_tasks(fn, tasks: list[tuple], jobs: int) -> list:
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(*t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, *zip(*tasks), chunksize=max(1, len(tasks) // (4 * jobs))))


def tile_sizes(G: GroupSpec) -> list[int]:
    return [k for k in range(1, G.order + 1) if G.order % k == 0]


# -- tile <=> homogeneous in Z_{p^n} ------------------------------------------------


@dataclass
class HomogeneityRun:
    p: int
    n: int
    k: int
    candidates: int = 0
    tiles: int = 0
    homogeneous: int = 0
    mismatches: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.mismatches and self.tiles == self.homogeneous


def _homogeneity_task(p: int, n: int, k: int, prefix: tuple[int, ...]) -> tuple[int, int, int, list]:
    bg = bitgroup((p**n,))
    N = p**n
    base = 1
    for i in prefix:
        base |= 1 << i
    start = prefix[-1] + 1 if prefix else 1
    seen = tiles = homog = 0
    bad = []
    for combo in itertools.combinations(range(start, N), k - 1 - len(prefix)):
        seen += 1
        mask = base
        for i in combo:
            mask |= 1 << i
        tile = bool(_cover_search(bg, mask, False, DEFAULT_SEARCH_BUDGET))
        C = (0,) + prefix + combo
        h = isinstance(homogeneity(C, p, n), BranchLevelSet)
        tiles += tile
        homog += h
        if tile != h:
            bad.append((C, tile, h))
    return seen, tiles, homog, bad


def tile_homogeneity_run(p: int, n: int, k: int, jobs: int = 1) -> HomogeneityRun:
    """Every k-subset of Z_{p^n} containing 0: complement search against homogeneity."""
    t0 = time.perf_counter()
    run = HomogeneityRun(p, n, k)
    tasks = [(p, n, k, pre) for pre in prefixes(p**n, k)]
    for seen, tiles, homog, bad in run_tasks(_homogeneity_task, tasks, jobs):
        run.candidates += seen
        run.tiles += tiles
        run.homogeneous += homog
        run.mismatches.extend(bad)
    run.mismatches.sort()
    run.seconds = time.perf_counter() - t0
    return run


# -- CM equivalence in Z_N -------------------------------------------------------------


@dataclass
class CMRun:
    N: int
    subsets: int = 0
    tiles: int = 0
    exceptions: list = field(default_factory=list)
    seconds: float = 0.0


def _cm_task(N: int, lo: int, hi: int) -> tuple[int, int, list]:
    seen = tiles = 0
    bad = []
    for mask in range(lo, hi):
        A = [i for i in range(N) if mask >> i & 1]
        seen += 1
        if not A:
            # empty set: every Phi_s divides 0, so (T1) reads 0 = prod Phi_s(1) and fails
            if cm_report(A, N).passed:
                bad.append((tuple(A), "empty set passes T1 and T2"))
            continue
        try:
            tiles += cm_tile_equivalence(A, N).tile
        except TheoremFalsified as exc:
            bad.append((tuple(A), str(exc)))
    return seen, tiles, bad


def cm_run(N: int, jobs: int = 1) -> CMRun:
    """(T1 and T2) against complement search for all 2^N subsets of Z_N."""
    t0 = time.perf_counter()
    run = CMRun(N)
    total = 1 << N
    chunk = max(1, total // 64)
    tasks = [(N, lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]
    for seen, tiles, bad in run_tasks(_cm_task, tasks, jobs):
        run.subsets += seen
        run.tiles += tiles
        run.exceptions.extend(bad)
    run.exceptions.sort()
    run.seconds = time.perf_counter() - t0
    return run


# -- structure theorems ----------------------------------------------------------------


@dataclass
class TheoremRun:
    group: GroupSpec
    tiles: int = 0
    cases: Counter = field(default_factory=Counter)
    falsifications: list = field(default_factory=list)
    cardinality_checked: int = 0
    printed_fiber_failures: int = 0  # case 3 fibers cut modulo p^(n-j0-1)
    first_printed_failure: tuple | None = None
    stream: list = field(default_factory=list)
    seconds: float = 0.0

    def to_json(self) -> dict:
        G = self.group
        return {
            "group": G.to_json(),
            "tiles": self.tiles,
            "cases": {str(c): n for c, n in sorted(self.cases.items())},
            "falsifications": [{"omega": o, "complement": t, "error": e} for o, t, e in self.falsifications],
            "cardinality_checked": self.cardinality_checked,
            "printed_fiber_failures": self.printed_fiber_failures,
            "seconds": round(self.seconds, 3),
        }


def _theorem_task(G: GroupSpec, k: int, prefix: tuple[int, ...], keep_stream: bool) -> dict:
    bg = bitgroup(G)
    out = {"tiles": 0, "cases": Counter(), "false": [], "card": 0, "printed": 0, "first": None, "stream": []}
    for mask, T in tiles_with_prefix(G.factors, k, prefix):
        omega = bg.members(mask)
        T = sorted(T)
        out["tiles"] += 1
        if keep_stream:
            out["stream"].append((G.encode_set(omega), G.encode_set(T)))
        try:
            if G.family == "pnq":
                rep = classify_tile_pq(G, omega, T)
                out["card"] += 1
            else:
                rep = classify_tile_pp(G, omega, T)
                out["card"] += 1
                if rep.case == 3 and not rep.printed_fibers_hold:
                    out["printed"] += 1
                    if out["first"] is None:
                        out["first"] = (G.encode_set(omega), G.encode_set(T))
            out["cases"][rep.case] += 1
        except TheoremFalsified as exc:
            out["false"].append((G.encode_set(omega), G.encode_set(T), str(exc)))
    return out


def theorem_run(G: GroupSpec, jobs: int = 1, keep_stream: bool = False, sizes: list[int] | None = None) -> TheoremRun:
    """Classify every tile containing 0, of every size, with the matching classifier.

    The classifiers also run the zero-index cardinality checks, counted in
    ``cardinality_checked``.
    """
    if G.family not in ("pnq", "pnp"):
        raise ValueError(f"theorem runs need a product group, got {G}")
    t0 = time.perf_counter()
    run = TheoremRun(G)
    tasks = [(G, k, pre, keep_stream) for k in (sizes or tile_sizes(G)) for pre in prefixes(G.order, k)]
    for part in run_tasks(_theorem_task, tasks, jobs):
        run.tiles += part["tiles"]
        run.cases.update(part["cases"])
        run.falsifications.extend(part["false"])
        run.cardinality_checked += part["card"]
        run.printed_fiber_failures += part["printed"]
        if run.first_printed_failure is None:
            run.first_printed_failure = part["first"]
        run.stream.extend(part["stream"])
    run.falsifications.sort()
    run.stream.sort()
    run.seconds = time.perf_counter() - t0
    return run


# -- exact against floating point -------------------------------------------------------


@dataclass
class ConcordanceRun:
    label: str
    probes: int = 0
    vanishing: int = 0
    disagreements: list = field(default_factory=list)
    worst_nonzero: float = math.inf  # smallest |sum| among exact nonzeros
    worst_zero: float = 0.0  # largest |sum| among exact zeros


def _random_subset(rng: random.Random, pool: list, biased: bool, G: GroupSpec | None):
    if not biased or G is None:
        k = rng.randint(1, len(pool))
        return rng.sample(pool, k)
    # union of translates of a cyclic subgroup: vanishes on many characters
    h = rng.choice(pool)
    sub = {G.zero}
    x = h
    while x not in sub:
        sub.add(x)
        x = G.add(x, h)
    reps = rng.sample(pool, rng.randint(1, max(1, len(pool) // len(sub))))
    return sorted({G.add(r, s) for r in reps for s in sub})


def concordance_run(G: GroupSpec | int, probes: int, seed: int) -> ConcordanceRun:
    """Random (set, character) probes; the exact verdict must match |sum| < 1e-9.

    An int G means the cyclic group Z_G (any order), decided by the cyclotomic
    remainder route. Half the probes use unions of cosets of a cyclic subgroup,
    which vanish far more often than uniform sets.
    """
    rng = random.Random(seed)
    if isinstance(G, int):
        N = G
        run = ConcordanceRun(f"Z_{N}")
        pool = list(range(N))
        for i in range(probes):
            if i % 2:
                d = rng.choice([d for d in range(1, N + 1) if N % d == 0])
                A = sorted({(r + d * j) % N for r in rng.sample(pool, rng.randint(1, d)) for j in range(N // d)})
            else:
                A = _random_subset(rng, pool, False, None)
            g = rng.randrange(N)
            m = N // math.gcd(g, N)
            exact = vanishes(ExponentVector.from_exponents((a * g // (N // m) for a in A), m))
            val = abs(sum(complex(math.cos(2 * math.pi * a * g / N), math.sin(2 * math.pi * a * g / N)) for a in A))
            _record(run, exact, val, (A, g))
        return run
    run = ConcordanceRun(str(G))
    pool = G.elements()
    for i in range(probes):
        A = _random_subset(rng, pool, i % 2 == 1, G)
        g = rng.choice(pool)
        exact = vanishes(fold_character(G, A, g))
        _record(run, exact, abs(character_sum(G, A, g)), (G.encode_set(A), G.encode_element(g)))
    return run


def _record(run: ConcordanceRun, exact: bool, val: float, witness):
    run.probes += 1
    run.vanishing += exact
    if exact:
        run.worst_zero = max(run.worst_zero, val)
    else:
        run.worst_nonzero = min(run.worst_nonzero, val)
    if exact != (val < FLOAT_ZERO):
        run.disagreements.append((witness, exact, val))


# -- lemma suite -----------------------------------------------------------------------


@dataclass
class LemmaResult:
    name: str
    checked: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.checked > 0 and not self.failures


def _attempt(res: LemmaResult, fn, *args):
    res.checked += 1
    try:
        if fn(*args) is False:
            res.failures.append(args)
    except TheoremFalsified as exc:
        res.failures.append((args, str(exc)))


def _random_tiling_pairs(G: GroupSpec, count: int, rng: random.Random) -> list[tuple]:
    bg = bitgroup(G)
    pairs = []
    sizes = [k for k in tile_sizes(G)]
    while len(pairs) < count:
        k = rng.choice(sizes)
        mask = 1
        for i in rng.sample(range(1, G.order), k - 1):
            mask |= 1 << i
        found = _cover_search(bg, mask, False, DEFAULT_SEARCH_BUDGET)
        if found:
            shift = rng.choice(G.elements())
            pairs.append((G.translate(bg.members(mask), shift), sorted(found[0])))
    return pairs


LEMMA_GROUPS = [
    GroupSpec.cyclic(2, 3),
    GroupSpec.cyclic(3, 2),
    GroupSpec.pnq(2, 2, 3),
    GroupSpec.pnq(3, 2, 2),
    GroupSpec.pnp(2, 2),
    GroupSpec.pnp(2, 3),
    GroupSpec.pnp(3, 2),
]


def lemma_suite(seed: int = 0, samples: int = 200, pairs: int = 1000) -> dict[str, LemmaResult]:
    rng = random.Random(seed)
    out = {name: LemmaResult(name) for name in (
        "translation", "unit_scaling", "slices", "tiling_concordance", "dilation",
        "decomposition", "divisibility_cyclic", "divisibility_pnp", "equidistribution",
    )}

    for G in LEMMA_GROUPS:
        pool = G.elements()
        for _ in range(samples):
            A = rng.sample(pool, rng.randint(1, G.order))
            _attempt(out["translation"], translation_invariance_check, G, A, rng.choice(pool))
            _attempt(out["unit_scaling"], unit_scaling_closure_check, G, A)

    # slice propagation: every subset of Z_4 x Z_2 and Z_4 x Z_3, every admissible h
    for G in (GroupSpec.pnp(2, 2), GroupSpec.pnq(2, 2, 3)):
        for mask in range(1, 1 << G.order):
            A = [x for i, x in enumerate(G.elements()) if mask >> i & 1]
            for h in range(G.factors[0]):
                if all(vanishes_at(G, A, (h, s)) for s in range(G.factors[1])):
                    _attempt(out["slices"], lambda G, A, h: slice_zeros(G, A, h).holds, G, A, h)

    # five-way concordance on tiling pairs and on size-compatible non-pairs
    tiling_pairs = []
    share = max(1, pairs // len(LEMMA_GROUPS))
    for G in LEMMA_GROUPS:
        got = _random_tiling_pairs(G, share, rng)
        tiling_pairs.extend((G, o, t) for o, t in got)
    while len(tiling_pairs) < pairs:
        G = LEMMA_GROUPS[len(tiling_pairs) % len(LEMMA_GROUPS)]
        o, t = _random_tiling_pairs(G, 1, rng)[0]
        tiling_pairs.append((G, o, t))
    for G, o, t in tiling_pairs:
        _attempt(out["tiling_concordance"], lambda *a: is_tiling_pair(*a).holds, G, o, t)
        units = [k for k in range(1, 2 * G.order) if math.gcd(k, len(t)) == 1]
        _attempt(out["dilation"], lambda G, o, t, k: scale_complement(G, o, t, k).holds, G, o, t, rng.choice(units))
    for G in LEMMA_GROUPS:
        pool = G.elements()
        for _ in range(samples):
            k = rng.choice(tile_sizes(G))
            o = rng.sample(pool, k)
            t = rng.sample(pool, G.order // k)
            _attempt(out["tiling_concordance"], lambda *a: is_tiling_pair(*a) is not None, G, o, t)

    # decomposition round trip on random vanishing multisets of Z_{p^n}
    for p, n in ((2, 2), (2, 3), (3, 2), (3, 3), (5, 2)):
        pn, step = p**n, p ** (n - 1)
        for _ in range(samples):
            C = []
            for _ in range(rng.randint(0, 4)):
                r = rng.randrange(pn)
                C.extend(r + j * step + pn * rng.randrange(3) for j in range(p))
            rng.shuffle(C)
            _attempt(out["decomposition"], _decomposition_ok, C, p, n)

    for N, ps in ((12, (2, 3)), (18, (2, 3)), (27, (3,)), (20, (2, 5))):
        for _ in range(samples):
            A = rng.sample(range(N), rng.randint(1, N))
            for p in ps:
                _attempt(out["divisibility_cyclic"], lambda A, N, p: divisibility_bound(A, N, p) >= 0, A, N, p)

    G = GroupSpec.pnp(2, 3)
    for k in range(1, 9):
        for A in itertools.combinations(G.elements(), k):
            _attempt(out["divisibility_pnp"], lambda G, A: check_zero_chain_divisibility(G, A) >= 0, G, A)
    for k in range(1, 7):
        for A in itertools.combinations(G.elements(), k):
            for d in G.nonzero_elements():
                _attempt(out["equidistribution"], lambda G, A, d: equidistribution_check(G, A, d).consistent, G, A, d)
    return out


def _decomposition_ok(C: list[int], p: int, n: int) -> bool:
    blocks = decompose_vanishing_sum(C, p, n)
    pn, step = p**n, p ** (n - 1)
    if Counter(c for b in blocks for c in b) != Counter(C):
        return False
    for b in blocks:
        res = sorted(c % pn for c in b)
        if len(b) != p or any((res[j] - res[0]) != j * step for j in range(p)):
            return False
    return True
