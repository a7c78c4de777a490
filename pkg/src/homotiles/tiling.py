"""Tiling pairs, complement search, tile enumeration and the Coven-Meyerowitz checks."""

from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Iterator

from homotiles.bitsets import BitGroup, bitgroup
from homotiles.charsums import (
    ExponentVector,
    cyclotomic,
    cyclotomic_divides,
    poly_eval,
    vanishes,
    zero_set,
)
from homotiles.errors import BudgetExceeded, TheoremFalsified
from homotiles.groups import Element, GroupSpec, factorize, prime_power

DEFAULT_SEARCH_BUDGET = 10**7  # search-tree nodes for one complement search
DEFAULT_TILE_BUDGET = 10**8  # candidate sets for tile enumeration


# -- exact-cover search on bitmasks ------------------------------------------------


def _cover_search(bg: BitGroup, omega: int, find_all: bool, budget: int) -> list[list[Element]]:
    """Complements T containing 0 of the set encoded by ``omega`` (which must contain 0).

    Omega is placed at 0 first; then the lowest uncovered point x is covered by
    Omega + (x - w) for each w in Omega whose translate is still disjoint from
    what is covered. In a tiling the translate covering x is unique, so each
    complement is produced exactly once.
    """
    full = bg.full
    size = omega.bit_count()
    if size == 0 or bg.size % size:
        return []
    omega_idx = bg.indices(omega)
    found: list[list[Element]] = []
    cache: dict[Element, int] = {}
    nodes = 0
    trail = [bg.coords[0]]

    def rec(covered: int) -> bool:
        nonlocal nodes
        if covered == full:
            found.append(list(trail))
            return not find_all
        nodes += 1
        if nodes > budget:
            raise BudgetExceeded(nodes, budget, partial=found)
        x = (~covered & (covered + 1)).bit_length() - 1
        for w in omega_idx:
            t = bg.diff_index(x, w)
            m = cache.get(t)
            if m is None:
                m = cache[t] = bg.shift(omega, t)
            if not m & covered:
                trail.append(t)
                if rec(covered | m):
                    return True
                trail.pop()
        return False

    rec(omega)
    return found


def _has_complement(bg: BitGroup, omega: int) -> list[Element] | None:
    found = _cover_search(bg, omega, False, DEFAULT_SEARCH_BUDGET)
    return found[0] if found else None


def _normalize(G: GroupSpec, A: Iterable) -> frozenset[Element]:
    return frozenset(G.element(x) for x in A)


def find_complements(G: GroupSpec, omega: Iterable, budget: int = DEFAULT_SEARCH_BUDGET) -> list[tuple[Element, ...]]:
    """Every tiling complement of omega that contains 0, each as a sorted tuple, sorted."""
    omega = _normalize(G, omega)
    if not omega:
        raise ValueError("omega must be nonempty")
    bg = bitgroup(G)
    # complements of omega - w0 are the complements of omega; shift so 0 is in omega
    w0 = min(omega)
    shifted = bg.mask(G.sub(x, w0) for x in omega)
    found = _cover_search(bg, shifted, True, budget)
    return sorted(tuple(sorted(T)) for T in found)


def find_complement(G: GroupSpec, omega: Iterable) -> tuple[Element, ...] | None:
    omega = _normalize(G, omega)
    if not omega:
        raise ValueError("omega must be nonempty")
    bg = bitgroup(G)
    w0 = min(omega)
    T = _has_complement(bg, bg.mask(G.sub(x, w0) for x in omega))
    return tuple(sorted(T)) if T is not None else None


def is_tile(G: GroupSpec, omega: Iterable) -> bool:
    return find_complement(G, omega) is not None


# -- tiling pair verification -----------------------------------------------------


@dataclass(frozen=True)
class TilingReport:
    omega: frozenset[Element]
    complement: frozenset[Element]
    cover: bool  # every x is w + t exactly once
    cover_swapped: bool  # same with the roles of omega and T exchanged
    cover_shifted: bool  # (omega + x, T + y) for the recorded shifts
    differences: bool  # |omega||T| = |G| and (omega - omega) & (T - T) = {0}
    zero_sets: bool  # |omega||T| = |G| and Z_omega | Z_T = G \ {0}
    shifts: tuple[Element, Element] = ((), ())

    @property
    def holds(self) -> bool:
        return self.cover

    def verdicts(self) -> dict[str, bool]:
        return {
            "cover": self.cover,
            "cover_swapped": self.cover_swapped,
            "cover_shifted": self.cover_shifted,
            "differences": self.differences,
            "zero_sets": self.zero_sets,
        }

    def to_json(self, G: GroupSpec) -> dict:
        return {
            "omega": G.encode_set(self.omega),
            "complement": G.encode_set(self.complement),
            "tiling_pair": self.holds,
            "verdicts": self.verdicts(),
            "shifts": [G.encode_element(s) for s in self.shifts],
        }


def _direct_cover(G: GroupSpec, omega, T) -> bool:
    hits = Counter(G.add(w, t) for w in omega for t in T)
    return len(hits) == G.order and all(c == 1 for c in hits.values())


def _mask_cover(G: GroupSpec, omega, T) -> bool:
    bg = bitgroup(G)
    tm = bg.mask(T)
    covered = 0
    for w in omega:
        m = bg.shift(tm, w)
        if m & covered:
            return False
        covered |= m
    return covered == bg.full


def is_tiling_pair(
    G: GroupSpec,
    omega: Iterable,
    T: Iterable,
    shifts: tuple | None = None,
) -> TilingReport:
    """Decide whether (omega, T) tiles G by five routes that must agree.

    ``shifts`` = (x, y) is used for the translated pair; the default moves
    omega by (1, ..., 1) and T by (0, ..., 0, 1).
    """
    omega = _normalize(G, omega)
    T = _normalize(G, T)
    if not omega or not T:
        raise ValueError("omega and T must be nonempty")
    if shifts is None:
        shifts = (G.element((1,) * len(G.factors)), G.element((0,) * (len(G.factors) - 1) + (1,)))
    sx, sy = (G.element(s) for s in shifts)
    sizes = len(omega) * len(T) == G.order
    cover = _direct_cover(G, omega, T)
    swapped = _mask_cover(G, T, omega)
    shifted = _direct_cover(G, G.translate(omega, sx), G.translate(T, sy))
    diffs = sizes and not ((G.difference_set(omega) & G.difference_set(T)) - {G.zero})
    zeros = sizes and (zero_set(G, omega).members | zero_set(G, T).members) == frozenset(G.nonzero_elements())
    report = TilingReport(omega, T, cover, swapped, shifted, diffs, zeros, (sx, sy))
    if len(set(report.verdicts().values())) != 1:
        raise TheoremFalsified("tiling criteria disagree", str(report.verdicts()), report)
    return report


def scale_complement(G: GroupSpec, omega: Iterable, T: Iterable, k: int) -> TilingReport:
    """(omega, kT) for gcd(k, |T|) = 1; it must again be a tiling pair."""
    omega = _normalize(G, omega)
    T = _normalize(G, T)
    if math.gcd(k, len(T)) != 1:
        raise ValueError(f"k={k} shares a factor with |T|={len(T)}")
    if not is_tiling_pair(G, omega, T).holds:
        raise ValueError("(omega, T) is not a tiling pair")
    kT = frozenset(G.multiple(k, t) for t in T)
    report = is_tiling_pair(G, omega, kT)
    if not report.holds:
        raise TheoremFalsified("dilated complement", f"k={k}", report)
    return report


# -- tile enumeration ---------------------------------------------------------------


def candidate_count(G: GroupSpec | int, k: int) -> int:
    order = G if isinstance(G, int) else G.order
    return math.comb(order - 1, k - 1) if 1 <= k <= order else 0


def _canonical(bg: BitGroup, mask: int) -> bool:
    """True if mask is the smallest of its translates that contain 0."""
    for i in bg.indices(mask)[1:]:
        t = tuple(-c % m for c, m in zip(bg.coords[i], bg.factors))
        if bg.shift(mask, t) < mask:
            return False
    return True


def tiles_with_prefix(factors: tuple[int, ...], k: int, prefix: tuple[int, ...], dedupe: bool = False):
    """Tiles of size k containing 0 whose smallest other indices are ``prefix``.

    Yields (mask, complement) pairs; the workhorse behind enumerate_tiles and
    the parallel harness.
    """
    bg = bitgroup(factors)
    N = bg.size
    rest = k - 1 - len(prefix)
    base = 1
    for i in prefix:
        base |= 1 << i
    start = prefix[-1] + 1 if prefix else 1
    bits = [1 << i for i in range(N)]
    if N % k:
        return
    for combo in itertools.combinations(bits[start:], rest):
        mask = base + sum(combo)
        T = _has_complement(bg, mask)
        if T is not None and (not dedupe or _canonical(bg, mask)):
            yield mask, T


def enumerate_tiles(
    G: GroupSpec,
    k: int,
    budget: int = DEFAULT_TILE_BUDGET,
    dedupe: bool = False,
) -> Iterator[tuple[frozenset[Element], tuple[Element, ...]]]:
    """All k-subsets containing 0 that tile G, each with one complement witness."""
    needed = candidate_count(G, k)
    if needed > budget:
        raise BudgetExceeded(needed, budget)
    return _enumerate_tiles(G, k, dedupe)


def _enumerate_tiles(G, k, dedupe):
    bg = bitgroup(G)
    for mask, T in tiles_with_prefix(G.factors, k, (), dedupe):
        yield frozenset(bg.members(mask)), tuple(sorted(T))


# -- Coven-Meyerowitz -------------------------------------------------------------


def prime_powers_dividing(N: int) -> list[int]:
    out = []
    for p, e in factorize(N).items():
        out.extend(p**a for a in range(1, e + 1))
    return sorted(out)


def _counts(A: Iterable[int], N: int) -> list[int]:
    a = [0] * N
    for x in A:
        a[x % N] += 1
    return a


def sa_set(A: Iterable[int], N: int) -> frozenset[int]:
    """S_A: prime powers s | N with Phi_s | A(x), by exact division."""
    a = _counts(A, N)
    return frozenset(s for s in prime_powers_dividing(N) if cyclotomic_divides(a, s))


@dataclass(frozen=True)
class T1Verdict:
    size: int
    product: int
    sa: frozenset[int]

    @property
    def passed(self) -> bool:
        return self.size == self.product


def check_T1(A: Iterable[int], N: int, sa: frozenset[int] | None = None) -> T1Verdict:
    """|A| = A(1) against prod_{s in S_A} Phi_s(1), both computed by evaluation."""
    a = _counts(A, N)
    if sa is None:
        sa = sa_set([e for e, c in enumerate(a) for _ in range(c)], N)
    size = poly_eval(a, 1)
    product = math.prod(poly_eval(cyclotomic(s), 1) for s in sa)
    return T1Verdict(size, product, frozenset(sa))


@dataclass(frozen=True)
class T2Verdict:
    checked: tuple[tuple[tuple[int, ...], bool], ...]  # ((s_1, ..., s_m), Phi_{prod} | A)

    @property
    def passed(self) -> bool:
        return all(ok for _, ok in self.checked)

    @property
    def witness(self) -> tuple[int, ...] | None:
        return next((ss for ss, ok in self.checked if not ok), None)


def check_T2(A: Iterable[int], N: int, sa: frozenset[int] | None = None) -> T2Verdict:
    """Phi_{s_1...s_m} | A(x) for all s_i in S_A that are powers of distinct primes, m >= 2."""
    a = _counts(A, N)
    if sa is None:
        sa = sa_set([e for e, c in enumerate(a) for _ in range(c)], N)
    by_prime: dict[int, list[int]] = {}
    for s in sorted(sa):
        by_prime.setdefault(prime_power(s)[0], []).append(s)
    primes = sorted(by_prime)
    checked = []
    for m in range(2, len(primes) + 1):
        for ps in itertools.combinations(primes, m):
            for ss in itertools.product(*(by_prime[p] for p in ps)):
                checked.append((ss, cyclotomic_divides(a, math.prod(ss))))
    return T2Verdict(tuple(checked))


@dataclass(frozen=True)
class CMReport:
    N: int
    sa: frozenset[int]
    t1: T1Verdict
    t2: T2Verdict

    @property
    def passed(self) -> bool:
        return self.t1.passed and self.t2.passed

    def to_json(self) -> dict:
        return {
            "N": self.N,
            "S_A": sorted(self.sa),
            "T1": {"passed": self.t1.passed, "size": self.t1.size, "product": self.t1.product},
            "T2": {
                "passed": self.t2.passed,
                "checked": [{"s": list(ss), "divides": ok} for ss, ok in self.t2.checked],
                "witness": list(self.t2.witness) if self.t2.witness else None,
            },
        }


def cm_report(A: Iterable[int], N: int) -> CMReport:
    A = list(A)
    sa = sa_set(A, N)
    return CMReport(N, sa, check_T1(A, N, sa), check_T2(A, N, sa))


def cm_guaranteed(N: int) -> bool:
    """True for N = p^n and N = p^n q, where (T1) and (T2) characterise tiles."""
    f = factorize(N)
    return len(f) == 1 or (len(f) == 2 and min(f.values()) == 1)


@dataclass(frozen=True)
class CMEquivalence:
    N: int
    A: tuple[int, ...]
    complement: tuple[int, ...] | None
    cm: CMReport

    @property
    def tile(self) -> bool:
        return self.complement is not None

    @property
    def agree(self) -> bool:
        return self.tile == self.cm.passed


def cm_tile_equivalence(A: Iterable[int], N: int) -> CMEquivalence:
    """Compare complement search in Z_N with T1 and T2.

    For N = p^n or p^n q a disagreement raises TheoremFalsified; for other N
    the result is only reported.
    """
    A = sorted({x % N for x in A})
    if not A:
        raise ValueError("A must be nonempty")
    bg = bitgroup((N,))
    mask = 0
    for x in A:
        mask |= 1 << ((x - A[0]) % N)
    T = _has_complement(bg, mask)
    comp = tuple(sorted(t[0] for t in T)) if T is not None else None
    result = CMEquivalence(N, tuple(A), comp, cm_report(A, N))
    if not result.agree and cm_guaranteed(N):
        raise TheoremFalsified("CM equivalence", f"A={A} in Z_{N}", result)
    return result


def divisibility_bound(A: Iterable[int], N: int, p: int) -> int:
    """k = #{d >= 1 : p^d | N, A(omega_N^{N/p^d}) = 0}; p^k must divide |A|."""
    A = list(A)
    k = 0
    d = 1
    while N % p**d == 0:
        pd = p**d
        if vanishes(ExponentVector.from_exponents(A, pd)):
            k += 1
        d += 1
    if len(A) % p**k:
        raise TheoremFalsified("divisibility bound", f"p^{k} does not divide |A|={len(A)}", A)
    return k


# -- spectra --------------------------------------------------------------------


def find_spectrum(G: GroupSpec, omega: Iterable) -> tuple[Element, ...] | None:
    """A set of |omega| characters containing 0 with pairwise differences in Z_omega."""
    omega = _normalize(G, omega)
    Z = zero_set(G, omega).members
    need = len(omega)
    cands = sorted(Z)
    chosen = [G.zero]

    def rec(start: int) -> bool:
        if len(chosen) == need:
            return True
        for i in range(start, len(cands)):
            c = cands[i]
            if all(G.sub(c, l) in Z for l in chosen[1:]):
                chosen.append(c)
                if rec(i + 1):
                    return True
                chosen.pop()
        return False

    return tuple(sorted(chosen)) if rec(0) else None
