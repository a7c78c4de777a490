"""Exact vanishing of sums of roots of unity.

Everything that decides a zero is integer arithmetic: either the class
criterion for prime-power orders (a vector (a_e) sums to zero against
omega_{p^n} iff a_k = a_{k + j p^{n-1}} for all k, j) or an exact remainder
modulo a cyclotomic polynomial. Complex floating point appears only in
:func:`character_sum`, which the tests use as an independent cross-check.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from homotiles.errors import TheoremFalsified
from homotiles.groups import (
    DEFAULT_ORDER_BOUND,
    Element,
    GroupSpec,
    character_exponent,
    prime_power,
    unit_orbit,
    orbit_representatives,
)


@dataclass(frozen=True)
class ExponentVector:
    """Multiplicities (a_0, ..., a_{m-1}) standing for sum_e a_e omega_m^e."""

    m: int
    coeffs: tuple[int, ...]

    def __post_init__(self):
        if self.m < 1 or len(self.coeffs) != self.m:
            raise ValueError(f"need exactly m={self.m} coefficients, got {len(self.coeffs)}")

    @classmethod
    def from_exponents(cls, exponents: Iterable[int], m: int) -> ExponentVector:
        a = [0] * m
        for e in exponents:
            a[e % m] += 1
        return cls(m, tuple(a))

    @property
    def mass(self) -> int:
        return sum(self.coeffs)

    def support(self) -> list[int]:
        return [e for e, a in enumerate(self.coeffs) if a]

    def to_complex(self) -> complex:
        return sum(a * cmath.exp(2j * math.pi * e / self.m) for e, a in enumerate(self.coeffs) if a)

    def to_json(self) -> dict:
        return {"m": self.m, "coeffs": {str(e): a for e, a in enumerate(self.coeffs) if a}}

    @classmethod
    def from_json(cls, d: dict) -> ExponentVector:
        m = int(d["m"])
        a = [0] * m
        for e, c in d["coeffs"].items():
            a[int(e) % m] += int(c)
        return cls(m, tuple(a))


def mask_polynomial(A: Iterable[int], m: int) -> ExponentVector:
    """Mask polynomial sum_a m_a x^a of a multiset of residues mod m."""
    return ExponentVector.from_exponents(A, m)


# -- integer polynomials (dense, index = degree) --------------------------------


def poly_trim(a: Sequence[int]) -> list[int]:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


def poly_mul(a: Sequence[int], b: Sequence[int]) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return poly_trim(out)


def poly_divmod(a: Sequence[int], b: Sequence[int]) -> tuple[list[int], list[int]]:
    """Division by a monic integer polynomial; quotient and remainder stay integral."""
    b = poly_trim(b)
    if not b or b[-1] != 1:
        raise ValueError("divisor must be monic")
    r = poly_trim(a)
    db = len(b) - 1
    if len(r) <= db:
        return [], r
    quot = [0] * (len(r) - db)
    for k in range(len(r) - 1, db - 1, -1):
        c = r[k]
        if c:
            quot[k - db] = c
            for j in range(db + 1):
                r[k - db + j] -= c * b[j]
    return poly_trim(quot), poly_trim(r[:db])


@lru_cache(maxsize=None)
def cyclotomic(s: int) -> tuple[int, ...]:
    """Coefficients of Phi_s, lowest degree first.

    Phi_s = (x^s - 1) / prod_{d | s, d < s} Phi_d, with each division checked exact.
    """
    if s < 1:
        raise ValueError("cyclotomic index must be positive")
    num = [-1] + [0] * (s - 1) + [1]
    for d in range(1, s):
        if s % d == 0:
            num, rem = poly_divmod(num, cyclotomic(d))
            if rem:
                raise ArithmeticError(f"Phi_{d} does not divide x^{s} - 1 exactly")
    return tuple(num)


def poly_eval(a: Sequence[int], x: int) -> int:
    out = 0
    for c in reversed(a):
        out = out * x + c
    return out


def fold(coeffs: Sequence[int] | dict, m: int) -> list[int]:
    """Reduce a polynomial modulo x^m - 1."""
    out = [0] * m
    items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
    for e, a in items:
        out[e % m] += a
    return out


def cyclotomic_divides(coeffs: Sequence[int] | dict, s: int) -> bool:
    """Exact test of Phi_s | A(x). Folding mod x^s - 1 first keeps degrees below s."""
    _, rem = poly_divmod(fold(coeffs, s), cyclotomic(s))
    return not rem


# -- vanishing predicates ---------------------------------------------------------


def _classes_constant(a: Sequence[int], m: int, p: int) -> bool:
    step = m // p
    for k in range(step):
        v = a[k]
        for j in range(1, p):
            if a[k + j * step] != v:
                return False
    return True


def vanishes_prime_power(v: ExponentVector) -> bool:
    """sum a_e omega_{p^n}^e == 0, by the class criterion."""
    pk = prime_power(v.m)
    if pk is None:
        raise ValueError(f"order {v.m} is not a prime power")
    return _classes_constant(v.coeffs, v.m, pk[0])


def vanishes_by_remainder(v: ExponentVector) -> bool:
    """sum a_e omega_m^e == 0 iff Phi_m divides sum a_e x^e (any m)."""
    if v.m == 1:
        return v.coeffs[0] == 0
    return cyclotomic_divides(v.coeffs, v.m)


def vanishes(v: ExponentVector) -> bool:
    if v.m == 1:
        return v.coeffs[0] == 0
    pk = prime_power(v.m)
    if pk is not None:
        return _classes_constant(v.coeffs, v.m, pk[0])
    return cyclotomic_divides(v.coeffs, v.m)


def fold_character(G: GroupSpec, A: Iterable[Element], g: Element) -> ExponentVector:
    """The sum of chi_g over A as an exponent vector of order ord(g).

    chi_g takes values in the ord(g)-th roots of unity, so
    sum_x omega_L^{e(x)} = sum_x omega_m^{e(x) / (L/m)} with m = ord(g).
    """
    L = G.exponent
    m = G.element_order(g)
    scale = L // m
    weights = [a * (L // n) for a, n in zip(g, G.factors)]
    counts = [0] * m
    for x in A:
        e = sum(w * c for w, c in zip(weights, x)) % L
        counts[e // scale] += 1
    return ExponentVector(m, tuple(counts))


def vanishes_at(G: GroupSpec, A: Iterable[Element], g: Element) -> bool:
    """Exact verdict on hat(1_A)(g) == 0 (A may be a multiset)."""
    return vanishes(fold_character(G, A, g))


def character_sum(G: GroupSpec, A: Iterable[Element], g: Element) -> complex:
    """Floating-point hat(1_A)(g); diagnostics only."""
    L = G.exponent
    return sum(cmath.exp(2j * math.pi * character_exponent(G, g, x) / L) for x in A)


# -- zero sets -------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroSet:
    group: GroupSpec
    members: frozenset[Element]

    def __contains__(self, g) -> bool:
        return g in self.members

    def __len__(self):
        return len(self.members)

    def sorted(self) -> list[Element]:
        return sorted(self.members)

    def to_json(self) -> list:
        return self.group.encode_set(self.members)


def zero_set(
    G: GroupSpec,
    A: Iterable[Element],
    *,
    bound: int = DEFAULT_ORDER_BOUND,
    use_orbits: bool = False,
) -> ZeroSet:
    """Nonzero characters at which hat(1_A) vanishes.

    With ``use_orbits`` (Z_{p^n} x Z_p only) one character per unit-scaling
    orbit is tested and the verdict spread over the orbit.
    """
    G.check_bound(bound)
    A = list(A)
    if use_orbits:
        members: set[Element] = set()
        for rep in orbit_representatives(G):
            if vanishes_at(G, A, rep):
                members |= unit_orbit(G, rep)
        return ZeroSet(G, frozenset(members))
    return ZeroSet(G, frozenset(g for g in G.nonzero_elements() if vanishes_at(G, A, g)))


def translation_invariance_check(G: GroupSpec, A: Iterable[Element], g: Element) -> bool:
    A = list(A)
    return zero_set(G, A) == zero_set(G, [G.add(a, g) for a in A])


def unit_scaling_closure_check(G: GroupSpec, A: Iterable[Element]) -> bool:
    Z = zero_set(G, A)
    units = G.units()
    return all(G.multiple(r, g) in Z for g in Z.members for r in units)


@dataclass(frozen=True)
class SliceReport:
    h: Element
    slices: dict  # s -> frozenset of H-elements
    verdicts: dict  # s -> bool

    @property
    def holds(self) -> bool:
        return all(self.verdicts.values())


def slice_zeros(G: GroupSpec, A: Iterable[Element], h) -> SliceReport:
    """If (h, s) is a zero of A for every s, then h is a zero of every slice A_s.

    G is split as H x S with S the last cyclic factor. Raises ValueError naming
    the first s where the hypothesis fails, and TheoremFalsified if the
    hypothesis holds but some slice sum does not vanish.
    """
    if len(G.factors) < 2:
        raise ValueError("slice_zeros needs a product group")
    A = list(A)
    h = tuple(h) if not isinstance(h, int) else (h,)
    H = G.factors[:-1]
    h = tuple(c % m for c, m in zip(h, H))
    S = G.factors[-1]
    for s in range(S):
        if not vanishes_at(G, A, h + (s,)):
            raise ValueError(f"hypothesis fails at s={s}: {h + (s,)} is not a zero of A")
    slices = {s: frozenset(x[:-1] for x in A if x[-1] == s) for s in range(S)}
    Lh = math.lcm(*H)
    verdicts = {}
    for s, As in slices.items():
        weights = [a * (Lh // m) for a, m in zip(h, H)]
        v = ExponentVector.from_exponents((sum(w * c for w, c in zip(weights, x)) for x in As), Lh)
        verdicts[s] = vanishes(v)
    report = SliceReport(h, slices, verdicts)
    if not report.holds:
        raise TheoremFalsified("slice propagation", f"h={h}", report)
    return report


def decompose_vanishing_sum(C: Iterable[int], p: int, n: int) -> list[tuple[int, ...]]:
    """Split a vanishing multiset into p-element vanishing blocks.

    Each block is {r, r + p^{n-1}, ..., r + (p-1) p^{n-1}} mod p^n. Blocks are
    taken from the smallest available residue first, and each block uses the
    smallest remaining original value of each residue. Values are returned as
    given (not reduced), blocks sorted ascending.
    """
    pn = p**n
    step = pn // p
    C = list(C)
    pool: dict[int, list[int]] = {}
    for c in sorted(C):
        pool.setdefault(c % pn, []).append(c)
    v = ExponentVector(pn, tuple(len(pool.get(e, ())) for e in range(pn)))
    if not _classes_constant(v.coeffs, pn, p):
        raise ValueError("sum of omega^c over C does not vanish")
    for vals in pool.values():
        vals.reverse()  # pop() yields the smallest
    blocks = []
    for k in range(step):
        while pool.get(k):
            blocks.append(tuple(sorted(pool[k + j * step].pop() for j in range(p))))
    assert Counter(c for b in blocks for c in b) == Counter(C)
    return blocks
