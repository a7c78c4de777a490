"""The three group families, their characters, and the plane geometry of Z_{p^n} x Z_p.

Elements are plain tuples of reduced residues, one per cyclic factor. For the
cyclic family ``pn`` they are 1-tuples; :meth:`GroupSpec.element` also accepts
a bare int there.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

Element = tuple[int, ...]

DEFAULT_ORDER_BOUND = 10**6

FAMILIES = ("pn", "pnq", "pnp")


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    f = 3
    while f * f <= k:
        if k % f == 0:
            return False
        f += 2
    return True


def prime_power(m: int) -> tuple[int, int] | None:
    """Return (p, k) with m == p**k and k >= 1, or None."""
    if m < 2:
        return None
    p = 2
    while p * p <= m and m % p:
        p += 1
    if m % p:
        p = m
    k = 0
    while m % p == 0:
        m //= p
        k += 1
    return (p, k) if m == 1 else None


def factorize(m: int) -> dict[int, int]:
    out: dict[int, int] = {}
    d = 2
    while d * d <= m:
        while m % d == 0:
            out[d] = out.get(d, 0) + 1
            m //= d
        d += 1
    if m > 1:
        out[m] = out.get(m, 0) + 1
    return out


@dataclass(frozen=True)
class GroupSpec:
    """Z_{p^n} (``pn``), Z_{p^n} x Z_q (``pnq``) or Z_{p^n} x Z_p (``pnp``)."""

    family: str
    p: int
    n: int
    q: int | None = None
    factors: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if self.n < 1:
            raise ValueError("n must be at least 1")
        pn = self.p**self.n
        if self.family == "pn":
            if self.q is not None:
                raise ValueError("family pn takes no q")
            factors: tuple[int, ...] = (pn,)
        elif self.family == "pnq":
            if self.q is None or not is_prime(self.q):
                raise ValueError(f"q={self.q} is not prime")
            if self.q == self.p:
                raise ValueError("family pnq needs q != p; use pnp")
            factors = (pn, self.q)
        else:
            if self.q not in (None, self.p):
                raise ValueError("family pnp takes no q")
            object.__setattr__(self, "q", None)
            factors = (pn, self.p)
        object.__setattr__(self, "factors", factors)

    @classmethod
    def cyclic(cls, p: int, n: int) -> GroupSpec:
        return cls("pn", p, n)

    @classmethod
    def pnq(cls, p: int, n: int, q: int) -> GroupSpec:
        return cls("pnq", p, n, q)

    @classmethod
    def pnp(cls, p: int, n: int) -> GroupSpec:
        return cls("pnp", p, n)

    def __str__(self):
        return " x ".join(f"Z_{m}" for m in self.factors)

    # -- sizes -----------------------------------------------------------

    @property
    def pn(self) -> int:
        return self.factors[0]

    @cached_property
    def order(self) -> int:
        return math.prod(self.factors)

    @cached_property
    def exponent(self) -> int:
        """Lcm of the factor orders; characters take values in the L-th roots of unity."""
        return math.lcm(*self.factors)

    def check_bound(self, bound: int = DEFAULT_ORDER_BOUND) -> None:
        if self.order > bound:
            raise ValueError(f"group {self} has {self.order} elements, bound is {bound}")

    # -- elements --------------------------------------------------------

    @property
    def zero(self) -> Element:
        return (0,) * len(self.factors)

    def element(self, x) -> Element:
        if isinstance(x, int):
            if len(self.factors) != 1:
                raise ValueError(f"bare integer {x} given for non-cyclic group {self}")
            return (x % self.factors[0],)
        x = tuple(x)
        if len(x) != len(self.factors):
            raise ValueError(f"element {x} does not match group {self}")
        return tuple(int(c) % m for c, m in zip(x, self.factors))

    def subset(self, xs: Iterable) -> frozenset[Element]:
        return frozenset(self.element(x) for x in xs)

    def elements(self) -> list[Element]:
        return list(itertools.product(*(range(m) for m in self.factors)))

    def nonzero_elements(self) -> list[Element]:
        return self.elements()[1:]

    def index(self, x: Element) -> int:
        i = 0
        for c, m in zip(x, self.factors):
            i = i * m + c
        return i

    def from_index(self, i: int) -> Element:
        out = []
        for m in reversed(self.factors):
            i, c = divmod(i, m)
            out.append(c)
        return tuple(reversed(out))

    def add(self, x: Element, y: Element) -> Element:
        return tuple((a + b) % m for a, b, m in zip(x, y, self.factors))

    def sub(self, x: Element, y: Element) -> Element:
        return tuple((a - b) % m for a, b, m in zip(x, y, self.factors))

    def neg(self, x: Element) -> Element:
        return tuple(-a % m for a, m in zip(x, self.factors))

    def multiple(self, k: int, x: Element) -> Element:
        """k*x coordinatewise (the integer action, any k)."""
        return tuple(k * a % m for a, m in zip(x, self.factors))

    def translate(self, A: Iterable[Element], g: Element) -> frozenset[Element]:
        return frozenset(self.add(a, g) for a in A)

    def difference_set(self, A: Iterable[Element]) -> frozenset[Element]:
        A = list(A)
        return frozenset(self.sub(a, b) for a in A for b in A)

    def element_order(self, x: Element) -> int:
        return math.lcm(*(m // math.gcd(c, m) for c, m in zip(x, self.factors)))

    def units(self) -> list[int]:
        """Residues r mod L with gcd(r, |G|) = 1; these give every unit scalar action."""
        L = self.exponent
        return [r for r in range(1, L) if math.gcd(r, L) == 1]

    # -- JSON ------------------------------------------------------------

    def to_json(self) -> dict:
        d = {"family": self.family, "p": self.p, "n": self.n}
        if self.family == "pnq":
            d["q"] = self.q
        return d

    @classmethod
    def from_json(cls, d: dict) -> GroupSpec:
        try:
            return cls(d["family"], int(d["p"]), int(d["n"]), d.get("q"))
        except KeyError as exc:
            raise ValueError(f"group spec missing field {exc}") from None

    def encode_element(self, x: Element):
        return x[0] if self.family == "pn" else list(x)

    def encode_set(self, A: Iterable[Element]) -> list:
        return [self.encode_element(x) for x in sorted(A)]


# -- CRT ---------------------------------------------------------------------


def _check_crt(p: int, n: int, q: int) -> int:
    if not is_prime(p) or not is_prime(q):
        raise ValueError(f"p={p} and q={q} must both be prime")
    if p == q:
        raise ValueError("CRT split needs p != q")
    return p**n


def crt_split(x: int, p: int, n: int, q: int) -> Element:
    """Image of x in Z_{p^n q} under Z_{p^n q} -> Z_{p^n} x Z_q."""
    pn = _check_crt(p, n, q)
    if not 0 <= x < pn * q:
        raise ValueError(f"{x} is not a residue mod {pn * q}")
    return (x % pn, x % q)


def crt_join(x: Sequence[int], p: int, n: int, q: int) -> int:
    pn = _check_crt(p, n, q)
    a, b = x[0] % pn, x[1] % q
    # a + pn*k = b (mod q)
    k = (b - a) * pow(pn, -1, q) % q
    return a + pn * k


# -- characters ----------------------------------------------------------------


def character_exponent(G: GroupSpec, g: Element, x: Element) -> int:
    """e with chi_g(x) = exp(2 pi i e / L), L = G.exponent."""
    if len(g) != len(G.factors) or len(x) != len(G.factors):
        raise ValueError(f"elements {g}, {x} are not in {G}")
    L = G.exponent
    return sum(a * b * (L // m) for a, b, m in zip(g, x, G.factors)) % L


# -- planes in Z_{p^n} x Z_p ---------------------------------------------------


def _require_pnp(G: GroupSpec) -> None:
    if G.family != "pnp":
        raise ValueError(f"operation needs a Z_(p^n) x Z_p group, got {G}")


def inner_product(G: GroupSpec, x: Element, y: Element) -> int:
    _require_pnp(G)
    pn = G.pn
    return (x[0] * y[0] + (pn // G.p) * x[1] * y[1]) % pn


def scalar_mul(G: GroupSpec, r: int, d: Element) -> Element:
    _require_pnp(G)
    if math.gcd(r, G.p) != 1:
        raise ValueError(f"{r} is not a unit mod {G.pn}")
    return (r * d[0] % G.pn, r * d[1] % G.p)


@dataclass(frozen=True)
class Plane:
    direction: Element
    offset: int
    members: frozenset[Element]


def plane(G: GroupSpec, d: Element, t: int) -> Plane:
    """H(d, t) = {x : <x, d> = t}."""
    _require_pnp(G)
    d = G.element(d)
    t %= G.pn
    members = frozenset(x for x in G.elements() if inner_product(G, x, d) == t)
    return Plane(d, t, members)


def unit_orbit(G: GroupSpec, d: Element) -> frozenset[Element]:
    _require_pnp(G)
    return frozenset(scalar_mul(G, r, d) for r in range(1, G.pn) if r % G.p)


def _normal_form(G: GroupSpec, d: Element) -> bool:
    if d[0] == 0:
        return d[1] == 1
    return d[0] < G.pn and G.pn % d[0] == 0


def orbit_representatives(G: GroupSpec) -> list[Element]:
    """One representative per orbit of nonzero elements under unit scaling.

    Orbits are found by brute force; the representative is the orbit's member
    of the shape (p^i, b) with 0 <= i < n, or (0, 1).
    """
    _require_pnp(G)
    seen: set[Element] = set()
    reps = []
    for x in G.nonzero_elements():
        if x in seen:
            continue
        orbit = unit_orbit(G, x)
        seen |= orbit
        forms = [y for y in orbit if _normal_form(G, y)]
        if len(forms) != 1:
            raise AssertionError(f"orbit of {x} has normal forms {forms}")
        reps.append(forms[0])
    return sorted(reps)
