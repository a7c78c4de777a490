"""Digit trees of subsets of Z_{p^n} and p-homogeneity.

Level convention used throughout the package: level i is the digit t_i of
c = sum t_i p^i (least significant digit is level 0). A vertex at level i is
a residue mod p^i; its children are the residues mod p^{i+1} above it.

Translation table between the ways levels get indexed:

    digit level i   <->  spectral index j = i + 1 (zero of sum omega_{p^j}^c)
                    <->  frequency p^(n-1-i) in Z_{p^n}
                    <->  zero index n-1-i in I_Omega (character (p^(n-1-i), 0))

:func:`branch_levels_from_zero_indices` is the one place the last line is
implemented.
"""

from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator

from homotiles.charsums import ExponentVector, vanishes_prime_power
from homotiles.errors import BudgetExceeded, TheoremFalsified

DEFAULT_ENUM_BUDGET = 10**6


def digits(x: int, p: int, n: int) -> tuple[int, ...]:
    if not 0 <= x < p**n:
        raise ValueError(f"{x} is not a residue mod {p}^{n}")
    out = []
    for _ in range(n):
        x, t = divmod(x, p)
        out.append(t)
    return tuple(out)


def from_digits(ts: Iterable[int], p: int) -> int:
    return sum(t * p**i for i, t in enumerate(ts))


def branch_levels_from_zero_indices(indices: Iterable[int], n: int) -> frozenset[int]:
    """Branch levels n-1-i for the zero indices i (characters (p^i, 0) or p^i)."""
    return frozenset(n - 1 - i for i in indices)


@dataclass(frozen=True)
class BranchLevelSet:
    levels: frozenset[int]

    def __len__(self):
        return len(self.levels)

    def __bool__(self):
        # truthy even when empty, so `if homogeneity(...)` means "is homogeneous"
        return True

    def complement(self, n: int) -> frozenset[int]:
        return frozenset(range(n)) - self.levels

    def to_json(self) -> list[int]:
        return sorted(self.levels)


@dataclass(frozen=True)
class NotHomogeneous:
    level: int
    vertex: int
    descendants: int

    def __bool__(self):
        return False


@dataclass(frozen=True)
class DigitTree:
    """T_C: vertex set C mod p^gamma at each level gamma = 0..n."""

    p: int
    n: int
    levels: tuple[tuple[int, ...], ...]

    @classmethod
    def of(cls, C: Iterable[int], p: int, n: int) -> DigitTree:
        pn = p**n
        C = {c % pn for c in C}
        return cls(p, n, tuple(tuple(sorted({c % p**g for c in C})) for g in range(n + 1)))

    def children(self, level: int, vertex: int) -> list[int]:
        mod = self.p**level
        return [u for u in self.levels[level + 1] if u % mod == vertex]

    def edges(self) -> list[tuple[int, int, int]]:
        """(level, parent, child) triples."""
        out = []
        for g in range(self.n):
            mod = self.p**g
            out.extend((g, u % mod, u) for u in self.levels[g + 1])
        return out

    def internal_vertex_count(self) -> int:
        return sum(len(v) for v in self.levels[:-1])

    def branching_levels(self) -> list[int]:
        """Levels where at least one vertex has more than one child."""
        out = []
        for g in range(self.n):
            mod = self.p**g
            counts = Counter(u % mod for u in self.levels[g + 1])
            if any(c > 1 for c in counts.values()):
                out.append(g)
        return out

    def to_dot(self, edge_colors: dict | None = None, name: str = "T") -> str:
        """Graphviz text. Vertices are "level:residue"; edges leaving a branch level are bold.

        ``edge_colors`` maps (level, child) to a color name and overrides the default.
        """
        branch = set(self.branching_levels())
        lines = [f"digraph {name} {{", "  rankdir=TB;", "  node [shape=circle, fontsize=10];"]
        for g, verts in enumerate(self.levels):
            shape = "doublecircle" if g == self.n else "circle"
            for v in verts:
                lines.append(f'  "{g}:{v}" [label="{v}", shape={shape}];')
        for g in range(self.n + 1):
            ids = " ".join(f'"{g}:{v}"' for v in self.levels[g])
            lines.append(f"  {{ rank=same; {ids} }}")
        for g, parent, child in self.edges():
            attrs = []
            if g in branch:
                attrs.append("style=bold")
            if edge_colors and (g, child) in edge_colors:
                attrs.append(f"color={edge_colors[(g, child)]}")
            attr = f" [{', '.join(attrs)}]" if attrs else ""
            lines.append(f'  "{g}:{parent}" -> "{g + 1}:{child}"{attr};')
        lines.append("}")
        return "\n".join(lines) + "\n"

    def to_ascii(self) -> str:
        branch = set(self.branching_levels())
        out = []

        def walk(g: int, v: int, prefix: str):
            kids = self.children(g, v)
            for i, u in enumerate(kids):
                last = i == len(kids) - 1
                mark = "*" if g in branch else " "
                out.append(f"{prefix}{'`-' if last else '|-'}{mark}{u}")
                if g + 1 < self.n:
                    walk(g + 1, u, prefix + ("   " if last else "|  "))

        out.append("root")
        if self.n:
            walk(0, 0, "")
        return "\n".join(out) + "\n"


def homogeneity(C: Iterable[int], p: int, n: int) -> BranchLevelSet | NotHomogeneous:
    """Branch level set of C, or the first level/vertex where the tree is mixed."""
    pn = p**n
    C = [c % pn for c in C]
    if not C:
        raise ValueError("homogeneity of the empty set is undefined")
    if len(set(C)) != len(C):
        raise ValueError("homogeneity needs a set; got repeated elements")
    levels = set()
    mod = 1
    for i in range(n):
        nxt = mod * p
        kids: dict[int, set[int]] = {}
        for c in C:
            kids.setdefault(c % mod, set()).add(c % nxt)
        counts = {v: len(k) for v, k in kids.items()}
        first = counts[min(counts)]
        if first not in (1, p):
            return NotHomogeneous(i, min(counts), first)
        for v in sorted(counts):
            if counts[v] != first:
                return NotHomogeneous(i, v, counts[v])
        if first == p:
            levels.add(i)
        mod = nxt
    return BranchLevelSet(frozenset(levels))


def is_homogeneous(C: Iterable[int], p: int, n: int) -> bool:
    return isinstance(homogeneity(C, p, n), BranchLevelSet)


@dataclass(frozen=True)
class SpectralVerdict:
    """Outcome of the spectral route to homogeneity for claimed levels j_1 < ... < j_k."""

    claimed: tuple[int, ...]
    size_ok: bool
    vanishing: dict  # j -> bool
    levels: frozenset[int] | None  # branch set when the hypotheses hold

    @property
    def holds(self) -> bool:
        return self.size_ok and all(self.vanishing.values())


def spectral_homogeneity_check(C: Iterable[int], p: int, n: int, js: Iterable[int]) -> SpectralVerdict:
    """Check sum_{c in C} omega_{p^j}^c = 0 for each claimed j, and |C| <= p^k.

    When these hold, C must be a set of size p^k whose tree has branch set
    {j - 1}; a mismatch with :func:`homogeneity` raises TheoremFalsified.
    """
    pn = p**n
    js = tuple(sorted(set(js)))
    if any(not 1 <= j <= n for j in js):
        raise ValueError(f"levels {js} must lie in 1..{n}")
    C = [c % pn for c in C]
    k = len(js)
    size_ok = len(C) <= p**k
    vanishing = {}
    for j in js:
        v = ExponentVector.from_exponents((c * p ** (n - j) for c in C), pn)
        vanishing[j] = vanishes_prime_power(v)
    if not (size_ok and all(vanishing.values())):
        return SpectralVerdict(js, size_ok, vanishing, None)
    expected = frozenset(j - 1 for j in js)
    if len(C) != p**k or len(set(C)) != len(C):
        raise TheoremFalsified("spectral homogeneity", f"|C|={len(C)} with hypotheses met for k={k}", C)
    found = homogeneity(C, p, n)
    if not isinstance(found, BranchLevelSet) or found.levels != expected:
        raise TheoremFalsified("spectral homogeneity", f"tree gives {found}, spectrum gives {sorted(expected)}", C)
    return SpectralVerdict(js, size_ok, vanishing, expected)


Chooser = Callable[[int, int], int]


def generate_homogeneous(p: int, n: int, I: Iterable[int], chooser: Chooser | None = None) -> frozenset[int]:
    """The T_I-form set whose J-level digits are picked by chooser(level, vertex).

    ``vertex`` is the residue mod p^level of the path so far. The default
    chooser always picks digit 0.
    """
    I = frozenset(I)
    if not I <= frozenset(range(n)):
        raise ValueError(f"levels {sorted(I)} must lie in 0..{n - 1}")
    verts = [0]
    for i in range(n):
        step = p**i
        if i in I:
            verts = [v + t * step for v in verts for t in range(p)]
        else:
            nxt = []
            for v in verts:
                t = chooser(i, v) if chooser else 0
                if not 0 <= t < p:
                    raise ValueError(f"chooser gave digit {t} at level {i}")
                nxt.append(v + t * step)
            verts = nxt
    return frozenset(verts)


def count_homogeneous(p: int, n: int, I: Iterable[int]) -> int:
    """Number of T_I-form sets: at each J level every current vertex picks a digit."""
    I = frozenset(I)
    total, width = 1, 1
    for i in range(n):
        if i in I:
            width *= p
        else:
            total *= p**width
    return total


def enumerate_homogeneous(p: int, n: int, I: Iterable[int], budget: int = DEFAULT_ENUM_BUDGET) -> Iterator[frozenset[int]]:
    I = frozenset(I)
    count = count_homogeneous(p, n, I)
    if count > budget:
        raise BudgetExceeded(count, budget)
    return _enumerate(p, n, I)


def _enumerate(p: int, n: int, I: frozenset[int]) -> Iterator[frozenset[int]]:
    def rec(i: int, verts: list[int]):
        if i == n:
            yield frozenset(verts)
            return
        step = p**i
        if i in I:
            yield from rec(i + 1, [v + t * step for v in verts for t in range(p)])
        else:
            for choice in itertools.product(range(p), repeat=len(verts)):
                yield from rec(i + 1, [v + t * step for v, t in zip(verts, choice)])

    yield from rec(0, [0])


def tree_json(C: Iterable[int], p: int, n: int) -> dict:
    return {"p": p, "n": n, "set": sorted({c % p**n for c in C})}
