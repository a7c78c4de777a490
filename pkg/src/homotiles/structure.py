"""Structure of tiles in Z_{p^n} x Z_q and Z_{p^n} x Z_p.

The classifiers take a tile together with a complement certificate, check
the certificate, and then verify every structural claim about the tile. Any
claim that fails raises TheoremFalsified; for genuine tiles that must never
happen.

Zero indices i (characters (p^i, 0)) turn into branch levels n-1-i; see
:func:`homotiles.ptree.branch_levels_from_zero_indices`.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

from homotiles.charsums import vanishes_at
from homotiles.errors import TheoremFalsified
from homotiles.groups import Element, GroupSpec, inner_product, plane, scalar_mul
from homotiles.ptree import BranchLevelSet, branch_levels_from_zero_indices, homogeneity
from homotiles.tiling import is_tiling_pair


def _p_adic(k: int, p: int) -> tuple[int, int]:
    e = 0
    while k % p == 0:
        k //= p
        e += 1
    return e, k


def _levels(C, p: int, n: int) -> frozenset[int] | None:
    h = homogeneity(C, p, n)
    return h.levels if isinstance(h, BranchLevelSet) else None


def _fmt(levels) -> str:
    return "not homogeneous" if levels is None else str(sorted(levels))


def i_omega(G: GroupSpec, omega) -> frozenset[int]:
    """{0 <= i < n : (p^i, 0) is a zero of omega}."""
    if G.family not in ("pnq", "pnp"):
        raise ValueError(f"I_Omega is defined for product groups, got {G}")
    omega = [G.element(x) for x in omega]
    return frozenset(i for i in range(G.n) if vanishes_at(G, omega, (G.p**i, 0)))


def slices(G: GroupSpec, omega) -> dict[int, frozenset[int]]:
    """Omega_j = {x : (x, j) in Omega} for every j in the second factor."""
    out = {j: set() for j in range(G.factors[1])}
    for x, j in omega:
        out[j].add(x)
    return {j: frozenset(v) for j, v in out.items()}


def _certify(G: GroupSpec, omega, T, verify: bool) -> tuple[frozenset[Element], frozenset[Element]]:
    omega = G.subset(omega)
    T = G.subset(T)
    if verify and not is_tiling_pair(G, omega, T).holds:
        raise ValueError("certificate does not tile: (omega, T) is not a tiling pair")
    return omega, T


# -- Z_{p^n} x Z_q ------------------------------------------------------------------


@dataclass(frozen=True)
class CardinalityVerdict:
    t: int
    with_q: bool
    i_omega: frozenset[int]
    i_t: frozenset[int]


def cardinality_lemma_check(G: GroupSpec, omega, T, verify: bool = True) -> CardinalityVerdict:
    """|omega| = p^t or p^t q, |I_omega| = t, and I_omega, I_T partition {0..n-1}."""
    if G.family != "pnq":
        raise ValueError(f"needs a Z_(p^n) x Z_q group, got {G}")
    omega, T = _certify(G, omega, T, verify)
    t, rest = _p_adic(len(omega), G.p)
    if rest not in (1, G.q):
        raise TheoremFalsified("tile size", f"|omega|={len(omega)} is neither p^t nor p^t q", omega)
    io, it = i_omega(G, omega), i_omega(G, T)
    verdict = CardinalityVerdict(t, rest == G.q, io, it)
    if len(io) != t or len(it) != G.n - t or io & it or (io | it) != frozenset(range(G.n)):
        raise TheoremFalsified("zero index cardinality", f"t={t}, I_omega={sorted(io)}, I_T={sorted(it)}", verdict)
    return verdict


@dataclass(frozen=True)
class Main1Report:
    group: GroupSpec
    omega: frozenset[Element]
    complement: frozenset[Element]
    m: int
    with_q: bool
    slices: dict
    i_omega: frozenset[int]
    case: int
    union: frozenset[int] | None = None  # case 1
    union_levels: frozenset[int] | None = None
    slice_levels: frozenset[int] | None = None  # case 2, the common branch set

    def to_json(self) -> dict:
        G = self.group
        d = {
            "group": G.to_json(),
            "omega": G.encode_set(self.omega),
            "complement": G.encode_set(self.complement),
            "size": len(self.omega),
            "m": self.m,
            "times_q": self.with_q,
            "case": self.case,
            "I_omega": sorted(self.i_omega),
            "slices": {str(j): sorted(s) for j, s in self.slices.items()},
        }
        if self.case == 1:
            d["union"] = sorted(self.union)
            d["branch_levels"] = sorted(self.union_levels)
        else:
            d["branch_levels"] = sorted(self.slice_levels)
        return d


def classify_tile_pq(G: GroupSpec, omega, T, verify: bool = True) -> Main1Report:
    """Structure of a tile of Z_{p^n} x Z_q.

    |omega| = p^m: the slices are pairwise disjoint and their union is
    p-homogeneous. |omega| = p^m q: every slice has p^m elements and all
    slices are p-homogeneous with one common branch set. In both cases the
    branch set is n-1-I_omega.
    """
    if G.family != "pnq":
        raise ValueError(f"needs a Z_(p^n) x Z_q group, got {G}")
    omega, T = _certify(G, omega, T, verify)
    p, n = G.p, G.n
    card = cardinality_lemma_check(G, omega, T, verify=False)
    m = card.t
    sl = slices(G, omega)
    expected = branch_levels_from_zero_indices(card.i_omega, n)
    if not card.with_q:
        union = frozenset().union(*sl.values())
        if sum(len(s) for s in sl.values()) != len(union):
            raise TheoremFalsified("main1 case 1", "slices overlap", omega)
        levels = _levels(union, p, n)
        if levels is None:
            raise TheoremFalsified("main1 case 1", "union of slices is not p-homogeneous", omega)
        if levels != expected:
            raise TheoremFalsified("main1 case 1", f"branch set {_fmt(levels)} != n-1-I = {sorted(expected)}", omega)
        return Main1Report(G, omega, T, m, False, sl, card.i_omega, 1, union=union, union_levels=levels)
    per = {}
    for j, s in sl.items():
        if len(s) != p**m:
            raise TheoremFalsified("main1 case 2", f"|Omega_{j}|={len(s)} != p^{m}", omega)
        per[j] = _levels(s, p, n)
    if len(set(per.values())) != 1 or None in per.values():
        raise TheoremFalsified("main1 case 2", f"slice branch sets {{{', '.join(f'{j}: {_fmt(v)}' for j, v in per.items())}}}", omega)
    common = per[0]
    if common != expected:
        raise TheoremFalsified("main1 case 2", f"branch set {sorted(common)} != n-1-I = {sorted(expected)}", omega)
    return Main1Report(G, omega, T, m, True, sl, card.i_omega, 2, slice_levels=common)


# -- Z_{p^n} x Z_p --------------------------------------------------------------------


def gamma_omega(G: GroupSpec, omega) -> tuple[int, int]:
    """(j0, b0): least j in {0..n} \\ I_omega with (p^j, b) a zero for some b != 0, and the least such b.

    p^n is read as 0. Only defined when |omega| = p^t and |I_omega| = t - 1.
    """
    if G.family != "pnp":
        raise ValueError(f"needs a Z_(p^n) x Z_p group, got {G}")
    omega = [G.element(x) for x in omega]
    p, n = G.p, G.n
    t, rest = _p_adic(len(omega), p)
    io = i_omega(G, omega)
    if rest != 1 or len(io) != t - 1:
        raise ValueError(f"gamma needs |omega| = p^t and |I_omega| = t-1; got |omega|={len(omega)}, I={sorted(io)}")
    for j in range(n + 1):
        if j in io:
            continue
        for b in range(1, p):
            if vanishes_at(G, omega, (p**j % G.pn, b)):
                return j, b
    raise TheoremFalsified("gamma well defined", "no zero (p^j, b) with b != 0 outside I_omega", omega)


@dataclass(frozen=True)
class Main2Report:
    group: GroupSpec
    omega: frozenset[Element]
    complement: frozenset[Element]
    t: int
    i_omega: frozenset[int]
    case: int
    projection: frozenset[int] | None = None  # case 1
    projection_levels: frozenset[int] | None = None
    slices: dict | None = None  # case 2
    slice_levels: frozenset[int] | None = None
    gamma: tuple[int, int] | None = None  # cases 2 and 3
    omega_tilde: tuple[int, ...] | None = None  # case 3
    tilde_levels: frozenset[int] | None = None
    fibers: dict = field(default=None)  # case 3: (x mod fiber_modulus, y) -> set
    fiber_levels: frozenset[int] | None = None
    fiber_modulus: int | None = None
    printed_fibers_hold: bool | None = None  # same check at modulus p^(n-j0-1)

    def to_json(self) -> dict:
        G = self.group
        d = {
            "group": G.to_json(),
            "omega": G.encode_set(self.omega),
            "complement": G.encode_set(self.complement),
            "t": self.t,
            "I_omega": sorted(self.i_omega),
            "case": self.case,
        }
        if self.gamma is not None:
            d["gamma"] = {"j0": self.gamma[0], "b0": self.gamma[1]}
        if self.case == 1:
            d["projection"] = sorted(self.projection)
            d["branch_levels"] = sorted(self.projection_levels)
        elif self.case == 2:
            d["slices"] = {str(b): sorted(s) for b, s in self.slices.items()}
            d["branch_levels"] = sorted(self.slice_levels)
        else:
            d["omega_tilde"] = list(self.omega_tilde)
            d["tilde_branch_levels"] = sorted(self.tilde_levels)
            d["fibers"] = [
                {"residue": r, "y": y, "set": sorted(s)} for (r, y), s in sorted(self.fibers.items())
            ]
            d["fiber_branch_levels"] = sorted(self.fiber_levels)
            d["fiber_modulus"] = self.fiber_modulus
            d["printed_fibers_hold"] = self.printed_fibers_hold
        return d


def _fibers(omega, modulus: int) -> dict[tuple[int, int], set[int]]:
    out: dict[tuple[int, int], set[int]] = {}
    for x, y in omega:
        out.setdefault((x % modulus, y), set()).add(x)
    return out


def classify_tile_pp(G: GroupSpec, omega, T, verify: bool = True, printed_modulus: bool = False) -> Main2Report:
    """Structure of a tile of Z_{p^n} x Z_p with |omega| = p^t.

    case 1, |I| = t: the projection to Z_{p^n} is a p-homogeneous set of size p^t.
    case 2, |I| = t-1 and gamma = n: every slice is p-homogeneous with branch set n-1-I.
    case 3, |I| = t-1 and gamma = j0 < n: the sheared set x + b0 y p^(n-j0-1) is a
    p-homogeneous set of size p^t with branch set n-1-(I + {j0}), and the fibers
    {x' : (x', y) in omega, x' = x mod p^(n-j0)} share branch set n-1-{i in I : i < j0}.

    The fibers are cut modulo p^(n-j0), the residue a plane H((p^j0, b0), k)
    fixes inside one y-slice. The published statement cuts them modulo
    p^(n-j0-1), which fails already for {(0,0),(0,1),(1,0),(3,0)} in Z_4 x Z_2;
    that reading is checked on every case-3 tile and stored in
    ``printed_fibers_hold``, and ``printed_modulus=True`` makes it fatal.
    """
    if G.family != "pnp":
        raise ValueError(f"needs a Z_(p^n) x Z_p group, got {G}")
    omega, T = _certify(G, omega, T, verify)
    p, n, pn = G.p, G.n, G.pn
    t, rest = _p_adic(len(omega), p)
    if rest != 1:
        raise TheoremFalsified("tile size", f"|omega|={len(omega)} is not a power of p", omega)
    io = i_omega(G, omega)
    if len(io) not in (t - 1, t):
        raise TheoremFalsified("zero index cardinality", f"|I_omega|={len(io)} for t={t}", omega)

    if len(io) == t:
        proj = [x for x, _ in omega]
        if len(set(proj)) != len(proj):
            raise TheoremFalsified("main2 case 1", "projection has repeated points", omega)
        levels = _levels(proj, p, n)
        expected = branch_levels_from_zero_indices(io, n)
        if levels is None or levels != expected:
            raise TheoremFalsified("main2 case 1", f"projection branch set {_fmt(levels)}, expected {sorted(expected)}", omega)
        return Main2Report(G, omega, T, t, io, 1, projection=frozenset(proj), projection_levels=levels)

    j0, b0 = gamma_omega(G, omega)
    if j0 == n:
        expected = branch_levels_from_zero_indices(io, n)
        sl = slices(G, omega)
        for b, s in sl.items():
            if len(s) != p ** (t - 1):
                raise TheoremFalsified("main2 case 2", f"|Omega_{b}|={len(s)} != p^{t - 1}", omega)
            levels = _levels(s, p, n)
            if levels != expected:
                raise TheoremFalsified("main2 case 2", f"slice {b} branch set {_fmt(levels)}, expected {sorted(expected)}", omega)
        return Main2Report(G, omega, T, t, io, 2, slices=sl, slice_levels=expected, gamma=(j0, b0))

    shear = p ** (n - j0 - 1)
    tilde = sorted((x + b0 * y * shear) % pn for x, y in omega)
    if len(set(tilde)) != len(tilde):
        dup = [v for v, c in Counter(tilde).items() if c > 1]
        raise TheoremFalsified("main2 case 3", f"sheared set repeats {dup}", omega)
    tilde_expected = branch_levels_from_zero_indices(io | {j0}, n)
    tilde_levels = _levels(tilde, p, n)
    if tilde_levels != tilde_expected:
        raise TheoremFalsified("main2 case 3", f"sheared branch set {_fmt(tilde_levels)}, expected {sorted(tilde_expected)}", omega)
    fiber_expected = branch_levels_from_zero_indices((i for i in io if i < j0), n)
    printed = _fibers(omega, shear)
    printed_ok = all(_levels(s, p, n) == fiber_expected for s in printed.values())
    modulus = shear if printed_modulus else shear * p
    fibers = printed if printed_modulus else _fibers(omega, modulus)
    for key, s in fibers.items():
        levels = _levels(s, p, n)
        if levels != fiber_expected:
            raise TheoremFalsified("main2 case 3", f"fiber {key} branch set {_fmt(levels)}, expected {sorted(fiber_expected)}", omega)
    return Main2Report(
        G, omega, T, t, io, 3,
        gamma=(j0, b0),
        omega_tilde=tuple(tilde),
        tilde_levels=tilde_levels,
        fibers={k: frozenset(v) for k, v in fibers.items()},
        fiber_levels=fiber_expected,
        fiber_modulus=modulus,
        printed_fibers_hold=printed_ok,
    )


# -- equidistribution on planes ---------------------------------------------------------


@dataclass(frozen=True)
class EquidistributionReport:
    direction: Element
    vanishes: bool
    vanishes_for_all_units: bool
    plane_counts: tuple[int, ...]  # |A & H(d, t)| for t = 0..p^n-1
    balanced: bool

    @property
    def consistent(self) -> bool:
        return self.vanishes == self.vanishes_for_all_units == self.balanced


def plane_counts(G: GroupSpec, A, d: Element) -> tuple[int, ...]:
    counts = [0] * G.pn
    for x in A:
        counts[inner_product(G, x, d)] += 1
    return tuple(counts)


def equidistribution_check(G: GroupSpec, A, d) -> EquidistributionReport:
    """hat(1_A)(d) = 0  <=>  hat(1_A)(r d) = 0 for all units r  <=>  A meets the
    planes H(d, t) and H(d, t') equally often whenever t = t' mod p^(n-1)."""
    if G.family != "pnp":
        raise ValueError(f"needs a Z_(p^n) x Z_p group, got {G}")
    A = [G.element(x) for x in A]
    d = G.element(d)
    v = vanishes_at(G, A, d)
    all_units = all(vanishes_at(G, A, scalar_mul(G, r, d)) for r in range(1, G.pn) if r % G.p)
    counts = plane_counts(G, A, d)
    step = G.pn // G.p
    balanced = all(counts[k + j * step] == counts[k] for k in range(step) for j in range(1, G.p))
    report = EquidistributionReport(d, v, all_units, counts, balanced)
    if not report.consistent:
        raise TheoremFalsified("equidistribution", f"d={d}: {v}, {all_units}, {balanced}", report)
    return report


def plane_partition(G: GroupSpec, d) -> list[frozenset[Element]]:
    """The planes H(d, t), t = 0..p^n-1."""
    return [plane(G, d, t).members for t in range(G.pn)]


def zero_chain_length(G: GroupSpec, A) -> int:
    """Largest s with (p^i1, a), (p^i2, 0), ..., (p^is, 0) zeros of A, i1 < ... < is.

    p^s must divide |A|; :func:`check_zero_chain_divisibility` asserts it.
    """
    if G.family != "pnp":
        raise ValueError(f"needs a Z_(p^n) x Z_p group, got {G}")
    A = [G.element(x) for x in A]
    p, n = G.p, G.n
    zero0 = [vanishes_at(G, A, (p**i, 0)) for i in range(n)]
    best = 0
    for i1 in range(n):
        if zero0[i1] or any(vanishes_at(G, A, (p**i1, a)) for a in range(1, p)):
            best = max(best, 1 + sum(zero0[i1 + 1 :]))
    return best


def check_zero_chain_divisibility(G: GroupSpec, A) -> int:
    s = zero_chain_length(G, A)
    A = list(A)
    if len(A) % G.p**s:
        raise TheoremFalsified("zero chain divisibility", f"p^{s} does not divide |A|={len(A)}", A)
    return s
