"""Brute-force Temperley-Lieb evaluator for small colored skein diagrams.

Morphisms go from ``n`` bottom points to ``m`` top points.  A basis diagram
is a perfect matching of the ``n + m`` boundary points, stored as a tuple
``p`` with ``p[i]`` the partner of point ``i``; bottom points come first,
each side read left to right.  Closed loops are removed on the fly with
the factor ``-A^2 - A^-2``.

A color-``k`` edge is a bundle of ``k - 1`` strands.  Diagrams are built
as lists of rows read bottom to top; each row is a list of morphisms
placed side by side.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .qarith import RatFun, TwistLaurent
from .qsymbols import InadmissibleTriple, qint

__all__ = [
    "TL", "PlanarComposition", "NotClosed", "TooLarge", "LOOP",
    "identity", "cup", "cap", "cross", "htwist", "jw", "e_gen",
    "cup_bundle", "cap_bundle", "split", "merge", "emit", "absorb",
    "bundle_cross", "half_twist_band", "evaluate", "bracket_primitive",
    "theta", "tet", "twisted_edge", "encircled", "unknot", "mobius_band",
    "DEFAULT_STRAND_CAP", "fusion_sides",
]

DEFAULT_STRAND_CAP = 8
LOOP = RatFun(TwistLaurent({(0, 4): -1, (0, -4): -1}))
_ONE = RatFun(1)


class NotClosed(ValueError):
    pass


class TooLarge(ValueError):
    pass


@lru_cache(maxsize=None)
def _compose_matchings(pa: tuple, n: int, m: int, pb: tuple, k: int):
    """Stack ``pb`` (m -> k) on top of ``pa`` (n -> m); return (matching, loops)."""
    # nodes: 0..n-1 outer bottom, n..n+m-1 middle, n+m..n+m+k-1 outer top
    def a_node(i):
        return i if i < n else n + (i - n)

    def b_node(i):
        return n + i if i < m else n + m + (i - m)

    via_a = {}
    via_b = {}
    for i, j in enumerate(pa):
        via_a[a_node(i)] = a_node(j)
    for i, j in enumerate(pb):
        via_b[b_node(i)] = b_node(j)
    total = n + k
    out = [0] * total

    def outer_index(node):
        return node if node < n else node - m

    seen_mid = set()
    for start in list(range(n)) + list(range(n + m, n + m + k)):
        x = start
        use_a = start < n
        while True:
            y = via_a[x] if use_a else via_b[x]
            if y < n or y >= n + m:
                break
            seen_mid.add(y)
            x = y
            use_a = not use_a
        out[outer_index(start)] = outer_index(y)
    loops = 0
    for mid in range(n, n + m):
        if mid in seen_mid:
            continue
        loops += 1
        x = mid
        use_a = True
        while True:
            seen_mid.add(x)
            x = via_a[x] if use_a else via_b[x]
            use_a = not use_a
            if x == mid:
                break
    return tuple(out), loops


@lru_cache(maxsize=None)
def _tensor_matchings(pa: tuple, n1: int, m1: int, pb: tuple, n2: int, m2: int):
    def ia(i):
        return i if i < n1 else n1 + n2 + (i - n1)

    def ib(i):
        return n1 + i if i < n2 else n1 + n2 + m1 + (i - n2)

    out = [0] * (n1 + n2 + m1 + m2)
    for i, j in enumerate(pa):
        out[ia(i)] = ia(j)
    for i, j in enumerate(pb):
        out[ib(i)] = ib(j)
    return tuple(out)


class TL:
    """A linear combination of crossingless matchings with RatFun coefficients."""

    __slots__ = ("n_in", "n_out", "terms")

    def __init__(self, n_in: int, n_out: int, terms: dict):
        self.n_in, self.n_out = n_in, n_out
        self.terms = {p: c for p, c in terms.items() if not c.is_zero()}

    def __matmul__(self, other: "TL") -> "TL":
        """``self @ other`` is ``self`` stacked on top of ``other``."""
        if other.n_out != self.n_in:
            raise ValueError(f"width mismatch: {other.n_out} into {self.n_in}")
        acc: dict = {}
        loop_pows = {}
        for pa, ca in other.terms.items():
            for pb, cb in self.terms.items():
                p, loops = _compose_matchings(pa, other.n_in, other.n_out, pb, self.n_out)
                c = ca * cb
                if loops:
                    if loops not in loop_pows:
                        loop_pows[loops] = LOOP ** loops
                    c = c * loop_pows[loops]
                acc[p] = acc[p] + c if p in acc else c
        return TL(other.n_in, self.n_out, acc)

    def tensor(self, other: "TL") -> "TL":
        acc: dict = {}
        for pa, ca in self.terms.items():
            for pb, cb in other.terms.items():
                p = _tensor_matchings(pa, self.n_in, self.n_out, pb, other.n_in, other.n_out)
                c = ca * cb
                acc[p] = acc[p] + c if p in acc else c
        return TL(self.n_in + other.n_in, self.n_out + other.n_out, acc)

    def __add__(self, other: "TL") -> "TL":
        if (self.n_in, self.n_out) != (other.n_in, other.n_out):
            raise ValueError("shape mismatch")
        acc = dict(self.terms)
        for p, c in other.terms.items():
            acc[p] = acc[p] + c if p in acc else c
        return TL(self.n_in, self.n_out, acc)

    def scale(self, c) -> "TL":
        c = RatFun._coerce(c)
        return TL(self.n_in, self.n_out, {p: v * c for p, v in self.terms.items()})

    def __sub__(self, other: "TL") -> "TL":
        return self + other.scale(-1)

    def __eq__(self, other):
        if not isinstance(other, TL):
            return NotImplemented
        if (self.n_in, self.n_out) != (other.n_in, other.n_out):
            return False
        return all(self.terms.get(p, RatFun(0)) == other.terms.get(p, RatFun(0))
                   for p in set(self.terms) | set(other.terms))

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.terms

    def scalar(self) -> RatFun:
        if self.n_in or self.n_out:
            raise NotClosed(f"diagram has {self.n_in} bottom and {self.n_out} top endpoints")
        return self.terms.get((), RatFun(0))

    def __repr__(self):
        return f"TL({self.n_in}->{self.n_out}, {len(self.terms)} terms)"


def _basis(n_in, n_out, pairs, coeff=_ONE) -> TL:
    p = [None] * (n_in + n_out)
    for i, j in pairs:
        p[i], p[j] = j, i
    return TL(n_in, n_out, {tuple(p): RatFun._coerce(coeff)})


def identity(k: int) -> TL:
    return _basis(k, k, [(i, k + i) for i in range(k)])


def cup() -> TL:
    return _basis(0, 2, [(0, 1)])


def cap() -> TL:
    return _basis(2, 0, [(0, 1)])


def e_gen(n: int, i: int) -> TL:
    """The TL generator hooking strands ``i`` and ``i+1`` of ``n``."""
    pairs = [(j, n + j) for j in range(n) if j not in (i, i + 1)]
    pairs += [(i, i + 1), (n + i, n + i + 1)]
    return _basis(n, n, pairs)


def cross(sign: int) -> TL:
    a, ainv = RatFun(TwistLaurent.A(1)), RatFun(TwistLaurent.A(-1))
    c_id, c_e = (a, ainv) if sign > 0 else (ainv, a)
    return identity(2).scale(c_id) + e_gen(2, 0).scale(c_e)


def htwist(sign: int) -> TL:
    hh = TwistLaurent.h() if sign > 0 else TwistLaurent.h() * TwistLaurent.A(-3) * -1
    return identity(1).scale(RatFun(hh))


@lru_cache(maxsize=None)
def jw(n: int) -> TL:
    """Jones-Wenzl projector on ``n`` strands (Wenzl recursion)."""
    if n < 0:
        raise ValueError("negative strand count")
    if n <= 1:
        return identity(n)
    prev = jw(n - 1).tensor(identity(1))
    coeff = RatFun(qint(n - 1)) / RatFun(qint(n))
    return prev + (prev @ e_gen(n, n - 2) @ prev).scale(coeff)


def cup_bundle(k: int) -> TL:
    return _basis(0, 2 * k, [(i, 2 * k - 1 - i) for i in range(k)])


def cap_bundle(k: int) -> TL:
    return _basis(2 * k, 0, [(i, 2 * k - 1 - i) for i in range(k)])


def _groups(p: int, q: int, r: int) -> tuple[int, int, int]:
    """Strand counts between bundle pairs (pq, qr, pr) at a vertex."""
    if (p + q + r) % 2 or p > q + r or q > p + r or r > p + q:
        raise InadmissibleTriple(f"strand counts ({p},{q},{r}) do not meet")
    return (p + q - r) // 2, (q + r - p) // 2, (p + r - q) // 2


def emit(p: int, q: int, r: int) -> TL:
    """Vertex creating bundles p, q, r (left to right) from nothing."""
    pq, qr, pr = _groups(p, q, r)
    pairs = [(p - 1 - i, p + i) for i in range(pq)]
    pairs += [(p + q - 1 - i, p + q + i) for i in range(qr)]
    pairs += [(i, p + q + r - 1 - i) for i in range(pr)]
    return _basis(0, p + q + r, pairs)


def _flip(t: TL) -> TL:
    """Reflect top and bottom."""
    n, m = t.n_in, t.n_out

    def f(i):
        return m + i if i < n else i - n

    terms = {}
    for p, c in t.terms.items():
        q = [0] * (n + m)
        for i, j in enumerate(p):
            q[f(i)] = f(j)
        terms[tuple(q)] = c
    return TL(m, n, terms)


def absorb(p: int, q: int, r: int) -> TL:
    return _flip(emit(p, q, r))


def split(r: int, p: int, q: int) -> TL:
    """Vertex taking a bottom bundle r to top bundles p, q."""
    pq, qr, pr = _groups(p, q, r)
    pairs = [(r + p - 1 - i, r + p + i) for i in range(pq)]
    pairs += [(i, r + i) for i in range(pr)]
    pairs += [(pr + i, r + p + pq + i) for i in range(qr)]
    return _basis(r, p + q, pairs)


def merge(p: int, q: int, r: int) -> TL:
    return _flip(split(r, p, q))


def _sigma(n: int, i: int, sign: int) -> TL:
    parts = []
    if i:
        parts.append(identity(i))
    parts.append(cross(sign))
    if n - i - 2:
        parts.append(identity(n - i - 2))
    out = parts[0]
    for part in parts[1:]:
        out = out.tensor(part)
    return out


def bundle_cross(p: int, q: int, sign: int) -> TL:
    """Left bundle of p strands crosses the right bundle of q strands."""
    n = p + q
    out = identity(n)
    for j in range(q):
        for pos in range(p + j - 1, j - 1, -1):
            out = _sigma(n, pos, sign) @ out
    return out


def half_twist_band(n: int, sign: int) -> TL:
    """A band of ``n`` strands given a half twist: the Garside braid plus a twist per strand."""
    out = identity(n)
    tw = htwist(sign)
    for k in range(n - 1, 0, -1):
        for i in range(k):
            out = _sigma(n, i, sign) @ out
    band = tw
    for _ in range(n - 1):
        band = band.tensor(tw)
    return (band @ out) if n else out


def _row(parts) -> TL:
    out = parts[0]
    for part in parts[1:]:
        out = out.tensor(part)
    return out


@dataclass
class PlanarComposition:
    """Rows of side-by-side morphisms, read bottom to top."""

    rows: list
    strand_cap: int = DEFAULT_STRAND_CAP

    def widths(self) -> list[tuple[int, int]]:
        out = []
        for row in self.rows:
            out.append((sum(g.n_in for g in row), sum(g.n_out for g in row)))
        return out

    def check(self):
        ws = self.widths()
        for (a, b), (c, d) in zip(ws, ws[1:]):
            if b != c:
                raise ValueError(f"row widths do not chain: {b} then {c}")
        top = max((max(a, b) for a, b in ws), default=0)
        if top > self.strand_cap:
            raise TooLarge(f"{top} strands exceed the cap of {self.strand_cap}")
        return ws

    def morphism(self) -> TL:
        self.check()
        out = None
        for row in self.rows:
            r = _row(row)
            out = r if out is None else r @ out
        return out if out is not None else identity(0)


def evaluate(d: PlanarComposition) -> RatFun:
    ws = d.check()
    if ws and (ws[0][0] or ws[-1][1]):
        raise NotClosed("diagram has open endpoints")
    return d.morphism().scalar()


# ---------------------------------------------------------------------------
# primitives

def _strands(color: int) -> int:
    if color < 1:
        raise InadmissibleTriple(f"color {color} is not positive")
    return color - 1


def theta(a: int, b: int, c: int, strand_cap=DEFAULT_STRAND_CAP) -> RatFun:
    p, q, r = map(_strands, (a, b, c))
    return evaluate(PlanarComposition([
        [emit(p, q, r)],
        [jw(p), jw(q), jw(r)],
        [absorb(p, q, r)],
    ], strand_cap))


def tet(j1, j2, j3, j4, j5, j6, strand_cap=DEFAULT_STRAND_CAP) -> RatFun:
    """Tetrahedral network with vertices (1,2,3), (1,4,6), (2,4,5), (3,5,6)."""
    s1, s2, s3, s4, s5, s6 = map(_strands, (j1, j2, j3, j4, j5, j6))
    return evaluate(PlanarComposition([
        [emit(s1, s3, s2)],
        [jw(s1), jw(s3), jw(s2)],
        [split(s1, s4, s6), identity(s3), identity(s2)],
        [jw(s4), jw(s6), identity(s3), identity(s2)],
        [identity(s4), merge(s6, s3, s5), identity(s2)],
        [identity(s4), jw(s5), identity(s2)],
        [absorb(s4, s5, s2)],
    ], strand_cap))


def unknot(k: int, strand_cap=DEFAULT_STRAND_CAP) -> RatFun:
    n = _strands(k)
    return evaluate(PlanarComposition([
        [cup_bundle(n)],
        [jw(n), identity(n)],
        [cap_bundle(n)],
    ], strand_cap))


def twisted_edge(k: int, sign: int, strand_cap=DEFAULT_STRAND_CAP) -> RatFun:
    """A k-colored unknot whose band carries one half twist."""
    n = _strands(k)
    return evaluate(PlanarComposition([
        [cup_bundle(n)],
        [jw(n), identity(n)],
        [half_twist_band(n, sign), identity(n)],
        [cap_bundle(n)],
    ], strand_cap))


def mobius_band(sign: int = 1) -> RatFun:
    """Color-3 Moebius band: two strands, a half twist on each, one crossing."""
    return evaluate(PlanarComposition([
        [cup_bundle(2)],
        [jw(2), identity(2)],
        [htwist(sign), htwist(sign), identity(2)],
        [cross(sign), identity(2)],
        [cap_bundle(2)],
    ]))


def encircled(k: int, N: int, strand_cap=DEFAULT_STRAND_CAP) -> RatFun:
    """Closed k-colored loop linked once with an N-colored ring (a colored Hopf link)."""
    n, r = _strands(k), _strands(N)
    return evaluate(PlanarComposition([
        [cup_bundle(r), cup_bundle(n)],
        [jw(r), identity(r), jw(n), identity(n)],
        [identity(r), bundle_cross(r, n, 1), identity(n)],
        [identity(r), bundle_cross(n, r, 1), identity(n)],
        [cap_bundle(r), cap_bundle(n)],
    ], strand_cap))


def bracket_primitive(kind: str, *args, strand_cap=DEFAULT_STRAND_CAP) -> RatFun:
    table = {
        "theta": theta, "tet": tet, "twisted_edge": twisted_edge,
        "encircled": encircled, "unknot": unknot,
    }
    if kind not in table:
        raise ValueError(f"unknown primitive {kind!r}")
    return table[kind](*args, strand_cap=strand_cap)


def fusion_sides(a: int, b: int) -> tuple[TL, TL]:
    """Both sides of the fusion identity for parallel edges colored a and b."""
    from .qsymbols import admissible, theta_value, unknot_value

    p, q = _strands(a), _strands(b)
    lhs = jw(p).tensor(jw(q))
    rhs = None
    for c in range(abs(a - b) + 1, a + b):
        if not admissible(a, b, c):
            continue
        r = c - 1
        term = (lhs @ split(r, p, q) @ jw(r) @ merge(p, q, r) @ lhs)
        term = term.scale(RatFun(unknot_value(c)) / theta_value(a, b, c))
        rhs = term if rhs is None else rhs + term
    return lhs, rhs
