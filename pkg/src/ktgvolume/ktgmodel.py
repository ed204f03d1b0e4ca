"""Knotted trivalent graphs as fat graphs, the KTG moves, and a move DSL.

A dart is ``(edge_id, end)`` with ``end`` in {0, 1}.  Every vertex holds a
cyclic triple of darts.  Ids come from per-kind counters and are never
reused, so a move program can name its targets (``v3``, ``e7``).

DSL, one move per line (``;`` also separates, ``#`` starts a comment)::

    tet
    A v1
    H+ e2
    U e5 rings=1
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

__all__ = [
    "KTG", "Triangle", "HalfTwist", "Unzip", "Move", "MoveSequence", "MoveStats",
    "TriangleTrace", "UnzipTrace", "TwistTrace", "Strand", "ValidationReport",
    "BadTarget", "UnknownId", "UnzipLoopEdge", "UnzipCircle", "ParseError",
    "DomainError", "standard_tetrahedron", "apply_move", "apply_move_traced",
    "replay", "parse_sequence", "serialize", "augment", "stats", "validate",
    "components", "fatgraph_isomorphic", "sequence_hash",
]


class BadTarget(ValueError):
    def __init__(self, msg, line=None, col=None):
        super().__init__(msg)
        self.line, self.col = line, col

    def __str__(self):
        base = super().__str__()
        if self.line is not None:
            return f"line {self.line}, col {self.col}: {base}"
        return base


class UnknownId(BadTarget):
    pass


class UnzipLoopEdge(BadTarget):
    pass


class UnzipCircle(BadTarget):
    pass


class ParseError(ValueError):
    def __init__(self, msg, line, col):
        super().__init__(f"line {line}, col {col}: {msg}")
        self.line, self.col = line, col


class DomainError(ValueError):
    pass


Dart = tuple  # (edge_id, end)


# ---------------------------------------------------------------------------
# moves

@dataclass(frozen=True)
class Triangle:
    vertex: int
    pos: tuple | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class HalfTwist:
    edge: int
    sign: int
    pos: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.sign not in (1, -1):
            raise ValueError("half twist sign must be +1 or -1")


@dataclass(frozen=True)
class Unzip:
    edge: int
    rings: int = 0
    pos: tuple | None = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.rings < 0:
            raise ValueError("ring count must be non-negative")


Move = Triangle | HalfTwist | Unzip


@dataclass(frozen=True)
class MoveSequence:
    moves: tuple = ()
    declared_split_components: int = 1

    def __post_init__(self):
        object.__setattr__(self, "moves", tuple(self.moves))
        if self.declared_split_components < 1:
            raise ValueError("declared_split_components must be positive")

    def __len__(self):
        return len(self.moves)

    def __iter__(self):
        return iter(self.moves)


# ---------------------------------------------------------------------------
# the graph

@dataclass(frozen=True)
class RingRecord:
    unzip_index: int
    strands: tuple


@dataclass(frozen=True)
class KTG:
    vertices: dict
    edges: dict          # edge id -> twist (half twists, signed)
    circles: dict        # circle id -> twist
    rings: dict          # ring id -> RingRecord
    next_v: int
    next_e: int
    next_r: int

    def __eq__(self, other):
        if not isinstance(other, KTG):
            return NotImplemented
        return (self.vertices == other.vertices and self.edges == other.edges
                and self.circles == other.circles and self.rings == other.rings)

    __hash__ = None

    def dart_vertex(self) -> dict:
        return {d: v for v, rot in self.vertices.items() for d in rot}

    def endpoints(self, e: int) -> tuple[int, int]:
        dv = self.dart_vertex()
        return dv[(e, 0)], dv[(e, 1)]

    def check(self):
        """Raise AssertionError if the dart bookkeeping is inconsistent."""
        seen = {}
        for v, rot in self.vertices.items():
            assert len(rot) == 3, f"vertex v{v} has valence {len(rot)}"
            for d in rot:
                assert d not in seen, f"dart {d} used twice"
                seen[d] = v
        expected = {(e, k) for e in self.edges for k in (0, 1)}
        assert set(seen) == expected, "darts do not match edge ends"
        assert not (set(self.edges) & set(self.circles))


def standard_tetrahedron() -> KTG:
    # e1=v1v2, e2=v1v3, e3=v1v4, e4=v2v3, e5=v3v4, e6=v2v4; dart 0 at the lower vertex.
    # Planar rotations: v1 in the middle, v2 v3 v4 counterclockwise around it.
    verts = {
        1: ((1, 0), (2, 0), (3, 0)),
        2: ((1, 1), (6, 0), (4, 0)),
        3: ((2, 1), (4, 1), (5, 0)),
        4: ((3, 1), (5, 1), (6, 1)),
    }
    return KTG(verts, {e: 0 for e in range(1, 7)}, {}, {}, 5, 7, 1)


# ---------------------------------------------------------------------------
# traces consumed by the Jones engine and the octahedral builder

@dataclass(frozen=True)
class TwistTrace:
    edge: int
    sign: int


@dataclass(frozen=True)
class TriangleTrace:
    vertex: int
    outer: tuple          # outer darts (d0, d1, d2) in rotation order
    new_vertices: tuple   # w0, w1, w2; w_i carries d_i
    triangle_edges: tuple  # t01, t12, t20


@dataclass(frozen=True)
class Strand:
    new_id: int
    is_circle: bool
    old_edges: tuple
    via: tuple            # subset of ("a1b2", "a2b1")


@dataclass(frozen=True)
class UnzipTrace:
    edge: int
    u: int
    v: int
    rot_u: tuple          # (e-dart, a1-dart, a2-dart)
    rot_v: tuple          # (e-dart, b1-dart, b2-dart)
    strands: tuple        # Strand records
    rings: tuple          # new ring ids
    twist: int            # net twist of the unzipped edge

    def strand_via(self, tag: str) -> Strand:
        for s in self.strands:
            if tag in s.via:
                return s
        raise KeyError(tag)


def _rotate_to(rot: tuple, dart) -> tuple:
    i = rot.index(dart)
    return rot[i:] + rot[:i]


def apply_move_traced(g: KTG, m) -> tuple[KTG, object]:
    if isinstance(m, HalfTwist):
        if m.edge in g.edges:
            edges = dict(g.edges)
            edges[m.edge] += m.sign
            return replace(g, edges=edges), TwistTrace(m.edge, m.sign)
        if m.edge in g.circles:
            circles = dict(g.circles)
            circles[m.edge] += m.sign
            return replace(g, circles=circles), TwistTrace(m.edge, m.sign)
        raise UnknownId(f"no edge e{m.edge}")

    if isinstance(m, Triangle):
        if m.vertex not in g.vertices:
            raise UnknownId(f"no vertex v{m.vertex}")
        outer = g.vertices[m.vertex]
        w = (g.next_v, g.next_v + 1, g.next_v + 2)
        t01, t12, t20 = g.next_e, g.next_e + 1, g.next_e + 2
        verts = dict(g.vertices)
        del verts[m.vertex]
        verts[w[0]] = (outer[0], (t01, 0), (t20, 1))
        verts[w[1]] = (outer[1], (t12, 0), (t01, 1))
        verts[w[2]] = (outer[2], (t20, 0), (t12, 1))
        edges = dict(g.edges)
        edges.update({t01: 0, t12: 0, t20: 0})
        new = replace(g, vertices=verts, edges=edges, next_v=g.next_v + 3, next_e=g.next_e + 3)
        return new, TriangleTrace(m.vertex, outer, w, (t01, t12, t20))

    if isinstance(m, Unzip):
        return _unzip(g, m)
    raise TypeError(f"not a move: {m!r}")


def _unzip(g: KTG, m: Unzip):
    e = m.edge
    if e in g.circles:
        raise UnzipCircle(f"e{e} is a circle")
    if e not in g.edges:
        raise UnknownId(f"no edge e{e}")
    dv = g.dart_vertex()
    u, v = dv[(e, 0)], dv[(e, 1)]
    if u == v:
        raise UnzipLoopEdge(f"e{e} is a loop at v{u}")
    rot_u = _rotate_to(g.vertices[u], (e, 0))
    rot_v = _rotate_to(g.vertices[v], (e, 1))
    _, p1, p2 = rot_u
    _, q1, q2 = rot_v
    conn = {p1: q2, q2: p1, p2: q1, q1: p2}

    def walk(x):
        """Follow edges away from the junction starting at dart x."""
        path = []
        start = x
        while True:
            E = x[0]
            path.append(E)
            other = (E, 1 - x[1])
            if other not in conn:
                return path, other
            x = conn[other]
            if x == start:
                return path, None

    verts = {k: r for k, r in g.vertices.items() if k not in (u, v)}
    edges = {k: t for k, t in g.edges.items() if k != e}
    circles = dict(g.circles)
    next_e = g.next_e
    used: set = set()
    strands = []
    rename = {}
    for tag, start, partner in (("a1b2", p1, q2), ("a2b1", p2, q1)):
        if start[0] in used:
            for i, s in enumerate(strands):
                if start[0] in s.old_edges:
                    strands[i] = replace(s, via=s.via + (tag,))
            continue
        path1, term1 = walk(start)
        if term1 is None:
            old = tuple(path1)
            sid = next_e
            next_e += 1
            circles[sid] = sum(edges.pop(E) for E in dict.fromkeys(old))
            strands.append(Strand(sid, True, old, (tag,)))
            used.update(old)
            continue
        path2, term2 = walk(partner)
        old = tuple(reversed(path1)) + tuple(path2)
        sid = next_e
        next_e += 1
        twist = sum(edges.pop(E) for E in dict.fromkeys(old))
        edges[sid] = twist
        rename[term1] = (sid, 0)
        rename[term2] = (sid, 1)
        strands.append(Strand(sid, False, old, (tag,)))
        used.update(old)
    verts = {k: tuple(rename.get(d, d) for d in rot) for k, rot in verts.items()}
    ring_ids = tuple(range(g.next_r, g.next_r + m.rings))
    rings = dict(g.rings)
    for r in ring_ids:
        rings[r] = RingRecord(-1, tuple(s.new_id for s in strands))
    new = KTG(verts, edges, circles, rings, g.next_v, next_e, g.next_r + m.rings)
    trace = UnzipTrace(e, u, v, rot_u, rot_v, tuple(strands), ring_ids, g.edges[e])
    return new, trace


def apply_move(g: KTG, m) -> KTG:
    return apply_move_traced(g, m)[0]


def replay(seq: MoveSequence | Iterable) -> tuple[list[KTG], list]:
    """All intermediate graphs (including the start) and the per-move traces."""
    moves = seq.moves if isinstance(seq, MoveSequence) else tuple(seq)
    states = [standard_tetrahedron()]
    traces = []
    for m in moves:
        try:
            g, tr = apply_move_traced(states[-1], m)
        except BadTarget as exc:
            if m.pos is not None and exc.line is None:
                exc.line, exc.col = m.pos
            raise
        states.append(g)
        traces.append(tr)
    return states, traces


def components(g: KTG) -> int:
    """Connected components, counting circles and rings."""
    parent = {v: v for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    dv = g.dart_vertex()
    for e in g.edges:
        a, b = find(dv[(e, 0)]), find(dv[(e, 1)])
        parent[a] = b
    return len({find(v) for v in g.vertices}) + len(g.circles) + len(g.rings)


def fatgraph_isomorphic(g1: KTG, g2: KTG) -> bool:
    """Isomorphism of fat graphs whose vertex part is connected (either orientation)."""
    if (len(g1.vertices), len(g1.edges), len(g1.circles)) != (len(g2.vertices), len(g2.edges), len(g2.circles)):
        return False
    if not g1.vertices:
        return True

    def structure(g, reverse):
        nxt = {}
        for rot in g.vertices.values():
            r = rot[::-1] if reverse else rot
            for i in range(3):
                nxt[r[i]] = r[(i + 1) % 3]
        return nxt

    n1 = structure(g1, False)
    d0 = next(iter(n1))
    for reverse in (False, True):
        n2 = structure(g2, reverse)
        for target in n2:
            phi = {}
            stack = [(d0, target)]
            ok = True
            while stack and ok:
                a, b = stack.pop()
                if a in phi:
                    ok = phi[a] == b
                    continue
                if b in phi.values():
                    ok = False
                    break
                phi[a] = b
                stack.append((n1[a], n2[b]))
                stack.append(((a[0], 1 - a[1]), (b[0], 1 - b[1])))
            if ok and len(phi) == len(n1):
                return True
    return False


# ---------------------------------------------------------------------------
# DSL

_TOKEN = re.compile(r"\S+")
_ID = re.compile(r"([ve])(\d+)$")


def _statements(text: str):
    for lineno, raw in enumerate(text.replace("\r\n", "\n").replace("\r", "\n").split("\n"), start=1):
        line = raw.split("#", 1)[0]
        offset = 0
        for part in line.split(";"):
            toks = [(m.group(), offset + m.start() + 1) for m in _TOKEN.finditer(part)]
            offset += len(part) + 1
            if toks:
                yield lineno, toks


def _parse_id(tok, col, lineno, kind):
    m = _ID.match(tok)
    if not m or m.group(1) != kind:
        want = "vertex id like v1" if kind == "v" else "edge id like e1"
        raise ParseError(f"expected {want}, got {tok!r}", lineno, col)
    return int(m.group(2))


def parse_sequence(text: str, check: bool = True, split_components: int = 1) -> MoveSequence:
    """Parse DSL text; with ``check`` the program is replayed and bad targets raise."""
    moves = []
    first = True
    for lineno, toks in _statements(text):
        word, col = toks[0]
        if first and word == "tet":
            if len(toks) > 1:
                raise ParseError("unexpected text after 'tet'", lineno, toks[1][1])
            first = False
            continue
        if word == "tet":
            raise ParseError("'tet' may only appear first", lineno, col)
        first = False
        if word == "A":
            if len(toks) != 2:
                raise ParseError("A takes exactly one vertex id", lineno, col)
            moves.append(Triangle(_parse_id(*toks[1], lineno, "v"), pos=(lineno, toks[1][1])))
        elif word in ("H+", "H-"):
            if len(toks) != 2:
                raise ParseError(f"{word} takes exactly one edge id", lineno, col)
            moves.append(HalfTwist(_parse_id(*toks[1], lineno, "e"), 1 if word == "H+" else -1,
                                   pos=(lineno, toks[1][1])))
        elif word == "U":
            if len(toks) not in (2, 3):
                raise ParseError("U takes an edge id and optional rings=INT", lineno, col)
            eid = _parse_id(*toks[1], lineno, "e")
            rings = 0
            if len(toks) == 3:
                tok, c3 = toks[2]
                m = re.fullmatch(r"rings=(\d+)", tok)
                if not m:
                    raise ParseError(f"expected rings=INT, got {tok!r}", lineno, c3)
                rings = int(m.group(1))
            moves.append(Unzip(eid, rings, pos=(lineno, toks[1][1])))
        else:
            raise ParseError(f"unknown move {word!r}", lineno, col)
    seq = MoveSequence(tuple(moves), split_components)
    if check:
        replay(seq)
    return seq


def _move_text(m) -> str:
    if isinstance(m, Triangle):
        return f"A v{m.vertex}"
    if isinstance(m, HalfTwist):
        return f"H{'+' if m.sign > 0 else '-'} e{m.edge}"
    return f"U e{m.edge}" + (f" rings={m.rings}" if m.rings else "")


def serialize(seq: MoveSequence) -> str:
    return "tet\n" + "".join(_move_text(m) + "\n" for m in seq.moves)


def sequence_hash(seq: MoveSequence) -> str:
    return hashlib.sha256(serialize(seq).encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------

def augment(seq: MoveSequence, rings: int | Sequence[int]) -> MoveSequence:
    """Replace the ring count of every unzip (uniform int or one entry per unzip)."""
    n_unzip = sum(isinstance(m, Unzip) for m in seq.moves)
    if isinstance(rings, int):
        counts = [rings] * n_unzip
    else:
        counts = list(rings)
        if len(counts) != n_unzip:
            raise DomainError(f"{len(counts)} ring counts given for {n_unzip} unzips")
    if any(c < 1 for c in counts):
        raise DomainError("augmentation needs at least one ring per unzip")
    it = iter(counts)
    moves = tuple(replace(m, rings=next(it)) if isinstance(m, Unzip) else m for m in seq.moves)
    return MoveSequence(moves, seq.declared_split_components)


@dataclass(frozen=True)
class MoveStats:
    t: int
    u: int
    theta: int
    r: int
    per_unzip_rings: tuple
    twist_at_unzip: tuple


@dataclass
class ValidationReport:
    ok: bool
    stats: MoveStats
    error: Exception | None = None
    failed_index: int | None = None
    final: KTG | None = None

    def lines(self) -> list[str]:
        s = self.stats
        out = [f"t={s.t} u={s.u} theta={s.theta} r={s.r}"]
        for i, (rings, tw) in enumerate(zip(s.per_unzip_rings, s.twist_at_unzip), start=1):
            out.append(f"unzip {i}: rings={rings} twist={tw}")
        if not self.ok:
            out.append(f"error at move {self.failed_index + 1}: {self.error}")
        return out


def _count_stats(moves, twists) -> MoveStats:
    per = tuple(m.rings for m in moves if isinstance(m, Unzip))
    return MoveStats(
        t=sum(isinstance(m, Triangle) for m in moves),
        u=len(per),
        theta=sum(m.sign for m in moves if isinstance(m, HalfTwist)),
        r=sum(per),
        per_unzip_rings=per,
        twist_at_unzip=tuple(twists),
    )


def validate(seq: MoveSequence) -> ValidationReport:
    g = standard_tetrahedron()
    twists = []
    for i, m in enumerate(seq.moves):
        try:
            g, tr = apply_move_traced(g, m)
        except BadTarget as exc:
            if m.pos is not None and exc.line is None:
                exc.line, exc.col = m.pos
            return ValidationReport(False, _count_stats(seq.moves, twists), exc, i, g)
        if isinstance(tr, UnzipTrace):
            twists.append(tr.twist)
    return ValidationReport(True, _count_stats(seq.moves, twists), final=g)


def stats(seq: MoveSequence) -> MoveStats:
    return validate(seq).stats
