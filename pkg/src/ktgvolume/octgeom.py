"""Octahedral decomposition of augmented KTG outsides, and volumes.

A truncated octahedron is described through its ideal octahedron: ideal
vertices are ``(axis, sign)`` (the red truncation squares) and faces are
sign triples ``(sx, sy, sz)``.  A face is blue when ``sx*sy*sz == 1``.
Every vertex of the KTG owns two blue faces, an upper one and a lower one,
each with a map from the vertex's darts to the face's ideal vertices.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field

from scipy.integrate import quad

from .ktgmodel import (
    MoveSequence, TriangleTrace, UnzipTrace, replay, stats,
)
from .qsymbols import log_sixj_N

__all__ = [
    "TruncOct", "OctGluing", "GluingConflict", "GluingReport", "JSJReport", "NotAugmented",
    "BLUE_FACES", "WHITE_FACES", "lobachevsky", "vol_oct", "build_gluing", "verify_gluing",
    "without_pairing", "volume", "asymptotic_series", "gluing_json", "asymptotics_csv",
]

AXES = "xyz"
BLUE_FACES = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
WHITE_FACES = ((-1, -1, -1), (-1, 1, 1), (1, -1, 1), (1, 1, -1))
ALL_FACES = BLUE_FACES + WHITE_FACES
IDEAL_VERTICES = tuple((a, s) for a in range(3) for s in (1, -1))


class GluingConflict(RuntimeError):
    pass


class NotAugmented(ValueError):
    pass


def face_vertices(f: tuple) -> tuple:
    return tuple((a, f[a]) for a in range(3))


def is_blue(f: tuple) -> bool:
    return f[0] * f[1] * f[2] == 1


def iv_name(iv) -> str:
    return ("+" if iv[1] > 0 else "-") + AXES[iv[0]]


def face_name(f) -> str:
    return "".join("+" if s > 0 else "-" for s in f)


def _faces_of_edge(v, w) -> list:
    """The two faces containing ideal vertices v and w (on different axes)."""
    (a, sa), (b, sb) = v, w
    c = 3 - a - b
    out = []
    for sc in (1, -1):
        f = [0, 0, 0]
        f[a], f[b], f[c] = sa, sb, sc
        out.append(tuple(f))
    return out


@dataclass(frozen=True)
class TruncOct:
    id: int
    orientation: int  # +1 or -1

    def faces(self) -> list[dict]:
        out = []
        for f in ALL_FACES:
            vs = face_vertices(f)
            slots = []
            for i in range(3):
                v, w = vs[i], vs[(i + 1) % 3]
                slots.append({"kind": "hex", "ends": [iv_name(v), iv_name(w)]})
                slots.append({"kind": "square", "vertex": iv_name(w)})
            out.append({"id": face_name(f), "color": "blue" if is_blue(f) else "white", "edges": slots})
        for iv in IDEAL_VERTICES:
            out.append({"id": iv_name(iv), "color": "red", "edges": []})
        return out


@dataclass
class OctGluing:
    octs: list
    pairings: dict                 # (oct, face) -> ((oct, face), {iv: iv})
    spheres: dict                  # ktg vertex -> {"upper": (oct, face, dartmap), "lower": ...}
    t: int
    odd_twist_unzips: int = 0
    final: object = None
    unzips: int = 0

    def pair(self, a: tuple, b: tuple, vmap: dict):
        if a in self.pairings or b in self.pairings or a == b:
            raise GluingConflict(f"face {a} or {b} is already glued")
        if set(vmap) != set(face_vertices(a[1])) or set(vmap.values()) != set(face_vertices(b[1])):
            raise GluingConflict(f"vertex map does not match faces {a} and {b}")
        self.pairings[a] = (b, dict(vmap))
        self.pairings[b] = (a, {w: v for v, w in vmap.items()})

    def pairing_list(self) -> list[tuple]:
        seen = set()
        out = []
        for a, (b, vmap) in sorted(self.pairings.items()):
            if b in seen:
                continue
            seen.add(a)
            out.append((a, b, vmap))
        return out


def _perm_index(vmap: dict, fa, fb) -> int:
    """Index 0..5 of the vertex correspondence; 0-2 rotations, 3-5 reflections."""
    src = face_vertices(fa)
    dst = face_vertices(fb)
    images = tuple(dst.index(vmap[v]) for v in src)
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)]
    return perms.index(images)


def _orientation_reversing(g: OctGluing, a, b, vmap) -> bool:
    idx = _perm_index(vmap, a[1], b[1])
    parity = 1 if idx < 3 else -1
    fa, fb = a[1], b[1]
    sa = g.octs[a[0]].orientation * fa[0] * fa[1] * fa[2]
    sb = g.octs[b[0]].orientation * fb[0] * fb[1] * fb[2]
    return sa * parity * sb == -1


def _new_pair_of_octs(g: OctGluing, orientation: int) -> tuple[int, int]:
    i = len(g.octs)
    g.octs.append(TruncOct(i, orientation))
    g.octs.append(TruncOct(i + 1, -orientation))
    for f in WHITE_FACES:
        g.pair((i, f), (i + 1, f), {v: v for v in face_vertices(f)})
    return i, i + 1


# darts at the new vertices of a triangle move, keyed by position in the rotation
_TRIANGLE_FACES = (
    ((1, -1, -1), ((0, 1), (2, -1), (1, -1))),   # w0: d0 -> +x, t01 -> -z, t20 -> -y
    ((-1, 1, -1), ((1, 1), (0, -1), (2, -1))),   # w1: d1 -> +y, t12 -> -x, t01 -> -z
    ((-1, -1, 1), ((2, 1), (1, -1), (0, -1))),   # w2: d2 -> +z, t20 -> -y, t12 -> -x
)


def build_gluing(seq: MoveSequence) -> OctGluing:
    """Glue truncated octahedra for the singly augmented graph of ``seq``."""
    states, traces = replay(seq)
    g = OctGluing([], {}, {}, 0)
    o1, o2 = _new_pair_of_octs(g, 1)
    base = states[0]
    edge_iv = {1: (0, 1), 2: (1, 1), 3: (2, 1), 4: (2, -1), 5: (0, -1), 6: (1, -1)}
    base_face = {1: (1, 1, 1), 2: (1, -1, -1), 3: (-1, 1, -1), 4: (-1, -1, 1)}
    for v, rot in base.vertices.items():
        f = base_face[v]
        dm = {d: edge_iv[d[0]] for d in rot}
        g.spheres[v] = {"upper": (o1, f, dm), "lower": (o2, f, dm)}

    for before, after, tr in zip(states, states[1:], traces):
        if isinstance(tr, TriangleTrace):
            _triangle(g, tr, after)
            g.t += 1
        elif isinstance(tr, UnzipTrace):
            _unzip(g, tr)
            g.unzips += 1
            if tr.twist % 2:
                g.odd_twist_unzips += 1
        # half twists do not change the outside
        _rename_darts(g, before, after)
    g.final = states[-1]
    return g


def _rename_darts(g: OctGluing, before, after):
    for v, sph in g.spheres.items():
        if v not in before.vertices or v not in after.vertices:
            continue
        old, new = before.vertices[v], after.vertices[v]
        if old == new:
            continue
        ren = dict(zip(old, new))
        for side in ("upper", "lower"):
            o, f, dm = sph[side]
            sph[side] = (o, f, {ren[d]: iv for d, iv in dm.items()})


def _triangle(g: OctGluing, tr: TriangleTrace, after):
    sph = g.spheres.pop(tr.vertex)
    ua, uf, udm = sph["upper"]
    la, lf, ldm = sph["lower"]
    top = (1, 1, 1)
    vmap_u = {(k, 1): udm[d] for k, d in enumerate(tr.outer)}
    # pick the orientation that makes the upper gluing orientation reversing
    trial = OctGluing([*g.octs, TruncOct(len(g.octs), 1)], {}, {}, 0)
    orient = 1 if _orientation_reversing(trial, (len(g.octs), top), (ua, uf), vmap_u) else -1
    n1, n2 = _new_pair_of_octs(g, orient)
    g.pair((n1, top), (ua, uf), vmap_u)
    g.pair((n2, top), (la, lf), {(k, 1): ldm[d] for k, d in enumerate(tr.outer)})
    for w, (f, ivs) in zip(tr.new_vertices, _TRIANGLE_FACES):
        rot = after.vertices[w]
        dm = dict(zip(rot, ivs))
        g.spheres[w] = {"upper": (n1, f, dm), "lower": (n2, f, dm)}


def _unzip(g: OctGluing, tr: UnzipTrace):
    su = g.spheres.pop(tr.u)
    sv = g.spheres.pop(tr.v)
    e0, a1, a2 = tr.rot_u
    e1, b1, b2 = tr.rot_v
    if tr.twist % 2 == 0:
        sides = (("upper", "upper"), ("lower", "lower"))
        match = ((e0, e1), (a1, b2), (a2, b1))
    else:
        # a half twist turns the band over: upper meets lower and the
        # strand pairing flips with it
        sides = (("upper", "lower"), ("lower", "upper"))
        match = ((e0, e1), (a1, b1), (a2, b2))
    for su_side, sv_side in sides:
        ou, fu, dmu = su[su_side]
        ov, fv, dmv = sv[sv_side]
        g.pair((ou, fu), (ov, fv), {dmu[x]: dmv[y] for x, y in match})


def without_pairing(g: OctGluing, face: tuple) -> OctGluing:
    """Copy of ``g`` with the pairing through ``face`` removed (negative control)."""
    other = g.pairings[face][0]
    pairings = {k: v for k, v in g.pairings.items() if k not in (face, other)}
    return OctGluing(list(g.octs), pairings, dict(g.spheres), g.t, g.odd_twist_unzips, g.final, g.unzips)


# ---------------------------------------------------------------------------
# verification

class _UF:
    def __init__(self):
        self.p = {}

    def find(self, x):
        self.p.setdefault(x, x)
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.p[ra] = rb


@dataclass
class GluingReport:
    ok: bool
    octahedra: int
    expected_octahedra: int
    violations: list
    edge_valences: dict            # valence -> number of classes (closed and open separately)
    cusps: dict
    vertex_spheres: int
    checks: dict = field(default_factory=dict)

    def summary(self) -> str:
        if self.ok:
            return f"{self.octahedra} octahedra, all checks passed"
        return f"{self.octahedra} octahedra, {len(self.violations)} violation(s): " + "; ".join(self.violations)


def _ordered_edges(f):
    vs = face_vertices(f)
    return [(v, w) for v in vs for w in vs if v != w]


def verify_gluing(g: OctGluing) -> GluingReport:
    violations = []
    checks = {}
    n = len(g.octs)
    expected = 2 * g.t + 2
    checks["count"] = n == expected
    if n != expected:
        violations.append(f"{n} octahedra, expected {expected}")

    # involution and white faces
    inv_ok = True
    for a, (b, vmap) in g.pairings.items():
        back = g.pairings.get(b)
        if back is None or back[0] != a or any(back[1][w] != v for v, w in vmap.items()):
            inv_ok = False
            violations.append(f"pairing {a} -> {b} is not involutive")
    checks["involutive"] = inv_ok
    white_ok = True
    for o in range(n):
        for f in WHITE_FACES:
            if (o, f) not in g.pairings:
                white_ok = False
                violations.append(f"unpaired white face {face_name(f)} on octahedron {o}")
    checks["white_paired"] = white_ok

    orient_ok = all(_orientation_reversing(g, a, b, vm) for a, (b, vm) in g.pairings.items())
    checks["orientable"] = orient_ok
    if not orient_ok:
        violations.append("a face pairing preserves orientation")

    # edge classes on ordered octahedron edges
    uf = _UF()
    for o in range(n):
        for f in ALL_FACES:
            for v, w in _ordered_edges(f):
                uf.find((o, v, w))
    for (o1, f1), ((o2, f2), vmap) in g.pairings.items():
        for v, w in _ordered_edges(f1):
            uf.union((o1, v, w), (o2, vmap[v], vmap[w]))
    classes: dict = {}
    for x in list(uf.p):
        classes.setdefault(uf.find(x), []).append(x)
    valences: dict = {}
    edge_ok = True
    for members in classes.values():
        keys = {(o, frozenset((v, w))) for o, v, w in members}
        if len(keys) != len(members):
            edge_ok = False
            violations.append("an edge is glued to itself reversed")
            continue
        open_faces = [(o, f) for o, v, w in members for f in _faces_of_edge(v, w) if (o, f) not in g.pairings]
        closed = not open_faces
        val = len(members)
        tag = "closed" if closed else "open"
        valences.setdefault(f"{tag}:{val}", 0)
        valences[f"{tag}:{val}"] += 1
        if (closed and val != 4) or (not closed and val != 2):
            edge_ok = False
            violations.append(f"{tag} edge class of valence {val}")
    # each ordered class is counted twice (once per direction)
    valences = {k: c // 2 for k, c in valences.items()}
    checks["edge_valence"] = edge_ok

    # unpaired faces must be blue and pair up into three-holed spheres
    unpaired = [(o, f) for o in range(n) for f in ALL_FACES if (o, f) not in g.pairings]
    sphere_ok = all(is_blue(f) for _, f in unpaired)
    face_uf = _UF()
    for o, f in unpaired:
        face_uf.find((o, f))
    for members in classes.values():
        ends = {(o, f) for o, v, w in members for f in _faces_of_edge(v, w) if (o, f) not in g.pairings}
        ends = sorted(ends)
        for x in ends[1:]:
            face_uf.union(ends[0], x)
    comps: dict = {}
    for x in unpaired:
        comps.setdefault(face_uf.find(x), []).append(x)
    for comp in comps.values():
        if len(comp) != 2:
            sphere_ok = False
            violations.append(f"blue boundary component with {len(comp)} faces")
    final_vertices = len(g.final.vertices) if g.final is not None else None
    if final_vertices is not None and len(comps) != final_vertices:
        sphere_ok = False
        violations.append(f"{len(comps)} vertex spheres for {final_vertices} graph vertices")
    checks["vertex_spheres"] = sphere_ok

    cusps = _cusp_surfaces(g, uf)
    cusp_ok = not cusps["bad"]
    if not cusp_ok:
        violations.append("a cusp cross-section is neither an annulus nor a torus")
    if g.final is not None and g.odd_twist_unzips == 0:
        want = (len(g.final.edges), len(g.final.circles) + g.unzips)
        have = (cusps["annuli"], cusps["tori"])
        if want != have:
            cusp_ok = False
            violations.append(f"cusps {have} do not match graph edges/circles {want}")
    checks["cusps"] = cusp_ok

    ok = not violations
    return GluingReport(ok, n, expected, violations, valences, cusps, len(comps), checks)


def _cusp_surfaces(g: OctGluing, edge_uf: _UF) -> dict:
    """Assemble the red squares; corners are the ordered-edge classes."""
    n = len(g.octs)
    sq = _UF()
    sedge = _UF()
    for o in range(n):
        for iv in IDEAL_VERTICES:
            sq.find((o, iv))
            for f in ALL_FACES:
                if iv in face_vertices(f):
                    sedge.find((o, iv, f))
    for (o1, f1), ((o2, f2), vmap) in g.pairings.items():
        for iv in face_vertices(f1):
            sq.union((o1, iv), (o2, vmap[iv]))
            sedge.union((o1, iv, f1), (o2, vmap[iv], f2))
    comp_of = {}
    stats_: dict = {}
    for o in range(n):
        for iv in IDEAL_VERTICES:
            c = sq.find((o, iv))
            comp_of[(o, iv)] = c
            stats_.setdefault(c, {"F": 0, "E": set(), "V": set(), "B": _UF(), "bedges": []})
            s = stats_[c]
            s["F"] += 1
            for f in ALL_FACES:
                vs = face_vertices(f)
                if iv not in vs:
                    continue
                s["E"].add(sedge.find((o, iv, f)))
                ws = [w for w in vs if w != iv]
                corners = [edge_uf.find((o, iv, w)) for w in ws]
                s["V"].update(corners)
                if (o, f) not in g.pairings:
                    s["bedges"].append(corners)
    annuli = tori = 0
    bad = []
    for c, s in stats_.items():
        chi = len(s["V"]) - len(s["E"]) + s["F"]
        b = s["B"]
        for c1, c2 in s["bedges"]:
            b.union(c1, c2)
        nb = len({b.find(c1) for c1, _ in s["bedges"]})
        if chi == 0 and nb == 2:
            annuli += 1
        elif chi == 0 and nb == 0:
            tori += 1
        else:
            bad.append({"chi": chi, "boundary": nb})
    return {"annuli": annuli, "tori": tori, "bad": bad}


# ---------------------------------------------------------------------------
# volumes

def lobachevsky(theta: float) -> float:
    """-int_0^theta log|2 sin t| dt."""
    th = math.fmod(theta, math.pi)
    if th < 0:
        th += math.pi
    if th == 0.0:
        return 0.0
    if th > math.pi / 2:
        return -lobachevsky(math.pi - th)
    # split off log t, which carries the singularity at 0
    smooth, _ = quad(lambda t: math.log(2 * math.sin(t) / t) if t > 0 else math.log(2.0),
                     0.0, th, epsabs=1e-14, epsrel=1e-13, limit=200)
    return -(smooth + th * math.log(th) - th)


def vol_oct() -> float:
    """Volume of the regular ideal octahedron, 8 Lambda(pi/4)."""
    return 8 * lobachevsky(math.pi / 4)


@dataclass
class JSJReport:
    seifert_pieces: list
    hyperbolic_piece_volume: float
    total_volume: float
    octahedra: int


def volume(seq: MoveSequence) -> JSJReport:
    st = stats(seq)
    if any(m == 0 for m in st.per_unzip_rings):
        raise NotAugmented("every unzip needs at least one ring")
    hyp = (2 * st.t + 2) * vol_oct()
    seifert = [m for m in st.per_unzip_rings if m >= 2]
    return JSJReport(seifert, hyp, hyp, 2 * st.t + 2)


def asymptotic_series(N_list) -> list[dict]:
    """Rows of ``(2 pi / N) log sixj_N`` against ``2 Vol(Oct)``."""
    target = 2 * vol_oct()
    rows = []
    for N in N_list:
        if N % 2 == 0 or N < 3:
            raise ValueError(f"N must be odd and at least 3, got {N}")
        lhs = 2 * math.pi / N * log_sixj_N(N)
        rows.append({"N": N, "lhs": lhs, "target": target, "error": abs(lhs - target)})
    return rows


# ---------------------------------------------------------------------------
# export

def gluing_json(g: OctGluing) -> str:
    unpaired = [(o, f) for o in range(len(g.octs)) for f in ALL_FACES if (o, f) not in g.pairings]
    rep = verify_gluing(g)
    doc = {
        "octs": [{"id": o.id, "orientation": o.orientation, "faces": o.faces()} for o in g.octs],
        "pairings": [
            {"a": [a[0], face_name(a[1])], "b": [b[0], face_name(b[1])],
             "rot": _perm_index(vm, a[1], b[1])}
            for a, b, vm in g.pairing_list()
        ],
        "boundary": {
            "vertex_spheres": [
                {"vertex": v, "upper": [s["upper"][0], face_name(s["upper"][1])],
                 "lower": [s["lower"][0], face_name(s["lower"][1])]}
                for v, s in sorted(g.spheres.items())
            ],
            "unpaired_blue": [[o, face_name(f)] for o, f in unpaired],
            "cusps": {"annuli": rep.cusps["annuli"], "tori": rep.cusps["tori"]},
        },
    }
    return json.dumps(doc, indent=2, sort_keys=True)


def asymptotics_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["N", "lhs", "target", "error"])
    for r in rows:
        w.writerow([r["N"], repr(r["lhs"]), repr(r["target"]), repr(r["error"])])
    return buf.getvalue()
