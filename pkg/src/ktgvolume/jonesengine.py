"""Colored Jones values of KTGs from move sequences.

The sequence is replayed forward to collect traces, then undone move by
move on a labeled graph.  Undoing an unzip fuses two strands into a fresh
summation variable; undoing a triangle contracts it to a vertex; undoing a
half twist pulls out a framing factor.  What is left is the tetrahedron.
The resulting expression is a nest of sums over a product of atoms.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .ktgmodel import (
    MoveSequence, TriangleTrace, TwistTrace, UnzipTrace, replay, sequence_hash, stats,
)
from .qarith import PrecisionExhausted, RatFun, RootJet, jet_sum
from .qsymbols import (
    QProduct, TetLabels, admissible, halftwist_product, log_sixj_N, phi_N, qint_jet, ring_product,
    tet_terms, theta_product, unknot_value,
)

__all__ = [
    "Atom", "Sum", "Product", "JonesExpr", "AugmentationBound", "TwistedUnzip",
    "NotReducible", "BudgetExceeded", "UnexpectedPole", "NotAugmented",
    "build_expression", "eval_generic", "eval_at_root", "augmented_closed_form",
    "sufficient_ring_count", "verify_conjecture", "ConjectureReport", "result_record",
    "closed_form_log_modulus", "valuation_lower_bound", "records_json",
]


class TwistedUnzip(ValueError):
    pass


class NotReducible(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class UnexpectedPole(ArithmeticError):
    pass


class NotAugmented(ValueError):
    pass


# ---------------------------------------------------------------------------
# expression tree

@dataclass(frozen=True)
class Atom:
    """One factor.  Labels are ``"N"`` or variable names.

    kinds: theta(a,b,c), tet(j1..j6), unknot(a), halftwist(a) with ``sign``,
    ring(c) (the ring color is N), fusion(a,b,c), and
    twisted_unzip_correction(a,b,c) raised to ``power``.
    """

    kind: str
    labels: tuple
    power: int = 1
    sign: int = 0


@dataclass(frozen=True)
class Product:
    children: tuple = ()


@dataclass(frozen=True)
class Sum:
    var: str
    a: str
    b: str
    body: object


@dataclass
class JonesExpr:
    root: object
    variables: tuple
    split_components: int = 1
    stats: object = None

    def atoms(self) -> list[Atom]:
        out = []

        def walk(node):
            if isinstance(node, Atom):
                out.append(node)
            elif isinstance(node, Product):
                for c in node.children:
                    walk(c)
            else:
                walk(node.body)

        walk(self.root)
        return out

    def size(self, N: int) -> int:
        """Number of points in the summation lattice."""
        def walk(node, env):
            if isinstance(node, Atom):
                return 1
            if isinstance(node, Product):
                total = 1
                for c in node.children:
                    total *= walk(c, env)
                return total
            a, b = _lookup(node.a, env, N), _lookup(node.b, env, N)
            return sum(walk(node.body, {**env, node.var: c}) for c in _fusion_range(a, b)) or 0

        return walk(self.root, {})


def _lookup(label: str, env: dict, N: int) -> int:
    return N if label == "N" else env[label]


def _fusion_range(a: int, b: int) -> range:
    return range(abs(a - b) + 1, a + b, 2)


def _nest(variables: list, atoms: list[Atom]):
    """Hang every atom at the level of its innermost variable."""
    depth = {v[0]: i + 1 for i, v in enumerate(variables)}
    levels: list[list] = [[] for _ in range(len(variables) + 1)]
    for atom in atoms:
        d = max((depth.get(lab, 0) for lab in atom.labels), default=0)
        levels[d].append(atom)
    body = Product(tuple(levels[-1]))
    for i in range(len(variables) - 1, -1, -1):
        var, a, b = variables[i]
        body = Product(tuple(levels[i]) + (Sum(var, a, b, body),))
    return body


def build_expression(seq: MoveSequence, mode: str = "strict") -> JonesExpr:
    """Undo ``seq`` on the all-N labeled graph and collect the factors."""
    if mode not in ("strict", "lenient"):
        raise ValueError(f"unknown mode {mode!r}")
    try:
        states, traces = replay(seq)
    except Exception as exc:
        raise NotReducible(str(exc)) from exc
    final = states[-1]
    labels = {e: "N" for e in final.edges}
    labels.update({c: "N" for c in final.circles})
    atoms: list[Atom] = []
    variables: list[tuple] = []

    for trace in reversed(traces):
        if isinstance(trace, TwistTrace):
            atoms.append(Atom("halftwist", (labels[trace.edge],), 1, trace.sign))
        elif isinstance(trace, TriangleTrace):
            t01, t12, t20 = trace.triangle_edges
            x, y, z = (labels[d[0]] for d in trace.outer)
            p, q, r = labels.pop(t01), labels.pop(t12), labels.pop(t20)
            atoms.append(Atom("tet", (x, y, z, p, q, r)))
            atoms.append(Atom("theta", (x, y, z), -1))
        elif isinstance(trace, UnzipTrace):
            if trace.twist and mode == "strict":
                raise TwistedUnzip(f"e{trace.edge} carries {trace.twist} half twists when unzipped")
            s1 = trace.strand_via("a1b2")
            s2 = trace.strand_via("a2b1")
            la, lb = labels[s1.new_id], labels[s2.new_id]
            c = f"c{len(variables) + 1}"
            variables.append((c, la, lb))
            for s in trace.strands:
                lab = labels.pop(s.new_id)
                for old in s.old_edges:
                    labels[old] = lab
            labels[trace.edge] = c
            atoms.append(Atom("fusion", (la, lb, c)))
            if trace.rings:
                atoms.append(Atom("ring", (c,), len(trace.rings)))
            if trace.twist:
                atoms.append(Atom("twisted_unzip_correction", (la, lb, c), trace.twist))
        else:  # pragma: no cover
            raise NotReducible(f"unknown trace {trace!r}")

    base = states[0]
    atoms.append(Atom("tet", tuple(labels[e] for e in sorted(base.edges))))
    return JonesExpr(_nest(variables, atoms), tuple(variables), seq.declared_split_components, stats(seq))


# ---------------------------------------------------------------------------
# atom values

def _unknot_q(a) -> QProduct:
    return QProduct.build((-1) ** (a - 1), qints={a: 1})


def _atom_parts(atom: Atom, env: dict, N: int):
    """``(QProduct, tet labels or None)``; None as a whole means the atom vanishes."""
    vals = [_lookup(l, env, N) for l in atom.labels]
    k = atom.kind
    if k == "tet":
        t = TetLabels(*vals)
        if not t.is_admissible():
            return None
        return QProduct.build(1), t
    if k in ("theta", "fusion", "twisted_unzip_correction"):
        if not admissible(*vals):
            return None
    if k == "theta":
        q = theta_product(*vals)
    elif k == "fusion":
        a, b, c = vals
        q = _unknot_q(c) * theta_product(a, b, c).inverse()
    elif k == "unknot":
        q = _unknot_q(vals[0])
    elif k == "halftwist":
        q = halftwist_product(vals[0], atom.sign)
    elif k == "ring":
        q = ring_product(vals[0], N)
    elif k == "twisted_unzip_correction":
        a, b, c = vals
        q = halftwist_product(c, 1) * (halftwist_product(a, 1) * halftwist_product(b, 1)).inverse()
    else:
        raise ValueError(f"unknown atom kind {k!r}")
    return q ** atom.power, None


class _Evaluator:
    """Shared lattice walk; subclasses fix the coefficient domain."""

    def __init__(self, N: int, budget: int | None):
        self.N = N
        self.budget = budget
        self.visited = 0

    def leaf(self, qprod: QProduct, tets: list):
        raise NotImplementedError

    def add(self, values: list):
        raise NotImplementedError

    def mul(self, x, y):
        return x * y

    def zero(self):
        raise NotImplementedError

    def run(self, node, env):
        return self._product([node], env, QProduct.build(1), [])

    def _product(self, nodes, env, acc_q, acc_t):
        sums = []
        for node in nodes:
            if isinstance(node, Product):
                # flatten nested products
                stack = list(node.children)
                while stack:
                    ch = stack.pop(0)
                    if isinstance(ch, Product):
                        stack[:0] = list(ch.children)
                    elif isinstance(ch, Atom):
                        parts = _atom_parts(ch, env, self.N)
                        if parts is None:
                            return self.zero()
                        q, t = parts
                        acc_q = acc_q * q
                        if t is not None:
                            acc_t = acc_t + [t]
                    else:
                        sums.append(ch)
            elif isinstance(node, Atom):
                return self._product([Product((node,))], env, acc_q, acc_t)
            else:
                sums.append(node)
        if acc_q.is_zero():
            return self.zero()
        if not sums:
            self.visited += 1
            if self.budget is not None and self.visited > self.budget:
                raise BudgetExceeded(f"more than {self.budget} summands")
            return self.leaf(acc_q, acc_t)
        if len(sums) > 1:
            raise NotReducible("parallel sums are not produced by build_expression")
        s = sums[0]
        a, b = _lookup(s.a, env, self.N), _lookup(s.b, env, self.N)
        vals = [self._product([s.body], {**env, s.var: c}, acc_q, acc_t) for c in _fusion_range(a, b)]
        return self.add(vals)


class _RatFunEval(_Evaluator):
    def leaf(self, q, tets):
        from .qsymbols import tet_value
        out = q.to_ratfun()
        for t in tets:
            out = out * tet_value(t)
        return out

    def add(self, values):
        total = RatFun(0)
        for v in values:
            total = total + v
        return total

    def zero(self):
        return RatFun(0)


class _NumericEval(_Evaluator):
    def __init__(self, N, budget, A):
        super().__init__(N, budget)
        self.A = complex(A)

    def leaf(self, q, tets):
        out = q.evaluate(self.A)
        for t in tets:
            pre, terms = tet_terms(t)
            out *= pre.evaluate(self.A) * _csum(term.evaluate(self.A) for term in terms)
        return out

    def add(self, values):
        return _csum(values)

    def zero(self):
        return 0j


def _csum(values: Iterable[complex]) -> complex:
    vals = list(values)
    return complex(math.fsum(v.real for v in vals), math.fsum(v.imag for v in vals))


def valuation_lower_bound(q: QProduct, tets: list, N: int) -> int:
    """A cheap bound below the order of vanishing of a summand at zeta_N."""
    v = q.valuation(N)
    for t in tets:
        pre, terms = tet_terms(t)
        v += pre.valuation(N) + min(term.valuation(N) for term in terms)
    return v


class _JetEval(_Evaluator):
    def __init__(self, N, budget, precision, horizon):
        super().__init__(N, budget)
        self.precision = precision
        self.horizon = horizon
        self.skipped = 0

    def leaf(self, q, tets):
        # summands vanishing beyond the horizon cannot affect the result;
        # skipping them also keeps high ring powers from overflowing
        if valuation_lower_bound(q, tets, self.N) >= self.horizon:
            self.skipped += 1
            return RootJet(self.N, self.horizon, ())
        out = q.jet(self.N, self.precision)
        for t in tets:
            pre, terms = tet_terms(t)
            out = out * pre.jet(self.N, self.precision) * jet_sum(
                term.jet(self.N, self.precision) for term in terms)
        return out

    def add(self, values):
        return jet_sum(values)

    def zero(self):
        return RootJet.zero(self.N)


DEFAULT_SYMBOLIC_BUDGET = 20_000
DEFAULT_NUMERIC_BUDGET = 2_000_000


def eval_generic(expr: JonesExpr, N: int, A=None, normalize: bool = False,
                 budget: int | None = None):
    """Expand all sums.  ``A=None`` gives an exact RatFun, otherwise a complex number."""
    if N < 1:
        raise ValueError("N must be positive")
    if A is None:
        ev = _RatFunEval(N, budget or DEFAULT_SYMBOLIC_BUDGET)
        val = ev.run(expr.root, {})
        if normalize:
            val = val / RatFun(unknot_value(N)) ** expr.split_components
        return val
    ev = _NumericEval(N, budget or DEFAULT_NUMERIC_BUDGET, A)
    val = ev.run(expr.root, {})
    if normalize:
        val /= complex(unknot_value(N)(complex(A))) ** expr.split_components
    return val


def eval_at_root(expr: JonesExpr, N: int, precision: int = 2, max_precision: int = 16,
                 budget: int | None = None) -> complex:
    """Normalized value at ``A = exp(i pi / 2N)`` via jets."""
    if N < 1:
        raise ValueError("N must be positive")
    if N == 1:
        return 1 + 0j
    s = expr.split_components
    p = precision
    while True:
        try:
            ev = _JetEval(N, budget or DEFAULT_NUMERIC_BUDGET, p, s + p)
            total = ev.run(expr.root, {})
            if total.is_exact_zero():
                return 0j
            norm = qint_jet(N, N, p) * float((-1) ** (N - 1))
            ratio = total / norm ** s
            if ratio.valuation < 0 and ratio.coeffs:
                raise UnexpectedPole(
                    f"normalized value has a pole of order {-ratio.valuation} at zeta_{N}")
            return ratio.value()
        except PrecisionExhausted:
            if p >= max_precision:
                raise
            p *= 2


# ---------------------------------------------------------------------------
# closed form and ring bound

def augmented_closed_form(seq: MoveSequence, N: int) -> complex:
    st = stats(seq)
    if any(m == 0 for m in st.per_unzip_rings):
        raise NotAugmented("every unzip needs at least one ring")
    if N % 2 == 0:
        return 0j
    if N == 1:
        return 1 + 0j
    return phi_N(N) ** st.theta * math.exp(_log_modulus(st, N))


def _log_modulus(st, N: int) -> float:
    return st.r * math.log(N) + (st.t + 1) * log_sixj_N(N)


def closed_form_log_modulus(seq: MoveSequence, N: int) -> float:
    """``log |J_N|`` from the closed form; ``-inf`` for even N."""
    st = stats(seq)
    if any(m == 0 for m in st.per_unzip_rings):
        raise NotAugmented("every unzip needs at least one ring")
    if N % 2 == 0:
        return -math.inf
    if N == 1:
        return 0.0
    return _log_modulus(st, N)


@dataclass(frozen=True)
class AugmentationBound:
    a: int
    f: int
    n: int


def _growth(expr: JonesExpr) -> dict:
    """Leading N-coefficient of the largest value each label can take."""
    g = {"N": Fraction(1)}
    for var, a, b in expr.variables:
        g[var] = g[a] + g[b]
    return g


def sufficient_ring_count(seq: MoveSequence, mode: str = "strict") -> AugmentationBound:
    """``a``: largest factorial argument over N; ``f``: factorials in a summand denominator."""
    expr = build_expression(seq, mode)
    g = _growth(expr)
    a = Fraction(1)
    f = expr.split_components  # the normalization by the unknot
    for atom in expr.atoms():
        labs = [g[l] for l in atom.labels]
        k = atom.kind
        if k == "tet":
            sq = TetLabels.SQUARES
            a = max(a, max(sum(labs[i] for i in s) / 2 for s in sq))
            f += 13 * atom.power
        elif k in ("theta", "fusion"):
            a = max(a, sum(labs) / 2)
            f += (4 if atom.power < 0 or k == "fusion" else 3) * abs(atom.power)
        elif k == "unknot" and atom.power < 0:
            f += -atom.power
    a_int = math.ceil(a)
    return AugmentationBound(a_int, f, a_int * f + 1)


# ---------------------------------------------------------------------------
# conjecture report

@dataclass
class ConjectureRow:
    N: int
    log_abs: float | None
    lhs: float | None
    target: float
    error: float | None
    multisum_check: float | None = None


@dataclass
class ConjectureReport:
    rows: list
    target: float
    t: int
    odd_errors_decreasing: bool
    even_values_zero: bool
    so3_supported: bool
    original_fails: bool
    notes: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "target": self.target, "t": self.t,
            "odd_errors_decreasing": self.odd_errors_decreasing,
            "even_values_zero": self.even_values_zero,
            "so3_supported": self.so3_supported,
            "original_fails": self.original_fails,
            "rows": [vars(r) for r in self.rows],
            "notes": list(self.notes),
        }


def verify_conjecture(seq: MoveSequence, N_list: Sequence[int], multisum_max_N: int = 7,
                      vol_oct: float | None = None) -> ConjectureReport:
    """Tabulate ``(2 pi / N) log |J_N|`` against ``2 (t+1) Vol(Oct)``."""
    if vol_oct is None:
        from .octgeom import vol_oct as _vo
        vol_oct = _vo()
    st = stats(seq)
    target = 2 * (st.t + 1) * vol_oct
    expr = None
    rows = []
    notes = []
    for N in sorted(set(N_list)):
        logmod = closed_form_log_modulus(seq, N)
        check = None
        if 2 <= N <= multisum_max_N:
            expr = expr or build_expression(seq)
            ms = eval_at_root(expr, N)
            val = augmented_closed_form(seq, N)
            check = abs(ms - val) / max(abs(val), 1.0)
            if check > 1e-9:
                notes.append(f"multisum and closed form differ at N={N} (relative {check:.3g})")
        if logmod == -math.inf:
            rows.append(ConjectureRow(N, None, None, target, None, check))
            continue
        lhs = 2 * math.pi / N * logmod
        rows.append(ConjectureRow(N, logmod, lhs, target, abs(lhs - target), check))
    odd = [r for r in rows if r.N % 2 == 1 and r.N > 1]
    errs = [r.error for r in odd]
    decreasing = all(x > y for x, y in zip(errs, errs[1:])) and len(errs) >= 2
    evens = [r for r in rows if r.N % 2 == 0]
    even_zero = all(r.log_abs is None for r in evens)
    if evens and even_zero:
        notes.append("even N give J_N = 0, so the limit over all N does not exist")
    return ConjectureReport(rows, target, st.t, decreasing, even_zero,
                            so3_supported=decreasing, original_fails=bool(evens) and even_zero,
                            notes=notes)


def result_record(seq: MoveSequence, N: int, value: complex, method: str) -> dict:
    st = stats(seq)
    return {
        "sequence_hash": sequence_hash(seq), "N": N,
        "value_re": value.real, "value_im": value.imag, "method": method,
        "stats": {"t": st.t, "u": st.u, "theta": st.theta, "r": st.r},
    }


def records_json(records: list[dict]) -> str:
    return json.dumps(records, indent=2, sort_keys=True)
