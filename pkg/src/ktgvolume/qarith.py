"""Exact coefficient arithmetic for colored skein values.

Elements live in Q[A^(1/2), A^(-1/2)] extended by a formal unit ``h`` with
``h**2 == -A**3``.  Exponents of A are stored doubled so that every key is an
integer.  :class:`RatFun` keeps denominators as products of cyclotomic
factors ``Phi_d(A^4)`` (every quantum integer factors this way), with a
fallback general factor for anything else.

:class:`RootJet` holds truncated Taylor data around ``zeta_N = exp(i pi/2N)``
and is what the Jones evaluator uses to cancel poles against zeros.
"""
from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

__all__ = [
    "TwistLaurent", "RatFun", "RootJet", "DivisionByZero", "PoleAtPoint",
    "PrecisionExhausted", "poly_arith", "ratfun_arith", "eval_exact",
    "jet_eval", "jet_sum", "monomial_jet", "cyclotomic", "zeta",
    "ZERO_TOL",
]

ZERO_TOL = 1e-9


class DivisionByZero(ZeroDivisionError):
    pass


class PoleAtPoint(ArithmeticError):
    pass


class PrecisionExhausted(ArithmeticError):
    pass


def _norm(c):
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


# ---------------------------------------------------------------------------
# dense helpers (coefficient lists, lowest degree first)

@lru_cache(maxsize=None)
def cyclotomic(n: int) -> tuple[int, ...]:
    """Integer coefficients of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ValueError("n must be positive")
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly, rem = _divmod_dense(poly, list(cyclotomic(d)))
            assert not any(rem)
    return tuple(int(c) for c in poly)


def _divmod_dense(num: list, den: list):
    num = list(num)
    while den and den[-1] == 0:
        den = den[:-1]
    if not den:
        raise DivisionByZero("division by zero polynomial")
    dd = len(den) - 1
    lead = den[-1]
    if len(num) - 1 < dd:
        return [0], num
    q = [0] * (len(num) - dd)
    for i in range(len(num) - 1 - dd, -1, -1):
        c = num[i + dd]
        if c == 0:
            continue
        c = _norm(Fraction(c) / lead) if lead != 1 else c
        q[i] = c
        for j in range(dd + 1):
            if den[j]:
                num[i + j] -= c * den[j]
    return q, num[:dd] if dd else [0]


def _totient(n: int) -> int:
    result, m, p = n, n, 2
    while p * p <= m:
        if m % p == 0:
            while m % p == 0:
                m //= p
            result -= result // p
        p += 1
    if m > 1:
        result -= result // m
    return result


# ---------------------------------------------------------------------------

class TwistLaurent:
    """Laurent polynomial in ``A^(1/2)`` with an optional factor ``h``.

    ``terms`` maps ``(h_grade, doubled_exponent)`` to a rational coefficient.
    Instances are immutable and compare structurally.
    """

    __slots__ = ("_t", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], object] | None = None):
        t = {}
        if terms:
            for (g, e), c in terms.items():
                if c == 0:
                    continue
                if g not in (0, 1):
                    raise ValueError("h-grade must be 0 or 1; reduce first")
                t[(g, int(e))] = _norm(c if isinstance(c, (int, Fraction)) else Fraction(c))
        self._t = t
        self._hash = None

    @classmethod
    def _raw(cls, t: dict) -> "TwistLaurent":
        obj = cls.__new__(cls)
        obj._t = t
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "TwistLaurent":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, exp2: int = 0, h: int = 0, coeff=1) -> "TwistLaurent":
        """``coeff * A^(exp2/2) * h^h`` with any integer power of h."""
        sign = 1
        q, g = divmod(h, 2)
        # h^(2q) = (-A^3)^q
        if q % 2:
            sign = -1
        return cls({(g, exp2 + 6 * q): sign * coeff})

    @classmethod
    def A(cls, power=1) -> "TwistLaurent":
        e2 = Fraction(power) * 2
        if e2.denominator != 1:
            raise ValueError("only half-integer powers of A are representable")
        return cls.monomial(int(e2))

    @classmethod
    def h(cls) -> "TwistLaurent":
        return cls.monomial(0, 1)

    # inspection -------------------------------------------------------
    @property
    def terms(self) -> dict:
        return dict(self._t)

    def is_zero(self) -> bool:
        return not self._t

    def is_h_free(self) -> bool:
        return all(g == 0 for g, _ in self._t)

    def is_monomial(self) -> bool:
        return len(self._t) == 1

    def min_exp2(self) -> int:
        return min(e for _, e in self._t)

    def max_exp2(self) -> int:
        return max(e for _, e in self._t)

    def constant_value(self):
        if not self._t:
            return 0
        if list(self._t) == [(0, 0)]:
            return self._t[(0, 0)]
        return None

    def __bool__(self):
        return bool(self._t)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = TwistLaurent.const(other)
        if not isinstance(other, TwistLaurent):
            return NotImplemented
        return self._t == other._t

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._t.items()))
        return self._hash

    # arithmetic -------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "TwistLaurent":
        if isinstance(x, TwistLaurent):
            return x
        if isinstance(x, (int, Fraction)):
            return TwistLaurent.const(x)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self._t)
        for k, c in other._t.items():
            v = t.get(k, 0) + c
            if v == 0:
                t.pop(k, None)
            else:
                t[k] = _norm(v)
        return TwistLaurent._raw(t)

    __radd__ = __add__

    def __neg__(self):
        return TwistLaurent._raw({k: -c for k, c in self._t.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return TwistLaurent._raw({})
            return TwistLaurent._raw({k: _norm(c * other) for k, c in self._t.items()})
        if not isinstance(other, TwistLaurent):
            return NotImplemented
        a, b = self._t, other._t
        if len(a) < len(b):
            a, b = b, a
        t: dict = {}
        get = t.get
        for (g1, e1), c1 in b.items():
            for (g2, e2), c2 in a.items():
                if g1 and g2:
                    key = (0, e1 + e2 + 6)
                    c = -c1 * c2
                else:
                    key = (g1 | g2, e1 + e2)
                    c = c1 * c2
                t[key] = get(key, 0) + c
        return TwistLaurent._raw({k: _norm(c) for k, c in t.items() if c != 0})

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            if not self.is_monomial():
                raise ValueError("negative powers only for monomials")
            return self.inverse_monomial() ** (-n)
        result = TwistLaurent.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def inverse_monomial(self) -> "TwistLaurent":
        ((g, e), c), = self._t.items()
        inv = Fraction(1) / c
        if g == 0:
            return TwistLaurent({(0, -e): inv})
        # (c A^(e/2) h)^-1 = h / (c A^(e/2) h^2) = -h A^(-e/2 - 3) / c
        return TwistLaurent({(1, -e - 6): -inv})

    def conj(self) -> "TwistLaurent":
        """Flip the sign of h (the other square root of -A^3)."""
        return TwistLaurent._raw({(g, e): (-c if g else c) for (g, e), c in self._t.items()})

    def shift(self, exp2: int) -> "TwistLaurent":
        return TwistLaurent._raw({(g, e + exp2): c for (g, e), c in self._t.items()})

    def scale(self, c) -> "TwistLaurent":
        return self * c

    def h_parts(self) -> tuple["TwistLaurent", "TwistLaurent"]:
        p0 = {(0, e): c for (g, e), c in self._t.items() if g == 0}
        p1 = {(0, e): c for (g, e), c in self._t.items() if g == 1}
        return TwistLaurent._raw(p0), TwistLaurent._raw(p1)

    @staticmethod
    def from_h_parts(p0: "TwistLaurent", p1: "TwistLaurent") -> "TwistLaurent":
        t = dict(p0._t)
        for (_, e), c in p1._t.items():
            t[(1, e)] = c
        return TwistLaurent._raw(t)

    # division ---------------------------------------------------------
    def divide_exact(self, other: "TwistLaurent") -> "TwistLaurent | None":
        """Exact quotient by an h-free divisor, or None if it does not divide."""
        if not other.is_h_free():
            raise ValueError("divisor must be h-free")
        if other.is_zero():
            raise DivisionByZero("division by zero polynomial")
        if self.is_zero():
            return self
        dmin = other.min_exp2()
        den = _dense(other, dmin)
        parts = []
        for part in self.h_parts():
            if part.is_zero():
                parts.append(part)
                continue
            pmin = part.min_exp2()
            q, r = _divmod_dense(_dense(part, pmin), den)
            if any(r):
                return None
            parts.append(TwistLaurent({(0, i + pmin - dmin): c for i, c in enumerate(q) if c}))
        return TwistLaurent.from_h_parts(*parts)

    # evaluation -------------------------------------------------------
    def __call__(self, A: complex) -> complex:
        return self.evaluate(A)

    def evaluate(self, A) -> complex:
        A = complex(A)
        if A == 0:
            raise PoleAtPoint("A = 0")
        logA = cmath.log(A)
        total = 0j
        for (g, e), c in self._t.items():
            p = e / 2 + 1.5 * g
            total += float(c) * (1j if g else 1) * cmath.exp(p * logA)
        return total

    def __repr__(self):
        if not self._t:
            return "TwistLaurent(0)"
        parts = []
        for (g, e), c in sorted(self._t.items(), key=lambda kv: (kv[0][1], kv[0][0]), reverse=True):
            mon = "" if e == 0 else (f"A^{e // 2}" if e % 2 == 0 else f"A^({e}/2)")
            if g:
                mon = (mon + "*h") if mon else "h"
            parts.append(f"{c}*{mon}" if mon else f"{c}")
        return "TwistLaurent(" + " + ".join(parts) + ")"


def _dense(p: TwistLaurent, base: int) -> list:
    out = [0] * (p.max_exp2() - base + 1)
    for (_, e), c in p._t.items():
        out[e - base] = c
    return out


@lru_cache(maxsize=None)
def phi_a4(d: int) -> TwistLaurent:
    """Phi_d(A^4) as a TwistLaurent."""
    return TwistLaurent({(0, 8 * i): c for i, c in enumerate(cyclotomic(d)) if c})


def _class_polys(p: TwistLaurent):
    """Split into h-grade / (exp2 mod 8) classes, each a dense poly in y = A^4."""
    groups: dict = {}
    for (g, e), c in p._t.items():
        groups.setdefault((g, e % 8), {})[e // 8] = c
    out = {}
    for key, mp in groups.items():
        lo = min(mp)
        dense = [0] * (max(mp) - lo + 1)
        for k, c in mp.items():
            dense[k - lo] = c
        out[key] = (lo, dense)
    return out


def _phi_divides_numerically(dense: list, d: int) -> bool:
    y = cmath.exp(2j * math.pi / d)
    val = 0j
    scale = 0.0
    for c in reversed(dense):
        val = val * y + float(c)
        scale += abs(float(c))
    return abs(val) <= 1e-7 * max(scale, 1e-300)


def _divide_by_phi(p: TwistLaurent, d: int) -> TwistLaurent | None:
    """p / Phi_d(A^4) if exact, else None."""
    if p.is_zero():
        return p
    classes = _class_polys(p)
    for _, dense in classes.values():
        if not _phi_divides_numerically(dense, d):
            return None
    phi = list(cyclotomic(d))
    t = {}
    for (g, r), (lo, dense) in classes.items():
        q, rem = _divmod_dense(dense, phi)
        if any(rem):
            return None
        for i, c in enumerate(q):
            if c:
                t[(g, 8 * (lo + i) + r)] = c
    return TwistLaurent._raw(t)


def poly_arith(a: TwistLaurent, b: TwistLaurent, op: str) -> TwistLaurent:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------

_ONE = TwistLaurent.const(1)


class RatFun:
    """Quotient ``num / (prod Phi_d(A^4)^e * extra)``.

    ``extra`` is an h-free polynomial with lowest exponent 0 and leading
    coefficient 1; it stays 1 for everything built from quantum integers.
    Equality is decided by cross-multiplication.
    """

    __slots__ = ("num", "cyclo", "extra")

    def __init__(self, num, den=None):
        num = TwistLaurent._coerce(num) if not isinstance(num, TwistLaurent) else num
        if den is None:
            self.num, self.cyclo, self.extra = num, {}, _ONE
            return
        den = TwistLaurent._coerce(den) if not isinstance(den, TwistLaurent) else den
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        n, cyc, ex = _split_denominator(num, den)
        self.num, self.cyclo, self.extra = n, cyc, ex
        self._reduce()

    @classmethod
    def _make(cls, num: TwistLaurent, cyclo: dict, extra: TwistLaurent = _ONE, reduce=True) -> "RatFun":
        obj = cls.__new__(cls)
        obj.num = num
        obj.cyclo = {d: e for d, e in cyclo.items() if e}
        obj.extra = extra
        if reduce:
            obj._reduce()
        return obj

    def _reduce(self):
        if self.num.is_zero():
            self.cyclo, self.extra = {}, _ONE
            return
        for d in sorted(self.cyclo):
            e = self.cyclo[d]
            while e:
                q = _divide_by_phi(self.num, d)
                if q is None:
                    break
                self.num, e = q, e - 1
            if e:
                self.cyclo[d] = e
            else:
                del self.cyclo[d]
        if self.extra != _ONE:
            q = self.num.divide_exact(self.extra)
            if q is not None:
                self.num, self.extra = q, _ONE

    # ------------------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        if isinstance(x, (TwistLaurent, int, Fraction)):
            return RatFun(x)
        return NotImplemented

    def den_poly(self) -> TwistLaurent:
        out = self.extra
        for d, e in sorted(self.cyclo.items()):
            out = out * phi_a4(d) ** e
        return out

    @property
    def den(self) -> TwistLaurent:
        return self.den_poly()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_polynomial(self) -> bool:
        return not self.cyclo and self.extra == _ONE

    def as_laurent(self) -> TwistLaurent:
        if not self.is_polynomial():
            raise ValueError("not a Laurent polynomial")
        return self.num

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RatFun(TwistLaurent())
        cyc = dict(self.cyclo)
        for d, e in other.cyclo.items():
            cyc[d] = cyc.get(d, 0) + e
        extra = self.extra if other.extra == _ONE else (other.extra if self.extra == _ONE else self.extra * other.extra)
        return RatFun._make(self.num * other.num, cyc, extra)

    __rmul__ = __mul__

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        cyc = {d: max(self.cyclo.get(d, 0), other.cyclo.get(d, 0)) for d in set(self.cyclo) | set(other.cyclo)}
        a_num = self.num
        b_num = other.num
        for d, e in cyc.items():
            if e - self.cyclo.get(d, 0):
                a_num = a_num * phi_a4(d) ** (e - self.cyclo.get(d, 0))
            if e - other.cyclo.get(d, 0):
                b_num = b_num * phi_a4(d) ** (e - other.cyclo.get(d, 0))
        if self.extra == other.extra:
            extra = self.extra
        else:
            a_num = a_num * other.extra
            b_num = b_num * self.extra
            extra = self.extra * other.extra
        return RatFun._make(a_num + b_num, cyc, extra)

    __radd__ = __add__

    def __neg__(self):
        return RatFun._make(-self.num, self.cyclo, self.extra, reduce=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def inverse(self) -> "RatFun":
        if self.is_zero():
            raise DivisionByZero("inverse of zero")
        return RatFun(self.den_poly(), self.num)

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            raise DivisionByZero("division by zero RatFun")
        if other.num.is_monomial():
            # cheap path: other = c A^k h^g / den
            inv = other.num.inverse_monomial()
            cyc = dict(self.cyclo)
            num = self.num * inv * other.extra
            for d, e in other.cyclo.items():
                num = num * phi_a4(d) ** e
            return RatFun._make(num, cyc, self.extra)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return RatFun._coerce(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RatFun(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b = self.num, other.num
        for d in set(self.cyclo) | set(other.cyclo):
            ea, eb = self.cyclo.get(d, 0), other.cyclo.get(d, 0)
            if eb > ea:
                a = a * phi_a4(d) ** (eb - ea)
            elif ea > eb:
                b = b * phi_a4(d) ** (ea - eb)
        return a * other.extra == b * self.extra

    __hash__ = None

    def evaluate(self, A) -> complex:
        den = self.den_poly().evaluate(A)
        num = self.num.evaluate(A)
        scale = sum(abs(float(c)) for c in self.den_poly()._t.values()) * max(abs(A), 1 / abs(A)) ** (
            max(abs(e) for _, e in self.den_poly()._t) / 2)
        if abs(den) <= 1e-12 * scale:
            raise PoleAtPoint(f"denominator vanishes at A={A}")
        return num / den

    __call__ = evaluate

    def __repr__(self):
        if self.is_polynomial():
            return f"RatFun({self.num!r})"
        return f"RatFun({self.num!r} / {self.den_poly()!r})"


def _split_denominator(num: TwistLaurent, den: TwistLaurent):
    """Rewrite num/den with den = prod Phi_d(A^4)^e * monic extra."""
    if not den.is_h_free():
        c = den.conj()
        num, den = num * c, den * c
    lo = den.min_exp2()
    den = den.shift(-lo)
    num = num.shift(-lo)
    cyc: dict = {}
    if all(e % 8 == 0 for _, e in den._t):
        deg = den.max_exp2() // 8
        d = 1
        while deg > 0 and d <= 4 * deg * deg + 8:
            if _totient(d) <= deg:
                q = _divide_by_phi(den, d)
                if q is not None:
                    den = q
                    deg -= _totient(d)
                    cyc[d] = cyc.get(d, 0) + 1
                    continue
            d += 1
    lc = den._t[(0, den.max_exp2())]
    if den.is_monomial() and den.max_exp2() == 0:
        return num * (Fraction(1) / lc), cyc, _ONE
    return num * (Fraction(1) / lc), cyc, den * (Fraction(1) / lc)


def ratfun_arith(a: RatFun, b: RatFun, op: str) -> RatFun:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise ValueError(f"unknown op {op!r}")


def eval_exact(f, A) -> complex:
    """Numeric value of a TwistLaurent or RatFun; ``h = i A^(3/2)`` on the principal branch."""
    if isinstance(f, TwistLaurent):
        return f.evaluate(A)
    return RatFun._coerce(f).evaluate(A)


# ---------------------------------------------------------------------------
# jets at zeta_N

def zeta(N: int) -> complex:
    return cmath.exp(1j * math.pi / (2 * N))


_EXACT_ZERO_VAL = 1 << 40


class RootJet:
    """Truncated expansion ``sum_k c_k t^(valuation+k) + O(t^(valuation+m))``, t = A - zeta_N.

    A jet with no coefficients stands for ``O(t^valuation)``; the canonical
    exact zero uses a huge valuation.
    """

    __slots__ = ("N", "valuation", "coeffs")

    def __init__(self, N: int, valuation: int, coeffs: Iterable[complex]):
        self.N = N
        self.valuation = valuation
        self.coeffs = tuple(complex(c) for c in coeffs)

    @classmethod
    def zero(cls, N: int) -> "RootJet":
        return cls(N, _EXACT_ZERO_VAL, ())

    @classmethod
    def constant(cls, N: int, c: complex, precision: int) -> "RootJet":
        if c == 0:
            return cls.zero(N)
        return cls(N, 0, [c] + [0] * (precision - 1))

    @property
    def precision(self) -> int:
        return len(self.coeffs)

    @property
    def order(self) -> int:
        """Exclusive order up to which the expansion is known."""
        return self.valuation + len(self.coeffs)

    def is_exact_zero(self) -> bool:
        return not self.coeffs and self.valuation >= _EXACT_ZERO_VAL

    def value(self) -> complex:
        if not self.coeffs:
            if self.valuation > 0:
                return 0j
            raise PrecisionExhausted("jet carries no information at order 0")
        if self.valuation > 0:
            return 0j
        if self.valuation < 0:
            raise PoleAtPoint(f"pole of order {-self.valuation} at zeta_{self.N}")
        return self.coeffs[0]

    def coefficient(self, order: int) -> complex:
        if order >= self.order:
            raise PrecisionExhausted(f"order {order} not known (jet known below {self.order})")
        if order < self.valuation:
            return 0j
        return self.coeffs[order - self.valuation]

    def __mul__(self, other):
        if isinstance(other, (int, float, complex)):
            if other == 0:
                return RootJet.zero(self.N)
            return RootJet(self.N, self.valuation, [c * other for c in self.coeffs])
        if not isinstance(other, RootJet):
            return NotImplemented
        v = self.valuation + other.valuation
        if self.is_exact_zero() or other.is_exact_zero():
            return RootJet.zero(self.N)
        m = min(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        out = [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(m)]
        return RootJet(self.N, v, out)

    __rmul__ = __mul__

    def inverse(self) -> "RootJet":
        if not self.coeffs:
            raise PrecisionExhausted("cannot invert a jet with no known coefficients")
        a = self.coeffs
        m = len(a)
        inv = [1 / a[0]]
        for k in range(1, m):
            s = sum(a[i] * inv[k - i] for i in range(1, k + 1))
            inv.append(-s / a[0])
        return RootJet(self.N, -self.valuation, inv)

    def __truediv__(self, other):
        if isinstance(other, (int, float, complex)):
            return self * (1 / other)
        return self * other.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = RootJet(self.N, 0, [1] + [0] * (max(len(self.coeffs), 1) - 1))
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __neg__(self):
        return RootJet(self.N, self.valuation, [-c for c in self.coeffs])

    def __add__(self, other):
        if not isinstance(other, RootJet):
            return NotImplemented
        return jet_sum([self, other])

    def __sub__(self, other):
        return jet_sum([self, -other])

    def __repr__(self):
        if self.is_exact_zero():
            return f"RootJet(N={self.N}, 0)"
        return f"RootJet(N={self.N}, val={self.valuation}, coeffs={list(self.coeffs)})"


def jet_sum(jets: Iterable[RootJet], tol: float = ZERO_TOL) -> RootJet:
    """Sum with leading-order cancellation detection.

    A leading coefficient is declared zero when it is below ``tol`` times the
    largest input magnitude contributing at that order.
    """
    jets = [j for j in jets if not j.is_exact_zero()]
    if not jets:
        return RootJet.zero(1)
    N = jets[0].N
    order = min(j.order for j in jets)
    v = min(j.valuation for j in jets)
    if v >= order:
        return RootJet(N, order, ())
    size = order - v
    acc = [0j] * size
    ref = [0.0] * size
    for j in jets:
        off = j.valuation - v
        for k, c in enumerate(j.coeffs):
            if off + k >= size:
                break
            acc[off + k] += c
            ref[off + k] = max(ref[off + k], abs(c))
    start = 0
    while start < size and abs(acc[start]) <= tol * ref[start]:
        start += 1
    return RootJet(N, v + start, acc[start:])


def _gen_binom(p: float, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (p - i) / (i + 1)
    return out


def monomial_jet(N: int, exp: float, order: int) -> list[complex]:
    """Taylor coefficients of A**exp at zeta_N (principal branch), orders 0..order-1."""
    z = zeta(N)
    logz = cmath.log(z)
    return [_gen_binom(exp, k) * cmath.exp((exp - k) * logz) for k in range(order)]


def _laurent_taylor(p: TwistLaurent, N: int, order: int):
    coeffs = [0j] * order
    scale = [0.0] * order
    for (g, e), c in p._t.items():
        cf = float(c) * (1j if g else 1)
        for k, t in enumerate(monomial_jet(N, e / 2 + 1.5 * g, order)):
            coeffs[k] += cf * t
            scale[k] += abs(cf * t)
    return coeffs, scale


def laurent_jet(p: TwistLaurent, N: int, precision: int, max_valuation: int = 32) -> RootJet:
    if p.is_zero():
        return RootJet.zero(N)
    order = precision + max_valuation
    coeffs, scale = _laurent_taylor(p, N, order)
    for k in range(order):
        if abs(coeffs[k]) > ZERO_TOL * scale[k]:
            return RootJet(N, k, coeffs[k:k + precision])
    raise PrecisionExhausted("every computed coefficient vanished")


def jet_eval(f, N: int, precision: int) -> RootJet:
    """Jet of ``f`` at zeta_N with ``precision`` relative coefficients."""
    f = RatFun._coerce(f)
    if f.is_zero():
        return RootJet.zero(N)
    out = laurent_jet(f.num, N, precision)
    for d, e in f.cyclo.items():
        out = out / laurent_jet(phi_a4(d), N, precision) ** e
    if f.extra != _ONE:
        out = out / laurent_jet(f.extra, N, precision)
    return out
