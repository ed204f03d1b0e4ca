"""Quantum integers and the named skein evaluations (unknot, theta, tetrahedron).

Labels are colors: an edge of color ``k`` carries ``k - 1`` strands.  Most
values are products of quantum integers, so they are kept in the factored
form :class:`QProduct` until a caller asks for an exact :class:`RatFun` or a
jet at ``zeta_N``.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .qarith import (RatFun, RootJet, TwistLaurent, jet_sum, monomial_jet,
                     phi_a4)

__all__ = [
    "DomainError", "InadmissibleTriple", "QProduct", "TetLabels",
    "qint", "qfact", "qbinom", "unknot_value", "admissible", "theta_value",
    "theta_product", "tet_terms", "tet_value", "tet_jet", "halftwist_coeff",
    "ring_coeff", "ring_coeff_at_root", "ring_limit", "phi_N", "sixj_N",
    "log_sixj_N", "qint_at_root", "qint_jet",
]


class DomainError(ValueError):
    pass


class InadmissibleTriple(ValueError):
    pass


# ---------------------------------------------------------------------------

def qint(n: int) -> TwistLaurent:
    """[n] = (A^2n - A^-2n) / (A^2 - A^-2) as a Laurent polynomial."""
    if n < 0:
        return -qint(-n)
    return TwistLaurent({(0, 4 * (n - 1) - 8 * j): 1 for j in range(n)})


@lru_cache(maxsize=None)
def qfact(n: int) -> TwistLaurent:
    if n < 0:
        raise DomainError("factorial of a negative integer")
    if n == 0:
        return TwistLaurent.const(1)
    return qfact(n - 1) * qint(n)


def qbinom(n: int, k: int) -> TwistLaurent:
    if k < 0 or k > n:
        raise DomainError(f"qbinom({n}, {k}) outside 0 <= k <= n")
    q = qfact(n).divide_exact(qfact(k) * qfact(n - k))
    if q is None:
        raise ArithmeticError(f"[{n}]! not divisible by [{k}]![{n - k}]!")
    return q


def unknot_value(N: int) -> TwistLaurent:
    if N < 1:
        raise DomainError("colors are positive")
    return qint(N) * (-1) ** (N - 1)


def admissible(a: int, b: int, c: int) -> bool:
    return abs(a - b) < c < a + b and (a + b + c) % 2 == 1


def _check(a, b, c):
    if not admissible(a, b, c):
        raise InadmissibleTriple(f"({a}, {b}, {c}) is not admissible")


# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QProduct:
    """``coeff * A^(a2/2) * h^hpow * prod [n]^e``."""

    coeff: Fraction = Fraction(1)
    a2: int = 0
    hpow: int = 0
    qints: tuple = ()

    @staticmethod
    def build(coeff=1, a2=0, hpow=0, qints: dict | None = None) -> "QProduct":
        q = {n: e for n, e in (qints or {}).items() if e}
        if q.get(0, 0) > 0:
            return QProduct(Fraction(0))
        if q.get(0, 0) < 0:
            raise ZeroDivisionError("[0] in a denominator")
        sign = 1
        for n in [n for n in q if n < 0]:
            e = q.pop(n)
            sign *= (-1) ** e
            q[-n] = q.get(-n, 0) + e
        q = {n: e for n, e in q.items() if e and n != 1}
        return QProduct(Fraction(coeff) * sign, a2, hpow, tuple(sorted(q.items())))

    @staticmethod
    def factorial(n: int, power: int = 1) -> "QProduct":
        if n < 0:
            raise DomainError("factorial of a negative integer")
        return QProduct.build(qints={i: power for i in range(2, n + 1)})

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __mul__(self, other: "QProduct") -> "QProduct":
        if self.is_zero() or other.is_zero():
            return QProduct(Fraction(0))
        q = dict(self.qints)
        for n, e in other.qints:
            q[n] = q.get(n, 0) + e
        return QProduct.build(self.coeff * other.coeff, self.a2 + other.a2, self.hpow + other.hpow, q)

    def __pow__(self, k: int) -> "QProduct":
        if k < 0 and self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        return QProduct.build(self.coeff ** k, self.a2 * k, self.hpow * k,
                              {n: e * k for n, e in self.qints})

    def inverse(self) -> "QProduct":
        return self ** -1

    def to_ratfun(self) -> RatFun:
        if self.is_zero():
            return RatFun(TwistLaurent())
        shift = self.a2
        exps: dict[int, int] = {}
        for n, e in self.qints:
            shift -= 4 * (n - 1) * e
            for d in _divisors(n):
                if d > 1:
                    exps[d] = exps.get(d, 0) + e
        num = TwistLaurent.monomial(shift, self.hpow, self.coeff)
        for d, e in sorted(exps.items()):
            if e > 0:
                num = num * phi_a4(d) ** e
        return RatFun._make(num, {d: -e for d, e in exps.items() if e < 0}, reduce=False)

    def valuation(self, N: int) -> int:
        """Order of vanishing at zeta_N (N >= 2)."""
        if self.is_zero():
            raise ValueError("zero has no finite valuation")
        return sum(e for n, e in self.qints if n % N == 0)

    def jet(self, N: int, precision: int) -> RootJet:
        if self.is_zero():
            return RootJet.zero(N)
        exp = self.a2 / 2 + 1.5 * self.hpow
        out = RootJet(N, 0, [c * float(self.coeff) * (1j ** (self.hpow % 4))
                             for c in monomial_jet(N, exp, precision)])
        # leading coefficients are collected as logarithms so that large
        # powers that cancel against each other do not overflow
        log_scale = 0j
        for n, e in self.qints:
            j = qint_jet(n, N, precision)
            lead = j.coeffs[0]
            log_scale += e * cmath.log(lead)
            out = out * (j * (1 / lead)) ** e
        return out * cmath.exp(log_scale)

    def evaluate(self, A: complex) -> complex:
        if self.is_zero():
            return 0j
        logA = cmath.log(complex(A))
        val = complex(float(self.coeff)) * (1j ** (self.hpow % 4)) * cmath.exp(
            (self.a2 / 2 + 1.5 * self.hpow) * logA)
        A2 = cmath.exp(2 * logA)
        for n, e in self.qints:
            q = (A2 ** n - A2 ** -n) / (A2 - 1 / A2)
            val *= q ** e
        return val


@lru_cache(maxsize=None)
def _divisors(n: int) -> tuple[int, ...]:
    return tuple(d for d in range(1, n + 1) if n % d == 0)


@lru_cache(maxsize=None)
def _diff_jet(n: int, N: int, precision: int) -> RootJet:
    # A^(2n) - A^(-2n); vanishes at zeta_N exactly when N | n
    a = monomial_jet(N, 2 * n, precision + 1)
    b = monomial_jet(N, -2 * n, precision + 1)
    c = [x - y for x, y in zip(a, b)]
    if n % N == 0:
        return RootJet(N, 1, c[1:precision + 1])
    return RootJet(N, 0, c[:precision])


@lru_cache(maxsize=None)
def qint_jet(n: int, N: int, precision: int) -> RootJet:
    if n == 0:
        return RootJet.zero(N)
    if n < 0:
        return -qint_jet(-n, N, precision)
    return _diff_jet(n, N, precision) / _diff_jet(1, N, precision)


def qint_at_root(n: int, N: int) -> float:
    """[n] at zeta_N, i.e. sin(pi n/N)/sin(pi/N) (N >= 2)."""
    return math.sin(math.pi * n / N) / math.sin(math.pi / N)


# ---------------------------------------------------------------------------

def theta_product(a: int, b: int, c: int) -> QProduct:
    _check(a, b, c)
    a, b, c = a - 1, b - 1, c - 1
    s = (a + b + c) // 2
    num = (QProduct.factorial(s + 1) * QProduct.factorial(s - a) * QProduct.factorial(s - b)
           * QProduct.factorial(s - c))
    den = QProduct.factorial(a) * QProduct.factorial(b) * QProduct.factorial(c)
    return QProduct.build((-1) ** s) * num * den.inverse()


def theta_value(a: int, b: int, c: int) -> RatFun:
    """Skein value of the theta graph colored a, b, c."""
    return theta_product(a, b, c).to_ratfun()


@dataclass(frozen=True)
class TetLabels:
    """Colors on the standard tetrahedron.

    Edge incidence: j1=v1v2, j2=v1v3, j3=v1v4, j4=v2v3, j5=v3v4, j6=v2v4, so
    the opposite pairs are (j1,j5), (j2,j6), (j3,j4).
    """

    j1: int
    j2: int
    j3: int
    j4: int
    j5: int
    j6: int

    VERTICES = ((0, 1, 2), (0, 3, 5), (1, 3, 4), (2, 4, 5))
    SQUARES = ((1, 2, 3, 5), (0, 2, 3, 4), (0, 1, 4, 5))

    @property
    def colors(self) -> tuple[int, ...]:
        return (self.j1, self.j2, self.j3, self.j4, self.j5, self.j6)

    def is_admissible(self) -> bool:
        c = self.colors
        return all(admissible(c[i], c[j], c[k]) for i, j, k in self.VERTICES)

    def validate(self):
        c = self.colors
        for i, j, k in self.VERTICES:
            _check(c[i], c[j], c[k])

    @property
    def V(self) -> tuple[int, ...]:
        p = [x - 1 for x in self.colors]
        return tuple((p[i] + p[j] + p[k]) // 2 for i, j, k in self.VERTICES)

    @property
    def B(self) -> tuple[int, ...]:
        p = [x - 1 for x in self.colors]
        return tuple(sum(p[i] for i in sq) // 2 for sq in self.SQUARES)


def tet_terms(labels: TetLabels) -> tuple[QProduct, list[QProduct]]:
    """Prefactor and z-summands of the tetrahedron value."""
    labels.validate()
    V, B = labels.V, labels.B
    pre = QProduct()
    for b in B:
        for v in V:
            pre = pre * QProduct.factorial(b - v)
    for j in labels.colors:
        pre = pre * QProduct.factorial(j - 1, -1)
    terms = []
    for z in range(max(V), min(B) + 1):
        t = QProduct.build((-1) ** z) * QProduct.factorial(z + 1)
        for b in B:
            t = t * QProduct.factorial(b - z, -1)
        for v in V:
            t = t * QProduct.factorial(z - v, -1)
        terms.append(t)
    return pre, terms


def tet_value(labels: TetLabels) -> RatFun:
    pre, terms = tet_terms(labels)
    total = RatFun(TwistLaurent())
    for t in terms:
        total = total + t.to_ratfun()
    return pre.to_ratfun() * total


def tet_jet(labels: TetLabels, N: int, precision: int) -> RootJet:
    pre, terms = tet_terms(labels)
    return pre.jet(N, precision) * jet_sum(t.jet(N, precision) for t in terms)


def halftwist_product(k: int, sign: int) -> QProduct:
    if k < 1:
        raise DomainError("colors are positive")
    n = k - 1
    return QProduct.build(1, sign * n * (n - 1), sign * n)


def halftwist_coeff(k: int, sign: int) -> TwistLaurent:
    """Factor by which a half twist (sign +1/-1) rescales a k-colored edge."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    p = halftwist_product(k, sign)
    return TwistLaurent.monomial(p.a2, p.hpow)


def ring_product(k: int, N: int) -> QProduct:
    if N == 1:
        return QProduct.build(1)
    return QProduct.build((-1) ** (N - 1), qints={k * N: 1, k: -1})


def ring_coeff(k: int, N: int) -> RatFun:
    """(-1)^(N-1) [kN]/[k]: effect of an N-colored ring around a k-colored edge."""
    return ring_product(k, N).to_ratfun()


def ring_coeff_at_root(k: int, N: int) -> complex:
    if N == 1:
        return 1.0 + 0j
    return ring_product(k, N).jet(N, 2).value()


def ring_limit(k: int, N: int) -> int:
    """Closed form of the ring coefficient at zeta_N."""
    if k % N:
        return 0
    return (-1) ** (N - 1 + k - k // N) * N


# ---------------------------------------------------------------------------

def phi_N(N: int) -> complex:
    if N % 2 == 0 or N < 1:
        raise DomainError("phi_N is defined for odd N")
    return (-1) ** ((N - 1) // 2) * cmath.exp(1j * math.pi * (N * N - 1) / (4 * N))


def log_sixj_N(N: int) -> float:
    """log of sixj_N, summed in log space (all terms are positive reals)."""
    if N % 2 == 0 or N < 1:
        raise DomainError("sixj_N is defined for odd N")
    m = (N - 1) // 2
    if m == 0:
        return 0.0
    logq = [0.0] + [math.log(qint_at_root(i, N)) for i in range(1, m + 1)]
    logfact = [0.0]
    for i in range(1, m + 1):
        logfact.append(logfact[-1] + logq[i])
    logs = [4 * (logfact[m] - logfact[k] - logfact[m - k]) for k in range(m + 1)]
    top = max(logs)
    return top + math.log(math.fsum(math.exp(x - top) for x in logs))


def sixj_N(N: int) -> float:
    return math.exp(log_sixj_N(N))
