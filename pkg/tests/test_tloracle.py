import itertools
import time

import pytest

from ktgvolume.qarith import RatFun, TwistLaurent
from ktgvolume.qsymbols import (TetLabels, admissible, halftwist_coeff, ring_coeff, tet_value,
                                theta_value, unknot_value)
from ktgvolume import tloracle as tl

A = TwistLaurent.A
LOOP = -A(2) - A(-2)


def test_loop_value():
    assert tl.evaluate(tl.PlanarComposition([[tl.cup()], [tl.cap()]])) == RatFun(LOOP)


@pytest.mark.parametrize("n", [3, 4])
def test_temperley_lieb_relations(n):
    d = RatFun(LOOP)
    for i in range(n - 1):
        e = tl.e_gen(n, i)
        assert e @ e == e.scale(d)
        if i + 1 < n - 1:
            f = tl.e_gen(n, i + 1)
            assert e @ f @ e == e
            assert f @ e @ f == f


def test_reidemeister_two():
    assert tl.cross(1) @ tl.cross(-1) == tl.identity(2)


def test_kink_removal():
    # closing one strand of a positive crossing gives -A^3
    kink = tl.identity(1).tensor(tl.cap()) @ tl.cross(1).tensor(tl.identity(1)) @ tl.identity(1).tensor(tl.cup())
    assert kink == tl.identity(1).scale(RatFun(-A(3)))


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_jones_wenzl(n):
    p = tl.jw(n)
    assert p @ p == p
    for i in range(n - 1):
        assert (tl.e_gen(n, i) @ p).is_zero()
        assert (p @ tl.e_gen(n, i)).is_zero()


def test_htwist_squares_to_kink():
    assert tl.htwist(1) @ tl.htwist(1) == tl.identity(1).scale(RatFun(-A(3)))
    assert tl.htwist(1) @ tl.htwist(-1) == tl.identity(1)


def test_mobius_band_exact():
    t0 = time.perf_counter()
    val = tl.mobius_band(1)
    assert time.perf_counter() - t0 < 1.0
    assert val.is_polynomial()
    assert val.as_laurent() == -(A(8) + A(4) + 1)


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_unknot_matches_formula(k):
    assert tl.unknot(k) == RatFun(unknot_value(k))


def test_theta_matches_formula():
    for a, b, c in itertools.product(range(1, 4), repeat=3):
        if admissible(a, b, c):
            assert tl.theta(a, b, c) == theta_value(a, b, c)


def test_tet_matches_formula():
    count = 0
    for labels in itertools.product(range(1, 4), repeat=6):
        t = TetLabels(*labels)
        if t.is_admissible():
            assert tl.tet(*labels) == tet_value(t)
            count += 1
    assert count > 20


def test_tet_color_four_sample():
    labels = (4, 2, 3, 3, 2, 4)
    t = TetLabels(*labels)
    assert t.is_admissible()
    assert tl.tet(*labels) == tet_value(t)


@pytest.mark.parametrize("a,b", list(itertools.product(range(1, 4), repeat=2)))
def test_fusion(a, b):
    lhs, rhs = tl.fusion_sides(a, b)
    assert lhs == rhs


@pytest.mark.parametrize("k", [1, 2, 3, 4])
@pytest.mark.parametrize("sign", [1, -1])
def test_half_twist_coefficient(k, sign):
    expected = RatFun(halftwist_coeff(k, sign)) * RatFun(unknot_value(k))
    assert tl.twisted_edge(k, sign) == expected


@pytest.mark.parametrize("k,N", [(1, 2), (2, 2), (2, 3), (3, 2), (3, 3), (1, 4), (2, 1)])
def test_encircled_edge(k, N):
    assert tl.encircled(k, N) == ring_coeff(k, N) * RatFun(unknot_value(k))


def test_strand_cap():
    with pytest.raises(tl.TooLarge):
        tl.tet(5, 5, 5, 5, 5, 5, strand_cap=6)


def test_open_diagram_is_rejected():
    with pytest.raises(tl.NotClosed):
        tl.identity(2).scalar()
    with pytest.raises(tl.NotClosed):
        tl.evaluate(tl.PlanarComposition([[tl.cup()]]))


def test_bracket_primitive_dispatch():
    assert tl.bracket_primitive("theta", 2, 2, 1) == theta_value(2, 2, 1)
    with pytest.raises(ValueError):
        tl.bracket_primitive("cube")
