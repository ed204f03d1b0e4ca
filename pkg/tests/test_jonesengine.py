import cmath
import json

import pytest

from corpus import CORPUS, THETA_SEQUENCE
from ktgvolume import tloracle as tl
from ktgvolume.jonesengine import (BudgetExceeded, NotAugmented, TwistedUnzip, augmented_closed_form,
                                   build_expression, closed_form_log_modulus, eval_at_root,
                                   eval_generic, records_json, result_record, sufficient_ring_count)
from ktgvolume.ktgmodel import augment, parse_sequence
from ktgvolume.qarith import RatFun, zeta
from ktgvolume.qsymbols import (TetLabels, halftwist_coeff, phi_N, qfact, qint, sixj_N, tet_value)


def expr(dsl, mode="strict"):
    return build_expression(parse_sequence(dsl), mode)


def theta_formula(N):
    k = (N - 1) // 2
    num = qfact(3 * k + 1) * qfact(k) ** 3
    den = qfact(2 * k) ** 3 * qint(2 * k + 1)
    return RatFun((-1) ** (3 * k) * num) / RatFun(den)


@pytest.mark.parametrize("N", [1, 2, 3, 4, 5, 7, 9])
def test_tetrahedron_at_root(N):
    val = eval_at_root(expr(""), N)
    expected = 0 if N % 2 == 0 else sixj_N(N)
    assert abs(val - expected) <= 1e-9 * max(1, expected)


def test_tetrahedron_generic():
    assert eval_generic(expr(""), 3) == tet_value(TetLabels(*(3,) * 6))


@pytest.mark.parametrize("N", [3, 5])
def test_theta_sequence(N):
    assert eval_generic(expr(THETA_SEQUENCE), N, normalize=True) == theta_formula(N)


def test_half_twist_factor():
    e = expr("H+ e1")
    assert eval_generic(e, 3) == tet_value(TetLabels(*(3,) * 6)) * RatFun(halftwist_coeff(3, 1))


def test_numeric_matches_symbolic():
    e = expr("A v1; U e4 rings=1")
    a = 0.93 * cmath.exp(0.3j)
    assert eval_generic(e, 3, A=a) == pytest.approx(eval_generic(e, 3).evaluate(a), rel=1e-9)


def _dumbbell_with_rings(N, rings):
    """Two N-colored loops joined by a bar, the loop strands passing through ``rings`` rings."""
    n = N - 1
    rows = [
        [tl.emit(n, n, n), tl.emit(n, n, n)],
        [tl.jw(n)] * 6,
        [tl.identity(n), tl.identity(n), tl.cap_bundle(n), tl.identity(n), tl.identity(n)],
    ]
    for _ in range(rings):
        rows += [
            [tl.identity(n), tl.cup_bundle(n), tl.identity(2 * n), tl.identity(n)],
            [tl.identity(n), tl.jw(n), tl.identity(n), tl.identity(2 * n), tl.identity(n)],
            [tl.identity(n), tl.identity(n), tl.bundle_cross(n, 2 * n, 1), tl.identity(n)],
            [tl.identity(n), tl.identity(n), tl.bundle_cross(2 * n, n, 1), tl.identity(n)],
            [tl.identity(n), tl.cap_bundle(n), tl.identity(2 * n), tl.identity(n)],
        ]
    rows += [[tl.cap_bundle(n), tl.cap_bundle(n)]]
    return tl.evaluate(tl.PlanarComposition(rows, strand_cap=14))


@pytest.mark.parametrize("rings", [0, 1, 2])
def test_unzip_against_skein_oracle(rings):
    oracle = _dumbbell_with_rings(3, rings)
    assert eval_generic(expr(f"U e1 rings={rings}"), 3) == oracle


def test_root_value_is_limit_of_generic():
    e = expr("U e1 rings=2")
    f = eval_generic(e, 3, normalize=True)
    root = eval_at_root(e, 3)
    gaps = [abs(f.evaluate(zeta(3) * cmath.exp(eps * 1j)) - root) for eps in (1e-5, 1e-7)]
    assert gaps[1] < 1e-4
    assert gaps[1] < gaps[0] / 50


@pytest.mark.parametrize("dsl", [c[0] for c in CORPUS])
@pytest.mark.parametrize("N", [3, 5])
def test_closed_form_with_enough_rings(dsl, N):
    seq = parse_sequence(dsl)
    seq = augment(seq, sufficient_ring_count(seq).n)
    got = eval_at_root(build_expression(seq), N)
    want = augmented_closed_form(seq, N)
    assert abs(got - want) <= 1e-9 * abs(want)


@pytest.mark.parametrize("N", [2, 4, 6])
def test_even_colors_vanish(N):
    seq = augment(parse_sequence("A v1; U e4; U e3"), 5)
    assert eval_at_root(build_expression(seq), N) == 0
    assert augmented_closed_form(seq, N) == 0
    assert closed_form_log_modulus(seq, N) == float("-inf")


def test_closed_form_values():
    one = parse_sequence("U e1 rings=1")
    assert augmented_closed_form(one, 3) == pytest.approx(6)
    seq = parse_sequence("H+ e2; U e1 rings=3")
    assert augmented_closed_form(seq, 5) == pytest.approx(phi_N(5) * 125 * sixj_N(5))


def test_closed_form_needs_rings():
    with pytest.raises(NotAugmented):
        augmented_closed_form(parse_sequence("U e1"), 3)


def test_few_rings_differ_from_closed_form():
    # with a single ring the N=3 value is 12, the closed form says 6
    seq = parse_sequence("U e1 rings=1")
    assert eval_at_root(build_expression(seq), 3) == pytest.approx(12)


def test_sufficient_ring_count():
    assert sufficient_ring_count(parse_sequence("U e1")).n == 55
    assert sufficient_ring_count(parse_sequence("A v1; U e4; U e3")).n == 118


def test_twisted_unzip_modes():
    with pytest.raises(TwistedUnzip):
        expr("H+ e1; U e1")
    lenient = expr("H+ e1; U e1 rings=1", mode="lenient")
    assert any(a.kind == "twisted_unzip_correction" for a in lenient.atoms())
    eval_generic(lenient, 3)


def test_budget():
    seq = augment(parse_sequence("A v1; A v5; U e4; U e3"), 1)
    with pytest.raises(BudgetExceeded):
        eval_generic(build_expression(seq), 7, budget=10)


def test_records_are_deterministic():
    seq = parse_sequence("A v1; U e4 rings=2")
    v = eval_at_root(build_expression(seq), 5)
    r1 = records_json([result_record(seq, 5, v, "multisum")])
    r2 = records_json([result_record(parse_sequence("tet\nA v1\nU e4 rings=2\n"), 5, v, "multisum")])
    assert r1 == r2
    rec = json.loads(r1)[0]
    assert rec["stats"] == {"t": 1, "u": 1, "theta": 0, "r": 2}
    assert len(rec["sequence_hash"]) == 16
