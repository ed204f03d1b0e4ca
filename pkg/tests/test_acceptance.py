"""Acceptance checks, one test and one PASS/FAIL line per criterion.

Run alone with ``python3 -m pytest tests/test_acceptance.py -s`` to see the
lines inline; a plain run lists them in the terminal summary.
"""
import io
import itertools
import random
import time
from contextlib import redirect_stdout

import mpmath

from corpus import CORPUS, THETA_SEQUENCE, random_valid_sequence
from ktgvolume import tloracle as tl
from ktgvolume.cli import main as cli_main
from ktgvolume.jonesengine import (augmented_closed_form, build_expression, eval_at_root,
                                   eval_generic, sufficient_ring_count, verify_conjecture)
from ktgvolume.ktgmodel import (BadTarget, HalfTwist, MoveSequence, Triangle, Unzip, augment,
                                parse_sequence, replay, serialize, stats)
from ktgvolume.octgeom import asymptotic_series, build_gluing, verify_gluing, vol_oct, without_pairing
from ktgvolume.qarith import RatFun, TwistLaurent, laurent_jet
from ktgvolume.qsymbols import (TetLabels, admissible, halftwist_coeff, qfact, qint, ring_coeff_at_root,
                                sixj_N, tet_jet, tet_value, theta_product, theta_value, unknot_value)

RESULTS = []


def report(n, ok, detail):
    line = f"criterion {n:>2} {'PASS' if ok else 'FAIL'}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def test_criterion_01_mobius_band():
    t0 = time.perf_counter()
    val = tl.mobius_band(1)
    dt = time.perf_counter() - t0
    A = TwistLaurent.A
    ok = val.is_polynomial() and val.as_laurent() == -(A(8) + A(4) + 1) and dt < 1.0
    report(1, ok, f"color-3 Moebius band = -(A^8+A^4+1) exactly, {dt:.3f}s")


def test_criterion_02_theta_graph():
    t0 = time.perf_counter()
    e = build_expression(parse_sequence(THETA_SEQUENCE))
    ok = True
    for N in (3, 5, 7):
        k = (N - 1) // 2
        formula = (RatFun((-1) ** (3 * k) * qfact(3 * k + 1) * qfact(k) ** 3)
                   / RatFun(qfact(2 * k) ** 3 * qint(2 * k + 1)))
        ok &= eval_generic(e, N, normalize=True) == formula
    dt = time.perf_counter() - t0
    report(2, ok and dt < 10, f"normalized theta sequence equals the closed formula at N=3,5,7, {dt:.2f}s")


def test_criterion_03_root_identities():
    t0 = time.perf_counter()
    theta_err, tet_err, worst_rel, first_bad = 0.0, 0.0, 0.0, None
    for N in range(3, 52, 2):
        u = laurent_jet(unknot_value(N), N, 4)
        te = abs((theta_product(N, N, N).jet(N, 4) / u).value() - 1)
        s = sixj_N(N)
        de = abs((tet_jet(TetLabels(*(N,) * 6), N, 4) / u).value() - s)
        theta_err, tet_err = max(theta_err, te), max(tet_err, de)
        worst_rel = max(worst_rel, de / s)
        if (te > 1e-9 or de > 1e-9) and first_bad is None:
            first_bad = N
    dt = time.perf_counter() - t0
    ok = theta_err <= 1e-9 and tet_err <= 1e-9 and dt < 30
    detail = (f"max |<NNN>/<N> - 1| = {theta_err:.1e}, max |tet/<N> - sixj_N| = {tet_err:.1e} "
              f"(relative {worst_rel:.1e}), {dt:.1f}s")
    if first_bad is not None:
        detail += f"; absolute 1e-9 first exceeded at N={first_bad} where sixj_N = {sixj_N(first_bad):.3e}"
    report(3, ok, detail)


def test_criterion_04_ring_coefficient_limit():
    worst = 0.0
    for N in range(1, 22):
        for k in range(1, 4 * N + 1):
            expected = 0 if k % N else (-1) ** (N - 1 + k - k // N) * N
            worst = max(worst, abs(ring_coeff_at_root(k, N) - expected))
    report(4, worst <= 1e-9, f"ring coefficient at zeta_N vs closed form, N<=21, k<=4N, max error {worst:.1e}")


def test_criterion_05_closed_form_agreement():
    t0 = time.perf_counter()
    worst, even_ok, covered = 0.0, True, set()
    for dsl, t, u, theta in CORPUS:
        seq = parse_sequence(dsl)
        seq = augment(seq, sufficient_ring_count(seq).n)
        e = build_expression(seq)
        for N in (3, 5, 7):
            want = augmented_closed_form(seq, N)
            worst = max(worst, abs(eval_at_root(e, N) - want) / abs(want))
        even_ok &= all(eval_at_root(e, N) == 0 for N in (2, 4, 6))
        covered.add((t, u, theta))
    ts, us, ths = ({c[i] for c in covered} for i in range(3))
    coverage = {0, 1, 2} <= ts and {1, 2} <= us and {0, 1, -1} <= ths
    dt = time.perf_counter() - t0
    ok = worst <= 1e-9 and even_ok and coverage and dt < 300
    report(5, ok, f"{len(CORPUS)} corpus sequences, max relative gap {worst:.1e} at N=3,5,7, "
                  f"exact zero at N=2,4,6: {even_ok}, coverage t/u/theta: {coverage}, {dt:.1f}s")


def test_criterion_06_oracle_equivalence():
    n_theta = n_tet = 0
    ok = True
    for a, b, c in itertools.product(range(1, 4), repeat=3):
        if admissible(a, b, c):
            ok &= tl.theta(a, b, c) == theta_value(a, b, c)
            n_theta += 1
    for labels in itertools.product(range(1, 4), repeat=6):
        t = TetLabels(*labels)
        if t.is_admissible():
            ok &= tl.tet(*labels) == tet_value(t)
            n_tet += 1
    for a, b in itertools.product(range(1, 4), repeat=2):
        lhs, rhs = tl.fusion_sides(a, b)
        ok &= lhs == rhs
    for k in range(1, 4):
        for sign in (1, -1):
            ok &= tl.twisted_edge(k, sign) == RatFun(halftwist_coeff(k, sign)) * RatFun(unknot_value(k))
    report(6, ok, f"{n_theta} theta and {n_tet} tet colorings, fusion and half twists at colors <= 3")


def test_criterion_07_gluing():
    singles = ([f"A v{i}" for i in range(1, 5)] + [f"H{s} e{i}" for s in "+-" for i in range(1, 7)]
               + [f"U e{i}" for i in range(1, 7)])
    programs = [""] + singles + [c[0] for c in CORPUS]
    ok = True
    for dsl in programs:
        seq = parse_sequence(dsl)
        rep = verify_gluing(build_gluing(seq))
        ok &= rep.ok and rep.octahedra == 2 * stats(seq).t + 2
    g = build_gluing(parse_sequence("A v1; U e4"))
    control = verify_gluing(without_pairing(g, g.pairing_list()[0][0]))
    ok &= not control.ok
    report(7, ok, f"{len(programs)} programs glue correctly; negative control: {control.summary()[:70]}...")


def test_criterion_08_volume_asymptotics():
    t0 = time.perf_counter()
    mpmath.mp.dps = 30
    series = 4 * mpmath.nsum(lambda k: (-1) ** k / (2 * k + 1) ** 2, [0, mpmath.inf])
    vol_err = abs(vol_oct() - float(series))
    rows = asymptotic_series([101, 501, 1001, 2001])
    errs = [r["error"] for r in rows]
    decreasing = all(a > b for a, b in zip(errs, errs[1:]))
    rel2001 = errs[-1] / rows[-1]["target"]
    dt = time.perf_counter() - t0
    ok = vol_err <= 1e-9 and decreasing and rel2001 < 0.02 and dt < 60
    report(8, ok, f"|vol_oct - series| = {vol_err:.1e}, errors {', '.join(f'{x:.4f}' for x in errs)} "
                  f"decreasing: {decreasing}, N=2001 off by {100 * rel2001:.2f}%, {dt:.2f}s")


def test_criterion_09_conjecture_report():
    dsl = "A v1; U e4"
    seq = parse_sequence(dsl)
    n = sufficient_ring_count(seq).n
    Ns = list(range(3, 52)) + [101, 201, 501, 1001, 2001]
    buf = io.StringIO()
    with redirect_stdout(buf):
        code = cli_main(["verify", "--dsl", dsl, "--rings", str(n), "--allow-even",
                         "--Nlist", ",".join(map(str, Ns))])
    out = buf.getvalue()
    rep = verify_conjecture(augment(seq, n), Ns)
    target_ok = abs(rep.target - 4 * vol_oct()) < 1e-12
    last = [r for r in rep.rows if r.lhs is not None][-1]
    ok = (code == 0 and target_ok and rep.odd_errors_decreasing and rep.even_values_zero
          and rep.original_fails and rep.so3_supported
          and "original volume conjecture: fails" in out and "so(3) volume conjecture: supported" in out)
    report(9, ok, f"t=1 with {n} rings: LHS({last.N}) = {last.lhs:.3f} -> 4 vol_oct = {rep.target:.3f}, "
                  f"odd errors decreasing, even N give 0")


def _mutate(seq: MoveSequence, rng: random.Random):
    """Point one move at an impossible target; return the sequence and the expected (line, col)."""
    i = rng.randrange(len(seq.moves))
    states, _ = replay(MoveSequence(seq.moves[:i]))
    g = states[-1]
    m = seq.moves[i]
    loops = [e for e in g.edges if len(set(g.endpoints(e))) == 1]
    if isinstance(m, Unzip) and loops and rng.random() < 0.5:
        bad = Unzip(rng.choice(loops), m.rings)
    elif isinstance(m, Triangle):
        bad = Triangle(g.next_v + rng.randint(0, 50))
    elif isinstance(m, HalfTwist):
        bad = HalfTwist(g.next_e + rng.randint(0, 50), m.sign)
    else:
        bad = Unzip(g.next_e + rng.randint(0, 50), m.rings)
    moves = seq.moves[:i] + (bad,) + seq.moves[i + 1:]
    col = 4 if isinstance(bad, HalfTwist) else 3
    return serialize(MoveSequence(moves)), (i + 2, col)


def test_criterion_10_parser():
    rng = random.Random(20241016)
    roundtrip_ok, n_mut, mut_ok = 0, 0, 0
    for _ in range(1000):
        seq = random_valid_sequence(rng)
        text = serialize(seq)
        again = parse_sequence(text)
        roundtrip_ok += again == seq and serialize(again) == text
        if seq.moves:
            bad_text, pos = _mutate(seq, rng)
            n_mut += 1
            try:
                parse_sequence(bad_text)
            except BadTarget as exc:
                mut_ok += (exc.line, exc.col) == pos
    ok = roundtrip_ok == 1000 and mut_ok == n_mut
    report(10, ok, f"{roundtrip_ok}/1000 round trips, {mut_ok}/{n_mut} mutations rejected at the right position")
