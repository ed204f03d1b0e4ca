import random

import pytest
from hypothesis import given, settings, strategies as st

from corpus import CORPUS, THETA_SEQUENCE, random_valid_sequence
from ktgvolume.ktgmodel import (KTG, BadTarget, DomainError, HalfTwist, MoveSequence, ParseError,
                                Triangle, UnknownId, Unzip, UnzipLoopEdge, apply_move, augment,
                                components, fatgraph_isomorphic, parse_sequence, replay,
                                sequence_hash, serialize, standard_tetrahedron, stats, validate)


def faces(g: KTG) -> int:
    """Boundary cycles of the ribbon graph."""
    succ = {}
    for rot in g.vertices.values():
        for i, d in enumerate(rot):
            succ[d] = rot[(i + 1) % 3]
    seen, count = set(), 0
    for d in succ:
        if d in seen:
            continue
        count += 1
        while d not in seen:
            seen.add(d)
            d = succ[(d[0], 1 - d[1])]
    return count


def euler(g: KTG) -> int:
    return len(g.vertices) - len(g.edges) + faces(g)


def test_standard_tetrahedron_is_planar():
    g = standard_tetrahedron()
    g.check()
    assert len(g.vertices) == 4 and len(g.edges) == 6
    assert euler(g) == 2


@pytest.mark.parametrize("v", [1, 2, 3, 4])
def test_triangle_move(v):
    g = apply_move(standard_tetrahedron(), Triangle(v))
    g.check()
    assert len(g.vertices) == 6 and len(g.edges) == 9
    assert v not in g.vertices
    assert euler(g) == 2


def test_half_twist_accumulates():
    g = standard_tetrahedron()
    g = apply_move(g, HalfTwist(3, 1))
    g = apply_move(g, HalfTwist(3, 1))
    g = apply_move(g, HalfTwist(3, -1))
    assert g.edges[3] == 1


def test_unzip_gives_dumbbell():
    g = apply_move(standard_tetrahedron(), Unzip(1))
    g.check()
    assert len(g.vertices) == 2 and len(g.edges) == 3
    loops = [e for e in g.edges if len(set(g.endpoints(e))) == 1]
    assert len(loops) == 2


def test_theta_sequence_gives_theta_graph():
    g = replay(parse_sequence(THETA_SEQUENCE))[0][-1]
    g.check()
    assert len(g.vertices) == 2 and len(g.edges) == 3
    (a, b), = {tuple(sorted(g.endpoints(e))) for e in g.edges}
    assert a != b


def test_unzip_loop_edge_rejected():
    g = apply_move(standard_tetrahedron(), Unzip(1))
    loops = [e for e in g.edges if len(set(g.endpoints(e))) == 1]
    assert loops
    with pytest.raises(UnzipLoopEdge):
        apply_move(g, Unzip(loops[0]))


def test_full_unzip_leaves_circles():
    seq = parse_sequence("U e1; U e5")
    final = replay(seq)[0][-1]
    assert not final.vertices and not final.edges
    assert len(final.circles) >= 1


def test_rings_recorded():
    states, _ = replay(parse_sequence("A v1; U e4 rings=2"))
    assert len(states[-1].rings) == 2


def test_unknown_ids_rejected():
    with pytest.raises(UnknownId):
        apply_move(standard_tetrahedron(), Triangle(9))
    with pytest.raises(UnknownId):
        apply_move(standard_tetrahedron(), HalfTwist(7, 1))


def test_parser_accepts_variants():
    plain = parse_sequence("A v1\nU e4\n")
    assert parse_sequence("tet\r\nA v1\r\nU e4\r\n") == plain
    assert parse_sequence("A v1; U e4  # unzip\n") == plain
    assert parse_sequence("  tet  \n\n# nothing\nA v1 ;U e4") == plain
    assert parse_sequence("") == MoveSequence(())


@pytest.mark.parametrize("text,line,col", [
    ("A v1\nQ e3", 2, 1),
    ("A e1", 1, 3),
    ("U e1 rings=x", 1, 6),
    ("H+ e1 e2", 1, 1),
    ("A v1\ntet", 2, 1),
])
def test_parse_errors_are_positioned(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_sequence(text)
    assert (info.value.line, info.value.col) == (line, col)
    assert f"line {line}, col {col}" in str(info.value)


@pytest.mark.parametrize("text,line,col", [
    ("A v1\nA v1", 2, 3),
    ("H+ e2; U e77", 1, 10),
    ("A v1; U e4; U e4", 1, 15),
    ("U e1; U e7", 1, 9),
])
def test_bad_targets_are_positioned(text, line, col):
    with pytest.raises(BadTarget) as info:
        parse_sequence(text)
    assert (info.value.line, info.value.col) == (line, col)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=200, deadline=None)
def test_roundtrip(seed):
    seq = random_valid_sequence(random.Random(seed))
    text = serialize(seq)
    again = parse_sequence(text)
    assert again == seq
    assert serialize(again) == text
    assert sequence_hash(again) == sequence_hash(seq)


@given(st.integers(0, 2 ** 32 - 1))
@settings(max_examples=100, deadline=None)
def test_replay_keeps_graph_consistent(seed):
    seq = random_valid_sequence(random.Random(seed))
    for g in replay(seq)[0]:
        g.check()
        if g.vertices:
            assert euler(g) == 2 * (components(g) - len(g.circles) - len(g.rings))


@pytest.mark.parametrize("dsl,t,u,theta", CORPUS)
def test_corpus_stats(dsl, t, u, theta):
    s = stats(parse_sequence(dsl))
    assert (s.t, s.u, s.theta) == (t, u, theta)
    assert s.r == 0


def test_stats_counts_rings():
    s = stats(parse_sequence("A v1; U e4 rings=2; U e3 rings=5"))
    assert s.r == 7 and s.per_unzip_rings == (2, 5)


def test_augment():
    seq = parse_sequence("A v1; U e4; U e3")
    assert stats(augment(seq, 3)).r == 6
    assert stats(augment(seq, [1, 4])).per_unzip_rings == (1, 4)
    with pytest.raises(DomainError):
        augment(seq, 0)
    with pytest.raises(DomainError):
        augment(seq, [1, 2, 3])


def test_validate_report():
    ok = validate(parse_sequence("A v1; U e4 rings=1"))
    assert ok.ok and ok.lines()[0].startswith("t=1 u=1")
    bad = validate(parse_sequence("A v1; U e40", check=False))
    assert not bad.ok and bad.failed_index == 1


def test_isomorphism():
    g = standard_tetrahedron()
    h = apply_move(apply_move(g, Triangle(1)), Triangle(5))
    k = apply_move(apply_move(g, Triangle(2)), Triangle(5))
    assert fatgraph_isomorphic(g, g)
    assert fatgraph_isomorphic(h, k)
    assert not fatgraph_isomorphic(g, h)
