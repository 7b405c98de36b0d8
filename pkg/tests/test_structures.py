import itertools

import pytest

from tightpaths.params import derive_params
from tightpaths.structures import (TightCycle, TightPath, bridge_windows, child_jsets, closing_windows,
                                   cycle_problem, is_partition, num_children, path_problem, split_partition,
                                   validate_cycle, validate_path, windows)


def test_sixteen_vertex_path_edges(path16):
    E = path16.edges()
    assert path16.length == 4
    assert E[0] == frozenset(range(1, 8))
    assert E[-1] == frozenset(range(10, 17))


def test_length_zero_path():
    P = TightPath((1, 2), 3, 2)
    assert P.length == 0 and P.edges() == []


def test_small_windows():
    assert windows((1, 2, 3, 4), 3, 2) == [(1, 2, 3), (2, 3, 4)]


def test_four_tight_children():
    P = derive_params(40, 7, 4)
    J = (10, 11, 12, 13)
    part = ((10,), (11, 12, 13))
    kids = child_jsets(J, part, range(10, 17), P)
    assert sorted(c for c, _ in kids) == [(i, 14, 15, 16) for i in (11, 12, 13)]
    for child, cpart in kids:
        assert is_partition(cpart, P, child)
        assert cpart[1] == (14, 15, 16)


def test_children_k3_and_k4():
    P3 = derive_params(20, 3, 2)
    assert child_jsets((1, 2), ((1,), (2,)), (1, 2, 5), P3) == [((2, 5), ((2,), (5,)))]
    P4 = derive_params(20, 4, 2)
    assert child_jsets((1, 2), ((1, 2),), (1, 2, 6, 7), P4) == [((6, 7), ((6, 7),))]


def test_children_count_identity():
    for k in range(3, 13):
        for j in range(2, k):
            P = derive_params(60, k, j)
            seq = tuple(range(P.v(1)))
            part = split_partition(seq[: j], P)
            K = seq[: k]
            assert len(child_jsets(tuple(sorted(seq[:j])), part, K, P)) == num_children(P)


def test_children_extend_the_path():
    # every child is the end of a valid longer path over the found edge's vertices
    P = derive_params(40, 7, 4)
    from tightpaths.structures import child_extensions
    seq = tuple(range(1, 14))  # length 3
    part = split_partition(seq, P)
    for child, cpart, ordered in child_extensions(part, (14, 15, 16), P):
        ext = seq[: len(seq) - 4] + ordered
        path = TightPath(ext, 7, 4)
        assert set(path.edges()[:-1]) == set(TightPath(seq, 7, 4).edges())
        assert path.edges()[-1] == frozenset(range(10, 17))
        assert tuple(sorted(ext[-4:])) == child
        assert split_partition(ext, P) == cpart


def test_validate_path(path16):
    E = set(path16.edges())
    assert validate_path(path16, E)
    assert not validate_path(path16, E - {path16.edges()[1]})
    bad = TightPath((1, 2, 3, 1), 3, 2)
    assert path_problem(bad, lambda K: True) == "repeated vertex"


def test_validate_cycle():
    cyc = TightCycle((1, 2, 3, 4), 3, 2)
    E = {frozenset(x) for x in [(1, 2, 3), (2, 3, 4), (3, 4, 1), (4, 1, 2)]}
    assert validate_cycle(cyc, E) and cyc.length == 4
    assert not validate_cycle(TightCycle((1, 2, 3), 3, 2), lambda K: True)
    for e in E:
        assert not validate_cycle(cyc, E - {e})


def test_closing_windows_examples():
    P3 = derive_params(20, 3, 2)
    w = closing_windows(TightPath((1, 2, 3, 4), 3, 2), (), P3)
    assert w == [frozenset({3, 4, 1}), frozenset({4, 1, 2})]
    P4 = derive_params(20, 4, 2)
    assert bridge_windows((5, 6), (), (1, 2), P4) == [(5, 6, 1, 2)]
    P7 = derive_params(40, 7, 4)
    b1, b2, b3, b4, r1, r2, a1, a2, a3, a4 = 21, 22, 23, 24, 31, 32, 1, 2, 3, 4
    assert bridge_windows((b1, b2, b3, b4), (r1, r2), (a1, a2, a3, a4), P7) == [
        (b1, b2, b3, b4, r1, r2, a1), (b4, r1, r2, a1, a2, a3, a4)]


def test_closed_k7_cycle_validates():
    P7 = derive_params(40, 7, 4)
    path = TightPath(tuple(range(1, 17)), 7, 4)
    R = (30, 31)
    cyc = TightCycle(path.vertex_seq + R, 7, 4)
    E = set(path.edges()) | set(closing_windows(path, R, P7))
    assert cycle_problem(cyc, E) is None
    assert cyc.length == path.length + P7.s


def test_closing_rejects_bad_R():
    P7 = derive_params(40, 7, 4)
    path = TightPath(tuple(range(1, 17)), 7, 4)
    with pytest.raises(ValueError):
        closing_windows(path, (30,), P7)
    with pytest.raises(ValueError):
        closing_windows(path, (1, 30), P7)
