import numpy as np
import pytest

from tightpaths.oracle import EdgeOracle, OracleError, ReplayOracle, load_replay, read_edge_list, write_edge_list
from tightpaths.params import derive_params
from tightpaths.structures import TightPath, validate_path


def test_memoised_queries():
    o = EdgeOracle(derive_params(30, 3, 2), (0.3,), seed=5)
    a = o.query((1, 2, 3))
    assert o.query((3, 2, 1)) == a
    assert o.total_queries == 1 and o.memo_hits[0] == 1


def test_extremes():
    P = derive_params(12, 3, 2)
    one = EdgeOracle(P, (1.0,), seed=1)
    zero = EdgeOracle(P, (0.0,), seed=1)
    rows = np.array(list(__import__("itertools").combinations(range(12), 3)))
    assert one.peek(rows).all() and not zero.peek(rows).any()


def test_deterministic_across_instances():
    P = derive_params(40, 3, 2)
    rows = np.array([[i, i + 1, i + 2] for i in range(30)])
    a = EdgeOracle(P, (0.4, 0.2), seed=9).peek(rows, 1)
    b = EdgeOracle(P, (0.4, 0.2), seed=9, track=False).peek(rows, 1)
    c = EdgeOracle(P, (0.4, 0.2), seed=10).peek(rows, 1)
    assert (a == b).all() and not (a == c).all()


def test_rounds_are_monotone():
    P = derive_params(40, 3, 2)
    o = EdgeOracle(P, (0.2, 0.2), seed=3)
    rows = np.array(list(__import__("itertools").combinations(range(20), 3)))
    r0, r1 = o.peek(rows, 0), o.peek(rows, 1)
    assert (r1 | ~r0).all()
    assert r1.sum() > r0.sum()


def test_malformed_queries():
    o = EdgeOracle(derive_params(10, 3, 2), (0.5,), seed=0)
    with pytest.raises(OracleError):
        o.query((1, 1, 2))
    with pytest.raises(OracleError):
        o.query((1, 2, 10))
    with pytest.raises(OracleError):
        o.query((1, 2, 3), round=1)


def test_replay_of_a_path(tmp_path, path16):
    o = ReplayOracle(path16.edges(), 17, 7)
    assert validate_path(path16, o.edge_test())
    assert not ReplayOracle([], 17, 7).query(range(7))
    f = tmp_path / "e.txt"
    write_edge_list(f, path16.edges(), header="path on 1..16")
    assert sorted(read_edge_list(f)) == sorted(tuple(sorted(e)) for e in path16.edges())
    assert load_replay(f, n=17).query(range(1, 8))


def test_complete_replay_matches_probability_one():
    import itertools
    E = list(itertools.combinations(range(8), 3))
    rep = ReplayOracle(E, 8, 3)
    full = EdgeOracle(derive_params(8, 3, 2), (1.0,), seed=0)
    rows = np.array(E)
    assert (rep.peek(rows) == full.peek(rows)).all()


def test_statistics_single_round():
    P = derive_params(40, 3, 2)
    import itertools
    rows = np.array(list(itertools.combinations(range(40), 3))[:10_000])
    sd = 3 * np.sqrt(0.1 * 0.9 / len(rows))
    for seed in range(10):
        assert abs(EdgeOracle(P, (0.1,), seed=seed).peek(rows).mean() - 0.1) <= sd
