"""Property checks over random small configurations."""

import itertools

from hypothesis import given, settings
from hypothesis import strategies as st

from tightpaths.oracle import ReplayOracle
from tightpaths.params import derive_params
from tightpaths.structures import (TightCycle, TightPath, child_extensions, closing_windows, is_partition,
                                   split_partition, validate_cycle, validate_path)

kj = st.integers(3, 12).flatmap(lambda k: st.tuples(st.just(k), st.integers(2, k - 1)))


@given(kj, st.integers(1, 6))
def test_path_edge_count(kjv, length):
    k, j = kjv
    P = derive_params(200, k, j)
    path = TightPath(tuple(range(P.v(length))), k, j)
    E = path.edges()
    assert len(E) == length and all(len(e) == k for e in E)
    # consecutive edges share exactly j vertices
    assert all(len(a & b) == j for a, b in zip(E, E[1:]))
    assert validate_path(path, set(E))


@settings(max_examples=60)
@given(kj, st.integers(1, 4), st.randoms(use_true_random=False))
def test_children_extend_validly(kjv, length, rnd):
    k, j = kjv
    P = derive_params(200, k, j)
    verts = list(range(P.v(length + 1)))
    rnd.shuffle(verts)
    seq = tuple(verts[: P.v(length)])
    new = tuple(verts[P.v(length):])
    part = split_partition(seq, P)
    assert is_partition(part, P, seq[-j:])
    for child, cpart, ordered in child_extensions(part, new, P):
        ext = seq[: len(seq) - j] + ordered
        p = TightPath(ext, k, j)
        assert set(p.edges()) == set(TightPath(seq, k, j).edges()) | {frozenset(seq[-j:] + new)}
        assert split_partition(ext, P) == cpart
        assert is_partition(cpart, P, child)


@settings(max_examples=60)
@given(kj, st.integers(1, 5))
def test_closing_gives_cycle(kjv, length):
    k, j = kjv
    P = derive_params(400, k, j)
    path = TightPath(tuple(range(P.v(length))), k, j)
    R = tuple(range(300, 300 + P.b))
    W = closing_windows(path, R, P)
    assert len(W) == P.s
    cyc = TightCycle(path.vertex_seq + R, k, j)
    if len(cyc.vertex_seq) >= k + (k - j):
        assert validate_cycle(cyc, set(path.edges()) | set(W))
        assert cyc.length == length + P.s


@settings(max_examples=30)
@given(st.integers(4, 7), st.data())
def test_replay_oracle_membership(n, data):
    all3 = list(itertools.combinations(range(n), 3))
    E = data.draw(st.sets(st.sampled_from(all3)))
    o = ReplayOracle(E, n, 3)
    for K in all3:
        assert o.query(K) == (K in E)
