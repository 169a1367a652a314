import random

import pytest
from hypothesis import given, strategies as st

from untangling.cover_oracle import CoverOracle
from untangling.errors import ContractibleInput, EmptyWalk
from untangling.generators import heart_case, perturb, random_walk
from untangling.walks import (
    ReductionStats,
    canonical_rotation,
    compress,
    is_reduced,
    is_reduced_closed,
    potential,
    reduce_closed_walk,
    reduce_closed_walk_based,
    reduce_walk,
    reverse,
    uncompress,
    validate_compressed,
)


def walks(tri, max_len=80):
    m = tri.map
    return st.tuples(st.integers(0, 10**9), st.integers(0, max_len)).map(
        lambda p: random_walk(m, 0, p[1], random.Random(p[0])))


@pytest.fixture(scope="module")
def oracle2(tri2):
    return CoverOracle(tri2.map)


def test_spur_reduces_to_empty(tri2):
    assert reduce_walk(tri2, [0, 1]) == []


def test_face_boundary_is_contractible(tri2):
    for f in tri2.map.faces:
        with pytest.raises(ContractibleInput):
            reduce_closed_walk(tri2, f)


def test_empty_closed_walk_rejected(tri2):
    with pytest.raises(EmptyWalk):
        reduce_closed_walk_based(tri2, [])


def test_canonical_loop_is_already_reduced(tri2):
    for name in ("a1", "b1", "a2", "b2"):
        loop = tri2.canonical_cycle(name)
        assert reduce_walk(tri2, loop) == loop
        assert canonical_rotation(reduce_closed_walk(tri2, loop)) == canonical_rotation(loop)


@given(st.data())
def test_reduction_is_homotopic_and_reduced(tri2, oracle2, data):
    w = data.draw(walks(tri2))
    stats = ReductionStats()
    r = reduce_walk(tri2, w, stats)
    assert is_reduced(tri2, r)
    assert oracle2.homotopic(w, r)
    assert stats.moves <= potential(tri2, w)
    assert reduce_walk(tri2, r) == r


@given(st.data(), st.integers(0, 10**6), st.integers(1, 12))
def test_uniqueness_under_homotopy_moves(tri3, data, seed, moves):
    w = data.draw(walks(tri3))
    w2 = perturb(tri3, w, moves, random.Random(seed))
    assert reduce_walk(tri3, w) == reduce_walk(tri3, w2)


@given(st.data())
def test_reversal(tri2, data):
    w = data.draw(walks(tri2))
    assert reduce_walk(tri2, reverse(w)) == reverse(reduce_walk(tri2, w))


@given(st.data(), st.integers(0, 10**6))
def test_closed_reduction_transport(tri2, oracle2, data, seed):
    w = data.draw(walks(tri2))
    if not w:
        return
    try:
        res = reduce_closed_walk_based(tri2, w)
    except ContractibleInput:
        assert oracle2.is_contractible_loop(w)
        return
    assert is_reduced_closed(tri2, res.cycle)
    assert oracle2.homotopic(w, res.transport + res.cycle + reverse(res.transport))
    assert res.stats.moves <= potential(tri2, w, closed=True) + 1
    k = random.Random(seed).randrange(len(w))
    again = reduce_closed_walk(tri2, w[k:] + w[:k])
    assert canonical_rotation(again) == canonical_rotation(res.cycle)


def test_heart_case_is_found_and_reduced(tri2, oracle2):
    found = heart_case(tri2)
    assert found is not None
    walk, turns = found
    assert turns[0].value == 4
    res = reduce_closed_walk_based(tri2, walk)
    assert is_reduced_closed(tri2, res.cycle)
    assert res.stats.moves <= potential(tri2, walk, closed=True) + 1
    assert oracle2.homotopic(walk, res.transport + res.cycle + reverse(res.transport))


@given(st.data())
def test_compression_round_trip(tri2, data):
    w = reduce_walk(tri2, data.draw(walks(tri2)))
    seq = compress(tri2, w)
    validate_compressed(seq)
    assert uncompress(tri2, seq) == w
    assert len(seq) <= max(1, len(w))
