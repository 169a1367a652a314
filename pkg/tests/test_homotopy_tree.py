import random

import pytest
from hypothesis import given, strategies as st

from untangling.cover_oracle import CoverOracle
from untangling.errors import ForeignKey
from untangling.homotopy_tree import HomotopyTree
from untangling.walks import reduce_walk, uncompress


def _walk(tri, seed, n):
    rng = random.Random(seed)
    return [rng.randrange(tri.map.n_darts) for _ in range(n)]


@pytest.fixture(scope="module")
def tree3(tri3):
    return HomotopyTree(tri3, 0)


@given(st.integers(0, 10**6), st.integers(0, 120))
def test_extend_matches_batch_key(tri3, tree3, seed, n):
    w = _walk(tri3, seed, n)
    key = tree3.extend_walk(tree3.trivial_key(), w)
    assert key is tree3.key_of(w)
    assert tree3.walk_of(key) == reduce_walk(tri3, w)
    if w:
        assert uncompress(tri3, tree3.reduced_walk(key)) == reduce_walk(tri3, w)
    assert tree3.stats.max_rewrite <= 49


@given(st.integers(0, 10**6), st.integers(0, 60))
def test_keys_decide_homotopy(tri2, seed, n):
    tree = HomotopyTree(tri2, 0)
    oracle = CoverOracle(tri2.map)
    rng = random.Random(seed)
    w1 = _walk(tri2, seed, n)
    if rng.random() < 0.5:
        f = tri2.map.faces[rng.randrange(tri2.map.n_faces)]
        k = rng.randint(0, len(w1))
        w2 = w1[:k] + list(f) + w1[k:]
    else:
        w2 = _walk(tri2, seed + 1, n)
    assert (tree.key_of(w1) is tree.key_of(w2)) == oracle.homotopic(w1, w2, 0)


def test_partition_groups_by_key(tri2):
    tree = HomotopyTree(tri2, 0)
    a = tri2.canonical["a1"]
    f = tri2.map.faces[0]
    items = [("x", tree.key_of([a])), ("y", tree.key_of(list(f) + [a])), ("z", tree.key_of([a, a]))]
    groups = tree.partition(items)
    assert sorted(sorted(g) for g in groups) == [["x", "y"], ["z"]]
    tree.audit()


def test_foreign_key_rejected(tri2):
    t1, t2 = HomotopyTree(tri2, 0), HomotopyTree(tri2, 0)
    with pytest.raises(ForeignKey):
        t1.extend(t2.trivial_key(), 0)
