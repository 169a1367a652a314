import math
import random

from hypothesis import given, strategies as st

from untangling.cover_oracle import CoverOracle
from untangling.generators import (
    perturb,
    planted_many_classes,
    random_drawing,
    random_walk,
    random_weak_instance,
)


@given(st.integers(0, 10**6))
def test_random_drawing_is_valid(tri2, seed):
    rng = random.Random(seed)
    d = random_drawing(tri2.map, rng.randint(1, 20), rng.randint(0, 5), 8, rng)
    d.validate()


@given(st.integers(0, 10**6), st.integers(0, 15))
def test_perturb_is_a_homotopy(tri2, seed, moves):
    rng = random.Random(seed)
    w = random_walk(tri2.map, 0, rng.randint(0, 20), rng)
    assert CoverOracle(tri2.map).homotopic(w, perturb(tri2, w, moves, rng), 0)


@given(st.integers(0, 10**6))
def test_weak_instances_respect_the_ordering_cap(seed):
    d = random_weak_instance(random.Random(seed), max_strands=8, max_orderings=120)
    count = {}
    for w in d.edge_image:
        for x in w:
            count[x >> 1] = count.get(x >> 1, 0) + 1
    assert math.prod(math.factorial(k) for k in count.values()) <= 120


def test_many_classes_are_distinct(tri2):
    d = planted_many_classes(tri2, 10)
    oracle = CoverOracle(tri2.map)
    images = d.edge_image
    for i in range(len(images)):
        for j in range(i):
            assert not oracle.homotopic(images[i], images[j], d.vertex_image[0])
