import random

import pytest

from dimerbfz.errors import ValidationError
from dimerbfz.quiver import Quiver, Seed, Vertex, is_two_acyclic, mutate_quiver, mutate_seed
from dimerbfz.ratfunc import RationalFunction, ratfun_str

from oracles import b_matrix, mutate_b_matrix


def figure2_quiver():
    return Quiver([1, 2, 3], [(1, 2), (2, 3), (3, 1), (3, 1)])


def random_two_acyclic(rng, max_vertices=6, max_mult=3, frozen_prob=0.0):
    n = rng.randint(2, max_vertices)
    verts = [Vertex(i, frozen=(rng.random() < frozen_prob)) for i in range(1, n + 1)]
    if all(v.frozen for v in verts):
        verts[0] = Vertex(1, frozen=False)
    arrows = []
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            mult = rng.randint(0, max_mult)
            if mult == 0:
                continue
            src, tgt = (i, j) if rng.random() < 0.5 else (j, i)
            arrows.extend((src, tgt) for _ in range(mult))
    return Quiver(verts, arrows)


def test_figure2_mutation_arrow_set():
    q = mutate_quiver(figure2_quiver(), 2)
    assert q.pair_multiset() == {(2, 1): 1, (3, 2): 1, (3, 1): 1}


def test_figure2_seed_mutation_variable():
    s = Seed.initial(figure2_quiver())
    s2 = mutate_seed(s, 2)
    x1, x2, x3 = (RationalFunction.generator(3, i) for i in range(3))
    assert s2.variables[2] == (x1 + x3) / x2
    assert s2.variables[1] == x1 and s2.variables[3] == x3
    assert s2.variable_strings()[2] == "(x_1+x_3)/x_2"


def test_construction_cancels_two_cycles_and_rejects_loops():
    q = Quiver([1, 2], [(1, 2), (1, 2), (2, 1)])
    assert q.pair_multiset() == {(1, 2): 1}
    with pytest.raises(ValidationError, match="loop"):
        Quiver([1], [(1, 1)])


def test_mutation_requires_mutable_existing_vertex():
    q = Quiver([Vertex(1), Vertex(2, frozen=True)], [(1, 2)])
    with pytest.raises(ValidationError, match="frozen"):
        mutate_quiver(q, 2)
    with pytest.raises(ValidationError):
        mutate_quiver(q, 5)


def test_mutation_never_creates_frozen_frozen_arrows():
    q = Quiver(
        [Vertex(1, frozen=True), Vertex(2), Vertex(3, frozen=True)],
        [(1, 2), (2, 3)],
    )
    m = mutate_quiver(q, 2)
    assert m.pair_multiset() == {(2, 1): 1, (3, 2): 1}


def test_mutation_preserves_existing_frozen_frozen_arrows():
    q = Quiver(
        [Vertex(1, frozen=True), Vertex(2), Vertex(3, frozen=True)],
        [(1, 2), (2, 3), (3, 1)],
    )
    m = mutate_quiver(q, 2)
    assert (3, 1) in m.pair_multiset()


def test_quiver_mutation_involution_random():
    rng = random.Random(17)
    checked = 0
    while checked < 200:
        q = random_two_acyclic(rng, frozen_prob=0.2)
        mutable = [v.id for v in q.vertices if not v.frozen]
        if not mutable:
            continue
        k = rng.choice(mutable)
        assert mutate_quiver(mutate_quiver(q, k), k) == q
        checked += 1


def test_seed_mutation_involution_random():
    rng = random.Random(23)
    checked = 0
    while checked < 40:
        q = random_two_acyclic(rng, max_vertices=4, max_mult=2)
        mutable = [v.id for v in q.vertices if not v.frozen]
        if not mutable:
            continue
        s = Seed.initial(q)
        k = rng.choice(mutable)
        assert mutate_seed(mutate_seed(s, k), k) == s
        checked += 1


def test_mutation_output_two_acyclic_and_loop_free():
    rng = random.Random(29)
    for _ in range(100):
        q = random_two_acyclic(rng)
        k = rng.choice([v.id for v in q.vertices if not v.frozen])
        m = mutate_quiver(q, k)
        assert is_two_acyclic(m)
        assert all(a.src != a.tgt for a in m.arrows)


def test_exchange_matrix_oracle_agreement():
    rng = random.Random(31)
    for _ in range(200):
        q = random_two_acyclic(rng)
        ids = q.vertex_ids()
        k = rng.choice(ids)
        got = b_matrix(mutate_quiver(q, k))
        want = mutate_b_matrix(b_matrix(q), ids.index(k))
        assert got == want


def test_exchange_relation_product_identity():
    rng = random.Random(37)
    for _ in range(25):
        q = random_two_acyclic(rng, max_vertices=4, max_mult=2)
        s = Seed.initial(q)
        k = rng.choice([v.id for v in q.vertices if not v.frozen])
        s2 = mutate_seed(s, k)
        nvars = len(q.vertices)
        outp = RationalFunction.constant(nvars, 1)
        inp = RationalFunction.constant(nvars, 1)
        for a in q.arrows:
            if a.src == k:
                outp = outp * s.variables[a.tgt]
            elif a.tgt == k:
                inp = inp * s.variables[a.src]
        assert s.variables[k] * s2.variables[k] == outp + inp


def test_a2_five_periodicity_hand_fixture():
    q = Quiver([1, 2], [(1, 2)])
    s = Seed.initial(q)
    x1, x2 = (RationalFunction.generator(2, i) for i in range(2))
    one = RationalFunction.constant(2, 1)
    expected = [
        (x2 + one) / x1,
        (x1 + x2 + one) / (x1 * x2),
        (x1 + one) / x2,
        x1,
        x2,
    ]
    produced = []
    for step, k in enumerate((1, 2, 1, 2, 1)):
        s = mutate_seed(s, k)
        produced.append(s.variables[k])
    assert produced == expected
    assert all(v.is_laurent() for v in produced)
    # after the five steps the cluster is the initial one with swapped slots
    assert s.variables == {1: x2, 2: x1}


def test_json_round_trip_identity():
    q = Quiver(
        [Vertex(1), Vertex(2, frozen=True, label="f")],
        [(0, 1, 2)],
    )
    blob = q.to_json()
    assert Quiver.from_json(blob).to_json() == blob


def test_empty_products_at_sources_and_sinks():
    q = Quiver([1, 2], [(1, 2)])
    s = Seed.initial(q)
    x1, x2 = (RationalFunction.generator(2, i) for i in range(2))
    one = RationalFunction.constant(2, 1)
    s1 = mutate_seed(s, 2)  # vertex 2 is a sink: out-product empty
    assert s1.variables[2] == (one + x1) / x2
