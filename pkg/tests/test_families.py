"""Family calculus tests: membership, classification, star/push, duality,
finite topologies, closure families, and limit sets.

The classification oracle below re-derives hereditarity flags by brute
enumeration so the library's exhaustive classifier is checked against an
independent implementation.
"""

import random

import pytest
from hypothesis import given, settings, strategies as st

from evfam.families import (
    AllFamily,
    CofiniteFamily,
    CoGapLevelFamily,
    EmptyFamily,
    FiniteTopology,
    IndicatorFamily,
    InfiniteFamily,
    PredicateFamily,
    all_topologies,
    closure_family,
    complement_duality_check,
    contains,
    family_complement,
    family_from_json,
    family_to_json,
    limit_set,
    powerset,
    push,
    random_topology,
    star,
    to_indicator,
    topology_from_json,
    topology_to_json,
)
from evfam.intseq import (
    EPSet,
    INF,
    PeriodicSeq,
    cogap,
    intersection,
    random_epset,
)

EVENS = EPSet((), (0, 1))
ODDS = EPSet((), (1, 0))
H = CofiniteFamily()
G = InfiniteFamily()


def brute_flags(ground, sets):
    """Independent hereditarity oracle by full enumeration."""
    ground = tuple(ground)
    sets = {frozenset(s) for s in sets}
    ps = list(powerset(ground))
    eventual = all(t in sets for s in sets for t in ps if s <= t)
    co_eventual = all(t in sets for s in sets for t in ps if t <= s)
    filt = eventual and all((a & b) in sets for a in sets for b in sets)
    fin = len(sets) in (0, len(ps))
    return {
        "eventual": eventual,
        "co_eventual": co_eventual,
        "filter": filt,
        "finitely_insensitive": fin,
    }


# ---------------------------------------------------------------------------
# membership


def test_membership_symbolic():
    assert not contains(H, EVENS)
    assert contains(G, EVENS)
    cofinite = EPSet((0, 1, 0), (1,))  # all n >= 2 except 3... {2,4,5,6,...}
    assert contains(CoGapLevelFamily(3), cofinite)
    assert cogap(cofinite) == INF


def test_membership_rejects_raw_sets_over_naturals():
    with pytest.raises(TypeError):
        H.contains({1, 2, 3})


def test_membership_finite_ground():
    fam = IndicatorFamily(("a", "b"), [{"a"}, {"a", "b"}])
    assert fam.contains({"a"})
    assert not fam.contains({"b"})
    with pytest.raises(ValueError):
        fam.contains({"z"})


def test_cogap_level_requires_positive_level():
    with pytest.raises(ValueError):
        CoGapLevelFamily(0)


# ---------------------------------------------------------------------------
# classification


def test_classify_infinite_family():
    c = G.classify()
    assert c.eventual.value and c.eventual.status == "exact"
    assert not c.filter.value
    a, b = c.filter.witness
    assert G.contains(a) and G.contains(b)
    assert not G.contains(intersection(a, b))
    assert intersection(a, b) == EPSet.empty()


def test_classify_cofinite_family():
    c = H.classify()
    assert c.eventual.value and c.filter.value and c.finitely_insensitive.value
    assert not c.co_eventual.value


def test_classify_trivial_families():
    for fam in (EmptyFamily(("a", "b")), AllFamily(("a", "b")), EmptyFamily(), AllFamily()):
        c = fam.classify()
        assert c.eventual.value and c.co_eventual.value


def test_classify_indicator_example():
    fam = IndicatorFamily(("a", "b"), [{"a"}, {"a", "b"}])
    c = fam.classify()
    assert c.eventual.value
    assert not c.co_eventual.value
    assert c.filter.value  # {a} & {a,b} = {a} stays inside
    assert not c.finitely_insensitive.value


def test_classify_cogap_level_filter_witness():
    fam = CoGapLevelFamily(2)
    c = fam.classify()
    assert c.eventual.value and not c.filter.value
    a, b = c.filter.witness
    assert fam.contains(a) and fam.contains(b)
    assert not fam.contains(intersection(a, b))


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(min_value=0, max_value=3),
    data=st.data(),
)
def test_classify_indicator_matches_brute_oracle(n, data):
    ground = tuple("abcd"[:n])
    ps = list(powerset(ground))
    sets = data.draw(st.lists(st.sampled_from(ps), max_size=len(ps)) if ps else st.just([]))
    fam = IndicatorFamily(ground, sets)
    got = fam.classify()
    want = brute_flags(ground, sets)
    assert got.eventual.value == want["eventual"]
    assert got.co_eventual.value == want["co_eventual"]
    assert got.filter.value == want["filter"]
    assert got.finitely_insensitive.value == want["finitely_insensitive"]
    # refutations must come with a checkable witness
    if not got.eventual.value:
        small, big = got.eventual.witness
        assert small <= big and fam.contains(small) and not fam.contains(big)
    if not got.co_eventual.value:
        big, small = got.co_eventual.witness
        assert small <= big and fam.contains(big) and not fam.contains(small)


def test_predicate_family_sampled_classification():
    fam = PredicateFamily(("a", "b", "c"), lambda s: len(s) >= 1)
    c = fam.classify(budget=300, seed=7)
    assert c.eventual.value and c.eventual.status == "sampled"
    assert not c.co_eventual.value
    assert not c.finitely_insensitive.value


def test_predicate_family_exact_claim():
    fam = PredicateFamily(
        "N", lambda s: not s.is_finite, monotone="increasing", claim_status="exact"
    )
    c = fam.classify(budget=400, seed=3)
    assert c.eventual.value and c.eventual.status == "exact"
    assert not c.filter.value  # sampling finds disjoint infinite sets


def test_triviality_scan_small_grounds():
    # the only families both eventual and co-eventual are Empty and All
    for n in range(3):
        ground = tuple("abc"[:n])
        ps = list(powerset(ground))
        hits = 0
        for mask in range(2 ** len(ps)):
            sets = [s for i, s in enumerate(ps) if mask >> i & 1]
            c = IndicatorFamily(ground, sets).classify()
            if c.eventual.value and c.co_eventual.value:
                hits += 1
        assert hits == 2


# ---------------------------------------------------------------------------
# duality


def test_duality_examples():
    assert complement_duality_check(IndicatorFamily(("a",), [frozenset()]))
    small = [s for s in powerset(("a", "b")) if len(s) <= 1]
    assert complement_duality_check(IndicatorFamily(("a", "b"), small))
    assert complement_duality_check(IndicatorFamily(("a", "b"), [{"a"}]))


@settings(max_examples=60, deadline=None)
@given(n=st.integers(min_value=0, max_value=3), data=st.data())
def test_duality_holds_everywhere(n, data):
    ground = tuple("abcd"[:n])
    ps = list(powerset(ground))
    sets = data.draw(st.lists(st.sampled_from(ps), max_size=len(ps)) if ps else st.just([]))
    fam = IndicatorFamily(ground, sets)
    assert complement_duality_check(fam)
    comp = family_complement(fam)
    assert brute_flags(ground, fam.sets)["co_eventual"] == brute_flags(ground, comp.sets)["eventual"]


# ---------------------------------------------------------------------------
# star and push


def test_star_examples():
    assert star(AllFamily(("a", "b", "c"))) == {"a", "b", "c"}
    assert star(H) == EPSet.empty()
    assert star(IndicatorFamily(("a", "b"), [{"a"}, {"a", "b"}])) == {"a"}
    assert star(AllFamily()) == EPSet.naturals()
    assert star(CoGapLevelFamily(1)) == EPSet.empty()


def test_push_identity_is_identity():
    ground = ("a", "b", "c")
    fam = IndicatorFamily(ground, [{"a"}, {"a", "b"}, {"a", "b", "c"}])
    pushed = push({x: x for x in ground}, fam, codomain=ground)
    for s in powerset(ground):
        assert pushed.contains(s) == fam.contains(s)


def test_push_constant_map():
    fam = IndicatorFamily((1, 2), [{1, 2}])
    pushed = push({1: "a", 2: "a"}, fam)
    assert pushed.contains({"a"})
    assert not pushed.contains(frozenset())


def test_push_constant_sequence_of_cofinite():
    seq = PeriodicSeq((), ("a",))
    pushed = push(seq, H, codomain=("a", "b"))
    for s in powerset(("a", "b")):
        assert pushed.contains(s) == ("a" in s)


def test_push_rejects_partial_maps():
    fam = IndicatorFamily((1, 2), [{1}])
    with pytest.raises(ValueError):
        push({1: "a"}, fam)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_push_preserves_hereditarity(data):
    ground = tuple(range(data.draw(st.integers(min_value=0, max_value=3))))
    ps = list(powerset(ground))
    seed_sets = data.draw(st.lists(st.sampled_from(ps), max_size=4) if ps else st.just([]))
    upward = {t for s in seed_sets for t in ps if s <= t}
    fam = IndicatorFamily(ground, upward)
    assert fam.classify().eventual.value
    codomain = ("x", "y")
    f = {x: data.draw(st.sampled_from(codomain)) for x in ground}
    pushed = push(f, fam, codomain=codomain)
    assert pushed.classify().eventual.value


# ---------------------------------------------------------------------------
# topologies


def test_topology_validation():
    with pytest.raises(ValueError):
        FiniteTopology(("a", "b"), [frozenset()])  # ground missing
    with pytest.raises(ValueError):
        FiniteTopology(("a", "b"), [frozenset(), {"a"}, {"b"}, {"a", "b"}, {"c"}])
    # union of {a} and {b} missing
    with pytest.raises(ValueError):
        FiniteTopology(("a", "b"), [frozenset(), {"a"}, {"b"}])


def test_topology_counts():
    # 1, 1, 4, 29 topologies on 0..3 points
    assert len(all_topologies(())) == 1
    assert len(all_topologies(("a",))) == 1
    assert len(all_topologies(("a", "b"))) == 4
    assert len(all_topologies(("a", "b", "c"))) == 29


def test_subbasis_closure():
    t = FiniteTopology.from_subbasis(("a", "b", "c"), [{"a"}, {"b"}])
    assert t.is_open({"a", "b"})
    assert not t.is_open({"c"})
    rng = random.Random(5)
    for _ in range(25):
        random_topology(("a", "b", "c"), rng)  # constructor validates


# ---------------------------------------------------------------------------
# limit sets and closure families


def test_limit_set_examples():
    ground = ("a", "b")
    disc = FiniteTopology.discrete(ground)
    assert limit_set(AllFamily(ground), disc) == {"a", "b"}
    assert limit_set(EmptyFamily(ground), disc) == frozenset()
    at_a = IndicatorFamily(ground, [s for s in powerset(ground) if "a" in s])
    assert limit_set(at_a, disc) == {"a"}


def test_closure_family_examples():
    ground = ("a", "b")
    disc = FiniteTopology.discrete(ground)
    indisc = FiniteTopology.indiscrete(ground)

    cl_all = closure_family(AllFamily(ground), disc)
    assert cl_all.sets == frozenset(powerset(ground))

    just_x = IndicatorFamily(ground, [set(ground)])
    cl = closure_family(just_x, indisc)
    assert cl.sets == frozenset(s for s in powerset(ground) if s)

    at_a = IndicatorFamily(ground, [s for s in powerset(ground) if "a" in s])
    assert closure_family(at_a, disc).sets == at_a.sets


def test_closure_extends_eventual_families():
    # the extension property needs upward closure: membership of S only
    # transfers to cl F when every open superset is already a member
    rng = random.Random(11)
    ground = ("a", "b", "c")
    ps = list(powerset(ground))
    for _ in range(40):
        t = random_topology(ground, rng)
        seeds = [s for s in ps if rng.random() < 0.3]
        upward = {u for s in seeds for u in ps if s <= u}
        fam = IndicatorFamily(ground, upward)
        cl = closure_family(fam, t)
        assert fam.sets <= cl.sets


def test_star_of_closure_is_limit_set_exhaustive_two_points():
    ground = ("a", "b")
    ps = list(powerset(ground))
    for t in all_topologies(ground):
        for mask in range(2 ** len(ps)):
            fam = IndicatorFamily(ground, [s for i, s in enumerate(ps) if mask >> i & 1])
            lim = limit_set(fam, t)
            assert star(closure_family(fam, t)) == lim
            assert t.is_closed(lim)


def test_star_of_closure_is_limit_set_sampled_three_points():
    rng = random.Random(23)
    ground = ("a", "b", "c")
    ps = list(powerset(ground))
    tops = all_topologies(ground)
    for _ in range(300):
        t = tops[rng.randrange(len(tops))]
        fam = IndicatorFamily(ground, [s for s in ps if rng.random() < 0.5])
        lim = limit_set(fam, t)
        assert star(closure_family(fam, t)) == lim
        assert t.is_closed(lim)


# ---------------------------------------------------------------------------
# the sandwich between cofinite and infinite families


def test_cofinite_implies_level_implies_infinite():
    rng = random.Random(17)
    levels = [CoGapLevelFamily(c) for c in (1, 2, 5)] + [CoGapLevelFamily(INF)]
    for _ in range(200):
        s = random_epset(rng)
        for fam in levels:
            if H.contains(s):
                assert fam.contains(s)
            if fam.contains(s):
                assert G.contains(s)


def test_infinite_sets_have_cogap_at_least_one():
    # over eventually periodic sets the level-1 family is exactly G
    rng = random.Random(29)
    lvl1 = CoGapLevelFamily(1)
    for _ in range(200):
        s = random_epset(rng)
        assert lvl1.contains(s) == G.contains(s)


# ---------------------------------------------------------------------------
# snapshots and JSON


def test_to_indicator_snapshot():
    fam = PredicateFamily(("a", "b"), lambda s: "a" in s)
    snap = to_indicator(fam)
    assert snap.sets == frozenset({frozenset({"a"}), frozenset({"a", "b"})})


def test_family_json_round_trip():
    fams = [
        EmptyFamily(("a", "b")),
        AllFamily(),
        H,
        G,
        CoGapLevelFamily(3),
        CoGapLevelFamily(INF),
        IndicatorFamily(("a", "b"), [{"a"}, {"a", "b"}]),
    ]
    for fam in fams:
        obj = family_to_json(fam)
        back = family_from_json(obj)
        assert family_to_json(back) == obj
    assert family_to_json(CoGapLevelFamily(3)) == {
        "ground": "N",
        "kind": "cogap_level",
        "c": 3,
    }
    assert family_to_json(IndicatorFamily(("a", "b"), [{"a"}, {"a", "b"}])) == {
        "ground": ["a", "b"],
        "kind": "indicator",
        "sets": [["a"], ["a", "b"]],
    }


def test_topology_json_round_trip():
    t = FiniteTopology(("a", "b"), [frozenset(), {"a"}, {"a", "b"}])
    obj = topology_to_json(t)
    assert obj == {"ground": ["a", "b"], "opens": [[], ["a"], ["a", "b"]]}
    assert topology_from_json(obj) == t
