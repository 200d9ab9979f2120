"""Families of subsets: membership, hereditarity classification, star and
push operations, closures, and limit sets over finite topologies.

A family is *eventual* when it is closed upward under inclusion and
*co-eventual* when closed downward.  Symbolic families over the positive
integers (cofinite, infinite, cogap-level) evaluate exactly on EPSet
arguments and refuse anything else; opaque predicate families are
classified by seeded sampling and their verdicts say so.  Finite grounds
are handled exhaustively.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .intseq import (
    EPSet,
    ExtNat,
    PeriodicSeq,
    cogap,
    complement,
    finitely_change,
    intersection,
    random_epset,
    union,
)


class _Naturals:
    __slots__ = ()

    def __repr__(self):
        return "N"


#: sentinel ground for families over the positive integers
NATURALS = _Naturals()


def as_ground(ground):
    if isinstance(ground, _Naturals) or (isinstance(ground, str) and ground == "N"):
        return NATURALS
    elems = tuple(ground)
    if len(set(elems)) != len(elems):
        raise ValueError("ground elements must be distinct")
    return elems


def check_set_arg(ground, s):
    """Normalize a set argument against a ground: EPSets over N, frozensets
    over finite grounds."""
    if ground is NATURALS:
        if not isinstance(s, EPSet):
            raise TypeError(
                "families over N evaluate exactly on EPSet arguments only"
            )
        return s
    s = frozenset(s)
    stray = s - set(ground)
    if stray:
        raise ValueError(f"elements {sorted(map(repr, stray))} not in the ground")
    return s


def powerset(elems):
    elems = tuple(elems)
    for r in range(len(elems) + 1):
        for combo in itertools.combinations(elems, r):
            yield frozenset(combo)


@dataclass(frozen=True)
class Verdict:
    """One classified property: its truth value, whether that came from an
    exact argument or from sampling, and a counterexample when refuted."""

    value: bool
    status: str  # "exact" | "sampled"
    witness: object = None

    def __bool__(self):
        return self.value


def _exact(value, witness=None):
    return Verdict(value, "exact", witness)


def _sampled(value, witness=None):
    return Verdict(value, "sampled", witness)


@dataclass(frozen=True)
class Classification:
    eventual: Verdict
    co_eventual: Verdict
    filter: Verdict
    finitely_insensitive: Verdict


class Family:
    """Base class: a family of subsets of ``ground`` answering membership."""

    kind = "abstract"

    def __init__(self, ground=NATURALS):
        self.ground = as_ground(ground)

    @property
    def over_naturals(self):
        return self.ground is NATURALS

    def _arg(self, s):
        return check_set_arg(self.ground, s)

    def contains(self, s):
        raise NotImplementedError

    def __contains__(self, s):
        return self.contains(s)

    def classify(self, budget=1000, seed=0):
        raise NotImplementedError

    def exact_flags(self):
        """Property values known exactly, None where only sampling helps."""
        return {
            "eventual": None,
            "co_eventual": None,
            "filter": None,
            "finitely_insensitive": None,
        }


class EmptyFamily(Family):
    kind = "empty"

    def contains(self, s):
        self._arg(s)
        return False

    def classify(self, budget=1000, seed=0):
        v = _exact(True)
        return Classification(v, v, v, v)

    def exact_flags(self):
        return dict.fromkeys(
            ("eventual", "co_eventual", "filter", "finitely_insensitive"), True
        )


class AllFamily(Family):
    kind = "all"

    def contains(self, s):
        self._arg(s)
        return True

    def classify(self, budget=1000, seed=0):
        v = _exact(True)
        return Classification(v, v, v, v)

    def exact_flags(self):
        return dict.fromkeys(
            ("eventual", "co_eventual", "filter", "finitely_insensitive"), True
        )


class CofiniteFamily(Family):
    """All subsets of N with finite complement."""

    kind = "cofinite"

    def __init__(self):
        super().__init__(NATURALS)

    def contains(self, s):
        return complement(self._arg(s)).is_finite

    def classify(self, budget=1000, seed=0):
        evens = EPSet((), (0, 1))
        return Classification(
            eventual=_exact(True),
            co_eventual=_exact(False, (EPSet.naturals(), evens)),
            filter=_exact(True),
            finitely_insensitive=_exact(True),
        )

    def exact_flags(self):
        return {
            "eventual": True,
            "co_eventual": False,
            "filter": True,
            "finitely_insensitive": True,
        }


class InfiniteFamily(Family):
    """All infinite subsets of N."""

    kind = "infinite"

    def __init__(self):
        super().__init__(NATURALS)

    def contains(self, s):
        return not self._arg(s).is_finite

    def classify(self, budget=1000, seed=0):
        evens = EPSet((), (0, 1))
        odds = EPSet((), (1, 0))
        return Classification(
            eventual=_exact(True),
            co_eventual=_exact(False, (EPSet.naturals(), EPSet.empty())),
            filter=_exact(False, (evens, odds)),
            finitely_insensitive=_exact(True),
        )

    def exact_flags(self):
        return {
            "eventual": True,
            "co_eventual": False,
            "filter": False,
            "finitely_insensitive": True,
        }


class CoGapLevelFamily(Family):
    """Sets whose recurring-run statistic (cogap) is at least c >= 1."""

    kind = "cogap_level"

    def __init__(self, c):
        super().__init__(NATURALS)
        c = ExtNat.of(c)
        if c == 0:
            raise ValueError("the level must be at least 1")
        self.c = c

    def contains(self, s):
        return cogap(self._arg(s)) >= self.c

    def classify(self, budget=1000, seed=0):
        if self.c.is_finite:
            k = self.c.value
            blocks = EPSet((), (1,) * k + (0,) * k)
            filter_witness = (blocks, complement(blocks))
        else:
            # a refuting pair needs unbounded runs, which no eventually
            # periodic set can carry
            filter_witness = None
        return Classification(
            eventual=_exact(True),
            co_eventual=_exact(False, (EPSet.naturals(), EPSet.empty())),
            filter=_exact(False, filter_witness),
            finitely_insensitive=_exact(True),
        )

    def exact_flags(self):
        return {
            "eventual": True,
            "co_eventual": False,
            "filter": False,
            "finitely_insensitive": True,
        }


class IndicatorFamily(Family):
    """Explicitly listed subsets of a finite ground."""

    kind = "indicator"

    def __init__(self, ground, sets):
        super().__init__(ground)
        if self.over_naturals:
            raise ValueError("indicator families need a finite ground")
        base = set(self.ground)
        norm = set()
        for s in sets:
            s = frozenset(s)
            if not s <= base:
                raise ValueError(f"set {sorted(map(repr, s))} leaves the ground")
            norm.add(s)
        self.sets = frozenset(norm)

    def contains(self, s):
        return self._arg(s) in self.sets

    def classify(self, budget=1000, seed=0):
        ground = set(self.ground)
        ev_wit = co_wit = None
        for s in self.sets:
            for extra in powerset(ground - s):
                if extra and (s | extra) not in self.sets:
                    ev_wit = (s, s | extra)
                    break
            if ev_wit:
                break
        for s in self.sets:
            for sub in powerset(s):
                if sub != s and sub not in self.sets:
                    co_wit = (s, sub)
                    break
            if co_wit:
                break
        inter_wit = None
        for a, b in itertools.combinations_with_replacement(self.sets, 2):
            if (a & b) not in self.sets:
                inter_wit = (a, b)
                break
        full = 2 ** len(self.ground)
        if len(self.sets) in (0, full):
            fin = _exact(True)
        else:
            fin = _exact(False, self._toggle_witness())
        filter_wit = ev_wit if ev_wit is not None else inter_wit
        return Classification(
            eventual=_exact(ev_wit is None, ev_wit),
            co_eventual=_exact(co_wit is None, co_wit),
            filter=_exact(ev_wit is None and inter_wit is None, filter_wit),
            finitely_insensitive=fin,
        )

    def _toggle_witness(self):
        # a nontrivial family over a finite ground always has a member and a
        # non-member one element apart
        for s in self.sets:
            for x in self.ground:
                t = s ^ {x}
                if t not in self.sets:
                    return (s, t)
        return None

    def exact_flags(self):
        c = self.classify()
        return {
            "eventual": c.eventual.value,
            "co_eventual": c.co_eventual.value,
            "filter": c.filter.value,
            "finitely_insensitive": c.finitely_insensitive.value,
        }


class PredicateFamily(Family):
    """Opaque membership callable with a declared monotonicity direction.

    ``claim_status`` is "exact" only when the declared direction is known by
    construction, e.g. a level family of an increasing multifamily; the
    classifier then reports that one property exactly and samples the rest.
    """

    kind = "predicate"

    def __init__(self, ground, fn, monotone="unknown", claim_status="sampled"):
        super().__init__(ground)
        if monotone not in ("increasing", "decreasing", "unknown"):
            raise ValueError(f"bad monotonicity label {monotone!r}")
        if claim_status not in ("exact", "sampled"):
            raise ValueError(f"bad claim status {claim_status!r}")
        self.fn = fn
        self.monotone = monotone
        self.claim_status = claim_status

    def contains(self, s):
        return bool(self.fn(self._arg(s)))

    def exact_flags(self):
        flags = super().exact_flags()
        if self.claim_status == "exact":
            if self.monotone == "increasing":
                flags["eventual"] = True
            elif self.monotone == "decreasing":
                flags["co_eventual"] = True
        return flags

    def _sample_set(self, rng):
        if self.over_naturals:
            return random_epset(rng)
        return frozenset(x for x in self.ground if rng.random() < 0.5)

    def _superset(self, s, rng):
        if self.over_naturals:
            return union(s, random_epset(rng))
        extra = frozenset(x for x in self.ground if rng.random() < 0.5)
        return s | extra

    def _subset(self, s, rng):
        if self.over_naturals:
            return intersection(s, random_epset(rng))
        keep = frozenset(x for x in self.ground if rng.random() < 0.5)
        return s & keep

    def _finite_tweak(self, s, rng):
        if self.over_naturals:
            pool = list(range(1, 25))
            rng.shuffle(pool)
            add = frozenset(pool[: rng.randrange(4)])
            rem = frozenset(pool[4 : 4 + rng.randrange(4)])
            return finitely_change(s, add=add, remove=rem)
        x = self.ground[rng.randrange(len(self.ground))] if self.ground else None
        return s ^ {x} if x is not None else s

    def classify(self, budget=1000, seed=0):
        rng = random.Random(seed)
        flags = self.exact_flags()

        ev_wit = co_wit = inter_wit = fin_wit = None
        for _ in range(budget):
            s = self._sample_set(rng)
            s_in = self.contains(s)
            if ev_wit is None and s_in and flags["eventual"] is None:
                sup = self._superset(s, rng)
                if not self.contains(sup):
                    ev_wit = (s, sup)
            if co_wit is None and s_in and flags["co_eventual"] is None:
                sub = self._subset(s, rng)
                if not self.contains(sub):
                    co_wit = (s, sub)
            if inter_wit is None and s_in:
                t = self._sample_set(rng)
                if self.contains(t):
                    meet = (
                        intersection(s, t) if self.over_naturals else s & t
                    )
                    if not self.contains(meet):
                        inter_wit = (s, t)
            if fin_wit is None:
                tweaked = self._finite_tweak(s, rng)
                if self.contains(tweaked) != s_in:
                    fin_wit = (s, tweaked)

        if flags["eventual"] is not None:
            eventual = _exact(flags["eventual"])
        else:
            eventual = _sampled(ev_wit is None, ev_wit)
        if flags["co_eventual"] is not None:
            co_eventual = _exact(flags["co_eventual"])
        else:
            co_eventual = _sampled(co_wit is None, co_wit)
        filt_value = eventual.value and inter_wit is None
        filt_wit = inter_wit if inter_wit is not None else eventual.witness
        return Classification(
            eventual=eventual,
            co_eventual=co_eventual,
            filter=_sampled(filt_value, None if filt_value else filt_wit),
            finitely_insensitive=_sampled(fin_wit is None, fin_wit),
        )


SYMBOLIC_KINDS = (
    EmptyFamily,
    AllFamily,
    CofiniteFamily,
    InfiniteFamily,
    CoGapLevelFamily,
)


# ---------------------------------------------------------------------------
# operations


def contains(family, s):
    return family.contains(s)


def classify(family, budget=1000, seed=0):
    return family.classify(budget=budget, seed=seed)


def to_indicator(family):
    """Snapshot any finite-ground family into an explicit indicator family."""
    if family.over_naturals:
        raise ValueError("cannot snapshot a family over N")
    return IndicatorFamily(
        family.ground,
        [s for s in powerset(family.ground) if family.contains(s)],
    )


def star(family):
    """The set of points whose singleton belongs to the family."""
    if not family.over_naturals:
        return frozenset(x for x in family.ground if family.contains({x}))
    if isinstance(family, AllFamily):
        return EPSet.naturals()
    if isinstance(family, SYMBOLIC_KINDS):
        # singletons are finite, so none of them is cofinite, infinite, or
        # carries a positive cogap level
        return EPSet.empty()
    raise ValueError("star over N needs a symbolic family")


def family_complement(family):
    """All subsets of the finite ground that are not in the family."""
    if family.over_naturals:
        raise ValueError("complement families are computed on finite grounds")
    return IndicatorFamily(
        family.ground,
        [s for s in powerset(family.ground) if not family.contains(s)],
    )


def complement_duality_check(family):
    """Exhaustively confirms: family co-eventual iff its complement family
    is eventual.  Returns the shared truth of that equivalence."""
    snap = to_indicator(family)
    comp = family_complement(family)
    left = snap.classify().co_eventual.value
    right = comp.classify().eventual.value
    return left == right


def push(f, family, codomain=None):
    """Forward image family: S belongs iff the preimage of S belongs.

    ``f`` is a dict on a finite ground, or a PeriodicSeq when the family
    lives over N.  The result is an explicit indicator family over the
    (finite) codomain.
    """
    if isinstance(f, PeriodicSeq):
        if not family.over_naturals:
            raise ValueError("a PeriodicSeq pushes families over N")
        codomain = tuple(codomain) if codomain is not None else f.alphabet()
        members = [
            s
            for s in powerset(codomain)
            if family.contains(f.preimage(s))
        ]
        return IndicatorFamily(codomain, members)
    if isinstance(f, dict):
        if family.over_naturals:
            raise TypeError("dict maps push families over finite grounds")
        missing = set(family.ground) - set(f)
        if missing:
            raise ValueError(f"map is not total: missing {sorted(map(repr, missing))}")
        if codomain is None:
            codomain = tuple(dict.fromkeys(f[x] for x in family.ground))
        else:
            codomain = tuple(codomain)
            stray = {f[x] for x in family.ground} - set(codomain)
            if stray:
                raise ValueError(f"values {sorted(map(repr, stray))} leave the codomain")
        members = []
        for s in powerset(codomain):
            pre = frozenset(x for x in family.ground if f[x] in s)
            if family.contains(pre):
                members.append(s)
        return IndicatorFamily(codomain, members)
    raise TypeError("push takes a dict or a PeriodicSeq")


# ---------------------------------------------------------------------------
# finite topologies


class FiniteTopology:
    """A topology on a finite ground: validated to contain the empty set and
    the ground and to be closed under pairwise unions and intersections."""

    def __init__(self, ground, opens):
        self.ground = tuple(ground)
        if len(set(self.ground)) != len(self.ground):
            raise ValueError("ground elements must be distinct")
        base = frozenset(self.ground)
        opens = frozenset(frozenset(u) for u in opens)
        for u in opens:
            if not u <= base:
                raise ValueError(f"open set {sorted(map(repr, u))} leaves the ground")
        if frozenset() not in opens or base not in opens:
            raise ValueError("opens must contain the empty set and the ground")
        for u, v in itertools.combinations(opens, 2):
            if (u | v) not in opens:
                raise ValueError(
                    f"opens not closed under union: {sorted(map(repr, u))} | {sorted(map(repr, v))}"
                )
            if (u & v) not in opens:
                raise ValueError(
                    f"opens not closed under intersection: {sorted(map(repr, u))} & {sorted(map(repr, v))}"
                )
        self.opens = opens

    def __eq__(self, other):
        if not isinstance(other, FiniteTopology):
            return NotImplemented
        return set(self.ground) == set(other.ground) and self.opens == other.opens

    def __hash__(self):
        return hash((frozenset(self.ground), self.opens))

    def __repr__(self):
        shown = sorted(sorted(map(repr, u)) for u in self.opens)
        return f"FiniteTopology(ground={self.ground!r}, opens={shown})"

    def is_open(self, s):
        return frozenset(s) in self.opens

    def is_closed(self, s):
        return (frozenset(self.ground) - frozenset(s)) in self.opens

    def neighborhoods(self, x):
        if x not in self.ground:
            raise ValueError(f"{x!r} is not a ground element")
        return [u for u in self.opens if x in u]

    def open_supersets(self, s):
        s = frozenset(s)
        return [u for u in self.opens if s <= u]

    @classmethod
    def discrete(cls, ground):
        return cls(ground, powerset(ground))

    @classmethod
    def indiscrete(cls, ground):
        return cls(ground, [frozenset(), frozenset(ground)])

    @classmethod
    def from_subbasis(cls, ground, subbasis):
        ground = tuple(ground)
        opens = {frozenset(), frozenset(ground)}
        opens.update(frozenset(s) for s in subbasis)
        while True:
            fresh = set()
            for u, v in itertools.combinations(opens, 2):
                for w in (u | v, u & v):
                    if w not in opens:
                        fresh.add(w)
            if not fresh:
                break
            opens |= fresh
        return cls(ground, opens)


def all_topologies(ground):
    """Every topology on a small finite ground, by brute enumeration."""
    ground = tuple(ground)
    n = len(ground)
    if n > 4:
        raise ValueError("exhaustive topology enumeration is limited to |X| <= 4")
    base = frozenset(ground)
    optional = [s for s in powerset(ground) if s not in (frozenset(), base)]
    out = []
    for mask in range(2 ** len(optional)):
        opens = {frozenset(), base}
        for i, s in enumerate(optional):
            if mask >> i & 1:
                opens.add(s)
        try:
            out.append(FiniteTopology(ground, opens))
        except ValueError:
            continue
    return out


def random_topology(ground, rng, max_generators=4):
    ground = tuple(ground)
    k = rng.randrange(max_generators + 1)
    subbasis = [
        frozenset(x for x in ground if rng.random() < 0.5) for _ in range(k)
    ]
    return FiniteTopology.from_subbasis(ground, subbasis)


# ---------------------------------------------------------------------------
# closure and limit sets


def _check_same_ground(family, topology):
    if family.over_naturals or set(family.ground) != set(topology.ground):
        raise ValueError("family and topology must share a finite ground")


def limit_set(family, topology):
    """Points all of whose open neighborhoods belong to the family."""
    _check_same_ground(family, topology)
    return frozenset(
        x
        for x in topology.ground
        if all(family.contains(u) for u in topology.neighborhoods(x))
    )


def closure_family(family, topology):
    """Sets all of whose open supersets belong to the family."""
    _check_same_ground(family, topology)
    members = [
        s
        for s in powerset(topology.ground)
        if all(family.contains(u) for u in topology.open_supersets(s))
    ]
    return IndicatorFamily(topology.ground, members)


# ---------------------------------------------------------------------------
# JSON


def _ground_to_json(ground):
    return "N" if ground is NATURALS else list(ground)


def _sorted_sets(ground, sets):
    order = {x: i for i, x in enumerate(ground)}
    listed = [sorted(s, key=order.__getitem__) for s in sets]
    return sorted(listed, key=lambda xs: (len(xs), [order[x] for x in xs]))


def family_to_json(family):
    if isinstance(family, (EmptyFamily, AllFamily)):
        return {"ground": _ground_to_json(family.ground), "kind": family.kind}
    if isinstance(family, (CofiniteFamily, InfiniteFamily)):
        return {"ground": "N", "kind": family.kind}
    if isinstance(family, CoGapLevelFamily):
        return {"ground": "N", "kind": "cogap_level", "c": family.c.to_json()}
    if isinstance(family, IndicatorFamily):
        return {
            "ground": list(family.ground),
            "kind": "indicator",
            "sets": _sorted_sets(family.ground, family.sets),
        }
    raise ValueError(f"family kind {family.kind!r} has no JSON form")


def family_from_json(obj):
    kind = obj["kind"]
    if kind == "empty":
        return EmptyFamily(as_ground(obj.get("ground", "N")))
    if kind == "all":
        return AllFamily(as_ground(obj.get("ground", "N")))
    if kind == "cofinite":
        return CofiniteFamily()
    if kind == "infinite":
        return InfiniteFamily()
    if kind == "cogap_level":
        return CoGapLevelFamily(ExtNat.from_json(obj["c"]))
    if kind == "indicator":
        return IndicatorFamily(obj["ground"], obj["sets"])
    raise ValueError(f"unknown family kind {kind!r}")


def topology_to_json(topology):
    return {
        "ground": list(topology.ground),
        "opens": _sorted_sets(topology.ground, topology.opens),
    }


def topology_from_json(obj):
    return FiniteTopology(obj["ground"], obj["opens"])
