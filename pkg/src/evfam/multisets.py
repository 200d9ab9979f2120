"""Multisets and multifamilies: set-functions with multiplicities in
{0, 1, ..., inf}.

A multifamily assigns an extended-natural multiplicity to every subset of
its ground.  The two workhorses over the positive integers are the gap and
cogap statistics; indicator multifamilies lift ordinary families, and the
complement wrapper evaluates on complements (which exchanges increasing
and decreasing).  Closures and limits are defined for increasing
multifamilies over finite topologies only.
"""

from __future__ import annotations

import itertools

from .families import (
    NATURALS,
    AllFamily,
    CoGapLevelFamily,
    EmptyFamily,
    Family,
    IndicatorFamily,
    PredicateFamily,
    Verdict,
    _exact,
    _sorted_sets,
    as_ground,
    check_set_arg,
    family_from_json,
    family_to_json,
    powerset,
)
from .intseq import EPSet, ExtNat, INF, PeriodicSeq, cogap, complement, gap

ZERO = ExtNat(0)
ONE = ExtNat(1)


class Multiset:
    """Finite ground with an extended-natural multiplicity per element."""

    def __init__(self, ground, mult=None):
        self.ground = tuple(ground)
        if len(set(self.ground)) != len(self.ground):
            raise ValueError("ground elements must be distinct")
        mult = dict(mult or {})
        stray = set(mult) - set(self.ground)
        if stray:
            raise ValueError(f"elements {sorted(map(repr, stray))} not in the ground")
        self._mult = {x: ExtNat.of(mult.get(x, 0)) for x in self.ground}

    def mult(self, x):
        if x not in self._mult:
            raise ValueError(f"{x!r} is not a ground element")
        return self._mult[x]

    __getitem__ = mult

    def support(self):
        return frozenset(x for x, m in self._mult.items() if m >= ONE)

    def __eq__(self, other):
        if not isinstance(other, Multiset):
            return NotImplemented
        return set(self.ground) == set(other.ground) and self._mult == other._mult

    def __hash__(self):
        return hash((frozenset(self.ground), frozenset(self._mult.items())))

    def __repr__(self):
        shown = {x: m for x, m in self._mult.items() if m >= ONE}
        return f"Multiset(ground={self.ground!r}, mult={shown!r})"


class Multifamily:
    """Base class: assigns an ExtNat multiplicity to subsets of a ground."""

    kind = "abstract"

    def __init__(self, ground=NATURALS):
        self.ground = as_ground(ground)

    @property
    def over_naturals(self):
        return self.ground is NATURALS

    def _arg(self, s):
        return check_set_arg(self.ground, s)

    def value(self, s) -> ExtNat:
        raise NotImplementedError

    def __call__(self, s):
        return self.value(s)

    def classify(self, budget=1000, seed=0):
        raise NotImplementedError


class MFClassification:
    def __init__(self, increasing, decreasing, finitely_insensitive):
        self.increasing = increasing
        self.decreasing = decreasing
        self.finitely_insensitive = finitely_insensitive

    def __repr__(self):
        return (
            f"MFClassification(increasing={self.increasing!r}, "
            f"decreasing={self.decreasing!r}, "
            f"finitely_insensitive={self.finitely_insensitive!r})"
        )


class GapMultifamily(Multifamily):
    """Multiplicity = recurring count of missing integers between
    consecutive elements; infinite for finite sets."""

    kind = "gap"

    def __init__(self):
        super().__init__(NATURALS)

    def value(self, s):
        return gap(self._arg(s))

    def classify(self, budget=1000, seed=0):
        # {1} has value inf yet N has value 0
        wit = (EPSet.finite([1]), EPSet.naturals())
        return MFClassification(
            increasing=_exact(False, wit),
            decreasing=_exact(True),
            finitely_insensitive=_exact(True),
        )


class CoGapMultifamily(Multifamily):
    """Multiplicity = gap of the complement: recurring runs of consecutive
    members."""

    kind = "cogap"

    def __init__(self):
        super().__init__(NATURALS)

    def value(self, s):
        return cogap(self._arg(s))

    def classify(self, budget=1000, seed=0):
        wit = (EPSet.empty(), EPSet.naturals())
        return MFClassification(
            increasing=_exact(True),
            decreasing=_exact(False, wit),
            finitely_insensitive=_exact(True),
        )


class IndicatorMultifamily(Multifamily):
    """Lifts a family to multiplicities in {0, 1}."""

    kind = "indicator"

    def __init__(self, family):
        if not isinstance(family, Family):
            raise TypeError("indicator multifamilies wrap a family")
        self.family = family
        super().__init__(family.ground if not family.over_naturals else NATURALS)

    def value(self, s):
        return ONE if self.family.contains(s) else ZERO

    def classify(self, budget=1000, seed=0):
        c = self.family.classify(budget=budget, seed=seed)
        ev, co = c.eventual, c.co_eventual
        dec_wit = None
        if co.witness is not None:
            big, small = co.witness
            dec_wit = (small, big)
        return MFClassification(
            increasing=Verdict(ev.value, ev.status, ev.witness),
            decreasing=Verdict(co.value, co.status, dec_wit),
            finitely_insensitive=c.finitely_insensitive,
        )


class ComplementMultifamily(Multifamily):
    """Evaluates the inner multifamily on complements."""

    kind = "complement"

    def __init__(self, inner):
        self.inner = inner
        super().__init__(inner.ground if not inner.over_naturals else NATURALS)

    def _co(self, s):
        if self.over_naturals:
            return complement(s)
        return frozenset(self.ground) - s

    def value(self, s):
        return self.inner.value(self._co(self._arg(s)))

    def classify(self, budget=1000, seed=0):
        c = self.inner.classify(budget=budget, seed=seed)

        def flip(v):
            wit = v.witness
            if wit is not None:
                a, b = wit
                wit = (self._co(b), self._co(a))
            return Verdict(v.value, v.status, wit)

        # S |-> S^c reverses inclusion, so the directions swap
        return MFClassification(
            increasing=flip(c.decreasing),
            decreasing=flip(c.increasing),
            finitely_insensitive=c.finitely_insensitive,
        )


class ExplicitMultifamily(Multifamily):
    """Finite table of multiplicities over a finite ground; absent sets
    have multiplicity 0."""

    kind = "explicit"

    def __init__(self, ground, table):
        super().__init__(ground)
        if self.over_naturals:
            raise ValueError("explicit multifamilies need a finite ground")
        base = set(self.ground)
        self.table = {}
        for s, v in dict(table).items():
            s = frozenset(s)
            if not s <= base:
                raise ValueError(f"set {sorted(map(repr, s))} leaves the ground")
            self.table[s] = ExtNat.of(v)

    def value(self, s):
        return self.table.get(self._arg(s), ZERO)

    def classify(self, budget=1000, seed=0):
        return _classify_exhaustive(self)


class PushedMultifamily(Multifamily):
    """Evaluates the inner multifamily on preimages under a fixed map."""

    kind = "pushed"

    def __init__(self, f, inner, codomain=None):
        if isinstance(f, PeriodicSeq):
            if not inner.over_naturals:
                raise ValueError("a PeriodicSeq pushes multifamilies over N")
            codomain = tuple(codomain) if codomain is not None else f.alphabet()
        elif isinstance(f, dict):
            if inner.over_naturals:
                raise TypeError("dict maps push multifamilies over finite grounds")
            missing = set(inner.ground) - set(f)
            if missing:
                raise ValueError(
                    f"map is not total: missing {sorted(map(repr, missing))}"
                )
            if codomain is None:
                codomain = tuple(dict.fromkeys(f[x] for x in inner.ground))
            else:
                codomain = tuple(codomain)
                stray = {f[x] for x in inner.ground} - set(codomain)
                if stray:
                    raise ValueError(
                        f"values {sorted(map(repr, stray))} leave the codomain"
                    )
        else:
            raise TypeError("push takes a dict or a PeriodicSeq")
        self.f = f
        self.inner = inner
        super().__init__(codomain)

    def _preimage(self, s):
        if isinstance(self.f, PeriodicSeq):
            return self.f.preimage(s)
        return frozenset(x for x in self.inner.ground if self.f[x] in s)

    def value(self, s):
        return self.inner.value(self._preimage(self._arg(s)))

    def classify(self, budget=1000, seed=0):
        return _classify_exhaustive(self)


def _classify_exhaustive(mf):
    """Exact direction and insensitivity verdicts for a finite ground."""
    ps = list(powerset(mf.ground))
    vals = {s: mf.value(s) for s in ps}
    inc_wit = dec_wit = None
    for s, t in itertools.permutations(ps, 2):
        if s < t:
            if inc_wit is None and vals[s] > vals[t]:
                inc_wit = (s, t)
            if dec_wit is None and vals[s] < vals[t]:
                dec_wit = (s, t)
        if inc_wit and dec_wit:
            break
    fin_wit = None
    for s in ps:
        for x in mf.ground:
            t = s ^ {x}
            if vals[s] != vals[t]:
                fin_wit = (s, t)
                break
        if fin_wit:
            break
    return MFClassification(
        increasing=_exact(inc_wit is None, inc_wit),
        decreasing=_exact(dec_wit is None, dec_wit),
        finitely_insensitive=_exact(fin_wit is None, fin_wit),
    )


# ---------------------------------------------------------------------------
# operations


def mf_value(mf, s):
    return mf.value(s)


def mf_complement(mf):
    if isinstance(mf, ComplementMultifamily):
        return mf.inner
    return ComplementMultifamily(mf)


def mf_classify(mf, budget=1000, seed=0):
    return mf.classify(budget=budget, seed=seed)


def level_family(mf, c):
    """The family of sets whose multiplicity reaches level c >= 1."""
    c = ExtNat.of(c)
    if c == 0:
        raise ValueError("level families need c >= 1; c = 0 names everything")
    if isinstance(mf, CoGapMultifamily):
        return CoGapLevelFamily(c)
    if isinstance(mf, IndicatorMultifamily):
        if c == ONE:
            return mf.family
        ground = "N" if mf.over_naturals else mf.ground
        return EmptyFamily(ground)
    if not mf.over_naturals:
        members = [s for s in powerset(mf.ground) if mf.value(s) >= c]
        return IndicatorFamily(mf.ground, members)
    cls = mf.classify()
    if cls.increasing.value and cls.increasing.status == "exact":
        monotone, claim = "increasing", "exact"
    elif cls.decreasing.value and cls.decreasing.status == "exact":
        monotone, claim = "decreasing", "exact"
    else:
        monotone, claim = "unknown", "sampled"
    return PredicateFamily(
        "N", lambda s: mf.value(s) >= c, monotone=monotone, claim_status=claim
    )


def mstar(mf):
    """Multiset of singleton multiplicities."""
    if mf.over_naturals:
        raise ValueError("mstar needs a finite ground")
    return Multiset(mf.ground, {x: mf.value(frozenset({x})) for x in mf.ground})


def mpush(f, mf, codomain=None):
    return PushedMultifamily(f, mf, codomain)


def _require_increasing(mf):
    cls = mf.classify()
    if not cls.increasing.value:
        raise ValueError(
            "closure and limits are defined for increasing multifamilies only"
        )


def _check_ground(mf, topology):
    if mf.over_naturals or set(mf.ground) != set(topology.ground):
        raise ValueError("multifamily and topology must share a finite ground")


def mf_closure(mf, topology):
    """Increasing multifamily with value(S) = min over open supersets."""
    _check_ground(mf, topology)
    _require_increasing(mf)
    table = {
        s: min(mf.value(u) for u in topology.open_supersets(s))
        for s in powerset(topology.ground)
    }
    return ExplicitMultifamily(topology.ground, table)


def multiset_limit(mf, topology):
    """Pointwise limit multiset: min multiplicity over open neighborhoods."""
    _check_ground(mf, topology)
    _require_increasing(mf)
    mult = {
        x: min(mf.value(u) for u in topology.neighborhoods(x))
        for x in topology.ground
    }
    return Multiset(topology.ground, mult)


# ---------------------------------------------------------------------------
# JSON


def mf_to_json(mf):
    if isinstance(mf, GapMultifamily):
        return {"kind": "gap"}
    if isinstance(mf, CoGapMultifamily):
        return {"kind": "cogap"}
    if isinstance(mf, ComplementMultifamily):
        return {"kind": "complement", "inner": mf_to_json(mf.inner)}
    if isinstance(mf, IndicatorMultifamily):
        return {"kind": "indicator", "family": family_to_json(mf.family)}
    if isinstance(mf, ExplicitMultifamily):
        order = {x: i for i, x in enumerate(mf.ground)}
        rows = [
            [sorted(s, key=order.__getitem__), v.to_json()]
            for s, v in mf.table.items()
        ]
        rows.sort(key=lambda row: (len(row[0]), [order[x] for x in row[0]]))
        return {"kind": "explicit", "ground": list(mf.ground), "table": rows}
    raise ValueError(f"multifamily kind {mf.kind!r} has no JSON form")


def mf_from_json(obj):
    kind = obj["kind"]
    if kind == "gap":
        return GapMultifamily()
    if kind == "cogap":
        return CoGapMultifamily()
    if kind == "complement":
        return ComplementMultifamily(mf_from_json(obj["inner"]))
    if kind == "indicator":
        return IndicatorMultifamily(family_from_json(obj["family"]))
    if kind == "explicit":
        table = {frozenset(s): ExtNat.from_json(v) for s, v in obj["table"]}
        return ExplicitMultifamily(obj["ground"], table)
    raise ValueError(f"unknown multifamily kind {kind!r}")
