"""Executable property suites behind the ``check`` command.

Each suite re-runs its module's structural laws on freshly sampled inputs:
the point is a fast, seedable smoke screen against regressions, not a proof.
Budget counts sampled cases per check; a budget of zero short-circuits every
suite to a vacuous pass so pipelines can disable the sampling cheaply.

On failure a check keeps scanning and reports the shortest witness it saw,
plus the failure count.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

import numpy as np

from . import analysis, cfp
from .families import (
    CofiniteFamily,
    CoGapLevelFamily,
    IndicatorFamily,
    InfiniteFamily,
    closure_family,
    limit_set,
    powerset,
    push,
    random_topology,
    star,
)
from .intseq import (
    EPSet,
    INF,
    ExtNat,
    cogap,
    complement,
    finitely_change,
    gap,
    intersection,
    random_epset,
    union,
)
from .multisets import (
    CoGapMultifamily,
    ExplicitMultifamily,
    GapMultifamily,
    IndicatorMultifamily,
    level_family,
    mf_closure,
    mf_complement,
    mstar,
    multiset_limit,
)
from .setlimits import SetSequence, classical_limits, e_limit, verify_limit_theorem

DEFAULT_BUDGET = 500

SUITE_NAMES = ("intseq", "families", "multisets", "setlimits", "cfp", "analysis")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    cases: int
    note: str = ""

    def line(self):
        mark = "ok  " if self.passed else "FAIL"
        tail = f"  [{self.note}]" if self.note else ""
        return f"{mark} {self.name}: {self.cases} cases{tail}"


def _result(name, cases, failures):
    if not failures:
        return CheckResult(name, True, cases)
    witness = min(failures, key=lambda w: (len(w), w))
    return CheckResult(name, False, cases, f"{len(failures)} failed, e.g. {witness}")


def _brute_gap(s, horizon=None):
    # membership-only tail scan; horizon p + 4q always sees a full period
    if s.is_finite:
        return INF
    p, q = len(s.prefix), len(s.period)
    if horizon is None:
        horizon = p + 4 * q
    elems = [n for n in range(p + 1, horizon + 1) if s.member(n)]
    return ExtNat(max(b - a - 1 for a, b in zip(elems, elems[1:])))


# ---------------------------------------------------------------------------
# intseq


def check_intseq(seed, budget):
    rng = random.Random(seed)
    out = []

    failures = []
    for _ in range(budget):
        s = random_epset(rng)
        if gap(s) != _brute_gap(s):
            failures.append(s.to_text())
    out.append(_result("intseq.gap-oracle", budget, failures))

    failures = []
    for _ in range(budget):
        s = random_epset(rng)
        if cogap(s) != gap(complement(s)):
            failures.append(s.to_text())
    out.append(_result("intseq.cogap-duality", budget, failures))

    failures = []
    for _ in range(budget):
        s = random_epset(rng)
        edits = rng.sample(range(1, 40), rng.randrange(4))
        t = finitely_change(s, add=edits[::2], remove=edits[1::2])
        if gap(t) != gap(s) or cogap(t) != cogap(s):
            failures.append(f"{s.to_text()} edits={edits}")
    out.append(_result("intseq.finite-insensitivity", budget, failures))

    failures = []
    for _ in range(budget):
        a, b = random_epset(rng), random_epset(rng)
        if complement(union(a, b)) != intersection(complement(a), complement(b)):
            failures.append(f"{a.to_text()} | {b.to_text()}")
    out.append(_result("intseq.de-morgan", budget, failures))
    return out


# ---------------------------------------------------------------------------
# families


def _random_letters(rng, low, high):
    return tuple("abcd"[: rng.randrange(low, high + 1)])


def _random_indicator(ground, rng, p=0.5):
    return IndicatorFamily(ground, [s for s in powerset(ground) if rng.random() < p])


def _random_eventual(ground, rng):
    subsets = list(powerset(ground))
    seeds = [s for s in subsets if rng.random() < 0.3]
    return IndicatorFamily(
        ground, [s for s in subsets if any(seed <= s for seed in seeds)]
    )


def check_families(seed, budget):
    rng = random.Random(seed)
    out = []

    # exhaustive bilateral-family scan; budget only gates whether it runs
    scanned = 0
    hits = []
    for n in range(4):
        ground = tuple("abcd"[:n])
        subsets = list(powerset(ground))
        for mask in range(2 ** len(subsets)):
            members = [s for i, s in enumerate(subsets) if mask >> i & 1]
            fam = IndicatorFamily(ground, members)
            flags = fam.classify()
            scanned += 1
            if flags.eventual.value and flags.co_eventual.value:
                hits.append((n, len(members)))
    expected = 4 * 2  # empty and full family at each size
    failures = [] if len(hits) == expected else [f"bilateral count {len(hits)} != {expected}"]
    out.append(_result("families.triviality-scan", scanned, failures))

    failures = []
    for _ in range(budget):
        ground = _random_letters(rng, 2, 3)
        topo = random_topology(ground, rng)
        fam = _random_indicator(ground, rng)
        lim = limit_set(fam, topo)
        if star(closure_family(fam, topo)) != lim:
            failures.append(f"{sorted(map(sorted, fam.sets))} on {topo!r}")
        elif not topo.is_closed(lim):
            failures.append(f"open limit set {sorted(lim)} on {topo!r}")
    out.append(_result("families.star-closure-limit", budget, failures))

    failures = []
    levels = [CoGapLevelFamily(c) for c in (1, 2, 5)] + [CoGapLevelFamily(INF)]
    H, G = CofiniteFamily(), InfiniteFamily()
    for _ in range(budget):
        s = random_epset(rng)
        for fam in levels:
            if H.contains(s) and not fam.contains(s):
                failures.append(f"H !=> level: {s.to_text()}")
            if fam.contains(s) and not G.contains(s):
                failures.append(f"level !=> G: {s.to_text()}")
    out.append(_result("families.level-sandwich", budget, failures))

    failures = []
    for _ in range(budget):
        ground = _random_letters(rng, 2, 3)
        code = tuple("xyz"[: rng.randrange(1, 3)])
        f = {x: rng.choice(code) for x in ground}
        fam = _random_eventual(ground, rng)
        pushed = push(f, fam, codomain=code)
        if not pushed.classify().eventual.value:
            failures.append(f"map {f} over {sorted(map(sorted, fam.sets))}")
    out.append(_result("families.push-hereditarity", budget, failures))
    return out


# ---------------------------------------------------------------------------
# multisets


def check_multisets(seed, budget):
    rng = random.Random(seed)
    out = []

    failures = []
    for _ in range(budget):
        ground = _random_letters(rng, 1, 3)
        fam = _random_indicator(ground, rng)
        flags = fam.classify()
        mflags = IndicatorMultifamily(fam).classify()
        if flags.eventual.value != mflags.increasing.value:
            failures.append(f"eventual/increasing split on {sorted(map(sorted, fam.sets))}")
        if flags.co_eventual.value != mflags.decreasing.value:
            failures.append(f"co-eventual/decreasing split on {sorted(map(sorted, fam.sets))}")
    out.append(_result("multisets.indicator-bridge", budget, failures))

    failures = []
    for _ in range(budget):
        s = random_epset(rng)
        g = gap(s)
        if not g.is_finite:
            continue
        p, q = len(s.prefix), len(s.period)
        elems = [n for n in range(p + 1, p + 6 * max(q, 1) + 1) if s.member(n)]
        gaps = [b - a - 1 for a, b in zip(elems, elems[1:])]
        if gaps.count(g.value) < 2:
            failures.append(s.to_text())
    out.append(_result("multisets.gap-attainment", budget, failures))

    failures = []
    cogap_mf = CoGapMultifamily()
    for _ in range(budget):
        s = random_epset(rng)
        extra = [rng.randrange(1, 30) for _ in range(rng.randrange(3))]
        sup = finitely_change(union(s, random_epset(rng)), add=extra)
        for c in (1, 2, 3, INF):
            fam = level_family(cogap_mf, c)
            if fam.contains(s) and not fam.contains(union(s, sup)):
                failures.append(f"c={c}: {s.to_text()}")
    out.append(_result("multisets.level-monotone", budget, failures))

    failures = []
    for _ in range(budget):
        ground = _random_letters(rng, 1, 3)
        topo = random_topology(ground, rng)
        weights = {x: rng.randrange(4) for x in ground}
        table = {
            s: (max((weights[x] for x in s), default=0)) for s in powerset(ground)
        }
        mf = ExplicitMultifamily(ground, table)
        limit = multiset_limit(mf, topo)
        via_closure = mstar(mf_closure(mf, topo))
        if limit != via_closure:
            failures.append(f"{weights} on {topo!r}")
    out.append(_result("multisets.limit-star-closure", budget, failures))

    failures = []
    for _ in range(budget):
        s = random_epset(rng)
        for mf in (GapMultifamily(), CoGapMultifamily()):
            if mf_complement(mf_complement(mf)).value(s) != mf.value(s):
                failures.append(f"{mf!r} at {s.to_text()}")
    out.append(_result("multisets.complement-involution", budget, failures))
    return out


# ---------------------------------------------------------------------------
# setlimits


def _random_sequence(rng, convergent):
    ground = _random_letters(rng, 1, 3)
    subsets = list(powerset(ground))
    prefix = [rng.choice(subsets) for _ in range(rng.randrange(5))]
    if convergent:
        period = [rng.choice(subsets)]
    else:
        a = rng.choice(subsets)
        b = rng.choice([s for s in subsets if s != a])
        period = [a, b] + [rng.choice(subsets) for _ in range(rng.randrange(3))]
    return SetSequence.from_sets(ground, prefix, period)


def _brute_window_limits(seq):
    period = 1
    for tr in seq.traces.values():
        period = math.lcm(period, max(len(tr.period), 1))
    start = 1 + max((len(tr.prefix) for tr in seq.traces.values()), default=0)
    window = [seq.set_at(n) for n in range(start, start + 2 * period)]
    limsup = frozenset(x for x in seq.ground if any(x in s for s in window))
    liminf = frozenset(x for x in seq.ground if all(x in s for s in window))
    return limsup, liminf


def check_setlimits(seed, budget):
    rng = random.Random(seed)
    out = []

    failures = []
    for _ in range(budget):
        seq = _random_sequence(rng, convergent=bool(rng.randrange(2)))
        limsup, liminf = _brute_window_limits(seq)
        cls = classical_limits(seq)
        if cls.limsup != limsup or cls.liminf != liminf:
            failures.append(repr(seq))
    out.append(_result("setlimits.classical-oracle", budget, failures))

    families = [
        InfiniteFamily(),
        CofiniteFamily(),
        CoGapLevelFamily(1),
        CoGapLevelFamily(2),
        CoGapLevelFamily(5),
    ]
    failures = []
    for _ in range(budget):
        seq = _random_sequence(rng, convergent=True)
        for fam in families:
            verdict = verify_limit_theorem(seq, fam)
            if verdict.status != "verified":
                failures.append(f"{verdict.status}/{fam!r} on {seq!r}")
    out.append(_result("setlimits.theorem-corpus", budget, failures))

    failures = []
    for _ in range(budget):
        seq = _random_sequence(rng, convergent=False)
        cls = classical_limits(seq)
        for fam in families[2:]:
            lim = e_limit(fam, seq)
            if not (cls.liminf <= lim <= cls.limsup):
                failures.append(f"{fam!r} on {seq!r}")
    out.append(_result("setlimits.sandwich", budget, failures))
    return out


# ---------------------------------------------------------------------------
# cfp


def _random_operator(rng, dim=2):
    kind = rng.choice(["halfspace", "hyperplane", "ball", "box", "affine"])
    if kind == "halfspace":
        a = [rng.uniform(-2, 2) for _ in range(dim)] or [1.0]
        if all(abs(v) < 1e-3 for v in a):
            a[0] = 1.0
        return cfp.Halfspace(a, rng.uniform(-2, 2))
    if kind == "hyperplane":
        a = [rng.uniform(-2, 2) for _ in range(dim)]
        if all(abs(v) < 1e-3 for v in a):
            a[0] = 1.0
        return cfp.Hyperplane(a, rng.uniform(-2, 2))
    if kind == "ball":
        return cfp.Ball([rng.uniform(-2, 2) for _ in range(dim)], rng.uniform(0.5, 3))
    if kind == "box":
        lo = [rng.uniform(-3, 0) for _ in range(dim)]
        return cfp.Box(lo, [v + rng.uniform(0.1, 3) for v in lo])
    a = [[rng.uniform(-2, 2) for _ in range(dim)]]
    if all(abs(v) < 1e-3 for v in a[0]):
        a[0][0] = 1.0
    return cfp.AffineEquality(a, [rng.uniform(-2, 2)])


def _fixed_point_of(op, rng, dim=2):
    # projections are idempotent, so one application lands on Fix
    probe = np.array([rng.uniform(-5, 5) for _ in range(dim)])
    return op.apply(probe)


def check_cfp(seed, budget):
    rng = random.Random(seed)
    out = []

    failures = []
    for _ in range(budget):
        op = _random_operator(rng)
        x = np.array([rng.uniform(-5, 5) for _ in range(2)])
        z = _fixed_point_of(op, rng)
        if not cfp.cutter_check(op, x, z, tol=1e-10):
            failures.append(f"{op!r} at x={x.tolist()}")
    out.append(_result("cfp.cutter", budget, failures))

    failures = []
    for _ in range(budget):
        op = _random_operator(rng)
        x = np.array([rng.uniform(-5, 5) for _ in range(2)])
        y = np.array([rng.uniform(-5, 5) for _ in range(2)])
        if not cfp.fne_check(op, x, y, tol=1e-10):
            failures.append(f"{op!r} at x={x.tolist()}, y={y.tolist()}")
    out.append(_result("cfp.firmly-nonexpansive", budget, failures))

    failures = []
    for _ in range(budget):
        op = cfp.relax(_random_operator(rng), rng.uniform(0, 1))
        x = np.array([rng.uniform(-5, 5) for _ in range(2)])
        z = _fixed_point_of(op.inner, rng)
        if not cfp.cutter_check(op, x, z, tol=1e-10):
            failures.append(f"{op!r} at x={x.tolist()}")
    out.append(_result("cfp.relax-preserves-cutter", budget, failures))

    instances = max(1, budget // 25)
    nprng = np.random.default_rng(seed)
    failures = []
    for k in range(instances):
        ops, center = cfp.random_feasible_instance(3, 6, nprng)
        pattern = cfp.random_almost_cyclic_pattern(6, nprng)
        trace = cfp.acsa_run(
            ops,
            cfp.AlmostCyclicControl(pattern),
            cfp.ConstantRelaxation(1.0),
            nprng.uniform(-5, 5, size=3),
            cfp.StopRule(tol=1e-7, max_iter=20000),
        )
        if not trace.converged:
            failures.append(f"instance {k}: {trace.stop_reason}")
            continue
        if cfp.fejer_slack(trace, center) > 1e-10:
            failures.append(f"instance {k}: fejer slack")
        elif cfp.replay_trace(ops, trace) > 1e-12:
            failures.append(f"instance {k}: replay drift")
    out.append(_result("cfp.fejer-replay", instances, failures))
    return out


# ---------------------------------------------------------------------------
# analysis


def check_analysis(seed, budget):
    rng = random.Random(seed)
    nprng = np.random.default_rng(seed)
    out = []

    failures = []
    for k in range(budget):
        walk = np.cumsum(nprng.uniform(-1, 1, size=60))
        est = analysis.cogap_limit_estimate(list(walk))
        for cand in est.candidates:
            values = [row["estimate"] for row in cand.per_eps]
            if any(a < b for a, b in zip(values, values[1:])):
                failures.append(f"walk {k}")
    out.append(_result("analysis.estimate-monotone", budget, failures))

    instances = max(1, budget // 25)
    fail_cert = []
    fail_window = []
    fail_level = []
    for k in range(instances):
        ops, _ = cfp.random_feasible_instance(3, 6, nprng)
        m = len(ops)
        x0 = nprng.uniform(-5, 5, size=3)
        while max(op.fix_residual(x0) for op in ops) <= 1e-3:
            x0 = nprng.uniform(-30, 30, size=3)
        trace = cfp.acsa_run(
            ops,
            cfp.CyclicControl(m),
            cfp.ConstantRelaxation(1.0),
            x0,
            cfp.StopRule(tol=1e-6, max_iter=20000),
        )
        if not trace.converged:
            fail_cert.append(f"instance {k}: {trace.stop_reason}")
            continue
        cert = analysis.certify_fixed_points(trace, ops, tol=1e-5)
        if cert.status != "certified":
            fail_cert.append(f"instance {k}: {cert.status}")
        for rep in cert.follows:
            if rep.min_c is None or rep.min_c > m:
                fail_window.append(f"instance {k} op {rep.operator}")

        # a certified window c promises: every stretch of c+1 consecutive
        # 1-based iterate indices inside the range contains an adjacent
        # witness pair; spot-check with EPSets built to carry such runs
        rep = cert.follows[0]
        if rep.min_c is not None:
            c = rep.min_c
            steps = {q for q, _ in rep.witnesses}
            for _ in range(3):
                pre = tuple(rng.randrange(2) for _ in range(rng.randrange(6)))
                per = tuple(rng.randrange(2) for _ in range(rng.randrange(8)))
                s = EPSet(pre, per + (1,) * (c + 1))
                if cogap(s) < c + 1:
                    fail_level.append(f"instance {k}: corpus cogap below c+1")
                    continue
                run = []
                for n in range(1, trace.n_steps + 2):
                    if s.member(n):
                        run.append(n)
                    if run and (not s.member(n) or n == trace.n_steps + 1):
                        if len(run) >= c + 1 and not any(
                            run[0] - 1 <= q <= run[-1] - 2 for q in steps
                        ):
                            fail_level.append(f"instance {k}: run at {run[0]}")
                        run = []
    out.append(_result("analysis.theorem1-consistency", instances, fail_cert))
    out.append(_result("analysis.follows-window", instances, fail_window))
    out.append(_result("analysis.level-soundness", instances, fail_level))
    return out


# ---------------------------------------------------------------------------
# the registry


SUITES = {
    "intseq": check_intseq,
    "families": check_families,
    "multisets": check_multisets,
    "setlimits": check_setlimits,
    "cfp": check_cfp,
    "analysis": check_analysis,
}


def run_suite(name, seed=0, budget=DEFAULT_BUDGET):
    """Runs one named suite (or ``all``) and returns its CheckResults."""
    if name == "all":
        results = []
        for sub in SUITE_NAMES:
            results.extend(run_suite(sub, seed, budget))
        return results
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; pick from {SUITE_NAMES + ('all',)}")
    if budget == 0:
        return [CheckResult(f"{name}.vacuous", True, 0, "vacuous pass at budget 0")]
    if budget < 0:
        raise ValueError("budget must be >= 0")
    return SUITES[name](seed, budget)
