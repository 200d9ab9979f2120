"""Trace analysis tests: the follows-property on hand-built and solver
traces, accumulation points, recurring-run estimates on the classic
no-classical-limit sequence, and fixed-point certification."""

import json

import numpy as np
import pytest

from evfam.analysis import (
    DEFAULT_LADDER,
    accumulation_points,
    certification_json,
    certify_fixed_points,
    cogap_limit_estimate,
    follows_check,
    follows_report_json,
    limit_estimate_json,
)
from evfam.cfp import (
    Averaged,
    ConstantRelaxation,
    CyclicControl,
    Halfspace,
    StopRule,
    Trace,
    acsa_run,
    random_almost_cyclic_pattern,
    random_feasible_instance,
    AlmostCyclicControl,
)
from evfam.intseq import INF


def two_halfspace_ops():
    return [Halfspace([-1.0, 0.0], 0.0), Halfspace([0.0, -1.0], 0.0)]


def two_halfspace_trace():
    ops = two_halfspace_ops()
    return ops, acsa_run(
        ops, CyclicControl(2), ConstantRelaxation(1.0), [-1.0, -1.0], StopRule(stride=1)
    )


def constant_trace(point, n_steps, lam=1.0, controls=None):
    """Hand-built stalled trace; the solver never emits one of these because
    a zero residual stops it at the first checkpoint."""
    x = np.asarray(point, dtype=float)
    if controls is None:
        controls = [1] * n_steps
    return Trace(
        iterates=[x.copy() for _ in range(n_steps + 1)],
        controls=list(controls),
        relaxations=[lam] * n_steps,
        residuals=[0.0] * n_steps,
        checkpoints=[(0, 0.0)],
        converged=False,
        stop_reason="max_iter",
    )


def bounce_sequence(pairs):
    """-1, 1, -1, 2, -1, 3, ... : every neighborhood of -1 recurs with runs
    of length one and nothing else recurs at all."""
    xs = []
    for k in range(1, pairs + 1):
        xs.extend([-1.0, float(k)])
    return xs


# ---------------------------------------------------------------------------
# follows_check


def test_follows_two_halfspace_demo():
    ops, trace = two_halfspace_trace()
    rep1 = follows_check(trace, ops[0], label=1)
    rep2 = follows_check(trace, ops[1], label=2)
    assert rep1.witnesses == ((0, 1),)
    assert rep2.witnesses == ((1, 2),)
    # two steps, one witness each: both boundary windows have length 2
    assert rep1.min_c == 2 and rep2.min_c == 2
    assert rep1.ok and rep2.ok


def test_follows_window_parameter_sets_ok():
    ops, trace = two_halfspace_trace()
    assert follows_check(trace, ops[0], c=2).ok
    assert not follows_check(trace, ops[0], c=1).ok
    assert follows_check(trace, ops[0], c=1).min_c == 2


def test_follows_single_operator_every_step():
    op = Averaged(Halfspace([-1.0, 0.0], 0.0))
    trace = acsa_run([op], CyclicControl(1), ConstantRelaxation(1.0), [-8.0, 0.0],
                     StopRule(tol=1e-4, stride=1))
    assert trace.n_steps > 5
    rep = follows_check(trace, op)
    assert rep.min_c == 1
    assert len(rep.witnesses) == trace.n_steps


def test_follows_strict_rejects_relaxed_steps():
    op = Halfspace([-1.0, 0.0], 0.0)
    trace = acsa_run([op], CyclicControl(1), ConstantRelaxation(0.5), [-8.0, 0.0],
                     StopRule(tol=1e-3, stride=1))
    relaxed = follows_check(trace, op, relaxed=True)
    strict = follows_check(trace, op, relaxed=False)
    assert relaxed.min_c == 1 and relaxed.criterion == "relaxed"
    assert strict.min_c is None and not strict.ok
    assert strict.criterion == "strict"


def test_follows_ignores_zero_steps():
    # lambda = 0 makes the update equation vacuous for every operator
    trace = constant_trace([3.0, 3.0], 8, lam=0.0)
    rep = follows_check(trace, Halfspace([-1.0, 0.0], 0.0))
    assert rep.min_c is None and not rep.ok


def test_follows_fixed_point_stall():
    ops = two_halfspace_ops()
    trace = constant_trace([0.0, 0.0], 10, controls=[1, 2] * 5)
    for op in ops:
        rep = follows_check(trace, op)
        assert rep.min_c == 1
        assert len(rep.witnesses) == 10


def test_follows_needs_a_step():
    op = Halfspace([-1.0, 0.0], 0.0)
    trace = acsa_run([op], CyclicControl(1), ConstantRelaxation(1.0), [1.0, 1.0])
    assert trace.n_steps == 0
    rep = follows_check(trace, op)
    assert rep.min_c is None
    assert not rep


# ---------------------------------------------------------------------------
# accumulation points


def test_accumulation_alternating_two_points():
    xs = [0.0, 1.0] * 20
    got = sorted(float(p[0]) for p in accumulation_points(xs, eps=0.1, n0=0))
    assert got == [0.0, 1.0]


def test_accumulation_converged_trace_is_final():
    ops, trace = two_halfspace_trace()
    pts = accumulation_points(trace)
    assert len(pts) == 1
    assert np.array_equal(pts[0], np.array([0.0, 0.0]))


def test_accumulation_settled_tail():
    xs = [0.0, 0.0, 0.0, 5.0, 0.0, 0.0, 0.0, 0.0]
    got = accumulation_points(xs, eps=0.1, n0=0)
    assert [float(p[0]) for p in got] == [0.0]


def test_accumulation_transient_never_qualifies():
    # two visits only, and the tail leaves: not an accumulation point
    xs = [7.0, 0.0, 7.0] + [float(k) for k in range(100, 130)]
    got = accumulation_points(xs, eps=0.1, n0=0)
    assert all(abs(float(p[0]) - 7.0) > 1 for p in got)


def test_accumulation_tail_start_validation():
    with pytest.raises(ValueError):
        accumulation_points([1.0, 2.0], n0=2)
    with pytest.raises(ValueError):
        accumulation_points([1.0, 2.0], n0=-1)
    with pytest.raises(ValueError):
        accumulation_points([])


# ---------------------------------------------------------------------------
# recurring-run estimates


def test_estimate_bounce_sequence():
    est = cogap_limit_estimate(bounce_sequence(100))
    assert not est.convergent
    assert est.classical_limit is None
    assert len(est.candidates) == 1
    cand = est.candidates[0]
    assert float(cand.point[0]) == -1.0
    assert cand.estimate == 1
    for row in cand.per_eps:
        assert row["run"] == 1
        assert row["estimate"] == 1
    assert not cand.certified_limit


def test_estimate_convergent_trace():
    ops, trace = two_halfspace_trace()
    est = cogap_limit_estimate(trace)
    assert est.convergent
    assert np.array_equal(est.classical_limit, np.array([0.0, 0.0]))
    cand = est.candidates[0]
    assert cand.estimate == INF
    assert cand.certified_limit
    assert all(row["estimate"] == INF for row in cand.per_eps)


def test_estimate_constant_sequence():
    est = cogap_limit_estimate([2.0] * 30)
    assert est.convergent
    assert est.candidates[0].estimate == INF
    assert float(est.classical_limit[0]) == 2.0


def test_estimate_monotone_down_the_ladder():
    # a run that splits as eps shrinks can raise the raw statistic; the
    # reported estimate must still be non-increasing
    rng = np.random.default_rng(7)
    xs = list(rng.uniform(-1, 1, size=400))
    est = cogap_limit_estimate(xs)
    for cand in est.candidates:
        values = [row["estimate"] for row in cand.per_eps]
        assert all(a >= b for a, b in zip(values, values[1:]))
        assert cand.estimate == values[-1]


def test_estimate_ladder_validation():
    with pytest.raises(ValueError):
        cogap_limit_estimate([1.0, 2.0], ladder=())
    with pytest.raises(ValueError):
        cogap_limit_estimate([1.0, 2.0], ladder=(1e-2, 1e-1))
    with pytest.raises(ValueError):
        cogap_limit_estimate([1.0, 2.0], ladder=(1e-2, 1e-2))


# ---------------------------------------------------------------------------
# certification


def test_certify_two_halfspace_demo():
    ops, trace = two_halfspace_trace()
    cert = certify_fixed_points(trace, ops)
    assert cert.status == "certified"
    assert bool(cert)
    assert len(cert.entries) == 2
    for entry in cert.entries:
        assert entry["residual"] == 0.0
        assert entry["ok"]
    assert {e["operator"] for e in cert.entries} == {1, 2}
    assert np.array_equal(cert.candidates[0], np.array([0.0, 0.0]))


def test_certify_fixed_point_stall():
    ops = two_halfspace_ops()
    trace = constant_trace([0.0, 0.0], 10, controls=[1, 2] * 5)
    cert = certify_fixed_points(trace, ops)
    assert cert.status == "certified"
    assert len(cert.entries) == 2


def test_certify_truncated_run_is_inconclusive():
    op = Averaged(Halfspace([-1.0, 0.0], 0.0))
    full = acsa_run([op], CyclicControl(1), ConstantRelaxation(1.0), [-512.0, 0.0],
                    StopRule(tol=1e-8, stride=1))
    cut = Trace(
        iterates=full.iterates[:11],
        controls=full.controls[:10],
        relaxations=full.relaxations[:10],
        residuals=full.residuals[:10],
        checkpoints=[c for c in full.checkpoints if c[0] <= 10],
        converged=False,
        stop_reason="max_iter",
    )
    cert = certify_fixed_points(cut, [op])
    assert cert.status == "inconclusive"
    assert cert.entries == ()
    assert not cert


def test_certify_no_followed_operator_is_inconclusive():
    # the stall provides candidates but no witnesses for a foreign operator
    trace = constant_trace([5.0, 5.0], 10, lam=0.0)
    cert = certify_fixed_points(trace, two_halfspace_ops())
    assert cert.status == "inconclusive"


def test_certify_flags_inconsistent_trace():
    # one genuine projection step grafted onto a stalled tail: the trace
    # claims to follow the operator yet settles off its fixed-point set
    op = Halfspace([-1.0, 0.0], 0.0)
    bad = np.array([-2.0, 0.0])
    iterates = [bad.copy(), np.array([0.0, 0.0])] + [bad.copy() for _ in range(14)]
    trace = Trace(
        iterates=iterates,
        controls=[1] * 15,
        relaxations=[1.0] * 15,
        residuals=[0.0] * 15,
        checkpoints=[(0, 2.0)],
        converged=False,
        stop_reason="max_iter",
    )
    cert = certify_fixed_points(trace, [op])
    assert cert.status == "violation"
    assert any(not e["ok"] for e in cert.entries)


def test_certify_respects_coverage_eligibility():
    # alternating projections between x1 <= 0 and x1 >= 5, certified against
    # the first operator only: every other step is a genuine witness
    # (min_c = 2), but both candidates recur in runs of one, shorter than
    # the witness window, so neither pairing is covered and no claim is
    # made about the off-set candidate (5, 0)
    checked = Halfspace([1.0, 0.0], 0.0)
    other = Halfspace([-1.0, 0.0], -5.0)
    x = np.array([5.0, 0.0])
    iterates = [x.copy()]
    for i in range(40):
        x = (checked if i % 2 == 0 else other).apply(x)
        iterates.append(x.copy())
    trace = Trace(
        iterates=iterates,
        controls=[1, 2] * 20,
        relaxations=[1.0] * 40,
        residuals=[5.0] * 40,
        checkpoints=[(0, 5.0)],
        converged=False,
        stop_reason="max_iter",
    )
    rep = follows_check(trace, checked)
    assert rep.min_c == 2
    cert = certify_fixed_points(trace, [checked])
    assert cert.status == "inconclusive"
    assert len(cert.candidates) == 2


def test_certify_on_random_feasible_runs():
    rng = np.random.default_rng(11)
    for _ in range(5):
        ops, _ = random_feasible_instance(3, 6, rng)
        pattern = random_almost_cyclic_pattern(6, rng)
        trace = acsa_run(ops, AlmostCyclicControl(pattern), ConstantRelaxation(1.0),
                         rng.uniform(-5, 5, size=3), StopRule(tol=1e-8, max_iter=5000))
        assert trace.converged
        cert = certify_fixed_points(trace, ops, tol=1e-5)
        assert cert.status == "certified"


# ---------------------------------------------------------------------------
# JSON


def test_report_json_round():
    ops, trace = two_halfspace_trace()
    rep = follows_check(trace, ops[0], label=1)
    blob = json.dumps(follows_report_json(rep))
    data = json.loads(blob)
    assert data["operator"] == 1
    assert data["min_c"] == 2
    assert data["witnesses"] == [[0, 1]]


def test_estimate_json_inf_marker():
    ops, trace = two_halfspace_trace()
    data = json.loads(json.dumps(limit_estimate_json(cogap_limit_estimate(trace))))
    assert data["convergent"] is True
    assert data["candidates"][0]["estimate"] == "inf"
    assert data["classical_limit"] == [0.0, 0.0]

    bounce = json.loads(json.dumps(limit_estimate_json(cogap_limit_estimate(bounce_sequence(50)))))
    assert bounce["classical_limit"] is None
    assert bounce["candidates"][0]["estimate"] == 1


def test_certification_json():
    ops, trace = two_halfspace_trace()
    data = json.loads(json.dumps(certification_json(certify_fixed_points(trace, ops))))
    assert data["status"] == "certified"
    assert data["entries"][0]["ok"] is True
    assert data["candidates"] == [[0.0, 0.0]]
    assert len(data["follows"]) == 2


def test_default_ladder_shape():
    assert DEFAULT_LADDER[0] == 0.1
    assert all(a > b for a, b in zip(DEFAULT_LADDER, DEFAULT_LADDER[1:]))
