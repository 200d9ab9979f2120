"""Check-runner tests: suite registry, vacuous budgets, determinism, and
witness reporting on failure."""

import pytest

from evfam.checks import CheckResult, SUITE_NAMES, _result, run_suite


def test_all_suites_pass_at_small_budget():
    results = run_suite("all", seed=5, budget=25)
    assert all(r.passed for r in results)
    names = {r.name.split(".")[0] for r in results}
    assert names == set(SUITE_NAMES)


def test_budget_zero_is_vacuous():
    results = run_suite("all", seed=0, budget=0)
    assert len(results) == len(SUITE_NAMES)
    assert all(r.passed and r.cases == 0 for r in results)


def test_same_seed_same_results():
    a = run_suite("intseq", seed=12, budget=50)
    b = run_suite("intseq", seed=12, budget=50)
    assert a == b


def test_unknown_suite_and_bad_budget():
    with pytest.raises(ValueError):
        run_suite("nope", seed=0, budget=1)
    with pytest.raises(ValueError):
        run_suite("intseq", seed=0, budget=-2)


def test_failure_reporting_keeps_shortest_witness():
    res = _result("demo", 10, ["a longer witness", "tiny", "medium one"])
    assert not res.passed
    assert "3 failed" in res.note
    assert "tiny" in res.note
    assert "FAIL" in res.line()


def test_result_line_format():
    ok = CheckResult("demo.check", True, 7)
    assert ok.line() == "ok   demo.check: 7 cases"
