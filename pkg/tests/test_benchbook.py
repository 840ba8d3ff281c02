import json

import pytest

from pmpressure import benchbook


def test_unknown_scenario_rejected():
    with pytest.raises(ValueError, match="unknown scenario"):
        benchbook.run_scenario("nope")


def test_registry_names():
    assert {
        "entropy",
        "geometric",
        "hook",
        "non-temperature-pt",
        "ground-state-violation",
        "key-lemma",
        "cross-engine",
        "decay",
        "neutral-orbit",
    } <= set(benchbook.SCENARIOS)


@pytest.mark.parametrize("name", ["entropy", "decay", "neutral-orbit"])
def test_cheap_scenarios_pass(name):
    rows = benchbook.run_scenario(name)
    assert rows
    assert all(r.passed for r in rows)


def test_report_shape_and_determinism():
    rows = benchbook.run_scenario("neutral-orbit")
    text = benchbook.report_json(rows)
    again = benchbook.report_json(benchbook.run_scenario("neutral-orbit"))
    assert text == again
    payload = json.loads(text)
    for row in payload:
        assert set(row) == {"scenario", "check", "expected", "got", "pass", "reference"}
        assert isinstance(row["pass"], bool)
        assert row["reference"]  # every check explains itself


def test_all_passed_flag():
    rows = benchbook.run_scenario("entropy")
    assert benchbook.all_passed(rows)
    flipped = [
        benchbook.CheckResult(
            scenario=r.scenario,
            check=r.check,
            expected=r.expected,
            got=r.got,
            passed=False,
            reference=r.reference,
        )
        for r in rows
    ]
    assert not benchbook.all_passed(flipped)
