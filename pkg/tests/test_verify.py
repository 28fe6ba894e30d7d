"""The self-check suites must all pass and report useful diagnostics."""

import pytest

from qparity.verify import SUITES, Check, run_suite


@pytest.mark.parametrize("name", sorted(SUITES))
def test_each_suite_passes(name):
    checks = run_suite(name)
    assert checks, f"suite {name} produced no checks"
    for check in checks:
        assert check.passed, f"{check.name}: {check.detail()}"


def test_all_aggregates_every_suite():
    combined = run_suite("all")
    assert len(combined) == sum(len(run_suite(name)) for name in SUITES)


def test_unknown_suite_raises():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("bogus")


def test_failed_check_details():
    check = Check(name="demo", passed=False, failures=["first", "second"])
    assert "first" in check.detail()
