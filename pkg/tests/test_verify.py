import json

import pytest

from phasequant.verify import SUITES, Check, VerdictReport, VerifyConfig, random_state, random_symbol, run_suite, _rng


def test_unknown_suite():
    with pytest.raises(ValueError, match="unknown suite"):
        run_suite("nosuch")


def test_scheme_table_rows_are_exact():
    report = run_suite("scheme-table")
    assert report.passed
    rows = [c for c in report.checks if c.identity.endswith("x^2")]
    assert {c.identity.split(":")[1] for c in rows} == {"weyl", "wick", "antiwick"}
    assert all(c.max_deviation == 0.0 and c.tolerance == 0.0 for c in rows)


def test_central_identity_counts():
    report = run_suite("central-identity", seed=0)
    (check,) = report.checks
    assert check.passed and len(check.deviations) == 100
    assert check.detail == "100/100 instances within tolerance"


def test_groenewold_suite_flags_cubic():
    report = run_suite("groenewold")
    cubic = next(c for c in report.checks if c.identity == "groenewold:cubic")
    assert cubic.passed and "hbar^2" in cubic.detail


@pytest.mark.parametrize("suite", SUITES)
def test_every_suite_passes(suite):
    assert run_suite(suite, seed=3).passed


def test_overall_flag_follows_checks():
    good = Check("a", "anchor", 0.0, 1.0, True)
    bad = Check("b", "anchor", 2.0, 1.0, False)
    assert VerdictReport("x", 0, [good]).passed
    assert not VerdictReport("x", 0, [good, bad]).passed


def test_report_serialization_is_deterministic():
    a = run_suite("variances", seed=11).to_json()
    b = run_suite("variances", seed=11).to_json()
    assert a == b
    data = json.loads(a)
    assert set(data["checks"][0]) >= {"identity", "anchor", "max_deviation", "tolerance", "passed"}
    assert "wall_time" not in data["checks"][0]
    timed = json.loads(run_suite("variances", seed=11).to_json(include_timing=True))
    assert timed["checks"][0]["wall_time"] >= 0


def test_seeds_change_instances():
    assert run_suite("central-identity", seed=1).to_json() != run_suite("central-identity", seed=2).to_json()


def test_random_instances_respect_bounds():
    rng = _rng(0, "test")
    for _ in range(50):
        f = random_symbol(rng, 6)
        assert f.mode_degree() <= 6
        for c in f.terms.values():
            for re, im in c.terms.values():
                assert abs(re.numerator) <= 81 and re.denominator <= 81
        psi = random_state(rng, rng.randint(1, 8))
        assert psi.cutoffs[0] <= 8 and abs(psi.norm - 1) < 1e-12


def test_config_validation():
    with pytest.raises(ValueError):
        VerifyConfig(hbar=0)
    with pytest.raises(ValueError):
        VerifyConfig(central_instances=0)
