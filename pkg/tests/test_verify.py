import pytest

from ahconserved import verify


@pytest.fixture(scope="module")
def full_report():
    return verify.run(verify.Context())


def test_default_suite_passes(full_report):
    failed = [(r.group, r.name, r.observed) for r in full_report if not r.passed]
    assert failed == []


def test_every_group_reports(full_report):
    assert [g for g in verify.REGISTRY if any(r.group == g for r in full_report)] == list(verify.REGISTRY)


def test_report_records_trace_variant(full_report):
    (adj,) = [r for r in full_report if r.name.startswith("oracle selects")]
    assert "g_m2" in adj.name and adj.passed


def test_only_filter_runs_one_group():
    results = verify.run(verify.Context(), ["boost-identity"])
    assert {r.group for r in results} == {"boost-identity"}


def test_fault_injection_trips_loss_sign():
    results = verify.run(verify.Context(fault="flip-loss-sign"), ["loss-sign"])
    assert not all(r.passed for r in results)


def test_unknown_group():
    with pytest.raises(KeyError):
        verify.run(verify.Context(), ["no-such-group"])


@pytest.mark.parametrize("seed", [1, 7])
def test_other_seeds_pass(seed):
    results = verify.run(verify.Context(seed=seed, band_limit=24))
    assert all(r.passed for r in results), [r.name for r in results if not r.passed]


def test_records_are_plain():
    r = verify.run(verify.Context(), ["scaling"])[0].to_record()
    assert set(r) == {"group", "name", "tolerance", "observed", "passed"}
