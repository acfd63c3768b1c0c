import json
from fractions import Fraction

import pytest

from conftest import triangle
from skalc.errors import ValidationError
from skalc.serialize import load_source
from skalc.verify import (
    RandomEnsembleSpec,
    SweepReport,
    achievability_sweep,
    adversary_sweep,
    bounds_sweep,
    duality_sweep,
    eager_lp,
    ensemble,
    equivalence_sweep,
    helper_set_sweep,
    excess_form_sweep,
    partition_duality_check,
    random_source,
    run_sweep,
    shearer_sweep,
    zero_rate_sweep,
)

SMALL = RandomEnsembleSpec(seed=42, count=12, n_range=(2, 4), e_range=(1, 6))


def test_ensemble_is_deterministic():
    a = [src for _, src in ensemble(SMALL)]
    b = [src for _, src in ensemble(SMALL)]
    assert a == b
    assert random_source(SMALL, 3) == a[3]
    other = RandomEnsembleSpec(seed=43, count=12, n_range=(2, 4), e_range=(1, 6))
    assert [s for _, s in ensemble(other)] != a


def test_ensemble_respects_spec():
    for _, src in ensemble(RandomEnsembleSpec(seed=1, count=30, max_degree=2)):
        assert 2 <= src.n <= 6 and len(src.edges) <= 10
        assert all(bin(e.incidence).count("1") <= 2 for e in src.edges)
    for _, src in ensemble(RandomEnsembleSpec(seed=1, count=10, independent=True)):
        assert all(bin(e.incidence).count("1") == 1 for e in src.edges)
    for _, src in ensemble(RandomEnsembleSpec(seed=1, count=10, adversaries=True)):
        assert src.untrusted and src.active & src.untrusted == 0


def test_spec_validation():
    with pytest.raises(ValidationError):
        RandomEnsembleSpec(n_range=(1, 3))
    with pytest.raises(ValidationError):
        RandomEnsembleSpec(active="some")
    with pytest.raises(ValidationError):
        RandomEnsembleSpec(n_range=(2, 2), adversaries=True)


def test_eager_lp_triangle():
    tri = triangle()
    assert eager_lp(tri, "rco").value == Fraction(3, 2)
    assert eager_lp(tri, "cs_at_rate", R=1).value == 1
    assert eager_lp(tri, "rs_at_key_rate", r_K=1).value == 1
    assert eager_lp(tri, "rs_excess_form", r_K=1).value == 1
    with pytest.raises(ValidationError):
        eager_lp(tri, "nonsense")


def test_partition_duality_check(tri):
    assert partition_duality_check(tri)


@pytest.mark.parametrize("sweep", [
    duality_sweep, shearer_sweep, equivalence_sweep, achievability_sweep,
    zero_rate_sweep, bounds_sweep, helper_set_sweep, excess_form_sweep,
])
def test_sweeps_pass_on_small_ensemble(sweep):
    report = sweep(SMALL)
    assert report.ok, report.failures
    assert report.instances == SMALL.count
    assert report.checks > 0
    assert "PASS" in report.summary()


def test_adversary_sweep_small():
    spec = RandomEnsembleSpec(seed=5, count=10, n_range=(3, 5), adversaries=True)
    assert adversary_sweep(spec).ok


def test_failure_dump_round_trips(tmp_path):
    def always_bad(source, report):
        report.checks += 1
        return ["forced"]

    report = run_sweep("forced", SMALL, always_bad, tmp_path)
    assert not report.ok and len(report.failures) == SMALL.count
    first = report.failures[0]
    assert first.dump.name == "forced-seed42-0.json"
    assert load_source(first.dump) == random_source(SMALL, 0)
    json.loads(first.dump.read_text())
    assert "FAIL" in report.summary()


def test_solver_errors_are_recorded_not_raised():
    def boom(source, report):
        raise ValidationError("bad")

    report = run_sweep("boom", SMALL, boom)
    assert all("ValidationError" in f.message for f in report.failures)
    assert isinstance(report, SweepReport)
