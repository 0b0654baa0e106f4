import numpy as np
import pytest

from randersflag.algebra import abelian, direct_sum, su2
from randersflag.classify import (
    beta_form,
    berwald_report,
    closedness_defect,
    constant_curvature_probe,
    constant_curvature_tensor,
    covariant_drift,
    is_perfect,
    killing_defect,
    milnor_nonneg_check,
    parallel_space,
    pin_ys_convention,
    ys_negative_check,
    ys_positive_check,
    ys_zero_check,
)
from randersflag.curvature import curvature
from randersflag.errors import InputError, UsageError
from randersflag.metric import MetricStructure
from randersflag.problem import load
from randersflag.randers import RandersStructure

from conftest import random_spd, unit


def test_parallel_space(su2_alg, u2_alg, heis_alg, s2_split):
    assert parallel_space(su2_alg, MetricStructure.identity(3)).shape == (0, 3)
    assert parallel_space(heis_alg, MetricStructure.identity(3)).shape == (0, 3)
    assert parallel_space(abelian(3), MetricStructure.identity(3)).shape == (3, 3)
    assert parallel_space(su2_alg, MetricStructure.identity(3), s2_split).shape == (0, 3)

    space = parallel_space(u2_alg, MetricStructure.identity(4))
    assert space.shape == (1, 4)
    np.testing.assert_allclose(np.abs(space[0]), unit(4, 3), atol=1e-12)


def test_is_perfect(su2_alg, u2_alg, heis_alg):
    assert is_perfect(su2_alg)
    assert is_perfect(direct_sum(su2(), su2()))
    assert not is_perfect(u2_alg)
    assert not is_perfect(heis_alg)


def test_killing_and_closedness(u2_randers, heis_alg):
    metric = MetricStructure.identity(3)
    assert killing_defect(unit(3, 2), heis_alg, metric) == 0.0
    assert killing_defect(unit(3, 0), heis_alg, metric) == 1.0
    assert closedness_defect(u2_randers) == 0.0

    closed_fails = RandersStructure(heis_alg, metric, 0.5 * unit(3, 2))
    assert closedness_defect(closed_fails) == pytest.approx(0.5)


def test_covariant_drift_and_beta(su2_alg):
    randers = RandersStructure(su2_alg, MetricStructure.identity(3), 0.5 * unit(3, 2))
    bcov = covariant_drift(randers)
    assert bcov[1, 0] == pytest.approx(-0.25, abs=1e-15)
    np.testing.assert_allclose(bcov, -bcov.T, atol=1e-15)
    np.testing.assert_allclose(beta_form(randers), np.zeros(3), atol=1e-15)


def test_berwald_report(u2_randers, heis_alg):
    report = berwald_report(u2_randers)
    assert report.is_berwald
    assert not report.is_riemannian
    assert report.implications_hold
    assert report.skew_defect <= 1e-10
    assert report.derived_orthogonality_defect <= 1e-10
    assert report.as_dict()['drift_norm'] == 0.5

    heis = berwald_report(RandersStructure(heis_alg, MetricStructure.identity(3), 0.3 * unit(3, 2)))
    assert not heis.is_berwald
    assert heis.implications_hold


def test_ys_convention_pins_su2():
    convention = pin_ys_convention()
    components = curvature(su2(), MetricStructure.identity(3)).components
    np.testing.assert_allclose(convention.apply(components), constant_curvature_tensor(0.25, np.eye(3)), atol=1e-12)


def test_ys_positive_on_u2(u2_randers):
    report = ys_positive_check(u2_randers, 0.25)
    assert not report.verdict
    assert report.first_failure == 'non-parallel Killing'
    assert report.bullets['beta = 0']
    assert 'curvature identity' in report.failing_bullets
    assert report.as_dict()['first_failure'] == 'non-parallel Killing'


def test_ys_positive_preconditions(su2_randers, u2_randers):
    with pytest.raises(UsageError):
        ys_positive_check(su2_randers, 0.25)
    with pytest.raises(UsageError):
        ys_positive_check(u2_randers, 0.0)


def test_ys_negative_on_abelian(abelian_randers, u2_randers):
    report = ys_negative_check(abelian_randers, -1.0)
    assert report.sigma_equation_defect == pytest.approx(16.0)
    assert report.bullets['closed']
    assert report.bullets['beta = 0']
    assert not report.bullets['sigma equation']
    assert not report.bullets['constant curvature 4K']
    assert report.first_failure == 'sigma equation'

    with pytest.raises(UsageError):
        ys_negative_check(u2_randers, 0.5)


def test_ys_zero(abelian_randers, su2_randers):
    assert ys_zero_check(abelian_randers).verdict
    assert ys_zero_check(RandersStructure(abelian(3), MetricStructure.identity(3), [0.0, -0.6, 0.7])).verdict

    report = ys_zero_check(su2_randers)
    assert not report.verdict
    assert report.failing_bullets == ['flat']


def test_milnor_on_u2(u2_alg):
    report = milnor_nonneg_check(unit(4, 2), u2_alg, MetricStructure.identity(4), samples=64, seed=0)
    assert report.passed
    assert report.negative_probes == 0
    assert report.equality_mismatches == 0
    assert report.zero_probes >= 1
    assert report.min_curvature == pytest.approx(0.0, abs=1e-12)


def test_milnor_central_vector(u2_alg):
    report = milnor_nonneg_check(unit(4, 3), u2_alg, MetricStructure.identity(4), samples=16, seed=1)
    assert report.passed
    assert report.zero_probes == report.probes


def test_milnor_needs_skew_ad(su2_alg, u2_alg):
    berger = MetricStructure.from_phi(np.eye(3), np.diag([2.0, 2.0, 1.0]))
    with pytest.raises(UsageError):
        milnor_nonneg_check(unit(3, 0), su2_alg, berger)
    with pytest.raises(UsageError):
        milnor_nonneg_check(np.zeros(4), u2_alg, MetricStructure.identity(4))


def test_constant_curvature_probe(su2_randers, u2_randers):
    constant = constant_curvature_probe(su2_randers, samples=32, seed=0)
    assert constant.is_constant
    assert constant.k_estimate == pytest.approx(0.25, abs=1e-12)

    varying = constant_curvature_probe(u2_randers, samples=32, seed=0)
    assert not varying.is_constant
    assert varying.spread > 0.01


def test_constant_curvature_probe_on_fixtures():
    su2_probe = constant_curvature_probe(load("su2").randers)
    assert su2_probe.is_constant
    assert su2_probe.samples == 256
    assert su2_probe.k_estimate == pytest.approx(0.25, abs=1e-12)

    sphere = constant_curvature_probe(load("s2_homogeneous").randers, samples=64)
    assert sphere.is_constant
    assert sphere.k_estimate == pytest.approx(1.0, abs=1e-12)


def test_milnor_refuses_homogeneous_spaces():
    problem = load("s2_homogeneous")
    with pytest.raises(InputError, match="nontrivial isotropy"):
        milnor_nonneg_check(unit(3, 0), problem.algebra, problem.metric, split=problem.split)


def test_semisimple_sum_has_no_parallel_drift():
    alg = direct_sum(su2(), su2())
    assert parallel_space(alg, MetricStructure.identity(6)).shape == (0, 6)

    rng = np.random.default_rng(21)
    for _ in range(3):
        metric = MetricStructure.from_inner(np.eye(6), random_spd(rng, 6, condition=10.0))
        assert parallel_space(alg, metric).shape == (0, 6)


def test_killing_and_closed_drift_is_parallel_on_random_u2_metrics(u2_alg):
    rng = np.random.default_rng(8)
    for _ in range(5):
        inner = np.zeros((4, 4))
        inner[:3, :3] = random_spd(rng, 3, condition=10.0)
        inner[3, 3] = rng.uniform(0.5, 2.0)
        metric = MetricStructure.from_inner(np.eye(4), inner)

        x = 0.3 * unit(4, 3) / np.sqrt(inner[3, 3])
        randers = RandersStructure(u2_alg, metric, x)
        assert killing_defect(x, u2_alg, metric) <= 1e-10
        assert closedness_defect(randers) <= 1e-10
        assert randers.parallel_defect <= 1e-9

        report = berwald_report(randers)
        assert report.is_berwald
        assert report.implications_hold

        space = parallel_space(u2_alg, metric)
        assert space.shape[0] >= 1
        along = sum((v @ inner @ x) * v for v in space)
        np.testing.assert_allclose(along, x, atol=1e-9)
        for v in space:
            assert killing_defect(v, u2_alg, metric) <= 1e-9
            assert closedness_defect(RandersStructure(u2_alg, metric, 0.5 * v)) <= 1e-9
