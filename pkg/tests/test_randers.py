import numpy as np
import pytest

from randersflag.algebra import su2
from randersflag.errors import DegeneracyError, StrongConvexityError, ValidationError
from randersflag.metric import MetricStructure
from randersflag.randers import RandersStructure

from conftest import unit

E4 = unit(4, 3)


def test_strong_convexity(u2_alg):
    metric = MetricStructure.identity(4)
    with pytest.raises(StrongConvexityError):
        RandersStructure(u2_alg, metric, 1.2 * E4)
    with pytest.raises(StrongConvexityError):
        RandersStructure(u2_alg, metric, E4)
    assert RandersStructure(u2_alg, metric, 0.99 * E4).strong_convexity_margin() == pytest.approx(0.01)


def test_drift_must_lie_in_m(su2_alg, s2_split):
    with pytest.raises(ValidationError):
        RandersStructure(su2_alg, MetricStructure.identity(3), 0.1 * unit(3, 2), s2_split)


def test_drift_must_be_isotropy_invariant(su2_alg, s2_split):
    with pytest.raises(ValidationError):
        RandersStructure(su2_alg, MetricStructure.identity(3), 0.1 * unit(3, 0), s2_split)


def test_riemannian_and_berwald(su2_randers, u2_randers, heis_alg):
    assert su2_randers.is_riemannian
    assert su2_randers.is_berwald
    assert not u2_randers.is_riemannian
    assert u2_randers.is_berwald
    assert u2_randers.norm_bound == 0.5

    heis = RandersStructure(heis_alg, MetricStructure.identity(3), 0.3 * unit(3, 2))
    assert not heis.is_berwald
    assert heis.parallel_defect == pytest.approx(0.15, abs=1e-15)


def test_randers_norm(u2_randers):
    assert u2_randers.randers_norm(E4) == pytest.approx(1.5)
    assert u2_randers.randers_norm(-E4) == pytest.approx(0.5)
    assert u2_randers.randers_norm(unit(4, 0)) == pytest.approx(1.0)


def test_fundamental_tensor_along_drift(u2_randers):
    assert u2_randers.fundamental_tensor_closed(E4, E4, E4) == pytest.approx(2.25, abs=1e-15)
    assert u2_randers.fundamental_tensor_fd(E4, E4, E4) == pytest.approx(2.25, rel=1e-6)


def test_fundamental_tensor_is_f_squared_on_the_pole(u2_randers):
    rng = np.random.default_rng(4)
    for y in rng.standard_normal((5, 4)):
        assert u2_randers.fundamental_tensor_closed(y, y, y) == pytest.approx(u2_randers.randers_norm(y) ** 2, rel=1e-12)


def test_closed_form_matches_finite_differences(u2_randers):
    rng = np.random.default_rng(9)
    for y, u, v in rng.standard_normal((5, 3, 4)):
        closed = u2_randers.fundamental_tensor_closed(y, u, v)
        assert u2_randers.fundamental_tensor_fd(y, u, v) == pytest.approx(closed, abs=1e-5)


def test_finite_difference_tensor_is_scale_invariant_in_the_pole(u2_randers):
    rng = np.random.default_rng(13)
    for y, u, v in rng.standard_normal((4, 3, 4)):
        reference = u2_randers.fundamental_tensor_fd(y, u, v)
        for scale in (0.5, 2.0, 7.0):
            scaled = u2_randers.fundamental_tensor_fd(scale * y, u, v)
            assert scaled == pytest.approx(reference, abs=2e-5)
            assert scaled == pytest.approx(u2_randers.fundamental_tensor_closed(y, u, v), abs=1e-5)


def test_fundamental_matrix(u2_randers):
    rng = np.random.default_rng(2)
    y = rng.standard_normal(4)
    matrix = u2_randers.fundamental_matrix(y)
    np.testing.assert_allclose(matrix, matrix.T, atol=1e-14)
    assert np.all(np.linalg.eigvalsh(matrix) > 0)
    assert matrix[0, 2] == pytest.approx(u2_randers.fundamental_tensor_closed(y, unit(4, 0), unit(4, 2)), abs=1e-13)
    np.testing.assert_allclose(u2_randers.fundamental_matrix(3.0 * y), matrix, atol=1e-13)


def test_zero_pole_rejected(u2_randers):
    with pytest.raises(DegeneracyError):
        u2_randers.fundamental_tensor_closed(np.zeros(4), E4, E4)


def test_flag_determinants(u2_randers, su2_randers):
    determinants = u2_randers.flag_determinants(E4, unit(4, 0))
    assert determinants.direct == pytest.approx(3.375, abs=1e-14)
    assert determinants.expanded_gap == pytest.approx(0.0, abs=1e-14)
    assert determinants.printed == pytest.approx(1.125)
    assert determinants.printed_gap == pytest.approx(2.25)

    riemannian = su2_randers.flag_determinants(unit(3, 0), unit(3, 1))
    assert riemannian.direct == riemannian.printed == riemannian.expanded == 1.0


def test_berger_fiber_drift_is_not_parallel():
    metric = MetricStructure.from_phi(np.eye(3), np.diag([2.0, 2.0, 1.0]))
    randers = RandersStructure(su2(), metric, 0.3 * unit(3, 2))
    assert not randers.is_berwald
