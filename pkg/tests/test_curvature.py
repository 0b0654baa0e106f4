import numpy as np
import pytest

from randersflag.algebra import ReductiveSplit, su2
from randersflag.curvature import (
    b_minus,
    b_plus,
    biinvariant_curvature,
    compatibility_defect,
    curvature,
    curvature_oracle,
    drift_covariant_matrix,
    koszul_connection,
    levi_civita,
    nomizu_connection,
    parallel_defect,
    pin_slot_mapping,
    puttmann_printed,
    sectional,
    torsion_defect,
)
from randersflag.errors import DegeneracyError, UsageError
from randersflag.metric import MetricStructure

from conftest import random_spd, unit

E1, E2, E3 = np.eye(3)


def berger(scale):
    return MetricStructure.from_phi(np.eye(3), np.diag([scale, scale, 1.0]))


def test_biinvariant_su2_is_quarter():
    tensor = curvature(su2(), MetricStructure.identity(3))
    for y, u in ((E1, E2), (E2, E3), (E1, E3)):
        assert tensor.sectional(y, u) == pytest.approx(0.25, abs=1e-14)


def test_sectional_ignores_basis_of_the_plane():
    tensor = curvature(su2(), MetricStructure.identity(3))
    assert sectional(E1 + E2, 2.0 * E2 - E1, tensor) == pytest.approx(0.25, abs=1e-14)


def test_heisenberg_connection_and_curvature(heis_alg):
    metric = MetricStructure.identity(3)
    conn = koszul_connection(heis_alg, metric)
    assert conn.covariant(E1, E3)[1] == pytest.approx(-0.5, abs=1e-15)

    tensor = curvature_oracle(conn, heis_alg)
    assert tensor.sectional(E1, E2) == pytest.approx(-0.75, abs=1e-14)
    assert tensor.sectional(E1, E3) == pytest.approx(0.25, abs=1e-14)
    assert tensor.sectional(E2, E3) == pytest.approx(0.25, abs=1e-14)


def test_berger_sphere(su2_alg):
    tensor = curvature(su2_alg, berger(2.0))
    assert tensor.sectional(E1, E2) == pytest.approx(5.0 / 16.0, abs=1e-13)
    assert tensor.sectional(E1, E3) == pytest.approx(1.0 / 16.0, abs=1e-13)


def test_abelian_is_flat():
    from randersflag.algebra import abelian

    tensor = curvature(abelian(4), MetricStructure.identity(4))
    assert tensor.max_abs() == 0.0


def test_sectional_rejects_parallel_vectors():
    tensor = curvature(su2(), MetricStructure.identity(3))
    with pytest.raises(DegeneracyError):
        tensor.sectional(E1, 3.0 * E1)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_koszul_on_random_metrics(su2_alg, seed):
    rng = np.random.default_rng(seed)
    metric = MetricStructure.from_inner(np.eye(3), random_spd(rng, 3, condition=10.0))
    conn = koszul_connection(su2_alg, metric)
    assert torsion_defect(conn, su2_alg) < 1e-12
    assert compatibility_defect(conn) < 1e-12

    defects = curvature_oracle(conn, su2_alg).symmetry_defects()
    assert set(defects) == {'antisymmetry_ij', 'antisymmetry_kl', 'pair_symmetry', 'first_bianchi'}
    assert max(defects.values()) < 1e-10


def test_trivial_split_uses_koszul(su2_alg):
    conn = levi_civita(su2_alg, berger(0.5), ReductiveSplit.trivial(3))
    assert conn.source == "koszul"


def test_round_two_sphere(su2_alg, s2_split):
    metric = MetricStructure.identity(3)
    conn = nomizu_connection(su2_alg, metric, s2_split)
    assert conn.source == "nomizu"
    assert torsion_defect(conn, su2_alg) < 1e-12
    assert compatibility_defect(conn) < 1e-12

    tensor = curvature(su2_alg, metric, s2_split)
    assert tensor.sectional(E1, E2) == pytest.approx(1.0, abs=1e-13)


def test_biinvariant_shortcut_matches_oracle(su2_alg):
    metric = MetricStructure.identity(3)
    tensor = curvature(su2_alg, metric)
    rng = np.random.default_rng(5)
    x, y, z = rng.standard_normal((3, 3))
    np.testing.assert_allclose(biinvariant_curvature(x, y, z, su2_alg, metric), tensor.apply(x, y, z), atol=1e-13)


def test_biinvariant_shortcut_needs_biinvariance(heis_alg, su2_alg):
    with pytest.raises(UsageError):
        biinvariant_curvature(E1, E2, E3, heis_alg, MetricStructure.identity(3))
    with pytest.raises(UsageError):
        biinvariant_curvature(E1, E2, E3, su2_alg, berger(2.0))


def test_b_operators_for_identity_phi(su2_alg):
    metric = MetricStructure.identity(3)
    rng = np.random.default_rng(7)
    x, y = rng.standard_normal((2, 3))
    np.testing.assert_array_equal(b_plus(x, y, su2_alg, metric), np.zeros(3))
    np.testing.assert_allclose(b_minus(x, y, su2_alg, metric), su2_alg.bracket(x, y), atol=1e-15)


def test_slot_mapping_sign():
    mapping = pin_slot_mapping()
    assert mapping.sign == -1.0
    assert "-<R(x,y)z,w>" in mapping.description


def test_puttmann_on_su2(su2_alg):
    metric = MetricStructure.identity(3)
    assert puttmann_printed(E1, E2, E1, E2, su2_alg, metric) == pytest.approx(0.25, abs=1e-15)


@pytest.mark.parametrize("scale", [0.5, 1.0, 2.0])
def test_puttmann_matches_oracle_after_mapping(su2_alg, scale):
    metric = berger(scale)
    tensor = curvature(su2_alg, metric)
    sign = pin_slot_mapping().sign
    rng = np.random.default_rng(13)
    for x, y, z, w in rng.standard_normal((5, 4, 3)):
        printed = puttmann_printed(x, y, z, w, su2_alg, metric)
        assert printed == pytest.approx(sign * tensor.component(x, y, z, w), abs=1e-12)


def test_drift_covariant_matrix(su2_alg, u2_alg):
    conn = koszul_connection(su2_alg, MetricStructure.identity(3))
    matrix = drift_covariant_matrix(E3, conn)
    assert matrix[0, 1] == pytest.approx(-0.5, abs=1e-15)
    assert parallel_defect(E3, conn) == pytest.approx(0.5, abs=1e-15)

    u2_conn = koszul_connection(u2_alg, MetricStructure.identity(4))
    assert parallel_defect(unit(4, 3), u2_conn) == 0.0
