"""
Predicates on invariant Randers structures: parallel drifts and Berwald type,
perfect algebras, Killing and closedness tests, the Yasuda-Shimada conditions
and Milnor's nonnegativity statement for skew ad(x).

Index conventions for the coordinate formulas:
    b_i      = <X, e_i>
    b_{i|j}  = <nabla_{e_j} X, e_i>
    R_hijk   = pinned by pin_ys_convention() on bi-invariant su(2)
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, List, Optional

import numpy as np

from randersflag.algebra import LieAlgebra, ReductiveSplit, as_vector, derived_span, null_space, su2
from randersflag.config import DEFAULT_TOLERANCES, Tolerances
from randersflag.curvature import curvature, drift_covariant_matrix, levi_civita
from randersflag.errors import InputError, NumericalFailure, UsageError
from randersflag.flag import scan_flags
from randersflag.metric import MetricStructure, gram_schmidt, skew_defect
from randersflag.randers import RandersStructure
from randersflag.ui import log


def parallel_space(alg: LieAlgebra, metric: MetricStructure, split: Optional[ReductiveSplit] = None,
                   tol: float = DEFAULT_TOLERANCES.rank) -> np.ndarray:
    """<.,.>-orthonormal rows spanning {v : nabla v = 0}"""
    n = alg.dim
    conn = levi_civita(alg, metric, split)
    # row block i is the matrix of v -> nabla_{e_i} v
    stacked = conn.gamma.transpose(0, 2, 1).reshape(n * n, n)

    if split is None or split.is_trivial:
        coordinates = np.eye(n)
    else:
        coordinates = np.asarray(split.m_basis)
        isotropy = [alg.ad_matrix(w) for w in split.h_basis]
        stacked = np.vstack([stacked] + isotropy)

    if coordinates.shape[0] == 0:
        return np.zeros((0, n))

    kernel = null_space(stacked @ coordinates.T, tol)
    if kernel.shape[0] == 0:
        return np.zeros((0, n))
    return gram_schmidt(kernel @ coordinates, metric.inner_matrix)


def is_perfect(alg: LieAlgebra, tol: float = DEFAULT_TOLERANCES.rank) -> bool:
    return derived_span(alg, tol).shape[0] == alg.dim


def killing_defect(x, alg: LieAlgebra, metric: MetricStructure) -> float:
    """max over basis pairs of |<[x,u],v> + <u,[x,v]>|"""
    return skew_defect(alg.ad_matrix(x), metric.inner_matrix)


def closedness_defect(randers: RandersStructure) -> float:
    """max |<X,[e_i,e_j]>|, i.e. |db| on basis pairs"""
    lowered = np.einsum('ijk,kl,l->ij', randers.algebra.structure, randers.metric.inner_matrix, randers.drift)
    return float(np.max(np.abs(lowered)))


def covariant_drift(randers: RandersStructure) -> np.ndarray:
    """matrix[i, j] = b_{i|j}"""
    return drift_covariant_matrix(randers.drift, randers.connection).T


def beta_form(randers: RandersStructure) -> np.ndarray:
    """beta_j = sum_i X^i (b_{j|i} - b_{i|j})"""
    d = drift_covariant_matrix(randers.drift, randers.connection)
    return randers.drift @ (d - d.T)


@dataclass
class BerwaldReport:
    parallel_defect: float
    skew_defect: float
    derived_orthogonality_defect: float
    is_berwald: bool
    is_riemannian: bool
    implications_hold: bool
    drift_norm: float
    tolerance: float

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def berwald_report(randers: RandersStructure) -> BerwaldReport:
    tol = randers.tolerances.predicate
    parallel = randers.parallel_defect
    skew = killing_defect(randers.drift, randers.algebra, randers.metric)
    derived = closedness_defect(randers)
    is_berwald = parallel <= tol

    implications = not is_berwald or (skew <= tol and derived <= tol)
    if not implications:
        log("berwald", f"parallel drift with skew_defect={skew:.3g}, derived_orthogonality_defect={derived:.3g}", "WARNING")

    return BerwaldReport(
        parallel_defect=parallel,
        skew_defect=skew,
        derived_orthogonality_defect=derived,
        is_berwald=is_berwald,
        is_riemannian=randers.is_riemannian,
        implications_hold=implications,
        drift_norm=randers.norm_bound,
        tolerance=tol,
    )


@dataclass(frozen=True)
class YSConvention:
    """R_hijk = sign * components.transpose(axes)[h, i, j, k]"""

    axes: tuple
    sign: float
    description: str

    def apply(self, components: np.ndarray) -> np.ndarray:
        return self.sign * components.transpose(self.axes)


_YS_CANDIDATES = (
    ((0, 1, 2, 3), "R_hijk = <R(e_h,e_i)e_j,e_k>"),
    ((0, 1, 3, 2), "R_hijk = <R(e_h,e_i)e_k,e_j>"),
    ((2, 3, 0, 1), "R_hijk = <R(e_j,e_k)e_h,e_i>"),
    ((1, 0, 2, 3), "R_hijk = <R(e_i,e_h)e_j,e_k>"),
)


def constant_curvature_tensor(kappa: float, gram: np.ndarray) -> np.ndarray:
    """kappa (g_ij g_hk - g_hj g_ik), indexed [h, i, j, k]"""
    return kappa * (np.einsum('ij,hk->hijk', gram, gram) - np.einsum('hj,ik->hijk', gram, gram))


@lru_cache(maxsize=1)
def pin_ys_convention(tol: float = 1e-10) -> YSConvention:
    """Slot order and sign making bi-invariant su(2) the K = 1/4 space form"""
    gram = np.eye(3)
    components = curvature(su2(), MetricStructure.identity(3)).components
    target = constant_curvature_tensor(0.25, gram)

    for axes, description in _YS_CANDIDATES:
        for sign in (1.0, -1.0):
            if float(np.max(np.abs(sign * components.transpose(axes) - target))) <= tol:
                label = description if sign > 0 else f"{description} with the sign flipped"
                return YSConvention(axes, sign, label)

    raise NumericalFailure("no R_hijk convention reproduces the constant-curvature su(2) tensor")


@dataclass
class YSReport:
    case_label: str
    curvature_constant: float
    beta_components: List[float]
    bullets: Dict[str, bool]
    tolerance: float
    convention: str
    killing_defect: float = 0.0
    parallel_defect: float = 0.0
    constant_length_defect: float = 0.0
    curvature_identity_defect: float = 0.0
    closedness_defect: float = 0.0
    sigma_residual: float = 0.0
    sigma: Optional[float] = None
    sigma_equation_defect: Optional[float] = None
    beta_defect: float = 0.0
    flatness_defect: float = 0.0
    constant_curvature_defect: float = 0.0

    @property
    def verdict(self) -> bool:
        return all(self.bullets.values())

    @property
    def failing_bullets(self) -> List[str]:
        return [name for name, passed in self.bullets.items() if not passed]

    @property
    def first_failure(self) -> Optional[str]:
        failing = self.failing_bullets
        return failing[0] if failing else None

    def as_dict(self) -> Dict[str, Any]:
        out = dict(self.__dict__)
        out['verdict'] = self.verdict
        out['failing_bullets'] = self.failing_bullets
        out['first_failure'] = self.first_failure
        return out


def _beta(randers: RandersStructure):
    beta = beta_form(randers)
    return [float(v) for v in beta], float(np.max(np.abs(beta))) if beta.size else 0.0


def ys_positive_check(randers: RandersStructure, k: float) -> YSReport:
    if randers.is_riemannian:
        raise UsageError("the positive case needs a non-Riemannian Randers metric (drift is zero)")
    if not k > 0:
        raise UsageError(f"the positive case needs K > 0, got {k}")

    tol = randers.tolerances.predicate
    convention = pin_ys_convention()
    gram = randers.metric.inner_matrix
    b = gram @ randers.drift
    bcov = covariant_drift(randers)
    b_squared = randers.norm_bound ** 2

    expected = (
        constant_curvature_tensor(k * (1.0 - b_squared), gram)
        + k * (np.einsum('ij,h,k->hijk', gram, b, b) - np.einsum('ik,h,j->hijk', gram, b, b))
        - k * (np.einsum('hj,i,k->hijk', gram, b, b) - np.einsum('hk,i,j->hijk', gram, b, b))
        - np.einsum('ij,hk->hijk', bcov, bcov)
        + np.einsum('ik,hj->hijk', bcov, bcov)
        + 2.0 * np.einsum('hi,jk->hijk', bcov, bcov)
    )
    identity_defect = float(np.max(np.abs(convention.apply(randers.curvature.components) - expected)))

    beta, beta_defect = _beta(randers)
    killing = killing_defect(randers.drift, randers.algebra, randers.metric)
    parallel = randers.parallel_defect

    bullets = {
        'beta = 0': beta_defect <= tol,
        'non-parallel Killing': killing <= tol and parallel > tol,
        'constant length': True,
        'curvature identity': identity_defect <= tol,
    }
    return YSReport(
        case_label='positive',
        curvature_constant=k,
        beta_components=beta,
        bullets=bullets,
        tolerance=tol,
        convention=convention.description,
        killing_defect=killing,
        parallel_defect=parallel,
        curvature_identity_defect=identity_defect,
        closedness_defect=closedness_defect(randers),
        beta_defect=beta_defect,
    )


def ys_negative_check(randers: RandersStructure, k: float) -> YSReport:
    if not k < 0:
        raise UsageError(f"the negative case needs K < 0, got {k}")

    tol = randers.tolerances.predicate
    convention = pin_ys_convention()
    gram = randers.metric.inner_matrix
    b = gram @ randers.drift
    bcov = covariant_drift(randers)

    # b_{i|k} = sigma/2 (g_ik - b_i b_k), least squares over all index pairs
    shape = gram - np.outer(b, b)
    sigma = 2.0 * float(np.sum(bcov * shape)) / float(np.sum(shape * shape))
    sigma_residual = float(np.max(np.abs(bcov - 0.5 * sigma * shape)))
    sigma_equation = abs(sigma * sigma + 16.0 * k)

    target = constant_curvature_tensor(4.0 * k, gram)
    constant_defect = float(np.max(np.abs(convention.apply(randers.curvature.components) - target)))

    beta, beta_defect = _beta(randers)
    closed = closedness_defect(randers)

    bullets = {
        'beta = 0': beta_defect <= tol,
        'closed': closed <= tol,
        'sigma equation': sigma_residual <= tol and sigma_equation <= tol,
        'constant curvature 4K': constant_defect <= tol,
    }
    return YSReport(
        case_label='negative',
        curvature_constant=k,
        beta_components=beta,
        bullets=bullets,
        tolerance=tol,
        convention=convention.description,
        parallel_defect=randers.parallel_defect,
        closedness_defect=closed,
        sigma_residual=sigma_residual,
        sigma=sigma,
        sigma_equation_defect=sigma_equation,
        beta_defect=beta_defect,
        constant_curvature_defect=constant_defect,
    )


def ys_zero_check(randers: RandersStructure) -> YSReport:
    tol = randers.tolerances.predicate
    beta, beta_defect = _beta(randers)
    flatness = randers.curvature.max_abs()

    return YSReport(
        case_label='zero',
        curvature_constant=0.0,
        beta_components=beta,
        bullets={'beta = 0': beta_defect <= tol, 'flat': flatness <= tol},
        tolerance=tol,
        convention=pin_ys_convention().description,
        parallel_defect=randers.parallel_defect,
        closedness_defect=closedness_defect(randers),
        beta_defect=beta_defect,
        flatness_defect=flatness,
    )


@dataclass
class MilnorReport:
    x: List[float]
    probes: int
    min_curvature: float
    negative_probes: int
    equality_mismatches: int
    zero_probes: int
    tolerance: float
    mismatched: List[List[float]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.negative_probes == 0 and self.equality_mismatches == 0

    def as_dict(self) -> Dict[str, Any]:
        out = dict(self.__dict__)
        out['passed'] = self.passed
        return out


def _span_rows(matrix: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal rows spanning the column space"""
    if not matrix.size:
        return np.zeros((0, matrix.shape[0]))
    u, s, _ = np.linalg.svd(matrix)
    rank = int(np.sum(s > tol * max(s[0] if s.size else 0.0, 1.0)))
    return u[:, :rank].T


def milnor_nonneg_check(x, alg: LieAlgebra, metric: MetricStructure, samples: int = 64, seed: int = 0,
                        tolerances: Tolerances = DEFAULT_TOLERANCES,
                        split: Optional[ReductiveSplit] = None) -> MilnorReport:
    """K(x,u) >= 0, with equality exactly when u is orthogonal to [x, g]"""
    if split is not None and not split.is_trivial:
        raise InputError("the nonnegativity statement is about Lie groups; this problem has nontrivial isotropy")
    x = as_vector(x, alg.dim, "x")
    tol = tolerances.predicate
    ad = alg.ad_matrix(x)
    skew = skew_defect(ad, metric.inner_matrix)
    if skew > tol:
        raise UsageError(f"ad(x) is not skew-adjoint (skew_defect={skew:.3g}); the nonnegativity statement does not apply")
    if not np.any(x):
        raise UsageError("x must be nonzero")

    gram = metric.inner_matrix
    tensor = curvature(alg, metric)
    image = _span_rows(ad, tolerances.rank)
    image_onb = gram_schmidt(image, gram) if image.shape[0] else image
    complement = null_space(image @ gram, tolerances.rank) if image.shape[0] else np.eye(alg.dim)

    rng = np.random.default_rng(seed)
    probes = list(rng.standard_normal((samples, alg.dim))) + list(np.eye(alg.dim)) + list(image) + list(complement)

    xx = float(x @ gram @ x)
    values, mismatched = [], []
    zero_probes = 0
    for u in probes:
        uu = float(u @ gram @ u)
        xu = float(x @ gram @ u)
        if xx * uu - xu * xu <= tolerances.degeneracy * max(xx * uu, 1.0):
            continue
        k = tensor.sectional(x, u)
        values.append(k)

        along_image = float(np.sqrt(np.sum((image_onb @ gram @ u) ** 2) / uu)) if image_onb.shape[0] else 0.0
        is_zero = abs(k) <= tol
        zero_probes += int(is_zero)
        if is_zero != (along_image <= tol):
            mismatched.append([float(v) for v in u])

    return MilnorReport(
        x=[float(v) for v in x],
        probes=len(values),
        min_curvature=float(min(values)) if values else 0.0,
        negative_probes=sum(1 for k in values if k < -tol),
        equality_mismatches=len(mismatched),
        zero_probes=zero_probes,
        tolerance=tol,
        mismatched=mismatched,
    )


@dataclass
class ConstantCurvatureReport:
    is_constant: bool
    k_estimate: float
    spread: float
    samples: int
    seed: int
    tolerance: float

    def as_dict(self) -> Dict[str, Any]:
        return dict(self.__dict__)


def constant_curvature_probe(randers: RandersStructure, samples: int = 256, seed: int = 0,
                             tol: Optional[float] = None) -> ConstantCurvatureReport:
    tol = randers.tolerances.constancy if tol is None else tol
    stats = scan_flags(randers, samples, seed)
    spread = stats.maximum - stats.minimum
    return ConstantCurvatureReport(
        is_constant=spread <= tol,
        k_estimate=stats.mean,
        spread=spread,
        samples=stats.count,
        seed=seed,
        tolerance=tol,
    )
