"""
Levi-Civita connection and curvature of invariant metrics.

Oracle convention: R(A,B)C = nabla_A nabla_B C - nabla_B nabla_A C - nabla_[A,B] C,
sectional curvature K(y,u) = <R(u,y)y,u> / area^2, so bi-invariant su(2) has K = 1/4.
Homogeneous spaces use the Nomizu map L on m and
R(X,Y)Z = L(X)L(Y)Z - L(Y)L(X)Z - L([X,Y]_m)Z - [[X,Y]_h, Z].
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Optional

import numpy as np

from randersflag.algebra import LieAlgebra, ReductiveSplit, as_vector, basis_vector, su2
from randersflag.errors import DegeneracyError, NumericalFailure, UsageError
from randersflag.metric import MetricStructure, bi_invariance_defect
from randersflag.ui import log

PIN_TOLERANCE = 1e-10


@dataclass(frozen=True, eq=False)
class ConnectionTable:
    """gamma[i, j] = nabla_{P e_i} (P e_j) as a coordinate vector"""

    gamma: np.ndarray
    projector: np.ndarray
    inner: np.ndarray
    source: str = "koszul"

    @property
    def dim(self) -> int:
        return self.gamma.shape[0]

    def covariant(self, u, v) -> np.ndarray:
        return np.einsum('i,j,ijk->k', u, v, self.gamma)


@dataclass(frozen=True, eq=False)
class CurvatureTensor:
    """vectors[i,j,k] = R(e_i,e_j)e_k, components[i,j,k,l] = <R(e_i,e_j)e_k, e_l>"""

    vectors: np.ndarray
    components: np.ndarray
    inner: np.ndarray

    @property
    def dim(self) -> int:
        return self.components.shape[0]

    def apply(self, x, y, z) -> np.ndarray:
        return np.einsum('i,j,k,ijkn->n', x, y, z, self.vectors)

    def component(self, x, y, z, w) -> float:
        return float(np.einsum('i,j,k,l,ijkl->', x, y, z, w, self.components))

    def sectional(self, y, u, tol: float = 1e-12) -> float:
        y = as_vector(y, self.dim, "y")
        u = as_vector(u, self.dim, "u")
        yy = y @ self.inner @ y
        uu = u @ self.inner @ u
        yu = y @ self.inner @ u
        area = yy * uu - yu * yu
        if area <= tol * yy * uu or yy == 0.0 or uu == 0.0:
            raise DegeneracyError("sectional curvature needs two independent vectors")
        return self.component(u, y, y, u) / area

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))

    def symmetry_defects(self) -> Dict[str, float]:
        r = self.components
        bianchi = r + np.einsum('jkil->ijkl', r) + np.einsum('kijl->ijkl', r)
        return {
            'antisymmetry_ij': float(np.max(np.abs(r + r.transpose(1, 0, 2, 3)))),
            'antisymmetry_kl': float(np.max(np.abs(r + r.transpose(0, 1, 3, 2)))),
            'pair_symmetry': float(np.max(np.abs(r - r.transpose(2, 3, 0, 1)))),
            'first_bianchi': float(np.max(np.abs(bianchi))),
        }


@dataclass(frozen=True)
class SlotMapping:
    """puttmann_printed(x,y,z,w) = sign * <R(x,y)z,w>_oracle"""

    sign: float
    description: str


def _projected_brackets(alg: LieAlgebra, projector: np.ndarray) -> np.ndarray:
    """[P e_i, P e_j] for every pair"""
    return np.einsum('ai,bj,abk->ijk', projector, projector, alg.structure)


def koszul_connection(alg: LieAlgebra, metric: MetricStructure) -> ConnectionTable:
    """2<nabla_U V, W> = <[U,V],W> - <[V,W],U> + <[W,U],V> on left-invariant fields"""
    gram = metric.inner_matrix
    lowered = np.einsum('ijk,kl->ijl', alg.structure, gram)
    lower = 0.5 * (lowered - np.einsum('jli->ijl', lowered) + np.einsum('lij->ijl', lowered))
    gamma = np.einsum('ijl,lk->ijk', lower, np.linalg.inv(gram))
    return ConnectionTable(gamma, np.eye(alg.dim), gram, "koszul")


def nomizu_connection(alg: LieAlgebra, metric: MetricStructure, split: ReductiveSplit) -> ConnectionTable:
    """
    L(X)Y = 1/2 [X,Y]_m + U(X,Y) on m, where
    <U(X,Y), Z> = 1/2 (<[Z,X]_m, Y> + <X, [Z,Y]_m>) for all Z in m.
    """
    n = alg.dim
    gram = metric.inner_matrix
    projector = np.asarray(split.projector_m)
    m_basis = np.asarray(split.m_basis)
    p = m_basis.shape[0]
    if p == 0:
        return ConnectionTable(np.zeros((n, n, n)), projector, gram, "nomizu")

    brackets = _projected_brackets(alg, projector)
    projected = np.einsum('ijk,lk->ijl', brackets, projector)

    # <[m_a, P e_i]_m, P e_j>
    a_brackets = np.einsum('ax,yi,xyk,lk->ail', m_basis, projector, alg.structure, projector)
    s = np.einsum('ail,lm,mj->aij', a_brackets, gram, projector)
    rhs = 0.5 * (s + s.transpose(0, 2, 1))

    gram_m = m_basis @ gram @ m_basis.T
    coefficients = np.linalg.solve(gram_m, rhs.reshape(p, n * n)).reshape(p, n, n)
    symmetric_part = np.einsum('aij,ak->ijk', coefficients, m_basis)

    return ConnectionTable(0.5 * projected + symmetric_part, projector, gram, "nomizu")


def levi_civita(alg: LieAlgebra, metric: MetricStructure, split: Optional[ReductiveSplit] = None) -> ConnectionTable:
    if split is None or split.is_trivial:
        return koszul_connection(alg, metric)
    return nomizu_connection(alg, metric, split)


def torsion_defect(conn: ConnectionTable, alg: LieAlgebra) -> float:
    brackets = np.einsum('ijk,lk->ijl', _projected_brackets(alg, conn.projector), conn.projector)
    torsion = conn.gamma - conn.gamma.transpose(1, 0, 2) - brackets
    return float(np.max(np.abs(torsion)))


def compatibility_defect(conn: ConnectionTable) -> float:
    lower = np.einsum('ijk,kl,lm->ijm', conn.gamma, conn.inner, conn.projector)
    return float(np.max(np.abs(lower + lower.transpose(0, 2, 1))))


def curvature_oracle(conn: ConnectionTable, alg: LieAlgebra) -> CurvatureTensor:
    gamma = conn.gamma
    projector = conn.projector
    complement = np.eye(alg.dim) - projector
    brackets = _projected_brackets(alg, projector)

    second = np.einsum('jkm,imn->ijkn', gamma, gamma)
    vectors = second - second.transpose(1, 0, 2, 3)
    vectors -= np.einsum('ijm,mkn->ijkn', brackets, gamma)

    isotropy = np.einsum('ijm,lm->ijl', brackets, complement)
    if np.any(isotropy):
        vectors -= np.einsum('ija,bk,abn->ijkn', isotropy, projector, alg.structure)

    components = np.einsum('ijkn,nm,ml->ijkl', vectors, conn.inner, projector)
    if not np.all(np.isfinite(components)):
        raise NumericalFailure("curvature tensor has non-finite components")
    return CurvatureTensor(vectors, components, conn.inner)


def curvature(alg: LieAlgebra, metric: MetricStructure, split: Optional[ReductiveSplit] = None) -> CurvatureTensor:
    return curvature_oracle(levi_civita(alg, metric, split), alg)


def b_plus(x, y, alg: LieAlgebra, metric: MetricStructure) -> np.ndarray:
    phi = metric.phi
    return 0.5 * (alg.bracket(x, phi @ y) + alg.bracket(y, phi @ x))


def b_minus(x, y, alg: LieAlgebra, metric: MetricStructure) -> np.ndarray:
    phi = metric.phi
    return 0.5 * (alg.bracket(phi @ x, y) + alg.bracket(x, phi @ y))


def biinvariant_curvature(x, y, z, alg: LieAlgebra, metric: MetricStructure, tol: float = 1e-12) -> np.ndarray:
    """R(x,y)z = 1/4 [z,[x,y]] for a bi-invariant metric"""
    defect = bi_invariance_defect(alg, metric.g0)
    if defect > tol or not metric.is_phi_identity(tol):
        raise UsageError(
            f"bi-invariant shortcut needs phi = id and a bi-invariant g0 (bi_invariance_defect={defect:.3g})"
        )
    return 0.25 * alg.bracket(z, alg.bracket(x, y))


def puttmann_printed(x, y, z, w, alg: LieAlgebra, metric: MetricStructure,
                     split: Optional[ReductiveSplit] = None, warn: bool = True) -> float:
    """Puttmann's curvature formula, term by term as printed"""
    g0 = metric.g0
    if warn and bi_invariance_defect(alg, g0) > 1e-12:
        log("curvature", "g0 is not bi-invariant; Puttmann's formula is outside its hypothesis here", "WARNING")
    gram = metric.inner_matrix
    phi_inv = metric.phi_inverse
    to_m = (lambda v: v) if split is None else split.project_m
    br = alg.bracket

    def ip0(a, b):
        return float(a @ g0 @ b)

    def ip(a, b):
        return float(a @ gram @ b)

    first = 0.5 * (ip0(b_minus(x, y, alg, metric), br(z, w)) + ip0(br(x, y), b_minus(z, w, alg, metric)))
    second = 0.25 * (
        ip(br(x, w), to_m(br(y, z)))
        - ip(br(x, z), to_m(br(y, w)))
        - 2.0 * ip(br(x, y), to_m(br(z, w)))
    )
    third = (
        ip0(b_plus(x, w, alg, metric), phi_inv @ b_plus(y, z, alg, metric))
        - ip0(b_plus(x, z, alg, metric), phi_inv @ b_plus(y, w, alg, metric))
    )
    return first + second + third


@lru_cache(maxsize=1)
def pin_slot_mapping() -> SlotMapping:
    """Finds the sign relating the printed formula to the oracle on bi-invariant su(2)"""
    alg = su2()
    metric = MetricStructure.identity(3)
    tensor = curvature(alg, metric)
    e1, e2 = basis_vector(3, 0), basis_vector(3, 1)

    printed = puttmann_printed(e1, e2, e1, e2, alg, metric, warn=False)
    oracle = tensor.component(e1, e2, e1, e2)
    for sign in (1.0, -1.0):
        if abs(printed - sign * oracle) <= PIN_TOLERANCE:
            if sign > 0:
                description = "printed(x,y,z,w) = <R(x,y)z,w>"
            else:
                description = "printed(x,y,z,w) = -<R(x,y)z,w> = <R(x,y)w,z>"
            log("curvature", f"pinned slot mapping: {description}", "INFO")
            return SlotMapping(sign, description)

    raise NumericalFailure(f"no slot mapping matches: printed={printed:.6g}, oracle={oracle:.6g}")


def drift_covariant_matrix(x, conn: ConnectionTable) -> np.ndarray:
    """matrix[i, j] = b_{j|i} = <nabla_{e_i} X, e_j>"""
    x = as_vector(x, conn.dim, "x")
    nabla = np.einsum('j,ijk->ik', x, conn.gamma)
    return nabla @ conn.inner @ conn.projector


def parallel_defect(x, conn: ConnectionTable) -> float:
    """max_i |nabla_{e_i} X|"""
    x = as_vector(x, conn.dim, "x")
    nabla = np.einsum('j,ijk->ik', x, conn.gamma)
    norms = np.einsum('ik,kl,il->i', nabla, conn.inner, nabla)
    return float(np.sqrt(max(float(np.max(norms)), 0.0))) if norms.size else 0.0


def sectional(y, u, tensor: CurvatureTensor, tol: float = 1e-12) -> float:
    return tensor.sectional(y, u, tol)
