"""
Reference bi-invariant product g0, the endomorphism phi and the
left-invariant product <X,Y> = <phi X, Y>_0.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from randersflag.algebra import LieAlgebra, ReductiveSplit, as_vector
from randersflag.errors import DegeneracyError, DimensionError, ValidationError

POSITIVE_DEFINITE_THRESHOLD = 1e-10
SELF_ADJOINT_TOLERANCE = 1e-12
DEPENDENCE_THRESHOLD = 1e-12


def _square(matrix, dim: Optional[int], name: str) -> np.ndarray:
    out = np.array(matrix, dtype=float)
    if out.ndim != 2 or out.shape[0] != out.shape[1] or (dim is not None and out.shape[0] != dim):
        raise DimensionError(f"{name} must be a {dim} x {dim} matrix, got shape {out.shape}")
    return out


def _require_spd(matrix: np.ndarray, name: str, threshold: float) -> None:
    asymmetry = float(np.max(np.abs(matrix - matrix.T)))
    scale = max(float(np.max(np.abs(matrix))), 1.0)
    if asymmetry > SELF_ADJOINT_TOLERANCE * scale:
        raise ValidationError(f"{name} symmetry_defect={asymmetry:.3g} exceeds {SELF_ADJOINT_TOLERANCE * scale:.3g}")
    smallest = float(np.min(np.linalg.eigvalsh(0.5 * (matrix + matrix.T))))
    if smallest <= threshold:
        raise ValidationError(f"{name} is not positive definite: smallest eigenvalue {smallest:.3g} <= {threshold:g}")


def skew_defect(ad: np.ndarray, gram: np.ndarray) -> float:
    """max |<A x, y> + <x, A y>| over basis pairs"""
    return float(np.max(np.abs(ad.T @ gram + gram @ ad)))


@dataclass(frozen=True, eq=False)
class MetricStructure:
    g0: np.ndarray
    phi: np.ndarray
    inner_matrix: np.ndarray
    source: str = "phi"

    @classmethod
    def from_phi(cls, g0, phi, threshold: float = POSITIVE_DEFINITE_THRESHOLD) -> "MetricStructure":
        g0 = _square(g0, None, "g0")
        phi = _square(phi, g0.shape[0], "phi")
        _require_spd(g0, "g0", threshold)

        gram = g0 @ phi
        asymmetry = float(np.max(np.abs(gram - gram.T)))
        if asymmetry > SELF_ADJOINT_TOLERANCE * max(float(np.max(np.abs(gram))), 1.0):
            raise ValidationError(f"phi is not g0-self-adjoint: self_adjoint_defect={asymmetry:.3g}")
        gram = 0.5 * (gram + gram.T)
        _require_spd(gram, "<.,.>", threshold)

        return cls(_lock(g0), _lock(phi), _lock(gram), "phi")

    @classmethod
    def from_inner(cls, g0, inner, threshold: float = POSITIVE_DEFINITE_THRESHOLD) -> "MetricStructure":
        g0 = _square(g0, None, "g0")
        inner = _square(inner, g0.shape[0], "metric")
        _require_spd(g0, "g0", threshold)
        _require_spd(inner, "metric", threshold)
        inner = 0.5 * (inner + inner.T)
        phi = np.linalg.solve(g0, inner)
        return cls(_lock(g0), _lock(phi), _lock(inner), "metric")

    @classmethod
    def identity(cls, dim: int) -> "MetricStructure":
        return cls.from_phi(np.eye(dim), np.eye(dim))

    @property
    def dim(self) -> int:
        return self.g0.shape[0]

    @property
    def phi_inverse(self) -> np.ndarray:
        return np.linalg.inv(self.phi)

    def inner0(self, a, b) -> float:
        return float(as_vector(a, self.dim, "a") @ self.g0 @ as_vector(b, self.dim, "b"))

    def inner(self, a, b) -> float:
        return float(as_vector(a, self.dim, "a") @ self.inner_matrix @ as_vector(b, self.dim, "b"))

    def norm(self, v) -> float:
        return float(np.sqrt(max(self.inner(v, v), 0.0)))

    def is_phi_identity(self, tol: float) -> bool:
        return float(np.max(np.abs(self.phi - np.eye(self.dim)))) <= tol

    def orthonormalize(self, vectors, which: str = "inner") -> np.ndarray:
        form = self.inner_matrix if which == "inner" else self.g0
        return gram_schmidt(vectors, form)


def _lock(matrix: np.ndarray) -> np.ndarray:
    matrix = np.array(matrix, dtype=float)
    matrix.setflags(write=False)
    return matrix


def bi_invariance_defect(alg: LieAlgebra, g0) -> float:
    """max over basis triples of |<[x,y],z>_0 + <y,[x,z]>_0|"""
    g0 = np.asarray(g0, dtype=float)
    lowered = np.einsum('xyk,kz->xyz', alg.structure, g0)
    return float(np.max(np.abs(lowered + lowered.transpose(0, 2, 1))))


def ad_invariance_defect_h(alg: LieAlgebra, metric: MetricStructure, split: ReductiveSplit) -> float:
    defect = 0.0
    for w in split.h_basis:
        defect = max(defect, skew_defect(alg.ad_matrix(w), metric.inner_matrix))
    return defect


def check_split_compatibility(metric: MetricStructure, split: ReductiveSplit) -> float:
    """Residual of phi|h = id"""
    residual = 0.0
    for w in split.h_basis:
        residual = max(residual, float(np.max(np.abs(metric.phi @ w - w))))
    return residual


def gram_schmidt(vectors: Sequence, form) -> np.ndarray:
    """
    Modified Gram-Schmidt with one re-orthogonalization pass.

    Rows of the result are orthonormal for the bilinear form given by the
    symmetric matrix `form`; the span of every leading subset is kept and
    the first output is a positive multiple of the first input.
    """
    form = np.asarray(form, dtype=float)
    basis = []
    for index, raw in enumerate(vectors):
        v = np.array(raw, dtype=float)
        if v.shape != (form.shape[0],):
            raise DimensionError(f"vector {index} must have length {form.shape[0]}, got shape {v.shape}")

        scale = float(np.sqrt(max(v @ form @ v, 0.0)))
        if scale == 0.0:
            raise DegeneracyError(f"vector {index} is zero")

        for _ in range(2):
            for q in basis:
                v = v - (q @ form @ v) * q

        residual = float(np.sqrt(max(v @ form @ v, 0.0)))
        if residual < DEPENDENCE_THRESHOLD * scale:
            raise DegeneracyError(f"vector {index} depends on the previous ones (residual {residual:.3g})")
        basis.append(v / residual)

    return np.array(basis).reshape(len(basis), form.shape[0])
