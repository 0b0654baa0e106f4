"""
Finite-dimensional real Lie algebras given by structure constants,
and reductive splittings g = m + h.
"""

from dataclasses import dataclass, field
from typing import Iterable, Sequence, Tuple

import numpy as np

from randersflag.errors import DimensionError, InputError, ValidationError

JACOBI_TOLERANCE = 1e-10
RANK_THRESHOLD = 1e-9


def _frozen(array) -> np.ndarray:
    out = np.array(array, dtype=float)
    out.setflags(write=False)
    return out


def as_vector(v, dim: int, name: str = "vector") -> np.ndarray:
    out = np.asarray(v, dtype=float)
    if out.shape != (dim,):
        raise DimensionError(f"{name} must have length {dim}, got shape {out.shape}")
    return out


@dataclass(frozen=True)
class ValidationReport:
    antisymmetry_defect: float
    jacobi_defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.antisymmetry_defect <= self.tolerance and self.jacobi_defect <= self.tolerance


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """[e_i, e_j] = sum_k structure[i, j, k] e_k"""

    structure: np.ndarray
    basis_names: Tuple[str, ...] = ()

    def __post_init__(self):
        c = _frozen(self.structure)
        if c.ndim != 3 or not (c.shape[0] == c.shape[1] == c.shape[2]):
            raise DimensionError(f"structure constants must be a dim x dim x dim array, got shape {c.shape}")
        if c.shape[0] == 0:
            raise InputError("dim=0 is not a Lie algebra")
        if np.any(c != -c.transpose(1, 0, 2)):
            raise ValidationError("structure constants are not antisymmetric; use LieAlgebra.from_brackets")
        object.__setattr__(self, "structure", c)

        names = tuple(self.basis_names) or tuple(f"e{i + 1}" for i in range(c.shape[0]))
        if len(names) != c.shape[0]:
            raise DimensionError(f"{len(names)} basis names for a {c.shape[0]}-dimensional algebra")
        object.__setattr__(self, "basis_names", names)

    @classmethod
    def from_brackets(
        cls,
        dim: int,
        entries: Iterable[Tuple[int, int, Sequence[Tuple[int, float]]]],
        basis_names: Sequence[str] = (),
    ) -> "LieAlgebra":
        """Builds the full table from i<j entries [e_i, e_j] = sum c e_k"""
        if dim <= 0:
            raise InputError(f"dim must be positive, got {dim}")

        c = np.zeros((dim, dim, dim))
        for i, j, terms in entries:
            if not (0 <= i < j < dim):
                raise InputError(f"bracket entry needs 0 <= i < j < {dim}, got i={i}, j={j}")
            for k, coefficient in terms:
                if not (0 <= k < dim):
                    raise InputError(f"bracket term index k={k} out of range for dim={dim}")
                c[i, j, k] += float(coefficient)
                c[j, i, k] -= float(coefficient)

        return cls(c, tuple(basis_names))

    @property
    def dim(self) -> int:
        return self.structure.shape[0]

    def _raw_bracket(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        return np.einsum('i,j,ijk->k', a, b, self.structure)

    def bracket(self, a, b) -> np.ndarray:
        a = as_vector(a, self.dim, "a")
        b = as_vector(b, self.dim, "b")
        # antisymmetric in floating point, not only in exact arithmetic
        return 0.5 * (self._raw_bracket(a, b) - self._raw_bracket(b, a))

    def ad_matrix(self, x) -> np.ndarray:
        """Matrix of v -> [x, v]; column j is [x, e_j]"""
        x = as_vector(x, self.dim, "x")
        return np.einsum('i,ijk->kj', x, self.structure)


def validate_structure(structure, tol: float = JACOBI_TOLERANCE) -> ValidationReport:
    """Report-only check of a raw structure-constant table"""
    c = np.asarray(structure, dtype=float)
    antisymmetry = float(np.max(np.abs(c + c.transpose(1, 0, 2)))) if c.size else 0.0

    # J[i,j,k] = [e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]
    jacobi = (
        np.einsum('jkm,iml->ijkl', c, c)
        + np.einsum('kim,jml->ijkl', c, c)
        + np.einsum('ijm,kml->ijkl', c, c)
    )
    jacobi_defect = float(np.max(np.abs(jacobi))) if jacobi.size else 0.0

    return ValidationReport(antisymmetry, jacobi_defect, tol)


def validate(alg: LieAlgebra, tol: float = JACOBI_TOLERANCE) -> ValidationReport:
    return validate_structure(alg.structure, tol)


def derived_span(alg: LieAlgebra, tol: float = RANK_THRESHOLD) -> np.ndarray:
    """Orthonormal rows spanning [g, g]"""
    n = alg.dim
    rows = [alg.structure[i, j] for i in range(n) for j in range(i + 1, n)]
    if not rows:
        return np.zeros((0, n))

    _, s, vt = np.linalg.svd(np.array(rows))
    threshold = tol * max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > threshold))
    return vt[:rank]


def null_space(matrix: np.ndarray, tol: float = RANK_THRESHOLD) -> np.ndarray:
    """Orthonormal rows spanning {v : matrix @ v = 0}"""
    n = matrix.shape[1]
    if matrix.shape[0] == 0:
        return np.eye(n)
    _, s, vt = np.linalg.svd(matrix)
    threshold = tol * max(s[0] if s.size else 0.0, 1.0)
    rank = int(np.sum(s > threshold))
    return vt[rank:]


@dataclass(frozen=True)
class ReductiveReport:
    subalgebra_defect: float
    orthogonality_defect: float
    reductivity_defect: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return max(self.subalgebra_defect, self.orthogonality_defect, self.reductivity_defect) <= self.tolerance


@dataclass(frozen=True, eq=False)
class ReductiveSplit:
    """g = m + h with m the g0-orthogonal complement of h"""

    h_basis: np.ndarray
    m_basis: np.ndarray
    projector_m: np.ndarray
    g0: np.ndarray
    h_indices: Tuple[int, ...] = field(default=())

    @classmethod
    def from_subalgebra(cls, h_vectors, g0, h_indices: Sequence[int] = ()) -> "ReductiveSplit":
        g0 = np.asarray(g0, dtype=float)
        n = g0.shape[0]
        h = np.asarray(h_vectors, dtype=float).reshape(-1, n)

        if h.shape[0]:
            s = np.linalg.svd(h, compute_uv=False)
            rank = int(np.sum(s > RANK_THRESHOLD * max(s[0], 1.0)))
            if rank < h.shape[0]:
                raise ValidationError("subalgebra spanning vectors are linearly dependent")
            # projector onto h along its g0-orthogonal complement
            gram = h @ g0 @ h.T
            projector_h = h.T @ np.linalg.solve(gram, h @ g0)
            m_basis = null_space(h @ g0)
        else:
            projector_h = np.zeros((n, n))
            m_basis = np.eye(n)

        return cls(
            h_basis=_frozen(h),
            m_basis=_frozen(m_basis),
            projector_m=_frozen(np.eye(n) - projector_h),
            g0=_frozen(g0),
            h_indices=tuple(h_indices),
        )

    @classmethod
    def trivial(cls, dim: int, g0=None) -> "ReductiveSplit":
        """H = {e}, m = g"""
        return cls.from_subalgebra(np.zeros((0, dim)), np.eye(dim) if g0 is None else g0)

    @property
    def dim(self) -> int:
        return self.projector_m.shape[0]

    @property
    def is_trivial(self) -> bool:
        return self.h_basis.shape[0] == 0

    def project_m(self, v) -> np.ndarray:
        return self.projector_m @ as_vector(v, self.dim)

    def project_h(self, v) -> np.ndarray:
        v = as_vector(v, self.dim)
        return v - self.projector_m @ v


def check_reductive(split: ReductiveSplit, alg: LieAlgebra, tol: float = 1e-12) -> ReductiveReport:
    subalgebra = 0.0
    reductivity = 0.0
    for w in split.h_basis:
        for v in split.h_basis:
            subalgebra = max(subalgebra, float(np.max(np.abs(split.project_m(alg.bracket(w, v))))))
        for m in split.m_basis:
            reductivity = max(reductivity, float(np.max(np.abs(split.project_h(alg.bracket(w, m))))))

    if split.h_basis.shape[0] and split.m_basis.shape[0]:
        orthogonality = float(np.max(np.abs(split.h_basis @ split.g0 @ split.m_basis.T)))
    else:
        orthogonality = 0.0

    return ReductiveReport(subalgebra, orthogonality, reductivity, tol)


def abelian(n: int) -> LieAlgebra:
    return LieAlgebra.from_brackets(n, [])


def heisenberg3() -> LieAlgebra:
    return LieAlgebra.from_brackets(3, [(0, 1, [(2, 1.0)])], ("x", "y", "z"))


def su2() -> LieAlgebra:
    # [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
    return LieAlgebra.from_brackets(3, [
        (0, 1, [(2, 1.0)]),
        (1, 2, [(0, 1.0)]),
        (0, 2, [(1, -1.0)]),
    ])


def direct_sum(first: LieAlgebra, second: LieAlgebra) -> LieAlgebra:
    n, p = first.dim, second.dim
    c = np.zeros((n + p, n + p, n + p))
    c[:n, :n, :n] = first.structure
    c[n:, n:, n:] = second.structure
    return LieAlgebra(c)


def basis_vector(dim: int, index: int) -> np.ndarray:
    v = np.zeros(dim)
    v[index] = 1.0
    return v
