"""
Invariant Randers norm F(Y) = sqrt(<Y,Y>) + <X,Y> and its fundamental tensor.
"""

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from randersflag.algebra import LieAlgebra, ReductiveSplit, as_vector
from randersflag.config import DEFAULT_TOLERANCES, Tolerances
from randersflag.curvature import (
    ConnectionTable,
    CurvatureTensor,
    curvature_oracle,
    levi_civita,
    parallel_defect,
)
from randersflag.errors import DegeneracyError, NumericalFailure, StrongConvexityError, ValidationError
from randersflag.metric import MetricStructure


@dataclass(frozen=True)
class FlagDeterminants:
    """g_Y(Y,Y) g_Y(U,U) - g_Y(Y,U)^2 on a <.,.>-orthonormal pair, three ways"""

    direct: float
    printed: float
    expanded: float

    @property
    def printed_gap(self) -> float:
        return abs(self.printed - self.direct)

    @property
    def expanded_gap(self) -> float:
        return abs(self.expanded - self.direct)


@dataclass(frozen=True, eq=False)
class RandersStructure:
    algebra: LieAlgebra
    metric: MetricStructure
    drift: np.ndarray
    split: Optional[ReductiveSplit] = None
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES)

    def __post_init__(self):
        drift = np.array(as_vector(self.drift, self.algebra.dim, "drift"), dtype=float)
        drift.setflags(write=False)
        object.__setattr__(self, "drift", drift)

        if self.metric.dim != self.algebra.dim:
            raise ValidationError(f"metric is {self.metric.dim}-dimensional, algebra is {self.algebra.dim}-dimensional")

        squared = float(drift @ self.metric.inner_matrix @ drift)
        if squared >= 1.0:
            raise StrongConvexityError(f"<X,X>={squared:.12g} must be < 1 for a strongly convex Randers norm")

        if self.split is not None and not self.split.is_trivial:
            tol = self.tolerances.structural
            off_m = float(np.max(np.abs(self.split.project_h(drift))))
            if off_m > tol:
                raise ValidationError(f"drift h-component {off_m:.3g} exceeds {tol:g}; X must lie in m")
            for w in self.split.h_basis:
                moved = float(np.max(np.abs(self.algebra.bracket(w, drift))))
                if moved > tol:
                    raise ValidationError(f"ad_h_defect={moved:.3g} exceeds {tol:g}; X is not Ad(H)-invariant")

    @property
    def dim(self) -> int:
        return self.algebra.dim

    @property
    def norm_bound(self) -> float:
        return self.metric.norm(self.drift)

    @property
    def is_riemannian(self) -> bool:
        return self.norm_bound <= self.tolerances.degeneracy

    def strong_convexity_margin(self) -> float:
        return 1.0 - self.norm_bound

    @cached_property
    def connection(self) -> ConnectionTable:
        return levi_civita(self.algebra, self.metric, self.split)

    @cached_property
    def curvature(self) -> CurvatureTensor:
        return curvature_oracle(self.connection, self.algebra)

    @cached_property
    def parallel_defect(self) -> float:
        return parallel_defect(self.drift, self.connection)

    @property
    def is_berwald(self) -> bool:
        return self.parallel_defect <= self.tolerances.predicate

    def randers_norm(self, y) -> float:
        y = as_vector(y, self.dim, "Y")
        return self.metric.norm(y) + float(self.drift @ self.metric.inner_matrix @ y)

    def _pole_length(self, y) -> float:
        squared = float(y @ self.metric.inner_matrix @ y)
        if squared <= 0.0:
            raise DegeneracyError("the fundamental tensor is undefined at Y = 0")
        return squared

    def fundamental_tensor_closed(self, y, u, v) -> float:
        y = as_vector(y, self.dim, "Y")
        u = as_vector(u, self.dim, "U")
        v = as_vector(v, self.dim, "V")
        x = self.drift
        g = self.metric.inner_matrix
        yy = self._pole_length(y)

        def ip(a, b):
            return float(a @ g @ b)

        return (
            ip(u, v)
            + ip(x, u) * ip(x, v)
            - ip(x, y) * ip(y, v) * ip(y, u) / yy ** 1.5
            + (ip(x, u) * ip(y, v) + ip(x, y) * ip(u, v) + ip(x, v) * ip(y, u)) / np.sqrt(yy)
        )

    def fundamental_matrix(self, y, check: bool = True) -> np.ndarray:
        """g_Y assembled over the basis"""
        y = as_vector(y, self.dim, "Y")
        g = self.metric.inner_matrix
        yy = self._pole_length(y)
        gx = g @ self.drift
        gy = g @ y
        a = float(self.drift @ gy)

        matrix = (
            g
            + np.outer(gx, gx)
            - a * np.outer(gy, gy) / yy ** 1.5
            + (np.outer(gx, gy) + np.outer(gy, gx) + a * g) / np.sqrt(yy)
        )
        if check:
            try:
                np.linalg.cholesky(matrix)
            except np.linalg.LinAlgError:
                raise NumericalFailure("g_Y is not positive definite although <X,X> < 1")
        return matrix

    def fundamental_tensor_fd(self, y, u, v, h: Optional[float] = None) -> float:
        """1/2 d^2/ds dt F^2(Y + sU + tV) by a central second difference"""
        y = as_vector(y, self.dim, "Y")
        u = as_vector(u, self.dim, "U")
        v = as_vector(v, self.dim, "V")
        step = (self.tolerances.fd_step if h is None else h) * np.sqrt(self._pole_length(y))

        values = []
        for su, sv in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            point = y + su * step * u + sv * step * v
            if not np.any(point):
                raise DegeneracyError("finite-difference stencil reaches the zero vector")
            values.append(self.randers_norm(point) ** 2)

        return 0.5 * (values[0] - values[1] - values[2] + values[3]) / (4.0 * step * step)

    def flag_determinants(self, y, u) -> FlagDeterminants:
        g_yy = self.fundamental_tensor_closed(y, y, y)
        g_uu = self.fundamental_tensor_closed(y, u, u)
        g_yu = self.fundamental_tensor_closed(y, y, u)
        a = float(self.drift @ self.metric.inner_matrix @ as_vector(y, self.dim, "Y"))
        return FlagDeterminants(
            direct=g_yy * g_uu - g_yu * g_yu,
            printed=(1.0 + a) ** 2 * (1.0 - a),
            expanded=(1.0 + a) ** 3,
        )
