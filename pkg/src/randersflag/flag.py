"""
Flag curvature of Berwald-type invariant Randers metrics.

The oracle is K(P,Y) = g_Y(R(U,Y)Y, U) / (g_Y(Y,Y) g_Y(U,U) - g_Y(Y,U)^2) with R the
Levi-Civita curvature and g_Y the closed-form fundamental tensor. The closed forms
from the literature are evaluated as printed next to it, with corrected variants
that use the pinned sign and the (1 + <X,Y>)^3 denominator.
"""

import asyncio
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from randersflag.algebra import as_vector
from randersflag.curvature import pin_slot_mapping, puttmann_printed
from randersflag.errors import DegeneracyError, NumericalFailure, ProjectionCollapseError, UsageError, ValidationError
from randersflag.metric import MetricStructure, bi_invariance_defect
from randersflag.randers import RandersStructure
from randersflag.ui import clear_status_line, log, print_status_line

HISTOGRAM_BINS = 64
MAX_RESAMPLES = 16
DEFAULT_WORKERS = 4


@dataclass(frozen=True, eq=False)
class Flag:
    """Pole y and transverse u, orthonormal for <.,.>"""

    y: np.ndarray
    u: np.ndarray

    def as_lists(self) -> Dict[str, List[float]]:
        return {'y': [float(v) for v in self.y], 'u': [float(v) for v in self.u]}


def make_flag(y_raw, u_raw, metric: MetricStructure, split=None, tol: float = 1e-12) -> Flag:
    y = as_vector(y_raw, metric.dim, "Y")
    u = as_vector(u_raw, metric.dim, "U")

    if split is not None and not split.is_trivial:
        projected = []
        for name, raw in (("Y", y), ("U", u)):
            v = split.project_m(raw)
            if metric.norm(v) <= tol * max(metric.norm(raw), 1.0):
                raise ProjectionCollapseError(f"{name} has no component in m")
            projected.append(v)
        y, u = projected

    basis = metric.orthonormalize([y, u])
    return Flag(basis[0], basis[1])


def _ip(metric: MetricStructure):
    g = metric.inner_matrix
    return lambda a, b: float(a @ g @ b)


def _ip0(metric: MetricStructure):
    g0 = metric.g0
    return lambda a, b: float(a @ g0 @ b)


def _to_m(randers: RandersStructure):
    if randers.split is None:
        return lambda v: v
    return randers.split.project_m


def curvature_vector(flag: Flag, randers: RandersStructure) -> np.ndarray:
    """R(U,Y)Y"""
    return randers.curvature.apply(flag.u, flag.y, flag.y)


def theta(flag: Flag, randers: RandersStructure) -> float:
    return _ip(randers.metric)(flag.y, curvature_vector(flag, randers))


def alpha_oracle(flag: Flag, randers: RandersStructure) -> float:
    return _ip(randers.metric)(randers.drift, curvature_vector(flag, randers))


def gamma_oracle(flag: Flag, randers: RandersStructure) -> float:
    return _ip(randers.metric)(curvature_vector(flag, randers), flag.u)


def alpha_printed(flag: Flag, randers: RandersStructure) -> float:
    alg, metric = randers.algebra, randers.metric
    br, phi, phi_inv = alg.bracket, metric.phi, metric.phi_inverse
    ip, ip0, to_m = _ip(metric), _ip0(metric), _to_m(randers)
    x, y, u = randers.drift, flag.y, flag.u

    return (
        0.25 * (ip0(br(phi @ u, y) + br(u, phi @ y), br(y, x))
                + ip0(br(u, y), br(phi @ y, x) + br(y, phi @ x)))
        + 0.75 * ip(br(y, u), to_m(br(y, x)))
        + 0.5 * ip0(br(u, phi @ x) + br(x, phi @ u), phi_inv @ br(y, phi @ y))
        - 0.25 * ip0(br(u, phi @ y) + br(y, phi @ u), phi_inv @ (br(y, phi @ x) + br(x, phi @ y)))
    )


def _gamma_printed(flag: Flag, randers: RandersStructure, first_partner: np.ndarray) -> float:
    alg, metric = randers.algebra, randers.metric
    br, phi, phi_inv = alg.bracket, metric.phi, metric.phi_inverse
    ip, ip0, to_m = _ip(metric), _ip0(metric), _to_m(randers)
    y, u = flag.y, flag.u

    return (
        0.5 * ip0(br(phi @ u, y) + br(u, phi @ y), br(y, first_partner))
        + 0.75 * ip(br(y, u), to_m(br(y, u)))
        + ip0(br(u, phi @ u), phi_inv @ br(y, phi @ y))
        - 0.25 * ip0(br(u, phi @ y) + br(y, phi @ u), phi_inv @ (br(y, phi @ u) + br(u, phi @ y)))
    )


def gamma_printed(flag: Flag, randers: RandersStructure) -> float:
    """gamma with the first term paired with [Y,U]"""
    return _gamma_printed(flag, randers, flag.u)


def gamma_statement(flag: Flag, randers: RandersStructure) -> float:
    """gamma as stated, with the first term paired with [Y,X]"""
    return _gamma_printed(flag, randers, randers.drift)


def _require_berwald(randers: RandersStructure) -> None:
    if not randers.is_berwald:
        raise UsageError(
            f"drift is not parallel (parallel_defect={randers.parallel_defect:.3g}); "
            "the flag curvature oracle needs a Berwald structure, see the 'berwald' check"
        )


def flag_curvature_oracle(flag: Flag, randers: RandersStructure) -> float:
    _require_berwald(randers)
    r = curvature_vector(flag, randers)
    numerator = randers.fundamental_tensor_closed(flag.y, r, flag.u)
    det = randers.flag_determinants(flag.y, flag.u).direct
    if det <= randers.tolerances.degeneracy:
        raise DegeneracyError(f"g_Y is degenerate on the flag (det={det:.3g})")
    return numerator / det


def _pole_terms(flag: Flag, randers: RandersStructure) -> Tuple[float, float]:
    ip = _ip(randers.metric)
    a = ip(randers.drift, flag.y)
    c = ip(randers.drift, flag.u)
    tol = randers.tolerances.degeneracy
    if abs(1.0 + a) <= tol or abs(1.0 - a) <= tol:
        raise DegeneracyError(f"<X,Y>={a:.12g} makes the printed denominator vanish")
    return a, c


@dataclass
class FlagReport:
    flag: Flag
    k_oracle: Optional[float]
    k_printed: float
    k_corrected: float
    theta: float
    alpha: float
    gamma: float
    discrepancy: Optional[float]
    gamma_statement: float = 0.0
    k_printed_statement: float = 0.0
    k_denominator_variant: float = 0.0
    det_direct: float = 0.0
    det_printed: float = 0.0
    det_expanded: float = 0.0
    alpha_oracle: float = 0.0
    gamma_oracle: float = 0.0
    is_berwald: bool = True

    def as_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        out.update(self.flag.as_lists())
        for name in (
            'k_oracle', 'k_printed', 'k_corrected', 'theta', 'alpha', 'gamma', 'discrepancy',
            'gamma_statement', 'k_printed_statement', 'k_denominator_variant',
            'det_direct', 'det_printed', 'det_expanded', 'alpha_oracle', 'gamma_oracle', 'is_berwald',
        ):
            out[name] = getattr(self, name)
        return out


def flag_curvature_printed(flag: Flag, randers: RandersStructure) -> FlagReport:
    a, c = _pole_terms(flag, randers)
    sign = pin_slot_mapping().sign

    alpha = alpha_printed(flag, randers)
    gamma = gamma_printed(flag, randers)
    gamma_st = gamma_statement(flag, randers)

    printed_denominator = (1.0 + a) ** 2 * (1.0 - a)
    expanded_denominator = (1.0 + a) ** 3
    a_printed = alpha * c + gamma * (1.0 + a)
    a_signed = sign * a_printed

    determinants = randers.flag_determinants(flag.y, flag.u)
    is_berwald = randers.is_berwald
    k_oracle = flag_curvature_oracle(flag, randers) if is_berwald else None
    k_printed = a_printed / printed_denominator

    return FlagReport(
        flag=flag,
        k_oracle=k_oracle,
        k_printed=k_printed,
        k_corrected=a_signed / expanded_denominator,
        theta=theta(flag, randers),
        alpha=alpha,
        gamma=gamma,
        discrepancy=None if k_oracle is None else abs(k_printed - k_oracle),
        gamma_statement=gamma_st,
        k_printed_statement=(alpha * c + gamma_st * (1.0 + a)) / printed_denominator,
        k_denominator_variant=a_signed / printed_denominator,
        det_direct=determinants.direct,
        det_printed=determinants.printed,
        det_expanded=determinants.expanded,
        alpha_oracle=alpha_oracle(flag, randers),
        gamma_oracle=gamma_oracle(flag, randers),
        is_berwald=is_berwald,
    )


def flag_curvature_biinvariant(flag: Flag, randers: RandersStructure) -> Tuple[float, float]:
    """(printed, corrected) for a bi-invariant g0 with phi = id"""
    alg, metric = randers.algebra, randers.metric
    tol = randers.tolerances.structural
    defect = bi_invariance_defect(alg, metric.g0)
    if defect > tol or not metric.is_phi_identity(tol):
        raise UsageError(f"needs phi = id and a bi-invariant g0 (bi_invariance_defect={defect:.3g})")
    if randers.split is not None and not randers.split.is_trivial:
        raise UsageError("the bi-invariant closed form is stated for Lie groups (trivial isotropy)")
    _require_berwald(randers)

    ip0 = _ip0(metric)
    x, y, u = randers.drift, flag.y, flag.u
    a, c = ip0(x, y), ip0(x, u)
    double = alg.bracket(y, alg.bracket(u, y))
    numerator = ip0(double, x) * c + ip0(double, u) * (1.0 + a)

    if abs(1.0 + a) <= randers.tolerances.degeneracy or abs(1.0 - a) <= randers.tolerances.degeneracy:
        raise DegeneracyError(f"<X,Y>_0={a:.12g} makes the printed denominator vanish")
    return numerator / (4.0 * (1.0 + a) ** 2 * (1.0 - a)), numerator / (4.0 * (1.0 + a) ** 3)


def orthonormal_basis(randers: RandersStructure) -> np.ndarray:
    return randers.metric.orthonormalize(np.eye(randers.dim))


def flag_curvature_basis(i: int, j: int, randers: RandersStructure,
                         basis: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """(printed, corrected) for the flag span{e_i, e_j} with pole e_i of a g-orthonormal basis"""
    if i == j:
        raise UsageError("flag_curvature_basis needs i != j")
    if randers.split is not None and not randers.split.is_trivial:
        raise UsageError("the basis formula is stated for Lie groups (trivial isotropy)")

    metric, alg = randers.metric, randers.algebra
    basis = orthonormal_basis(randers) if basis is None else np.asarray(basis, dtype=float)
    orthonormality = float(np.max(np.abs(basis @ metric.inner_matrix @ basis.T - np.eye(randers.dim))))
    if orthonormality > randers.tolerances.structural:
        raise ValidationError(f"basis orthonormality_defect={orthonormality:.3g} exceeds {randers.tolerances.structural:g}")
    if not (0 <= i < randers.dim and 0 <= j < randers.dim):
        raise UsageError(f"basis indices must lie in [0, {randers.dim})")

    br, phi, phi_inv = alg.bracket, metric.phi, metric.phi_inverse
    ip, ip0 = _ip(metric), _ip0(metric)
    x = randers.drift
    ei, ej = basis[i], basis[j]
    x_i, x_j = ip(x, ei), ip(x, ej)

    r_x = (
        -0.25 * (ip0(br(phi @ ej, ei), br(ei, x)) + ip0(br(ej, phi @ ei), br(ei, x))
                 + ip0(br(ej, ei), br(phi @ ei, x)) + ip0(br(ej, ei), br(ei, phi @ x)))
        + 0.75 * ip(br(ej, ei), br(ei, x))
        - 0.5 * ip0(br(ej, phi @ x) + br(x, phi @ ej), phi_inv @ br(ei, phi @ ei))
        + 0.25 * ip0(br(ej, phi @ ei) + br(ei, phi @ ej), phi_inv @ (br(ei, phi @ x) + br(x, phi @ ei)))
    )
    r_u = (
        -0.5 * (ip0(br(phi @ ej, ei), br(ei, ej)) + ip0(br(ej, phi @ ei), br(ei, ej)))
        + 0.75 * ip(br(ej, ei), br(ei, ej))
        - ip0(br(ej, phi @ ej), phi_inv @ br(ei, phi @ ei))
        + 0.25 * ip0(br(ej, phi @ ei) + br(ei, phi @ ej), phi_inv @ (br(ei, phi @ ej) + br(ej, phi @ ei)))
    )

    if abs(1.0 + x_i) <= randers.tolerances.degeneracy or abs(1.0 - x_i) <= randers.tolerances.degeneracy:
        raise DegeneracyError(f"X_i={x_i:.12g} makes the printed denominator vanish")

    numerator = x_j * r_x + (1.0 + x_i) * r_u
    # these blocks already carry the oracle sign
    corrected = -pin_slot_mapping().sign * numerator
    return numerator / ((1.0 + x_i) ** 2 * (1.0 - x_i)), corrected / (1.0 + x_i) ** 3


def draw_flags(randers: RandersStructure, n: int, seed: int) -> List[Flag]:
    """n flags from pairs of standard-normal vectors, drawn in order"""
    if n < 1:
        raise UsageError(f"sample count must be at least 1, got {n}")

    rng = np.random.default_rng(seed)
    flags = []
    for index in range(n):
        for attempt in range(MAX_RESAMPLES):
            y_raw = rng.standard_normal(randers.dim)
            u_raw = rng.standard_normal(randers.dim)
            try:
                flags.append(make_flag(y_raw, u_raw, randers.metric, randers.split))
                break
            except DegeneracyError:
                log("scan", f"sample {index}: degenerate draw, resampling (attempt {attempt + 1})", "WARNING")
        else:
            raise NumericalFailure(f"sample {index}: no usable flag after {MAX_RESAMPLES} draws")
    return flags


async def map_flags_async(fn: Callable[[Flag], Any], flags: Sequence[Flag], workers: int = DEFAULT_WORKERS,
                          label: str = "flags") -> List[Any]:
    """Evaluates fn on every flag in a thread pool; results keep the input order"""
    loop = asyncio.get_running_loop()
    semaphore = asyncio.Semaphore(max(1, workers))
    done = 0

    async def evaluate(pool, flag):
        nonlocal done
        async with semaphore:
            result = await loop.run_in_executor(pool, fn, flag)
        done += 1
        print_status_line(f"[{label}] {done}/{len(flags)}")
        return result

    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        results = await asyncio.gather(*(evaluate(pool, flag) for flag in flags))
    clear_status_line()
    return list(results)


@dataclass
class ScanStatistics:
    count: int
    seed: int
    minimum: float
    maximum: float
    mean: float
    histogram: List[int]
    edges: List[float]
    worst_discrepancy: float

    def as_dict(self) -> Dict[str, Any]:
        return {
            'count': self.count,
            'seed': self.seed,
            'min': self.minimum,
            'max': self.maximum,
            'mean': self.mean,
            'worst_discrepancy': self.worst_discrepancy,
            'histogram': self.histogram,
            'edges': self.edges,
        }


def _scan_one(randers: RandersStructure):
    def evaluate(flag: Flag) -> Tuple[float, float]:
        report = flag_curvature_printed(flag, randers)
        return report.k_oracle, report.discrepancy
    return evaluate


def _prime(randers: RandersStructure) -> None:
    # cached tensors are built once before the workers share them
    _require_berwald(randers)
    randers.curvature
    pin_slot_mapping()


def _reduce_scan(results: Sequence[Tuple[float, float]], seed: int, tol: float) -> ScanStatistics:
    values = np.array([k for k, _ in results], dtype=float)
    discrepancies = np.array([d for _, d in results], dtype=float)
    lo, hi = float(values.min()), float(values.max())
    # constant up to rounding: fixed-width bins around lo
    flat = hi - lo <= max(tol, 1e-12 * max(1.0, abs(lo)))
    span = (lo - 0.5, lo + 0.5) if flat else (lo, hi)
    counts, edges = np.histogram(values, bins=HISTOGRAM_BINS, range=span)

    return ScanStatistics(
        count=int(values.size),
        seed=seed,
        minimum=lo,
        maximum=hi,
        mean=float(np.mean(values)),
        histogram=[int(v) for v in counts],
        edges=[float(v) for v in edges],
        worst_discrepancy=float(np.max(discrepancies)),
    )


def scan_flags(randers: RandersStructure, n: int, seed: int) -> ScanStatistics:
    _prime(randers)
    flags = draw_flags(randers, n, seed)
    return _reduce_scan([_scan_one(randers)(flag) for flag in flags], seed, randers.tolerances.formula)


async def scan_flags_async(randers: RandersStructure, n: int, seed: int,
                           workers: int = DEFAULT_WORKERS) -> ScanStatistics:
    _prime(randers)
    flags = draw_flags(randers, n, seed)
    results = await map_flags_async(_scan_one(randers), flags, workers, label="scan")
    return _reduce_scan(results, seed, randers.tolerances.formula)


@dataclass
class FormulaDiscrepancy:
    name: str
    max: Optional[float]
    mean: Optional[float]
    count: int
    note: str = ""

    def as_dict(self) -> Dict[str, Any]:
        return {'formula': self.name, 'max': self.max, 'mean': self.mean, 'count': self.count, 'note': self.note}


@dataclass
class FormulaComparison:
    seed: int
    samples: int
    rows: List[FormulaDiscrepancy] = field(default_factory=list)

    def row(self, name: str) -> FormulaDiscrepancy:
        for row in self.rows:
            if row.name == name:
                return row
        raise KeyError(name)


def _comparison_one(randers: RandersStructure, biinvariant: bool, puttmann: bool):
    sign = pin_slot_mapping().sign
    alg, metric, split = randers.algebra, randers.metric, randers.split

    def evaluate(flag: Flag) -> Dict[str, float]:
        report = flag_curvature_printed(flag, randers)
        out = {
            'general_printed': report.discrepancy,
            'general_corrected': abs(report.k_corrected - report.k_oracle),
            'general_statement': abs(report.k_printed_statement - report.k_oracle),
            'general_denominator_variant': abs(report.k_denominator_variant - report.k_oracle),
            'determinant_printed': abs(report.det_printed - report.det_direct),
            'determinant_expanded': abs(report.det_expanded - report.det_direct),
            'gamma_vs_sectional': abs(report.gamma - randers.curvature.sectional(flag.y, flag.u)),
            'theta': abs(report.theta),
        }
        if biinvariant:
            printed, corrected = flag_curvature_biinvariant(flag, randers)
            out['biinvariant_printed'] = abs(printed - report.k_oracle)
            out['biinvariant_corrected'] = abs(corrected - report.k_oracle)
        if puttmann:
            y, u = flag.y, flag.u
            printed = puttmann_printed(u, y, u, y, alg, metric, split, warn=False)
            out['puttmann_mapped'] = abs(printed - sign * randers.curvature.component(u, y, u, y))
        return out

    return evaluate


def _basis_rows(randers: RandersStructure) -> List[FormulaDiscrepancy]:
    if randers.split is not None and not randers.split.is_trivial:
        note = "skipped: nontrivial isotropy"
        return [FormulaDiscrepancy('basis_printed', None, None, 0, note),
                FormulaDiscrepancy('basis_corrected', None, None, 0, note)]

    basis = orthonormal_basis(randers)
    printed_gaps, corrected_gaps = [], []
    for i in range(randers.dim):
        for j in range(randers.dim):
            if i == j:
                continue
            oracle = flag_curvature_oracle(Flag(basis[i], basis[j]), randers)
            printed, corrected = flag_curvature_basis(i, j, randers, basis)
            printed_gaps.append(abs(printed - oracle))
            corrected_gaps.append(abs(corrected - oracle))

    if not printed_gaps:
        return []
    return [
        FormulaDiscrepancy('basis_printed', float(np.max(printed_gaps)), float(np.mean(printed_gaps)), len(printed_gaps)),
        FormulaDiscrepancy('basis_corrected', float(np.max(corrected_gaps)), float(np.mean(corrected_gaps)), len(corrected_gaps)),
    ]


def _comparison_setup(randers: RandersStructure) -> Tuple[bool, bool]:
    _prime(randers)
    tol = randers.tolerances.structural
    bi_invariant_g0 = bi_invariance_defect(randers.algebra, randers.metric.g0) <= tol
    group = randers.split is None or randers.split.is_trivial
    biinvariant = group and bi_invariant_g0 and randers.metric.is_phi_identity(tol)
    if not bi_invariant_g0:
        log("compare", "g0 is not bi-invariant; Puttmann's formula is not compared", "WARNING")
    return biinvariant, bi_invariant_g0


def _reduce_comparison(results: Sequence[Dict[str, float]], randers: RandersStructure,
                       n: int, seed: int, biinvariant: bool, puttmann: bool) -> FormulaComparison:
    comparison = FormulaComparison(seed=seed, samples=n)
    for name in results[0]:
        gaps = np.array([result[name] for result in results], dtype=float)
        comparison.rows.append(FormulaDiscrepancy(name, float(np.max(gaps)), float(np.mean(gaps)), int(gaps.size)))

    if not biinvariant:
        if randers.split is not None and not randers.split.is_trivial:
            note = "skipped: nontrivial isotropy"
        else:
            note = "skipped: needs phi = id and a bi-invariant g0"
        comparison.rows.append(FormulaDiscrepancy('biinvariant_printed', None, None, 0, note))
        comparison.rows.append(FormulaDiscrepancy('biinvariant_corrected', None, None, 0, note))
    if not puttmann:
        comparison.rows.append(FormulaDiscrepancy('puttmann_mapped', None, None, 0, "skipped: g0 not bi-invariant"))

    comparison.rows.extend(_basis_rows(randers))
    gap = comparison.row('determinant_printed').max
    if gap is not None and gap > randers.tolerances.formula:
        log("compare", f"printed flag determinant differs from g_Y by up to {gap:.6g}", "WARNING")
    return comparison


def compare_formulas(randers: RandersStructure, n: int, seed: int) -> FormulaComparison:
    biinvariant, puttmann = _comparison_setup(randers)
    flags = draw_flags(randers, n, seed)
    evaluate = _comparison_one(randers, biinvariant, puttmann)
    return _reduce_comparison([evaluate(flag) for flag in flags], randers, n, seed, biinvariant, puttmann)


async def compare_formulas_async(randers: RandersStructure, n: int, seed: int,
                                 workers: int = DEFAULT_WORKERS) -> FormulaComparison:
    biinvariant, puttmann = _comparison_setup(randers)
    flags = draw_flags(randers, n, seed)
    evaluate = _comparison_one(randers, biinvariant, puttmann)
    results = await map_flags_async(evaluate, flags, workers, label="compare")
    return _reduce_comparison(results, randers, n, seed, biinvariant, puttmann)
