"""
Problem files: JSON descriptions of (algebra, g0, phi or metric, drift, subalgebra).
"""

import hashlib
import importlib.resources
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from randersflag.algebra import LieAlgebra, ReductiveSplit, check_reductive, validate
from randersflag.config import DEFAULT_TOLERANCES, Tolerances
from randersflag.errors import DimensionError, InputError, ValidationError
from randersflag.metric import MetricStructure, ad_invariance_defect_h, check_split_compatibility
from randersflag.randers import RandersStructure

FIXTURE_PACKAGE = "randersflag.fixtures"


@dataclass(eq=False)
class Problem:
    name: str
    algebra: LieAlgebra
    metric: MetricStructure
    randers: RandersStructure
    split: Optional[ReductiveSplit] = None
    tolerances: Tolerances = field(default=DEFAULT_TOLERANCES)
    digest: str = ""
    source: str = ""

    @property
    def dim(self) -> int:
        return self.algebra.dim


def fixture_names() -> List[str]:
    root = importlib.resources.files(FIXTURE_PACKAGE)
    return sorted(entry.name[:-5] for entry in root.iterdir() if entry.name.endswith(".json"))


def _read_source(path_or_name: str):
    path = Path(path_or_name)
    if path.is_file():
        return path.read_bytes(), str(path)

    if path_or_name in fixture_names():
        ref = importlib.resources.files(FIXTURE_PACKAGE).joinpath(f"{path_or_name}.json")
        return ref.read_bytes(), f"fixture:{path_or_name}"

    raise InputError(f"No problem file or shipped fixture named '{path_or_name}'")


def load(path_or_name: str, overrides: Optional[Mapping[str, Any]] = None) -> Problem:
    raw, source = _read_source(path_or_name)
    try:
        data = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise InputError(f"{source}: not valid UTF-8 JSON ({e})")

    problem = parse_problem(data, overrides, default_name=Path(path_or_name).stem)
    problem.digest = hashlib.sha256(raw).hexdigest()
    problem.source = source
    return problem


def _matrix(value, dim: int, name: str) -> np.ndarray:
    if value == "identity":
        return np.eye(dim)
    try:
        matrix = np.array(value, dtype=float)
    except (TypeError, ValueError):
        raise InputError(f"'{name}' must be \"identity\" or a {dim} x {dim} matrix")
    if matrix.shape != (dim, dim):
        raise DimensionError(f"'{name}' must be {dim} x {dim}, got shape {matrix.shape}")
    return matrix


def _entries(raw_brackets) -> List:
    if not isinstance(raw_brackets, list):
        raise InputError("'brackets' must be a list of {i, j, terms} objects")

    entries = []
    for position, entry in enumerate(raw_brackets):
        try:
            i, j = int(entry["i"]), int(entry["j"])
            terms = [(int(k), float(c)) for k, c in entry["terms"]]
        except (KeyError, TypeError, ValueError):
            raise InputError(f"bracket entry {position} must look like {{\"i\": 0, \"j\": 1, \"terms\": [[2, 1.0]]}}")
        entries.append((i, j, terms))
    return entries


def parse_problem(data: Mapping[str, Any], overrides: Optional[Mapping[str, Any]] = None,
                  default_name: str = "problem") -> Problem:
    if not isinstance(data, Mapping):
        raise InputError("a problem file must hold a JSON object")
    missing = [key for key in ("dim", "brackets", "drift") if key not in data]
    if missing:
        raise InputError(f"problem file is missing: {', '.join(missing)}")

    tolerances = DEFAULT_TOLERANCES.updated(data.get("tolerances", {}) or {})
    if overrides:
        tolerances = tolerances.updated(overrides)

    try:
        dim = int(data["dim"])
    except (TypeError, ValueError):
        raise InputError("'dim' must be an integer")

    algebra = LieAlgebra.from_brackets(dim, _entries(data["brackets"]), tuple(data.get("basis") or ()))
    report = validate(algebra, tolerances.jacobi)
    if not report.passed:
        raise ValidationError(f"jacobi_defect={report.jacobi_defect:.12g} exceeds {tolerances.jacobi:g}")

    if "phi" in data and "metric" in data:
        raise InputError("'phi' and 'metric' are mutually exclusive")
    g0 = _matrix(data.get("g0", "identity"), dim, "g0")
    if "metric" in data:
        metric = MetricStructure.from_inner(g0, _matrix(data["metric"], dim, "metric"), tolerances.positive_definite)
    else:
        metric = MetricStructure.from_phi(g0, _matrix(data.get("phi", "identity"), dim, "phi"), tolerances.positive_definite)

    split = None
    if data.get("subalgebra"):
        indices = [int(k) for k in data["subalgebra"]]
        if any(not 0 <= k < dim for k in indices):
            raise InputError(f"subalgebra indices must lie in [0, {dim})")
        split = ReductiveSplit.from_subalgebra(np.eye(dim)[indices], g0, indices)
        _validate_split(algebra, metric, split, tolerances)

    try:
        drift = np.array(data["drift"], dtype=float)
    except (TypeError, ValueError):
        raise InputError("'drift' must be a list of numbers")
    randers = RandersStructure(algebra, metric, drift, split, tolerances)

    return Problem(
        name=str(data.get("name") or default_name),
        algebra=algebra,
        metric=metric,
        randers=randers,
        split=split,
        tolerances=tolerances,
    )


def _validate_split(algebra: LieAlgebra, metric: MetricStructure, split: ReductiveSplit, tolerances: Tolerances) -> None:
    tol = tolerances.structural
    reductive = check_reductive(split, algebra, tol)
    for name in ("subalgebra_defect", "orthogonality_defect", "reductivity_defect"):
        value = getattr(reductive, name)
        if value > tol:
            raise ValidationError(f"{name}={value:.3g} exceeds {tol:g}")

    residual = check_split_compatibility(metric, split)
    if residual > tol:
        raise ValidationError(f"phi_h_defect={residual:.3g} exceeds {tol:g}; phi must be the identity on h")

    invariance = ad_invariance_defect_h(algebra, metric, split)
    if invariance > tol:
        raise ValidationError(f"ad_h_invariance_defect={invariance:.3g} exceeds {tol:g}")


def _rows(matrix: np.ndarray) -> List[List[float]]:
    return [[float(v) for v in row] for row in matrix]


def dump_problem(problem: Problem) -> Dict[str, Any]:
    """Serializes a resolved problem back to the problem-file format"""
    c = problem.algebra.structure
    n = problem.dim
    brackets = []
    for i in range(n):
        for j in range(i + 1, n):
            terms = [[k, float(c[i, j, k])] for k in range(n) if c[i, j, k] != 0.0]
            if terms:
                brackets.append({"i": i, "j": j, "terms": terms})

    out: Dict[str, Any] = {
        "name": problem.name,
        "dim": n,
        "basis": list(problem.algebra.basis_names),
        "brackets": brackets,
        "g0": _rows(problem.metric.g0),
    }
    if problem.metric.source == "metric":
        out["metric"] = _rows(problem.metric.inner_matrix)
    else:
        out["phi"] = _rows(problem.metric.phi)
    out["drift"] = [float(v) for v in problem.randers.drift]
    if problem.split is not None and not problem.split.is_trivial:
        out["subalgebra"] = list(problem.split.h_indices)

    defaults = DEFAULT_TOLERANCES.as_dict()
    changed = {k: v for k, v in problem.tolerances.as_dict().items() if v != defaults[k]}
    if changed:
        out["tolerances"] = changed
    return out
