from dataclasses import dataclass, fields, replace, asdict
from typing import Any, Dict, Mapping

from randersflag.errors import InputError


@dataclass(frozen=True)
class Tolerances:
    """Every threshold used by the library, in one place"""

    structural: float = 1e-12
    formula: float = 1e-10
    fd: float = 1e-6
    fd_step: float = 1e-4
    jacobi: float = 1e-10
    rank: float = 1e-9
    positive_definite: float = 1e-10
    predicate: float = 1e-9
    constancy: float = 1e-8
    degeneracy: float = 1e-12

    @classmethod
    def names(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def updated(self, overrides: Mapping[str, Any]) -> "Tolerances":
        unknown = sorted(set(overrides) - set(self.names()))
        if unknown:
            raise InputError(f"Unknown tolerance key(s): {', '.join(unknown)}")

        values = {}
        for key, raw in overrides.items():
            try:
                value = float(raw)
            except (TypeError, ValueError):
                raise InputError(f"Tolerance '{key}' must be a number, got {raw!r}")
            if not value > 0:
                raise InputError(f"Tolerance '{key}' must be positive, got {value}")
            values[key] = value

        return replace(self, **values)

    def as_dict(self) -> Dict[str, float]:
        return asdict(self)


def parse_overrides(text: str) -> Dict[str, str]:
    """Parses 'key1=val1;key2=val2' into a dict"""
    if not text:
        return {}
    try:
        return {
            key.strip(): value.strip()
            for key, value in (item.split('=', 1) for item in text.split(';') if item.strip())
        }
    except ValueError:
        raise InputError("Invalid tolerance format. Use 'key1=value1;key2=value2'.")


DEFAULT_TOLERANCES = Tolerances()
