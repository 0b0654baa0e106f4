from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from randersflag.config import Tolerances
from randersflag.errors import UsageError
from randersflag.problem import Problem
from randersflag.randers import RandersStructure
from randersflag.ui import log


@dataclass
class CheckContext:
    """Context shared with every check of a run"""

    problem: Problem
    tolerances: Tolerances

    # Parsed command-line options
    k: Optional[float] = None
    x: Optional[List[float]] = None
    samples: int = 256
    seed: int = 0

    @property
    def randers(self) -> RandersStructure:
        return self.problem.randers

    def require_k(self, name: str) -> float:
        if self.k is None:
            raise UsageError(f"the '{name}' check needs --k")
        return self.k


@dataclass
class CheckResult:
    data: Dict[str, Any]
    verdict: Optional[bool]
    tolerance: Optional[float]
    lines: List[str] = field(default_factory=list)


class CheckMetadata:
    """Check metadata"""

    def __init__(
        self,
        name: str,
        description: str,
        needs_k: bool = False,
        category: str = "general"
    ):
        self.name = name
        self.description = description
        self.needs_k = needs_k
        self.category = category


class BaseCheck(ABC):
    """Base abstract class for all predicate checks"""

    def __init__(self):
        self.metadata: Optional[CheckMetadata] = None

    @abstractmethod
    def get_metadata(self) -> CheckMetadata:
        pass

    @abstractmethod
    async def run(self, context: CheckContext) -> CheckResult:
        """
        Evaluates the predicate on the loaded problem

        Raises RandersFlagError subclasses when the predicate does not apply;
        a failing predicate is a result, not an error.
        """
        pass

    def log(self, message: str, level: str = "INFO") -> None:
        log(self.metadata.name if self.metadata else "check", message, level)
