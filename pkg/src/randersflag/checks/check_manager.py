import importlib.util
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from randersflag.errors import UsageError

from .base import BaseCheck, CheckContext, CheckResult

INTERNAL_FILES = ('__init__.py', 'base.py', 'check_manager.py')


class CheckManager:
    """Discovers and runs the predicate checks shipped in this package"""

    def __init__(self, checks_dir: Path = None):
        self.checks_dir = Path(__file__).parent if checks_dir is None else Path(checks_dir)
        self.available_checks: Dict[str, BaseCheck] = {}

    def discover_checks(self) -> List[str]:
        if not self.checks_dir.exists():
            return []
        return sorted(file.stem for file in self.checks_dir.glob("*.py") if file.name not in INTERNAL_FILES)

    def load_check(self, file_stem: str) -> Optional[BaseCheck]:
        check_file = self.checks_dir / f"{file_stem}.py"
        if not check_file.exists():
            return None

        # registered under randersflag.checks so relative imports resolve
        full_name = f"randersflag.checks.{file_stem}"
        spec = importlib.util.spec_from_file_location(full_name, check_file, submodule_search_locations=[])
        if not (spec and spec.loader):
            return None

        module = importlib.util.module_from_spec(spec)
        module.__package__ = "randersflag.checks"
        sys.modules[full_name] = module
        spec.loader.exec_module(module)

        for item_name in dir(module):
            item = getattr(module, item_name)
            if isinstance(item, type) and issubclass(item, BaseCheck) and item is not BaseCheck:
                instance = item()
                instance.metadata = instance.get_metadata()
                self.available_checks[instance.metadata.name] = instance
                return instance
        return None

    def load_all_checks(self) -> int:
        return sum(1 for stem in self.discover_checks() if self.load_check(stem))

    def list_checks(self) -> List[Dict[str, Any]]:
        return [
            {
                'name': name,
                'description': check.metadata.description,
                'category': check.metadata.category,
                'needs_k': check.metadata.needs_k,
            }
            for name, check in sorted(self.available_checks.items())
        ]

    async def run_check(self, name: str, context: CheckContext) -> CheckResult:
        if name not in self.available_checks:
            known = ', '.join(sorted(self.available_checks))
            raise UsageError(f"unknown check '{name}' (available: {known})")
        return await self.available_checks[name].run(context)
