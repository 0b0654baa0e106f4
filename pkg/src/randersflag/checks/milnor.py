"""
Milnor Check
Sectional curvatures K(x,u) for a drift with skew ad(x): never negative,
zero exactly on the orthogonal complement of [x, g]
"""

from randersflag.classify import milnor_nonneg_check

from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult


class MilnorCheck(BaseCheck):

    def get_metadata(self) -> CheckMetadata:
        return CheckMetadata(
            name="milnor",
            description="K(x,u) >= 0 with equality iff u is orthogonal to [x,g] (x = --x or the drift)",
            category="curvature"
        )

    async def run(self, context: CheckContext) -> CheckResult:
        problem = context.problem
        x = context.x if context.x is not None else problem.randers.drift
        report = milnor_nonneg_check(
            x, problem.algebra, problem.metric,
            samples=context.samples, seed=context.seed, tolerances=context.tolerances, split=problem.split,
        )
        if report.equality_mismatches:
            self.log(f"{report.equality_mismatches} probe(s) break the equality characterization", "WARNING")
        return CheckResult(report.as_dict(), report.passed, report.tolerance)
