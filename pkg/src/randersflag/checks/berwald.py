"""
Berwald Check
Parallel drift test with the consequences every parallel drift must satisfy
"""

from randersflag.classify import berwald_report, parallel_space

from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult


class BerwaldCheck(BaseCheck):
    """Is the drift parallel, i.e. is F of Berwald type"""

    def get_metadata(self) -> CheckMetadata:
        return CheckMetadata(
            name="berwald",
            description="Parallel drift (Berwald type), ad(X) skewness and <X,[g,g]> = 0",
            category="connection"
        )

    async def run(self, context: CheckContext) -> CheckResult:
        randers = context.randers
        report = berwald_report(randers)
        space = parallel_space(randers.algebra, randers.metric, randers.split, context.tolerances.rank)

        data = report.as_dict()
        data['parallel_space'] = [[float(v) for v in row] for row in space]

        if report.is_berwald and not report.is_riemannian:
            self.log("non-Riemannian Randers metric of Berwald type", "INFO")
        elif report.is_riemannian:
            self.log("drift is zero, F is Riemannian", "INFO")

        return CheckResult(data, report.is_berwald and report.implications_hold, report.tolerance)
