from randersflag.classify import ys_positive_check

from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult


class YSPositiveCheck(BaseCheck):
    """Yasuda-Shimada conditions for constant flag curvature K > 0"""

    def get_metadata(self) -> CheckMetadata:
        return CheckMetadata(
            name="ys-positive",
            description="beta = 0, non-parallel Killing drift, curvature identity for K > 0",
            needs_k=True,
            category="yasuda-shimada"
        )

    async def run(self, context: CheckContext) -> CheckResult:
        report = ys_positive_check(context.randers, context.require_k("ys-positive"))
        if report.first_failure:
            self.log(f"first failing condition: {report.first_failure}", "INFO")
        return CheckResult(report.as_dict(), report.verdict, report.tolerance)
