from randersflag.classify import ys_negative_check

from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult


class YSNegativeCheck(BaseCheck):
    """Yasuda-Shimada conditions for constant flag curvature K < 0"""

    def get_metadata(self) -> CheckMetadata:
        return CheckMetadata(
            name="ys-negative",
            description="Closed drift, b_{i|k} = sigma/2 (g_ik - b_i b_k) with sigma^2 = -16K, curvature 4K",
            needs_k=True,
            category="yasuda-shimada"
        )

    async def run(self, context: CheckContext) -> CheckResult:
        report = ys_negative_check(context.randers, context.require_k("ys-negative"))
        if report.first_failure:
            self.log(f"first failing condition: {report.first_failure}", "INFO")
        return CheckResult(report.as_dict(), report.verdict, report.tolerance)
