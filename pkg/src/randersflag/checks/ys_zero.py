from randersflag.classify import ys_zero_check

from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult


class YSZeroCheck(BaseCheck):
    """beta = 0 and zero flag curvature, i.e. locally Minkowskian"""

    def get_metadata(self) -> CheckMetadata:
        return CheckMetadata(
            name="ys-zero",
            description="beta = 0 and a flat underlying metric",
            category="yasuda-shimada"
        )

    async def run(self, context: CheckContext) -> CheckResult:
        report = ys_zero_check(context.randers)
        return CheckResult(report.as_dict(), report.verdict, report.tolerance)
