from randersflag.classify import constant_curvature_probe

from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult


class ConstantCurvatureCheck(BaseCheck):
    """Samples flag curvatures and reports whether they agree"""

    def get_metadata(self) -> CheckMetadata:
        return CheckMetadata(
            name="constant",
            description="Constant flag curvature probe over seeded random flags",
            category="curvature"
        )

    async def run(self, context: CheckContext) -> CheckResult:
        report = constant_curvature_probe(context.randers, context.samples, context.seed)
        return CheckResult(report.as_dict(), report.is_constant, report.tolerance)
