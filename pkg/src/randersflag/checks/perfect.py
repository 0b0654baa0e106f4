from randersflag.algebra import derived_span
from randersflag.classify import is_perfect, parallel_space

from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult


class PerfectCheck(BaseCheck):
    """[g,g] = g, which leaves no room for a nonzero parallel drift"""

    def get_metadata(self) -> CheckMetadata:
        return CheckMetadata(
            name="perfect",
            description="Perfect algebra test, together with the dimension of the parallel space",
            category="algebra"
        )

    async def run(self, context: CheckContext) -> CheckResult:
        problem = context.problem
        tol = context.tolerances.rank
        perfect = is_perfect(problem.algebra, tol)
        space = parallel_space(problem.algebra, problem.metric, problem.split, tol)

        if perfect and space.shape[0]:
            self.log("perfect algebra with a nonzero parallel field", "WARNING")

        data = {
            'is_perfect': perfect,
            'derived_rank': int(derived_span(problem.algebra, tol).shape[0]),
            'dim': problem.dim,
            'parallel_dim': int(space.shape[0]),
        }
        return CheckResult(data, perfect, tol)
