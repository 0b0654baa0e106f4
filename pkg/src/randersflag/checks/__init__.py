from .base import BaseCheck, CheckContext, CheckMetadata, CheckResult
from .check_manager import CheckManager

__all__ = ['BaseCheck', 'CheckContext', 'CheckMetadata', 'CheckResult', 'CheckManager']
