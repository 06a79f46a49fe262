"""Value objects - Immutable domain values."""

from .scan import ScanMode, ScanPolicy
from .truncation import TruncationPolicy
from .schedule import CutoffSchedule

__all__ = [
    'ScanMode',
    'ScanPolicy',
    'TruncationPolicy',
    'CutoffSchedule',
]
