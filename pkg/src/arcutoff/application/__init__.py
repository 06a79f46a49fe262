"""Application layer - Use case handlers, one per command."""

from .alpha_handler import AlphaHandler
from .base import CommandResult
from .bounds_handler import TVBoundsHandler
from .curve_handler import TVCurveHandler
from .profile_handler import ProfileHandler
from .simulate_handler import SimulateHandler
from .verify_handler import VerifyHandler

__all__ = [
    'AlphaHandler',
    'CommandResult',
    'TVBoundsHandler',
    'TVCurveHandler',
    'ProfileHandler',
    'SimulateHandler',
    'VerifyHandler',
]
