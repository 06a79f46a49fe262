"""Domain entities."""

from .network import Network, random_network
from .noise import NoiseKind, NoiseSpec
from .params import ModelParams
from .state import SphereState, StateVec
from .gaussian import Gaussian2
from .reports import (
    AlphaEstimate,
    BallLowerBound,
    ConcentrationReport,
    ContractionReport,
    CouplingUpperBound,
    CurvePoint,
    CutoffProfile,
    ExhaustiveRatioReport,
    MomentComparison,
    ProfileRow,
    RatioBoundReport,
    SelfTestReport,
    StationaryBatch,
    StationarySample,
    TailRow,
    Trajectory,
    TVBracket,
    TVCurve,
    TVEstimate,
)

__all__ = [
    'Network',
    'random_network',
    'NoiseKind',
    'NoiseSpec',
    'ModelParams',
    'SphereState',
    'StateVec',
    'Gaussian2',
    'AlphaEstimate',
    'BallLowerBound',
    'ConcentrationReport',
    'ContractionReport',
    'CouplingUpperBound',
    'CurvePoint',
    'CutoffProfile',
    'ExhaustiveRatioReport',
    'MomentComparison',
    'ProfileRow',
    'RatioBoundReport',
    'SelfTestReport',
    'StationaryBatch',
    'StationarySample',
    'TailRow',
    'Trajectory',
    'TVBracket',
    'TVCurve',
    'TVEstimate',
]
