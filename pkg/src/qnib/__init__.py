"""Nonlocality breaking and incompatibility breaking qubit channels."""
from .channels import NoiseVector, QubitChannel, is_cp
from .compat import UnsharpObservable, is_2ibc_unital, jointly_measurable
from .bell import chsh_max, correlation_tensor, seesaw_max
from .states import StateSpec, make_state
from .thresholds import ThresholdReport, analytic_threshold, numeric_threshold

__version__ = "0.1.0"
