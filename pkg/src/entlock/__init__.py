"""Numerical toolkit for entropic uncertainty, monogamy and locking of quantum correlations."""
from .channels import KrausChannel, apply, apply_to_factor, choi_state, random_channel
from .entropy import (
    conditional_mutual_information,
    holevo_chi,
    mutual_information,
    relative_entropy,
    subsystem_entropy,
)
from .errors import EntlockError
from .measures import (
    accessible_information,
    entanglement_of_purification,
    squashed_upper_bound,
)
from .optimize import OptConfig, OptReport
from .states import DensityOperator, Ensemble, PureState, flower_state, omega_state

__version__ = "0.1.0"
