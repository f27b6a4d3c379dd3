"""Exact simulation of how a local measurement on one site of a spin chain
becomes detectable at the other sites.

The pipeline is: build a Hamiltonian (:mod:`.models`), run the
measure-and-evolve protocol (:mod:`.protocol`), compare the trajectories
site by site (:mod:`.detectors`), then extract waiting times and signal
speeds (:mod:`.analysis`). Independent reference solvers live in
:mod:`.oracles`.
"""

from .analysis import fit_speed, onset_simultaneity, sweep, waiting_time, waiting_times
from .detectors import DetectorTrace, detector_trace
from .models import ModelError, ModelSpec, build
from .protocol import InvariantViolation, ProtocolError, ProtocolSpec, run_protocol
from .states import BranchEnsemble, MeasurementAxis, PureState, QubitReducedDM

__version__ = "0.1.0"

__all__ = [
    "BranchEnsemble",
    "DetectorTrace",
    "InvariantViolation",
    "MeasurementAxis",
    "ModelError",
    "ModelSpec",
    "ProtocolError",
    "ProtocolSpec",
    "PureState",
    "QubitReducedDM",
    "build",
    "detector_trace",
    "fit_speed",
    "onset_simultaneity",
    "run_protocol",
    "sweep",
    "waiting_time",
    "waiting_times",
]
