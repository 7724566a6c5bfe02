"""Infinite-system DMRG for the dimerized Heisenberg chain with
wave-function prediction between growth steps."""
from .config import RunConfig, load_config
from .engine import InfiniteDMRG, StepRecord, idmrg_run
from .kernels import BACKEND
from .model import ModelSpec

__version__ = "0.1.0"

__all__ = ["BACKEND", "InfiniteDMRG", "ModelSpec", "RunConfig", "StepRecord",
           "idmrg_run", "load_config", "__version__"]
