from .checkpoint import load_mps, model_fingerprint, save_mps
from .dmrg import dmrg_ground_state
from .model import ChainGeometry, ImpurityChainModel
from .scatter import (
    WavepacketSpec,
    evolve,
    extract_scattering,
    inject_wavepacket,
)
from .state import MPS, split_truncate_theta
from .tebd import EvolutionConfig

__all__ = [
    "MPS",
    "ChainGeometry",
    "EvolutionConfig",
    "ImpurityChainModel",
    "WavepacketSpec",
    "dmrg_ground_state",
    "evolve",
    "extract_scattering",
    "inject_wavepacket",
    "load_mps",
    "model_fingerprint",
    "save_mps",
    "split_truncate_theta",
]
