"""Rotated surface code teleportation workbench."""

from .analysis import SweepSpec, SweepTable, fss_fit, run_sweep
from .clifford import CliffordCircuit, PauliString, Tableau, build_prep_unitary, simulate
from .decoders import decode_bitstrings, get_decoder
from .lattice import CodeLayout, build_layout
from .noise import effective_entangling, rng_stream, syndrome_flip_rate
from .oracle_sv import LogicalTarget, TeleportConfig

__version__ = "0.1.0"

__all__ = [
    "CliffordCircuit", "CodeLayout", "LogicalTarget", "PauliString", "SweepSpec", "SweepTable",
    "Tableau", "TeleportConfig", "build_layout", "build_prep_unitary", "decode_bitstrings",
    "effective_entangling", "fss_fit", "get_decoder", "rng_stream", "run_sweep", "simulate",
    "syndrome_flip_rate",
]
