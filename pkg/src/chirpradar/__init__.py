"""Delay-Doppler channel estimation over Z_N with chirp sequences.

Incidence and cross detectors, a pseudo-random matched-filter baseline, fast
ambiguity-function restrictions to lines, and a Monte Carlo harness.
"""

from .ambiguity import (
    AmbiguityLineProfile,
    ambiguity_entry,
    ambiguity_full,
    ambiguity_on_line,
    heisenberg_apply,
)
from .channel import ChannelSpec, Target, apply_channel, is_generic, is_perfect, noiseless_channel
from .detect import (
    DetectionReport,
    Method,
    Thresholds,
    detect_cross,
    detect_incidence,
    detect_pseudorandom,
    detect_single_transmission,
    noise_floor,
)
from .modarith import Modulus, PlaneLine, PlanePoint, ShiftedLine
from .sequences import ChirpId, Character, chirp, inner, pseudorandom_sequence

__version__ = "0.1.0"
