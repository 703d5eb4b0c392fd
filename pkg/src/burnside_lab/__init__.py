"""Exact and Monte Carlo experiments on Burnside-type presentations of free groups."""

__version__ = "0.1.0"

from .words import Alphabet, format_word, parse_word
from .codes import decode, encode_min, cln
from .presentations import ParameterSystem, Presentation, build_presentation, classify_torsion, ball_census
from .walks import StepDistribution, sample_walk_torsion, kesten_radius

__all__ = [
    "__version__",
    "Alphabet",
    "format_word",
    "parse_word",
    "decode",
    "encode_min",
    "cln",
    "ParameterSystem",
    "Presentation",
    "build_presentation",
    "classify_torsion",
    "ball_census",
    "StepDistribution",
    "sample_walk_torsion",
    "kesten_radius",
]
