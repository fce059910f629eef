"""Simulation and security analysis for quantum-secured single-pixel imaging."""

from .acquisition import (
    CoincidenceTally,
    Mode,
    RunConfig,
    TallySet,
    classical_singles_trace,
    expected_shot_tally,
    run_experiment,
)
from .adversary import AttackSpec, AttackVariant, EveContribution
from .estimators import HadamardSPI, QSSPIAnalyzer, QSSPISimulator
from .optics import Basis, DetectorModel, Polarization, SourceModel
from .patterns import PatternMask, hadamard_matrix, pattern_sequence
from .reconstruction import render_8bit, spi_reconstruct, split_reconstructions, trustworthy_image
from .scene import SceneProfile, builtin_glyph
from .security import SecurityReport, Verdict, analyze

__version__ = "0.1.0"

__all__ = [
    "AttackSpec",
    "AttackVariant",
    "Basis",
    "CoincidenceTally",
    "DetectorModel",
    "EveContribution",
    "HadamardSPI",
    "Mode",
    "PatternMask",
    "Polarization",
    "QSSPIAnalyzer",
    "QSSPISimulator",
    "RunConfig",
    "SceneProfile",
    "SecurityReport",
    "SourceModel",
    "TallySet",
    "Verdict",
    "analyze",
    "builtin_glyph",
    "classical_singles_trace",
    "expected_shot_tally",
    "hadamard_matrix",
    "pattern_sequence",
    "render_8bit",
    "run_experiment",
    "spi_reconstruct",
    "split_reconstructions",
    "trustworthy_image",
]
