"""Quasi-constant curvature spacetimes: jets, curvature, QC detection, fluids, F(R) scans."""

from .curvature import CurvatureBundle, curvature_at
from .diagnostics import DiagnosticsReport, diagnose, generator_checks
from .estimators import ECScanner, QCAnalyzer
from .exceptions import InputError, QCSTError
from .fluid import Era, FluidState, classify_era, fluid_from_qc
from .frg import FRModel, effective_from_qc, model_a, pure_gr, scan_grid
from .jet import Jet3
from .metric import MetricSpec, builtin, eval_metric, load_metric
from .qc import QCReport, detect_qc

__version__ = "0.1.0"

__all__ = [
    "CurvatureBundle", "DiagnosticsReport", "ECScanner", "Era", "FRModel", "FluidState",
    "InputError", "Jet3", "MetricSpec", "QCAnalyzer", "QCReport", "QCSTError",
    "builtin", "classify_era", "curvature_at", "detect_qc", "diagnose",
    "effective_from_qc", "eval_metric", "fluid_from_qc", "generator_checks", "load_metric",
    "model_a", "pure_gr", "scan_grid",
]
