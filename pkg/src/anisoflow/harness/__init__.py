"""Configuration, runs, diagnostics and output files."""

from .config import FlowConfig, apply_overrides, from_mapping, load, preset, preset_names
from .diagnostics import check_series, detect_crossing, hausdorff_drift, proper_intersections
from .emit import csv_text, emit, read_csv, svg_text
from .runner import run

__all__ = [
    "FlowConfig", "apply_overrides", "from_mapping", "load", "preset", "preset_names",
    "check_series", "detect_crossing", "hausdorff_drift", "proper_intersections",
    "csv_text", "emit", "read_csv", "svg_text", "run",
]
