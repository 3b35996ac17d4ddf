"""Spectral registration of 2D radar scans."""

from ._fs2d import (
    Error,
    GeometryError,
    InputError,
    NoStructureError,
    PolarScan,
    dft2,
    expected_discretization_error,
    load_scan,
    pair_errors,
    phase_correlate,
    register_scans,
    run_odometry,
    save_scan,
    synth_scene,
)

__all__ = [
    "Error",
    "GeometryError",
    "InputError",
    "NoStructureError",
    "PolarScan",
    "dft2",
    "expected_discretization_error",
    "load_scan",
    "pair_errors",
    "phase_correlate",
    "register_scans",
    "run_odometry",
    "save_scan",
    "synth_scene",
]
