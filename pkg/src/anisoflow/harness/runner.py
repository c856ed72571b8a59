"""Build, run and record one configured flow."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import yaml

from ..curves import counterexample_curve, generate, sample_wulff
from ..flow import C_MIN
from ..stepper import EvolveOptions, StepConfig, evolve
from .config import FlowConfig
from .diagnostics import detect_crossing
from .emit import emit, write_atomic

log = logging.getLogger(__name__)

REFERENCE_POINTS = 720


def initial_curve(cfg: FlowConfig):
    """Initial polygon, the reference polygon (or None) and excluded edge pairs."""
    spec = cfg.curve
    if spec.kind == "counterexample":
        from ..anisotropy import from_config

        sigma = from_config(spec.params["sigma"], "curve.sigma")
        curve, ref = counterexample_curve(
            sigma, spec.params.get("r", 1.5), spec.params.get("blend", 0.15), spec.N
        )
        return curve, ref, curve.meta.get("coincident_edges", [])
    curve = generate(spec)
    ref = None
    if cfg.reference:
        ref = sample_wulff(cfg.build_sigma(), REFERENCE_POINTS)
    return curve, ref, []


def step_config(cfg: FlowConfig):
    return StepConfig(
        lam=cfg.lam,
        omega=cfg.omega,
        c_min=cfg.c_min if cfg.c_min is not None else C_MIN,
        R_min=cfg.R_min,
        max_tau=cfg.max_tau,
        cfl=cfg.cfl,
    )


def run(cfg: FlowConfig, output_dir=None):
    """Run ``cfg``; write outputs when an output directory is configured.

    Returns the RunRecord.  Runtime failures do not raise: the partial record
    carries ``status='error'`` and the failing step index, and is still
    written out.
    """
    sigma = cfg.build_sigma()
    curve, ref, exclude = initial_curve(cfg)
    options = EvolveOptions(
        T=cfg.T,
        step=step_config(cfg),
        snapshot_dt=cfg.cadence,
        snapshot_every=cfg.snapshot_every,
    )
    log.info("running %s: N=%d T=%g", cfg.name, len(curve), cfg.T)
    rec = evolve(curve, sigma, options)
    rec.meta["name"] = cfg.name
    if cfg.crossing and ref is not None:
        rec.meta["crossing_time"] = detect_crossing(rec, ref, exclude)
    out = output_dir if output_dir is not None else cfg.output_dir
    if out is not None:
        write_outputs(rec, cfg, Path(out), ref if (cfg.reference or cfg.crossing) else None)
    return rec


def summary(rec):
    return {
        "name": rec.meta.get("name"),
        "status": rec.status,
        "error": rec.error,
        "error_step": rec.error_step,
        "steps": rec.steps,
        "rows": len(rec.rows),
        "snapshots": len(rec.snapshots),
        "max_residual": rec.max_residual,
        "min_dominance": rec.min_dominance if rec.rows else None,
        "crossing_time": rec.meta.get("crossing_time"),
    }


def write_outputs(rec, cfg, out, reference=None):
    paths = []
    if rec.rows or rec.snapshots:
        paths = emit(rec, out, cfg.outputs, reference)
    if reference is not None:
        p = out / "reference.txt"
        write_atomic(p, reference.to_text())
        paths.append(p)
    p = out / "config.yaml"
    write_atomic(p, yaml.safe_dump(cfg.raw, sort_keys=False))
    paths.append(p)
    p = out / "summary.json"
    write_atomic(p, json.dumps(summary(rec), indent=2) + "\n")
    paths.append(p)
    return paths
