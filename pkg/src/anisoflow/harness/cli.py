"""Command line entry point: run, preset, verify, constants."""

from __future__ import annotations

import argparse
import logging
import sys

import yaml

from ..anisotropy import energy_of_wulff, from_config, mixed_constant, wulff_area
from ..errors import FlowError
from ..record import COLUMNS
from . import config as config_mod
from .diagnostics import check_series
from .emit import read_csv
from .runner import run


def _parse_sigma(text):
    """Anisotropy from 'cosine:EPS:M', 'constant[:C]' or an inline YAML mapping."""
    text = text.strip()
    if text.startswith("{"):
        return from_config(yaml.safe_load(text))
    parts = text.split(":")
    if parts[0] == "constant":
        return from_config({"kind": "constant", "c": float(parts[1]) if len(parts) > 1 else 1.0})
    if parts[0] == "cosine" and len(parts) == 3:
        return from_config({"kind": "cosine", "eps": float(parts[1]), "m": int(parts[2])})
    raise argparse.ArgumentTypeError(f"cannot parse anisotropy {text!r}")


def _report(rec, out):
    print(f"status: {rec.status}  steps: {rec.steps}  rows: {len(rec.rows)}  "
          f"snapshots: {len(rec.snapshots)}")
    if rec.error:
        print(f"error at step {rec.error_step}: {rec.error}")
    if "crossing_time" in rec.meta:
        ct = rec.meta["crossing_time"]
        print("crossing: none" if ct is None else f"crossing at t = {ct:.6g}")
    if out is not None:
        print(f"outputs in {out}")
    return 0 if rec.ok else 1


def cmd_run(args):
    cfg = config_mod.load(args.config, args.override)
    out = args.out if args.out is not None else cfg.output_dir
    return _report(run(cfg, out), out)


def cmd_preset(args):
    if args.list:
        print("\n".join(config_mod.preset_names()))
        return 0
    if not args.name:
        print("preset name required (or --list)", file=sys.stderr)
        return 2
    cfg = config_mod.preset(args.name, args.override)
    out = args.out if args.out is not None else (cfg.output_dir or f"out/{args.name}")
    return _report(run(cfg, out), out)


def cmd_verify(args):
    header, data = read_csv(args.record)
    if header != COLUMNS:
        print(f"unexpected header: {', '.join(header)}", file=sys.stderr)
        return 1
    ok = True
    for name, passed, detail in check_series(data, isotropic=args.isotropic, convex=args.convex):
        ok &= passed
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
    return 0 if ok else 1


def cmd_constants(args):
    s, m = args.sigma, args.mu
    Ws, Wm = wulff_area(s), wulff_area(m)
    print(f"|W_sigma|          = {Ws:.17g}")
    print(f"|W_mu|             = {Wm:.17g}")
    print(f"L_sigma(dW_mu)     = {energy_of_wulff(s, m):.17g}")
    print(f"L_mu(dW_sigma)     = {energy_of_wulff(m, s):.17g}")
    print(f"K_sigma,mu         = {mixed_constant(s, m):.17g}")
    return 0


def build_parser():
    p = argparse.ArgumentParser(prog="anisoflow", description=__doc__)
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="run a YAML configuration")
    r.add_argument("config")
    r.add_argument("--out", help="output directory (overrides output_dir)")
    r.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    r.set_defaults(func=cmd_run)

    pr = sub.add_parser("preset", help="run a shipped preset")
    pr.add_argument("name", nargs="?")
    pr.add_argument("--out")
    pr.add_argument("--override", action="append", default=[], metavar="KEY=VALUE")
    pr.add_argument("--list", action="store_true", help="list preset names")
    pr.set_defaults(func=cmd_preset)

    v = sub.add_parser("verify", help="re-check invariants of a series CSV")
    v.add_argument("record")
    v.add_argument("--isotropic", action="store_true", help="also check A and L monotonicity")
    v.add_argument("--convex", action="store_true", help="also check min phi > -1e-6")
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("constants", help="print Wulff areas, energies and K")
    c.add_argument("--sigma", type=_parse_sigma, required=True)
    c.add_argument("--mu", type=_parse_sigma, default=_parse_sigma("constant"))
    c.set_defaults(func=cmd_constants)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except FlowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
