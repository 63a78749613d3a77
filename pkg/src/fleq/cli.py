"""Command-line front end: scatter, zeros, add, remove, nsoliton, evolve,
verify, norms.

Configuration lives in an INI file (sections [grid], [run], [samples],
[region], [tolerances], [soliton.N]); every value can be overridden by a
flag.  All outputs are deterministic for fixed inputs: files carry no
wall-clock content.

Exit codes: 0 success, 1 verification failure, 2 input error.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__, darboux, evolution, scattering, verify
from .errors import FleqError, InputError
from .grid import (
    Grid,
    GridFunction,
    c_constant,
    read_grid_function,
    sobolev_report,
    write_grid_function,
)
from .spectral import SpectralPoint, auto_substeps

DEFAULTS = {
    "grid": {"L": 30.0, "N": 4001},
    "run": {"substeps": 2},
    "samples": {"k_min": 0.1, "k_max": 2.5, "count": 64},
    "region": {"re_min": 0.05, "re_max": 3.0, "im_min": 0.05, "im_max": 3.0},
    "patch": {"t_min": 0.0, "t_max": 0.5, "nt": 9},
}


@dataclass
class RunConfig:
    L: float = 30.0
    N: int = 4001
    substeps: int = 2
    k_min: float = 0.1
    k_max: float = 2.5
    count: int = 64
    region: tuple = (0.05, 3.0, 0.05, 3.0)
    t_min: float = 0.0
    t_max: float = 0.5
    nt: int = 9
    tolerances: dict = field(default_factory=dict)
    solitons: list = field(default_factory=list)  # (k1, gamma) pairs

    def __post_init__(self):
        if self.L <= 0 or self.N < 9:
            raise InputError("invalid grid configuration")
        if any(v <= 0 for v in self.tolerances.values()):
            raise InputError("tolerances must be positive")

    @property
    def grid(self) -> Grid:
        return Grid(self.L, self.N)


def _parse_complex_pair(text: str) -> complex:
    try:
        re_s, im_s = text.split(",")
        return complex(float(re_s), float(im_s))
    except ValueError as exc:
        raise InputError(f"expected RE,IM, got {text!r}") from exc


def load_config(path: str | None) -> RunConfig:
    cfg = RunConfig()
    if path is None:
        return cfg
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise InputError(f"cannot read config file {path}")
    g = parser["grid"] if "grid" in parser else {}
    cfg.L = float(g.get("L", cfg.L))
    cfg.N = int(g.get("N", cfg.N))
    r = parser["run"] if "run" in parser else {}
    cfg.substeps = int(r.get("substeps", cfg.substeps))
    s = parser["samples"] if "samples" in parser else {}
    cfg.k_min = float(s.get("k_min", cfg.k_min))
    cfg.k_max = float(s.get("k_max", cfg.k_max))
    cfg.count = int(s.get("count", cfg.count))
    if "region" in parser:
        rg = parser["region"]
        cfg.region = (
            float(rg.get("re_min", 0.05)),
            float(rg.get("re_max", 3.0)),
            float(rg.get("im_min", 0.05)),
            float(rg.get("im_max", 3.0)),
        )
    if "patch" in parser:
        p = parser["patch"]
        cfg.t_min = float(p.get("t_min", cfg.t_min))
        cfg.t_max = float(p.get("t_max", cfg.t_max))
        cfg.nt = int(p.get("nt", cfg.nt))
    if "tolerances" in parser:
        cfg.tolerances = {k: float(v) for k, v in parser["tolerances"].items()}
    for name in sorted(parser.sections()):
        if name.startswith("soliton"):
            sec = parser[name]
            cfg.solitons.append(
                (_parse_complex_pair(sec["k1"]), _parse_complex_pair(sec["gamma"]))
            )
    cfg.__post_init__()
    return cfg


def _apply_overrides(cfg: RunConfig, args) -> RunConfig:
    if args.grid:
        L_s, N_s = args.grid.split(",")
        cfg.L, cfg.N = float(L_s), int(N_s)
    for item in args.tolerance or []:
        if "=" not in item:
            raise InputError(f"--tolerance expects NAME=VALUE, got {item!r}")
        name, value = item.split("=", 1)
        cfg.tolerances[name.strip()] = float(value)
    cfg.__post_init__()
    return cfg


def _load_potential(args, cfg: RunConfig) -> GridFunction:
    if args.input:
        return read_grid_function(args.input)
    return GridFunction.zero(cfg.grid)


def _sidecar(path, command: str, parameters: dict, invariants: dict) -> None:
    doc = {
        "meta": {"tool": "fleq", "version": __version__, "command": command},
        "parameters": parameters,
        "invariants": invariants,
    }
    with open(str(path) + ".json", "w") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True, default=str)
        fh.write("\n")


def _c_pair(z: complex) -> list:
    return [float(np.real(z)), float(np.imag(z))]


def cmd_scatter(args, cfg: RunConfig) -> int:
    u = _load_potential(args, cfg)
    sub = cfg.substeps
    ks = np.linspace(cfg.k_min, cfg.k_max, cfg.count)
    samples = [scattering.coefficients(u, k, substeps=sub) for k in ks]
    mirrored = [scattering.coefficients(u, -k, substeps=sub) for k in ks]
    det_dev = max(abs(abs(s.a) ** 2 + abs(s.b) ** 2 - 1.0) for s in samples)
    sym_dev = max(
        max(abs(sm.a - s.a), abs(sm.b + s.b)) for s, sm in zip(samples, mirrored)
    )
    c = c_constant(u)
    k_far = 10.0
    a_far, _ = scattering.a_samples(
        u, np.array([k_far]), substeps=auto_substeps(k_far, u.grid.h)
    )
    asym_dev = abs(a_far[0] - np.exp(-1j * c))
    spectrum = scattering.locate_zeros(
        u, region=cfg.region, substeps=sub, with_norming=True
    )
    print(f"det-S deviation      : {det_dev:.3e}")
    print(f"symmetry deviation   : {sym_dev:.3e}")
    print(f"c-asymptote deviation: {asym_dev:.3e} (k = {k_far})")
    print(f"eigenvalues          : {[e[0].k for e in spectrum]}")
    if args.output:
        scattering.write_scattering_data(
            args.output, scattering.ScatteringData(samples=samples, spectrum=spectrum)
        )
    return 0


def cmd_zeros(args, cfg: RunConfig) -> int:
    u = _load_potential(args, cfg)
    spectrum = scattering.locate_zeros(
        u, region=cfg.region, substeps=cfg.substeps, with_norming=True
    )
    for kp, gamma in spectrum:
        print(f"k = {kp.k:.12f}   gamma = {gamma:.12f}")
    if not len(spectrum):
        print("no zeros in region")
    if args.output:
        scattering.write_scattering_data(
            args.output, scattering.ScatteringData(samples=[], spectrum=spectrum)
        )
    return 0


def _require(args, *names) -> None:
    for name in names:
        if getattr(args, name) in (None, ""):
            raise InputError(f"--{name} is required for this command")


def cmd_add(args, cfg: RunConfig) -> int:
    _require(args, "k1", "gamma", "output")
    u = _load_potential(args, cfg)
    k1 = _parse_complex_pair(args.k1)
    gamma = _parse_complex_pair(args.gamma)
    u1, u1x = darboux.add_soliton(
        u, k1, gamma, substeps=cfg.substeps, return_derivative=True
    )
    write_grid_function(args.output, u1)
    gam_back = scattering.norming_constant(u1, k1, ux=u1x, substeps=cfg.substeps)
    _sidecar(
        args.output,
        "add",
        {"k1": _c_pair(k1), "gamma": _c_pair(gamma), "L": u.grid.L, "N": u.grid.N},
        {
            "norming_constant_measured": _c_pair(gam_back),
            "derivative_norm_l2": float(
                np.sqrt(np.trapezoid(np.abs(u1x.values) ** 2, dx=u.grid.h))
            ),
        },
    )
    return 0


def cmd_remove(args, cfg: RunConfig) -> int:
    _require(args, "k1", "output")
    u = _load_potential(args, cfg)
    k1 = _parse_complex_pair(args.k1)
    u1 = darboux.remove_soliton(u, k1, substeps=cfg.substeps)
    write_grid_function(args.output, u1)
    _sidecar(
        args.output,
        "remove",
        {"k1": _c_pair(k1), "L": u.grid.L, "N": u.grid.N},
        {"max_abs": float(np.abs(u1.values).max())},
    )
    return 0


def _soliton_params(cfg: RunConfig, t: float):
    return [
        evolution.SolitonParameters(SpectralPoint.from_k(k1), gamma, t)
        for k1, gamma in cfg.solitons
    ]


def cmd_nsoliton(args, cfg: RunConfig) -> int:
    _require(args, "output")
    t = args.time or 0.0
    params = _soliton_params(cfg, t)
    u = evolution.n_soliton(params, cfg.grid, substeps=cfg.substeps)
    write_grid_function(args.output, u)
    _sidecar(
        args.output,
        "nsoliton",
        {
            "solitons": [
                {"k1": _c_pair(k1), "gamma": _c_pair(g)} for k1, g in cfg.solitons
            ],
            "t": t,
        },
        {
            "max_abs": float(np.abs(u.values).max()),
            "c_constant": c_constant(u),
        },
    )
    return 0


def cmd_evolve(args, cfg: RunConfig) -> int:
    _require(args, "output")
    params = _soliton_params(cfg, 0.0)
    ts = np.linspace(cfg.t_min, cfg.t_max, cfg.nt)
    patch = evolution.soliton_patch(params, cfg.grid, ts, substeps=cfg.substeps)
    evolution.write_patch(args.output, patch)
    _sidecar(
        args.output,
        "evolve",
        {
            "solitons": [
                {"k1": _c_pair(k1), "gamma": _c_pair(g)} for k1, g in cfg.solitons
            ],
            "t_values": [float(t) for t in ts],
        },
        {"pde_residual": evolution.pde_residual(patch) if len(ts) >= 3 else None},
    )
    return 0


def cmd_norms(args, cfg: RunConfig) -> int:
    u = _load_potential(args, cfg)
    rep = sobolev_report(u)
    c = c_constant(u)
    print(f"H3        = {rep.H3:.12g}")
    print(f"H2,1      = {rep.H21:.12g}")
    print(f"smallness = {rep.smallness:.12g}")
    print(f"c         = {c:.12g}")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(
                {"H3": rep.H3, "H21": rep.H21, "smallness": rep.smallness, "c": c},
                fh,
                indent=1,
                sort_keys=True,
            )
            fh.write("\n")
    return 0


def cmd_verify(args, cfg: RunConfig) -> int:
    selection = None
    if args.only:
        selection = [int(tok) for tok in args.only.split(",") if tok.strip()]
        if not selection:
            print("empty suite selection: nothing to verify")
            return 0
    suite = verify.AcceptanceSuite(L=cfg.L, N=cfg.N, substeps=cfg.substeps)
    report = suite.run(selection)
    for check in report.checks:
        print(check.line())
        if check.detail:
            print(f"      {check.detail}")
    if args.output:
        with open(args.output, "w") as fh:
            json.dump(report.to_dict(), fh, indent=1, sort_keys=True)
            fh.write("\n")
    print("overall:", "PASS" if report.passed else "FAIL")
    return 0 if report.passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fleq",
        description="Direct scattering and Darboux toolkit for the "
        "Fokas-Lenells equation",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "scatter": cmd_scatter,
        "zeros": cmd_zeros,
        "add": cmd_add,
        "remove": cmd_remove,
        "nsoliton": cmd_nsoliton,
        "evolve": cmd_evolve,
        "verify": cmd_verify,
        "norms": cmd_norms,
    }
    for name, fn in commands.items():
        p = sub.add_parser(name)
        p.add_argument("--config", default=None)
        p.add_argument("--input", default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--k1", default=None, help="RE,IM")
        p.add_argument("--gamma", default=None, help="RE,IM")
        p.add_argument("--time", type=float, default=None)
        p.add_argument("--grid", default=None, help="L,N")
        p.add_argument("--tolerance", action="append", default=[],
                       help="NAME=VALUE (repeatable)")
        if name == "verify":
            p.add_argument("--only", default=None, help="comma-separated criteria")
        p.set_defaults(func=fn)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        return args.func(args, cfg)
    except (FleqError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
