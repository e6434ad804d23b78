"""Command-line front end: potentials, eigenstates, coherent states and verification suites.

Every subcommand is deterministic. Errors are reported as a JSON object on
stderr with exit code 2 (bad input), 3 (numerical failure) or 4 (a
verification threshold was missed).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import algebra, coherent, numerics, susy
from .errors import ConfigError, NumericalError, SusyQMError
from .systems import FLAVORS, INTRINSIC, LINEAR, NATURAL, InfiniteWell, LadderCoefficients, Oscillator, \
    PoschlTeller, SpectrumModel, parse_model

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4

PRESETS = {
    "fig1": ("oscillator", "seed:eps=-1.5,mu=0.99;confluent:level=0,w0=0.51"),
    "fig2": ("well", "confluent:level=1,w0=0.1"),
    "fig3": ("pt:3", "seed:eps=1.5,mu=1.9"),
}
PRESET_WINDOWS = {"fig1": (-5.0, 5.0)}

THRESHOLDS = {"algebra": 1e-10, "moments": 1e-8, "spectrum": 1e-3, "cs": 1e-10}
CS_SAMPLES = (0j, 1.3 + 0.4j, -2.0 + 1.0j, 2.9j, 0.5 - 2.5j)

SEED_KEYS = {
    "seed": {"eps", "mu"},
    "confluent": {"level", "w0"},
    "level": {"n"},
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    model: SpectrumModel
    susy_text: str | None
    transform: susy.SusyTransform | None
    preset: str | None


def _parse_fields(kind: str, body: str) -> dict[str, float]:
    allowed = SEED_KEYS[kind]
    out = {}
    for part in filter(None, (p.strip() for p in body.split(","))):
        key, sep, val = part.partition("=")
        key = key.strip()
        if not sep:
            raise ConfigError(f"expected key=value in {part!r}")
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} for {kind!r}; allowed: {sorted(allowed)}")
        if key in out:
            raise ConfigError(f"duplicate key {key!r}")
        try:
            out[key] = float(val)
        except ValueError:
            raise ConfigError(f"bad number {val!r} for {key!r}") from None
    return out


def _level(value: float, key: str) -> int:
    if not float(value).is_integer() or value < 0:
        raise ConfigError(f"{key} must be a nonnegative integer, got {value:g}")
    return int(value)


def parse_susy(model: SpectrumModel, text: str) -> list[susy.SeedSolution]:
    """Seeds from ``kind:key=val,...;kind:...`` with kinds seed, confluent and level."""
    seeds: list[susy.SeedSolution] = []
    for item in filter(None, (s.strip() for s in text.split(";"))):
        kind, sep, body = item.partition(":")
        kind = kind.strip()
        if not sep or kind not in SEED_KEYS:
            raise ConfigError(f"unknown transformation item {item!r}; kinds: {sorted(SEED_KEYS)}")
        f = _parse_fields(kind, body)
        missing = {"seed": {"eps"}, "confluent": {"level", "w0"}, "level": {"n"}}[kind] - f.keys()
        if missing:
            raise ConfigError(f"{kind!r} is missing {sorted(missing)}")
        if kind == "level":
            seeds.append(susy.physical_seed(model, _level(f["n"], "n")))
        elif kind == "seed":
            mu = f.get("mu", 0.0)
            if isinstance(model, Oscillator):
                seeds.append(susy.oscillator_seed(f["eps"], mu, model))
            elif isinstance(model, PoschlTeller):
                seeds.append(susy.pt_seed(model, f["eps"], mu))
            else:
                raise ConfigError(f"general seeds are not available for {model.cli_name()}")
        else:
            lvl = _level(f["level"], "level")
            if isinstance(model, InfiniteWell):
                seeds.extend(susy.well_confluent_seeds(model, lvl, f["w0"]))
            elif isinstance(model, Oscillator) and lvl == 0:
                seeds.extend(susy.oscillator_confluent_seeds(model, f["w0"]))
            else:
                raise ConfigError(f"confluent pair at level {lvl} not available for {model.cli_name()}")
    if not seeds:
        raise ConfigError("empty transformation string")
    return seeds


def _config(args) -> RunConfig:
    preset = getattr(args, "preset", None)
    model_text = getattr(args, "model", None)
    susy_text = getattr(args, "susy", None)
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        if model_text or susy_text:
            raise ConfigError("--preset cannot be combined with --model or --susy")
        model_text, susy_text = PRESETS[preset]
    if not model_text:
        raise ConfigError("a --model or --preset is required")
    model = parse_model(model_text)
    transform = None
    if susy_text:
        seeds = parse_susy(model, susy_text)
        transform = susy.SusyTransform(model, seeds, label=preset or susy_text)
    return RunConfig(args.command, model, susy_text, transform, preset)


def _window(cfg: RunConfig, args) -> np.ndarray:
    if args.points < 2:
        raise ConfigError("--npoints must be at least 2")
    a, b = PRESET_WINDOWS.get(cfg.preset, cfg.model.numeric_domain())
    if args.xmin is None and args.xmax is None:
        # stay off the window ends, which may be the walls of an open domain
        return np.linspace(a, b, args.points + 2)[1:-1]
    lo = a if args.xmin is None else args.xmin
    hi = b if args.xmax is None else args.xmax
    if not hi > lo:
        raise ConfigError("--xmax must exceed --xmin")
    return np.linspace(lo, hi, args.points)


def _tolerance(suite: str) -> float:
    env = os.environ.get("SUSYQM_TOL")
    if env is None:
        return THRESHOLDS[suite]
    try:
        tol = float(env)
    except ValueError:
        raise ConfigError(f"SUSYQM_TOL is not a number: {env!r}") from None
    if not tol > 0:
        raise ConfigError("SUSYQM_TOL must be positive")
    return tol


def _write_csv(path: str | None, header: list[str], columns: list[np.ndarray], stdout) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([format(float(v), ".17g") for v in row])
    _emit(path, buf.getvalue(), stdout)


def _emit(path: str | None, text: str, stdout) -> None:
    if path in (None, "-"):
        stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


# --- subcommands ------------------------------------------------------------

def cmd_potential(args, stdout) -> int:
    cfg = _config(args)
    x = _window(cfg, args)
    v0 = cfg.model.potential(x)
    vk = cfg.transform.potential(x) if cfg.transform else v0
    _write_csv(args.out, ["x", "V0", "Vk"], [x, v0, vk], stdout)
    return EXIT_OK


def cmd_eigenstate(args, stdout) -> int:
    cfg = _config(args)
    x = _window(cfg, args)
    if args.created is not None:
        if cfg.transform is None:
            raise ConfigError("--created needs a transformation")
        vals = cfg.transform.new_level_state(args.created, x)
    elif cfg.transform is not None:
        vals = cfg.transform.theta(args.n, x)
    else:
        vals = cfg.model.eigenfunction(args.n, x)
    _write_csv(args.out, ["x", "psi"], [x, vals], stdout)
    return EXIT_OK


def _spectrum_rows(cfg: RunConfig, levels: int):
    target = cfg.transform if cfg.transform is not None else None
    pot = target.potential if target else cfg.model.potential
    grid = numerics.Grid.for_model(cfg.model)
    found = [e for e, _ in numerics.diagonalize_1d(pot, grid, levels)]
    expected = (target.bookkeeping.levels(levels) if target
                else [cfg.model.energy(n) for n in range(levels)])
    return found, expected


def cmd_spectrum(args, stdout) -> int:
    cfg = _config(args)
    found, expected = _spectrum_rows(cfg, args.levels)
    rows = [{"index": i, "computed": f, "expected": e, "error": abs(f - e)}
            for i, (f, e) in enumerate(zip(found, expected))]
    _emit(args.out, _dump({"model": cfg.model.cli_name(), "susy": cfg.susy_text, "levels": rows}), stdout)
    return EXIT_OK


def _cs_flavor(cfg: RunConfig, ladder: str) -> coherent.CSFlavor:
    return coherent.CSFlavor.resolve(ladder, cfg.transform is not None)


def _parse_z(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise ConfigError(f"--z expects 're,im', got {text!r}")


def cmd_coherent(args, stdout) -> int:
    cfg = _config(args)
    flavor = _cs_flavor(cfg, args.flavor)
    system = cfg.transform if cfg.transform is not None else cfg.model
    z = _parse_z(args.z)
    cs = coherent.build_cs(flavor, system, z, args.alpha)
    report = {
        "flavor": flavor.value,
        "z": [z.real, z.imag],
        "alpha": args.alpha,
        "basis_offset": cs.basis_offset,
        "truncation": cs.M,
        "coeffs": [[c.real, c.imag] for c in cs.coeffs],
        "defects": {
            "annihilation": coherent.annihilation_check(cs),
            "recurrence": coherent.recurrence_defect(cs),
            "norm": cs.norm_defect,
        },
    }
    if args.emit and args.emit.endswith(".csv"):
        x = _window(cfg, args)
        psi = coherent.cs_wavefunction(cs, x)
        _write_csv(args.emit, ["x", "re_psi", "im_psi", "abs2"], [x, psi.real, psi.imag, np.abs(psi) ** 2], stdout)
    elif args.emit:
        _emit(args.emit, _dump(report), stdout)
    _emit(None, _dump(report), stdout)
    return EXIT_OK


# --- verification -----------------------------------------------------------

def _suite_algebra(cfg: RunConfig, dim: int, tol: float) -> dict:
    out = {}
    for flavor in (INTRINSIC, LINEAR):
        rep = algebra.build_rep(LadderCoefficients(flavor, cfg.model), cfg.model, dim)
        out[flavor] = algebra.verify_algebra(rep, tol).max_defect
    if cfg.transform is not None:
        coeffs = LadderCoefficients(NATURAL, cfg.model, 0.0, cfg.transform.factorization_energies)
        rep = algebra.build_rep(coeffs, cfg.model, dim, algebra.THETA)
        out[NATURAL] = algebra.verify_algebra(rep, tol).max_defect
    return {"defects": out, "passed": all(v < tol for v in out.values())}


def _suite_moments(cfg: RunConfig, mmax: int, tol: float) -> dict:
    seq = coherent.moment_sequence(cfg.model)
    if seq.closed_form_density is None:
        raise ConfigError(f"no moment density for {cfg.model.cli_name()}")
    defects = coherent.moment_check(seq, mmax)
    return {"defects": defects, "passed": all(d < tol for d in defects)}


def _suite_spectrum(cfg: RunConfig, levels: int, tol: float) -> dict:
    found, expected = _spectrum_rows(cfg, levels)
    err = [abs(f - e) for f, e in zip(found, expected)]
    return {"computed": found, "expected": expected, "errors": err, "passed": max(err) < tol}


def _suite_cs(cfg: RunConfig, tol: float) -> dict:
    system = cfg.transform if cfg.transform is not None else cfg.model
    ladders = (INTRINSIC, LINEAR, NATURAL) if cfg.transform is not None else (INTRINSIC, LINEAR)
    out = {}
    for ladder in ladders:
        flavor = _cs_flavor(cfg, ladder)
        worst_a = worst_e = 0.0
        for j, z in enumerate(CS_SAMPLES):
            alpha = 0.25 * j
            cs = coherent.build_cs(flavor, system, z, alpha)
            worst_a = max(worst_a, coherent.annihilation_check(cs))
            worst_e = max(worst_e, coherent.evolution_check(flavor, system, z, alpha, 0.7 + j))
        out[flavor.value] = {"annihilation": worst_a, "evolution": worst_e}
    ok = all(v < tol for d in out.values() for v in d.values())
    return {"defects": out, "passed": ok}


def cmd_verify(args, stdout) -> int:
    cfg = _config(args)
    suites = ["algebra", "moments", "spectrum", "cs"] if args.suite == "all" else [args.suite]
    if args.suite == "all" and coherent.moment_density(cfg.model) is None:
        suites.remove("moments")
    report = {"model": cfg.model.cli_name(), "susy": cfg.susy_text, "suites": {}}
    for name in suites:
        tol = _tolerance(name)
        t0 = time.perf_counter()
        if name == "algebra":
            res = _suite_algebra(cfg, args.dim, tol)
        elif name == "moments":
            res = _suite_moments(cfg, args.mmax, tol)
        elif name == "spectrum":
            res = _suite_spectrum(cfg, args.levels, tol)
        else:
            res = _suite_cs(cfg, tol)
        res["threshold"] = tol
        if args.timing:
            res["seconds"] = time.perf_counter() - t0
        report["suites"][name] = res
    report["passed"] = all(r["passed"] for r in report["suites"].values())
    _emit(args.out, _dump(report), stdout)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def cmd_verify_algebra(args, stdout) -> int:
    cfg = _config(args)
    tol = _tolerance("algebra")
    if args.flavor == NATURAL:
        if cfg.transform is None:
            raise ConfigError("the natural flavor needs --susy or --preset")
        coeffs = LadderCoefficients(NATURAL, cfg.model, 0.0, cfg.transform.factorization_energies)
        basis = algebra.THETA
    else:
        coeffs = LadderCoefficients(args.flavor, cfg.model)
        basis = algebra.THETA if cfg.transform is not None else algebra.PSI
    rep = algebra.build_rep(coeffs, cfg.model, args.dim, basis)
    rpt = algebra.verify_algebra(rep, tol)
    out = rpt.as_dict()
    out["threshold"] = tol
    out["passed"] = rpt.max_defect < tol
    _emit(args.out, _dump(out), stdout)
    return EXIT_OK if out["passed"] else EXIT_VERIFY


def cmd_verify_moments(args, stdout) -> int:
    cfg = _config(args)
    tol = _tolerance("moments")
    res = _suite_moments(cfg, args.mmax, tol)
    res.update(model=cfg.model.cli_name(), threshold=tol)
    _emit(args.out, _dump(res), stdout)
    return EXIT_OK if res["passed"] else EXIT_VERIFY


# --- argument parsing -------------------------------------------------------

def _system_args(p, allow_preset=True):
    p.add_argument("--model", help="oscillator, well or pt:<nu>")
    p.add_argument("--susy", help="transformation, e.g. 'seed:eps=-1.5,mu=0.99;confluent:level=0,w0=0.51'")
    if allow_preset:
        p.add_argument("--preset", choices=sorted(PRESETS))
    p.add_argument("--out", help="output file (default stdout)")


def _window_args(p):
    p.add_argument("--xmin", type=float)
    p.add_argument("--xmax", type=float)
    p.add_argument("--npoints", "--points", dest="points", metavar="N", type=int, default=1001)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="susyqm", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("potential", help="CSV of x, V0(x), Vk(x)")
    _system_args(p)
    _window_args(p)
    p.set_defaults(func=cmd_potential)

    p = sub.add_parser("eigenstate", help="CSV of an eigenstate of H0 or H_k")
    _system_args(p)
    _window_args(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--n", type=int, default=0, help="ladder index")
    g.add_argument("--created", type=int, help="created level, 1-based")
    p.set_defaults(func=cmd_eigenstate)

    p = sub.add_parser("spectrum", help="finite-difference levels vs. the predicted spectrum")
    _system_args(p)
    p.add_argument("--levels", type=int, default=5)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("coherent", help="coherent-state coefficients and wavefunction")
    _system_args(p)
    _window_args(p)
    p.add_argument("--flavor", choices=FLAVORS, required=True)
    p.add_argument("--z", default="0,0", help="complex label as 're,im'")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--emit", help="write the wavefunction (.csv) or the coefficient report (.json)")
    p.set_defaults(func=cmd_coherent)

    p = sub.add_parser("verify", help="run verification suites, exit 4 on a missed threshold")
    _system_args(p)
    p.add_argument("--suite", choices=["algebra", "moments", "spectrum", "cs", "all"], default="all")
    p.add_argument("--dim", type=int, default=12)
    p.add_argument("--mmax", type=int, default=8)
    p.add_argument("--levels", type=int, default=5)
    p.add_argument("--timing", action="store_true", help="include wall-clock seconds (not deterministic)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("verify-algebra", help="AlgebraReport as JSON")
    _system_args(p)
    p.add_argument("--flavor", choices=FLAVORS, default=INTRINSIC)
    p.add_argument("--dim", type=int, default=12)
    p.set_defaults(func=cmd_verify_algebra)

    p = sub.add_parser("verify-moments", help="moment-problem defects as JSON")
    _system_args(p, allow_preset=False)
    p.add_argument("--mmax", type=int, default=8)
    p.set_defaults(func=cmd_verify_moments)
    return parser


def _error(exc: Exception, code: int, stderr) -> int:
    obj = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    x = getattr(exc, "x", None)
    if x is not None:
        obj["x"] = float(np.ravel(x)[0])
    stderr.write(json.dumps(obj, sort_keys=True) + "\n")
    return code


def main(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.func(args, stdout)
    except ConfigError as exc:
        return _error(exc, EXIT_CONFIG, stderr)
    except (NumericalError, FloatingPointError) as exc:
        return _error(exc, EXIT_NUMERIC, stderr)
    except (SusyQMError, ValueError) as exc:
        return _error(exc, EXIT_CONFIG, stderr)
    except OSError as exc:
        return _error(exc, EXIT_CONFIG, stderr)


if __name__ == "__main__":
    raise SystemExit(main())
