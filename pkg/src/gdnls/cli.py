"""Command-line interface: subcommands over the library with reproducible outputs.

Configuration is one JSON document; any key can be overridden on the command
line with --section.key value pairs (values parsed as JSON, bare words as
strings).  Every run writes a manifest next to its outputs with the resolved
config, wall clock, metrics, and per-check pass/fail, so a run can be replayed
and audited.  Exit codes: 0 all checks passed, 1 a check failed, 2 bad config.
"""

from __future__ import annotations

import argparse
import copy
import json
import math
import os
import sys
import time
from importlib.metadata import PackageNotFoundError, version

import numpy as np

from .core import Field, Grid, Params, load_field, save_field
from .criterion import Certificate, SearchConfig, certify_global, corollary15_data, membership
from .errors import GdnlsError
from .evolve import SchemeConfig, integrate, write_trajectory_csv
from .functionals import gn_checks, identity_suite, mass
from .variational import MinimizeConfig, estimate_mu, mu_reference
from .waves import (
    F_sigma,
    SolitonSpec,
    closed_form_invariants,
    elliptic_residual,
    profile_Phi,
    profile_phi,
    traveling_wave,
    z0_root,
)
from .functionals import action_S, energy, momentum

__all__ = ["main"]

try:
    _VERSION = version("gdnls")
except PackageNotFoundError:
    _VERSION = "0.0.0"


class ConfigError(Exception):
    pass


DEFAULTS: dict = {
    "out": "gdnls-out",
    "seed": 0,
    "sample_every": 10,
    "grid": {"L": 60.0, "N": 4096},
    "params": {"sigma": 1.0, "omega": 1.0, "c": 0.0, "alpha": 1.0, "beta": 0.0},
    "scheme": {"dt": 1e-3, "T": 5.0, "dealias": True, "cfl_safety": 0.5, "adaptive": False},
    "data": {
        "family": "gaussian",  # gaussian | soliton | modulated | file
        "amplitude": 1.0,
        "width": 1.0,
        "x0": 0.0,
        "mass_pi": None,  # rescale so total mass = mass_pi * pi
        "boost": 0.0,  # plane-wave factor e^(i*boost*x); must be box-periodic
        "speed": 0.0,  # modulation speed for the modulated family
        "file": None,
    },
    "search": {
        "sigma": None,  # defaults to params.sigma
        "c_min": 1.0,
        "c_max": None,
        "points": 40,
        "strategies": None,
        "strategy_hint": None,
    },
    "minimize": {"step": None, "max_iters": 60000, "grad_tol": 1e-5},
    "verify": {"fields": 30, "modes": 24},
    "zroot": {"sigmas": [1.2, 1.5, 1.8], "z_tol": 1e-8, "quad_tol": 1e-12},
}


def _reject_unknown(cfg, schema, path=""):
    if not isinstance(cfg, dict):
        raise ConfigError(f"expected an object at {path or 'top level'}")
    for key, val in cfg.items():
        where = f"{path}.{key}" if path else key
        if key not in schema:
            raise ConfigError(f"unknown config key {where!r}")
        if isinstance(schema[key], dict):
            _reject_unknown(val, schema[key], where)


def _merge(base: dict, override: dict) -> dict:
    out = copy.deepcopy(base)
    for key, val in override.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], val)
        else:
            out[key] = val
    return out


def _parse_overrides(tokens: list[str]) -> dict:
    cfg: dict = {}
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if not tok.startswith("--"):
            raise ConfigError(f"expected --key, got {tok!r}")
        if i + 1 >= len(tokens):
            raise ConfigError(f"missing value for {tok!r}")
        raw = tokens[i + 1]
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        node = cfg
        *parents, leaf = tok[2:].split(".")
        for part in parents:
            node = node.setdefault(part, {})
        node[leaf] = val
        i += 2
    return cfg


def resolve_config(config_path: str | None, overrides: list[str]) -> dict:
    cfg = {}
    if config_path is not None:
        try:
            with open(config_path) as fh:
                cfg = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {config_path!r}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {config_path!r} is not valid JSON: line {exc.lineno}: {exc.msg}") from exc
    _reject_unknown(cfg, DEFAULTS)
    over = _parse_overrides(overrides)
    _reject_unknown(over, DEFAULTS)
    resolved = _merge(_merge(DEFAULTS, cfg), over)
    env_out = os.environ.get("GDNLS_OUT")
    if env_out:
        resolved["out"] = env_out
    return resolved


def _grid(cfg: dict) -> Grid:
    return Grid(float(cfg["grid"]["L"]), int(cfg["grid"]["N"]))


def _params(cfg: dict) -> Params:
    p = cfg["params"]
    return Params(float(p["sigma"]), float(p["omega"]), float(p["c"]),
                  float(p["alpha"]), float(p["beta"]))


def _scheme(cfg: dict) -> SchemeConfig:
    s = cfg["scheme"]
    return SchemeConfig(dt=float(s["dt"]), T=float(s["T"]), dealias=bool(s["dealias"]),
                        cfl_safety=float(s["cfl_safety"]), adaptive=bool(s["adaptive"]))


def _initial_data(cfg: dict, grid: Grid) -> Field:
    d = cfg["data"]
    family = d["family"]
    if family == "file":
        if not d["file"]:
            raise ConfigError("data.family 'file' needs data.file")
        return load_field(d["file"])
    if family == "soliton":
        p = cfg["params"]
        spec = SolitonSpec(float(p["sigma"]), float(p["omega"]), float(p["c"]), x0=float(d["x0"]))
        return profile_phi(spec, grid)
    if family not in ("gaussian", "modulated"):
        raise ConfigError(f"unknown data.family {d['family']!r}")
    x = grid.x
    vals = float(d["amplitude"]) * np.exp(-(((x - float(d["x0"])) / float(d["width"])) ** 2))
    vals = vals.astype(complex)
    boost = float(d["boost"])
    if boost:
        if abs(boost * grid.L / (2 * math.pi) - round(boost * grid.L / (2 * math.pi))) > 1e-9:
            raise ConfigError(f"data.boost {boost} is not periodic on L={grid.L}")
        vals = vals * np.exp(1j * boost * x)
    u = Field(grid, vals)
    if d["mass_pi"] is not None:
        target = float(d["mass_pi"]) * math.pi
        u = u.with_values(u.values * math.sqrt(target / mass(u)))
    if family == "modulated":
        u = corollary15_data(u, float(d["speed"]))
    return u


class Run:
    """Collects outputs, metrics, and checks; writes the manifest atomically."""

    def __init__(self, command: str, cfg: dict):
        self.command = command
        self.cfg = cfg
        self.out_dir = cfg["out"]
        os.makedirs(self.out_dir, exist_ok=True)
        self.t0 = time.perf_counter()
        self.metrics: dict = {}
        self.checks: list[dict] = []
        self.outputs: list[str] = []

    def path(self, name: str) -> str:
        self.outputs.append(name)
        return os.path.join(self.out_dir, name)

    def check(self, name: str, value: float, threshold: float, passed: bool) -> bool:
        self.checks.append({"name": name, "value": value, "threshold": threshold, "passed": bool(passed)})
        return passed

    def finish(self) -> int:
        manifest = {
            "version": _VERSION,
            "command": self.command,
            "config": self.cfg,
            "wall_clock_s": round(time.perf_counter() - self.t0, 3),
            "metrics": self.metrics,
            "checks": self.checks,
            "outputs": self.outputs,
        }
        final = os.path.join(self.out_dir, "manifest.json")
        tmp = f"{final}.tmp-{os.getpid()}"
        with open(tmp, "w") as fh:
            json.dump(manifest, fh, indent=2)
        os.replace(tmp, final)
        return 0 if all(c["passed"] for c in self.checks) else 1


def _write_csv(path: str, header: str, rows: list[tuple]) -> None:
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(str(item) for item in row) + "\n")


def cmd_soliton(cfg: dict) -> int:
    run = Run("soliton", cfg)
    grid = _grid(cfg)
    p = _params(cfg)
    spec = SolitonSpec(p.sigma, p.omega, p.c, x0=float(cfg["data"]["x0"]))
    phi = profile_phi(spec, grid)
    _write_csv(run.path("profile.csv"), "x,re,im,abs",
               [(repr(x), repr(v.real), repr(v.imag), repr(abs(v)))
                for x, v in zip(grid.x, phi.values)])
    run.metrics["slow_decay"] = phi.slow_decay

    numeric = {"M": mass(phi), "P": momentum(phi), "E": energy(phi, p.sigma),
               "S": action_S(phi, p)}
    rows = []
    if p.sigma == 1.0:
        closed = closed_form_invariants(p.omega, p.c)
        pairs = {"M": closed.mass, "P": closed.momentum, "E": closed.energy, "S": closed.action}
        for name in ("M", "P", "E", "S"):
            num, ref = numeric[name], pairs[name]
            rel = abs(num - ref) / max(abs(ref), 1.0)
            rows.append((name, repr(num), repr(ref), repr(rel)))
            if not phi.slow_decay:
                run.check(f"invariant_{name}", rel, 1e-6, rel < 1e-6)
    else:
        rows = [(name, repr(numeric[name]), "", "") for name in ("M", "P", "E", "S")]
    _write_csv(run.path("invariants.csv"), "quantity,numeric,closed,relerr", rows)

    res = elliptic_residual(profile_Phi(spec, grid), p)
    run.metrics["elliptic_residual"] = res
    if not phi.slow_decay:
        run.check("elliptic_residual", res, 1e-8, res < 1e-8)
    return run.finish()


def cmd_verify(cfg: dict) -> int:
    run = Run("verify", cfg)
    grid = _grid(cfg)
    rng = np.random.default_rng(int(cfg["seed"]))
    n_fields = int(cfg["verify"]["fields"])
    modes = int(cfg["verify"]["modes"])
    param_pool = [
        Params(1.0, 1.0, 0.0, 1.0, 0.0),
        Params(1.0, 1.0, 1.0, 1.0, -1.0),
        Params(2.0, 1.0, -0.5, 1.0, 0.5),
        Params(1.5, 2.0, 1.5, 2.0, -2.0),
        Params(3.0, 1.0, 0.0, 1.0, 1.0),
    ]
    worst = 0.0
    for i in range(n_fields):
        coef = np.zeros(grid.N, complex)
        idx = np.concatenate([np.arange(1, modes + 1), np.arange(grid.N - modes, grid.N)])
        coef[idx] = rng.standard_normal(2 * modes) + 1j * rng.standard_normal(2 * modes)
        coef[0] = rng.standard_normal() + 1j * rng.standard_normal()
        u = Field(grid, np.fft.ifft(coef) * grid.N / math.sqrt(2 * modes + 1))
        rep = identity_suite(u, param_pool[i % len(param_pool)])
        worst = max(worst, rep.max_relative())
    rows = [("identity_suite_worst_rel", worst, 1e-9)]

    Q = profile_Phi(SolitonSpec(1.0, 1.0, 0.0), grid)
    gn = gn_checks(Q)
    rows.append(("gn1_ratio_at_Q_minus_1", abs(gn.gn1 - 1.0), 1e-6))
    rows.append(("Q_mass_rel_err", abs(mass(Q) - 2 * math.pi) / (2 * math.pi), 1e-6))
    for z in (-0.9, 0.0, 0.9):
        rows.append((f"F1_at_{z}_plus_1", abs(F_sigma(z, 1.0) + 1.0), 1e-10))

    table = []
    for name, value, threshold in rows:
        passed = run.check(name, value, threshold, value < threshold)
        table.append((name, repr(value), repr(threshold), "pass" if passed else "fail"))
    _write_csv(run.path("checks.csv"), "check,value,threshold,status", table)
    return run.finish()


def cmd_certify(cfg: dict) -> int:
    run = Run("certify", cfg)
    grid = _grid(cfg)
    u0 = _initial_data(cfg, grid)
    s = cfg["search"]
    kwargs = {k: v for k, v in {
        "sigma": s["sigma"] if s["sigma"] is not None else cfg["params"]["sigma"],
        "c_min": s["c_min"], "c_max": s["c_max"], "points": s["points"],
        "strategy_hint": s["strategy_hint"],
    }.items() if v is not None}
    if s["strategies"] is not None:
        kwargs["strategies"] = tuple(s["strategies"])
    if cfg["data"]["family"] == "modulated" and "strategy_hint" not in kwargs:
        kwargs["strategy_hint"] = "modulation"
    result = certify_global(u0, SearchConfig(**kwargs))

    if isinstance(result, Certificate):
        doc = {
            "params": {"sigma": result.params.sigma, "omega": result.params.omega,
                       "c": result.params.c, "alpha": result.params.alpha,
                       "beta": result.params.beta},
            "action": result.action, "level": result.level, "virial": result.virial,
            "strategy": result.strategy,
        }
        with open(run.path("certificate.json"), "w") as fh:
            json.dump(doc, fh, indent=2)
        run.metrics["found"] = True
        run.metrics["strategy"] = result.strategy
        run.check("certificate_found", 1.0, 1.0, True)
        kind = membership(u0, result.params).kind
        run.check("membership_recheck", 1.0 if kind == "KPlus" else 0.0, 1.0, kind == "KPlus")
    else:
        doc = {"tried": result.tried, "margin": result.margin,
               "action": result.action, "level": result.level, "virial": result.virial,
               "params": None if result.params is None else {
                   "sigma": result.params.sigma, "omega": result.params.omega,
                   "c": result.params.c, "alpha": result.params.alpha,
                   "beta": result.params.beta}}
        with open(run.path("notfound.json"), "w") as fh:
            json.dump(doc, fh, indent=2)
        run.metrics["found"] = False
        run.metrics["best_margin"] = result.margin
        run.check("certificate_found", 0.0, 1.0, False)
    return run.finish()


def cmd_minimize_mu(cfg: dict) -> int:
    run = Run("minimize-mu", cfg)
    p = _params(cfg)
    m = cfg["minimize"]
    mc = MinimizeConfig(step=None if m["step"] is None else float(m["step"]),
                        max_iters=int(m["max_iters"]), grad_tol=float(m["grad_tol"]),
                        grid=_grid(cfg))
    est = estimate_mu(p, mc)
    ref = mu_reference(p)
    rel = abs(est.mu - ref) / abs(ref)
    _write_csv(run.path("mu.csv"), "mu,reference,rel_err,iterations,converged",
               [(repr(est.mu), repr(ref), repr(rel), est.iterations, int(est.converged))])
    run.metrics.update({"mu": est.mu, "reference": ref, "rel_err": rel,
                        "iterations": est.iterations})
    run.check("converged", 1.0 if est.converged else 0.0, 1.0, est.converged)
    run.check("mu_matches_reference", rel, 1e-3, rel < 1e-3)
    return run.finish()


def cmd_simulate(cfg: dict) -> int:
    run = Run("simulate", cfg)
    grid = _grid(cfg)
    p = _params(cfg)
    scheme = _scheme(cfg)
    u0 = _initial_data(cfg, grid)
    traj = integrate(u0, scheme, p, sample_every=int(cfg["sample_every"]))
    write_trajectory_csv(traj, run.path("trajectory.csv"))
    save_field(u0, run.path("initial_field.json"))
    save_field(traj.final, run.path("final_field.json"), t=traj.times[-1])

    r0 = traj.records[0]
    drift = lambda get: max(abs(get(r) - get(r0)) / max(abs(get(r0)), 1.0) for r in traj.records)
    dM, dE, dP = drift(lambda r: r.mass), drift(lambda r: r.energy), drift(lambda r: r.momentum)
    summary = {"final_t": traj.times[-1], "blowup": int(traj.blowup),
               "drift_M": dM, "drift_E": dE, "drift_P": dP}
    run.metrics.update(summary)
    if cfg["data"]["family"] == "soliton" and not traj.blowup:
        spec = SolitonSpec(p.sigma, p.omega, p.c, x0=float(cfg["data"]["x0"]))
        exact = traveling_wave(spec, grid, traj.times[-1])
        linf = float(np.max(np.abs(traj.final.values - exact.values)))
        summary["final_linf_error"] = linf
        run.metrics["final_linf_error"] = linf
        run.check("soliton_linf_error", linf, 1e-4, linf < 1e-4)
        for name, val in (("M", dM), ("E", dE), ("P", dP)):
            run.check(f"drift_{name}", val, 1e-8, val < 1e-8)
    _write_csv(run.path("summary.csv"), ",".join(summary),
               [tuple(repr(v) for v in summary.values())])
    return run.finish()


def cmd_zroot(cfg: dict) -> int:
    run = Run("zroot", cfg)
    z = cfg["zroot"]
    rows = []
    for s in z["sigmas"]:
        root = z0_root(float(s), z_tol=float(z["z_tol"]), quad_tol=float(z["quad_tol"]))
        resid = abs(F_sigma(root, float(s), tol=float(z["quad_tol"])))
        rows.append((s, repr(root), repr(resid)))
        run.check(f"zroot_residual_sigma_{s}", resid, 1e-6, resid < 1e-6)
    _write_csv(run.path("zroot.csv"), "sigma,z0,absF", rows)
    return run.finish()


_COMMANDS = {
    "soliton": cmd_soliton,
    "verify": cmd_verify,
    "certify": cmd_certify,
    "minimize-mu": cmd_minimize_mu,
    "simulate": cmd_simulate,
    "zroot": cmd_zroot,
}


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="gdnls",
        description="Solitary waves, variational levels, and certified global "
                    "evolution for the derivative nonlinear Schrodinger family.",
    )
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("config", nargs="?", default=None,
                        help="JSON config file; omit to run on defaults")
    parser.add_argument("overrides", nargs=argparse.REMAINDER,
                        help="--section.key value pairs; values parsed as JSON")
    args = parser.parse_args(argv)

    try:
        cfg = resolve_config(args.config, args.overrides)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GdnlsError as exc:
        print(f"config error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except (TypeError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
