"""Command-line front end: every scan and check as a reproducible run.

One invocation, one output file. The header echoes the full effective
configuration, so the file reproduces itself; the data section is
byte-identical across reruns of the same configuration. Complex values
always serialize as paired re/im columns. Column schemas per command
are documented in docs/formats.md.

Exit codes: 0 success, 2 configuration rejected, 3 numerical failure
inside the library, 4 output could not be written. Failures emit one
JSON record on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .errors import ConfigurationError, DysonflowError, PreconditionError
from .sources import SourceSpectrum

_COMMANDS = (
    "simulate",
    "density",
    "acp-scan",
    "aicp-scan",
    "pde-check",
    "green-scan",
    "caustics",
    "airy-profile",
    "pearcey-profile",
    "kernel-grid",
    "kernel-verify",
    "mc-compare",
)

# fields each command consumes; anything else the user supplies is an
# error, not a silent no-op. Grid axes are namespaced as grid:name.
_CONSUMES = {
    "simulate": {"source", "n", "tau_range", "trials", "seed"},
    "density": {"source", "n", "tau", "grid:lambda"},
    "acp-scan": {"source", "n", "tau", "grid:re", "grid:im"},
    "aicp-scan": {"source", "n", "tau", "grid:re", "grid:im"},
    "pde-check": {"source", "n", "tau", "grid:re", "grid:im"},
    "green-scan": {"source", "n", "tau", "grid:re", "grid:im", "grid:p_re", "grid:p_im"},
    "caustics": {"source", "n", "tau", "tau_range"},
    "airy-profile": {"n", "tau", "grid:eta"},
    "pearcey-profile": {"n", "source", "grid:kappa", "grid:eta"},
    "kernel-grid": {"source", "n", "tau", "grid:x", "grid:y"},
    "kernel-verify": {"source", "n", "tau", "grid:x", "grid:y"},
    "mc-compare": {"source", "n", "tau", "grid:re", "grid:im", "trials", "seed"},
}

_REQUIRES = {
    "simulate": {"tau_range"},
    "density": {"tau", "grid:lambda"},
    "acp-scan": {"tau", "grid:re"},
    "aicp-scan": {"tau", "grid:re", "grid:im"},
    "pde-check": {"tau", "grid:re", "grid:im"},
    "green-scan": {"tau", "grid:re", "grid:im"},
    "caustics": set(),
    "airy-profile": {"n", "tau", "grid:eta"},
    "pearcey-profile": {"n", "grid:kappa", "grid:eta"},
    "kernel-grid": {"tau", "grid:x", "grid:y"},
    "kernel-verify": {"source", "tau", "grid:x", "grid:y"},
    "mc-compare": {"tau", "grid:re", "grid:im"},
}


def _parse_range(text: str, what: str):
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigurationError(f"{what} must be min:max:count, got {text!r}")
    try:
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigurationError(f"{what} must be min:max:count, got {text!r}") from None
    return [lo, hi, count]


def _check_range(rng, what: str):
    lo, hi, count = float(rng[0]), float(rng[1]), int(rng[2])
    if count < 1:
        raise ConfigurationError(f"{what} count must be >= 1, got {count}")
    if hi < lo:
        raise ConfigurationError(f"{what} range must be ordered, got {lo} > {hi}")
    return lo, hi, count


def _axis(rng) -> np.ndarray:
    lo, hi, count = float(rng[0]), float(rng[1]), int(rng[2])
    return np.linspace(lo, hi, count)


def _build_config(args) -> tuple:
    """Merge JSON config file and flags (flags win); track provided keys."""
    cfg = {}
    provided = set()
    if args.config is not None:
        with open(args.config) as fh:
            try:
                loaded = json.load(fh)
            except json.JSONDecodeError as e:
                raise ConfigurationError(f"config file is not valid JSON: {e}") from None
        if not isinstance(loaded, dict):
            raise ConfigurationError("config file must hold a JSON object")
        known = {
            "command", "source", "n", "tau", "tau_range", "grid",
            "trials", "seed", "out", "format",
        }
        for key in loaded:
            if key not in known:
                raise ConfigurationError(f"config file has unknown field {key!r}")
        cfg.update(loaded)
        if isinstance(cfg.get("tau_range"), str):
            cfg["tau_range"] = _parse_range(cfg["tau_range"], "tau_range")
        if cfg.get("grid"):
            cfg["grid"] = {
                var: _parse_range(rng, f"grid {var}") if isinstance(rng, str) else rng
                for var, rng in cfg["grid"].items()
            }
        provided.update(
            f"grid:{v}" for v in (loaded.get("grid") or {})
        )
        provided.update(k for k in loaded if k != "grid")
    for name in ("command", "source", "n", "tau", "trials", "seed", "out", "format"):
        val = getattr(args, name)
        if val is not None:
            cfg[name] = val
            provided.add(name)
    if args.tau_range is not None:
        cfg["tau_range"] = _parse_range(args.tau_range, "--tau-range")
        provided.add("tau_range")
    if args.grid:
        grid = dict(cfg.get("grid") or {})
        for item in args.grid:
            if "=" not in item:
                raise ConfigurationError(f"--grid must be var=min:max:count, got {item!r}")
            var, rng = item.split("=", 1)
            grid[var] = _parse_range(rng, f"--grid {var}")
            provided.add(f"grid:{var}")
        cfg["grid"] = grid
    provided.discard("command")
    provided.discard("out")
    provided.discard("format")
    return cfg, provided


def _validate(cfg: dict, provided: set) -> dict:
    command = cfg.get("command")
    if command is None:
        raise ConfigurationError("no command given; pass --command")
    if command not in _COMMANDS:
        raise ConfigurationError(
            f"unknown command {command!r}; choose from {', '.join(_COMMANDS)}"
        )
    extra = provided - _CONSUMES[command]
    if extra:
        raise ConfigurationError(
            f"{command} does not consume: {', '.join(sorted(extra))}"
        )
    missing = _REQUIRES[command] - provided
    if "source" in missing and "n" in provided:
        missing.discard("source")
    if missing:
        raise ConfigurationError(
            f"{command} is missing: {', '.join(sorted(missing))}"
        )
    if "source" in provided and "n" in provided:
        raise ConfigurationError("give either source or n, not both")
    for var, rng in (cfg.get("grid") or {}).items():
        _check_range(rng, f"grid {var}")
    if "tau_range" in cfg:
        _check_range(cfg["tau_range"], "tau_range")
    if "tau" in cfg and float(cfg["tau"]) <= 0:
        raise ConfigurationError(f"tau must be > 0, got {cfg['tau']}")
    if "trials" in cfg and int(cfg["trials"]) < 2:
        raise ConfigurationError(f"trials must be >= 2, got {cfg['trials']}")
    if cfg.get("format", "csv") not in ("csv", "json"):
        raise ConfigurationError(f"format must be csv or json, got {cfg['format']!r}")
    if "n" in cfg and int(cfg["n"]) < 1:
        raise ConfigurationError(f"n must be >= 1, got {cfg['n']}")
    return cfg


def _source_of(cfg: dict, default=None) -> SourceSpectrum:
    if "source" in cfg:
        return SourceSpectrum.parse(cfg["source"])
    if "n" in cfg:
        return SourceSpectrum.null(int(cfg["n"]))
    if default is not None:
        return default
    raise ConfigurationError("give a source (--source or --n)")


# ===== command handlers ====================================================


def _run_simulate(cfg):
    from .ensemble import HermitianState, eigenvalues, step_diffusion, _trial_rng

    source = _source_of(cfg)
    lo, hi, count = _check_range(cfg["tau_range"], "tau_range")
    if lo < 0:
        raise ConfigurationError("simulate needs tau_range start >= 0")
    taus = _axis(cfg["tau_range"])
    paths = int(cfg.get("trials", 1))
    seed = int(cfg.get("seed", 0))
    h0 = np.diag(np.array(source.eigenvalue_list(), dtype=complex))
    rows = []
    for p in range(paths):
        rng = _trial_rng(seed, p)
        state = HermitianState(entries=h0, time=0.0)
        prev = 0.0
        for tau in taus:
            state = step_diffusion(state, float(tau) - prev, rng)
            prev = float(tau)
            for idx, lam in enumerate(eigenvalues(state)):
                rows.append((p, float(tau), idx, float(lam)))
    return ["path", "tau", "index", "lambda"], rows


def _run_density(cfg):
    from .flow import density

    source = _source_of(cfg)
    tau = float(cfg["tau"])
    rows = [
        (float(lam), density(source, tau, float(lam)))
        for lam in _axis(cfg["grid"]["lambda"])
    ]
    return ["lambda", "rho"], rows


def _z_grid(cfg):
    grid = cfg.get("grid") or {}
    res = _axis(grid["re"])
    ims = _axis(grid["im"]) if "im" in grid else np.array([0.0])
    return [complex(r, i) for r in res for i in ims]


def _run_acp_scan(cfg):
    from .evaluators import acp

    source = _source_of(cfg)
    tau = float(cfg["tau"])
    rows = []
    for z in _z_grid(cfg):
        ev = acp(source, tau, z)
        rows.append(
            (z.real, z.imag, ev.value.real, ev.value.imag, ev.log_scale, ev.method)
        )
    return ["re_z", "im_z", "re_mantissa", "im_mantissa", "log_scale", "method"], rows


def _run_aicp_scan(cfg):
    from .evaluators import aicp

    source = _source_of(cfg)
    tau = float(cfg["tau"])
    rows = []
    for z in _z_grid(cfg):
        ev = aicp(source, tau, z)
        rows.append(
            (z.real, z.imag, ev.value.real, ev.value.imag, ev.log_scale, ev.method)
        )
    return ["re_z", "im_z", "re_mantissa", "im_mantissa", "log_scale", "method"], rows


def _run_pde_check(cfg):
    from .evaluators import pde_residual

    source = _source_of(cfg)
    tau = float(cfg["tau"])
    rows = []
    for name in ("acp", "aicp"):
        for z in _z_grid(cfg):
            r = pde_residual(name, source, tau, z)
            rows.append((name, z.real, z.imag, abs(r.residual), abs(r.wrong_sign)))
    return ["evaluator", "re_z", "im_z", "abs_residual", "abs_wrong_sign"], rows


def _run_green_scan(cfg):
    from .flow import saddle_exponent, solve_characteristics

    source = _source_of(cfg)
    tau = float(cfg["tau"])
    grid = cfg.get("grid") or {}
    if ("p_re" in grid) != ("p_im" in grid):
        raise ConfigurationError("saddle landscape needs both p_re and p_im axes")
    if "p_re" in grid:
        # landscape sub-mode: fix z, map the exponent over the p plane
        zs = _z_grid(cfg)
        if len(zs) != 1:
            raise ConfigurationError(
                "saddle landscape needs a single z (1-count re and im axes)"
            )
        z = zs[0]
        rows = []
        for pr in _axis(grid["p_re"]):
            for pi in _axis(grid["p_im"]):
                p = complex(pr, pi)
                try:
                    f = saddle_exponent(source, tau, z, p)
                except DysonflowError:
                    f = complex(math.nan, math.nan)
                rows.append((z.real, z.imag, pr, pi, f.real, f.imag))
        return ["re_z", "im_z", "re_p", "im_p", "re_f", "im_f"], rows
    rows = []
    for z in _z_grid(cfg):
        g = solve_characteristics(source, tau, z)
        rows.append(
            (z.real, z.imag, g.value.real, g.value.imag, g.root_index, g.residual)
        )
    return ["re_z", "im_z", "re_g", "im_g", "root_index", "residual"], rows


def _run_caustics(cfg):
    from .flow import caustics

    source = _source_of(cfg)
    if ("tau" in cfg) == ("tau_range" in cfg):
        raise ConfigurationError("caustics needs exactly one of tau or tau_range")
    taus = [float(cfg["tau"])] if "tau" in cfg else list(_axis(cfg["tau_range"]))
    rows = []
    for tau in taus:
        c = caustics(source, float(tau))
        for xi, z in zip(c.labels, c.positions):
            rows.append((float(tau), xi, z, c.merged))
    return ["tau", "xi_label", "z_position", "merged"], rows


def _run_airy_profile(cfg):
    from .asymptotics import acp_edge_profile, aicp_edge_profile

    n = int(cfg["n"])
    tau = float(cfg["tau"])
    etas = [float(e) for e in _axis(cfg["grid"]["eta"])]
    rows = []
    for family, prof in (
        ("acp", acp_edge_profile(n, tau, etas)),
        ("aicp-upper", aicp_edge_profile(n, tau, etas, side="upper")),
    ):
        for eta, rescaled, limit in prof:
            eta = complex(eta)
            limit = complex(limit)
            dev = abs(rescaled - limit) / max(abs(limit), 1e-300)
            rows.append(
                (family, eta.real, eta.imag, rescaled.real, rescaled.imag,
                 limit.real, limit.imag, dev)
            )
    return [
        "family", "re_eta", "im_eta", "re_rescaled", "im_rescaled",
        "re_limit", "im_limit", "rel_dev",
    ], rows


def _run_pearcey_profile(cfg):
    from .asymptotics import acp_cusp_profile, aicp_cusp_profile

    n = int(cfg["n"])
    # "n" here is the profile dimension, not a shorthand null source
    if "source" in cfg:
        source = SourceSpectrum.parse(cfg["source"])
    else:
        source = SourceSpectrum.symmetric_pair(1.0, 2)
    locs = source.locations
    if len(locs) != 2 or locs[0] != -locs[1]:
        raise ConfigurationError("pearcey-profile needs a symmetric two-source start")
    a = abs(locs[1])
    kappas = [float(k) for k in _axis(cfg["grid"]["kappa"])]
    etas = [float(e) for e in _axis(cfg["grid"]["eta"])]
    rows = []
    for family, prof in (
        ("acp", acp_cusp_profile(n, a, kappas, etas)),
        ("aicp-upper", aicp_cusp_profile(n, a, kappas, etas, side="upper")),
    ):
        for kappa, eta, rescaled, limit in prof:
            eta = complex(eta)
            limit = complex(limit)
            dev = abs(rescaled - limit) / max(abs(limit), 1e-300)
            rows.append(
                (family, float(kappa), eta.real, eta.imag, rescaled.real,
                 rescaled.imag, limit.real, limit.imag, dev)
            )
    return [
        "family", "kappa", "re_eta", "im_eta", "re_rescaled", "im_rescaled",
        "re_limit", "im_limit", "rel_dev",
    ], rows


def _run_kernel_grid(cfg):
    from .kernels import kernel

    source = _source_of(cfg)
    tau = float(cfg["tau"])
    rows = []
    for x in _axis(cfg["grid"]["x"]):
        for y in _axis(cfg["grid"]["y"]):
            k = kernel(source, tau, float(x), float(y))
            rows.append((float(x), float(y), k.real, k.imag))
    return ["x", "y", "re_k", "im_k"], rows


def _run_kernel_verify(cfg):
    from .kernels import kernel, kernel_bh

    source = _source_of(cfg)
    locs = source.locations
    mults = source.multiplicities
    if len(locs) != 2 or locs[0] != -locs[1] or mults[0] != mults[1]:
        raise ConfigurationError("kernel-verify needs a symmetric two-source start")
    a = abs(locs[1])
    n = source.dimension
    tau = float(cfg["tau"])
    rows = []
    for x in _axis(cfg["grid"]["x"]):
        for y in _axis(cfg["grid"]["y"]):
            ks = kernel(source, tau, float(x), float(y))
            kb = kernel_bh(a, n, tau, float(x), float(y))
            rel = abs(ks - kb) / max(abs(kb), 1e-300)
            rows.append(
                (float(x), float(y), ks.real, ks.imag, kb.real, kb.imag, rel)
            )
    return ["x", "y", "re_sum", "im_sum", "re_bh", "im_bh", "rel_err"], rows


def _run_mc_compare(cfg):
    from .ensemble import mc_acp, mc_aicp
    from .evaluators import acp, aicp

    source = _source_of(cfg)
    tau = float(cfg["tau"])
    trials = int(cfg.get("trials", 10000))
    seed = int(cfg.get("seed", 0))
    zs = _z_grid(cfg)
    floor = 0.1 * math.sqrt(tau)
    rows = []
    ests = mc_acp(source, tau, zs, trials, seed)
    for z, est in zip(zs, ests):
        exact = acp(source, tau, z).to_complex()
        score = abs(est.value - exact) / max(est.std_error, 1e-300)
        rows.append(
            ("acp", z.real, z.imag, est.value.real, est.value.imag,
             est.std_error, exact.real, exact.imag, score)
        )
    z_off = [z for z in zs if abs(z.imag) >= floor]
    if z_off:
        ests = mc_aicp(source, tau, z_off, trials, seed)
        for z, est in zip(z_off, ests):
            exact = aicp(source, tau, z).to_complex()
            score = abs(est.value - exact) / max(est.std_error, 1e-300)
            rows.append(
                ("aicp", z.real, z.imag, est.value.real, est.value.imag,
                 est.std_error, exact.real, exact.imag, score)
            )
    return [
        "family", "re_z", "im_z", "re_mc", "im_mc", "std_error",
        "re_exact", "im_exact", "z_score",
    ], rows


_HANDLERS = {
    "simulate": _run_simulate,
    "density": _run_density,
    "acp-scan": _run_acp_scan,
    "aicp-scan": _run_aicp_scan,
    "pde-check": _run_pde_check,
    "green-scan": _run_green_scan,
    "caustics": _run_caustics,
    "airy-profile": _run_airy_profile,
    "pearcey-profile": _run_pearcey_profile,
    "kernel-grid": _run_kernel_grid,
    "kernel-verify": _run_kernel_verify,
    "mc-compare": _run_mc_compare,
}


# ===== output ==============================================================


def _cell(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return str(v)


def _config_record(cfg: dict) -> dict:
    # out and format steer I/O, not the computation; identical data
    # must carry an identical echo regardless of where it lands
    return {k: v for k, v in cfg.items() if k not in ("out", "format")}


def _config_echo(cfg: dict) -> str:
    return json.dumps(_config_record(cfg), sort_keys=True, separators=(",", ":"))


def _write_output(cfg: dict, columns, rows) -> str:
    fmt = cfg.get("format", "csv")
    path = cfg.get("out") or f"{cfg['command']}.{fmt}"
    if fmt == "csv":
        lines = [
            f"# config: {_config_echo(cfg)}",
            f"# version: {__version__}",
            f"# seed: {cfg.get('seed', 'null')}",
            ",".join(columns),
        ]
        lines.extend(",".join(_cell(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        doc = {
            "config": _config_record(cfg),
            "version": __version__,
            "seed": cfg.get("seed"),
            "columns": list(columns),
            "rows": [
                [v if not isinstance(v, (np.integer, np.floating)) else float(v)
                 for v in row]
                for row in rows
            ],
        }
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
    with open(path, "w") as fh:
        fh.write(text)
    return path


def _fail(code: int, exc: Exception) -> int:
    record = {"error": type(exc).__name__, "message": str(exc), "exit": code}
    print(json.dumps(record, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="dysonflow",
        description="Spectral dynamics scans: simulation, transforms, "
        "limit shapes, kernels.",
    )
    parser.add_argument("--command", choices=_COMMANDS)
    parser.add_argument("--config", help="JSON config file; flags override it")
    parser.add_argument("--source", help='source spectrum, e.g. "-1:2,1:2"')
    parser.add_argument("--n", type=int, help="dimension of the null source")
    parser.add_argument("--tau", type=float)
    parser.add_argument("--tau-range", dest="tau_range", help="min:max:count")
    parser.add_argument(
        "--grid", action="append", help="axis spec var=min:max:count, repeatable"
    )
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=("csv", "json"))
    args = parser.parse_args(argv)

    try:
        cfg, provided = _build_config(args)
        cfg = _validate(cfg, provided)
        columns, rows = _HANDLERS[cfg["command"]](cfg)
    except (ConfigurationError, PreconditionError) as e:
        return _fail(2, e)
    except DysonflowError as e:
        return _fail(3, e)
    except OSError as e:
        return _fail(4, e)

    try:
        path = _write_output(cfg, columns, rows)
    except OSError as e:
        return _fail(4, e)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


if __name__ == "__main__":
    sys.exit(main())
