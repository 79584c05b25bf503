"""Command-line front end: ``qpt-kg {spectrum,wavefunction,verify,scan}``.

All quantities are in natural units (hbar = c = 1).  Data goes to ``--out``
or, when no path is given, to stdout; diagnostics go to stderr.

Exit codes: 0 ok (an empty spectrum is ok), 2 invalid input, 3 numerical
failure, 4 requested state does not exist, 5 a binding verification check
failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
import warnings

import numpy as np

from .nu_engine import NUDomainError
from .spectrum import (
    BoundState,
    ParameterError,
    ProblemParams,
    SpectrumReport,
    solve_spectrum,
)

log = logging.getLogger("qpt_kg")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_NO_STATE, EXIT_VERIFY = 0, 2, 3, 4, 5

SPECTRUM_COLUMNS = ["n", "branch", "E", "eps", "jacobi_a", "jacobi_b", "residual"]
WAVEFUNCTION_COLUMNS = ["coordinate", "psi", "abs_psi2"]
VERIFY_COLUMNS = [
    "n",
    "branch",
    "E",
    "residual_max",
    "conv_order",
    "perturbation_ratio",
    "decay_limit",
    "origin_finite",
    "node_count",
    "passed",
]
SCAN_COLUMNS = ["V0", "q", "count", "E_min", "E_max"]

DEFAULTS = {
    "m0": 1.0,
    "v0": None,
    "alpha": 1.0,
    "q": 1.0,
    "n_max": 3,
    "tol": 1e-10,
    "scan_points": 10_000,
    "condition": "printed",
    "points": 201,
    "range": None,
    "variable": "x",
    "convention": "L2",
    "n": 0,
    "index": 0,
    "format": "json",
    "out": None,
    "fd": False,
    "v0_range": None,
    "q_range": None,
}


class InputError(ValueError):
    pass


class NoSuchState(LookupError):
    pass


# ---------------------------------------------------------------- serialization


def _num(v):
    if v is None:
        return None
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    return float(v)


def dumps_json(obj) -> str:
    # allow_nan=False: NaN/Inf abort the run with exit 3
    return json.dumps(obj, indent=2, allow_nan=False, ensure_ascii=False) + "\n"


def dumps_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        out = []
        for v in row:
            if isinstance(v, float) and not np.isfinite(v):
                raise ValueError(f"non-finite value {v!r} cannot be serialized")
            out.append("" if v is None else repr(v) if isinstance(v, float) else v)
        w.writerow(out)
    return buf.getvalue()


def spectrum_to_dict(report: SpectrumReport) -> dict:
    states = []
    for st, res in zip(report.states, report.residuals):
        d = st.as_dict()
        d["residual"] = _num(res)
        states.append(d)
    return {
        "kind": "spectrum",
        "units": "natural (hbar = c = 1)",
        "params": report.params.as_dict(),
        "condition": report.condition,
        "windows": [[_num(a), _num(b)] for a, b in report.windows],
        "states": states,
        "diagnostics": report.diagnostics,
    }


def spectrum_from_dict(d: dict) -> SpectrumReport:
    states, residuals = [], []
    for s in d["states"]:
        states.append(BoundState(**{k: s[k] for k in ("n", "E", "branch", "eps", "jacobi_a", "jacobi_b")}))
        residuals.append(s.get("residual"))
    return SpectrumReport(
        params=ProblemParams(**d["params"]),
        states=states,
        windows=[tuple(w) for w in d["windows"]],
        condition=d["condition"],
        residuals=residuals,
        diagnostics=d["diagnostics"],
    )


def read_report(text: str):
    """Parse a JSON document written by this CLI; spectra come back as SpectrumReport."""
    d = json.loads(text)
    if d.get("kind") == "spectrum":
        return spectrum_from_dict(d)
    return d


def read_csv(text: str) -> list[dict]:
    return list(csv.DictReader(io.StringIO(text)))


def _spectrum_rows(report):
    for st, res in zip(report.states, report.residuals):
        yield [st.n, st.branch, float(st.E), float(st.eps), float(st.jacobi_a), float(st.jacobi_b), _num(res)]


# ---------------------------------------------------------------- config


def _load_config(path):
    if path is None:
        return {}
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise InputError("config must be a JSON object")
    cfg = {}
    for key, val in raw.items():
        k = key.lstrip("-").replace("-", "_").lower()
        if k not in DEFAULTS:
            raise InputError(f"unknown config key {key!r}")
        cfg[k] = val
    return cfg


def resolve(args) -> dict:
    """defaults < config file < command-line flags."""
    cfg = dict(DEFAULTS)
    cfg.update(_load_config(args.config))
    for k in DEFAULTS:
        v = getattr(args, k, None)
        if v is not None and v is not False:
            cfg[k] = v
    return cfg


def _params(cfg, v0=None, q=None) -> ProblemParams:
    v0 = cfg["v0"] if v0 is None else v0
    q = cfg["q"] if q is None else q
    if v0 is None:
        raise InputError("--v0 is required")
    try:
        return ProblemParams(m0=float(cfg["m0"]), V0=float(v0), alpha=float(cfg["alpha"]), q=float(q))
    except (TypeError, ValueError) as exc:
        raise InputError(str(exc)) from exc


def _check_common(cfg):
    if int(cfg["n_max"]) < 0:
        raise InputError("--n-max must be >= 0")
    if not float(cfg["tol"]) > 0:
        raise InputError("--tol must be > 0")
    if cfg["condition"] not in ("printed", "nu"):
        raise InputError("--condition must be 'printed' or 'nu'")
    if cfg["format"] not in ("json", "csv"):
        raise InputError("--format must be 'json' or 'csv'")


def _emit(text: str, cfg):
    if cfg["out"]:
        with open(cfg["out"], "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _spectrum(cfg, verify=True) -> SpectrumReport:
    p = _params(cfg)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return solve_spectrum(
            p,
            n_max=int(cfg["n_max"]),
            tol=float(cfg["tol"]),
            scan_points=int(cfg["scan_points"]),
            condition=cfg["condition"],
            verify=verify,
        )


# ---------------------------------------------------------------- commands


def cmd_spectrum(cfg) -> int:
    _check_common(cfg)
    report = _spectrum(cfg)
    if cfg["format"] == "json":
        _emit(dumps_json(spectrum_to_dict(report)), cfg)
    else:
        _emit(dumps_csv(SPECTRUM_COLUMNS, _spectrum_rows(report)), cfg)
    log.info("%d state(s) found", len(report.states))
    return EXIT_OK


def cmd_wavefunction(cfg) -> int:
    from .wavefunction import normalize, sample

    _check_common(cfg)
    n = int(cfg["n"])
    if n < 0:
        raise InputError("--n must be >= 0")
    if cfg["variable"] not in ("x", "s"):
        raise InputError("--variable must be 'x' or 's'")
    if cfg["convention"] not in ("L2", "unnormalized"):
        raise InputError("--convention must be 'L2' or 'unnormalized'")
    if int(cfg["points"]) < 2:
        raise InputError("--points must be >= 2")
    cfg = dict(cfg, n_max=max(n, 0))
    report = _spectrum(cfg, verify=False)
    matches = [st for st in report.states if st.n == n]
    idx = int(cfg["index"])
    if not 0 <= idx < len(matches):
        raise NoSuchState(f"no state with n={n} (index {idx}); {len(matches)} found at this level")
    state = matches[idx]
    p = report.params
    rng = tuple(float(v) for v in cfg["range"]) if cfg["range"] is not None else None
    sf = sample(state, p, cfg["variable"], int(cfg["points"]), rng, cfg["convention"])
    coords = [float(v) for v in sf.nodes]
    vals = [float(v) for v in sf.values]
    if cfg["format"] == "json":
        doc = {
            "kind": "wavefunction",
            "units": "natural (hbar = c = 1)",
            "params": p.as_dict(),
            "state": state.as_dict(),
            "variable": sf.variable,
            "norm_constant": normalize(state, p) if cfg["convention"] == "L2" else 1.0,
            "meta": sf.meta,
            "coordinate": coords,
            "psi": vals,
            "abs_psi2": [v * v for v in vals],
        }
        _emit(dumps_json(doc), cfg)
    else:
        _emit(dumps_csv(WAVEFUNCTION_COLUMNS, ([c, v, v * v] for c, v in zip(coords, vals))), cfg)
    return EXIT_OK


def _report_dict(rep) -> dict:
    return {
        "state": rep.state.as_dict(),
        "residual_max": rep.residual_max,
        "conv_order": rep.conv_order,
        "conv_fit_residual": rep.conv_fit_residual,
        "oracle_energy": rep.oracle_energy,
        "flags": {k: bool(v) for k, v in rep.flags.items()},
        "binding": list(rep.binding),
        "passed": rep.passed,
        "details": {
            "residuals_by_h": [[h, r] for h, r in rep.details["residuals_by_h"].items()],
            "perturbation_ratio": rep.details["perturbation_ratio"],
            "log_slopes": rep.details["log_slopes"],
            "phi_s_exp": rep.details["phi_s_exp"],
            "nodes": rep.details["nodes"],
            "floor_hit": rep.details["floor_hit"],
        },
    }


def cmd_verify(cfg) -> int:
    from .verify import limit_checks, verify_state

    _check_common(cfg)
    report = _spectrum(cfg, verify=False)
    p = report.params
    reps = [verify_state(st, p, with_fd=bool(cfg["fd"])) for st in report.states]
    limits = {k: bool(v) for k, v in limit_checks(p).items()}
    if cfg["format"] == "json":
        doc = {
            "kind": "verify",
            "params": p.as_dict(),
            "condition": report.condition,
            "reports": [_report_dict(r) for r in reps],
            "limit_checks": limits,
        }
        _emit(dumps_json(doc), cfg)
    else:
        rows = (
            [
                r.state.n,
                r.state.branch,
                float(r.state.E),
                r.residual_max,
                r.conv_order,
                float(r.details["perturbation_ratio"]),
                r.flags["decay_limit"],
                r.flags["origin_finite"],
                r.flags["node_count"],
                r.passed,
            ]
            for r in reps
        )
        _emit(dumps_csv(VERIFY_COLUMNS, rows), cfg)
    failed = [r for r in reps if not r.passed]
    for r in failed:
        bad = [k for k in r.binding if not r.flags[k]]
        log.error("n=%d E=%r failed binding checks: %s", r.state.n, r.state.E, ", ".join(bad))
    return EXIT_VERIFY if failed else EXIT_OK


def _axis(spec, name):
    try:
        start, stop, steps = float(spec[0]), float(spec[1]), int(spec[2])
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"{name} needs START STOP STEPS") from exc
    if steps < 1 or not (np.isfinite(start) and np.isfinite(stop)):
        raise InputError(f"{name}: STEPS must be >= 1 and bounds finite")
    return [float(v) for v in np.linspace(start, stop, steps)]


def cmd_scan(cfg) -> int:
    _check_common(cfg)
    v0s = _axis(cfg["v0_range"], "--v0-range") if cfg["v0_range"] is not None else [_params(cfg).V0]
    qs = _axis(cfg["q_range"], "--q-range") if cfg["q_range"] is not None else [float(cfg["q"])]
    grid = [(v0, q) for v0 in v0s for q in qs]
    for v0, q in grid:
        _params(cfg, v0=v0, q=q)
    rows = []
    for v0, q in grid:
        rep = _spectrum(dict(cfg, v0=v0, q=q), verify=False)
        energies = [st.E for st in rep.states]
        rows.append(
            {
                "V0": v0,
                "q": q,
                "count": len(energies),
                "E_min": min(energies) if energies else None,
                "E_max": max(energies) if energies else None,
            }
        )
    if cfg["format"] == "json":
        doc = {
            "kind": "scan",
            "base": {"m0": float(cfg["m0"]), "alpha": float(cfg["alpha"]), "n_max": int(cfg["n_max"])},
            "condition": cfg["condition"],
            "rows": rows,
        }
        _emit(dumps_json(doc), cfg)
    else:
        _emit(dumps_csv(SCAN_COLUMNS, ([r[c] for c in SCAN_COLUMNS] for r in rows)), cfg)
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum,
    "wavefunction": cmd_wavefunction,
    "verify": cmd_verify,
    "scan": cmd_scan,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m0", type=float, help="rest mass (default 1)")
    common.add_argument("--v0", type=float, help="well depth V0")
    common.add_argument("--alpha", type=float, help="range parameter, > 0 (default 1)")
    common.add_argument("--q", type=float, help="deformation, -1 < q <= 1, q != 0 (default 1)")
    common.add_argument("--n-max", dest="n_max", type=int, help="highest quantum number (default 3)")
    common.add_argument("--tol", type=float, help="bisection tolerance on E/m0 (default 1e-10)")
    common.add_argument("--scan-points", dest="scan_points", type=int, help="root scan resolution")
    common.add_argument("--condition", choices=["printed", "nu"], help="quantization condition")
    common.add_argument("--format", choices=["json", "csv"])
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--config", metavar="PATH", help="JSON object mirroring these flags")

    parser = argparse.ArgumentParser(prog="qpt-kg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("spectrum", parents=[common], help="bound-state energies")

    wf = sub.add_parser("wavefunction", parents=[common], help="sample one eigenfunction")
    wf.add_argument("--n", type=int, help="quantum number (default 0)")
    wf.add_argument("--index", type=int, help="which root of level n, in E order (default 0)")
    wf.add_argument("--variable", choices=["x", "s"])
    wf.add_argument("--points", type=int)
    wf.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"))
    wf.add_argument("--convention", choices=["L2", "unnormalized"])

    ver = sub.add_parser("verify", parents=[common], help="run the numerical oracles on every state")
    ver.add_argument("--fd", action="store_true", help="also run the finite-difference spectrum")

    sc = sub.add_parser("scan", parents=[common], help="count states over a (V0, q) grid")
    sc.add_argument("--v0-range", dest="v0_range", nargs=3, metavar=("START", "STOP", "STEPS"))
    sc.add_argument("--q-range", dest="q_range", nargs=3, metavar=("START", "STOP", "STEPS"))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = resolve(args)
        return COMMANDS[args.command](cfg)
    except (InputError, ParameterError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NoSuchState as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_STATE
    except (ArithmeticError, NUDomainError, ValueError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
