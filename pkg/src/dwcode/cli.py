"""Command-line interface: ``dwcode <command> [options]``.

Commands: ``code-info``, ``sweep``, ``fit``, ``subfit``, ``hashing`` and
``export-code``. ``sweep`` also reads a plain-text ``key = value`` file
(``--config``) whose ``[sweep]`` section uses the long option names with
underscores; flags given on the command line override file values.
"""
from __future__ import annotations

import argparse
import configparser
import json
import os
import sys
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence


from . import __version__
from .analysis import PRESETS, FitError, collapse_csv, fit_subthreshold, fit_threshold, hashing_bound
from .code import BudgetError, count_short_pure_logicals, make_code, measure_kappa, verify_distance
from .experiment import DECODERS, WORKERS_ENV, SweepConfig, TrialStatistics, iter_sweep, parse_phi, size_kwargs
from .noise import format_eta, parse_eta

__all__ = ["main", "build_parser", "RunConfig", "parse_grid"]

_ALIASES = {"hex": "css", "hex-periodic": "css-periodic", "hex-coprime": "css-coprime", "488": "css-488"}


class ConfigError(ValueError):
    """Invalid run configuration."""


def parse_grid(text: str) -> tuple[float, ...]:
    """``"0.1,0.12"`` or ``"start:stop:step"`` (stop inclusive) into a tuple of floats."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        a, b, c = (Fraction(v) for v in text.split(":"))
        if c <= 0:
            raise ConfigError("grid step must be positive")
        out = []
        v = a
        while v <= b:
            out.append(float(v))
            v += c
        return tuple(out)
    return tuple(float(v) for v in text.split(","))


def _sizes(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in str(text).replace(" ", "").split(",") if v)


def _family(name: str) -> str:
    return _ALIASES.get(name.lower(), name.lower())


@dataclass
class RunConfig:
    """Parsed sweep configuration plus output location."""

    sweep: SweepConfig
    out: str

    @classmethod
    def from_sources(cls, args: argparse.Namespace) -> "RunConfig":
        vals: dict[str, str] = {}
        if getattr(args, "preset", None):
            if args.preset not in PRESETS:
                raise ConfigError(f"unknown preset {args.preset!r}; choose from {', '.join(PRESETS)}")
            for k, v in PRESETS[args.preset].items():
                vals[k] = ",".join(str(x) for x in v) if isinstance(v, tuple) else str(v)
        if getattr(args, "config", None):
            cp = configparser.ConfigParser()
            if not cp.read(args.config):
                raise ConfigError(f"cannot read config file {args.config!r}")
            if cp.has_section("sweep"):
                vals.update(dict(cp.items("sweep")))
        for key in ("family", "sizes", "p_grid", "eta", "decoder", "kappa", "phi", "trials", "max_failures",
                    "seed", "block_size", "workers", "phase", "twist", "out"):
            v = getattr(args, key, None)
            if v is not None:
                vals[key] = str(v)
        if getattr(args, "timing", False):
            vals["timing"] = "true"
        for req in ("family", "sizes", "p_grid"):
            if req not in vals:
                raise ConfigError(f"missing required setting {req!r}")
        try:
            trials = int(vals.get("trials", "10000"))
            if trials < 1:
                raise ConfigError("trials must be >= 1")
            workers = vals.get("workers")
            cfg = SweepConfig(
                family=_family(vals["family"]),
                sizes=_sizes(vals["sizes"]),
                p_grid=parse_grid(vals["p_grid"]),
                eta=parse_eta(vals.get("eta", "0.5")),
                decoder=vals.get("decoder", "restriction"),
                kappa=Fraction(vals["kappa"]) if vals.get("kappa") else None,
                phi=parse_phi(vals["phi"]) if vals.get("phi") else None,
                trials=trials,
                max_failures=int(vals["max_failures"]) if vals.get("max_failures") else None,
                seed=int(vals.get("seed", "0")),
                block_size=int(vals.get("block_size", "10000")),
                workers=int(workers) if workers else None,
                phase=int(vals["phase"]) if vals.get("phase") else None,
                twist=int(vals.get("twist", "1")),
                timing=vals.get("timing", "false").lower() in ("1", "true", "yes"),
            )
        except ConfigError:
            raise
        except (ValueError, ZeroDivisionError) as exc:
            raise ConfigError(str(exc)) from exc
        out = vals.get("out", "sweep")
        outdir = os.path.dirname(os.path.abspath(out))
        if not os.path.isdir(outdir) or not os.access(outdir, os.W_OK):
            raise ConfigError(f"output directory {outdir!r} is not writable")
        return cls(cfg, out)


def _add_code_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("family", help="code family, e.g. x3z3, css, dw, x3z3-periodic, css-488, xzzx")
    p.add_argument("--d", type=int, help="distance of open codes")
    p.add_argument("--L", type=int, help="linear size of periodic codes")
    p.add_argument("--k", type=int, help="size index of co-prime codes")
    p.add_argument("--kappa", help="domain-wall density as a rational, e.g. 2/3")
    p.add_argument("--phi", help="orientation token, e.g. 0, pi/4, 1*pi/6")
    p.add_argument("--phase", type=int)
    p.add_argument("--twist", type=int, default=1)


def _build_code(args: argparse.Namespace):
    kappa = Fraction(args.kappa) if args.kappa else None
    phi = parse_phi(args.phi) if args.phi else None
    return make_code(_family(args.family), d=args.d, L=args.L, k=args.k, kappa=kappa, phi=phi, phase=args.phase, twist=args.twist)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dwcode", description="Domain-wall colour-code toolkit")
    ap.add_argument("--version", action="version", version=f"dwcode {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("code-info", help="report parameters of one code")
    _add_code_args(p)
    p.add_argument("--distance-budget", type=int, default=20_000_000)
    p.add_argument("--logical-cap", type=int, default=None, help="weight cap for pure-logical counts (default d)")
    p.add_argument("--json", dest="json_out", help="also write the report as JSON")

    p = sub.add_parser("sweep", help="Monte Carlo sweep over sizes and error rates")
    p.add_argument("--config", help="key = value file with a [sweep] section")
    p.add_argument("--preset", help=f"named preset: {', '.join(PRESETS)}")
    p.add_argument("--family")
    p.add_argument("--sizes", help="comma-separated sizes (d, L or k by family)")
    p.add_argument("--p-grid", dest="p_grid", help="comma list or start:stop:step")
    p.add_argument("--eta", help="bias, decimal or inf")
    p.add_argument("--decoder", choices=DECODERS)
    p.add_argument("--kappa")
    p.add_argument("--phi")
    p.add_argument("--phase", type=int)
    p.add_argument("--twist", type=int)
    p.add_argument("--trials", type=int)
    p.add_argument("--max-failures", dest="max_failures", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--block-size", dest="block_size", type=int)
    p.add_argument("--workers", type=int, help=f"worker processes (default ${WORKERS_ENV} or 1)")
    p.add_argument("--timing", action="store_true", help="record wall time (outputs are then not byte-reproducible)")
    p.add_argument("--out", help="output prefix; writes PREFIX.jsonl and PREFIX.csv")

    p = sub.add_parser("fit", help="critical-exponent threshold fit")
    p.add_argument("inputs", nargs="+", help="sweep outputs (.csv or .jsonl)")
    p.add_argument("--out", help="JSON report path")
    p.add_argument("--collapse", help="rescaled-collapse CSV path")
    p.add_argument("--min-failures", type=int, default=100)

    p = sub.add_parser("subfit", help="sub-threshold log-linear scaling fit")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--abscissa", choices=("d", "N_q"), default="d")
    p.add_argument("--p", type=float, help="keep only rows at this error rate")
    p.add_argument("--out")

    p = sub.add_parser("hashing", help="hashing bound of the biased channel")
    p.add_argument("--eta", nargs="+", default=["0.5", "1", "3", "10", "30", "100", "1000", "inf"])
    p.add_argument("--out")

    p = sub.add_parser("export-code", help="write a code as JSON")
    _add_code_args(p)
    p.add_argument("--out")
    return ap


def _write(path: str | None, text: str) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_code_info(args: argparse.Namespace) -> int:
    code = _build_code(args)
    rep: dict[str, object] = {"family": code.family, "n": code.n, "k": code.k, "m": code.m}
    errors: dict[str, str] = {}
    d = args.d
    if d is not None:
        try:
            rep["distance"] = d if verify_distance(code, d, budget=args.distance_budget) else None
        except BudgetError as exc:
            errors["distance"] = str(exc)
    try:
        kap = measure_kappa(code.lattice, code.mask)
        rep["kappa"] = None if kap is None else str(kap)
    except Exception as exc:  # reported per field, never fatal
        errors["kappa"] = str(exc)
    wts = Counter(int(w) for w in (code.gx | code.gz).sum(axis=1))
    rep["stabilizer_weights"] = {str(k): v for k, v in sorted(wts.items())}
    cap = args.logical_cap if args.logical_cap is not None else d
    if cap:
        for t in ("X", "Z"):
            try:
                rep[f"pure_{t}_logicals_le_{cap}"] = count_short_pure_logicals(code, t, cap)
            except BudgetError as exc:
                errors[f"pure_{t}_logicals"] = str(exc)
    if errors:
        rep["errors"] = errors
    for k, v in rep.items():
        print(f"{k}: {v}")
    if args.json_out:
        _write(args.json_out, json.dumps(rep, indent=2, sort_keys=True) + "\n")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    rc = RunConfig.from_sources(args)
    stats = TrialStatistics()
    marker = rc.out + ".incomplete"
    try:
        for pt in iter_sweep(rc.sweep):
            stats.points.append(pt)
            print(f"{pt.code:>24} p={pt.p:<8g} trials={pt.trials:<9d} failures={pt.failures:<8d} "
                  f"p_L={pt.p_L:.5g} [{pt.ci_lo:.5g}, {pt.ci_hi:.5g}]", flush=True)
    except BaseException as exc:
        _write(rc.out + ".jsonl", stats.to_jsonl())
        _write(rc.out + ".csv", stats.to_csv())
        _write(marker, f"{type(exc).__name__}: {exc}\n")
        raise
    _write(rc.out + ".jsonl", stats.to_jsonl())
    _write(rc.out + ".csv", stats.to_csv())
    if os.path.exists(marker):
        os.remove(marker)
    return 0


def _load(paths: Sequence[str]) -> TrialStatistics:
    out = TrialStatistics()
    for p in paths:
        out.extend(TrialStatistics.load(p))
    return out


def cmd_fit(args: argparse.Namespace) -> int:
    stats = _load(args.inputs)
    est = fit_threshold(stats, min_failures=args.min_failures)
    text = est.to_json() + "\n"
    print(f"p_th = {est.p_th:.5f} +/- {est.stderr['p_th']:.5f}  beta = {est.beta:.3f}  "
          f"chi2/dof = {est.residual / est.dof:.3g}{'  (extrapolated)' if est.extrapolated else ''}")
    if args.out:
        _write(args.out, text)
    if args.collapse:
        _write(args.collapse, collapse_csv(stats, est))
    return 0


def cmd_subfit(args: argparse.Namespace) -> int:
    rows = [pt for pt in _load(args.inputs) if args.p is None or abs(pt.p - args.p) < 1e-12]
    fit = fit_subthreshold(rows, args.abscissa)
    _write(args.out, fit.to_json() + "\n")
    if args.out:
        print(f"slope = {fit.slope:.6g}  intercept = {fit.intercept:.6g}")
    return 0


def cmd_hashing(args: argparse.Namespace) -> int:
    lines = ["eta,p_hash"]
    for tok in args.eta:
        e = parse_eta(tok)
        lines.append(f"{format_eta(e)},{hashing_bound(e)!r}")
    _write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_export_code(args: argparse.Namespace) -> int:
    code = _build_code(args)
    _write(args.out, code.to_json() + "\n")
    return 0


_COMMANDS = {
    "code-info": cmd_code_info,
    "sweep": cmd_sweep,
    "fit": cmd_fit,
    "subfit": cmd_subfit,
    "hashing": cmd_hashing,
    "export-code": cmd_export_code,
}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, FitError, BudgetError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
