"""The ``lab`` command-line driver.

::

    lab <subcommand> [--config PATH] [--seed N] [--m M] [--d D] [--axis x|y]
        [--grid N] [--plot] [--out DIR] [--kind product|ttstar] [--ell A:B] [--r A:B]

Subcommands: ``lemmas``, ``kernel-decay``, ``operator-decay``,
``symmetries``, ``annulus``, ``square-function``, ``all``.  Each writes
``report.csv`` (and ``plot.svg`` with ``--plot``) into ``--out``.

A config file holds flat ``key = value`` lines (``#`` starts a comment)
using the long option names with dashes or underscores; command-line
flags override it.  Exit status: 0 when every check passes, 1 on a
numerical failure (failing rows are listed on stderr), 2 on a usage or
configuration error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

from . import experiments as ex
from .report import ExperimentReport, emit_csv, emit_svg

__all__ = ["ExperimentConfig", "UsageError", "parse_config_file", "parse_range", "build_config", "run", "main"]

SUBCOMMANDS = ("lemmas", "kernel-decay", "operator-decay", "symmetries", "annulus", "square-function", "all")


class UsageError(Exception):
    """Bad command line or configuration (exit status 2)."""


@dataclass
class ExperimentConfig:
    """Resolved settings for one ``lab`` invocation."""

    subcommand: str
    seed: int = 0
    m: int | None = None
    d: int | None = None
    axis: str | None = None
    grid: int | None = None
    kind: str | None = None
    ell: tuple | None = None
    r: tuple | None = None
    samples: int | None = None
    tol: float | None = None
    plot: bool = False
    out: str = "."

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise UsageError(f"unknown subcommand {self.subcommand!r}")
        if self.seed < 0:
            raise UsageError("seed must be nonnegative")
        for name in ("m", "d", "grid", "samples"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise UsageError(f"{name} must be a positive integer")
        if self.grid is not None and (self.grid & (self.grid - 1) or self.grid < 64):
            raise UsageError("grid must be a power of two >= 64")
        if self.axis not in (None, "x", "y"):
            raise UsageError("axis must be x or y")
        if self.kind not in (None, "product", "ttstar"):
            raise UsageError("kind must be product or ttstar")
        if self.tol is not None and not self.tol > 0:
            raise UsageError("tolerances must be positive")
        for name in ("ell", "r"):
            v = getattr(self, name)
            if v is not None and len(v) < 4:
                raise UsageError(f"{name} sweep needs at least 4 points")
        return self


_INT_KEYS = {"seed", "m", "d", "grid", "samples"}
_FLOAT_KEYS = {"tol"}
_RANGE_KEYS = {"ell", "r"}
_BOOL_KEYS = {"plot"}
_STR_KEYS = {"axis", "kind", "out"}
_KEYS = _INT_KEYS | _FLOAT_KEYS | _RANGE_KEYS | _BOOL_KEYS | _STR_KEYS


def parse_range(text: str) -> tuple:
    """``"2:10"`` (inclusive) or ``"2,4,8"`` to a tuple of ints."""
    text = text.strip()
    try:
        if ":" in text:
            a, b = (int(v) for v in text.split(":"))
            if b < a:
                raise UsageError(f"empty range {text!r}")
            return tuple(range(a, b + 1))
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise UsageError(f"bad range {text!r}; expected A:B or a comma list") from None
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise UsageError(f"range {text!r} must be increasing")
    return vals


def _convert(key: str, raw: str):
    try:
        if key in _INT_KEYS:
            return int(raw)
        if key in _FLOAT_KEYS:
            return float(raw)
    except ValueError:
        raise UsageError(f"bad value for {key}: {raw!r}") from None
    if key in _RANGE_KEYS:
        return parse_range(raw)
    if key in _BOOL_KEYS:
        low = raw.strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise UsageError(f"bad boolean for {key}: {raw!r}")
    return raw.strip()


def parse_config_file(path) -> dict:
    """Read flat ``key = value`` lines into a dict of converted values."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise UsageError(f"cannot read config {path}: {err}") from None
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _KEYS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = _convert(key, val)
    return out


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lab", description="Numerical experiments on curved Carleson-type operators.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="flat key=value file; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--axis", choices=("x", "y"))
    p.add_argument("--grid", type=int, help="line / grid size (power of two)")
    p.add_argument("--kind", choices=("product", "ttstar"), help="kernel-decay family")
    p.add_argument("--ell", help="ell sweep, A:B inclusive or comma list")
    p.add_argument("--r", help="sweep of log2 r for the product kernel")
    p.add_argument("--samples", type=int, help="random inputs per identity check")
    p.add_argument("--tol", type=float, help="override the tolerance of exact-identity checks")
    p.add_argument("--plot", action="store_true", default=None)
    p.add_argument("--out", help="output directory (default: current)")
    return p


def build_config(argv) -> ExperimentConfig:
    """Merge defaults, config file and flags (flags win)."""
    args = _parser().parse_args(argv)
    values = {}
    if args.config:
        values.update(parse_config_file(args.config))
    for key in _KEYS:
        v = getattr(args, key)
        if v is None:
            continue
        values[key] = parse_range(v) if key in _RANGE_KEYS else v
    return ExperimentConfig(subcommand=args.subcommand, **values).validate()


# --------------------------------------------------------------------------
# Suites
# --------------------------------------------------------------------------


def _n(cfg, default):
    return cfg.samples if cfg.samples is not None else default


def _tol(cfg, default):
    return cfg.tol if cfg.tol is not None else default


def suite_lemmas(cfg):
    s = cfg.seed
    return [
        ex.check_det_identity(s, n=_n(cfg, 10_000), tol=_tol(cfg, 1e-9)),
        ex.check_matrix_lower_bound(s, n=_n(cfg, 1000)),
        ex.check_gradient_identity(s, n=_n(cfg, 1000), tol=_tol(cfg, 1e-9)),
        ex.check_partition_plancherel(s),
        ex.check_vdc(s, n=_n(cfg, 200)),
        ex.check_sublevel(s),
    ]


def suite_kernel_decay(cfg):
    out = []
    if cfg.kind in (None, "product"):
        out.append(ex.check_kernel_support(cfg.seed))
        out.append(ex.check_product_decay(r_exponents=cfg.r or range(4, 11)))
    if cfg.kind in (None, "ttstar"):
        ms = (cfg.m,) if cfg.m else (2, 3)
        out.append(ex.check_ttstar_decay(ms=ms, ells=cfg.ell or range(2, 11)))
    return out


def suite_operator_decay(cfg):
    confs = [c for c in ex.SELL_CONFIGS
             if (cfg.m is None or c[0] == cfg.m) and (cfg.d is None or c[1] == cfg.d)
             and (cfg.axis is None or c[2] == cfg.axis)]
    if not confs:
        if cfg.m is None or cfg.d is None:
            raise UsageError("operator-decay needs both --m and --d outside the default configurations")
        axes = (cfg.axis,) if cfg.axis else ("y", "x")
        confs = [(cfg.m, cfg.d, a) for a in axes]
    grid = cfg.grid or 256
    return [ex.check_sell_decay(cfg.seed, configs=tuple(confs), ells=cfg.ell or range(1, 7), grid_size=grid,
                                oracle_size=min(64, grid))]


def suite_symmetries(cfg):
    cases = [("dilation", 2, 1), ("dilation", 2, 3), ("dilation", 3, 2),
             ("modulation", 2, 1), ("modulation", 3, 3), ("twist", 2, 1)]
    if cfg.m is not None:
        cases = [c for c in cases if c[1] == cfg.m]
    if cfg.d is not None:
        cases = [c for c in cases if c[2] == cfg.d]
    if cfg.m is not None and cfg.d is not None:
        m, d = cfg.m, cfg.d
        if not any(c[0] == "dilation" for c in cases):
            cases.insert(0, ("dilation", m, d))
        if (d == 1 or d == m) and not any(c[0] == "modulation" for c in cases):
            cases.append(("modulation", m, d))
    if not cases:
        raise UsageError("no symmetry identity applies to the requested (m, d)")
    return [ex.check_symmetries(cfg.seed, n=_n(cfg, 20), tol=_tol(cfg, 1e-10), cases=cases)]


def suite_annulus(cfg):
    out = []
    if cfg.m is None or cfg.m % 2 == 0:
        out.append(ex.check_even_vanishing(cfg.seed, ms=(cfg.m,) if cfg.m else (2, 4), n=_n(cfg, 20)))
        out.append(ex.check_term_one_constant(cfg.seed, m=cfg.m or 2))
    if cfg.m is None or cfg.m % 2 == 1:
        if cfg.m == 1:
            raise UsageError("annulus split needs m >= 2")
        out.append(ex.check_odd_domination(cfg.seed, ms=(cfg.m,) if cfg.m else (3, 5), n=_n(cfg, 10)))
    return out


def suite_square_function(cfg):
    return [ex.check_appendix(cfg.seed, n_domination=_n(cfg, 100)),
            ex.check_signed_sums(cfg.seed, m=cfg.m or 2)]


SUITES = {
    "lemmas": suite_lemmas,
    "kernel-decay": suite_kernel_decay,
    "operator-decay": suite_operator_decay,
    "symmetries": suite_symmetries,
    "annulus": suite_annulus,
    "square-function": suite_square_function,
}

# plot: (experiment name, x parameter, title)
PLOTS = {
    "lemmas": None,
    "kernel-decay": ("ttstar_decay", "ell", "TT* kernel maximum"),
    "operator-decay": ("sell_norm", "ell", "S_l operator norm"),
    "symmetries": None,
    "annulus": None,
    "square-function": None,
    "all": ("sell_norm", "ell", "S_l operator norm"),
}


def run(cfg: ExperimentConfig, stream=None, err=None) -> int:
    """Run ``cfg.subcommand``, write outputs and return the exit status."""
    stream = sys.stdout if stream is None else stream
    err = sys.stderr if err is None else err
    names = [n for n in SUITES] if cfg.subcommand == "all" else [cfg.subcommand]
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise UsageError(f"cannot create output directory {out}: {e}") from None
    results = []
    for name in names:
        results.extend(SUITES[name](cfg))
    report = ExperimentReport(seed=cfg.seed)
    for res in results:
        report.extend(res.report)
        print(res.line(), file=stream, flush=True)
    try:
        emit_csv(report, out / "report.csv")
    except OSError as e:
        raise UsageError(f"cannot write report to {out}: {e}") from None
    if cfg.plot:
        spec = PLOTS[cfg.subcommand]
        if cfg.subcommand == "kernel-decay" and cfg.kind == "product":
            spec = ("product_decay", "r", "product kernel maximum")
        if spec is None:
            print("warning: no decay profile to plot for this subcommand", file=err)
        else:
            experiment, xp, title = spec
            emit_svg(report, out / "plot.svg", xp, title, experiment)
    failures = report.failures()
    if failures:
        names = report.param_names()
        print(f"{len(failures)} failing row(s):", file=err)
        for row in failures:
            params = ", ".join(f"{k}={row['params'][k]}" for k in names if k in row["params"])
            print(f"  {row['experiment']} [{params}] value={row['value']}", file=err)
        return 1
    return 0


def main(argv=None) -> int:
    try:
        ex.lab_threads()
    except ValueError:
        print("lab: error: LAB_THREADS must be a positive integer", file=sys.stderr)
        return 2
    try:
        cfg = build_config(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except UsageError as e:
        print(f"lab: error: {e}", file=sys.stderr)
        return 2
    except (ex.co.ConfigError, ex.pl.DomainError) as e:
        print(f"lab: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
