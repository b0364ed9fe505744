"""Parameter sweeps, correction-window bounds, validation suite, and CLI.

The CLI exposes four subcommands:

* ``sweep``    - fidelity vs error size for one or more modes/couplings
* ``bounds``   - error-size window where correction meets a criterion
* ``validate`` - run the property suite and report pass/fail per item
* ``cycle``    - dump one trajectory cycle by cycle (debugging aid)

Results are emitted as CSV or JSON rows; re-reading a CSV and re-emitting
it reproduces the file byte for byte. Exit codes: 0 success, 1 validation
failure, 2 bad configuration.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

from . import validation
from .codes import CODE_NAMES
from .engine import MODES, CycleConfig, EnsembleStats, resolve_config, run_ensemble, trajectory_trace
from .error_model import ERROR_KINDS, analytic_fidelity

RESULT_COLUMNS = (
    "code",
    "mode",
    "alpha_tau",
    "g_tau",
    "n_traj",
    "mean_fidelity",
    "std_err",
    "oracle_fidelity",
    "seed",
)


@dataclass(frozen=True)
class SweepSpec:
    """Grid of (alpha_tau, g_tau, mode) points for one code."""

    code: str
    modes: tuple[str, ...]
    alpha_taus: tuple[float, ...]
    g_taus: tuple[float, ...]
    n_traj: int
    master_seed: int
    out_path: Optional[str] = None
    error_kind: str = "gaussian"
    cycles: int = 1
    substeps: Optional[int] = None
    initial_state: str = "codeword"
    n_workers: Optional[int] = None

    def __post_init__(self):
        if self.code not in CODE_NAMES:
            raise ValueError(f"unknown code {self.code!r}")
        if not self.modes or any(m not in MODES for m in self.modes):
            raise ValueError(f"modes must be a nonempty subset of {MODES}")
        for name, grid in (("alpha_tau", self.alpha_taus), ("g_tau", self.g_taus)):
            if not grid:
                raise ValueError(f"{name} grid must be nonempty")
            if list(grid) != sorted(grid):
                raise ValueError(f"{name} grid must be sorted ascending")
        if self.n_traj < 1:
            raise ValueError("n_traj must be >= 1")


def oracle_model_name(code: str, mode: str, error_kind: str) -> Optional[str]:
    """Analytic model matching a sweep row, if one exists."""
    if mode == "none":
        if code == "unencoded1":
            return "unenc_flip_gauss" if error_kind == "gaussian" else "unenc_flip_binary"
        if code == "unencoded1_arb":
            return "unenc_arb_gauss" if error_kind == "gaussian" else "unenc_arb_binary"
    if mode == "projective" and code == "bitflip3" and error_kind == "gaussian":
        return "proj_ec_bitflip3"
    return None


def _stats_row(stats: EnsembleStats, oracle: Optional[float]) -> dict:
    cfg = stats.config
    return {
        "code": cfg.code,
        "mode": cfg.mode,
        "alpha_tau": cfg.alpha_tau,
        "g_tau": cfg.g_tau,
        "n_traj": stats.n_traj,
        "mean_fidelity": stats.mean_fidelity,
        "std_err": stats.std_err,
        "oracle_fidelity": oracle,
        "seed": stats.master_seed,
    }


def run_sweep(spec: SweepSpec, progress: Optional[Callable[[dict], None]] = None) -> list[dict]:
    """One ensemble per (alpha_tau, g_tau, mode) point, with oracle columns."""
    rows = []
    for mode in spec.modes:
        model = oracle_model_name(spec.code, mode, spec.error_kind)
        for g_tau in spec.g_taus:
            for alpha_tau in spec.alpha_taus:
                config = CycleConfig(
                    code=spec.code,
                    alpha_tau=alpha_tau,
                    g_tau=g_tau,
                    mode=mode,
                    error_kind=spec.error_kind,
                    cycles=spec.cycles,
                    substeps=spec.substeps,
                    initial_state=spec.initial_state,
                )
                stats = run_ensemble(config, spec.n_traj, spec.master_seed, spec.n_workers)
                oracle = analytic_fidelity(model, alpha_tau) if model else None
                row = _stats_row(stats, oracle)
                rows.append(row)
                if progress is not None:
                    progress(row)
    return rows


def _format_cell(value) -> str:
    if value is None:
        return ""
    return repr(value) if isinstance(value, float) else str(value)


def write_results_csv(rows: Sequence[dict], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(RESULT_COLUMNS)
    for row in rows:
        writer.writerow([_format_cell(row[c]) for c in RESULT_COLUMNS])


def read_results_csv(stream) -> list[dict]:
    reader = csv.reader(stream)
    header = next(reader)
    if tuple(header) != RESULT_COLUMNS:
        raise ValueError(f"unexpected header {header}")
    out = []
    for raw in reader:
        row = dict(zip(RESULT_COLUMNS, raw))
        for key in ("alpha_tau", "g_tau", "mean_fidelity", "std_err"):
            row[key] = float(row[key])
        row["oracle_fidelity"] = float(row["oracle_fidelity"]) if row["oracle_fidelity"] else None
        row["n_traj"] = int(row["n_traj"])
        row["seed"] = int(row["seed"])
        out.append(row)
    return out


def results_to_csv_bytes(rows: Sequence[dict]) -> bytes:
    buf = io.StringIO()
    write_results_csv(rows, buf)
    return buf.getvalue().encode()


# ---------------------------------------------------------------------------
# correction-window bounds


@dataclass(frozen=True)
class BoundResult:
    """Error-size window where correction meets the improvement criterion.

    `lower`/`upper` are the window edges in alpha_tau with propagated
    statistical uncertainties; a None lower (upper) means the window
    reaches the bottom (top) of the scanned grid. `window` is False when
    the criterion is never met on the grid.
    """

    g_tau: float
    criterion: str
    window: bool
    lower: Optional[float] = None
    lower_err: Optional[float] = None
    upper: Optional[float] = None
    upper_err: Optional[float] = None
    n_traj: int = 0
    master_seed: int = 0


CRITERIA = {"factor_two": 2.0, "any_improvement": 1.0}

_UNENCODED_BASELINE = {
    "bitflip3": "unenc_flip_gauss",
    "five_qubit": "unenc_arb_gauss",
}


def improvement_gap(
    code: str,
    alpha_tau: float,
    g_tau: float,
    criterion: str,
    n_traj: int,
    master_seed: int,
    mode: str = "weak",
    n_workers: Optional[int] = None,
) -> tuple[float, float]:
    """(1 - f_corrected) - (1 - f_unencoded)/factor and its standard error.

    Negative values mean the correction meets the criterion at this error
    size. The unencoded baseline is the exact Gaussian closed form, so
    only the corrected ensemble contributes noise.
    """
    factor = CRITERIA[criterion]
    config = CycleConfig(code=code, alpha_tau=alpha_tau, g_tau=g_tau, mode=mode)
    stats = run_ensemble(config, n_traj, master_seed, n_workers)
    baseline = analytic_fidelity(_UNENCODED_BASELINE[code], alpha_tau)
    gap = (1.0 - stats.mean_fidelity) - (1.0 - baseline) / factor
    return gap, stats.std_err


def _refine_crossing(
    gap_fn: Callable[[float, int], tuple[float, float]],
    x_neg: float,
    g_neg: float,
    x_pos: float,
    g_pos: float,
    n_traj: int,
    tol: float = 0.005,
    max_iter: int = 12,
) -> tuple[float, float]:
    """Regula falsi on noisy gap estimates; returns (root, uncertainty)."""
    se = 0.0
    for _ in range(max_iter):
        if abs(x_pos - x_neg) <= tol:
            break
        denom = g_pos - g_neg
        if denom == 0.0:
            break
        x_mid = x_neg + (x_pos - x_neg) * (-g_neg) / denom
        span = abs(x_pos - x_neg)
        lo, hi = min(x_neg, x_pos), max(x_neg, x_pos)
        x_mid = min(max(x_mid, lo + 0.1 * span), hi - 0.1 * span)
        g_mid, se = gap_fn(x_mid, n_traj)
        if g_mid < 0.0:
            x_neg, g_neg = x_mid, g_mid
        else:
            x_pos, g_pos = x_mid, g_mid
        slope = abs(g_pos - g_neg) / max(abs(x_pos - x_neg), 1e-9)
        if slope > 0.0 and se / slope > abs(x_pos - x_neg):
            break  # statistical resolution reached
    root = 0.5 * (x_neg + x_pos)
    slope = abs(g_pos - g_neg) / max(abs(x_pos - x_neg), 1e-9)
    uncertainty = se / slope if slope > 0.0 else abs(x_pos - x_neg)
    uncertainty = max(uncertainty, 0.5 * abs(x_pos - x_neg))
    return root, uncertainty


def find_bounds(
    code: str,
    g_tau: float,
    criterion: str,
    n_traj: int,
    master_seed: int,
    mode: str = "weak",
    grid_start: float = 0.02,
    grid_stop: float = 1.6,
    grid_step: float = 0.02,
    coarse_traj: Optional[int] = None,
    n_workers: Optional[int] = None,
) -> BoundResult:
    """Locate the alpha_tau window where correction meets the criterion.

    Scans a coarse grid with a reduced trajectory count, then sharpens
    each sign change by regula falsi at the full count. Uncertainties
    propagate the ensemble standard error through the local slope of the
    improvement gap.
    """
    if criterion not in CRITERIA:
        raise ValueError(f"criterion must be one of {tuple(CRITERIA)}")
    if g_tau <= 0.0 and mode == "weak":
        raise ValueError("weak-mode bounds need g_tau > 0")
    if coarse_traj is None:
        coarse_traj = max(n_traj // 4, 2000)

    def gap_fn(x: float, n: int) -> tuple[float, float]:
        return improvement_gap(code, x, g_tau, criterion, n, master_seed, mode, n_workers)

    xs = []
    x = grid_start
    while x <= grid_stop + 1e-12:
        xs.append(round(x, 10))
        x += grid_step
    coarse = [gap_fn(x, coarse_traj) for x in xs]
    gaps = [g for g, _ in coarse]

    neg_idx = [i for i, g in enumerate(gaps) if g < 0.0]
    if not neg_idx:
        return BoundResult(
            g_tau=g_tau, criterion=criterion, window=False, n_traj=n_traj, master_seed=master_seed
        )

    first, last = neg_idx[0], neg_idx[-1]
    lower = lower_err = None
    if first > 0:
        lower, lower_err = _refine_crossing(
            gap_fn, xs[first], gaps[first], xs[first - 1], gaps[first - 1], n_traj
        )
    upper = upper_err = None
    if last < len(xs) - 1:
        upper, upper_err = _refine_crossing(
            gap_fn, xs[last], gaps[last], xs[last + 1], gaps[last + 1], n_traj
        )
    return BoundResult(
        g_tau=g_tau,
        criterion=criterion,
        window=True,
        lower=lower,
        lower_err=lower_err,
        upper=upper,
        upper_err=upper_err,
        n_traj=n_traj,
        master_seed=master_seed,
    )


def bound_rows(results: Sequence[BoundResult]) -> list[dict]:
    return [
        {
            "g_tau": r.g_tau,
            "criterion": r.criterion,
            "window": r.window,
            "lower": r.lower,
            "lower_err": r.lower_err,
            "upper": r.upper,
            "upper_err": r.upper_err,
            "n_traj": r.n_traj,
            "seed": r.master_seed,
        }
        for r in results
    ]


# ---------------------------------------------------------------------------
# CLI


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated floats, got {text!r}")


def _write_rows(rows, columns, out_path, fmt):
    if fmt == "json":
        payload = json.dumps(rows, indent=2, default=float) + "\n"
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(payload)
        else:
            sys.stdout.write(payload)
        return
    if columns is RESULT_COLUMNS:
        data = results_to_csv_bytes(rows).decode()
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_format_cell(row[c]) for c in columns])
        data = buf.getvalue()
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(data)
    else:
        sys.stdout.write(data)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="weakqec",
        description="Monte Carlo weak-measurement error correction experiments",
    )
    parser.add_argument("--config", help="JSON file with defaults for the chosen subcommand")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--code", choices=CODE_NAMES)
        p.add_argument("--traj", type=int, help="trajectories per ensemble")
        p.add_argument("--seed", type=int, help="master seed")
        p.add_argument("--workers", type=int, help="worker processes")
        p.add_argument("--out", help="output path (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), dest="fmt")

    p_sweep = sub.add_parser("sweep", help="fidelity vs error size")
    common(p_sweep)
    p_sweep.add_argument("--mode", help="comma list from weak,projective,none")
    p_sweep.add_argument("--alpha-tau", type=_parse_float_list, help="comma list")
    p_sweep.add_argument("--g-tau", type=_parse_float_list, help="comma list")
    p_sweep.add_argument("--error-dist", choices=ERROR_KINDS)
    p_sweep.add_argument("--cycles", type=int)
    p_sweep.add_argument("--substeps", type=int)
    p_sweep.add_argument("--initial", choices=("codeword", "all_zeros"))

    p_bounds = sub.add_parser("bounds", help="correction window bounds")
    common(p_bounds)
    p_bounds.add_argument("--mode", choices=("weak", "projective"))
    p_bounds.add_argument("--criterion", choices=tuple(CRITERIA))
    p_bounds.add_argument("--g-tau", type=_parse_float_list, help="comma list")
    p_bounds.add_argument("--grid-step", type=float)
    p_bounds.add_argument("--coarse-traj", type=int)

    p_val = sub.add_parser("validate", help="run the property suite")
    p_val.add_argument("--seed", type=int)
    p_val.add_argument("--fast", action="store_true", help="reduced sample sizes")

    p_cycle = sub.add_parser("cycle", help="single-trajectory debug dump")
    common(p_cycle)
    p_cycle.add_argument("--mode", choices=MODES)
    p_cycle.add_argument("--alpha-tau", type=float)
    p_cycle.add_argument("--g-tau", type=float)
    p_cycle.add_argument("--cycles", type=int)
    p_cycle.add_argument("--index", type=int, help="trajectory index")
    return parser


_SWEEP_DEFAULTS = {
    "code": "bitflip3",
    "mode": "weak",
    "alpha_tau": (0.1, 0.2, 0.3, 0.4, 0.5),
    "g_tau": (5.0,),
    "error_dist": "gaussian",
    "traj": 2000,
    "seed": 2024,
    "cycles": 1,
    "substeps": None,
    "initial": "codeword",
    "workers": None,
    "out": None,
    "fmt": "csv",
}

_BOUNDS_DEFAULTS = {
    "code": "bitflip3",
    "mode": "weak",
    "criterion": "factor_two",
    "g_tau": (6.0,),
    "traj": 8000,
    "seed": 2024,
    "grid_step": 0.02,
    "coarse_traj": None,
    "workers": None,
    "out": None,
    "fmt": "csv",
}

_CYCLE_DEFAULTS = {
    "code": "bitflip3",
    "mode": "weak",
    "alpha_tau": 0.3,
    "g_tau": 5.0,
    "traj": 1,
    "cycles": 1,
    "seed": 2024,
    "index": 0,
    "workers": None,
    "out": None,
    "fmt": "json",
}


def _merge(defaults: dict, file_cfg: dict, args: argparse.Namespace) -> dict:
    merged = dict(defaults)
    for key, val in file_cfg.items():
        norm = key.replace("-", "_")
        if norm not in merged:
            raise ValueError(f"unknown config key {key!r}")
        if norm in ("alpha_tau", "g_tau") and not isinstance(val, (int, float)):
            val = tuple(float(v) for v in val)
        merged[norm] = val
    for key in merged:
        cli_val = getattr(args, key, None)
        if cli_val is not None:
            merged[key] = cli_val
    return merged


def _load_config_file(path: Optional[str]) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return data


def _cmd_sweep(args) -> int:
    cfg = _merge(_SWEEP_DEFAULTS, _load_config_file(args.config), args)
    modes = tuple(m.strip() for m in str(cfg["mode"]).split(",") if m.strip())
    alpha = cfg["alpha_tau"] if isinstance(cfg["alpha_tau"], tuple) else tuple(cfg["alpha_tau"])
    g = cfg["g_tau"] if isinstance(cfg["g_tau"], tuple) else tuple(cfg["g_tau"])
    spec = SweepSpec(
        code=cfg["code"],
        modes=modes,
        alpha_taus=alpha,
        g_taus=g,
        n_traj=cfg["traj"],
        master_seed=cfg["seed"],
        out_path=cfg["out"],
        error_kind=cfg["error_dist"],
        cycles=cfg["cycles"],
        substeps=cfg["substeps"],
        initial_state=cfg["initial"],
        n_workers=cfg["workers"],
    )
    rows = run_sweep(spec)
    _write_rows(rows, RESULT_COLUMNS, spec.out_path, cfg["fmt"])
    return 0


_BOUND_COLUMNS = ("g_tau", "criterion", "window", "lower", "lower_err", "upper", "upper_err", "n_traj", "seed")


def _cmd_bounds(args) -> int:
    cfg = _merge(_BOUNDS_DEFAULTS, _load_config_file(args.config), args)
    g_taus = cfg["g_tau"] if isinstance(cfg["g_tau"], tuple) else tuple(cfg["g_tau"])
    results = [
        find_bounds(
            code=cfg["code"],
            g_tau=g,
            criterion=cfg["criterion"],
            n_traj=cfg["traj"],
            master_seed=cfg["seed"],
            mode=cfg["mode"],
            grid_step=cfg["grid_step"],
            coarse_traj=cfg["coarse_traj"],
            n_workers=cfg["workers"],
        )
        for g in g_taus
    ]
    _write_rows(bound_rows(results), _BOUND_COLUMNS, cfg["out"], cfg["fmt"])
    return 0


def _cmd_validate(args) -> int:
    seed = args.seed if args.seed is not None else 20240813
    report = validation.validate(seed=seed, fast=bool(args.fast))
    for item in report.items:
        status = "PASS" if item.passed else "FAIL"
        print(f"{status} {item.name}: {item.detail}")
    print(f"{'OK' if report.passed else 'FAILED'} ({sum(i.passed for i in report.items)}/{len(report.items)} checks)")
    return 0 if report.passed else 1


def _cmd_cycle(args) -> int:
    cfg = _merge(_CYCLE_DEFAULTS, _load_config_file(args.config), args)
    config = CycleConfig(
        code=cfg["code"],
        alpha_tau=cfg["alpha_tau"],
        g_tau=cfg["g_tau"],
        mode=cfg["mode"],
        cycles=cfg["cycles"],
    )
    plan = resolve_config(config)
    trace = trajectory_trace(plan, cfg["seed"], cfg["index"])
    payload = json.dumps({"config": config.__dict__, "trace": trace}, indent=2, default=float) + "\n"
    if cfg["out"]:
        with open(cfg["out"], "w") as fh:
            fh.write(payload)
    else:
        sys.stdout.write(payload)
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "sweep": _cmd_sweep,
        "bounds": _cmd_bounds,
        "validate": _cmd_validate,
        "cycle": _cmd_cycle,
    }
    try:
        return handlers[args.command](args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
