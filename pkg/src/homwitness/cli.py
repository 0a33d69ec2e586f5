"""Command-line interface: simulate, analyze, hom, sweep.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure (e.g. an empty post-selection window). Output files are written
atomically (temp file + rename), so no partial file is left on failure.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import os
import sys
import tempfile

import numpy as np

from .analysis import (
    ConditionWindow,
    EmptyWindowError,
    apd_probabilities,
    exact_windowed_moment,
    optimize_window,
    visibility,
    witness_report,
)
from .config import ConfigError, ExperimentConfig, load_config
from .fock import FockCutoff
from .homodyne import HomodyneSetting, QuadratureSample, QuadratureSampler
from .optics import SourceModel, interfere

HIST_EDGES = np.round(np.arange(-5.0, 5.0001, 0.2), 10)


class DataError(ValueError):
    """Malformed or unreadable sample data."""


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".homwitness-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def samples_to_csv(samples: np.ndarray) -> str:
    lines = ["x1,x2"]
    for x1, x2 in samples:
        lines.append(f"{float(x1)!r},{float(x2)!r}")
    return "\n".join(lines) + "\n"


def read_samples_csv(path) -> np.ndarray:
    """Parse an 'x1,x2' CSV; malformed rows abort with their line numbers."""
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise DataError(f"cannot read sample file {path}: {exc}") from exc
    if not rows:
        raise DataError(f"sample file {path} is empty")
    if [c.strip() for c in rows[0]] != ["x1", "x2"]:
        raise DataError(f"{path}:1: expected header 'x1,x2'")
    bad = []
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        try:
            if len(row) != 2:
                raise ValueError("expected two fields")
            record = QuadratureSample(float(row[0]), float(row[1]))
            if not (np.isfinite(record.x1) and np.isfinite(record.x2)):
                raise ValueError("non-finite value")
            data.append(record)
        except ValueError as exc:
            bad.append(f"{path}:{lineno}: {exc}")
    if bad:
        raise DataError("malformed rows:\n" + "\n".join(bad))
    if not data:
        raise DataError(f"sample file {path} has no data rows")
    return np.asarray(data, dtype=float)


def _round_sig(obj):
    """Round floats to 12 significant digits for stable report files."""
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if isinstance(obj, dict):
        return {k: _round_sig(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_sig(v) for v in obj]
    return obj


def _build_state(config: ExperimentConfig):
    cutoff = FockCutoff(config.cutoff)
    return interfere(config.source, cutoff)


def _window_label(w: ConditionWindow) -> str:
    kind = "|x2|" if w.symmetric_abs else "x2"
    return f"{w.lo:g} < {kind} < {w.hi:g}"


def cmd_simulate(config: ExperimentConfig, out_path: str) -> int:
    state = _build_state(config)
    delta_theta = config.resolved_delta_theta()
    setting = HomodyneSetting(delta_theta, config.grid_range, config.grid_step)
    sampler = QuadratureSampler(state.measured, setting)
    samples = sampler.draw(config.n_samples, config.seed)

    print(f"simulated {config.n_samples} records (seed {config.seed}, "
          f"delta_theta {delta_theta:.6g}, config {config.hash()})")
    diag = state.measured.diagonal_weights()
    d = state.measured.cutoff.dim
    print("measured-mode photon-number diagonal (entries >= 1e-6):")
    for idx in np.nonzero(diag >= 1e-6)[0]:
        print(f"  p({idx // d},{idx % d}) = {diag[idx]:.6f}")
    for w in config.windows:
        exact = exact_windowed_moment(
            state.measured, delta_theta, w, config.grid_range, config.grid_step
        )
        print(f"exact windowed moment for {_window_label(w)}: {exact:.6f}")

    _atomic_write(out_path, samples_to_csv(samples))
    print(f"wrote {out_path}")
    return 0


def cmd_analyze(
    config: ExperimentConfig,
    in_path: str,
    out_path: str,
    windows=None,
    seed=None,
) -> int:
    samples = read_samples_csv(in_path)
    windows = tuple(windows) if windows else config.windows
    band_seed = config.seed if seed is None else seed

    window_reports = []
    any_violation = False
    for i, w in enumerate(windows):
        rep = witness_report(
            samples, w,
            runs=config.band_runs,
            k_sigma=config.band_k_sigma,
            seed=np.random.SeedSequence(entropy=band_seed, spawn_key=(i,)),
        )
        any_violation = any_violation or rep.violated
        x1 = samples[w.contains(samples[:, 1]), 0]
        counts, _ = np.histogram(x1, bins=HIST_EDGES)
        window_reports.append({
            "window": {"lo": w.lo, "hi": w.hi, "center": w.center,
                       "width": w.width, "symmetric_abs": w.symmetric_abs},
            "estimate": rep.estimate,
            "first_moment": rep.first_moment,
            "central_variance": rep.estimate - rep.first_moment**2,
            "mean_shift_flagged": rep.mean_shift_flagged,
            "n_in_window": rep.n_in_window,
            "band_lo": rep.band_lo,
            "band_hi": rep.band_hi,
            "violated": rep.violated,
            "histogram": {"bin_edges": HIST_EDGES.tolist(), "counts": counts.tolist()},
        })
        print(f"window {_window_label(w)}: n={rep.n_in_window} "
              f"estimate={rep.estimate:.6f} band=[{rep.band_lo:.6f}, {rep.band_hi:.6f}] "
              f"violated={'yes' if rep.violated else 'no'}")

    verdict = f"witness violated: {'yes' if any_violation else 'no'}"
    print(verdict)
    report = {
        "config_hash": config.hash(),
        "seed": band_seed,
        "n_samples": int(len(samples)),
        "overall": {
            "mean_x1": float(samples[:, 0].mean()),
            "mean_x2": float(samples[:, 1].mean()),
            "second_moment_x1": float(np.mean(samples[:, 0] ** 2)),
            "second_moment_x2": float(np.mean(samples[:, 1] ** 2)),
        },
        "windows": window_reports,
        "verdict": verdict,
    }
    _atomic_write(out_path, json.dumps(_round_sig(report), indent=2) + "\n")
    print(f"wrote {out_path}")
    return 0


def cmd_hom(config: ExperimentConfig, out_path: str) -> int:
    if not config.hom_overlaps:
        raise ConfigError("hom sweep needs at least one overlap value")
    cutoff = FockCutoff(config.cutoff)
    rows = []
    for xi in config.hom_overlaps:
        src = SourceModel(
            arm1=config.source.arm1,
            arm2=config.source.arm2,
            overlap=xi,
            transmittance=config.source.transmittance,
            phase=config.source.phase,
        )
        table = apd_probabilities(interfere(src, cutoff))
        rows.append((xi, table))
        print(f"xi={xi:g}: P00={table.p00:.6f} P01={table.p01:.6f} "
              f"P10={table.p10:.6f} P11={table.p11:.6f}")
    vis = visibility([t.p11 for _, t in rows])
    print(f"visibility over sweep: {vis:.6f}")

    lines = ["xi,p00,p01,p10,p11"]
    for xi, t in rows:
        lines.append(f"{xi!r},{t.p00!r},{t.p01!r},{t.p10!r},{t.p11!r}")
    _atomic_write(out_path, "\n".join(lines) + "\n")
    print(f"wrote {out_path}")
    return 0


def cmd_sweep(
    config: ExperimentConfig,
    in_path,
    out_path: str,
    seed=None,
    delta=None,
) -> int:
    if in_path:
        samples = read_samples_csv(in_path)
    else:
        state = _build_state(config)
        setting = HomodyneSetting(
            config.resolved_delta_theta(), config.grid_range, config.grid_step
        )
        samples = QuadratureSampler(state.measured, setting).draw(
            config.n_samples, config.seed
        )
    delta_grid = (float(delta),) if delta is not None else config.sweep_delta_grid
    result = optimize_window(
        samples,
        delta_grid=delta_grid,
        x2_grid=config.sweep_x2_grid,
        seed=config.seed if seed is None else seed,
        runs=config.band_runs,
        k_sigma=config.band_k_sigma,
    )
    lines = ["delta,best_x2,e_min,n_in_window,band_lo,band_hi"]
    for row in result.rows:
        lines.append(
            f"{row.delta!r},{row.center!r},{row.estimate!r},"
            f"{row.n_in_window},{row.band_lo!r},{row.band_hi!r}"
        )
    _atomic_write(out_path, "\n".join(lines) + "\n")
    b = result.best
    print(f"best width delta={b.delta:g} at center {b.center:g}: "
          f"estimate={b.estimate:.6f} band_hi={b.band_hi:.6f} (n={b.n_in_window})")
    print(f"wrote {out_path}")
    return 0


def _parse_window_flag(text: str) -> ConditionWindow:
    try:
        lo, hi = (float(v) for v in text.split(","))
        return ConditionWindow.from_bounds(lo, hi)
    except ValueError as exc:
        raise ConfigError(f"--window must be LO,HI with LO < HI: {exc}") from exc


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homwitness",
        description="Simulate and analyze phase-sensitive two-photon interference.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate quadrature records to CSV")
    sim.add_argument("--config", help="JSON config file")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.add_argument("--seed", type=int, help="override config seed")

    ana = sub.add_parser("analyze", help="evaluate the witness on a sample CSV")
    ana.add_argument("--config", help="JSON config file")
    ana.add_argument("--in", dest="in_path", required=True, help="input CSV path")
    ana.add_argument("--out", required=True, help="output JSON report path")
    ana.add_argument("--window", action="append", metavar="LO,HI",
                     help="post-selection window on |x2| (repeatable)")
    ana.add_argument("--seed", type=int, help="confidence-band seed")

    hom = sub.add_parser("hom", help="coincidence table over an overlap sweep")
    hom.add_argument("--config", help="JSON config file")
    hom.add_argument("--out", required=True, help="output CSV path")

    swp = sub.add_parser("sweep", help="post-selection window optimization")
    swp.add_argument("--config", help="JSON config file")
    swp.add_argument("--in", dest="in_path", help="input CSV (else simulate from config)")
    swp.add_argument("--out", required=True, help="output CSV path")
    swp.add_argument("--seed", type=int, help="confidence-band seed")
    swp.add_argument("--delta", type=float, help="restrict the sweep to one width")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    config = load_config(args.config) if args.config else ExperimentConfig()
    if args.command == "simulate":
        if args.seed is not None:
            config = dataclasses.replace(config, seed=args.seed)
        return cmd_simulate(config, args.out)
    if args.command == "analyze":
        windows = [_parse_window_flag(w) for w in args.window] if args.window else None
        return cmd_analyze(config, args.in_path, args.out, windows=windows, seed=args.seed)
    if args.command == "hom":
        return cmd_hom(config, args.out)
    if args.command == "sweep":
        return cmd_sweep(config, args.in_path, args.out, seed=args.seed, delta=args.delta)
    raise AssertionError(f"unhandled command {args.command}")


def main(argv=None) -> int:
    try:
        return run(argv)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except (EmptyWindowError, FloatingPointError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
