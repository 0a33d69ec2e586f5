"""Experiment configuration: defaults, JSON parsing, and provenance hashing.

Defaults mirror the reference experiment: 12,000 records, post-selection
window 1.9 <= |x2| <= 2.5, 1,000 Monte Carlo band runs at 3 sigma, balanced
beam splitter, and the squeezing angle delta_theta = -phi/2 ("sq").
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .analysis import ConditionWindow, DEFAULT_DELTA_GRID, DEFAULT_X2_GRID
from .optics import SourceModel


class ConfigError(ValueError):
    """Invalid or unparseable experiment configuration."""


DEFAULT_ARM = (0.36, 0.64, 0.0)


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceModel = field(default_factory=lambda: SourceModel(DEFAULT_ARM, DEFAULT_ARM))
    delta_theta: object = "sq"  # radians, or "sq" for -phase/2
    n_samples: int = 12000
    seed: int = 12345
    cutoff: int = 6
    grid_range: float = 6.0
    grid_step: float = 0.01
    windows: tuple = (ConditionWindow.from_bounds(1.9, 2.5),)
    sweep_delta_grid: tuple = DEFAULT_DELTA_GRID
    sweep_x2_grid: tuple = DEFAULT_X2_GRID
    band_runs: int = 1000
    band_k_sigma: float = 3.0
    hom_overlaps: tuple = (1.0, 0.75, 0.5, 0.25, 0.0)

    def __post_init__(self):
        if isinstance(self.delta_theta, str) and self.delta_theta != "sq":
            raise ConfigError(f"delta_theta must be a number or 'sq', got {self.delta_theta!r}")
        if self.n_samples < 1:
            raise ConfigError("n_samples must be positive")
        if self.cutoff < 2:
            raise ConfigError("cutoff must be at least 2")
        if self.band_runs < 2 or self.band_k_sigma <= 0:
            raise ConfigError("band requires runs >= 2 and k_sigma > 0")
        if not self.windows:
            raise ConfigError("at least one window is required")

    def resolved_delta_theta(self) -> float:
        if self.delta_theta == "sq":
            return -self.source.phase / 2.0
        return float(self.delta_theta)

    def to_dict(self) -> dict:
        return {
            "source": {
                "arm1": list(self.source.arm1),
                "arm2": list(self.source.arm2),
                "overlap": self.source.overlap,
                "transmittance": self.source.transmittance,
                "phase": self.source.phase,
            },
            "delta_theta": self.delta_theta,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "cutoff": self.cutoff,
            "grid": {"range": self.grid_range, "step": self.grid_step},
            "windows": [
                {"lo": w.lo, "hi": w.hi, "symmetric_abs": w.symmetric_abs}
                for w in self.windows
            ],
            "sweep": {
                "delta_grid": list(self.sweep_delta_grid),
                "x2_grid": list(self.sweep_x2_grid),
            },
            "band": {"runs": self.band_runs, "k_sigma": self.band_k_sigma},
            "hom": {"overlaps": list(self.hom_overlaps)},
        }

    def hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode()).hexdigest()[:12]


def _expect_keys(section: dict, allowed: set, where: str):
    unknown = set(section) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {where}")


def _parse_window(entry: dict, where: str) -> ConditionWindow:
    _expect_keys(entry, {"lo", "hi", "center", "width", "symmetric_abs"}, where)
    symmetric = bool(entry.get("symmetric_abs", True))
    try:
        if "lo" in entry or "hi" in entry:
            if not {"lo", "hi"} <= set(entry):
                raise ConfigError(f"{where} needs both 'lo' and 'hi'")
            return ConditionWindow.from_bounds(float(entry["lo"]), float(entry["hi"]), symmetric)
        if not {"center", "width"} <= set(entry):
            raise ConfigError(f"{where} needs 'lo'/'hi' or 'center'/'width'")
        return ConditionWindow(float(entry["center"]), float(entry["width"]), symmetric)
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _parse_grid_spec(spec, where: str) -> tuple:
    if isinstance(spec, dict):
        _expect_keys(spec, {"start", "stop", "step"}, where)
        try:
            start, stop, step = (float(spec[k]) for k in ("start", "stop", "step"))
        except KeyError as exc:
            raise ConfigError(f"{where} needs start/stop/step") from exc
        if step <= 0 or stop < start:
            raise ConfigError(f"{where}: need step > 0 and stop >= start")
        out = []
        v = start
        while v <= stop + 1e-9:
            out.append(round(v, 10))
            v += step
        return tuple(out)
    return tuple(float(v) for v in spec)


def config_from_dict(raw: dict) -> ExperimentConfig:
    """Build a config from parsed JSON; unknown keys are rejected."""
    if not isinstance(raw, dict):
        raise ConfigError("config root must be an object")
    _expect_keys(
        raw,
        {"source", "delta_theta", "n_samples", "seed", "cutoff", "grid",
         "windows", "sweep", "band", "hom"},
        "config root",
    )
    defaults = ExperimentConfig()
    try:
        src_raw = raw.get("source", {})
        _expect_keys(src_raw, {"arm1", "arm2", "overlap", "transmittance", "phase"}, "source")
        source = SourceModel(
            arm1=tuple(src_raw.get("arm1", DEFAULT_ARM)),
            arm2=tuple(src_raw.get("arm2", DEFAULT_ARM)),
            overlap=float(src_raw.get("overlap", 1.0)),
            transmittance=float(src_raw.get("transmittance", 0.5)),
            phase=float(src_raw.get("phase", 0.0)),
        )
        grid_raw = raw.get("grid", {})
        _expect_keys(grid_raw, {"range", "step"}, "grid")
        sweep_raw = raw.get("sweep", {})
        _expect_keys(sweep_raw, {"delta_grid", "x2_grid"}, "sweep")
        band_raw = raw.get("band", {})
        _expect_keys(band_raw, {"runs", "k_sigma"}, "band")
        hom_raw = raw.get("hom", {})
        _expect_keys(hom_raw, {"overlaps"}, "hom")
        windows_raw = raw.get("windows")
        if windows_raw is None:
            windows = defaults.windows
        else:
            windows = tuple(
                _parse_window(w, f"windows[{i}]") for i, w in enumerate(windows_raw)
            )
        delta_theta = raw.get("delta_theta", "sq")
        if not isinstance(delta_theta, str):
            delta_theta = float(delta_theta)
        return ExperimentConfig(
            source=source,
            delta_theta=delta_theta,
            n_samples=int(raw.get("n_samples", defaults.n_samples)),
            seed=int(raw.get("seed", defaults.seed)),
            cutoff=int(raw.get("cutoff", defaults.cutoff)),
            grid_range=float(grid_raw.get("range", defaults.grid_range)),
            grid_step=float(grid_raw.get("step", defaults.grid_step)),
            windows=windows,
            sweep_delta_grid=_parse_grid_spec(
                sweep_raw.get("delta_grid", defaults.sweep_delta_grid), "sweep.delta_grid"
            ),
            sweep_x2_grid=_parse_grid_spec(
                sweep_raw.get("x2_grid", defaults.sweep_x2_grid), "sweep.x2_grid"
            ),
            band_runs=int(band_raw.get("runs", defaults.band_runs)),
            band_k_sigma=float(band_raw.get("k_sigma", defaults.band_k_sigma)),
            hom_overlaps=tuple(
                float(v) for v in hom_raw.get("overlaps", defaults.hom_overlaps)
            ),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path) -> ExperimentConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    return config_from_dict(raw)
