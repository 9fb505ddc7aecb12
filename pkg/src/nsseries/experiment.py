"""Config-driven experiment runner with machine-readable reports.

A run is described by a small TOML file (flat keys plus nested sections;
unknown keys are rejected so typos fail loudly).  `run_experiment` executes
the phases in a fixed order -- initial data, series recursion, consistency
checks, oracle cross-check, complex extension -- and produces a report that
is deterministic for a given (config, seed).
"""

from __future__ import annotations

import hashlib
import json
import time
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import __version__
from .assemble import energy, momentum_residual, pressure_symbol
from .extension import (auto_growth_radii, growth_order_estimate,
                        write_growth_csv)
from .fields import (SpectralField, TimeGrid, gaussian_initial_data,
                     norm_1p2, save_field, smallness_ratio,
                     trajectory_norm_1p2_sup, DEFAULT_RIESZ_CONSTANT)
from .grid import build_grid
from .integrator import BlowUpError, compare_trajectories, run_oracle
from .series import (DivergencePredicted, build_v0, catalan_envelope_rhs,
                     envelope_profile, fixed_point_residual, recurse_terms,
                     sum_series, truncation_order)

__all__ = ["ExperimentConfig", "ExperimentReport", "load_config",
           "serialize_config", "run_experiment", "emit_report"]


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass
class GridConfig:
    h: float = 0.5
    R: float = 2.0


@dataclass
class TimeConfig:
    t_max: float = 0.5
    M: int = 16


@dataclass
class InitialConfig:
    family: str = "gaussian"
    amplitude: float = 0.05
    width: float = 1.0
    recipe: str = "constant"
    direction: list = field(default_factory=lambda: [1.0, 0.0, 0.0])
    seed: int = 0


@dataclass
class TruncationConfig:
    K_max: int = 8
    tail_tol: float = 1e-8


@dataclass
class ChecksConfig:
    envelopes: bool = True
    residual: bool = True
    oracle: bool = False
    complex_ext: bool = False
    fp_tol_rel: float = 1e-6
    oracle_gap_rel: float = 1e-4
    oracle_substeps: int = 2
    energy_step_tol: float = 1e-8
    growth_order_max: float = 2.3
    growth_times: list = field(default_factory=list)  # defaults to [t_max]
    growth_directions: int = 3


@dataclass
class OutputConfig:
    report_dir: str = "out"
    dump_fields: bool = False


@dataclass
class ExperimentConfig:
    d: int = 3
    nu: float = 1.0
    c_hat: float = DEFAULT_RIESZ_CONSTANT
    method: str = "fft"
    grid: GridConfig = field(default_factory=GridConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    initial: InitialConfig = field(default_factory=InitialConfig)
    truncation: TruncationConfig = field(default_factory=TruncationConfig)
    checks: ChecksConfig = field(default_factory=ChecksConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def validate(self) -> "ExperimentConfig":
        if self.d < 3:
            raise ValueError("d must be >= 3")
        if self.nu <= 0:
            raise ValueError("nu must be positive")
        if self.c_hat <= 0:
            raise ValueError("c_hat must be positive")
        if self.method not in ("fft", "direct"):
            raise ValueError("method must be 'fft' or 'direct'")
        if self.grid.h <= 0 or self.grid.R < self.grid.h:
            raise ValueError("grid requires h > 0 and R >= h")
        if self.time.t_max <= 0 or self.time.M < 1:
            raise ValueError("time grid requires t_max > 0 and M >= 1")
        if self.initial.family != "gaussian":
            raise ValueError("only the gaussian initial family is built in")
        if self.initial.width <= 0:
            raise ValueError("initial width must be positive")
        if self.truncation.K_max < 0 or self.truncation.tail_tol <= 0:
            raise ValueError("invalid truncation block")
        return self


_SECTIONS = {
    "grid": GridConfig, "time": TimeConfig, "initial": InitialConfig,
    "truncation": TruncationConfig, "checks": ChecksConfig,
    "output": OutputConfig,
}
_TOP_SCALARS = {"d", "nu", "c_hat", "method"}


def _fill(cls, data: dict, context: str):
    allowed = set(cls.__dataclass_fields__)
    unknown = set(data) - allowed
    if unknown:
        raise ValueError(
            f"unknown key(s) {sorted(unknown)} in [{context}]")
    return cls(**data)


def load_config(path) -> ExperimentConfig:
    with open(path, "rb") as fh:
        raw = tomllib.load(fh)
    unknown = set(raw) - _TOP_SCALARS - set(_SECTIONS)
    if unknown:
        raise ValueError(f"unknown top-level key(s) {sorted(unknown)}")
    kwargs = {k: raw[k] for k in _TOP_SCALARS if k in raw}
    for name, cls in _SECTIONS.items():
        if name in raw:
            if not isinstance(raw[name], dict):
                raise ValueError(f"[{name}] must be a table")
            kwargs[name] = _fill(cls, raw[name], name)
    return ExperimentConfig(**kwargs).validate()


def _toml_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, float)):
        return repr(v)
    if isinstance(v, str):
        return json.dumps(v)
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_toml_value(x) for x in v) + "]"
    raise TypeError(f"cannot serialize {type(v)}")


def serialize_config(cfg: ExperimentConfig) -> str:
    lines = [f"{k} = {_toml_value(getattr(cfg, k))}" for k in
             ("d", "nu", "c_hat", "method")]
    for name in _SECTIONS:
        section = getattr(cfg, name)
        lines.append("")
        lines.append(f"[{name}]")
        for k, v in asdict(section).items():
            lines.append(f"{k} = {_toml_value(v)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Report
# ---------------------------------------------------------------------------

@dataclass
class ExperimentReport:
    version: str
    config: dict
    grid_hash: str
    rho: float | None = None
    term_norms: list = field(default_factory=list)
    term_ratios: list = field(default_factory=list)
    chosen_K: int | None = None
    divergence_predicted: bool = False
    fixed_point_residual: float | None = None
    fixed_point_pass: bool | None = None
    momentum_residual: float | None = None
    energy: list = field(default_factory=list)
    energy_pass: bool | None = None
    envelopes: list = field(default_factory=list)
    envelopes_pass: bool | None = None
    oracle: dict = field(default_factory=dict)
    oracle_pass: bool | None = None
    growth: list = field(default_factory=list)
    growth_pass: bool | None = None
    errors: list = field(default_factory=list)
    failed: bool = False
    passed: bool = False
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _grid_hash(grid) -> str:
    key = f"{grid.d}:{grid.h!r}:{grid.radius!r}:{grid.n_modes}"
    return hashlib.sha256(key.encode()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# Runner
# ---------------------------------------------------------------------------

def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    cfg.validate()
    t_wall = {}

    def _phase(name):
        t_wall[name] = time.perf_counter()

    def _done(name):
        t_wall[name] = time.perf_counter() - t_wall[name]

    _phase("setup")
    grid = build_grid(cfg.d, cfg.grid.h, cfg.grid.R)
    tg = TimeGrid.uniform(cfg.time.t_max, cfg.time.M)
    recipe = {"kind": cfg.initial.recipe, "seed": cfg.initial.seed}
    if cfg.initial.recipe == "constant":
        recipe["direction"] = list(cfg.initial.direction)
    elif cfg.initial.recipe == "swirl":
        recipe["axis"] = list(cfg.initial.direction)
    u0 = gaussian_initial_data(grid, cfg.initial.amplitude,
                               cfg.initial.width, recipe)
    report = ExperimentReport(version=__version__,
                              config=asdict(cfg),
                              grid_hash=_grid_hash(grid))
    report.rho = smallness_ratio(u0, cfg.nu, cfg.c_hat)
    _done("setup")

    checks: ChecksConfig = cfg.checks
    method = cfg.method
    v = v0 = expansion = None

    _phase("series")
    try:
        v0 = build_v0(u0, cfg.nu, tg)
        expansion = recurse_terms(v0, cfg.truncation.K_max, cfg.nu, method)
        report.term_norms = [float(x) for x in expansion.term_norms]
        report.term_ratios = [float(x) for x in expansion.ratios()]
        try:
            report.chosen_K = truncation_order(
                expansion, report.rho, cfg.truncation.tail_tol)
        except DivergencePredicted:
            report.divergence_predicted = True
            report.chosen_K = expansion.K
        v = sum_series(expansion, report.chosen_K)
    except Exception as exc:  # noqa: BLE001 - recorded, run marked failed
        report.errors.append(f"series: {exc}")
        report.failed = True
    _done("series")

    if v is not None and checks.residual and not report.divergence_predicted:
        _phase("residual")
        try:
            report.fixed_point_residual = float(
                fixed_point_residual(v, v0, cfg.nu, method))
            scale = trajectory_norm_1p2_sup(v0)
            report.fixed_point_pass = bool(
                report.fixed_point_residual
                <= checks.fp_tol_rel * max(scale, np.finfo(float).tiny))
            if tg.n_times >= 3:
                report.momentum_residual = float(
                    momentum_residual(v, cfg.nu, method))
        except Exception as exc:  # noqa: BLE001
            report.errors.append(f"residual: {exc}")
            report.failed = True
        _done("residual")

    if v is not None:
        _phase("energy")
        E = energy(v)
        report.energy = [[float(a), float(b)] for a, b in E]
        vals = E[:, 1]
        increments = np.diff(vals)
        report.energy_pass = bool(
            np.max(vals) <= 1.05 * vals[0] + np.finfo(float).tiny
            and np.all(increments <= checks.energy_step_tol))
        _done("energy")

    if expansion is not None and checks.envelopes \
            and not report.divergence_predicted:
        _phase("envelopes")
        try:
            rows = []
            for k in range(min(3, expansion.K) + 1):
                prof = envelope_profile(u0, k, 0, 0, method)
                env = catalan_envelope_rhs(k, 0, 0, cfg.nu, grid, prof)
                term = expansion.terms[k]
                # absolute floor at the FFT roundoff level of the term
                floor = 1e-12 * float(np.max(np.abs(term.values)))
                count, worst = env.violations(term, rtol=1e-9,
                                              atol=floor)
                rows.append({"k": k, "violations": int(count),
                             "worst_excess": float(worst)})
            report.envelopes = rows
            report.envelopes_pass = all(
                r["violations"] == 0 for r in rows if r["k"] <= 2)
        except Exception as exc:  # noqa: BLE001
            report.errors.append(f"envelopes: {exc}")
            report.failed = True
        _done("envelopes")

    if v is not None and checks.oracle and not report.divergence_predicted:
        _phase("oracle")
        try:
            oracle = run_oracle(u0, cfg.nu, tg,
                                substeps=checks.oracle_substeps)
            cmp = compare_trajectories(v, oracle)
            u0_l2 = float(np.sqrt(grid.cell_measure
                                  * np.sum(np.abs(u0.values) ** 2)))
            report.oracle = {"sup_gap": float(cmp["sup_gap"]),
                            "gaps": [float(x) for x in cmp["gaps"]],
                            "u0_l2": u0_l2}
            report.oracle_pass = bool(
                cmp["sup_gap"] <= checks.oracle_gap_rel
                * max(u0_l2, np.finfo(float).tiny))
        except BlowUpError as exc:
            report.errors.append(f"oracle: {exc}")
            report.oracle_pass = False
        except Exception as exc:  # noqa: BLE001
            report.errors.append(f"oracle: {exc}")
            report.failed = True
        _done("oracle")

    if v is not None and checks.complex_ext \
            and not report.divergence_predicted:
        _phase("complex")
        try:
            rng = np.random.default_rng(cfg.initial.seed + 1)
            t_values = checks.growth_times or [cfg.time.t_max]
            fits = []
            for t_val in t_values:
                for _ in range(checks.growth_directions):
                    direction = rng.normal(size=grid.d)
                    radii = auto_growth_radii(grid, cfg.nu, t_val,
                                              direction)
                    fits.append(growth_order_estimate(
                        v, t_val, direction, radii))
            report.growth = fits
            report.growth_pass = all(
                f["order"] <= checks.growth_order_max
                for f in fits if not f.get("degenerate"))
        except Exception as exc:  # noqa: BLE001
            report.errors.append(f"complex: {exc}")
            report.failed = True
        _done("complex")

    if cfg.output.dump_fields and v is not None:
        outdir = Path(cfg.output.report_dir)
        outdir.mkdir(parents=True, exist_ok=True)
        save_field(u0, outdir / "u0.cnsf")
        save_field(SpectralField(grid, v.values[-1]),
                   outdir / "v_final.cnsf")

    enabled = [report.fixed_point_pass if checks.residual else None,
               report.energy_pass,
               report.envelopes_pass if checks.envelopes else None,
               report.oracle_pass if checks.oracle else None,
               report.growth_pass if checks.complex_ext else None]
    if report.divergence_predicted:
        # A predicted-divergent run "passes" iff it indeed shows growth.
        ratios = report.term_ratios
        report.passed = not report.failed and bool(
            ratios and ratios[-1] > 1.0)
    else:
        report.passed = not report.failed and all(
            x for x in enabled if x is not None)
    report.timings = {k: float(f"{s:.6f}") for k, s in t_wall.items()}
    return report


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def emit_report(report: ExperimentReport, report_dir=None,
                formats=("json", "csv")) -> list:
    """Write the JSON master report plus CSV extracts (energy, term norms,
    growth fits).  Returns the list of written paths."""
    outdir = Path(report_dir if report_dir is not None
                  else report.config["output"]["report_dir"])
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    if "json" in formats:
        path = outdir / "report.json"
        with open(path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        written.append(path)
    if "csv" in formats:
        epath = outdir / "energy.csv"
        with open(epath, "w") as fh:
            fh.write("t,E\n")
            for t, E in report.energy:
                fh.write(f"{t!r},{E!r}\n")
        written.append(epath)
        npath = outdir / "term_norms.csv"
        with open(npath, "w") as fh:
            fh.write("k,norm\n")
            for k, nk in enumerate(report.term_norms):
                fh.write(f"{k},{nk!r}\n")
        written.append(npath)
        if report.growth:
            gpath = outdir / "growth.csv"
            write_growth_csv(report.growth, gpath)
            written.append(gpath)
    return written
