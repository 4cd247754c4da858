"""Run configurations, figure datasets, sweeps and deterministic CSV output."""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

import numpy as np

from qdeleter import __version__
from qdeleter.bath import BathParams, derive_constants
from qdeleter.dissipative import evolve_bloch, fidelity_law
from qdeleter.errors import InvalidArgument
from qdeleter.oracle import DEFAULT_DT, ComparisonReport, compare_closed_form
from qdeleter.qnd import BUILTIN_KERNELS, builtin_kernels, qnd_evolve_bloch, qnd_evolve_qubit
from qdeleter.state import (
    MAXIMALLY_MIXED,
    BlochVector,
    InitialAngles,
    bloch_length,
    bloch_to_density,
    fidelity_to_blank,
    pure_state_from_angles,
    purity,
)

CHANNELS = ("dissipative", "qnd")
SWEEP_AXES = ("gamma0", "T", "r", "Phi", "t")
FIGURES = ("fig1", "fig2", "fig3")

STATE_COLUMNS = ("sx", "sy", "sz", "bloch_length", "purity", "fidelity_blank")


class ConfigError(InvalidArgument):
    """Invalid run configuration; ``field`` names the offending entry."""

    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class RunConfig:
    """Everything a CLI invocation needs.  Field names mirror the CLI flags."""

    channel: str = "dissipative"
    gamma0: float = 0.5
    omega: float = 1.0
    temp: float = 0.0
    squeeze_r: float = 0.0
    squeeze_phi: float = 0.0
    theta0: float = 0.0
    phi0: float = 0.0
    mixed: bool = False
    kernel: str = "linear"
    kappa: float = 0.1
    tau: float = 1.0
    t_max: float = 10.0
    points: int = 101
    dt: float = DEFAULT_DT
    tol: float = 1e-6
    out: str | None = None

    def __post_init__(self):
        if self.channel not in CHANNELS:
            raise ConfigError("channel", f"expected one of {', '.join(CHANNELS)}, got {self.channel!r}")
        if self.kernel not in BUILTIN_KERNELS:
            raise ConfigError("kernel", f"expected one of {', '.join(BUILTIN_KERNELS)}, got {self.kernel!r}")
        for name in ("gamma0", "omega", "temp", "squeeze_r", "squeeze_phi", "theta0",
                     "phi0", "kappa", "tau", "t_max", "dt", "tol"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ConfigError(name, f"must be a finite number, got {value!r}")
        positive = {"gamma0": self.gamma0, "omega": self.omega, "t_max": self.t_max,
                    "dt": self.dt, "tol": self.tol, "tau": self.tau}
        for name, value in positive.items():
            if value <= 0:
                raise ConfigError(name, f"must be > 0, got {value!r}")
        if self.temp < 0:
            raise ConfigError("temp", f"must be >= 0, got {self.temp!r}")
        if self.kappa < 0:
            raise ConfigError("kappa", f"must be >= 0, got {self.kappa!r}")
        if not 0.0 <= self.theta0 <= math.pi:
            raise ConfigError("theta0", f"must lie in [0, pi], got {self.theta0!r}")
        if not 0.0 <= self.phi0 < 2.0 * math.pi:
            raise ConfigError("phi0", f"must lie in [0, 2pi), got {self.phi0!r}")
        if isinstance(self.points, bool) or not isinstance(self.points, int) or self.points < 2:
            raise ConfigError("points", f"must be an integer >= 2, got {self.points!r}")
        if not isinstance(self.mixed, bool):
            raise ConfigError("mixed", f"must be true or false, got {self.mixed!r}")

    @classmethod
    def from_mapping(cls, values: dict) -> "RunConfig":
        known = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        for raw_key, value in values.items():
            key = raw_key.replace("-", "_")
            if key not in known:
                raise ConfigError(raw_key, "unknown configuration key")
            if key == "points" and isinstance(value, float) and value.is_integer():
                value = int(value)
            kwargs[key] = value
        return cls(**kwargs)

    def bath(self) -> BathParams:
        return BathParams(gamma0=self.gamma0, omega=self.omega, T=self.temp,
                          r=self.squeeze_r, Phi=self.squeeze_phi)

    def initial_bloch(self) -> BlochVector:
        if self.mixed:
            return MAXIMALLY_MIXED
        return pure_state_from_angles(InitialAngles(self.theta0, self.phi0))

    def time_grid(self) -> np.ndarray:
        grid = np.linspace(0.0, self.t_max, self.points)
        grid[-1] = self.t_max
        return grid

    def as_header(self) -> dict:
        return {f.name: getattr(self, f.name) for f in dataclasses.fields(self) if f.name != "out"}


def state_at(cfg: RunConfig, t: float, bath: BathParams | None = None) -> BlochVector:
    """Bloch vector of the configured channel and initial state at time ``t``."""
    if cfg.channel == "dissipative":
        return evolve_bloch(cfg.initial_bloch(), derive_constants(bath or cfg.bath()), t)
    kernel = builtin_kernels(cfg.kernel, kappa=cfg.kappa, tau=cfg.tau)
    if cfg.mixed:
        return qnd_evolve_bloch(MAXIMALLY_MIXED, cfg.omega, kernel, t)
    return qnd_evolve_qubit(InitialAngles(cfg.theta0, cfg.phi0), cfg.omega, kernel, t)


def state_metrics(b: BlochVector) -> tuple[float, ...]:
    rho = bloch_to_density(b)
    return (b.sx, b.sy, b.sz, bloch_length(b), purity(rho), fidelity_to_blank(rho))


def evolve_rows(cfg: RunConfig) -> list[tuple[float, ...]]:
    return [(t, *state_metrics(state_at(cfg, t))) for t in cfg.time_grid()]


# --- figures ---------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    label: str
    x: np.ndarray
    y: np.ndarray


@dataclass(frozen=True)
class FigureDataset:
    figure: str
    x_name: str
    y_name: str
    curves: tuple[Curve, ...]
    params: dict
    assumptions: tuple[str, ...] = ()
    overrides: dict = field(default_factory=dict)

    def curve(self, label: str) -> Curve:
        for c in self.curves:
            if c.label == label:
                return c
        raise KeyError(label)


FIGURE_DEFAULTS = {
    "fig1": dict(gamma0=0.5, omega=1.0, temp=0.0, squeeze_r=0.0, squeeze_phi=0.0, t_max=30.0, points=601),
    "fig2": dict(gamma0=0.5, omega=1.0, theta0=0.0, squeeze_r=0.0, squeeze_phi=0.0, t_max=10.0,
                 temp=20.0, points=200),
    "fig3": dict(gamma0=0.6, omega=1.0, temp=0.0, squeeze_phi=0.0, t_max=30.0, points=601),
}

#: Lower end of the positive part of the fig2 temperature grid; T = 0 is added separately.
FIG2_T_MIN = 0.01

FIG1_STATES = (("theta0=0", 0.0), ("theta0=pi/8", math.pi / 8), ("theta0=pi/4", math.pi / 4), ("mixed", None))
FIG3_SQUEEZING = (0.2, -0.4)


def _initial(theta0: float | None, phi0: float = 0.0) -> BlochVector:
    return MAXIMALLY_MIXED if theta0 is None else pure_state_from_angles(InitialAngles(theta0, phi0))


def _length_curve(label: str, b0: BlochVector, bath: BathParams, grid: np.ndarray) -> Curve:
    env = derive_constants(bath)
    return Curve(label, grid, np.array([bloch_length(evolve_bloch(b0, env, t)) for t in grid]))


def fig2_temperature_grid(t_upper: float = 20.0, points: int = 200) -> np.ndarray:
    return np.concatenate([[0.0], np.linspace(FIG2_T_MIN, t_upper, points)])


def fig2_fidelity(T: float, gamma0: float = 0.5, omega: float = 1.0, t: float = 10.0,
                  theta0: float = 0.0, r: float = 0.0, Phi: float = 0.0) -> float:
    """Fidelity with ``|0>`` at time ``t`` for bath temperature ``T``."""
    sz0 = pure_state_from_angles(InitialAngles(theta0, 0.0)).sz
    return fidelity_law(sz0, derive_constants(BathParams(gamma0, omega, T, r, Phi)), t)


def figure_dataset(fig_id: str, overrides: dict | None = None) -> FigureDataset:
    """Regenerate the dataset behind one of the three figures.

    ``overrides`` uses :class:`RunConfig` field names.  For ``fig2`` the
    ``t_max`` entry is the evaluation time, ``temp`` the upper end of the
    temperature grid and ``points`` the number of positive temperatures.

    Raises:
        InvalidArgument: For an unknown figure id or an override that does not
            apply to the figure.
    """
    if fig_id not in FIGURES:
        raise ConfigError("figure", f"expected one of {', '.join(FIGURES)}, got {fig_id!r}")
    overrides = dict(overrides or {})
    base = dict(FIGURE_DEFAULTS[fig_id])
    for key in overrides:
        if key not in base:
            raise ConfigError(key, f"cannot be overridden for {fig_id}")
    params = {**base, **overrides}
    # validates every value with the normal config rules
    cfg = RunConfig(**params)

    if fig_id == "fig2":
        if cfg.temp <= FIG2_T_MIN:
            raise ConfigError("temp", f"fig2 temperature upper bound must exceed {FIG2_T_MIN}, got {cfg.temp!r}")
        temps = fig2_temperature_grid(cfg.temp, cfg.points)
        fids = np.array([
            fig2_fidelity(T, cfg.gamma0, cfg.omega, cfg.t_max, cfg.theta0, cfg.squeeze_r, cfg.squeeze_phi)
            for T in temps
        ])
        curve = Curve(f"theta0={cfg.theta0!r},t={cfg.t_max!r}", temps, fids)
        return FigureDataset("fig2", "T", "fidelity", (curve,), params, overrides=overrides)

    grid = cfg.time_grid()
    if fig_id == "fig1":
        bath = cfg.bath()
        curves = tuple(_length_curve(label, _initial(theta), bath, grid) for label, theta in FIG1_STATES)
        return FigureDataset("fig1", "t", "bloch_length", curves, params, overrides=overrides)

    curves = []
    for r in FIG3_SQUEEZING:
        bath = dataclasses.replace(cfg, squeeze_r=r).bath()
        for label, theta in (("mixed", None), ("theta0=pi/4", math.pi / 4)):
            curves.append(_length_curve(f"r={r!r},{label}", _initial(theta), bath, grid))
    assumptions = ("phi=0",) if "squeeze_phi" not in overrides else ()
    return FigureDataset("fig3", "t", "bloch_length", tuple(curves), params, assumptions, overrides)


# --- sweeps and checks ------------------------------------------------------

_AXIS_FIELDS = {"gamma0": "gamma0", "T": "temp", "r": "squeeze_r", "Phi": "squeeze_phi"}


def sweep_rows(cfg: RunConfig, axis: str, lo: float, hi: float, steps: int) -> list[tuple[float, ...]]:
    """One row per axis value; the evaluation time is ``cfg.t_max`` unless ``axis == 't'``.

    Points are independent, and rows come back in ascending axis order.
    """
    if axis not in SWEEP_AXES:
        raise ConfigError("sweep", f"axis must be one of {', '.join(SWEEP_AXES)}, got {axis!r}")
    if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
        raise ConfigError("sweep", f"steps must be an integer >= 2, got {steps!r}")
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ConfigError("sweep", f"need finite min <= max, got {lo!r}, {hi!r}")
    if cfg.channel == "qnd" and axis != "t":
        raise ConfigError("sweep", f"axis {axis!r} has no effect on the qnd channel; only 't' is allowed")
    values = np.linspace(lo, hi, steps)
    values[-1] = hi
    rows = []
    for v in values:
        if axis == "t":
            b = state_at(cfg, v)
        else:
            b = state_at(cfg, cfg.t_max, dataclasses.replace(cfg, **{_AXIS_FIELDS[axis]: float(v)}).bath())
        rows.append((float(v), *state_metrics(b)))
    return rows


def check_report(cfg: RunConfig) -> ComparisonReport:
    if cfg.channel != "dissipative":
        raise ConfigError("channel", "check only supports the dissipative channel")
    return compare_closed_form(cfg.initial_bloch(), cfg.bath(), cfg.time_grid(), dt=cfg.dt, tolerance=cfg.tol)


# --- CSV --------------------------------------------------------------------

def fmt(value) -> str:
    """Render a value for CSV: floats with 17 significant digits, ``-0`` folded to ``0``."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value) + 0.0, ".17g")
    return str(value)


def header_lines(kind: str, params: dict, extra: Iterable[str] = ()) -> list[str]:
    lines = [f"# qdeleter {__version__}", f"# command={kind}"]
    lines.append("# params " + " ".join(f"{k}={fmt(v)}" for k, v in params.items()))
    lines.extend(f"# {line}" for line in extra)
    return lines


def write_csv(stream: IO[str], header: Sequence[str], columns: Sequence[str], rows: Iterable[Sequence]) -> None:
    for line in header:
        stream.write(line + "\n")
    stream.write(",".join(columns) + "\n")
    for row in rows:
        stream.write(",".join(fmt(v) for v in row) + "\n")


def figure_csv(ds: FigureDataset, stream: IO[str]) -> None:
    extra = [f"figure={ds.figure}"]
    extra += [f"assumed {a}" for a in ds.assumptions]
    extra += [f"override {k}={fmt(v)}" for k, v in ds.overrides.items()]
    rows = ((c.label, x, y) for c in ds.curves for x, y in zip(c.x, c.y))
    write_csv(stream, header_lines("figure", ds.params, extra), ("curve", ds.x_name, ds.y_name), rows)
