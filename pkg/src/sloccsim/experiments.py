"""Parameter sweeps over the discrimination game, and the oracle campaign.

A sweep walks a rectangular grid (row-major over the axes in declaration
order), evaluates the game's closed forms at each point, and emits one
record per point. The bundled presets regenerate the standard curves:

    fig3a  error vs. phase difference, overlapping vs. separated particles
    fig3b  error over the (l_prime, r) amplitude square at phi12 = pi
    fig4   error vs. phase difference for bosons/fermions/baseline
    fig5   same comparison over the (phi12, omega_dd) plane

The oracle campaign draws random game instances and checks that the
closed forms and the spectral POVM route agree.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .discrimination import (
    PhaseChannel,
    apply_phase,
    closed_form_error_general,
    closed_form_error_product,
    helstrom_error,
    optimal_povm,
)
from .states import (
    OverlapAmplitudes,
    PureProduct,
    SpinLabel,
    SpinSuperposition,
    Statistics,
    VanishingProjection,
    project_pure,
)

SQRT_HALF = 1.0 / math.sqrt(2.0)

FIGURES = ("fig3a", "fig3b", "fig4", "fig5", "custom")
MODES = ("product", "superposition")

# axis name -> how the grid value enters the game parameters
AXIS_NAMES = ("phi12", "l_prime", "r", "omega_dd", "omega_du", "omega_ud",
              "omega_uu")
_OMEGA_AXES = {"omega_dd": 0, "omega_du": 1, "omega_ud": 2, "omega_uu": 3}

_COMMON_KEYS = {"mode", "p1", "phi12", "l", "r", "l_prime", "r_prime", "omega"}
_SUPERPOSITION_KEYS = {"up_amp", "down_amp"}

ORACLE_TOL = 1e-10
P_ERR_CAP = 0.5 + 1e-12


@dataclass(frozen=True)
class SweepAxis:
    name: str
    lo: float
    hi: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"unknown axis {self.name!r}; expected one of "
                             f"{', '.join(AXIS_NAMES)}")
        if self.points < 2:
            raise ValueError(f"axis {self.name!r} needs at least 2 points")
        if not (self.lo < self.hi):
            raise ValueError(f"axis {self.name!r} needs lo < hi")

    def values(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.points)


@dataclass(frozen=True)
class SweepSpec:
    figure: str
    grid: tuple[SweepAxis, ...]
    fixed: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.figure not in FIGURES:
            raise ValueError(f"unknown figure {self.figure!r}")
        if not self.grid:
            raise ValueError("sweep needs at least one axis")
        names = [axis.name for axis in self.grid]
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate axis names in {names}")
        mode = self.fixed.get("mode")
        if mode not in MODES:
            raise ValueError(f"fixed['mode'] must be one of {MODES}, got {mode!r}")
        allowed = _COMMON_KEYS | (_SUPERPOSITION_KEYS if mode == "superposition"
                                  else set())
        unknown = set(self.fixed) - allowed
        if unknown:
            raise ValueError(f"unknown fixed parameters: {sorted(unknown)}")
        provided = set(self.fixed) | set(names)
        required = {"mode", "p1", "phi12", "l", "r", "l_prime", "r_prime", "omega"}
        if mode == "superposition":
            required |= _SUPERPOSITION_KEYS
        missing = required - provided
        if missing:
            raise ValueError(f"missing sweep parameters: {sorted(missing)}")

    @property
    def mode(self) -> str:
        return self.fixed["mode"]

    def record_count(self) -> int:
        total = 1
        for axis in self.grid:
            total *= axis.points
        return total


@dataclass(frozen=True)
class SweepRecord:
    """One grid point. Product sweeps fill p_err_overlap, superposition
    sweeps fill the boson/fermion pair; the baseline column is always the
    spatially separated (l_prime = r = 0) game. A VanishingProjection at
    the point leaves the values empty and sets flag."""

    coordinates: dict
    p_err_overlap: float | None = None
    p_err_baseline: float | None = None
    p_err_boson: float | None = None
    p_err_fermion: float | None = None
    flag: str = ""

    def __post_init__(self):
        for name in ("p_err_overlap", "p_err_baseline", "p_err_boson",
                     "p_err_fermion"):
            value = getattr(self, name)
            if value is not None and not (-1e-15 <= value <= P_ERR_CAP):
                raise ValueError(f"{name}={value} outside [0, 1/2]")


def _game_parameters(spec: SweepSpec, coords: dict) -> dict:
    params = dict(spec.fixed)
    omega = list(params["omega"])
    for name, value in coords.items():
        if name in _OMEGA_AXES:
            omega[_OMEGA_AXES[name]] = value
        else:
            params[name] = value
    params["omega"] = tuple(omega)
    return params


def _evaluate_point(spec: SweepSpec, coords: dict) -> SweepRecord:
    params = _game_parameters(spec, coords)
    amps = OverlapAmplitudes(l=params["l"], r=params["r"],
                             l_prime=params["l_prime"],
                             r_prime=params["r_prime"])
    p1 = float(params["p1"])
    channel = PhaseChannel(omega=params["omega"],
                           phi=(float(params["phi12"]), 0.0),
                           priors=(p1, 1.0 - p1))
    try:
        if spec.mode == "product":
            return SweepRecord(
                coordinates=coords,
                p_err_overlap=closed_form_error_product(amps, channel),
                p_err_baseline=closed_form_error_product(
                    amps.without_overlap(), channel),
            )
        prep = SpinSuperposition(up_amp=params["up_amp"],
                                 down_amp=params["down_amp"])
        return SweepRecord(
            coordinates=coords,
            p_err_baseline=closed_form_error_general(
                prep, amps.without_overlap(), Statistics.BOSON, channel),
            p_err_boson=closed_form_error_general(
                prep, amps, Statistics.BOSON, channel),
            p_err_fermion=closed_form_error_general(
                prep, amps, Statistics.FERMION, channel),
        )
    except VanishingProjection as exc:
        return SweepRecord(coordinates=coords, flag=str(exc))


def run_sweep(spec: SweepSpec) -> list[SweepRecord]:
    """Evaluate the game at every grid point, row-major over the axes."""
    names = [axis.name for axis in spec.grid]
    records = []
    for combo in itertools.product(*(axis.values() for axis in spec.grid)):
        coords = {name: float(value) for name, value in zip(names, combo)}
        records.append(_evaluate_point(spec, coords))
    return records


def preset_spec(name: str) -> SweepSpec:
    """Sweep specification for one of the bundled figure presets."""
    balanced = dict(l=SQRT_HALF, r=SQRT_HALF, l_prime=SQRT_HALF,
                    r_prime=SQRT_HALF)
    if name == "fig3a":
        return SweepSpec(
            figure="fig3a",
            grid=(SweepAxis("phi12", 0.0, 2.0 * math.pi, 361),),
            fixed=dict(mode="product", p1=1.0 / 3.0,
                       omega=(0.0, 1.0, 0.0, 0.0), **balanced))
    if name == "fig3b":
        fixed = dict(mode="product", p1=1.0 / 3.0, omega=(0.0, 1.0, 0.0, 0.0),
                     phi12=math.pi, l=SQRT_HALF, r_prime=SQRT_HALF)
        return SweepSpec(
            figure="fig3b",
            grid=(SweepAxis("l_prime", 0.0, SQRT_HALF, 101),
                  SweepAxis("r", 0.0, SQRT_HALF, 101)),
            fixed=fixed)
    if name == "fig4":
        return SweepSpec(
            figure="fig4",
            grid=(SweepAxis("phi12", 0.0, 2.0 * math.pi, 361),),
            fixed=dict(mode="superposition", p1=1.0 / 3.0,
                       omega=(1.0, 3.0, 2.0, 0.0),
                       up_amp=SQRT_HALF, down_amp=SQRT_HALF, **balanced))
    if name == "fig5":
        return SweepSpec(
            figure="fig5",
            grid=(SweepAxis("phi12", 0.0, 2.0 * math.pi, 101),
                  SweepAxis("omega_dd", 0.0, 5.0, 101)),
            fixed=dict(mode="superposition", p1=1.0 / 3.0,
                       omega=(0.0, 3.0, 2.0, 0.0),
                       up_amp=SQRT_HALF, down_amp=SQRT_HALF, **balanced))
    raise ValueError(f"unknown preset {name!r}; expected fig3a, fig3b, fig4 or fig5")


@dataclass(frozen=True)
class OracleCampaignSummary:
    n: int
    seed: int
    max_abs_disagreement: float
    n_failures: int


def _draw_amplitudes(rng) -> OverlapAmplitudes:
    while True:
        if rng.integers(2):
            raw = rng.uniform(-1, 1, 4).astype(complex)
        else:
            raw = rng.uniform(-1, 1, 4) + 1j * rng.uniform(-1, 1, 4)
        l, r, lp, rp = raw
        n1 = abs(l) ** 2 + abs(r) ** 2
        n2 = abs(lp) ** 2 + abs(rp) ** 2
        if n1 > 1.0:
            l, r = l / math.sqrt(n1), r / math.sqrt(n1)
        if n2 > 1.0:
            lp, rp = lp / math.sqrt(n2), rp / math.sqrt(n2)
        amps = OverlapAmplitudes(l, r, lp, rp)
        if abs(amps.l * amps.r_prime) ** 2 + abs(amps.l_prime * amps.r) ** 2 > 1e-3:
            return amps


def run_oracle_campaign(n: int, seed: int) -> OracleCampaignSummary:
    """Compare the closed-form, projected-state and POVM error routes on n
    random game instances; report the worst pairwise disagreement."""
    if n < 1:
        raise ValueError("need at least one draw")
    rng = np.random.default_rng(seed)
    worst = 0.0
    failures = 0
    prep = PureProduct(SpinLabel.DOWN, SpinLabel.UP)
    for _ in range(n):
        amps = _draw_amplitudes(rng)
        p1 = float(rng.uniform(0.0, 1.0))
        omega = tuple(rng.uniform(-5.0, 5.0, 4))
        phi2 = float(rng.uniform(-math.pi, math.pi))
        phi12 = float(rng.uniform(-2.0 * math.pi, 2.0 * math.pi))
        channel = PhaseChannel(omega=omega, phi=(phi2 + phi12, phi2),
                               priors=(p1, 1.0 - p1))
        stats = Statistics.BOSON if rng.integers(2) else Statistics.FERMION
        state = project_pure(prep, amps, stats)
        closed = closed_form_error_product(amps, channel)
        projected = helstrom_error(p1, 1.0 - p1,
                                   apply_phase(channel, 1, state),
                                   apply_phase(channel, 2, state))
        oracle = optimal_povm(channel, state).p_err
        spread = max(abs(closed - projected), abs(closed - oracle),
                     abs(projected - oracle))
        worst = max(worst, spread)
        if spread > ORACLE_TOL:
            failures += 1
    return OracleCampaignSummary(n=n, seed=seed, max_abs_disagreement=worst,
                                 n_failures=failures)
