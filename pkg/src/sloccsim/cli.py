"""Command line front end.

Subcommands:
    project       project a configured preparation onto the localized basis
    discriminate  play one phase-discrimination game (closed form + oracle)
    sweep         regenerate figure data or a custom parameter sweep
    check         run the invariant and oracle suites

Configs are strict JSON (unknown keys are rejected); complex numbers are
written as two-element [re, im] arrays and bare numbers are accepted as
purely real. The schema is documented in the README. Exit codes: 0 success,
1 check failure, 2 config error, 3 degenerate physics input.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .discrimination import (
    PhaseChannel,
    closed_form_error_general,
    closed_form_error_product,
    optimal_povm,
)
from .experiments import (
    SweepAxis,
    SweepRecord,
    SweepSpec,
    preset_spec,
    run_sweep,
)
from .selfcheck import DEFAULT_DRAWS, DEFAULT_SEED, run_selfcheck
from .states import (
    BASIS_LABELS,
    DensityMatrix4,
    MixedDiagonal,
    OverlapAmplitudes,
    PureProduct,
    SpinLabel,
    SpinSuperposition,
    StateVector4,
    Statistics,
    VanishingProjection,
    basis_index,
    coherence_l1,
    is_incoherent,
    project_distinguishable,
    project_mixed,
    project_pure,
    project_superposition,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

PRESETS = ("fig3a", "fig3b", "fig4", "fig5")
_OMEGA_KEYS = ("down_down", "down_up", "up_down", "up_up")

SWEEP_COLUMNS = ("p_err_overlap", "p_err_baseline", "p_err_boson",
                 "p_err_fermion")


class ConfigError(ValueError):
    """The configuration file does not match the schema."""


# ---------------------------------------------------------------------------
# strict JSON helpers


def _require_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigError(f"{where} must be an object, got {type(value).__name__}")
    return value


def _check_keys(mapping: dict, allowed: set, required: set, where: str) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown keys in {where}: {sorted(unknown)}")
    missing = required - set(mapping)
    if missing:
        raise ConfigError(f"missing keys in {where}: {sorted(missing)}")


def parse_complex(value, where: str) -> complex:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return complex(value)
    if (isinstance(value, list) and len(value) == 2
            and all(isinstance(x, (int, float)) and not isinstance(x, bool)
                    for x in value)):
        return complex(value[0], value[1])
    raise ConfigError(f"{where} must be a number or a [re, im] pair, got {value!r}")


def _parse_real(value, where: str) -> float:
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    raise ConfigError(f"{where} must be a number, got {value!r}")


def complex_pair(z: complex) -> list[float]:
    return [z.real, z.imag]


# ---------------------------------------------------------------------------
# scenario configuration


@dataclass(frozen=True)
class OutputSpec:
    path: str | None = None
    format: str | None = None


@dataclass(frozen=True)
class ScenarioConfig:
    preparation: MixedDiagonal | PureProduct | SpinSuperposition
    overlaps: OverlapAmplitudes
    statistics: Statistics
    channel: PhaseChannel
    output: OutputSpec | None = None


def _parse_spin(value, where: str) -> SpinLabel:
    if value == "down":
        return SpinLabel.DOWN
    if value == "up":
        return SpinLabel.UP
    raise ConfigError(f"{where} must be 'down' or 'up', got {value!r}")


def _parse_preparation(data) -> MixedDiagonal | PureProduct | SpinSuperposition:
    data = _require_mapping(data, "preparation")
    kind = data.get("kind")
    if kind == "mixed_diagonal":
        _check_keys(data, {"kind", "weights"}, {"kind", "weights"}, "preparation")
        weights = data["weights"]
        if not isinstance(weights, list) or len(weights) != 4:
            raise ConfigError("preparation.weights must be a list of 4 numbers "
                              "in basis order (down_down, down_up, up_down, up_up)")
        return MixedDiagonal(weights=tuple(
            _parse_real(w, "preparation.weights") for w in weights))
    if kind == "pure_product":
        _check_keys(data, {"kind", "first", "second"},
                    {"kind", "first", "second"}, "preparation")
        return PureProduct(first=_parse_spin(data["first"], "preparation.first"),
                           second=_parse_spin(data["second"], "preparation.second"))
    if kind == "spin_superposition":
        _check_keys(data, {"kind", "up_amp", "down_amp"},
                    {"kind", "up_amp", "down_amp"}, "preparation")
        return SpinSuperposition(
            up_amp=parse_complex(data["up_amp"], "preparation.up_amp"),
            down_amp=parse_complex(data["down_amp"], "preparation.down_amp"))
    raise ConfigError(
        f"preparation.kind must be 'mixed_diagonal', 'pure_product' or "
        f"'spin_superposition', got {kind!r}")


def _preparation_to_dict(prep) -> dict:
    if isinstance(prep, MixedDiagonal):
        return {"kind": "mixed_diagonal", "weights": list(prep.weights)}
    if isinstance(prep, PureProduct):
        return {"kind": "pure_product", "first": prep.first.name.lower(),
                "second": prep.second.name.lower()}
    return {"kind": "spin_superposition",
            "up_amp": complex_pair(prep.up_amp),
            "down_amp": complex_pair(prep.down_amp)}


def _parse_overlaps(data) -> OverlapAmplitudes:
    data = _require_mapping(data, "overlaps")
    keys = {"l", "r", "l_prime", "r_prime"}
    _check_keys(data, keys, keys, "overlaps")
    try:
        return OverlapAmplitudes(
            l=parse_complex(data["l"], "overlaps.l"),
            r=parse_complex(data["r"], "overlaps.r"),
            l_prime=parse_complex(data["l_prime"], "overlaps.l_prime"),
            r_prime=parse_complex(data["r_prime"], "overlaps.r_prime"))
    except ValueError as exc:
        raise ConfigError(f"overlaps: {exc}") from exc


def _parse_statistics(value) -> Statistics:
    try:
        return Statistics(value)
    except ValueError as exc:
        raise ConfigError(
            f"statistics must be 'boson', 'fermion' or 'distinguishable', "
            f"got {value!r}") from exc


def _parse_omega(data) -> tuple[float, float, float, float]:
    data = _require_mapping(data, "channel.omega")
    _check_keys(data, set(_OMEGA_KEYS), set(_OMEGA_KEYS), "channel.omega")
    return tuple(_parse_real(data[key], f"channel.omega.{key}")
                 for key in _OMEGA_KEYS)


def _parse_channel(data) -> PhaseChannel:
    data = _require_mapping(data, "channel")
    keys = {"omega", "phases", "priors"}
    _check_keys(data, keys, keys, "channel")
    phases = data["phases"]
    priors = data["priors"]
    for name, pair in (("phases", phases), ("priors", priors)):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ConfigError(f"channel.{name} must be a list of 2 numbers")
    try:
        return PhaseChannel(
            omega=_parse_omega(data["omega"]),
            phi=tuple(_parse_real(x, "channel.phases") for x in phases),
            priors=tuple(_parse_real(x, "channel.priors") for x in priors))
    except ValueError as exc:
        raise ConfigError(f"channel: {exc}") from exc


def _parse_output(data) -> OutputSpec:
    data = _require_mapping(data, "output")
    _check_keys(data, {"path", "format"}, set(), "output")
    fmt = data.get("format")
    if fmt is not None and fmt not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {fmt!r}")
    path = data.get("path")
    if path is not None and not isinstance(path, str):
        raise ConfigError("output.path must be a string")
    return OutputSpec(path=path, format=fmt)


def scenario_from_dict(data) -> ScenarioConfig:
    data = _require_mapping(data, "config")
    allowed = {"preparation", "overlaps", "statistics", "channel", "output"}
    required = {"preparation", "overlaps", "statistics", "channel"}
    _check_keys(data, allowed, required, "config")
    output = _parse_output(data["output"]) if "output" in data else None
    return ScenarioConfig(
        preparation=_parse_preparation(data["preparation"]),
        overlaps=_parse_overlaps(data["overlaps"]),
        statistics=_parse_statistics(data["statistics"]),
        channel=_parse_channel(data["channel"]),
        output=output)


def scenario_to_dict(config: ScenarioConfig) -> dict:
    data = {
        "preparation": _preparation_to_dict(config.preparation),
        "overlaps": {
            "l": complex_pair(config.overlaps.l),
            "r": complex_pair(config.overlaps.r),
            "l_prime": complex_pair(config.overlaps.l_prime),
            "r_prime": complex_pair(config.overlaps.r_prime),
        },
        "statistics": config.statistics.value,
        "channel": {
            "omega": dict(zip(_OMEGA_KEYS, config.channel.omega)),
            "phases": list(config.channel.phi),
            "priors": list(config.channel.priors),
        },
    }
    if config.output is not None:
        data["output"] = {"path": config.output.path,
                          "format": config.output.format}
    return data


# ---------------------------------------------------------------------------
# sweep configuration


def _parse_axis(data, index: int) -> SweepAxis:
    data = _require_mapping(data, f"sweep.grid[{index}]")
    keys = {"name", "min", "max", "points"}
    _check_keys(data, keys, keys, f"sweep.grid[{index}]")
    name = data["name"]
    if not isinstance(name, str):
        raise ConfigError(f"sweep.grid[{index}].name must be a string")
    points = data["points"]
    if not isinstance(points, int) or isinstance(points, bool):
        raise ConfigError(f"sweep.grid[{index}].points must be an integer")
    try:
        return SweepAxis(name=name,
                         lo=_parse_real(data["min"], "sweep.grid.min"),
                         hi=_parse_real(data["max"], "sweep.grid.max"),
                         points=points)
    except ValueError as exc:
        raise ConfigError(f"sweep.grid[{index}]: {exc}") from exc


def _parse_sweep_fixed(data) -> dict:
    data = _require_mapping(data, "sweep.fixed")
    fixed = {}
    for key, value in data.items():
        if key == "mode":
            fixed[key] = value
        elif key == "omega":
            fixed[key] = _parse_omega(value)
        elif key in ("p1", "phi12"):
            fixed[key] = _parse_real(value, f"sweep.fixed.{key}")
        elif key in ("l", "r", "l_prime", "r_prime", "up_amp", "down_amp"):
            fixed[key] = parse_complex(value, f"sweep.fixed.{key}")
        else:
            raise ConfigError(f"unknown keys in sweep.fixed: ['{key}']")
    return fixed


def sweep_from_dict(data) -> SweepSpec:
    data = _require_mapping(data, "config")
    _check_keys(data, {"sweep", "output"}, {"sweep"}, "config")
    sweep = _require_mapping(data["sweep"], "sweep")
    keys = {"figure", "grid", "fixed"}
    _check_keys(sweep, keys, keys, "sweep")
    grid = sweep["grid"]
    if not isinstance(grid, list) or not grid:
        raise ConfigError("sweep.grid must be a non-empty list of axes")
    axes = tuple(_parse_axis(axis, i) for i, axis in enumerate(grid))
    try:
        return SweepSpec(figure=sweep["figure"], grid=axes,
                         fixed=_parse_sweep_fixed(sweep["fixed"]))
    except ValueError as exc:
        raise ConfigError(f"sweep: {exc}") from exc


# ---------------------------------------------------------------------------
# formatting and output


def format_number(value: float) -> str:
    """Shortest decimal at up to 15 significant digits (bit-stable output)."""
    return format(float(value), ".15g")


def _write_text(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        Path(out_path).write_text(text, encoding="utf-8")


def _dump_json(payload, out_path: str | None) -> None:
    _write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", out_path)


def _matrix_payload(mat: np.ndarray) -> dict:
    return {"re": [[float(x.real) for x in row] for row in mat],
            "im": [[float(x.imag) for x in row] for row in mat]}


def _single_row_csv(header: list[str], row: list[str],
                    out_path: str | None) -> None:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerow(row)
    _write_text(buffer.getvalue(), out_path)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    return format_number(value)


# ---------------------------------------------------------------------------
# project command


def _project_scenario(config: ScenarioConfig):
    prep = config.preparation
    stats = config.statistics
    if stats is Statistics.DISTINGUISHABLE:
        if not isinstance(prep, MixedDiagonal):
            raise ConfigError(
                "distinguishable statistics require a mixed_diagonal "
                "preparation (labelled particles carry no exchange branch)")
        return project_distinguishable(prep, config.overlaps)
    if isinstance(prep, MixedDiagonal):
        return project_mixed(prep, config.overlaps, stats)
    if isinstance(prep, PureProduct):
        return project_pure(prep, config.overlaps, stats)
    return project_superposition(prep, config.overlaps, stats)


def _state_payload(state: StateVector4) -> dict:
    rho = DensityMatrix4(mat=state.projector(), trace_raw=state.norm_sq_raw)
    return {
        "kind": "state_vector",
        "basis": list(BASIS_LABELS),
        "amplitudes_re": [float(x.real) for x in state.entries],
        "amplitudes_im": [float(x.imag) for x in state.entries],
        "norm_sq_raw": state.norm_sq_raw,
        "coherent": not is_incoherent(rho),
        "coherence_l1": coherence_l1(rho),
    }


def _density_payload(rho: DensityMatrix4) -> dict:
    matrix = _matrix_payload(rho.mat)
    return {
        "kind": "density_matrix",
        "basis": list(BASIS_LABELS),
        "matrix_re": matrix["re"],
        "matrix_im": matrix["im"],
        "trace_raw": rho.trace_raw,
        "coherent": not is_incoherent(rho),
        "coherence_l1": coherence_l1(rho),
    }


def _project_csv(payload: dict, out_path: str | None) -> None:
    header: list[str] = []
    row: list[str] = []
    if payload["kind"] == "state_vector":
        for i in range(4):
            header += [f"amp{i}_re", f"amp{i}_im"]
            row += [format_number(payload["amplitudes_re"][i]),
                    format_number(payload["amplitudes_im"][i])]
        header.append("norm_sq_raw")
        row.append(format_number(payload["norm_sq_raw"]))
    else:
        for i in range(4):
            for j in range(4):
                header += [f"rho{i}{j}_re", f"rho{i}{j}_im"]
                row += [format_number(payload["matrix_re"][i][j]),
                        format_number(payload["matrix_im"][i][j])]
        header.append("trace_raw")
        row.append(format_number(payload["trace_raw"]))
    header += ["coherent", "coherence_l1"]
    row += [_csv_cell(payload["coherent"]), format_number(payload["coherence_l1"])]
    _single_row_csv(header, row, out_path)


def cmd_project(config: ScenarioConfig, out_path: str | None, fmt: str) -> int:
    projected = _project_scenario(config)
    if isinstance(projected, StateVector4):
        payload = _state_payload(projected)
    else:
        payload = _density_payload(projected)
    if fmt == "json":
        _dump_json(payload, out_path)
    else:
        _project_csv(payload, out_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# discriminate command


def _closed_form_for(config: ScenarioConfig) -> float:
    prep = config.preparation
    channel = config.channel
    if isinstance(prep, SpinSuperposition):
        return closed_form_error_general(prep, config.overlaps,
                                         config.statistics, channel)
    if prep.first == prep.second:
        # single-basis-state hypotheses differ by a global phase only
        return min(channel.priors)
    if (prep.first, prep.second) == (SpinLabel.DOWN, SpinLabel.UP):
        return closed_form_error_product(config.overlaps, channel)
    # same two-branch form, with the generator weights the two branches see
    remapped = PhaseChannel(
        omega=(channel.omega[0],
               channel.omega[basis_index(prep.first, prep.second)],
               channel.omega[basis_index(prep.second, prep.first)],
               channel.omega[3]),
        phi=channel.phi, priors=channel.priors)
    return closed_form_error_product(config.overlaps, remapped)


def cmd_discriminate(config: ScenarioConfig, out_path: str | None,
                     fmt: str) -> int:
    prep = config.preparation
    if isinstance(prep, MixedDiagonal):
        raise ConfigError("the discrimination game needs a pure preparation "
                          "(pure_product or spin_superposition)")
    if config.statistics is Statistics.DISTINGUISHABLE:
        raise ConfigError(
            "the discrimination game projects identical particles; model "
            "distinguishable ones by setting l_prime and r to zero")
    if isinstance(prep, PureProduct):
        state = project_pure(prep, config.overlaps, config.statistics)
    else:
        state = project_superposition(prep, config.overlaps, config.statistics)
    closed = _closed_form_for(config)
    outcome = optimal_povm(config.channel, state)
    payload = {
        "p_err_closed_form": closed,
        "p_err_povm": outcome.p_err,
        "difference": abs(closed - outcome.p_err),
        "lambda_plus": outcome.lambda_plus,
        "overlap_re": outcome.overlap.real,
        "overlap_im": outcome.overlap.imag,
        "povm": [_matrix_payload(element) for element in outcome.povm.elements],
    }
    if fmt == "json":
        _dump_json(payload, out_path)
        return EXIT_OK
    header = ["p_err_closed_form", "p_err_povm", "difference", "lambda_plus",
              "overlap_re", "overlap_im"]
    row = [format_number(payload[key]) for key in header]
    for k, element in enumerate(payload["povm"], start=1):
        for i in range(4):
            for j in range(4):
                header += [f"pi{k}_{i}{j}_re", f"pi{k}_{i}{j}_im"]
                row += [format_number(element["re"][i][j]),
                        format_number(element["im"][i][j])]
    _single_row_csv(header, row, out_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# sweep command


def _sweep_csv_text(spec: SweepSpec, records: list[SweepRecord]) -> str:
    axis_names = [axis.name for axis in spec.grid]
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(axis_names + list(SWEEP_COLUMNS) + ["flag"])
    for record in records:
        row = [format_number(record.coordinates[name]) for name in axis_names]
        row += [_csv_cell(getattr(record, column)) for column in SWEEP_COLUMNS]
        row.append(record.flag)
        writer.writerow(row)
    return buffer.getvalue()


def _sweep_json_payload(spec: SweepSpec, records: list[SweepRecord]) -> dict:
    return {
        "figure": spec.figure,
        "records": [
            {
                "coordinates": record.coordinates,
                **{column: getattr(record, column) for column in SWEEP_COLUMNS},
                "flag": record.flag,
            }
            for record in records
        ],
    }


def cmd_sweep(spec: SweepSpec, out_path: str | None, fmt: str) -> int:
    records = run_sweep(spec)
    if fmt == "json":
        _dump_json(_sweep_json_payload(spec, records), out_path)
    else:
        _write_text(_sweep_csv_text(spec, records), out_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# check command


def cmd_check(n: int, seed: int, tolerance_scale: float = 1.0) -> int:
    results = run_selfcheck(n=n, seed=seed, tolerance_scale=tolerance_scale)
    for result in results:
        print(result.line())
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed "
          f"(n={n}, seed={seed})")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing and dispatch


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sloccsim",
        description="Localized-projection and phase-discrimination simulator "
                    "for two identical spins.")
    sub = parser.add_subparsers(dest="command", required=True)

    project = sub.add_parser("project", help="project a preparation onto the "
                                             "localized basis")
    project.add_argument("--config", required=True, help="JSON scenario config")
    project.add_argument("--out", help="output path (default: stdout)")
    project.add_argument("--format", choices=("csv", "json"),
                         help="output format (default: json)")

    disc = sub.add_parser("discriminate", help="play one phase-discrimination "
                                               "game")
    disc.add_argument("--config", required=True, help="JSON scenario config")
    disc.add_argument("--out", help="output path (default: stdout)")
    disc.add_argument("--format", choices=("csv", "json"),
                      help="output format (default: json)")

    sweep = sub.add_parser("sweep", help="run a parameter sweep")
    sweep.add_argument("--preset", choices=PRESETS,
                       help="bundled figure preset")
    sweep.add_argument("--config", help="JSON sweep config (alternative to "
                                        "--preset)")
    sweep.add_argument("--out", help="output path (default: stdout)")
    sweep.add_argument("--format", choices=("csv", "json"),
                       help="output format (default: csv)")

    check = sub.add_parser("check", help="run the invariant and oracle suites")
    check.add_argument("--n", type=int, default=DEFAULT_DRAWS,
                       help="random draws per suite")
    check.add_argument("--seed", type=int, default=DEFAULT_SEED,
                       help="campaign seed")
    check.add_argument("--tolerance-scale", type=float, default=1.0,
                       help=argparse.SUPPRESS)
    return parser


def _load_json(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


def _resolve_output(args, config_output: OutputSpec | None,
                    default_fmt: str) -> tuple[str | None, str]:
    out_path = args.out
    fmt = args.format
    if config_output is not None:
        if out_path is None:
            out_path = config_output.path
        if fmt is None:
            fmt = config_output.format
    return out_path, fmt or default_fmt


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "project" or args.command == "discriminate":
            config = scenario_from_dict(_load_json(args.config))
            out_path, fmt = _resolve_output(args, config.output, "json")
            if args.command == "project":
                return cmd_project(config, out_path, fmt)
            return cmd_discriminate(config, out_path, fmt)
        if args.command == "sweep":
            if (args.preset is None) == (args.config is None):
                raise ConfigError("sweep needs exactly one of --preset or "
                                  "--config")
            if args.preset is not None:
                spec = preset_spec(args.preset)
                output = None
            else:
                data = _load_json(args.config)
                spec = sweep_from_dict(data)
                output = (_parse_output(data["output"])
                          if "output" in data else None)
            out_path, fmt = _resolve_output(args, output, "csv")
            return cmd_sweep(spec, out_path, fmt)
        return cmd_check(n=args.n, seed=args.seed,
                         tolerance_scale=args.tolerance_scale)
    except VanishingProjection as exc:
        print(f"degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as exc:
        # ConfigError plus any domain violation raised by the library types
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
