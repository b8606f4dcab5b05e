"""
CSV / JSON emission and experiment config files for the CLI.

Config files are flat `key = value` text read with python-dotenv, e.g.

    N = 256
    p = 128
    q = 128
    beta = 2
    replicates = 20000
    t_grid = 0.3, 0.6, 1.0
    interval = (1.2, 1.7)
"""
import csv
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np
from dotenv import dotenv_values

from projsum import __version__
from projsum.densities import LimitShape, shape_mass
from projsum.ensembles import EnsembleParams
from projsum.spectra import Interval, Spectrum
from projsum.stats import ExperimentConfig, ExperimentError


class ConfigSchemaError(ValueError):
    """Raised for config-file schema violations. The message starts with the offending key."""


def format_float(x: float) -> str:
    """17 significant digits: parses back to the same double."""
    return format(float(x), ".17g")


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    return str(value)


def write_csv(path: Path, header: list[str], rows: Iterable[Iterable[Any]], comments: Iterable[str] = ()) -> None:
    """RFC-4180 rows (CRLF). Leading comment lines start with '#'."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as f:
        for line in comments:
            f.write(f"# {line}\r\n")
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_json(path: Path, data: Any) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="\n", encoding="utf-8") as f:
        json.dump(data, f, indent=2, sort_keys=True, allow_nan=False)
        f.write("\n")


# -----------------------------------------------------------------------------
# spectrum / density files
# -----------------------------------------------------------------------------

SPECTRUM_HEADER = ["index", "value", "kind"]
DENSITY_HEADER = ["kind", "x", "value"]


def spectrum_rows(spec: Spectrum) -> list[list[Any]]:
    """One row per eigenvalue, ascending; atoms are written at their exact location."""
    entries = [(float(v), "continuous") for v in spec.continuous_eigenvalues]
    entries += [(0.0, "atom_zero")] * spec.atom_at_zero
    entries += [(float(spec.theta), "atom_theta")] * spec.atom_at_theta
    entries += [(1.0 + spec.theta, "atom_top")] * spec.atom_at_top
    entries.sort(key=lambda e: e[0])
    return [[i, value, kind] for i, (value, kind) in enumerate(entries)]


def write_spectrum_csv(path: Path, spec: Spectrum) -> None:
    write_csv(path, SPECTRUM_HEADER, spectrum_rows(spec))


def density_grid(shape: LimitShape, grid_points: int) -> np.ndarray:
    """Cell midpoints on each support interval, so no grid point sits on an endpoint or pole."""
    per = max(1, grid_points // len(shape.intervals))
    parts = []
    for iv in shape.intervals:
        step = iv.length / per
        parts.append(iv.lo + step * (np.arange(per) + 0.5))
    return np.sort(np.concatenate(parts))


def write_density_csv(path: Path, shape: LimitShape, grid_points: int) -> float:
    """Grid rows then atom rows; support goes in a leading comment and the mass in a trailing one."""
    if grid_points < 1:
        raise ValueError("grid_points must be >= 1")
    xs = density_grid(shape, grid_points)
    values = shape.density(xs)
    mass = shape_mass(shape)
    support = "; ".join(f"[{format_float(iv.lo)}, {format_float(iv.hi)}]" for iv in shape.intervals)
    rows: list[list[Any]] = [["density", x, v] for x, v in zip(xs, values)]
    rows += [["atom", loc, w] for loc, w in shape.atoms]
    write_csv(path, DENSITY_HEADER, rows, comments=[f"support: {support}"])
    atoms = ", ".join(f"({format_float(loc)}, {format_float(w)})" for loc, w in shape.atoms)
    with open(path, "a", newline="", encoding="utf-8") as f:
        f.write(f"# mass={format_float(mass)} atoms=[{atoms}]\r\n")
    return mass


# -----------------------------------------------------------------------------
# experiment config
# -----------------------------------------------------------------------------

# mode -> defaults at acceptance scale
MODE_DEFAULTS: dict[str, dict[str, str]] = {
    "counting": {"N": "512", "p": "128", "q": "128", "replicates": "4000", "interval": "(1.2, 1.7)"},
    "variance_growth": {
        "N": "128", "p": "32", "q": "32", "replicates": "4000",
        "interval": "(1.2, 1.7)", "n_ladder": "128, 256, 512, 1024",
    },
    "hard_edge": {"N": "256", "p": "128", "q": "128", "replicates": "20000", "t_grid": "0.3, 0.6, 1.0"},
    "soft_edge": {"N": "512", "p": "128", "q": "128", "replicates": "4000"},
    "histogram": {"N": "256", "p": "64", "q": "64", "replicates": "4000", "bin_width": "0.05"},
    "bijection": {"N": "64", "p": "16", "q": "24", "replicates": "2000"},
    "invariance": {"N": "32", "p": "8", "q": "12", "replicates": "2000"},
}

SCHEMA_KEYS = (
    "N", "p", "q", "theta", "beta", "replicates", "seed",
    "interval", "t_grid", "n_ladder", "bin_width", "allow_overfull",
)


def _int(key: str, raw: str) -> int:
    try:
        return int(raw)
    except ValueError:
        raise ConfigSchemaError(f"{key}: expected an integer, got {raw!r}")


def _float(key: str, raw: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ConfigSchemaError(f"{key}: expected a number, got {raw!r}")


def _bool(key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ConfigSchemaError(f"{key}: expected a boolean, got {raw!r}")


def _list(key: str, raw: str, conv) -> tuple:
    text = raw.strip().strip("()[]")
    if not text:
        return ()
    return tuple(conv(key, part.strip()) for part in text.split(",") if part.strip())


def parse_interval(key: str, raw: str) -> Interval:
    """'(lo, hi)', '[lo, hi]' and mixed brackets; brackets decide open/closed endpoints."""
    text = raw.strip()
    if len(text) < 5 or text[0] not in "([" or text[-1] not in ")]":
        raise ConfigSchemaError(f"{key}: expected an interval like (1.2, 1.7), got {raw!r}")
    parts = text[1:-1].split(",")
    if len(parts) != 2:
        raise ConfigSchemaError(f"{key}: expected two endpoints, got {raw!r}")
    lo, hi = _float(key, parts[0].strip()), _float(key, parts[1].strip())
    try:
        return Interval(lo, hi, text[0] == "[", text[-1] == "]")
    except ValueError as e:
        raise ConfigSchemaError(f"{key}: {e}")


def read_config_file(path: Path) -> dict[str, str]:
    if not path.is_file():
        raise ConfigSchemaError(f"config: file not found: {path}")
    values = dotenv_values(path)
    out = {}
    for key, value in values.items():
        if key not in SCHEMA_KEYS:
            raise ConfigSchemaError(f"{key}: unknown config key (allowed: {', '.join(SCHEMA_KEYS)})")
        if value is None:
            raise ConfigSchemaError(f"{key}: missing value")
        out[key] = value
    return out


def build_experiment_config(
    mode: str,
    values: dict[str, str],
    seed: int | None = None,
    threads: int | None = None,
) -> ExperimentConfig:
    """Merge mode defaults, file values and an explicit seed, then validate."""
    if mode not in MODE_DEFAULTS:
        raise ConfigSchemaError(f"mode: unknown mode {mode!r}")
    raw = {"theta": "1", "beta": "2", "seed": "0", "allow_overfull": "false"}
    raw.update(MODE_DEFAULTS[mode])
    raw.update(values)
    master_seed = seed if seed is not None else _int("seed", raw["seed"])
    try:
        params = EnsembleParams.from_ranks(
            _int("N", raw["N"]),
            _int("p", raw["p"]),
            _int("q", raw["q"]),
            theta=_float("theta", raw["theta"]),
            beta=_int("beta", raw["beta"]),
            allow_overfull=_bool("allow_overfull", raw["allow_overfull"]),
        )
    except ConfigSchemaError:
        raise
    except ValueError as e:
        raise ConfigSchemaError(f"N/p/q/theta/beta: {e}")
    try:
        return ExperimentConfig(
            params=params,
            replicates=_int("replicates", raw["replicates"]),
            master_seed=master_seed,
            mode=mode,
            interval=parse_interval("interval", raw["interval"]) if raw.get("interval") else None,
            t_grid=_list("t_grid", raw.get("t_grid", ""), _float),
            n_ladder=_list("n_ladder", raw.get("n_ladder", ""), _int),
            bin_width=_float("bin_width", raw.get("bin_width", "0.05")),
            threads=threads,
        )
    except ExperimentError as e:
        raise ConfigSchemaError(f"{mode}: {e}")


# -----------------------------------------------------------------------------
# report.json schema
# -----------------------------------------------------------------------------

_NUMBER = (int, float)
_NONE = type(None)

REPORT_KEYS: dict[str, tuple[type, ...]] = {
    "config": (dict,),
    "summary": (dict,),
    "assertions": (list,),
    "passed": (bool,),
}

REPORT_CONFIG_KEYS: dict[str, tuple[type, ...]] = {
    "mode": (str,),
    "N": (int,),
    "p": (int,),
    "q": (int,),
    "theta": _NUMBER,
    "beta": (int,),
    "allow_overfull": (bool,),
    "swapped": (bool,),
    "replicates": (int,),
    "seed": (int,),
    "interval": (dict, _NONE),
    "t_grid": (list,),
    "n_ladder": (list,),
    "bin_width": _NUMBER,
}

ASSERTION_KEYS: dict[str, tuple[type, ...]] = {
    "name": (str,),
    "passed": (bool, _NONE),
    "value": _NUMBER,
    "threshold": (str,),
    "detail": (str,),
}


def _check_keys(where: str, data: Any, schema: dict[str, tuple[type, ...]]) -> None:
    if not isinstance(data, dict):
        raise ValueError(f"{where}: expected an object")
    if set(data) != set(schema):
        raise ValueError(f"{where}: keys {sorted(data)} do not match {sorted(schema)}")
    for key, types in schema.items():
        if not isinstance(data[key], types):
            raise ValueError(f"{where}.{key}: unexpected type {type(data[key]).__name__}")


def check_report(data: dict[str, Any]) -> dict[str, Any]:
    """Validates a report dict against the report.json schema and returns it unchanged."""
    _check_keys("report", data, REPORT_KEYS)
    _check_keys("report.config", data["config"], REPORT_CONFIG_KEYS)
    for i, item in enumerate(data["assertions"]):
        _check_keys(f"report.assertions[{i}]", item, ASSERTION_KEYS)
    return data


@dataclass
class RunManifest:
    config: dict[str, Any]
    tool_version: str = __version__
    started_at: str = ""
    finished_at: str = ""
    output_paths: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)
