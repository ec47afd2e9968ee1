"""Config-file loading.

Systems are described in a single TOML file (JSON with the same layout is
accepted for machine-generated input):

    alpha = [0.4, 0.3, 0.5]
    matrix = [[0.0, 1.0, -1.0],
              [0.2, 0.0, 0.0],
              [0.0, 0.5, 0.0]]
    x0 = [1.0, -2.0, 2.0]          # optional, defaults to zeros

    [forcing.1]                    # optional, keys "1".."3"
    kind = "piecewise_power"       # zero | constant | piecewise_power | table
    t_break = 1.0
    constant_before = 1.0
    exponent_after = -2.0

    [[nonlinearity.1]]             # optional polynomial terms per component
    coefficient = 1.0
    exponents = [1, 1, 0]          # x1 * x2
"""

from __future__ import annotations

import json
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .model import (
    ConstantForcing,
    MultiOrder,
    MultiOrderSystem,
    NonlinearitySpec,
    PiecewisePowerForcing,
    PolynomialTerm,
    SystemMatrix,
    TableForcing,
    ZeroForcing,
    validate,
)

__all__ = ["load_system", "system_from_mapping"]


def _vector3(raw, name):
    if not isinstance(raw, (list, tuple)) or len(raw) != 3:
        raise ConfigError(f"'{name}' must be a list of 3 numbers")
    try:
        return tuple(float(v) for v in raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"'{name}' must contain numbers") from exc


def _forcing_from_mapping(raw, key):
    if not isinstance(raw, dict):
        raise ConfigError(f"forcing.{key} must be a table")
    kind = raw.get("kind")
    try:
        if kind == "zero":
            return ZeroForcing()
        if kind == "constant":
            return ConstantForcing(const=float(raw["value"]))
        if kind == "piecewise_power":
            return PiecewisePowerForcing(
                t_break=float(raw["t_break"]),
                constant_before=float(raw["constant_before"]),
                exponent_after=float(raw["exponent_after"]),
            )
        if kind == "table":
            return TableForcing(
                times=tuple(float(v) for v in raw["t"]),
                values=tuple(float(v) for v in raw["value"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"forcing.{key}: bad or missing field ({exc})") from exc
    raise ConfigError(f"forcing.{key}: unknown kind {kind!r}")


def _terms_from_mapping(raw, key):
    if not isinstance(raw, list):
        raise ConfigError(f"nonlinearity.{key} must be an array of tables")
    out = []
    for entry in raw:
        try:
            exps = entry["exponents"]
            if len(exps) != 3:
                raise ConfigError(f"nonlinearity.{key}: exponents must have 3 entries")
            out.append(
                PolynomialTerm(
                    coefficient=float(entry["coefficient"]),
                    exponents=tuple(int(e) for e in exps),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"nonlinearity.{key}: bad term ({exc})") from exc
    return tuple(out)


def system_from_mapping(data: dict) -> MultiOrderSystem:
    """Build and validate a system from an already-parsed mapping."""
    if "alpha" not in data:
        raise ConfigError("missing required key 'alpha'")
    if "matrix" not in data:
        raise ConfigError("missing required key 'matrix'")
    alpha = _vector3(data["alpha"], "alpha")
    raw_m = data["matrix"]
    if not isinstance(raw_m, (list, tuple)) or len(raw_m) != 3:
        raise ConfigError("'matrix' must be a list of 3 rows")
    rows = [_vector3(r, "matrix row") for r in raw_m]

    forcing = [ZeroForcing(), ZeroForcing(), ZeroForcing()]
    for key, raw in (data.get("forcing") or {}).items():
        if str(key) not in ("1", "2", "3"):
            raise ConfigError(f"forcing component must be 1..3, got {key!r}")
        forcing[int(key) - 1] = _forcing_from_mapping(raw, key)

    nonlinearity = None
    if data.get("nonlinearity"):
        comps = [(), (), ()]
        for key, raw in data["nonlinearity"].items():
            if str(key) not in ("1", "2", "3"):
                raise ConfigError(f"nonlinearity component must be 1..3, got {key!r}")
            comps[int(key) - 1] = _terms_from_mapping(raw, key)
        nonlinearity = NonlinearitySpec(terms=tuple(comps))

    x0 = _vector3(data["x0"], "x0") if "x0" in data else (0.0, 0.0, 0.0)

    system = MultiOrderSystem(
        order=MultiOrder(alpha=alpha),
        matrix=SystemMatrix(rows),
        forcing=tuple(forcing),
        nonlinearity=nonlinearity,
        x0=x0,
    )
    return validate(system)


def load_system(path: str | Path) -> MultiOrderSystem:
    """Read a system from a TOML (or JSON) config file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    try:
        if path.suffix.lower() == ".json":
            data = json.loads(raw.decode("utf-8"))
        else:
            data = tomllib.loads(raw.decode("utf-8"))
    except (ValueError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"top level of {path} must be a table/object")
    return system_from_mapping(data)
