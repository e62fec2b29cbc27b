"""Run configuration: JSON file plus command-line overrides.

The file is a flat JSON object.  Physics can be given as raw values or as
the dimensionless products that actually enter the physics:

=================  ===============================  ==========================
quantity           raw keys                         product key
=================  ===============================  ==========================
level spacing      ``omega0``, ``omega1`` or        (none; defaults 0 and 1)
                   ``omega``
branch gap         ``delta``                        ``omega_delta``
Bob phase offset   ``tau_a``, ``tau_b``             ``omega_dtau``
=================  ===============================  ==========================

Naming both sides of a row in the same source is an error.  Values given on
the command line replace the whole row from the file.  ``alpha_sq`` and
``beta_sq`` form one group: give either (the other is ``1 - value``) or both
(they must sum to 1).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Mapping

import jsonschema

from .ensemble import BASES, ExperimentConfig
from .protocol import MetricSuperposition, ProperTimes, QubitParams


class ConfigError(ValueError):
    """Malformed, conflicting or out-of-range configuration."""


_NUM = {"type": "number"}
_VERTEX_LIST = {
    "type": "array",
    "minItems": 2,
    "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
}

CONFIG_SCHEMA: dict[str, Any] = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "omega0": _NUM,
        "omega1": _NUM,
        "omega": {"type": "number", "exclusiveMinimum": 0},
        "tau_a": {"type": "number", "minimum": 0},
        "tau_b": {"type": "number", "minimum": 0},
        "delta": _NUM,
        "omega_delta": _NUM,
        "omega_dtau": _NUM,
        "alpha_sq": {"type": "number", "minimum": 0, "maximum": 1},
        "beta_sq": {"type": "number", "minimum": 0, "maximum": 1},
        "alpha_phase": _NUM,
        "beta_phase": _NUM,
        "trials": {"type": "integer", "minimum": 1},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "stream_id": {"type": "integer", "minimum": 0},
        "bases": {
            "type": "array",
            "items": {"enum": list(BASES)},
            "minItems": 1,
            "uniqueItems": True,
        },
        "sweep_variable": {"enum": ["omega_delta_product", "alpha_sq"]},
        "sweep_min": _NUM,
        "sweep_max": _NUM,
        "sweep_steps": {"type": "integer", "minimum": 2},
        "metric": {"enum": ["standard", "pullback", "custom"]},
        "linear": {
            "type": "array",
            "minItems": 2,
            "maxItems": 2,
            "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        },
        "offset": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
        "components": {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3},
        "separation": {"type": "number", "exclusiveMinimum": 0},
        "t1": _NUM,
        "alice": _VERTEX_LIST,
        "bob": _VERTEX_LIST,
    },
}

# mutually exclusive (raw, product) key sets
EXCLUSIVE_GROUPS = (
    ({"omega0", "omega1"}, {"omega"}),
    ({"delta"}, {"omega_delta"}),
    ({"tau_a", "tau_b"}, {"omega_dtau"}),
)
# keys an override replaces as a unit
OVERRIDE_GROUPS = tuple(a | b for a, b in EXCLUSIVE_GROUPS) + ({"alpha_sq", "beta_sq"},)


@dataclass(frozen=True)
class ResolvedConfig:
    """Fully resolved parameter set; every field has a concrete value.

    Raw and product forms are both stored and are mutually consistent.
    """

    omega0: float = 0.0
    omega1: float = 1.0
    tau_a: float = 0.0
    tau_b: float = 0.0
    delta: float = 0.0
    omega_delta: float = 0.0
    omega_dtau: float = 0.0
    alpha_sq: float = 0.5
    beta_sq: float = 0.5
    alpha_phase: float = 0.0
    beta_phase: float = 0.0
    trials: int = 10_000
    seed: int = 0
    stream_id: int = 0
    bases: tuple[str, ...] = BASES
    sweep_variable: str = "omega_delta_product"
    sweep_min: float = 0.0
    sweep_max: float = 2 * math.pi
    sweep_steps: int = 101
    metric: str = "standard"
    linear: tuple[tuple[float, float], tuple[float, float]] = ((1.0, 0.0), (0.0, 1.0))
    offset: tuple[float, float] = (0.0, 0.0)
    components: tuple[float, float, float] = (-1.0, 0.0, 1.0)
    separation: float = 1.0
    t1: float = 0.0
    alice: tuple[tuple[float, float], ...] | None = None
    bob: tuple[tuple[float, float], ...] | None = None

    @property
    def omega(self) -> float:
        return self.omega1 - self.omega0

    def qubit_params(self) -> QubitParams:
        return QubitParams(self.omega0, self.omega1)

    def proper_times(self) -> ProperTimes:
        return ProperTimes(self.tau_a, self.tau_b)

    def superposition(self) -> MetricSuperposition:
        return MetricSuperposition.from_weights(
            self.alpha_sq, self.delta, beta_phase=self.beta_phase, alpha_phase=self.alpha_phase
        )

    def experiment(self) -> ExperimentConfig:
        return ExperimentConfig(
            self.qubit_params(),
            self.proper_times(),
            self.superposition(),
            trials=self.trials,
            seed=self.seed,
            bases=self.bases,
            stream_id=self.stream_id,
        )

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        for k in ("bases", "linear", "offset", "components", "alice", "bob"):
            if d[k] is not None:
                d[k] = json.loads(json.dumps(d[k]))
        return d

    @classmethod
    def from_dict(cls, d: Mapping[str, Any]) -> "ResolvedConfig":
        """Rebuild from :meth:`to_dict` output without re-running conflict rules."""
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ConfigError(f"unknown resolved keys: {sorted(unknown)}")
        kw = dict(d)
        for k in ("bases", "offset", "components"):
            if k in kw and kw[k] is not None:
                kw[k] = tuple(kw[k])
        for k in ("linear", "alice", "bob"):
            if k in kw and kw[k] is not None:
                kw[k] = tuple(tuple(r) for r in kw[k])
        return cls(**kw)


def load_config_file(path: str | Path) -> dict[str, Any]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc.strerror or exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from exc
    return data


def _validate_source(values: Mapping[str, Any], where: str) -> None:
    try:
        jsonschema.validate(dict(values), CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        loc = ".".join(str(p) for p in exc.absolute_path) or "(top level)"
        raise ConfigError(f"{where}: {loc}: {exc.message}") from None
    for raw, prod in EXCLUSIVE_GROUPS:
        r, p = raw & values.keys(), prod & values.keys()
        if r and p:
            raise ConfigError(
                f"{where}: conflicting keys {sorted(r)} and {sorted(p)}; "
                "give either the raw values or the product, not both"
            )


def merge(file_values: Mapping[str, Any], overrides: Mapping[str, Any]) -> dict[str, Any]:
    """Overlay command-line values on file values, group by group."""
    merged = dict(file_values)
    for group in OVERRIDE_GROUPS:
        if group & overrides.keys():
            for k in group:
                merged.pop(k, None)
    merged.update(overrides)
    return merged


def resolve(values: Mapping[str, Any]) -> ResolvedConfig:
    """Turn a validated flat mapping into a :class:`ResolvedConfig`."""
    v = dict(values)
    out: dict[str, Any] = {}

    if "omega" in v:
        out["omega0"], out["omega1"] = 0.0, float(v["omega"])
    else:
        out["omega0"] = float(v.get("omega0", 0.0))
        out["omega1"] = float(v.get("omega1", 1.0))
    omega = out["omega1"] - out["omega0"]
    if not omega > 0:
        raise ConfigError(
            f"levels must be nondegenerate with omega1 > omega0 "
            f"(got omega0={out['omega0']}, omega1={out['omega1']})"
        )

    if "delta" in v:
        out["delta"] = float(v["delta"])
        out["omega_delta"] = omega * out["delta"]
    else:
        out["omega_delta"] = float(v.get("omega_delta", 0.0))
        out["delta"] = out["omega_delta"] / omega

    if "omega_dtau" in v:
        x = float(v["omega_dtau"])
        out["omega_dtau"] = x
        out["tau_a"], out["tau_b"] = max(0.0, -x) / omega, max(0.0, x) / omega
    else:
        out["tau_a"] = float(v.get("tau_a", 0.0))
        out["tau_b"] = float(v.get("tau_b", 0.0))
        out["omega_dtau"] = omega * (out["tau_b"] - out["tau_a"])

    a, b = v.get("alpha_sq"), v.get("beta_sq")
    if a is not None and b is not None:
        if abs(a + b - 1.0) > 1e-12:
            raise ConfigError(f"|alpha|^2 + |beta|^2 must equal 1, got {a} + {b} = {a + b}")
        out["alpha_sq"], out["beta_sq"] = float(a), float(b)
    elif a is not None:
        out["alpha_sq"], out["beta_sq"] = float(a), 1.0 - float(a)
    elif b is not None:
        out["alpha_sq"], out["beta_sq"] = 1.0 - float(b), float(b)

    for k in ("alpha_phase", "beta_phase", "sweep_min", "sweep_max", "separation", "t1"):
        if k in v:
            out[k] = float(v[k])
    for k in ("trials", "seed", "stream_id", "sweep_steps"):
        if k in v:
            out[k] = int(v[k])
    for k in ("sweep_variable", "metric"):
        if k in v:
            out[k] = v[k]
    if "bases" in v:
        out["bases"] = tuple(v["bases"])
    if "offset" in v:
        out["offset"] = tuple(float(c) for c in v["offset"])
    if "components" in v:
        out["components"] = tuple(float(c) for c in v["components"])
    for k in ("linear", "alice", "bob"):
        if k in v:
            out[k] = tuple(tuple(float(c) for c in row) for row in v[k])

    cfg = ResolvedConfig(**out)
    if not cfg.sweep_min < cfg.sweep_max:
        raise ConfigError(f"sweep_min must be < sweep_max (got {cfg.sweep_min}, {cfg.sweep_max})")
    if cfg.sweep_variable == "alpha_sq" and not (0.0 <= cfg.sweep_min and cfg.sweep_max <= 1.0):
        raise ConfigError("an alpha_sq sweep must stay within [0, 1]")
    try:
        cfg.experiment()
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def parse_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> ResolvedConfig:
    """Read ``path`` (optional), apply ``overrides`` and resolve.

    Raises
    ------
    ConfigError
        On unreadable or malformed files, unknown keys, conflicting raw and
        product keys within one source, or violated constraints.
    """
    file_values = load_config_file(path) if path is not None else {}
    if not isinstance(file_values, dict):
        raise ConfigError(f"{path}: top-level JSON value must be an object")
    _validate_source(file_values, str(path) if path is not None else "config")
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    _validate_source(overrides, "command line")
    return resolve(merge(file_values, overrides))
