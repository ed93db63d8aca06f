"""Experiment configuration: a plain key = value text format.

Grammar: one ``key = value`` pair per line; blank lines and lines starting
with ``#`` are ignored.  Unknown keys and bound violations are parse
errors that carry the offending line.  Defaults (see DEFAULTS) describe a
moderate smoke-scale run.
"""

from __future__ import annotations

from dataclasses import dataclass, fields, replace

from .errors import ConfigError

DEFAULTS = {
    "t_base": 1e5,
    "theta": 1.0,
    "k": 2,
    "sigma": 1.5,
    "epsilon": 0.1,
    "quad_tol": 1e-6,
    "root_tol": 1e-6,
    "zero_guard": 1e-6,
    "sieve_limit": 1_000_000,
    "cache_path": "",
    "seed": 0,
}

_INT_KEYS = {"k", "sieve_limit", "seed"}
_STR_KEYS = {"cache_path"}


@dataclass(frozen=True)
class ExperimentConfig:
    """All knobs of one metamorphosis run."""

    t_base: float = DEFAULTS["t_base"]
    theta: float = DEFAULTS["theta"]
    k: int = DEFAULTS["k"]
    sigma: float = DEFAULTS["sigma"]
    epsilon: float = DEFAULTS["epsilon"]
    quad_tol: float = DEFAULTS["quad_tol"]
    root_tol: float = DEFAULTS["root_tol"]
    zero_guard: float = DEFAULTS["zero_guard"]
    sieve_limit: int = DEFAULTS["sieve_limit"]
    cache_path: str = DEFAULTS["cache_path"]
    seed: int = DEFAULTS["seed"]

    def validate(self) -> "ExperimentConfig":
        if self.t_base < 1000.0:
            raise ConfigError(f"t_base={self.t_base:g} below working floor 1000")
        if not 0.0 <= self.theta <= 1.0:
            raise ConfigError(f"theta={self.theta:g} outside [0, 1]")
        if self.k < 1:
            raise ConfigError(f"k={self.k} must be >= 1")
        if self.epsilon <= 0.0:
            raise ConfigError(f"epsilon={self.epsilon:g} must be positive")
        if self.sigma < 1.0 + self.epsilon:
            raise ConfigError(
                f"sigma={self.sigma:g} below 1 + epsilon = {1 + self.epsilon:g}")
        if self.quad_tol <= 0 or self.root_tol <= 0:
            raise ConfigError("tolerances must be positive")
        if not self.quad_tol < 10.0 * self.root_tol:
            raise ConfigError(
                f"quad_tol={self.quad_tol:g} must be below 10 * root_tol "
                f"(roots cannot be sharper than integrals)")
        if self.zero_guard <= 0:
            raise ConfigError("zero_guard must be positive")
        if self.sieve_limit < 1:
            raise ConfigError("sieve_limit must be >= 1")
        return self

    def with_overrides(self, **kw) -> "ExperimentConfig":
        return replace(self, **kw).validate()


def parse_config(source: str) -> ExperimentConfig:
    """Parse a key = value document into a validated config."""
    values: dict = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = (p.strip() for p in line.partition("="))
        if key not in DEFAULTS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            if key in _STR_KEYS:
                values[key] = val
            elif key in _INT_KEYS:
                values[key] = int(float(val))
            else:
                values[key] = float(val)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {val!r}") from exc
    try:
        return ExperimentConfig(**values).validate()
    except ConfigError as exc:
        raise ConfigError(f"config bounds: {exc}") from exc


def serialize_config(config: ExperimentConfig) -> str:
    """Canonical key = value rendering; parse(serialize(c)) == c."""
    lines = []
    for f in fields(ExperimentConfig):
        v = getattr(config, f.name)
        if f.name in _STR_KEYS:
            lines.append(f"{f.name} = {v}")
        elif f.name in _INT_KEYS:
            lines.append(f"{f.name} = {v}")
        else:
            lines.append(f"{f.name} = {v!r}")
    return "\n".join(lines) + "\n"
