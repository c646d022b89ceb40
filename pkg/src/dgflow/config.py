"""Run configuration: flat `key = value` text files over scenario defaults.

Unknown keys are errors (typo safety).  Scenario-specific parameters use the
`params.<name>` prefix.  Lists (domain bounds, snapshot times) are comma
separated.  Booleans accept on/off/true/false/1/0.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field, replace

from .quadrature import ConfigurationError
from .scenarios import get_scenario, scenario_defaults

_CONV_METHODS = ("fft", "direct", "quadrature")


@dataclass(frozen=True)
class ScenarioConfig:
    scenario: str
    dimension: int
    k: int
    n: int | None
    nx: int | None
    ny: int | None
    domain: tuple
    c: float | None
    tau: float | None
    t_final: float
    limiter: bool
    convolution: str
    seed: int
    output_dir: str
    snapshot_times: tuple
    diag_every: int
    alpha_mult: float
    params: dict = dc_field(default_factory=dict)

    def with_n(self, n: int) -> "ScenarioConfig":
        """Copy with the resolution replaced (both axes in 2D)."""
        if self.dimension == 2:
            return replace(self, nx=n, ny=n)
        return replace(self, n=n)


def _parse_bool(value: str, key: str) -> bool:
    v = value.strip().lower()
    if v in ("on", "true", "1", "yes"):
        return True
    if v in ("off", "false", "0", "no"):
        return False
    raise ConfigurationError(f"{key} must be on/off, got {value!r}")


def _parse_floats(value: str) -> tuple:
    parts = [p for p in value.replace(",", " ").split() if p]
    return tuple(float(p) for p in parts)


def parse_config_text(text: str) -> dict:
    """Parse `key = value` lines (with # comments) into a raw string map."""
    raw: dict[str, str] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigurationError(f"line {lineno}: expected key = value, got {line!r}")
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key or not value:
            raise ConfigurationError(f"line {lineno}: empty key or value in {line!r}")
        if key in raw:
            raise ConfigurationError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = value
    return raw


_INT_KEYS = ("k", "n", "nx", "ny", "seed", "diag_every")
_FLOAT_KEYS = ("c", "tau", "t_final", "alpha_mult")


def resolve_config(raw: dict) -> ScenarioConfig:
    """Overlay raw file values on the scenario's defaults and type-check."""
    if "scenario" not in raw:
        raise ConfigurationError("config must name a scenario")
    merged = scenario_defaults(str(raw["scenario"]))

    for key, value in raw.items():
        if key == "scenario":
            continue
        if key.startswith("params."):
            name = key[len("params."):]
            try:
                merged["params"][name] = float(value)
            except ValueError:
                merged["params"][name] = value
            continue
        if key not in merged or key == "dimension":
            raise ConfigurationError(f"unknown config key {key!r}")
        if key in _INT_KEYS:
            merged[key] = int(value)
        elif key in _FLOAT_KEYS:
            merged[key] = float(value)
        elif key == "limiter":
            merged[key] = _parse_bool(value, key)
        elif key == "convolution":
            if value not in _CONV_METHODS:
                raise ConfigurationError(
                    f"convolution must be one of {_CONV_METHODS}, got {value!r}")
            merged[key] = value
        elif key in ("domain", "snapshot_times"):
            merged[key] = _parse_floats(value)
        else:
            merged[key] = value

    cfg = ScenarioConfig(**merged)
    _check(cfg)
    return cfg


def config_from_file(path) -> ScenarioConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return resolve_config(parse_config_text(fh.read()))


def config_for(scenario: str, **overrides) -> ScenarioConfig:
    """Programmatic config: scenario defaults plus keyword overrides."""
    merged = scenario_defaults(scenario)
    params = dict(merged["params"])
    params.update(overrides.pop("params", {}))
    for key, value in overrides.items():
        if key not in merged or key in ("dimension",):
            raise ConfigurationError(f"unknown config key {key!r}")
        merged[key] = value
    merged["params"] = params
    cfg = ScenarioConfig(**merged)
    _check(cfg)
    return cfg


def _check(cfg: ScenarioConfig):
    get_scenario(cfg.scenario)
    if cfg.k < 1:
        raise ConfigurationError("k must be >= 1")
    if cfg.dimension == 2:
        if not cfg.nx or not cfg.ny or cfg.nx < 1 or cfg.ny < 1:
            raise ConfigurationError("2D scenarios need positive nx and ny")
        if len(cfg.domain) != 4:
            raise ConfigurationError("2D domain needs four bounds: ax, bx, ay, by")
    else:
        if not cfg.n or cfg.n < 1:
            raise ConfigurationError("1D scenarios need a positive n")
        if len(cfg.domain) != 2:
            raise ConfigurationError("1D domain needs two bounds: a, b")
    if cfg.tau is None and cfg.c is None:
        raise ConfigurationError("set either c (tau = c h^2) or tau")
    if cfg.t_final < 0:
        raise ConfigurationError("t_final must be >= 0")
    if cfg.alpha_mult < 1.0:
        raise ConfigurationError("alpha_mult must be >= 1")


def manifest_lines(cfg: ScenarioConfig) -> list[str]:
    """Deterministic flat rendering of a resolved config."""
    out = [f"scenario = {cfg.scenario}"]
    simple = dict(k=cfg.k, n=cfg.n, nx=cfg.nx, ny=cfg.ny,
                  domain=",".join(f"{v:.17g}" for v in cfg.domain),
                  c=cfg.c, tau=cfg.tau, t_final=cfg.t_final,
                  limiter="on" if cfg.limiter else "off",
                  convolution=cfg.convolution, seed=cfg.seed,
                  output_dir=cfg.output_dir,
                  snapshot_times=",".join(f"{v:.17g}" for v in cfg.snapshot_times),
                  diag_every=cfg.diag_every, alpha_mult=cfg.alpha_mult)
    for key in sorted(simple):
        value = simple[key]
        if value is None or value == "":
            continue
        if isinstance(value, float):
            value = f"{value:.17g}"
        out.append(f"{key} = {value}")
    for name in sorted(cfg.params):
        value = cfg.params[name]
        if isinstance(value, float):
            value = f"{value:.17g}"
        out.append(f"params.{name} = {value}")
    return out
