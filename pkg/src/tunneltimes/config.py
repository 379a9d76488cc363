"""Scenario configuration: plain `key = value` files with `#` comments."""

from dataclasses import dataclass
from pathlib import Path

from .errors import ConfigError
from .packet import OverBarrierPolicy, PacketSpec
from .scatter import ELECTRON, BarrierSpec, PhysicalConstants


@dataclass(frozen=True)
class ScenarioConfig:
    v0_ev: float
    a_angstrom: float
    ebar_ev: float
    dk_inv_angstrom: float
    t_window_s: float | None = None
    tol: float = 1e-3
    n_x: int = 11
    output_path: str | None = None
    over_barrier_policy: str = "exclude"

    def __post_init__(self):
        for name in ("v0_ev", "a_angstrom", "ebar_ev", "dk_inv_angstrom"):
            value = getattr(self, name)
            if not value > 0:
                raise ConfigError(f"{name} must be positive, got {value}")
        if self.t_window_s is not None and not self.t_window_s > 0:
            raise ConfigError(f"t_window_s must be positive, got {self.t_window_s}")
        if not self.ebar_ev < self.v0_ev:
            raise ConfigError(
                f"ebar_ev={self.ebar_ev} must be below v0_ev={self.v0_ev} "
                f"(sub-barrier packets only)"
            )
        if not self.tol >= 0:
            raise ConfigError(f"tol must be non-negative, got {self.tol}")
        if self.n_x < 2:
            raise ConfigError(f"n_x must be at least 2, got {self.n_x}")
        if self.over_barrier_policy not in ("exclude", "error"):
            raise ConfigError(
                f"over_barrier_policy must be 'exclude' or 'error', "
                f"got {self.over_barrier_policy!r}"
            )

    def barrier(self) -> BarrierSpec:
        return BarrierSpec(v0=self.v0_ev, a=self.a_angstrom)

    def packet(self, constants: PhysicalConstants = ELECTRON) -> PacketSpec:
        return PacketSpec(
            k_bar=float(constants.wavenumber(self.ebar_ev)),
            dk=self.dk_inv_angstrom,
            over_barrier_policy=OverBarrierPolicy(self.over_barrier_policy),
        )


_FLOAT_KEYS = ("v0_ev", "a_angstrom", "ebar_ev", "dk_inv_angstrom", "t_window_s", "tol")
_INT_KEYS = ("n_x",)
_STR_KEYS = ("output_path", "over_barrier_policy")
_REQUIRED = ("v0_ev", "a_angstrom", "ebar_ev", "dk_inv_angstrom")
KNOWN_KEYS = _FLOAT_KEYS + _INT_KEYS + _STR_KEYS


def parse_config_text(text: str, source: str = "<config>") -> ScenarioConfig:
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        if key not in KNOWN_KEYS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"{source}:{lineno}: duplicate key {key!r}")
        if key in _FLOAT_KEYS:
            try:
                values[key] = float(value)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: key {key!r} needs a number, "
                                  f"got {value!r}") from None
        elif key in _INT_KEYS:
            try:
                values[key] = int(value)
            except ValueError:
                raise ConfigError(f"{source}:{lineno}: key {key!r} needs an integer, "
                                  f"got {value!r}") from None
        else:
            values[key] = value
    missing = [key for key in _REQUIRED if key not in values]
    if missing:
        raise ConfigError(f"{source}: missing required key(s) {', '.join(missing)}")
    return ScenarioConfig(**values)


def parse_config_file(path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config_text(text, source=str(path))
