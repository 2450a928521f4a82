"""Experiment configuration: dataclass, validation and the key = value file format."""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path

from ..attacks.core import ORDERS, SCORERS, AttackConfig
from ..attacks.english import PASS_THRESHOLD, PRINTABLE_WEIGHT
from ..keystream import check_alphabet

ATTACKS = ("exhaustive", "multiwindow", "prune")
VARIANTS = ("native", "otp")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ExperimentConfig:
    attack: str = "exhaustive"
    k: int = 12
    M: int = 32
    alpha0: float = 5.0
    eta: float | None = None
    t: int | None = None
    n: int = 4096
    r: int = 1
    v: int = 128
    tau: float = 0.75
    b: int = 16
    scorer: str = "known-plaintext"
    order: str = "ascending"
    variant: str = "native"
    double_encrypt: bool = False
    key2_bits: int = 64
    english_threshold: float = PASS_THRESHOLD
    english_weight: float = PRINTABLE_WEIGHT
    runs: int = 100
    master_seed: int = 0
    output_path: str | None = None
    workers: int = 1
    record_timing: bool = False

    def attack_config(self) -> AttackConfig:
        return AttackConfig(v=self.v, tau=self.tau, b=self.b, scorer=self.scorer, order=self.order,
                            english_threshold=self.english_threshold,
                            english_weight=self.english_weight)

    @property
    def window(self) -> int:
        return self.n // self.r

    def validated(self) -> "ExperimentConfig":
        """Check every field and return a copy with eta and t both filled in."""
        if self.attack not in ATTACKS:
            raise ConfigError(f"attack must be one of {ATTACKS}, got {self.attack!r}")
        if self.variant not in VARIANTS:
            raise ConfigError(f"variant must be one of {VARIANTS}, got {self.variant!r}")
        if self.scorer not in SCORERS:
            raise ConfigError(f"scorer must be one of {SCORERS}, got {self.scorer!r}")
        if self.order not in ORDERS:
            raise ConfigError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.runs < 1:
            raise ConfigError(f"runs must be >= 1, got {self.runs}")
        if not 1 <= self.k <= 64:
            raise ConfigError(f"k must be in [1, 64], got {self.k}")
        if not 1 <= self.key2_bits <= 64:
            raise ConfigError(f"key2_bits must be in [1, 64], got {self.key2_bits}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if not self.alpha0 > 0:
            raise ConfigError(f"alpha0 must be positive, got {self.alpha0}")
        try:
            check_alphabet(self.M)
            self.attack_config()
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        if self.n < 1 or self.r < 1:
            raise ConfigError("n and r must be positive")

        eta, t = self.eta, self.t
        if eta is None and t is None:
            raise ConfigError("give either eta or t")
        if eta is not None and not 0 < eta <= 1:
            raise ConfigError(f"eta must be in (0, 1], got {eta}")
        if t is None:
            t = math.floor(1 / eta + 1e-9) - 1
            if t < 1:
                raise ConfigError(f"eta={eta} leaves Eve no whole copy")
        elif t < 1:
            raise ConfigError(f"t must be >= 1, got {t}")
        elif eta is None:
            eta = 1 / (t + 1)
        elif math.floor(1 / eta + 1e-9) - 1 != t:
            raise ConfigError(f"eta={eta} and t={t} disagree; expected eta = 1/(t+1)")

        if self.attack == "multiwindow":
            if self.n % self.r:
                raise ConfigError(f"n={self.n} does not split into r={self.r} equal windows")
            if self.window < self.v:
                raise ConfigError(f"window of {self.window} symbols is shorter than v={self.v}")
        else:
            if self.r != 1:
                raise ConfigError(f"attack {self.attack!r} uses a single window; set r = 1")
            if self.n < self.v:
                raise ConfigError(f"n={self.n} is shorter than v={self.v}")
        if self.scorer == "english":
            if self.attack != "prune":
                raise ConfigError("the english scorer is only used by the prune attack")
            if self.n % 8:
                raise ConfigError("the english scorer needs n to be a whole number of bytes")
        if self.variant == "otp" and self.scorer == "english":
            raise ConfigError("the otp variant is a known-plaintext setting")
        return dataclasses.replace(self, eta=eta, t=t)


_BOOL = {"true": True, "yes": True, "1": True, "on": True,
         "false": False, "no": False, "0": False, "off": False}


def _bool(text: str) -> bool:
    try:
        return _BOOL[text.strip().lower()]
    except KeyError:
        raise ConfigError(f"not a boolean: {text!r}") from None


def _optional(conv):
    def parse(text):
        return None if text.strip().lower() in ("", "none") else conv(text)
    return parse


CONVERTERS = {
    "attack": str, "k": int, "M": int, "alpha0": float, "eta": _optional(float),
    "t": _optional(int), "n": int, "r": int, "v": int, "tau": float, "b": int, "scorer": str,
    "order": str, "variant": str, "double_encrypt": _bool, "key2_bits": int,
    "english_threshold": float, "english_weight": float, "runs": int, "master_seed": int,
    "output_path": _optional(str), "workers": int, "record_timing": _bool,
}
assert set(CONVERTERS) == {f.name for f in dataclasses.fields(ExperimentConfig)}


def convert(name: str, text: str):
    if name not in CONVERTERS:
        raise ConfigError(f"unknown config key {name!r}")
    try:
        return CONVERTERS[name](text.strip())
    except ValueError as exc:
        raise ConfigError(f"bad value for {name}: {text!r}") from exc


def parse_config_text(text: str) -> dict:
    values = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key] = convert(key, value)
    return values


def load_config(path: str | Path | None = None, **overrides) -> ExperimentConfig:
    """File values first, then ``overrides`` (already typed) on top."""
    values = parse_config_text(Path(path).read_text()) if path else {}
    overrides = {k: v for k, v in overrides.items() if v is not None}
    # eta and t describe the same channel; whichever is overridden wins.
    if "eta" in overrides and "t" not in overrides:
        values.pop("t", None)
    if "t" in overrides and "eta" not in overrides:
        values.pop("eta", None)
    values.update(overrides)
    return ExperimentConfig(**values)
