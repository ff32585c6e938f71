"""
Experiment Configuration Module

Holds every setting of an experiment in one dataclass and resolves it from,
in increasing precedence: the built-in defaults, a flat ``key = value`` file,
the SPDE_SEED environment variable and explicit overrides (command-line
flags). Unknown keys are rejected.

Example file::

    # spatial study, white noise, smooth datum
    T = 0.5
    gamma = 0.7
    spectrum = white
    datum = sine
    modes = 16, 32, 64, 128
    reference_tau = 1/256
    samples = 200

Author: graded-spde-sdk developers
"""

import dataclasses
import hashlib
import json
import logging
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

from .errors import ReportError, ValidationError
from .noise_spectra import NoiseSpectrum, parse_spectrum
from .solver import VARIANTS, InitialDatum, SchemeConfig, get_drift, parse_datum
from .time_mesh import check_gamma

logger = logging.getLogger(__name__)

SEED_ENV = "SPDE_SEED"
DEFAULT_SEED = 20240501
# Settings that change how a run executes but not what it computes.
EXECUTION_KEYS = ("workers", "out")


@dataclass
class ExperimentConfig:
    """
    Settings of one experiment.

    Attributes:
        T: Final time
        gamma: Grading exponent of the time meshes
        spectrum: Noise spectrum name ("white", "power:DELTA", "trace:DELTA")
        datum: Initial datum name ("sine", "dirac", "mode:K", "zero")
        drift: Registered drift name
        variant: "collocation" or "galerkin"
        oversample: Galerkin quadrature factor
        modes: Mode counts of spatial studies, dyadic and increasing
        taus: Nominal step sizes of temporal studies, dyadic and decreasing
        reference_tau: Step size of spatial studies and single solves
        samples: Monte Carlo sample count
        master_seed: 64-bit experiment seed
        workers: Worker processes; 1 runs in-process
        beta: Initial-data regularity; None selects the datum's default,
            or the noise exponent for smooth data
        override_gamma: Downgrade a violated gamma bound to a warning
        standard_first_step: Full exponential Euler first step
        out: Output path
        probe_levels: Probe times 0.5 * 2^(-j), j = 0..probe_levels
        probe_blocks: Dyadic blocks examined by noise diagnostics
        probe_modes: Series truncation of noise diagnostics
        ito_samples: Draws of the Ito isometry check
    """
    T: float = 0.5
    gamma: float = 0.7
    spectrum: str = "white"
    datum: str = "sine"
    drift: str = "sqrt1pu2"
    variant: str = "collocation"
    oversample: int = 4
    modes: Tuple[int, ...] = (16, 32, 64, 128)
    taus: Tuple[float, ...] = (1 / 16, 1 / 32, 1 / 64, 1 / 128)
    reference_tau: float = 2.0 ** -8
    samples: int = 200
    master_seed: int = DEFAULT_SEED
    workers: int = 1
    beta: Optional[float] = None
    override_gamma: bool = False
    standard_first_step: bool = False
    out: str = "results.csv"
    probe_levels: int = 16
    probe_blocks: int = 14
    probe_modes: int = 2 ** 18
    ito_samples: int = 10_000

    def noise_spectrum(self) -> NoiseSpectrum:
        return parse_spectrum(self.spectrum)

    def initial_datum(self) -> InitialDatum:
        return parse_datum(self.datum)

    def resolved_beta(self) -> float:
        """beta as configured, else the datum's default, else the noise exponent."""
        if self.beta is not None:
            return self.beta
        default = self.initial_datum().default_beta
        return self.noise_spectrum().alpha if default is None else default

    def scheme(self, M: int) -> SchemeConfig:
        """Scheme configuration with M modes."""
        return SchemeConfig(variant=self.variant, drift=self.drift, M=M,
                            oversample=self.oversample,
                            standard_first_step=self.standard_first_step)

    def validate(self) -> "ExperimentConfig":
        """
        Check every setting and the gamma bound.

        Returns:
            self, for chaining

        Raises:
            ValidationError: naming the offending key
        """
        if not self.T > 0:
            raise ValidationError(f"T must be positive, got {self.T}.", key="T")
        if not 0 <= self.gamma < 1:
            raise ValidationError(f"gamma must lie in [0, 1), got {self.gamma}.", key="gamma")
        for key in ("samples", "workers", "oversample", "probe_levels", "probe_blocks", "probe_modes"):
            if getattr(self, key) < 1:
                raise ValidationError(f"{key} must be positive, got {getattr(self, key)}.", key=key)
        if self.ito_samples < 2:
            raise ValidationError(f"ito_samples must be at least 2, got {self.ito_samples}.",
                                  key="ito_samples")
        if self.variant not in VARIANTS:
            raise ValidationError(f"Unknown variant '{self.variant}'.", key="variant")
        if not self.reference_tau > 0:
            raise ValidationError(f"reference_tau must be positive, got {self.reference_tau}.",
                                  key="reference_tau")
        _check_dyadic(self.modes, 2.0, "modes")
        _check_dyadic(self.taus, 0.5, "taus")
        if any(M < 1 for M in self.modes):
            raise ValidationError("Mode counts must be positive.", key="modes")
        if any(t <= 0 for t in self.taus):
            raise ValidationError("Step sizes must be positive.", key="taus")
        get_drift(self.drift)
        spectrum = self.noise_spectrum()
        self.initial_datum()
        check_gamma(self.gamma, spectrum.alpha, self.resolved_beta(), self.override_gamma)
        return self

    def fingerprint(self) -> str:
        """SHA-256 over the canonical JSON of the settings that determine results."""
        payload = {k: v for k, v in self.to_dict().items() if k not in EXECUTION_KEYS}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode()).hexdigest()

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary."""
        data = dataclasses.asdict(self)
        data["modes"] = list(self.modes)
        data["taus"] = list(self.taus)
        return data


def _check_dyadic(values: Tuple, factor: float, key: str) -> None:
    if not values:
        raise ValidationError(f"{key} must not be empty.", key=key)
    for a, b in zip(values[:-1], values[1:]):
        if not math.isclose(b / a, factor, rel_tol=1e-12):
            raise ValidationError(
                f"{key} must be dyadic and sorted; {a} is followed by {b}.", key=key)


def _parse_float(text: str) -> float:
    try:
        return float(Fraction(text.strip()))
    except (ValueError, ZeroDivisionError):
        raise ValueError(f"'{text}' is not a number")


def _parse_int(text: str) -> int:
    return int(text.strip(), 0)


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"'{text}' is not a boolean")


def _parse_optional_float(text: str) -> Optional[float]:
    return None if text.strip().lower() in ("", "none", "auto") else _parse_float(text)


def _list_of(parse: Callable[[str], Any]) -> Callable[[str], Tuple]:
    def parse_list(text: str) -> Tuple:
        return tuple(parse(part) for part in text.split(",") if part.strip())
    return parse_list


_PARSERS: Dict[str, Callable[[str], Any]] = {
    "T": _parse_float,
    "gamma": _parse_float,
    "spectrum": str.strip,
    "datum": str.strip,
    "drift": str.strip,
    "variant": str.strip,
    "oversample": _parse_int,
    "modes": _list_of(_parse_int),
    "taus": _list_of(_parse_float),
    "reference_tau": _parse_float,
    "samples": _parse_int,
    "master_seed": _parse_int,
    "workers": _parse_int,
    "beta": _parse_optional_float,
    "override_gamma": _parse_bool,
    "standard_first_step": _parse_bool,
    "out": str.strip,
    "probe_levels": _parse_int,
    "probe_blocks": _parse_int,
    "probe_modes": _parse_int,
    "ito_samples": _parse_int,
}


def coerce_value(key: str, value: Any) -> Any:
    """Convert a raw value (usually a string) to the type of field ``key``."""
    if key not in _PARSERS:
        raise ValidationError(f"Unknown configuration key '{key}'.", key=key)
    if not isinstance(value, str):
        if key in ("modes", "taus") and not isinstance(value, tuple):
            return tuple(value)
        return value
    try:
        return _PARSERS[key](value)
    except ValueError as exc:
        raise ValidationError(f"Invalid value for '{key}': {exc}.", key=key)


def apply_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """
    Return a copy of ``cfg`` with the given settings replaced.

    None values are skipped so unset command-line flags fall through.
    """
    changes = {key: coerce_value(key, value) for key, value in overrides.items() if value is not None}
    return dataclasses.replace(cfg, **changes)


def parse_config_text(text: str, source: str = "<string>") -> Dict[str, str]:
    """Parse ``key = value`` lines; '#' starts a comment."""
    values: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise ValidationError(f"{source}:{lineno}: expected 'key = value', got '{raw.strip()}'.")
        if key not in _PARSERS:
            raise ValidationError(f"{source}:{lineno}: unknown configuration key '{key}'.", key=key)
        values[key] = value.strip()
    return values


def load_config(path: Optional[str] = None, env: Optional[Mapping[str, str]] = None,
                **overrides) -> ExperimentConfig:
    """
    Resolve a configuration from defaults, file, environment and overrides.

    Args:
        path: Optional configuration file
        env: Environment mapping; defaults to os.environ
        **overrides: Highest-precedence settings

    Returns:
        A validated ExperimentConfig
    """
    cfg = ExperimentConfig()
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise ReportError(f"Cannot read configuration ({exc.strerror})", path)
        cfg = apply_overrides(cfg, **parse_config_text(text, source=path))
        logger.debug("Loaded configuration file %s", path)

    env = os.environ if env is None else env
    if env.get(SEED_ENV):
        cfg = apply_overrides(cfg, master_seed=env[SEED_ENV])
        logger.debug("Seed taken from %s", SEED_ENV)

    cfg = apply_overrides(cfg, **overrides)
    return cfg.validate()
