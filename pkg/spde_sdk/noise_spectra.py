"""
Noise Spectra Module

Covariance spectra of the Q-Wiener process, Q phi_k = mu_k phi_k, and their
classification by the regularity exponent alpha:

    - WhiteNoise: mu_k = 1, space-time white noise, alpha = 1/2
    - PowerNoise: mu_k = k^(-delta), alpha = min(1, (1 + delta)/2)
    - TraceClassNoise: summable mu_k (default k^(-1.1)), alpha = 1

Spectra are selected by name through ``parse_spectrum`` ("white",
"power:0.5", "trace:1.1").

Author: graded-spde-sdk developers
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from .errors import DomainError, ValidationError

# Config-level range for power-law exponents.
POWER_DELTA_RANGE = (0.0, 1.5)


@dataclass
class NoiseSpectrum:
    """Base class for all noise spectra."""
    kind: str
    delta: float
    alpha: float
    description: str = ""

    def mu(self, k: np.ndarray) -> np.ndarray:
        """Eigenvalues mu_k of Q for the 1-based indices ``k``."""
        k = np.asarray(k, dtype=np.float64)
        return k ** (-self.delta)

    def weights(self, M: int) -> np.ndarray:
        """mu_1..mu_M."""
        return self.mu(np.arange(1, M + 1))

    def tail_sum(self, K: int, exponent: float) -> float:
        """
        Upper bound for sum_{k > K} mu_k k^(-exponent).

        Args:
            K: Truncation index
            exponent: Extra decay, with delta + exponent > 1

        Returns:
            The integral bound int_K^inf x^(-delta-exponent) dx
        """
        total = self.delta + exponent
        if total <= 1:
            return math.inf
        return K ** (1.0 - total) / (total - 1.0)

    @property
    def is_trace_class(self) -> bool:
        return self.delta > 1

    def label(self) -> str:
        """Name understood by ``parse_spectrum``."""
        return f"{self.kind}:{self.delta:g}"

    def to_dict(self) -> Dict:
        """Convert the spectrum to a dictionary."""
        return {
            "kind": self.kind,
            "delta": self.delta,
            "alpha": self.alpha,
            "description": self.description,
        }


class WhiteNoise(NoiseSpectrum):
    """
    Space-time white noise, mu_k = 1.

    Not trace class; the stochastic convolution has L^2 norm of order t^(1/4)
    and spatial regularity just below Ḣ^(1/2).
    """

    def __init__(self):
        super().__init__(
            kind="white",
            delta=0.0,
            alpha=0.5,
            description="Space-time white noise, mu_k = 1.",
        )

    def mu(self, k: np.ndarray) -> np.ndarray:
        return np.ones_like(np.asarray(k, dtype=np.float64))

    def label(self) -> str:
        return "white"


class PowerNoise(NoiseSpectrum):
    """Power-law spectrum mu_k = k^(-delta), alpha = min(1, (1 + delta)/2)."""

    def __init__(self, delta: float):
        lo, hi = POWER_DELTA_RANGE
        if not lo <= delta <= hi:
            raise ValidationError(f"Power spectrum exponent {delta} is outside [{lo}, {hi}].",
                                  key="spectrum")
        super().__init__(
            kind="power",
            delta=float(delta),
            alpha=min(1.0, (1.0 + delta) / 2.0),
            description=f"Power-law noise, mu_k = k^-{delta:g}.",
        )


class TraceClassNoise(NoiseSpectrum):
    """
    Trace-class noise, alpha = 1.

    By default mu_k = k^(-delta) with delta > 1. A custom spectrum can be given
    as ``mu_fn`` together with ``mu_bound``, an upper bound for mu_k used in
    truncation tail estimates. Custom functions must be module-level to be
    shipped to worker processes.
    """

    def __init__(self, delta: float = 1.1, mu_fn: Optional[Callable[[np.ndarray], np.ndarray]] = None,
                 mu_bound: float = 1.0):
        if mu_fn is None and delta <= 1:
            raise ValidationError(f"Trace-class exponent must exceed 1, got {delta}.",
                                  key="spectrum")
        super().__init__(
            kind="trace",
            delta=float(delta) if mu_fn is None else 0.0,
            alpha=1.0,
            description=("Custom trace-class noise." if mu_fn is not None
                         else f"Trace-class noise, mu_k = k^-{delta:g}."),
        )
        self.mu_fn = mu_fn
        self.mu_bound = float(mu_bound)

    def mu(self, k: np.ndarray) -> np.ndarray:
        if self.mu_fn is None:
            return super().mu(k)
        values = np.asarray(self.mu_fn(np.asarray(k, dtype=np.float64)), dtype=np.float64)
        if np.any(values < 0):
            raise DomainError("Custom noise spectrum produced a negative mu_k.")
        return values

    def tail_sum(self, K: int, exponent: float) -> float:
        if self.mu_fn is None:
            return super().tail_sum(K, exponent)
        if exponent <= 1:
            return math.inf
        return self.mu_bound * K ** (1.0 - exponent) / (exponent - 1.0)

    @property
    def is_trace_class(self) -> bool:
        return True

    def label(self) -> str:
        return "trace:custom" if self.mu_fn is not None else f"trace:{self.delta:g}"


SPECTRUM_KINDS: Dict[str, str] = {
    "white": "mu_k = 1",
    "power": "mu_k = k^-DELTA, 0 <= DELTA <= 1.5",
    "trace": "mu_k = k^-DELTA, DELTA > 1",
}


def parse_spectrum(text: str) -> NoiseSpectrum:
    """
    Build a spectrum from its name.

    Args:
        text: "white", "power:DELTA" or "trace:DELTA"

    Returns:
        The corresponding NoiseSpectrum
    """
    name, _, arg = text.strip().lower().partition(":")
    if name == "white" and not arg:
        return WhiteNoise()
    if name in ("power", "trace") and arg:
        try:
            delta = float(arg)
        except ValueError:
            raise ValidationError(f"Spectrum exponent '{arg}' is not a number.", key="spectrum")
        return PowerNoise(delta) if name == "power" else TraceClassNoise(delta)
    raise ValidationError(
        f"Unknown spectrum '{text}'. Expected one of: white, power:DELTA, trace:DELTA.",
        key="spectrum")


def list_spectra() -> List[str]:
    """List the spectrum kinds understood by ``parse_spectrum``."""
    return list(SPECTRUM_KINDS.keys())
