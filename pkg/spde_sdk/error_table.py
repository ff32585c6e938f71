"""
Error Table Module

Strong-error tables of convergence studies and observed-order estimation.

Author: graded-spde-sdk developers
"""

import json
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .errors import DomainError

logger = logging.getLogger(__name__)

TABLE_KINDS = ("space", "time")


@dataclass
class ErrorRow:
    """One resolution of a convergence study."""
    resolution: float
    error: float
    stderr: float
    samples: int

    def to_dict(self) -> Dict:
        return {
            "resolution": self.resolution,
            "error": self.error,
            "stderr": self.stderr,
            "samples": self.samples,
        }


def estimate_order(errors: Sequence[float]) -> Tuple[List[float], float]:
    """
    Observed orders between adjacent dyadic resolutions.

    Args:
        errors: Positive errors e_1, e_2, ... at successively halved resolutions

    Returns:
        (orders, mean_order) with order_i = log2(e_i / e_(i+1))
    """
    if len(errors) < 2:
        raise DomainError(f"Need at least two errors, got {len(errors)}.")
    if any(not e > 0 for e in errors):
        raise DomainError("Errors must be positive to estimate an order.")
    orders = [math.log2(a / b) for a, b in zip(errors[:-1], errors[1:])]
    return orders, math.fsum(orders) / len(orders)


def order_stderrs(errors: Sequence[float], stderrs: Sequence[float]) -> Tuple[List[float], float]:
    """
    Delta-method standard errors of the observed orders and their mean.

    The two errors of a pair are treated as independent.
    """
    ln2 = math.log(2.0)
    variances = [(sa / (a * ln2)) ** 2 + (sb / (b * ln2)) ** 2
                 for a, b, sa, sb in zip(errors[:-1], errors[1:], stderrs[:-1], stderrs[1:])]
    per_order = [math.sqrt(v) for v in variances]
    mean = math.sqrt(math.fsum(variances)) / len(variances) if variances else math.nan
    return per_order, mean


@dataclass(eq=False)
class ErrorTable:
    """
    Errors per resolution with the orders between adjacent rows.

    Attributes:
        kind: "space" (resolution = M) or "time" (resolution = nominal tau)
        rows: One ErrorRow per coarse resolution
        orders: log2(e_i / e_(i+1)); empty when some error is zero
        order_stderrs: Delta-method standard error of each order
        mean_order: Mean of ``orders`` (NaN when empty)
        mean_order_stderr: Standard error of ``mean_order``
    """
    kind: str
    rows: List[ErrorRow] = field(default_factory=list)
    orders: List[float] = field(default_factory=list)
    order_stderrs: List[float] = field(default_factory=list)
    mean_order: float = math.nan
    mean_order_stderr: float = math.nan

    @classmethod
    def from_errors(cls, kind: str, resolutions: Sequence[float], errors: Sequence[float],
                    stderrs: Sequence[float], samples: int) -> "ErrorTable":
        """Build a table and fill in the orders."""
        if kind not in TABLE_KINDS:
            raise DomainError(f"Unknown table kind '{kind}'.")
        rows = [ErrorRow(float(r), float(e), float(s), int(samples))
                for r, e, s in zip(resolutions, errors, stderrs)]
        table = cls(kind=kind, rows=rows)
        if len(rows) >= 2 and all(e > 0 for e in errors):
            table.orders, table.mean_order = estimate_order(errors)
            table.order_stderrs, table.mean_order_stderr = order_stderrs(errors, stderrs)
        elif len(rows) >= 2:
            logger.warning("Some %s errors are zero; observed orders are undefined.", kind)
        return table

    @property
    def resolutions(self) -> List[float]:
        return [r.resolution for r in self.rows]

    @property
    def errors(self) -> List[float]:
        return [r.error for r in self.rows]

    def to_dict(self) -> Dict:
        """Convert to dictionary."""
        return {
            "kind": self.kind,
            "rows": [r.to_dict() for r in self.rows],
            "orders": list(self.orders),
            "order_stderrs": list(self.order_stderrs),
            "mean_order": self.mean_order,
            "mean_order_stderr": self.mean_order_stderr,
        }

    def __eq__(self, other) -> bool:
        # NaN-aware: two tables are equal when they serialize identically
        if not isinstance(other, ErrorTable):
            return NotImplemented
        return json.dumps(self.to_dict(), sort_keys=True) == json.dumps(other.to_dict(), sort_keys=True)
