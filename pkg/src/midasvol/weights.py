"""Lag-weighting schemes for the MIDAS filters.

Two families: the two-parameter beta polynomial (restricted form pins the
first shape parameter at 1, giving monotone decay for w2 > 1) and simple
exponential decay. Weights are strictly positive and sum to one.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Union

import numpy as np


@dataclass(frozen=True)
class BetaWeights:
    """Beta lag polynomial with shape parameters (w1, w2), both >= 1.

    ``restricted`` marks w1 as pinned at 1.0 during estimation, the usual
    convention for decaying lag profiles.
    """

    w1: float = 1.0
    w2: float = 1.0
    restricted: bool = True

    def __post_init__(self):
        if self.w1 < 1.0 or self.w2 < 1.0:
            raise ValueError(f"beta weights need w1 >= 1 and w2 >= 1, got ({self.w1}, {self.w2})")
        if self.restricted and self.w1 != 1.0:
            raise ValueError("restricted beta weights pin w1 = 1")


@dataclass(frozen=True)
class ExpWeights:
    """Geometric decay phi_k proportional to omega^k, 0 < omega < 1."""

    omega: float

    def __post_init__(self):
        if not 0.0 < self.omega < 1.0:
            raise ValueError(f"exponential weights need 0 < omega < 1, got {self.omega}")


WeightScheme = Union[BetaWeights, ExpWeights]


def weights(scheme: WeightScheme, K: int) -> np.ndarray:
    """Weight vector phi_1..phi_K for the given scheme.

    The beta kernel is evaluated on the grid k/(K+1), k = 1..K, so the
    last lag keeps a strictly positive weight when w2 > 1.
    """
    if K < 1:
        raise ValueError(f"need K >= 1 lags, got {K}")
    k = np.arange(1, K + 1, dtype=np.float64)
    if isinstance(scheme, BetaWeights):
        u = k / (K + 1)
        raw = u ** (scheme.w1 - 1.0) * (1.0 - u) ** (scheme.w2 - 1.0)
    elif isinstance(scheme, ExpWeights):
        raw = scheme.omega ** k
    else:
        raise TypeError(f"unknown weight scheme {scheme!r}")
    return raw / raw.sum()


def free_parameters(scheme: WeightScheme) -> list[str]:
    """Names of the scheme parameters that estimation may move."""
    if isinstance(scheme, BetaWeights):
        return ["w2"] if scheme.restricted else ["w1", "w2"]
    return ["omega"]


def with_parameters(scheme: WeightScheme, values: dict[str, float]) -> WeightScheme:
    """Copy of the scheme with the given free parameters replaced."""
    return replace(scheme, **values)
