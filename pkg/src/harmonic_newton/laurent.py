"""Laurent coefficients by the trapezoidal rule on a circle.

Sampling ``func`` at ``M`` equispaced nodes of a circle and taking one DFT
gives all coefficients ``c_k`` with ``|k| < M/2`` at once; for a finite
Laurent series inside that range the result is exact up to rounding.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationError

__all__ = ["QuadratureConfig", "laurent_coefficients", "default_radius"]


@dataclass(frozen=True)
class QuadratureConfig:
    center: complex = 0j
    radius: float = 1.0
    nodes: int = 256
    k_min: int = -8
    k_max: int = 8

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise ValueError(f"radius must be positive; got {self.radius!r}")
        if int(self.nodes) != self.nodes or self.nodes < 8:
            raise ValueError(f"nodes must be an integer >= 8; got {self.nodes!r}")
        if self.k_min > self.k_max:
            raise ValueError("k_min must not exceed k_max")
        if self.k_max - self.k_min >= self.nodes:
            raise ValueError("coefficient range must be narrower than the node count")


def laurent_coefficients(func, cfg):
    """Return ``{k: c_k}`` for ``k_min <= k <= k_max``.

    ``c_k = (1/M) sum_j func(z_j) radius^-k exp(-2 pi i j k / M)`` with
    ``z_j = center + radius exp(2 pi i j / M)``.
    """
    M = int(cfg.nodes)
    nodes = cfg.center + cfg.radius * np.exp(2j * np.pi * np.arange(M) / M)
    with np.errstate(all="ignore"):
        samples = np.asarray(func(nodes), dtype=np.complex128)
    bad = np.flatnonzero(~np.isfinite(samples))
    if bad.size:
        j = int(bad[0])
        raise EvaluationError(f"non-finite sample at node {j} (z = {complex(nodes[j])})")
    spectrum = np.fft.fft(samples) / M
    return {k: complex(spectrum[k % M] * cfg.radius ** (-k))
            for k in range(cfg.k_min, cfg.k_max + 1)}


def default_radius(poles, center, fallback=1.0):
    """Half the distance from ``center`` to the nearest other known pole."""
    center = complex(center)
    dists = [abs(complex(p) - center) for p, _ in poles]
    dists = [d for d in dists if d > 1e-12]
    return 0.5 * min(dists) if dists else fallback
