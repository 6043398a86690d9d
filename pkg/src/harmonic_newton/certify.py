"""Newton-Kantorovich certificates and Newton-Mysovskii convergence disks.

Both results are stated for ``F: R^2 -> R^2``.  For a harmonic map the
derivative acts as ``w -> h'(z) w + conj(g'(z) w)`` with inverse
``w -> (conj(h'(z)) w - conj(g'(z) w)) / J(z)``, which is all we need.

Suprema over a disk are estimated on a polar grid, so certificates built
from them are empirical: the true supremum can only be larger.
"""
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import HarmonicNewtonError, MissingDerivative

__all__ = [
    "KantorovichCertificate",
    "SecondDerivativeBound",
    "ConvergenceDisk",
    "kantorovich",
    "kantorovich_from_constants",
    "sup_second_derivatives",
    "mysovskii_disk",
    "polar_grid",
]

MAX_PAIRS = 10_000


@dataclass(frozen=True)
class KantorovichCertificate:
    alpha: float
    omega0: float
    h0: float
    rho: Optional[float]
    certified: bool
    domain_radius: float
    empirical: bool = False


class SecondDerivativeBound(NamedTuple):
    ddh: float
    ddg: float
    lower_estimate: bool = True


class ConvergenceDisk(NamedTuple):
    radius: float
    omega: float
    skipped: tuple = ()


def kantorovich_from_constants(alpha, omega0, domain_radius=math.inf, empirical=False):
    h0 = alpha * omega0
    if h0 > 0.5:
        rho = None
    else:
        # (1 - sqrt(1 - 2 h0)) / omega0 without the cancellation for small h0
        rho = 2 * alpha / (1 + math.sqrt(1 - 2 * h0))
    certified = rho is not None and (rho < domain_radius or rho == 0)
    return KantorovichCertificate(alpha, omega0, h0, rho, certified, domain_radius, empirical)


def polar_grid(center, radius, grid_n):
    """``grid_n`` radii (up to and including ``radius``) times ``grid_n`` angles, plus the center."""
    radii = radius * np.arange(1, grid_n + 1) / grid_n
    angles = 2 * np.pi * np.arange(grid_n) / grid_n
    pts = (radii[:, None] * np.exp(1j * angles)[None, :]).reshape(-1)
    return complex(center) + np.concatenate([[0j], pts])


def sup_second_derivatives(fmap, center, radius, grid_n=32):
    """Grid estimate of ``sup |h''|`` and ``sup |g''|`` over a disk (a lower bound)."""
    if not fmap.has_second_derivatives:
        raise MissingDerivative(f"{fmap.name}: h'' and g'' evaluators are required")
    if grid_n < 8:
        raise ValueError("grid_n must be at least 8")
    pts = polar_grid(center, radius, grid_n)
    ddh = np.abs(np.broadcast_to(fmap.ddh(pts), pts.shape))
    ddg = np.abs(np.broadcast_to(fmap.ddg(pts), pts.shape))
    return SecondDerivativeBound(float(np.max(ddh)), float(np.max(ddg)))


def kantorovich(fmap, z0, domain_radius, sup_ddh=None, sup_ddg=None, grid_n=32):
    """Certificate for the Newton iteration started at ``z0``.

    ``sup_ddh``/``sup_ddg`` bound ``|h''|``, ``|g''|`` on the disk
    ``B(z0, domain_radius)``.  When omitted they are estimated on a grid and
    the certificate is marked empirical.
    """
    empirical = False
    if sup_ddh is None or sup_ddg is None:
        est = sup_second_derivatives(fmap, z0, domain_radius, grid_n)
        sup_ddh = est.ddh if sup_ddh is None else sup_ddh
        sup_ddg = est.ddg if sup_ddg is None else sup_ddg
        empirical = True
    dh = abs(complex(fmap.dh(z0)))
    dg = abs(complex(fmap.dg(z0)))
    gap = abs(dh - dg)
    if gap == 0 or not math.isfinite(gap):
        raise HarmonicNewtonError(f"|h'| = |g'| at z0={complex(z0)}: derivative not invertible")
    alpha = abs(complex(fmap(z0))) / gap
    omega0 = (sup_ddh + sup_ddg) / gap
    return kantorovich_from_constants(alpha, omega0, domain_radius, empirical)


def _omega(fmap, pts, rng):
    dh = fmap.dh(pts)
    dg = fmap.dg(pts)
    jac = np.abs(dh) ** 2 - np.abs(dg) ** 2
    if not np.all(np.isfinite(jac)) or np.any(jac == 0):
        return None
    n = pts.size
    i, j = np.nonzero(~np.eye(n, dtype=bool))
    if i.size > MAX_PAIRS:
        pick = rng.choice(i.size, MAX_PAIRS, replace=False)
        pick.sort()
        i, j = i[pick], j[pick]
    x, y = pts[i], pts[j]
    v = y - x
    w = (dh[j] - dh[i]) * v + np.conj((dg[j] - dg[i]) * v)
    u = (np.conj(dh[i]) * w - np.conj(dg[i] * w)) / jac[i]
    return float(np.max(np.abs(u) / np.abs(v) ** 2))


def mysovskii_disk(fmap, z_star, r_max, grid_n=10, r_steps=20, r_min_ratio=1e-3, seed=0):
    """Largest disk around a zero on which Newton provably converges (empirically).

    For each trial radius ``r`` the Lipschitz-type constant ``omega`` is
    estimated over point pairs of a polar grid in ``B(z_star, r)``; the disk
    of radius ``min(r, 2/omega)`` is then covered.  The best one is returned.
    """
    z_star = complex(z_star)
    if not abs(complex(fmap(z_star))) < 1e-10:
        raise HarmonicNewtonError(f"|f(z_star)| = {abs(complex(fmap(z_star)))} is not ~0")
    rng = np.random.default_rng(seed)
    best = ConvergenceDisk(0.0, math.inf)
    skipped = []
    with np.errstate(all="ignore"):
        for r in np.geomspace(r_max * r_min_ratio, r_max, r_steps):
            omega = _omega(fmap, polar_grid(z_star, r, grid_n), rng)
            if omega is None:
                skipped.append(float(r))
                continue
            radius = float(r) if omega == 0 else min(float(r), 2 / omega)
            if radius > best.radius:
                best = ConvergenceDisk(radius, omega)
    return best._replace(skipped=tuple(skipped))
