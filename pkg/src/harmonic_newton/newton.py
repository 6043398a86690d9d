"""The harmonic Newton iteration.

One step maps ``z`` to

    z - (conj(h'(z)) f(z) - conj(g'(z) f(z))) / (|h'(z)|^2 - |g'(z)|^2)

which is Newton's method for ``f`` viewed as a map of the real plane.  The
batch driver keeps an active set so that points stop updating individually
as soon as they converge or blow up.
"""
import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from ._validation import check_complex_points, check_positive
from .errors import HarmonicNewtonError

__all__ = [
    "Status",
    "StoppingConfig",
    "IterationOutcome",
    "BatchResult",
    "SingularJacobian",
    "step_harmonic",
    "step_general",
    "step_linsys",
    "iterate",
    "iterate_batch",
    "iterate_arrays",
    "orbits",
]

PIVOT_FLOOR = 1e-300
LINSYS_MODES = ("never", "always", "auto")


class SingularJacobian(HarmonicNewtonError):
    pass


class Status(enum.IntEnum):
    CONVERGED_RESIDUAL = 0
    CONVERGED_STEP = 1
    MAX_ITERATIONS = 2
    DIVERGED = 3
    SINGULAR_JACOBIAN = 4

    @property
    def converged(self):
        return self in (Status.CONVERGED_RESIDUAL, Status.CONVERGED_STEP)


@dataclass(frozen=True)
class StoppingConfig:
    """Stopping rule and step selection.

    ``use_linsys`` chooses between the closed-form step (``"never"``), the
    pivoted 2x2 real solve (``"always"``), or the solve only where
    ``|J| < auto_threshold * (|h'|^2 + |g'|^2)`` (``"auto"``).
    """

    maxit: int = 50
    restol: float = 1e-14
    steptol: float = 1e-14
    use_linsys: str = "never"
    auto_threshold: float = 1e-12

    def __post_init__(self):
        check_positive(self.maxit, "maxit", integer=True)
        check_positive(self.restol, "restol")
        check_positive(self.steptol, "steptol")
        check_positive(self.auto_threshold, "auto_threshold")
        if self.use_linsys not in LINSYS_MODES:
            raise ValueError(f"use_linsys must be one of {LINSYS_MODES}; got {self.use_linsys!r}")


@dataclass(frozen=True)
class IterationOutcome:
    final: complex
    status: Status
    iterations: int
    residual: float

    @property
    def converged(self):
        return self.status.converged


class BatchResult(NamedTuple):
    final: np.ndarray
    status: np.ndarray
    iterations: np.ndarray
    residual: np.ndarray

    @property
    def converged(self):
        return self.status <= Status.CONVERGED_STEP

    def outcome(self, i):
        return IterationOutcome(complex(self.final[i]), Status(int(self.status[i])),
                                int(self.iterations[i]), float(self.residual[i]))


# --------------------------------------------------------------------------
# single steps


def _general(dz, dzbar, fz, z):
    return z - (np.conj(dz) * fz - dzbar * np.conj(fz)) / (np.abs(dz) ** 2 - np.abs(dzbar) ** 2)


def step_general(dz_f, dzbar_f, fz, z):
    """Newton step for any real-differentiable ``f`` given its Wirtinger derivatives."""
    with np.errstate(all="ignore"):
        out = _general(np.asarray(dz_f, complex), np.asarray(dzbar_f, complex),
                       np.asarray(fz, complex), np.asarray(z, complex))
    return out[()] if out.ndim == 0 else out


def step_harmonic(fmap, z):
    """One harmonic Newton step; ``J = 0`` gives a non-finite result."""
    z = np.asarray(z, complex)
    return step_general(fmap.dz(z), fmap.dzbar(z), fmap(z), z)


def _linsys(dz, dzbar, fz, z):
    # rows of the real 2x2 derivative, partial pivoting on the first column
    a11 = dz.real + dzbar.real
    a12 = -dz.imag + dzbar.imag
    a21 = dz.imag + dzbar.imag
    a22 = dz.real - dzbar.real
    b1 = -fz.real
    b2 = -fz.imag
    swap = np.abs(a21) > np.abs(a11)
    p11 = np.where(swap, a21, a11)
    p12 = np.where(swap, a22, a12)
    pb = np.where(swap, b2, b1)
    q11 = np.where(swap, a11, a21)
    q12 = np.where(swap, a12, a22)
    qb = np.where(swap, b1, b2)
    singular = np.abs(p11) < PIVOT_FLOOR
    m = q11 / np.where(singular, 1.0, p11)
    u22 = q12 - m * p12
    singular |= np.abs(u22) < PIVOT_FLOOR
    u22 = np.where(singular, 1.0, u22)
    p11 = np.where(singular, 1.0, p11)
    x2 = (qb - m * pb) / u22
    x1 = (pb - p12 * x2) / p11
    return z + (x1 + 1j * x2), singular


def step_linsys(fmap, z):
    """Newton step by solving ``F'(z) d = -F(z)`` as a real 2x2 system.

    Raises :class:`SingularJacobian` when a pivot falls below 1e-300.
    """
    z = np.asarray(z, complex)
    zz = np.atleast_1d(z)
    with np.errstate(all="ignore"):
        out, singular = _linsys(np.atleast_1d(fmap.dz(zz)), np.atleast_1d(fmap.dzbar(zz)),
                                np.atleast_1d(fmap(zz)), zz)
    if np.any(singular):
        raise SingularJacobian(f"derivative matrix singular at {zz[singular][:5]}")
    return out[0] if z.ndim == 0 else out.reshape(z.shape)


def _step(fmap, z, fz, cfg):
    dz = fmap.dh_func(z)
    dzbar = np.conj(fmap.dg_func(z))
    if cfg.use_linsys == "never":
        return _general(dz, dzbar, fz, z), np.zeros(z.shape, bool)
    if cfg.use_linsys == "always":
        return _linsys(dz, dzbar, fz, z)
    a = np.abs(dz) ** 2
    b = np.abs(dzbar) ** 2
    lin = np.abs(a - b) < cfg.auto_threshold * (a + b)
    out = np.empty_like(z)
    singular = np.zeros(z.shape, bool)
    keep = ~lin
    out[keep] = _general(dz[keep], dzbar[keep], fz[keep], z[keep])
    if lin.any():
        out[lin], singular[lin] = _linsys(dz[lin], dzbar[lin], fz[lin], z[lin])
    return out, singular


# --------------------------------------------------------------------------
# drivers


def _run(fmap, z0, cfg, history=None):
    z = z0.copy()
    n = z.size
    status = np.full(n, Status.MAX_ITERATIONS, np.int8)
    iters = np.full(n, cfg.maxit, np.int64)
    fz_all = np.empty(n, complex)
    with np.errstate(all="ignore"):
        fz = fmap.f_func(z)
        fz_all[:] = fz
        conv = np.abs(fz) < cfg.restol
        div = ~(np.isfinite(fz) & np.isfinite(z))
        status[conv] = Status.CONVERGED_RESIDUAL
        status[div] = Status.DIVERGED
        iters[conv | div] = 0
        active = np.flatnonzero(~(conv | div))
        fz = fz[active]
        if history is not None:
            history[0] = z
        for k in range(1, cfg.maxit + 1):
            if active.size == 0:
                break
            zold = z[active]
            znew, singular = _step(fmap, zold, fz, cfg)
            znew = np.where(singular, zold, znew)
            z[active] = znew
            fz = fmap.f_func(znew)
            fz_all[active] = fz
            if history is not None:
                history[k, active] = znew
            div = ~(np.isfinite(fz) & np.isfinite(znew)) & ~singular
            res_ok = (np.abs(fz) < cfg.restol) & ~singular
            step_ok = (np.abs(znew - zold) < cfg.steptol * np.abs(znew)) & ~singular & ~res_ok
            done = singular | div | res_ok | step_ok
            idx = active
            status[idx[singular]] = Status.SINGULAR_JACOBIAN
            iters[idx[singular]] = k - 1
            status[idx[div]] = Status.DIVERGED
            status[idx[res_ok]] = Status.CONVERGED_RESIDUAL
            status[idx[step_ok]] = Status.CONVERGED_STEP
            iters[idx[div | res_ok | step_ok]] = k
            active = idx[~done]
            fz = fz[~done]
        residual = np.abs(fz_all)
    residual[~np.isfinite(residual)] = np.inf
    return BatchResult(z, status, iters, residual)


def default_n_jobs():
    try:
        return max(1, int(os.environ.get("HN_THREADS", "1")))
    except ValueError:
        return 1


def iterate_arrays(fmap, points, cfg=None, n_jobs=None):
    """Run the harmonic Newton method from every point; array results.

    Points are processed in ``n_jobs`` contiguous chunks on a thread pool.
    Each point's orbit involves only its own elementwise arithmetic, so the
    result does not depend on the chunking.
    """
    cfg = cfg or StoppingConfig()
    z0 = check_complex_points(points, "points")
    n_jobs = default_n_jobs() if n_jobs is None else max(1, int(n_jobs))
    if n_jobs == 1 or z0.size < 2 * n_jobs:
        return _run(fmap, z0, cfg)
    chunks = np.array_split(z0, n_jobs)
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        parts = list(pool.map(lambda c: _run(fmap, c, cfg), chunks))
    return BatchResult(*(np.concatenate(col) for col in zip(*parts)))


def iterate_batch(fmap, points, cfg=None, n_jobs=None):
    res = iterate_arrays(fmap, points, cfg, n_jobs)
    return [res.outcome(i) for i in range(res.final.size)]


def iterate(fmap, z0, cfg=None):
    """Harmonic Newton method from a single initial point."""
    return iterate_arrays(fmap, [complex(z0)], cfg, n_jobs=1).outcome(0)


def orbits(fmap, points, cfg=None):
    """Iterates ``z_0 .. z_maxit`` for each point, NaN after it stops.

    Shape ``(maxit + 1, n_points)``.
    """
    cfg = cfg or StoppingConfig()
    z0 = check_complex_points(points, "points")
    history = np.full((cfg.maxit + 1, z0.size), np.nan + 0j)
    _run(fmap, z0, cfg, history)
    return history
