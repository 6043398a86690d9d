"""Constructive initial points for the harmonic Newton method.

Near a pole of order ``n`` the map is dominated by
``a_{-n} (z - z0)^-n + conj(b_{-n} (z - z0)^-n)`` plus the constant term,
and solving that truncated equation gives ``n`` equispaced initial points.
Near a singular zero the local normal form plays the same role for the
perturbed equation ``f(z) = delta * c``.
"""
import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateConstant, NoUniqueSolution, NotSingularZero, SeedBranchError
from .laurent import QuadratureConfig, default_radius, laurent_coefficients

__all__ = [
    "LaurentData",
    "NormalFormData",
    "solve_linear_harmonic",
    "pole_seeds",
    "infinity_seeds",
    "normal_form",
    "singular_seeds",
    "laurent_data",
    "laurent_data_at_infinity",
]

REL_TOL = 1e-14


def solve_linear_harmonic(a, b, c):
    """Unique solution of ``a z + conj(b z) = c``; needs ``|a| != |b|``."""
    a, b, c = complex(a), complex(b), complex(c)
    det = abs(a) ** 2 - abs(b) ** 2
    if abs(det) <= REL_TOL * (abs(a) ** 2 + abs(b) ** 2):
        raise NoUniqueSolution(f"|a| = |b| for a={a}, b={b}: no unique solution")
    return (a.conjugate() * c - (b * c).conjugate()) / det


@dataclass(frozen=True)
class LaurentData:
    """Coefficients of ``h = sum a_k (z-center)^k`` and ``g = sum b_k (z-center)^k``."""

    center: complex
    n: int
    a: dict
    b: dict

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"pole order must be >= 1; got {self.n!r}")
        object.__setattr__(self, "center", complex(self.center))

    def coeff(self, side, k):
        return complex((self.a if side == "h" else self.b).get(k, 0))

    @property
    def constant(self):
        """``c = -(a_0 + conj(b_0))``."""
        return -(self.coeff("h", 0) + self.coeff("g", 0).conjugate())


def _nth_roots(rhs, n):
    # ascending principal argument
    r = abs(rhs) ** (1.0 / n)
    base = cmath.phase(rhs) / n
    roots = [r * cmath.exp(1j * (base + 2 * math.pi * j / n)) for j in range(n)]
    return sorted(roots, key=lambda w: cmath.phase(w))


def pole_seeds(data):
    """The ``n`` initial points near a pole of order ``n``.

    Solutions of ``(z - z0)^n = (|a_-n|^2 - |b_-n|^2) / (conj(a_-n) c - conj(b_-n) conj(c))``.
    """
    a, b, c = data.coeff("h", -data.n), data.coeff("g", -data.n), data.constant
    if c == 0:
        raise DegenerateConstant("c = -(a_0 + conj(b_0)) vanishes")
    num = abs(a) ** 2 - abs(b) ** 2
    den = a.conjugate() * c - b.conjugate() * c.conjugate()
    if abs(num) <= REL_TOL * (abs(a) ** 2 + abs(b) ** 2) or den == 0:
        raise NoUniqueSolution(f"|a_-n| = |b_-n| (a={a}, b={b}); seeds undefined")
    return [data.center + w for w in _nth_roots(num / den, data.n)]


def infinity_seeds(a, b, n):
    """The ``n`` initial points for zeros near infinity (expansion ``|z| > R``)."""
    an, bn = complex(a.get(n, 0)), complex(b.get(n, 0))
    c = -(complex(a.get(0, 0)) + complex(b.get(0, 0)).conjugate())
    if c == 0:
        raise DegenerateConstant("c = -(a_0 + conj(b_0)) vanishes")
    det = abs(an) ** 2 - abs(bn) ** 2
    if abs(det) <= REL_TOL * (abs(an) ** 2 + abs(bn) ** 2):
        raise NoUniqueSolution(f"|a_n| = |b_n| (a={an}, b={bn}); seeds undefined")
    rhs = (an.conjugate() * c - bn.conjugate() * c.conjugate()) / det
    return _nth_roots(rhs, n)


@dataclass(frozen=True)
class NormalFormData:
    """Local normal form ``zeta + conj(zeta) + sum alpha_k zeta^k + conj(sum beta_k zeta^k)``.

    ``f(z) = scale * normal(exp(-i theta) (z - z0))``.
    """

    z0: complex
    theta: float
    alpha: dict = field(default_factory=dict)
    beta: dict = field(default_factory=dict)
    scale: complex = 1
    c_tilde: complex = 0

    def evaluate(self, zeta):
        zeta = np.asarray(zeta, complex)
        p = sum(a * zeta**k for k, a in self.alpha.items())
        q = sum(b * zeta**k for k, b in self.beta.items())
        return zeta + np.conj(zeta) + p + np.conj(q)

    def evaluate_original(self, z):
        zeta = np.exp(-1j * self.theta) * (np.asarray(z, complex) - self.z0)
        return self.scale * self.evaluate(zeta)

    def perturbation(self, delta):
        """``delta * c`` with ``c = scale * c_tilde``; seeds target ``f - delta*c``."""
        return delta * self.scale * self.c_tilde


def normal_form(a, b, z0, K=6, tol=1e-10):
    """Normal form at a singular zero from Taylor coefficients ``a_k``, ``b_k``."""
    a1, b1 = complex(a.get(1, 0)), complex(b.get(1, 0))
    a0, b0 = complex(a.get(0, 0)), complex(b.get(0, 0))
    if a1 == 0:
        raise NotSingularZero("a_1 = 0: normal form undefined")
    if abs(abs(a1) - abs(b1)) > tol * abs(a1):
        raise NotSingularZero(f"|a_1| = {abs(a1)} differs from |b_1| = {abs(b1)}")
    scale_ref = max(abs(a1), 1.0)
    if abs(a0 + b0.conjugate()) > tol * scale_ref:
        raise NotSingularZero(f"f(z0) = {a0 + b0.conjugate()} is not zero")
    theta = (cmath.phase(b1.conjugate() / a1) / 2) % math.pi
    rot = [cmath.exp(1j * (k - 1) * theta) for k in range(K + 1)]
    alpha = {k: complex(a.get(k, 0)) / a1 * rot[k] for k in range(2, K + 1)}
    beta = {k: complex(b.get(k, 0)) / b1 * rot[k] for k in range(2, K + 1)}
    c_tilde = -(alpha.get(2, 0) + beta.get(2, 0).conjugate())
    return NormalFormData(complex(z0), theta, alpha, beta,
                          b1.conjugate() * cmath.exp(-1j * theta), c_tilde)


def singular_seeds(nf, delta, tol=1e-12):
    """Initial points for ``f - delta*c`` near the singular zero ``nf.z0``.

    Two points ``z0 +- i sqrt(delta) e^{i theta}`` when ``Im c_tilde != 0``,
    otherwise the single point
    ``z0 + (1 - sqrt(1 - delta c_tilde^2)) / c_tilde * e^{i theta}``.
    """
    c = complex(nf.c_tilde)
    rot = cmath.exp(1j * nf.theta)
    if abs(c.imag) > tol * max(abs(c), 1.0):
        if not delta > 0:
            raise SeedBranchError(f"Im(c_tilde) != 0 requires delta > 0; got {delta!r}")
        step = 1j * math.sqrt(delta) * rot
        return [nf.z0 + step, nf.z0 - step]
    a2 = abs(nf.alpha.get(2, 0))
    b2 = abs(nf.beta.get(2, 0))
    if abs(a2 - b2) <= tol * max(a2, b2, 1.0):
        raise SeedBranchError("Im(c_tilde) = 0 with |alpha_2| = |beta_2| (cusp case)")
    c = c.real
    return [nf.z0 + (1 - cmath.sqrt(1 - delta * c * c)) / c * rot]


def _parts_required(fmap):
    if not fmap.has_parts:
        raise ValueError(f"{fmap.name}: Laurent data needs separate h and g evaluators")


def laurent_data(fmap, center, order, radius=None, nodes=256, k_range=(-8, 8)):
    """Numerical :class:`LaurentData` of ``fmap`` at ``center``."""
    _parts_required(fmap)
    if radius is None:
        radius = default_radius(fmap.poles, center)
    lo, hi = min(k_range[0], -order), max(k_range[1], 0)
    cfg = QuadratureConfig(center, radius, nodes, lo, hi)
    return LaurentData(center, order, laurent_coefficients(fmap.h, cfg),
                       laurent_coefficients(fmap.g, cfg))


def laurent_data_at_infinity(fmap, radius=None, nodes=256, k_max=8):
    """Coefficients of the expansion valid outside a circle around 0.

    Returns ``(a, b)`` dicts.  The default radius is twice the largest known
    pole modulus (or 2.0).
    """
    _parts_required(fmap)
    if radius is None:
        mods = [abs(complex(p)) for p, _ in fmap.poles]
        radius = 2 * max(mods) if mods and max(mods) > 0 else 2.0
    cfg = QuadratureConfig(0j, radius, nodes, -k_max, k_max)
    return laurent_coefficients(fmap.h, cfg), laurent_coefficients(fmap.g, cfg)
