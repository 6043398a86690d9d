"""Harmonic mappings ``f = h + conj(g)`` and their Wirtinger derivatives.

A :class:`HarmonicMap` bundles vectorized evaluators for ``f``, ``h'`` and
``g'`` (and optionally ``h``, ``g``, ``h''``, ``g''``).  The Wirtinger
derivatives follow directly: ``dz f = h'`` and ``dzbar f = conj(g')``.

Derivatives are always supplied in closed form, either by the catalog below,
by :func:`make_rational_pair`, or by the caller.  Nothing in the library
differentiates numerically.
"""
import enum
import json
import math
import numbers
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import EvaluationError

__all__ = [
    "HarmonicMap",
    "Orientation",
    "RationalPair",
    "jacobian",
    "classify_orientation",
    "make_builtin",
    "make_rational_pair",
    "harmonic_polynomial",
    "load_function_spec",
    "function_spec_from_json",
    "BUILTINS",
]

DEFAULT_EPS_SINGULAR = 1e-12


def _c(z):
    return np.asarray(z, dtype=np.complex128)


def _out(value):
    # 0-d arrays come back as numpy scalars
    return value[()] if isinstance(value, np.ndarray) and value.ndim == 0 else value


@dataclass(frozen=True)
class HarmonicMap:
    """Evaluators for a harmonic mapping ``f = h + conj(g)``.

    The callables receive complex128 ndarrays and must be vectorized and
    pure.  Use the methods (``map(z)``, ``map.dz(z)`` ...) rather than the
    raw fields; they coerce the input and silence floating point warnings
    at poles, where non-finite values are expected and propagate.
    """

    f_func: Callable
    dh_func: Callable
    dg_func: Callable
    ddh_func: Optional[Callable] = None
    ddg_func: Optional[Callable] = None
    h_func: Optional[Callable] = None
    g_func: Optional[Callable] = None
    name: str = "custom"
    poles: tuple = ()
    params: dict = field(default_factory=dict, compare=False)

    def _eval(self, fn, z):
        with np.errstate(all="ignore"):
            return _out(fn(_c(z)))

    def __call__(self, z):
        return self._eval(self.f_func, z)

    def dh(self, z):
        return self._eval(self.dh_func, z)

    def dg(self, z):
        return self._eval(self.dg_func, z)

    def dz(self, z):
        """Wirtinger derivative ``dz f = h'``."""
        return self.dh(z)

    def dzbar(self, z):
        """Wirtinger derivative ``dzbar f = conj(g')``."""
        return np.conj(self.dg(z))

    @property
    def has_second_derivatives(self):
        return self.ddh_func is not None and self.ddg_func is not None

    @property
    def has_parts(self):
        return self.h_func is not None and self.g_func is not None

    def ddh(self, z):
        if self.ddh_func is None:
            raise AttributeError(f"{self.name}: no h'' evaluator")
        return self._eval(self.ddh_func, z)

    def ddg(self, z):
        if self.ddg_func is None:
            raise AttributeError(f"{self.name}: no g'' evaluator")
        return self._eval(self.ddg_func, z)

    def h(self, z):
        if self.h_func is None:
            raise AttributeError(f"{self.name}: no h evaluator")
        return self._eval(self.h_func, z)

    def g(self, z):
        if self.g_func is None:
            raise AttributeError(f"{self.name}: no g evaluator")
        return self._eval(self.g_func, z)

    def shifted(self, const):
        """Return ``f + const`` (the constant is absorbed into ``h``)."""
        return _shifted(self, complex(const))

    def __repr__(self):
        return f"HarmonicMap({self.name!r})"


class Orientation(enum.Enum):
    SENSE_PRESERVING = 1
    SENSE_REVERSING = -1
    SINGULAR = 0


def jacobian(fmap, z):
    """``|h'(z)|^2 - |g'(z)|^2``; non-finite inputs propagate."""
    dh = fmap.dh(z)
    dg = fmap.dg(z)
    return np.abs(dh) ** 2 - np.abs(dg) ** 2


def classify_orientation(fmap, z, eps_singular=DEFAULT_EPS_SINGULAR):
    """Classify a single point.

    The point is singular when ``|J| <= eps_singular * (|h'|^2 + |g'|^2)``;
    the relative test keeps e.g. ``tan(z) - conj(z)`` near the origin
    singular even though ``J`` is not exactly zero there.
    """
    if eps_singular < 0:
        raise ValueError("eps_singular must be non-negative")
    dh = complex(fmap.dh(z))
    dg = complex(fmap.dg(z))
    a, b = abs(dh) ** 2, abs(dg) ** 2
    jac = a - b
    if not math.isfinite(jac):
        raise EvaluationError(f"non-finite Jacobian at z={complex(z)!r}")
    if abs(jac) <= eps_singular * (a + b):
        return Orientation.SINGULAR
    return Orientation.SENSE_PRESERVING if jac > 0 else Orientation.SENSE_REVERSING


# --------------------------------------------------------------------------
# rational pairs


@dataclass(frozen=True)
class RationalPair:
    """``h = h_num/h_den`` and ``g = g_num/g_den``; coefficients ascending."""

    h_num: tuple
    h_den: tuple
    g_num: tuple
    g_den: tuple

    def __post_init__(self):
        for label in ("h_num", "h_den", "g_num", "g_den"):
            coeffs = np.asarray(getattr(self, label), dtype=np.complex128).reshape(-1)
            if coeffs.size == 0:
                raise ValueError(f"{label} is empty")
            if not np.all(np.isfinite(coeffs)):
                raise ValueError(f"{label} has non-finite coefficients")
            object.__setattr__(self, label, tuple(complex(c) for c in _trim(coeffs)))
        for label in ("h_den", "g_den"):
            if all(c == 0 for c in getattr(self, label)):
                raise ValueError(f"{label} is identically zero")


def _trim(coeffs):
    nz = np.flatnonzero(coeffs)
    if nz.size == 0:
        return coeffs[:1]
    return coeffs[: nz[-1] + 1]


def _quotient(num, den):
    """Evaluators for N/D and its first two derivatives (quotient rule)."""
    n0 = np.asarray(num, dtype=np.complex128)
    d0 = np.asarray(den, dtype=np.complex128)
    n1, n2 = P.polyder(n0), P.polyder(n0, 2)
    d1, d2 = P.polyder(d0), P.polyder(d0, 2)

    def val(z):
        return P.polyval(z, n0) / P.polyval(z, d0)

    def first(z):
        D = P.polyval(z, d0)
        return (P.polyval(z, n1) * D - P.polyval(z, n0) * P.polyval(z, d1)) / D**2

    def second(z):
        N, N1, N2 = P.polyval(z, n0), P.polyval(z, n1), P.polyval(z, n2)
        D, D1, D2 = P.polyval(z, d0), P.polyval(z, d1), P.polyval(z, d2)
        return (N2 * D - N * D2) / D**2 - 2 * D1 * (N1 * D - N * D1) / D**3

    return val, first, second


def make_rational_pair(spec, name="rational", poles=()):
    """Build a :class:`HarmonicMap` from a :class:`RationalPair`."""
    h, dh, ddh = _quotient(spec.h_num, spec.h_den)
    g, dg, ddg = _quotient(spec.g_num, spec.g_den)

    def f(z):
        return h(z) + np.conj(g(z))

    return HarmonicMap(f, dh, dg, ddh, ddg, h, g, name=name, poles=tuple(poles),
                       params={"rational_pair": spec})


def harmonic_polynomial(p, q, name="polynomial"):
    """``p(z) + conj(q(z))`` from ascending coefficient lists."""
    return make_rational_pair(RationalPair(tuple(p), (1,), tuple(q), (1,)), name=name)


# --------------------------------------------------------------------------
# catalog


def _quotient_rule(N, dN, ddN, D, dD, ddD):
    first = (dN * D - N * dD) / D**2
    second = (ddN * D - N * ddD) / D**2 - 2 * dD * (dN * D - N * dD) / D**3
    return first, second


def _mpw_parts(n, r):
    """``z^(n-1) / (z^n - r^n)`` with derivatives."""
    rn = r**n

    def parts(z):
        D = z**n - rn
        dD = n * z ** (n - 1)
        ddD = n * (n - 1) * z ** (n - 2) if n >= 2 else np.zeros_like(z)
        N = z ** (n - 1) if n >= 2 else np.ones_like(z)
        dN = (n - 1) * z ** (n - 2) if n >= 2 else np.zeros_like(z)
        ddN = (n - 1) * (n - 2) * z ** (n - 3) if n >= 3 else np.zeros_like(z)
        first, second = _quotient_rule(N, dN, ddN, D, dD, ddD)
        return N / D, first, second

    return parts


def _minus_z():
    return (lambda z: -z, lambda z: -np.ones_like(z), lambda z: np.zeros_like(z))


def _check_n(n):
    if not isinstance(n, numbers.Integral) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be an integer >= 1; got {n!r}")
    return int(n)


def _check_r(r):
    if not isinstance(r, numbers.Real) or isinstance(r, bool) or not (r > 0 and math.isfinite(r)):
        raise ValueError(f"r must be a positive real; got {r!r}")
    return float(r)


def _mpw(n=3, r=0.6):
    n, r = _check_n(n), _check_r(r)
    parts = _mpw_parts(n, r)
    g, dg, ddg = _minus_z()

    def h(z):
        return parts(z)[0]

    def f(z):
        return parts(z)[0] - np.conj(z)

    poles = tuple((complex(r * np.exp(2j * np.pi * k / n)), 1) for k in range(n))
    return HarmonicMap(f, lambda z: parts(z)[1], dg, lambda z: parts(z)[2], ddg, h, g,
                       name=f"mpw(n={n}, r={r})", poles=poles, params={"n": n, "r": r})


def _rhie(n=3, r=0.6, eps=0.004):
    n, r = _check_n(n), _check_r(r)
    if not isinstance(eps, numbers.Real) or not 0 <= eps < 1:
        raise ValueError(f"eps must lie in [0, 1); got {eps!r}")
    eps = float(eps)
    parts = _mpw_parts(n, r)
    g, dg, ddg = _minus_z()

    def h(z):
        return (1 - eps) * parts(z)[0] + eps / z

    def dh(z):
        return (1 - eps) * parts(z)[1] - eps / z**2

    def ddh(z):
        return (1 - eps) * parts(z)[2] + 2 * eps / z**3

    def f(z):
        return h(z) - np.conj(z)

    poles = tuple((complex(r * np.exp(2j * np.pi * k / n)), 1) for k in range(n)) + ((0j, 1),)
    return HarmonicMap(f, dh, dg, ddh, ddg, h, g, name=f"rhie(n={n}, r={r}, eps={eps})",
                       poles=poles, params={"n": n, "r": r, "eps": eps})


def _wilmshurst(n=3):
    n = _check_n(n)

    def pw(z, k):
        return z**k if k >= 0 else np.zeros_like(z)

    def p(z):
        return z**n + (z - 1) ** n

    def q(z):
        return 1j * ((z - 1) ** n - z**n)

    def dp(z):
        return n * (pw(z, n - 1) + pw(z - 1, n - 1))

    def dq(z):
        return 1j * n * (pw(z - 1, n - 1) - pw(z, n - 1))

    def ddp(z):
        return n * (n - 1) * (pw(z, n - 2) + pw(z - 1, n - 2)) if n >= 2 else np.zeros_like(z)

    def ddq(z):
        return 1j * n * (n - 1) * (pw(z - 1, n - 2) - pw(z, n - 2)) if n >= 2 else np.zeros_like(z)

    def f(z):
        return p(z) + np.conj(q(z))

    return HarmonicMap(f, dp, dq, ddp, ddq, p, q, name=f"wilmshurst(n={n})", params={"n": n})


def _tan_conj(n_poles=10):
    g, dg, ddg = _minus_z()

    def dh(z):
        t = np.tan(z)
        return 1 + t * t

    def ddh(z):
        t = np.tan(z)
        return 2 * t * (1 + t * t)

    def f(z):
        return np.tan(z) - np.conj(z)

    poles = tuple((complex((2 * k + 1) * np.pi / 2), 1) for k in range(-n_poles, n_poles))
    return HarmonicMap(f, dh, dg, ddh, ddg, np.tan, g, name="tan_conj", poles=poles)


def _einstein():
    g, dg, ddg = _minus_z()

    def f(z):
        # same as 1/z - conj(z), but the phase stays exact near the unit
        # circle, where Newton steps amplify tangential rounding by 1/J
        return (1 - (z.real**2 + z.imag**2)) / z

    return HarmonicMap(f, lambda z: -1 / z**2, dg, lambda z: 2 / z**3, ddg,
                       lambda z: 1 / z, g, name="einstein", poles=((0j, 1),))


def _upper_cut(v):
    # on the cuts (-inf, -1] and [1, inf) take the limit from above
    v = np.array(v, dtype=np.complex128, copy=True)
    on_cut = (v.imag == 0) & (np.abs(v.real) >= 1)
    v[on_cut] = v.real[on_cut] + 0j
    return v


def _isothermal(k=1.92, w=-0.67j):
    if not isinstance(k, numbers.Real) or not math.isfinite(k) or k == 0:
        raise ValueError(f"k must be a non-zero real; got {k!r}")
    k = float(k)
    w = complex(w)

    def g(z):
        return -np.arcsin(k / (z + w))

    def dg(z):
        u = k / (z + w)
        return k / ((z + w) ** 2 * np.sqrt(1 - u * u))

    def ddg(z):
        s = z + w
        u = k / s
        du = -k / s**2
        ddu = 2 * k / s**3
        root = np.sqrt(1 - u * u)
        return -ddu / root - du * du * u / root**3

    def f(z):
        v = _upper_cut(k / np.conj(z + w))
        return z - np.arcsin(v)

    return HarmonicMap(f, lambda z: np.ones_like(z), dg, lambda z: np.zeros_like(z), ddg,
                       lambda z: z, g, name=f"isothermal(k={k}, w={w})",
                       params={"k": k, "w": w})


def _shifted(base, const):
    if not np.isfinite(const):
        raise ValueError("shift constant must be finite")

    def f(z):
        return base.f_func(z) + const

    h = None
    if base.h_func is not None:
        base_h = base.h_func

        def h(z):
            return base_h(z) + const

    return HarmonicMap(f, base.dh_func, base.dg_func, base.ddh_func, base.ddg_func, h,
                       base.g_func, name=f"{base.name} + ({const})", poles=base.poles,
                       params={"base": base, "const": const})


def _shifted_builtin(base=None, const=0j):
    if isinstance(base, dict):
        base = function_spec_from_json(base)
    if not isinstance(base, HarmonicMap):
        raise ValueError("shifted needs a base HarmonicMap or function spec")
    return _shifted(base, complex(const))


BUILTINS = {
    "mpw": _mpw,
    "rhie": _rhie,
    "wilmshurst": _wilmshurst,
    "tan_conj": _tan_conj,
    "einstein": _einstein,
    "isothermal": _isothermal,
    "shifted": _shifted_builtin,
}


def make_builtin(name, **params):
    """Instantiate a catalog map, e.g. ``make_builtin("mpw", n=3, r=0.6)``.

    ``mpw``
        ``z^(n-1)/(z^n - r^n) - conj(z)``, ``3n + 1`` zeros for small ``r``.
    ``rhie``
        ``(1-eps) z^(n-1)/(z^n - r^n) + eps/z - conj(z)``, ``5n`` zeros.
    ``wilmshurst``
        ``z^n + (z-1)^n + conj(i(z-1)^n - i z^n)``, ``n^2`` zeros.
    ``tan_conj``
        ``tan(z) - conj(z)``.
    ``einstein``
        ``1/z - conj(z)``; the unit circle is the zero set.
    ``isothermal``
        ``z - arcsin(k / conj(z + w))``, principal branch.
    ``shifted``
        ``base + const``.
    """
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ValueError(f"unknown builtin {name!r}; choose from {sorted(BUILTINS)}") from None
    try:
        return factory(**params)
    except TypeError as exc:
        raise ValueError(f"invalid parameters for {name!r}: {exc}") from None


# --------------------------------------------------------------------------
# JSON function specs


def _complex_list(items, label):
    try:
        return tuple(complex(float(re), float(im)) for re, im in items)
    except (TypeError, ValueError):
        raise ValueError(f"{label}: coefficients must be [re, im] pairs") from None


def _complex_value(value):
    if isinstance(value, (list, tuple)) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return value


def function_spec_from_json(obj):
    """Build a map from a decoded JSON function spec.

    Either ``{"builtin": name, "params": {...}}`` or
    ``{"h": {"num": [[re, im], ...], "den": [...]}, "g": {...}}``.  An
    optional ``"shift": [re, im]`` adds a constant.
    """
    if not isinstance(obj, dict):
        raise ValueError("function spec must be a JSON object")
    if "builtin" in obj:
        params = {k: _complex_value(v) for k, v in dict(obj.get("params", {})).items()}
        fmap = make_builtin(obj["builtin"], **params)
    elif "h" in obj and "g" in obj:
        pair = RationalPair(
            _complex_list(obj["h"]["num"], "h.num"),
            _complex_list(obj["h"].get("den", [[1, 0]]), "h.den"),
            _complex_list(obj["g"]["num"], "g.num"),
            _complex_list(obj["g"].get("den", [[1, 0]]), "g.den"),
        )
        poles = tuple((complex(_complex_value(p)), 1) for p in obj.get("poles", []))
        fmap = make_rational_pair(pair, name=obj.get("name", "rational"), poles=poles)
    else:
        raise ValueError("function spec needs either 'builtin' or both 'h' and 'g'")
    if "shift" in obj:
        fmap = fmap.shifted(_complex_value(obj["shift"]))
    return fmap


def load_function_spec(path):
    return function_spec_from_json(json.loads(Path(path).read_text()))
