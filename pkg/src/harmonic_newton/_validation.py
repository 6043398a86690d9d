"""Input validation helpers shared by the estimator and the functional API."""
import numbers

import numpy as np
from sklearn.utils.validation import check_array


def check_complex_points(X, name="X", allow_empty=False):
    """Return ``X`` as a 1-D complex128 array.

    Accepts complex scalars, sequences of complex numbers, and real arrays of
    shape ``(n_samples, 2)`` holding ``(re, im)`` columns (the layout the rest
    of the scikit-learn ecosystem passes around).
    """
    arr = np.asarray(X)
    if np.iscomplexobj(arr):
        out = np.ascontiguousarray(arr, dtype=np.complex128).reshape(-1)
    elif arr.ndim == 2:
        arr = check_array(arr, dtype=np.float64, ensure_all_finite=False,
                          ensure_min_samples=0 if allow_empty else 1)
        if arr.shape[1] != 2:
            raise ValueError(f"{name} must have 2 columns (re, im); got {arr.shape[1]}")
        out = arr[:, 0] + 1j * arr[:, 1]
    elif arr.ndim <= 1:
        out = np.ascontiguousarray(arr, dtype=np.complex128).reshape(-1)
    else:
        raise ValueError(f"{name} must be 1-D complex or (n, 2) real; got shape {arr.shape}")
    if out.size == 0 and not allow_empty:
        raise ValueError(f"{name} is empty")
    return out


def as_real_pairs(z):
    """Inverse of :func:`check_complex_points` for the ``(n, 2)`` layout."""
    z = np.asarray(z, dtype=np.complex128).reshape(-1)
    return np.column_stack([z.real, z.imag])


def check_positive(value, name, integer=False):
    if integer:
        if not isinstance(value, numbers.Integral) or isinstance(value, bool):
            raise ValueError(f"{name} must be an integer; got {value!r}")
    elif not isinstance(value, numbers.Real) or isinstance(value, bool):
        raise ValueError(f"{name} must be a real number; got {value!r}")
    if not value > 0 or not np.isfinite(value):
        raise ValueError(f"{name} must be positive and finite; got {value!r}")
    return value


def check_nonnegative(value, name):
    if not isinstance(value, numbers.Real) or isinstance(value, bool) or not value >= 0:
        raise ValueError(f"{name} must be a non-negative real; got {value!r}")
    return value
