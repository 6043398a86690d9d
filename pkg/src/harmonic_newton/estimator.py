"""scikit-learn style front end.

:class:`HarmonicNewtonZeros` treats zero finding as clustering: ``fit``
runs the iteration from the given initial points, the distinct zeros play
the role of cluster centers and each point's label is the basin it lies in.

>>> from harmonic_newton import HarmonicNewtonZeros, GridSpec, make_grid
>>> est = HarmonicNewtonZeros("mpw").fit(make_grid(GridSpec.square(0, 2, 0.05)))
>>> len(est.zeros_)
10
"""
import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from ._validation import as_real_pairs, check_complex_points, check_nonnegative, check_positive
from .harmonic_map import HarmonicMap, function_spec_from_json, make_builtin
from .newton import StoppingConfig, iterate_arrays
from .search import DEDUP_TOL, MATCH_TOL, REL_RESIDUAL, cluster_labels, match_to_zeros, suspect_nonisolated

__all__ = ["HarmonicNewtonZeros", "resolve_map"]


def resolve_map(func):
    """A :class:`HarmonicMap` from a map, a builtin name or a JSON-style spec."""
    if isinstance(func, HarmonicMap):
        return func
    if isinstance(func, str):
        return make_builtin(func)
    if isinstance(func, dict):
        return function_spec_from_json(func)
    raise ValueError(f"func must be a HarmonicMap, builtin name or spec dict; got {type(func).__name__}")


class HarmonicNewtonZeros(ClusterMixin, TransformerMixin, BaseEstimator):
    """Zeros of a harmonic map reached from a set of initial points.

    ``X`` is either a 1-D complex array or a real ``(n, 2)`` array of
    ``(re, im)`` pairs.

    Attributes set by ``fit``: ``zeros_`` (complex locations),
    ``zero_records_``, ``labels_`` (-1 for points that reach no zero),
    ``n_iter_``, ``final_``, ``status_``, ``residual_`` and
    ``nonisolated_suspected_``.
    """

    def __init__(self, func="mpw", maxit=50, restol=1e-14, steptol=1e-14, use_linsys="never",
                 auto_threshold=1e-12, dedup_tol=DEDUP_TOL, match_tol=MATCH_TOL,
                 rel_residual=REL_RESIDUAL, n_jobs=None):
        self.func = func
        self.maxit = maxit
        self.restol = restol
        self.steptol = steptol
        self.use_linsys = use_linsys
        self.auto_threshold = auto_threshold
        self.dedup_tol = dedup_tol
        self.match_tol = match_tol
        self.rel_residual = rel_residual
        self.n_jobs = n_jobs

    def _config(self):
        check_positive(self.dedup_tol, "dedup_tol")
        check_positive(self.match_tol, "match_tol")
        check_nonnegative(self.rel_residual, "rel_residual")
        return StoppingConfig(self.maxit, self.restol, self.steptol, self.use_linsys,
                              self.auto_threshold)

    def _run(self, X):
        z0 = check_complex_points(X)
        return iterate_arrays(self.map_, z0, self.config_, self.n_jobs)

    def fit(self, X, y=None):
        self.config_ = self._config()
        self.map_ = resolve_map(self.func)
        result = self._run(X)
        records, labels = cluster_labels(self.map_, result, self.dedup_tol, self.config_.restol,
                                         self.rel_residual)
        self.zero_records_ = records
        self.zeros_ = np.array([r.location for r in records], dtype=complex)
        self.labels_ = labels
        self.final_ = result.final
        self.status_ = result.status
        self.n_iter_ = result.iterations
        self.residual_ = result.residual
        self.nonisolated_suspected_ = suspect_nonisolated(records)
        return self

    def predict(self, X):
        """Index of the zero each initial point converges to, or -1.

        New final iterates are matched to ``zeros_`` within ``match_tol``.
        """
        check_is_fitted(self, "zero_records_")
        return match_to_zeros(self._run(X), self.zero_records_, self.match_tol)

    def transform(self, X):
        """Final iterates as an ``(n, 2)`` real array."""
        check_is_fitted(self, "zero_records_")
        return as_real_pairs(self._run(X).final)
