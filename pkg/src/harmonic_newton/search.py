"""Global zero search from a grid of initial points.

Converged final iterates are grouped by single-linkage clustering; each
cluster becomes one :class:`ZeroRecord`.  Grid points are then labeled by
the zero their orbit ends at, which is what the basin plots show.
"""
import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .harmonic_map import DEFAULT_EPS_SINGULAR, Orientation, classify_orientation, jacobian
from .newton import BatchResult, StoppingConfig, iterate_arrays

__all__ = [
    "GridSpec",
    "ZeroRecord",
    "BasinLabeling",
    "make_grid",
    "find_zeros",
    "label_basins",
    "accept_mask",
    "cluster_zeros",
    "cluster_labels",
    "match_to_zeros",
    "suspect_nonisolated",
    "zeros_to_csv",
    "zeros_to_json",
]

DEDUP_TOL = 1e-6
MATCH_TOL = 1e-6
REL_RESIDUAL = 1e-10


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    y_min: float
    y_max: float
    mesh: Optional[float] = None
    nx: Optional[int] = None
    ny: Optional[int] = None

    def __post_init__(self):
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise ValueError(f"degenerate window {self.window}")
        if self.mesh is None and (self.nx is None or self.ny is None):
            raise ValueError("give either mesh or both nx and ny")
        if self.mesh is not None and not self.mesh > 0:
            raise ValueError("mesh must be positive")
        if self.mesh is None and (self.nx < 2 or self.ny < 2):
            raise ValueError("nx and ny must be at least 2")

    @classmethod
    def square(cls, center=0j, half_width=2.0, mesh=0.05):
        center = complex(center)
        return cls(center.real - half_width, center.real + half_width,
                   center.imag - half_width, center.imag + half_width, mesh)

    @property
    def window(self):
        return (self.x_min, self.x_max, self.y_min, self.y_max)

    def axes(self):
        if self.mesh is not None:
            # tolerate spans that are an integer multiple of mesh up to rounding
            nx = int(math.floor((self.x_max - self.x_min) / self.mesh + 1e-9)) + 1
            ny = int(math.floor((self.y_max - self.y_min) / self.mesh + 1e-9)) + 1
            xs = self.x_min + self.mesh * np.arange(nx)
            ys = self.y_min + self.mesh * np.arange(ny)
        else:
            xs = np.linspace(self.x_min, self.x_max, self.nx)
            ys = np.linspace(self.y_min, self.y_max, self.ny)
        return xs, ys

    @property
    def shape(self):
        xs, ys = self.axes()
        return ys.size, xs.size


def make_grid(spec):
    """Initial points, row-major: ``y`` outer, ``x`` inner, both ascending."""
    xs, ys = spec.axes()
    return (xs[None, :] + 1j * ys[:, None]).reshape(-1)


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    residual: float
    jacobian: float
    orientation: Orientation
    members: int

    def as_dict(self):
        d = asdict(self)
        d["location"] = [self.location.real, self.location.imag]
        d["orientation"] = self.orientation.name
        return d


@dataclass(frozen=True)
class BasinLabeling:
    labels: np.ndarray
    iteration_counts: np.ndarray
    zeros: tuple
    window: tuple = None

    def __post_init__(self):
        if self.labels.shape != self.iteration_counts.shape:
            raise ValueError("labels and iteration_counts must have the same shape")
        if self.labels.size and self.labels.max() >= len(self.zeros):
            raise ValueError("label index out of range")

    @property
    def n_basins(self):
        """Number of distinct zeros that attract at least one grid point."""
        return int(np.unique(self.labels[self.labels >= 0]).size)


def accept_mask(fmap, result, restol=1e-14, rel_residual=REL_RESIDUAL, max_residual=None):
    """Converged points that are genuine zeros.

    The step test alone also fires on a point sitting on a pole, so the
    residual must be below ``restol`` or small relative to ``|h| + |g|``
    (the size of the terms that cancel at a zero).  Maps without separate
    ``h``/``g`` evaluators use ``rel_residual`` as an absolute bound.
    """
    keep = result.converged & np.isfinite(result.final)
    z = result.final[keep]
    if fmap.has_parts:
        scale = np.abs(fmap.h(z)) + np.abs(fmap.g(z))
    else:
        scale = np.ones(z.size)
    res = result.residual[keep]
    ok = (res < restol) | (res <= rel_residual * scale)
    if max_residual is not None:
        ok &= res < max_residual
    keep[keep] = ok
    return keep


def _single_linkage(pts, res, tol):
    """Component index per point, linking points closer than ``tol``.

    Points sharing a cell of side ``tol/2`` are within ``tol`` of each other
    and merge directly; the cells are then linked through their
    lowest-residual members.  This keeps memory linear when thousands of
    iterates pile up on one zero.
    """
    xy = np.column_stack([pts.real, pts.imag])
    cells = np.floor(xy / (0.5 * tol)).astype(np.int64)
    _, cell_of = np.unique(cells, axis=0, return_inverse=True)
    cell_of = cell_of.reshape(-1)
    n_cells = cell_of.max() + 1
    order = np.lexsort((res, cell_of))
    first = np.ones(order.size, bool)
    first[1:] = cell_of[order[1:]] != cell_of[order[:-1]]
    reps = order[first]
    tree = cKDTree(xy[reps])
    pairs = tree.query_pairs(tol, output_type="ndarray").reshape(-1, 2)
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])),
                       shape=(n_cells, n_cells))
    n_comp, cell_comp = connected_components(graph, directed=False)
    return cell_comp[cell_of], n_comp


def _cluster(fmap, result, dedup_tol, restol, rel_residual, max_residual, eps_singular):
    keep = accept_mask(fmap, result, restol, rel_residual, max_residual)
    idx = np.flatnonzero(keep)
    labels = np.full(result.final.size, -1, np.int64)
    if idx.size == 0:
        return [], labels
    pts = result.final[idx]
    res = result.residual[idx]
    comp, n_comp = _single_linkage(pts, res, dedup_tol)
    records = []
    for c in range(n_comp):
        members = np.flatnonzero(comp == c)
        best = members[np.argmin(res[members])]
        z = complex(pts[best])
        records.append(ZeroRecord(z, float(res[best]), float(jacobian(fmap, z)),
                                  classify_orientation(fmap, z, eps_singular), int(members.size)))
    order = sorted(range(n_comp), key=lambda c: (records[c].location.real, records[c].location.imag))
    rank = np.empty(n_comp, np.int64)
    rank[order] = np.arange(n_comp)
    labels[idx] = rank[comp]
    return [records[c] for c in order], labels


def cluster_zeros(fmap, result, dedup_tol=DEDUP_TOL, restol=1e-14, rel_residual=REL_RESIDUAL,
                  max_residual=None, eps_singular=DEFAULT_EPS_SINGULAR):
    """Deduplicate the accepted points of a :class:`BatchResult`."""
    return _cluster(fmap, result, dedup_tol, restol, rel_residual, max_residual, eps_singular)[0]


def cluster_labels(fmap, result, dedup_tol=DEDUP_TOL, restol=1e-14, rel_residual=REL_RESIDUAL,
                   max_residual=None, eps_singular=DEFAULT_EPS_SINGULAR):
    """Like :func:`cluster_zeros`, plus the record index of every point (-1 if rejected).

    Iterates drawn to a singular zero converge slowly and may stop farther
    than ``match_tol`` from their cluster's representative; membership
    labels them anyway.
    """
    return _cluster(fmap, result, dedup_tol, restol, rel_residual, max_residual, eps_singular)


def find_zeros(fmap, spec, cfg=None, dedup_tol=DEDUP_TOL, rel_residual=REL_RESIDUAL,
               max_residual=None, n_jobs=None):
    """Distinct zeros reached from the grid ``spec``.

    Points whose iteration converged (by residual or by step size) and that
    pass :func:`accept_mask` are clustered with threshold ``dedup_tol``.
    """
    cfg = cfg or StoppingConfig()
    result = iterate_arrays(fmap, make_grid(spec), cfg, n_jobs)
    return cluster_zeros(fmap, result, dedup_tol, cfg.restol, rel_residual, max_residual)


def match_to_zeros(result, zeros, match_tol=MATCH_TOL):
    """Index of the zero each final iterate lands on, or -1."""
    labels = np.full(result.final.size, -1, np.int64)
    if not zeros:
        return labels
    loc = np.array([z.location for z in zeros])
    tree = cKDTree(np.column_stack([loc.real, loc.imag]))
    ok = result.converged & np.isfinite(result.final)
    pts = result.final[ok]
    dist, nearest = tree.query(np.column_stack([pts.real, pts.imag]),
                               distance_upper_bound=match_tol)
    hit = np.isfinite(dist)
    sub = np.full(pts.size, -1, np.int64)
    sub[hit] = nearest[hit]
    labels[ok] = sub
    return labels


def label_basins(fmap, spec, cfg=None, zeros=None, match_tol=MATCH_TOL, n_jobs=None,
                 result: Optional[BatchResult] = None, dedup_tol=DEDUP_TOL):
    """Basin labels and iteration counts on the grid ``spec``.

    Without ``zeros`` the zeros are found from the same grid and every point
    is labeled by the cluster its final iterate joined.  Given ``zeros``,
    final iterates are matched to the nearest one within ``match_tol``.
    """
    cfg = cfg or StoppingConfig()
    if result is None:
        result = iterate_arrays(fmap, make_grid(spec), cfg, n_jobs)
    shape = spec.shape
    if zeros is None:
        zeros, labels = cluster_labels(fmap, result, dedup_tol, cfg.restol)
    else:
        labels = match_to_zeros(result, zeros, match_tol)
    return BasinLabeling(labels.reshape(shape), result.iterations.reshape(shape), tuple(zeros),
                         spec.window)


def suspect_nonisolated(zeros, min_clusters=50, jac_tol=1e-8):
    """Heuristic flag for a continuum of zeros (e.g. a ring)."""
    return len(zeros) > min_clusters and all(abs(z.jacobian) < jac_tol for z in zeros)


CSV_COLUMNS = ("re", "im", "residual", "jacobian", "orientation", "members")


def zeros_to_csv(zeros, path=None):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for z in zeros:
        writer.writerow([repr(z.location.real), repr(z.location.imag), repr(z.residual),
                         repr(z.jacobian), z.orientation.name, z.members])
    text = buf.getvalue()
    if path is not None:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def zeros_to_json(zeros, path=None):
    text = json.dumps([z.as_dict() for z in zeros], indent=2)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text + "\n")
    return text
