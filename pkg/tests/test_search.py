import csv
import io
import json

import numpy as np
import pytest

from harmonic_newton import (
    BatchResult,
    GridSpec,
    Orientation,
    Status,
    StoppingConfig,
    cluster_labels,
    cluster_zeros,
    find_zeros,
    harmonic_polynomial,
    iterate_arrays,
    label_basins,
    make_builtin,
    make_grid,
    suspect_nonisolated,
    zeros_to_csv,
    zeros_to_json,
)


def test_make_grid_small():
    pts = make_grid(GridSpec(0, 1, 0, 1, nx=3, ny=3))
    assert pts.size == 9
    assert pts[0] == 0 and pts[1] == 0.5 and pts[3] == 0.5j and pts[-1] == 1 + 1j


def test_make_grid_mesh_counts():
    assert make_grid(GridSpec(-8, 8, -2, 2, 0.2)).size == 81 * 21
    assert GridSpec.square(0, 2, 0.05).shape == (81, 81)
    assert GridSpec.square(0, 2, 0.02).shape == (201, 201)


@pytest.mark.parametrize("kwargs", [
    dict(x_min=1, x_max=1, y_min=0, y_max=1, mesh=0.1),
    dict(x_min=0, x_max=1, y_min=2, y_max=1, mesh=0.1),
    dict(x_min=0, x_max=1, y_min=0, y_max=1),
    dict(x_min=0, x_max=1, y_min=0, y_max=1, mesh=-0.1),
    dict(x_min=0, x_max=1, y_min=0, y_max=1, nx=1, ny=5),
])
def test_degenerate_grid_rejected(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def fake_result(points, residual=0.0):
    points = np.asarray(points, complex)
    n = points.size
    return BatchResult(
        final=points,
        status=np.full(n, int(Status.CONVERGED_RESIDUAL), np.int8),
        iterations=np.ones(n, np.int64),
        residual=np.full(n, residual),
    )


def test_clustering_merges_nearby_and_keeps_far_apart():
    fmap = harmonic_polynomial([0, 1], [0])
    res = fake_result([0, 3e-7, 6e-7, 1, 1 + 1e-5])
    zeros, labels = cluster_labels(fmap, res)
    assert [z.members for z in zeros] == [3, 1, 1]
    assert list(labels) == [0, 0, 0, 1, 2]


def test_clustering_handles_many_identical_points():
    fmap = harmonic_polynomial([0, 1], [0])
    pts = np.concatenate([np.zeros(200_000), np.full(200_000, 1j)])
    zeros = cluster_zeros(fmap, fake_result(pts))
    assert [z.members for z in zeros] == [200_000, 200_000]


def test_clustering_rejects_non_converged():
    fmap = harmonic_polynomial([0, 1], [0])
    res = fake_result([0.0, 0.5])
    res.status[1] = Status.MAX_ITERATIONS
    zeros, labels = cluster_labels(fmap, res)
    assert len(zeros) == 1 and list(labels) == [0, -1]


@pytest.mark.parametrize("name, params, center, expected", [
    ("mpw", dict(n=3, r=0.6), 0, 10),
    ("rhie", dict(n=3, r=0.6, eps=0.004), 0, 15),
    ("wilmshurst", dict(n=3), 0.5, 9),
])
def test_find_zeros_counts(name, params, center, expected):
    fmap = make_builtin(name, **params)
    zeros = find_zeros(fmap, GridSpec.square(center, 2, 0.05))
    assert len(zeros) == expected
    for z in zeros:
        assert abs(fmap(z.location)) == z.residual
        assert z.orientation is not Orientation.SINGULAR


def test_find_zeros_is_idempotent(mpw3):
    zeros = find_zeros(mpw3, GridSpec.square(0, 2, 0.05))
    again = cluster_zeros(mpw3, fake_result([z.location for z in zeros]), restol=1e-13)
    assert [z.location for z in again] == [z.location for z in zeros]


def test_zero_orientations_mpw(mpw3):
    # argument principle: f winds -1 on a large circle and +1 around each
    # of the three poles, so N+ - N- = 2 and N+ + N- = 10
    zeros = find_zeros(mpw3, GridSpec.square(0, 2, 0.05))
    kinds = [z.orientation for z in zeros]
    assert kinds.count(Orientation.SENSE_PRESERVING) == 6
    assert kinds.count(Orientation.SENSE_REVERSING) == 4


def test_quadratic_basins_split_by_imaginary_axis():
    fmap = harmonic_polynomial([-1, 0, 1], [0])
    spec = GridSpec(-2, 2, -2, 2, nx=40, ny=40)  # even counts avoid Re z = 0
    lab = label_basins(fmap, spec)
    assert [z.location for z in lab.zeros] == [pytest.approx(-1), pytest.approx(1)]
    x = make_grid(spec).real.reshape(spec.shape)
    assert np.array_equal(lab.labels, (x > 0).astype(int))


def test_einstein_ring_labels_and_flag():
    fmap = make_builtin("einstein")
    spec = GridSpec(-2, 2, -2, 2, nx=60, ny=60)
    lab = label_basins(fmap, spec)
    assert lab.n_basins > 50
    assert suspect_nonisolated(list(lab.zeros))
    assert all(abs(abs(z.location) - 1) < 1e-10 for z in lab.zeros)
    assert not suspect_nonisolated(find_zeros(make_builtin("mpw", n=3, r=0.6), GridSpec.square()))


def test_tan_basin_of_origin_is_huge():
    tan = make_builtin("tan_conj")
    spec = GridSpec(-8, 8, -2, 2, 0.2)
    lab = label_basins(tan, spec, StoppingConfig(use_linsys="always"))
    # the rest diverge or stop on the critical set
    assert np.mean(lab.labels >= 0) > 0.8
    # convergence to the degenerate zero at 0 is linear and f ~ x^3/3 on the
    # real axis, so the residual test stops orbits up to ~3e-5 away
    near = [i for i, z in enumerate(lab.zeros) if abs(z.location) < 1e-4]
    assert any(lab.zeros[i].orientation is Orientation.SINGULAR for i in near)
    assert np.isin(lab.labels, near).mean() > 0.5
    real = sorted(z.location.real for z in lab.zeros if abs(z.location) > 1)
    assert real[len(real) // 2:][:2] == [pytest.approx(4.493409457909064), pytest.approx(7.725251836937707)]


def test_label_basins_with_given_zeros(mpw3):
    spec = GridSpec.square(0, 2, 0.1)
    zeros = find_zeros(mpw3, spec)
    given = label_basins(mpw3, spec, zeros=zeros)
    own = label_basins(mpw3, spec)
    assert given.zeros == own.zeros
    # matching may miss a few slow orbits, but never disagrees
    both = (given.labels >= 0) & (own.labels >= 0)
    assert np.array_equal(given.labels[both], own.labels[both])
    assert both.mean() > 0.95


def test_label_basins_reuses_result(mpw3):
    spec = GridSpec.square(0, 2, 0.1)
    result = iterate_arrays(mpw3, make_grid(spec), StoppingConfig())
    a = label_basins(mpw3, spec, result=result)
    b = label_basins(mpw3, spec)
    assert np.array_equal(a.labels, b.labels) and np.array_equal(a.iteration_counts, b.iteration_counts)


def test_csv_and_json_export(tmp_path, mpw3):
    zeros = find_zeros(mpw3, GridSpec.square(0, 2, 0.05))
    text = zeros_to_csv(zeros, tmp_path / "z.csv")
    assert (tmp_path / "z.csv").read_text() == text
    rows = list(csv.DictReader(io.StringIO(text)))
    assert len(rows) == 10
    assert complex(float(rows[0]["re"]), float(rows[0]["im"])) == zeros[0].location
    data = json.loads(zeros_to_json(zeros, tmp_path / "z.json"))
    assert data[0]["orientation"] in {"SENSE_PRESERVING", "SENSE_REVERSING"}
    assert complex(*data[-1]["location"]) == zeros[-1].location
