import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harmonic_newton import (
    EvaluationError,
    HarmonicMap,
    Orientation,
    RationalPair,
    classify_orientation,
    function_spec_from_json,
    harmonic_polynomial,
    jacobian,
    load_function_spec,
    make_builtin,
    make_rational_pair,
)

from conftest import CATALOG, finite_difference_wirtinger, smooth_points


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_wirtinger_consistency(name, rng):
    fmap = make_builtin(name, **CATALOG[name])
    z = smooth_points(fmap, rng)
    fd_dz, fd_dzbar = finite_difference_wirtinger(fmap, z)
    scale = np.maximum(1, np.abs(fmap.dz(z)) + np.abs(fmap.dzbar(z)))
    assert np.max(np.abs(fd_dz - fmap.dz(z)) / scale) < 1e-6
    assert np.max(np.abs(fd_dzbar - fmap.dzbar(z)) / scale) < 1e-6


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_second_derivatives_match_difference_quotients(name, rng):
    fmap = make_builtin(name, **CATALOG[name])
    z = smooth_points(fmap, rng, count=20)
    step = 1e-5
    fd_ddh = (fmap.dh(z + step) - fmap.dh(z - step)) / (2 * step)
    fd_ddg = (fmap.dg(z + step) - fmap.dg(z - step)) / (2 * step)
    assert np.allclose(fd_ddh, fmap.ddh(z), rtol=1e-6, atol=1e-6)
    assert np.allclose(fd_ddg, fmap.ddg(z), rtol=1e-6, atol=1e-6)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_parts_reassemble_f(name, rng):
    fmap = make_builtin(name, **CATALOG[name])
    z = smooth_points(fmap, rng)
    assert np.allclose(fmap(z), fmap.h(z) + np.conj(fmap.g(z)), rtol=1e-13, atol=1e-13)


@pytest.mark.parametrize("name", sorted(CATALOG))
def test_jacobian_is_defined_by_wirtinger_derivatives(name, rng):
    fmap = make_builtin(name, **CATALOG[name])
    z = smooth_points(fmap, rng)
    assert np.array_equal(jacobian(fmap, z), np.abs(fmap.dz(z)) ** 2 - np.abs(fmap.dzbar(z)) ** 2)


def test_evaluators_are_pure(mpw3, rng):
    z = smooth_points(mpw3, rng)
    assert np.array_equal(mpw3(z), mpw3(z.copy()))
    assert np.array_equal(mpw3.dz(z), mpw3.dz(z))


def test_jacobian_hand_values():
    identity = harmonic_polynomial([0, 1], [0])
    conj = harmonic_polynomial([0], [0, 1])
    assert jacobian(identity, 0) == 1
    assert jacobian(conj, 0.3 + 2j) == -1
    assert jacobian(make_builtin("einstein"), 2) == pytest.approx(-0.9375, abs=1e-15)


def test_jacobian_propagates_non_finite():
    assert not np.isfinite(jacobian(make_builtin("einstein"), 0))


def test_classify_orientation_examples():
    assert classify_orientation(harmonic_polynomial([0, 1], [0]), 0) is Orientation.SENSE_PRESERVING
    assert classify_orientation(harmonic_polynomial([0], [0, 1]), 1j) is Orientation.SENSE_REVERSING
    assert classify_orientation(make_builtin("einstein"), 1) is Orientation.SINGULAR
    assert classify_orientation(make_builtin("tan_conj"), 1e-10) is Orientation.SINGULAR
    assert classify_orientation(make_builtin("tan_conj"), 1.0) is not Orientation.SINGULAR


def test_classify_orientation_rejects_non_finite():
    with pytest.raises(EvaluationError):
        classify_orientation(make_builtin("einstein"), 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False), min_size=2, max_size=5),
       st.complex_numbers(max_magnitude=2, allow_nan=False))
def test_analytic_maps_are_never_sense_reversing(coeffs, z):
    fmap = harmonic_polynomial(coeffs, [0])
    assert classify_orientation(fmap, z) is not Orientation.SENSE_REVERSING


def test_einstein_jacobian_vanishes_on_unit_circle():
    phi = 2 * np.pi * np.arange(360) / 360
    assert np.max(np.abs(jacobian(make_builtin("einstein"), np.exp(1j * phi)))) <= 1e-12


def test_catalog_hand_values():
    assert make_builtin("mpw", n=3, r=0.6)(0.9) == pytest.approx(0.81 / 0.513 - 0.9, rel=1e-14)
    assert make_builtin("einstein")(1) == 0
    # z^3 + (z-1)^3 + conj(i(z-1)^3 - i z^3) at 0.5, term by term
    z = 0.5
    expected = z**3 + (z - 1) ** 3 + np.conj(1j * (z - 1) ** 3 - 1j * z**3)
    assert make_builtin("wilmshurst", n=3)(0.5) == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.25j)


def test_catalog_poles_metadata():
    mpw = make_builtin("mpw", n=3, r=0.6)
    assert sorted(np.angle([p for p, _ in mpw.poles])) == pytest.approx(
        sorted(np.angle(0.6 * np.exp(2j * np.pi * np.arange(3) / 3))))
    rhie = make_builtin("rhie", n=3, r=0.6, eps=0.004)
    assert any(p == 0 for p, _ in rhie.poles) and len(rhie.poles) == 4
    assert [p for p, _ in make_builtin("einstein").poles] == [0]
    tan_poles = np.array([p for p, _ in make_builtin("tan_conj").poles])
    assert np.allclose(np.cos(tan_poles), 0, atol=1e-12)
    for p in tan_poles[:3]:
        assert not np.isfinite(make_builtin("tan_conj")(p)) or abs(make_builtin("tan_conj")(p)) > 1e12


@pytest.mark.parametrize("name, params", [
    ("nope", {}),
    ("mpw", {"n": 0}),
    ("mpw", {"r": -1.0}),
    ("rhie", {"eps": 1.5}),
    ("wilmshurst", {"n": 2.5}),
    ("mpw", {"bogus": 1}),
])
def test_make_builtin_rejects_bad_input(name, params):
    with pytest.raises(ValueError):
        make_builtin(name, **params)


def test_rational_pair_reproduces_mpw(mpw3, rng):
    pair = RationalPair((0, 0, 1), (-0.216, 0, 0, 1), (0, -1), (1,))
    fmap = make_rational_pair(pair)
    z = smooth_points(mpw3, rng, count=100)
    assert np.max(np.abs(fmap(z) - mpw3(z))) <= 1e-15 * np.max(np.abs(mpw3(z))) * 10
    assert np.allclose(fmap.dz(z), mpw3.dz(z), rtol=1e-13)
    assert np.allclose(fmap.dzbar(z), mpw3.dzbar(z), rtol=1e-13)


def test_rational_pair_degenerate_cases(rng):
    identity = make_rational_pair(RationalPair((0, 1), (1,), (0,), (1,)))
    z = rng.normal(size=10) + 1j * rng.normal(size=10)
    assert np.array_equal(jacobian(identity, z), np.ones(10))
    constant = make_rational_pair(RationalPair((2 + 1j,), (1,), (0,), (1,)))
    assert np.array_equal(jacobian(constant, z), np.zeros(10))
    assert all(classify_orientation(constant, w) is Orientation.SINGULAR for w in z)


def test_rational_pair_validation():
    with pytest.raises(ValueError):
        RationalPair((1,), (0,), (0,), (1,))
    with pytest.raises(ValueError):
        RationalPair((1,), (), (0,), (1,))


def test_rational_pair_pole_is_non_finite():
    fmap = make_rational_pair(RationalPair((1,), (0, 1), (0,), (1,)))
    assert not np.isfinite(fmap(0))


def test_isothermal_cut_uses_limit_from_above():
    fmap = make_builtin("isothermal", k=1.92, w=-0.67j)
    # z + w real with |k/(z+w)| > 1 lies on the arcsine cut
    z = 0.67j + 0.5
    above = fmap(z + 1e-13j)
    assert np.isfinite(fmap(z))
    assert fmap(z) == pytest.approx(above, abs=1e-6)


def test_shifted_adds_constant(mpw3, rng):
    z = smooth_points(mpw3, rng)
    shifted = mpw3.shifted(-0.7)
    assert np.allclose(shifted(z), mpw3(z) - 0.7, atol=1e-15)
    assert np.array_equal(shifted.dz(z), mpw3.dz(z))
    assert np.allclose(shifted.h(z), mpw3.h(z) - 0.7, atol=1e-15)


def test_function_spec_json_roundtrip(tmp_path, mpw3, rng):
    spec = {"builtin": "mpw", "params": {"n": 3, "r": 0.6}, "shift": [-0.7, 0]}
    path = tmp_path / "f.json"
    path.write_text(json.dumps(spec))
    fmap = load_function_spec(path)
    z = smooth_points(mpw3, rng)
    assert np.allclose(fmap(z), mpw3(z) - 0.7, atol=1e-15)

    rational = function_spec_from_json({
        "h": {"num": [[0, 0], [1, 0], [0, 2]]},
        "g": {"num": [[0, 0], [1, 0], [0, 1]]},
    })
    w = 0.3 + 0.2j
    assert rational(w) == pytest.approx(w + np.conj(w) + 2j * w**2 + np.conj(1j * w**2), abs=1e-15)

    iso = function_spec_from_json({"builtin": "isothermal", "params": {"k": 1.92, "w": [0, -0.67]}})
    assert iso.params["w"] == -0.67j


@pytest.mark.parametrize("obj", [[], {"h": {"num": [[1, 0]]}}, {"h": {"num": [1]}, "g": {"num": [[0, 0]]}}])
def test_function_spec_rejects_malformed(obj):
    with pytest.raises(ValueError):
        function_spec_from_json(obj)


def test_custom_map_without_parts():
    fmap = HarmonicMap(lambda z: z - 1, lambda z: np.ones_like(z), lambda z: np.zeros_like(z))
    assert not fmap.has_parts and not fmap.has_second_derivatives
    assert fmap.dzbar(2.0) == 0
