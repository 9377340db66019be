"""Potential validation, file round trips, and decay norms."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jacobi_scatter import (
    Potential,
    ValidationError,
    decay_norms,
    load_potential,
    potential_norm,
    save_potential,
)

from conftest import random_potential


def test_rejects_non_hermitian_site():
    bad = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValidationError) as err:
        Potential(2, (3,), bad[None])
    assert "V(3)" in str(err.value)


def test_rejects_bad_shapes_and_order():
    eye = np.eye(2, dtype=complex)
    with pytest.raises(ValidationError):
        Potential(2, (0, 1), eye[None])  # one matrix for two sites
    with pytest.raises(ValidationError):
        Potential(2, (1, 0), np.array([eye, eye]))  # sites out of order
    with pytest.raises(ValidationError):
        Potential(0, (), np.zeros((0, 0, 0)))


def test_rejects_non_finite():
    bad = np.array([[np.nan, 0.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValidationError):
        Potential(2, (0,), bad[None])


def test_zero_potential():
    pot = Potential.zero(3)
    assert pot.is_zero
    assert pot.min_support == 0 and pot.max_support == 0
    np.testing.assert_array_equal(pot.value(7), np.zeros((3, 3)))


def test_value_and_values_on():
    pot = random_potential(1, dim=2, lo=-1, hi=1)
    np.testing.assert_array_equal(pot.value(0), pot.matrices[1])
    np.testing.assert_array_equal(pot.value(99), np.zeros((2, 2)))
    stack = pot.values_on(-2, 2)
    assert stack.shape == (5, 2, 2)
    np.testing.assert_array_equal(stack[0], np.zeros((2, 2)))
    np.testing.assert_array_equal(stack[1:4], pot.matrices)


def test_reflected_flips_sites():
    pot = random_potential(2, dim=2, lo=-1, hi=3)
    refl = pot.reflected()
    assert refl.sites == (-3, -2, -1, 0, 1)
    for n in range(-3, 4):
        np.testing.assert_array_equal(refl.value(n), pot.value(-n))
    # Reflecting twice gives the original back.
    assert refl.reflected().fingerprint() == pot.fingerprint()


def test_fingerprint_distinguishes_values():
    a = random_potential(1, dim=2, lo=0, hi=1)
    b = random_potential(2, dim=2, lo=0, hi=1)
    assert a.fingerprint() != b.fingerprint()
    assert a.fingerprint() == random_potential(1, dim=2, lo=0, hi=1).fingerprint()


def test_from_dict_requires_imaginary_part():
    with pytest.raises(ValidationError):
        Potential.from_dict({"L": 1, "entries": [{"n": 0, "re": [[1.0]]}]})


def test_from_dict_rejects_duplicate_sites():
    entry = {"n": 0, "re": [[1.0]], "im": [[0.0]]}
    with pytest.raises(ValidationError):
        Potential.from_dict({"L": 1, "entries": [entry, entry]})


def test_save_load_round_trip_exact(tmp_path):
    pot = random_potential(9, dim=3, lo=-2, hi=2)
    path = tmp_path / "pot.json"
    save_potential(pot, path)
    back = load_potential(path)
    assert back.fingerprint() == pot.fingerprint()
    # The file is plain JSON with the documented keys.
    data = json.loads(path.read_text())
    assert data["L"] == 3
    assert [e["n"] for e in data["entries"]] == [-2, -1, 0, 1, 2]


matrix_entries = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
@settings(max_examples=25, deadline=None)
def test_save_load_round_trip_random(tmp_path_factory, seed, dim):
    pot = random_potential(seed, dim=dim, lo=-1, hi=1, scale=3.0)
    path = tmp_path_factory.mktemp("pots") / "v.json"
    save_potential(pot, path)
    assert load_potential(path).fingerprint() == pot.fingerprint()


def test_load_rejects_malformed_file(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    with pytest.raises(ValidationError):
        load_potential(path)
    with pytest.raises(ValidationError):
        load_potential(tmp_path / "missing.json")


def test_potential_norms():
    v = np.array([[2.0]], dtype=complex)
    pot = Potential(1, (-1, 4), np.array([v, -v]))
    assert potential_norm(pot) == pytest.approx(4.0)  # sum of spectral norms
    assert potential_norm(pot, "inf") == pytest.approx(2.0)
    # rho-weighted sum: (1+1)^1 * 2 + (4+1)^1 * 2.
    assert potential_norm(pot, "rho", rho=1.0) == pytest.approx(14.0)
    d = decay_norms(pot, rho=1.0)
    assert (d.norm0, d.norm_rho, d.norm_inf) == pytest.approx((4.0, 14.0, 2.0))
    with pytest.raises(ValidationError):
        potential_norm(pot, "median")


def test_default_window_pads_support():
    pot = random_potential(4, dim=1, lo=-2, hi=5)
    assert pot.default_window() == (-52, 55)
    assert pot.default_window(pad=3) == (-5, 8)
