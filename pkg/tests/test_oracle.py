"""Dense finite-section reference solver.

Everything here is an independent check target for the fast analytic paths,
so the expectations are closed forms worked out by hand or classical special
function values, never outputs of the code under test.
"""

import math

import numpy as np
import pytest
from scipy.special import jv

from jacobi_scatter import (
    NumericalError,
    Potential,
    oracle_point_spectrum,
    oracle_propagator,
    oracle_resolvent,
    truncated_operator,
)

from conftest import random_potential


def test_free_resolvent_diagonal_value():
    # For V = 0 the whole-line kernel at E = 3 is z^{|s-r|+1} / (z - 1/z) with
    # z = (3 - sqrt(5)) / 2, so the diagonal entry is -1/sqrt(5).
    res = oracle_resolvent(Potential.zero(1), 3.0, 200)
    assert res.block(0, 0)[0, 0] == pytest.approx(-0.4472135954999579, abs=1e-8)


def test_free_resolvent_offdiagonal_decay():
    res = oracle_resolvent(Potential.zero(1), 3.0, 200)
    z = (3.0 - math.sqrt(5.0)) / 2.0
    for d in (1, 2, 5):
        expected = -z**d / math.sqrt(5.0)
        assert res.block(0, d)[0, 0] == pytest.approx(expected, abs=1e-8)


def test_resolvent_solves_equation():
    pot = random_potential(5, dim=2, lo=-2, hi=2)
    op = truncated_operator(pot, 60)
    E = 2.5 + 0.5j
    dense = op.resolvent(E)
    residual = (op.matrix - E * np.eye(op.size)) @ dense - np.eye(op.size)
    assert np.max(np.abs(residual)) < 1e-10


def test_resolvent_refuses_near_eigenvalue():
    # V(0) = 5 on L = 1 creates a bound state; u(n) = z^{|n|} with
    # z + 1/z + 5 z^0-matching gives z^2 + 5 z - 1 = 0 at the eigenvalue,
    # i.e. E = sqrt(29).  Asking for the resolvent right there must fail.
    pot = Potential(1, (0,), np.array([[[5.0]]], dtype=complex))
    op = truncated_operator(pot, 150)
    with pytest.raises(NumericalError):
        op.resolvent(math.sqrt(29.0))


def test_free_propagator_is_bessel():
    # e^{-itH_0}(s, r) = (-i)^{|s-r|} J_{|s-r|}(2t); at s = r, t = 1 this is
    # J_0(2) = 0.2238907791412357.
    prop = oracle_propagator(Potential.zero(1), 1.0, 300)
    assert prop.block(0, 0)[0, 0] == pytest.approx(0.2238907791412357, abs=1e-8)
    val = prop.block(0, 3)[0, 0]
    assert val == pytest.approx((-1j) ** 3 * jv(3, 2.0), abs=1e-8)


def test_propagator_restricted_to_band():
    # With a bound state present the band-restricted propagator at t = 0 is
    # the band projector, not the identity.
    pot = Potential(1, (0,), np.array([[[5.0]]], dtype=complex))
    op = truncated_operator(pot, 80)
    p = op.propagator(0.0)
    np.testing.assert_allclose(p, op.band_projector(), atol=1e-12)
    assert abs(op.block(p, 0, 0)[0, 0] - 1.0) > 1e-3


def test_point_spectrum_single_site_closed_form():
    # For L = 1 and V = v δ_0 the bound state is u(n) = z^{|n|}, |z| < 1, with
    # E = z + 1/z and the site-0 equation giving z^2 + v z - 1 = 0.  For v = 5
    # that makes E = sqrt(v^2 + 4) = sqrt(29); for v = -10, E = -sqrt(104).
    pot = Potential(1, (0,), np.array([[[5.0]]], dtype=complex))
    rep = oracle_point_spectrum(pot, 150)
    assert rep.stable
    assert len(rep.eigenvalues) == 1
    assert rep.eigenvalues[0] == pytest.approx(math.sqrt(29.0), abs=1e-8)

    deep = Potential(1, (0,), np.array([[[-10.0]]], dtype=complex))
    rep2 = oracle_point_spectrum(deep, 150)
    assert rep2.stable
    assert rep2.eigenvalues[0] == pytest.approx(-math.sqrt(104.0), abs=1e-8)


def test_point_spectrum_free_is_empty():
    rep = oracle_point_spectrum(Potential.zero(2), 100)
    assert rep.stable
    assert rep.eigenvalues == ()


def test_block_indexing_matches_sites():
    pot = random_potential(3, dim=2, lo=0, hi=1)
    op = truncated_operator(pot, 30)
    # On-diagonal blocks of H are the potential; off-diagonal neighbors are I.
    np.testing.assert_allclose(op.block(op.matrix, 0, 0), pot.value(0), atol=1e-15)
    np.testing.assert_allclose(op.block(op.matrix, 4, 5), np.eye(2), atol=1e-15)
    np.testing.assert_allclose(op.block(op.matrix, 4, 6), np.zeros((2, 2)), atol=1e-15)


def test_window_stability_of_resolvent():
    # Doubling the truncation changes an interior block of the resolvent at a
    # complex energy by far less than the acceptance tolerances.
    pot = random_potential(8, dim=2, lo=-2, hi=2)
    E = 2.5 + 0.5j
    a = oracle_resolvent(pot, E, 100).block(1, -1)
    b = oracle_resolvent(pot, E, 200).block(1, -1)
    assert np.max(np.abs(a - b)) < 1e-10
