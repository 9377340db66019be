"""Wronskians, scattering matrices and the genericity scan.

For a circle parameter z (|z| = 1, z away from +-1) the four Jost families
are jplus(z), jplus(conj z), jminus(z), jminus(conj z), where jplus(w) is
asymptotic to w^n I at +infinity and jminus(w) to w^{-n} I at -infinity.  In
the two-sided superscript convention, jminus(conj z) carries the superscript
z and jminus(z) the superscript z^{-1}; the matching matrices are

    M_+ =  nu W(jminus(conj z), jplus(z)),   N_+ = -nu W(jminus(z), jplus(z)),
    M_- = -nu W(jplus(conj z), jminus(z)),   N_- =  nu W(jplus(z), jminus(z)),

with nu = i / (z - 1/z), and T = M^{-1}, R = -N M^{-1}.  The Wronskian is
evaluated one site past the support, where at least one factor is exactly
free, and is constant in n for exact solutions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .algebra import MatrixSeq, SpectralPoint, mat_norm
from .errors import NumericalError, ValidationError
from .jost import BAND_EDGE_EXCLUSION, JostSolution, _volterra_stack
from .potential import Potential

__all__ = [
    "CircleScattering",
    "GenericityReport",
    "ScatteringData",
    "circle_scattering",
    "is_generic",
    "scattering_matrices",
    "scattering_relation_residual",
    "wronskian",
    "wronskian_constancy_check",
]

COND_LIMIT = 1e12
DET_FLOOR = 1e-8


def _seq_of(u) -> MatrixSeq:
    if isinstance(u, JostSolution):
        return u.values
    if isinstance(u, MatrixSeq):
        return u
    raise ValidationError(f"expected MatrixSeq or JostSolution, got {type(u).__name__}")


def wronskian(u, v, n: int) -> np.ndarray:
    """The discrete Wronskian i (u(n+1)* v(n) - u(n)* v(n+1)).

    `u` and `v` may be MatrixSeq or JostSolution; both windows must contain
    n and n+1.  Stars are conjugate transposes.
    """
    us, vs = _seq_of(u), _seq_of(v)
    for seq in (us, vs):
        if n < seq.lo or n + 1 > seq.hi:
            raise ValidationError(
                f"sites {n}, {n + 1} not inside window [{seq.lo}, {seq.hi}]"
            )
    return 1j * (
        us.value(n + 1).conj().T @ vs.value(n)
        - us.value(n).conj().T @ vs.value(n + 1)
    )


def wronskian_constancy_check(u, v, E: complex) -> float:
    """Max deviation of W(u, v)(n) from its value at the left end.

    For u solving tau u = E u and v solving tau v = conj(E) v the Wronskian
    is independent of n, so the deviation measures solution quality.  E is
    part of the contract but does not enter the scan itself.
    """
    us, vs = _seq_of(u), _seq_of(v)
    lo = max(us.lo, vs.lo)
    hi = min(us.hi, vs.hi)
    if hi - lo < 1:
        raise ValidationError("windows overlap in fewer than two sites")
    base = wronskian(u, v, lo)
    worst = 0.0
    for n in range(lo + 1, hi):
        worst = max(worst, float(mat_norm(wronskian(u, v, n) - base)))
    return worst


@dataclass(frozen=True)
class ScatteringData:
    """Matching and scattering matrices at one circle point."""

    point: SpectralPoint
    nu: complex
    Mplus: np.ndarray
    Nplus: np.ndarray
    Mminus: np.ndarray
    Nminus: np.ndarray
    Tplus: np.ndarray
    Tminus: np.ndarray
    Rplus: np.ndarray
    Rminus: np.ndarray


@dataclass(frozen=True)
class CircleScattering:
    """Vectorized scattering data over a stack of circle points.

    Arrays are stacked along axis 0 in the order of `zs`; the Jost stacks
    cover the window [lo, hi] = [min support - 2, max support + 2].
    """

    zs: np.ndarray
    lo: int
    nu: np.ndarray
    jplus: np.ndarray
    jminus: np.ndarray
    jplus_conj: np.ndarray
    jminus_conj: np.ndarray
    Mplus: np.ndarray
    Nplus: np.ndarray
    Mminus: np.ndarray
    Nminus: np.ndarray
    Tplus: np.ndarray
    Tminus: np.ndarray
    Rplus: np.ndarray
    Rminus: np.ndarray
    det_wplus: np.ndarray
    det_wminus: np.ndarray

    @property
    def hi(self) -> int:
        return self.lo + self.jplus.shape[1] - 1

    def at(self, i: int) -> ScatteringData:
        point = SpectralPoint(complex(self.zs[i]))
        return ScatteringData(
            point=point,
            nu=complex(self.nu[i]),
            Mplus=self.Mplus[i],
            Nplus=self.Nplus[i],
            Mminus=self.Mminus[i],
            Nminus=self.Nminus[i],
            Tplus=self.Tplus[i],
            Tminus=self.Tminus[i],
            Rplus=self.Rplus[i],
            Rminus=self.Rminus[i],
        )


def _stack_wronskian(a: np.ndarray, b: np.ndarray, i: int) -> np.ndarray:
    """Wronskian at window index i for stacks of shape (Nz, W, L, L)."""
    return 1j * (
        np.matmul(np.conj(np.transpose(a[:, i + 1], (0, 2, 1))), b[:, i])
        - np.matmul(np.conj(np.transpose(a[:, i], (0, 2, 1))), b[:, i + 1])
    )


def _stack_inverse(m: np.ndarray, zs: np.ndarray, name: str) -> np.ndarray:
    sv = np.linalg.svd(m, compute_uv=False)
    with np.errstate(divide="ignore"):
        cond = sv[:, 0] / sv[:, -1]
    bad = ~np.isfinite(cond) | (cond > COND_LIMIT)
    if np.any(bad):
        i = int(np.argmax(np.where(bad, cond, -np.inf)))
        raise NumericalError(
            f"{name} is numerically singular at z = {zs[i]} "
            f"(condition number {cond[i]:.3e})"
        )
    return np.linalg.inv(m)


def _validated_circle(zs, exclusion: float) -> np.ndarray:
    zs = np.asarray(zs, dtype=complex).ravel()
    if zs.size == 0:
        raise ValidationError("empty circle grid")
    if np.any(np.abs(np.abs(zs) - 1.0) > 1e-12):
        raise ValidationError("circle evaluation requires |z| = 1 points")
    if np.any(zs == 1.0) or np.any(zs == -1.0):
        raise ValidationError("band-edge parameter z = +-1 is excluded")
    if exclusion > 0.0:
        near = (np.abs(zs - 1.0) < exclusion) | (np.abs(zs + 1.0) < exclusion)
        if np.any(near):
            i = int(np.argmax(near))
            raise ValidationError(
                f"z = {zs[i]} lies inside the band-edge exclusion arc "
                f"(radius {exclusion})"
            )
    return zs


def _jost_wronskians(pot: Potential, zs: np.ndarray, window: tuple | None = None):
    """Jost stacks and the two matching Wronskians for circle points.

    Returns (lo, up, um, upc, umc, w_plus, w_minus) where w_plus is
    W(jminus(conj z), jplus(z)) and w_minus is W(jplus(conj z), jminus(z)),
    both evaluated one site past the support.  The stack window defaults to
    the support padded by two sites and can only be widened.
    """
    lo = pot.min_support - 2
    hi = pot.max_support + 2
    if window is not None:
        lo = min(lo, int(window[0]))
        hi = max(hi, int(window[1]))
    up = _volterra_stack(pot, zs, "plus", lo, hi)
    um = _volterra_stack(pot, zs, "minus", lo, hi)
    upc = _volterra_stack(pot, np.conj(zs), "plus", lo, hi)
    umc = _volterra_stack(pot, np.conj(zs), "minus", lo, hi)
    i_star = pot.max_support + 1 - lo
    w_plus = _stack_wronskian(umc, up, i_star)
    w_minus = _stack_wronskian(upc, um, i_star)
    return lo, up, um, upc, umc, w_plus, w_minus


def circle_scattering(
    pot: Potential, zs, exclusion: float = 0.0, window: tuple | None = None
) -> CircleScattering:
    """Scattering data at a stack of circle points, by direct Jost solves.

    `exclusion` rejects points within that chord distance of +-1; internal
    sweeps pass 0 and rely on the conditioning guard instead.  `window`
    widens the Jost stacks beyond the default support-plus-two sites.
    """
    zs = _validated_circle(zs, exclusion)
    lo, up, um, upc, umc, w_plus, w_minus = _jost_wronskians(pot, zs, window)
    i_star = pot.max_support + 1 - lo
    nu = 1j / (zs - 1.0 / zs)
    nu3 = nu[:, None, None]
    mplus = nu3 * w_plus
    nplus = -nu3 * _stack_wronskian(um, up, i_star)
    mminus = -nu3 * w_minus
    nminus = nu3 * _stack_wronskian(up, um, i_star)
    tplus = _stack_inverse(mplus, zs, "M_plus")
    tminus = _stack_inverse(mminus, zs, "M_minus")
    return CircleScattering(
        zs=zs,
        lo=lo,
        nu=nu,
        jplus=up,
        jminus=um,
        jplus_conj=upc,
        jminus_conj=umc,
        Mplus=mplus,
        Nplus=nplus,
        Mminus=mminus,
        Nminus=nminus,
        Tplus=tplus,
        Tminus=tminus,
        Rplus=-np.matmul(nplus, tplus),
        Rminus=-np.matmul(nminus, tminus),
        det_wplus=np.linalg.det(w_plus),
        det_wminus=np.linalg.det(w_minus),
    )


def scattering_matrices(
    pot: Potential,
    point: SpectralPoint,
    exclusion: float = BAND_EDGE_EXCLUSION,
) -> ScatteringData:
    """All matching/scattering matrices at one circle point.

    Raises
    ------
    ValidationError
        If the point is off the circle or inside a band-edge exclusion arc.
    NumericalError
        If a matching matrix is singular beyond condition number 1e12.
    """
    if not point.on_circle:
        raise ValidationError(
            f"scattering matrices require |z| = 1, got |z| = {abs(point.z)}"
        )
    sweep = circle_scattering(pot, np.array([point.z]), exclusion=exclusion)
    data = sweep.at(0)
    return ScatteringData(
        point=point,
        nu=data.nu,
        Mplus=data.Mplus,
        Nplus=data.Nplus,
        Mminus=data.Mminus,
        Nminus=data.Nminus,
        Tplus=data.Tplus,
        Tminus=data.Tminus,
        Rplus=data.Rplus,
        Rminus=data.Rminus,
    )


def scattering_relation_residual(
    pot: Potential, data: ScatteringData, window: tuple | None = None
) -> float:
    """Max residual of the defining transmission relations over a window.

    Checks u_+ T_+ = jminus(conj z) - jminus(z) R_+ and the mirrored
    u_- T_- = jplus(conj z) - jplus(z) R_- at every site.
    """
    if window is None:
        window = (pot.min_support - 10, pot.max_support + 10)
    lo, hi = int(window[0]), int(window[1])
    lo = min(lo, pot.min_support - 1)
    hi = max(hi, pot.max_support + 1)
    z = data.point.z
    zarr = np.array([z])
    up = _volterra_stack(pot, zarr, "plus", lo, hi)[0]
    um = _volterra_stack(pot, zarr, "minus", lo, hi)[0]
    upc = _volterra_stack(pot, np.conj(zarr), "plus", lo, hi)[0]
    umc = _volterra_stack(pot, np.conj(zarr), "minus", lo, hi)[0]
    res_plus = np.matmul(up, data.Tplus) - (umc - np.matmul(um, data.Rplus))
    res_minus = np.matmul(um, data.Tminus) - (upc - np.matmul(up, data.Rminus))
    worst_plus = float(np.max(mat_norm(res_plus)))
    worst_minus = float(np.max(mat_norm(res_minus)))
    return max(worst_plus, worst_minus)


class GenericityReport(NamedTuple):
    """Result of the circle-wide Wronskian invertibility scan."""

    generic: bool
    min_det: float
    argmin_z: complex


def _genericity_grid(circle_grid_size: int, exclusion: float) -> np.ndarray:
    angles = -np.pi + 2.0 * np.pi * (np.arange(circle_grid_size) + 0.5) / circle_grid_size
    zs = np.exp(-1j * angles)
    keep = (np.abs(zs - 1.0) >= exclusion) & (np.abs(zs + 1.0) >= exclusion)
    zs = zs[keep]
    # approach the band edges geometrically, stopping at the exclusion arcs
    extra = []
    dist = 0.2
    while dist >= exclusion:
        for sign in (1.0, -1.0):
            for orientation in (1.0, -1.0):
                extra.append(sign * np.exp(-1j * orientation * dist))
        dist *= 0.5
    return np.concatenate([zs, np.array(extra, dtype=complex)])


def is_generic(
    pot: Potential,
    circle_grid_size: int = 256,
    exclusion: float = BAND_EDGE_EXCLUSION,
    threshold: float = DET_FLOOR,
) -> GenericityReport:
    """Scan the circle for Wronskian degeneracy.

    Returns (generic, min |det W|, argmin z) where the minimum runs over both
    Wronskian families on a uniform circle grid (band-edge arcs excluded)
    augmented with points approaching the edges.
    """
    if circle_grid_size < 8:
        raise ValidationError("circle grid must have at least 8 points")
    zs = _genericity_grid(circle_grid_size, exclusion)
    _, _, _, _, _, w_plus, w_minus = _jost_wronskians(pot, zs)
    dets = np.concatenate(
        [np.abs(np.linalg.det(w_plus)), np.abs(np.linalg.det(w_minus))]
    )
    zz = np.concatenate([zs, zs])
    i = int(np.argmin(dets))
    return GenericityReport(
        generic=bool(dets[i] > threshold),
        min_det=float(dets[i]),
        argmin_z=complex(zz[i]),
    )
