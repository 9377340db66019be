"""Resolvent kernels, boundary values, weighted norms and Hölder diagnostics.

Off the band, with z the interior disk parameter of E, the kernel is

    s >= r:  -i jplus(z)(s)  W(jminus(conj z), jplus(z))^{-1}  jminus(conj z)(r)*
    s <  r:  +i jminus(z)(s) W(jplus(conj z), jminus(z))^{-1}  jplus(conj z)(r)*

with the Wronskian evaluated one site past the support.  On the band the
same expressions at z = r_plus(E) (or its conjugate for the lower side) give
the boundary values; they coincide algebraically with the transmission form
z^{s-r} (z - 1/z)^{-1} utilde_+(s) T_+ utilde_-(r)* used in the spectral
density, since W^{-1} = nu T_+ and the tilde factors cancel the powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import zeta

from .algebra import MatrixSeq, SpectralPoint, inverse_zhukovsky, mat_norm
from .errors import NumericalError, ValidationError
from .jost import BAND_EDGE_EXCLUSION, _volterra_stack
from .oracle import truncated_operator
from .potential import Potential

__all__ = [
    "HolderPair",
    "HolderReport",
    "KernelEntry",
    "WeightedResolventReport",
    "green_boundary",
    "green_kernel",
    "holder_diagnostic",
    "kernel_column",
    "kernel_difference_residual",
    "weighted_resolvent_norm",
    "weighted_resolvent_report",
]

#: Real energies this close to a truncated-operator eigenvalue are rejected.
EIGENVALUE_PRESCREEN = 1e-6

#: Truncation half-width used for the eigenvalue pre-screen.
PRESCREEN_HALF_WIDTH = 150


@dataclass(frozen=True)
class KernelEntry:
    """One matrix element of the resolvent kernel."""

    s: int
    r: int
    value: np.ndarray
    point: SpectralPoint
    side: str  # off_spectrum, plus_boundary, minus_boundary


class _KernelEngine:
    """Shared machinery: Jost stacks plus inverted Wronskians at one z.

    Valid both off the band (|z| < 1) and on it (|z| = 1); `entry` evaluates
    single kernel elements and `table` assembles dense (s, r) blocks.
    """

    def __init__(self, pot: Potential, z: complex, lo: int, hi: int):
        lo = min(lo, pot.min_support - 2)
        hi = max(hi, pot.max_support + 2)
        zarr = np.array([z], dtype=complex)
        self.pot = pot
        self.z = complex(z)
        self.lo = lo
        self.up = _volterra_stack(pot, zarr, "plus", lo, hi)[0]
        self.um = _volterra_stack(pot, zarr, "minus", lo, hi)[0]
        self.upc = _volterra_stack(pot, np.conj(zarr), "plus", lo, hi)[0]
        self.umc = _volterra_stack(pot, np.conj(zarr), "minus", lo, hi)[0]
        i_star = pot.max_support + 1 - lo
        w_plus = 1j * (
            self.umc[i_star + 1].conj().T @ self.up[i_star]
            - self.umc[i_star].conj().T @ self.up[i_star + 1]
        )
        w_minus = 1j * (
            self.upc[i_star + 1].conj().T @ self.um[i_star]
            - self.upc[i_star].conj().T @ self.um[i_star + 1]
        )
        self.w_plus_inv = self._invert(w_plus, "W(jminus(conj z), jplus(z))")
        self.w_minus_inv = self._invert(w_minus, "W(jplus(conj z), jminus(z))")

    def _invert(self, w: np.ndarray, name: str) -> np.ndarray:
        sv = np.linalg.svd(w, compute_uv=False)
        if sv[-1] == 0.0 or sv[0] / sv[-1] > 1e12:
            raise NumericalError(
                f"{name} is numerically singular at z = {self.z} "
                f"(E = {self.z + 1.0 / self.z}): eigenvalue or resonance proximity"
            )
        return np.linalg.inv(w)

    def entry(self, s: int, r: int) -> np.ndarray:
        i, j = s - self.lo, r - self.lo
        if s >= r:
            return -1j * (self.up[i] @ self.w_plus_inv @ self.umc[j].conj().T)
        return 1j * (self.um[i] @ self.w_minus_inv @ self.upc[j].conj().T)

    def table(self, s_sites: np.ndarray, r_sites: np.ndarray) -> np.ndarray:
        """Dense kernel blocks, shape (len(s_sites), len(r_sites), L, L)."""
        si = s_sites - self.lo
        ri = r_sites - self.lo
        a_plus = -1j * np.matmul(self.up[si], self.w_plus_inv)
        b_plus = np.conj(np.transpose(self.umc[ri], (0, 2, 1)))
        a_minus = 1j * np.matmul(self.um[si], self.w_minus_inv)
        b_minus = np.conj(np.transpose(self.upc[ri], (0, 2, 1)))
        upper = np.einsum("aij,bjk->abik", a_plus, b_plus)
        lower = np.einsum("aij,bjk->abik", a_minus, b_minus)
        mask = (s_sites[:, None] >= r_sites[None, :])[:, :, None, None]
        return np.where(mask, upper, lower)


def _engine_for(pot: Potential, E, side, s_lo, s_hi, exclusion=BAND_EDGE_EXCLUSION):
    """Build a kernel engine for E off the band (side None) or on it."""
    if side is None:
        E = complex(E)
        if abs(E.imag) < 1e-12 and -2.0 <= E.real <= 2.0:
            raise ValidationError(
                f"E = {E} lies in the essential band [-2, 2]; "
                "use green_boundary for boundary values"
            )
        point = inverse_zhukovsky(E)
        if abs(E.imag) < EIGENVALUE_PRESCREEN:
            op = truncated_operator(pot, PRESCREEN_HALF_WIDTH)
            dist = op.eigenvalue_distance(E)
            if dist < EIGENVALUE_PRESCREEN:
                raise NumericalError(
                    f"E = {E} is within {dist:.3e} of a truncated-operator "
                    "eigenvalue (point-spectrum proximity)"
                )
        return _KernelEngine(pot, point.z, s_lo, s_hi), point, "off_spectrum"
    if side not in ("plus", "minus"):
        raise ValidationError(f"side must be 'plus' or 'minus', got {side!r}")
    Ec = complex(E)
    if abs(Ec.imag) > 1e-12:
        raise ValidationError(f"boundary energies must be real, got {Ec}")
    E = Ec.real
    if not -2.0 < E < 2.0:
        raise ValidationError(f"boundary values require E in (-2, 2), got {E}")
    point = inverse_zhukovsky(E, branch=side)
    z = point.z
    if abs(z - 1.0) < exclusion or abs(z + 1.0) < exclusion:
        raise ValidationError(
            f"E = {E} maps to z = {z} inside the band-edge exclusion arc"
        )
    return _KernelEngine(pot, z, s_lo, s_hi), point, f"{side}_boundary"


def green_kernel(pot: Potential, E: complex, s: int, r: int) -> np.ndarray:
    """Resolvent kernel element [R(E)]_{s,r} for E off the band.

    Real E is pre-screened against the truncated-operator spectrum: within
    1e-6 of an eigenvalue the evaluation is refused rather than returned
    inaccurately.
    """
    lo, hi = min(s, r), max(s, r)
    engine, _, _ = _engine_for(pot, E, None, lo, hi)
    return engine.entry(s, r)


def green_boundary(
    pot: Potential,
    E: float,
    side: str,
    s: int,
    r: int,
    exclusion: float = BAND_EDGE_EXCLUSION,
) -> np.ndarray:
    """Boundary value [R(E + i0)]_{s,r} (side plus) or [R(E - i0)]_{s,r}.

    Evaluated at z = r_plus(E) (or its conjugate) through the transmission
    form; equals the monotone limit of green_kernel(E + i eps) as eps -> 0.
    """
    lo, hi = min(s, r), max(s, r)
    engine, _, _ = _engine_for(pot, E, side, lo, hi, exclusion)
    return engine.entry(s, r)


def kernel_entry(pot: Potential, E, side, s: int, r: int) -> KernelEntry:
    """Kernel element bundled with its spectral point and side tag."""
    lo, hi = min(s, r), max(s, r)
    engine, point, tag = _engine_for(pot, E, side, lo, hi)
    return KernelEntry(s=s, r=r, value=engine.entry(s, r), point=point, side=tag)


def kernel_column(pot: Potential, E, r: int, window: tuple, side=None) -> MatrixSeq:
    """The column s -> [R(E)]_{s,r} over a window, as a MatrixSeq."""
    lo, hi = int(window[0]), int(window[1])
    engine, _, _ = _engine_for(pot, E, side, min(lo, r), max(hi, r))
    vals = engine.table(np.arange(lo, hi + 1), np.array([r]))[:, 0]
    return MatrixSeq(lo, vals)


def kernel_difference_residual(
    pot: Potential, E, r: int, window: tuple, side=None
) -> float:
    """Max residual of the kernel difference equation over interior sites.

    Checks [R]_{s+1,r} + [R]_{s-1,r} + (V(s) - E) [R]_{s,r} = delta_{s,r} I;
    the source column r should lie strictly inside the window.
    """
    col = kernel_column(pot, E, r, window, side)
    E = complex(E)
    ident = np.eye(pot.dim)
    worst = 0.0
    for n in range(col.lo + 1, col.hi):
        res = (
            col.value(n + 1)
            + col.value(n - 1)
            + (pot.value(n) - E * ident) @ col.value(n)
        )
        if n == r:
            res = res - ident
        worst = max(worst, float(mat_norm(res)))
    return worst


def _weighted_dense(pot: Potential, E, side, alpha: float, half_window: int):
    """Weighted kernel matrix [(1+|s|)^-a [R]_{s,r} (1+|r|)^-a] and its sup entry."""
    sites = np.arange(-half_window, half_window + 1)
    engine, _, _ = _engine_for(pot, E, side, -half_window, half_window)
    blocks = engine.table(sites, sites)
    sup_entry = float(np.max(mat_norm(blocks)))
    weights = (1.0 + np.abs(sites)) ** (-alpha)
    blocks = blocks * weights[:, None, None, None] * weights[None, :, None, None]
    n_sites = sites.size
    L = pot.dim
    dense = np.transpose(blocks, (0, 2, 1, 3)).reshape(n_sites * L, n_sites * L)
    return dense, sup_entry


@dataclass(frozen=True)
class WeightedResolventReport:
    """Weighted resolvent norm with its theoretical ceiling.

    `bound` is C(alpha) times the largest kernel-entry norm, where
    C(alpha) = sum_r (1+|r|)^{-2 alpha} over all of Z; `tail_weight` is the
    part of C(alpha) missed by the finite window (an error indicator).
    """

    value: float
    sup_entry: float
    constant: float
    bound: float
    tail_weight: float
    alpha: float
    half_window: int


def weighted_resolvent_norm(
    pot: Potential, E, alpha: float, half_window: int, side=None
) -> float:
    """Operator norm of the weighted resolvent on sites [-N, N].

    Monotone non-decreasing in the window half-width N.  `side` None means E
    off the band; "plus"/"minus" evaluate boundary kernels at real E.
    """
    return weighted_resolvent_report(pot, E, alpha, half_window, side).value


def weighted_resolvent_report(
    pot: Potential, E, alpha: float, half_window: int, side=None
) -> WeightedResolventReport:
    """Weighted norm plus the bound C(alpha) sup_{s,r} ||[R]_{s,r}||."""
    if alpha <= 0.5:
        raise ValidationError(f"weight exponent alpha must exceed 1/2, got {alpha}")
    if half_window < 1:
        raise ValidationError(f"window half-width must be >= 1, got {half_window}")
    dense, sup_entry = _weighted_dense(pot, E, side, alpha, half_window)
    constant = float(2.0 * zeta(2.0 * alpha) - 1.0)
    tail = float(2.0 * zeta(2.0 * alpha, half_window + 2))
    return WeightedResolventReport(
        value=float(np.linalg.norm(dense, 2)),
        sup_entry=sup_entry,
        constant=constant,
        bound=constant * sup_entry,
        tail_weight=tail,
        alpha=alpha,
        half_window=half_window,
    )


@dataclass(frozen=True)
class HolderPair:
    """One energy pair of the Hölder scan."""

    E: float
    E0: float
    diff_norm: float
    delta_pow: float
    ratio: float


@dataclass(frozen=True)
class HolderReport:
    """Empirical Hölder data for weighted boundary resolvents.

    `pairs` holds the per-pair differences, the distance
    |r(E) - r(E0)|^{min(rho, 1)} and their ratio; `fitted_exponent` is the
    log-log slope over pair separations in [1e-4, 1e-1].
    """

    alpha: float
    rho: float
    side: str
    pairs: tuple
    max_ratio: float
    fitted_exponent: float


def holder_diagnostic(
    pot: Potential,
    energies,
    alpha: float,
    rho: float,
    half_window: int,
    side: str = "plus",
) -> HolderReport:
    """Hölder continuity scan of the weighted boundary resolvent.

    The metric between energies is the disk distance |r(E) - r(E0)|, and the
    reference exponent is min(rho, 1).  Requires alpha > rho + 1/2.
    """
    if rho < 0:
        raise ValidationError(f"rho must be >= 0, got {rho}")
    if not alpha > rho + 0.5:
        raise ValidationError(
            f"alpha must exceed rho + 1/2 (got alpha = {alpha}, rho = {rho})"
        )
    energies = [float(e) for e in energies]
    if len(energies) < 2:
        raise ValidationError("need at least two energies")
    dense = {}
    roots = {}
    for e in energies:
        dense[e], _ = _weighted_dense(pot, e, side, alpha, half_window)
        roots[e] = inverse_zhukovsky(e, branch=side).z
    exponent = min(rho, 1.0)
    pairs = []
    fit_x, fit_y = [], []
    for i, e in enumerate(energies):
        for e0 in energies[i + 1 :]:
            delta = abs(roots[e] - roots[e0])
            if delta == 0.0:
                continue
            diff = float(np.linalg.norm(dense[e] - dense[e0], 2))
            delta_pow = delta**exponent
            pairs.append(
                HolderPair(
                    E=e,
                    E0=e0,
                    diff_norm=diff,
                    delta_pow=delta_pow,
                    ratio=diff / delta_pow,
                )
            )
            if 1e-4 <= delta <= 1e-1 and diff > 0.0:
                fit_x.append(math.log(delta))
                fit_y.append(math.log(diff))
    if not pairs:
        raise ValidationError("all supplied energies coincide")
    if len(fit_x) >= 2:
        slope = float(np.polyfit(np.array(fit_x), np.array(fit_y), 1)[0])
    else:
        slope = float("nan")
    return HolderReport(
        alpha=alpha,
        rho=rho,
        side=side,
        pairs=tuple(pairs),
        max_ratio=max(p.ratio for p in pairs),
        fitted_exponent=slope,
    )
