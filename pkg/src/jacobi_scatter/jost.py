"""Jost solutions by two independent routes, plus the Cauchy propagator.

Route one solves the one-sided summation equations exactly by backward (or
forward) substitution: with S^z the scalar kernel below,

    u_+(n) = z^n I - sum_{j > n} S^z(j - n) V(j) u_+(j),
    u_-(n) = z^{-n} I - sum_{j < n} S^z(n - j) V(j) u_-(j),

where u_+ is asymptotic to z^n I at +infinity and u_- to z^{-n} I at
-infinity.  For finitely supported V each value depends only on already-known
values, so no iteration or tolerance is involved.

Route two builds the coefficient tables B_m(n) of the free-normalized
expansion u_+(n) = z^n (I + sum_m B_m(n) z^m); for finitely supported V the
series is exactly a polynomial, with degree bound derived from the vanishing
pattern of the B_m.  Agreement of the two routes is a primary cross-check.

Throughout, `z` is the disk parameter with E = z + 1/z; the minus-direction
solution at disk parameter z is the one indexed by z^{-1} in the usual
two-sided convention, so that both directions decay (or oscillate) with the
same |z| < 1 (or |z| = 1).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import MatrixSeq, SpectralPoint, as_cmatrix, eye, mat_norm
from .errors import ValidationError
from .potential import Potential

__all__ = [
    "JostSolution",
    "TransmutationTable",
    "difference_residual",
    "jost_series",
    "jost_volterra",
    "s_kernel",
    "solve_cauchy",
    "transfer_matrix",
]

#: Circle evaluations are rejected inside open arcs of this radius around +-1.
BAND_EDGE_EXCLUSION = 1e-3

#: Switch s_kernel to the summation form when |z^2 - 1| falls below this.
_S_KERNEL_SWITCH = 1e-6


def transfer_matrix(pot: Potential, E: complex, n: int) -> np.ndarray:
    """The one-step transfer matrix [[E - V(n), -I], [I, 0]] (2L x 2L)."""
    L = pot.dim
    out = np.zeros((2 * L, 2 * L), dtype=complex)
    out[:L, :L] = complex(E) * np.eye(L) - pot.value(n)
    out[:L, L:] = -np.eye(L)
    out[L:, :L] = np.eye(L)
    return out


def solve_cauchy(
    pot: Potential,
    E: complex,
    n0: int,
    A0,
    B0,
    window: tuple,
) -> MatrixSeq:
    """Propagate the Cauchy problem u(n0) = A0, u(n0+1) = B0 over a window.

    The second-order difference equation u(n+1) + u(n-1) + (V(n) - E) u(n) = 0
    is stepped with transfer matrices in both directions.  The result is the
    unique solution with the given data.
    """
    lo, hi = int(window[0]), int(window[1])
    if not (lo <= n0 and n0 + 1 <= hi):
        raise ValidationError(f"window [{lo}, {hi}] must contain n0={n0} and n0+1")
    L = pot.dim
    A0 = as_cmatrix(A0, L)
    B0 = as_cmatrix(B0, L)
    E = complex(E)
    vals = np.zeros((hi - lo + 1, L, L), dtype=complex)
    vals[n0 - lo] = A0
    vals[n0 + 1 - lo] = B0
    for n in range(n0 + 1, hi):
        vals[n + 1 - lo] = (E * np.eye(L) - pot.value(n)) @ vals[n - lo] - vals[n - 1 - lo]
    for n in range(n0, lo, -1):
        vals[n - 1 - lo] = (E * np.eye(L) - pot.value(n)) @ vals[n - lo] - vals[n + 1 - lo]
    return MatrixSeq(lo, vals)


def s_kernel(z: complex, n: int) -> complex:
    """The scalar summation kernel S^z(n) = (z^n - z^{-n}) / (z - z^{-1}).

    At z = +-1 the value is the limit (+-1)^{n+1} n.  Near the band edges
    (|z^2 - 1| < 1e-6) the equivalent ordered sum

        S^z(n) = z^{1-n} + z^{3-n} + ... + z^{n-1}

    is used; it is free of cancellation and reproduces the +-1 limits exactly.
    """
    z = complex(z)
    if z == 0:
        raise ValidationError("s_kernel undefined at z = 0")
    n = int(n)
    if n == 0:
        return 0.0 + 0.0j
    if n < 0:
        return -s_kernel(z, -n)
    if abs(z * z - 1.0) < _S_KERNEL_SWITCH:
        return complex(sum(z ** (2 * i + 1 - n) for i in range(n)))
    return (z**n - z**-n) / (z - 1.0 / z)


def _s_values(zs: np.ndarray, n: int) -> np.ndarray:
    """Vectorized s_kernel over an array of z values, fixed n >= 1."""
    zs = np.asarray(zs, dtype=complex)
    near = np.abs(zs * zs - 1.0) < _S_KERNEL_SWITCH
    out = np.empty_like(zs)
    far = ~near
    zf = zs[far]
    out[far] = (zf**n - zf ** (-n)) / (zf - 1.0 / zf)
    if np.any(near):
        zn = zs[near]
        acc = np.zeros_like(zn)
        for i in range(n):
            acc += zn ** (2 * i + 1 - n)
        out[near] = acc
    return out


def _check_circle_point(point: SpectralPoint, exclusion: float) -> None:
    z = point.z
    if z == 1.0 or z == -1.0:
        raise ValidationError(f"band-edge parameter z = {z} is excluded")
    if point.on_circle and (abs(z - 1.0) < exclusion or abs(z + 1.0) < exclusion):
        raise ValidationError(
            f"z = {z} lies inside the band-edge exclusion arc (radius {exclusion})"
        )


def _volterra_stack(
    pot: Potential, zs: np.ndarray, direction: str, lo: int, hi: int
) -> np.ndarray:
    """Jost-solution values for a stack of z parameters.

    Returns an array of shape (len(zs), hi - lo + 1, L, L); row i holds the
    solution for zs[i] on the window [lo, hi].  Exact substitution along one
    direction; sites beyond the support keep their free form.
    """
    zs = np.asarray(zs, dtype=complex).ravel()
    L = pot.dim
    width = hi - lo + 1
    out = np.zeros((zs.size, width, L, L), dtype=complex)
    ident = np.eye(L)
    support = [(n, pot.value(n)) for n in pot.sites]
    s_cache: dict = {}

    def sk(d: int) -> np.ndarray:
        arr = s_cache.get(d)
        if arr is None:
            arr = _s_values(zs, d)
            s_cache[d] = arr
        return arr

    if direction == "plus":
        for n in range(max(lo, pot.max_support), hi + 1):
            out[:, n - lo] = (zs**n)[:, None, None] * ident
        for n in range(min(hi, pot.max_support - 1), lo - 1, -1):
            acc = (zs**n)[:, None, None] * ident
            for j, vj in support:
                if j > n:
                    acc -= sk(j - n)[:, None, None] * np.matmul(vj, out[:, j - lo])
            out[:, n - lo] = acc
    else:
        for n in range(lo, min(hi, pot.min_support) + 1):
            out[:, n - lo] = (zs ** (-n))[:, None, None] * ident
        for n in range(max(lo, pot.min_support + 1), hi + 1):
            acc = (zs ** (-n))[:, None, None] * ident
            for j, vj in support:
                if j < n:
                    acc -= sk(n - j)[:, None, None] * np.matmul(vj, out[:, j - lo])
            out[:, n - lo] = acc
    return out


@dataclass(frozen=True)
class JostSolution:
    """A Jost solution on a finite window.

    For direction "plus" the values are u_+(n) ~ z^n I at the right end; for
    "minus" they are u_-(n) ~ z^{-n} I at the left end.  `tilde(n)` removes
    the free factor, so it equals I identically beyond the potential on the
    normalization side.
    """

    direction: str
    point: SpectralPoint
    values: MatrixSeq

    @property
    def lo(self) -> int:
        return self.values.lo

    @property
    def hi(self) -> int:
        return self.values.hi

    def value(self, n: int) -> np.ndarray:
        return self.values.value(n)

    def tilde(self, n: int) -> np.ndarray:
        """Free-normalized value z^{-n} u(n) (plus) or z^n u(n) (minus)."""
        z = self.point.z
        power = z ** (-n) if self.direction == "plus" else z**n
        return power * self.values.value(n)


def jost_volterra(
    pot: Potential,
    point: SpectralPoint,
    direction: str,
    window: tuple | None = None,
    exclusion: float = BAND_EDGE_EXCLUSION,
) -> JostSolution:
    """Jost solution by exact one-sided substitution.

    Parameters
    ----------
    pot : Potential
    point : SpectralPoint
        Disk parameter; z = +-1 (and circle arcs of radius `exclusion` around
        them) are rejected.
    direction : {"plus", "minus"}
    window : (lo, hi), optional
        Defaults to the support padded by 50 sites; must cover the support.
    """
    if direction not in ("plus", "minus"):
        raise ValidationError(f"direction must be 'plus' or 'minus', got {direction!r}")
    _check_circle_point(point, exclusion)
    if window is None:
        window = pot.default_window()
    lo, hi = int(window[0]), int(window[1])
    if lo > hi:
        raise ValidationError(f"empty window [{lo}, {hi}]")
    if pot.sites and (lo > pot.min_support or hi < pot.max_support):
        raise ValidationError(
            f"window [{lo}, {hi}] does not cover the support "
            f"[{pot.min_support}, {pot.max_support}]"
        )
    stack = _volterra_stack(pot, np.array([point.z]), direction, lo, hi)
    return JostSolution(direction, point, MatrixSeq(lo, stack[0]))


@dataclass(frozen=True)
class TransmutationTable:
    """Coefficients B_m(n) of the free-normalized Jost expansion.

    Attributes
    ----------
    direction : {"plus", "minus"}
    lo : int
        First window site.
    coeffs : ndarray, shape (width, m_cap, L, L)
        B_m(n) at [n - lo, m]; entries at m >= width_at(n) are exactly zero.
    min_support, max_support : int
        Support bounds of the generating potential.
    """

    direction: str
    lo: int
    coeffs: np.ndarray
    min_support: int
    max_support: int

    @property
    def hi(self) -> int:
        return self.lo + self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[2]

    @property
    def m_cap(self) -> int:
        return self.coeffs.shape[1]

    def width_at(self, n: int) -> int:
        """Smallest M with B_m(n) = 0 for all m >= M."""
        if self.direction == "plus":
            return 2 * max(0, self.max_support - n) + 2
        return 2 * max(0, n - self.min_support) + 2

    def coefficient(self, n: int, m: int) -> np.ndarray:
        """B_m(n); zero beyond the stored band (m >= width_at(n))."""
        if not self.lo <= n <= self.hi:
            raise ValidationError(f"site {n} outside table window [{self.lo}, {self.hi}]")
        if m < 0:
            raise ValidationError(f"coefficient index must be >= 0, got {m}")
        if m >= self.m_cap:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.coeffs[n - self.lo, m]

    def poly(self, n: int) -> np.ndarray:
        """Stacked coefficients of I + sum_m B_m(n) z^m, trimmed to width_at(n)."""
        if not self.lo <= n <= self.hi:
            raise ValidationError(f"site {n} outside table window [{self.lo}, {self.hi}]")
        width = min(self.width_at(n), self.m_cap)
        return self.coeffs[n - self.lo, :width].copy()


def _plus_coeff_rows(pot: Potential, lo: int, hi: int) -> np.ndarray:
    """B_m^+(n) rows for n in [lo, hi] by the descending two-term recursion."""
    L = pot.dim
    maxs = pot.max_support if pot.sites else lo
    m_cap = 2 * max(0, maxs - lo) + 2
    width = hi - lo + 1
    rows = np.zeros((width, m_cap, L, L), dtype=complex)
    rows[:, 0] = np.eye(L)
    if not pot.sites or lo >= maxs:
        return rows
    blocks = {n: pot.value(n) for n in pot.sites}
    running = np.zeros((m_cap, L, L), dtype=complex)  # sum_{l > n} V(l) B_m(l)
    prev = np.zeros((m_cap, L, L), dtype=complex)  # B_m(n + 1)
    prev[0] = np.eye(L)
    for n in range(maxs - 1, lo - 1, -1):
        site = n + 1
        if site in blocks:
            running = running + np.matmul(blocks[site], prev)
        cur = np.zeros((m_cap, L, L), dtype=complex)
        cur[0] = np.eye(L)
        cur[1] = -running[0]
        if m_cap > 2:
            cur[2] = -running[1]
        if m_cap > 3:
            cur[3:] = -running[2 : m_cap - 1] + prev[1 : m_cap - 2]
        if n <= hi:
            rows[n - lo] = cur
        prev = cur
    return rows


def transmutation_coeffs(
    pot: Potential, direction: str, window: tuple | None = None
) -> TransmutationTable:
    """Coefficient table B_m(n) over a window, exact and finitely truncated.

    The plus-direction recursion runs downward from the right end of the
    support, where every B_m with m >= 1 vanishes; the minus direction is
    obtained by reflecting the potential, which maps B_m^-(n) to the
    plus-direction coefficient at -n of the reflected potential.
    """
    if direction not in ("plus", "minus"):
        raise ValidationError(f"direction must be 'plus' or 'minus', got {direction!r}")
    if window is None:
        window = pot.default_window()
    lo, hi = int(window[0]), int(window[1])
    if lo > hi:
        raise ValidationError(f"empty window [{lo}, {hi}]")
    if direction == "plus":
        rows = _plus_coeff_rows(pot, lo, hi)
        return TransmutationTable("plus", lo, rows, pot.min_support, pot.max_support)
    reflected = pot.reflected()
    rows = _plus_coeff_rows(reflected, -hi, -lo)[::-1].copy()
    return TransmutationTable("minus", lo, rows, pot.min_support, pot.max_support)


def jost_series(table: TransmutationTable, point: SpectralPoint, n: int) -> np.ndarray:
    """Evaluate the Jost solution from its coefficient table.

    Returns z^n (I + sum_m B_m^+(n) z^m) for a plus table and
    z^{-n} (I + sum_m B_m^-(n) z^m) for a minus table.
    """
    z = point.z
    if z == 0:
        raise ValidationError("jost_series undefined at z = 0")
    poly = table.poly(n)
    powers = z ** np.arange(poly.shape[0])
    inner = np.tensordot(powers, poly, axes=(0, 0))
    factor = z**n if table.direction == "plus" else z ** (-n)
    return factor * inner


def difference_residual(pot: Potential, E: complex, seq: MatrixSeq) -> float:
    """Max residual of u(n+1) + u(n-1) + (V(n) - E) u(n) over interior sites."""
    E = complex(E)
    worst = 0.0
    for n in range(seq.lo + 1, seq.hi):
        res = (
            seq.value(n + 1)
            + seq.value(n - 1)
            + (pot.value(n) - E * np.eye(pot.dim)) @ seq.value(n)
        )
        worst = max(worst, float(mat_norm(res)))
    return worst
