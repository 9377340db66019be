"""Complex block-matrix algebra, the Zhukovsky map and Wiener series.

Contents
--------
matrix helpers      spectral norm, Hermiticity defect, guarded inversion
MatrixSeq           a finite window of L x L matrices indexed by lattice sites
SpectralPoint       paired (z, E) with E = z + 1/z and branch bookkeeping
zhukovsky / inverse_zhukovsky
WienerSeries        finite Fourier series k -> sum_m a_m e^{imk} with matrix
                    coefficients, plus norm and convolution product

Conventions
-----------
All matrix norms in this package are operator (spectral) norms computed from
singular values, so that the identity has norm 1.  Everything here is
immutable after construction and safe to share across threads.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

__all__ = [
    "CMatrix",
    "MatrixSeq",
    "SpectralPoint",
    "WienerSeries",
    "eye",
    "hermitian_defect",
    "inverse_zhukovsky",
    "is_hermitian",
    "mat_norm",
    "try_inverse",
    "wiener_norm",
    "wiener_product",
    "zhukovsky",
]

#: An L x L complex matrix is represented as a complex128 ndarray of shape (L, L).
CMatrix = np.ndarray

#: Reject energies closer than this to the branch points +-2.
BRANCH_POINT_GUARD = 1e-9


def eye(dim: int) -> CMatrix:
    """Identity matrix of block dimension `dim`."""
    return np.eye(dim, dtype=complex)


def as_cmatrix(a, dim: int | None = None) -> CMatrix:
    """Coerce `a` to a square complex matrix, validating shape and finiteness."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {m.shape}")
    if dim is not None and m.shape[0] != dim:
        raise ValidationError(f"expected dimension {dim}, got {m.shape[0]}")
    if not np.all(np.isfinite(m.view(float))):
        raise ValidationError("matrix has non-finite entries")
    return m


def mat_norm(a: np.ndarray) -> np.ndarray | float:
    """Operator (spectral) norm, vectorized over leading axes.

    Parameters
    ----------
    a : ndarray, shape (..., L, L)

    Returns
    -------
    float or ndarray
        Largest singular value of each trailing matrix.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim == 2:
        return float(np.linalg.norm(a, 2))
    s = np.linalg.svd(a, compute_uv=False)
    return s[..., 0]


def hermitian_defect(a: CMatrix) -> float:
    """Distance ``||a - a*||`` from the Hermitian matrices (spectral norm)."""
    a = np.asarray(a, dtype=complex)
    return float(mat_norm(a - a.conj().T))


def is_hermitian(a: CMatrix, tol: float = 1e-12) -> bool:
    """Check Hermiticity up to a relative tolerance; never raises."""
    a = np.asarray(a, dtype=complex)
    if not np.all(np.isfinite(a.view(float))):
        return False
    return hermitian_defect(a) <= tol * (1.0 + float(mat_norm(a)))


def try_inverse(a: CMatrix, cond_limit: float = 1e12):
    """Attempt to invert `a`, reporting failure instead of raising.

    Returns
    -------
    (inverse, cond) : (ndarray or None, float)
        The inverse and the 2-norm condition number.  `inverse` is None when
        the condition number exceeds `cond_limit` or the matrix is singular.
    """
    a = np.asarray(a, dtype=complex)
    s = np.linalg.svd(a, compute_uv=False)
    if s[-1] == 0.0:
        return None, math.inf
    cond = float(s[0] / s[-1])
    if cond > cond_limit:
        return None, cond
    return np.linalg.inv(a), cond


@dataclass(frozen=True)
class MatrixSeq:
    """A matrix-valued sequence on a finite window [lo, hi] of the lattice.

    Attributes
    ----------
    lo : int
        First site of the window.
    values : ndarray, shape (hi - lo + 1, L, L)
        One matrix per site, in increasing site order.
    """

    lo: int
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.ndim != 3 or v.shape[0] < 1 or v.shape[1] != v.shape[2]:
            raise ValidationError(f"bad MatrixSeq value shape {v.shape}")
        object.__setattr__(self, "values", v)

    @property
    def hi(self) -> int:
        return self.lo + self.values.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def __contains__(self, n: int) -> bool:
        return self.lo <= n <= self.hi

    def value(self, n: int) -> CMatrix:
        """The matrix at site `n` (must lie inside the window)."""
        if not self.lo <= n <= self.hi:
            raise ValidationError(f"site {n} outside window [{self.lo}, {self.hi}]")
        return self.values[n - self.lo]

    def slice(self, lo: int, hi: int) -> "MatrixSeq":
        """Restrict to the subwindow [lo, hi]."""
        if lo < self.lo or hi > self.hi or lo > hi:
            raise ValidationError(
                f"subwindow [{lo}, {hi}] not inside [{self.lo}, {self.hi}]"
            )
        return MatrixSeq(lo, self.values[lo - self.lo : hi - self.lo + 1])


@dataclass(frozen=True)
class SpectralPoint:
    """A spectral parameter z in the closed unit disk paired with E = z + 1/z.

    `branch` is "interior" for |z| < 1; on the circle it records which
    boundary branch produced z: "plus" for r_+(E) = e^{-ik} and "minus" for
    r_-(E) = e^{ik}, where E = 2 cos k with k in (0, pi).
    """

    z: complex
    E: complex = field(default=None)  # type: ignore[assignment]
    branch: str = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        z = complex(self.z)
        if z == 0:
            raise ValidationError("spectral parameter z = 0 is excluded")
        if abs(z) > 1.0 + 1e-12:
            raise ValidationError(f"spectral parameter must satisfy |z| <= 1, got |z| = {abs(z)}")
        E = complex(self.E) if self.E is not None else z + 1.0 / z
        if abs(E - (z + 1.0 / z)) > 1e-12 * (1.0 + abs(E)):
            raise ValidationError("E is not consistent with z + 1/z")
        branch = self.branch
        if branch is None:
            if abs(abs(z) - 1.0) <= 1e-12:
                branch = "plus" if z.imag <= 0 else "minus"
            else:
                branch = "interior"
        if branch not in ("plus", "minus", "interior"):
            raise ValidationError(f"unknown branch {branch!r}")
        if branch == "interior" and abs(abs(z) - 1.0) <= 1e-14:
            branch = "plus" if z.imag <= 0 else "minus"
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "E", E)
        object.__setattr__(self, "branch", branch)

    @property
    def on_circle(self) -> bool:
        return self.branch != "interior"

    def conjugate(self) -> "SpectralPoint":
        """The point with parameter conj(z) (energy conj(E))."""
        zc = self.z.conjugate()
        if self.branch == "interior":
            return SpectralPoint(zc)
        return SpectralPoint(zc, branch="minus" if self.branch == "plus" else "plus")


def zhukovsky(z: complex) -> complex:
    """The Zhukovsky map J(z) = z + 1/z.

    Raises
    ------
    ValidationError
        If z = 0.
    """
    z = complex(z)
    if z == 0:
        raise ValidationError("zhukovsky map undefined at z = 0")
    return z + 1.0 / z


def inverse_zhukovsky(E: complex, branch: str = "plus") -> SpectralPoint:
    """Invert E = z + 1/z into the closed unit disk.

    For E outside [-2, 2] the result is the unique root of z^2 - E z + 1 = 0
    with |z| < 1 (branch independent).  For real E in (-2, 2), writing
    E = 2 cos k with k in (0, pi), the "plus" branch returns e^{-ik} and the
    "minus" branch returns e^{ik}.

    The roots are computed from the larger-magnitude root first, taking the
    companion by the product relation z1 z2 = 1, which avoids cancellation
    near the band edges.

    Raises
    ------
    ValidationError
        If E is within 1e-9 of a branch point +-2, or `branch` is invalid.
    """
    E = complex(E)
    if branch not in ("plus", "minus"):
        raise ValidationError(f"branch must be 'plus' or 'minus', got {branch!r}")
    if abs(E - 2.0) < BRANCH_POINT_GUARD or abs(E + 2.0) < BRANCH_POINT_GUARD:
        raise ValidationError(f"energy {E} too close to a branch point +-2")
    if E.imag == 0.0 and -2.0 < E.real < 2.0:
        k = math.acos(E.real / 2.0)
        z = cmath.exp(-1j * k) if branch == "plus" else cmath.exp(1j * k)
        return SpectralPoint(z, branch=branch)
    disc = cmath.sqrt(E * E - 4.0)
    root_a = (E + disc) / 2.0
    root_b = (E - disc) / 2.0
    big = root_a if abs(root_a) >= abs(root_b) else root_b
    small = 1.0 / big
    return SpectralPoint(small, branch="interior")


@dataclass(frozen=True)
class WienerSeries:
    """A finite matrix-valued Fourier series f(k) = sum_m a_m e^{imk}.

    Attributes
    ----------
    m_min : int
        Index of the first stored coefficient.
    coeffs : ndarray, shape (M, L, L)
        Coefficients a_{m_min}, ..., a_{m_min + M - 1}.

    The same data can be read as a Laurent series in z on the unit circle:
    with z = e^{-ik}, a coefficient a_m of e^{imk} is the coefficient of
    z^{-m}.  `from_z_coeffs` / `z_coeffs` perform that re-indexing, which is
    the convention natural for Jost-solution expansions.
    """

    m_min: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 3 or c.shape[0] < 1 or c.shape[1] != c.shape[2]:
            raise ValidationError(f"bad WienerSeries coefficient shape {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @property
    def m_max(self) -> int:
        return self.m_min + self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def indices(self) -> np.ndarray:
        return np.arange(self.m_min, self.m_max + 1)

    @classmethod
    def from_z_coeffs(cls, offset: int, coeffs: np.ndarray) -> "WienerSeries":
        """Build from a z-Laurent series sum_p b_p z^p with p = offset, offset+1, ...

        On the circle z = e^{-ik}, so b_p becomes the Fourier coefficient of
        e^{-ipk}; the stored window is reversed accordingly.
        """
        c = np.asarray(coeffs, dtype=complex)
        return cls(-(offset + c.shape[0] - 1), c[::-1].copy())

    def z_coeffs(self) -> tuple[int, np.ndarray]:
        """Return (offset, b) with f = sum_p b_p z^p on the circle z = e^{-ik}."""
        return -self.m_max, self.coeffs[::-1].copy()

    def eval_k(self, k) -> np.ndarray:
        """Evaluate at k (scalar or array): sum_m a_m e^{imk}."""
        k = np.asarray(k, dtype=float)
        phases = np.exp(1j * np.multiply.outer(k, self.indices.astype(float)))
        return np.tensordot(phases, self.coeffs, axes=([-1], [0]))

    def eval_z(self, z: complex) -> CMatrix:
        """Evaluate at a point z on the unit circle (z = e^{-ik} convention)."""
        offset, b = self.z_coeffs()
        powers = z ** np.arange(offset, offset + b.shape[0], dtype=float)
        return np.tensordot(powers, b, axes=(0, 0))

    def conj_transpose(self) -> "WienerSeries":
        """The series of k -> f(k)^*, i.e. coefficients a_{-m}^* at index m."""
        return WienerSeries(-self.m_max, np.conj(np.transpose(self.coeffs[::-1], (0, 2, 1))))

    def trim(self, tol: float = 0.0) -> "WienerSeries":
        """Drop leading/trailing coefficients of norm <= tol (keep at least one)."""
        norms = np.asarray(mat_norm(self.coeffs), dtype=float)
        keep = np.nonzero(norms > tol)[0]
        if keep.size == 0:
            return WienerSeries(0, np.zeros((1, self.dim, self.dim), dtype=complex))
        a, b = int(keep[0]), int(keep[-1])
        return WienerSeries(self.m_min + a, self.coeffs[a : b + 1].copy())


def wiener_norm(f: WienerSeries) -> float:
    """The Wiener norm sum_m ||a_m|| (operator norm per coefficient)."""
    return float(np.sum(mat_norm(f.coeffs)))


def wiener_product(f: WienerSeries, g: WienerSeries) -> WienerSeries:
    """Non-commutative convolution product, (fg)(k) = f(k) g(k).

    The coefficient window is [f.m_min + g.m_min, f.m_max + g.m_max] and
    ``wiener_norm(fg) <= wiener_norm(f) * wiener_norm(g)``.
    """
    if f.dim != g.dim:
        raise ValidationError(f"dimension mismatch {f.dim} != {g.dim}")
    na, nb = f.coeffs.shape[0], g.coeffs.shape[0]
    out = np.zeros((na + nb - 1, f.dim, f.dim), dtype=complex)
    for i in range(na):
        out[i : i + nb] += f.coeffs[i] @ g.coeffs
    return WienerSeries(f.m_min + g.m_min, out)


def wiener_add(f: WienerSeries, g: WienerSeries) -> WienerSeries:
    """Coefficient-wise sum of two series (windows are merged)."""
    if f.dim != g.dim:
        raise ValidationError(f"dimension mismatch {f.dim} != {g.dim}")
    lo = min(f.m_min, g.m_min)
    hi = max(f.m_max, g.m_max)
    out = np.zeros((hi - lo + 1, f.dim, f.dim), dtype=complex)
    out[f.m_min - lo : f.m_min - lo + f.coeffs.shape[0]] += f.coeffs
    out[g.m_min - lo : g.m_min - lo + g.coeffs.shape[0]] += g.coeffs
    return WienerSeries(lo, out)


def wiener_identity(dim: int) -> WienerSeries:
    """The constant series a_0 = I."""
    return WienerSeries(0, eye(dim)[None, :, :])
