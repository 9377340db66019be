"""Brute-force ground truth on a truncated lattice.

The operator is restricted to sites [-N, N] with zero (Dirichlet) boundary
conditions and assembled densely: identity off-diagonal blocks, V(n) on the
diagonal.  Resolvents come from direct solves, propagators and spectral
projectors from a cached eigendecomposition.  Everything here is deliberately
independent of the Jost-solution machinery so it can serve as a cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError, ValidationError
from .potential import Potential

__all__ = [
    "PointSpectrumReport",
    "TruncatedOperator",
    "oracle_point_spectrum",
    "oracle_propagator",
    "oracle_resolvent",
    "truncated_operator",
]

EIGENVALUE_MARGIN = 1e-8


class TruncatedOperator:
    """Dense truncation of H = H0 + V to the window [-N, N].

    Eigenvalue-only and full eigendecompositions are computed lazily and
    cached; after construction the object is read-only.
    """

    def __init__(self, pot: Potential, half_width: int):
        if half_width < 1:
            raise ValidationError(f"half width must be >= 1, got {half_width}")
        if pot.sites and (pot.min_support < -half_width or pot.max_support > half_width):
            raise ValidationError(
                f"support [{pot.min_support}, {pot.max_support}] exceeds "
                f"truncation window [-{half_width}, {half_width}]"
            )
        self.potential = pot
        self.half_width = half_width
        self.dim = pot.dim
        size = (2 * half_width + 1) * pot.dim
        h = np.zeros((size, size), dtype=complex)
        eye = np.eye(pot.dim)
        for n in range(-half_width, half_width):
            a = self._offset(n)
            b = self._offset(n + 1)
            h[a : a + pot.dim, b : b + pot.dim] = eye
            h[b : b + pot.dim, a : a + pot.dim] = eye
        for n, block in zip(pot.sites, pot.matrices):
            a = self._offset(n)
            h[a : a + pot.dim, a : a + pot.dim] = block
        self.matrix = h
        self.size = size
        self._eigenvalues = None
        self._eigensystem = None

    def _offset(self, n: int) -> int:
        if not -self.half_width <= n <= self.half_width:
            raise ValidationError(
                f"site {n} outside truncation window [-{self.half_width}, {self.half_width}]"
            )
        return (n + self.half_width) * self.dim

    def block(self, dense: np.ndarray, s: int, r: int) -> np.ndarray:
        """The (s, r) block of a dense matrix over this window."""
        a = self._offset(s)
        b = self._offset(r)
        return dense[a : a + self.dim, b : b + self.dim]

    @property
    def eigenvalues(self) -> np.ndarray:
        if self._eigenvalues is None:
            if self._eigensystem is not None:
                self._eigenvalues = self._eigensystem[0]
            else:
                self._eigenvalues = np.linalg.eigvalsh(self.matrix)
        return self._eigenvalues

    @property
    def eigensystem(self):
        if self._eigensystem is None:
            self._eigensystem = np.linalg.eigh(self.matrix)
            self._eigenvalues = self._eigensystem[0]
        return self._eigensystem

    def eigenvalue_distance(self, E: complex) -> float:
        """Distance from E to the spectrum of the truncated operator."""
        lam = self.eigenvalues
        return float(np.min(np.abs(lam - complex(E))))

    def resolvent(self, E: complex) -> np.ndarray:
        """(H_N - E)^{-1} by direct dense solve."""
        E = complex(E)
        if abs(E.imag) < EIGENVALUE_MARGIN:
            dist = self.eigenvalue_distance(E)
            if dist < EIGENVALUE_MARGIN:
                raise NumericalError(
                    f"E = {E} is within {dist:.3e} of a truncated-operator eigenvalue"
                )
        a = self.matrix - E * np.eye(self.size)
        return np.linalg.solve(a, np.eye(self.size, dtype=complex))

    def propagator(self, t: float) -> np.ndarray:
        """e^{-itH_N} restricted to eigenvalues in the open band (-2, 2)."""
        lam, vec = self.eigensystem
        inside = (lam > -2.0) & (lam < 2.0)
        v = vec[:, inside]
        phases = np.exp(-1j * t * lam[inside])
        return (v * phases) @ v.conj().T

    def band_projector(self) -> np.ndarray:
        """Spectral projector onto eigenvalues in the open band (-2, 2)."""
        lam, vec = self.eigensystem
        inside = (lam > -2.0) & (lam < 2.0)
        v = vec[:, inside]
        return v @ v.conj().T


_CACHE: dict = {}


def truncated_operator(pot: Potential, half_width: int) -> TruncatedOperator:
    """Construct (or fetch from cache) the dense truncation of H."""
    key = (pot.fingerprint(), half_width)
    op = _CACHE.get(key)
    if op is None:
        op = TruncatedOperator(pot, half_width)
        if len(_CACHE) > 32:
            _CACHE.clear()
        _CACHE[key] = op
    return op


def oracle_resolvent(pot: Potential, E: complex, half_width: int) -> TruncatedOperatorResolvent:
    """Dense (H_N - E)^{-1} with a block accessor.

    Raises
    ------
    NumericalError
        If real E is within 1e-8 of an eigenvalue of H_N.
    """
    op = truncated_operator(pot, half_width)
    return TruncatedOperatorResolvent(op, complex(E), op.resolvent(E))


def oracle_propagator(pot: Potential, t: float, half_width: int) -> TruncatedOperatorPropagator:
    """Dense e^{-itH_N} P_ac^{(N)} with a block accessor."""
    op = truncated_operator(pot, half_width)
    return TruncatedOperatorPropagator(op, float(t), op.propagator(float(t)))


@dataclass(frozen=True)
class TruncatedOperatorResolvent:
    operator: TruncatedOperator
    E: complex
    dense: np.ndarray

    def block(self, s: int, r: int) -> np.ndarray:
        return self.operator.block(self.dense, s, r)


@dataclass(frozen=True)
class TruncatedOperatorPropagator:
    operator: TruncatedOperator
    t: float
    dense: np.ndarray

    def block(self, s: int, r: int) -> np.ndarray:
        return self.operator.block(self.dense, s, r)


@dataclass(frozen=True)
class PointSpectrumReport:
    """Eigenvalues of H_N outside the buffered band [-2-delta, 2+delta].

    `stable` records whether a run at twice the window agrees: same count
    outside the band, matched eigenvalues within 1e-6.
    """

    half_width: int
    delta: float
    eigenvalues: tuple
    distances: tuple
    stable: bool


def _outside_band(op: TruncatedOperator, delta: float) -> np.ndarray:
    lam = op.eigenvalues
    return lam[(lam < -2.0 - delta) | (lam > 2.0 + delta)]


def oracle_point_spectrum(pot: Potential, half_width: int) -> PointSpectrumReport:
    """Screen for point spectrum outside the essential band [-2, 2].

    The band is buffered by delta = 10/N to absorb spurious edge eigenvalues
    created by truncation; stability is assessed against a run at 2N.
    """
    op = truncated_operator(pot, half_width)
    delta = 10.0 / half_width
    outside = _outside_band(op, delta)
    op2 = truncated_operator(pot, 2 * half_width)
    outside2 = _outside_band(op2, 10.0 / (2 * half_width))
    stable = outside.size == outside2.size
    if stable and outside.size > 0:
        stable = bool(np.max(np.abs(np.sort(outside) - np.sort(outside2))) <= 1e-6)
    distances = tuple(
        float(max(lam - 2.0, -2.0 - lam, 0.0)) for lam in outside
    )
    return PointSpectrumReport(
        half_width=half_width,
        delta=delta,
        eigenvalues=tuple(float(x) for x in outside),
        distances=distances,
        stable=stable,
    )
