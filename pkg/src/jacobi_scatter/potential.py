"""Finitely supported matrix potentials: validation, file I/O, decay norms.

A potential is a map n -> V(n) into Hermitian L x L matrices, zero outside a
finite set of sites.  The on-disk format is JSON:

    { "L": int, "entries": [ { "n": int, "re": [[float]], "im": [[float]] } ] }

with floats written to 17 significant digits so that load(save(V)) reproduces
V bit for bit.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .algebra import mat_norm
from .errors import ValidationError

__all__ = [
    "DecayNorms",
    "Potential",
    "decay_norms",
    "load_potential",
    "potential_norm",
    "save_potential",
]

HERMITICITY_TOL = 1e-12


@dataclass(frozen=True)
class Potential:
    """A finitely supported Hermitian matrix potential on the lattice.

    Attributes
    ----------
    dim : int
        Block dimension L.
    sites : tuple of int
        Support sites in strictly increasing order (may be empty).
    matrices : ndarray, shape (len(sites), L, L)
        The matrices V(n) for n in `sites`.
    """

    dim: int
    sites: tuple
    matrices: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValidationError(f"block dimension must be >= 1, got {self.dim}")
        sites = tuple(int(n) for n in self.sites)
        m = np.asarray(self.matrices, dtype=complex)
        if m.shape != (len(sites), self.dim, self.dim):
            raise ValidationError(
                f"matrix stack shape {m.shape} does not match "
                f"{len(sites)} sites of dimension {self.dim}"
            )
        if any(b <= a for a, b in zip(sites, sites[1:])):
            raise ValidationError("support sites must be strictly increasing")
        if not np.all(np.isfinite(m.view(float))):
            raise ValidationError("potential has non-finite entries")
        for n, block in zip(sites, m):
            defect = float(mat_norm(block - block.conj().T))
            if defect > HERMITICITY_TOL * (1.0 + float(mat_norm(block))):
                raise ValidationError(
                    f"V({n}) is not Hermitian: defect norm {defect:.3e}"
                )
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "matrices", m)

    @property
    def is_zero(self) -> bool:
        return len(self.sites) == 0

    @property
    def min_support(self) -> int:
        """Smallest support site (0 for the zero potential)."""
        return self.sites[0] if self.sites else 0

    @property
    def max_support(self) -> int:
        """Largest support site (0 for the zero potential)."""
        return self.sites[-1] if self.sites else 0

    def value(self, n: int) -> np.ndarray:
        """V(n), the zero matrix off the support."""
        try:
            i = self.sites.index(n)
        except ValueError:
            return np.zeros((self.dim, self.dim), dtype=complex)
        return self.matrices[i]

    def values_on(self, lo: int, hi: int) -> np.ndarray:
        """Stacked V(n) for n = lo..hi as an (hi-lo+1, L, L) array."""
        out = np.zeros((hi - lo + 1, self.dim, self.dim), dtype=complex)
        for n, block in zip(self.sites, self.matrices):
            if lo <= n <= hi:
                out[n - lo] = block
        return out

    def reflected(self) -> "Potential":
        """The spatially reflected potential n -> V(-n)."""
        sites = tuple(-n for n in reversed(self.sites))
        mats = self.matrices[::-1].copy()
        return Potential(self.dim, sites, mats)

    def default_window(self, pad: int = 50) -> tuple:
        """The default lattice window [min_support - pad, max_support + pad]."""
        return (self.min_support - pad, self.max_support + pad)

    def fingerprint(self) -> tuple:
        """A hashable key identifying this potential (for caches)."""
        return (self.dim, self.sites, self.matrices.tobytes())

    def to_dict(self) -> dict:
        entries = []
        for n, block in zip(self.sites, self.matrices):
            entries.append(
                {
                    "n": int(n),
                    "re": block.real.tolist(),
                    "im": block.imag.tolist(),
                }
            )
        return {"L": self.dim, "entries": entries}

    @classmethod
    def zero(cls, dim: int) -> "Potential":
        return cls(dim, (), np.zeros((0, dim, dim), dtype=complex))

    @classmethod
    def from_dict(cls, data: dict) -> "Potential":
        if not isinstance(data, dict):
            raise ValidationError("potential data must be a JSON object")
        try:
            dim = int(data["L"])
        except (KeyError, TypeError, ValueError):
            raise ValidationError("potential data missing integer field 'L'")
        entries = data.get("entries", [])
        if not isinstance(entries, list):
            raise ValidationError("'entries' must be a list")
        seen = {}
        for idx, e in enumerate(entries):
            try:
                n = int(e["n"])
                re = np.asarray(e["re"], dtype=float)
                im = np.asarray(e["im"], dtype=float)
            except (KeyError, TypeError, ValueError):
                raise ValidationError(f"entry {idx} is malformed (need n, re, im)")
            if re.shape != (dim, dim) or im.shape != (dim, dim):
                raise ValidationError(
                    f"entry n={n}: matrix shape {re.shape} does not match L={dim}"
                )
            if n in seen:
                raise ValidationError(f"duplicate entry for site n={n}")
            seen[n] = re + 1j * im
        sites = tuple(sorted(seen))
        mats = np.array(
            [seen[n] for n in sites], dtype=complex
        ).reshape(len(sites), dim, dim)
        return cls(dim, sites, mats)


def load_potential(path) -> Potential:
    """Load and validate a potential from a JSON file.

    Raises
    ------
    ValidationError
        On parse failure, shape or dimension mismatch, duplicate sites, or a
        non-Hermitian entry (the message names the offending site).
    """
    p = Path(path)
    if not p.is_file():
        raise ValidationError(f"potential file not found: {p}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ValidationError(f"could not parse {p}: {exc}")
    return Potential.from_dict(data)


def _fmt(x: float) -> str:
    """Format a double with 17 significant digits (lossless round trip)."""
    return format(float(x), ".17g")


def save_potential(pot: Potential, path) -> None:
    """Write a potential to JSON with 17-significant-digit floats."""
    parts = ['{"L": %d, "entries": [' % pot.dim]
    entry_texts = []
    for n, block in zip(pot.sites, pot.matrices):
        re_rows = ", ".join(
            "[" + ", ".join(_fmt(v) for v in row) + "]" for row in block.real
        )
        im_rows = ", ".join(
            "[" + ", ".join(_fmt(v) for v in row) + "]" for row in block.imag
        )
        entry_texts.append(
            '{"n": %d, "re": [%s], "im": [%s]}' % (n, re_rows, im_rows)
        )
    parts.append(", ".join(entry_texts))
    parts.append("]}")
    text = "".join(parts)
    json.loads(text)  # sanity: emit only well-formed JSON
    Path(path).write_text(text + "\n")


def potential_norm(pot: Potential, kind: str = "zero", rho: float = 0.0) -> float:
    """Decay norm of a potential.

    Parameters
    ----------
    pot : Potential
    kind : {"zero", "rho", "inf"}
        "zero" is sum_n ||V(n)||, "rho" is sum_n (|n|+1)^rho ||V(n)||,
        "inf" is max_n ||V(n)||.  Operator norm throughout.
    rho : float, optional
        Weight exponent for kind "rho"; must be >= 0.
    """
    if kind not in ("zero", "rho", "inf"):
        raise ValidationError(f"unknown norm kind {kind!r}")
    if pot.is_zero:
        return 0.0
    norms = np.asarray(mat_norm(pot.matrices), dtype=float)
    if kind == "inf":
        return float(np.max(norms))
    if kind == "zero":
        return float(np.sum(norms))
    if rho < 0:
        raise ValidationError(f"rho must be >= 0, got {rho}")
    weights = (np.abs(np.array(pot.sites, dtype=float)) + 1.0) ** rho
    return float(np.sum(weights * norms))


@dataclass(frozen=True)
class DecayNorms:
    """The trio of decay norms at a given weight exponent rho."""

    rho: float
    norm0: float
    norm_rho: float
    norm_inf: float


def decay_norms(pot: Potential, rho: float = 1.0) -> DecayNorms:
    """Compute ||V||_0, ||V||_rho and ||V||_inf together."""
    return DecayNorms(
        rho=rho,
        norm0=potential_norm(pot, "zero"),
        norm_rho=potential_norm(pot, "rho", rho),
        norm_inf=potential_norm(pot, "inf"),
    )
