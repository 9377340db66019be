"""Request and response bodies for the HTTP service.

Complex matrices travel as separate real and imaginary part nested lists;
potentials use the same schema as the on-disk JSON files ("L" plus a list
of {"n", "re", "im"} entries, "im" optional and defaulting to zero).
"""

from __future__ import annotations

from typing import Literal

import numpy as np
from pydantic import BaseModel, Field

from ..potential import Potential


class MatrixPayload(BaseModel):
    re: list[list[float]]
    im: list[list[float]]

    @classmethod
    def from_array(cls, a) -> "MatrixPayload":
        a = np.asarray(a, dtype=complex)
        return cls(re=a.real.tolist(), im=a.imag.tolist())

    def to_array(self) -> np.ndarray:
        return np.asarray(self.re, dtype=float) + 1j * np.asarray(
            self.im, dtype=float
        )


class PotentialEntry(BaseModel):
    n: int
    re: list[list[float]]
    im: list[list[float]] | None = None


class PotentialPayload(BaseModel):
    L: int = Field(ge=1)
    entries: list[PotentialEntry] = Field(default_factory=list)

    def to_potential(self) -> Potential:
        data = {"L": self.L, "entries": []}
        for e in self.entries:
            im = e.im
            if im is None:
                im = [[0.0] * self.L for _ in range(self.L)]
            data["entries"].append({"n": e.n, "re": e.re, "im": im})
        return Potential.from_dict(data)


class ErrorBody(BaseModel):
    kind: str
    message: str


class JostRequest(BaseModel):
    potential: PotentialPayload
    z_re: float
    z_im: float = 0.0
    direction: Literal["plus", "minus"] = "plus"
    representation: Literal["volterra", "series"] = "volterra"
    window_lo: int | None = None
    window_hi: int | None = None


class JostResponse(BaseModel):
    direction: str
    z_re: float
    z_im: float
    representation: str
    sites: list[int]
    values: list[MatrixPayload]


class ScatterRequest(BaseModel):
    potential: PotentialPayload
    z_re: float
    z_im: float = 0.0


class ScatterResponse(BaseModel):
    z_re: float
    z_im: float
    nu_re: float
    nu_im: float
    T_plus: MatrixPayload
    R_plus: MatrixPayload
    T_minus: MatrixPayload
    R_minus: MatrixPayload
    M_plus: MatrixPayload
    N_plus: MatrixPayload
    M_minus: MatrixPayload
    N_minus: MatrixPayload


class GreenRequest(BaseModel):
    potential: PotentialPayload
    energy_re: float
    energy_im: float = 0.0
    s: int = 0
    r: int = 0


class GreenResponse(BaseModel):
    energy_re: float
    energy_im: float
    s: int
    r: int
    value: MatrixPayload


class GreenBoundaryRequest(BaseModel):
    potential: PotentialPayload
    energy: float
    side: Literal["plus", "minus"] = "plus"
    s: int = 0
    r: int = 0


class GreenBoundaryResponse(BaseModel):
    energy: float
    side: str
    s: int
    r: int
    value: MatrixPayload


class LapRequest(BaseModel):
    potential: PotentialPayload
    alpha: float
    rho: float = 0.0
    energies: list[float]
    window: int = Field(default=40, ge=1)
    side: Literal["plus", "minus"] = "plus"


class HolderPairPayload(BaseModel):
    e_a: float
    e_b: float
    diff_norm: float
    delta_pow: float
    ratio: float


class LapResponse(BaseModel):
    alpha: float
    rho: float
    side: str
    window: int
    energies: list[float]
    weighted_norms: list[float]
    max_ratio: float
    fitted_exponent: float
    pairs: list[HolderPairPayload]


class EvolveRequest(BaseModel):
    potential: PotentialPayload
    t: float
    s: int = 0
    r: int = 0
    method: Literal["kgrid", "fourier_bessel", "both"] = "kgrid"
    cross_tol: float = 1e-8


class EvolveResponse(BaseModel):
    t: float
    s: int
    r: int
    method: str
    value: MatrixPayload


class DecayRequest(BaseModel):
    potential: PotentialPayload
    t_min: float = 1.0
    t_max: float = 1000.0
    samples: int = Field(default=40, ge=2)
    window: int = Field(default=128, ge=1)
    threads: int | None = None


class DecayResponse(BaseModel):
    times: list[float]
    sup_norms: list[float]
    slope: float
    c_fit: float


class VerifyRequest(BaseModel):
    potential: PotentialPayload
    suite: Literal["all", "green", "evolve", "lap"] = "all"
    window: int = Field(default=200, ge=50)
    threads: int | None = None


class CheckPayload(BaseModel):
    name: str
    passed: bool
    error: float
    tolerance: float
    detail: str


class VerifyResponse(BaseModel):
    suite: str
    passed: bool
    checks: list[CheckPayload]
