"""FastAPI application exposing the scattering computations.

Error mapping: domain validation errors return 422, numerical failures
(resonances, near-singular systems) 400, cross-check disagreements 409.
All error bodies carry {"kind", "message"}.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..algebra import SpectralPoint
from ..crosscheck import verify
from ..errors import JacobiScatterError, ValidationError
from ..evolution import dispersive_decay_fit, evolution_kernel
from ..jost import jost_series, jost_volterra, transmutation_coeffs
from ..resolvent import (
    green_boundary,
    green_kernel,
    holder_diagnostic,
    weighted_resolvent_norm,
)
from ..scattering import scattering_matrices
from . import models

_STATUS_BY_KIND = {"validation": 422, "numerical": 400, "crosscheck": 409}


def create_app() -> FastAPI:
    app = FastAPI(title="jacobi-scatter", version=__version__)

    @app.exception_handler(JacobiScatterError)
    def domain_error(request: Request, exc: JacobiScatterError):
        status = _STATUS_BY_KIND.get(exc.kind, 500)
        return JSONResponse(
            status_code=status,
            content={"kind": exc.kind, "message": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    def request_error(request: Request, exc: RequestValidationError):
        parts = []
        for err in exc.errors():
            loc = ".".join(str(p) for p in err.get("loc", ()))
            parts.append(f"{loc}: {err.get('msg', 'invalid')}")
        return JSONResponse(
            status_code=422,
            content={"kind": "validation", "message": "; ".join(parts)},
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.post("/jost", response_model=models.JostResponse)
    def jost(req: models.JostRequest):
        pot = req.potential.to_potential()
        point = SpectralPoint(complex(req.z_re, req.z_im))
        window = pot.default_window()
        if req.window_lo is not None or req.window_hi is not None:
            lo = req.window_lo if req.window_lo is not None else window[0]
            hi = req.window_hi if req.window_hi is not None else window[1]
            window = (int(lo), int(hi))
        sites = list(range(window[0], window[1] + 1))
        if req.representation == "volterra":
            sol = jost_volterra(pot, point, req.direction, window)
            values = [sol.values.value(n) for n in sites]
        else:
            table = transmutation_coeffs(pot, req.direction, window)
            values = [jost_series(table, point, n) for n in sites]
        return models.JostResponse(
            direction=req.direction,
            z_re=req.z_re,
            z_im=req.z_im,
            representation=req.representation,
            sites=sites,
            values=[models.MatrixPayload.from_array(v) for v in values],
        )

    @app.post("/scatter", response_model=models.ScatterResponse)
    def scatter(req: models.ScatterRequest):
        pot = req.potential.to_potential()
        point = SpectralPoint(complex(req.z_re, req.z_im))
        data = scattering_matrices(pot, point)
        pack = models.MatrixPayload.from_array
        return models.ScatterResponse(
            z_re=req.z_re,
            z_im=req.z_im,
            nu_re=data.nu.real,
            nu_im=data.nu.imag,
            T_plus=pack(data.Tplus),
            R_plus=pack(data.Rplus),
            T_minus=pack(data.Tminus),
            R_minus=pack(data.Rminus),
            M_plus=pack(data.Mplus),
            N_plus=pack(data.Nplus),
            M_minus=pack(data.Mminus),
            N_minus=pack(data.Nminus),
        )

    @app.post("/green", response_model=models.GreenResponse)
    def green(req: models.GreenRequest):
        pot = req.potential.to_potential()
        value = green_kernel(pot, complex(req.energy_re, req.energy_im), req.s, req.r)
        return models.GreenResponse(
            energy_re=req.energy_re,
            energy_im=req.energy_im,
            s=req.s,
            r=req.r,
            value=models.MatrixPayload.from_array(value),
        )

    @app.post("/green-boundary", response_model=models.GreenBoundaryResponse)
    def green_boundary_ep(req: models.GreenBoundaryRequest):
        pot = req.potential.to_potential()
        value = green_boundary(pot, req.energy, req.side, req.s, req.r)
        return models.GreenBoundaryResponse(
            energy=req.energy,
            side=req.side,
            s=req.s,
            r=req.r,
            value=models.MatrixPayload.from_array(value),
        )

    @app.post("/lap", response_model=models.LapResponse)
    def lap(req: models.LapRequest):
        pot = req.potential.to_potential()
        report = holder_diagnostic(
            pot, req.energies, req.alpha, req.rho, req.window, req.side
        )
        norms = [
            weighted_resolvent_norm(pot, e, req.alpha, req.window, req.side)
            for e in req.energies
        ]
        pairs = [
            models.HolderPairPayload(
                e_a=p.E,
                e_b=p.E0,
                diff_norm=p.diff_norm,
                delta_pow=p.delta_pow,
                ratio=p.ratio,
            )
            for p in report.pairs
        ]
        return models.LapResponse(
            alpha=req.alpha,
            rho=req.rho,
            side=req.side,
            window=req.window,
            energies=list(req.energies),
            weighted_norms=norms,
            max_ratio=report.max_ratio,
            fitted_exponent=report.fitted_exponent,
            pairs=pairs,
        )

    @app.post("/evolve", response_model=models.EvolveResponse)
    def evolve(req: models.EvolveRequest):
        pot = req.potential.to_potential()
        value = evolution_kernel(
            pot, req.t, req.s, req.r, method=req.method, cross_tol=req.cross_tol
        )
        return models.EvolveResponse(
            t=req.t,
            s=req.s,
            r=req.r,
            method=req.method,
            value=models.MatrixPayload.from_array(value),
        )

    @app.post("/decay", response_model=models.DecayResponse)
    def decay(req: models.DecayRequest):
        pot = req.potential.to_potential()
        if not req.t_min < req.t_max:
            raise ValidationError(
                f"need t_min < t_max, got {req.t_min} >= {req.t_max}"
            )
        times = np.geomspace(req.t_min, req.t_max, req.samples)
        fit = dispersive_decay_fit(pot, times, req.window, threads=req.threads)
        return models.DecayResponse(
            times=[float(t) for t in fit.times],
            sup_norms=[float(v) for v in fit.sup_norms],
            slope=fit.slope,
            c_fit=fit.c_fit,
        )

    @app.post("/verify", response_model=models.VerifyResponse)
    def verify_ep(req: models.VerifyRequest):
        pot = req.potential.to_potential()
        report = verify(pot, suite=req.suite, window=req.window, threads=req.threads)
        return models.VerifyResponse(
            suite=report.suite,
            passed=report.passed,
            checks=[models.CheckPayload(**c.to_dict()) for c in report.checks],
        )

    return app
