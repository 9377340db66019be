"""Command line client for the scattering service.

Every subcommand builds a JSON request, posts it to the service (in process
by default, or to a running server via --server) and renders the response
as JSON or CSV.  Exit codes: 0 success, 1 validation error, 2 numerical
failure, 3 cross-check failure.
"""

from __future__ import annotations

import asyncio
import csv
import io
import json
import sys

import click
import httpx

EXIT_BY_KIND = {"validation": 1, "numerical": 2, "crosscheck": 3, "internal": 1}


def _fmt17(x) -> str:
    return format(float(x), ".17g")


async def _asgi_request(path: str, payload: dict):
    from .service.app import create_app

    transport = httpx.ASGITransport(app=create_app())
    async with httpx.AsyncClient(
        transport=transport, base_url="http://jacobi-scatter.internal", timeout=None
    ) as client:
        resp = await client.post(path, json=payload)
        return resp.status_code, resp.json()


def _post(path: str, payload: dict, server: str | None):
    if server:
        with httpx.Client(base_url=server, timeout=600.0) as client:
            resp = client.post(path, json=payload)
            return resp.status_code, resp.json()
    return asyncio.run(_asgi_request(path, payload))


def _load_potential_payload(potential_path: str | None, dim: int | None) -> dict:
    if potential_path is None:
        if dim is None:
            click.echo(
                "error [validation]: provide --potential FILE or --dim L "
                "(zero potential)",
                err=True,
            )
            sys.exit(1)
        return {"L": int(dim), "entries": []}
    try:
        with open(potential_path) as fh:
            data = json.load(fh)
    except OSError as exc:
        click.echo(f"error [validation]: cannot read potential: {exc}", err=True)
        sys.exit(1)
    except json.JSONDecodeError as exc:
        click.echo(f"error [validation]: potential is not valid JSON: {exc}", err=True)
        sys.exit(1)
    return data


def _run(path: str, payload: dict, server: str | None) -> dict:
    try:
        status, body = _post(path, payload, server)
    except httpx.HTTPError as exc:
        click.echo(f"error [numerical]: service unreachable: {exc}", err=True)
        sys.exit(2)
    if status != 200:
        kind = body.get("kind", "internal") if isinstance(body, dict) else "internal"
        message = (
            body.get("message", str(body)) if isinstance(body, dict) else str(body)
        )
        click.echo(f"error [{kind}]: {message}", err=True)
        sys.exit(EXIT_BY_KIND.get(kind, 1))
    return body


def _matrix_columns(prefix_pairs) -> list:
    """Flatten matrix payloads into interleaved re_ij/im_ij columns."""
    header = []
    row = []
    for label, payload in prefix_pairs:
        dim = len(payload["re"])
        for i in range(dim):
            for j in range(dim):
                suffix = f"{i + 1}{j + 1}"
                header.append(f"{label}re_{suffix}")
                header.append(f"{label}im_{suffix}")
                row.append(_fmt17(payload["re"][i][j]))
                row.append(_fmt17(payload["im"][i][j]))
    return header, row


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _render_csv(command: str, body: dict) -> str:
    if command == "jost":
        mat_header, _ = _matrix_columns([("", body["values"][0])])
        rows = []
        for n, payload in zip(body["sites"], body["values"]):
            _, row = _matrix_columns([("", payload)])
            rows.append([str(n)] + row)
        return _csv_text(["n"] + mat_header, rows)
    if command == "scatter":
        names = (
            "T_plus",
            "R_plus",
            "T_minus",
            "R_minus",
            "M_plus",
            "N_plus",
            "M_minus",
            "N_minus",
        )
        mat_header, _ = _matrix_columns([("", body["T_plus"])])
        rows = []
        for name in names:
            _, row = _matrix_columns([("", body[name])])
            rows.append([name] + row)
        return _csv_text(["matrix"] + mat_header, rows)
    if command in ("green", "green-boundary"):
        mat_header, row = _matrix_columns([("", body["value"])])
        return _csv_text(["s", "r"] + mat_header, [[body["s"], body["r"]] + row])
    if command == "evolve":
        mat_header, row = _matrix_columns([("", body["value"])])
        return _csv_text(
            ["t", "s", "r"] + mat_header,
            [[_fmt17(body["t"]), body["s"], body["r"]] + row],
        )
    if command == "decay":
        c = body["c_fit"]
        rows = [
            [_fmt17(t), _fmt17(v), _fmt17(c * (1.0 + t) ** (-1.0 / 3.0))]
            for t, v in zip(body["times"], body["sup_norms"])
        ]
        return _csv_text(["t", "sup_norm", "bound_c_times_t_to_minus_third"], rows)
    if command == "lap":
        rows = [
            [
                _fmt17(p["e_a"]),
                _fmt17(p["e_b"]),
                _fmt17(p["diff_norm"]),
                _fmt17(p["delta_pow"]),
                _fmt17(p["ratio"]),
            ]
            for p in body["pairs"]
        ]
        return _csv_text(["e_a", "e_b", "diff_norm", "delta_pow", "ratio"], rows)
    if command == "verify":
        rows = [
            [
                c["name"],
                str(c["passed"]).lower(),
                _fmt17(c["error"]),
                _fmt17(c["tolerance"]),
                c["detail"],
            ]
            for c in body["checks"]
        ]
        return _csv_text(["name", "passed", "error", "tolerance", "detail"], rows)
    raise ValueError(f"no CSV renderer for {command}")


def _emit(command: str, body: dict, output: str | None, fmt: str) -> None:
    if fmt == "csv":
        text = _render_csv(command, body)
    else:
        text = json.dumps(body, indent=2) + "\n"
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def common_options(f):
    opts = [
        click.option(
            "--potential",
            "potential_path",
            default=None,
            help="Path to a potential JSON file.",
        ),
        click.option(
            "--dim",
            type=int,
            default=None,
            help="Block dimension L for the zero potential (when --potential "
            "is omitted).",
        ),
        click.option("--output", default=None, help="Write the result here."),
        click.option(
            "--format",
            "fmt",
            type=click.Choice(["json", "csv"]),
            default="json",
            help="Output format.",
        ),
        click.option(
            "--threads",
            type=int,
            default=None,
            help="Worker threads (falls back to JACOBI_SCATTER_THREADS, then 1).",
        ),
        click.option(
            "--tol",
            type=float,
            default=None,
            help="Cross-check tolerance where applicable (evolve --method both).",
        ),
        click.option(
            "--server",
            default=None,
            help="Base URL of a running service; default computes in process.",
        ),
    ]
    for opt in reversed(opts):
        f = opt(f)
    return f


@click.group()
def cli():
    """Scattering data, resolvent kernels and dispersive decay on Z."""


@cli.command()
@common_options
@click.option("--z-re", type=float, required=True, help="Re z.")
@click.option("--z-im", type=float, default=0.0, help="Im z.")
@click.option(
    "--direction",
    type=click.Choice(["plus", "minus"]),
    default="plus",
    help="Normalization end.",
)
@click.option(
    "--representation",
    type=click.Choice(["volterra", "series"]),
    default="volterra",
    help="Summation route.",
)
@click.option("--window-lo", type=int, default=None)
@click.option("--window-hi", type=int, default=None)
def jost(
    potential_path,
    dim,
    output,
    fmt,
    threads,
    tol,
    server,
    z_re,
    z_im,
    direction,
    representation,
    window_lo,
    window_hi,
):
    """Jost solution values over a lattice window."""
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "z_re": z_re,
        "z_im": z_im,
        "direction": direction,
        "representation": representation,
        "window_lo": window_lo,
        "window_hi": window_hi,
    }
    body = _run("/jost", payload, server)
    _emit("jost", body, output, fmt)


@cli.command()
@common_options
@click.option("--z-re", type=float, required=True, help="Re z (|z| = 1).")
@click.option("--z-im", type=float, default=0.0, help="Im z.")
def scatter(potential_path, dim, output, fmt, threads, tol, server, z_re, z_im):
    """Transmission, reflection and matching matrices at a circle point."""
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "z_re": z_re,
        "z_im": z_im,
    }
    body = _run("/scatter", payload, server)
    _emit("scatter", body, output, fmt)


@cli.command()
@common_options
@click.option("--energy-re", type=float, required=True, help="Re E.")
@click.option("--energy-im", type=float, default=0.0, help="Im E.")
@click.option("--s", type=int, default=0)
@click.option("--r", type=int, default=0)
def green(
    potential_path, dim, output, fmt, threads, tol, server, energy_re, energy_im, s, r
):
    """Resolvent kernel [R(E)]_{s,r} for E off the spectrum."""
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "energy_re": energy_re,
        "energy_im": energy_im,
        "s": s,
        "r": r,
    }
    body = _run("/green", payload, server)
    _emit("green", body, output, fmt)


@cli.command(name="green-boundary")
@common_options
@click.option("--energy", type=float, required=True, help="E in (-2, 2).")
@click.option("--side", type=click.Choice(["plus", "minus"]), default="plus")
@click.option("--s", type=int, default=0)
@click.option("--r", type=int, default=0)
def green_boundary_cmd(
    potential_path, dim, output, fmt, threads, tol, server, energy, side, s, r
):
    """Boundary value [R(E +- i0)]_{s,r} on the band."""
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "energy": energy,
        "side": side,
        "s": s,
        "r": r,
    }
    body = _run("/green-boundary", payload, server)
    _emit("green-boundary", body, output, fmt)


@cli.command()
@common_options
@click.option("--alpha", type=float, required=True, help="Weight exponent.")
@click.option("--rho", type=float, default=0.0, help="Potential decay rate.")
@click.option(
    "--grid-file",
    default=None,
    help="JSON file with the energy grid (list, or object with 'energies').",
)
@click.option("--window", type=int, default=40, help="Weighted-norm half width.")
@click.option("--side", type=click.Choice(["plus", "minus"]), default="plus")
def lap(
    potential_path,
    dim,
    output,
    fmt,
    threads,
    tol,
    server,
    alpha,
    rho,
    grid_file,
    window,
    side,
):
    """Weighted boundary-resolvent Hölder diagnostic over an energy grid."""
    if grid_file is not None:
        try:
            with open(grid_file) as fh:
                grid = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            click.echo(f"error [validation]: cannot read grid file: {exc}", err=True)
            sys.exit(1)
        if isinstance(grid, dict):
            grid = grid.get("energies")
        if not isinstance(grid, list):
            click.echo(
                "error [validation]: grid file must hold a list of energies",
                err=True,
            )
            sys.exit(1)
        energies = [float(e) for e in grid]
    else:
        energies = [0.5, 0.5 + 1e-4, 0.5 + 1e-3, 0.5 + 1e-2, 0.5 + 1e-1]
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "alpha": alpha,
        "rho": rho,
        "energies": energies,
        "window": window,
        "side": side,
    }
    body = _run("/lap", payload, server)
    _emit("lap", body, output, fmt)


@cli.command()
@common_options
@click.option("--t", type=float, required=True, help="Evolution time.")
@click.option("--s", type=int, default=0)
@click.option("--r", type=int, default=0)
@click.option(
    "--method",
    type=click.Choice(["kgrid", "fourier_bessel", "both"]),
    default="kgrid",
)
def evolve(potential_path, dim, output, fmt, threads, tol, server, t, s, r, method):
    """Evolution kernel element [e^{-itH} P_ac]_{s,r}."""
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "t": t,
        "s": s,
        "r": r,
        "method": method,
    }
    if tol is not None:
        payload["cross_tol"] = tol
    body = _run("/evolve", payload, server)
    _emit("evolve", body, output, fmt)


@cli.command()
@common_options
@click.option("--tmin", type=float, default=1.0)
@click.option("--tmax", type=float, default=1000.0)
@click.option("--samples", type=int, default=40)
@click.option("--window", type=int, default=128, help="Site window half width.")
def decay(
    potential_path, dim, output, fmt, threads, tol, server, tmin, tmax, samples, window
):
    """Sup-norm decay scan of the evolution kernel over geometric times."""
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "t_min": tmin,
        "t_max": tmax,
        "samples": samples,
        "window": window,
        "threads": threads,
    }
    body = _run("/decay", payload, server)
    _emit("decay", body, output, fmt)


@cli.command()
@common_options
@click.option(
    "--suite",
    type=click.Choice(["all", "green", "evolve", "lap"]),
    default="all",
)
@click.option("--window", type=int, default=200, help="Oracle half width.")
def verify(potential_path, dim, output, fmt, threads, tol, server, suite, window):
    """Cross-check closed-form results against brute-force truncations."""
    payload = {
        "potential": _load_potential_payload(potential_path, dim),
        "suite": suite,
        "window": window,
        "threads": threads,
    }
    body = _run("/verify", payload, server)
    _emit("verify", body, output, fmt)
    if not body["passed"]:
        failed = [c["name"] for c in body["checks"] if not c["passed"]]
        click.echo(
            f"verify: {len(failed)} check(s) failed: {', '.join(failed)}", err=True
        )
        sys.exit(3)


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8000)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=host, port=port)


def main(argv=None):
    try:
        return cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        click.echo(f"error [validation]: {exc.format_message()}", err=True)
        return 1
    except click.Abort:
        return 1


if __name__ == "__main__":
    sys.exit(main())
