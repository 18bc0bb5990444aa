"""Command-line surface: field inspection, verification, maps, frozen orbits.

Angles are degrees at this boundary and radians everywhere inside.
Exit codes: 0 success, 1 verification failure, 2 usage or parse error.
"""

from __future__ import annotations

import json
import math
import pathlib
import sys

import click

from . import bench as bench_mod
from . import verify as verify_mod
from .dynamics import PhaseMapSpec, frozen_2d, frozen_on_axis, phase_map
from .gravity import FieldParseError, GravityField, bundled_field_path, load_field
from .hamiltonian import MeanModelSpec
from .kaula import build_mean_series
from .svgplot import render_svg

FIELD_ENV = "ZONALFLOW_FIELD"


def _load(field_path, fmt):
    path = field_path or bundled_field_path()
    try:
        return load_field(path, fmt)
    except FileNotFoundError as exc:
        raise click.UsageError(f"field file not found: {exc}")
    except FieldParseError as exc:
        raise click.UsageError(f"cannot parse field file {path}: {exc}")


def _write_or_print(text: str, out):
    if out:
        pathlib.Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


field_option = click.option(
    "--field", "field_path", envvar=FIELD_ENV, type=click.Path(), default=None,
    help=f"Coefficient file (default: bundled lunar field; env {FIELD_ENV}).",
)
format_option = click.option(
    "--format", "fmt", type=click.Choice(["icgem", "csv"]), default=None,
    help="Field file format (inferred from the suffix when omitted).",
)


@click.group()
@click.option("--verbose", is_flag=True, default=False,
              help="Emit solver diagnostics (seed convergence counts, ...).")
@click.pass_context
def main(ctx, verbose):
    """Mean-elements zonal dynamics toolkit."""
    ctx.ensure_object(dict)
    ctx.obj["verbose"] = verbose
    import logging

    logging.basicConfig(level=logging.INFO if verbose else logging.WARNING)


@main.group()
def field():
    """Gravity-field file operations."""


@field.command("info")
@field_option
@format_option
def field_info(field_path, fmt):
    """Print a summary of a coefficient file."""
    f = _load(field_path, fmt)
    click.echo(f"name:             {f.name}")
    click.echo(f"mu [km^3/s^2]:    {f.mu!r}")
    click.echo(f"radius [km]:      {f.reference_radius!r}")
    click.echo(f"rotation [rad/s]: {f.rotation_rate!r}")
    click.echo(f"n_max:            {f.n_max}")
    click.echo(f"tesserals kept:   {len(f.tesserals)}")
    for n in range(2, min(f.n_max, 8) + 1):
        click.echo(f"  C[{n},0] = {f.zonal(n)!r}")
    if f.n_max > 8:
        click.echo(f"  ... through degree {f.n_max}")


@main.command()
@field_option
@format_option
@click.option("--quick", is_flag=True, help="Reduced sample sizes for a smoke run.")
@click.option("--out", type=click.Path(), default=None, help="Write the JSON report here.")
def verify(field_path, fmt, quick, out):
    """Run the oracle verification suite; exit 1 on any failed tolerance."""
    f = _load(field_path, fmt)
    checks = verify_mod.run_suite(f, quick=quick)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        click.echo(
            f"[{status}] {c.name}: worst {c.worst:.3e} vs tol {c.tolerance:.1e} "
            f"({c.detail}, {c.seconds:.1f}s)"
        )
    report = verify_mod.report_json(checks)
    if out:
        pathlib.Path(out).write_text(report)
    if not all(c.passed for c in checks):
        sys.exit(1)


@main.group()
def series():
    """Averaged-series operations."""


@series.command("dump")
@field_option
@format_option
@click.option("--nmax", type=int, default=None, help="Truncation degree (default field n_max).")
@click.option("--out", type=click.Path(), default=None)
def series_dump(field_path, fmt, nmax, out):
    """Dump the structured averaged term list as JSON."""
    f = _load(field_path, fmt)
    nmax = nmax or f.n_max
    if not 2 <= nmax <= f.n_max:
        raise click.UsageError(f"--nmax must lie in 2..{f.n_max}")
    _write_or_print(build_mean_series(f, nmax).to_json() + "\n", out)


def _spec_from_options(f, nmax, sma, alt, inc, grid, j2sq, centering, e_max=None):
    if (sma is None) == (alt is None):
        raise click.UsageError("exactly one of --sma or --alt is required")
    a = sma if sma is not None else f.reference_radius + alt
    nmax = nmax or f.n_max
    if not 2 <= nmax <= f.n_max:
        raise click.UsageError(f"--nmax must lie in 2..{f.n_max}")
    model = MeanModelSpec.for_field(
        f, n_max=nmax, include_j2sq=j2sq, include_centering=centering
    )
    try:
        return PhaseMapSpec(
            a=a, i_circ=math.radians(inc), model=model, resolution=grid, e_max=e_max
        )
    except ValueError as exc:
        raise click.UsageError(str(exc))


common_map_options = [
    click.option("--nmax", type=int, default=None, help="Truncation degree."),
    click.option("--sma", type=float, default=None, help="Semi-major axis [km]."),
    click.option("--alt", type=float, default=None, help="Altitude over the reference radius [km]."),
    click.option("--inc", type=float, required=True, help="Circular-orbit inclination [deg]."),
    click.option("--grid", type=int, default=128, show_default=True, help="Grid resolution."),
    click.option("--j2sq/--no-j2sq", "j2sq", default=None,
                 help="Include second-order C20^2 terms (default: body heuristic)."),
    click.option("--centering", is_flag=True, default=False,
                 help="Keep the centering term of the second-order block."),
    click.option("--emax", type=float, default=None, help="Outer eccentricity of the grid."),
]


def add_options(options):
    def wrap(fn):
        for opt in reversed(options):
            fn = opt(fn)
        return fn
    return wrap


@main.command()
@field_option
@format_option
@add_options(common_map_options)
@click.option("--emit", default="json", show_default=True,
              help="Comma-separated outputs: json,csv,svg.")
@click.option("--out", type=click.Path(), required=True,
              help="Output path stem (suffixes added per format).")
def phasemap(field_path, fmt, nmax, sma, alt, inc, grid, j2sq, centering, emax, emit, out):
    """Compute an eccentricity-vector phase map and emit files."""
    f = _load(field_path, fmt)
    spec = _spec_from_options(f, nmax, sma, alt, inc, grid, j2sq, centering, emax)
    kinds = [k.strip() for k in emit.split(",") if k.strip()]
    unknown = set(kinds) - {"json", "csv", "svg"}
    if unknown:
        raise click.UsageError(f"unknown --emit kinds: {sorted(unknown)}")
    pmap = phase_map(spec).with_frozen(frozen_2d(spec))
    stem = pathlib.Path(out)
    payload = pmap.to_dict()
    if "json" in kinds:
        stem.with_suffix(".json").write_text(json.dumps(payload, sort_keys=True) + "\n")
    if "csv" in kinds:
        stem.with_suffix(".csv").write_text(pmap.to_csv())
    if "svg" in kinds:
        stem.with_suffix(".svg").write_text(render_svg(payload))
    click.echo(
        f"phase map {spec.resolution}x{spec.resolution}, degrees "
        f"2..{spec.model.n_max}, {len(pmap.frozen_orbits)} frozen orbits "
        f"-> {stem}.{{{','.join(kinds)}}}"
    )


@main.command()
@field_option
@format_option
@add_options(common_map_options)
def frozen(field_path, fmt, nmax, sma, alt, inc, grid, j2sq, centering, emax):
    """Locate frozen orbits; prints (e*, omega*, class, impact) rows."""
    f = _load(field_path, fmt)
    spec = _spec_from_options(f, nmax, sma, alt, inc, grid, j2sq, centering, emax)
    orbits = frozen_2d(spec)
    click.echo(f"# e_impact = {spec.e_impact!r}")
    click.echo("e,omega_deg,classification,impact,gradient_norm")
    for fo in sorted(orbits, key=lambda o: o.e):
        click.echo(
            f"{fo.e!r},{math.degrees(fo.omega)!r},{fo.classification},"
            f"{int(fo.impact)},{fo.gradient_norm!r}"
        )


@main.command("bench")
@field_option
@format_option
@click.option("--degrees", default="10:40:5", show_default=True,
              help="Degree range start:stop[:step] for construction timing.")
@click.option("--eval-degree", type=int, default=None,
              help="Also time evaluation at this degree.")
@click.option("--points", type=int, default=16, show_default=True)
@click.option("--reps", type=int, default=5, show_default=True)
@click.option("--out", type=click.Path(), default=None, help="CSV output path.")
def bench(field_path, fmt, degrees, eval_degree, points, reps, out):
    """Construction/evaluation benchmark; emits the record CSV."""
    f = _load(field_path, fmt)
    try:
        parts = [int(x) for x in degrees.split(":")]
        rng = range(parts[0], parts[1] + 1, parts[2] if len(parts) > 2 else 1)
    except (ValueError, IndexError):
        raise click.UsageError("--degrees must be start:stop[:step]")
    records = bench_mod.bench_construction(f, list(rng), repetitions=reps)
    if eval_degree:
        records.extend(bench_mod.bench_evaluation(f, eval_degree, n_points=points, repetitions=reps))
    csv_text = bench_mod.records_to_csv(records)
    _write_or_print(csv_text, out)
    try:
        gap = bench_mod.loglog_slope(records, "brute_force") - bench_mod.loglog_slope(records, "kaula")
        click.echo(f"# log-log construction slope gap (brute - kaula): {gap:.2f}", err=True)
    except ValueError:
        pass


@main.command()
@click.option("--port", type=int, default=8700, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--fields-dir", type=click.Path(exists=True), default=None,
              help="Directory of coefficient files to serve (bundled field always included).")
@click.option("--ui-dir", type=click.Path(exists=True), default=None,
              help="Static explorer bundle to serve under /ui (e.g. frontend/).")
def serve(port, host, fields_dir, ui_dir):
    """Start the JSON-over-HTTP facade for the explorer UI."""
    import uvicorn

    from .service import create_app

    app = create_app(fields_dir=fields_dir, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
