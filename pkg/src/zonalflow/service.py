"""Stateless JSON-over-HTTP facade for the explorer UI.

Thin adapters over the dynamics/bench modules: a field catalog, phase
maps, frozen-orbit queries, an incrementally streamed model ramp, and a
cached benchmark endpoint. Malformed requests return 400; structurally
valid but physically infeasible ones return 422.
"""

from __future__ import annotations

import json
import math
import pathlib
import threading
from functools import lru_cache

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, Response, StreamingResponse

from . import bench as bench_mod
from .dynamics import PhaseMapSpec, frozen_2d, frozen_both_axes, phase_map
from .gravity import FieldParseError, GravityField, bundled_field_path, load_field
from .hamiltonian import MeanModelSpec

__all__ = ["create_app"]

MAX_RESOLUTION = 512


def _load_fields(fields_dir) -> dict[str, GravityField]:
    fields: dict[str, GravityField] = {}
    bundled = bundled_field_path()
    fields[bundled.stem] = load_field(bundled, "csv")
    if fields_dir:
        for path in sorted(pathlib.Path(fields_dir).iterdir()):
            if path.suffix.lower() not in (".csv", ".gfc", ".icgem"):
                continue
            try:
                fields[path.stem] = load_field(path)
            except FieldParseError:
                continue
    return fields


def _field_summary(field_id: str, f: GravityField) -> dict:
    return {
        "id": field_id,
        "name": f.name,
        "mu": f.mu,
        "reference_radius": f.reference_radius,
        "rotation_rate": f.rotation_rate,
        "n_max": f.n_max,
    }


class _BadRequest(HTTPException):
    def __init__(self, message: str):
        super().__init__(status_code=400, detail=message)


class _Infeasible(HTTPException):
    def __init__(self, message: str):
        super().__init__(status_code=422, detail=message)


def _get(body: dict, key: str, kind, default=None, required=False):
    if key not in body:
        if required:
            raise _BadRequest(f"missing field {key!r}")
        return default
    try:
        return kind(body[key])
    except (TypeError, ValueError):
        raise _BadRequest(f"field {key!r} must be {kind.__name__}")


def create_app(
    fields_dir=None,
    fields: dict[str, GravityField] | None = None,
    ui_dir=None,
) -> FastAPI:
    app = FastAPI(title="zonalflow service")
    catalog = fields if fields is not None else _load_fields(fields_dir)
    if not catalog:
        raise ValueError("service needs at least one gravity field")
    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/ui", StaticFiles(directory=str(ui_dir), html=True), name="ui")
    bench_cache: dict[str, str] = {}
    bench_lock = threading.Lock()

    def parse_spec(body: dict) -> PhaseMapSpec:
        if not isinstance(body, dict):
            raise _BadRequest("request body must be a JSON object")
        field_id = _get(body, "field", str, default=next(iter(catalog)))
        if field_id not in catalog:
            raise _BadRequest(f"unknown field {field_id!r}")
        f = catalog[field_id]
        n_max = _get(body, "n_max", int, default=f.n_max)
        if not 2 <= n_max <= f.n_max:
            raise _BadRequest(f"n_max must lie in 2..{f.n_max}")
        degrees = body.get("degrees")
        if degrees is not None:
            if not isinstance(degrees, list) or not all(isinstance(d, int) for d in degrees):
                raise _BadRequest("degrees must be a list of integers")
            if not degrees:
                raise _BadRequest("degrees must not be empty")
            if any(not 2 <= d <= n_max for d in degrees):
                raise _BadRequest(f"degree toggles must lie in 2..{n_max}")
        a_km = _get(body, "a_km", float)
        altitude = _get(body, "altitude_km", float)
        if (a_km is None) == (altitude is None):
            raise _BadRequest("exactly one of a_km or altitude_km is required")
        a = a_km if a_km is not None else f.reference_radius + altitude
        i_circ_deg = _get(body, "i_circ_deg", float, required=True)
        resolution = _get(body, "resolution", int, default=128)
        if not 16 <= resolution <= MAX_RESOLUTION:
            raise _BadRequest(f"resolution must lie in 16..{MAX_RESOLUTION}")
        include_j2sq = body.get("include_j2sq")
        include_centering = bool(body.get("include_centering", False))
        e_max = _get(body, "e_max", float)
        model = MeanModelSpec.for_field(
            f,
            n_max=n_max,
            include_j2sq=include_j2sq,
            include_centering=include_centering,
            degrees=degrees,
        )
        try:
            return PhaseMapSpec(
                a=a,
                i_circ=math.radians(i_circ_deg),
                model=model,
                resolution=resolution,
                e_max=e_max,
            )
        except ValueError as exc:
            raise _Infeasible(str(exc))

    @lru_cache(maxsize=64)
    def cached_map(field_id, degrees, a, i_circ, resolution, j2sq, centering, e_max, search):
        f = catalog[field_id]
        model = MeanModelSpec(
            field=f,
            n_max=max(degrees),
            include_j2sq=j2sq,
            include_centering=centering,
            degrees=degrees,
        )
        spec = PhaseMapSpec(
            a=a, i_circ=i_circ, model=model, resolution=resolution, e_max=e_max
        )
        if search == "full":
            frozen = frozen_2d(spec)
        elif search == "axis":
            # interactive default: the +-pi/2 axes carry the frozen orbits of
            # zonal-only models (the full chart search is opt-in)
            frozen = frozen_both_axes(spec)
        else:
            frozen = []
        pmap = phase_map(spec).with_frozen(frozen)
        return json.dumps(pmap.to_dict(), sort_keys=True)

    def map_payload(spec: PhaseMapSpec, field_id: str, search: str = "axis") -> str:
        return cached_map(
            field_id,
            tuple(spec.model.active_degrees),
            spec.a,
            spec.i_circ,
            spec.resolution,
            spec.model.include_j2sq,
            spec.model.include_centering,
            spec.e_max,
            search,
        )

    async def body_of(request: Request) -> dict:
        try:
            return json.loads(await request.body() or b"{}")
        except json.JSONDecodeError:
            raise _BadRequest("request body is not valid JSON")

    @app.get("/fields")
    def fields_endpoint():
        return [_field_summary(fid, f) for fid, f in sorted(catalog.items())]

    def search_of(body: dict) -> str:
        search = body.get("frozen_search", "axis")
        if search not in ("axis", "full", "none"):
            raise _BadRequest("frozen_search must be one of axis, full, none")
        return search

    @app.post("/phasemap")
    async def phasemap_endpoint(request: Request):
        body = await body_of(request)
        field_id = _get(body, "field", str, default=next(iter(catalog)))
        spec = parse_spec(body)
        # the cache already holds serialized JSON; skip a decode/encode pass
        return Response(
            content=map_payload(spec, field_id, search_of(body)),
            media_type="application/json",
        )

    @app.post("/frozen")
    async def frozen_endpoint(request: Request):
        body = await body_of(request)
        field_id = _get(body, "field", str, default=next(iter(catalog)))
        spec = parse_spec(body)
        search = body.get("frozen_search", "full")
        if search not in ("axis", "full"):
            raise _BadRequest("frozen_search must be axis or full")
        payload = json.loads(map_payload(spec, field_id, search))
        return JSONResponse(
            content={"e_impact": payload["e_impact"], "frozen": payload["frozen"]}
        )

    @app.post("/ramp")
    async def ramp_endpoint(request: Request):
        body = await body_of(request)
        field_id = _get(body, "field", str, default=next(iter(catalog)))
        ramp_degrees = body.get("ramp_degrees")
        if not isinstance(ramp_degrees, list) or not ramp_degrees:
            raise _BadRequest("ramp_degrees must be a non-empty list of integers")
        if not all(isinstance(d, int) for d in ramp_degrees):
            raise _BadRequest("ramp_degrees must be a non-empty list of integers")
        base = dict(body)
        base.pop("ramp_degrees", None)
        base.pop("degrees", None)
        specs = []
        for d in ramp_degrees:
            frame_body = dict(base)
            frame_body["n_max"] = d
            specs.append((d, parse_spec(frame_body)))

        def frames():
            for d, spec in specs:
                payload = map_payload(spec, field_id)
                yield json.dumps({"degree": d, "map": json.loads(payload)}, sort_keys=True) + "\n"

        return StreamingResponse(frames(), media_type="application/x-ndjson")

    @app.get("/bench")
    def bench_endpoint(degrees: str = "4:10:3"):
        with bench_lock:
            hit = degrees in bench_cache
            if not hit:
                try:
                    parts = [int(x) for x in degrees.split(":")]
                    rng = list(range(parts[0], parts[1] + 1, parts[2] if len(parts) > 2 else 1))
                except (ValueError, IndexError):
                    raise _BadRequest("degrees must be start:stop[:step]")
                if not rng:
                    raise _BadRequest("empty degree range")
                field0 = next(iter(catalog.values()))
                records = bench_mod.bench_construction(field0, rng)
                bench_cache[degrees] = json.dumps(
                    {"records": [r.to_dict() for r in records]}, sort_keys=True
                )
            payload = json.loads(bench_cache[degrees])
        payload["cached"] = hit
        return JSONResponse(content=payload)

    return app
