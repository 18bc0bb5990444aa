"""Gravity-field ingestion: coefficient files, normalization, zonal tables.

Coefficients are stored unnormalized and in the C_{n,0} sign convention
(J_n = -C_{n,0}); nothing downstream ever sees a J coefficient. Missing
degrees inside 2..n_max are explicit zeros so that degree toggles never
re-index the table.
"""

from __future__ import annotations

import io
import json
import math
import pathlib
from dataclasses import dataclass, field, replace

__all__ = [
    "CoefficientRecord",
    "GravityField",
    "FieldParseError",
    "FieldMetadataError",
    "DuplicateCoefficientError",
    "normalization_factor",
    "unnormalize",
    "normalize",
    "parse_field",
    "load_field",
    "bundled_field_path",
    "bundled_field",
]


class FieldParseError(ValueError):
    """Malformed coefficient file; carries the offending line number."""

    def __init__(self, message: str, line_number: int | None = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class FieldMetadataError(FieldParseError):
    """Required header metadata (mu, radius) missing."""


class DuplicateCoefficientError(FieldParseError):
    """The same (degree, order) appeared twice."""


@dataclass(frozen=True)
class CoefficientRecord:
    """One (n, m) harmonic coefficient pair as read from a file."""

    degree: int
    order: int
    c: float
    s: float
    normalized: bool

    def __post_init__(self):
        if not (0 <= self.order <= self.degree):
            raise ValueError(f"order {self.order} outside 0..{self.degree}")
        if self.order == 0 and self.s != 0.0:
            raise ValueError("S coefficient must be zero for m = 0")


def normalization_factor(n: int, m: int) -> float:
    """sqrt((2 - delta_0m) (2n+1) (n-m)!/(n+m)!), via lgamma for large n."""
    delta = 1.0 if m == 0 else 0.0
    log_ratio = math.lgamma(n - m + 1) - math.lgamma(n + m + 1)
    return math.sqrt((2.0 - delta) * (2 * n + 1) * math.exp(log_ratio))


def unnormalize(rec: CoefficientRecord) -> CoefficientRecord:
    """Convert a fully-normalized record to the unnormalized convention."""
    if not rec.normalized:
        raise ValueError("record is already unnormalized")
    f = normalization_factor(rec.degree, rec.order)
    return replace(rec, c=rec.c * f, s=rec.s * f, normalized=False)


def normalize(rec: CoefficientRecord) -> CoefficientRecord:
    """Inverse of :func:`unnormalize`."""
    if rec.normalized:
        raise ValueError("record is already normalized")
    f = normalization_factor(rec.degree, rec.order)
    return replace(rec, c=rec.c / f, s=rec.s / f, normalized=True)


@dataclass(frozen=True)
class GravityField:
    """Central-body constants plus the unnormalized zonal table C_{n,0}.

    ``zonals[n]`` indexes by degree (entries 0 and 1 are zero);
    tesseral records are retained for inspection but never feed the
    zonal dynamics.
    """

    name: str
    mu: float
    reference_radius: float
    rotation_rate: float
    zonals: tuple[float, ...]
    tesserals: tuple[CoefficientRecord, ...] = field(default=(), repr=False)

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.reference_radius <= 0:
            raise ValueError("reference radius must be positive")
        if len(self.zonals) < 3:
            raise ValueError("zonal table must reach at least degree 2")
        for n, c in enumerate(self.zonals):
            if not math.isfinite(c):
                raise ValueError(f"zonal C[{n}] is not finite")

    @property
    def n_max(self) -> int:
        return len(self.zonals) - 1

    def zonal(self, n: int) -> float:
        """C_{n,0}; zero outside the stored table."""
        if 0 <= n <= self.n_max:
            return self.zonals[n]
        return 0.0

    def truncated(self, n_max: int) -> "GravityField":
        """Field with zonals cut at ``n_max`` (>= 2)."""
        if not 2 <= n_max <= self.n_max:
            raise ValueError(f"truncation degree {n_max} outside 2..{self.n_max}")
        return replace(self, zonals=self.zonals[: n_max + 1])

    def to_json(self) -> str:
        payload = {
            "name": self.name,
            "mu": self.mu,
            "reference_radius": self.reference_radius,
            "rotation_rate": self.rotation_rate,
            "n_max": self.n_max,
            "zonals": {str(n): self.zonals[n] for n in range(2, self.n_max + 1)},
        }
        return json.dumps(payload, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GravityField":
        raw = json.loads(text)
        n_max = int(raw["n_max"])
        zonals = [0.0] * (n_max + 1)
        for key, value in raw["zonals"].items():
            zonals[int(key)] = float(value)
        return cls(
            name=raw["name"],
            mu=float(raw["mu"]),
            reference_radius=float(raw["reference_radius"]),
            rotation_rate=float(raw.get("rotation_rate", 0.0)),
            zonals=tuple(zonals),
        )

    def to_csv(self) -> str:
        """Serialize in the hand-editable CSV fixture format (unnormalized)."""
        lines = [
            f"#name={self.name}",
            f"#mu={self.mu!r}",
            f"#radius={self.reference_radius!r}",
            f"#rotation_rate={self.rotation_rate!r}",
            "#normalized=false",
        ]
        for n in range(2, self.n_max + 1):
            lines.append(f"{n},0,{self.zonals[n]!r},0.0")
        return "\n".join(lines) + "\n"


def _as_text(source) -> str:
    if isinstance(source, bytes):
        return source.decode("utf-8", errors="replace")
    if isinstance(source, str):
        return source
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        data = source.read()
        return data.decode("utf-8", errors="replace") if isinstance(data, bytes) else data
    raise TypeError(f"cannot read coefficient data from {type(source)!r}")


def _parse_float(token: str, line_number: int) -> float:
    try:
        return float(token.replace("D", "E").replace("d", "e"))
    except ValueError:
        raise FieldParseError(f"bad numeric token {token!r}", line_number) from None


def _build_field(
    name: str,
    mu: float | None,
    radius: float | None,
    rotation_rate: float,
    records: list[CoefficientRecord],
) -> GravityField:
    missing = [k for k, v in (("mu", mu), ("radius", radius)) if v is None]
    if missing:
        raise FieldMetadataError(f"missing header metadata: {', '.join(missing)}")
    n_max = max((r.degree for r in records if r.order == 0), default=2)
    n_max = max(n_max, 2)
    zonals = [0.0] * (n_max + 1)
    tesserals = []
    for rec in records:
        if rec.normalized:
            rec = unnormalize(rec)
        if rec.order == 0:
            if rec.degree >= 2:
                zonals[rec.degree] = rec.c
        else:
            tesserals.append(rec)
    return GravityField(
        name=name,
        mu=mu,
        reference_radius=radius,
        rotation_rate=rotation_rate,
        zonals=tuple(zonals),
        tesserals=tuple(tesserals),
    )


def _parse_icgem(text: str) -> GravityField:
    mu = radius = None
    rotation_rate = 0.0
    name = "unnamed"
    normalized = True
    records: list[CoefficientRecord] = []
    seen: set[tuple[int, int]] = set()
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(("#", "//")):
            continue
        tokens = line.split()
        key = tokens[0].lower()
        if key in ("gfc", "gfct"):
            if len(tokens) < 5:
                raise FieldParseError("gfc line needs degree, order, C, S", line_number)
            try:
                degree, order = int(tokens[1]), int(tokens[2])
            except ValueError:
                raise FieldParseError("bad degree/order", line_number) from None
            if (degree, order) in seen:
                raise DuplicateCoefficientError(
                    f"duplicate coefficient ({degree},{order})", line_number
                )
            seen.add((degree, order))
            c = _parse_float(tokens[3], line_number)
            s = _parse_float(tokens[4], line_number)
            if order == 0:
                s = 0.0
            try:
                records.append(CoefficientRecord(degree, order, c, s, normalized))
            except ValueError as exc:
                raise FieldParseError(str(exc), line_number) from None
        elif key in ("earth_gravity_constant", "gravity_constant"):
            mu = _parse_float(tokens[1], line_number)
        elif key == "radius":
            radius = _parse_float(tokens[1], line_number)
        elif key == "rotation_rate":
            rotation_rate = _parse_float(tokens[1], line_number)
        elif key == "modelname":
            name = tokens[1] if len(tokens) > 1 else name
        elif key == "norm":
            normalized = tokens[1].lower() != "unnormalized"
        # other header keywords (errors, tide_system, end_of_head, ...) ignored
    # ICGEM states mu and radius in SI; convert to km-based units
    if mu is not None and mu > 1.0e11:
        mu *= 1.0e-9
    if radius is not None and radius > 1.0e5:
        radius *= 1.0e-3
    return _build_field(name, mu, radius, rotation_rate, records)


def _parse_csv(text: str) -> GravityField:
    mu = radius = None
    rotation_rate = 0.0
    name = "unnamed"
    normalized = False
    records: list[CoefficientRecord] = []
    seen: set[tuple[int, int]] = set()
    for line_number, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" not in body:
                continue
            key, _, value = body.partition("=")
            key = key.strip().lower()
            value = value.strip()
            if key == "mu":
                mu = _parse_float(value, line_number)
            elif key == "radius":
                radius = _parse_float(value, line_number)
            elif key == "rotation_rate":
                rotation_rate = _parse_float(value, line_number)
            elif key == "name":
                name = value
            elif key == "normalized":
                normalized = value.lower() in ("1", "true", "yes")
            continue
        tokens = [t.strip() for t in line.split(",")]
        if len(tokens) != 4:
            raise FieldParseError("expected 'n,m,C,S'", line_number)
        try:
            degree, order = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise FieldParseError("bad degree/order", line_number) from None
        if (degree, order) in seen:
            raise DuplicateCoefficientError(
                f"duplicate coefficient ({degree},{order})", line_number
            )
        seen.add((degree, order))
        c = _parse_float(tokens[2], line_number)
        s = _parse_float(tokens[3], line_number)
        try:
            records.append(CoefficientRecord(degree, order, c, s, normalized))
        except ValueError as exc:
            raise FieldParseError(str(exc), line_number) from None
    return _build_field(name, mu, radius, rotation_rate, records)


def parse_field(source, fmt: str) -> GravityField:
    """Parse a coefficient stream in the given format ('icgem' or 'csv')."""
    text = _as_text(source)
    if fmt == "icgem":
        return _parse_icgem(text)
    if fmt == "csv":
        return _parse_csv(text)
    raise ValueError(f"unknown field format {fmt!r}")


def load_field(path, fmt: str | None = None) -> GravityField:
    """Load a coefficient file; format inferred from the suffix if omitted."""
    path = pathlib.Path(path)
    if fmt is None:
        fmt = "icgem" if path.suffix.lower() in (".gfc", ".icgem") else "csv"
    return parse_field(path.read_text(), fmt)


def bundled_field_path() -> pathlib.Path:
    return pathlib.Path(__file__).parent / "data" / "lunar_zonal_50.csv"


def bundled_field() -> GravityField:
    """The lunar zonal test field shipped with the package."""
    return load_field(bundled_field_path(), "csv")
