"""File formats: station lists, measurements, grid maps, PPM heatmaps.

Three small text/binary formats cover the full pipeline.  Readers refuse
malformed input with the offending line number rather than guessing, and
grid round-trips are bitwise exact (17 significant digits).
"""
from __future__ import annotations

import re

import numpy as np

from .exceptions import ParameterError, ParseError, ValidationError
from .grid import Grid, TecMap
from .sensing import Station

_STATION_HEADER = "id,lat_deg,lon_deg"
_MEASUREMENT_HEADER = "id,lat_deg,lon_deg,tecu"
_MEASUREMENT_HEADER_SHORT = "id,tecu"
_GRID_HEADER_RE = re.compile(
    r"^# grid lat_min=(\S+) lon_min=(\S+) dlat=(\S+) dlon=(\S+) P=(\d+) Q=(\d+)$")

# Colormap anchors: (index, (r, g, b)) — blue at cold, red at hot.
_ANCHORS = ((0, (0, 0, 255)), (85, (0, 255, 0)), (170, (255, 255, 0)), (255, (255, 0, 0)))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _float_field(raw: str, path, lineno: int, name: str) -> float:
    try:
        return float(raw)
    except ValueError:
        raise ParseError(path, lineno, f"{name} field {raw!r} is not a number") from None


def read_stations(path) -> list[Station]:
    """Parse a station network file (header ``id,lat_deg,lon_deg``)."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0].strip() != _STATION_HEADER:
        raise ParseError(path, 1, f"expected header {_STATION_HEADER!r}")
    stations = []
    seen = set()
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        if len(parts) != 3:
            raise ParseError(path, lineno, f"expected 3 fields, got {len(parts)}")
        sid = parts[0]
        if not sid:
            raise ParseError(path, lineno, "empty station id")
        lat = _float_field(parts[1], path, lineno, "lat_deg")
        lon = _float_field(parts[2], path, lineno, "lon_deg")
        if sid in seen:
            raise ValidationError(f"{path}: duplicate station id {sid!r} at line {lineno}")
        if not -90.0 <= lat <= 90.0:
            raise ValidationError(f"{path}:{lineno}: latitude {lat} outside [-90, 90]")
        if not -180.0 <= lon <= 180.0:
            raise ValidationError(f"{path}:{lineno}: longitude {lon} outside [-180, 180]")
        seen.add(sid)
        stations.append(Station(id=sid, lat=lat, lon=lon))
    if not stations:
        raise ValidationError(f"{path}: station file has a header but no stations")
    return stations


def write_stations(stations: list[Station], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_STATION_HEADER + "\n")
        for st in stations:
            fh.write(f"{st.id},{_fmt(st.lat)},{_fmt(st.lon)}\n")


def read_measurements(path, stations: list[Station] | None = None) -> list[tuple[Station, float]]:
    """Parse one epoch of measurements.

    The long header carries coordinates inline (blank lat/lon cells fall
    back to the station list); the short header ``id,tecu`` requires every
    id to resolve against ``stations``.
    """
    by_id = {st.id: st for st in stations} if stations else {}
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(path, 1, "empty measurement file")
    header = lines[0].strip()
    if header == _MEASUREMENT_HEADER:
        short = False
    elif header == _MEASUREMENT_HEADER_SHORT:
        short = True
    else:
        raise ParseError(path, 1, f"expected header {_MEASUREMENT_HEADER!r} "
                                  f"or {_MEASUREMENT_HEADER_SHORT!r}")
    out = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line.strip():
            continue
        parts = [p.strip() for p in line.split(",")]
        want = 2 if short else 4
        if len(parts) != want:
            raise ParseError(path, lineno, f"expected {want} fields, got {len(parts)}")
        sid = parts[0]
        raw_value = parts[1] if short else parts[3]
        value = _float_field(raw_value, path, lineno, "tecu")
        if not np.isfinite(value):
            raise ValidationError(f"{path}:{lineno}: non-finite tecu value")
        if short or (parts[1] == "" and parts[2] == ""):
            if sid not in by_id:
                raise ValidationError(
                    f"{path}:{lineno}: id {sid!r} has no coordinates and is not "
                    f"in the station list")
            station = by_id[sid]
        else:
            lat = _float_field(parts[1], path, lineno, "lat_deg")
            lon = _float_field(parts[2], path, lineno, "lon_deg")
            station = Station(id=sid, lat=lat, lon=lon)
        out.append((station, value))
    if not out:
        raise ValidationError(f"{path}: measurement file has a header but no rows")
    return out


def write_measurements(pairs: list[tuple[Station, float]], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(_MEASUREMENT_HEADER + "\n")
        for st, value in pairs:
            fh.write(f"{st.id},{_fmt(st.lat)},{_fmt(st.lon)},{_fmt(value)}\n")


def write_grid(tec_map: TecMap, path) -> None:
    """Serialize a map losslessly: header line plus P rows of Q values."""
    g = tec_map.grid
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# grid lat_min={_fmt(g.lat_min)} lon_min={_fmt(g.lon_min)} "
                 f"dlat={_fmt(g.dlat)} dlon={_fmt(g.dlon)} P={g.P} Q={g.Q}\n")
        for p in range(g.P):
            fh.write(",".join(_fmt(v) for v in tec_map.values[p]) + "\n")


def read_grid(path) -> TecMap:
    """Exact inverse of :func:`write_grid`."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ParseError(path, 1, "empty grid file")
    m = _GRID_HEADER_RE.match(lines[0])
    if not m:
        raise ParseError(path, 1, "malformed grid header")
    lat_min, lon_min, dlat, dlon = (float(m.group(i)) for i in range(1, 5))
    P, Q = int(m.group(5)), int(m.group(6))
    grid = Grid(lat_min=lat_min, lon_min=lon_min, dlat=dlat, dlon=dlon, P=P, Q=Q)
    body = [(lineno, line) for lineno, line in enumerate(lines[1:], start=2) if line.strip()]
    if len(body) != P:
        raise ParseError(path, len(lines), f"header says P={P} rows, found {len(body)}")
    values = np.empty((P, Q))
    for p, (lineno, line) in enumerate(body):
        parts = line.split(",")
        if len(parts) != Q:
            raise ParseError(path, lineno, f"header says Q={Q} values, found {len(parts)}")
        for q, raw in enumerate(parts):
            values[p, q] = _float_field(raw, path, lineno, "tec")
    return TecMap(grid, values)


def colormap() -> np.ndarray:
    """The fixed 256x3 uint8 blue-green-yellow-red map used by heatmaps."""
    table = np.empty((256, 3), dtype=np.uint8)
    for (i0, c0), (i1, c1) in zip(_ANCHORS[:-1], _ANCHORS[1:]):
        for j in range(i0, i1 + 1):
            t = (j - i0) / (i1 - i0)
            for ch in range(3):
                table[j, ch] = round(c0[ch] + t * (c1[ch] - c0[ch]))
    return table


def write_heatmap(tec_map: TecMap, path, vmin: float, vmax: float) -> None:
    """Render the map to a binary PPM, north (highest latitude) on top.

    Values map linearly from [vmin, vmax] onto the 256-entry colormap and
    clamp at the ends.
    """
    if not vmax > vmin:
        raise ParameterError(f"vmax ({vmax}) must exceed vmin ({vmin})")
    g = tec_map.grid
    idx = np.floor((tec_map.values - vmin) / (vmax - vmin) * 256.0).astype(np.int64)
    idx = np.clip(idx, 0, 255)
    rgb = colormap()[idx[::-1, :]]  # flip so row p = P-1 comes first
    with open(path, "wb") as fh:
        fh.write(f"P6\n{g.Q} {g.P}\n255\n".encode("ascii"))
        fh.write(rgb.tobytes())
