"""Local equirectangular projection of lon/lat records to planar meters."""

import math
from typing import List, Tuple

from app.schemas.geoentity import GeoentityRecord
from exceptions.exceptions import GeometryValidationException

EARTH_RADIUS_M = 6_371_000.0
MAX_ABS_LATITUDE = 85.0


def _check_latitude(lat: float) -> None:
    if not abs(lat) < MAX_ABS_LATITUDE:
        raise GeometryValidationException(
            f"latitude {lat} outside the supported range (|lat| < {MAX_ABS_LATITUDE})"
        )


def project_lonlat(
    records: List[GeoentityRecord], origin: Tuple[float, float]
) -> List[GeoentityRecord]:
    """Project records given in degrees of lon/lat to meters around ``origin``."""
    lon0, lat0 = origin
    _check_latitude(lat0)
    lon0_rad, lat0_rad = math.radians(lon0), math.radians(lat0)
    cos_lat0 = math.cos(lat0_rad)

    projected = []
    for record in records:
        coords = []
        for lon, lat in record.coords:
            _check_latitude(lat)
            x = EARTH_RADIUS_M * (math.radians(lon) - lon0_rad) * cos_lat0
            y = EARTH_RADIUS_M * (math.radians(lat) - lat0_rad)
            coords.append((x, y))
        projected.append(record.model_copy(update={"coords": coords}))
    return projected
