"""Uniform grid index over bounding boxes."""

import math
from collections import defaultdict
from typing import Dict, Iterable, List, Set, Tuple

from app.schemas.geoentity import Bounds


class GridIndex:
    """Buckets ids by the grid cells their bounding boxes overlap."""

    def __init__(self, cell_size: float):
        """Initialize with the cell edge length in meters."""
        if cell_size <= 0:
            raise ValueError("cell_size must be positive")
        self.cell_size = cell_size
        self._cells: Dict[Tuple[int, int], List[int]] = defaultdict(list)
        self._bounds: Dict[int, Bounds] = {}

    def _cell_range(self, bounds: Bounds) -> Iterable[Tuple[int, int]]:
        x0, y0, x1, y1 = bounds
        i0, j0 = math.floor(x0 / self.cell_size), math.floor(y0 / self.cell_size)
        i1, j1 = math.floor(x1 / self.cell_size), math.floor(y1 / self.cell_size)
        for i in range(i0, i1 + 1):
            for j in range(j0, j1 + 1):
                yield i, j

    def insert(self, _id: int, bounds: Bounds) -> None:
        """Register an id with its bounding box."""
        self._bounds[_id] = bounds
        for cell in self._cell_range(bounds):
            self._cells[cell].append(_id)

    def query(self, bounds: Bounds) -> List[int]:
        """Ids whose bounding boxes intersect the query box, sorted."""
        qx0, qy0, qx1, qy1 = bounds
        found: Set[int] = set()
        for cell in self._cell_range(bounds):
            for _id in self._cells.get(cell, ()):
                x0, y0, x1, y1 = self._bounds[_id]
                if x0 <= qx1 and qx0 <= x1 and y0 <= qy1 and qy0 <= y1:
                    found.add(_id)
        return sorted(found)

    def query_radius(self, bounds: Bounds, radius: float) -> List[int]:
        """Ids whose boxes come within ``radius`` of the query box."""
        x0, y0, x1, y1 = bounds
        return self.query((x0 - radius, y0 - radius, x1 + radius, y1 + radius))

    def __len__(self) -> int:
        """Number of indexed ids."""
        return len(self._bounds)
