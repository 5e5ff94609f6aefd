"""Torus geometry, attitude configurations and the grid snapshot format."""

from __future__ import annotations

import io
import os
from dataclasses import dataclass, field

import numpy as np

from entrench import rng as crng
from entrench.spectrum import check_spectrum

# row-major (drow, dcol) offsets; this order is the canonical neighbor order
MOORE_OFFSETS = ((-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1))

MAX_L = 127  # cells are stored as int8


@dataclass(frozen=True)
class TorusGeometry:
    width: int = 101
    height: int = 101

    def __post_init__(self):
        if int(self.width) != self.width or int(self.height) != self.height:
            raise ValueError("grid dimensions must be integers")
        if self.width < 3 or self.height < 3:
            raise ValueError(f"torus must be at least 3x3, got {self.width}x{self.height}")

    @property
    def size(self) -> int:
        return self.width * self.height

    @classmethod
    def parse(cls, text: str) -> "TorusGeometry":
        """Parse ``"WxH"`` (or a single integer for a square grid)."""
        parts = text.lower().split("x")
        try:
            if len(parts) == 1:
                w = h = int(parts[0])
            elif len(parts) == 2:
                w, h = int(parts[0]), int(parts[1])
            else:
                raise ValueError
        except ValueError:
            raise ValueError(f"grid must look like 'WxH', got {text!r}") from None
        return cls(w, h)

    def __str__(self) -> str:
        return f"{self.width}x{self.height}"

    def site(self, col: int, row: int) -> int:
        return (row % self.height) * self.width + (col % self.width)

    def coords(self, site: int) -> tuple[int, int]:
        """``(col, row)`` of a site index."""
        return site % self.width, site // self.width

    def neighbor_table(self) -> np.ndarray:
        """``(N, 8)`` int64 array of Moore neighbors for every site."""
        return _neighbor_table(self.width, self.height)

    def bond_partners(self) -> tuple[np.ndarray, np.ndarray]:
        """Right and down neighbors of every site: each 4-neighbor bond once."""
        rows, cols = np.divmod(np.arange(self.size), self.width)
        right = rows * self.width + (cols + 1) % self.width
        down = ((rows + 1) % self.height) * self.width + cols
        return right, down


_TABLE_CACHE: dict[tuple[int, int], np.ndarray] = {}


def _neighbor_table(width: int, height: int) -> np.ndarray:
    key = (width, height)
    table = _TABLE_CACHE.get(key)
    if table is None:
        rows, cols = np.divmod(np.arange(width * height), width)
        table = np.empty((width * height, 8), dtype=np.int64)
        for k, (dr, dc) in enumerate(MOORE_OFFSETS):
            table[:, k] = ((rows + dr) % height) * width + (cols + dc) % width
        table.setflags(write=False)
        _TABLE_CACHE[key] = table
    return table


def moore_neighbors(geometry: TorusGeometry, site: int) -> np.ndarray:
    """The 8 toroidally wrapped neighbors of ``site`` in canonical order."""
    if not 0 <= site < geometry.size:
        raise IndexError(f"site {site} out of range for {geometry} grid")
    return geometry.neighbor_table()[site].copy()


@dataclass
class Configuration:
    """One attitude per site, stored row-major as a flat int8 array."""

    geometry: TorusGeometry
    L: int
    cells: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.L = check_spectrum(self.L)
        if self.L > MAX_L:
            raise ValueError(f"L={self.L} exceeds the supported maximum {MAX_L}")
        cells = np.asarray(self.cells)
        if cells.size != self.geometry.size:
            raise ValueError(f"expected {self.geometry.size} cells, got {cells.size}")
        cells = np.ascontiguousarray(cells.reshape(-1), dtype=np.int8)
        if np.any(cells == 0) or np.any(np.abs(cells.astype(np.int16)) > self.L):
            raise ValueError(f"cells must hold nonzero attitudes within ±{self.L}")
        self.cells = cells

    @property
    def size(self) -> int:
        return self.geometry.size

    @property
    def grid(self) -> np.ndarray:
        """``(height, width)`` view of the cells."""
        return self.cells.reshape(self.geometry.height, self.geometry.width)

    def copy(self) -> "Configuration":
        return Configuration(self.geometry, self.L, self.cells.copy())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Configuration):
            return NotImplemented
        return (self.geometry == other.geometry and self.L == other.L
                and np.array_equal(self.cells, other.cells))

    def to_text(self, step: int = 0) -> str:
        """Grid snapshot: header ``W H L step`` then one row per line."""
        buf = io.StringIO()
        g = self.geometry
        buf.write(f"{g.width} {g.height} {self.L} {step}\n")
        np.savetxt(buf, self.grid, fmt="%d", delimiter=" ")
        return buf.getvalue()

    @classmethod
    def from_text(cls, text: str) -> tuple["Configuration", int]:
        """Inverse of :meth:`to_text`; returns ``(configuration, step)``."""
        tokens = text.split()
        if len(tokens) < 4:
            raise ValueError("snapshot is missing its 'W H L step' header")
        w, h, L, step = (int(t) for t in tokens[:4])
        values = np.array(tokens[4:], dtype=np.int64)
        if values.size != w * h:
            raise ValueError(f"snapshot declares {w}x{h} but holds {values.size} values")
        return cls(TorusGeometry(w, h), L, values), step

    def save(self, path: str | os.PathLike, step: int = 0) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_text(step))

    @classmethod
    def load(cls, path: str | os.PathLike) -> tuple["Configuration", int]:
        with open(path) as fh:
            return cls.from_text(fh.read())


def uniform_init(geometry: TorusGeometry, L: int, seed: int) -> Configuration:
    """Each cell drawn independently and uniformly from the 2L attitudes."""
    L = check_spectrum(L)
    w = crng.words(seed, 0, geometry.size, crng.STREAM_INIT)[:, 0].astype(np.uint64)
    idx = ((w * np.uint64(2 * L)) >> np.uint64(32)).astype(np.int64)
    cells = np.where(idx < L, idx - L, idx - L + 1)
    return Configuration(geometry, L, cells)


def droplet_init(geometry: TorusGeometry, L: int, radius: float = 25.0,
                 inside: int | None = None, outside: int | None = None) -> Configuration:
    """Disc of ``inside`` (default +L) around the center cell, ``outside`` (default -L) elsewhere.

    The center cell is ``(width // 2, height // 2)``, the exact center of an
    odd-sized grid.
    """
    L = check_spectrum(L)
    if not radius > 0:
        raise ValueError(f"droplet radius must be positive, got {radius}")
    if radius >= min(geometry.width, geometry.height) / 2:
        raise ValueError(f"radius {radius} too large for a {geometry} grid")
    inside = L if inside is None else inside
    outside = -L if outside is None else outside
    rows, cols = np.divmod(np.arange(geometry.size), geometry.width)
    d2 = (cols - geometry.width // 2) ** 2 + (rows - geometry.height // 2) ** 2
    cells = np.where(d2 <= radius * radius, inside, outside)
    return Configuration(geometry, L, cells)
