"""Periodic grid geometry shared by every module.

All fields live on the torus [0, L)^dim sampled at N equispaced nodes per
axis. Keeping L/N an exact binary ratio makes node coordinates, translations
and torus wrapping exact in floating point, which the translation and
conjugation identities rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class OffGridError(ValueError):
    """A coordinate or shift is not aligned with the grid."""


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid on [0, L)^dim with spacing h = L/N.

    Invariants: dim in {1, 2}; h*N == L exactly in float arithmetic
    (construction fails otherwise, so pick N and L with an exact binary
    ratio; powers of two are recommended).
    """

    dim: int
    length: float
    npoints: int

    def __post_init__(self) -> None:
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        if not self.length > 0:
            raise ValueError("length must be positive")
        if self.npoints < 4:
            raise ValueError("need at least 4 nodes per axis")
        if self.spacing * self.npoints != self.length:
            raise ValueError(
                "h*N must reproduce L exactly; choose N, L with a binary ratio"
            )

    @property
    def spacing(self) -> float:
        return self.length / self.npoints

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.npoints,) * self.dim

    @property
    def size(self) -> int:
        return self.npoints**self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    def axis_coords(self) -> np.ndarray:
        return np.arange(self.npoints) * self.spacing

    def node_coords(self) -> np.ndarray:
        """Coordinates of all nodes, shape (size, dim), C-order flattening."""
        ax = self.axis_coords()
        if self.dim == 1:
            return ax[:, None]
        xx, yy = np.meshgrid(ax, ax, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def wrap(self, delta: np.ndarray) -> np.ndarray:
        """Wrap coordinate differences into [-L/2, L/2) per component."""
        half = self.length / 2.0
        return np.mod(np.asarray(delta) + half, self.length) - half

    def steps_for_shift(self, shift) -> np.ndarray:
        """Integer node steps for a grid-aligned shift vector (exact check)."""
        shift = np.atleast_1d(np.asarray(shift, dtype=float))
        if shift.shape != (self.dim,):
            raise OffGridError(f"shift must have {self.dim} components")
        steps = np.rint(shift / self.spacing).astype(np.int64)
        if np.any(steps * self.spacing != shift):
            raise OffGridError(f"shift {shift} is not a multiple of h = {self.spacing}")
        return steps

    def node_indices(self, coords: np.ndarray) -> np.ndarray:
        """Flat node indices for on-grid coordinates (exact match required)."""
        coords = np.atleast_2d(np.asarray(coords, dtype=float))
        idx = np.rint(coords / self.spacing).astype(np.int64)
        if np.any(idx * self.spacing != coords):
            raise OffGridError("coordinates are not grid nodes")
        idx = np.mod(idx, self.npoints)
        if self.dim == 1:
            return idx[:, 0]
        return idx[:, 0] * self.npoints + idx[:, 1]

    def inner(self, f: np.ndarray, g: np.ndarray) -> float:
        """Weighted inner product h^dim * sum(f*g)."""
        return float(self.cell_volume * np.dot(np.ravel(f), np.ravel(g)))

    def norm(self, f: np.ndarray) -> float:
        return float(np.sqrt(self.cell_volume) * np.linalg.norm(np.ravel(f)))
