"""Flux-form discretization of H_a = -sum_jk d_j a_jk d_k on the periodic grid.

Diagonal coefficients enter through a conservative (flux) stencil with
arithmetic-mean midpoint values; off-diagonal 2-d coefficients use the
symmetric centered product rule. Assembly pairs every off-diagonal entry with
its transpose partner built from the same floats, so max|H - H^T| == 0 holds
bitwise, not just to tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .grid import GridSpec
from .symbol import SymbolField, translate_symbol


class StencilError(AssertionError):
    """Structural property of the assembled stencil failed (bug signal)."""


@dataclass(frozen=True)
class DiscreteOperator:
    """Sparse symmetric positive-semidefinite discretization of H_a."""

    grid: GridSpec
    matrix: sp.csr_matrix
    symbol: SymbolField

    def asymmetry(self) -> float:
        return float(np.abs((self.matrix - self.matrix.T).data).max(initial=0.0))

    def max_row_sum(self) -> float:
        ones = np.ones(self.grid.size)
        return float(np.abs(self.matrix @ ones).max())

    def scale(self) -> float:
        return float(np.abs(self.matrix.data).max(initial=0.0))


def _flat_index(grid: GridSpec, node_grids: list[np.ndarray]) -> np.ndarray:
    if grid.dim == 1:
        return node_grids[0]
    return node_grids[0] * grid.npoints + node_grids[1]


def _axis_shift_index(grid: GridSpec, axis: int, offset: int) -> np.ndarray:
    """Flat index of (node + offset*e_axis) for every node, C-order."""
    n = grid.npoints
    idx = [np.arange(n)] * grid.dim
    mesh = np.meshgrid(*idx, indexing="ij") if grid.dim == 2 else [np.arange(n)]
    mesh = [m.copy() for m in mesh]
    mesh[axis] = np.mod(mesh[axis] + offset, n)
    return _flat_index(grid, [m.ravel() for m in mesh]).ravel()


def _pair_shift_index(grid: GridSpec, off0: int, off1: int) -> np.ndarray:
    n = grid.npoints
    mesh = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    r = np.mod(mesh[0] + off0, n).ravel()
    c = np.mod(mesh[1] + off1, n).ravel()
    return r * n + c


def discretize(a: SymbolField) -> DiscreteOperator:
    """Assemble the flux-form stencil for the symbol a.

    dim = 1: (Hf)_i = -(a_{i+1/2}(f_{i+1}-f_i) - a_{i-1/2}(f_i-f_{i-1}))/h^2
    with midpoint coefficients a_{i+-1/2} = (a_i + a_{i+-1})/2, periodic.
    dim = 2 adds the same per-axis flux for a_00, a_11 and the centered
    product rule for the mixed coefficient a_01 = a_10.
    """
    grid = a.grid
    n = grid.size
    h2inv = 1.0 / grid.spacing**2
    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    vals: list[np.ndarray] = []

    def add(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    here = np.arange(n)
    for axis in range(grid.dim):
        c_field = a.entry(axis, axis).ravel()
        nbr = _axis_shift_index(grid, axis, +1)
        w = (c_field + c_field[nbr]) * (0.5 * h2inv)  # edge node -> node+e_axis
        add(here, here, w)
        add(nbr, nbr, w)
        add(here, nbr, -w)
        add(nbr, here, -w)

    if grid.dim == 2:
        c01 = a.entry(0, 1).reshape(grid.shape)
        cp0 = np.roll(c01, -1, axis=0).ravel()
        cm0 = np.roll(c01, +1, axis=0).ravel()
        cp1 = np.roll(c01, -1, axis=1).ravel()
        cm1 = np.roll(c01, +1, axis=1).ravel()
        s = 0.25 * h2inv
        # combined -d0(c d1) - d1(c d0), centered; each entry and its
        # transpose partner are sums of the same two floats
        for sign, coef, off0, off1 in (
            (-1.0, cp0 + cp1, +1, +1),
            (+1.0, cp0 + cm1, +1, -1),
            (+1.0, cm0 + cp1, -1, +1),
            (-1.0, cm0 + cm1, -1, -1),
        ):
            add(here, _pair_shift_index(grid, off0, off1), sign * s * coef)

    mat = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n, n),
    ).tocsr()
    mat.sum_duplicates()
    mat.sort_indices()

    op = DiscreteOperator(grid=grid, matrix=mat, symbol=a)
    asym = op.asymmetry()
    if asym > 1e-12 * max(op.scale(), 1.0):
        raise StencilError(f"raw stencil asymmetry {asym:.3e} exceeds 1e-12")
    return op


def translation_permutation(grid: GridSpec, shift) -> np.ndarray:
    """pi with pi[i] = flat index of (node_i + shift), shift grid aligned."""
    steps = grid.steps_for_shift(shift)
    if grid.dim == 1:
        return np.mod(np.arange(grid.npoints) + int(steps[0]), grid.npoints)
    n = grid.npoints
    mesh = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
    r = np.mod(mesh[0] + int(steps[0]), n).ravel()
    c = np.mod(mesh[1] + int(steps[1]), n).ravel()
    return r * n + c


def _csr_equal(a: sp.csr_matrix, b: sp.csr_matrix) -> bool:
    a = a.copy()
    b = b.copy()
    a.sum_duplicates(), a.sort_indices()
    b.sum_duplicates(), b.sort_indices()
    return (
        np.array_equal(a.indptr, b.indptr)
        and np.array_equal(a.indices, b.indices)
        and np.array_equal(a.data, b.data)
    )


def conjugated_operator(a: SymbolField, shift) -> DiscreteOperator:
    """Discretize the translated symbol and verify the conjugation identity.

    Asserts H_{T_{-x}a} == P_{-x} H_a P_x bit-exactly (both assembled);
    a mismatch signals a stencil bug.
    """
    translated = discretize(translate_symbol(a, shift))
    base = discretize(a)
    pi = translation_permutation(a.grid, shift)

    coo = base.matrix.tocoo()
    inv = np.empty_like(pi)
    inv[pi] = np.arange(pi.size)
    conj = sp.coo_matrix(
        (coo.data, (inv[coo.row], inv[coo.col])), shape=coo.shape
    ).tocsr()

    if not _csr_equal(translated.matrix, conj):
        raise StencilError("translated-symbol stencil differs from permutation conjugation")
    return translated
