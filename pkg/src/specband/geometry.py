"""Measures, point sets, windowed Beurling densities and averaged traces.

Window centers are always the full set of grid nodes. Balls use the torus
metric. Inclusion rule for counting and for measure quadrature: a target at
wrapped offset d from the center is inside B_r when |d| < r, and on the
boundary |d| = r exactly when d is lexicographically negative (first nonzero
component < 0). In one dimension this is the half-open window [x-r, x+r),
which makes uniform-grid densities exact at radii that are multiples of the
spacing; see the design notes. Localization-style tail sums instead exclude
the closed ball (|d| > r), matching their defining expressions.

Densities on a torus are finite-radius proxies for the paper-style limits:
radii are capped at L/4 and the full curve is reported rather than any
extrapolation, so residual finite-size gaps stay visible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .grid import GridSpec
from .spectral import KernelMatrix
from .symbol import SymbolField

_CHUNK = 512


class RadiusError(ValueError):
    """A window radius exceeds its torus-contamination cap."""


class WeightError(ValueError):
    """A weight field is not strictly positive."""


class PointGenerationError(ValueError):
    """A point-set generator could not satisfy its constraints."""


# ---------------------------------------------------------------------------
# Weights


@dataclass(frozen=True)
class WeightField:
    """Strictly positive node weights defining d(mu) = w dx."""

    grid: GridSpec
    values: np.ndarray
    kind: str

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float).ravel()
        if v.shape != (self.grid.size,):
            raise ValueError("weights must have one value per node")
        if not np.all(v > 0.0) or not np.all(np.isfinite(v)):
            raise WeightError("weights must satisfy 0 < min <= max < inf")
        object.__setattr__(self, "values", v)


def make_weight(
    kind: str,
    grid: GridSpec,
    *,
    symbol: SymbolField | None = None,
    kernel: KernelMatrix | None = None,
    custom: np.ndarray | None = None,
) -> WeightField:
    """Build a weight field: lebesgue, nu (det a^{-1/2}), kernel_diagonal, custom."""
    if kind == "lebesgue":
        values = np.ones(grid.size)
    elif kind == "nu":
        if symbol is None:
            raise ValueError("nu weight needs the symbol field")
        values = symbol.det().ravel() ** -0.5
    elif kind == "kernel_diagonal":
        if kernel is None:
            raise ValueError("kernel_diagonal weight needs a kernel")
        values = kernel.diagonal()
    elif kind == "custom":
        if custom is None:
            raise ValueError("custom weight needs values")
        values = np.asarray(custom, dtype=float).ravel()
    else:
        raise ValueError(f"unknown weight kind {kind!r}")
    return WeightField(grid=grid, values=values, kind=kind)


# ---------------------------------------------------------------------------
# Point sets


@dataclass(frozen=True)
class PointSet:
    """Sorted grid-coordinate points on the torus with generator provenance."""

    grid: GridSpec
    coords: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        c = np.atleast_2d(np.asarray(self.coords, dtype=float))
        if c.size == 0:
            c = c.reshape(0, self.grid.dim)
        if c.shape[1] != self.grid.dim:
            raise ValueError(f"points must have {self.grid.dim} coordinates")
        if np.any(c < 0.0) or np.any(c >= self.grid.length):
            raise ValueError("points must lie in [0, L)")
        order = np.lexsort(c.T[::-1])
        c = np.ascontiguousarray(c[order])
        idx = self.grid.node_indices(c) if c.shape[0] else np.empty(0, dtype=np.int64)
        if np.unique(idx).size != idx.size:
            raise ValueError("duplicate points are forbidden")
        object.__setattr__(self, "coords", c)

    def __len__(self) -> int:
        return self.coords.shape[0]

    def node_indices(self) -> np.ndarray:
        if len(self) == 0:
            return np.empty(0, dtype=np.int64)
        return self.grid.node_indices(self.coords)


def _snap(grid: GridSpec, coords: np.ndarray) -> np.ndarray:
    idx = np.mod(np.rint(coords / grid.spacing).astype(np.int64), grid.npoints)
    return idx * grid.spacing


def _resolve_collisions(grid: GridSpec, idx: np.ndarray) -> np.ndarray:
    """Shift colliding snapped nodes forward one node until free (dim 1)."""
    taken = set()
    out = np.empty_like(idx)
    for i, j in enumerate(idx):
        j = int(j)
        attempts = 0
        while j in taken:
            j = (j + 1) % grid.npoints
            attempts += 1
            if attempts > grid.npoints:
                raise PointGenerationError("density too high: snapping cannot avoid duplicates")
        taken.add(j)
        out[i] = j
    return out


def generate_points(
    kind: str,
    grid: GridSpec,
    *,
    alpha: float | None = None,
    jitter: float | None = None,
    rate: float | None = None,
    rho: float | None = None,
    symbol: SymbolField | None = None,
    seed: int | None = None,
) -> PointSet:
    """Generate a point set snapped to grid nodes.

    kinds: uniform(alpha), jittered(alpha, jitter, seed), poisson(rate, seed),
    nu_targeted_1d(rho, symbol). The nu-targeted generator places s_k at the
    solution of integral_0^{s_k} a^{-1/2} = k/rho (bisection to 1e-10 L on
    the piecewise-linear cumulative), snapped to the nearest node, resolving
    snap collisions by shifting one node forward.
    """
    L = grid.length
    prov: dict = {"kind": kind, "seed": seed}
    if kind == "uniform":
        if alpha is None or alpha <= 0:
            raise PointGenerationError("uniform needs alpha > 0")
        pts = np.arange(0.0, L, alpha)
        coords = _snap(grid, pts[:, None] if grid.dim == 1 else np.column_stack([pts, pts]))
        if grid.dim == 2:
            g1, g2 = np.meshgrid(pts, pts, indexing="ij")
            coords = _snap(grid, np.column_stack([g1.ravel(), g2.ravel()]))
        prov["alpha"] = alpha
        return PointSet(grid=grid, coords=coords, provenance=prov)
    if kind == "jittered":
        if alpha is None or jitter is None:
            raise PointGenerationError("jittered needs alpha and jitter")
        rng = np.random.default_rng(seed)
        base = np.arange(0.0, L, alpha)
        if grid.dim == 1:
            pts = np.mod(base + rng.uniform(-jitter, jitter, base.size), L)[:, None]
        else:
            g1, g2 = np.meshgrid(base, base, indexing="ij")
            pts = np.column_stack([g1.ravel(), g2.ravel()])
            pts = np.mod(pts + rng.uniform(-jitter, jitter, pts.shape), L)
        snapped = _snap(grid, pts)
        if grid.dim == 1:
            idx = _resolve_collisions(grid, np.rint(snapped[:, 0] / grid.spacing).astype(np.int64) % grid.npoints)
            snapped = (idx * grid.spacing)[:, None]
        prov.update(alpha=alpha, jitter=jitter)
        return PointSet(grid=grid, coords=snapped, provenance=prov)
    if kind == "poisson":
        if rate is None or rate <= 0:
            raise PointGenerationError("poisson needs rate > 0")
        rng = np.random.default_rng(seed)
        count = int(rng.poisson(rate * L**grid.dim))
        pts = rng.uniform(0.0, L, (count, grid.dim))
        snapped = _snap(grid, pts)
        # snapping may merge nearby draws; keep unique nodes, record both counts
        idx = np.mod(np.rint(snapped / grid.spacing).astype(np.int64), grid.npoints)
        flat = idx[:, 0] if grid.dim == 1 else idx[:, 0] * grid.npoints + idx[:, 1]
        uniq = np.unique(flat)
        coords = np.column_stack(
            [uniq // grid.npoints, uniq % grid.npoints]
        ) * grid.spacing if grid.dim == 2 else (uniq * grid.spacing)[:, None]
        prov.update(rate=rate, requested=count, kept=int(uniq.size))
        return PointSet(grid=grid, coords=coords, provenance=prov)
    if kind == "nu_targeted_1d":
        if grid.dim != 1:
            raise PointGenerationError("nu_targeted_1d requires dim = 1")
        if rho is None or rho <= 0 or symbol is None:
            raise PointGenerationError("nu_targeted_1d needs rho > 0 and the symbol")
        dens = symbol.scalar() ** -0.5
        h = grid.spacing
        # piecewise-linear cumulative of the node-sampled density, periodic
        incr = 0.5 * h * (dens + np.roll(dens, -1))
        cum = np.concatenate([[0.0], np.cumsum(incr)])  # at nodes 0..N
        total = float(cum[-1])
        npts = int(np.ceil(rho * total - 1e-12))
        if npts > grid.npoints:
            raise PointGenerationError("density too high: more points than nodes")
        xs = grid.axis_coords()
        xs_ext = np.concatenate([xs, [L]])
        targets = np.arange(npts) / rho
        sol = np.empty(npts)
        tol = 1e-10 * L
        for i, tgt in enumerate(targets):
            lo, hi = 0.0, L
            while hi - lo > tol:
                mid = 0.5 * (lo + hi)
                if np.interp(mid, xs_ext, cum) < tgt:
                    lo = mid
                else:
                    hi = mid
            sol[i] = 0.5 * (lo + hi)
        idx = np.mod(np.rint(sol / h).astype(np.int64), grid.npoints)
        idx = _resolve_collisions(grid, idx)
        prov.update(rho=rho)
        return PointSet(grid=grid, coords=(np.sort(idx) * h)[:, None], provenance=prov)
    raise PointGenerationError(f"unknown point generator {kind!r}")


# ---------------------------------------------------------------------------
# Window scans


def _halfopen_mask(delta: np.ndarray, r: float) -> np.ndarray:
    """Inclusion per the half-open ball rule; delta shape (..., dim)."""
    d2 = np.sum(delta**2, axis=-1)
    r2 = r * r
    inside = d2 < r2
    on_boundary = d2 == r2
    if np.any(on_boundary):
        lex_neg = delta[..., 0] < 0
        if delta.shape[-1] == 2:
            lex_neg = lex_neg | ((delta[..., 0] == 0) & (delta[..., 1] < 0))
        inside = inside | (on_boundary & lex_neg)
    return inside


def ball_sums(
    grid: GridSpec,
    targets: np.ndarray,
    weights: np.ndarray | None,
    radius: float,
) -> np.ndarray:
    """Per-center aggregate over targets in the half-open torus ball.

    Centers are all grid nodes. With weights None this returns counts,
    otherwise the weighted sums (no cell-volume factor applied here).
    """
    centers = grid.node_coords()
    targets = np.atleast_2d(targets)
    out = np.zeros(centers.shape[0])
    if targets.shape[0] == 0:
        return out
    for start in range(0, centers.shape[0], _CHUNK):
        block = centers[start : start + _CHUNK]
        delta = grid.wrap(targets[None, :, :] - block[:, None, :])
        mask = _halfopen_mask(delta, radius)
        if weights is None:
            out[start : start + _CHUNK] = mask.sum(axis=1)
        else:
            out[start : start + _CHUNK] = mask @ weights
    return out


def ball_measure(w: WeightField, radius: float) -> np.ndarray:
    """mu(B_r(x)) = h^dim * sum of weights over nodes in the ball, per center."""
    grid = w.grid
    return grid.cell_volume * ball_sums(grid, grid.node_coords(), w.values, radius)


@dataclass(frozen=True)
class DensityCurve:
    """Windowed density curve with the endpoint values D^- and D^+.

    The liminf/limsup of the paper are replaced by the value at the largest
    radius; the whole curve is retained for convergence inspection.
    """

    radii: np.ndarray
    inf_values: np.ndarray
    sup_values: np.ndarray

    def __post_init__(self) -> None:
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("radii must be strictly increasing")

    @property
    def d_minus(self) -> float:
        return float(self.inf_values[-1])

    @property
    def d_plus(self) -> float:
        return float(self.sup_values[-1])


def _check_radii(grid: GridSpec, radii: Iterable[float], cap: float) -> np.ndarray:
    r = np.asarray(sorted(float(x) for x in radii))
    if r.size == 0 or np.any(r <= 0):
        raise RadiusError("need positive radii")
    if r[-1] > cap:
        raise RadiusError(f"radius {r[-1]} exceeds cap {cap}")
    return r


def beurling_density(points: PointSet, w: WeightField, radii) -> DensityCurve:
    """Windowed Beurling density #(S in B_r(x)) / mu(B_r(x)) over all centers.

    Radii are capped at L/4 (torus-contamination guard).
    """
    grid = w.grid
    r_list = _check_radii(grid, radii, grid.length / 4.0)
    infs, sups = [], []
    for r in r_list:
        counts = ball_sums(grid, points.coords, None, r)
        measure = ball_measure(w, r)
        ratio = counts / measure
        infs.append(ratio.min())
        sups.append(ratio.max())
    return DensityCurve(radii=r_list, inf_values=np.array(infs), sup_values=np.array(sups))


@dataclass(frozen=True)
class TraceCurve:
    radii: np.ndarray
    inf_values: np.ndarray
    sup_values: np.ndarray

    @property
    def tr_minus(self) -> float:
        return float(self.inf_values[-1])

    @property
    def tr_plus(self) -> float:
        return float(self.sup_values[-1])


def averaged_trace(diagonal: np.ndarray, w: WeightField, radii) -> TraceCurve:
    """Windowed averages (1/mu(B_r(x))) integral_{B_r(x)} f of a node field.

    The numerator is the plain Lebesgue quadrature of the field; only the
    normalization carries the weight, matching the averaged-trace definition.
    """
    grid = w.grid
    f = np.asarray(diagonal, dtype=float).ravel()
    if f.shape != (grid.size,):
        raise ValueError("diagonal field must have one value per node")
    r_list = _check_radii(grid, radii, grid.length / 4.0)
    infs, sups = [], []
    nodes = grid.node_coords()
    for r in r_list:
        numer = grid.cell_volume * ball_sums(grid, nodes, f, r)
        denom = ball_measure(w, r)
        ratio = numer / denom
        infs.append(ratio.min())
        sups.append(ratio.max())
    return TraceCurve(radii=r_list, inf_values=np.array(infs), sup_values=np.array(sups))


def separation_report(points: PointSet, rho: float) -> int:
    """max over grid centers of #(S in B_rho(x)), the relative-separation bound."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    counts = ball_sums(points.grid, points.coords, None, rho)
    return int(counts.max()) if counts.size else 0


# ---------------------------------------------------------------------------
# Change of measure


class ConversionDisagreement(AssertionError):
    """The two density predicates disagreed beyond tolerance (bug signal)."""


@dataclass(frozen=True)
class ConversionReport:
    radii: np.ndarray
    d0_inf: np.ndarray
    dmu_inf: np.ndarray
    trmu_inf: np.ndarray
    agreements: np.ndarray
    rtol: float


def density_conversion_check(
    points: PointSet,
    w_mu: WeightField,
    kernel_diagonal: np.ndarray,
    radii,
    *,
    rtol: float = 1e-6,
) -> ConversionReport:
    """Check D_0^-(S) >= 1 iff D_mu^-(S) >= tr_mu^-(k) at matching radii.

    Both predicates are evaluated with a relative guard band of rtol around
    their thresholds; a disagreement outside the band raises (it would mean
    the change-of-measure bookkeeping is broken, since the two sides are the
    same inequality rearranged when the kernel diagonal divides out).
    """
    grid = w_mu.grid
    w0 = make_weight("custom", grid, custom=kernel_diagonal)
    d0 = beurling_density(points, w0, radii)
    dmu = beurling_density(points, w_mu, radii)
    tr = averaged_trace(kernel_diagonal, w_mu, radii)

    agreements = []
    for i in range(d0.radii.size):
        p1 = d0.inf_values[i] >= 1.0
        p2 = dmu.inf_values[i] >= tr.inf_values[i]
        agree = p1 == p2
        borderline = (
            abs(d0.inf_values[i] - 1.0) <= rtol
            or abs(dmu.inf_values[i] - tr.inf_values[i]) <= rtol * abs(tr.inf_values[i])
        )
        if not agree and not borderline:
            raise ConversionDisagreement(
                f"predicates disagree at r={d0.radii[i]}: "
                f"D0={d0.inf_values[i]:.9g} vs Dmu={dmu.inf_values[i]:.9g}, "
                f"tr={tr.inf_values[i]:.9g}"
            )
        agreements.append(agree or borderline)
    return ConversionReport(
        radii=d0.radii,
        d0_inf=d0.inf_values,
        dmu_inf=dmu.inf_values,
        trmu_inf=tr.inf_values,
        agreements=np.asarray(agreements, dtype=bool),
        rtol=rtol,
    )
