"""Sampling/interpolation stability and kernel localization checks.

Frame bounds follow the sampling inequality semantics: band-coefficient unit
vectors represent ||f|| = 1 under the weighted orthonormality, while the
evaluation sums sum_s |f(s)|^2 carry no quadrature weight (they are point
evaluations). Interpolation is certified through the Riesz lower bound of
the kernel Gram on S, the finite-dimensional equivalent of solvability of
the interpolation problem in an RKHS.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .constcoef import Ellipsoid, periodic_pw_kernel
from .geometry import PointSet, RadiusError
from .spectral import KernelMatrix, SpectralData


@dataclass(frozen=True)
class FrameReport:
    """Stability report for one point set against one band.

    a and b_upper are the extreme eigenvalues of E^T E with E the band
    eigenvector evaluation matrix on S; riesz_min is the smallest eigenvalue
    of the kernel Gram on S. Raw values are always carried so callers can
    apply their own thresholds.
    """

    a: float
    b_upper: float
    riesz_min: float
    band_dim: int
    n_points: int
    sampling_verdict: str
    interpolation_verdict: str
    tol_a: float
    tol_riesz: float
    gram_min_raw: float

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "b_upper": self.b_upper,
            "riesz_min": self.riesz_min,
            "band_dim": self.band_dim,
            "n_points": self.n_points,
            "verdicts": {
                "sampling": self.sampling_verdict,
                "interpolation": self.interpolation_verdict,
            },
            "tolerances": {"tol_a": self.tol_a, "tol_riesz": self.tol_riesz},
            "gram_min_raw": self.gram_min_raw,
        }


def evaluation_matrix(points: PointSet, spec: SpectralData) -> np.ndarray:
    """E with E[s, m] = phi_m(s) over band modes m and points s of S."""
    if spec.band_dim == 0:
        raise ValueError("empty band")
    if len(points) == 0:
        raise ValueError("empty point set")
    idx = points.node_indices()
    return spec.eigenvectors[np.ix_(idx, spec.band_indices)]


def frame_bounds(
    points: PointSet,
    spec: SpectralData,
    *,
    tol_a_factor: float = 1e-8,
) -> tuple[float, float]:
    """Extreme eigenvalues (A, B) of E^T E: the sampling inequality constants.

    When #S < band dimension the rank argument forces A = 0 exactly and the
    returned A is the literal 0.0 (the raw eigenvalue would be eigensolver
    noise around zero).
    """
    e = evaluation_matrix(points, spec)
    gram = e.T @ e
    evals = scipy.linalg.eigvalsh(gram)
    b_upper = float(evals[-1])
    if len(points) < spec.band_dim:
        a = 0.0
    else:
        a = float(max(evals[0], 0.0))
    return a, b_upper


def riesz_lower_bound(points: PointSet, kernel: KernelMatrix) -> float:
    """Smallest eigenvalue of the kernel Gram G[s,t] = k(s,t) on S."""
    if len(points) == 0:
        raise ValueError("empty point set")
    idx = points.node_indices()
    gram = kernel.values[np.ix_(idx, idx)]
    return float(scipy.linalg.eigvalsh(gram)[0])


def stability_report(
    points: PointSet,
    spec: SpectralData,
    kernel: KernelMatrix,
    *,
    tol_a_factor: float = 1e-8,
    tol_riesz_factor: float = 1e-6,
) -> FrameReport:
    """Combine frame bounds and the Riesz bound into one verdict report."""
    a, b_upper = frame_bounds(points, spec, tol_a_factor=tol_a_factor)
    e = evaluation_matrix(points, spec)
    gram_min_raw = float(scipy.linalg.eigvalsh(e.T @ e)[0])
    riesz = riesz_lower_bound(points, kernel)
    tol_a = tol_a_factor * b_upper
    tol_r = tol_riesz_factor * float(kernel.diagonal().max())
    sampling = (
        "stable-sampling"
        if (a > tol_a and len(points) >= spec.band_dim)
        else "not-sampling"
    )
    interpolation = "interpolating" if riesz > tol_r else "not-interpolating"
    return FrameReport(
        a=a,
        b_upper=b_upper,
        riesz_min=riesz,
        band_dim=spec.band_dim,
        n_points=len(points),
        sampling_verdict=sampling,
        interpolation_verdict=interpolation,
        tol_a=tol_a,
        tol_riesz=tol_r,
        gram_min_raw=gram_min_raw,
    )


# ---------------------------------------------------------------------------
# Localization


def _pairwise_dist2(grid, coords_a, coords_b) -> np.ndarray:
    delta = grid.wrap(coords_a[:, None, :] - coords_b[None, :, :])
    return np.sum(delta**2, axis=-1)


def weak_localization_curve(kernel: KernelMatrix, radii) -> np.ndarray:
    """sup_x of h^dim sum_{|y-x| > r} k(x,y)^2 for each radius.

    Tails are over the complement of the closed ball, so the curve is
    nonincreasing in r pointwise. Radii are capped at L/2 - h.
    """
    grid = kernel.grid
    radii = np.asarray(sorted(float(r) for r in radii))
    if radii.size == 0 or radii[0] <= 0:
        raise RadiusError("need positive radii")
    cap = grid.length / 2.0 - grid.spacing
    if radii[-1] > cap:
        raise RadiusError(f"radius {radii[-1]} exceeds localization cap {cap}")
    nodes = grid.node_coords()
    d2 = _pairwise_dist2(grid, nodes, nodes)
    k2 = kernel.values**2
    out = np.empty(radii.size)
    for i, r in enumerate(radii):
        tails = np.where(d2 > r * r, k2, 0.0).sum(axis=1) * grid.cell_volume
        out[i] = tails.max()
    return out


def hap_check(kernel: KernelMatrix, points: PointSet, radii) -> np.ndarray:
    """sup_x of sum_{s in S, |s-x| > r} k(x,s)^2 for each radius."""
    grid = kernel.grid
    radii = np.asarray(sorted(float(r) for r in radii))
    cap = grid.length / 2.0 - grid.spacing
    if radii.size == 0 or radii[0] <= 0:
        raise RadiusError("need positive radii")
    if radii[-1] > cap:
        raise RadiusError(f"radius {radii[-1]} exceeds localization cap {cap}")
    out = np.zeros(radii.size)
    if len(points) == 0:
        return out
    idx = points.node_indices()
    nodes = grid.node_coords()
    d2 = _pairwise_dist2(grid, nodes, points.coords)
    vals2 = kernel.values[:, idx] ** 2
    for i, r in enumerate(radii):
        out[i] = np.where(d2 > r * r, vals2, 0.0).sum(axis=1).max()
    return out


# ---------------------------------------------------------------------------
# Approximate identity


@dataclass(frozen=True)
class ApproxIdentityReport:
    """sup_x || chi(H) phi_x^w - k_x || for node-centered cube mollifiers.

    widths are the cube side lengths (odd node multiples); exponents[i] is
    the decay rate between consecutive widths, err ~ width^p. The proof-side
    bound is linear in the width, and a symmetric node-centered average
    actually cancels the first-order term, so measured exponents sit near 2;
    the check passes when the decay is at least about linear.
    """

    widths: np.ndarray
    errors: np.ndarray
    exponents: np.ndarray
    consistent_with_linear_bound: bool


def approx_identity_check(
    spec: SpectralData,
    kernel: KernelMatrix,
    widths,
    *,
    min_exponent: float = 0.585,
) -> ApproxIdentityReport:
    """Error of the projected cube mollifier against the kernel column.

    Each width must be an odd multiple of the grid spacing so the cube is
    node centered. Width exactly h reproduces the kernel column (the cube is
    the discrete delta / h^dim), so errors there are zero by construction.
    """
    grid = kernel.grid
    h = grid.spacing
    ws = []
    for w in widths:
        steps = int(round(w / h))
        if steps * h != w or steps % 2 != 1 or steps < 1:
            raise ValueError(f"width {w} is not an odd node multiple of h = {h}")
        ws.append(steps)
    order = np.argsort(ws)[::-1]  # largest first
    ws = [ws[i] for i in order]
    widths_sorted = np.array([w * h for w in ws])

    errors = np.empty(len(ws))
    vals = kernel.values
    for i, steps in enumerate(ws):
        half = steps // 2
        offsets = range(-half, half + 1)
        if grid.dim == 1:
            acc = np.zeros_like(vals)
            for o in offsets:
                acc += np.roll(vals, o, axis=1)
        else:
            n = grid.npoints
            resh = vals.reshape(grid.size, n, n)
            acc = np.zeros_like(resh)
            for o1 in offsets:
                rolled = np.roll(resh, o1, axis=1)
                for o2 in offsets:
                    acc += np.roll(rolled, o2, axis=2)
            acc = acc.reshape(grid.size, grid.size)
        mean = acc / float(steps**grid.dim)
        diff = mean - vals
        col_norms = np.sqrt(grid.cell_volume * np.sum(diff**2, axis=0))
        errors[i] = col_norms.max()

    exponents = np.array(
        [
            np.log(errors[i] / errors[i + 1]) / np.log(widths_sorted[i] / widths_sorted[i + 1])
            if errors[i + 1] > 0
            else np.inf
            for i in range(len(ws) - 1)
        ]
    )
    ok = bool(np.all(np.diff(errors) <= 0)) and bool(
        np.all((exponents >= min_exponent) | ~np.isfinite(exponents))
    )
    return ApproxIdentityReport(
        widths=widths_sorted,
        errors=errors,
        exponents=exponents,
        consistent_with_linear_bound=ok,
    )


# ---------------------------------------------------------------------------
# Centered-kernel convergence to the constant-coefficient limit


@dataclass(frozen=True)
class LimitKernelCurve:
    distances: np.ndarray
    offsets: np.ndarray
    errors: np.ndarray
    monotone_within_slack: bool


def limit_kernel_convergence(
    spec: SpectralData,
    kernel: KernelMatrix,
    b,
    offsets,
    *,
    bump_center: float | None = None,
    support_radius: float = 0.0,
    slack: float = 0.10,
) -> LimitKernelCurve:
    """L2 distance of centered kernels T_{-x} k_x to the limit torus kernel.

    The centered kernel at a grid-aligned offset x is the re-indexed row of
    the kernel matrix (exact by the conjugation identity); the target is the
    periodic constant-coefficient kernel of the limit matrix b on the same
    grid, which isolates the limit-operator effect from torus-versus-line
    discrepancy. Offsets must lie outside the bump support; the curve must
    be nonincreasing within the given slack as the distance from the bump
    grows.
    """
    grid = kernel.grid
    if grid.dim != 1:
        raise ValueError("limit-kernel curves are implemented for dim = 1")
    center = grid.length / 2.0 if bump_center is None else float(bump_center)
    ell = Ellipsoid(b=np.atleast_2d(np.asarray(b, dtype=float)), omega=spec.omega)
    target = np.asarray(periodic_pw_kernel(ell, grid.length, grid.axis_coords()))

    dists, errs, offs = [], [], []
    for x in offsets:
        steps = grid.steps_for_shift([float(x)])
        dist = float(np.abs(grid.wrap(np.array([float(x) - center]))))
        if dist < support_radius:
            raise ValueError(f"offset {x} lies inside the bump support (r < {support_radius})")
        row = kernel.values[int(steps[0]) % grid.npoints]
        centered = np.roll(row, -int(steps[0]))
        errs.append(grid.norm(centered - target))
        dists.append(dist)
        offs.append(float(x))
    order = np.argsort(dists)
    dists = np.asarray(dists)[order]
    errs = np.asarray(errs)[order]
    offs = np.asarray(offs)[order]
    monotone = bool(np.all(errs[1:] <= errs[:-1] * (1.0 + slack)))
    return LimitKernelCurve(
        distances=dists, offsets=offs, errors=errs, monotone_within_slack=monotone
    )
