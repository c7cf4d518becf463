"""Analytic constant-coefficient reference formulas used as oracles.

Ellipsoid volumes, the exact Paley-Wiener kernels on the line/plane, their
periodic lattice-sum analogues on the torus, and the Sobolev reproducing
kernel Gramian with its Schur row bound. These are the independent routes
against which the spectral module is checked.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.integrate
import scipy.linalg
from scipy.special import j1

from .grid import GridSpec

_SERIES_CUTOFF = 1e-6


@dataclass(frozen=True)
class Ellipsoid:
    """Spectral ellipsoid {xi : b xi . xi <= Omega} for an SPD matrix b."""

    b: np.ndarray
    omega: float

    def __post_init__(self) -> None:
        b = np.atleast_2d(np.asarray(self.b, dtype=float))
        object.__setattr__(self, "b", b)
        if b.shape[0] != b.shape[1] or b.shape[0] not in (1, 2):
            raise ValueError("b must be 1x1 or 2x2")
        if not np.array_equal(b, b.T):
            raise ValueError("b must be symmetric")
        if np.linalg.eigvalsh(b)[0] <= 0:
            raise ValueError("b must be positive definite")
        if not self.omega > 0:
            raise ValueError("Omega must be positive")

    @property
    def dim(self) -> int:
        return self.b.shape[0]


def unit_ball_volume(dim: int) -> float:
    if dim == 1:
        return 2.0
    if dim == 2:
        return float(np.pi)
    raise ValueError("dim must be 1 or 2")


def ellipsoid_volume(e: Ellipsoid) -> float:
    """|Sigma| = det(b)^{-1/2} Omega^{d/2} |B_1|."""
    d = e.dim
    return float(
        np.linalg.det(e.b) ** -0.5 * e.omega ** (d / 2.0) * unit_ball_volume(d)
    )


def _inv_sqrt(b: np.ndarray) -> np.ndarray:
    lam, q = scipy.linalg.eigh(b)
    return q @ np.diag(lam**-0.5) @ q.T


def _sinc_like(z: np.ndarray) -> np.ndarray:
    """sin(z)/z with a 4-term series below the cutoff."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _SERIES_CUTOFF
    out = np.empty_like(z)
    zs = z[small]
    out[small] = 1.0 - zs**2 / 6.0 + zs**4 / 120.0 - zs**6 / 5040.0
    zl = z[~small]
    out[~small] = np.sin(zl) / zl
    return out


def _j1_over_z(z: np.ndarray) -> np.ndarray:
    """J_1(z)/z with a 4-term series below the cutoff."""
    z = np.asarray(z, dtype=float)
    small = np.abs(z) < _SERIES_CUTOFF
    out = np.empty_like(z)
    zs = z[small]
    out[small] = 0.5 - zs**2 / 16.0 + zs**4 / 384.0 - zs**6 / 18432.0
    zl = z[~small]
    out[~small] = j1(zl) / zl
    return out


def pw_kernel_exact(e: Ellipsoid, offset) -> np.ndarray | float:
    """Exact kernel (2 pi)^{-d/2} (F^{-1} chi_Sigma)(x - y) on R^d.

    dim = 1 scalar b: sin(sqrt(Omega/b) u) / (pi u). dim = 2: radial Bessel
    form det(b^{-1/2}) R J_1(R|v|)/(2 pi |v|) at v = b^{-1/2}(x - y) with
    R = sqrt(Omega). At offset 0 this equals |Sigma|/(2 pi)^d.
    """
    u = np.asarray(offset, dtype=float)
    scalar_in = u.ndim == 0 if e.dim == 1 else u.ndim == 1
    d = e.dim
    detfac = float(np.linalg.det(e.b) ** -0.5)
    root_omega = np.sqrt(e.omega)
    if d == 1:
        v = np.atleast_1d(u) * float(_inv_sqrt(e.b)[0, 0])
        z = root_omega * v
        vals = detfac * (root_omega / np.pi) * _sinc_like(z)
    else:
        pts = np.atleast_2d(u)
        v = pts @ _inv_sqrt(e.b).T
        z = root_omega * np.linalg.norm(v, axis=-1)
        vals = detfac * (e.omega / (2.0 * np.pi)) * _j1_over_z(z)
    return float(vals[0]) if scalar_in else vals


def _lattice_modes(e: Ellipsoid, length: float) -> np.ndarray:
    """Frequencies xi in Sigma intersected with (2 pi / L) Z^d.

    Membership uses the closed ellipsoid with exact float comparison, which
    is the deterministic rule the spectral comparison relies on.
    """
    b = e.b
    if e.dim == 1:
        step = 2.0 * np.pi / length
        mmax = int(np.floor(np.sqrt(e.omega / b[0, 0]) / step)) + 1
        m = np.arange(-mmax, mmax + 1)
        xi = m * step
        keep = b[0, 0] * xi * xi <= e.omega
        return xi[keep][:, None]
    if np.any(b != np.diag(np.diag(b))):
        raise ValueError("periodic lattice sums support scalar/diagonal b only")
    step = 2.0 * np.pi / length
    m1 = int(np.floor(np.sqrt(e.omega / b[0, 0]) / step)) + 1
    m2 = int(np.floor(np.sqrt(e.omega / b[1, 1]) / step)) + 1
    g1, g2 = np.meshgrid(
        np.arange(-m1, m1 + 1) * step, np.arange(-m2, m2 + 1) * step, indexing="ij"
    )
    xi = np.column_stack([g1.ravel(), g2.ravel()])
    quad = b[0, 0] * xi[:, 0] ** 2 + b[1, 1] * xi[:, 1] ** 2
    return xi[quad <= e.omega]


def periodic_mode_count(e: Ellipsoid, length: float) -> int:
    return _lattice_modes(e, length).shape[0]


def periodic_pw_kernel(e: Ellipsoid, length: float, offset) -> np.ndarray | float:
    """Torus analogue: (1/L^d) sum over lattice modes in Sigma of cos(xi.u).

    Matches the spectral module's constant-symbol kernels at grid offsets and
    converges to pw_kernel_exact as L grows (Riemann sum of the inverse
    Fourier integral).
    """
    u = np.asarray(offset, dtype=float)
    scalar_in = u.ndim == 0 if e.dim == 1 else u.ndim == 1
    xi = _lattice_modes(e, length)
    if e.dim == 1:
        pts = np.atleast_1d(u)[:, None]
    else:
        pts = np.atleast_2d(u)
    vals = np.cos(pts @ xi.T).sum(axis=1) / length**e.dim
    return float(vals[0]) if scalar_in else vals


def periodic_pw_kernel_grid(e: Ellipsoid, grid: GridSpec) -> np.ndarray:
    """Kernel matrix of the lattice sum over all pairs of grid nodes."""
    coords = grid.node_coords()
    n = grid.size
    out = np.empty((n, n))
    row0 = periodic_pw_kernel(e, grid.length, coords if grid.dim == 2 else coords[:, 0])
    # constant-coefficient kernels depend only on the offset; build by rolls
    if grid.dim == 1:
        for i in range(n):
            out[i] = np.roll(row0, i)
        return out
    base = np.asarray(row0).reshape(grid.shape)
    npts = grid.npoints
    for i in range(n):
        r, c = divmod(i, npts)
        out[i] = np.roll(np.roll(base, r, axis=0), c, axis=1).ravel()
    return out


# ---------------------------------------------------------------------------
# Sobolev reproducing-kernel Gramian


def sobolev_kernel_gram(s: float, dim: int, u) -> np.ndarray | float:
    """Inner product <T_x kappa, T_y kappa> in W_2^s at distance u = |x - y|.

    Closed forms are implemented for (dim=1, s=1): sqrt(pi/2) e^{-u}, and
    (dim=1, s=2): sqrt(pi/2) (1 + u) e^{-u} / 2. Any other (s, dim) with
    s > dim/2 falls back to numerical quadrature of the Fourier integral.
    """
    if s <= dim / 2.0:
        raise ValueError("need s > dim/2 for a reproducing kernel")
    u = np.abs(np.asarray(u, dtype=float))
    scalar_in = u.ndim == 0
    uu = np.atleast_1d(u)
    if dim == 1 and s == 1:
        vals = np.sqrt(np.pi / 2.0) * np.exp(-uu)
    elif dim == 1 and s == 2:
        vals = np.sqrt(np.pi / 2.0) * (1.0 + uu) * np.exp(-uu) / 2.0
    else:
        vals = np.array([sobolev_kernel_gram_quadrature(s, dim, x) for x in uu])
    return float(vals[0]) if scalar_in else vals


def sobolev_kernel_gram_quadrature(s: float, dim: int, u: float) -> float:
    """Direct quadrature of (2 pi)^{-d/2} int e^{-i u w} (1+|w|^2)^{-s} dw.

    Independent of the closed forms; serves as the oracle side of the dual
    route. dim = 1 uses the oscillatory cos-weighted rule; dim = 2 the radial
    Bessel J_0 integral.
    """
    if s <= dim / 2.0:
        raise ValueError("need s > dim/2")
    u = abs(float(u))
    if dim == 1:
        val, _ = scipy.integrate.quad(
            lambda w: (1.0 + w * w) ** (-s),
            0.0,
            np.inf,
            weight="cos",
            wvar=u,
            epsabs=1e-12,
            epsrel=1e-12,
            limit=400,
        )
        return float(np.sqrt(2.0 / np.pi) * val)
    if dim == 2:
        from scipy.special import j0

        val, _ = scipy.integrate.quad(
            lambda r: (1.0 + r * r) ** (-s) * j0(r * u) * r,
            0.0,
            np.inf,
            epsabs=1e-11,
            epsrel=1e-11,
            limit=800,
        )
        return float(val)
    raise ValueError("dim must be 1 or 2")


def schur_row_bound(points, s: float) -> float:
    """Max over rows x in S of sum_y |<T_x kappa, T_y kappa>_{W_2^s}|.

    Distances are torus distances on the point set's grid. Finiteness of
    this row sum is the Schur-test certificate that the Gramian, hence the
    Bessel bound, is controlled for a relatively separated set.
    """
    coords = points.coords
    grid = points.grid
    if coords.shape[0] == 0:
        return 0.0
    delta = grid.wrap(coords[:, None, :] - coords[None, :, :])
    dist = np.sqrt(np.sum(delta**2, axis=-1))
    gram = np.abs(sobolev_kernel_gram(s, grid.dim, dist.ravel())).reshape(dist.shape)
    return float(gram.sum(axis=1).max())
