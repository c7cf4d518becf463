"""Matrix symbols a(x) on the periodic grid: recipes, translation, oscillation.

A symbol is a field of symmetric dim x dim matrices sampled at grid nodes,
uniformly elliptic with floor theta (smallest matrix eigenvalue >= theta at
every node). Recipes that are not constant place their non-constant part at
the window center L/2 so the periodization is smooth at the seam.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .grid import GridSpec


class EllipticityError(ValueError):
    """A symbol violates the uniform ellipticity floor."""


class RecipeError(ValueError):
    """A recipe is malformed or incompatible with the grid dimension."""


def _as_matrix(b, dim: int) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.ndim == 0:
        return np.eye(dim) * float(b)
    if b.shape != (dim, dim):
        raise RecipeError(f"coefficient must be scalar or {dim}x{dim}, got {b.shape}")
    if not np.array_equal(b, b.T):
        raise RecipeError("constant coefficient matrix must be symmetric")
    return b


def _min_eigenvalues(values: np.ndarray) -> np.ndarray:
    d = values.shape[-1]
    if d == 1:
        return values[..., 0, 0]
    return np.linalg.eigvalsh(values)[..., 0]


@dataclass(frozen=True)
class SymbolField:
    """Sampled matrix symbol on a periodic grid.

    values has shape grid.shape + (dim, dim); every matrix is exactly
    symmetric and its smallest eigenvalue is >= theta.
    """

    grid: GridSpec
    values: np.ndarray
    theta: float

    def __post_init__(self) -> None:
        d = self.grid.dim
        expected = self.grid.shape + (d, d)
        if self.values.shape != expected:
            raise ValueError(f"values must have shape {expected}")
        if not np.array_equal(self.values, np.swapaxes(self.values, -1, -2)):
            raise ValueError("symbol matrices must be exactly symmetric")
        if not self.theta > 0:
            raise EllipticityError("theta must be positive")
        lam = _min_eigenvalues(self.values)
        if float(lam.min()) < self.theta - 1e-15:
            raise EllipticityError(
                f"smallest matrix eigenvalue {lam.min():.6g} below floor theta={self.theta}"
            )

    def entry(self, j: int, k: int) -> np.ndarray:
        return self.values[..., j, k]

    def scalar(self) -> np.ndarray:
        """The scalar coefficient field (dim = 1 only)."""
        if self.grid.dim != 1:
            raise ValueError("scalar() only for dim = 1 symbols")
        return self.values[:, 0, 0]

    def det(self) -> np.ndarray:
        if self.grid.dim == 1:
            return self.values[:, 0, 0]
        return np.linalg.det(self.values)

    def min_eigenvalue(self) -> float:
        return float(_min_eigenvalues(self.values).min())


# ---------------------------------------------------------------------------
# Recipes


@dataclass(frozen=True)
class Constant:
    b: Union[float, np.ndarray] = 1.0


@dataclass(frozen=True)
class GaussianBump:
    """Asymptotically constant symbol: b + height * exp(-r^2/(2 width^2)) * I.

    r is the torus distance from the center (default L/2 per axis). The
    Gaussian tail at the seam is below machine precision for the shipped
    widths, so the periodization is smooth there.
    """

    b: Union[float, np.ndarray] = 1.0
    height: float = 3.0
    width: float = 2.0
    center: float | None = None

    def support_radius(self) -> float:
        """Effective bump support used by flat-region checks (2 widths)."""
        return 2.0 * self.width


@dataclass(frozen=True)
class SlowOscillation:
    """Proxy for a slowly oscillating symbol on the torus.

    a = base + amplitude * sin(frequency * (sqrt(r + 1) - 1)) * I with r the
    torus distance from the window center: the local oscillation frequency
    decays like r^(-1/2) away from the center.
    """

    base: float = 2.0
    amplitude: float = 0.5
    frequency: float = 6.0


@dataclass(frozen=True)
class BandwidthProfile1d:
    """dim = 1 smooth profile between two levels (variable bandwidth).

    a = low outside, high on a central plateau, joined by a C-infinity
    taper; exactly constant near the seam.
    """

    low: float = 1.0
    high: float = 4.0
    plateau_radius: float = 6.0
    taper_width: float = 4.0


SymbolRecipe = Union[Constant, GaussianBump, SlowOscillation, BandwidthProfile1d]

_RECIPE_KINDS = {
    "constant": Constant,
    "asymptotically_constant": GaussianBump,
    "slowly_oscillating": SlowOscillation,
    "variable_bandwidth_1d": BandwidthProfile1d,
}


def recipe_from_dict(spec: dict) -> SymbolRecipe:
    """Build a recipe from a JSON-style dict with a 'kind' tag."""
    spec = dict(spec)
    kind = spec.pop("kind", None)
    if kind not in _RECIPE_KINDS:
        raise RecipeError(f"unknown symbol kind {kind!r}; one of {sorted(_RECIPE_KINDS)}")
    cls = _RECIPE_KINDS[kind]
    if "b" in spec and isinstance(spec["b"], list):
        spec["b"] = np.asarray(spec["b"], dtype=float)
    try:
        return cls(**spec)
    except TypeError as exc:
        raise RecipeError(f"bad parameters for {kind}: {exc}") from exc


def _center_distance(grid: GridSpec, center: float | None) -> np.ndarray:
    c = grid.length / 2.0 if center is None else float(center)
    delta = grid.wrap(grid.node_coords() - c)
    return np.sqrt(np.sum(delta**2, axis=1)).reshape(grid.shape)


def _smoothstep(t: np.ndarray) -> np.ndarray:
    """C-infinity transition: 0 for t <= 0, 1 for t >= 1."""
    t = np.clip(t, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        f = np.where(t > 0.0, np.exp(-1.0 / np.where(t > 0.0, t, 1.0)), 0.0)
        g = np.where(t < 1.0, np.exp(-1.0 / np.where(t < 1.0, 1.0 - t, 1.0)), 0.0)
    return f / (f + g)


def make_symbol(grid: GridSpec, recipe: SymbolRecipe, theta: float = 0.5) -> SymbolField:
    """Generate a periodic SymbolField from a recipe.

    Raises EllipticityError when the resulting field dips below theta and
    RecipeError when the recipe does not fit the grid dimension.
    """
    d = grid.dim
    eye = np.eye(d)

    if isinstance(recipe, Constant):
        b = _as_matrix(recipe.b, d)
        values = np.broadcast_to(b, grid.shape + (d, d)).copy()
    elif isinstance(recipe, GaussianBump):
        b = _as_matrix(recipe.b, d)
        r = _center_distance(grid, recipe.center)
        bump = recipe.height * np.exp(-(r**2) / (2.0 * recipe.width**2))
        values = b + bump[..., None, None] * eye
    elif isinstance(recipe, SlowOscillation):
        r = _center_distance(grid, None)
        phase = recipe.frequency * (np.sqrt(r + 1.0) - 1.0)
        osc = recipe.base + recipe.amplitude * np.sin(phase)
        values = osc[..., None, None] * eye
    elif isinstance(recipe, BandwidthProfile1d):
        if d != 1:
            raise RecipeError("variable_bandwidth_1d requires dim = 1")
        r = _center_distance(grid, None)
        t = (recipe.plateau_radius + recipe.taper_width - r) / recipe.taper_width
        prof = recipe.low + (recipe.high - recipe.low) * _smoothstep(t)
        values = prof[..., None, None] * eye
    else:
        raise RecipeError(f"unsupported recipe {recipe!r}")

    values = np.ascontiguousarray(values)
    return SymbolField(grid=grid, values=values, theta=theta)


def translate_symbol(a: SymbolField, shift) -> SymbolField:
    """Return T_{-x} a: node value at z becomes a(z + x), periodic wraparound.

    The shift must be grid aligned; the inverse shift recovers the original
    field bit-exactly (pure index rotation).
    """
    steps = a.grid.steps_for_shift(shift)
    values = a.values
    for axis, s in enumerate(steps):
        if s:
            values = np.roll(values, -int(s), axis=axis)
    return SymbolField(grid=a.grid, values=np.ascontiguousarray(values), theta=a.theta)


# ---------------------------------------------------------------------------
# Oscillation diagnostics


@dataclass(frozen=True)
class OscillationReport:
    """Per-annulus gradient suprema around the window center.

    The verdict is a diagnostic heuristic, not a theorem check: the slowly
    oscillating class is defined by limits at infinity, which a finite torus
    can only proxy.
    """

    radii: np.ndarray
    suprema: np.ndarray
    verdict: str

    def __post_init__(self) -> None:
        if np.any(np.diff(self.radii) <= 0):
            raise ValueError("annulus radii must be strictly increasing")
        if np.any(self.suprema < 0):
            raise ValueError("suprema must be nonnegative")


def oscillation_report(a: SymbolField, annuli: int) -> OscillationReport:
    """Measure gradient decay of the symbol in annuli around the center.

    Gradients are centered finite differences of every matrix entry; each
    node contributes the Euclidean norm of its per-axis entry gradients. The
    verdict is slowly-oscillating-like when the outermost annulus supremum is
    <= 0.1x the maximum over all annuli, not-slowly-oscillating when >= 0.9x,
    else inconclusive.
    """
    if annuli < 2:
        raise ValueError("need at least 2 annuli")
    grid = a.grid
    if grid.size < annuli:
        raise ValueError("fewer grid nodes than annuli")

    h2 = 2.0 * grid.spacing
    grads = []
    for axis in range(grid.dim):
        diff = (np.roll(a.values, -1, axis=axis) - np.roll(a.values, 1, axis=axis)) / h2
        grads.append(diff)
    gmag = np.sqrt(sum(g**2 for g in grads))  # per node, per entry
    gmax = gmag.reshape(grid.size, -1).max(axis=1)

    r = _center_distance(grid, None).ravel()
    rmax = float(r.max())
    edges = np.linspace(0.0, np.nextafter(rmax, np.inf), annuli + 1)
    sup = np.zeros(annuli)
    which = np.minimum(np.searchsorted(edges, r, side="right") - 1, annuli - 1)
    np.maximum.at(sup, which, gmax)

    peak = float(sup.max())
    outer = float(sup[-1])
    if peak == 0.0 or outer <= 0.1 * peak:
        verdict = "slowly-oscillating-like"
    elif outer >= 0.9 * peak:
        verdict = "not-slowly-oscillating"
    else:
        verdict = "inconclusive"
    return OscillationReport(radii=edges[1:].copy(), suprema=sup, verdict=verdict)
