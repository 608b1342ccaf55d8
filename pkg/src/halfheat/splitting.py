"""Separation of singularities: quantitative cutoffs, the dbar split, and
Friedrichs constants.

The cutoff chi interpolates between 0 near cl(Omega1 \\ Omega2) and 1 near
cl(Omega2 \\ Omega1) through mollified distance fields, with the explicit
gradient bound 16/(3 eps) ||phi'||_inf.  Splitting g = B1 g + B2 g uses the
grid convolution of g dbar(chi) against 1/(pi z), whose value on the singular
cell is the exact integral of the kernel over a centered square, namely 0 by
antisymmetry.  Friedrichs constants theta_N = sup |int f^2| / int |f|^2 over
mean-zero polynomials come from an orthonormal-basis reformulation so that no
ill-conditioned Gram inverse is needed.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.ndimage import distance_transform_edt
from scipy.signal import fftconvolve
from scipy.special import roots_legendre

from .sectors import INTERIOR, AnnularSector, OrthonormalBasis


# ---------------------------------------------------------------------------
# shapes and grids
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Disk:
    center: complex
    radius: float

    def contains(self, z) -> np.ndarray:
        return np.abs(np.asarray(z, dtype=complex) - self.center) < self.radius

    def bounds(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class Annulus:
    center: complex
    r_inner: float
    r_outer: float

    def contains(self, z) -> np.ndarray:
        r = np.abs(np.asarray(z, dtype=complex) - self.center)
        return (r > self.r_inner) & (r < self.r_outer)

    def bounds(self):
        c, r = self.center, self.r_outer
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)


@dataclass(frozen=True)
class SectorShape:
    sector: AnnularSector

    def contains(self, z) -> np.ndarray:
        return self.sector.contains(z)

    def bounds(self):
        r = self.sector.r_outer
        return (-r, r, -r, r)


@dataclass(frozen=True)
class Union:
    parts: tuple

    def contains(self, z) -> np.ndarray:
        out = np.zeros(np.shape(z), dtype=bool)
        for p in self.parts:
            out |= p.contains(z)
        return out

    def bounds(self):
        bs = [p.bounds() for p in self.parts]
        return (
            min(b[0] for b in bs),
            max(b[1] for b in bs),
            min(b[2] for b in bs),
            max(b[3] for b in bs),
        )


@dataclass(frozen=True)
class Grid:
    """Uniform square-cell grid of cell centers over a bounding box."""

    x0: float
    x1: float
    y0: float
    y1: float
    n: int

    @property
    def h(self) -> float:
        return (self.x1 - self.x0) / self.n

    @property
    def ny(self) -> int:
        return max(int(round((self.y1 - self.y0) / self.h)), 1)

    def points(self) -> np.ndarray:
        h = self.h
        x = self.x0 + (np.arange(self.n) + 0.5) * h
        y = self.y0 + (np.arange(self.ny) + 0.5) * h
        X, Y = np.meshgrid(x, y, indexing="ij")
        return X + 1j * Y

    @classmethod
    def covering(cls, shapes: Sequence, n: int, margin: float = 0.1) -> "Grid":
        bs = [s.bounds() for s in shapes]
        x0 = min(b[0] for b in bs) - margin
        x1 = max(b[1] for b in bs) + margin
        y0 = min(b[2] for b in bs) - margin
        y1 = max(b[3] for b in bs) + margin
        return cls(x0, x1, y0, y1, n)


@dataclass
class GridField:
    """Complex samples on a grid with the two domain masks."""

    grid: Grid
    values: np.ndarray
    mask1: np.ndarray
    mask2: np.ndarray

    def save(self, path_prefix: str) -> None:
        """Flat binary (complex128) plus a JSON header for external viewers."""
        self.values.astype(np.complex128).tofile(path_prefix + ".bin")
        header = {
            "shape": list(self.values.shape),
            "dtype": "complex128",
            "bbox": [self.grid.x0, self.grid.x1, self.grid.y0, self.grid.y1],
            "cell": self.grid.h,
        }
        with open(path_prefix + ".json", "w") as fh:
            json.dump(header, fh, indent=2)


# ---------------------------------------------------------------------------
# mollifier, profile function, cutoff
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _mollifier_c1() -> float:
    """C1 = int |w| rho(w) dA for the normalized radial bump on the unit disk."""
    x, w = roots_legendre(400)
    r = 0.5 * (x + 1.0)
    wt = w * 0.5
    prof = np.exp(-1.0 / (1.0 - r**2))
    mass = float(np.sum(wt * r * prof))
    first = float(np.sum(wt * r**2 * prof))
    return first / mass


@lru_cache(maxsize=1)
def _smoothstep_table():
    """phi: 0 on [0,1/3], 1 on [2/3,1], C-infinity; returns (xs, values, sup|phi'|)."""
    xs = np.linspace(0.0, 1.0, 8001)
    core = np.zeros_like(xs)
    m = (xs > 1.0 / 3) & (xs < 2.0 / 3)
    t = (xs[m] - 1.0 / 3) * 3.0
    core[m] = np.exp(-1.0 / (t * (1.0 - t)))
    vals = np.concatenate([[0.0], np.cumsum(0.5 * (core[1:] + core[:-1]) * np.diff(xs))])
    vals /= vals[-1]
    dmax = float(np.max(core) / np.trapezoid(core, xs))
    return xs, vals, dmax


def smoothstep_sup_derivative() -> float:
    return _smoothstep_table()[2]


@dataclass(frozen=True)
class CutoffSpec:
    """The two open sets of the split plus the mollifier bookkeeping."""

    shape1: object
    shape2: object

    def masks(self, grid: Grid):
        Z = grid.points()
        in1 = self.shape1.contains(Z)
        in2 = self.shape2.contains(Z)
        return Z, in1, in2


@dataclass
class CutoffField:
    grid: Grid
    chi: np.ndarray
    separation: float
    mollifier_scale: float
    phi_prime_sup: float
    mask1: np.ndarray
    mask2: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @property
    def gradient_bound(self) -> float:
        return 16.0 / (3.0 * self.separation) * self.phi_prime_sup

    def gradient_sup(self) -> float:
        gx, gy = np.gradient(self.chi, self.grid.h)
        return float(np.hypot(gx, gy)[1:-1, 1:-1].max())


def build_cutoff(spec: CutoffSpec, grid: Grid) -> CutoffField:
    """Mollified-distance cutoff between the difference sets of the two shapes.

    The separation is measured on the grid (distance transform of the masks);
    chi vanishes where d1 <= eps/16, equals 1 where d2 <= eps/16, and its
    gradient obeys 16/(3 eps) sup|phi'|.
    """
    Z, in1, in2 = spec.masks(grid)
    m1 = in1 & ~in2
    m2 = in2 & ~in1
    if not m1.any() and not m2.any():
        # identical shapes: every constraint is vacuous, return the 1/2 branch
        chi = np.full(Z.shape, 0.5)
        zeros = np.zeros(Z.shape)
        return CutoffField(grid, chi, math.inf, math.inf,
                           smoothstep_sup_derivative(), in1, in2, zeros, zeros)
    if not m1.any() or not m2.any():
        chi = np.full(Z.shape, 1.0 if not m1.any() else 0.0)
        zeros = np.zeros(Z.shape)
        return CutoffField(grid, chi, math.inf, math.inf,
                           smoothstep_sup_derivative(), in1, in2, zeros, zeros)
    h = grid.h
    d1 = distance_transform_edt(~m1) * h
    d2 = distance_transform_edt(~m2) * h
    eps = float(d2[m1].min())
    if eps <= 0:
        raise ValueError("difference sets overlap: zero separation")
    c1 = _mollifier_c1()
    eta = eps / (16.0 * c1)
    ncell = max(int(math.ceil(eta / h)), 1)
    offs = np.arange(-ncell, ncell + 1) * h
    XX, YY = np.meshgrid(offs, offs, indexing="ij")
    r2 = (XX**2 + YY**2) / eta**2
    ker = np.where(r2 < 1.0, np.exp(-1.0 / np.maximum(1.0 - r2, 1e-12)), 0.0)
    ker /= ker.sum()
    d1e = fftconvolve(d1, ker, mode="same")
    d2e = fftconvolve(d2, ker, mode="same")
    xs, vals, dmax = _smoothstep_table()
    chi = np.interp(d1e / (d1e + d2e), xs, vals)
    return CutoffField(grid, chi, eps, eta, dmax, in1, in2, d1, d2)


# ---------------------------------------------------------------------------
# the dbar split
# ---------------------------------------------------------------------------

def _dbar(field: np.ndarray, h: float) -> np.ndarray:
    gx, gy = np.gradient(field, h)
    return 0.5 * (gx + 1j * gy)


def _cauchy_kernel(shape: tuple[int, int], h: float) -> np.ndarray:
    nx, ny = shape
    ox = (np.arange(2 * nx - 1) - (nx - 1)) * h
    oy = (np.arange(2 * ny - 1) - (ny - 1)) * h
    OX, OY = np.meshgrid(ox, oy, indexing="ij")
    W = OX + 1j * OY
    K = np.zeros_like(W)
    nz = W != 0
    K[nz] = 1.0 / (math.pi * W[nz])
    # singular cell: exact integral of 1/(pi z) over the centered square is 0
    return K


@dataclass
class SplitResult:
    b1: GridField
    b2: GridField
    corrector: np.ndarray
    dbar_input_sup: float
    dbar_b1_l2: float
    dbar_b2_l2: float
    norm_ratio_1: float
    norm_ratio_2: float
    separation: float

    @property
    def recorded_cr(self) -> float:
        """C_R with ||B_i g|| <= C_R / eps ||g||, as measured on this run."""
        return max(self.norm_ratio_1, self.norm_ratio_2) * self.separation


def cauchy_split(
    gfun: Callable[[np.ndarray], np.ndarray],
    cut: CutoffField,
    input_dbar_tol: float = 1e-6,
) -> SplitResult:
    """Split g (holomorphic on Omega1 cap Omega2) as B1 g + B2 g.

    B1 g = chi g - u and B2 g = (1 - chi) g + u with u = (1/(pi z)) * (g dbar chi);
    additivity is exact cell by cell, and the discrete dbar residuals of the
    two pieces shrink with the mesh.
    """
    grid = cut.grid
    Z = grid.points()
    h = grid.h
    inter = cut.mask1 & cut.mask2
    g = np.asarray(gfun(Z), dtype=complex)
    gI = np.where(inter, g, 0.0)
    # input must be holomorphic on the intersection
    interior = inter & (distance_transform_edt(inter) > 3)
    if interior.any():
        resid_in = float(np.abs(_dbar(gI, h))[interior].max())
        if resid_in > input_dbar_tol * max(float(np.abs(gI).max()), 1e-300):
            raise ValueError(f"input dbar residual {resid_in:.3g} too large on the overlap")
    else:
        resid_in = 0.0
    hfield = gI * _dbar(cut.chi, h)
    K = _cauchy_kernel(Z.shape, h)
    u = fftconvolve(hfield, K, mode="valid") * h**2
    b1 = cut.chi * gI - u
    b2 = (1.0 - cut.chi) * gI + u
    int1 = cut.mask1 & (distance_transform_edt(cut.mask1) > 3)
    int2 = cut.mask2 & (distance_transform_edt(cut.mask2) > 3)
    r1 = float(np.sqrt(np.mean(np.abs(_dbar(b1, h))[int1] ** 2))) if int1.any() else 0.0
    r2 = float(np.sqrt(np.mean(np.abs(_dbar(b2, h))[int2] ** 2))) if int2.any() else 0.0
    nrm_g = math.sqrt(float(np.sum(np.abs(gI) ** 2)) * h**2)
    nrm1 = math.sqrt(float(np.sum(np.abs(b1[cut.mask1]) ** 2)) * h**2)
    nrm2 = math.sqrt(float(np.sum(np.abs(b2[cut.mask2]) ** 2)) * h**2)
    return SplitResult(
        b1=GridField(grid, b1, cut.mask1, cut.mask2),
        b2=GridField(grid, b2, cut.mask1, cut.mask2),
        corrector=u,
        dbar_input_sup=resid_in,
        dbar_b1_l2=r1,
        dbar_b2_l2=r2,
        norm_ratio_1=nrm1 / max(nrm_g, 1e-300),
        norm_ratio_2=nrm2 / max(nrm_g, 1e-300),
        separation=cut.separation,
    )


# ---------------------------------------------------------------------------
# Friedrichs constant and the closedness margin
# ---------------------------------------------------------------------------

class _DiskBasis:
    """Orthonormal monomials on the unit disk (no Arnoldi needed)."""

    def __init__(self, order: int):
        self.order = order
        nr = order + 8
        x, w = roots_legendre(nr)
        r = 0.5 * (x + 1.0)
        wr = w * 0.5 * r
        nt = 2 * order + 16
        t = np.arange(nt) * 2 * math.pi / nt
        wt = np.full(nt, 2 * math.pi / nt)
        z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        ww = (wr[:, None] * wt[None, :]).ravel()
        k = np.arange(order + 1)
        norms = np.sqrt(math.pi / (k + 1.0))
        self._nodes = z
        self._weights = ww
        self._values = (z[:, None] ** k[None, :]) / norms[None, :]

    @property
    def weights(self):
        return self._weights

    @property
    def node_values(self):
        return self._values


def _mean_zero_bilinear(basis, order: int) -> np.ndarray:
    """Bilinear matrix int p_i p_j dA restricted to the mean-zero subspace."""
    V = basis.node_values[:, : order + 1]
    w = basis.weights
    m = w @ V  # int p_k dA
    B = (V * w[:, None]).T @ V
    Q = null_space(m[None, :])
    return Q.T @ B @ Q


def friedrichs_constant(domain: AnnularSector | None, order: int) -> float:
    """theta_N = sup |int f^2 dA| / int |f|^2 dA over mean-zero polynomials.

    domain=None means the unit disk (theta_N = 0 exactly); interior annular
    sectors are the corner-domain class of interest.  Exterior sectors are
    rejected: the Friedrichs machinery is used on the image of the control
    cylinder inside the disk.
    """
    if order < 1:
        raise ValueError("need at least order 1 for a nonconstant subspace")
    if domain is None:
        basis = _DiskBasis(order)
    else:
        if domain.side != INTERIOR:
            raise ValueError("Friedrichs constants are computed on the disk or interior sectors")
        basis = OrthonormalBasis(domain, order)
    Bs = _mean_zero_bilinear(basis, order)
    s = np.linalg.svd(Bs, compute_uv=False)
    return float(s[0]) if len(s) else 0.0


def closedness_margin(
    domain: AnnularSector | None,
    order: int,
    n_samples: int = 100,
    seed: int = 0,
) -> dict:
    """Sampled check of ||f + conj(g)||^2 >= (1 - theta)(||f||^2 + ||g||^2).

    f, g run over random mean-zero polynomials; the margin 1 - theta_N is the
    closedness constant of A^2 + conj(A^2) on the domain.
    """
    basis = _DiskBasis(order) if domain is None else OrthonormalBasis(domain, order)
    if domain is not None and domain.side != INTERIOR:
        raise ValueError("Friedrichs constants are computed on the disk or interior sectors")
    V = basis.node_values[:, : order + 1]
    w = basis.weights
    m = w @ V
    B = (V * w[:, None]).T @ V
    Q = null_space(m[None, :])
    Bs = Q.T @ B @ Q
    theta = float(np.linalg.svd(Bs, compute_uv=False)[0]) if Bs.size else 0.0
    rng = np.random.default_rng(seed)
    dim = Q.shape[1]
    worst = math.inf
    for _ in range(n_samples):
        a = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        b = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        # ||f + conj g||^2 = ||f||^2 + ||g||^2 + 2 Re int f g dA
        lhs = float(np.linalg.norm(a) ** 2 + np.linalg.norm(b) ** 2
                    + 2.0 * np.real(a @ Bs @ b))
        rhs = (1.0 - theta) * float(np.linalg.norm(a) ** 2 + np.linalg.norm(b) ** 2)
        worst = min(worst, lhs - rhs)
    return {"theta": theta, "margin": 1.0 - theta, "worst_slack": worst, "samples": n_samples}
