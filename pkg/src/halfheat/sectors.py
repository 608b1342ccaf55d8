"""Annular-sector geometry and Bergman-space linear algebra.

The exterior sector is {1 < |z| < e^T, arg z in (theta1, theta2)}, the
interior one is its reflection into the unit disk.  Monomial inner products
on either sector factor exactly as radial(m+n) * angular(m-n), which gives
closed-form Gram and bilinear matrices.  For anything that needs an inverse
(observability constants, Friedrichs constants) the monomial Gram is too
ill-conditioned past order ~12, so this module also builds an orthonormal
polynomial basis by quadrature + Arnoldi; see OrthonormalBasis.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.special import roots_legendre

from .fourier import ArcInterval, HardyFunction

EXTERIOR = "exterior"
INTERIOR = "interior"


@dataclass(frozen=True)
class AnnularSector:
    side: str
    T: float
    arc: ArcInterval

    def __post_init__(self):
        if self.side not in (EXTERIOR, INTERIOR):
            raise ValueError("side must be 'exterior' or 'interior'")
        if self.T <= 0:
            raise ValueError("time horizon must be positive")

    @property
    def r_inner(self) -> float:
        return 1.0 if self.side == EXTERIOR else math.exp(-self.T)

    @property
    def r_outer(self) -> float:
        return math.exp(self.T) if self.side == EXTERIOR else 1.0

    def area(self) -> float:
        return 0.5 * self.arc.length * (self.r_outer**2 - self.r_inner**2)

    def radial_moment(self, s) -> np.ndarray:
        """R(s) = int r^{s+1} dr over the radial range, in closed form."""
        s = np.asarray(s, dtype=float)
        if self.side == EXTERIOR:
            return (np.exp(self.T * (s + 2.0)) - 1.0) / (s + 2.0)
        return (1.0 - np.exp(-self.T * (s + 2.0))) / (s + 2.0)

    def angular_moment(self, d) -> np.ndarray:
        """A(d) = int_{theta1}^{theta2} e^{i d theta} dtheta, in closed form."""
        d = np.asarray(d, dtype=float)
        safe = np.where(d == 0, 1.0, d)
        full = (np.exp(1j * safe * self.arc.theta2) - np.exp(1j * safe * self.arc.theta1)) / (
            1j * safe
        )
        return np.where(d == 0, self.arc.length, full)

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        return (r > self.r_inner) & (r < self.r_outer) & self.arc.contains_angle(np.angle(z))

    def quadrature(self, n_radial: int, n_angular: int):
        """Tensor Gauss-Legendre nodes z and weights w with int f dA = sum w f(z)."""
        xr, wr = roots_legendre(n_radial)
        xt, wt = roots_legendre(n_angular)
        r1, r2 = self.r_inner, self.r_outer
        r = 0.5 * (r2 - r1) * xr + 0.5 * (r1 + r2)
        wr = wr * 0.5 * (r2 - r1) * r  # includes the r dr Jacobian
        t = 0.5 * self.arc.length * xt + 0.5 * (self.arc.theta1 + self.arc.theta2)
        wt = wt * 0.5 * self.arc.length
        z = (r[:, None] * np.exp(1j * t[None, :])).ravel()
        w = (wr[:, None] * wt[None, :]).ravel()
        return z, w


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


@dataclass(frozen=True)
class GramMatrix:
    """Hermitian matrix of monomial Bergman inner products <z^m, z^n>."""

    order: int
    entries: np.ndarray  # entries[m, n] = <z^m, z^n>_{A^2(sector)}

    @cached_property
    def rescaled(self) -> np.ndarray:
        """Unit-diagonal version D G D with D = diag(1/sqrt(G[n,n]))."""
        d = 1.0 / np.sqrt(np.real(np.diag(self.entries)))
        return self.entries * d[:, None] * d[None, :]

    @cached_property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular factor of the rescaled matrix (raises if it fails)."""
        return np.linalg.cholesky(self.rescaled)

    @cached_property
    def condition_estimate(self) -> float:
        return float(np.linalg.cond(self.rescaled))

    def to_csv(self, path) -> None:
        rows = [
            [m, n, repr(self.entries[m, n].real), repr(self.entries[m, n].imag)]
            for m in range(self.order + 1)
            for n in range(self.order + 1)
        ]
        _write_csv(path, ["m", "n", "re", "im"], rows)


@dataclass(frozen=True)
class BilinearSquareMatrix:
    """Complex-symmetric matrix of plain (unconjugated) products int z^m z^n dA."""

    order: int
    entries: np.ndarray

    def to_csv(self, path) -> None:
        rows = [
            [m, n, repr(self.entries[m, n].real), repr(self.entries[m, n].imag)]
            for m in range(self.order + 1)
            for n in range(self.order + 1)
        ]
        _write_csv(path, ["m", "n", "re", "im"], rows)


def bergman_gram(sector: AnnularSector, order: int) -> GramMatrix:
    """Closed-form Gram G[m, n] = <z^m, z^n> = R(m+n) A(m-n) on the sector."""
    if order < 0:
        raise ValueError("order must be non-negative")
    m = np.arange(order + 1)
    M, N = np.meshgrid(m, m, indexing="ij")
    entries = sector.radial_moment(M + N) * sector.angular_moment(M - N)
    return GramMatrix(order, entries)


def friedrichs_bilinear(sector: AnnularSector | None, order: int) -> BilinearSquareMatrix:
    """B[m, n] = int z^m z^n dA; pass sector=None for the full unit disk."""
    if order < 0:
        raise ValueError("order must be non-negative")
    m = np.arange(order + 1)
    M, N = np.meshgrid(m, m, indexing="ij")
    s = M + N
    if sector is None:
        entries = np.where(s == 0, math.pi, 0.0).astype(complex)
    else:
        entries = sector.radial_moment(s) * sector.angular_moment(s)
    return BilinearSquareMatrix(order, entries)


def hardy_kernel(u: complex, order: int) -> HardyFunction:
    """Reproducing kernel of H^2 at u: coefficients conj(u)^n, truncated."""
    if abs(u) >= 1.0:
        raise ValueError("kernel point must lie in the open unit disk")
    coeffs = {n: complex(np.conj(u) ** n) for n in range(order + 1)}
    return HardyFunction(coeffs, order)


def exterior_bergman_kernel(u: complex, z: complex) -> complex:
    """Bergman kernel of the exterior disk, 1/(pi (1 - conj(u) z)^2), |u|,|z| > 1."""
    if abs(u) <= 1.0 or abs(z) <= 1.0:
        raise ValueError("both points must lie outside the closed unit disk")
    return 1.0 / (math.pi * (1.0 - np.conj(u) * z) ** 2)


def annulus_monomial_norm(T: float, n: int) -> float:
    """Squared A^2 norm of z^n over the annulus 1 < |z| < e^{T/2}.

    Equals 2 pi (e^{T(n+1)} - 1)/(2n + 2); each term dominates pi T, which is
    the elementary inequality bounding the H^2 norm by the annulus norm.
    """
    if T <= 0:
        raise ValueError("horizon must be positive")
    if n < 0:
        raise ValueError("mode must be non-negative")
    return 2.0 * math.pi * (math.expm1(T * (n + 1))) / (2.0 * n + 2.0)


class OrthonormalBasis:
    """A^2(sector)-orthonormal polynomials p_0..p_N via quadrature + Arnoldi.

    The monomial Gram on an arc sector becomes numerically singular around
    order 12 in double precision; the Arnoldi recurrence sidesteps that by
    never forming a change-of-basis from monomials.  Values anywhere in the
    plane come from the stored Hessenberg recurrence.
    """

    def __init__(self, sector: AnnularSector, order: int, extra_nodes: int = 8):
        self.sector = sector
        self.order = order
        nr = order + extra_nodes
        nt = 2 * order + 5 * extra_nodes
        z, w = sector.quadrature(nr, nt)
        sw = np.sqrt(w)
        V = np.zeros((len(z), order + 1), dtype=complex)
        H = np.zeros((order + 2, order + 1), dtype=complex)
        nrm = float(np.linalg.norm(sw))
        V[:, 0] = 1.0 / nrm
        for k in range(order):
            q = z * V[:, k]
            for _ in range(2):  # one reorthogonalization pass
                h = V[:, : k + 1].conj().T @ (w * q)
                H[: k + 1, k] += h
                q -= V[:, : k + 1] @ h
            hn = float(np.linalg.norm(sw * q))
            H[k + 1, k] = hn
            V[:, k + 1] = q / hn
        self._nodes = z
        self._weights = w
        self._values = V
        self._hessenberg = H
        self._scale0 = nrm

    @property
    def nodes(self) -> np.ndarray:
        return self._nodes

    @property
    def weights(self) -> np.ndarray:
        return self._weights

    @property
    def node_values(self) -> np.ndarray:
        return self._values

    def evaluate(self, pts) -> np.ndarray:
        """Values p_k(pts) for k = 0..order, shape (len(pts), order+1)."""
        pts = np.atleast_1d(np.asarray(pts, dtype=complex))
        H = self._hessenberg
        P = np.zeros((len(pts), self.order + 1), dtype=complex)
        P[:, 0] = 1.0 / self._scale0
        for k in range(self.order):
            q = pts * P[:, k] - P[:, : k + 1] @ H[: k + 1, k]
            P[:, k + 1] = q / H[k + 1, k]
        return P

    def area_integrals(self) -> np.ndarray:
        """int p_k dA for every k."""
        return self._weights @ self._values

    def orthonormality_defect(self) -> float:
        G = (self._values.conj().T * self._weights) @ self._values
        return float(np.max(np.abs(G - np.eye(self.order + 1))))
