"""Fourier-series representation of functions on the unit circle.

Conventions used throughout the package:

* inner product  <f, g> = (1/2pi) int_0^{2pi} f(e^{ix}) conj(g(e^{ix})) dx
  = sum_n fhat(n) conj(ghat(n)),
* L2 norm  ||f|| = (sum_n |fhat(n)|^2)^{1/2}  (Parseval is factor-free).

All objects are immutable after construction; every operation returns a new
value, so everything here is safe to call from parallel workers.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np
from scipy.special import roots_legendre

TWO_PI = 2.0 * math.pi


def _as_coeff_dict(coeffs: Mapping[int, complex]) -> dict[int, complex]:
    return {int(n): complex(c) for n, c in coeffs.items()}


@dataclass(frozen=True)
class CircleFunction:
    """Finite two-sided Fourier series sum_{|n| <= n_max} c_n e^{inx}."""

    coeffs: dict[int, complex]
    n_max: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_dict(self.coeffs))
        for n in self.coeffs:
            if abs(n) > self.n_max:
                raise ValueError(f"mode {n} outside truncation order {self.n_max}")

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, complex]) -> "CircleFunction":
        nmax = max((abs(int(n)) for n in coeffs), default=0)
        return cls(dict(coeffs), nmax)

    def coeff(self, n: int) -> complex:
        return self.coeffs.get(int(n), 0.0 + 0.0j)

    def modes(self) -> np.ndarray:
        return np.array(sorted(self.coeffs), dtype=int)

    def coeff_array(self, n_lo: int, n_hi: int) -> np.ndarray:
        """Dense coefficient vector for modes n_lo..n_hi inclusive."""
        return np.array([self.coeff(n) for n in range(n_lo, n_hi + 1)], dtype=complex)

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def evaluate(self, theta) -> np.ndarray:
        """Pointwise values of the (truncated) series at angles theta."""
        theta = np.atleast_1d(np.asarray(theta, dtype=float))
        out = np.zeros(theta.shape, dtype=complex)
        for n, c in self.coeffs.items():
            out += c * np.exp(1j * n * theta)
        return out

    def conjugate(self) -> "CircleFunction":
        return CircleFunction({-n: np.conj(c) for n, c in self.coeffs.items()}, self.n_max)

    def scaled(self, a: complex) -> "CircleFunction":
        return CircleFunction({n: a * c for n, c in self.coeffs.items()}, self.n_max)

    def is_real_valued(self, tol: float = 1e-12) -> bool:
        return all(
            abs(self.coeff(-n) - np.conj(c)) <= tol for n, c in self.coeffs.items()
        )


@dataclass(frozen=True)
class HardyFunction:
    """One-sided series sum_{0 <= n <= n_max} c_n e^{inx}; no negative modes."""

    coeffs: dict[int, complex]
    n_max: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_coeff_dict(self.coeffs))
        for n in self.coeffs:
            if n < 0:
                raise ValueError("HardyFunction cannot store negative modes")
            if n > self.n_max:
                raise ValueError(f"mode {n} outside truncation order {self.n_max}")

    @classmethod
    def from_coeffs(cls, coeffs: Mapping[int, complex]) -> "HardyFunction":
        nmax = max((int(n) for n in coeffs), default=0)
        return cls(dict(coeffs), nmax)

    def coeff(self, n: int) -> complex:
        return self.coeffs.get(int(n), 0.0 + 0.0j)

    def coeff_array(self, n_hi: int | None = None) -> np.ndarray:
        hi = self.n_max if n_hi is None else n_hi
        return np.array([self.coeff(n) for n in range(hi + 1)], dtype=complex)

    def l2_norm(self) -> float:
        return math.sqrt(sum(abs(c) ** 2 for c in self.coeffs.values()))

    def as_circle_function(self) -> CircleFunction:
        return CircleFunction(dict(self.coeffs), self.n_max)

    def evaluate_disk(self, z) -> np.ndarray:
        """Power-series values sum c_n z^n (meaningful for |z| <= 1)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.zeros(z.shape, dtype=complex)
        for n, c in self.coeffs.items():
            out += c * z**n
        return out


@dataclass(frozen=True)
class ArcInterval:
    """Open strict sub-arc {e^{ix}, theta1 < x < theta2} of the circle."""

    theta1: float
    theta2: float

    def __post_init__(self):
        length = self.theta2 - self.theta1
        if not 0.0 < length < TWO_PI:
            raise ValueError("arc length must lie strictly between 0 and 2pi")

    @property
    def length(self) -> float:
        return self.theta2 - self.theta1

    @property
    def zeta1(self) -> complex:
        return complex(np.exp(1j * self.theta1))

    @property
    def zeta2(self) -> complex:
        return complex(np.exp(1j * self.theta2))

    def contains_angle(self, theta) -> np.ndarray:
        """Membership test, with angles reduced mod 2pi into [theta1, theta1+2pi)."""
        th = np.mod(np.asarray(theta, dtype=float) - self.theta1, TWO_PI)
        return (th > 0) & (th < self.length)


def riesz_project(f: CircleFunction) -> HardyFunction:
    """Keep the non-negative modes of f (the projection P+)."""
    if isinstance(f, HardyFunction):
        return f
    kept = {n: c for n, c in f.coeffs.items() if n >= 0}
    return HardyFunction(kept, f.n_max)


def semigroup_apply(f, t: float):
    """Apply the half-heat flow: mode n is damped by e^{-|n| t}."""
    if t < 0:
        raise ValueError("time must be non-negative")
    damped = {n: c * math.exp(-abs(n) * t) for n, c in f.coeffs.items()}
    return type(f)(damped, f.n_max)


def sobolev_norm(f, s: float) -> float:
    """(sum_n (1+n^2)^s |fhat(n)|^2)^{1/2}; s = 0 is the L2 norm."""
    if s < 0:
        raise ValueError("order must be non-negative")
    total = sum((1.0 + n * n) ** s * abs(c) ** 2 for n, c in f.coeffs.items())
    return math.sqrt(total)


@dataclass(frozen=True)
class TailReport:
    """Power-law diagnostics for one side of a coefficient tail.

    exponent p is the fitted decay rate |c_n| ~ C |n|^{-p}; weighted_sum is
    sum |n|^w |c_n|^2 over stored modes; tail_estimate extrapolates that sum
    beyond the stored band; divergent_trend flags fits with p too small for
    the weighted sum to converge.  Heuristics only, never proofs.
    """

    weighted_sum: float
    exponent: float
    tail_estimate: float
    divergent_trend: bool


def _fit_tail(ns: np.ndarray, cs: np.ndarray, weight: float) -> TailReport:
    """Fit |c| ~ C n^-p on the outer half of the modes; weight w in n^w |c|^2."""
    value = float(np.sum(np.abs(ns) ** weight * np.abs(cs) ** 2))
    mags = np.abs(cs)
    keep = mags > 0
    ns, mags = np.abs(ns[keep]), mags[keep]
    if len(ns) < 4:
        return TailReport(value, math.inf, 0.0, False)
    cut = max(np.max(ns) // 2, np.min(ns))
    sel = ns >= cut
    if np.count_nonzero(sel) < 4:
        sel = np.ones(len(ns), dtype=bool)
    p, logc = np.polyfit(np.log(ns[sel]), np.log(mags[sel]), 1)
    p = -p
    nmax = float(np.max(ns))
    # sum n^w C^2 n^{-2p} converges iff 2p - w > 1; the 0.05 margin sends the
    # critical (logarithmically divergent) case to the divergent side
    conv = 2 * p - weight > 1.05
    if conv:
        c2 = math.exp(2 * logc)
        tail = c2 * nmax ** (weight + 1 - 2 * p) / (2 * p - weight - 1)
    else:
        tail = math.inf
    return TailReport(value, float(p), float(tail), not conv)


def dirichlet_tail_report(g: CircleFunction) -> TailReport:
    """sum_{n<0} |n| |ghat(n)|^2 with a power-law tail fit on the negative modes."""
    ns = np.array([n for n in g.coeffs if n < 0], dtype=float)
    if len(ns) == 0:
        return TailReport(0.0, math.inf, 0.0, False)
    cs = np.array([g.coeffs[int(n)] for n in ns], dtype=complex)
    return _fit_tail(ns, cs, weight=1.0)


def dirichlet_tail_norm(g: CircleFunction) -> float:
    """sum_{n<0} |n| |ghat(n)|^2 over the stored modes."""
    return sum(abs(n) * abs(c) ** 2 for n, c in g.coeffs.items() if n < 0)


def positive_tail_report(g) -> TailReport:
    """Power-law fit of the positive-frequency tail, weighted by |n| (s = 1/2)."""
    ns = np.array([n for n in g.coeffs if n > 0], dtype=float)
    if len(ns) == 0:
        return TailReport(0.0, math.inf, 0.0, False)
    cs = np.array([g.coeffs[int(n)] for n in ns], dtype=complex)
    return _fit_tail(ns, cs, weight=1.0)


def coefficients_by_quadrature(
    profile: Callable[[np.ndarray], np.ndarray], n_max: int, log2_samples: int = 12
) -> CircleFunction:
    """Trapezoidal (equivalently FFT) Fourier coefficients of a 2pi-periodic profile.

    Spectrally accurate for smooth profiles; for profiles with kinks the
    coefficient error is O(h^2) with h = 2pi/2^log2_samples.
    """
    m = 1 << log2_samples
    if n_max >= m // 2:
        raise ValueError("truncation order must be below half the sample count")
    theta = np.arange(m) * TWO_PI / m
    vals = np.asarray(profile(theta), dtype=complex)
    spec = np.fft.fft(vals) / m
    coeffs = {n: spec[n % m] for n in range(-n_max, n_max + 1)}
    return CircleFunction(coeffs, n_max)


def triangle_profile(theta: np.ndarray, theta0: float) -> np.ndarray:
    """Tent profile of height theta0 supported on (-theta0, theta0), 2pi-periodic."""
    t = np.mod(np.asarray(theta, dtype=float) + math.pi, TWO_PI) - math.pi
    return np.clip(theta0 - np.abs(t), 0.0, None)


def triangle_function(theta0: float, n_max: int, log2_samples: int = 12) -> CircleFunction:
    """Fourier coefficients of the tent profile, computed by quadrature."""
    if not 0.0 < theta0 < math.pi:
        raise ValueError("theta0 must lie in (0, pi)")
    return coefficients_by_quadrature(lambda t: triangle_profile(t, theta0), n_max, log2_samples)


def triangle_coeff_exact(n, theta0: float):
    """Closed-form tent coefficients: (1 - cos n theta0)/(pi n^2), theta0^2/(2pi) at n=0."""
    n = np.asarray(n)
    safe = np.where(n == 0, 1, n)
    return np.where(
        n == 0, theta0**2 / TWO_PI, (1.0 - np.cos(safe * theta0)) / (math.pi * safe**2)
    )


def triangle_function_exact(theta0: float, n_max: int) -> CircleFunction:
    """Tent coefficients from the closed form (machine accurate at every mode)."""
    if not 0.0 < theta0 < math.pi:
        raise ValueError("theta0 must lie in (0, pi)")
    ns = np.arange(-n_max, n_max + 1)
    vals = triangle_coeff_exact(ns, theta0)
    return CircleFunction({int(n): complex(v) for n, v in zip(ns, vals)}, n_max)


def coefficients_piecewise_gauss(
    profile: Callable[[np.ndarray], np.ndarray],
    breakpoints: np.ndarray,
    n_max: int,
    nodes_per_piece: int | None = None,
) -> CircleFunction:
    """Fourier coefficients by Gauss-Legendre quadrature on smooth pieces.

    breakpoints must list the kink locations in increasing order covering one
    period; the integrand is assumed smooth between consecutive breakpoints,
    so each coefficient is computed to near machine precision.
    """
    bp = np.asarray(breakpoints, dtype=float)
    if bp[-1] - bp[0] > TWO_PI + 1e-12:
        raise ValueError("breakpoints must cover at most one period")
    q = nodes_per_piece or (n_max // 2 + 24)
    x, w = roots_legendre(q)
    ns = np.arange(-n_max, n_max + 1)
    acc = np.zeros(len(ns), dtype=complex)
    for a, b in zip(bp[:-1], bp[1:]):
        t = 0.5 * (b - a) * x + 0.5 * (a + b)
        wt = 0.5 * (b - a) * w
        vals = np.asarray(profile(t), dtype=complex)
        acc += (wt * vals) @ np.exp(-1j * np.outer(t, ns))
    acc /= TWO_PI
    return CircleFunction({int(n): complex(c) for n, c in zip(ns, acc)}, n_max)


def cauchy_transform(g: CircleFunction, z: complex) -> complex:
    """Cauchy transform of g: P+g(z) inside the disk, -P-g(z) outside."""
    az = abs(z)
    if math.isclose(az, 1.0, rel_tol=0.0, abs_tol=1e-14):
        raise ValueError("the Cauchy transform is not defined on the unit circle")
    if az < 1.0:
        return complex(sum(c * z**n for n, c in g.coeffs.items() if n >= 0))
    return complex(-sum(c * z**n for n, c in g.coeffs.items() if n < 0))


def bump_profile(theta, center: float, halfwidth: float):
    """C-infinity bump exp(-1/(1-x^2)) with x = (theta-center)/halfwidth, periodized."""
    t = np.mod(np.asarray(theta, dtype=float) - center + math.pi, TWO_PI) - math.pi
    x = t / halfwidth
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out
