"""Truncated observability and reachability constants.

C_N = sup { |<f0, p>_{H2}| / ||p||_{A2(sector)} : deg p <= N } is computed in
an orthonormal polynomial basis of the sector as the partial sum

    C_N^2 = sum_{k<=N} |<f0, p_k>_{H2}|^2,

which needs no matrix inverse and stays stable far past the order where the
monomial Gram factorization breaks down.  The pairing <f0, p_k> has three
routes with very different numerical ranges:

* kernel states f0 = k_u: <k_u, p> = conj(p(u)), exact via the recurrence;
* f0 = P+g with g given as a profile supported on an arc: arc quadrature of
  g conj(p_k) (the orthonormal polynomials stay polynomially bounded there);
* raw coefficient data: explicit pairing against the monomial expansion,
  trustworthy only while the basis change is well conditioned (order <~ 12,
  kept as a cross-check and for arbitrary inputs, with a condition report).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import roots_legendre

from .fourier import ArcInterval, HardyFunction, TWO_PI
from .sectors import EXTERIOR, INTERIOR, AnnularSector, OrthonormalBasis, bergman_gram

BOUNDED_PLATEAU = "bounded-plateau"
DIVERGING = "diverging"
INCONCLUSIVE = "inconclusive"

DEFAULT_PLATEAU_RATIO = 1.1
DEFAULT_DIVERGENCE_RATIO = 2.0


def _pairings_from_point(basis: OrthonormalBasis, u: complex) -> np.ndarray:
    return np.conj(basis.evaluate(np.array([u]))[0])


def _pairings_from_density(
    basis: OrthonormalBasis,
    density: Callable[[np.ndarray], np.ndarray],
    support: ArcInterval,
    n_quad: int = 2000,
) -> np.ndarray:
    x, w = roots_legendre(n_quad)
    t = 0.5 * support.length * x + 0.5 * (support.theta1 + support.theta2)
    wt = w * 0.5 * support.length / TWO_PI
    P = basis.evaluate(np.exp(1j * t))
    g = np.asarray(density(t), dtype=complex)
    return (wt * g) @ np.conj(P)


def _pairings_from_coeffs(basis: OrthonormalBasis, f0: HardyFunction) -> np.ndarray:
    # monomial coefficients of p_k via FFT-free Vandermonde solve would be
    # unstable; pair on the circle instead, which is the same numerical range.
    order = basis.order
    m = 2 * order + 64
    theta = np.arange(m) * TWO_PI / m
    P = basis.evaluate(np.exp(1j * theta))
    f_vals = np.zeros(m, dtype=complex)
    for n, c in f0.coeffs.items():
        f_vals += c * np.exp(1j * n * theta)
    return (f_vals / m) @ np.conj(P)


def constants_profile(
    basis: OrthonormalBasis,
    density: Callable[[np.ndarray], np.ndarray],
    support: ArcInterval,
    orders: Sequence[int],
) -> np.ndarray:
    """C_N for f0 = P+(density) at each order, one basis shared across orders."""
    ell = _pairings_from_density(basis, density, support)
    csum = np.sqrt(np.cumsum(np.abs(ell) ** 2))
    return np.array([csum[n] for n in orders])


def constants_point(basis: OrthonormalBasis, u: complex, orders: Sequence[int]) -> np.ndarray:
    """C_N for the kernel state f0 = k_u at each order."""
    ell = _pairings_from_point(basis, u)
    csum = np.sqrt(np.cumsum(np.abs(ell) ** 2))
    return np.array([csum[n] for n in orders])


def observability_constant(
    f0: HardyFunction,
    sector: AnnularSector,
    order: int,
    *,
    density: Callable[[np.ndarray], np.ndarray] | None = None,
    support: ArcInterval | None = None,
    kernel_point: complex | None = None,
    basis: OrthonormalBasis | None = None,
) -> float:
    """Best constant in |<f0, p>| <= C ||p||_{A2(Omega_T)} over deg p <= order.

    Pass density/support when f0 = P+g for a known arc-supported profile, or
    kernel_point when f0 is a Hardy reproducing kernel; otherwise the raw
    coefficients of f0 are paired directly (stable only at modest orders).
    """
    if sector.side != EXTERIOR:
        raise ValueError("observability constants live on the exterior sector")
    return _constant(f0, sector, order, density, support, kernel_point, basis)


def reachability_constant(
    fT: HardyFunction,
    sector: AnnularSector,
    order: int,
    *,
    density: Callable[[np.ndarray], np.ndarray] | None = None,
    support: ArcInterval | None = None,
    kernel_point: complex | None = None,
    basis: OrthonormalBasis | None = None,
) -> float:
    """Same Rayleigh quotient against the interior sector (reachable states)."""
    if sector.side != INTERIOR:
        raise ValueError("reachability constants live on the interior sector")
    return _constant(fT, sector, order, density, support, kernel_point, basis)


def _constant(f0, sector, order, density, support, kernel_point, basis) -> float:
    if basis is None:
        basis = OrthonormalBasis(sector, order)
    if basis.order < order:
        raise ValueError("shared basis order too small")
    if kernel_point is not None:
        ell = _pairings_from_point(basis, kernel_point)
    elif density is not None:
        if support is None:
            raise ValueError("a density needs its support arc")
        ell = _pairings_from_density(basis, density, support)
    else:
        if f0 is None:
            raise ValueError("no state given")
        ell = _pairings_from_coeffs(basis, f0)
    return float(np.sqrt(np.sum(np.abs(ell[: order + 1]) ** 2)))


def gram_route_constant(f0: HardyFunction, sector: AnnularSector, order: int) -> float:
    """C_N via the monomial Gram factorization (cross-check, small orders only)."""
    gram = bergman_gram(sector, order)
    a = f0.coeff_array(order)
    d = 1.0 / np.sqrt(np.real(np.diag(gram.entries)))
    ah = a * d
    # ||p||^2 = c^H (G^T) c, so the quadratic form matrix is the transpose
    mh = gram.rescaled.T
    L = np.linalg.cholesky(mh)
    y = np.linalg.solve(L, ah)
    return float(np.linalg.norm(y))


def classify_growth(
    constants: Sequence[float],
    plateau_ratio: float = DEFAULT_PLATEAU_RATIO,
    divergence_ratio: float = DEFAULT_DIVERGENCE_RATIO,
    zero_tol: float = 1e-14,
) -> str:
    """Growth verdict from constants at consecutive doubling orders."""
    c = np.asarray(constants, dtype=float)
    if len(c) < 3:
        raise ValueError("need at least three orders to classify growth")
    if np.all(c <= zero_tol):
        return BOUNDED_PLATEAU
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = c[1:] / c[:-1]
    last = ratios[-2:]
    if np.all(last < plateau_ratio):
        return BOUNDED_PLATEAU
    if np.all(last > divergence_ratio):
        return DIVERGING
    return INCONCLUSIVE


@dataclass
class ObservabilityReport:
    """Constants per truncation order with the growth classification."""

    orders: list[int]
    constants: list[float]
    condition_numbers: list[float]
    verdict: str
    growth_ratios: list[float] = field(default_factory=list)
    convention: str = "inner products normalized by 1/(2 pi); Bergman norms unnormalized"

    @classmethod
    def from_constants(
        cls,
        orders: Sequence[int],
        constants: Sequence[float],
        condition_numbers: Sequence[float] | None = None,
        plateau_ratio: float = DEFAULT_PLATEAU_RATIO,
        divergence_ratio: float = DEFAULT_DIVERGENCE_RATIO,
    ) -> "ObservabilityReport":
        verdict = classify_growth(constants, plateau_ratio, divergence_ratio)
        c = np.asarray(constants, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = list(np.where(c[:-1] > 0, c[1:] / np.maximum(c[:-1], 1e-300), np.inf))
        return cls(
            orders=list(int(n) for n in orders),
            constants=[float(x) for x in constants],
            condition_numbers=[float(x) for x in (condition_numbers or [])],
            verdict=verdict,
            growth_ratios=[float(r) for r in ratios],
        )

    def to_json(self, path=None) -> str:
        payload = json.dumps(self.__dict__, indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(payload)
        return payload


def cost_vs_time_sweep(
    synth: Callable[[float], tuple[float, float]],
    horizons: Sequence[float],
) -> dict:
    """Record (horizon, residual, control norm) and fit the sub-unit slope.

    synth(T) must run the control synthesis at horizon T and return the pair
    (achieved relative residual, control norm); failures may raise and are
    recorded per horizon without aborting the sweep.
    """
    rows = []
    for T in horizons:
        try:
            resid, norm = synth(float(T))
            rows.append({"horizon": float(T), "residual": float(resid), "norm": float(norm)})
        except Exception as exc:  # noqa: BLE001 - per-horizon failures are data
            rows.append({"horizon": float(T), "error": str(exc)})
    ok = [r for r in rows if "norm" in r]
    sub = [r for r in ok if r["horizon"] <= 1.0]
    slope = None
    if len(sub) >= 2:
        x = np.log([r["horizon"] for r in sub])
        y = np.log([r["norm"] for r in sub])
        slope = float(np.polyfit(x, y, 1)[0])
    return {"rows": rows, "fitted_slope": slope}


def sweep_table_to_csv(sweep: dict, path) -> None:
    import csv as _csv

    with open(path, "w", newline="") as fh:
        writer = _csv.writer(fh)
        writer.writerow(["horizon", "residual", "norm", "error"])
        for r in sweep["rows"]:
            writer.writerow(
                [r.get("horizon"), r.get("residual", ""), r.get("norm", ""), r.get("error", "")]
            )
