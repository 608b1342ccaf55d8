"""Command-line surface tying the modules into reproducible experiments.

Commands: figure2, gram, observe, reach, synthesize, classify, cns,
friedrichs, sepsing, cost-sweep, calibrate.  Exit codes: 0 success,
2 validation error (including unknown commands), 1 numerical failure.

Configuration is a plain-text key = value file; command-line flags override
file values.  Angles are always radians; floats are written with full
precision; JSON artifacts carry the inner-product convention string.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import boundary, control, dilog, fourier, observability, sectors, splitting

CONVENTION = "inner products normalized by 1/(2 pi); Bergman norms unnormalized"

FIXTURE_DIR = os.path.join(os.path.dirname(__file__), "fixtures")


@dataclass
class ExperimentConfig:
    theta1: float = 0.0
    theta2: float = math.pi / 2
    T: float = 1.0
    orders: list = field(default_factory=lambda: [8, 16, 32, 48])
    eps_sweep: list = field(default_factory=lambda: [10.0 ** (-k) for k in range(2, 11)])
    quad_log2_samples: int = 12
    steps: int = 2048
    fixture_dir: str = FIXTURE_DIR
    output_dir: str = "."
    seed: int = 0
    stamp: str = "unset"

    def validate(self) -> None:
        if not self.theta2 > self.theta1:
            raise ValueError("arc needs theta2 > theta1")
        if not 0 < self.theta2 - self.theta1 < 2 * math.pi:
            raise ValueError("arc length must lie in (0, 2 pi)")
        if self.T <= 0:
            raise ValueError("horizon T must be positive")
        if any(int(n) < 0 for n in self.orders):
            raise ValueError("orders must be non-negative")

    @property
    def arc(self) -> fourier.ArcInterval:
        return fourier.ArcInterval(self.theta1, self.theta2)

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            lines.append(f"{f.name} = {json.dumps(getattr(self, f.name))}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        cfg = cls()
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not hasattr(cfg, key):
                raise ValueError(f"unknown config key: {key}")
            try:
                parsed = json.loads(value)
            except json.JSONDecodeError:
                parsed = value
            setattr(cfg, key, parsed)
        return cfg


def _write_json(path, payload: dict) -> None:
    payload = dict(payload)
    payload.setdefault("convention", CONVENTION)
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _load_state(path: str):
    """State descriptor JSON -> dict with a profile/point/coeff payload."""
    with open(path) as fh:
        return json.load(fh)


def _state_density(desc: dict):
    """(profile callable, support arc) for density-type descriptors."""
    kind = desc["type"]
    if kind == "triangle":
        th0 = float(desc["theta0"])
        return (lambda t: fourier.triangle_profile(t, th0),
                fourier.ArcInterval(-th0, th0))
    if kind == "bump":
        c, hw = float(desc["center"]), float(desc["halfwidth"])
        return (lambda t: fourier.bump_profile(t, c, hw),
                fourier.ArcInterval(c - hw, c + hw))
    raise ValueError(f"descriptor {kind!r} does not define an arc density")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_figure2(cfg: ExperimentConfig, args) -> int:
    theta0 = args.theta0
    if not 0 < theta0 < math.pi:
        raise ValueError("theta0 must lie in (0, pi)")
    samples = args.samples
    theta = np.linspace(-math.pi, math.pi, samples, endpoint=False)
    z = np.exp(1j * theta)
    c0 = theta0**2 / (2 * math.pi)
    alpha = -1.0 / (2 * math.pi)
    vals = c0 + alpha * (
        -2.0 * dilog.dilog(z)
        + dilog.dilog(np.exp(1j * theta0) * z)
        + dilog.dilog(np.exp(-1j * theta0) * z)
    )
    path = os.path.join(cfg.output_dir, args.output)
    with open(path, "w") as fh:
        fh.write("x re im\n")
        for t, v in zip(theta, vals):
            fh.write(f"{t:.17g} {v.real:.17g} {v.imag:.17g}\n")
    print(f"wrote {path} ({samples} samples, c0={c0:.12g}, alpha={alpha:.12g})")
    return 0


def cmd_gram(cfg: ExperimentConfig, args) -> int:
    sector = sectors.AnnularSector(args.side, cfg.T, cfg.arc)
    gram = sectors.bergman_gram(sector, args.order)
    path = os.path.join(cfg.output_dir, args.output)
    gram.to_csv(path)
    print(f"wrote {path}; G[0,0] = {gram.entries[0, 0].real:.10g}, "
          f"cond(rescaled) = {gram.condition_estimate:.3e}")
    return 0


def _constants_for_state(desc: dict, sector: sectors.AnnularSector, orders) -> list[float]:
    basis = sectors.OrthonormalBasis(sector, int(max(orders)))
    if desc["type"] == "hardy_kernel":
        u = complex(desc["u_re"], desc["u_im"])
        return list(observability.constants_point(basis, u, orders))
    if desc["type"] == "coeffs":
        coeffs = {int(n): complex(re, im) for n, re, im in desc["coeffs"]}
        f0 = fourier.HardyFunction.from_coeffs(coeffs)
        return [
            observability._constant(f0, sector, int(n), None, None, None, basis)
            for n in orders
        ]
    profile, support = _state_density(desc)
    return list(observability.constants_profile(basis, profile, support, orders))


def cmd_observe(cfg: ExperimentConfig, args) -> int:
    desc = _load_state(args.input)
    sector = sectors.AnnularSector(sectors.EXTERIOR, cfg.T, cfg.arc)
    orders = [int(n) for n in cfg.orders]
    consts = _constants_for_state(desc, sector, orders)
    report = observability.ObservabilityReport.from_constants(
        orders, consts, plateau_ratio=args.plateau_ratio, divergence_ratio=args.divergence_ratio
    )
    path = os.path.join(cfg.output_dir, args.output)
    report.to_json(path)
    print(f"verdict: {report.verdict}; constants {consts}")
    return 0


def cmd_reach(cfg: ExperimentConfig, args) -> int:
    sector = sectors.AnnularSector(sectors.INTERIOR, cfg.T, cfg.arc)
    orders = [int(n) for n in cfg.orders]
    basis = sectors.OrthonormalBasis(sector, max(orders))
    u = complex(args.u_re, args.u_im)
    consts = list(observability.constants_point(basis, u, orders))
    report = observability.ObservabilityReport.from_constants(orders, consts)
    path = os.path.join(cfg.output_dir, args.output)
    report.to_json(path)
    inside = bool(sector.contains(np.array([u]))[0])
    print(f"u inside interior sector: {inside}; verdict: {report.verdict}")
    return 0


def cmd_synthesize(cfg: ExperimentConfig, args) -> int:
    desc = _load_state(args.input)
    order = args.order
    if desc["type"] == "hardy_kernel":
        u = complex(desc["u_re"], desc["u_im"])
        f0 = sectors.hardy_kernel(u, order)
    else:
        profile, _ = _state_density(desc)
        f_all = fourier.coefficients_by_quadrature(profile, order, cfg.quad_log2_samples)
        f0 = fourier.riesz_project(f_all) if args.system == "h2" else f_all
    if args.system == "h2":
        if not isinstance(f0, fourier.HardyFunction):
            f0 = fourier.riesz_project(f0)
        u_field, report = control.synthesize_h2(
            f0, cfg.T, cfg.arc, order, cfg.eps_sweep, cfg.steps
        )
    else:
        if isinstance(f0, fourier.HardyFunction):
            f0 = f0.as_circle_function()
        u_field, report = control.synthesize_l2(
            f0, cfg.T, cfg.arc, order, cfg.eps_sweep, cfg.steps
        )
    report.to_json(os.path.join(cfg.output_dir, args.output))
    if args.control_csv:
        u_field.to_csv(os.path.join(cfg.output_dir, args.control_csv))
    print(
        f"residual {report.terminal_residual:.3e} at eps {report.epsilon:.1e}, "
        f"norm {report.control_norm:.4g}"
    )
    return 0


def cmd_classify(cfg: ExperimentConfig, args) -> int:
    consts = [float(x) for x in args.constants.split(",")]
    verdict = observability.classify_growth(
        consts, args.plateau_ratio, args.divergence_ratio
    )
    print(verdict)
    return 0


def cmd_cns(cfg: ExperimentConfig, args) -> int:
    desc = _load_state(args.input)
    arc = cfg.arc
    if desc["type"] == "indicator":
        profile = lambda t: arc.contains_angle(t).astype(float)  # noqa: E731
        g = fourier.coefficients_by_quadrature(profile, args.band, cfg.quad_log2_samples)
    else:
        profile, _ = _state_density(desc)
        g = fourier.coefficients_by_quadrature(profile, args.band, cfg.quad_log2_samples)
    sector = sectors.AnnularSector(sectors.EXTERIOR, cfg.T, arc)
    report = boundary.sufficient_condition_check(g, arc, profile)
    out = {"sufficient_condition": json.loads(report.to_json())}
    try:
        h = boundary.rectangle_harmonic_extension(g, sector, args.modes, profile)
        out["dz_diagnostic"] = boundary.dz_norm_diagnostic(h)
    except ValueError as exc:
        out["dz_diagnostic"] = {"error": str(exc)}
    out["pseudo_carleson"] = boundary.pseudo_carleson_ratio(
        g, sector, orders=tuple(int(n) for n in cfg.orders)
    )
    _write_json(os.path.join(cfg.output_dir, args.output), out)
    print(f"sufficient condition passed: {report.passed}; "
          f"dz verdict: {out['dz_diagnostic'].get('verdict', 'n/a')}")
    return 0


def cmd_friedrichs(cfg: ExperimentConfig, args) -> int:
    if args.domain == "disk":
        domain = None
    else:
        domain = sectors.AnnularSector(sectors.INTERIOR, cfg.T, cfg.arc)
    thetas = {int(n): splitting.friedrichs_constant(domain, int(n)) for n in cfg.orders}
    margin = splitting.closedness_margin(domain, int(max(cfg.orders)), seed=cfg.seed)
    payload = {"thetas": thetas, "closedness": margin, "domain": args.domain}
    _write_json(os.path.join(cfg.output_dir, args.output), payload)
    print(f"theta at max order: {thetas[max(thetas)]:.8f}")
    return 0


def cmd_sepsing(cfg: ExperimentConfig, args) -> int:
    spec, gfun, pole = _sepsing_fixture(args.fixture)
    results = []
    for n in args.resolutions:
        grid = splitting.Grid.covering([spec.shape1, spec.shape2], int(n))
        cut = splitting.build_cutoff(spec, grid)
        res = splitting.cauchy_split(gfun, cut)
        results.append(
            {
                "n": int(n),
                "separation": cut.separation,
                "dbar_b1": res.dbar_b1_l2,
                "dbar_b2": res.dbar_b2_l2,
                "recorded_cr": res.recorded_cr,
            }
        )
    _write_json(os.path.join(cfg.output_dir, args.output), {"runs": results})
    print(json.dumps(results, indent=2))
    return 0


def _sepsing_fixture(name: str):
    if name == "radial":
        spec = splitting.CutoffSpec(
            splitting.Disk(0.0, 0.8), splitting.Annulus(0.0, 0.5, 1.2)
        )
        pole = 1.0 + 0.05j
        return spec, (lambda Z: 1.0 / (Z - pole)), pole
    if name == "two-disks":
        spec = splitting.CutoffSpec(
            splitting.Disk(0.0, 1.0), splitting.Disk(1.5, 1.0)
        )
        pole = 2.2 + 0.0j
        return spec, (lambda Z: 1.0 / (Z - pole)), pole
    raise ValueError(f"unknown sepsing fixture {name!r}")


def cmd_cost_sweep(cfg: ExperimentConfig, args) -> int:
    desc = _load_state(args.input)
    profile, _ = _state_density(desc)
    f_all = fourier.coefficients_by_quadrature(profile, args.order, cfg.quad_log2_samples)
    f0 = fourier.riesz_project(f_all)

    def synth(T: float):
        _, rep = control.synthesize_h2(f0, T, cfg.arc, args.order, cfg.eps_sweep, cfg.steps)
        ok = [s for s in rep.sweep if s["residual"] <= args.target]
        if not ok:
            raise ValueError(f"target residual not reached at T={T}")
        best = min(ok, key=lambda s: s["norm"])
        return best["residual"], best["norm"]

    sweep = observability.cost_vs_time_sweep(synth, [float(x) for x in args.horizons])
    observability.sweep_table_to_csv(sweep, os.path.join(cfg.output_dir, args.output))
    print(f"fitted sub-unit slope: {sweep['fitted_slope']}")
    return 0


def cmd_calibrate(cfg: ExperimentConfig, args) -> int:
    from . import calibration

    return calibration.run(cfg, force=args.force, check_only=args.check)


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="halfheat",
        description="Null-controllability toolkit for the half-heat equation on the circle.",
    )
    parser.add_argument("--config", help="plain-text key = value config file")
    parser.add_argument("--theta1", type=float, help="arc start (radians)")
    parser.add_argument("--theta2", type=float, help="arc end (radians)")
    parser.add_argument("--arc", help="comma pair theta1,theta2 (radians)")
    parser.add_argument("--T", type=float, help="time horizon")
    parser.add_argument("--orders", help="comma-separated truncation orders")
    parser.add_argument("--output-dir", help="artifact directory")
    parser.add_argument("--seed", type=int, help="random seed")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure2", help="table of P+ (triangle) on the circle")
    p.add_argument("--theta0", type=float, required=True)
    p.add_argument("--samples", type=int, default=1024)
    p.add_argument("--output", default="dilog.dat")
    p.set_defaults(func=cmd_figure2)

    p = sub.add_parser("gram", help="closed-form Bergman Gram matrix as CSV")
    p.add_argument("--side", choices=[sectors.EXTERIOR, sectors.INTERIOR], required=True)
    p.add_argument("--N", dest="order", type=int, required=True)
    p.add_argument("--output", default="gram.csv")
    p.set_defaults(func=cmd_gram)

    p = sub.add_parser("observe", help="observability constants and growth verdict")
    p.add_argument("--input", required=True, help="state descriptor JSON")
    p.add_argument("--output", default="observability.json")
    p.add_argument("--plateau-ratio", type=float, default=observability.DEFAULT_PLATEAU_RATIO)
    p.add_argument("--divergence-ratio", type=float,
                   default=observability.DEFAULT_DIVERGENCE_RATIO)
    p.set_defaults(func=cmd_observe)

    p = sub.add_parser("reach", help="reachability constants for a kernel state")
    p.add_argument("--u-re", type=float, required=True)
    p.add_argument("--u-im", type=float, required=True)
    p.add_argument("--output", default="reachability.json")
    p.set_defaults(func=cmd_reach)

    p = sub.add_parser("synthesize", help="HUM control synthesis")
    p.add_argument("--system", choices=["h2", "l2"], default="h2")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int, default=32)
    p.add_argument("--output", default="synthesis.json")
    p.add_argument("--control-csv", default="")
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("classify", help="growth verdict for a constant sequence")
    p.add_argument("--constants", required=True)
    p.add_argument("--plateau-ratio", type=float, default=observability.DEFAULT_PLATEAU_RATIO)
    p.add_argument("--divergence-ratio", type=float,
                   default=observability.DEFAULT_DIVERGENCE_RATIO)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("cns", help="boundary-density conditions and dz criterion")
    p.add_argument("--input", required=True)
    p.add_argument("--band", type=int, default=2048)
    p.add_argument("--modes", type=int, default=1024)
    p.add_argument("--output", default="cns.json")
    p.set_defaults(func=cmd_cns)

    p = sub.add_parser("friedrichs", help="Friedrichs constants and closedness margin")
    p.add_argument("--domain", choices=["disk", "ring"], default="ring")
    p.add_argument("--output", default="friedrichs.json")
    p.set_defaults(func=cmd_friedrichs)

    p = sub.add_parser("sepsing", help="separation-of-singularities split study")
    p.add_argument("--fixture", choices=["radial", "two-disks"], default="radial")
    p.add_argument("--resolutions", type=int, nargs="+", default=[128, 256, 512])
    p.add_argument("--output", default="sepsing.json")
    p.set_defaults(func=cmd_sepsing)

    p = sub.add_parser("cost-sweep", help="control norm vs horizon")
    p.add_argument("--input", required=True)
    p.add_argument("--order", type=int, default=32)
    p.add_argument("--horizons", nargs="+", default=[1.0, 0.5, 0.25, 0.125])
    p.add_argument("--target", type=float, default=1e-3)
    p.add_argument("--output", default="cost_sweep.csv")
    p.set_defaults(func=cmd_cost_sweep)

    p = sub.add_parser("calibrate", help="regenerate the committed calibration fixtures")
    p.add_argument("--force", action="store_true", help="overwrite differing fixtures")
    p.add_argument("--check", action="store_true", help="compare only, write nothing new")
    p.set_defaults(func=cmd_calibrate)

    return parser


def _apply_overrides(cfg: ExperimentConfig, args) -> ExperimentConfig:
    if args.arc:
        t1, t2 = (float(x) for x in args.arc.split(","))
        cfg.theta1, cfg.theta2 = t1, t2
    if args.theta1 is not None:
        cfg.theta1 = args.theta1
    if args.theta2 is not None:
        cfg.theta2 = args.theta2
    if args.T is not None:
        cfg.T = args.T
    if args.orders:
        cfg.orders = [int(x) for x in str(args.orders).split(",")]
    if args.output_dir:
        cfg.output_dir = args.output_dir
    if args.seed is not None:
        cfg.seed = args.seed
    return cfg


def run_command(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = ExperimentConfig()
    try:
        if args.config:
            with open(args.config) as fh:
                cfg = ExperimentConfig.from_text(fh.read())
        cfg = _apply_overrides(cfg, args)
        cfg.validate()
        os.makedirs(cfg.output_dir, exist_ok=True)
        snapshot = os.path.join(cfg.output_dir, "config_snapshot.txt")
        with open(snapshot, "w") as fh:
            fh.write(cfg.to_text())
        return args.func(cfg, args)
    except (ValueError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
