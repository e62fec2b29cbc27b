"""Command-line front end: ``sweep``, ``sync`` and ``experiment``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime or
geometry error (including failed internal invariant checks and unwritable
output paths).
"""
from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from .config import ConfigError, ResolvedConfig, parse_config
from .ensemble import analytic_reference, run_experiment, z_score
from .io import RunManifest, write_csv
from .linalg import validate_density
from .protocol import (
    MetricSuperposition,
    ProperTimes,
    QubitParams,
    Sign,
    bob_reduced,
    joint_state_with_metric,
    measure_alice,
    pipeline_purity,
    traced_pair_state,
    w_magnitude_sq,
    w_magnitude_sq_approx,
)
from .spacetime import (
    AffineDiffeo,
    GeometryError,
    Metric2D,
    Worldline,
    einstein_sync,
    pullback,
    static_pair,
)
from .svg import sync_diagram

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class InvariantError(RuntimeError):
    pass


# --- sweep -----------------------------------------------------------------

SWEEP_COLUMNS_TAIL = ["w_sq_exact", "w_sq_approx", "purity"]


def sweep_rows(cfg: ResolvedConfig) -> list[list[float]]:
    """Evaluate ``|W|^2`` (exact and small-angle) and pipeline purity on the sweep grid.

    The sweep runs in product units (omega = 1), holding the non-swept
    quantity at its configured value.
    """
    params = QubitParams(0.0, 1.0)
    x = cfg.omega_dtau
    times = ProperTimes(max(0.0, -x), max(0.0, x))
    rows = []
    for value in np.linspace(cfg.sweep_min, cfg.sweep_max, cfg.sweep_steps):
        value = float(value)
        if cfg.sweep_variable == "omega_delta_product":
            alpha_sq, od = cfg.alpha_sq, value
        else:
            alpha_sq, od = value, cfg.omega_delta
        beta_sq = 1.0 - alpha_sq
        g = MetricSuperposition.from_weights(alpha_sq, od, cfg.beta_phase, cfg.alpha_phase)
        exact = w_magnitude_sq(alpha_sq, beta_sq, 1.0, od)
        approx = w_magnitude_sq_approx(alpha_sq, beta_sq, 1.0, od)
        pur = pipeline_purity(params, times, g)
        if abs(pur - 0.5 * (1.0 + exact)) > 1e-12:
            raise InvariantError(
                f"pipeline purity {pur!r} disagrees with (1 + |W|^2)/2 at {cfg.sweep_variable}={value!r}"
            )
        rows.append([value, exact, approx, pur])
    return rows


def cmd_sweep(cfg: ResolvedConfig, out: str | Path) -> list[list[float]]:
    rows = sweep_rows(cfg)
    manifest = RunManifest("sweep", cfg.to_dict(), cfg.seed)
    write_csv(out, manifest, [cfg.sweep_variable] + SWEEP_COLUMNS_TAIL, rows)
    return rows


# --- sync ------------------------------------------------------------------

SYNC_COLUMNS = [
    "metric", "gtt", "gtx", "gxx", "t1", "t2", "t3", "round_trip",
    "reflection_t", "reflection_x", "orthogonality_residual", "bob_clock_offset",
    "standard_reflection_t", "standard_reflection_x", "reflection_shift",
]


def scenario_metric(cfg: ResolvedConfig) -> Metric2D:
    if cfg.metric == "standard":
        return Metric2D.standard()
    if cfg.metric == "pullback":
        return pullback(Metric2D.standard(), AffineDiffeo(cfg.linear, cfg.offset))
    return Metric2D(*cfg.components)


def scenario_worldlines(cfg: ResolvedConfig) -> tuple[Worldline, Worldline]:
    if cfg.alice is not None or cfg.bob is not None:
        if cfg.alice is None or cfg.bob is None:
            raise ConfigError("give both 'alice' and 'bob' worldlines, or neither")
        return Worldline(cfg.alice), Worldline(cfg.bob)
    # long enough for light 1000x slower than in the standard metric
    return static_pair(cfg.separation, cfg.t1 - 1.0, cfg.t1 + 1000.0 * cfg.separation)


def sync_scenario(cfg: ResolvedConfig):
    try:
        g = scenario_metric(cfg)
    except ValueError as exc:
        raise ConfigError(f"invalid metric: {exc}") from exc
    alice, bob = scenario_worldlines(cfg)
    t1_event = alice.event_at(cfg.t1)
    result = einstein_sync(g, alice, bob, t1_event)
    reference = einstein_sync(Metric2D.standard(), alice, bob, t1_event)
    return g, alice, bob, result, reference


def cmd_sync(cfg: ResolvedConfig, out: str | Path, svg: str | Path | None = None):
    g, alice, bob, res, ref = sync_scenario(cfg)
    if not res.t1 < res.t2 < res.t3:
        raise InvariantError(f"round trip times out of order: {res.t1}, {res.t2}, {res.t3}")
    shift = float(np.hypot(res.reflection_event.t - ref.reflection_event.t,
                           res.reflection_event.x - ref.reflection_event.x))
    row = [
        cfg.metric, g.gtt, g.gtx, g.gxx, res.t1, res.t2, res.t3, res.round_trip,
        res.reflection_event.t, res.reflection_event.x, res.orthogonality_residual,
        res.bob_clock_offset, ref.reflection_event.t, ref.reflection_event.x, shift,
    ]
    write_csv(out, RunManifest("sync", cfg.to_dict(), cfg.seed), SYNC_COLUMNS, [row])
    if svg is not None:
        Path(svg).write_text(sync_diagram(res, alice, bob, g))
    return res, ref, shift


# --- experiment --------------------------------------------------------------

AXES = ("x", "y", "z")
EXPERIMENT_COLUMNS = (
    ["trials", "seed", "stream_id", "plus_fraction"]
    + [f"bloch_{a}" for a in AXES]
    + [f"bloch_{a}_stderr" for a in AXES]
    + ["purity_estimate", "purity_stderr"]
    + [f"analytic_bloch_{a}" for a in AXES]
    + ["analytic_purity"]
    + [f"z_bloch_{a}" for a in AXES]
    + ["z_purity", "z_plus_fraction"]
)


def experiment_row(cfg: ResolvedConfig, workers: int = 1) -> list[Any]:
    exp = cfg.experiment()
    rho_ab = traced_pair_state(joint_state_with_metric(exp.params, exp.times, exp.g))
    for sign in Sign:
        validate_density(bob_reduced(measure_alice(rho_ab, sign)).data)
    est = run_experiment(exp, workers=workers)
    ref = analytic_reference(exp)
    z_bloch = [z_score(est.bloch[i], ref.bloch[i], est.bloch_stderr[i]) for i in range(3)]
    z_pur = z_score(est.purity_estimate, ref.purity, est.purity_stderr)
    z_plus = z_score(est.plus_fraction, 0.5, 0.5 / math.sqrt(exp.trials))
    return (
        [exp.trials, exp.seed, exp.stream_id, est.plus_fraction]
        + [float(v) for v in est.bloch]
        + [float(v) for v in est.bloch_stderr]
        + [est.purity_estimate, est.purity_stderr]
        + [float(v) for v in ref.bloch]
        + [ref.purity]
        + z_bloch
        + [z_pur, z_plus]
    )


def cmd_experiment(cfg: ResolvedConfig, out: str | Path, workers: int = 1) -> list[Any]:
    row = experiment_row(cfg, workers)
    write_csv(out, RunManifest("experiment", cfg.to_dict(), cfg.seed), EXPERIMENT_COLUMNS, [row])
    return row


# --- argument parsing ----------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(n):
    def parse(text: str):
        parts = [float(p) for p in text.split(",")]
        if len(parts) != n:
            raise argparse.ArgumentTypeError(f"expected {n} comma-separated numbers")
        return parts
    return parse


def _matrix(text: str):
    a, b, c, d = _float_list(4)(text)
    return [[a, b], [c, d]]


def _bases(text: str):
    return [b.strip().upper() for b in text.split(",") if b.strip()]


PHYSICS_FLAGS = [
    ("omega0", float), ("omega1", float), ("omega", float),
    ("tau_a", float), ("tau_b", float), ("delta", float),
    ("omega_delta", float), ("omega_dtau", float),
    ("alpha_sq", float), ("beta_sq", float), ("alpha_phase", float), ("beta_phase", float),
]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="metricprobe", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p):
        p.add_argument("--config", help="JSON config file")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--seed", type=int)
        p.add_argument("--trials", type=int)
        for key, typ in PHYSICS_FLAGS:
            p.add_argument("--" + key.replace("_", "-"), dest=key, type=typ)

    p = sub.add_parser("sweep", help="|W|^2 and purity across omega*delta or alpha^2")
    common(p)
    p.add_argument("--sweep-variable", dest="sweep_variable", choices=["omega_delta_product", "alpha_sq"])
    p.add_argument("--sweep-min", dest="sweep_min", type=float)
    p.add_argument("--sweep-max", dest="sweep_max", type=float)
    p.add_argument("--sweep-steps", dest="sweep_steps", type=int)

    p = sub.add_parser("sync", help="Einstein synchronization round trip")
    common(p)
    p.add_argument("--svg", nargs="?", const="", default=None,
                   help="also write an SVG diagram (default path: OUT with .svg suffix)")
    p.add_argument("--metric", choices=["standard", "pullback", "custom"])
    p.add_argument("--linear", type=_matrix, help="pullback map a,b,c,d = [[a,b],[c,d]]")
    p.add_argument("--offset", type=_float_list(2), help="pullback translation t,x")
    p.add_argument("--components", type=_float_list(3), help="custom metric gtt,gtx,gxx")
    p.add_argument("--separation", type=float)
    p.add_argument("--t1", type=float)

    p = sub.add_parser("experiment", help="Monte Carlo tomography of Bob's qubit")
    common(p)
    p.add_argument("--bases", type=_bases, help="comma-separated subset of X,Y,Z")
    p.add_argument("--stream-id", dest="stream_id", type=int)
    p.add_argument("--workers", type=int, default=1)
    return parser


_NOT_CONFIG = {"command", "config", "out", "svg", "workers"}


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {k: v for k, v in vars(args).items() if k not in _NOT_CONFIG}
    try:
        cfg = parse_config(args.config, overrides)
    except ConfigError as exc:
        print(f"metricprobe: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        if args.command == "sweep":
            rows = cmd_sweep(cfg, args.out)
            pur = [r[-1] for r in rows]
            print(f"wrote {len(rows)} rows to {args.out}; purity range [{min(pur):.6f}, {max(pur):.6f}]")
        elif args.command == "sync":
            svg = None
            if args.svg is not None:
                svg = args.svg or str(Path(args.out).with_suffix(".svg"))
            res, ref, shift = cmd_sync(cfg, args.out, svg)
            print(
                f"t1={res.t1:.17g} t2={res.t2:.17g} t3={res.t3:.17g} "
                f"reflection=({res.reflection_event.t:.17g}, {res.reflection_event.x:.17g}) "
                f"residual={res.orthogonality_residual:.3e} reflection_shift={shift:.17g}"
            )
        else:
            row = cmd_experiment(cfg, args.out, workers=args.workers)
            rec = dict(zip(EXPERIMENT_COLUMNS, row))
            print(
                f"purity {rec['purity_estimate']:.6f} +/- {rec['purity_stderr']:.6f} "
                f"(analytic {rec['analytic_purity']:.6f}, z={rec['z_purity']:.2f}); "
                f"plus_fraction {rec['plus_fraction']:.4f}"
            )
    except ConfigError as exc:
        print(f"metricprobe: config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (GeometryError, InvariantError, OSError, ValueError) as exc:
        print(f"metricprobe: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
