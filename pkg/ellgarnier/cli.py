"""Command line interface.

Every command reads an optional JSON configuration (``--config``), applies
the flags that were given on top of it and writes JSON output to ``--out``
or to stdout. Logs go to stderr.

Exit status:

    * 0: all checks passed,
    * 1: a verification failed (residual above tolerance or a
      mathematical failure during verification),
    * 2: usage or input/output error.

**Example**

.. code-block:: console

    $ ellgarnier verify --state fixture-1
    $ ellgarnier orbit --state fixture-1 --steps 20 --seed 0 --out orbit.jsonl
    $ ellgarnier deform --state random-m2 --program "E(3,4) F(3,4)"
    $ ellgarnier theta-eval --z 0.5,0.2 --nome 0.3,0
"""
import argparse
import json
import logging
import sys

import numpy as np

from ellgarnier import __version__, constants, enable_logging, statefile, utils
from ellgarnier.core import Orbit
from ellgarnier.deformations import parse_program, run_program
from ellgarnier.errors import EllGarnierError, IndexOutOfRange
from ellgarnier.garnier import GarnierState, sample_points, verify_state
from ellgarnier.painleve import (
    PainleveState,
    base_points,
    lax_certificate,
    normalize,
    to_garnier,
    verify_painleve,
)
from ellgarnier.theta import log_theta, theta, theta_series


__all__ = [
    "build_parser",
    "main",
]

logger = logging.getLogger(__name__)

INPUT_ERRORS = (OSError, json.JSONDecodeError, KeyError, ValueError, TypeError)

# One certificate per kind of deformation; indices are admissible for all m.
CERTIFICATE_PROGRAMS = {
    "sym": [("sym", (0,))],
    "E": [("E", (0, 1))],
    "F": [("F", (0, 1))],
    "T": [("T", (0, 1))],
    "iota": [("iota", ())],
}


def _complex_flag(text):
    """Parse ``"a,b"`` as ``a + bi``."""
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"Expected 're,im', got {text!r}.")
    try:
        return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        raise argparse.ArgumentTypeError(f"Expected 're,im', got {text!r}.")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with run settings.")
    common.add_argument(
        "--log-level",
        dest="log_level",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Verbosity of the log on stderr.",
    )
    common.add_argument("--seed", type=int, help="Seed of all random samples.")
    common.add_argument("--out", help="Output file (default: stdout).")

    stateful = argparse.ArgumentParser(add_help=False)
    stateful.add_argument(
        "--state", help="Fixture name (fixture-1, random-m<M>) or state file."
    )
    stateful.add_argument("--tol", type=float, help="Tolerance of all checks.")
    stateful.add_argument(
        "--samples", type=int, help="Number of sample points per check."
    )

    parser = argparse.ArgumentParser(
        prog="ellgarnier",
        description="Elliptic Garnier systems and the elliptic Painlevé equation.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    subparsers = parser.add_subparsers(dest="command", required=True)

    verify = subparsers.add_parser(
        "verify", parents=[common, stateful], help="Verify a state."
    )
    verify.set_defaults(func=command_verify)

    orbit = subparsers.add_parser(
        "orbit",
        parents=[common, stateful],
        help="Iterate the elliptic Painlevé equation (m = 1).",
    )
    orbit.add_argument("--steps", type=int, help="Number of steps.")
    orbit.set_defaults(func=command_orbit)

    deform = subparsers.add_parser(
        "deform",
        parents=[common, stateful],
        help="Apply a word of deformations, e.g. 'E(3,4) F(3,4) s(2) iota'.",
    )
    deform.add_argument("--program", help="Deformation program.")
    deform.set_defaults(func=command_deform)

    points = subparsers.add_parser(
        "base-points",
        parents=[common, stateful],
        help="Export the eight base points of a state (m = 1).",
    )
    points.set_defaults(func=command_base_points)

    theta_eval = subparsers.add_parser(
        "theta-eval", parents=[common], help="Evaluate the theta function."
    )
    theta_eval.add_argument("--z", type=_complex_flag, required=True)
    theta_eval.add_argument("--nome", type=_complex_flag, required=True)
    theta_eval.add_argument("--eps", type=float, default=constants.default_eps)
    theta_eval.set_defaults(func=command_theta_eval)

    return parser


def read_config(args):
    """Combine configuration file and command line flags."""
    flags = {
        name: getattr(args, name, None)
        for name in (
            "state",
            "steps",
            "tol",
            "out",
            "seed",
            "program",
            "samples",
            "log_level",
        )
    }

    if args.config is not None:
        return statefile.RunConfig.from_file(
            args.config, **{**flags, "command": args.command}
        )

    return statefile.RunConfig(
        command=args.command, **{k: v for k, v in flags.items() if v is not None}
    )


def _normalized(state):
    if isinstance(state, PainleveState):
        return state
    if state.m != 1:
        raise ValueError(f"This command needs a state with m = 1, got m={state.m}.")
    return normalize(state)


def _write(data, config):
    statefile.write_json(data, path=config.out, stream=sys.stdout)


def command_verify(config):
    state = statefile.load_state(config.state, seed=config.seed)
    tol_state = config.tolerance(constants.tolerance_state)
    tol_gauge = config.tolerance(constants.tolerance_gauge)
    head = statefile.header(config, tol_state)

    try:
        if isinstance(state, GarnierState):
            report = verify_state(
                state,
                tol_state,
                samples=sample_points(state, n=config.samples, seed=config.seed),
            )
            for name, word in CERTIFICATE_PROGRAMS.items():
                step = run_program(
                    state, word, tol_gauge, config.samples, config.seed
                )[0]
                report.add(f"certificate_{name}", step.residuals["gauge"], tol_gauge)
        else:
            report = verify_painleve(
                state, tol_state, seed=config.seed, n=config.samples
            )
            report.merge(
                verify_state(to_garnier(state), tol_state, seed=config.seed),
                prefix="garnier_",
            )
            report.add(
                "lax",
                lax_certificate(state, seed=config.seed, n=config.samples),
                tol_gauge,
            )
    except EllGarnierError as exc:
        logger.error(f"Verification failed: {exc}")
        _write({"header": head, "error": f"{type(exc).__name__}: {exc}"}, config)
        return 1

    _write({"header": head, "report": report.to_dict()}, config)

    if not report.passed:
        logger.warning(f"Failed checks: {report.failed_checks()}")
        return 1
    return 0


def command_orbit(config):
    state = _normalized(statefile.load_state(config.state, seed=config.seed))
    tolerance = config.tolerance(constants.tolerance_orbit)

    orbit = Orbit(
        state,
        config.steps,
        outfile=config.out,
        tolerance=tolerance,
        samples=config.samples,
        seed=config.seed,
        metadata=statefile.header(config, tolerance),
    )
    try:
        orbit.run()
    except EllGarnierError as exc:
        logger.error(f"Orbit failed at step {orbit.niter}: {exc}")
        return 1

    if config.out is None:
        statefile.write_records(orbit.records, orbit.header(), stream=sys.stdout)

    return 0 if orbit.passed else 1


def command_deform(config):
    state = statefile.load_state(config.state, seed=config.seed)
    word = parse_program(config.program)
    if not word:
        raise ValueError("The deformation program is empty.")

    tolerance = config.tolerance(constants.tolerance_gauge)
    try:
        steps = run_program(state, word, tolerance, config.samples, config.seed)
    except IndexOutOfRange:
        raise
    except EllGarnierError as exc:
        logger.error(f"Deformation failed: {exc}")
        return 1

    head = {**statefile.header(config, tolerance), "initial": state.to_dict()}
    statefile.write_records(
        [s.to_record() for s in steps], head, path=config.out, stream=sys.stdout
    )

    passed = all(s.passed(tolerance) for s in steps)
    return 0 if passed else 1


def command_base_points(config):
    state = _normalized(statefile.load_state(config.state, seed=config.seed))

    try:
        points = base_points(state)
    except EllGarnierError as exc:
        logger.error(f"Base points undefined: {exc}")
        return 1

    records = [
        {
            "index": index,
            "f": utils.affine_display(f),
            "g": utils.affine_display(g),
            "f_coordinates": f.to_list(),
            "g_coordinates": g.to_list(),
        }
        for index, (f, g) in enumerate(points, start=1)
    ]
    _write({"header": statefile.header(config), "points": records}, config)
    return 0


def command_theta_eval(config, z, nome, eps):
    values = {
        "theta": theta(z, nome, eps),
        "theta_series": theta_series(z, nome, eps),
        "log_theta": log_theta(z, nome, eps),
    }
    _write(
        {
            "header": statefile.header(config),
            "z": utils.complex_to_pair(z),
            "nome": utils.complex_to_pair(nome),
            "eps": eps,
            **{k: utils.complex_to_pair(v) for k, v in values.items()},
        },
        config,
    )
    return 0 if np.all(np.isfinite(list(values.values()))) else 1


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)

    try:
        config = read_config(args)
    except INPUT_ERRORS as exc:
        enable_logging()
        logger.error(f"Invalid configuration: {exc}")
        return 2

    enable_logging(getattr(logging, config.log_level))
    logger.info(f"Run `{config.command}` (seed={config.seed}).")

    try:
        if config.command == "theta-eval":
            return command_theta_eval(config, args.z, args.nome, args.eps)
        return args.func(config)
    except INPUT_ERRORS as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return 2
