"""Command-line interface: subcommands ml | ivp | bvp | verify.

Exit codes: 0 success, 1 verification failure, 2 validation error,
3 special-function non-convergence, 4 singular parameter, 5 iteration
non-convergence.

Numbers are written with 15 significant digits in CSV and 17 in JSON;
identical inputs produce byte-identical output files.  When an output path
is given, report figures (PNG) are rendered alongside the delimited data
unless --no-plot is passed.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import bvp, figures, ivp, specfun, verify
from .abcalc import ABConfig, normalization
from .errors import (
    AbfracError,
    DimensionMismatch,
    DomainError,
    EvalError,
    ExprSyntaxError,
    GridError,
    NoConvergence,
    NonConvergence,
    PoleError,
    RangeError,
    SingularParameter,
    TailError,
)
from .specfun import EvalPolicy

EXIT_OK = 0
EXIT_VERIFY_FAIL = 1
EXIT_VALIDATION = 2
EXIT_NONCONVERGENCE = 3
EXIT_SINGULAR = 4
EXIT_NO_ITER_CONVERGENCE = 5

_VALIDATION_ERRORS = (
    DomainError,
    GridError,
    RangeError,
    TailError,
    DimensionMismatch,
    ExprSyntaxError,
    EvalError,
    ValueError,
)


def fmt15(v) -> str:
    return format(float(v), ".15g")


def fmt17(v) -> str:
    return format(float(v), ".17g")


def _json_text(value, indent=0) -> str:
    """Deterministic JSON with floats at 17 significant digits."""
    pad = " " * indent
    if isinstance(value, dict):
        if not value:
            return "{}"
        rows = [
            f'{pad}  "{k}": {_json_text(v, indent + 2)}' for k, v in value.items()
        ]
        return "{\n" + ",\n".join(rows) + f"\n{pad}}}"
    if isinstance(value, (list, tuple, np.ndarray)):
        items = [_json_text(v, indent + 2) for v in value]
        if any("\n" in s or len(s) > 24 for s in items) and len(items) <= 64:
            rows = [f"{pad}  {s}" for s in items]
            return "[\n" + ",\n".join(rows) + f"\n{pad}]"
        return "[" + ", ".join(items) + "]"
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return fmt17(value)
    if value is None:
        return "null"
    text = str(value).replace("\\", "\\\\").replace('"', '\\"')
    return f'"{text}"'


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _csv(header, columns) -> str:
    lines = [",".join(header)]
    for row in zip(*columns):
        lines.append(",".join(fmt15(v) for v in row))
    return "\n".join(lines) + "\n"


def _load_config(path: str) -> dict:
    """Flat key = value document; '#' starts a comment; flags override."""
    conf = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        conf[key.strip().replace("-", "_")] = value.strip()
    return conf


_CONFIG_ALIASES = {"lambda": "lam"}  # config keys mirror flag names


def _apply_config(args: argparse.Namespace, parser_defaults: dict):
    """Fill argparse Nones from --config, then from hard defaults."""
    conf = _load_config(args.config) if getattr(args, "config", None) else {}
    conf = {_CONFIG_ALIASES.get(k, k): v for k, v in conf.items()}
    for key, (caster, default) in parser_defaults.items():
        if getattr(args, key, None) is None:
            if key in conf:
                setattr(args, key, caster(conf[key]))
            else:
                setattr(args, key, default)
    unknown = set(conf) - set(parser_defaults)
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")


def _policy(tol: float | None) -> EvalPolicy:
    if tol is None:
        tol = float(os.environ.get("ABFRAC_DEFAULT_TOL", "1e-12"))
    return EvalPolicy(abs_tol=tol)


def _bool(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


def _figure_path(out: str) -> str:
    return str(Path(out).with_suffix(".png"))


def _build_cfg(alpha: float, b_norm: str) -> ABConfig:
    return ABConfig(alpha, normalization(alpha, b_norm))


@dataclass(frozen=True)
class RunConfig:
    """Validated per-command parameter record, echoed verbatim into JSON meta."""

    command: str
    params: dict = field(default_factory=dict)

    def meta(self) -> dict:
        return {"command": self.command, **self.params}


# ---------------------------------------------------------------- subcommands


def cmd_ml(args) -> int:
    defaults = {
        "alpha": (float, None),
        "z": (float, None),
        "beta": (float, 1.0),
        "delta": (float, 1.0),
        "tol": (float, None),
    }
    _apply_config(args, defaults)
    if args.alpha is None or args.z is None:
        raise ValueError("--alpha and --z are required")
    policy = _policy(args.tol)
    value = specfun.ml(
        specfun.MLArgs(alpha=args.alpha, beta=args.beta, delta=args.delta, z=args.z),
        policy,
    )
    print(fmt15(value))
    return EXIT_OK


def _ivp_problem(args, policy) -> ivp.IVProblem:
    cfg = _build_cfg(args.alpha, args.b_norm)
    forcing = ivp.Forcing.from_expression(args.forcing)
    return ivp.IVProblem(cfg, args.lam, args.u0, forcing, args.horizon)


def cmd_ivp(args) -> int:
    defaults = {
        "alpha": (float, None),
        "lam": (float, None),
        "u0": (float, None),
        "forcing": (str, None),
        "horizon": (float, None),
        "steps": (int, None),
        "method": (str, "closed"),
        "b_norm": (str, "one"),
        "out": (str, None),
        "format": (str, "csv"),
        "max_iters": (int, 50),
        "iter_tol": (float, 1e-8),
        "tol": (float, None),
        "plot": (_bool, True),
    }
    _apply_config(args, defaults)
    for name in ("alpha", "lam", "u0", "forcing", "horizon", "steps"):
        if getattr(args, name) is None:
            raise ValueError(f"--{name.replace('_', '-')} is required")
    if not 0.0 < args.alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {args.alpha}")
    if not args.horizon > 0.0:
        raise ValueError(f"horizon must be positive, got {args.horizon}")
    if args.steps < 2:
        raise ValueError(f"steps must be >= 2, got {args.steps}")
    if args.method not in ("closed", "picard", "both"):
        raise ValueError(f"method must be closed|picard|both, got {args.method!r}")
    policy = _policy(args.tol)
    problem = _ivp_problem(args, policy)

    print(f"compatibility |f(0) + lambda*u0| = {fmt15(problem.compatibility_residual())}")
    curves = {}
    if args.method in ("closed", "both"):
        u_closed = ivp.solve_closed_form(problem, args.steps, policy)
        curves["u_closed" if args.method == "both" else "u"] = u_closed.values
        grid = u_closed
    if args.method in ("picard", "both"):
        u_picard = ivp.picard_solve(
            problem, args.steps, max_iters=args.max_iters, iter_tol=args.iter_tol, policy=policy
        )
        curves["u_picard" if args.method == "both" else "u"] = u_picard.values
        grid = u_picard
        print(f"picard iterations = {u_picard.meta['iterations']}")
    t = grid.times
    if args.method == "both":
        curves["abs_diff"] = np.abs(curves["u_closed"] - curves["u_picard"])
        print(f"sup |closed - picard| = {fmt15(np.max(curves['abs_diff']))}")

    run_config = RunConfig(
        "ivp",
        {
            "alpha": args.alpha,
            "b_norm": args.b_norm,
            "b_of_alpha": problem.cfg.b_of_alpha,
            "lambda": args.lam,
            "u0": args.u0,
            "forcing": args.forcing,
            "horizon": args.horizon,
            "steps": args.steps,
            "method": args.method,
            "abs_tol": policy.abs_tol,
            "compatibility_residual": problem.compatibility_residual(),
        },
    )
    if args.format == "json":
        payload = {"meta": run_config.meta(), "data": {"t": t, **curves}}
        _emit(_json_text(payload) + "\n", args.out)
    else:
        _emit(_csv(["t", *curves.keys()], [t, *curves.values()]), args.out)
    if args.out and args.plot:
        figures.ivp_figure(
            _figure_path(args.out),
            t,
            dict(curves),
            title=f"alpha={args.alpha}, lambda={args.lam}, f(t)={args.forcing}",
        )
    return EXIT_OK


def cmd_bvp(args) -> int:
    defaults = {
        "alpha": (float, None),
        "forcing": (str, None),
        "horizon": (float, None),
        "kmax": (int, 32),
        "nx": (int, 101),
        "nt": (int, 400),
        "b_norm": (str, "one"),
        "out": (str, None),
        "format": (str, "csv"),
        "verify": (_bool, False),
        "jobs": (int, 1),
        "tol": (float, None),
        "plot": (_bool, True),
    }
    _apply_config(args, defaults)
    for name in ("alpha", "forcing", "horizon"):
        if getattr(args, name) is None:
            raise ValueError(f"--{name} is required")
    if not 0.0 < args.alpha < 1.0:
        raise ValueError(f"alpha must lie in (0,1), got {args.alpha}")
    policy = _policy(args.tol)
    problem = bvp.BVProblem(
        bvp.Forcing2D.from_expression(args.forcing),
        horizon=args.horizon,
        cfg=_build_cfg(args.alpha, args.b_norm),
        k_max=args.kmax,
        nx=args.nx,
        nt=args.nt,
    )
    hyp = problem.hypothesis_check()
    if not hyp["initial_ok"]:
        print(
            f"warning: f(x,0)=0 hypothesis violated (max |f(x,0)| = "
            f"{fmt15(hyp['max_initial'])}); uniqueness guarantee void",
            file=sys.stderr,
        )
    if not hyp["boundary_ok"]:
        print(
            f"warning: f(0,t)=f(1,t)=0 hypothesis violated (max boundary |f| = "
            f"{fmt15(hyp['max_boundary'])}); uniqueness guarantee void",
            file=sys.stderr,
        )
    solution = bvp.solve(problem, policy, jobs=args.jobs)
    report = bvp.residual_report(solution, problem, policy) if args.verify else None
    if report is not None:
        print(f"boundary residual = {fmt15(report.boundary_residual)}")
        print(f"initial residual  = {fmt15(report.initial_residual)}")
        print(f"pde residual (rel) = {fmt15(report.pde_residual)}")

    x, t = problem.x, problem.t
    run_config = RunConfig(
        "bvp",
        {
            "alpha": args.alpha,
            "b_norm": args.b_norm,
            "b_of_alpha": problem.cfg.b_of_alpha,
            "forcing": args.forcing,
            "horizon": args.horizon,
            "k_max": args.kmax,
            "nx": problem.nx,
            "nt": args.nt,
            "abs_tol": policy.abs_tol,
            "hypothesis_initial_ok": hyp["initial_ok"],
            "hypothesis_boundary_ok": hyp["boundary_ok"],
        },
    )
    if args.format == "json":
        payload = {"meta": run_config.meta(), "data": {"x": x, "t": t, "u": solution.values}}
        if report is not None:
            payload["residuals"] = {
                "boundary": report.boundary_residual,
                "initial": report.initial_residual,
                "pde_relative": report.pde_residual,
            }
        _emit(_json_text(payload) + "\n", args.out)
    else:
        xs = np.repeat(x, t.size)
        ts = np.tile(t, x.size)
        _emit(_csv(["x", "t", "u"], [xs, ts, solution.values.ravel()]), args.out)
    if args.out and args.plot:
        figures.bvp_figure(
            _figure_path(args.out),
            x,
            t,
            solution.values,
            title=f"alpha={args.alpha}, f(x,t)={args.forcing}",
        )
    return EXIT_OK


def cmd_verify(args) -> int:
    defaults = {
        "suite": (str, "all"),
        "json": (_bool, False),
        "out": (str, None),
        "plot": (str, None),
        "tol": (float, None),
    }
    _apply_config(args, defaults)
    policy = _policy(args.tol)
    names = list(verify.SUITES) if args.suite == "all" else [args.suite]
    if any(n not in verify.SUITES for n in names):
        raise ValueError(f"unknown suite {args.suite!r}; choose from {sorted(verify.SUITES)}")
    results = [verify.run_suite(n, policy) for n in names]
    if args.json:
        payload = {
            "suites": [
                {
                    "name": r.name,
                    "max_error": r.max_error,
                    "tolerance": r.tolerance,
                    "pass": r.passed,
                }
                for r in results
            ],
            "all_pass": all(r.passed for r in results),
        }
        _emit(_json_text(payload) + "\n", args.out)
    else:
        lines = []
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            lines.append(
                f"{status} {r.name}: max error {fmt15(r.max_error)} "
                f"(allowed {fmt15(r.tolerance)})"
            )
        _emit("\n".join(lines) + "\n", args.out)
    if args.plot:
        figures.verify_figure(args.plot, results)
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY_FAIL


# ------------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="abfrac",
        description=(
            "Mittag-Leffler special functions, fractional initial value "
            "problems with non-singular kernels, and the associated "
            "time-fractional diffusion solver."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    ml = sub.add_parser("ml", help="evaluate a Mittag-Leffler function")
    ml.add_argument("--alpha", type=float)
    ml.add_argument("--beta", type=float)
    ml.add_argument("--delta", type=float)
    ml.add_argument("--z", type=float)
    ml.add_argument("--tol", type=float)
    ml.add_argument("--config")
    ml.set_defaults(func=cmd_ml)

    ivp_p = sub.add_parser("ivp", help="solve the fractional initial value problem")
    ivp_p.add_argument("--alpha", type=float)
    ivp_p.add_argument("--lambda", dest="lam", type=float)
    ivp_p.add_argument("--u0", type=float)
    ivp_p.add_argument("--forcing")
    ivp_p.add_argument("--horizon", type=float)
    ivp_p.add_argument("--steps", type=int)
    ivp_p.add_argument("--method", choices=("closed", "picard", "both"))
    ivp_p.add_argument("--b-norm", dest="b_norm", choices=("one", "ab_family"))
    ivp_p.add_argument("--out")
    ivp_p.add_argument("--format", choices=("csv", "json"))
    ivp_p.add_argument("--max-iters", dest="max_iters", type=int)
    ivp_p.add_argument("--iter-tol", dest="iter_tol", type=float)
    ivp_p.add_argument("--tol", type=float)
    ivp_p.add_argument("--plot", dest="plot", action="store_true", default=None)
    ivp_p.add_argument("--no-plot", dest="plot", action="store_false")
    ivp_p.add_argument("--config")
    ivp_p.set_defaults(func=cmd_ivp)

    bvp_p = sub.add_parser("bvp", help="solve the time-fractional diffusion problem")
    bvp_p.add_argument("--alpha", type=float)
    bvp_p.add_argument("--forcing")
    bvp_p.add_argument("--horizon", type=float)
    bvp_p.add_argument("--kmax", type=int)
    bvp_p.add_argument("--nx", type=int)
    bvp_p.add_argument("--nt", type=int)
    bvp_p.add_argument("--b-norm", dest="b_norm", choices=("one", "ab_family"))
    bvp_p.add_argument("--out")
    bvp_p.add_argument("--format", choices=("csv", "json"))
    bvp_p.add_argument("--verify", action="store_true", default=None)
    bvp_p.add_argument("--jobs", type=int)
    bvp_p.add_argument("--tol", type=float)
    bvp_p.add_argument("--plot", dest="plot", action="store_true", default=None)
    bvp_p.add_argument("--no-plot", dest="plot", action="store_false")
    bvp_p.add_argument("--config")
    bvp_p.set_defaults(func=cmd_bvp)

    ver = sub.add_parser("verify", help="run the numerical verification suites")
    ver.add_argument("--suite", choices=(*verify.SUITES, "all"))
    ver.add_argument("--json", action="store_true", default=None)
    ver.add_argument("--out")
    ver.add_argument("--plot")
    ver.add_argument("--tol", type=float)
    ver.add_argument("--config")
    ver.set_defaults(func=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (SingularParameter, PoleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except NoConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ITER_CONVERGENCE
    except NonConvergence as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except AbfracError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entrypoint():
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
