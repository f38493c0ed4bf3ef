"""Command-line front end.

Commands: level, optimize, exponent, count, verify, report. Digit sets are
written q:d1,d2,...,dk with an optional ^T power suffix for contiguous
ranges (3:1,2^2 is base 9 with digits 1..4). Machine output is canonical
JSON (sorted keys, reals at 17 significant digits) or CSV; fresh runs and
cached replays are byte-identical. Defaults come from a key=value config
file and the ELLIPSEPHIC_CACHE environment variable, both overridden by
explicit flags. The report command also renders a figure file next to its
delimited output unless asked not to.
"""

from __future__ import annotations

import argparse
import csv
import io
import os
import sys
import time
from pathlib import Path

from . import __version__
from .cache import RunCache, cache_key
from .cantor import DigitSet, enumerate_level
from .counting import (
    DEFAULT_COUNT_BUDGET,
    count_vinogradov_ellipsephic,
    offdiagonal_lower_bound,
)
from .errors import EllipsephicError, ParseError
from .exponents import (
    DEFAULT_SUPPORT_CAP,
    decoupling_report,
    exponent_no_carryover,
    exponent_banded,
    exponent_sweep,
)
from .optimize import OptimizerConfig, estimate_restriction
from .serialize import dumps_canonical
from .verify import SUITE_ORDER, run_suite

CONFIG_ENV = "ELLIPSEPHIC_CONFIG"
CACHE_ENV = "ELLIPSEPHIC_CACHE"
DEFAULT_CONFIG_NAME = "ellipsephic.cfg"

_CONFIG_KEYS = {
    "seed": int,
    "tol": float,
    "restarts": int,
    "max-iters": int,
    "budget": int,
    "cache": str,
}


def load_config(path: str | None) -> dict:
    """Read key = value pairs ('#' comments); unknown keys are rejected."""
    if path is None:
        path = os.environ.get(CONFIG_ENV)
    if path is None:
        if Path(DEFAULT_CONFIG_NAME).is_file():
            path = DEFAULT_CONFIG_NAME
        else:
            return {}
    values = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            key = key.strip()
            if not sep or key not in _CONFIG_KEYS:
                raise ParseError(
                    f"{path}:{lineno}: expected '<key> = <value>' with key in "
                    f"{sorted(_CONFIG_KEYS)}, got {raw.strip()!r}"
                )
            try:
                values[key] = _CONFIG_KEYS[key](value.strip())
            except ValueError:
                raise ParseError(
                    f"{path}:{lineno}: bad value for {key}: {value.strip()!r}"
                ) from None
    return values


class Settings:
    """Flag/config/environment resolution for one invocation."""

    def __init__(self, args: argparse.Namespace):
        config = load_config(args.config)
        self.seed = args.seed if args.seed is not None else config.get("seed", 0)
        self.tol = args.tol if args.tol is not None else config.get("tol", 1e-8)
        self.restarts = (
            args.restarts if args.restarts is not None else config.get("restarts", 16)
        )
        self.max_iters = (
            args.max_iters
            if args.max_iters is not None
            else config.get("max-iters", 100_000)
        )
        self.budget = (
            args.budget
            if args.budget is not None
            else config.get("budget", DEFAULT_COUNT_BUDGET)
        )
        cache_path = args.cache
        if cache_path is None:
            cache_path = config.get("cache", os.environ.get(CACHE_ENV))
        self.cache = RunCache(cache_path) if cache_path else None

    def optimizer_config(self, method: str = "both") -> OptimizerConfig:
        return OptimizerConfig(
            method=method,
            tolerance=self.tol,
            max_iterations=self.max_iters,
            restarts=self.restarts,
            rng_seed=self.seed,
        )


def _csv_text(header: list[str], rows: list[list]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _emit(text: str) -> None:
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _cached_payload(settings: Settings, command: str, params: dict, compute):
    """Serve the payload from the cache when possible, else compute and store."""
    if settings.cache is None:
        return compute()
    key = cache_key(command, params, __version__)
    record = settings.cache.get(key)
    if record is not None:
        return record["payload"]
    started = time.monotonic()
    payload = compute()
    settings.cache.put(
        key,
        {
            "command": command,
            "params": params,
            "version": __version__,
            "wall_time": time.monotonic() - started,
            "payload": payload,
        },
    )
    return payload


def _parse_spec(text: str) -> DigitSet:
    return DigitSet.parse(text)


def cmd_level(args: argparse.Namespace, settings: Settings) -> int:
    generator = _parse_spec(args.spec)
    level = enumerate_level(generator, args.j)
    elements = level.elements.integers()
    if args.json:
        _emit(
            dumps_canonical(
                {
                    "descriptor": level.descriptor(),
                    "generator": generator.to_text(),
                    "level": args.j,
                    "elements": list(elements),
                },
                indent=2,
            )
        )
    elif args.csv:
        _emit(_csv_text(["element"], [[x] for x in elements]))
    else:
        _emit(" ".join(str(x) for x in elements))
    return 0


def cmd_optimize(args: argparse.Namespace, settings: Settings) -> int:
    generator = _parse_spec(args.spec)
    cfg = settings.optimizer_config(args.method)
    params = {
        "spec": generator.to_text(),
        "j": args.j,
        "n": args.n,
        "optimizer": cfg.to_payload(),
    }

    def compute():
        level = enumerate_level(generator, args.j)
        estimate = estimate_restriction(
            level.elements, args.n, cfg, descriptor=level.descriptor()
        )
        return estimate.to_payload()

    payload = _cached_payload(settings, "optimize", params, compute)
    if args.csv:
        header = [
            "set",
            "n",
            "value_2n",
            "value",
            "stationarity_residual",
            "iterations_used",
            "converged",
            "method_used",
        ]
        _emit(_csv_text(header, [[payload[h] for h in header]]))
    else:
        _emit(dumps_canonical(payload, indent=2))
    return 0


def _parse_sweep(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ParseError(f"expected a range like 1..5, got {text!r}")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise ParseError(f"expected a range like 1..5, got {text!r}") from None
    if a < 1 or b < a:
        raise ParseError(f"need 1 <= start <= end in a sweep, got {text!r}")
    return a, b


_SWEEP_COLUMNS = ["t", "alpha_point", "alpha_lower", "alpha_upper"]


def cmd_exponent(args: argparse.Namespace, settings: Settings) -> int:
    generator = _parse_spec(args.spec)
    cfg = settings.optimizer_config()
    if args.sweep is not None:
        lo, hi = _parse_sweep(args.sweep)
        params = {
            "spec": generator.to_text(),
            "n": args.n,
            "sweep": [lo, hi],
            "support_cap": args.support_cap,
            "optimizer": cfg.to_payload(),
        }

        def compute():
            estimates = exponent_sweep(
                generator, args.n, range(lo, hi + 1), cfg, args.support_cap
            )
            return [est.to_payload() for est in estimates]

        payload = _cached_payload(settings, "exponent-sweep", params, compute)
        rows = [
            [row["t_used"], row["alpha_point"], row["alpha_lower"], row["alpha_upper"]]
            for row in payload
        ]
        if args.json:
            _emit(dumps_canonical(payload, indent=2))
        else:
            _emit(_csv_text(_SWEEP_COLUMNS, rows))
        if args.figure:
            from .plotting import render_sweep_figure

            render_sweep_figure(
                [
                    {
                        "t": row["t_used"],
                        "alpha_point": row["alpha_point"],
                        "alpha_lower": row["alpha_lower"],
                        "alpha_upper": row["alpha_upper"],
                    }
                    for row in payload
                ],
                args.figure,
                f"{generator.to_text()}  n={args.n}",
            )
        return 0

    params = {
        "spec": generator.to_text(),
        "n": args.n,
        "t": args.t,
        "support_cap": args.support_cap,
        "optimizer": cfg.to_payload(),
    }

    def compute():
        if args.t is None:
            return exponent_no_carryover(generator, args.n, cfg).to_payload()
        return exponent_banded(
            generator, args.n, args.t, cfg, args.support_cap
        ).to_payload()

    payload = _cached_payload(settings, "exponent", params, compute)
    if args.json:
        _emit(dumps_canonical(payload, indent=2))
    elif args.csv:
        _emit(
            _csv_text(
                _SWEEP_COLUMNS,
                [
                    [
                        payload["t_used"],
                        payload["alpha_point"],
                        payload["alpha_lower"],
                        payload["alpha_upper"],
                    ]
                ],
            )
        )
    else:
        for key in (
            "generator",
            "n",
            "t_used",
            "alpha_point",
            "alpha_lower",
            "alpha_upper",
            "exact",
            "normalization_applied",
        ):
            _emit(f"{key} = {payload[key]}")
    return 0


def cmd_count(args: argparse.Namespace, settings: Settings) -> int:
    generator = _parse_spec(args.spec)
    params = {
        "spec": generator.to_text(),
        "j": args.j,
        "s": args.s,
        "degree": args.degree,
        "budget": settings.budget,
    }

    def compute():
        result = count_vinogradov_ellipsephic(
            generator, args.j, args.s, args.degree, budget=settings.budget
        )
        payload = result.to_payload()
        if args.degree == 2:
            payload["offdiagonal_lower_bound"] = offdiagonal_lower_bound(
                generator, args.j, args.s
            )
        return payload

    payload = _cached_payload(settings, "count", params, compute)
    if args.json:
        _emit(dumps_canonical(payload, indent=2))
    elif args.csv:
        header = ["set", "s", "degree", "count", "diagonal_count", "tuples_enumerated"]
        _emit(
            _csv_text(
                header,
                [
                    [
                        payload["set"],
                        args.s,
                        args.degree,
                        payload["count"],
                        payload["diagonal_count"],
                        payload["tuples_enumerated"],
                    ]
                ],
            )
        )
    else:
        _emit(str(payload["count"]))
    return 0


def cmd_verify(args: argparse.Namespace, settings: Settings) -> int:
    names = args.suites or ["all"]
    rows = []
    for name in names:
        try:
            rows.extend(run_suite(name))
        except KeyError:
            raise ParseError(
                f"unknown suite {name!r}; available: all, {', '.join(SUITE_ORDER)}"
            ) from None
    if args.json:
        _emit(
            dumps_canonical(
                [
                    {"name": name, "passed": passed, "detail": detail}
                    for name, passed, detail in rows
                ],
                indent=2,
            )
        )
    else:
        for name, passed, detail in rows:
            _emit(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        failed = sum(1 for _, passed, _ in rows if not passed)
        _emit(f"{len(rows) - failed}/{len(rows)} checks passed")
    return 0 if all(passed for _, passed, _ in rows) else 1


_REPORT_COLUMNS = [
    "generator",
    "n",
    "dimension",
    "carryover",
    "exact",
    "t_used",
    "alpha_point",
    "alpha_lower",
    "alpha_upper",
    "trivial_cap",
    "comparison_exponent",
]


def _report_row(payload: dict) -> list:
    kappa = payload["kappa"]
    return [
        payload["generator"],
        payload["n"],
        payload["dimension"],
        payload["carryover"],
        kappa["exact"],
        kappa["t_used"],
        kappa["alpha_point"],
        kappa["alpha_lower"],
        kappa["alpha_upper"],
        payload["trivial_cap"],
        payload["comparison_exponent"],
    ]


def cmd_report(args: argparse.Namespace, settings: Settings) -> int:
    generator = _parse_spec(args.spec)
    cfg = settings.optimizer_config()
    params = {
        "spec": generator.to_text(),
        "n": args.n,
        "t": args.t,
        "optimizer": cfg.to_payload(),
    }

    def compute():
        return decoupling_report(generator, args.n, cfg, t=args.t)

    payload = _cached_payload(settings, "report", params, compute)
    csv_text = _csv_text(_REPORT_COLUMNS, [_report_row(payload)])
    if args.out:
        Path(args.out).write_text(csv_text, encoding="utf-8")
    if args.json:
        _emit(dumps_canonical(payload, indent=2))
    elif args.csv:
        _emit(csv_text)
    else:
        kappa = payload["kappa"]
        lines = [
            f"generator            {payload['generator']}",
            f"n (moment 2n)        {payload['n']} ({payload['moment']})",
            f"dimension            {payload['dimension']:.12g}",
            f"carryover            {payload['carryover']}",
            f"kappa point          {kappa['alpha_point']:.12g}"
            + ("  (exact)" if kappa["exact"] else f"  (band at t={kappa['t_used']})"),
            f"kappa band           [{kappa['alpha_lower']:.12g}, {kappa['alpha_upper']:.12g}]",
            f"trivial cap          {payload['trivial_cap']:.12g}",
            f"parabola (p={payload['parabola']['p']})     "
            f"{payload['parabola']['statement']}",
            f"comparison exponent  {payload['comparison_exponent']:.12g}",
            f"caveat               {kappa['caveat']}",
        ]
        _emit("\n".join(lines))
    if not args.no_figure:
        figure_path = args.figure
        if figure_path is None:
            if args.out:
                figure_path = str(Path(args.out).with_suffix(".png"))
            else:
                figure_path = "ellipsephic-report.png"
        from .plotting import render_report_figure

        render_report_figure(payload, figure_path)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="canonical JSON output")
    common.add_argument("--csv", action="store_true", help="CSV output")
    common.add_argument("--cache", metavar="PATH", help="JSON-lines result cache")
    common.add_argument("--seed", type=int, help="optimizer RNG seed (default 0)")
    common.add_argument("--tol", type=float, help="stopping tolerance (default 1e-8)")
    common.add_argument("--restarts", type=int, help="optimizer restarts (default 16)")
    common.add_argument(
        "--max-iters", type=int, dest="max_iters", help="iteration cap (default 100000)"
    )
    common.add_argument("--budget", type=int, help="enumeration budget (default 1e8)")
    common.add_argument("--config", metavar="PATH", help="key=value defaults file")

    parser = argparse.ArgumentParser(
        prog="ellipsephic",
        description="Restriction constants, decoupling exponents, and exact "
        "counts for digit-restricted sets.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("level", parents=[common], help="enumerate one level")
    p.add_argument("spec", help="digit set, e.g. 3:0,1")
    p.add_argument("--j", type=int, required=True, help="level (digits used)")
    p.set_defaults(func=cmd_level)

    p = sub.add_parser("optimize", parents=[common], help="maximize the objective")
    p.add_argument("spec")
    p.add_argument("--j", type=int, default=1, help="level (default 1)")
    p.add_argument("--n", type=int, required=True, help="half the moment")
    p.add_argument(
        "--method",
        choices=("gradient_ascent", "fixed_point", "both"),
        default="both",
    )
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("exponent", parents=[common], help="decoupling exponent")
    p.add_argument("spec")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, help="level for a banded estimate")
    p.add_argument("--sweep", metavar="A..B", help="banded estimates for t = A..B")
    p.add_argument(
        "--support-cap",
        type=int,
        dest="support_cap",
        default=DEFAULT_SUPPORT_CAP,
        help="largest allowed level support (default 4096)",
    )
    p.add_argument("--figure", metavar="PATH", help="render the sweep to a file")
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("count", parents=[common], help="exact solution counts")
    p.add_argument("spec")
    p.add_argument("--j", type=int, required=True, help="level")
    p.add_argument("--s", type=int, required=True, help="variables per side")
    p.add_argument("--degree", type=int, default=1, help="moments 1..degree")
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("verify", parents=[common], help="run self-check suites")
    p.add_argument(
        "suites",
        nargs="*",
        help=f"suite names (default: all). Available: {', '.join(SUITE_ORDER)}",
    )
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("report", parents=[common], help="full exponent report")
    p.add_argument("spec")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--t", type=int, help="level override for banded estimates")
    p.add_argument("--out", metavar="PATH", help="also write the CSV row here")
    p.add_argument("--figure", metavar="PATH", help="figure path")
    p.add_argument(
        "--no-figure",
        action="store_true",
        dest="no_figure",
        help="skip figure rendering",
    )
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = Settings(args)
        return args.func(args, settings)
    except EllipsephicError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
