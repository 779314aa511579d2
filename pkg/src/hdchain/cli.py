"""Command-line reports for the harmonic descent chain.

Every command prints one table, as CSV or as JSON::

    hdchain exact --n 1000 --format csv
    hdchain limits --i 50
    hdchain identities --k 100
    hdchain simulate --n 10000 --mode continuous --reps 100000 --seed 42
    hdchain couple --x 100 --y 1000 --i 5 --reps 100000
    hdchain overshoot --x 100 --y 10000 --reps 100000

JSON reports are one object with ``config``, ``results`` and ``version``.
CSV reports start with two ``#`` comment lines (version and config as JSON)
followed by a header row. Floats carry 15 significant digits in both, so the
two renderings hold the same numbers. The embedded config omits ``--workers``
and ``--out``, which never change results, so a report is byte-identical for
any worker count. The seed defaults to ``DEFAULT_SEED``,
or to ``$HD_SEED`` when that is set and ``--seed`` is not given.

Exit status: 0 on success, 2 on invalid arguments, 3 when a request exceeds
``--table-size``.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass

from . import __version__
from .coupling import PROTOCOLS, SHIFT, sample_couplings
from .errors import CapacityError, DomainError
from .exact import (
    CONTINUOUS,
    DISCRETE,
    MODES,
    euler_partition_sum,
    fixed_point_residual,
    limit_value,
    mean_absorption,
    occupation_vector,
    overshoot_distribution,
)
from .harmonic import PI2_OVER_6, build_harmonic_table, compensated_sum
from .montecarlo import mean_estimate, proportion_estimate
from .simulate import (
    estimate_absorption_time,
    estimate_occupation,
    estimate_overshoot,
    reference_mean,
    survival_bound_check,
)

DEFAULT_SEED = 20240601
DEFAULT_TABLE_SIZE = 20_000
COMMANDS = ("exact", "limits", "identities", "simulate", "couple", "overshoot")


@dataclass
class RunConfig:
    command: str
    n: int | None = None
    i: int | None = None
    k: int | None = None
    x: int | None = None
    y: int | None = None
    t: float | None = None
    cutoff: int | None = None
    targets: list | None = None
    protocol: str | None = None
    reps: int = 10_000
    seed: int = DEFAULT_SEED
    mode: str = CONTINUOUS
    format: str = "json"
    out: str = "-"
    workers: int = 1
    table_size: int = DEFAULT_TABLE_SIZE


# Fields that only steer execution; results never depend on them, so they are
# left out of the embedded config and reports stay byte-identical across them.
EXECUTION_FIELDS = ("out", "workers")


def report_config(config):
    """The provenance block embedded in every report."""
    return {k: v for k, v in asdict(config).items() if k not in EXECUTION_FIELDS}


class UsageError(Exception):
    pass


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _targets(text):
    return [_positive_int(part) for part in text.split(",") if part]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--reps", type=_positive_int, default=10_000)
    common.add_argument("--seed", type=int, default=None,
                        help=f"run seed (default $HD_SEED or {DEFAULT_SEED})")
    common.add_argument("--mode", choices=MODES, default=CONTINUOUS)
    common.add_argument("--format", choices=("csv", "json"), default="json")
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--workers", type=_positive_int, default=1)
    common.add_argument("--table-size", type=_positive_int, default=DEFAULT_TABLE_SIZE,
                        dest="table_size", help="largest n held in the harmonic table")

    parser = argparse.ArgumentParser(prog="hdchain", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", parents=[common], help="a(n, i) next to its limit b(i)")
    p.add_argument("--n", type=_positive_int, required=True)

    p = sub.add_parser("limits", parents=[common], help="b(i) with fixed-point residuals")
    p.add_argument("--i", type=_positive_int, default=50, help="largest i")
    p.add_argument("--cutoff", type=_positive_int, default=10_000)

    p = sub.add_parser("identities", parents=[common], help="closed-form identity checks")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--cutoff", type=_positive_int, default=None)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo absorption and occupation")
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--targets", type=_targets, default=None,
                   help="comma-separated states whose occupation is estimated")
    p.add_argument("--k", type=_positive_int, default=None, help="survival level (with --t)")
    p.add_argument("--t", type=float, default=None, help="survival horizon (with --k)")

    p = sub.add_parser("couple", parents=[common], help="coupling-state statistics")
    p.add_argument("--x", type=_positive_int, required=True)
    p.add_argument("--y", type=_positive_int, required=True)
    p.add_argument("--i", type=_positive_int, default=2, help="level for P(S_couple < i)")
    p.add_argument("--protocol", choices=PROTOCOLS, default=SHIFT)

    p = sub.add_parser("overshoot", parents=[common], help="overshoot below level x from y")
    p.add_argument("--x", type=_positive_int, required=True)
    p.add_argument("--y", type=_positive_int, required=True)
    return parser


def config_from_args(args, environ=os.environ):
    values = {k: v for k, v in vars(args).items() if k in RunConfig.__dataclass_fields__}
    if values.get("seed") is None:
        env = environ.get("HD_SEED")
        try:
            values["seed"] = int(env) if env else DEFAULT_SEED
        except ValueError:
            raise UsageError(f"HD_SEED must be an integer, got {env!r}") from None
    config = RunConfig(**values)
    _validate(config)
    return config


def _validate(c):
    if c.command == "simulate" and (c.k is None) != (c.t is None):
        raise UsageError("--k and --t must be given together")
    if c.t is not None and c.t < 0:
        raise UsageError("--t must be >= 0")
    if c.command == "couple":
        if c.protocol == SHIFT and c.x > c.y:
            raise UsageError("shift coupling needs --x <= --y")
        if c.i < 2:
            raise UsageError("--i must be >= 2")
    if c.command == "overshoot" and c.x >= c.y:
        raise UsageError("overshoot needs --x < --y")
    if c.command == "identities" and c.cutoff is not None and c.cutoff <= c.k + 1:
        raise UsageError("--cutoff must exceed k + 1")


def _capacity(config, need):
    if need > config.table_size:
        raise CapacityError(
            f"request needs h[{need}] but --table-size is {config.table_size}"
        )


def _rows_exact(c, table):
    _capacity(c, c.n - 1)
    a = occupation_vector(c.n, table)
    rows = []
    for i in range(1, c.n + 1):
        b = limit_value(i, table)
        rows.append({"i": i, "a_n_i": a[i], "b_i": b, "gap": a[i] - b})
    return rows


def _rows_limits(c, table):
    _capacity(c, max(c.cutoff, c.i + 2))
    rows = []
    for i in range(1, c.i + 1):
        res = fixed_point_residual(i, max(c.cutoff, i + 2), table)
        rows.append({"i": i, "b_i": limit_value(i, table), "residual": res})
    return rows


def _rows_identities(c, table):
    cutoff = c.cutoff if c.cutoff is not None else max(10_000, 2 * c.k)
    _capacity(c, max(cutoff, c.k))
    s_k = euler_partition_sum(c.k, cutoff, table)
    fp = max(abs(fixed_point_residual(i, cutoff, table)) for i in range(1, min(50, cutoff - 2) + 1))
    mass = overshoot_distribution(c.k, table).mass
    total = compensated_sum(mass)
    return [
        {"identity": "euler_partition_sum", "k": c.k, "value": s_k, "residual": abs(s_k - PI2_OVER_6)},
        {"identity": "fixed_point_max_residual", "k": c.k, "value": fp, "residual": fp},
        {"identity": "overshoot_mass_total", "k": c.k, "value": total, "residual": abs(total - 1.0)},
    ]


def _rows_simulate(c, table):
    _capacity(c, c.n - 1)
    est = estimate_absorption_time(c.n, c.mode, c.reps, c.seed, table, c.workers)
    rows = [{
        "quantity": "T_1", "state": c.n, "mean": est.mean, "std_error": est.std_error,
        "exact": mean_absorption(c.n, c.mode, table),
        "reference": reference_mean(c.n) if c.mode == CONTINUOUS else None,
    }]
    if c.targets:
        occ = occupation_vector(c.n, table)
        for i, e in estimate_occupation(c.n, c.targets, c.reps, c.seed, table, c.workers).items():
            rows.append({
                "quantity": "a_n_i", "state": i, "mean": e.mean, "std_error": e.std_error,
                "exact": occ[i], "reference": limit_value(i, table),
            })
    if c.k is not None:
        if c.k > c.n:
            raise DomainError(f"survival level k={c.k} exceeds n={c.n}")
        e, bound = survival_bound_check(c.n, c.k, c.t, c.reps, c.seed, table, c.workers)
        rows.append({
            "quantity": "P_T_k_le_t", "state": c.k, "mean": e.mean, "std_error": e.std_error,
            "exact": None, "reference": bound,
        })
    return rows


def _rows_couple(c, table):
    top = max(c.x, c.y)
    _capacity(c, top - 1)
    batch = sample_couplings(c.x, c.y, c.reps, c.seed, c.protocol, (), table, c.workers)
    below = proportion_estimate(batch.s_couple < c.i, c.seed)
    gap = None
    if c.i <= min(c.x, c.y):
        gap = abs(occupation_vector(c.x, table)[c.i] - occupation_vector(c.y, table)[c.i])
    t_c = mean_estimate(batch.t_couple, c.seed)
    t_a = mean_estimate(batch.t_absorb, c.seed)
    return [
        {"quantity": "P_S_couple_lt_i", "level": c.i, "mean": below.mean,
         "std_error": below.std_error, "exact": gap},
        {"quantity": "T_couple", "level": None, "mean": t_c.mean,
         "std_error": t_c.std_error, "exact": None},
        {"quantity": "T_absorb", "level": None, "mean": t_a.mean,
         "std_error": t_a.std_error, "exact": None},
    ]


def _rows_overshoot(c, table):
    _capacity(c, c.y - 1)
    e = estimate_overshoot(c.y, c.x, c.reps, c.seed, table, c.workers)
    return [{"quantity": "E_V_x", "x": c.x, "y": c.y, "mean": e.mean, "std_error": e.std_error}]


_DISPATCH = {
    "exact": _rows_exact,
    "limits": _rows_limits,
    "identities": _rows_identities,
    "simulate": _rows_simulate,
    "couple": _rows_couple,
    "overshoot": _rows_overshoot,
}


def _fmt(value):
    if isinstance(value, float):
        if not math.isfinite(value):
            return repr(value)
        return format(value, ".15g")
    return value


def _json_value(value):
    if isinstance(value, float):
        return float(format(value, ".15g"))
    return value


def render(config, rows):
    """Serialize a report; identical inputs give identical text."""
    if config.format == "json":
        doc = {
            "config": report_config(config),
            "results": [{k: _json_value(v) for k, v in row.items()} for row in rows],
            "version": __version__,
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# hdchain {__version__}\n")
    buf.write("# config " + json.dumps(report_config(config), separators=(",", ":")) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0]) if rows else []
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if row[k] is None else _fmt(row[k]) for k in header])
    return buf.getvalue()


def run_cli(config):
    """Compute and return the report text for a validated ``config``."""
    table = build_harmonic_table(config.table_size)
    rows = _DISPATCH[config.command](config, table)
    return render(config, rows)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = config_from_args(args)
        report = run_cli(config)
    except UsageError as exc:
        parser.error(str(exc))
    except CapacityError as exc:
        print(f"hdchain: capacity error: {exc}", file=sys.stderr)
        return 3
    except DomainError as exc:
        print(f"hdchain: error: {exc}", file=sys.stderr)
        return 2
    if config.out == "-":
        sys.stdout.write(report)
    else:
        with open(config.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(report)
    return 0


if __name__ == "__main__":
    sys.exit(main())
