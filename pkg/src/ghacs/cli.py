"""Command-line surface: stats, table, sweep and dist subcommands.

Output is machine-readable (csv or json) or a 2-decimal pretty table for
humans.  Every artifact echoes the physics and policy inputs that produced
it, csv as leading ``# key=value`` comment lines and json under an
``inputs`` key.  Numeric fields in csv/json carry full double precision;
identical invocations produce byte-identical output.

Exit codes: 0 success, 2 usage error, 3 adaptive run failed to converge.
"""

from __future__ import annotations

import json
import math
import sys

import click

from .core import PotentialParams
from .lab import SweepSpec, run_sweep
from .stats import (StateStats, TruncationMode, TruncationPolicy, state_stats,
                    weight_distribution)

EXIT_UNCONVERGED = 3


def _repr_num(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _policy_from_flags(adaptive, fixed_nmax, tail_tol, quiet_run, hard_cap):
    if adaptive and fixed_nmax is not None:
        raise click.UsageError("--adaptive and --fixed-nmax are mutually exclusive")
    if fixed_nmax is not None:
        return TruncationPolicy.fixed(fixed_nmax)
    return TruncationPolicy.adaptive(tail_tolerance=tail_tol,
                                     quiet_run=quiet_run, hard_cap=hard_cap)


def _policy_inputs(policy: TruncationPolicy) -> dict:
    d = {"policy": policy.mode.value}
    if policy.mode is TruncationMode.FIXED:
        d["n_max"] = policy.n_max
    else:
        d.update(tail_tolerance=policy.tail_tolerance,
                 quiet_run=policy.quiet_run, hard_cap=policy.hard_cap)
    return d


def _write(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def _emit_csv(inputs, header, rows, out, footer_comments=()):
    lines = [f"# {key}={_repr_num(value)}" for key, value in inputs.items()]
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_repr_num(v) for v in row))
    lines.extend(f"# {c}" for c in footer_comments)
    _write("\n".join(lines) + "\n", out)


def _emit_json(inputs, header, rows, out, extra=None):
    payload = {"inputs": inputs,
               "rows": [dict(zip(header, row)) for row in rows]}
    if extra:
        payload.update(extra)
    _write(json.dumps(payload, indent=2) + "\n", out)


def _emit_table(inputs, header, rows, out, footers=()):
    lines = [f"# {key}={_repr_num(value)}" for key, value in inputs.items()]
    cells = [header] + [[str(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for r in cells:
        lines.append("  ".join(v.ljust(w) for v, w in zip(r, widths)).rstrip())
    lines.extend(footers)
    _write("\n".join(lines) + "\n", out)


def _fmt2(x) -> str:
    return "undefined" if x is None else f"{x:.2f}"


def _fmt3(x) -> str:
    return "undefined" if x is None else f"{x:.3f}"


def _q_value(stats: StateStats):
    return "undefined" if stats.mandel_q is None else stats.mandel_q


def _check_converged(ctx, policy: TruncationPolicy, stats_list) -> None:
    if policy.mode is not TruncationMode.ADAPTIVE:
        return
    for st in stats_list:
        if not st.sums.converged:
            click.echo("error: adaptive accumulation hit hard_cap "
                       f"({policy.hard_cap}) before the tail criterion fired",
                       err=True)
            ctx.exit(EXIT_UNCONVERGED)


def _parse_list(text, cast, name):
    if not text:
        return ()
    try:
        return tuple(cast(tok) for tok in text.split(","))
    except ValueError:
        raise click.UsageError(f"could not parse --{name} value {text!r}")


physics_options = [
    click.option("--k", type=float, required=True, help="Power-law exponent k (> 0)."),
    click.option("--gamma", type=float, default=2.0, show_default=True,
                 help="Spectral offset gamma (> 0); enters as gamma/4."),
]
policy_options = [
    click.option("--adaptive", is_flag=True, help="Tolerance-driven truncation (default)."),
    click.option("--fixed-nmax", type=int, default=None,
                 help="Truncate at a fixed n_max instead of adaptively."),
    click.option("--tail-tol", type=float, default=1e-16, show_default=True,
                 help="Adaptive relative tail-term significance threshold."),
    click.option("--quiet-run", type=int, default=10, show_default=True,
                 help="Consecutive insignificant terms required to stop."),
    click.option("--hard-cap", type=int, default=10 ** 6, show_default=True,
                 help="Adaptive safety bound on the number of terms."),
]
output_options = [
    click.option("--format", "fmt", type=click.Choice(["csv", "json", "table"]),
                 default="table", show_default=True),
    click.option("--out", type=click.Path(dir_okay=False, writable=True),
                 default=None, help="Write to a file instead of stdout."),
]


def _add(options):
    def wrap(f):
        for opt in reversed(options):
            f = opt(f)
        return f
    return wrap


@click.group()
def main():
    """Photon-number statistics of coherent states for power-law potentials."""


@main.command()
@_add(physics_options)
@click.option("--z", type=float, required=True, help="Coherent-state amplitude |z| (>= 0).")
@_add(policy_options)
@_add(output_options)
@click.pass_context
def stats(ctx, k, gamma, z, adaptive, fixed_nmax, tail_tol, quiet_run, hard_cap,
          fmt, out):
    """Mean, variance, Mandel Q and normalization for a single amplitude."""
    if z < 0:
        raise click.UsageError("--z must be >= 0")
    params = _params(k, gamma)
    policy = _policy_from_flags(adaptive, fixed_nmax, tail_tol, quiet_run, hard_cap)
    st = state_stats(z, params, policy)
    _check_converged(ctx, policy, [st])

    inputs = {"k": k, "gamma": gamma, "z": z, **_policy_inputs(policy)}
    header = ["mean", "variance", "mandel_q", "normalization",
              "terms_used", "converged", "threshold"]
    row = [st.mean, st.variance, _q_value(st), st.normalization,
           st.sums.terms_used, st.sums.converged, st.sums.estimated_threshold]
    if fmt == "csv":
        _emit_csv(inputs, header, [row], out)
    elif fmt == "json":
        _emit_json(inputs, header, [row], out)
    else:
        pretty = [["mean", _fmt2(st.mean)],
                  ["variance", _fmt2(st.variance)],
                  ["mandel_q", _fmt3(st.mandel_q)],
                  ["normalization", f"{st.normalization:.6g}"],
                  ["terms_used", str(st.sums.terms_used)],
                  ["converged", str(st.sums.converged).lower()],
                  ["threshold", str(st.sums.estimated_threshold)]]
        _emit_table(inputs, ["quantity", "value"], pretty, out)


@main.command()
@_add(physics_options)
@click.option("--z-list", type=str, required=True,
              help="Comma-separated amplitudes, e.g. 2.5,5,7.5,10,12.5,15.")
@click.option("--fixed-nmax", type=int, default=150, show_default=True,
              help="Cutoff for the fixed-truncation comparison columns.")
@click.option("--tail-tol", type=float, default=1e-16, show_default=True)
@click.option("--quiet-run", type=int, default=10, show_default=True)
@click.option("--hard-cap", type=int, default=10 ** 6, show_default=True)
@_add(output_options)
@click.pass_context
def table(ctx, k, gamma, z_list, fixed_nmax, tail_tol, quiet_run, hard_cap,
          fmt, out):
    """Adaptive vs fixed-cutoff moments, one row per amplitude."""
    zs = _parse_list(z_list, float, "z-list")
    if not zs:
        raise click.UsageError("--z-list must contain at least one amplitude")
    params = _params(k, gamma)
    adaptive_policy = TruncationPolicy.adaptive(
        tail_tolerance=tail_tol, quiet_run=quiet_run, hard_cap=hard_cap)
    fixed_policy = TruncationPolicy.fixed(fixed_nmax)

    header = ["z", "mean", "variance", "mandel_q",
              "mean_fixed", "variance_fixed", "mandel_q_fixed",
              "threshold", "n_max"]
    rows = []
    pretty = []
    for z in zs:
        a = state_stats(z, params, adaptive_policy)
        _check_converged(ctx, adaptive_policy, [a])
        f = state_stats(z, params, fixed_policy)
        rows.append([z, a.mean, a.variance, _q_value(a),
                     f.mean, f.variance, _q_value(f),
                     a.sums.estimated_threshold, fixed_nmax])
        pretty.append([f"{z:g}", _fmt2(a.mean), _fmt2(a.variance), _fmt3(a.mandel_q),
                       _fmt2(f.mean), _fmt2(f.variance), _fmt3(f.mandel_q),
                       str(a.sums.estimated_threshold), str(fixed_nmax)])

    inputs = {"k": k, "gamma": gamma, **_policy_inputs(adaptive_policy),
              "fixed_nmax": fixed_nmax}
    if fmt == "csv":
        _emit_csv(inputs, header, rows, out)
    elif fmt == "json":
        _emit_json(inputs, header, rows, out)
    else:
        _emit_table(inputs, header, pretty, out)


@main.command()
@_add(physics_options)
@click.option("--z-min", type=float, required=True)
@click.option("--z-max", type=float, required=True)
@click.option("--z-step", type=float, required=True)
@click.option("--cutoffs", type=str, default="",
              help="Comma-separated fixed n_max values; empty for adaptive only.")
@click.option("--tail-tol", type=float, default=1e-16, show_default=True)
@click.option("--quiet-run", type=int, default=10, show_default=True)
@click.option("--hard-cap", type=int, default=10 ** 6, show_default=True)
@_add(output_options)
def sweep(k, gamma, z_min, z_max, z_step, cutoffs, tail_tol, quiet_run,
          hard_cap, fmt, out):
    """Mandel Q versus |z| for the adaptive policy and each fixed cutoff."""
    if z_step <= 0 or z_max < z_min or z_min < 0:
        raise click.UsageError("need z_min >= 0, z_max >= z_min and z_step > 0")
    cut = _parse_list(cutoffs, int, "cutoffs")
    steps = int(round((z_max - z_min) / z_step))
    grid = tuple(round(z_min + i * z_step, 12) for i in range(steps + 1))
    grid = tuple(z for z in grid if z <= z_max + 1e-12)

    spec = SweepSpec(k=k, gamma=gamma, z_grid=grid, cutoffs=cut)
    policy = TruncationPolicy.adaptive(tail_tolerance=tail_tol,
                                       quiet_run=quiet_run, hard_cap=hard_cap)
    report = run_sweep(spec, policy)

    header = ["z", "cutoff", "mandel_q", "status"]
    rows = []
    for row in report.rows:
        labelled = [("adaptive", row.adaptive_stats)]
        labelled += [(str(n_max), row.fixed_stats[n_max]) for n_max in cut]
        for label, st in labelled:
            if label == "adaptive" and row.flagged:
                status = "unconverged"
            elif st.mandel_q is None:
                status = "undefined"
            else:
                status = "ok"
            rows.append([row.abs_z, label, _q_value(st), status])

    inputs = {"k": k, "gamma": gamma, **_policy_inputs(policy),
              "z_min": z_min, "z_max": z_max, "z_step": z_step,
              "cutoffs": ",".join(str(c) for c in cut)}
    if fmt == "csv":
        _emit_csv(inputs, header, rows, out)
    elif fmt == "json":
        _emit_json(inputs, header, rows, out)
    else:
        pretty = [[f"{r[0]:g}", r[1], _fmt3(r[2]) if r[2] != "undefined" else r[2], r[3]]
                  for r in rows]
        _emit_table(inputs, header, pretty, out)


@main.command()
@_add(physics_options)
@click.option("--z", type=float, required=True, help="Coherent-state amplitude |z| (>= 0).")
@_add(policy_options)
@_add(output_options)
@click.pass_context
def dist(ctx, k, gamma, z, adaptive, fixed_nmax, tail_tol, quiet_run, hard_cap,
         fmt, out):
    """The weighting distribution P_n up to the truncation support bound."""
    if z < 0:
        raise click.UsageError("--z must be >= 0")
    params = _params(k, gamma)
    policy = _policy_from_flags(adaptive, fixed_nmax, tail_tol, quiet_run, hard_cap)
    wd = weight_distribution(z, params, policy)
    if policy.mode is TruncationMode.ADAPTIVE:
        _check_converged(ctx, policy, [state_stats(z, params, policy)])

    weights = wd.weights()
    total = math.fsum(weights)
    header = ["n", "p_n"]
    rows = [[n, w] for n, w in enumerate(weights)]
    inputs = {"k": k, "gamma": gamma, "z": z, **_policy_inputs(policy)}
    if fmt == "csv":
        _emit_csv(inputs, header, rows, out,
                  footer_comments=[f"sum={_repr_num(total)}"])
    elif fmt == "json":
        _emit_json(inputs, header, rows, out, extra={"weight_sum": total})
    else:
        pretty = [[str(n), f"{w:.6f}"] for n, w in enumerate(weights)]
        _emit_table(inputs, header, pretty, out, footers=[f"sum  {total:.10f}"])


def _params(k, gamma):
    try:
        return PotentialParams(k=k, gamma=gamma)
    except ValueError as exc:
        raise click.UsageError(str(exc))


if __name__ == "__main__":
    main()
