#!/usr/bin/env python3
"""Q-vs-|z| curve family for a set of fixed cutoffs plus the adaptive reference.

Writes a long-format CSV (z, cutoff, mandel_q, status) suitable for direct
plotting, and prints the collapse onset of each cutoff.

Usage: python scripts/collapse_sweep.py [--k K] [--out sweep.csv]
"""

import argparse

from ghacs import SweepSpec, TruncationPolicy, collapse_onset, run_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=float, default=1.5)
    ap.add_argument("--gamma", type=float, default=2.0)
    ap.add_argument("--z-min", type=float, default=0.1)
    ap.add_argument("--z-max", type=float, default=15.0)
    ap.add_argument("--z-step", type=float, default=0.1)
    ap.add_argument("--cutoffs", type=str, default="50,100,200,300")
    ap.add_argument("--out", type=str, default="collapse_sweep.csv")
    args = ap.parse_args()

    cutoffs = tuple(int(c) for c in args.cutoffs.split(",") if c)
    steps = int(round((args.z_max - args.z_min) / args.z_step))
    grid = tuple(round(args.z_min + i * args.z_step, 12) for i in range(steps + 1))

    spec = SweepSpec(k=args.k, gamma=args.gamma, z_grid=grid, cutoffs=cutoffs)
    report = run_sweep(spec, TruncationPolicy.adaptive())

    with open(args.out, "w", newline="\n") as fh:
        fh.write(f"# k={args.k}\n# gamma={args.gamma}\n")
        fh.write("z,cutoff,mandel_q,status\n")
        for row in report.rows:
            pairs = [("adaptive", row.adaptive_stats)]
            pairs += [(str(c), row.fixed_stats[c]) for c in cutoffs]
            for label, st in pairs:
                status = "unconverged" if (label == "adaptive" and row.flagged) else "ok"
                q = "undefined" if st.mandel_q is None else repr(st.mandel_q)
                fh.write(f"{row.abs_z!r},{label},{q},{status}\n")
    print(f"wrote {args.out} ({len(report.rows)} grid points)")

    for c in cutoffs:
        onset = collapse_onset(report, c, drop=0.5)
        where = f"|z| = {onset}" if onset is not None else "never on this grid"
        print(f"n_max={c}: collapse onset at {where}")


if __name__ == "__main__":
    main()
