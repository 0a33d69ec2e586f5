#!/usr/bin/env python3
"""End-to-end demonstration run: simulate, analyze, and sweep.

Simulates an experiment-scale record set (12,000 events by default) from
vacuum-contaminated single-photon arms, evaluates the windowed witness with
its 3-sigma band, and runs the post-selection-width optimization. Writes
samples.csv, report.json and sweep.csv into --outdir.
"""

import argparse
import pathlib

from homwitness.cli import main as cli_main


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="out/pipeline")
    parser.add_argument("--config", default=None, help="JSON config (defaults mirror the experiment)")
    parser.add_argument("--seed", type=int, default=12)
    args = parser.parse_args()

    outdir = pathlib.Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    samples = outdir / "samples.csv"
    report = outdir / "report.json"
    sweep = outdir / "sweep.csv"

    base = ["--config", args.config] if args.config else []
    rc = cli_main(["simulate", *base, "--out", str(samples), "--seed", str(args.seed)])
    rc = rc or cli_main(["analyze", *base, "--in", str(samples), "--out", str(report)])
    rc = rc or cli_main(["sweep", *base, "--in", str(samples), "--out", str(sweep),
                         "--seed", str(args.seed)])
    raise SystemExit(rc)


if __name__ == "__main__":
    main()
