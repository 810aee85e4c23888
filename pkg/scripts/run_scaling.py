#!/usr/bin/env python3
"""Fluctuation-scaling sweeps for both stochastic engines.

Sweeps lattice sizes for the Monte Carlo engine and shot counts for the
quantum engine, fits the power law rms = C * n**e to each, and prints the
exponents and the prefactor ratio. The full quantum sweep covers a
million shots per step and takes a few minutes; cut it down with
--quantum-values for a quick look.
"""

import argparse
from pathlib import Path

from smcm.experiments import ExperimentConfig, scaling_scan, shot_gap, write_scan


def parse_values(text: str) -> list[int]:
    return [int(v) for v in text.split(",") if v.strip()]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--outdir", default="results", help="output directory")
    parser.add_argument("--mc-values", default="100,400,1600,6400")
    parser.add_argument("--quantum-values", default="10000,100000,1000000")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=2024)
    args = parser.parse_args()

    outdir = Path(args.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    results = {}
    for mode, values in (
        ("montecarlo", parse_values(args.mc_values)),
        ("quantum", parse_values(args.quantum_values)),
    ):
        cfg = ExperimentConfig(mode=mode, seed=args.seed)
        result = scaling_scan(cfg, values, repeats=args.repeats)
        path = outdir / f"scan_{mode}.csv"
        write_scan(result, path)
        results[mode] = result
        print(
            f"{mode}: exponent={result.exponent:.4f} prefactor={result.prefactor:.4f} "
            f"over n={values} -> {path}"
        )

    ratio = shot_gap(results["montecarlo"], results["quantum"])
    print(f"fluctuation prefactor ratio (quantum / montecarlo): {ratio:.2f}")


if __name__ == "__main__":
    main()
