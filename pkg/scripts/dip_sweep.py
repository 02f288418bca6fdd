"""Convolved HOM dip depth versus drive strength at 4 K."""
import argparse
from pathlib import Path

import numpy as np

from polaron_emission import DetectorModel, DriveConfig, PhononEnvironment, dip_depth_sweep
from polaron_emission.cli import write_csv


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--points", type=int, default=30)
    parser.add_argument("--temperature", type=float, default=4.0)
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    env = PhononEnvironment(temperature=args.temperature)
    s_values = np.geomspace(0.01, 20.0, args.points)
    full = dip_depth_sweep(env, DriveConfig(), DetectorModel(), s_values)
    markov = dip_depth_sweep(env, DriveConfig(), DetectorModel(), s_values, markovian=True)
    write_csv(
        ["s", "dip_polaron", "dip_markov"],
        ((a.s, a.dip_depth, b.dip_depth) for a, b in zip(full, markov)),
        args.out / "dip_sweep.csv",
    )
    best = max(full, key=lambda p: p.dip_depth)
    print(f"largest polaron dip {best.dip_depth:.3f} at s = {best.s:.2f}")


if __name__ == "__main__":
    main()
