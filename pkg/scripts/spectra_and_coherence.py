"""Emission spectra and coherent fraction at 0, 4 and 15 K.

Writes ``spectra_T{T}K.csv`` and ``coherent_fraction.csv`` into the output
directory (default ``results/``).
"""
import argparse
from pathlib import Path

import numpy as np

from polaron_emission import (
    DriveConfig,
    PhononEnvironment,
    build_liouvillian,
    coherent_fraction,
    incoherent_spectrum,
    phonon_correlations,
    polaron_rates,
    steady_state,
)
from polaron_emission.cli import write_csv

TEMPERATURES = (0.0, 4.0, 15.0)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results"))
    parser.add_argument("--s", type=float, default=0.1, help="saturation for the spectra")
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    dw = np.linspace(-10.0, 10.0, 8001)
    s_values = np.geomspace(0.01, 10.0, 40)
    fraction_rows = [[s] for s in s_values]
    header = ["s"]
    for T in TEMPERATURES:
        env = PhononEnvironment(temperature=T)
        pc = phonon_correlations(env)

        drive = DriveConfig.from_saturation(args.s)
        L = build_liouvillian(drive, polaron_rates(env, drive.omega))
        spec = incoherent_spectrum(L, steady_state(L), pc, dw)
        write_csv(
            ["delta_omega_psinv", "S_total", "S_zpl", "S_sideband"],
            zip(dw, spec.total, spec.zpl, spec.sideband),
            args.out / f"spectra_T{T:g}K.csv",
        )

        header += [f"fraction_T{T:g}K", f"fraction_markov_T{T:g}K"]
        for row, s in zip(fraction_rows, s_values):
            drive = DriveConfig.from_saturation(s)
            L = build_liouvillian(drive, polaron_rates(env, drive.omega))
            rho = steady_state(L)
            row += [coherent_fraction(L, rho, pc), coherent_fraction(L, rho, pc, markovian=True)]
        print(f"T = {T:g} K: B^2 = {pc.B**2:.4f}, sideband share = {1 - pc.B**2:.4f}")
    write_csv(header, fraction_rows, args.out / "coherent_fraction.csv")


if __name__ == "__main__":
    main()
