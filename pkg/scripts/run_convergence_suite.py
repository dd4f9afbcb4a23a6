#!/usr/bin/env python3
"""Run every convergence experiment and write the CSVs under results/.

Covers: the rational power solution at gamma in {1/5, 1/8}, the irrational
power at gamma = 1/7 for both fractional orders, the unknown-solution
sin source comparing gamma = 1/6 against gamma = 1, and the 2-d subdiffusion
sweeps in M and in N.  Each CSV is directly plottable on a semi-log axis.
"""

import math
import pathlib
import sys

import numpy as np

from fracspec.analysis import StudyRequest, run_convergence_study, run_pde_convergence_study
from fracspec.frac_ops import PowerSum, TransformSpec
from fracspec.ode_solver import TimeProblem
from fracspec.pde_solver import manufactured_sine_power

OUT = pathlib.Path(__file__).resolve().parent.parent / "results"


def write(study, name):
    OUT.mkdir(exist_ok=True)
    path = OUT / name
    path.write_text("\n".join(study.csv_rows()) + "\n", encoding="utf-8")
    final = study.reports[-1]
    print(f"{name}: final Linf {final.linf_error:.3e}, L2 {final.l2_error:.3e}")


def power_study(sigma, r, delta, ns, name):
    problem = TimeProblem.manufactured(PowerSum(((1.0, sigma),)), delta, 1.0, TransformSpec(r, 2.0))
    study = run_convergence_study(
        StudyRequest(name, problem, tuple(ns), exact=PowerSum(((1.0, sigma),)))
    )
    write(study, f"{name}.csv")


def main():
    # rational power, the two rescalings
    power_study(0.6, 5, 0.2, range(2, 21, 2), "power3_5_gamma1_5_delta1_5")
    power_study(0.6, 8, 0.9, range(2, 21, 2), "power3_5_gamma1_8_delta9_10")
    # irrational power
    for delta, tag in ((0.2, "1_5"), (0.9, "9_10")):
        power_study(math.sqrt(2.0) / 2.0, 7, delta, range(4, 41, 2), f"power_irr_gamma1_7_delta{tag}")
    # unknown solution: rescaled vs classical
    for r, tag in ((6, "gamma1_6"), (1, "gamma1")):
        problem = TimeProblem.from_source(np.sin, 0.5, 1.0, TransformSpec(r, 2.0))
        study = run_convergence_study(
            StudyRequest("sin_source", problem, tuple(range(4, 31, 2)), ref_n=60)
        )
        write(study, f"sin_source_{tag}.csv")
    # 2-d subdiffusion: sweep M at fixed N, then N at fixed M
    problem, exact = manufactured_sine_power(0.5, TransformSpec(5, 2.0), 0.6, dimension=2)
    ms = list(range(4, 21, 2))
    write(
        run_pde_convergence_study("subdiffusion_2d", problem, exact, (20,) * len(ms), ms),
        "subdiffusion2d_sweepM.csv",
    )
    ns = list(range(2, 21, 2))
    write(
        run_pde_convergence_study("subdiffusion_2d", problem, exact, ns, (20,) * len(ns)),
        "subdiffusion2d_sweepN.csv",
    )


if __name__ == "__main__":
    sys.exit(main())
