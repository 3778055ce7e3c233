"""Scattering experiments: generalized eigenfunctions and the S-matrix."""

import numpy as np

from ..spectral.grid import sphere_quad
from ..spectral.scattering import (
    gen_eigenfunction,
    smatrix,
    smatrix_lowenergy_fit,
    time_reversal_defect,
)
from .base import Experiment, ExperimentInfo, ExperimentResult


class EigenfunctionResidual(Experiment):
    DEFAULT_PARAMS = {
        "k": [0.0, 0.0, 1.0],
        "signs": [1, -1],
        "threshold": 1e-6,
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="eigenfunction-residual",
            description="Lippmann-Schwinger residual of the generalized eigenfunctions",
            statement="phi(k) = {1 - R(|k| -+ i0) V} phi0(k) solves phi + R0 V phi = phi0",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        grid = self.grid()
        V = self.potential()
        residuals, fields = {}, {}
        for sign in self.params["signs"]:
            sign = int(sign)
            eig = gen_eigenfunction(V, self.params["k"], sign, grid, self.tolerances)
            label = "plus" if sign > 0 else "minus"
            residuals[label] = eig.residual
            fields[f"phi_{label}"] = eig.phi
        worst = max(residuals.values())
        return self.result(
            worst <= self.params["threshold"],
            {"residuals": residuals, "max_residual": worst, "k": self.params["k"]},
            fields=fields,
            tolerances={"threshold": self.params["threshold"]},
        )


class SMatrixSweep(Experiment):
    DEFAULT_PARAMS = {
        "lambdas": np.geomspace(0.05, 1.0, 8).tolist(),
        "quad_order": 12,
        "unitarity_lambda": 1.0,
        "unitarity_threshold": 1e-2,
        "exponent_range": [1.7, 2.3],
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="smatrix-sweep",
            description="unitarity and low-energy decay of S(lambda)",
            statement="S(lambda) is unitary and S(lambda) -> 1 as lambda -> 0",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        grid = self.grid()
        V = self.potential()
        quad = sphere_quad(int(self.params["quad_order"]))
        fit = smatrix_lowenergy_fit(V, self.params["lambdas"], quad, grid, self.tolerances)

        lam = float(self.params["unitarity_lambda"])
        at_lam = smatrix(V, lam, quad, grid, 1, self.tolerances)
        reversal = time_reversal_defect(V, lam, quad, grid, self.tolerances)
        if not fit.monotone:
            self.warn("||S(lambda) - 1|| is not monotone along the sweep")

        lo, hi = self.params["exponent_range"]
        passed = (
            at_lam.unitarity_defect() <= self.params["unitarity_threshold"]
            and lo <= fit.exponent <= hi
        )
        return self.result(
            passed,
            {
                "exponent": fit.exponent,
                "unitarity_defect": at_lam.unitarity_defect(),
                "s_minus_identity_norm": at_lam.minus_identity_norm(),
                "time_reversal_defect": reversal,
                "monotone": fit.monotone,
            },
            tables={
                "smatrix_sweep": {
                    "lambda": fit.lams,
                    "s_minus_identity_norm": fit.norms,
                    "unitarity_defect": fit.unitarity,
                }
            },
            tolerances={
                "unitarity_threshold": self.params["unitarity_threshold"],
                "exponent_range": self.params["exponent_range"],
            },
        )
