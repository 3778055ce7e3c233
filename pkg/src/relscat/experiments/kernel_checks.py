"""Free-kernel experiments: HS scaling, resolvent consistency, semigroup."""

import numpy as np

from ..spectral.birman_schwinger import loglog_fit
from ..spectral.dilation_mourre import gaussian_field
from ..spectral.dynamics import semigroup_apply, semigroup_kernel_apply
from ..spectral.grid import Field, weighted_norm
from ..spectral.kernel_ops import (
    RadialKernel,
    apply_resolvent,
    gaussian_resolvent_limit,
    hs_norm_g0_split,
    hs_weighted_norm,
    resolvent_multiplier_oracle,
)
from .base import Experiment, ExperimentInfo, ExperimentResult


class HSScaling(Experiment):
    DEFAULT_PARAMS = {
        "lambdas": np.geomspace(0.01, 1.0, 8).tolist(),
        "s": 2.0,
        "target": 0.5,
        "tolerance": 0.05,
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="hs-scaling",
            description="weighted Hilbert-Schmidt norm of M_lambda against lambda",
            statement="||<x>^-s M_lambda||_HS vanishes as lambda^(1/2)",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        lams = np.asarray(self.params["lambdas"], dtype=float)
        s = float(self.params["s"])
        norms = np.array(
            [hs_weighted_norm(RadialKernel("mlambda", lam=lam), s).value for lam in lams]
        )
        fit = loglog_fit(lams, norms)
        g0 = hs_norm_g0_split(1.0, s)
        passed = abs(fit.slope - self.params["target"]) <= self.params["tolerance"]
        return self.result(
            passed,
            {
                "exponent": fit.slope,
                "fit_residual": fit.residual,
                "g0_tail_norm": g0.value,
                "g0_l1_core": g0.l1_core,
            },
            tables={"hs_scaling": {"lambda": lams, "hs_norm": norms}},
            tolerances={"exponent_tolerance": self.params["tolerance"]},
        )


class ResolventConsistency(Experiment):
    DEFAULT_PARAMS = {
        "lambda": 1.0,
        "sign": 1,
        "width": 1.0,
        "self_term": "lattice",
        "eps_list": [0.2, 0.1, 0.05],
        "pad": 2,
        "s": 2.0,
        "threshold": 1e-2,
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="resolvent-consistency",
            description=(
                "kernel route of R0(lambda +- i0) against the eps -> 0 limit of the multiplier"
            ),
            statement="limiting absorption: R0(lambda +- i0) = lim (|D| - lambda -+ i eps)^-1",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        grid = self.grid()
        lam = float(self.params["lambda"])
        sign = int(self.params["sign"])
        s = float(self.params["s"])
        width = float(self.params["width"])
        f = gaussian_field(grid, width)
        oracle = gaussian_resolvent_limit(lam, sign, f, width)
        scale = weighted_norm(s, oracle)

        def error(route: Field) -> float:
            return weighted_norm(s, route - oracle) / scale

        kernel_route = apply_resolvent(lam, sign, f, self.params["self_term"])
        # the periodic ladder wraps once eps * L is small; reported, not gated
        ladder = resolvent_multiplier_oracle(
            lam, sign, f, self.params["eps_list"], int(self.params["pad"])
        )
        kernel_error = error(kernel_route)

        m = grid.n // 2
        axis = grid.axis[m:]
        line_k = kernel_route.values[m:, m, m]
        line_o = oracle.values[m:, m, m]
        return self.result(
            kernel_error <= self.params["threshold"],
            {
                "weighted_relative_error": kernel_error,
                "ball_route_error": error(apply_resolvent(lam, sign, f, "ball")),
                "eps_ladder_error": error(ladder),
                "lambda": lam,
                "sign": sign,
            },
            tables={
                "resolvent_line": {
                    "x": axis,
                    "kernel_re": line_k.real,
                    "kernel_im": line_k.imag,
                    "multiplier_re": line_o.real,
                    "multiplier_im": line_o.imag,
                }
            },
            tolerances={"threshold": self.params["threshold"]},
        )


class SemigroupCheck(Experiment):
    DEFAULT_PARAMS = {
        "times": [1.0, 2.0],
        "width": 1.0,
        "pad": 3,
        "mass_tolerance": 1e-6,
        "route_tolerance": 1e-3,
        "law_tolerance": 1e-10,
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="semigroup-check",
            description="exp(-t H0) by Poisson kernel and by multiplier",
            statement="exp(-t H0) has kernel t / (pi^2 (|x-y|^2 + t^2)^2)",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        grid = self.grid()
        f = gaussian_field(grid, float(self.params["width"]))
        mass = grid.cell_volume * f.values.sum().real
        times = np.asarray(self.params["times"], dtype=float)
        route_errors, periodic_errors, mass_errors, min_values = [], [], [], []
        pad = int(self.params["pad"])
        for t in times:
            # the periodic route keeps the mass; the padded one keeps the tail out
            periodic = semigroup_apply(t, f)
            padded = semigroup_apply(t, f, pad)
            kernel = semigroup_kernel_apply(t, f)
            route_errors.append((kernel - padded).norm() / padded.norm())
            periodic_errors.append((kernel - periodic).norm() / periodic.norm())
            mass_errors.append(abs(grid.cell_volume * periodic.values.sum().real - mass))
            min_values.append(kernel.values.real.min() / kernel.values.real.max())

        t, u = float(times[0]), float(times[-1])
        composed = semigroup_apply(t, semigroup_apply(u, f))
        law = (composed - semigroup_apply(t + u, f)).norm() / f.norm()

        passed = (
            max(route_errors) <= self.params["route_tolerance"]
            and max(mass_errors) <= self.params["mass_tolerance"] * abs(mass)
            and law <= self.params["law_tolerance"]
            and min(min_values) >= -1e-12
        )
        return self.result(
            passed,
            {
                "max_route_error": max(route_errors),
                "periodic_route_error": max(periodic_errors),
                "max_mass_error": max(mass_errors),
                "semigroup_law_defect": law,
                "min_relative_value": min(min_values),
            },
            tables={
                "semigroup": {
                    "t": times,
                    "route_error": np.asarray(route_errors),
                    "periodic_route_error": np.asarray(periodic_errors),
                    "mass_error": np.asarray(mass_errors),
                }
            },
            tolerances={
                "route_tolerance": self.params["route_tolerance"],
                "mass_tolerance": self.params["mass_tolerance"],
            },
        )
