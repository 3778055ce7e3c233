"""Dilation and Mourre experiments."""

import numpy as np

from ..spectral.dilation_mourre import (
    commutator_check,
    dilation_report,
    gaussian_field,
    kato_check,
    largest_usable_tau,
    moment_free_packet,
    mourre_form_check,
    mourre_positivity,
    random_bandlimited_fields,
    smatrix_dilation_check,
    spectrum_scaling_check,
    wave_dilation_pairing,
)
from ..spectral.grid import inner, sphere_quad
from ..spectral.potential import TABULATED
from ..spectral.scattering import shell_probe, stationary_wave_pairing
from .base import Experiment, ExperimentInfo, ExperimentResult

GAUSSIAN_KINETIC = 2.0 / np.sqrt(np.pi)
GAUSSIAN_COULOMB = 4.0 * np.pi**-1.5


class SMatrixDilationCheck(Experiment):
    DEFAULT_PARAMS = {
        "lambda": 1.0,
        "taus": [-1.0, -2.0, -3.0, -4.0],
        "quad_order": 12,
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="smatrix-dilation",
            description="||U_-tau S U_tau - 1|| on one fiber as tau decreases",
            statement="U_-tau S U_tau -> 1 as tau -> -infinity",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        report = smatrix_dilation_check(
            self.potential(),
            float(self.params["lambda"]),
            self.params["taus"],
            sphere_quad(int(self.params["quad_order"])),
            self.grid(),
            self.tolerances,
        )
        return self.result(
            report.strictly_decreasing,
            {"norms": report.norms, "strictly_decreasing": report.strictly_decreasing},
            tables={"smatrix_dilation": report.table()},
        )


class WaveDilation(Experiment):
    DEFAULT_PARAMS = {
        "taus": [-1.0, -2.0, -3.0, -4.0],
        "shell": [0.5, 1.5],
        "f_width": 1.0,
        "sign": -1,
        "min_decay_ratio": 2.0,
        "consistency_threshold": 1e-3,
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="wave-dilation",
            description="<f, (U_-tau W U_tau - 1) g> as tau decreases",
            statement="U_-tau W U_tau -> 1 strongly as tau -> -infinity",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        grid = self.grid()
        V = self.potential()
        sign = int(self.params["sign"])
        probe = shell_probe(*self.params["shell"])
        f = gaussian_field(grid, float(self.params["f_width"]))

        # at tau = 0 the dilated pairing is the stationary one minus <f, g>
        at_zero = wave_dilation_pairing(V, f, probe, 0.0, sign, self.tolerances)
        stationary = stationary_wave_pairing(V, f, probe, sign, self.tolerances)
        expected = stationary.resolvent_form - inner(f, probe.synthesize(grid))
        consistency = abs(at_zero - expected) / max(abs(expected), 1e-300)

        sweep = largest_usable_tau(V, f, probe, self.params["taus"], sign, self.tolerances)
        if sweep.failed_at is not None:
            self.warn(f"Birman-Schwinger operator singular at tau = {sweep.failed_at}")
        ratios = sweep.decay_ratios()
        requested = len(self.params["taus"])
        passed = (
            len(sweep.taus) == requested
            and bool(np.all(ratios >= self.params["min_decay_ratio"]))
            and consistency <= self.params["consistency_threshold"]
        )
        return self.result(
            passed,
            {
                "decay_ratios": ratios,
                "largest_usable_tau": sweep.largest_usable_tau,
                "failed_at": sweep.failed_at,
                "tau_zero_consistency": consistency,
            },
            tables={"wave_dilation": sweep.table()},
            tolerances={
                "min_decay_ratio": self.params["min_decay_ratio"],
                "consistency_threshold": self.params["consistency_threshold"],
            },
        )


class SpectrumScalingCheck(Experiment):
    DEFAULT_PARAMS = {
        "taus": [-0.3, 0.0, 0.3],
        "count": 1,
        "threshold": 1e-3,
        "probe_width": 1.0,
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="spectrum-scaling",
            description="bound states of H0 + exp(-tau) V_tau against exp(-tau) times those of H",
            statement="sigma_p(H0 + exp(-tau) V_tau) = exp(-tau) sigma_p(H0 + V)",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        grid = self.grid()
        report = spectrum_scaling_check(
            self.potential(),
            self.params["taus"],
            grid,
            int(self.params["count"]),
            self.tolerances,
        )
        if report.empty:
            self.warn("no bound state on this grid; deepen the well")
        probe = gaussian_field(grid, float(self.params["probe_width"]))
        dilation = [dilation_report(tau, probe).to_dict() for tau in self.params["taus"] if tau]
        return self.result(
            not report.empty and report.max_mismatch() <= self.params["threshold"],
            {
                "base_eigenvalues": report.base,
                "max_mismatch": report.max_mismatch(),
                "dilation": dilation,
            },
            tables={"spectrum_scaling": report.table()},
            tolerances={"threshold": self.params["threshold"]},
        )


class MourreCheck(Experiment):
    DEFAULT_PARAMS = {
        "c1": 0.2,
        "c2": 0.5,
        "random_fields": 10,
        "kato_threshold": 1e-3,
        "commutator_threshold": 1e-3,
        "commutator_route": "resample",
    }

    def get_info(self) -> ExperimentInfo:
        return ExperimentInfo(
            name="mourre-check",
            description="Kato inequality, commutator formula and Mourre-type positivity",
            statement="[iH, A] = H0 - x . grad V and (2 / pi) c2 / |x| - c1 V - x . grad V > 0",
            params=self.DEFAULT_PARAMS,
        )

    def run(self) -> ExperimentResult:
        grid = self.grid()
        V = self.potential()
        c1, c2 = float(self.params["c1"]), float(self.params["c2"])
        gauss = gaussian_field(grid)

        kato = kato_check(gauss)
        kato_error = max(
            abs(kato.kinetic - GAUSSIAN_KINETIC), abs(kato.coulomb - GAUSSIAN_COULOMB)
        )
        fields = random_bandlimited_fields(
            grid, int(self.params["random_fields"]), self.config.seed
        )
        margins = np.array([kato_check(f).margin for f in fields])
        commutator = commutator_check(
            V, moment_free_packet(grid), route=self.params["commutator_route"]
        )
        forms = mourre_form_check(V, c1, c2, [gauss, *fields])

        metrics = {
            "kato_gaussian": kato.to_dict(),
            "kato_gaussian_error": kato_error,
            "random_margin_min": float(margins.min()),
            "commutator_defect": commutator.defect,
            "form_gap_min": min(s.gap for s in forms.samples),
            "form_check_passed": forms.passed,
        }
        positivity_ok = True
        if V.kind != TABULATED:
            positivity = mourre_positivity(V, c1, c2, grid, self.tolerances)
            metrics["positivity"] = positivity.to_dict()
            positivity_ok = positivity.passed
            if not positivity.decay_ok:
                self.warn("virial decay caps exceed the configured bound")
        else:
            self.warn("tabulated potential: pointwise positivity skipped")

        passed = (
            kato_error <= self.params["kato_threshold"]
            and bool(np.all(margins >= 0))
            and commutator.defect <= self.params["commutator_threshold"]
            and forms.passed
            and positivity_ok
        )
        return self.result(
            passed,
            metrics,
            tables={
                "mourre_forms": {
                    "sample": np.arange(len(forms.samples)),
                    "t_form": np.array([s.t_form for s in forms.samples]),
                    "m_form": np.array([s.m_form for s in forms.samples]),
                    "gap": np.array([s.gap for s in forms.samples]),
                },
                "kato_margins": {"sample": np.arange(len(margins)), "margin": margins},
            },
            tolerances={
                "kato_threshold": self.params["kato_threshold"],
                "commutator_threshold": self.params["commutator_threshold"],
            },
        )
