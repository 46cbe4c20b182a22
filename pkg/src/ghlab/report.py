"""Verification certificates and their plain-text rendering.

A report is a pydantic model serialized to JSON. The table form is rendered
from the same model and never recomputes anything.
"""

from __future__ import annotations

import logging
from typing import Any, Literal

from pydantic import BaseModel, Field

from ghlab import __version__
from ghlab.compositions import MorphismReport
from ghlab.duality import DualEstimate
from ghlab.eigenfamilies import InvarianceReport
from ghlab.pharmonic import CrosscheckReport, PHarmonicVerdict
from ghlab.tension_engine import EigenEstimate, QuotientComparison

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"

Verdict = Literal["PASS", "WARN", "FAIL"]

HEADER_NOTES = [
    "metric: <X, Y> = Re trace(X* Y) in the defining representation",
    "tension: sum of Z^2 over orthonormal left-invariant directions; nabla_Z Z = 0 for a bi-invariant metric",
    "product rule read as tau(f h) = tau(f) h + 2 kappa(f, h) + f tau(h)",
    "finite differences: step 1e-4 first level, 1e-3 for the iterated tension (magnitude check only)",
    "claim mismatches are reported as WARN; eigen-ness and p-harmonicity failures as FAIL",
]


def complex_pair(z: complex) -> list[float]:
    """Encode a complex number as ``[re, im]``."""
    z = complex(z)
    return [float(z.real), float(z.imag)]


class Finding(BaseModel):
    """One verdict with the numbers it rests on.

    Attributes:
        name: Stable identifier of the check.
        verdict: PASS, WARN (claim mismatch, measurement authoritative) or FAIL.
        measured: Measured quantities; complex values as ``[re, im]``.
        claimed: Constants the check compares against.
        notes: Free-text findings.
    """

    name: str
    verdict: Verdict
    measured: dict[str, Any] = {}
    claimed: dict[str, Any] = {}
    notes: list[str] = []


class VerificationReport(BaseModel):
    """Self-describing certificate of one CLI run.

    Attributes:
        schema_version: Version of this JSON layout.
        version: Package version.
        command: Sub-command that produced the report.
        config: Echo of the run configuration.
        tolerances: Tolerance set used.
        header: Conventions every verdict relies on.
        findings: Verdicts in execution order.
        aborted: Reason the run stopped early, if it did.
        timing_seconds: Wall time; excluded from the determinism contract.
    """

    schema_version: str = SCHEMA_VERSION
    version: str = __version__
    command: str
    config: dict[str, Any]
    tolerances: dict[str, float]
    header: list[str] = Field(default_factory=lambda: list(HEADER_NOTES))
    findings: list[Finding] = []
    aborted: str | None = None
    timing_seconds: float = 0.0

    @property
    def overall(self) -> Verdict:
        verdicts = {f.verdict for f in self.findings}
        if self.aborted or "FAIL" in verdicts:
            return "FAIL"
        if "WARN" in verdicts:
            return "WARN"
        return "PASS"

    @property
    def exit_code(self) -> int:
        if self.aborted:
            return 3
        return 1 if self.overall == "FAIL" else 0

    def to_json(self) -> str:
        return self.model_dump_json(indent=2)

    def deterministic_json(self) -> str:
        """JSON without the timing field."""
        return self.model_dump_json(indent=2, exclude={"timing_seconds"})


# ── measurement payloads ─────────────────────────────────────────────────────


def estimate_payload(estimate: EigenEstimate) -> dict[str, Any]:
    return {
        "lambda": complex_pair(estimate.lambda_mean),
        "lambda_max_dev": estimate.lambda_max_dev,
        "mu": complex_pair(estimate.mu_mean),
        "mu_max_dev": estimate.mu_max_dev,
        "samples": estimate.samples,
    }


def comparison_payload(comparison: QuotientComparison) -> dict[str, Any]:
    return {
        "context": comparison.label,
        "unimodular": comparison.unimodular,
        "max_gap": comparison.max_gap,
        "isotropy_residual": comparison.isotropy_residual,
        "gap_ratio": complex_pair(comparison.gap_ratio),
        "invariant": comparison.invariant,
        "samples": comparison.samples,
    }


def invariance_payload(report: InvarianceReport) -> dict[str, Any]:
    return {"residuals": dict(report.residuals), "invariances": list(report.invariances), "samples": report.samples}


def morphism_payload(report: MorphismReport) -> dict[str, Any]:
    return {"tau_residual": report.tau_residual, "kappa_residual": report.kappa_residual, "samples": report.samples}


def chain_payload(verdict: PHarmonicVerdict) -> dict[str, Any]:
    return {
        "p": verdict.p,
        "passed": verdict.passed,
        "vanishing_step": verdict.vanishing_step,
        "chain": [step.to_text() for step in verdict.chain],
    }


def crosscheck_payload(report: CrosscheckReport) -> dict[str, Any]:
    return {
        "max_deviation": report.max_deviation,
        "iterated_max": report.iterated_max,
        "iterated_deviation": report.iterated_deviation,
        "samples": report.samples,
        "steps": list(report.steps),
    }


def dual_payload(result: DualEstimate) -> dict[str, Any]:
    return {
        **estimate_payload(result.estimate),
        "expected_lambda": complex_pair(result.expected_lambda),
        "expected_mu": complex_pair(result.expected_mu),
        "deviation": result.deviation,
    }


# ── table rendering ──────────────────────────────────────────────────────────


def _cell(value: Any) -> str:
    if isinstance(value, float):
        return f"{value:.6g}"
    if isinstance(value, list) and len(value) == 2 and all(isinstance(v, float) for v in value):
        return f"{complex(value[0], value[1]):.6g}"
    if isinstance(value, dict):
        return "{" + ", ".join(f"{k}={_cell(v)}" for k, v in value.items()) + "}"
    if isinstance(value, list):
        return "[" + ", ".join(_cell(v) for v in value) + "]"
    return str(value)


def render_table(report: VerificationReport) -> str:
    """Render a report as a plain-text table."""
    lines = [
        f"ghlab {report.version}  command={report.command}  overall={report.overall}",
        *(f"  # {note}" for note in report.header),
    ]
    if report.aborted:
        lines.append(f"  ! aborted: {report.aborted}")
    width = max((len(f.name) for f in report.findings), default=10)
    lines.append(f"{'check'.ljust(width)}  verdict  measured")
    lines.append(f"{'-' * width}  -------  --------")
    for finding in report.findings:
        measured = "  ".join(f"{k}={_cell(v)}" for k, v in finding.measured.items() if k != "chain")
        lines.append(f"{finding.name.ljust(width)}  {finding.verdict.ljust(7)}  {measured}")
        for key, value in finding.claimed.items():
            lines.append(f"{''.ljust(width)}           claimed {key}={_cell(value)}")
        for note in finding.notes:
            lines.append(f"{''.ljust(width)}           note: {note}")
    return "\n".join(lines) + "\n"
