"""Command-line surface: parse a run configuration, dispatch checks, emit a certificate.

Exit codes: 0 when every verdict is PASS or WARN, 1 on FAIL, 2 on configuration
errors, 3 when sampling degenerates (the partial report is still written).
"""

from __future__ import annotations

import argparse
import itertools
import logging
import time
from collections.abc import Callable, Sequence
from dataclasses import replace
from pathlib import Path
from typing import Literal

from pydantic import BaseModel, Field, PositiveInt, ValidationError, model_validator

from ghlab.compositions import (
    RationalMap,
    build_composites,
    build_rational_morphism,
    monomial_generators,
    verify_harmonic_morphism,
)
from ghlab.config import LabConfig, Tolerances, get_config
from ghlab.duality import (
    build_dual_context,
    dual_estimate,
    dual_isotropy_residual,
    dual_pharmonic_verify,
    measured_dual_context,
    radius_independence,
)
from ghlab.eigenfamilies import (
    EigenFamily,
    InvarianceReport,
    build_family,
    expected_invariances,
    invariance_probe,
)
from ghlab.errors import BlockMismatchError, DegenerateSampleError, InvalidRangeError
from ghlab.lie_core import (
    GroupKind,
    build_basis,
    build_symmetric_pair,
    sample_group_point,
    symplectic_residual,
    unitarity_residual,
)
from ghlab.matrix_poly import coefficient_function
from ghlab.pharmonic import (
    EigenSpec,
    build_phi_p,
    numeric_crosscheck,
    verify_proper_pharmonic,
)
from ghlab.report import (
    Finding,
    Verdict,
    VerificationReport,
    chain_payload,
    comparison_payload,
    complex_pair,
    crosscheck_payload,
    dual_payload,
    estimate_payload,
    invariance_payload,
    morphism_payload,
    render_table,
)
from ghlab.sampling import Sampling, indexed_map
from ghlab.tension_engine import (
    compare_full_vs_horizontal,
    conformality_from_jets,
    estimate_eigenvalues,
    full_context,
    horizontal_context,
    tension_from_jets,
)

logger = logging.getLogger(__name__)

Command = Literal[
    "basis-check",
    "lemma-check",
    "family-verify",
    "composite-verify",
    "morphism-verify",
    "quotient-verify",
    "pharmonic-verify",
    "dual-verify",
    "sweep",
]
COMMANDS: tuple[str, ...] = Command.__args__  # type: ignore[attr-defined]

NESTED_BUDGET = 1e-2
CONTROL_THRESHOLD = 1e-3
CROSSCHECK_FLOOR = 0.25


class RunConfig(BaseModel):
    """Validated parameters of one CLI run.

    Attributes:
        command: Sub-command.
        group: ``u`` for U(n), ``sp`` for Sp(n).
        n: Rank for basis and lemma checks.
        p, q: Grassmannian block sizes, 1 <= p <= q.
        blocks: Flag block sizes; defaults to (p, q).
        d: Composite degree.
        order: p-harmonic order.
        lam, mu: Extra constants for the symbolic p-harmonic check.
        q_max, d_max: Sweep grid bounds.
        samples, seed, workers: Sampling controls.
        value_floor, denominator_floor, dual_radius, max_resample: Sampling guards.
        tolerances: Tolerance set.
        output: Report path; stdout when omitted.
        format: ``json`` or ``table``.
    """

    command: Command
    group: Literal["u", "sp"] = "u"
    n: PositiveInt = 2
    p: PositiveInt = 1
    q: PositiveInt = 1
    blocks: tuple[PositiveInt, ...] | None = None
    d: PositiveInt = 2
    order: PositiveInt = 2
    lam: float | None = None
    mu: float | None = None
    q_max: PositiveInt = 3
    d_max: PositiveInt = 3
    samples: PositiveInt = 50
    seed: int = 42
    workers: PositiveInt = 1
    value_floor: float = 1e-6
    denominator_floor: float = 1e-3
    dual_radius: float = 0.5
    max_resample: PositiveInt = 100
    tolerances: Tolerances = Field(default_factory=Tolerances)
    output: Path | None = None
    format: Literal["json", "table"] = "json"

    @model_validator(mode="after")
    def _check_ranges(self) -> RunConfig:
        if self.p > self.q:
            raise ValueError(f"need p <= q, got p={self.p}, q={self.q}")
        if (self.lam is None) != (self.mu is None):
            raise ValueError("--lam and --mu must be given together")
        return self

    @property
    def group_kind(self) -> GroupKind:
        return "unitary" if self.group == "u" else "quaternionic-unitary"

    def sampling(self) -> Sampling:
        return Sampling(
            seed=self.seed,
            samples=self.samples,
            value_floor=self.value_floor,
            denominator_floor=self.denominator_floor,
            max_resample=self.max_resample,
            workers=self.workers,
            dual_radius=self.dual_radius,
        )

    def echo(self) -> dict[str, object]:
        return self.model_dump(mode="json", exclude={"tolerances", "output", "format"})


def _verdict(ok: bool) -> Verdict:
    return "PASS" if ok else "FAIL"


def _family_label(family: EigenFamily) -> str:
    return f"{family.kind}({family.p},{family.q})"


# ── basis-check ──────────────────────────────────────────────────────────────


def basis_check(cfg: RunConfig, findings: list[Finding]) -> None:
    tol = cfg.tolerances
    basis = build_basis(cfg.group_kind, cfg.n)
    expected = -cfg.n if cfg.group == "u" else -(2 * cfg.n + 1) / 2
    residuals = {
        "gram": basis.gram_residual(),
        "skew": basis.skew_residual(),
        "quaternionic": basis.quaternionic_residual(),
        "bracket": basis.bracket_residual(),
        "casimir_scalar": basis.casimir_residual(),
    }
    structural = all(r < tol.algebra for r in residuals.values())
    constant_ok = abs(basis.casimir_constant - expected) < tol.algebra
    verdict: Verdict = "FAIL" if not structural else ("PASS" if constant_ok else "WARN")
    findings.append(
        Finding(
            name=f"basis/{cfg.group}({cfg.n})",
            verdict=verdict,
            measured={"dim": basis.dim, "casimir": complex_pair(basis.casimir_constant), **residuals},
            claimed={"casimir": complex_pair(expected)},
            notes=[] if constant_ok else ["Casimir constant differs from the coefficient-lemma normalization"],
        )
    )
    membership = max(
        unitarity_residual(g) + (symplectic_residual(g) if cfg.group == "sp" else 0.0)
        for g in (sample_group_point(basis, cfg.seed, i) for i in range(cfg.samples))
    )
    findings.append(
        Finding(
            name=f"group-membership/{cfg.group}({cfg.n})",
            verdict=_verdict(membership < tol.group),
            measured={"max_residual": membership, "samples": cfg.samples},
        )
    )
    if cfg.blocks:
        pair = build_symmetric_pair(basis, cfg.blocks)
        brackets = pair.bracket_residuals()
        ok = all(v is None or v < tol.algebra for v in brackets.values()) and pair.block_residual() < tol.algebra
        findings.append(
            Finding(
                name=f"pair/{cfg.group}({cfg.n}){list(pair.block_sizes)}",
                verdict=_verdict(ok),
                measured={
                    "dim_k": len(pair.k_basis),
                    "dim_m": len(pair.m_basis),
                    "symmetric": pair.is_symmetric,
                    "brackets": brackets,
                    "block_residual": pair.block_residual(),
                },
            )
        )


# ── lemma-check ──────────────────────────────────────────────────────────────


def lemma_check(cfg: RunConfig, findings: list[Finding]) -> None:
    """Coefficient lemmas: tau(z_ja) = c z_ja and kappa(z_ja, z_kb) = e z_jb z_ka."""
    basis = build_basis(cfg.group_kind, cfg.n)
    ctx = full_context(basis)
    size = basis.matrix_size
    rows = range(1, cfg.n + 1)
    coefficients = [((j, a), coefficient_function((size, size), j, a)) for j in rows for a in range(1, size + 1)]
    tau_constant = -cfg.n if cfg.group == "u" else -(2 * cfg.n + 1) / 2
    pairing = -1.0 if cfg.group == "u" else -0.5

    def residuals(index: int) -> tuple[float, float]:
        g = sample_group_point(basis, cfg.seed, index)
        jets = {key: f.jets(g, ctx.directions) for key, f in coefficients}
        tau_res = max(abs(tension_from_jets(jets[(j, a)]) - tau_constant * g[j - 1, a - 1]) for (j, a), _ in coefficients)
        kappa_res = max(
            abs(conformality_from_jets(jets[(j, a)], jets[(k, b)]) - pairing * g[j - 1, b - 1] * g[k - 1, a - 1])
            for ((j, a), _), ((k, b), _) in itertools.product(coefficients, repeat=2)
        )
        return float(tau_res), float(kappa_res)

    measured = indexed_map(residuals, range(cfg.samples), cfg.workers)
    tau_res = max(m[0] for m in measured)
    kappa_res = max(m[1] for m in measured)
    findings.append(
        Finding(
            name=f"lemma/{cfg.group}({cfg.n})",
            verdict=_verdict(tau_res < cfg.tolerances.morphism and kappa_res < cfg.tolerances.morphism),
            measured={"tau_residual": tau_res, "kappa_residual": kappa_res, "samples": cfg.samples},
            claimed={"tau_constant": complex_pair(tau_constant), "kappa_factor": complex_pair(pairing)},
        )
    )


# ── family-verify ────────────────────────────────────────────────────────────


def _family_finding(family: EigenFamily, cfg: RunConfig, sampling: Sampling) -> Finding:
    tol = cfg.tolerances.eigen
    estimate = estimate_eigenvalues(family.polynomials, full_context(family.basis()), sampling)
    eigen = estimate.is_eigen(tol)
    matches_claim = estimate.matches(family.claimed_lambda, family.claimed_mu, tol)
    matches_prediction = estimate.matches(family.predicted_lambda, family.predicted_mu, tol)
    notes: list[str] = []
    verdict: Verdict = _verdict(eigen)
    if eigen and not matches_claim:
        verdict = "WARN"
        notes.append("measured constants differ from the claimed constants; measurement is authoritative")
        logger.warning(
            "Claimed constants not reproduced",
            extra={"family": _family_label(family), "lambda": estimate.lambda_mean, "mu": estimate.mu_mean},
        )
    if eigen and not matches_prediction:
        verdict = "FAIL"
        notes.append("measured constants differ from the coefficient-lemma prediction")
    return Finding(
        name=f"family/{_family_label(family)}",
        verdict=verdict,
        measured={**estimate_payload(estimate), "members": len(family.members), "eigen": eigen},
        claimed={
            "lambda": complex_pair(family.claimed_lambda),
            "mu": complex_pair(family.claimed_mu),
            "predicted_lambda": complex_pair(family.predicted_lambda),
            "predicted_mu": complex_pair(family.predicted_mu),
        },
        notes=notes,
    )


def family_verify(cfg: RunConfig, findings: list[Finding]) -> None:
    family = build_family(cfg.group_kind, cfg.p, cfg.q)
    findings.append(_family_finding(family, cfg, cfg.sampling()))


# ── composite-verify ─────────────────────────────────────────────────────────


def _composite_finding(family: EigenFamily, d: int, cfg: RunConfig, sampling: Sampling) -> Finding:
    tol = cfg.tolerances.eigen
    base = estimate_eigenvalues(family.polynomials, full_context(family.basis()), sampling)
    generators = monomial_generators(min(3, len(family.members)), d)
    composite = build_composites(family, d, generators, base_constants=(base.lambda_mean, base.mu_mean))
    estimate = estimate_eigenvalues(list(composite.members), full_context(family.basis()), sampling)
    scale = max(1.0, abs(composite.derived_lambda))
    ok = (
        estimate.lambda_max_dev < tol * scale
        and estimate.mu_max_dev < tol * scale
        and abs(estimate.lambda_mean - composite.derived_lambda) < tol * scale
        and abs(estimate.mu_mean - composite.derived_mu) < tol * scale
    )
    return Finding(
        name=f"composite/{_family_label(family)}/d={d}",
        verdict=_verdict(ok),
        measured={**estimate_payload(estimate), "members": len(composite.members)},
        claimed={
            "derived_lambda": complex_pair(composite.derived_lambda),
            "derived_mu": complex_pair(composite.derived_mu),
            "base_lambda": complex_pair(base.lambda_mean),
            "base_mu": complex_pair(base.mu_mean),
        },
    )


def composite_verify(cfg: RunConfig, findings: list[Finding]) -> None:
    family = build_family(cfg.group_kind, cfg.p, cfg.q)
    findings.append(_composite_finding(family, cfg.d, cfg, cfg.sampling()))


# ── morphism-verify ──────────────────────────────────────────────────────────


def _quotients(family: EigenFamily, sampling: Sampling) -> list[tuple[str, RationalMap]]:
    members = family.polynomials
    labels = family.labels
    first = build_rational_morphism(family, members[0], members[1], sampling)
    quotients = [(f"{labels[0]}/{labels[1]}", first)]
    if len(members) > 2:
        quotients.append(
            (f"{labels[1]}/{labels[2]}", build_rational_morphism(family, members[1], members[2], sampling))
        )
    squared = build_rational_morphism(family, members[0] * members[0], members[1] * members[1], sampling)
    quotients.append((f"{labels[0]}^2/{labels[1]}^2", squared))
    quotients.append((f"moebius({labels[0]}/{labels[1]})", first.mobius(1, 2, 1j, 3)))
    return quotients


def morphism_verify(cfg: RunConfig, findings: list[Finding]) -> None:
    family = build_family(cfg.group_kind, cfg.p, cfg.q)
    sampling = cfg.sampling()
    ctx = full_context(family.basis())
    for label, quotient in _quotients(family, sampling):
        result = verify_harmonic_morphism(quotient, ctx, sampling)
        findings.append(
            Finding(
                name=f"morphism/{_family_label(family)}/{label}",
                verdict=_verdict(result.passed(cfg.tolerances.morphism)),
                measured=morphism_payload(result),
                claimed={"map": quotient.to_dict()},
            )
        )
    product = family.polynomials[0] * family.polynomials[1]
    control = verify_harmonic_morphism(product, ctx, sampling)
    findings.append(
        Finding(
            name=f"morphism-control/{_family_label(family)}/product",
            verdict=_verdict(control.kappa_residual > CONTROL_THRESHOLD),
            measured=morphism_payload(control),
            notes=["a product of two members is not horizontally conformal"],
        )
    )


# ── quotient-verify ──────────────────────────────────────────────────────────


def invariance_finding(name: str, probe: InvarianceReport, expected: tuple[str, ...] | None) -> Finding:
    """FAIL when a predicted invariance is missing; WARN when nothing is predicted."""
    if expected is None:
        verdict: Verdict = "WARN"
        notes = ["no invariance is predicted for this family and block layout; the classification is recorded"]
    else:
        missing = [probe_name for probe_name in expected if not probe.holds(probe_name)]
        verdict = _verdict(not missing)
        notes = [f"predicted invariance not observed: {probe_name}" for probe_name in missing]
    return Finding(
        name=name,
        verdict=verdict,
        measured=invariance_payload(probe),
        claimed={"invariances": list(expected or ())},
        notes=notes,
    )


def quotient_verify(cfg: RunConfig, findings: list[Finding]) -> None:
    family = build_family(cfg.group_kind, cfg.p, cfg.q)
    basis = family.basis()
    pair = build_symmetric_pair(basis, cfg.blocks or (cfg.p, cfg.q))
    sampling = cfg.sampling()
    tol = cfg.tolerances.morphism
    tag = f"{_family_label(family)}{list(pair.block_sizes)}"
    members = family.polynomials

    minor = members[0]
    full_k = compare_full_vs_horizontal(minor, pair, sampling, tol)
    unimodular = compare_full_vs_horizontal(minor, pair, sampling, tol, unimodular=True)
    findings.append(
        Finding(
            name=f"descent/{tag}/minor",
            verdict="PASS" if unimodular.invariant and unimodular.max_gap < tol else "WARN",
            measured={"full_isotropy": comparison_payload(full_k), "unimodular_isotropy": comparison_payload(unimodular)},
            notes=[
                "the minor is right-equivariant by det of the first block; it descends only modulo that character"
            ],
        )
    )

    quotient = RationalMap(members[0], members[1])
    floor = sampling.denominator_floor
    comparison = compare_full_vs_horizontal(
        quotient, pair, sampling, tol, accept=lambda g: abs(members[1].evaluate(g)) > floor
    )
    if comparison.invariant:
        verdict: Verdict = _verdict(comparison.max_gap < tol)
    else:
        verdict = "WARN"
    findings.append(
        Finding(
            name=f"descent/{tag}/{family.labels[0]}/{family.labels[1]}",
            verdict=verdict,
            measured=comparison_payload(comparison),
            notes=[] if comparison.invariant else ["quotient is not isotropy-invariant for these blocks"],
        )
    )

    probe = invariance_probe(minor, pair, sampling, cfg.tolerances.algebra)
    findings.append(invariance_finding(f"invariance/{tag}/minor", probe, expected_invariances(family, pair)))


# ── pharmonic-verify ─────────────────────────────────────────────────────────


def _symbolic_finding(name: str, spec: EigenSpec, order: int) -> Finding:
    chains = []
    ok = True
    for p in range(1, order + 1):
        profile = build_phi_p(p, spec)
        verdict = verify_proper_pharmonic(profile, p, spec)
        sharp = all(not verify_proper_pharmonic(profile, lower, spec).passed for lower in range(1, p))
        ok = ok and verdict.passed and sharp
        chains.append({**chain_payload(verdict), "sharp": sharp})
    return Finding(
        name=f"pharmonic-symbolic/{name}",
        verdict=_verdict(ok),
        measured={"orders": chains},
        claimed={"lambda": complex_pair(spec.lam), "mu": complex_pair(spec.mu), "source": spec.source},
    )


def pharmonic_verify(cfg: RunConfig, findings: list[Finding]) -> None:
    family = build_family(cfg.group_kind, cfg.p, cfg.q)
    specs = [
        ("mu-zero", EigenSpec(-3.0, 0.0)),
        ("lambda-equals-mu", EigenSpec(-1.0, -1.0)),
        (f"claimed-{_family_label(family)}", EigenSpec(family.claimed_lambda, family.claimed_mu)),
    ]
    if cfg.lam is not None and cfg.mu is not None:
        specs.append(("custom", EigenSpec(cfg.lam, cfg.mu)))
    findings.extend(_symbolic_finding(name, spec, cfg.order) for name, spec in specs)

    sampling = cfg.sampling()
    ctx = full_context(family.basis())
    phi = family.polynomials[0]
    estimate = estimate_eigenvalues([phi], ctx, sampling)
    spec = EigenSpec(estimate.lambda_mean, estimate.mu_mean, source="measured")
    profile = build_phi_p(cfg.order, spec)
    crosscheck = numeric_crosscheck(profile, phi, ctx, sampling, spec, modulus_floor=CROSSCHECK_FLOOR)
    ok = crosscheck.max_deviation < cfg.tolerances.crosscheck and crosscheck.iterated_deviation < NESTED_BUDGET
    findings.append(
        Finding(
            name=f"pharmonic-numeric/{_family_label(family)}/{family.labels[0]}/p={cfg.order}",
            verdict=_verdict(ok),
            measured={**crosscheck_payload(crosscheck), "profile": profile.to_text()},
            claimed={"lambda": complex_pair(spec.lam), "mu": complex_pair(spec.mu), "source": spec.source},
            notes=[f"samples restricted to |phi| >= {CROSSCHECK_FLOOR}; iterated tension budget {NESTED_BUDGET}"],
        )
    )


# ── dual-verify ──────────────────────────────────────────────────────────────


def dual_verify(cfg: RunConfig, findings: list[Finding]) -> None:
    family = build_family(cfg.group_kind, cfg.p, cfg.q)
    pair = build_symmetric_pair(family.basis(), (cfg.p, cfg.q))
    sampling = cfg.sampling()
    tol = cfg.tolerances
    tag = _family_label(family)
    members = family.polynomials

    compact = estimate_eigenvalues(members, horizontal_context(pair), sampling)
    compact_spec = EigenSpec(compact.lambda_mean, compact.mu_mean, source="measured")
    dual = build_dual_context(pair, compact_spec)
    result = dual_estimate(members, dual, sampling)
    findings.append(
        Finding(
            name=f"dual-sign-flip/{tag}",
            verdict=_verdict(result.passed(tol.dual)),
            measured=dual_payload(result),
            claimed={"compact_lambda": complex_pair(compact.lambda_mean), "compact_mu": complex_pair(compact.mu_mean)},
        )
    )
    claimed_dual = (-family.claimed_lambda, -family.claimed_mu)
    if not result.estimate.matches(*claimed_dual, tol.dual):
        findings.append(
            Finding(
                name=f"dual-claimed/{tag}",
                verdict="WARN",
                measured=estimate_payload(result.estimate),
                claimed={"lambda": complex_pair(claimed_dual[0]), "mu": complex_pair(claimed_dual[1])},
                notes=["horizontal constants over m differ from the full-group constants by the isotropy part"],
            )
        )

    spread = radius_independence(members, dual, sampling)
    findings.append(
        Finding(name=f"dual-radius/{tag}", verdict=_verdict(spread < tol.dual), measured={"max_difference": spread})
    )

    compact_invariant = compare_full_vs_horizontal(members[0], pair, sampling, tol.morphism, unimodular=True).invariant
    dual_residual = dual_isotropy_residual(members[0], pair, sampling, unimodular=True)
    findings.append(
        Finding(
            name=f"dual-isotropy/{tag}",
            verdict=_verdict(compact_invariant == (dual_residual < tol.dual)),
            measured={"compact_invariant": compact_invariant, "dual_residual": dual_residual},
        )
    )

    phi_dual = measured_dual_context(members[0], pair, sampling)
    verdict = dual_pharmonic_verify(
        cfg.order, phi_dual, members[0], sampling, tol.crosscheck, modulus_floor=CROSSCHECK_FLOOR
    )
    findings.append(
        Finding(
            name=f"dual-pharmonic/{tag}/p={cfg.order}",
            verdict=_verdict(verdict.passed),
            measured={"symbolic": chain_payload(verdict.symbolic), "numeric": crosscheck_payload(verdict.numeric)},
            claimed={"lambda": complex_pair(verdict.spec.lam), "mu": complex_pair(verdict.spec.mu)},
        )
    )
    if cfg.order >= 2:
        control = dual_pharmonic_verify(
            cfg.order,
            phi_dual,
            members[0],
            sampling,
            tol.crosscheck,
            spec=phi_dual.compact_spec,
            modulus_floor=CROSSCHECK_FLOOR,
        )
        findings.append(
            Finding(
                name=f"dual-pharmonic-control/{tag}/p={cfg.order}",
                verdict=_verdict(control.numeric.max_deviation > tol.crosscheck),
                measured=crosscheck_payload(control.numeric),
                notes=["unflipped constants at dual points must not reproduce the dual tension"],
            )
        )
    claimed = EigenSpec(family.claimed_lambda, family.claimed_mu).flipped()
    findings.append(_symbolic_finding(f"dual-claimed/{tag}", claimed, cfg.order))


# ── sweep ────────────────────────────────────────────────────────────────────


def sweep(cfg: RunConfig, findings: list[Finding]) -> None:
    """Family and composite checks over ``1 <= p <= q <= q_max`` and ``1 <= d <= d_max``."""
    grid = [
        (p, q, d)
        for q in range(1, cfg.q_max + 1)
        for p in range(1, q + 1)
        for d in range(1, cfg.d_max + 1)
    ]
    inline = replace(cfg.sampling(), workers=1)

    def cell(point: tuple[int, int, int]) -> tuple[list[Finding], DegenerateSampleError | None]:
        p, q, d = point
        out: list[Finding] = []
        try:
            family = build_family(cfg.group_kind, p, q)
            if d == 1:
                out.append(_family_finding(family, cfg, inline))
            out.append(_composite_finding(family, d, cfg, inline))
        except DegenerateSampleError as exc:
            logger.warning("Sweep cell degenerated", extra={"p": p, "q": q, "d": d})
            return out, exc
        return out, None

    errors: list[DegenerateSampleError] = []
    for cell_findings, error in indexed_map(cell, grid, cfg.workers):
        findings.extend(cell_findings)
        if error is not None:
            errors.append(error)
    if errors:
        raise errors[0]


HANDLERS: dict[str, Callable[[RunConfig, list[Finding]], None]] = {
    "basis-check": basis_check,
    "lemma-check": lemma_check,
    "family-verify": family_verify,
    "composite-verify": composite_verify,
    "morphism-verify": morphism_verify,
    "quotient-verify": quotient_verify,
    "pharmonic-verify": pharmonic_verify,
    "dual-verify": dual_verify,
    "sweep": sweep,
}


def run(cfg: RunConfig) -> VerificationReport:
    """Run one command and collect its findings into a report.

    Degenerate sampling stops the command; the report carries ``aborted``.
    """
    report = VerificationReport(command=cfg.command, config=cfg.echo(), tolerances=cfg.tolerances.model_dump())
    started = time.perf_counter()
    try:
        HANDLERS[cfg.command](cfg, report.findings)
    except DegenerateSampleError as exc:
        logger.error("Sampling degenerated: %s", exc)
        report.aborted = str(exc)
    report.timing_seconds = time.perf_counter() - started
    logger.info("Finished %s: %s", cfg.command, report.overall)
    return report


# ── argument parsing ─────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--group", choices=["u", "sp"], default="u")
    common.add_argument("--n", type=int)
    common.add_argument("--p", type=int)
    common.add_argument("--q", type=int)
    common.add_argument("--blocks", type=int, nargs="+")
    common.add_argument("--d", type=int)
    common.add_argument("--order", type=int)
    common.add_argument("--lam", type=float)
    common.add_argument("--mu", type=float)
    common.add_argument("--q-max", type=int)
    common.add_argument("--d-max", type=int)
    common.add_argument("--samples", type=int)
    common.add_argument("--seed", type=int)
    common.add_argument("--workers", type=int)
    for name in Tolerances.model_fields:
        common.add_argument(f"--tol-{name}", type=float, dest=f"tol_{name}")
    common.add_argument("--out", type=Path, dest="output")
    common.add_argument("--format", choices=["json", "table"], default="json")

    parser = argparse.ArgumentParser(prog="ghlab", description="Verify eigenfamilies, harmonic morphisms and p-harmonic functions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub.add_parser(command, parents=[common])
    return parser


def parse_config(argv: Sequence[str] | None = None, config: LabConfig | None = None) -> RunConfig:
    """Parse CLI flags layered over the environment configuration.

    Raises:
        ValidationError: If the merged values are invalid.
    """
    config = config or get_config()
    args = vars(build_parser().parse_args(argv))
    tolerances = config.tolerances.model_dump()
    for name in list(tolerances):
        override = args.pop(f"tol_{name}", None)
        if override is not None:
            tolerances[name] = override
    values = {
        "samples": config.samples,
        "seed": config.seed,
        "workers": config.workers,
        "value_floor": config.value_floor,
        "denominator_floor": config.denominator_floor,
        "dual_radius": config.dual_radius,
        "max_resample": config.max_resample,
        **{key: value for key, value in args.items() if value is not None},
        "tolerances": Tolerances.model_validate(tolerances),
    }
    return RunConfig.model_validate(values)


def emit(report: VerificationReport, cfg: RunConfig) -> None:
    text = render_table(report) if cfg.format == "table" else report.to_json() + "\n"
    if cfg.output is None:
        print(text, end="")
        return
    cfg.output.parent.mkdir(parents=True, exist_ok=True)
    cfg.output.write_text(text, encoding="utf-8")
    logger.info("Wrote report to %s", cfg.output)


def main(argv: Sequence[str] | None = None) -> int:
    """Parse, run and emit; return the process exit code."""
    try:
        cfg = parse_config(argv)
    except ValidationError as exc:
        logger.error("Invalid configuration: %s", exc)
        return 2
    try:
        report = run(cfg)
    except (InvalidRangeError, BlockMismatchError) as exc:
        logger.error("Invalid configuration: %s", exc)
        return 2
    emit(report, cfg)
    return report.exit_code
