"""Existence and classification of two-zonal invariant cones.

A ray on the separation plane sits on an invariant cone exactly when the
two half-plane passages chain back to the starting slope.  Writing the
minus-zone passage phase as ``tau_minus`` and the plus-zone one as
``tau_plus``, that is a pair of slope-matching equations; adding the radial
closure condition (the product of the two y-stretches equals one) upgrades
the cone to a carrier of periodic orbits.  This module solves the matching
system, handles the degenerate one-parameter family that appears when both
shape ratios vanish with equal real eigenvalues, appends the trivial cone
(the shared focus plane) when the real eigenvalues agree, and classifies
the radial dynamics on every cone found.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .auxiliary import log_g, phi_scaled, tau_hat
from .errors import DomainError, NotApplicable
from .halfmaps import (
    entry_slope,
    entry_slope_deriv,
    exit_slope,
    exit_slope_deriv,
)
from .model import EigenTriple, PwlSystem

RESIDUAL_TARGET = 1e-12
CENTER_TOL = 1e-9
DEGENERACY_TOL = 1e-8
DEDUPE_TOL = 1e-8
GRID_DEFAULT = 256
GAMMA_ZERO_ATOL = 1e-12
LAM_MATCH_RTOL = 1e-9
_GRID_INSET = 1e-6
_NEWTON_ITERS = 60
_MAX_HALVINGS = 50


class ConeKind(Enum):
    TRIVIAL = "Trivial"
    NON_TRIVIAL = "NonTrivial"
    ONE_ZONAL = "OneZonal"
    FAMILY = "Family"


class ConeDynamics(Enum):
    CENTER = "Center"
    STABLE_FOCUS = "StableFocus"
    UNSTABLE_FOCUS = "UnstableFocus"


class ScreenResult(Enum):
    PASS = "Pass"
    FAIL_A = "FailA"
    FAIL_B = "FailB"
    FAIL_C = "FailC"
    NOT_APPLICABLE = "NotApplicable"


@dataclass(frozen=True)
class ConeSolution:
    """A solved passage-phase pair with its slopes and radial classification."""

    tau_minus: float
    tau_plus: float
    u0: float
    u1: float
    return_ratio: float
    kind: ConeKind
    dynamics: ConeDynamics

    def to_json(self) -> dict:
        return {
            "tau_minus": self.tau_minus,
            "tau_plus": self.tau_plus,
            "u0": self.u0,
            "u1": self.u1,
            "return_ratio": self.return_ratio,
            "kind": self.kind.value,
            "dynamics": self.dynamics.value,
        }


@dataclass(frozen=True, eq=False)
class ConeFamily:
    """One-parameter continuum of cones (both shape ratios zero, equal real
    eigenvalues): cot(tau_minus/2) / cot(tau_plus/2) = -beta_plus/beta_minus,
    plus the half-turn pair (pi, pi) that the parametrization passes through.
    """

    beta_minus: float
    beta_plus: float
    pairs: np.ndarray
    dynamics: ConeDynamics

    def tau_plus_of(self, tau_minus):
        t = np.asarray(tau_minus, dtype=float)
        if not np.all((t > 0.0) & (t < 2.0 * math.pi)):
            raise DomainError("tau_minus must lie in (0, 2*pi)")
        # arccot onto (0, pi) keeps tau_plus in (0, 2*pi) and sends pi to pi
        cot_half = np.cos(0.5 * t) / np.sin(0.5 * t)
        out = 2.0 * (0.5 * math.pi - np.arctan(-(self.beta_minus / self.beta_plus) * cot_half))
        if out.ndim == 0:
            return float(out)
        return out

    def to_json(self) -> dict:
        return {
            "relation": "cot(tau_minus/2)/cot(tau_plus/2) = -beta_plus/beta_minus",
            "beta_minus": self.beta_minus,
            "beta_plus": self.beta_plus,
            "includes_half_turn_pair": True,
            "dynamics": self.dynamics.value,
            "sampled_pairs": [[float(a), float(b)] for a, b in self.pairs],
        }


@dataclass
class ConeFindings:
    """Everything the cone solver located on one system."""

    cones: list[ConeSolution]
    family: ConeFamily | None = None
    degenerate_pairs: list[tuple[float, float]] = field(default_factory=list)


@dataclass(frozen=True)
class OneZoneCone:
    """Single-zone check: does one zone's own flow return every plane ray?"""

    exists: bool
    witness_residual: float


@dataclass
class ExistenceReport:
    cones: list[ConeSolution]
    family: ConeFamily | None
    periodic: bool
    necessary_screen: ScreenResult
    notes: str

    def to_json(self) -> dict:
        return {
            "cones": [c.to_json() for c in self.cones],
            "family": self.family.to_json() if self.family is not None else None,
            "periodic": self.periodic,
            "necessary_screen": self.necessary_screen.value,
            "notes": self.notes,
        }


def _check_pair(system: PwlSystem, tau_minus: float, tau_plus: float) -> tuple[float, float]:
    thm = tau_hat(system.minus.eigen.gamma).tau
    thp = tau_hat(system.plus.eigen.gamma).tau
    if not 0.0 < tau_minus < thm:
        raise DomainError(f"tau_minus={tau_minus!r} outside (0, {thm!r})")
    if not 0.0 < tau_plus < thp:
        raise DomainError(f"tau_plus={tau_plus!r} outside (0, {thp!r})")
    return thm, thp


def return_log_ratio(system: PwlSystem, tau_minus: float, tau_plus: float) -> float:
    """log of the radial factor accumulated over one full revolution
    (minus passage then plus passage); zero exactly at radial closure."""
    em, ep = system.minus.eigen, system.plus.eigen
    return (
        log_g(em.gamma, tau_minus)
        + log_g(ep.gamma, tau_plus)
        + ep.lam * tau_plus / ep.beta
        + em.lam * tau_minus / em.beta
    )


def matching_residuals(system: PwlSystem, tau_minus: float, tau_plus: float):
    """Residuals of the cone conditions at a phase pair.

    Returns ``(ra, rb, rc)``: plus-exit minus minus-entry slope, plus-entry
    minus minus-exit slope, and the full-revolution radial factor minus one.
    All three vanish together exactly on phase pairs whose cone carries
    periodic orbits.
    """
    _check_pair(system, tau_minus, tau_plus)
    em, ep = system.minus.eigen, system.plus.eigen
    ra = exit_slope(ep, tau_plus) - entry_slope(em, tau_minus)
    rb = entry_slope(ep, tau_plus) - exit_slope(em, tau_minus)
    rc = math.expm1(return_log_ratio(system, tau_minus, tau_plus))
    return ra, rb, rc


def _zero_gammas(system: PwlSystem) -> bool:
    return (
        abs(system.minus.eigen.gamma) <= GAMMA_ZERO_ATOL
        and abs(system.plus.eigen.gamma) <= GAMMA_ZERO_ATOL
    )


def _equal_lams(system: PwlSystem) -> bool:
    lm, lp = system.minus.eigen.lam, system.plus.eigen.lam
    return abs(lp - lm) <= LAM_MATCH_RTOL * max(1.0, abs(lm), abs(lp))


def cone_continuum(system: PwlSystem, n: int = 201) -> ConeFamily:
    """The full cone continuum of a system with both shape ratios zero and
    equal real eigenvalues, sampled at ``n`` phase pairs (odd ``n`` hits the
    half-turn pair exactly)."""
    if not _zero_gammas(system):
        raise NotApplicable("cone continuum requires both shape ratios ~ 0")
    if not _equal_lams(system):
        raise NotApplicable("cone continuum requires equal real eigenvalues")
    em, ep = system.minus.eigen, system.plus.eigen
    dynamics = _classify_rm1(
        math.expm1(em.lam * (1.0 / em.beta + 1.0 / ep.beta) * math.pi), CENTER_TOL
    )
    margin = 1e-3
    tms = np.linspace(margin, 2.0 * math.pi - margin, n)
    cot_half = np.cos(0.5 * tms) / np.sin(0.5 * tms)
    tps = 2.0 * (0.5 * math.pi - np.arctan(-(em.beta / ep.beta) * cot_half))
    pairs = np.column_stack([tms, tps])
    pairs.setflags(write=False)
    return ConeFamily(beta_minus=em.beta, beta_plus=ep.beta, pairs=pairs, dynamics=dynamics)


def one_zone_cone_check(eigen: EigenTriple) -> OneZoneCone:
    """Single-matrix criterion: the zone flow returns every plane-crossing
    ray to itself after a full turn iff the shape ratio vanishes (the real
    eigenvalue equals the spiral's real part).  The witness is the
    x1 displacement factor after one full turn,
    exp(2 pi alpha/beta) (1 - exp(2 pi gamma)) / (beta^2 (1 + gamma^2)),
    which is zero exactly at gamma = 0."""
    g = eigen.gamma
    witness = (
        math.exp(2.0 * math.pi * eigen.alpha / eigen.beta)
        * -math.expm1(2.0 * math.pi * g)
        / (eigen.beta**2 * (1.0 + g * g))
    )
    return OneZoneCone(exists=abs(g) < 1e-9, witness_residual=witness)


def necessary_screen(system: PwlSystem) -> ScreenResult:
    """Sign screen on the real eigenvalues implied by radial closure.

    Case A (both shape ratios zero): the revolution factor reduces to a pure
    exponential in the real eigenvalues, so closure needs lam+ * lam- <= 0.
    Case B (both ratios >= 0, not both zero): the passage growth factors
    both exceed one, so at least one real eigenvalue must be negative.
    Case C is the mirror image.  Mixed-sign ratios admit no screen.
    """
    em, ep = system.minus.eigen, system.plus.eigen
    gm, gp = em.gamma, ep.gamma
    lm, lp = em.lam, ep.lam
    if abs(gm) <= GAMMA_ZERO_ATOL and abs(gp) <= GAMMA_ZERO_ATOL:
        return ScreenResult.PASS if lm * lp <= 0.0 else ScreenResult.FAIL_A
    if gm >= -GAMMA_ZERO_ATOL and gp >= -GAMMA_ZERO_ATOL:
        return ScreenResult.PASS if min(lm, lp) < 0.0 else ScreenResult.FAIL_B
    if gm <= GAMMA_ZERO_ATOL and gp <= GAMMA_ZERO_ATOL:
        return ScreenResult.PASS if max(lm, lp) > 0.0 else ScreenResult.FAIL_C
    return ScreenResult.NOT_APPLICABLE


def _classify_rm1(rm1: float, center_tol: float) -> ConeDynamics:
    if abs(rm1) < center_tol:
        return ConeDynamics.CENTER
    return ConeDynamics.STABLE_FOCUS if rm1 < 0.0 else ConeDynamics.UNSTABLE_FOCUS


def classify_dynamics(
    system: PwlSystem, cone: ConeSolution, center_tol: float = CENTER_TOL
) -> ConeDynamics:
    """Radial dynamics on a cone: center / stable focus / unstable focus.

    Generic cones use the full-revolution radial factor at the cone's phase
    pair.  The trivial cone reduces to the sign of alpha+/beta+ +
    alpha-/beta-, and zero-shape-ratio systems to the sign of the shared
    real eigenvalue; both reductions are algebraically the same factor.
    """
    em, ep = system.minus.eigen, system.plus.eigen
    if cone.kind is ConeKind.TRIVIAL:
        s = em.alpha / em.beta + ep.alpha / ep.beta
        rm1 = math.expm1(math.pi * s)
    elif _zero_gammas(system):
        rm1 = math.expm1(em.lam * (cone.tau_minus / em.beta + cone.tau_plus / ep.beta))
    else:
        rm1 = math.expm1(return_log_ratio(system, cone.tau_minus, cone.tau_plus))
    return _classify_rm1(rm1, center_tol)


def _slope_scale(system: PwlSystem) -> float:
    em, ep = system.minus.eigen, system.plus.eigen
    return max(
        1.0,
        abs(em.lam) + em.beta * (1.0 + em.gamma**2),
        abs(ep.lam) + ep.beta * (1.0 + ep.gamma**2),
    )


def _newton_refine(system, tm, tp, bounds, target):
    em, ep = system.minus.eigen, system.plus.eigen
    (lo_m, hi_m, lo_p, hi_p) = bounds

    def res(a, b):
        return np.array(
            [
                exit_slope(ep, b) - entry_slope(em, a),
                entry_slope(ep, b) - exit_slope(em, a),
            ]
        )

    f = res(tm, tp)
    smin_ratio = math.inf
    for _ in range(_NEWTON_ITERS):
        if not np.all(np.isfinite(f)):
            break
        jac = np.array(
            [
                [-entry_slope_deriv(em, tm), exit_slope_deriv(ep, tp)],
                [-exit_slope_deriv(em, tm), entry_slope_deriv(ep, tp)],
            ]
        )
        if not np.all(np.isfinite(jac)):
            break
        svals = np.linalg.svd(jac, compute_uv=False)
        if svals[0] > 0.0:
            smin_ratio = float(svals[1] / svals[0])
        try:
            step = np.linalg.solve(jac, f)
        except np.linalg.LinAlgError:
            break
        size = float(np.max(np.abs(f)))
        scale = 1.0
        moved = False
        for _ in range(_MAX_HALVINGS):
            cm = tm - scale * step[0]
            cp = tp - scale * step[1]
            if lo_m < cm < hi_m and lo_p < cp < hi_p:
                fc = res(cm, cp)
                if float(np.max(np.abs(fc))) < size:
                    tm, tp, f = cm, cp, fc
                    moved = True
                    break
            scale *= 0.5
        if not moved:
            break
        if float(np.max(np.abs(f))) < target * 1e-3:
            break
    return tm, tp, float(np.max(np.abs(f))), smin_ratio


def solve_invariant_cones(
    system: PwlSystem,
    *,
    grid: int = GRID_DEFAULT,
    residual_target: float = RESIDUAL_TARGET,
    center_tol: float = CENTER_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> ConeFindings:
    """Locate all invariant cones of the two-zone system.

    Isolated cones come from a sign-structure scan of the two slope-matching
    residuals on a ``grid`` x ``grid`` lattice over the open phase rectangle,
    with damped Newton refinement from every candidate cell and deduplication
    of converged roots.  When both shape ratios vanish with equal real
    eigenvalues the matching residuals are negatives of each other, the root
    set is a curve, and the solver reports it as a :class:`ConeFamily`
    instead of isolated points.  A trivial cone (the shared focus plane) is
    appended whenever the real eigenvalues agree.  Results are sorted by
    phase pair, so the outcome does not depend on scan order.
    """
    em, ep = system.minus.eigen, system.plus.eigen
    thm = tau_hat(em.gamma).tau
    thp = tau_hat(ep.gamma).tau
    equal_lams = _equal_lams(system)
    findings = ConeFindings(cones=[])

    if _zero_gammas(system) and equal_lams:
        findings.family = cone_continuum(system)
    else:
        ins_m, ins_p = _GRID_INSET * thm, _GRID_INSET * thp
        tms = np.linspace(ins_m, thm - ins_m, grid)
        tps = np.linspace(ins_p, thp - ins_p, grid)
        u0 = entry_slope(em, tms)
        u1 = exit_slope(em, tms)
        v1 = entry_slope(ep, tps)
        v2 = exit_slope(ep, tps)
        ra = v2[None, :] - u0[:, None]
        rb = v1[None, :] - u1[:, None]
        sa, sb = np.sign(ra), np.sign(rb)

        def mixed(s):
            ref = s[:-1, :-1]
            return ~((ref == s[1:, :-1]) & (ref == s[:-1, 1:]) & (ref == s[1:, 1:]))

        cells = np.nonzero(mixed(sa) & mixed(sb))
        target = residual_target * _slope_scale(system)
        bounds = (1e-12 * thm, thm * (1.0 - 1e-12), 1e-12 * thp, thp * (1.0 - 1e-12))
        roots: list[tuple[float, float]] = []
        for i, j in zip(*cells):
            tm0 = 0.5 * (tms[i] + tms[i + 1])
            tp0 = 0.5 * (tps[j] + tps[j + 1])
            tm, tp, resid, smin_ratio = _newton_refine(system, tm0, tp0, bounds, target)
            if resid > target:
                continue
            if equal_lams and max(abs(tm - math.pi), abs(tp - math.pi)) < DEDUPE_TOL:
                continue  # re-added below as the trivial cone
            if any(abs(tm - a) < DEDUPE_TOL and abs(tp - b) < DEDUPE_TOL for a, b in roots):
                continue
            roots.append((tm, tp))
            if smin_ratio < degeneracy_tol:
                findings.degenerate_pairs.append((tm, tp))
                continue
            rm1 = math.expm1(return_log_ratio(system, tm, tp))
            findings.cones.append(
                ConeSolution(
                    tau_minus=float(tm),
                    tau_plus=float(tp),
                    u0=float(entry_slope(em, tm)),
                    u1=float(exit_slope(em, tm)),
                    return_ratio=1.0 + rm1,
                    kind=ConeKind.NON_TRIVIAL,
                    dynamics=_classify_rm1(rm1, center_tol),
                )
            )

    if equal_lams:
        s = em.alpha / em.beta + ep.alpha / ep.beta
        rm1 = math.expm1(math.pi * s)
        findings.cones.append(
            ConeSolution(
                tau_minus=math.pi,
                tau_plus=math.pi,
                u0=em.lam,
                u1=em.lam,
                return_ratio=1.0 + rm1,
                kind=ConeKind.TRIVIAL,
                dynamics=_classify_rm1(rm1, center_tol),
            )
        )

    findings.cones.sort(key=lambda c: (c.tau_minus, c.tau_plus))
    return findings


def _dlog_g(gamma: float, tau: float) -> float:
    # d(log g)/d(tau) through the scaled kernel (overflow-free):
    # (1+g^2) sin(tau) [1/phi_scaled(-g) - 1/phi_scaled(g)] + 2g
    s = (1.0 + gamma * gamma) * math.sin(tau)
    return (
        s / phi_scaled(-gamma, tau) - s / phi_scaled(gamma, tau) + 2.0 * gamma
    )


def slope_map_multiplier(system: PwlSystem, tau_minus: float, tau_plus: float) -> float:
    """Derivative of the composite slope-transition map at a cone's ray:
    (exit'/entry')(tau_minus) * (exit'/entry')(tau_plus).

    This measures how strongly the cone attracts or repels neighboring rays
    transversally.  When |multiplier| is large, geometric closure shot from a
    double-rounded start ray degrades to about eps * |multiplier| no matter
    how exact the cone itself is; callers validating closure numerically
    should budget for that.
    """
    _check_pair(system, tau_minus, tau_plus)
    em, ep = system.minus.eigen, system.plus.eigen
    s_minus = exit_slope_deriv(em, tau_minus) / entry_slope_deriv(em, tau_minus)
    s_plus = exit_slope_deriv(ep, tau_plus) / entry_slope_deriv(ep, tau_plus)
    return float(s_minus * s_plus)


def analyze_system(
    system: PwlSystem,
    *,
    grid: int = GRID_DEFAULT,
    residual_target: float = RESIDUAL_TARGET,
    center_tol: float = CENTER_TOL,
    degeneracy_tol: float = DEGENERACY_TOL,
) -> ExistenceReport:
    """Full existence analysis: solve for cones, classify, screen, annotate."""
    findings = solve_invariant_cones(
        system,
        grid=grid,
        residual_target=residual_target,
        center_tol=center_tol,
        degeneracy_tol=degeneracy_tol,
    )
    em, ep = system.minus.eigen, system.plus.eigen
    screen = necessary_screen(system)
    periodic = any(c.dynamics is ConeDynamics.CENTER for c in findings.cones) or (
        findings.family is not None and findings.family.dynamics is ConeDynamics.CENTER
    )

    lines = [f"necessary screen: {screen.value}"]
    if findings.family is not None:
        lines.append(
            "cone continuum: cot(tau_minus/2)/cot(tau_plus/2) = "
            f"-{ep.beta / em.beta:.6g} on (0, 2*pi)^2 plus the half-turn pair; "
            f"dynamics {findings.family.dynamics.value}"
        )
    for cone in findings.cones:
        rm1 = cone.return_ratio - 1.0
        # first-order sensitivity of the log radial factor to the phase pair,
        # at the solver's residual floor, so borderline centers can be judged
        grad = math.hypot(
            _dlog_g(em.gamma, cone.tau_minus) + em.lam / em.beta,
            _dlog_g(ep.gamma, cone.tau_plus) + ep.lam / ep.beta,
        )
        sens = grad * residual_target * _slope_scale(system)
        mult = slope_map_multiplier(system, cone.tau_minus, cone.tau_plus)
        lines.append(
            f"{cone.kind.value} cone at ({cone.tau_minus:.9g}, {cone.tau_plus:.9g}): "
            f"return ratio - 1 = {rm1:.3e} (sensitivity ~ {sens:.1e}), "
            f"transverse multiplier {mult:.3e}, dynamics {cone.dynamics.value}"
        )
    for label, eig in (("minus", em), ("plus", ep)):
        check = one_zone_cone_check(eig)
        if check.exists:
            lines.append(
                f"{label} zone flow alone returns every plane ray after a full "
                "turn (its shape ratio vanishes)"
            )
    for tm, tp in findings.degenerate_pairs:
        lines.append(
            f"degenerate matching root near ({tm:.6g}, {tp:.6g}): "
            "possible continuum, not reported as an isolated cone"
        )
    return ExistenceReport(
        cones=findings.cones,
        family=findings.family,
        periodic=periodic,
        necessary_screen=screen,
        notes="\n".join(lines),
    )
