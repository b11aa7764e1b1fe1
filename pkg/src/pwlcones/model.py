"""System representation: spectra, characteristic coefficients, zone matrices.

A two-zone system is stored in the companion shape

    [[delta, -1,  0],
     [m,      0, -1],
     [d,      0,  0]]

per zone, where (delta, m, d) are the coefficients of the characteristic
polynomial  x^3 - delta*x^2 + m*x - d.  Both zones share the second and
third columns by construction, which is exactly the continuity requirement
across the separation plane x1 = 0.  Every zone handled here has one real
eigenvalue ``lam`` and a complex pair ``alpha +/- beta*j`` with beta > 0;
anything else raises :class:`~pwlcones.errors.NotFocusType`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import MalformedInput, NotContinuous, NotFocusType, NotObservable

GAMMA_CONSISTENCY_RTOL = 1e-14
BETA_FLOOR = 1e-12
CONTINUITY_ATOL = 1e-12   # scaled by the pair's max-norm
OBSERVABILITY_RTOL = 1e-12
EIGENVECTOR_RTOL = 1e-10
_CUBIC_NEWTON_STEPS = 6


@dataclass(frozen=True)
class EigenTriple:
    """One zone's spectrum and its derived shape ratio.

    ``gamma = (alpha - lam) / beta`` is the single dimensionless parameter
    all passage formulas depend on.  It is derived automatically; a supplied
    value is cross-checked against the derivation.
    """

    lam: float
    alpha: float
    beta: float
    gamma: float = None  # type: ignore[assignment]

    def __post_init__(self):
        if not self.beta > BETA_FLOOR:
            raise NotFocusType(
                f"imaginary part beta={self.beta!r} must exceed {BETA_FLOOR}"
            )
        derived = (self.alpha - self.lam) / self.beta
        if self.gamma is None:
            object.__setattr__(self, "gamma", derived)
        elif abs(self.gamma - derived) > GAMMA_CONSISTENCY_RTOL * max(1.0, abs(derived)):
            raise ValueError(
                f"stored gamma={self.gamma!r} disagrees with (alpha-lam)/beta={derived!r}"
            )


@dataclass(frozen=True)
class CanonicalCoeffs:
    """Characteristic-polynomial coefficients (delta, m, d) of one zone."""

    delta: float
    m: float
    d: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.delta, self.m, self.d)


def coeffs_from_eigen(eigen: EigenTriple) -> CanonicalCoeffs:
    """Expand the spectrum into characteristic coefficients:
    delta = lam + 2*alpha,  m = 2*lam*alpha + alpha^2 + beta^2,
    d = lam * (alpha^2 + beta^2)."""
    lam, al, be = eigen.lam, eigen.alpha, eigen.beta
    mod2 = al * al + be * be
    return CanonicalCoeffs(
        delta=lam + 2.0 * al,
        m=2.0 * lam * al + mod2,
        d=lam * mod2,
    )


def _coeff_residual(x: np.ndarray, target: np.ndarray) -> float:
    lam, al, be = x
    mod2 = al * al + be * be
    fwd = np.array([lam + 2.0 * al, 2.0 * lam * al + mod2, lam * mod2])
    scale = np.maximum(1.0, np.abs(target))
    return float(np.max(np.abs(fwd - target) / scale))


def eigen_from_coeffs(coeffs: CanonicalCoeffs) -> EigenTriple:
    """Invert the coefficient map: recover (lam, alpha, beta > 0).

    The cubic's roots seed the answer; a damped Newton iteration on the
    three-dimensional coefficient map then polishes the triple until the
    forward residual stops improving.  Cubics with three real roots (the
    discriminant test) fall outside this library's scope.
    """
    dl, m, d = coeffs.delta, coeffs.m, coeffs.d
    # discriminant of x^3 + B x^2 + C x + D with B=-delta, C=m, D=-d;
    # for a real root plus a complex pair it equals -4 beta^2 ((lam-alpha)^2+beta^2)^2 < 0
    B, C, D = -dl, m, -d
    disc = (
        18.0 * B * C * D
        - 4.0 * B**3 * D
        + B * B * C * C
        - 4.0 * C**3
        - 27.0 * D * D
    )
    if disc >= 0.0:
        raise NotFocusType(
            f"characteristic cubic of ({dl!r}, {m!r}, {d!r}) has three real roots"
        )
    roots = np.roots([1.0, -dl, m, -d])
    order = np.argsort(np.abs(roots.imag))
    lam0 = float(roots[order[0]].real)
    al0 = float(roots[order[2]].real)
    be0 = float(abs(roots[order[2]].imag))
    x = np.array([lam0, al0, be0])
    target = np.array([dl, m, d])
    best, best_res = x.copy(), _coeff_residual(x, target)
    for _ in range(_CUBIC_NEWTON_STEPS):
        lam, al, be = x
        mod2 = al * al + be * be
        jac = np.array(
            [
                [1.0, 2.0, 0.0],
                [2.0 * al, 2.0 * lam + 2.0 * al, 2.0 * be],
                [mod2, 2.0 * lam * al, 2.0 * lam * be],
            ]
        )
        fwd = np.array([lam + 2.0 * al, 2.0 * lam * al + mod2, lam * mod2])
        try:
            step = np.linalg.solve(jac, fwd - target)
        except np.linalg.LinAlgError:
            break
        x = x - step
        res = _coeff_residual(x, target)
        if res < best_res:
            best, best_res = x.copy(), res
        else:
            break
    lam, al, be = best
    scale = max(1.0, abs(lam), abs(al))
    if not be > BETA_FLOOR * scale:
        raise NotFocusType(
            f"complex pair of ({dl!r}, {m!r}, {d!r}) degenerates (beta ~ {be!r})"
        )
    return EigenTriple(lam=float(lam), alpha=float(al), beta=float(be))


def companion_matrix(coeffs: CanonicalCoeffs) -> np.ndarray:
    """The zone matrix in companion shape for the given coefficients."""
    out = np.array(
        [
            [coeffs.delta, -1.0, 0.0],
            [coeffs.m, 0.0, -1.0],
            [coeffs.d, 0.0, 0.0],
        ]
    )
    out.setflags(write=False)
    return out


def invariant_line(eigen: EigenTriple) -> np.ndarray:
    """Direction (1, 2*alpha, alpha^2+beta^2) of the zone's one-dimensional
    invariant manifold; an eigenvector of the companion matrix for ``lam``."""
    return np.array([1.0, 2.0 * eigen.alpha, eigen.alpha**2 + eigen.beta**2])


@dataclass(frozen=True)
class FocusPlane:
    """The two-dimensional invariant plane of a zone's complex pair:
    lam^2 * x1 - lam * y + z = 0.  Its normal is a left eigenvector of the
    companion matrix, so normal . (A p) = lam * (normal . p)."""

    lam: float

    @property
    def normal(self) -> np.ndarray:
        return np.array([self.lam * self.lam, -self.lam, 1.0])

    def contains(self, point, atol: float = 1e-10) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(abs(float(self.normal @ p)) <= atol * max(1.0, float(np.linalg.norm(p))))


def focus_plane(eigen: EigenTriple) -> FocusPlane:
    return FocusPlane(lam=eigen.lam)


@dataclass(frozen=True, eq=False)
class ZoneSpec:
    """One zone: coefficients, spectrum, and the companion matrix."""

    coeffs: CanonicalCoeffs
    eigen: EigenTriple
    matrix: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.matrix, dtype=float)
        if a.shape != (3, 3):
            raise ValueError("zone matrix must be 3x3")
        expected = companion_matrix(self.coeffs)
        if not np.array_equal(a, expected):
            raise ValueError("zone matrix deviates from the companion pattern")
        v = invariant_line(self.eigen)
        resid = np.linalg.norm(a @ v - self.eigen.lam * v)
        scale = np.linalg.norm(v) * max(1.0, abs(self.eigen.lam), np.abs(a).max())
        if resid > EIGENVECTOR_RTOL * scale:
            raise ValueError("spectrum does not match the zone matrix")
        obj = a.copy()
        obj.setflags(write=False)
        object.__setattr__(self, "matrix", obj)

    @classmethod
    def from_eigen(cls, eigen: EigenTriple) -> "ZoneSpec":
        coeffs = coeffs_from_eigen(eigen)
        return cls(coeffs=coeffs, eigen=eigen, matrix=companion_matrix(coeffs))

    @classmethod
    def from_coeffs(cls, coeffs: CanonicalCoeffs) -> "ZoneSpec":
        return cls(coeffs=coeffs, eigen=eigen_from_coeffs(coeffs), matrix=companion_matrix(coeffs))


@dataclass(frozen=True, eq=False)
class PwlSystem:
    """The two-zone system: ``minus`` governs x1 < 0, ``plus`` governs x1 >= 0.

    In companion shape the zones share their second and third columns
    automatically; the constructor asserts it anyway since downstream
    continuity arguments lean on it.
    """

    minus: ZoneSpec
    plus: ZoneSpec

    def __post_init__(self):
        if not np.array_equal(self.minus.matrix[:, 1:], self.plus.matrix[:, 1:]):
            raise NotContinuous("zone matrices must share their second and third columns")

    @classmethod
    def from_eigen(cls, minus: EigenTriple, plus: EigenTriple) -> "PwlSystem":
        return cls(minus=ZoneSpec.from_eigen(minus), plus=ZoneSpec.from_eigen(plus))

    @classmethod
    def from_coeffs(cls, minus: CanonicalCoeffs, plus: CanonicalCoeffs) -> "PwlSystem":
        return cls(minus=ZoneSpec.from_coeffs(minus), plus=ZoneSpec.from_coeffs(plus))


def _char_coeffs(a: np.ndarray) -> CanonicalCoeffs:
    tr = float(np.trace(a))
    second = 0.5 * (tr * tr - float(np.trace(a @ a)))
    det = float(np.linalg.det(a))
    return CanonicalCoeffs(delta=tr, m=second, d=det)


def canonicalize(raw_a_plus, raw_a_minus) -> PwlSystem:
    """Bring a raw continuous observable pair into companion shape.

    The change of variables is x -> T x with rows

        T = [e1;  delta*e1 - e1 A;  m*e1 - delta*e1 A + e1 A^2]

    built from the minus-zone matrix (delta, m its characteristic
    coefficients).  T's first row is e1, so the plane x1 = 0 and the sign of
    x1 -- hence the zone assignment -- are preserved exactly.  T is an
    invertible row recombination of the observability matrix
    [e1; e1 A; e1 A^2], so it exists precisely when the pair is observable;
    continuity (shared second and third columns) makes the single T valid
    for both zones, which is verified numerically before returning.
    """
    ap = np.asarray(raw_a_plus, dtype=float)
    am = np.asarray(raw_a_minus, dtype=float)
    if ap.shape != (3, 3) or am.shape != (3, 3):
        raise MalformedInput("zone matrices must be 3x3")
    scale = max(1.0, float(np.abs(ap).max()), float(np.abs(am).max()))
    if np.abs(ap[:, 1:] - am[:, 1:]).max() > CONTINUITY_ATOL * scale:
        raise NotContinuous(
            "raw matrices must share their second and third columns "
            f"(max deviation {np.abs(ap[:, 1:] - am[:, 1:]).max():.3e})"
        )
    e1 = np.array([1.0, 0.0, 0.0])
    obs = np.vstack([e1, am[0, :], (am @ am)[0, :]])
    svals = np.linalg.svd(obs, compute_uv=False)
    if svals[-1] <= OBSERVABILITY_RTOL * svals[0]:
        raise NotObservable("observability matrix of the minus zone is singular")

    cm = _char_coeffs(am)
    cp = _char_coeffs(ap)
    t = np.vstack(
        [
            e1,
            cm.delta * e1 - am[0, :],
            cm.m * e1 - cm.delta * am[0, :] + (am @ am)[0, :],
        ]
    )
    t_inv = np.linalg.inv(t)
    for raw, coeffs in ((am, cm), (ap, cp)):
        resid = np.abs(t @ raw @ t_inv - companion_matrix(coeffs)).max()
        if resid > 1e-6 * max(1.0, abs(coeffs.delta), abs(coeffs.m), abs(coeffs.d)):
            raise NotContinuous(
                f"pair does not admit a shared canonical transform (residual {resid:.3e})"
            )
    return PwlSystem.from_coeffs(minus=cm, plus=cp)


# ---------------------------------------------------------------------------
# JSON system-spec schema
#
#   {"minus": {"delta": ..., "m": ..., "d": ...}, "plus": {...}}
#   {"minus": {"lambda": ..., "alpha": ..., "beta": ...}, "plus": {...}}
#   {"A_minus": [[...], [...], [...]], "A_plus": [[...], [...], [...]]}
#
# Exactly one representation per zone; numbers are IEEE doubles.
# ---------------------------------------------------------------------------

_COEFF_KEYS = {"delta", "m", "d"}
_EIGEN_KEYS = {"lambda", "alpha", "beta"}


def _zone_from_json(obj, label: str) -> ZoneSpec:
    if not isinstance(obj, Mapping):
        raise MalformedInput(f"zone {label!r} must be an object")
    keys = set(obj.keys())
    if keys == _COEFF_KEYS:
        try:
            coeffs = CanonicalCoeffs(
                delta=float(obj["delta"]), m=float(obj["m"]), d=float(obj["d"])
            )
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"zone {label!r}: non-numeric coefficient") from exc
        return ZoneSpec.from_coeffs(coeffs)
    if keys == _EIGEN_KEYS:
        try:
            eigen = EigenTriple(
                lam=float(obj["lambda"]), alpha=float(obj["alpha"]), beta=float(obj["beta"])
            )
        except (TypeError, ValueError) as exc:
            raise MalformedInput(f"zone {label!r}: non-numeric eigenvalue") from exc
        return ZoneSpec.from_eigen(eigen)
    raise MalformedInput(
        f"zone {label!r} must carry exactly the keys {sorted(_COEFF_KEYS)} "
        f"or {sorted(_EIGEN_KEYS)}, got {sorted(keys)}"
    )


def system_from_json(doc) -> PwlSystem:
    """Build a system from a parsed system-spec document."""
    if not isinstance(doc, Mapping):
        raise MalformedInput("system spec must be a JSON object")
    keys = set(doc.keys())
    if keys == {"A_minus", "A_plus"}:
        try:
            am = np.asarray(doc["A_minus"], dtype=float)
            ap = np.asarray(doc["A_plus"], dtype=float)
        except (TypeError, ValueError) as exc:
            raise MalformedInput("raw zone matrices must be numeric 3x3 arrays") from exc
        return canonicalize(ap, am)
    if keys == {"minus", "plus"}:
        return PwlSystem(
            minus=_zone_from_json(doc["minus"], "minus"),
            plus=_zone_from_json(doc["plus"], "plus"),
        )
    raise MalformedInput(
        "system spec must carry exactly the keys {'minus', 'plus'} or "
        f"{{'A_minus', 'A_plus'}}, got {sorted(keys)}"
    )


def system_to_json(system: PwlSystem) -> dict:
    """Serialize in the coefficient representation (exact for the matrices)."""
    return {
        "minus": {
            "delta": system.minus.coeffs.delta,
            "m": system.minus.coeffs.m,
            "d": system.minus.coeffs.d,
        },
        "plus": {
            "delta": system.plus.coeffs.delta,
            "m": system.plus.coeffs.m,
            "d": system.plus.coeffs.d,
        },
    }


def load_system(path) -> PwlSystem:
    """Read and validate a system-spec JSON file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedInput(f"cannot read system spec {path!r}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"system spec {path!r} is not valid JSON: {exc}") from exc
    return system_from_json(doc)
