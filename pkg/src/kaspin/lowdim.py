"""Normal forms for squares in low-dimensional signatures.

In Lorentzian signature (3,1) every nonzero square under the minus
pairing is alpha = u + (u wedge l) for a parabolic pair: a nonzero null
one-form u and a unit spacelike l orthogonal to it, with l free up to
shifts along u.  This module converts between pairs, polyforms, and the
degenerate flag span(u) < span(u, l) < u-perp, decides the three
equivalence relations on pairs, and fixes the shift gauge against a
timelike direction.

The orthonormal frame convention is e^1..e^3 spacelike with e^4
timelike in (3,1), and e^3, e^4 timelike in (2,2), where squares of
chiral spinors are exactly the self-dual or anti-self-dual two-forms of
zero norm.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .ka_core import (
    FormMetric,
    Multivector,
    Signature,
    contract,
    hodge_star,
    wedge,
)

SIG_LORENTZ = Signature(3, 1)
_H = FormMetric.from_signature(SIG_LORENTZ)
DEFAULT_TOL = 1e-9


def _is_one_form(a: Multivector, tol: float) -> bool:
    return (a - a.grade(1)).norm_inf() <= tol * max(1.0, a.norm_inf())


@dataclass(frozen=True, eq=False)
class ParabolicPair:
    """Null one-form u with a unit spacelike l orthogonal to it."""

    u: Multivector
    l: Multivector

    def __post_init__(self):
        if self.u.sig != SIG_LORENTZ or self.l.sig != SIG_LORENTZ:
            raise ValueError("parabolic pairs live in signature (3,1)")
        tol = DEFAULT_TOL
        if not (_is_one_form(self.u, tol) and _is_one_form(self.l, tol)):
            raise ValueError("pair members must be one-forms")
        scale = max(1.0, self.u.norm_inf(), self.l.norm_inf()) ** 2
        if self.u.norm_inf() <= tol:
            raise ValueError("u must be nonzero")
        if abs(_H.inner(self.u, self.u)) > tol * scale:
            raise ValueError("u must be null")
        if abs(_H.inner(self.l, self.l) - 1.0) > tol * scale:
            raise ValueError("l must have unit norm")
        if abs(_H.inner(self.u, self.l)) > tol * scale:
            raise ValueError("u and l must be orthogonal")

    def to_json(self) -> str:
        payload = {
            "u": list(self.u.one_form_components()),
            "l": list(self.l.one_form_components()),
        }
        return json.dumps(payload, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text):
        payload = json.loads(text) if isinstance(text, str) else text
        return cls(
            Multivector.covector(SIG_LORENTZ, np.asarray(payload["u"], dtype=float)),
            Multivector.covector(SIG_LORENTZ, np.asarray(payload["l"], dtype=float)),
        )


@dataclass(frozen=True, eq=False)
class DegenerateFlag:
    """Nested spans W1 < W2 < W3 on which the metric degenerates."""

    W1: tuple
    W2: tuple
    W3: tuple


def pair_to_polyform(pp: ParabolicPair) -> Multivector:
    """The square u + u /\\ l determined by a parabolic pair."""
    return pp.u + wedge(pp.u, pp.l)


def _reject(reason: str):
    raise ValueError(f"not a spinor square: {reason}")


def polyform_to_pair(alpha: Multivector, tol: float = DEFAULT_TOL) -> ParabolicPair:
    """Split a Lorentzian square into its parabolic pair.

    u is the grade-1 part; l is extracted from the grade-2 part by
    contracting with the basis covector seeing the largest metric
    component of u, then shifted into the gauge h*(l, e^4) = 0.
    """
    if alpha.sig != SIG_LORENTZ:
        raise ValueError("expected a multivector in signature (3,1)")
    scale = max(1.0, alpha.norm_inf())
    u = alpha.grade(1)
    omega = alpha.grade(2)
    if (alpha - u - omega).norm_inf() > tol * scale:
        _reject("components outside grades 1 and 2")
    if u.norm_inf() <= tol * scale:
        _reject("grade-1 part vanishes")
    if abs(_H.inner(u, u)) > tol * scale * scale:
        _reject("grade-1 part is not null")
    if omega.norm_inf() <= tol * scale:
        _reject("grade-2 part vanishes, no unit transverse factor exists")

    r = SIG_LORENTZ.blade_signs()[[1, 2, 4, 8]] * u.one_form_components()
    pivot = int(np.argmax(np.abs(r)))
    theta = Multivector.basis(SIG_LORENTZ, (pivot + 1,))
    l0 = contract(theta, omega) * (1.0 / r[pivot])
    if (wedge(u, l0) - omega).norm_inf() > tol * scale:
        _reject("grade-2 part is not divisible by the grade-1 part")
    if abs(_H.inner(l0, l0) - 1.0) > tol * max(1.0, scale):
        _reject("transverse factor is not of unit norm")

    gauge = normalize_gauge(
        ParabolicPair(u, l0), Multivector.basis(SIG_LORENTZ, (4,)), tol=tol
    )
    return gauge


def pair_equivalent(a: ParabolicPair, b: ParabolicPair, mode: str, tol: float = DEFAULT_TOL) -> bool:
    """Equivalence of pairs: strong (u up to sign), plain (u up to
    scale), or weak (additionally l up to sign), always modulo shifts
    l -> l + c u."""
    if mode not in ("weak", "plain", "strong"):
        raise ValueError(f"unknown equivalence mode {mode!r}")
    ua = a.u.one_form_components()
    ub = b.u.one_form_components()
    pivot = int(np.argmax(np.abs(ua)))
    factor = ub[pivot] / ua[pivot]
    if abs(factor) <= tol or np.max(np.abs(ub - factor * ua)) > tol * max(1.0, np.max(np.abs(ub))):
        return False
    if mode == "strong" and min(abs(factor - 1.0), abs(factor + 1.0)) > tol:
        return False
    etas = (1.0,) if mode in ("strong", "plain") else (1.0, -1.0)
    la = a.l.one_form_components()
    lb = b.l.one_form_components()
    for eta in etas:
        diff = lb - eta * la
        c = diff[pivot] / ua[pivot]
        if np.max(np.abs(diff - c * ua)) <= tol * max(1.0, np.max(np.abs(lb))):
            return True
    return False


def pair_to_flag(pp: ParabolicPair) -> DegenerateFlag:
    """The degenerate flag span(u) < span(u,l) < u-perp of a pair."""
    r = SIG_LORENTZ.blade_signs()[[1, 2, 4, 8]] * pp.u.one_form_components()
    pivot = int(np.argmax(np.abs(r)))
    w3 = []
    for j in range(4):
        if j == pivot:
            continue
        comps = np.zeros(4)
        comps[j] = 1.0
        comps[pivot] = -r[j] / r[pivot]
        w3.append(Multivector.covector(SIG_LORENTZ, comps))
    return DegenerateFlag(W1=(pp.u,), W2=(pp.u, pp.l), W3=tuple(w3))


def normalize_gauge(pp: ParabolicPair, v: Multivector, tol: float = DEFAULT_TOL) -> ParabolicPair:
    """Shift l along u so that it is orthogonal to the timelike unit v."""
    if not _is_one_form(v, tol) or abs(_H.inner(v, v) + 1.0) > tol:
        raise ValueError("gauge direction must be a unit timelike one-form")
    huv = _H.inner(pp.u, v)
    if abs(huv) <= tol:
        raise ValueError("u is orthogonal to the gauge direction; bad input")
    f = -_H.inner(pp.l, v) / huv
    return ParabolicPair(pp.u, pp.l + f * pp.u)


SIG_NEUTRAL = Signature(2, 2)
_H22 = FormMetric.from_signature(SIG_NEUTRAL)


def check_22_chiral_square(alpha: Multivector, tol: float = DEFAULT_TOL) -> bool:
    """Whether alpha is a self-dual two-form of zero norm in (2,2).

    These are exactly the squares of negative-chirality spinors under
    the plus pairing.
    """
    if alpha.sig != SIG_NEUTRAL:
        raise ValueError("expected a multivector in signature (2,2)")
    scale = max(1.0, alpha.norm_inf())
    two = alpha.grade(2)
    if (alpha - two).norm_inf() > tol * scale:
        return False
    if (hodge_star(two) - two).norm_inf() > tol * scale:
        return False
    return abs(_H22.inner(two, two)) <= tol * scale * scale


def random_parabolic_pair(rng) -> ParabolicPair:
    """Sample a pair by rotating a spacelike frame, with u = e_time + n."""
    R, _ = np.linalg.qr(rng.standard_normal((3, 3)))
    l_space, n_space = R[:, 0], R[:, 1]
    u = np.append(n_space, 1.0)
    u *= rng.choice([-1.0, 1.0]) * np.exp(rng.uniform(-1.0, 1.0))
    c = rng.uniform(-1.0, 1.0)
    l = np.append(l_space, 0.0) + c * u
    return ParabolicPair(
        Multivector.covector(SIG_LORENTZ, u), Multivector.covector(SIG_LORENTZ, l)
    )
