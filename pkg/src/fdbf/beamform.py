"""Transmit beamformers under a self-interference power constraint.

The design problem: choose a transmit vector w, ||w|| <= 1, maximizing the
downlink rate log2(1 + rho |h_d^H w|^2) subject to the leakage cap
|v^H H w|^2 <= epsilon seen by the uplink combiner v.

Everything reduces to the interplay of two directions: the downlink channel
h_d and the effective leakage direction a = H^H v. Write p for the component
of h_d along a and q = h_d - p for the orthogonal remainder. The optimizer
lives on the one-parameter family

    w(alpha) ∝ h_d - alpha p,      alpha in [0, 1],

which slides from the matched (maximum-ratio) beamformer at alpha = 0 to the
fully nulled (zero-forcing) one at alpha = 1. The closed form picks the
smallest alpha whose leakage meets the cap:

    zeta = (1 - epsilon/||a||^2) |a^H h_d|^2     leakage margin scale
    eta  = |a^H h_d|^2 - epsilon ||h_d||^2       cap violation at alpha = 0

    alpha* = 0                               if eta <= 0 (matched filter feasible)
           = 1 - min(1, sqrt((zeta-eta)/zeta)) otherwise (constraint active)

When eta > 0 the Cauchy-Schwarz inequality forces zeta >= eta > 0, so the
square root is well defined. zeta - eta = epsilon ||q||^2 and
zeta = (||a||^2 - epsilon) ||p||^2 exactly, so the active branch is

    1 - alpha* = min(1, sqrt(epsilon / (||a||^2 - epsilon)) * ||q|| / ||p||),

which is how optimal() evaluates it: the difference zeta - eta cancels
catastrophically when h_d is nearly parallel to a, while the residual norm
||q|| is computed componentwise and stays accurate.

All returned beamformers have unit norm (full available power) except in one
degenerate corner: h_d parallel to a with the cap active, where nulling would
zero the signal entirely and the optimum instead backs off transmit power
along h_d until the leakage meets the cap exactly.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .numerics import PARALLEL_RTOL, as_cmatrix, as_cvector, inner, matvec_adj, norm_sq


class DegenerateParallelError(ValueError):
    """Nulling direction coincides with the signal direction: w(1) = 0."""


@dataclass(frozen=True, eq=False)
class BeamformerSolution:
    """A transmit vector with its audit quantities.

    w: transmit vector; dl_gain: |h_d^H w|^2; norm_w: ||w||;
    alpha: position on the matched-to-nulled family, None for beamformers
    not defined through it; si_power: |v^H H w|^2, None when no leakage
    context applies; degenerate: the nulled direction vanished.
    """

    w: np.ndarray
    dl_gain: float
    norm_w: float
    alpha: Optional[float] = None
    si_power: Optional[float] = None
    degenerate: bool = False


def _leakage_split(h_d, a):
    """Component of h_d along a and the orthogonal remainder.

    Returns (p, q, gram, mag) with p = a (a^H h_d)/||a||^2, q = h_d - p,
    gram = ||a||^2 and mag = |a^H h_d|^2. For a = 0: p = 0, q = h_d.
    """
    gram = norm_sq(a)
    if gram == 0.0:
        p = np.zeros_like(h_d)
        return p, h_d.copy(), 0.0, 0.0
    c = inner(a, h_d)
    p = a * (c / gram)
    q = h_d - p
    return p, q, gram, abs(c) ** 2


def mrt(h_d):
    """Maximum-ratio beamformer h_d / ||h_d||, ignoring any leakage cap."""
    h_d = as_cvector(h_d)
    n = math.sqrt(norm_sq(h_d))
    if n == 0.0:
        raise ValueError("h_d must be nonzero")
    w = h_d / n
    return BeamformerSolution(w=w, dl_gain=abs(inner(h_d, w)) ** 2, norm_w=1.0,
                              alpha=0.0, si_power=None)


def zf(h_d, a):
    """Zero-forcing beamformer: h_d projected off the leakage direction, normalized.

    When h_d is (numerically) parallel to a the projection vanishes and no
    unit-norm nulling vector pointed at the user exists; the returned
    solution is the zero vector flagged degenerate.
    """
    h_d = as_cvector(h_d)
    a = as_cvector(a)
    if a.shape != h_d.shape:
        raise ValueError(f"dimension mismatch: {h_d.shape} vs {a.shape}")
    p, q, gram, _ = _leakage_split(h_d, a)
    qn = math.sqrt(norm_sq(q))
    if qn <= PARALLEL_RTOL * math.sqrt(norm_sq(h_d)):
        return BeamformerSolution(w=np.zeros_like(h_d), dl_gain=0.0, norm_w=0.0,
                                  alpha=1.0, si_power=0.0, degenerate=True)
    w = q / qn
    return BeamformerSolution(w=w, dl_gain=abs(inner(h_d, w)) ** 2, norm_w=1.0,
                              alpha=1.0, si_power=abs(inner(a, w)) ** 2)


def family(alpha, h_d, a):
    """Unit-norm member w(alpha) ∝ h_d - alpha p of the matched-to-nulled family.

    alpha = 0 is the matched beamformer, alpha = 1 the zero-forcing one.
    Raises DegenerateParallelError when the unnormalized vector vanishes
    (only possible at alpha = 1 with h_d parallel to a).
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    h_d = as_cvector(h_d)
    a = as_cvector(a)
    if a.shape != h_d.shape:
        raise ValueError(f"dimension mismatch: {h_d.shape} vs {a.shape}")
    p, _, gram, _ = _leakage_split(h_d, a)
    w_un = h_d - alpha * p
    n = math.sqrt(norm_sq(w_un))
    if n <= PARALLEL_RTOL * math.sqrt(norm_sq(h_d)):
        raise DegenerateParallelError(
            "h_d is parallel to the leakage direction; w(1) has no direction")
    w = w_un / n
    return BeamformerSolution(w=w, dl_gain=abs(inner(h_d, w)) ** 2, norm_w=1.0,
                              alpha=float(alpha), si_power=abs(inner(a, w)) ** 2)


def zeta_eta(h_d, a, epsilon, gram=None):
    """Closed-form decision pair (zeta, eta) for the cap epsilon.

    eta <= 0 means the matched beamformer already meets the cap; otherwise
    the cap is active and alpha* is read off sqrt((zeta-eta)/zeta).
    """
    h_d = np.asarray(h_d)
    a = np.asarray(a)
    if gram is None:
        gram = norm_sq(a)
    if gram == 0.0:
        return 0.0, -epsilon * norm_sq(h_d)
    mag = abs(np.vdot(a, h_d)) ** 2
    zeta = (1.0 - epsilon / gram) * mag
    eta = mag - epsilon * norm_sq(h_d)
    return zeta, eta


def alpha_star(zeta, eta):
    """Optimal family position for a decision pair from zeta_eta."""
    if eta <= 0.0:
        return 0.0
    ratio = (zeta - eta) / zeta
    if ratio <= 0.0:
        return 1.0
    return 1.0 - min(1.0, math.sqrt(ratio))


def optimal(h_d, H, v, epsilon):
    """Closed-form rate-optimal beamformer under ||w|| <= 1 and the leakage cap.

    Single pass: the effective leakage direction a = H^H v and its squared
    norm are computed once and alpha* follows in O(n_t n_r) arithmetic.
    In the parallel degenerate corner (alpha* = 1 with h_d parallel to a)
    the optimum transmits along h_d at reduced power so the leakage sits
    exactly on the cap; everywhere else the returned vector has unit norm.
    """
    if not (epsilon > 0.0 and math.isfinite(epsilon)):
        raise ValueError(f"epsilon must be finite and positive, got {epsilon}")
    h_d = as_cvector(h_d)
    H = as_cmatrix(H)
    v = as_cvector(v)
    hd2 = norm_sq(h_d)
    if hd2 == 0.0:
        raise ValueError("h_d must be nonzero")
    a = matvec_adj(H, v)
    p, q, gram, mag = _leakage_split(h_d, a)
    eta = mag - epsilon * hd2
    if gram == 0.0 or eta <= 0.0 or gram <= epsilon:
        al = 0.0
    else:
        # stable form of 1 - sqrt((zeta-eta)/zeta), see module docstring
        b2 = (epsilon / (gram - epsilon)) * (norm_sq(q) * gram / mag)
        al = 1.0 - min(1.0, math.sqrt(b2))
    try:
        return family(al, h_d, a)
    except DegenerateParallelError:
        u = h_d / math.sqrt(hd2)
        leak = abs(inner(a, u))  # > 0 here, else eta <= 0 would have held
        scale = math.sqrt(epsilon) / leak
        w = scale * u
        return BeamformerSolution(w=w, dl_gain=abs(inner(h_d, w)) ** 2,
                                  norm_w=scale, alpha=al,
                                  si_power=abs(inner(a, w)) ** 2, degenerate=True)


def si_power(w, H, v):
    """Leakage power |v^H H w|^2 reaching the combiner."""
    H = as_cmatrix(H)
    try:
        return abs(inner(matvec_adj(H, v), np.asarray(w, dtype=np.complex128))) ** 2
    except ValueError as exc:
        raise ValueError(f"incompatible shapes for si_power: {exc}") from exc


def dl_rate(w, h_d, rho):
    """Downlink spectral efficiency log2(1 + rho |h_d^H w|^2) in bit/s/Hz."""
    if not (rho >= 0.0 and math.isfinite(rho)):
        raise ValueError(f"rho must be finite and >= 0, got {rho}")
    return math.log2(1.0 + rho * abs(inner(h_d, w)) ** 2)
