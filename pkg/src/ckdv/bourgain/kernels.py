"""Quadrature verification of the reduced integral kernel bounds.

Each kernel is the one-dimensional reduced form of one convolution
estimate: the claim is always that the kernel value is bounded by a
constant uniformly over its outer variables.  Values are normalized so
the asserted bound reads "<= constant": kernels whose bound carries an
explicit decay factor are multiplied by that factor's reciprocal
denominator before being reported.

Region indicators are implemented exactly as the reduced sets are
defined; since the level-set polynomials are monotone (cubic with
positive-definite derivative) or quadratic, membership decomposes into
finitely many intervals computed from polynomial roots, and each
interval is integrated adaptively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.integrate import quad
from scipy.optimize import brentq


class HypothesisViolation(ValueError):
    """A kernel was requested outside its validity range."""


@dataclass(frozen=True)
class QuadSpec:
    x_max: float = 60.0
    limit: int = 200
    epsabs: float = 1e-11
    epsrel: float = 1e-9

    def refined(self) -> "QuadSpec":
        return QuadSpec(2.0 * self.x_max, 2 * self.limit, 0.1 * self.epsabs, 0.1 * self.epsrel)


def _br(u: float) -> float:
    return 1.0 + abs(u)


def _quad(fn, lo: float, hi: float, q: QuadSpec, pts=()) -> float:
    if hi <= lo:
        return 0.0
    inner = sorted({float(p) for p in pts if lo < p < hi})
    val, _ = quad(fn, lo, hi, limit=q.limit, epsabs=q.epsabs, epsrel=q.epsrel,
                  points=inner or None)
    return val


def _require(cond: bool, constraint: str) -> None:
    if not cond:
        raise HypothesisViolation(f"hypothesis failed: {constraint}")


def _monotone_root(f: Callable[[float], float], guess: float) -> float:
    """Root of a strictly monotone function, bracket expanded from a guess."""
    span = 1.0 + abs(guess)
    lo, hi = guess - span, guess + span
    for _ in range(80):
        if f(lo) * f(hi) <= 0.0:
            return float(brentq(f, lo, hi, xtol=1e-13, rtol=1e-14))
        span *= 2.0
        lo, hi = guess - span, guess + span
    raise RuntimeError("failed to bracket a monotone root")


def _segments(breaks, member, strip=None):
    """Member subintervals between consecutive breakpoints.

    strip = (lo, hi) removes an open interval (an excluded neighborhood)
    by adding its endpoints as breakpoints; membership is decided at
    midpoints.
    """
    pts = sorted(set(float(b) for b in breaks))
    if strip is not None:
        pts = sorted(set(pts) | set(strip))
    segs = []
    for lo, hi in zip(pts[:-1], pts[1:]):
        if hi - lo <= 0.0:
            continue
        if member(0.5 * (lo + hi)):
            segs.append((lo, hi))
    return segs


# --- individual kernels -------------------------------------------------

def _k_level_set(sample, p, q: QuadSpec) -> float:
    a, eta = sample
    if a == 0.0 or eta == 0.0:
        raise HypothesisViolation("hypothesis failed: a != 0 and eta != 0")
    b = p["b"]
    fn = lambda x: (1.0 + abs(a) * abs(x * x - eta * eta)) ** (-2.0 * b)
    val = _quad(fn, -q.x_max, q.x_max, q, pts=(-abs(eta), abs(eta)))
    return val * abs(a) * abs(eta)


def _k_peak_pair(sample, p, q: QuadSpec) -> float:
    a, a_prime = sample
    alpha, beta = p["alpha"], p["beta"]
    lo = min(a, a_prime) - q.x_max
    hi = max(a, a_prime) + q.x_max
    fn = lambda x: (1.0 + abs(x - a_prime)) ** (-alpha) * (1.0 + abs(x - a)) ** (-beta)
    val = _quad(fn, lo, hi, q, pts=(a, a_prime))
    return val * (1.0 + abs(a - a_prime)) ** alpha


def _k_flip_weighted_aux(sample, p, q: QuadSpec) -> float:
    xi, y = sample
    if xi == 0.0:
        return 0.0
    s, b, bp = p["s"], p["b"], p["b_prime"]
    xi3 = abs(xi) ** 3
    pref = (
        abs(xi) ** (3.0 - 4.0 * s)
        * _br(xi**3 * (y + 2.0)) ** (2.0 * bp)
        * _br(xi) ** (2.0 * s)
        * abs(y + 2.0) ** (-2.0 * s)
    )
    peak = math.sqrt(y + 0.75) if y + 0.75 > 0.0 else None
    pts = (-peak, peak) if peak else ()
    fn = lambda x: _br(xi3 * (y + 0.75 - x * x)) ** (-2.0 * b)
    return pref * _quad(fn, -q.x_max, q.x_max, q, pts=pts)


def _k_flip_core(sample, p, q: QuadSpec) -> float:
    xi, y = sample
    if xi == 0.0:
        return 0.0
    b, bp = p["b"], p["b_prime"]
    xi3 = abs(xi) ** 3
    pref = xi3 * (1.0 + xi3 * abs(3.0 * y + 2.0)) ** (2.0 * bp)
    peak = math.sqrt(y + 0.25) if y + 0.25 > 0.0 else None
    pts = (-peak, peak) if peak else ()
    fn = lambda x: (1.0 + xi3 * abs(y + 0.25 - x * x)) ** (-2.0 * b)
    return pref * _quad(fn, -q.x_max, q.x_max, q, pts=pts)


def _k_flip_region_a(sample, p, q: QuadSpec) -> float:
    xi, y = sample
    if xi == 0.0:
        return 0.0
    s, b, bp = p["s"], p["b"], p["b_prime"]
    pref = (
        abs(xi) ** (3.0 - 4.0 * s)
        * _br(xi**3 * (y + 2.0)) ** (2.0 * bp)
        * _br(xi) ** (2.0 * s)
    )
    # membership set: |y + 3/4 - 3 x^2| <= 2|y + 2|  <=>  x^2 in [lo2, hi2]
    m = 2.0 * abs(y + 2.0)
    hi2 = (y + 0.75 + m) / 3.0
    lo2 = (y + 0.75 - m) / 3.0
    if hi2 <= 0.0:
        return 0.0
    hi_x = math.sqrt(hi2)
    fn = lambda x: abs(x * x - 0.25) ** (-2.0 * s) * _br(
        xi**3 * (y + 0.75 - 3.0 * x * x)
    ) ** (-2.0 * b)
    peak = math.sqrt((y + 0.75) / 3.0) if y + 0.75 > 0.0 else None
    pts = [0.5, -0.5] + ([peak, -peak] if peak else [])
    if lo2 <= 0.0:
        return pref * _quad(fn, -hi_x, hi_x, q, pts=pts)
    lo_x = math.sqrt(lo2)
    return pref * (
        _quad(fn, -hi_x, -lo_x, q, pts=pts) + _quad(fn, lo_x, hi_x, q, pts=pts)
    )


def _k_mixed_core(sample, p, q: QuadSpec) -> float:
    xi, z = sample
    if xi == 0.0:
        return 0.0
    b, bp = p["b"], p["b_prime"]
    xi3 = abs(xi) ** 3
    pref = xi3 * (1.0 + xi3 * abs(z + 2.0)) ** (2.0 * bp)
    mu = lambda x: 2.0 * x**3 - 3.0 * x * x + 3.0 * x + z
    root = _monotone_root(mu, -np.cbrt(z / 2.0) if z != 0.0 else 0.0)
    fn = lambda x: (1.0 + xi3 * abs(mu(x))) ** (-2.0 * b)
    return pref * _quad(fn, -q.x_max, q.x_max, q, pts=(root,))


def _k_mixed_region_a1(sample, p, q: QuadSpec) -> float:
    xi, y = sample
    if xi == 0.0:
        return 0.0
    s, b, bp = p["s"], p["b"], p["b_prime"]
    m = 2.0 * abs(y + 2.0)
    if m == 0.0:
        return 0.0
    pref = abs(xi) ** (3.0 - 2.0 * s) * _br(xi**3 * (y + 2.0)) ** (2.0 * bp)
    mu = lambda x: 2.0 * x**3 - 3.0 * x * x + 3.0 * x + y
    x_lo = _monotone_root(lambda x: mu(x) + m, 0.0)
    x_hi = _monotone_root(lambda x: mu(x) - m, 0.0)
    root0 = _monotone_root(mu, 0.0)
    fn = lambda x: abs(x - x * x) ** (-2.0 * s) * _br(xi**3 * mu(x)) ** (-2.0 * b)
    return pref * _quad(fn, x_lo, x_hi, q, pts=(root0, 0.0, 1.0))


def _k_mixed_region_a2(sample, p, q: QuadSpec) -> float:
    xi, y = sample
    if xi == 0.0:
        return 0.0
    s, b, bp = p["s"], p["b"], p["b_prime"]
    m = 2.0 * abs(y)
    if m == 0.0:
        return 0.0
    pref = abs(xi) ** (3.0 - 2.0 * s) * _br(xi**3 * y) ** (2.0 * bp)
    nu = lambda x: y - 3.0 * (x - x * x) - 2.0 * x**3  # strictly decreasing
    x_lo = _monotone_root(lambda x: nu(x) - m, 0.0)
    x_hi = _monotone_root(lambda x: nu(x) + m, 0.0)
    root0 = _monotone_root(nu, 0.0)
    fn = lambda x: abs(x - x * x) ** (-2.0 * s) * _br(xi**3 * nu(x)) ** (-2.0 * b)
    return pref * _quad(fn, x_lo, x_hi, q, pts=(root0, 0.0, 1.0))


def _cubic_level(xi1: float, tau1: float):
    """The monotone level polynomial tau1 + 2 xi^3 - xi1^3 - 3 xi xi1 (xi - xi1).

    Shared by both cubic region kernels; only the modulation magnitude
    that scales the region differs between them.
    """
    return lambda xi: (
        tau1 + 2.0 * xi**3 - xi1**3 - 3.0 * xi * xi1 * (xi - xi1)
    )


def _b_kernel_value(sample, p, q: QuadSpec, m_center: float) -> float:
    """Common evaluator for the two cubic region kernels.

    m_center is tau1 - xi1^3 or tau1 + xi1^3: it sets both the region
    width and the prefactor decay.
    """
    xi1, tau1 = sample
    s, b, bp = p["s"], p["b"], p["b_prime"]
    if abs(xi1) < 1.0:
        return 0.0
    M = abs(m_center)
    if M == 0.0:
        return 0.0
    mu = _cubic_level(xi1, tau1)
    guess = np.cbrt(max(M, 1.0))
    lo = _monotone_root(lambda x: mu(x) + 2.0 * M, -guess)
    hi = _monotone_root(lambda x: mu(x) - 2.0 * M, guess)
    root0 = _monotone_root(mu, 0.5 * (lo + hi))

    def fn(xi):
        base = (
            abs(xi) ** (2.0 * (1.0 + s))
            * abs(xi * xi1 * (xi - xi1)) ** (-2.0 * s)
            * _br(xi) ** (2.0 * s)
        )
        return base * _br(mu(xi)) ** (2.0 * bp)

    member = lambda x: abs(mu(x)) <= 2.0 * M * (1.0 + 1e-12) and abs(x - xi1) >= 1.0
    breaks = [lo, hi] + [p for p in (root0, 0.0) if lo < p < hi]
    total = 0.0
    for a, bnd in _segments(breaks, member, strip=(xi1 - 1.0, xi1 + 1.0)):
        total += _quad(fn, a, bnd, q, pts=(root0, 0.0))
    return _br(m_center) ** (-b) * math.sqrt(max(total, 0.0))


def _k_flip_region_b(sample, p, q: QuadSpec) -> float:
    xi1, tau1 = sample
    return _b_kernel_value(sample, p, q, m_center=tau1 - xi1**3)


def _k_mixed_region_b1(sample, p, q: QuadSpec) -> float:
    xi1, tau1 = sample
    return _b_kernel_value(sample, p, q, m_center=tau1 + xi1**3)


def _k_mixed_region_b2(sample, p, q: QuadSpec) -> float:
    xi1, tau1 = sample
    s, b, bp = p["s"], p["b"], p["b_prime"]
    if abs(xi1) < 1.0:
        return 0.0
    M = abs(tau1 - xi1**3)
    if M == 0.0:
        return 0.0
    kappa = lambda xi: tau1 + 3.0 * xi * xi1 * (xi - xi1) + xi1**3
    # quadratic levels kappa = +-2M
    c2, c1 = 3.0 * xi1, -3.0 * xi1 * xi1
    roots = []
    for level in (2.0 * M, -2.0 * M):
        disc = c1 * c1 - 4.0 * c2 * (tau1 + xi1**3 - level)
        if disc >= 0.0:
            r = math.sqrt(disc)
            roots.extend([(-c1 - r) / (2.0 * c2), (-c1 + r) / (2.0 * c2)])
    if not roots:
        return 0.0
    breaks = roots + [xi1 / 2.0, 0.0]

    def fn(xi):
        base = (
            abs(xi) ** (2.0 * (1.0 + s))
            * abs(xi * xi1 * (xi - xi1)) ** (-2.0 * s)
            * _br(xi) ** (2.0 * s)
        )
        return base * _br(kappa(xi)) ** (2.0 * bp)

    member = lambda x: abs(kappa(x)) <= 2.0 * M and abs(x - xi1) >= 1.0
    total = 0.0
    for a, bnd in _segments(breaks, member, strip=(xi1 - 1.0, xi1 + 1.0)):
        total += _quad(fn, a, bnd, q, pts=(0.0,))
    return _br(tau1 - xi1**3) ** (-b) * math.sqrt(max(total, 0.0))


# --- hypothesis checkers ------------------------------------------------

def _check_level_set(p):
    _require(p["b"] > 0.5, "b > 1/2")


def _check_peak_pair(p):
    _require(0.0 <= p["alpha"] <= p["beta"], "0 <= alpha <= beta")
    _require(p["beta"] > 1.0, "beta > 1")


def _check_flip_weighted_aux(p):
    _require(-0.75 <= p["s"] <= 0.0, "s in [-3/4, 0]")
    _require(p["b_prime"] <= p["s"] / 3.0 - 0.25, "b' <= s/3 - 1/4")
    _require(p["b"] > 0.5, "b > 1/2")


def _check_flip_core(p):
    _require(p["b_prime"] <= -0.25, "b' <= -1/4")
    _require(p["b"] > 0.5, "b > 1/2")


def _check_flip_region_a(p):
    _require(-0.75 <= p["s"] <= -0.25, "s in [-3/4, -1/4]")
    _require(-0.5 <= p["b_prime"] <= p["s"] / 3.0 - 0.25, "b' in [-1/2, s/3 - 1/4]")
    _require(p["b"] > 0.5, "b > 1/2")


def _check_mixed_core(p):
    _require(p["b_prime"] <= 0.0, "b' <= 0")
    _require(p["b"] > 0.5, "b > 1/2")


def _check_mixed_region_a(p):
    _require(-0.75 <= p["s"] <= -0.5, "s in [-3/4, -1/2]")
    _require(-0.5 <= p["b_prime"] <= p["s"] / 3.0 - 0.25, "b' in [-1/2, s/3 - 1/4]")
    _require(p["b"] > 0.5, "b > 1/2")


def _check_region_b_sharp(p):
    _require(-0.75 < p["s"] <= -0.5, "s in (-3/4, -1/2]")
    _require(-0.5 < p["b_prime"] <= 0.0, "b' in (-1/2, 0]")
    _require(p["b"] > 0.5, "b > 1/2")
    lim = min(-p["s"] - 1.5, p["s"] - 1.0 / 6.0)
    _require(p["b_prime"] - p["b"] <= lim, "b' - b <= min(-s - 3/2, s - 1/6)")


def _check_region_b2(p):
    _require(-0.75 < p["s"] <= -0.5, "s in (-3/4, -1/2]")
    _require(-0.5 < p["b_prime"] <= 0.0, "b' in (-1/2, 0]")
    _require(p["b"] > 0.5, "b > 1/2")
    lim = min(-p["s"] - 1.5, p["s"] / 3.0 - 0.75)
    _require(p["b_prime"] - p["b"] <= lim, "b' - b <= min(-s - 3/2, s/3 - 3/4)")


# --- default sample grids -----------------------------------------------

def _samples_level_set(p):
    return [(a, eta) for a in (0.5, 1.0, 4.0, 16.0, 64.0) for eta in (0.25, 1.0, 4.0, 16.0)]


def _samples_peak_pair(p):
    return [(0.0, 0.0), (2.0, 0.0), (-5.0, 3.0), (20.0, 0.0), (100.0, -50.0), (0.7, -0.7)]


_XI_SAMPLES = (-8.0, -3.0, -1.0, -0.2, 0.2, 1.0, 3.0, 8.0)
_Y_SAMPLES = (
    -6.0, -3.0, -2.2, -2.0, -1.8, -1.1, -0.85, -0.75, -0.7,
    -0.3, -0.26, -0.24, 0.0, 1.0, 4.0,
)


def _samples_xi_y(p):
    return [(xi, y) for xi in _XI_SAMPLES for y in _Y_SAMPLES]


def _samples_xi_y_origin(p):
    ys = (-4.0, -1.0, -0.5, -0.1, 0.0, 0.1, 0.5, 1.0, 4.0)
    return [(xi, y) for xi in _XI_SAMPLES for y in ys]


def _samples_xi1_tau1(p):
    out = []
    for xi1 in (1.0, 2.0, 4.0, -1.5, -3.0):
        cube = xi1**3
        for center in (cube, -cube, 0.0):
            for d in (0.3, 3.0, 30.0):
                out.append((xi1, center + d))
        out.append((xi1, 5.0))
    return out


@dataclass(frozen=True)
class KernelDef:
    check: Callable
    evaluate: Callable
    default_params: dict
    default_samples: Callable


KERNELS = {
    "level_set": KernelDef(_check_level_set, _k_level_set, {"b": 0.6}, _samples_level_set),
    "peak_pair": KernelDef(
        _check_peak_pair, _k_peak_pair, {"alpha": 2.0, "beta": 2.0}, _samples_peak_pair
    ),
    "flip_weighted_aux": KernelDef(
        _check_flip_weighted_aux, _k_flip_weighted_aux,
        {"s": -0.5, "b": 0.6, "b_prime": -0.5}, _samples_xi_y,
    ),
    "flip_core": KernelDef(
        _check_flip_core, _k_flip_core, {"b": 0.6, "b_prime": -0.3}, _samples_xi_y
    ),
    "flip_region_a": KernelDef(
        _check_flip_region_a, _k_flip_region_a,
        {"s": -0.5, "b": 0.6, "b_prime": -0.45}, _samples_xi_y,
    ),
    "flip_region_b": KernelDef(
        _check_region_b_sharp, _k_flip_region_b,
        {"s": -0.6, "b": 0.7, "b_prime": -0.25}, _samples_xi1_tau1,
    ),
    "mixed_core": KernelDef(
        _check_mixed_core, _k_mixed_core, {"b": 0.6, "b_prime": -0.3}, _samples_xi_y
    ),
    "mixed_region_a1": KernelDef(
        _check_mixed_region_a, _k_mixed_region_a1,
        {"s": -0.6, "b": 0.6, "b_prime": -0.45}, _samples_xi_y,
    ),
    "mixed_region_b1": KernelDef(
        _check_region_b_sharp, _k_mixed_region_b1,
        {"s": -0.6, "b": 0.7, "b_prime": -0.25}, _samples_xi1_tau1,
    ),
    "mixed_region_a2": KernelDef(
        _check_mixed_region_a, _k_mixed_region_a2,
        {"s": -0.6, "b": 0.6, "b_prime": -0.45}, _samples_xi_y_origin,
    ),
    "mixed_region_b2": KernelDef(
        _check_region_b2, _k_mixed_region_b2,
        {"s": -0.6, "b": 0.75, "b_prime": -0.22}, _samples_xi1_tau1,
    ),
}


@dataclass
class KernelReport:
    kernel_id: str
    params: dict
    samples: list
    values: list
    max_base: float
    max_refined: float
    rel_change: float
    stable: bool
    argmax: tuple


def kernel_bound_check(
    kernel_id: str,
    params: Optional[dict] = None,
    sample_grid=None,
    quad_spec: Optional[QuadSpec] = None,
) -> tuple[float, KernelReport]:
    """Max of one kernel over its outer samples, plus a refinement report.

    The second evaluation doubles the truncation radius and tightens the
    adaptive tolerance; stability means the max moved by less than 5%.
    """
    try:
        kd = KERNELS[kernel_id]
    except KeyError:
        raise KeyError(
            f"unknown kernel {kernel_id!r}; choose from {sorted(KERNELS)}"
        ) from None
    p = {**kd.default_params, **(params or {})}
    kd.check(p)
    samples = list(sample_grid) if sample_grid is not None else kd.default_samples(p)
    q = quad_spec or QuadSpec()
    base = [kd.evaluate(smp, p, q) for smp in samples]
    fine = [kd.evaluate(smp, p, q.refined()) for smp in samples]
    max_base = max(base)
    max_fine = max(fine)
    rel = abs(max_fine - max_base) / max(max_base, 1e-300)
    i = int(np.argmax(fine))
    report = KernelReport(
        kernel_id, p, samples, fine, max_base, max_fine, rel, rel < 0.05, samples[i]
    )
    return max_fine, report
