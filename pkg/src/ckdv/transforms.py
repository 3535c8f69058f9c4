"""Dispersion-matrix diagonalization, variable changes, and scalings.

Three families of coordinate changes live here:

  * eigen-decomposition of a 2x2 third-derivative coupling matrix,
    with the explicit eigenvector convention whose first row is all
    ones when the (1,2) entry is nonzero;
  * the two-speed mixing map that decouples the cross-dispersion
    system into components riding on stretched coordinates
    alpha^(1/3) * x, together with its inverse;
  * the amplitude/space/time rescaling u -> lam^2 u(lam x, lam^3 t)
    applied to whole trajectories.

Rescaled spatial evaluation is exact trigonometric interpolation, so
the input data must decay near the box boundary for the periodic
surrogate to be faithful; a DecayViolationWarning is emitted when it
does not.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import grid as sg
from .grid import SpectralField
from .systems import GearGrimshaw, GeneralCoupled, Sakovich, State


class SingularTransform(ValueError):
    """A requested change of variables divides by a vanishing eigenvalue."""


class NotApplicable(ValueError):
    """The operation's structural precondition does not hold for this input."""


class DecayViolationWarning(UserWarning):
    """Data does not decay at the box boundary; rescaled evaluation is suspect."""


_TIE = 1e-12


@dataclass(frozen=True)
class Diagonalization:
    """Eigen-structure of a 2x2 real matrix A with T_inv @ A @ T diagonal.

    alpha_plus >= alpha_minus (ties within 1e-12 treated as equal);
    lam is the gap alpha_plus - alpha_minus.  T, T_inv are None when
    the eigenvalues are complex or the matrix is defective.
    """

    alpha_plus: float
    alpha_minus: float
    lam: float
    T: Optional[np.ndarray]
    T_inv: Optional[np.ndarray]
    eigenvalues_real: bool
    eigenvalues_distinct: bool
    nonzero: bool
    opposite: bool


def diagonalize(A) -> Diagonalization:
    A = np.asarray(A, dtype=np.float64)
    if A.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    tr = A[0, 0] + A[1, 1]
    det = A[0, 0] * A[1, 1] - A[0, 1] * A[1, 0]
    disc = 0.25 * tr * tr - det
    if disc < 0.0:
        nan = float("nan")
        return Diagonalization(nan, nan, nan, None, None, False, False, False, False)
    root = math.sqrt(disc)
    ap = 0.5 * tr + root
    am = 0.5 * tr - root
    gap = ap - am
    scale = max(1.0, float(np.abs(A).max()))
    distinct = gap > _TIE
    T: Optional[np.ndarray]
    if distinct:
        if A[0, 1] != 0.0:
            # first row all ones, second row solves the eigenvector relation
            T = np.array([[1.0, 1.0], [(ap - A[0, 0]) / A[0, 1], (am - A[0, 0]) / A[0, 1]]])
        elif A[1, 0] != 0.0:
            T = np.array([[(ap - A[1, 1]) / A[1, 0], (am - A[1, 1]) / A[1, 0]], [1.0, 1.0]])
        elif A[0, 0] >= A[1, 1]:
            T = np.eye(2)
        else:
            T = np.array([[0.0, 1.0], [1.0, 0.0]])
        T_inv = np.linalg.inv(T)
    elif float(np.abs(A - ap * np.eye(2)).max()) <= _TIE * scale:
        T = np.eye(2)
        T_inv = np.eye(2)
    else:
        # defective (Jordan block): no eigenbasis exists
        T = None
        T_inv = None
    nonzero = min(abs(ap), abs(am)) > _TIE * scale
    opposite = abs(ap + am) < _TIE
    return Diagonalization(ap, am, gap, T, T_inv, True, distinct, nonzero, opposite)


def gg_lambda_alpha(b1: float, b2: float, a3: float) -> tuple[float, float, float]:
    """Gap and eigenvalues of the cross-dispersion matrix, in closed form.

    For the matrix [[1, a3], [b2*a3/b1, 1/b1]] (b1, b2 > 0) the
    eigenvalues are alpha_pm = (1 + 1/b1 +- lam)/2 with
    lam = sqrt((1 - 1/b1)^2 + 4*b2*a3^2/b1).
    """
    if not (b1 > 0.0 and b2 > 0.0):
        raise ValueError("requires b1 > 0 and b2 > 0")
    lam = math.sqrt((1.0 - 1.0 / b1) ** 2 + 4.0 * b2 * a3 * a3 / b1)
    ap = 0.5 * (1.0 + 1.0 / b1 + lam)
    am = 0.5 * (1.0 + 1.0 / b1 - lam)
    return lam, ap, am


def gg_dispersion_matrix(b1: float, b2: float, a3: float) -> np.ndarray:
    """Third-derivative coupling matrix after dividing the second equation by b1."""
    if not (b1 > 0.0 and b2 > 0.0):
        raise ValueError("requires b1 > 0 and b2 > 0")
    return np.array([[1.0, a3], [b2 * a3 / b1, 1.0 / b1]])


def gear_grimshaw_as_general(spec: GearGrimshaw) -> GeneralCoupled:
    """Rewrite the two-parameter internal-wave system in the general matrix form.

    The second equation is divided through by b1 so both equations read
    u_t + (matrix) u_xxx + (quadratics) = 0.
    """
    b1, b2 = spec.b1, spec.b2
    return GeneralCoupled(
        a11=1.0, a12=spec.a3, a21=b2 * spec.a3 / b1, a22=1.0 / b1,
        b1=spec.a2, b2=1.0, b3=spec.a1,
        b4=b2 * spec.a1 / b1, b5=b2 * spec.a2 / b1, b6=1.0 / b1,
        r=spec.r / b1,
    )


# ---------------------------------------------------------------------------
# Two-speed mixing map and its inverse.


def _mixing_constants(params) -> tuple[float, float, float, float]:
    """Return (a3, lam, alpha_plus, alpha_minus) for the mixing map."""
    if isinstance(params, GearGrimshaw):
        b1, b2, a3 = params.b1, params.b2, params.a3
    else:
        b1, b2, a3 = params
    if a3 == 0.0:
        raise NotApplicable("a3 = 0: the system is already decoupled, no mixing map")
    lam, ap, am = gg_lambda_alpha(b1, b2, a3)
    if min(abs(ap), abs(am)) < _TIE:
        raise SingularTransform(
            f"zero dispersion eigenvalue (alpha_+ = {ap}, alpha_- = {am}); "
            "the stretched coordinate x / alpha^(1/3) is undefined"
        )
    return a3, lam, ap, am


def _warn_on_boundary_mass(field: SpectralField, label: str) -> None:
    vals = field.values()
    peak = float(np.abs(vals).max())
    if peak == 0.0:
        return
    m = max(1, field.grid.n // 16)
    edge = max(float(np.abs(vals[:m]).max()), float(np.abs(vals[-m:]).max()))
    if edge > 1e-12 * peak:
        warnings.warn(
            f"{label} does not decay at the box boundary "
            f"(edge/peak = {edge / peak:.2e} > 1e-12); rescaled evaluation wraps",
            DecayViolationWarning,
            stacklevel=3,
        )


def gg_change_of_variables(
    u0: SpectralField, v0: SpectralField, params
) -> tuple[SpectralField, SpectralField]:
    """Forward mixing map onto the decoupled components.

    u~(x) = ((1 - alpha_-)/lam) u(alpha_+^(1/3) x) + (a3/lam) v(alpha_+^(1/3) x)
    v~(x) = ((alpha_+ - 1)/lam) u(alpha_-^(1/3) x) - (a3/lam) v(alpha_-^(1/3) x)

    Negative alpha uses the real cube root, so the argument reflects.
    """
    a3, lam, ap, am = _mixing_constants(params)
    g = u0.grid
    if not g.compatible(v0.grid):
        raise ValueError("u0 and v0 must share a grid")
    _warn_on_boundary_mass(u0, "u0")
    _warn_on_boundary_mass(v0, "v0")
    xp = float(np.cbrt(ap)) * g.x
    xm = float(np.cbrt(am)) * g.x
    ut = ((1.0 - am) / lam) * sg.evaluate_at(u0, xp) + (a3 / lam) * sg.evaluate_at(v0, xp)
    vt = ((ap - 1.0) / lam) * sg.evaluate_at(u0, xm) - (a3 / lam) * sg.evaluate_at(v0, xm)
    return sg.forward(ut, g), sg.forward(vt, g)


def gg_change_of_variables_inverse(
    ut: SpectralField, vt: SpectralField, params
) -> tuple[SpectralField, SpectralField]:
    """Inverse of the mixing map.

    u(x) = u~(x / alpha_+^(1/3)) + v~(x / alpha_-^(1/3))
    v(x) = ((alpha_+ - 1)/a3) u~(x / alpha_+^(1/3))
         - ((1 - alpha_-)/a3) v~(x / alpha_-^(1/3))
    """
    a3, lam, ap, am = _mixing_constants(params)
    g = ut.grid
    if not g.compatible(vt.grid):
        raise ValueError("ut and vt must share a grid")
    _warn_on_boundary_mass(ut, "ut")
    _warn_on_boundary_mass(vt, "vt")
    xp = g.x / float(np.cbrt(ap))
    xm = g.x / float(np.cbrt(am))
    up = sg.evaluate_at(ut, xp)
    vm = sg.evaluate_at(vt, xm)
    u = up + vm
    v = ((ap - 1.0) / a3) * up - ((1.0 - am) / a3) * vm
    return sg.forward(u, g), sg.forward(v, g)


# ---------------------------------------------------------------------------
# Amplitude/space/time rescaling of trajectories.


def _lagrange_coeffs(nodes: np.ndarray, t: float) -> np.ndarray:
    w = np.ones(len(nodes))
    for i in range(len(nodes)):
        for j in range(len(nodes)):
            if j != i:
                w[i] *= (t - nodes[j]) / (nodes[i] - nodes[j])
    return w


def _interp_state(states: Sequence[State], src_times: np.ndarray, tau: float) -> tuple[np.ndarray, np.ndarray]:
    """Coefficient arrays of (u, v) at time tau, by polynomial interpolation."""
    tol = 1e-12 * (1.0 + abs(tau))
    j = int(np.searchsorted(src_times, tau))
    for cand in (j - 1, j):
        if 0 <= cand < len(states) and abs(src_times[cand] - tau) <= tol:
            st = states[cand]
            return st.u.coeffs, st.v.coeffs
    if tau < src_times[0] - tol or tau > src_times[-1] + tol:
        raise ValueError(
            f"source trajectory [{src_times[0]}, {src_times[-1]}] does not cover t = {tau}"
        )
    k = min(4, len(states))
    if k < 2:
        raise ValueError("cannot interpolate inside a single-state trajectory")
    i0 = int(np.clip(j - k // 2, 0, len(states) - k))
    w = _lagrange_coeffs(src_times[i0 : i0 + k], tau)
    uc = sum(w[i] * states[i0 + i].u.coeffs for i in range(k))
    vc = sum(w[i] * states[i0 + i].v.coeffs for i in range(k))
    return uc, vc


def scaling_map(traj, lam: float, times=None, out_grid=None):
    """Rescale a trajectory by u -> lam^2 u(lam x, lam^3 t).

    The output lives on a box of length period/lam (so that scaled
    solutions remain periodic) at times t = t_src / lam^3 by default.
    Spatial values come from exact trigonometric interpolation; time
    values from 4-point polynomial interpolation on the stored cadence
    (exact when the query hits a stored sample).
    """
    if not (lam > 0.0):
        raise ValueError("scaling factor must be positive")
    has_spec = hasattr(traj, "states")
    states: Sequence[State] = list(traj.states) if has_spec else list(traj)
    if not states:
        raise ValueError("empty trajectory")
    src_times = np.array([st.t for st in states], dtype=np.float64)
    g = states[0].u.grid
    if out_grid is None:
        out_grid = sg.make_grid(g.n, g.period / lam, g.dealias_fraction)
    if times is None:
        times = src_times / lam**3
    lam2 = lam * lam
    pts = lam * out_grid.x
    out_states = []
    for t in np.asarray(times, dtype=np.float64):
        uc, vc = _interp_state(states, src_times, lam**3 * float(t))
        u_src = SpectralField(uc, g)
        v_src = SpectralField(vc, g)
        u_vals = lam2 * sg.evaluate_at(u_src, pts)
        v_vals = lam2 * sg.evaluate_at(v_src, pts)
        out_states.append(
            State(sg.forward(u_vals, out_grid), sg.forward(v_vals, out_grid), float(t))
        )
    if has_spec:
        return type(traj)(states=out_states, spec=traj.spec)
    return out_states


# ---------------------------------------------------------------------------
# Reduction of the six-matrix system to diagonal-dispersion form.


@dataclass(frozen=True, eq=False)
class ReducedSystem:
    """Diagonal-dispersion image of a U_xxx + A0(..) + A1(..) + A2 U_t = 0 system.

    In V = P_inv @ U variables the system reads
        V_t + diag(dispersion) V_xxx + N0 (v_u v_u_x, v_v v_v_x)^T
            + N1 (v_u v_v_x, v_v v_u_x)^T = 0
    where (v_u, v_v) abbreviates P-mixed components; quad_tensor()
    expands the nonlinearity into per-equation coefficients of
    v_j d_x v_k.
    """

    dispersion: tuple[float, float]
    N0: np.ndarray
    N1: np.ndarray
    P: np.ndarray
    P_inv: np.ndarray

    def quad_tensor(self) -> np.ndarray:
        """quad[i, j, k] multiplies v_j * d_x v_k in equation i (left-hand side)."""
        P = self.P
        quad = np.zeros((2, 2, 2))
        for i in range(2):
            for j in range(2):
                for k in range(2):
                    quad[i, j, k] = (
                        self.N0[i, 0] * P[0, j] * P[0, k]
                        + self.N0[i, 1] * P[1, j] * P[1, k]
                        + self.N1[i, 0] * P[0, j] * P[1, k]
                        + self.N1[i, 1] * P[1, j] * P[0, k]
                    )
        return quad

    def as_general_coupled(self) -> GeneralCoupled:
        """Express as the general matrix form; needs symmetric mixed terms."""
        q = self.quad_tensor()
        defect = max(abs(q[0, 0, 1] - q[0, 1, 0]), abs(q[1, 0, 1] - q[1, 1, 0]))
        scale = max(1.0, float(np.abs(q).max()))
        if defect > 1e-10 * scale:
            raise NotApplicable(
                "mixed quadratic terms are not symmetric; the reduced system "
                "is not expressible with (uv)_x-type coefficients"
            )
        a0, a1 = self.dispersion
        return GeneralCoupled(
            a11=a0, a12=0.0, a21=0.0, a22=a1,
            b1=q[0, 0, 1], b2=q[0, 0, 0], b3=q[0, 1, 1],
            b4=q[1, 0, 1], b5=q[1, 0, 0], b6=q[1, 1, 1],
            r=0.0,
        )


def sakovich_reduce(spec: Sakovich) -> tuple[ReducedSystem, np.ndarray]:
    """Diagonalize the time-coupling matrix and transform the nonlinearity.

    Multiplying through by inv(A2) and substituting U = P V, where P
    diagonalizes inv(A2), yields a system whose linear part is two
    independent third-order flows.
    """
    det = float(np.linalg.det(spec.A2))
    if abs(det) < 1e-14:
        raise SingularTransform("A2 is singular")
    M = np.linalg.inv(spec.A2)
    d = diagonalize(M)
    if not d.eigenvalues_real:
        raise NotApplicable("inv(A2) has complex eigenvalues")
    if d.T is None:
        raise NotApplicable("inv(A2) is defective (no eigenbasis)")
    P, P_inv = d.T, d.T_inv
    N0 = P_inv @ M @ spec.A0
    N1 = P_inv @ M @ spec.A1
    reduced = ReducedSystem(
        dispersion=(d.alpha_plus, d.alpha_minus), N0=N0, N1=N1, P=P, P_inv=P_inv
    )
    return reduced, P


def reduced_rhs(reduced: ReducedSystem, state: State) -> tuple[SpectralField, SpectralField]:
    """dt-form quadratic right-hand side of a ReducedSystem (dispersion excluded)."""
    g = state.grid
    quad = reduced.quad_tensor()
    w = [state.u.values(), state.v.values()]
    wx = [
        sg.spectral_derivative(state.u, 1).values(),
        sg.spectral_derivative(state.v, 1).values(),
    ]
    out = []
    for i in range(2):
        acc = np.zeros(g.n)
        for j in range(2):
            for k in range(2):
                c = quad[i, j, k]
                if c != 0.0:
                    acc += c * w[j] * wx[k]
        out.append(sg.dealias(sg.forward(-acc, g)))
    return out[0], out[1]


# ---------------------------------------------------------------------------
# Nonlinearity coefficients after diagonalizing a cross-coupled system.


@dataclass(frozen=True)
class OffdiagCoeffs:
    """The six constants of the diagonalized nonlinearity.

    C1(V) V_x = prefactor * [[a v1 + b v2, b v1 + c v2],
                             [d v1 + e v2, e v1 + f v2]] V_x,
    so each transformed equation carries only (v1 v1)_x, (v2 v2)_x and
    (v1 v2)_x terms.  structure_defect records how far the computed
    matrix is from that pattern (identically zero up to rounding).
    """

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float
    prefactor: float
    structure_defect: float


def gg_offdiag_coeffs(spec: GeneralCoupled) -> OffdiagCoeffs:
    if spec.a12 == 0.0:
        raise NotApplicable("a12 = 0: the dispersion matrix is already lower-triangular")
    d = diagonalize(spec.dispersion_matrix)
    if not d.eigenvalues_real:
        raise NotApplicable("dispersion matrix has complex eigenvalues")
    if not d.eigenvalues_distinct:
        raise NotApplicable("dispersion matrix has a repeated eigenvalue")
    T, T_inv = d.T, d.T_inv
    prefactor = spec.a12 / d.lam

    def nonlin(u: float, v: float) -> np.ndarray:
        return np.array(
            [
                [spec.b2 * u + spec.b1 * v, spec.b1 * u + spec.b3 * v],
                [spec.b5 * u + spec.b4 * v, spec.b4 * u + spec.b6 * v],
            ]
        )

    def mixed(v1: float, v2: float) -> np.ndarray:
        u, v = T @ np.array([v1, v2])
        return (T_inv @ nonlin(u, v) @ T) / prefactor

    M1 = mixed(1.0, 0.0)
    M2 = mixed(0.0, 1.0)
    defect = max(abs(M1[0, 1] - M2[0, 0]), abs(M1[1, 1] - M2[1, 0]))
    return OffdiagCoeffs(
        a=float(M1[0, 0]),
        b=float(M2[0, 0]),
        c=float(M2[0, 1]),
        d=float(M1[1, 0]),
        e=float(M2[1, 0]),
        f=float(M2[1, 1]),
        prefactor=float(prefactor),
        structure_defect=float(defect),
    )
