"""Time evolution by integrating-factor RK4 and Duhamel fixed-point iteration.

The linear part of every diagonal-dispersion system is solved exactly
in Fourier space (each mode rotates by exp(-i*c*xi^3*t)); the
nonlinearity is advanced by classical RK4 applied to the
integrating-factor variable.  `picard_iterate` solves the same problem
a second, independent way: successive substitution into the integral
equation u(t) = U(t)u0 + int_0^t U(t - t') G(t') dt', with the time
integral done by cumulative Simpson quadrature on a stored time grid.
Agreement between the two routes is a correctness check for both.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy.integrate import cumulative_simpson

from . import bump
from . import grid as sg
from . import systems
from .diagnostics import sobolev_norm
from .grid import Grid, SpectralField
from .systems import NOT_DIAGONAL, BlowupDetected, State, SystemSpec


class NotDiagonalError(ValueError):
    """The system's third-derivative coupling matrix is not diagonal."""


@dataclass(frozen=True)
class StepperConfig:
    dt: float
    scheme: str = "IFRK4"
    cfl_guard: float = 10.0  # max allowed per-step growth of max |u-hat|

    def __post_init__(self):
        if not (self.dt > 0.0):
            raise ValueError("dt must be positive")
        if self.scheme != "IFRK4":
            raise ValueError(f"unknown scheme {self.scheme!r}")
        if not (self.cfl_guard > 1.0):
            raise ValueError("cfl_guard must exceed 1")


@dataclass
class Trajectory:
    states: list[State]
    spec: SystemSpec

    def __post_init__(self):
        if not self.states:
            raise ValueError("trajectory needs at least one state")
        g = self.states[0].grid
        prev = None
        for st in self.states:
            if not st.grid.compatible(g):
                raise ValueError("all states must share one grid")
            if prev is not None and not (st.t > prev):
                raise ValueError("times must be strictly increasing")
            prev = st.t

    @property
    def times(self) -> np.ndarray:
        return np.array([st.t for st in self.states])

    @property
    def grid(self) -> Grid:
        return self.states[0].grid


def _diag_coeffs(spec: SystemSpec) -> tuple[float, float]:
    coeffs = systems.dispersion_coeffs(spec)
    if coeffs is NOT_DIAGONAL:
        raise NotDiagonalError(
            "third-derivative coupling is not diagonal; diagonalize first"
        )
    return coeffs


def _phases(grid: Grid, c: float, dt: float) -> np.ndarray:
    return np.exp((-1j * c * dt) * grid.xi**3)


def linear_propagate(state: State, spec: SystemSpec, dt: float) -> State:
    """Advance the linear flow exactly: each mode gains exp(-i*c*xi^3*dt)."""
    c_u, c_v = _diag_coeffs(spec)
    g = state.grid
    u = SpectralField(state.u.coeffs * _phases(g, c_u, dt), g)
    v = SpectralField(state.v.coeffs * _phases(g, c_v, dt), g)
    return State(u, v, state.t + dt)


def _rhs_coeffs(spec: SystemSpec, uc: np.ndarray, vc: np.ndarray, g: Grid, t: float):
    st = State(SpectralField(uc, g), SpectralField(vc, g), t)
    du, dv = systems.nonlinear_rhs(spec, st)
    return du.coeffs, dv.coeffs


def _ifrk4_step(
    spec: SystemSpec,
    uc: np.ndarray,
    vc: np.ndarray,
    g: Grid,
    t: float,
    dt: float,
    Eu: np.ndarray,
    Ev: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """One RK4 step in the integrating-factor variable; E = half-step phase."""
    Eu2 = Eu * Eu
    Ev2 = Ev * Ev
    ku1, kv1 = _rhs_coeffs(spec, uc, vc, g, t)
    au = Eu * (uc + 0.5 * dt * ku1)
    av = Ev * (vc + 0.5 * dt * kv1)
    ku2, kv2 = _rhs_coeffs(spec, au, av, g, t + 0.5 * dt)
    bu = Eu * uc + 0.5 * dt * ku2
    bv = Ev * vc + 0.5 * dt * kv2
    ku3, kv3 = _rhs_coeffs(spec, bu, bv, g, t + 0.5 * dt)
    cu = Eu2 * uc + dt * Eu * ku3
    cv = Ev2 * vc + dt * Ev * kv3
    ku4, kv4 = _rhs_coeffs(spec, cu, cv, g, t + dt)
    un = Eu2 * uc + (dt / 6.0) * (Eu2 * ku1 + 2.0 * Eu * (ku2 + ku3) + ku4)
    vn = Ev2 * vc + (dt / 6.0) * (Ev2 * kv1 + 2.0 * Ev * (kv2 + kv3) + kv4)
    return un, vn


def step(state: State, spec: SystemSpec, config: StepperConfig) -> State:
    """One IF-RK4 step of size config.dt."""
    c_u, c_v = _diag_coeffs(spec)
    g = state.grid
    dt = config.dt
    Eu = _phases(g, c_u, 0.5 * dt)
    Ev = _phases(g, c_v, 0.5 * dt)
    before = max(np.abs(state.u.coeffs).max(), np.abs(state.v.coeffs).max())
    un, vn = _ifrk4_step(spec, state.u.coeffs, state.v.coeffs, g, state.t, dt, Eu, Ev)
    after = max(np.abs(un).max(), np.abs(vn).max())
    if before > 0.0 and after > config.cfl_guard * before:
        raise BlowupDetected(
            f"per-step growth {after / before:.2e} exceeds cfl_guard", time=state.t
        )
    return State(SpectralField(un, g), SpectralField(vn, g), state.t + dt)


def simulate(
    initial: State,
    spec: SystemSpec,
    T: float,
    config: StepperConfig,
    observers: Iterable[Callable[[State], None]] = (),
    sample_dt: float = 0.01,
) -> Trajectory:
    """Evolve to time initial.t + T, sampling roughly every sample_dt.

    The final time is hit exactly (a short last step if T is not a
    multiple of dt).  Observers are called on each stored snapshot.
    A mode exceeding 1e8 times the initial coefficient maximum aborts
    with BlowupDetected carrying the last completed time.
    """
    if T < 0.0:
        raise ValueError("T must be nonnegative")
    c_u, c_v = _diag_coeffs(spec)
    g = initial.grid
    observers = tuple(observers)

    state0 = State(sg.dealias(initial.u), sg.dealias(initial.v), initial.t)
    stored = [state0.copy()]
    for obs in observers:
        obs(stored[-1])
    if T == 0.0:
        return Trajectory(stored, spec)

    dt = config.dt
    n_full = int(np.floor(T / dt + 1e-9))
    remainder = T - n_full * dt
    if remainder < 1e-12 * max(1.0, T):
        remainder = 0.0
    stride = max(1, int(round(sample_dt / dt)))

    Eu = _phases(g, c_u, 0.5 * dt)
    Ev = _phases(g, c_v, 0.5 * dt)
    m0 = max(np.abs(state0.u.coeffs).max(), np.abs(state0.v.coeffs).max(), 1e-300)
    guard = config.cfl_guard

    uc, vc = state0.u.coeffs.copy(), state0.v.coeffs.copy()
    t0 = state0.t

    def record(uc, vc, t):
        st = State(SpectralField(uc.copy(), g), SpectralField(vc.copy(), g), t)
        stored.append(st)
        for obs in observers:
            obs(st)

    for k in range(1, n_full + 1):
        t_prev = t0 + (k - 1) * dt
        before = max(np.abs(uc).max(), np.abs(vc).max())
        uc, vc = _ifrk4_step(spec, uc, vc, g, t_prev, dt, Eu, Ev)
        after = max(np.abs(uc).max(), np.abs(vc).max())
        if after > 1e8 * m0 or (before > 0.0 and after > guard * before):
            raise BlowupDetected("coefficient growth guard tripped", time=t_prev)
        if k % stride == 0 and not (k == n_full and remainder == 0.0):
            record(uc, vc, t0 + k * dt)
    t_last = t0 + n_full * dt
    if remainder > 0.0:
        Eu_r = _phases(g, c_u, 0.5 * remainder)
        Ev_r = _phases(g, c_v, 0.5 * remainder)
        uc, vc = _ifrk4_step(spec, uc, vc, g, t_last, remainder, Eu_r, Ev_r)
    record(uc, vc, t0 + T)
    return Trajectory(stored, spec)


# ---------------------------------------------------------------------------
# Successive substitution into the integral equation.


def _cumulative_simpson_c(y: np.ndarray, x: np.ndarray) -> np.ndarray:
    # scipy's cumulative_simpson drops the imaginary part of complex input
    re = cumulative_simpson(y.real, x=x, axis=0, initial=0.0)
    im = cumulative_simpson(y.imag, x=x, axis=0, initial=0.0)
    return re + 1j * im


@dataclass
class PicardReport:
    diffs: list[float]  # d_k = sup_t H^s distance between iterates k and k+1
    ratios: list[float]  # d_{k+1} / d_k where defined
    contraction_ratio: float  # log-linear fit of d_k decay (0 when degenerate)
    converged: bool


def _fit_ratio(diffs: Sequence[float]) -> float:
    pos = [(k, d) for k, d in enumerate(diffs) if d > 0.0]
    if len(pos) < 2:
        return 0.0
    ks = np.array([k for k, _ in pos], dtype=np.float64)
    ys = np.log([d for _, d in pos])
    slope = np.polyfit(ks, ys, 1)[0]
    return float(np.exp(slope))


def picard_iterate(
    initial: State,
    spec: SystemSpec,
    T: float,
    n_iters: int = 8,
    time_resolution: int = 201,
    s: float = 0.0,
    apply_cutoffs: bool = False,
) -> tuple[list[Trajectory], PicardReport]:
    """Iterate the Duhamel map on a stored uniform time grid over [0, T].

    Iterate 0 is the free evolution; each subsequent iterate feeds the
    previous one through u(t) = U(t)u0 + int_0^t U(t-t') G(t') dt',
    with the pulled-back integral int_0^t e^{+i c xi^3 t'} G-hat(t') dt'
    accumulated by cumulative Simpson quadrature.  With apply_cutoffs
    the free term is multiplied by the unit bump and the integral term
    by its T-rescaling; both are identically 1 on [0, T] for T <= 1.

    Divergence is reported, never raised.
    """
    if not (T > 0.0):
        raise ValueError("T must be positive")
    if time_resolution < 9 or time_resolution % 2 == 0:
        raise ValueError("time_resolution must be odd and at least 9")
    if n_iters < 1:
        raise ValueError("n_iters must be at least 1")
    c_u, c_v = _diag_coeffs(spec)
    g = initial.grid
    nt = time_resolution
    times = np.linspace(0.0, T, nt)

    u0 = sg.dealias(initial.u).coeffs
    v0 = sg.dealias(initial.v).coeffs
    # rows: time samples; columns: modes
    phase_u = np.exp((-1j * c_u) * np.outer(times, g.xi**3))
    phase_v = np.exp((-1j * c_v) * np.outer(times, g.xi**3))
    if apply_cutoffs:
        free_w = bump.psi(times)[:, None]
        duh_w = bump.psi_T(times, T)[:, None]
    else:
        free_w = 1.0
        duh_w = 1.0

    free_u = free_w * (phase_u * u0[None, :])
    free_v = free_w * (phase_v * v0[None, :])

    def as_traj(uu: np.ndarray, vv: np.ndarray) -> Trajectory:
        sts = [
            State(SpectralField(uu[i].copy(), g), SpectralField(vv[i].copy(), g), float(times[i]))
            for i in range(nt)
        ]
        return Trajectory(sts, spec)

    def sup_hs_distance(au, av, bu, bv) -> float:
        best = 0.0
        for i in range(nt):
            du = SpectralField(au[i] - bu[i], g)
            dv = SpectralField(av[i] - bv[i], g)
            best = max(best, sobolev_norm(du, s) + sobolev_norm(dv, s))
        return best

    cur_u, cur_v = free_u.copy(), free_v.copy()
    iterates = [as_traj(cur_u, cur_v)]
    diffs: list[float] = []
    diverged = False
    for _ in range(n_iters):
        # overflow of a diverging iterate is a result (reported), not an error
        try:
            with np.errstate(over="ignore", invalid="ignore"):
                Gu = np.empty_like(cur_u)
                Gv = np.empty_like(cur_v)
                for i in range(nt):
                    Gu[i], Gv[i] = _rhs_coeffs(spec, cur_u[i], cur_v[i], g, float(times[i]))
                integrand_u = np.conj(phase_u) * Gu
                integrand_v = np.conj(phase_v) * Gv
                acc_u = _cumulative_simpson_c(integrand_u, times)
                acc_v = _cumulative_simpson_c(integrand_v, times)
                new_u = free_u + duh_w * (phase_u * acc_u)
                new_v = free_v + duh_w * (phase_v * acc_v)
                d = sup_hs_distance(new_u, new_v, cur_u, cur_v)
        except systems.BlowupDetected:
            diverged = True
            break
        if not np.isfinite(d):
            diverged = True
            break
        diffs.append(d)
        cur_u, cur_v = new_u, new_v
        iterates.append(as_traj(cur_u, cur_v))

    ratios = [
        diffs[k + 1] / diffs[k] for k in range(len(diffs) - 1) if diffs[k] > 0.0
    ]
    contraction = float("inf") if (diverged and not diffs) else _fit_ratio(diffs)
    if diverged:
        contraction = max(contraction, 1.0)
    converged = bool(
        not diverged and diffs and (diffs[-1] == 0.0 or contraction < 1.0)
    )
    return iterates, PicardReport(diffs, ratios, contraction, converged)
