"""Discrete space-time frequency fields and dispersive-weighted norms.

A field F(x, t) on a doubly periodic box carries coefficients under the
convention

    Fhat(xi, tau) = (2*pi)**(-1) * iint exp(-i*(x*xi + t*tau)) F dx dt,

realized as the product of two unitary one-variable transforms.  The
weighted norm of interest is

    ||F||^2 = iint (1 + |tau + a*xi^3|)^(2b) (1 + |xi|)^(2s) |Fhat|^2,

discretized as a Riemann sum over the frequency lattice.  Fields meant
to model whole-line data are windowed in t by a compactly supported
bump before transforming, so the tau integral is well approximated on
the periodic box.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .. import grid as sg
from ..bump import psi, psi_T
from ..grid import Grid, SpectralField

SQRT_2PI = sg.SQRT_2PI


@dataclass(frozen=True)
class SpaceTimeGrid:
    x: Grid
    t: Grid

    @property
    def cell(self) -> float:
        return self.x.dxi * self.t.dxi


def make_st_grid(
    n_x: int, period_x: float, n_t: int = 256, period_t: float = 8.0
) -> SpaceTimeGrid:
    """Space-time grid; the default t box [-4, 4) covers supp psi = [-2, 2]."""
    return SpaceTimeGrid(Grid(n_x, period_x), Grid(n_t, period_t))


@dataclass
class SpaceTimeField:
    """Real space-time field stored by its (xi, tau) coefficients."""

    coeffs: np.ndarray  # shape (n_x, n_t), axis 0 = xi, axis 1 = tau
    grid: SpaceTimeGrid

    def __post_init__(self):
        expect = (self.grid.x.n, self.grid.t.n)
        if self.coeffs.shape != expect:
            raise ValueError(f"coeff shape {self.coeffs.shape}, expected {expect}")

    def values(self) -> np.ndarray:
        return inverse2(self)

    def copy(self) -> "SpaceTimeField":
        return SpaceTimeField(self.coeffs.copy(), self.grid)


def _forward_axis(arr: np.ndarray, g: Grid, axis: int) -> np.ndarray:
    shape = [1, 1]
    shape[axis] = g.n
    sign = g._sign.reshape(shape)
    return np.fft.fft(arr, axis=axis) * sign * (g.dx / SQRT_2PI)


def _inverse_axis(arr: np.ndarray, g: Grid, axis: int) -> np.ndarray:
    shape = [1, 1]
    shape[axis] = g.n
    sign = g._sign.reshape(shape)
    return np.fft.ifft(arr * sign, axis=axis) * (SQRT_2PI / g.dx)


def forward2(values: np.ndarray, stg: SpaceTimeGrid) -> SpaceTimeField:
    """Transform real samples F(x_j, t_m) to continuum-convention coefficients."""
    values = np.asarray(values, dtype=np.float64)
    c = _forward_axis(values.astype(np.complex128), stg.x, 0)
    c = _forward_axis(c, stg.t, 1)
    return SpaceTimeField(c, stg)


def inverse2(field: SpaceTimeField) -> np.ndarray:
    c = _inverse_axis(field.coeffs, field.grid.t, 1)
    c = _inverse_axis(c, field.grid.x, 0)
    return c.real


def from_time_slices(slice_coeffs: np.ndarray, stg: SpaceTimeGrid) -> SpaceTimeField:
    """Build a field from spatial coefficients sampled in time.

    slice_coeffs[k, m] = spatial coefficient k at time stg.t.x[m]; only
    the time transform remains to be taken.
    """
    if slice_coeffs.shape != (stg.x.n, stg.t.n):
        raise ValueError("slice_coeffs shape does not match the grid")
    return SpaceTimeField(_forward_axis(slice_coeffs, stg.t, 1), stg)


def hermitian_symmetrize(coeffs: np.ndarray) -> np.ndarray:
    """Project onto the conjugate-symmetric part (real-valued field)."""
    nx, nt = coeffs.shape
    ix = (-np.arange(nx)) % nx
    it = (-np.arange(nt)) % nt
    mirrored = np.conj(coeffs[np.ix_(ix, it)])
    return 0.5 * (coeffs + mirrored)


@dataclass(frozen=True)
class NormParams:
    a: float
    s: float
    b: float
    b_prime: float = 0.0


def weight_table(stg: SpaceTimeGrid, a: float, s: float, b: float) -> np.ndarray:
    xi = stg.x.xi[:, None]
    tau = stg.t.xi[None, :]
    return (1.0 + np.abs(tau + a * xi**3)) ** (2.0 * b) * (1.0 + np.abs(xi)) ** (2.0 * s)


def xsb_norm(field: SpaceTimeField, p: NormParams) -> float:
    """Riemann-sum discretization of the dispersive-weighted norm."""
    if p.a == 0.0:
        raise ValueError("the modulation weight needs a nonzero dispersion speed a")
    w = weight_table(field.grid, p.a, p.s, p.b)
    return float(np.sqrt(np.sum(w * np.abs(field.coeffs) ** 2) * field.grid.cell))


def bracket_norm(u0: SpectralField, s: float) -> float:
    """Spatial norm with the (1 + |xi|)^s weight matching xsb_norm."""
    g = u0.grid
    w = (1.0 + np.abs(g.xi)) ** (2.0 * s)
    return float(np.sqrt(np.sum(w * np.abs(u0.coeffs) ** 2) * g.dxi))


def random_field(
    stg: SpaceTimeGrid,
    rng: np.random.Generator,
    band_x: float | None = None,
    band_t: float | None = None,
    decay: float = 0.0,
) -> SpaceTimeField:
    """Hermitian random field with optional frequency band limits.

    decay > 0 damps coefficients like (1+|xi|)^-decay * (1+|tau|)^-decay
    to model smoother data.
    """
    nx, nt = stg.x.n, stg.t.n
    c = rng.standard_normal((nx, nt)) + 1j * rng.standard_normal((nx, nt))
    xi = stg.x.xi[:, None]
    tau = stg.t.xi[None, :]
    if band_x is not None:
        c = np.where(np.abs(xi) <= band_x, c, 0.0)
    if band_t is not None:
        c = np.where(np.abs(tau) <= band_t, c, 0.0)
    if decay > 0.0:
        c = c * (1.0 + np.abs(xi)) ** -decay * (1.0 + np.abs(tau)) ** -decay
    return SpaceTimeField(hermitian_symmetrize(c), stg)


def _check_xgrid(u0: SpectralField, stg: SpaceTimeGrid) -> None:
    if u0.grid.n != stg.x.n or u0.grid.period != stg.x.period:
        raise ValueError("initial datum grid does not match the space-time grid")


def free_field(u0: SpectralField, a: float, stg: SpaceTimeGrid, windowed: bool = True) -> SpaceTimeField:
    """psi(t) * (free evolution of u0 with speed a), as a space-time field."""
    _check_xgrid(u0, stg)
    t = stg.t.x[None, :]
    xi = stg.x.xi[:, None]
    slices = u0.coeffs[:, None] * np.exp(-1j * a * xi**3 * t)
    if windowed:
        slices = slices * psi(stg.t.x)[None, :]
    return from_time_slices(slices, stg)


def stationary_field(u0: SpectralField, stg: SpaceTimeGrid) -> SpaceTimeField:
    """psi(t) * u0(x): windowed data with no time evolution."""
    _check_xgrid(u0, stg)
    slices = u0.coeffs[:, None] * psi(stg.t.x)[None, :]
    return from_time_slices(slices, stg)


def duhamel_field(
    forcing_slices: np.ndarray, a: float, stg: SpaceTimeGrid, T: float
) -> SpaceTimeField:
    """psi_T(t) * int_0^t (free evolution from t' to t applied to F(t')) dt'.

    forcing_slices[k, m] are the spatial coefficients of F at time
    stg.t.x[m].  The t' integral is a cumulative Simpson rule on the
    grid cadence, anchored at t = 0 (which lies on the grid).
    """
    nt = stg.t.n
    t = stg.t.x
    i0 = nt // 2
    if abs(t[i0]) > 1e-12:
        raise ValueError("time grid must contain t = 0")
    xi = stg.x.xi[:, None]
    phase = np.exp(-1j * a * xi**3 * t[None, :])
    integrand = np.conj(phase) * forcing_slices
    # split re/im: scipy's cumulative_simpson drops imaginary parts
    acc = cumulative_simpson(integrand.real, x=t, axis=1, initial=0.0) + 1j * (
        cumulative_simpson(integrand.imag, x=t, axis=1, initial=0.0)
    )
    acc = acc - acc[:, i0][:, None]
    slices = phase * acc * psi_T(t, T)[None, :]
    return from_time_slices(slices, stg)
