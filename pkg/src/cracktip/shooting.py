"""Direct integration of the quasilinear tip eigenfunction ODE.

The equation is affine in the second derivative, so it is integrated as an
explicit first-order system after solving for Psi''.  Initial data sit at
z = 0 with the parity dictated by the index (even l: Psi(0)=1, Psi'(0)=0;
odd l: Psi(0)=0, Psi'(0)=1); the amplitude scales out exactly because the
equation is 1-homogeneous.  The negative half-line is obtained by parity
mirroring, which avoids any drift through the symmetry point.

Zeros are located by the integrator's event machinery on dense output and
annotated with transversality data; the growth exponent is a least-squares
log-log fit over the outer decade of the window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np
from scipy.integrate import solve_ivp

from .errors import NumericsError, QuasilinearDegeneracyError
from .pencil import NodalSet

DEFAULT_Z_MAX = 100.0
DEFAULT_RTOL = 1e-10
DEFAULT_ATOL = 1e-10
COEFF_TOL = 1e-12


def isolate_second_derivative(z: float, psi: float, dpsi: float, lam: float, n: float) -> float:
    """Solve the tip equation for Psi'' at one phase-space point.

    Collecting the Psi''-linear terms of both sides gives

        Psi'' * [z^2 (1 + n Phi1) + 1 + n (psi'^2 + 2 z psi' g) / den]
            = -P0 (1 + n Phi1) - 2 n lam psi'^2 g / den,

    with g = lam psi + z psi', den = psi'^2 + g^2, Phi1 = g^2/den and
    P0 = lam(lam+1) psi + 2(lam+1) z psi'.  At n = 0 this reduces to the
    linear pencil form  Psi'' = -P0 / (1 + z^2).
    """
    g = lam * psi + z * dpsi
    den = dpsi * dpsi + g * g
    if den == 0.0:
        raise QuasilinearDegeneracyError(z, 0.0)
    f1 = g * g / den
    p0 = lam * (lam + 1.0) * psi + 2.0 * (lam + 1.0) * z * dpsi
    coeff = z * z * (1.0 + n * f1) + 1.0 + n * (dpsi * dpsi + 2.0 * z * dpsi * g) / den
    if abs(coeff) < COEFF_TOL * (1.0 + z * z):
        raise QuasilinearDegeneracyError(z, coeff)
    num = -p0 * (1.0 + n * f1) - 2.0 * n * lam * dpsi * dpsi * g / den
    return num / coeff


@dataclass(frozen=True)
class ShootingSolution:
    l: int
    n: float
    lam: float
    z: np.ndarray
    psi: np.ndarray
    dpsi: np.ndarray
    zeros: NodalSet
    growth_exponent: Optional[float]
    degeneracy_events: Tuple[float, ...]
    scale: float
    _dense: object = None
    _amplitude: float = 1.0

    def evaluate(self, z):
        """Dense (psi, psi') at arbitrary z, parity-mirrored; no resampling."""
        zz = np.atleast_1d(np.asarray(z, dtype=float))
        vals = self._dense(np.abs(zz))
        psi, dpsi = vals[0].copy(), vals[1].copy()
        neg = zz < 0.0
        if self.l % 2 == 0:
            dpsi[neg] = -dpsi[neg]
        else:
            psi[neg] = -psi[neg]
        psi *= self._amplitude
        dpsi *= self._amplitude
        if np.isscalar(z) or np.asarray(z).ndim == 0:
            return float(psi[0]), float(dpsi[0])
        return psi, dpsi

    def __call__(self, z):
        out = self.evaluate(z)
        return out[0]


SOFT_COEFF_TOL = 1e-6


def _rhs(lam: float, n: float, near_events: Optional[List[float]] = None) -> Callable:
    def f(z, y):
        psi, dpsi = y[0], y[1]
        g = lam * psi + z * dpsi
        den = dpsi * dpsi + g * g
        if den == 0.0:
            raise QuasilinearDegeneracyError(z, 0.0)
        f1 = g * g / den
        coeff = z * z * (1.0 + n * f1) + 1.0 + n * (dpsi * dpsi + 2.0 * z * dpsi * g) / den
        if abs(coeff) < COEFF_TOL * (1.0 + z * z):
            raise QuasilinearDegeneracyError(z, coeff)
        if near_events is not None and abs(coeff) < SOFT_COEFF_TOL * (1.0 + z * z):
            near_events.append(float(z))
        p0 = lam * (lam + 1.0) * psi + 2.0 * (lam + 1.0) * z * dpsi
        num = -p0 * (1.0 + n * f1) - 2.0 * n * lam * dpsi * dpsi * g / den
        return (dpsi, num / coeff)

    return f


def _half_line(
    lam: float,
    n: float,
    ic: Tuple[float, float],
    z_end: float,
    rtol: float,
    atol: float,
    near_events: Optional[List[float]] = None,
):
    """Integrate from 0 to z_end (either sign), reporting Psi = 0 events."""

    def event_zero(z, y):
        return y[0]

    event_zero.terminal = False
    sol = solve_ivp(
        _rhs(lam, n, near_events),
        (0.0, z_end),
        list(ic),
        method="RK45",
        rtol=rtol,
        atol=atol,
        dense_output=True,
        events=[event_zero],
    )
    if not sol.success:
        raise NumericsError(f"integration failed: {sol.message}")
    return sol


def shoot(
    l: int,
    n: float,
    lam: float,
    z_max: float = DEFAULT_Z_MAX,
    rtol: float = DEFAULT_RTOL,
    atol: float = DEFAULT_ATOL,
    amplitude: float = 1.0,
    transversality_tol: float = 1e-6,
    num_samples: int = 2001,
) -> ShootingSolution:
    """Parity-symmetric solution of the tip ODE for index ``l``.

    Integrates on [0, z_max] and mirrors by the parity of l.  ``amplitude``
    rescales the result exactly (1-homogeneity), so the normalized problem
    is solved once.  Fitted growth uses z in [z_max/10, z_max].
    """
    if l < 1:
        raise ValueError("l must be >= 1")
    if n < 0.0:
        raise ValueError("n must be >= 0")
    even = l % 2 == 0
    ic = (1.0, 0.0) if even else (0.0, 1.0)
    near: List[float] = []
    sol = _half_line(lam, n, ic, z_max, rtol, atol, near_events=near)
    degeneracies = tuple(sorted(set(near)))

    zs = np.linspace(0.0, z_max, num_samples)
    vals = sol.sol(zs)
    psi_half, dpsi_half = vals[0], vals[1]

    # parity mirror onto the negative half-line
    z_full = np.concatenate([-zs[:0:-1], zs])
    if even:
        psi_full = np.concatenate([psi_half[:0:-1], psi_half])
        dpsi_full = np.concatenate([-dpsi_half[:0:-1], dpsi_half])
    else:
        psi_full = np.concatenate([-psi_half[:0:-1], psi_half])
        dpsi_full = np.concatenate([dpsi_half[:0:-1], dpsi_half])

    pos_zeros = [float(t) for t in sol.t_events[0] if t > 1e-13]
    zeros = sorted({-t for t in pos_zeros} | set(pos_zeros) | ({0.0} if not even else set()))
    dmags = []
    for t in zeros:
        y = sol.sol(abs(t))
        dmags.append(abs(float(y[1])))
    window = max(1.0, (abs(zeros[-1]) + 1.0) if zeros else 1.0)
    local = np.abs(psi_half[zs <= window])
    scale = float(local.max()) if local.size else float(np.abs(psi_half).max())
    flags = tuple(m > transversality_tol * scale for m in dmags)
    nodal = NodalSet(tuple(zeros), tuple(dmags), flags, transversality_tol * scale)

    growth = None
    fit_mask = zs >= z_max / 10.0
    fit_z = zs[fit_mask]
    fit_v = np.abs(psi_half[fit_mask])
    if fit_z.size >= 8 and np.all(fit_v > 0.0):
        slope, _ = np.polyfit(np.log(fit_z), np.log(fit_v), 1)
        growth = float(slope)

    amp = float(amplitude)
    return ShootingSolution(
        l=l,
        n=float(n),
        lam=float(lam),
        z=z_full,
        psi=amp * psi_full,
        dpsi=amp * dpsi_full,
        zeros=nodal,
        growth_exponent=growth,
        degeneracy_events=degeneracies,
        scale=abs(amp) * scale,
        _dense=sol.sol,
        _amplitude=amp,
    )


@dataclass(frozen=True)
class Profile:
    """Two-sided solution from arbitrary initial data (no parity assumed)."""

    lam: float
    n: float
    ic: Tuple[float, float]
    z_max: float
    _pos: object
    _neg: object

    def psi(self, z: float) -> float:
        s = self._pos if z >= 0.0 else self._neg
        return float(s.sol(z)[0])

    def dpsi(self, z: float) -> float:
        s = self._pos if z >= 0.0 else self._neg
        return float(s.sol(z)[1])

    def zeros(self) -> List[float]:
        out = [float(t) for t in self._pos.t_events[0]]
        out += [float(t) for t in self._neg.t_events[0]]
        return sorted(set(out))


def two_sided_profile(
    n: float,
    lam: float,
    ic: Tuple[float, float],
    z_max: float,
    rtol: float = DEFAULT_RTOL,
    atol: float = 1e-12,
) -> Profile:
    """Integrate both half-lines from z = 0 with the given initial data."""
    pos = _half_line(lam, n, ic, z_max, rtol, atol)
    neg = _half_line(lam, n, ic, -z_max, rtol, atol)
    return Profile(lam=lam, n=n, ic=tuple(ic), z_max=z_max, _pos=pos, _neg=neg)


def closed_form_lambda0_derivative(n: float, z):
    """Psi'(z) of the Lam = 0 equation, which integrates once in closed form:

        Psi'(z) = (1+z^2)^(-1) exp(-(n/(1+n)) / (1+z^2)).

    The resulting Psi tends to finite limits of opposite sign, so the mode
    is excluded from the admissible family; it serves as an integration
    oracle only.
    """
    if n < 0.0:
        raise ValueError("n must be >= 0")
    return 1.0 / (1.0 + z * z) * np.exp(-(n / (1.0 + n)) / (1.0 + z * z))


def arctan_example(z):
    """The bounded analytic lam = 0 solution arctan(z) of the linear pencil.

    It solves (1+z^2) psi'' + 2 z psi' = 0 with limits +/- pi/2, but its
    blow-up limit is the sign function, which no admissible tip profile can
    trace; it is therefore classified as inadmissible.
    """
    return np.arctan(z)


def arctan_ode_residual(z):
    """(1+z^2) psi'' + 2 z psi' for psi = arctan; zero up to rounding."""
    zz = np.asarray(z, dtype=float)
    d1 = 1.0 / (1.0 + zz * zz)
    d2 = -2.0 * zz / (1.0 + zz * zz) ** 2
    return (1.0 + zz * zz) * d2 + 2.0 * zz * d1


ARCTAN_EXAMPLE_ADMISSIBLE = False
