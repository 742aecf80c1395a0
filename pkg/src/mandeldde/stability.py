"""Linear stability of the stationary states of the delayed equation.

Around a stationary state z_s (a root of z**2 - z + c = 0) a perturbation
obeys u' + u = 2 z_s u(tau - tau0), so the characteristic equation is

    lambda + 1 = 2 z_s exp(-lambda tau0).

A root crosses the imaginary axis at lambda = i*omega exactly when
|z_s| = sqrt(1 + omega**2)/2 and omega*tau0 + arctan(omega) = arg(z_s).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .dynamics import as_complex, cos_sin
from .errors import DivisionByZeroRay, InconclusiveWinding

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class HopfSample:
    phi: float
    omega: float
    c_H: complex
    marginal_modulus: float


@dataclass(frozen=True)
class StabilityVerdict:
    stable: bool
    binding_threshold: float
    phi_used: float
    omega_used: float


def _phase_lag(omega: float, tau0: float) -> float:
    return omega * tau0 + math.atan(omega)


def solve_omega(phi_eff: float, tau0: float) -> float:
    """Unique omega >= 0 with omega*tau0 + arctan(omega) = phi_eff.

    The left side increases strictly from 0, so bisection on
    [0, phi_eff/tau0] brackets the root; one Newton step polishes it.
    """
    if phi_eff < 0:
        raise ValueError("phi_eff must be non-negative")
    if not tau0 > 0:
        raise ValueError("tau0 must be positive")
    if phi_eff == 0:
        return 0.0
    lo, hi = 0.0, phi_eff / tau0
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if _phase_lag(mid, tau0) < phi_eff:
            lo = mid
        else:
            hi = mid
    w = 0.5 * (lo + hi)
    w -= (_phase_lag(w, tau0) - phi_eff) / (tau0 + 1.0 / (1.0 + w * w))
    return max(w, 0.0)


def hopf_c(phi: float, omega: float) -> complex:
    r = math.sqrt(1.0 + omega * omega) / 2.0
    c1, s1 = cos_sin(phi)
    c2, s2 = cos_sin(2 * phi)
    return complex(r * c1 - r * r * c2, r * s1 - r * r * s2)


def hopf_boundary_point(phi: float, tau0: float) -> HopfSample:
    """Point of the stationary-stability edge at argument ``phi`` of z_s.

    Angles in (pi, 2pi) mirror those in (0, pi): the sample is the conjugate
    of the one at 2pi - phi (same omega).
    """
    if not tau0 > 0:
        raise ValueError("tau0 must be positive")
    phi = float(phi) % TWO_PI
    if phi > math.pi:
        mirror = hopf_boundary_point(TWO_PI - phi, tau0)
        return HopfSample(phi, mirror.omega, mirror.c_H.conjugate(), mirror.marginal_modulus)
    w = solve_omega(phi, tau0)
    return HopfSample(phi, w, hopf_c(phi, w), math.sqrt(1.0 + w * w) / 2.0)


def hopf_boundary_curve(tau0: float, n_samples: int) -> list[HopfSample]:
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    return [hopf_boundary_point(TWO_PI * k / n_samples, tau0) for k in range(n_samples)]


def stationary_points(c) -> tuple[complex, complex]:
    """Both roots of z**2 - z + c = 0, minus branch of the principal root first."""
    c = as_complex(c, "c")
    root = cmath.sqrt(1 - 4 * c)
    return (1 - root) / 2, (1 + root) / 2


def is_stable(z_s, tau0: float) -> StabilityVerdict:
    """Stability of stationary state ``z_s`` for delay ``tau0``.

    The threshold sqrt(1 + omega**2)/2 grows with omega, so the binding
    crossing is the one at the smaller of the angles phi and 2pi - phi.
    """
    z_s = as_complex(z_s, "z_s")
    phi = cmath.phase(z_s)
    if phi < 0:
        phi += TWO_PI
    phi_eff = min(phi, TWO_PI - phi)
    w = solve_omega(phi_eff, tau0)
    threshold = math.sqrt(1.0 + w * w) / 2.0
    return StabilityVerdict(abs(z_s) < threshold, threshold, phi, w)


def nyquist_oracle(z_s, tau0: float, omega_max: float | None = None,
                   n_points: int = 400_001) -> bool:
    """Stability by the winding of 1 - L(i w), L(s) = 2 z_s exp(-s tau0)/(1 + s).

    The open loop has its only pole at s = -1, so the closed loop is stable
    iff the image of the imaginary axis does not wind around the origin.
    """
    z_s = as_complex(z_s, "z_s")
    lower = max(10.0, 8.0 * abs(z_s))
    if omega_max is None:
        omega_max = lower
    if omega_max < lower or n_points < 10_000:
        raise ValueError("frequency grid too small for a reliable winding count")
    w = np.linspace(-omega_max, omega_max, int(n_points))
    s = 1j * w
    ret = 1.0 - 2.0 * z_s * np.exp(-s * tau0) / (1.0 + s)
    if np.any(ret == 0):
        raise InconclusiveWinding("return difference vanishes on the grid")
    dphase = np.angle(ret[1:] / ret[:-1])
    if np.max(np.abs(dphase)) > math.pi / 2:
        raise InconclusiveWinding("argument jump above pi/2; refine the frequency grid")
    winding = int(round(dphase.sum() / TWO_PI))
    return winding == 0


def predicted_period(omega: float) -> float:
    if not omega > 0:
        raise ValueError("omega must be positive for a finite period")
    return TWO_PI / omega


def ray_slope(phi: float, tau0: float) -> float:
    """Slope c_Hi / c_Hr of the ray through the boundary point at ``phi``."""
    c = hopf_boundary_point(phi, tau0).c_H
    if abs(c.real) < 1e-14:
        raise DivisionByZeroRay(f"boundary point at phi={phi} lies on the imaginary axis")
    return c.imag / c.real
