"""Orbits of z -> z**2 + c and of the delayed relaxation equation.

Discrete mode iterates the quadratic map from z_0 = 0.  Continuous mode
integrates

    dz/dtau = -z(tau) + z(tau - tau0)**2 + c

in normalized time from the zero history ``z = 0`` on ``[-tau0, 0]`` with
classical RK4.  The delay is an integer number of steps, so the derivative
kinks inherited from ``tau = 0`` always fall on grid nodes; delayed values
at RK half-steps come from cubic Hermite interpolation of stored
(value, derivative) pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum

import numpy as np

from . import _kernels as K


class OrbitKind(IntEnum):
    """Orbit class; the integer value is the raster class code."""

    ESCAPED = K.ESCAPED
    CONVERGED = K.CONVERGED
    OSCILLATING = K.OSCILLATING
    UNDECIDED = K.UNDECIDED


def as_complex(value, name: str = "value") -> complex:
    """Coerce to ``complex`` and reject NaN/Inf components."""
    z = complex(value)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{name} must be finite, got {z!r}")
    return z


_QUARTER_TURNS = ((1.0, 0.0), (0.0, 1.0), (-1.0, 0.0), (0.0, -1.0))


def cos_sin(phi: float) -> tuple[float, float]:
    """(cos phi, sin phi), exact when phi is a float multiple of pi/2."""
    q = phi / (0.5 * math.pi)
    if q == int(q) and abs(q) < 2**52:
        return _QUARTER_TURNS[int(q) % 4]
    return math.cos(phi), math.sin(phi)


@dataclass(frozen=True)
class DdeConfig:
    """Integration and classification policy for the delay equation.

    ``dt`` is snapped so that ``tau0 / dt`` is an integer of at least 4.
    Unset optional fields take the documented defaults: ``dt = tau0/200``
    and ``window = 10*tau0``.
    """

    tau0: float = 10.0
    dt: float | None = None
    tau_end: float = 200.0
    escape_radius: float = 10.0
    conv_tol: float = 1e-6
    window: float | None = None
    transient_frac: float = 0.5
    n_delay: int = field(init=False)

    def __post_init__(self):
        if not self.tau0 > 0:
            raise ValueError("tau0 must be positive")
        dt = self.tau0 / 200.0 if self.dt is None else float(self.dt)
        if not dt > 0:
            raise ValueError("dt must be positive")
        n = max(4, int(round(self.tau0 / dt)))
        object.__setattr__(self, "n_delay", n)
        object.__setattr__(self, "dt", self.tau0 / n)
        if self.window is None:
            object.__setattr__(self, "window", 10.0 * self.tau0)
        if not self.window > 0:
            raise ValueError("window must be positive")
        if not self.escape_radius > 0 or not self.conv_tol > 0:
            raise ValueError("escape_radius and conv_tol must be positive")
        if not 0.0 <= self.transient_frac < 1.0:
            raise ValueError("transient_frac must lie in [0, 1)")
        if self.tau_end < self.tau0 + self.window:
            raise ValueError(
                f"tau_end={self.tau_end} shorter than tau0 + window = {self.tau0 + self.window}"
            )

    @property
    def n_steps(self) -> int:
        return int(math.ceil(self.tau_end / self.dt - 1e-9))

    def to_dict(self) -> dict:
        return {
            "tau0": self.tau0,
            "dt": self.dt,
            "n_delay": self.n_delay,
            "tau_end": self.tau_end,
            "n_steps": self.n_steps,
            "escape_radius": self.escape_radius,
            "conv_tol": self.conv_tol,
            "window": self.window,
            "transient_frac": self.transient_frac,
        }


@dataclass(frozen=True)
class DiscreteParams:
    max_iter: int = 1000
    escape_radius: float = 2.0
    conv_tol: float = 1e-6

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")
        if self.escape_radius < 2:
            raise ValueError("escape_radius must be >= 2")

    def to_dict(self) -> dict:
        return {"max_iter": self.max_iter, "escape_radius": self.escape_radius,
                "conv_tol": self.conv_tol}


class HistoryBuffer:
    """Ring of (z, dz/dtau) samples on the step grid, most recent tau0 + dt.

    Starts as the zero history with node 0 carrying the right derivative
    ``c``.  On-grid queries return stored samples exactly; between nodes
    the cubic Hermite interpolant of the bracketing pair is used.
    """

    def __init__(self, n_delay: int, dt: float, c: complex = 0j):
        c = as_complex(c, "c")
        self.n_delay = int(n_delay)
        self.dt = float(dt)
        size = self.n_delay + 2
        self._zr = np.empty(size)
        self._zi = np.empty(size)
        self._dr = np.empty(size)
        self._di = np.empty(size)
        K.ring_reset(self._zr, self._zi, self._dr, self._di, c.real, c.imag)
        self.node = 0

    @property
    def tau_now(self) -> float:
        return self.node * self.dt

    @property
    def span(self) -> float:
        return (self.n_delay + 1) * self.dt

    def push(self, z: complex, dz: complex) -> None:
        self.node += 1
        j = self.node % self._zr.size
        self._zr[j], self._zi[j] = z.real, z.imag
        self._dr[j], self._di[j] = dz.real, dz.imag

    def query(self, q: float) -> complex:
        s = q / self.dt
        if not (self.node - self.n_delay - 1 - 1e-9 <= s <= self.node + 1e-9):
            raise ValueError(
                f"time {q} outside stored history [{self.tau_now - self.span}, {self.tau_now}]"
            )
        nearest = round(s)
        if abs(s - nearest) <= 1e-9:
            re, im = K.ring_node(self._zr, self._zi, nearest)
            return complex(re, im)
        node = math.floor(s)
        re, im = K.ring_interp(self._zr, self._zi, self._dr, self._di, node, s - node, self.dt)
        return complex(re, im)


@dataclass
class Trajectory:
    """Samples (tau, z) of one integration, plus the stop diagnostics."""

    tau: np.ndarray
    z: np.ndarray
    escaped: bool = False
    nonfinite: bool = False

    def __len__(self) -> int:
        return self.tau.size

    def conj(self) -> "Trajectory":
        return Trajectory(self.tau.copy(), np.conj(self.z), self.escaped, self.nonfinite)


@dataclass(frozen=True)
class OrbitOutcome:
    kind: OrbitKind
    z_final: complex
    escape_time: float | None = None
    residual: float | None = None
    amplitude: float | None = None
    nonfinite: bool = False

    @property
    def scalar(self) -> float:
        """The one diagnostic that goes into a raster cell."""
        for v in (self.escape_time, self.residual, self.amplitude):
            if v is not None:
                return float(v)
        return math.nan


def _outcome(kind: int, z_final: complex, scalar: float, nonfinite: bool = False) -> OrbitOutcome:
    kind = OrbitKind(kind)
    if kind is OrbitKind.ESCAPED:
        return OrbitOutcome(kind, z_final, escape_time=scalar, nonfinite=nonfinite)
    if kind is OrbitKind.CONVERGED:
        return OrbitOutcome(kind, z_final, residual=scalar)
    return OrbitOutcome(kind, z_final, amplitude=scalar)


def map_step(z: complex, c: complex) -> complex:
    """One application of the quadratic map, ``z**2 + c``."""
    return z * z + c


def iterate_orbit(c, max_iter: int = 1000, escape_radius: float = 2.0,
                  conv_tol: float = 1e-6) -> OrbitOutcome:
    """Classify the orbit of 0 under z -> z**2 + c.

    Escaped carries the first index k with ``|z_k| > escape_radius``.
    Otherwise the last 16 iterates decide between Converged (all within
    ``conv_tol`` of the final iterate, which is reported) and Oscillating
    (amplitude = max modulus over those iterates).
    """
    c = as_complex(c, "c")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    empty = np.empty(0)
    kind, scalar, zr, zi, _ = K.discrete_orbit(c.real, c.imag, int(max_iter),
                                               float(escape_radius), float(conv_tol),
                                               empty, empty)
    if kind == K.ESCAPED:
        scalar = int(scalar)
    return _outcome(kind, complex(zr, zi), scalar)


def discrete_series(c, max_iter: int = 1000, escape_radius: float = 2.0) -> np.ndarray:
    """Iterates z_0 = 0, z_1, ... up to max_iter or the escaping iterate."""
    c = as_complex(c, "c")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    out_r = np.empty(max_iter + 1)
    out_i = np.empty(max_iter + 1)
    _, _, _, _, n = K.discrete_orbit(c.real, c.imag, int(max_iter), float(escape_radius),
                                     1e-300, out_r, out_i)
    return out_r[:n] + 1j * out_i[:n]


def integrate_dde(c, config: DdeConfig, sample_stride: int = 1) -> tuple[Trajectory, OrbitOutcome]:
    """Integrate the delay equation from the zero history and classify the run.

    The trajectory holds every ``sample_stride``-th node plus the final one;
    integration stops at the first node where ``|z|`` exceeds the escape
    radius (or becomes non-finite), and that node is the last sample.
    """
    c = as_complex(c, "c")
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    tau, zr, zi, status = K.integrate(c.real, c.imag, config.n_delay, config.dt,
                                      config.n_steps, config.escape_radius,
                                      int(sample_stride), 0)
    traj = Trajectory(tau, zr + 1j * zi,
                      escaped=status != K.STATUS_OK,
                      nonfinite=status == K.STATUS_NONFINITE)
    return traj, classify_trajectory(traj, c, config)


def classify_trajectory(traj: Trajectory, c, config: DdeConfig) -> OrbitOutcome:
    """Escaped > Converged > Oscillating > Undecided.

    Escaped at the first sample beyond the escape radius; nothing after it
    is examined.  Converged needs the final window to stay within
    ``conv_tol`` of the end value and that value to solve z**2 - z + c = 0
    to ``10*conv_tol``.  Oscillating needs at least three local maxima of
    ``|z|`` in the window, agreeing to 10 % of the largest.
    """
    c = as_complex(c, "c")
    z = np.asarray(traj.z, dtype=complex)
    tau = np.ascontiguousarray(traj.tau, dtype=float)
    kind, idx, scalar, bad = K.classify_samples(
        tau, np.ascontiguousarray(z.real), np.ascontiguousarray(z.imag),
        c.real, c.imag, config.window, config.conv_tol, config.escape_radius)
    return _outcome(kind, complex(z[idx]), float(scalar), bool(bad))


def stationary_residual(z: complex, c: complex) -> float:
    return abs(z * z - z + c)
