"""Feigenbaum scans, time series and oscillation periods."""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np
from scipy.signal import peak_prominences

from .dynamics import (DdeConfig, DiscreteParams, OrbitKind, OrbitOutcome, as_complex,
                       discrete_series, integrate_dde, iterate_orbit)
from .errors import TooFewPeaks
from .io import Table
from .stability import hopf_boundary_point


@dataclass
class TimeSeries:
    tau: np.ndarray
    z: np.ndarray
    outcome: OrbitOutcome | None = None

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.z)


@dataclass(frozen=True)
class PeriodEstimate:
    T: float
    spread: float
    n_peaks: int


def time_series(c, mode: str = "dde", config: DdeConfig | DiscreteParams | None = None,
                stride: int = 1) -> TimeSeries:
    """Uniformly sampled orbit: tau = k*stride*dt (dde) or k (discrete).

    In dde mode an off-stride final or escape node is dropped so the
    spacing stays uniform; the outcome still records where the run ended.
    """
    c = as_complex(c, "c")
    if mode == "discrete":
        p = config or DiscreteParams()
        z = discrete_series(c, p.max_iter, p.escape_radius)
        out = iterate_orbit(c, p.max_iter, p.escape_radius, p.conv_tol)
        return TimeSeries(np.arange(z.size, dtype=float), z, out)
    if mode != "dde":
        raise ValueError(f"unknown mode {mode!r}")
    cfg = config or DdeConfig()
    traj, out = integrate_dde(c, cfg, stride)
    nodes = np.round(traj.tau / cfg.dt).astype(np.int64)
    keep = nodes % stride == 0
    return TimeSeries(traj.tau[keep], traj.z[keep], out)


def local_maxima(values: np.ndarray) -> np.ndarray:
    """Indices of samples strictly above both neighbours."""
    v = np.asarray(values)
    if v.size < 3:
        return np.empty(0, dtype=int)
    return np.nonzero((v[1:-1] > v[:-2]) & (v[1:-1] > v[2:]))[0] + 1


def measure_period(series: TimeSeries, transient_cut: float | None = None,
                   min_prominence: float = 0.0, flat_tol: float = 1e-9) -> PeriodEstimate:
    """Mean spacing of the maxima of |z| after ``transient_cut``.

    Each maximum is refined by the vertex of the parabola through it and
    its two neighbours.  ``min_prominence`` (a fraction of the post-cut
    range of |z|) drops secondary ripples; the default keeps every strict
    local maximum.  A series flatter than ``flat_tol`` has no peaks.
    """
    tau = np.asarray(series.tau, dtype=float)
    if transient_cut is None:
        transient_cut = tau[-1] / 2 if tau.size else 0.0
    m = tau >= transient_cut
    t = tau[m]
    a = np.abs(np.asarray(series.z)[m])
    if a.size < 3 or np.ptp(a) <= flat_tol * max(1.0, float(a.max())):
        raise TooFewPeaks(f"no oscillation after tau={transient_cut}")
    idx = local_maxima(a)
    if min_prominence > 0 and idx.size:
        prom = peak_prominences(a, idx)[0]
        idx = idx[prom >= min_prominence * np.ptp(a)]
    if idx.size < 3:
        raise TooFewPeaks(f"{idx.size} maxima after tau={transient_cut}, need 3")

    left, mid, right = a[idx - 1], a[idx], a[idx + 1]
    denom = left - 2 * mid + right
    shift = np.where(denom != 0, 0.5 * (left - right) / np.where(denom != 0, denom, 1), 0.0)
    h = (t[idx + 1] - t[idx - 1]) / 2
    peaks = t[idx] + shift * h
    gaps = np.diff(peaks)
    return PeriodEstimate(float(gaps.mean()), float(gaps.std()), int(idx.size))


def _distinct(values, tol: float) -> list[float]:
    out: list[float] = []
    for v in sorted(values):
        if not out or v - out[-1] > tol:
            out.append(float(v))
    return out


@dataclass
class FeigenbaumScan:
    """Rows (s, c_re, c_im, value) plus the per-parameter outcome."""

    s: np.ndarray
    c: np.ndarray
    values: list[list[float]]
    outcomes: list[OrbitOutcome]
    diagnostics: list[str | None]

    def table(self) -> Table:
        rows = []
        for s, c, vals in zip(self.s, self.c, self.values):
            rows.extend((float(s), c.real, c.imag, v) for v in vals)
        return Table(["s", "c_re", "c_im", "value"], rows)

    def branch_counts(self, tol: float = 1e-3) -> np.ndarray:
        return np.array([len(_distinct(v, tol)) for v in self.values])

    def count_transition(self, a: int, b: int, tol: float = 1e-3):
        """Midpoint of the first adjacent pair whose branch counts are {a, b}."""
        counts = self.branch_counts(tol)
        for k in range(1, counts.size):
            if {int(counts[k - 1]), int(counts[k])} == {a, b}:
                return 0.5 * (self.s[k - 1] + self.s[k])
        return None

    def oscillation_onset(self):
        """Midpoint between the last converged and the first non-converged parameter."""
        conv = [o.kind is OrbitKind.CONVERGED for o in self.outcomes]
        for k in range(1, len(conv)):
            if conv[k - 1] != conv[k]:
                return 0.5 * (self.s[k - 1] + self.s[k])
        return None


def feigenbaum_scan(c0, direction, s_range: tuple[float, float], n_params: int,
                    mode: str = "dde", config: DdeConfig | DiscreteParams | None = None,
                    merge_tol: float = 1e-9) -> FeigenbaumScan:
    """Post-transient |z| samples along the line c = c0 + s*direction.

    Discrete mode records the last 64 |z_k|; dde mode records the local
    maxima of |z| after ``transient_frac*tau_end`` (or |z_final| when the
    run converged).  Values closer than ``merge_tol`` are merged.  An
    escaping parameter records nothing and leaves a diagnostic.
    """
    c0 = as_complex(c0, "c0")
    direction = as_complex(direction, "dir")
    if n_params < 2:
        raise ValueError("n_params must be >= 2")
    if direction == 0:
        raise ValueError("direction must be non-zero")
    s_grid = np.linspace(s_range[0], s_range[1], n_params)
    cs = c0 + s_grid * direction
    values, outcomes, diags = [], [], []
    for c in cs:
        c = complex(c)
        if mode == "discrete":
            p = config or DiscreteParams()
            z = discrete_series(c, p.max_iter, p.escape_radius)
            out = iterate_orbit(c, p.max_iter, p.escape_radius, p.conv_tol)
            vals = [] if out.kind is OrbitKind.ESCAPED else list(np.abs(z[-64:]))
        elif mode == "dde":
            cfg = config or DdeConfig()
            traj, out = integrate_dde(c, cfg)
            if out.kind is OrbitKind.ESCAPED:
                vals = []
            elif out.kind is OrbitKind.CONVERGED:
                vals = [abs(out.z_final)]
            else:
                a = np.abs(traj.z[traj.tau >= cfg.transient_frac * cfg.tau_end])
                vals = list(a[local_maxima(a)]) or [abs(out.z_final)]
        else:
            raise ValueError(f"unknown mode {mode!r}")
        values.append(_distinct(vals, merge_tol))
        outcomes.append(out)
        diags.append(None if out.kind is not OrbitKind.ESCAPED
                     else f"escaped at {out.escape_time}")
    return FeigenbaumScan(s_grid, cs, values, outcomes, diags)


@dataclass(frozen=True)
class RayProbe:
    radius: float
    c: complex
    estimate: PeriodEstimate | None
    error: TooFewPeaks | None = None


def ray_frequency_check(phi: float, tau0: float, radii, config: DdeConfig,
                        min_prominence: float = 0.3) -> list[RayProbe]:
    """Measured periods at c = r*exp(i*arg(c_H)) for each radius r.

    c_H is the stationary-stability edge point at ``phi``; the measurement
    discards peaks below ``min_prominence`` of the |z| range, which keeps
    the fundamental when harmonics ripple the modulus.
    """
    direction = cmath.exp(1j * cmath.phase(hopf_boundary_point(phi, tau0).c_H))
    probes = []
    for r in radii:
        c = r * direction
        series = time_series(c, "dde", config)
        try:
            est = measure_period(series, config.transient_frac * config.tau_end,
                                 min_prominence=min_prominence)
            probes.append(RayProbe(float(r), c, est))
        except TooFewPeaks as exc:
            probes.append(RayProbe(float(r), c, None, exc))
    return probes
