"""Periodic cycles of the quadratic map and the edges of their regions.

A period-n cycle is attracting while the product of 2*z_k over its points
has modulus below one.  Dividing that multiplier by 2**n gives the plain
product of the cycle points: |z| = 1/2 bounds the main cardioid,
|z0*z1| = 1/4 the period-2 disk and |z0*z1*z2| = 1/8 the period-3
components.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .dynamics import as_complex, cos_sin, map_step
from .errors import ContinuationStall, DegenerateCycle, NoConvergence

NEWTON_TOL = 1e-12
NEWTON_MAX = 100
DISTINCT_TOL = 1e-8
BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class CycleData:
    period: int
    points: tuple[complex, ...]
    multiplier: complex
    c: complex

    @property
    def point_product(self) -> complex:
        """z for n=1, y = z(z**2 + c) for n=2, x for n=3."""
        p = 1 + 0j
        for z in self.points:
            p *= z
        return p


def cardioid_point(phi: float) -> complex:
    c1, s1 = cos_sin(phi)
    c2, s2 = cos_sin(2 * phi)
    return complex(0.5 * c1 - 0.25 * c2, 0.5 * s1 - 0.25 * s2)


def period2_point(phi: float) -> complex:
    return 0.25 * cmath.exp(1j * phi) - 1.0


def _orbit(z: complex, c: complex, n: int) -> list[complex]:
    pts = [z]
    for _ in range(n - 1):
        pts.append(map_step(pts[-1], c))
    return pts


def _multiplier(points) -> complex:
    m = 1 + 0j
    for z in points:
        m *= 2 * z
    return m


def _newton_cycle(c: complex, n: int, z: complex) -> complex:
    for _ in range(NEWTON_MAX):
        w, dw = z, 1 + 0j
        for _ in range(n):
            dw = 2 * w * dw
            w = w * w + c
        g = w - z
        if abs(g) < NEWTON_TOL:
            return z
        dg = dw - 1
        if dg == 0:
            break
        z = z - g / dg
        if not cmath.isfinite(z):
            break
    raise NoConvergence(f"Newton for period {n} at c={c} did not converge from seed")


def _closed_form_period2(c: complex, seed: complex) -> complex:
    disc = cmath.sqrt(1 - 4 * (c + 1))
    roots = ((-1 + disc) / 2, (-1 - disc) / 2)
    return min(roots, key=lambda r: abs(r - seed))


def find_cycle(c, n: int, seed=0.1) -> CycleData:
    """Period-n cycle through the Newton root of F^n(z) - z nearest ``seed``.

    For n = 2 the start is the root of z**2 + z + (c + 1) closest to the seed,
    which removes the pull of the two fixed points.  Raises DegenerateCycle
    when the converged points are not pairwise distinct.
    """
    c = as_complex(c, "c")
    seed = as_complex(seed, "seed")
    if n not in (1, 2, 3):
        raise ValueError("period must be 1, 2 or 3")
    start = _closed_form_period2(c, seed) if n == 2 else seed
    z = _newton_cycle(c, n, start)
    pts = _orbit(z, c, n)
    for i in range(n):
        for j in range(i + 1, n):
            if abs(pts[i] - pts[j]) < DISTINCT_TOL:
                raise DegenerateCycle(
                    f"c={c}: Newton found a cycle of lower period than {n}"
                )
    return CycleData(n, tuple(pts), _multiplier(pts), c)


def cycle_multiplier_invariants(cd: CycleData) -> tuple[float, bool]:
    """Modulus of the cycle-point product and whether it sits on 2**-n."""
    modulus = abs(cd.point_product)
    return modulus, abs(modulus - 2.0 ** -cd.period) < BOUNDARY_TOL


def _period3_center() -> float:
    # real root of c^3 + 2c^2 + c + 1, where the critical point is 3-periodic
    c = -1.75
    for _ in range(50):
        f = ((c + 2) * c + 1) * c + 1
        df = (3 * c + 4) * c + 1
        step = f / df
        c -= step
        if abs(step) < 1e-16:
            break
    return c


def _solve_cycle_multiplier(z: complex, c: complex, target: complex, n: int = 3):
    """Newton on {F^n(z) = z, prod 2 z_k = target} in the unknowns (z, c)."""
    for _ in range(60):
        w, wz, wc = z, 1 + 0j, 0j
        pts, dz, dc = [], [], []
        for _ in range(n):
            pts.append(w)
            dz.append(wz)
            dc.append(wc)
            w, wz, wc = w * w + c, 2 * w * wz, 2 * w * wc + 1
        g = w - z
        g_z, g_c = wz - 1, wc
        m = _multiplier(pts)
        m_z = m_c = 0j
        for k in range(n):
            others = 2 ** (n - 1)
            for j in range(n):
                if j != k:
                    others *= pts[j]
            m_z += 2 * dz[k] * others
            m_c += 2 * dc[k] * others
        h = m - target
        if abs(g) < 1e-14 and abs(h) < 1e-13:
            return z, c
        det = g_z * m_c - g_c * m_z
        if det == 0:
            break
        z = z - (m_c * g - g_c * h) / det
        c = c - (-m_z * g + g_z * h) / det
        if not (cmath.isfinite(z) and cmath.isfinite(c)):
            break
    return None


def _period3_curve(samples: int) -> list[complex]:
    z, c = 0j, complex(_period3_center())
    radial = 32
    for k in range(1, radial + 1):
        sol = _solve_cycle_multiplier(z, c, k / radial)
        if sol is None:
            raise ContinuationStall(f"radial continuation stalled at |multiplier|={k / radial}")
        z, c = sol

    curve = []
    theta = 0.0
    dtheta = 2 * math.pi / samples
    for k in range(samples):
        goal = (k + 0.5) * dtheta
        step = min(dtheta, 0.05)
        while theta < goal - 1e-15:
            trial = min(theta + step, goal)
            sol = _solve_cycle_multiplier(z, c, cmath.exp(1j * trial))
            if sol is None:
                step *= 0.5
                if step < 1e-8:
                    raise ContinuationStall(
                        f"angle continuation stalled at theta={trial:.6g}", partial=curve
                    )
                continue
            z, c = sol
            theta = trial
        curve.append(c)
    return curve


def trace_multiplier_boundary(n: int, samples: int) -> list[complex]:
    """Sample the stability edge of the period-n region.

    n = 1 and 2 use the closed curves uniformly in angle.  For n = 3 the
    cycle through the superattracting real parameter near -1.7549 is
    continued while its multiplier goes out to the unit circle and around
    it.  Sample k has multiplier exp(2*pi*i*(k + 1/2)/samples): the half
    offset keeps the grid uniform while skipping the cusp at multiplier 1,
    where two 3-cycles merge and the cycle is a double root.
    """
    if n not in (1, 2, 3):
        raise ValueError("period must be 1, 2 or 3")
    if samples < 2:
        raise ValueError("need at least two samples")
    if n == 3:
        return _period3_curve(samples)
    curve = cardioid_point if n == 1 else period2_point
    return [curve(2 * math.pi * k / samples) for k in range(samples)]
