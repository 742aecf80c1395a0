import cmath
import math

import numpy as np
import pytest

from mandeldde.cycles import (cardioid_point, cycle_multiplier_invariants, find_cycle,
                              period2_point, trace_multiplier_boundary)
from mandeldde.dynamics import OrbitKind, iterate_orbit, map_step
from mandeldde.errors import DegenerateCycle

PHIS_64 = [2 * math.pi * k / 64 for k in range(64)]


def test_tangency_point_exact():
    assert cardioid_point(math.pi) == -0.75
    assert period2_point(0.0) == -0.75


def test_cardioid_cusp_and_top():
    assert cardioid_point(0.0) == 0.25
    assert abs(cardioid_point(math.pi / 2) - complex(0.25, 0.5)) < 1e-15


def test_fixed_point_multiplier_on_cardioid():
    for phi in PHIS_64:
        cd = find_cycle(cardioid_point(phi), 1, seed=0.5 * cmath.exp(1j * phi))
        assert abs(abs(cd.multiplier) - 1) < 1e-9
        assert cycle_multiplier_invariants(cd)[1]


@pytest.mark.parametrize("phi", PHIS_64[1:])
def test_period2_boundary_identity(phi):
    cd = find_cycle(period2_point(phi), 2)
    z1, z2 = cd.points
    assert abs(map_step(z2, cd.c) - z1) < 1e-12
    y = z1 * (z1 * z1 + cd.c)
    assert abs(abs(y) - 0.25) < 1e-9
    assert abs(cd.point_product - y) < 1e-12
    mod, on_boundary = cycle_multiplier_invariants(cd)
    assert on_boundary and abs(mod - 0.25) < 1e-9


def test_period2_collision_is_degenerate():
    with pytest.raises(DegenerateCycle):
        find_cycle(-0.75, 2)


def test_superattracting_two_cycle():
    cd = find_cycle(-1, 2)
    assert set(cd.points) == {0, -1}
    assert cd.multiplier == 0


def test_period3_superattracting_center():
    cd = find_cycle(-1.7548776662466927, 3, seed=0.0)
    assert abs(cd.multiplier) < 1e-9


def _three_cycle_multipliers(c):
    # independent oracle: all roots of F^3(z) - z, minus the two fixed points
    P = np.polynomial.Polynomial
    f = P([c, 0, 1])
    f3 = f(f(f))
    roots = (f3 - P([0, 1])).roots()
    fixed = np.roots([1, -1, c])
    roots = [z for z in roots if np.min(np.abs(fixed - z)) > 1e-6]
    return [abs(8 * z * (z * z + c) * ((z * z + c) ** 2 + c)) for z in roots]


def test_period3_boundary():
    curve = trace_multiplier_boundary(3, 48)
    assert len(curve) == 48
    for c in curve:
        mods = _three_cycle_multipliers(c)
        assert min(abs(m - 1) for m in mods) < 1e-7
    reals = [c.real for c in curve]
    assert -1.78 < min(reals) and max(reals) < -1.74


@pytest.mark.parametrize("n", [1, 2, 3])
def test_boundary_conjugation_symmetry(n):
    curve = trace_multiplier_boundary(n, 32)
    pts = np.array(curve)
    for c in pts:
        assert np.min(np.abs(pts - np.conj(c))) < 1e-9


@pytest.mark.parametrize("n, samples", [(4, 8), (1, 1)])
def test_trace_rejects_bad_args(n, samples):
    with pytest.raises(ValueError):
        trace_multiplier_boundary(n, samples)


def test_cardioid_interior_oracle_64():
    for phi in PHIS_64:
        z_s = 0.45 * cmath.exp(1j * phi)
        out = iterate_orbit(z_s - z_s * z_s)
        assert out.kind is OrbitKind.CONVERGED
        assert abs(out.z_final - z_s) < 1e-6
