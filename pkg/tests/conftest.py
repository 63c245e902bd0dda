import numpy as np
import pytest

from trsw import GridSpec, SchemeConfig, ScalarField
from trsw.grid import BoundaryKind
from trsw.primitive import PrimitiveState


def rel_err(got, want, floor=1.0):
    got = np.asarray(got)
    want = np.asarray(want)
    scale = max(floor, float(np.max(np.abs(want))))
    return float(np.max(np.abs(got - want))) / scale


def random_field(rng, nx, ny, lo=-1.0, hi=1.0):
    return rng.uniform(lo, hi, size=(nx, ny))


def random_primitive(rng, nx, ny, eps, nu, amp=0.3):
    """Random valid state: h and Theta stay well away from zero."""
    phi = (nu / eps) * rng.uniform(-amp, amp, size=(nx, ny))
    theta = (nu / (2.0 * eps)) * rng.uniform(-amp, amp, size=(nx, ny))
    u = rng.uniform(-1.0, 1.0, size=(nx, ny))
    v = rng.uniform(-1.0, 1.0, size=(nx, ny))
    q = rng.uniform(-1.0, 1.0, size=(nx, ny))
    return PrimitiveState.from_arrays(u, v, phi, theta, q)


def periodic_grid(nx, ny, lx=1.0, ly=1.0):
    return GridSpec.make(nx, ny, 0.0, lx, 0.0, ly)


def mixed_grid(nx, ny, lx=1.0, ly=1.0):
    return GridSpec.make(nx, ny, 0.0, lx, 0.0, ly,
                         bc_x=BoundaryKind.PERIODIC,
                         bc_y=BoundaryKind.EXTRAPOLATE)


def open_grid(nx, ny, lx=1.0, ly=1.0):
    return GridSpec.make(nx, ny, 0.0, lx, 0.0, ly,
                         bc_x=BoundaryKind.EXTRAPOLATE,
                         bc_y=BoundaryKind.EXTRAPOLATE)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
