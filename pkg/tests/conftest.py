import numpy as np
import pytest
from scipy.linalg import expm

from grassgeo.grassmann import Plane, Shape
from grassgeo.sampling import complex_normal, make_rng

SHAPES = [(1, 1), (1, 2), (2, 2), (2, 3)]


@pytest.fixture
def rng():
    return make_rng(20240611)


def expm_frame(b, t=1.0):
    """Oracle: first n columns of expm(t (0 B; -B^H 0)), by dense Padé."""
    b = np.asarray(b, dtype=complex)
    n, m = b.shape
    gen = np.zeros((n + m, n + m), dtype=complex)
    gen[:n, n:] = b
    gen[n:, :n] = -b.conj().T
    return expm(t * gen)[:, :n]


def chart_of_frame(frame):
    """Oracle: Z with span(frame) = span(I; -Z^H), via least squares."""
    frame = np.asarray(frame)
    n = frame.shape[1]
    top, bottom = frame[:n], frame[n:]
    sol = np.linalg.lstsq(top.T, bottom.T, rcond=None)[0].T  # bottom @ inv(top)
    return -sol.conj().T


def random_plane(rng, shape: Shape) -> Plane:
    q, _ = np.linalg.qr(complex_normal(rng, (shape.N, shape.n)))
    return Plane(q)


def random_b(rng, n, m, smax=None):
    b = complex_normal(rng, (n, m))
    if smax is not None:
        b *= smax / np.linalg.norm(b, 2)
    return b


def ball_distance_oracle(a, z):
    """Hyperbolic distance on the unit ball of C^m (n = 1) through the
    Möbius automorphism sending ``a`` to 0: ``artanh |phi_a(z)|``."""
    a = np.asarray(a, dtype=complex).ravel()
    z = np.asarray(z, dtype=complex).ravel()
    aa = np.vdot(a, a).real
    if aa == 0:
        return np.arctanh(np.linalg.norm(z))
    pa = a * np.vdot(a, z) / aa  # projection of z onto a
    qa = z - pa
    sa = np.sqrt(1 - aa)
    phi = (a - pa - sa * qa) / (1 - np.vdot(a, z))
    return np.arctanh(np.linalg.norm(phi))


_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture
def verdict(request):
    """Record one acceptance line: ``verdict(number, ok, detail)``."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, {})

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, {})
    if lines:
        terminalreporter.section("acceptance criteria")
        for number in sorted(lines):
            terminalreporter.write_line(lines[number])
