import numpy as np
import pytest

# one line per acceptance criterion, printed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record(criterion: int, passed: bool, detail: str) -> None:
    line = f"criterion {criterion:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def annulus_green_series(center, r, R, z, t, modes=256):
    """Green function of an annulus from the Fourier solution of the Dirichlet problem.

    ``G = log|z - t| - h`` where ``h`` is harmonic with ``h = log|zeta - t|`` on
    both circles; each Fourier mode of ``h`` is interpolated between the two
    circles with ``sinh`` profiles and the constant mode with ``log``.
    """
    theta = 2 * np.pi * np.arange(2 * modes) / (2 * modes)
    e = np.exp(1j * theta)
    f = np.fft.fft(np.log(np.abs(center + R * e - t))) / (2 * modes)
    g = np.fft.fft(np.log(np.abs(center + r * e - t))) / (2 * modes)
    n = np.fft.fftfreq(2 * modes, 1.0 / (2 * modes))
    w = np.asarray(z, dtype=complex) - center
    rho, phase = np.abs(w), np.angle(w)
    H = np.log(R / r)
    out = (f[0] * np.log(rho / r) + g[0] * np.log(R / rho)) / H
    for k in range(1, 2 * modes):
        m = n[k]
        if abs(m) >= modes:
            continue
        a = abs(m)
        prof_out = np.sinh(a * np.log(rho / r)) / np.sinh(a * H)
        prof_in = np.sinh(a * np.log(R / rho)) / np.sinh(a * H)
        out = out + (f[k] * prof_out + g[k] * prof_in) * np.exp(1j * m * phase)
    return np.log(np.abs(w + center - t)) - np.real(out)
