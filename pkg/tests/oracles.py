"""Independent high-precision oracles (mpmath), used only by tests.

The production code never imports this module.  Frozen constants in the
tests were produced by these helpers at 30 decimal digits; the slower
checks call them live.
"""

import mpmath

mpmath.mp.dps = 25


def theta_oracle(t: float) -> float:
    return float(mpmath.siegeltheta(t))


def hardy_z_oracle(t: float) -> float:
    return float(mpmath.siegelz(t))


def zeta_oracle(s: complex, derivative: int = 0) -> complex:
    return complex(mpmath.zeta(mpmath.mpc(s.real, s.imag), derivative=derivative))


def zero_ordinate_oracle(n: int) -> float:
    return float(mpmath.zetazero(n).imag)


def hardy_z_prime_oracle(t: float, h: float = 1.0e-5) -> float:
    """5-point finite difference of the oracle Z, fully independent of the
    package's differencing (different evaluator, different step)."""
    z = [mpmath.siegelz(t + k * h) for k in (-2, -1, 1, 2)]
    return float((z[0] - 8 * z[1] + 8 * z[2] - z[3]) / (12 * h))
