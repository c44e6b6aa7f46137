"""Critical-line evaluation engine.

Evaluates the Riemann-Siegel theta function, the Hardy function
Z(t) = e^{i theta(t)} zeta(1/2 + it), and (zeta, zeta') inside the
critical strip, all in 64-bit arithmetic with explicit accuracy
targets:

* theta(t): exact log-Gamma argument formula below t = 10, the standard
  asymptotic expansion above; absolute error <= 1e-10 for t <= 1e5.
* Z(t): Euler-Maclaurin below ``RS_SWITCH_T``, Riemann-Siegel main sum
  plus correction terms C0..C4 above; absolute error <= 1e-8 for
  t <= 1e4 (measured worst case is ~1e-9 on the production switch).
* zeta/zeta': Euler-Maclaurin with a term count chosen from Im s so the
  truncation remainder is <= 1e-9; the derivative is the term-wise
  differentiated series, never a difference quotient.

Everything here is a pure function of its arguments and safe for
unbounded parallel use.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import loggamma

from .errors import EvaluationRangeError, InconsistentZeroError

TWO_PI = 2.0 * math.pi

#: Riemann-Siegel path is defined (and tested) from here up.
RS_MIN_T = 50.0

#: Production switch: Euler-Maclaurin below, Riemann-Siegel above.  At the
#: switch the Riemann-Siegel error has fallen below ~2e-9, so the 1e-8
#: accuracy contract holds on both sides.
RS_SWITCH_T = 500.0

#: Euler-Maclaurin evaluation ceiling for zeta/zeta' (term count grows ~ t).
EM_MAX_IM = 1.0e4

#: Hardy-Z ceiling: above this the rounding of the oscillation phase
#: theta(t) - t log n exceeds the accuracy target.
HARDY_MAX_T = 1.0e7

#: Bernoulli-correction depth of the Euler-Maclaurin formula.
_EM_BERNOULLI_TERMS = 12

#: Relative disagreement between the two |zeta'(rho)| paths that flags a zero.
ZETA_PRIME_CROSSCHECK_RTOL = 1.0e-5

# B_{2j} / (2j)! for j = 1..13 (exact rationals rounded once to float).
_B2J = [Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
        Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
        Fraction(43867, 798), Fraction(-174611, 330), Fraction(854513, 138),
        Fraction(-236364091, 2730), Fraction(8553103, 6)]
_B2J_OVER_FACT = np.array(
    [float(b) / math.factorial(2 * j) for j, b in enumerate(_B2J, start=1)]
)


@dataclass(frozen=True)
class CriticalLineValue:
    """One critical-line sample: t, Z(t), theta(t), zeta(1/2+it), error estimate.

    The two defining identities |zeta| = |z| and zeta = z e^{-i theta}
    hold within ``abs_error_estimate`` (the two sides come from
    independent evaluation paths).
    """

    t: float
    z: float
    theta: float
    zeta: complex
    abs_error_estimate: float


# ---------------------------------------------------------------------------
# Riemann-Siegel theta
# ---------------------------------------------------------------------------

def theta(t):
    """Riemann-Siegel theta, arg Gamma(1/4 + it/2) - (t/2) log pi.

    Scalar or array.  Below |t| = 10 the log-Gamma argument is evaluated
    directly; above, the asymptotic expansion

        t/2 log(t/2pi) - t/2 - pi/8 + 1/(48t) + 7/(5760 t^3)
        + 31/(80640 t^5) + 127/(430080 t^7)

    with the leading terms carried in extended precision so the absolute
    error stays <= 1e-10 up to t = 1e5.  Negative t is handled by the odd
    extension theta(-t) = -theta(t).
    """
    signed = np.asarray(t, dtype=np.float64)
    sign = np.where(signed < 0.0, -1.0, 1.0)
    arr = np.abs(signed)
    out = np.empty_like(arr)
    small = arr < 10.0
    if np.any(small):
        ts = arr[small]
        out[small] = loggamma(0.25 + 0.5j * ts).imag - 0.5 * ts * math.log(math.pi)
    if np.any(~small):
        tl = arr[~small].astype(np.longdouble)
        main = 0.5 * tl * np.log(tl / np.longdouble(TWO_PI)) - 0.5 * tl \
            - np.longdouble(math.pi) / 8
        td = arr[~small]
        tail = 1.0 / (48.0 * td) + 7.0 / (5760.0 * td**3) \
            + 31.0 / (80640.0 * td**5) + 127.0 / (430080.0 * td**7)
        out[~small] = (main + tail).astype(np.float64)
    out = sign * out
    return float(out) if out.ndim == 0 else out


def theta_derivative(t):
    """d theta / dt ~ (1/2) log(t/2pi); the local oscillation rate of Z."""
    arr = np.asarray(t, dtype=np.float64)
    out = 0.5 * np.log(arr / TWO_PI) + 1.0 / (48.0 * arr**2)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# Endpoint function of the Riemann-Siegel saddle and its derivatives
# ---------------------------------------------------------------------------
#
# psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p) is entire (the zeros
# of the denominator at p = 1/4, 3/4 are cancelled by the numerator).
# Correction terms C0..C4 are combinations of its derivatives.  We get
# those derivatives from the Taylor series of numerator and denominator:
# near the removable singularities both constant terms vanish and the
# series are shifted down one slot before dividing, which keeps the
# quotient well-conditioned everywhere.

_PSI_ORDER = 44
_PSI_SINGULAR = (0.25, 0.75)
_PSI_SINGULAR_RADIUS = 0.125


def _psi_series(p0: float, order: int = _PSI_ORDER) -> np.ndarray:
    """Taylor coefficients of psi about p0 (p0 may be a removable singularity)."""
    a = TWO_PI * (p0 * p0 - p0 - 1.0 / 16.0)
    b = TWO_PI * (2.0 * p0 - 1.0)
    c = TWO_PI
    u = np.zeros(order + 2)
    v = np.zeros(order + 2)
    u[0] = math.cos(a)
    v[0] = math.sin(a)
    for k in range(order + 1):
        prev_u = u[k - 1] if k >= 1 else 0.0
        prev_v = v[k - 1] if k >= 1 else 0.0
        u[k + 1] = -(b * v[k] + 2.0 * c * prev_v) / (k + 1)
        v[k + 1] = (b * u[k] + 2.0 * c * prev_u) / (k + 1)
    k = np.arange(order + 2)
    fact = np.cumprod(np.concatenate(([1.0], np.arange(1.0, order + 2))))
    den = (TWO_PI**k) / fact * np.cos(TWO_PI * p0 + k * math.pi / 2.0)
    if any(abs(p0 - s) < 1e-12 for s in _PSI_SINGULAR):
        u = u[1:]  # both constant terms vanish identically at the
        den = den[1:]  # singular points; divide the shifted series
    q = np.zeros(order + 1)
    for k in range(order + 1):
        acc = u[k]
        for j in range(k):
            acc -= q[j] * den[k - j]
        q[k] = acc / den[0]
    return q


def _psi_derivatives(p: float, n_deriv: int) -> np.ndarray:
    """[psi(p), psi'(p), ..., psi^(n_deriv)(p)] to near machine accuracy."""
    p0 = p
    for s in _PSI_SINGULAR:
        if abs(p - s) < _PSI_SINGULAR_RADIUS:
            p0 = s
            break
    q = _psi_series(p0)
    x = p - p0
    out = np.zeros(n_deriv + 1)
    for j in range(n_deriv + 1):
        # Horner in x over the j-th derivative's coefficients q[k] k!/(k-j)!
        acc = 0.0
        for k in range(len(q) - 1, j - 1, -1):
            coef = q[k]
            for i in range(j):
                coef *= k - i
            acc = acc * x + coef
        out[j] = acc
    return out


_PI2 = math.pi**2


def rs_correction_terms(p: float) -> np.ndarray:
    """Correction coefficients C0..C4 at fractional position p in [0, 1]."""
    d = _psi_derivatives(p, 12)
    return np.array([
        d[0],
        -d[3] / (96.0 * _PI2),
        d[2] / (64.0 * _PI2) + d[6] / (18432.0 * _PI2**2),
        -d[1] / (64.0 * _PI2) - d[5] / (3840.0 * _PI2**2)
        - d[9] / (5308416.0 * _PI2**3),
        d[0] / (128.0 * _PI2) + 19.0 * d[4] / (24576.0 * _PI2**2)
        + 11.0 * d[8] / (5898240.0 * _PI2**3)
        + d[12] / (2038431744.0 * _PI2**4),
    ])


_CHEB_DEGREE = 40
_cheb_cache: list[np.ndarray] | None = None


def _correction_chebs() -> list[np.ndarray]:
    """Chebyshev interpolants of C0..C4 on p in [0, 1] (built once, ~1e-12)."""
    global _cheb_cache
    if _cheb_cache is None:
        def component(i):
            def f(x):
                xs = np.atleast_1d(x)
                return np.array([rs_correction_terms((xx + 1.0) / 2.0)[i] for xx in xs])
            return f
        _cheb_cache = [chebyshev.chebinterpolate(component(i), _CHEB_DEGREE)
                       for i in range(5)]
    return _cheb_cache


# ---------------------------------------------------------------------------
# Hardy Z: Riemann-Siegel path
# ---------------------------------------------------------------------------

_RS_BLOCK = 4096


def hardy_z_riemann_siegel(t):
    """Z(t) by the Riemann-Siegel main sum plus corrections C0..C4.

    Valid for t >= RS_MIN_T.  Measured absolute error: ~3e-7 at t = 50,
    ~1e-8 at t = 200, < 2e-9 for t >= 500, rounding-dominated ~1e-10 near
    t = 1e5 (the expansion is asymptotic; accuracy improves with t).
    """
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(arr < RS_MIN_T):
        raise EvaluationRangeError(f"Riemann-Siegel path requires t >= {RS_MIN_T}")
    out = np.empty_like(arr)
    chebs = _correction_chebs()
    for lo in range(0, arr.size, _RS_BLOCK):
        ts = arr[lo:lo + _RS_BLOCK]
        a = np.sqrt(ts / TWO_PI)
        n_main = np.floor(a).astype(np.int64)
        p = a - n_main
        n_max = int(n_main.max())
        n = np.arange(1, n_max + 1, dtype=np.float64)
        th = theta(ts)
        phases = th[:, None] - ts[:, None] * np.log(n)[None, :]
        terms = np.cos(phases) / np.sqrt(n)[None, :]
        terms[n[None, :] > n_main[:, None]] = 0.0
        main = 2.0 * np.sum(terms, axis=1)
        x = (ts / TWO_PI) ** -0.5
        pm = 2.0 * p - 1.0
        corr = chebyshev.chebval(pm, chebs[0])
        xk = x.copy()
        for i in range(1, 5):
            corr = corr + chebyshev.chebval(pm, chebs[i]) * xk
            xk = xk * x
        sign = np.where(n_main % 2 == 1, 1.0, -1.0)
        out[lo:lo + _RS_BLOCK] = main + sign * (ts / TWO_PI) ** -0.25 * corr
    return float(out[0]) if np.ndim(t) == 0 else out


def _rs_error_bound(t):
    """Conservative empirical envelope of the C0..C4 truncation error.

    Exponent -3 is deliberately shallower than the formal -13/4 of the
    next omitted term; measured errors sit 3x-15x under this curve across
    [50, 1e4].  The additive floor covers phase rounding at large t.
    """
    arr = np.asarray(t, dtype=np.float64)
    return 2.0e-3 * (arr / TWO_PI) ** -3.0 + 4.0e-15 * (1.0 + np.abs(theta(arr)))


# ---------------------------------------------------------------------------
# Euler-Maclaurin zeta, zeta', and the EM Hardy-Z path
# ---------------------------------------------------------------------------

def _em_term_count(im_abs: float) -> int:
    # keeps |s| / (2 pi N) below ~0.3 so 12 Bernoulli terms reach ~1e-13
    return max(32, int(math.ceil(0.55 * (im_abs + 20.0))))

def _em_remainder_bound(s: complex, n_terms: int) -> float:
    """Rigorous truncation bound: first omitted Bernoulli term times
    |s + 2M + 1| / (sigma + 2M + 1)."""
    m = _EM_BERNOULLI_TERMS
    log_b = math.log(abs(float(_B2J[m]) / math.factorial(2 * m + 2)))
    log_prod = 0.0
    for i in range(2 * m + 1):
        log_prod += math.log(abs(s + i))
    log_rem = log_b + log_prod - (s.real + 2 * m + 1) * math.log(n_terms) \
        + math.log(abs(s + 2 * m + 1) / (s.real + 2 * m + 1))
    return math.exp(log_rem) if log_rem < 700 else math.inf


def _zeta_em_raw(s: complex, n_terms: int) -> tuple[complex, complex]:
    """(zeta(s), zeta'(s)) by Euler-Maclaurin with n_terms main-sum terms.

    The derivative differentiates every term of the same expansion, so
    both values share one truncation structure.
    """
    n = np.arange(1, n_terms, dtype=np.float64)
    logn = np.log(n)
    pow_ns = np.exp(-s * logn)
    z = pow_ns.sum()
    dz = -(logn * pow_ns).sum()

    log_cap = math.log(n_terms)
    cap_ms = np.exp(-s * log_cap)  # N^{-s}
    tail = cap_ms * n_terms / (s - 1.0)
    z += tail + 0.5 * cap_ms
    dz += -log_cap * tail - cap_ms * n_terms / (s - 1.0) ** 2 - 0.5 * log_cap * cap_ms

    rising = s
    recip = 1.0 / s
    for j in range(1, _EM_BERNOULLI_TERMS + 1):
        term = _B2J_OVER_FACT[j - 1] * rising * np.exp((1.0 - s - 2 * j) * log_cap)
        z += term
        dz += term * (recip - log_cap)
        if j < _EM_BERNOULLI_TERMS:
            rising = rising * (s + 2 * j - 1) * (s + 2 * j)
            recip = recip + 1.0 / (s + 2 * j - 1) + 1.0 / (s + 2 * j)
    return complex(z), complex(dz)


def zeta_and_derivative(s: complex) -> tuple[complex, complex]:
    """(zeta(s), zeta'(s)) for 0 < Re s <= 2, |Im s| <= 1e4.

    Term count is chosen from |Im s| so the Euler-Maclaurin truncation
    remainder is below 1e-9 (checked; grows the sum if needed).  The
    derivative is the differentiated series, not a difference quotient.

    Raises:
        EvaluationRangeError: s outside the supported strip or height.
    """
    s = complex(s)
    if not (0.0 < s.real <= 2.0) or abs(s.imag) > EM_MAX_IM:
        raise EvaluationRangeError(
            f"zeta_and_derivative supports 0 < Re s <= 2, |Im s| <= {EM_MAX_IM:g}; got {s}"
        )
    n_terms = _em_term_count(abs(s.imag))
    while _em_remainder_bound(s, n_terms) > 1.0e-9:
        n_terms *= 2
        if n_terms > 10_000_000:
            raise EvaluationRangeError(f"Euler-Maclaurin cannot reach 1e-9 at s={s}")
    return _zeta_em_raw(s, n_terms)


def zeta_on_critical_line(t) -> np.ndarray:
    """zeta(1/2 + it) for an array of ordinates (vector Euler-Maclaurin).

    Each element uses its own term count, so values are independent of
    how the input array was chunked.
    """
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(np.abs(arr) > EM_MAX_IM):
        raise EvaluationRangeError(f"Euler-Maclaurin path requires |t| <= {EM_MAX_IM:g}")
    out = np.empty(arr.shape, dtype=np.complex128)
    counts = np.maximum(32, np.ceil(0.55 * (np.abs(arr) + 20.0))).astype(np.int64)
    for lo in range(0, arr.size, _RS_BLOCK):
        ts = arr[lo:lo + _RS_BLOCK]
        nc = counts[lo:lo + _RS_BLOCK]
        n_max = int(nc.max())
        n = np.arange(1, n_max, dtype=np.float64)
        logn = np.log(n)
        s_col = 0.5 + 1j * ts[:, None]
        mat = np.exp(-s_col * logn[None, :])
        mat[n[None, :] >= nc[:, None]] = 0.0
        z = mat.sum(axis=1)
        log_cap = np.log(nc.astype(np.float64))
        s = 0.5 + 1j * ts
        cap_ms = np.exp(-s * log_cap)
        z += cap_ms * nc / (s - 1.0) + 0.5 * cap_ms
        rising = s.copy()
        for j in range(1, _EM_BERNOULLI_TERMS + 1):
            z += _B2J_OVER_FACT[j - 1] * rising * np.exp((1.0 - s - 2 * j) * log_cap)
            if j < _EM_BERNOULLI_TERMS:
                rising = rising * (s + 2 * j - 1) * (s + 2 * j)
        out[lo:lo + _RS_BLOCK] = z
    return out


def hardy_z_euler_maclaurin(t):
    """Z(t) = Re(e^{i theta} zeta(1/2 + it)) via the Euler-Maclaurin path."""
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(arr < 0.0):
        raise EvaluationRangeError("hardy_z requires t >= 0")
    vals = (np.exp(1j * theta(arr)) * zeta_on_critical_line(arr)).real
    return float(vals[0]) if np.ndim(t) == 0 else vals


def hardy_z(t):
    """Hardy's Z(t), real-valued; |Z(t)| = |zeta(1/2 + it)|.

    Euler-Maclaurin below RS_SWITCH_T, Riemann-Siegel above; absolute
    error <= 1e-8 for 0 <= t <= 1e4 (and ~1e-10 rounding floor at 1e5).
    Accepts scalars or arrays.
    """
    arr = np.atleast_1d(np.asarray(t, dtype=np.float64))
    if np.any(arr < 0.0):
        raise EvaluationRangeError("hardy_z requires t >= 0")
    if np.any(arr > HARDY_MAX_T):
        raise EvaluationRangeError(
            f"hardy_z accuracy target unattainable beyond t = {HARDY_MAX_T:g}"
        )
    out = np.empty_like(arr)
    low = arr < RS_SWITCH_T
    if np.any(low):
        out[low] = hardy_z_euler_maclaurin(arr[low])
    if np.any(~low):
        out[~low] = hardy_z_riemann_siegel(arr[~low])
    return float(out[0]) if np.ndim(t) == 0 else out


def hardy_z_error_estimate(t) -> float:
    """Absolute error envelope of hardy_z at ordinate t."""
    t = float(t)
    if t < RS_SWITCH_T:
        s = complex(0.5, t)
        return _em_remainder_bound(s, _em_term_count(t)) + 2.0e-15 * (1.0 + abs(theta(t)))
    return float(_rs_error_bound(t))


def critical_line_value(t: float) -> CriticalLineValue:
    """Sample Z, theta and zeta at one ordinate through both engine paths."""
    t = float(t)
    th = theta(t)
    z = hardy_z(t)
    zeta_val = complex(zeta_on_critical_line(np.array([t]))[0])
    est = hardy_z_error_estimate(t) + _em_remainder_bound(complex(0.5, t), _em_term_count(t)) \
        + 4.0e-15 * (1.0 + abs(th))
    return CriticalLineValue(t=t, z=z, theta=th, zeta=zeta_val, abs_error_estimate=est)


# ---------------------------------------------------------------------------
# |zeta'| at a zero, two ways
# ---------------------------------------------------------------------------

def hardy_z_prime(gamma: float, base_step: float = 1.0e-4) -> float:
    """Z'(gamma) by a 5-point central difference of hardy_z.

    The step is the base step scaled down by the local oscillation rate
    theta'(gamma), which sets the curvature scale of Z near the zero.
    """
    h = base_step / max(1.0, theta_derivative(gamma))
    stencil = gamma + h * np.array([-2.0, -1.0, 1.0, 2.0])
    z = hardy_z(stencil)
    return float((z[0] - 8.0 * z[1] + 8.0 * z[2] - z[3]) / (12.0 * h))


def zeta_prime_at_zero(gamma: float) -> float:
    """|zeta'(1/2 + i gamma)| at a refined zero ordinate, cross-checked.

    Computes (a) |Z'(gamma)| by finite differences of hardy_z and
    (b) the modulus of the differentiated Euler-Maclaurin series, returns
    (b), and raises if they disagree by more than 1e-5 relative (the
    zero is then flagged for re-refinement rather than silently used).
    """
    gamma = float(gamma)
    fd = abs(hardy_z_prime(gamma))
    _, dz = zeta_and_derivative(complex(0.5, gamma))
    analytic = abs(dz)
    rel = abs(fd - analytic) / analytic if analytic > 0 else math.inf
    if rel > ZETA_PRIME_CROSSCHECK_RTOL:
        raise InconsistentZeroError(gamma, rel)
    return analytic
