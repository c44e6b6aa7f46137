"""Moment quantities over zero sets.

Computes the normalised 2k-th moment of |zeta'(rho)| over zeros up to
height T, the two weighted zero-sums

    sigma1 = sum zeta'(rho) A(rho)^{k-1} conj(A(rho))^k
    sigma2 = sum |A(rho)|^{2k}

for the Dirichlet polynomial A(s) = sum_{n <= xi} n^{-s}, the resulting
Hoelder lower bound |sigma1|^{2k} / sigma2^{2k-1}, the divisor-sum side
of the diagonal main term, growth-exponent fits, and large-value scans.

Under the operating assumption that all zeros lie on the critical line,
conj(A(rho)) = A(1 - rho); both forms are available and tested against
each other.  Per-zero reductions use the fixed-shape pairwise tree so
reports are bit-identical across thread counts.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import EvaluationRangeError, NumericalInconsistencyError
from .parallel import deterministic_map, resolve_threads
from .sieve import build_sieve, tau_k_truncated, truncated_square_sum
from .summation import kahan_sum, kahan_sum_complex, pairwise_sum
from .zeros import ZeroSet
from .zeta import zeta_and_derivative, zeta_prime_at_zero
from .explicit import zero_power_sums_batch

#: Chunk length for farming per-zero work to a process pool.  Fixed, so
#: chunk boundaries (and hence float results) never depend on the pool size.
ZERO_CHUNK = 512

#: Feasibility cap for the quadratic-pair interchange check.
INTERCHANGE_MAX_SUPPORT = 200


@dataclass(frozen=True)
class MomentReport:
    """Moment quantities for one (k, T, xi) experiment.

    ``jk`` is the zero-count-normalised moment; ``jk_unnormalized`` the
    raw sum of |zeta'(rho)|^{2k}.  ``sigma1``/``sigma2``/``holder_bound``
    are None when only the moment was requested.
    """

    k: int
    T: float
    xi: float | None
    n_zeros: int
    jk: float
    jk_unnormalized: float
    sigma1: complex | None = None
    sigma2: float | None = None
    holder_bound: float | None = None

    def to_dict(self) -> dict:
        d = {
            "k": self.k,
            "T": self.T,
            "xi": self.xi,
            "n_zeros": self.n_zeros,
            "jk": self.jk,
            "jk_unnormalized": self.jk_unnormalized,
            "sigma2": self.sigma2,
            "holder_bound": self.holder_bound,
        }
        d["sigma1"] = None if self.sigma1 is None else \
            {"re": self.sigma1.real, "im": self.sigma1.imag}
        return d


# ---------------------------------------------------------------------------
# Per-zero zeta' profile
# ---------------------------------------------------------------------------

def _zeta_prime_chunk(gammas: np.ndarray) -> np.ndarray:
    out = np.empty(gammas.size, dtype=np.complex128)
    for i, g in enumerate(gammas):
        zeta_prime_at_zero(g)  # cross-check both paths; raises on disagreement
        _, dz = zeta_and_derivative(complex(0.5, g))
        out[i] = dz
    return out


def zeta_prime_profile(zeros: ZeroSet, threads=1) -> np.ndarray:
    """Cross-checked zeta'(rho) for every zero, as a complex array.

    Each ordinate runs the finite-difference/analytic agreement check;
    an InconsistentZeroError from any flagged zero aborts the whole map
    (carrying the offending gamma).
    """
    g = zeros.gammas
    chunks = [g[i:i + ZERO_CHUNK] for i in range(0, g.size, ZERO_CHUNK)]
    parts = deterministic_map(_zeta_prime_chunk, chunks, resolve_threads(threads))
    return np.concatenate(parts) if parts else np.empty(0, dtype=np.complex128)


# ---------------------------------------------------------------------------
# Dirichlet polynomial
# ---------------------------------------------------------------------------

def dirichlet_poly(xi: float, s: complex) -> complex:
    """A(s) = sum_{n <= xi} n^{-s}, compensated, n^{-s} = e^{-s log n}."""
    if xi < 1.0:
        raise EvaluationRangeError(f"dirichlet_poly requires xi >= 1, got {xi}")
    cap = int(math.floor(xi))
    n = np.arange(1, cap + 1, dtype=np.float64)
    return kahan_sum_complex(np.exp(-complex(s) * np.log(n)))


def dirichlet_poly_at_zeros(xi: float, gammas: np.ndarray) -> np.ndarray:
    """A(1/2 + i gamma) for an array of ordinates (fixed order over n)."""
    if xi < 1.0:
        raise EvaluationRangeError(f"dirichlet_poly requires xi >= 1, got {xi}")
    cap = int(math.floor(xi))
    acc = np.ones(gammas.size, dtype=np.complex128)  # n = 1 term
    for n in range(2, cap + 1):
        ln = math.log(n)
        acc = acc + math.exp(-0.5 * ln) * np.exp(-1j * gammas * ln)
    return acc


# ---------------------------------------------------------------------------
# Moments and zero-sums
# ---------------------------------------------------------------------------

def moment_jk(zeros: ZeroSet, k: int, zeta_prime_abs=None, threads=1) -> MomentReport:
    """J_k over a zero set: jk = (1/N) sum |zeta'(rho)|^{2k}.

    ``zeta_prime_abs`` may carry a precomputed |zeta'| profile (reused
    across k); otherwise the cross-checked profile is computed here.
    """
    if k < 0:
        raise EvaluationRangeError(f"moment order k must be >= 0, got {k}")
    if len(zeros) == 0:
        raise EvaluationRangeError("moment_jk needs a nonempty zero set")
    if zeta_prime_abs is None:
        zeta_prime_abs = np.abs(zeta_prime_profile(zeros, threads))
    weights = np.asarray(zeta_prime_abs, dtype=np.float64) ** (2 * k)
    jk_un = pairwise_sum(weights)
    return MomentReport(
        k=k, T=zeros.T, xi=None, n_zeros=len(zeros),
        jk=jk_un / len(zeros), jk_unnormalized=jk_un,
    )


def sigma1_direct(zeros: ZeroSet, k: int, xi: float,
                  zeta_prime=None, threads=1) -> complex:
    """sum over zeros of zeta'(rho) A(rho)^{k-1} conj(A(rho))^k.

    conj(A(rho)) realises A(1 - rho) via the critical-line identity
    1 - rho = conj(rho).
    """
    if k < 1:
        raise EvaluationRangeError(f"sigma1 requires k >= 1, got {k}")
    if zeta_prime is None:
        zeta_prime = zeta_prime_profile(zeros, threads)
    a = dirichlet_poly_at_zeros(xi, zeros.gammas)
    terms = zeta_prime * a ** (k - 1) * np.conj(a) ** k
    return pairwise_sum(terms)


def sigma2_direct(zeros: ZeroSet, k: int, xi: float) -> float:
    """sum over zeros of |A(rho)|^{2k} (nonnegative by construction)."""
    if k < 1:
        raise EvaluationRangeError(f"sigma2 requires k >= 1, got {k}")
    a = dirichlet_poly_at_zeros(xi, zeros.gammas)
    return pairwise_sum(np.abs(a) ** (2 * k))


def sigma2_complex_path(zeros: ZeroSet, k: int, xi: float) -> complex:
    """sigma2 via the complex product A(rho)^k A(1-rho)^k (reality check)."""
    a = dirichlet_poly_at_zeros(xi, zeros.gammas)
    return pairwise_sum(a**k * np.conj(a) ** k)


def holder_lower_bound(sigma1: complex, sigma2: float, k: int) -> float:
    """|sigma1|^{2k} / sigma2^{2k-1}, evaluated in log space.

    Raises:
        EvaluationRangeError: sigma2 <= 0 (the bound is undefined).
    """
    if sigma2 <= 0.0:
        raise EvaluationRangeError("holder_lower_bound undefined for sigma2 <= 0")
    mag = abs(sigma1)
    if mag == 0.0:
        return 0.0
    return math.exp(2 * k * math.log(mag) - (2 * k - 1) * math.log(sigma2))


# ---------------------------------------------------------------------------
# Divisor-sum side
# ---------------------------------------------------------------------------

def s11_divisor_sum(k: int, xi: float) -> float:
    """Double divisor sum over mn <= xi^k, m <= xi^{k-1} of
    tau_{k-1}(m; xi) tau_k(mn; xi) / (mn).

    For k = 1 the tau_0 convention (identity at n = 1) reduces this to
    the harmonic sum over n <= xi.  Dominates the truncated square sum.
    """
    if k < 1:
        raise EvaluationRangeError(f"s11 requires k >= 1, got {k}")
    tm = tau_k_truncated(k - 1, xi)
    tk = tau_k_truncated(k, xi)
    cap = tk.limit
    cap_m = tm.limit
    partials = []
    for m in range(1, cap_m + 1):
        w = tm.values[m]
        if w == 0.0:
            continue
        n_max = cap // m
        along = tk.values[m:: m][:n_max]  # tau_k(m*n; xi), n = 1..n_max
        n = np.arange(1, along.size + 1, dtype=np.float64)
        partials.append(kahan_sum(w * along / (m * n)))
    return kahan_sum(partials)


def sigma2_diagonal(zeros: ZeroSet, k: int, xi: float) -> float:
    """Diagonal main term: N(T) * sum_{n <= xi^k} tau_k(n; xi)^2 / n."""
    return len(zeros) * truncated_square_sum(k, xi)


def interchange_offdiagonal_pairs(k: int, xi: float):
    """Off-diagonal (m, n) pairs of the interchanged sigma2 double sum.

    Returns (m, n, weight, lam) arrays over support pairs m < n, where
    weight = tau_k(m; xi) tau_k(n; xi) / n and lam = Lambda(n/m) when the
    ratio is an integer (0 otherwise).  The explicit-formula main term
    contributes -(T/2pi) * weight * lam per pair, so nonzero entries all
    enter with a minus sign.
    """
    tk = tau_k_truncated(k, xi)
    support = np.nonzero(tk.values > 0.0)[0]
    if support.size > INTERCHANGE_MAX_SUPPORT:
        raise EvaluationRangeError(
            f"interchange check over {support.size} support points exceeds "
            f"the feasibility cap {INTERCHANGE_MAX_SUPPORT}"
        )
    tables = build_sieve(max(int(support.max()), 2))
    ms, ns, weights, lams = [], [], [], []
    for i, m in enumerate(support):
        for n in support[i + 1:]:
            ms.append(int(m))
            ns.append(int(n))
            weights.append(tk.values[n] * tk.values[m] / float(n))
            lams.append(float(tables.von_mangoldt[n // m]) if n % m == 0 else 0.0)
    return (np.array(ms), np.array(ns), np.array(weights, dtype=np.float64),
            np.array(lams, dtype=np.float64))


def sigma2_interchange_check(zeros: ZeroSet, k: int, xi: float) -> float:
    """Relative residual of the interchanged sigma2 identity.

    Rebuilds sigma2 as diagonal + 2 Re sum_{m<n} weight * sum_rho (n/m)^rho
    with the inner zero-sum evaluated directly over the zero set, and
    returns |interchanged - direct| / direct.  Pure algebra: residuals
    above ~1e-8 indicate a numerics bug, not an approximation.
    """
    if int(math.floor(xi)) ** k > INTERCHANGE_MAX_SUPPORT:
        raise EvaluationRangeError(
            f"interchange check needs floor(xi)^k <= {INTERCHANGE_MAX_SUPPORT}, "
            f"got {int(math.floor(xi)) ** k}"
        )
    direct = sigma2_direct(zeros, k, xi)
    diagonal = sigma2_diagonal(zeros, k, xi)
    ms, ns, weights, _ = interchange_offdiagonal_pairs(k, xi)
    if ms.size:
        ratios = ns.astype(np.float64) / ms.astype(np.float64)
        inner = zero_power_sums_batch(zeros, ratios)
        off = 2.0 * kahan_sum(weights * inner.real)
    else:
        off = 0.0
    return abs((diagonal + off) - direct) / direct


# ---------------------------------------------------------------------------
# Fits and scans
# ---------------------------------------------------------------------------

def scaling_fit(points) -> float:
    """Least-squares slope of log(value) against log(log T).

    Matches the conjectured growth form value ~ (log T)^exponent; the
    returned slope is the fitted exponent.
    """
    pts = [(float(t), float(v)) for t, v in points]
    if len(pts) < 3:
        raise EvaluationRangeError(f"scaling_fit needs >= 3 points, got {len(pts)}")
    if any(v <= 0.0 for _, v in pts):
        raise EvaluationRangeError("scaling_fit needs positive values")
    ts = np.array([t for t, _ in pts])
    if np.unique(ts).size != ts.size or np.any(ts <= 1.0):
        raise EvaluationRangeError("scaling_fit needs distinct T values > 1")
    xs = np.log(np.log(ts))
    if np.ptp(xs) < 1.0e-12:
        raise EvaluationRangeError("degenerate abscissae: log log T values coincide")
    ys = np.log(np.array([v for _, v in pts]))
    return float(np.polyfit(xs, ys, 1)[0])


def large_value_scan(zeros: ZeroSet, A: float, zeta_prime_abs=None, threads=1):
    """Zeros whose |zeta'(rho)| reaches the threshold (log gamma)^A.

    Returns an ascending-gamma list of (gamma, |zeta'(rho)|) pairs.
    """
    if A < 0.0:
        raise EvaluationRangeError(f"large_value_scan requires A >= 0, got {A}")
    if zeta_prime_abs is None:
        zeta_prime_abs = np.abs(zeta_prime_profile(zeros, threads))
    thresholds = np.log(zeros.gammas) ** A
    hits = np.nonzero(zeta_prime_abs >= thresholds)[0]
    return [(float(zeros.gammas[i]), float(zeta_prime_abs[i])) for i in hits]


# ---------------------------------------------------------------------------
# Orchestration
# ---------------------------------------------------------------------------

def default_xi(T: float, k: int) -> float:
    """The pipeline default xi = T^(1/(4k))."""
    return T ** (1.0 / (4.0 * k))


def compute_moment_report(zeros: ZeroSet, k: int, xi: float, threads=1) -> MomentReport:
    """Full report: J_k, sigma1, sigma2 and the Hoelder bound for one (k, xi).

    Verifies the exact Hoelder inequality jk_unnormalized >= holder_bound
    on the computed values and refuses to emit a report that violates it.
    """
    zp = zeta_prime_profile(zeros, threads)
    base = moment_jk(zeros, k, zeta_prime_abs=np.abs(zp))
    s1 = sigma1_direct(zeros, k, xi, zeta_prime=zp)
    s2 = sigma2_direct(zeros, k, xi)
    bound = holder_lower_bound(s1, s2, k)
    if base.jk_unnormalized < bound:
        raise NumericalInconsistencyError(
            f"Hoelder violation at k={k}, T={zeros.T}, xi={xi}: "
            f"sum |zeta'|^{2 * k} = {base.jk_unnormalized!r} < bound {bound!r}"
        )
    return MomentReport(
        k=k, T=zeros.T, xi=float(xi), n_zeros=len(zeros),
        jk=base.jk, jk_unnormalized=base.jk_unnormalized,
        sigma1=s1, sigma2=s2, holder_bound=bound,
    )
