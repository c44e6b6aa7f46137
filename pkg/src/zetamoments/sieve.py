"""Sieve tables and weighted divisor sums.

Builds per-integer arithmetic data (Mobius mu, von Mangoldt Lambda,
smallest prime factor, log n) up to a limit, and on top of it the
coefficient vectors the moment pipeline consumes:

* ``tau_k``            -- k-th iterated divisor function tau_k(n)
                          (ordered k-tuples with product n)
* ``tau_k_truncated``  -- tau_k(n; xi), tuples with every factor <= xi
* ``lambda2``          -- (mu * log^2)(n)
* ``lambda_star_log``  -- (Lambda * log)(n)

Dirichlet convolutions use the plain "for each d, for each multiple of d"
double loop: O(limit log limit) work, exact in 64-bit floats as long as
every value stays an integer below 2**53 (asserted).  Scalar sums over n
are Kahan-compensated and accumulated in ascending n.
"""

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import SieveSizeError
from .summation import kahan_sum

#: Sanity cap on table memory; ~25 bytes per integer across the four arrays.
DEFAULT_MEMORY_BUDGET = 4 << 30

_BYTES_PER_ENTRY = 25

#: Largest integer exactly representable in a float64.
_EXACT_FLOAT_LIMIT = float(2**53)


@dataclass(frozen=True)
class SieveTables:
    """Immutable per-integer arithmetic data for 1 <= n <= limit.

    Arrays have length ``limit + 1``; index 0 is an unused sentinel.
    Safe to share across threads/processes after construction.

    Attributes:
        limit: largest tabulated integer.
        mobius: int8, mu(n) in {-1, 0, 1}.
        von_mangoldt: float64, log p on prime powers p^m, else 0.
        smallest_prime_factor: int64, spf(n) for n >= 2; spf(1) = 1.
        log_n: float64, log n (log_n[0] = 0 sentinel).
    """

    limit: int
    mobius: np.ndarray
    von_mangoldt: np.ndarray
    smallest_prime_factor: np.ndarray
    log_n: np.ndarray

    def primes(self) -> np.ndarray:
        """Primes up to limit (n >= 2 with spf(n) == n)."""
        n = np.arange(self.limit + 1)
        return n[(n >= 2) & (self.smallest_prime_factor == n)]


@dataclass(frozen=True)
class CoefficientVector:
    """Real coefficients indexed by n <= limit; index 0 unused.

    Attributes:
        limit: largest index.
        values: float64 array of length limit + 1.
        label: human-readable descriptor (which function, which k / xi).
        support_complete: the function is identically zero beyond limit
            (true for truncated divisor vectors, whose support ends at
            floor(xi)^k); indexing past limit then returns 0 instead of
            raising.
    """

    limit: int
    values: np.ndarray
    label: str
    support_complete: bool = False

    def __getitem__(self, n: int) -> float:
        if n < 1:
            raise IndexError(f"coefficient index must be >= 1, got {n}")
        if n > self.limit:
            if self.support_complete:
                return 0.0
            raise IndexError(f"{self.label} tabulated only to {self.limit}, asked for {n}")
        return float(self.values[n])


def build_sieve(limit: int, memory_budget: int = DEFAULT_MEMORY_BUDGET) -> SieveTables:
    """Populate all sieve arrays up to ``limit`` exactly.

    mu and spf are sieved in integer arithmetic; Lambda and log n use the
    standard library log (machine precision).

    Raises:
        SieveSizeError: limit < 2, or the tables would exceed the budget.
    """
    if limit < 2:
        raise SieveSizeError(f"sieve limit must be >= 2, got {limit}")
    need = (limit + 1) * _BYTES_PER_ENTRY
    if need > memory_budget:
        raise SieveSizeError(
            f"sieve to {limit} needs ~{need / 2**20:.0f} MiB, "
            f"budget is {memory_budget / 2**20:.0f} MiB"
        )

    spf = np.zeros(limit + 1, dtype=np.int64)
    spf[1] = 1
    for p in range(2, limit + 1):
        if spf[p] == 0:
            sl = spf[p::p]
            sl[sl == 0] = p
    primes = np.arange(limit + 1)[(np.arange(limit + 1) >= 2) & (spf == np.arange(limit + 1))]

    mobius = np.ones(limit + 1, dtype=np.int8)
    mobius[0] = 0
    for p in primes:
        mobius[p::p] *= -1
        sq = int(p) * int(p)
        if sq <= limit:
            mobius[sq::sq] = 0

    von_mangoldt = np.zeros(limit + 1, dtype=np.float64)
    for p in primes:
        logp = math.log(int(p))
        q = int(p)
        while q <= limit:
            von_mangoldt[q] = logp
            q *= int(p)

    log_n = np.zeros(limit + 1, dtype=np.float64)
    log_n[1:] = np.log(np.arange(1, limit + 1, dtype=np.float64))

    return SieveTables(limit, mobius, von_mangoldt, spf, log_n)


def _require_limit(tables: SieveTables, limit: int) -> None:
    if limit > tables.limit:
        raise SieveSizeError(f"need tables to {limit}, built to {tables.limit}")
    if limit < 1:
        raise SieveSizeError(f"limit must be >= 1, got {limit}")


def lambda2(tables: SieveTables, limit: int | None = None) -> CoefficientVector:
    """(mu * log^2)(n) = sum over d|n of mu(n/d) (log d)^2, by divisor loop."""
    limit = tables.limit if limit is None else limit
    _require_limit(tables, limit)
    values = np.zeros(limit + 1, dtype=np.float64)
    mob = tables.mobius[: limit + 1].astype(np.float64)
    for d in range(2, limit + 1):  # d = 1 contributes (log 1)^2 = 0
        values[d::d] += mob[1 : limit // d + 1] * tables.log_n[d] ** 2
    return CoefficientVector(limit, values, "lambda2")


def lambda_star_log(tables: SieveTables, limit: int | None = None) -> CoefficientVector:
    """(Lambda * log)(n) = sum over d|n of Lambda(d) log(n/d).

    Only prime-power d contribute, so the divisor loop runs over the
    support of Lambda.
    """
    limit = tables.limit if limit is None else limit
    _require_limit(tables, limit)
    values = np.zeros(limit + 1, dtype=np.float64)
    support = np.nonzero(tables.von_mangoldt[: limit + 1] > 0)[0]
    for d in support:
        d = int(d)
        values[d::d] += tables.von_mangoldt[d] * tables.log_n[1 : limit // d + 1]
    return CoefficientVector(limit, values, "lambda_star_log")


def _ones_convolve(prev: np.ndarray) -> np.ndarray:
    """Dirichlet convolution with the all-ones vector: out[m] = sum_{d|m} prev[d]."""
    limit = prev.size - 1
    out = np.zeros_like(prev)
    for d in range(1, limit + 1):
        out[d::d] += prev[d]
    return out


def _check_exact(values: np.ndarray, what: str) -> None:
    top = float(values.max(initial=0.0))
    if top >= _EXACT_FLOAT_LIMIT:
        raise OverflowError(f"{what} reaches {top:.3e} >= 2^53; no longer exact in float64")


def tau_k(k: int, limit: int) -> CoefficientVector:
    """tau_k(n): number of ordered k-tuples of positive integers with product n.

    Computed as k-1 successive Dirichlet convolutions of the all-ones
    vector with itself.  Values are exact integers held in float64
    (guarded against 2^53 overflow).
    """
    if k < 1:
        raise ValueError(f"tau_k needs k >= 1, got {k}")
    if limit < 1:
        raise SieveSizeError(f"limit must be >= 1, got {limit}")
    values = np.ones(limit + 1, dtype=np.float64)
    values[0] = 0.0
    for _ in range(k - 1):
        values = _ones_convolve(values)
        _check_exact(values, f"tau_{k}")  # checked per pass: exactness, not just the result
    return CoefficientVector(limit, values, f"tau_{k}")


def tau_k_truncated(k: int, xi: float,
                    memory_budget: int = DEFAULT_MEMORY_BUDGET) -> CoefficientVector:
    """tau_k(n; xi): ordered k-tuples with product n and every factor <= xi.

    Realised as k-1 truncated convolutions of the indicator of
    {n <= floor(xi)}; the result lives on n <= floor(xi)^k.  ``k = 0`` is
    allowed and returns the convolution identity [n == 1] (the convention
    that makes the k = 1 moment sums well-defined).
    """
    if k < 0:
        raise ValueError(f"tau_k_truncated needs k >= 0, got {k}")
    if xi < 1:
        raise ValueError(f"xi must be >= 1, got {xi}")
    cap = int(math.floor(xi))
    limit = max(cap**k, 1)
    if (limit + 1) * 8 > memory_budget:
        raise SieveSizeError(
            f"tau_{k}(.; {xi}) needs a vector of {limit + 1} floats; over budget"
        )
    values = np.zeros(limit + 1, dtype=np.float64)
    values[1] = 1.0
    for _ in range(k):
        out = np.zeros_like(values)
        for d in range(1, cap + 1):
            out[d::d] += values[1 : limit // d + 1]
        values = out
        _check_exact(values, f"tau_{k}(.; {xi})")
    return CoefficientVector(limit, values, f"tau_{k}(.;xi={xi:g})", support_complete=True)


def divisor_sum(k: int, l: int, x: float) -> float:
    """sum_{n <= x} tau_k(n) tau_l(n) / n, compensated, ascending n."""
    if x < 1:
        raise ValueError(f"x must be >= 1, got {x}")
    limit = int(math.floor(x))
    tk = tau_k(k, limit)
    tl = tk if l == k else tau_k(l, limit)
    n = np.arange(1, limit + 1, dtype=np.float64)
    return kahan_sum(tk.values[1:] * tl.values[1:] / n)


def truncated_square_sum(k: int, xi: float) -> float:
    """sum_{n <= xi^k} tau_k(n; xi)^2 / n, compensated, ascending n."""
    vec = tau_k_truncated(k, xi)
    n = np.arange(1, vec.limit + 1, dtype=np.float64)
    return kahan_sum(vec.values[1:] ** 2 / n)


def write_coefficients_csv(vec: CoefficientVector, path) -> None:
    """Dump a coefficient vector as CSV with header ``n,value``."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "value"])
        for n in range(1, vec.limit + 1):
            writer.writerow([n, repr(float(vec.values[n]))])
