"""Compensated and fixed-shape reductions.

Two reduction primitives are used throughout the toolkit:

* ``kahan_sum`` -- serial Kahan-Babuska (Neumaier) summation in the order
  given.  Used for sums over the integers n, which are accumulated in
  ascending n.
* ``pairwise_sum`` -- a binary-tree reduction whose shape depends only on
  the input length.  Used for per-zero reductions so that results are
  bit-identical no matter how the per-zero work was parallelised.
"""

import numpy as np


def kahan_sum(values) -> float:
    """Neumaier-compensated sum of a real sequence, in the given order."""
    total = 0.0
    comp = 0.0
    for x in np.asarray(values, dtype=float):
        t = total + x
        if abs(total) >= abs(x):
            comp += (total - t) + x
        else:
            comp += (x - t) + total
        total = t
    return total + comp


def kahan_sum_complex(values) -> complex:
    """Compensated complex sum: Neumaier on real and imaginary parts."""
    arr = np.asarray(values, dtype=complex)
    return complex(kahan_sum(arr.real), kahan_sum(arr.imag))


class KahanAccumulator:
    """Streaming compensated accumulator; works on scalars or ndarrays.

    Classic Kahan update, applied elementwise, so a batch of independent
    compensated sums can advance in lockstep (one ``add`` per summand,
    in a fixed order).
    """

    def __init__(self, shape=(), dtype=np.float64):
        self.sum = np.zeros(shape, dtype=dtype)
        self._comp = np.zeros(shape, dtype=dtype)

    def add(self, x) -> None:
        y = x - self._comp
        t = self.sum + y
        self._comp = (t - self.sum) - y
        self.sum = t

    def total(self):
        return self.sum.copy() if self.sum.shape else self.sum.item()


def pairwise_sum(values):
    """Fixed-shape pairwise-tree sum of a 1-d real or complex array.

    The tree is the complete binary tree over the input padded with zeros
    to the next power of two, so the reduction order is a function of the
    length alone.  Deterministic across thread counts and chunkings.
    """
    arr = np.asarray(values)
    if arr.size == 0:
        return arr.dtype.type(0) if arr.dtype.kind in "fc" else 0.0
    work = arr.astype(arr.dtype, copy=True)
    while work.size > 1:
        if work.size % 2:
            work = np.append(work, work.dtype.type(0))
        work = work[0::2] + work[1::2]
    return work[0].item()
