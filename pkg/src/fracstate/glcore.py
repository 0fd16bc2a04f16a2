r"""Grünwald-Letnikov differintegration of uniformly sampled signals.

The operator of real order :math:`r` (derivative for :math:`r > 0`,
integral for :math:`r < 0`) is approximated on a grid of step :math:`T` by

.. math::

    (D^r f)_k = T^{-r} \sum_{j=0}^{\min(k, L)} b_j^{(r)} f_{k-j},

where :math:`b_0 = 1`, :math:`b_j = (1 - (r + 1)/j)\, b_{j-1}` and :math:`L`
is the memory length in samples (short memory principle). With
:math:`L \ge k` the sum is the untruncated power-series expansion of
:math:`((1 - z^{-1})/T)^r`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError

__all__ = [
    "SampledSignal",
    "GlCoefficients",
    "GlStream",
    "gl_coefficients",
    "gl_differintegrate",
    "pse_operator_coefficients",
]


def _frozen_array(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


def _check_order(r):
    if not math.isfinite(r):
        raise InvalidArgumentError(f"order must be finite, got {r!r}")
    return float(r)


def _check_step(T):
    if not (math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"step T must be finite and positive, got {T!r}")
    return float(T)


def _check_count(n, name):
    if isinstance(n, bool) or int(n) != n or n < 1:
        raise InvalidArgumentError(f"{name} must be a positive integer, got {n!r}")
    return int(n)


@dataclass(frozen=True)
class SampledSignal:
    """Samples ``f(0), f(T), f(2T), ...`` on a uniform grid.

    The sample array is copied and made read-only on construction.
    """

    step: float
    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "step", _check_step(self.step))
        arr = np.array(self.samples, dtype=float).ravel()
        if arr.size == 0:
            raise InvalidArgumentError("signal must have at least one sample")
        if not np.all(np.isfinite(arr)):
            raise InvalidArgumentError("signal samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "samples", arr)

    def __len__(self):
        return self.samples.size

    @property
    def t(self):
        """Time grid ``k * T``."""
        return np.arange(self.samples.size) * self.step

    @classmethod
    def from_function(cls, f, step, n):
        """Sample ``f`` at ``k * step`` for ``k = 0 .. n-1``."""
        t = np.arange(n) * step
        return cls(step, f(t))


@dataclass(frozen=True)
class GlCoefficients:
    """Binomial weights ``b_0 .. b_n`` of the order-``r`` difference."""

    order: float
    coeffs: np.ndarray

    @property
    def truncation(self):
        return self.coeffs.size - 1

    def __len__(self):
        return self.coeffs.size


def gl_coefficients(r, n):
    """Return the ``n + 1`` Grünwald-Letnikov weights of order ``r``.

    Parameters
    ----------
    r : float
        Operator order, negative for integration.
    n : int
        Index of the last weight; must be at least 1.

    Returns
    -------
    GlCoefficients
        Weights produced by ``b_j = (1 - (r + 1) / j) * b_{j-1}``.
        The recurrence is evaluated in that exact form so integer orders
        give exact zeros past index ``r``.
    """
    r = _check_order(r)
    n = _check_count(n, "n")
    b = np.empty(n + 1)
    b[0] = 1.0
    for j in range(1, n + 1):
        b[j] = (1.0 - (r + 1.0) / j) * b[j - 1]
    return GlCoefficients(r, _frozen_array(b))


def pse_operator_coefficients(r, T, L_samples):
    """Tap weights ``T**-r * b_j``, ``j = 0 .. L_samples``, of the PSE operator.

    Convolving a zero-history signal with these taps is exactly
    :func:`gl_differintegrate` with the same memory length.
    """
    T = _check_step(T)
    gl = gl_coefficients(r, L_samples)
    return GlCoefficients(gl.order, _frozen_array(T ** (-gl.order) * gl.coeffs))


def gl_differintegrate(signal, r, memory_len_samples):
    """Apply the order-``r`` GL operator to a sampled signal.

    Output sample ``k`` is ``T**-r * sum_{j=0}^{min(k, L)} b_j f_{k-j}`` with
    ``L = memory_len_samples``. Samples before index 0 are taken as zero.
    The result has the same step and length as ``signal``.
    """
    if not isinstance(signal, SampledSignal):
        raise InvalidArgumentError("signal must be a SampledSignal")
    L = _check_count(memory_len_samples, "memory_len_samples")
    f = signal.samples
    n = f.size
    L = min(L, n - 1) if n > 1 else 1
    taps = pse_operator_coefficients(r, signal.step, L).coeffs
    rev = f[::-1]
    out = np.empty(n)
    for k in range(n):
        m = min(k, L)
        # rev[n-1-k : n-1-k+m+1] == f[k], f[k-1], ..., f[k-m]
        start = n - 1 - k
        out[k] = np.dot(taps[: m + 1], rev[start : start + m + 1])
    return SampledSignal(signal.step, out)


class GlStream:
    """Sample-by-sample GL operator with a bounded history buffer.

    ``push(x)`` consumes the newest input sample and returns the newest
    output sample; the sequence of outputs equals :func:`gl_differintegrate`
    applied to the sequence of inputs. ``memory_len_samples=None`` keeps the
    whole history, which needs ``capacity`` to size the buffer.
    """

    def __init__(self, r, T, memory_len_samples=None, capacity=None):
        if memory_len_samples is None:
            if capacity is None:
                raise InvalidArgumentError("full-memory stream needs a capacity")
            L = _check_count(capacity, "capacity")
        else:
            L = _check_count(memory_len_samples, "memory_len_samples")
            if capacity is not None:
                L = min(L, _check_count(capacity, "capacity"))
        self.order = _check_order(r)
        self.step = _check_step(T)
        self.taps = pse_operator_coefficients(r, T, L).coeffs
        # newest sample first
        self._hist = np.zeros(L + 1)
        self._count = 0

    @property
    def memory_bytes(self):
        return self._hist.nbytes

    def push(self, x):
        h = self._hist
        h[1:] = h[:-1]
        h[0] = x
        self._count += 1
        m = min(self._count, h.size)
        return float(np.dot(self.taps[:m], h[:m]))
