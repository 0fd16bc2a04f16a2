r"""Tustin-rule fractional operators by continued fraction expansion.

The order-:math:`r` operator is approximated by

.. math::

    D^r(z) \approx \left(\frac{2}{T}\right)^r \frac{P_9^r(z^{-1})}{Q_9^r(z^{-1})},

where :math:`P_9/Q_9` is the degree-(9, 9) convergent of the continued
fraction of :math:`((1 - x)/(1 + x))^r`, :math:`x = z^{-1}`. The closed-form
coefficients of :math:`Q_9` are integer polynomials in :math:`r`;
:math:`P_9` is :math:`Q_9` with the odd-index coefficients negated, which is
the same as :math:`Q_9` evaluated at :math:`-r`.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ConfigurationError, ConvergenceError, InvalidArgumentError
from .glcore import SampledSignal

__all__ = [
    "DEGREE",
    "CfePolynomials",
    "CfeOperator",
    "IirStream",
    "q9_coefficients",
    "p9_coefficients",
    "cfe_polynomials",
    "cfe_operator",
    "cfe_expand_reference",
]

DEGREE = 9

# Q_i(r) as integer polynomial coefficients, highest power of r first.
_Q9_POLYS = (
    (34459425,),
    (34459425, 0),
    (16216200, 0, -72972900),
    (4729725, 0, -61486425, 0),
    (945945, 0, -23648625, 0, 51081030),
    (135135, 0, -5405400, 0, 33648615, 0),
    (13860, 0, -796950, 0, 9514890, 0, -13097700),
    (990, 0, -76230, 0, 1451835, 0, -5742495, 0),
    (45, 0, -4410, 0, 120330, 0, -909765, 0, 893025),
    (1, 0, -120, 0, 4368, 0, -52480, 0, 147456, 0),
)


def _horner(poly, r):
    acc = 0
    for c in poly:
        acc = acc * r + c
    return acc


def _check_order(r):
    if not math.isfinite(r):
        raise InvalidArgumentError(f"order must be finite, got {r!r}")
    return float(r)


def q9_coefficients(r):
    """Denominator coefficients ``[Q_0, ..., Q_9]`` (powers ``z^0 .. z^-9``)."""
    r = _check_order(r)
    return np.array([_horner(p, r) for p in _Q9_POLYS], dtype=float)


def p9_coefficients(r):
    """Numerator coefficients: ``Q_i`` with the sign of odd ``i`` flipped."""
    q = q9_coefficients(r)
    q[1::2] = -q[1::2]
    return q


@dataclass(frozen=True)
class CfePolynomials:
    order: float
    P: np.ndarray
    Q: np.ndarray

    @property
    def degree(self):
        return DEGREE


def cfe_polynomials(r):
    P = p9_coefficients(r)
    Q = q9_coefficients(r)
    P.setflags(write=False)
    Q.setflags(write=False)
    return CfePolynomials(float(r), P, Q)


class IirStream:
    """Causal IIR filter ``num(z^-1) / den(z^-1)`` run one sample at a time.

    Realised in direct form II: one delay line of ``len(den) - 1`` registers
    holds the filter's entire past, so zero registers mean zero input and
    output history. ``push`` is equivalent to the difference equation
    ``den[0] y_k = sum num_i x_{k-i} - sum_{i>=1} den_i y_{k-i}``.

    For implicit use the update is split in two: :attr:`gain` and
    :meth:`pending` give ``y_k = gain * x_k + pending()`` before ``x_k`` is
    known, and :meth:`commit` then advances the registers.
    """

    def __init__(self, num, den):
        num = np.asarray(num, dtype=float)
        den = np.asarray(den, dtype=float)
        if den[0] == 0.0:
            raise ConfigurationError("leading denominator tap is zero")
        if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
            raise ConfigurationError("filter taps must be finite")
        n = max(num.size, den.size)
        b = np.zeros(n)
        a = np.zeros(n)
        b[: num.size] = num / den[0]
        a[: den.size] = den / den[0]
        self.gain = b[0]
        self._a = a[1:]
        self._c = b[1:] - b[0] * a[1:]
        # w_{k-1}, w_{k-2}, ... newest first
        self._w = np.zeros(n - 1)

    @property
    def memory_bytes(self):
        return self._w.nbytes

    def pending(self):
        return float(np.dot(self._c, self._w))

    def commit(self, x):
        w_new = x - np.dot(self._a, self._w)
        self._w[1:] = self._w[:-1]
        self._w[0] = w_new

    def push(self, x):
        y = self.gain * x + self.pending()
        self.commit(x)
        return y


@dataclass(frozen=True)
class CfeOperator:
    """Discrete order-``r`` operator ``(2/T)**r * P(z^-1) / Q(z^-1)``."""

    source: CfePolynomials
    step: float
    gain: float
    numerator: np.ndarray
    denominator: np.ndarray

    @property
    def order(self):
        return self.source.order

    def stream(self):
        """Fresh zero-history :class:`IirStream` for this operator."""
        return IirStream(self.numerator, self.denominator)

    def apply(self, signal):
        """Filter ``signal`` with all samples before index 0 taken as zero."""
        if not isinstance(signal, SampledSignal):
            raise InvalidArgumentError("signal must be a SampledSignal")
        if signal.step != self.step:
            raise InvalidArgumentError(
                f"signal step {signal.step} does not match operator step {self.step}"
            )
        s = self.stream()
        out = np.array([s.push(x) for x in signal.samples])
        return SampledSignal(signal.step, out)


def cfe_operator(r, T):
    """Build the degree-9 Tustin CFE operator of order ``r`` for step ``T``."""
    if not (math.isfinite(T) and T > 0):
        raise InvalidArgumentError(f"step T must be finite and positive, got {T!r}")
    polys = cfe_polynomials(r)
    if polys.Q[0] == 0.0:
        raise ConfigurationError("leading denominator tap is zero")
    gain = (2.0 / T) ** polys.order
    num = gain * polys.P
    den = polys.Q.copy()
    num.setflags(write=False)
    den.setflags(write=False)
    if not (np.all(np.isfinite(num)) and np.all(np.isfinite(den))):
        raise ConfigurationError(f"operator taps overflow for r={r}, T={T}")
    return CfeOperator(polys, float(T), gain, num, den)


def _tustin_series(r, n):
    """First ``n`` Taylor coefficients of ((1 - x)/(1 + x))**r, exact."""
    a = [Fraction(1)]  # (1 - x)**r
    b = [Fraction(1)]  # (1 + x)**-r
    for k in range(1, n):
        a.append(-a[-1] * (r - k + 1) / k)
        b.append(b[-1] * (-r - k + 1) / k)
    return [sum(a[i] * b[k - i] for i in range(k + 1)) for k in range(n)]


def _series_reciprocal(h):
    inv = [1 / h[0]]
    for k in range(1, len(h)):
        inv.append(-sum(h[i] * inv[k - i] for i in range(1, k + 1)) / h[0])
    return inv


def _poly_add_shifted(p, q, a):
    """``p + a * x * q`` on coefficient lists (lowest power first)."""
    out = list(p) + [Fraction(0)] * max(0, len(q) + 1 - len(p))
    for i, c in enumerate(q):
        out[i + 1] += a * c
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    return out


def cfe_expand_reference(r, depth):
    """Continued-fraction convergent of ``((1 - x)/(1 + x))**r``, in exact rationals.

    The function is expanded as ``1 + a_1 x / (1 + a_2 x / (1 + ...))`` and
    the ``depth``-th convergent ``A/B`` is returned as coefficient lists
    ``(numerator, denominator)`` of :class:`fractions.Fraction`, lowest power
    first, normalised so ``denominator[0] == 1``. An even depth ``2m`` gives
    the degree ``(m, m)`` approximant. ``r`` is converted to a Fraction
    exactly, so no rounding enters.

    Raises :class:`ConvergenceError` when a partial numerator vanishes while
    the remainder is nonzero. A zero remainder means the expansion is
    finite, and the exact rational function is returned for any larger depth.
    """
    if isinstance(depth, bool) or int(depth) != depth or depth < 1:
        raise InvalidArgumentError(f"depth must be a positive integer, got {depth!r}")
    r = Fraction(_check_order(r))
    f = _tustin_series(r, depth + 2)
    partial = []
    for level in range(depth):
        g = f[1:]
        if all(c == 0 for c in g):
            break
        if g[0] == 0:
            raise ConvergenceError(f"expansion breaks down at level {level + 1}")
        a = g[0]
        partial.append(a)
        f = _series_reciprocal([c / a for c in g])
    A_prev, B_prev = [Fraction(1)], [Fraction(0)]
    A, B = [Fraction(1)], [Fraction(1)]
    for a in partial:
        A, A_prev = _poly_add_shifted(A, A_prev, a), A
        B, B_prev = _poly_add_shifted(B, B_prev, a), B
    scale = B[0]
    return [c / scale for c in A], [c / scale for c in B]
