r"""Two-term fractional plants in state-space form and their simulators.

The plant

.. math::

    a_2 y^{(\alpha)} + a_1 y^{(\beta)} + a_0 y = u

is decomposed, under zero initial conditions, with :math:`x_1 = y` and
:math:`x_2 = y^{(\beta)}` into

.. math::

    x_1^{(\beta)} = x_2, \qquad
    x_2^{(\alpha-\beta)} = -\tfrac{a_0}{a_2} x_1 - \tfrac{a_1}{a_2} x_2
        + \tfrac{1}{a_2} u, \qquad y = x_1.

Two discretisations are provided. :func:`simulate_pse` is the explicit
Grünwald-Letnikov recursion with a finite memory window.
:func:`simulate_cfe` replaces every fractional operator by its degree-9
Tustin CFE filter and keeps a fixed, short history per state.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cfe import cfe_operator
from .errors import InstabilityError, InvalidArgumentError, InvalidModelError
from .glcore import SampledSignal, gl_coefficients

__all__ = [
    "DEFAULT_MEMORY_SAMPLES",
    "FodeModel",
    "StateSpaceModel",
    "SimulationResult",
    "ControllabilityReport",
    "PseStepper",
    "CfeStepper",
    "decompose",
    "simulate_pse",
    "simulate_cfe",
    "controllability",
]

# Short memory principle: at least 100 history points.
DEFAULT_MEMORY_SAMPLES = 100


@dataclass(frozen=True)
class FodeModel:
    """Plant ``a2 y^(alpha) + a1 y^(beta) + a0 y = u``."""

    a2: float
    a1: float
    a0: float
    alpha: float
    beta: float

    def __post_init__(self):
        for name in ("a2", "a1", "a0", "alpha", "beta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidModelError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.a2 == 0.0:
            raise InvalidModelError("a2 must be nonzero")
        if not self.beta > 0:
            raise InvalidModelError(f"beta must be positive, got {self.beta}")
        if not self.alpha > self.beta:
            raise InvalidModelError(
                f"alpha must exceed beta (alpha={self.alpha}, beta={self.beta})"
            )


@dataclass(frozen=True)
class StateSpaceModel:
    """``D^orders[i] x_i = (A x + B u)_i``, ``y = C x``."""

    orders: tuple
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def beta(self):
        return self.orders[0]

    @property
    def delta(self):
        return self.orders[1]

    @property
    def n_states(self):
        return self.B.size

    def _plant_gains(self):
        # the structure fixed by decompose(): A[1] = [-a0/a2, -a1/a2], B[1] = 1/a2
        return -self.A[1, 0], -self.A[1, 1], self.B[1]


def decompose(model):
    """Split a :class:`FodeModel` into its two-state fractional form.

    >>> ss = decompose(FodeModel(a2=0.8, a1=0.5, a0=1.0, alpha=2.2, beta=0.9))
    >>> ss.A.tolist(), ss.B.tolist()
    ([[0.0, 1.0], [-1.25, -0.625]], [0.0, 1.25])

    Only valid for zero initial conditions, which is the sole regime the
    simulators support.
    """
    if not isinstance(model, FodeModel):
        raise InvalidModelError("decompose expects a FodeModel")
    A = np.array([[0.0, 1.0], [-model.a0 / model.a2, -model.a1 / model.a2]])
    B = np.array([0.0, 1.0 / model.a2])
    C = np.array([1.0, 0.0])
    for arr in (A, B, C):
        arr.setflags(write=False)
    return StateSpaceModel((model.beta, model.alpha - model.beta), A, B, C)


@dataclass(frozen=True)
class SimulationResult:
    """Sampled trajectories of one simulation run.

    ``memory_bytes_peak`` counts the history buffers the scheme needs to
    carry from one step to the next (trajectory storage excluded).
    """

    step: float
    t: np.ndarray
    u: np.ndarray
    y: np.ndarray
    x1: np.ndarray
    x2: np.ndarray
    memory_bytes_peak: int
    scheme: str = ""

    def __len__(self):
        return self.t.size


@dataclass(frozen=True)
class ControllabilityReport:
    Q_R: np.ndarray
    rank: int
    tolerance: float


class PseStepper:
    """Explicit GL recursion for the decomposed plant, one step at a time.

    ``advance(u_k)`` maps ``(x_k, u_k)`` to ``x_{k+1}``::

        x1[k+1] = -sum_{j=1}^{m} b_j x1[k+1-j] + T**beta * x2[k]
        x2[k+1] = -sum_{j=1}^{m} c_j x2[k+1-j]
                  + T**delta * (-a0/a2 x1[k] - a1/a2 x2[k] + u[k]/a2)

    with ``m = min(k + 1, L)``, ``b`` and ``c`` the GL weights of orders
    ``beta`` and ``delta = alpha - beta``.
    """

    def __init__(self, ss, step, memory_len_samples, capacity):
        self.step = step
        L = min(memory_len_samples, capacity)
        self._b = gl_coefficients(ss.beta, L).coeffs[1:]
        self._c = gl_coefficients(ss.delta, L).coeffs[1:]
        self._tb = step**ss.beta
        self._td = step**ss.delta
        self._k0, self._k1, self._kb = ss._plant_gains()
        # x_k, x_{k-1}, ..., newest first
        self._h1 = np.zeros(L)
        self._h2 = np.zeros(L)
        self._count = 0

    @property
    def memory_bytes(self):
        return self._h1.nbytes + self._h2.nbytes

    @property
    def state(self):
        return self._h1[0], self._h2[0]

    def advance(self, u_k):
        h1, h2 = self._h1, self._h2
        x1_k, x2_k = h1[0], h2[0]
        self._count += 1
        m = min(self._count, h1.size)
        x1_new = -np.dot(self._b[:m], h1[:m]) + self._tb * x2_k
        v = -self._k0 * x1_k - self._k1 * x2_k + self._kb * u_k
        x2_new = -np.dot(self._c[:m], h2[:m]) + self._td * v
        h1[1:] = h1[:-1]
        h2[1:] = h2[:-1]
        h1[0] = x1_new
        h2[0] = x2_new
        return x1_new, x2_new


class CfeStepper:
    """Tustin-CFE recursion for the decomposed plant, one step at a time.

    Each state is the output of an inverse CFE operator,
    ``x1 = D^-beta x2`` and ``x2 = D^-delta v`` with
    ``v = -a0/a2 x1 - a1/a2 x2 + u/a2``. Both filters have a direct
    feedthrough term, so the two newest states are found together from a
    scalar linear equation; the input entering step ``k+1`` is ``u_k``.
    Only the two direct-form-II delay lines are kept between steps.
    """

    def __init__(self, ss, step):
        self.step = step
        self._f1 = cfe_operator(-ss.beta, step).stream()
        self._f2 = cfe_operator(-ss.delta, step).stream()
        self._k0, self._k1, self._kb = ss._plant_gains()
        g1, g2 = self._f1.gain, self._f2.gain
        self._den = 1.0 + g2 * (self._k0 * g1 + self._k1)
        self._x = (0.0, 0.0)

    @property
    def memory_bytes(self):
        return self._f1.memory_bytes + self._f2.memory_bytes

    @property
    def state(self):
        return self._x

    def advance(self, u_k):
        f1, f2 = self._f1, self._f2
        h1 = f1.pending()
        h2 = f2.pending()
        # x1 = g1 x2 + h1,  x2 = g2 v + h2,  v = -k0 x1 - k1 x2 + kb u
        x2 = (f2.gain * (-self._k0 * h1 + self._kb * u_k) + h2) / self._den
        x1 = f1.gain * x2 + h1
        v = -self._k0 * x1 - self._k1 * x2 + self._kb * u_k
        f1.commit(x2)
        f2.commit(v)
        self._x = (x1, x2)
        return x1, x2


def _check_run(ss, signal, n_steps, initial_state):
    if not isinstance(ss, StateSpaceModel):
        raise InvalidModelError("expected a StateSpaceModel")
    if not isinstance(signal, SampledSignal):
        raise InvalidArgumentError("input must be a SampledSignal")
    if isinstance(n_steps, bool) or int(n_steps) != n_steps or n_steps < 1:
        raise InvalidArgumentError(f"n_steps must be a positive integer, got {n_steps!r}")
    if len(signal) < n_steps:
        raise InvalidArgumentError(
            f"input has {len(signal)} samples, need at least n_steps={n_steps}"
        )
    if initial_state is not None and np.any(np.asarray(initial_state) != 0):
        raise InvalidArgumentError(
            "nonzero initial states are not supported: the state decomposition "
            "holds only for zero initial conditions (zero history)"
        )
    return int(n_steps)


def _run(stepper, signal, n_steps, scheme):
    u = np.array(signal.samples[:n_steps])
    x1 = np.zeros(n_steps)
    x2 = np.zeros(n_steps)
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(n_steps - 1):
            a, b = stepper.advance(u[k])
            if not (math.isfinite(a) and math.isfinite(b)):
                raise InstabilityError(k + 1)
            x1[k + 1] = a
            x2[k + 1] = b
    T = signal.step
    return SimulationResult(
        step=T,
        t=np.arange(n_steps) * T,
        u=u,
        y=x1.copy(),
        x1=x1,
        x2=x2,
        memory_bytes_peak=stepper.memory_bytes,
        scheme=scheme,
    )


def simulate_pse(ss, input, memory_len_samples=DEFAULT_MEMORY_SAMPLES, n_steps=None,
                 initial_state=None):
    """Simulate with the explicit power-series (GL) recursion.

    Parameters
    ----------
    ss : StateSpaceModel
    input : SampledSignal
        Plant input; the simulation step is ``input.step``.
    memory_len_samples : int
        History window ``L`` of each GL sum.
    n_steps : int, optional
        Number of output samples (``k = 0 .. n_steps-1``); defaults to the
        input length.
    initial_state : array_like, optional
        Accepted only if all zero.

    Returns
    -------
    SimulationResult
        ``memory_bytes_peak`` is two buffers of ``min(n_steps, L)`` doubles.
    """
    n_steps = len(input) if n_steps is None else n_steps
    n_steps = _check_run(ss, input, n_steps, initial_state)
    if (isinstance(memory_len_samples, bool) or int(memory_len_samples) != memory_len_samples
            or memory_len_samples < 1):
        raise InvalidArgumentError(
            f"memory_len_samples must be a positive integer, got {memory_len_samples!r}"
        )
    stepper = PseStepper(ss, input.step, int(memory_len_samples), n_steps)
    return _run(stepper, input, n_steps, f"pse(L={int(memory_len_samples)})")


def simulate_cfe(ss, input, n_steps=None, initial_state=None):
    """Simulate with degree-9 Tustin CFE operators.

    Same conventions as :func:`simulate_pse`. History before step 0 is
    zero; the per-state buffers have a fixed length independent of
    ``n_steps``.
    """
    n_steps = len(input) if n_steps is None else n_steps
    n_steps = _check_run(ss, input, n_steps, initial_state)
    return _run(CfeStepper(ss, input.step), input, n_steps, "cfe(p=q=9)")


def controllability(ss, rank_tolerance=None):
    """Controllability matrix ``[B, A B]`` and its numerical rank.

    The rank counts singular values above ``rank_tolerance``, which
    defaults to ``1e-9`` times the largest singular value.
    """
    A = np.asarray(ss.A, dtype=float)
    B = np.asarray(ss.B, dtype=float).reshape(-1)
    Q_R = np.column_stack([B, A @ B])
    sv = np.linalg.svd(Q_R, compute_uv=False)
    if rank_tolerance is None:
        rank_tolerance = 1e-9 * (sv[0] if sv.size else 0.0)
    elif not (math.isfinite(rank_tolerance) and rank_tolerance > 0):
        raise InvalidArgumentError(f"rank_tolerance must be positive, got {rank_tolerance!r}")
    rank = int(np.sum(sv > rank_tolerance))
    return ControllabilityReport(Q_R, rank, float(rank_tolerance))
