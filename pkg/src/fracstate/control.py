"""Fractional PI^lambda D^delta controller and unity-feedback loop simulation.

The control law is ``u = K e + Ti D^-lambda e + Td D^delta e``. Either
differintegral can be evaluated with the Grünwald-Letnikov power series
(:class:`PSE`) or with the degree-9 Tustin CFE filters (:class:`CFE`).

A fractional derivative term with a weak integral action can destabilise
the loop; :func:`simulate_closed_loop` reports this as an
:class:`~fracstate.errors.InstabilityError` rather than checking designs
up front.
"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .cfe import cfe_operator
from .errors import InstabilityError, InvalidArgumentError, InvalidModelError
from .glcore import GlStream, SampledSignal
from .statespace import (
    DEFAULT_MEMORY_SAMPLES,
    CfeStepper,
    FodeModel,
    PseStepper,
    SimulationResult,
    decompose,
)

__all__ = [
    "ControllerSpec",
    "PSE",
    "CFE",
    "Controller",
    "controller_output",
    "simulate_closed_loop",
]


@dataclass(frozen=True)
class PSE:
    """Power-series scheme; ``memory_samples=None`` keeps the full history."""

    memory_samples: Optional[int] = DEFAULT_MEMORY_SAMPLES

    def __post_init__(self):
        m = self.memory_samples
        if m is not None and (isinstance(m, bool) or int(m) != m or m < 1):
            raise InvalidArgumentError(f"memory_samples must be a positive integer, got {m!r}")


@dataclass(frozen=True)
class CFE:
    """Degree-9 Tustin continued-fraction scheme."""


@dataclass(frozen=True)
class ControllerSpec:
    K: float = 0.0
    Ti: float = 0.0
    Td: float = 0.0
    lam: float = 1.0
    delta: float = 1.0

    def __post_init__(self):
        for name in ("K", "Ti", "Td", "lam", "delta"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidModelError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.lam < 0 or self.delta < 0:
            raise InvalidModelError("integral and derivative orders must be >= 0")
        if self.lam == 0 and self.Ti != 0:
            raise InvalidModelError("lambda = 0 with Ti != 0 duplicates the proportional term")


def _operator_stream(r, T, scheme, capacity):
    if isinstance(scheme, PSE):
        return GlStream(r, T, scheme.memory_samples, capacity=capacity)
    if isinstance(scheme, CFE):
        return cfe_operator(r, T).stream()
    raise InvalidArgumentError(f"unknown scheme {scheme!r}")


class Controller:
    """Streaming controller: ``push(e_k)`` returns ``u_k`` using ``e_0 .. e_k``."""

    def __init__(self, spec, step, scheme, capacity):
        self.spec = spec
        self._int = (
            _operator_stream(-spec.lam, step, scheme, capacity) if spec.Ti != 0 else None
        )
        self._der = (
            _operator_stream(spec.delta, step, scheme, capacity) if spec.Td != 0 else None
        )

    @property
    def memory_bytes(self):
        return sum(s.memory_bytes for s in (self._int, self._der) if s is not None)

    def push(self, e):
        u = self.spec.K * e
        if self._int is not None:
            u += self.spec.Ti * self._int.push(e)
        if self._der is not None:
            u += self.spec.Td * self._der.push(e)
        return u


def controller_output(ctrl, error, scheme):
    """Controller output for a whole error signal, zero history before it."""
    if not isinstance(error, SampledSignal):
        raise InvalidArgumentError("error must be a SampledSignal")
    c = Controller(ctrl, error.step, scheme, capacity=len(error))
    return SampledSignal(error.step, [c.push(e) for e in error.samples])


def simulate_closed_loop(plant, ctrl, setpoint, scheme, n_steps=None):
    """Unity negative feedback of ``ctrl`` around ``plant``.

    Each step measures ``y_k``, forms ``e_k = r_k - y_k``, evaluates
    ``u_k`` and advances the plant to ``k + 1`` with ``u_k``; the plant
    uses the same discretisation scheme as the controller. The returned
    ``u`` is the controller output and ``memory_bytes_peak`` counts plant
    and controller buffers together.
    """
    if not isinstance(plant, FodeModel):
        raise InvalidModelError("plant must be a FodeModel")
    if not isinstance(setpoint, SampledSignal):
        raise InvalidArgumentError("setpoint must be a SampledSignal")
    n = len(setpoint) if n_steps is None else n_steps
    if isinstance(n, bool) or int(n) != n or not 1 <= n <= len(setpoint):
        raise InvalidArgumentError(f"n_steps must be in 1..{len(setpoint)}, got {n_steps!r}")
    n = int(n)
    T = setpoint.step
    ss = decompose(plant)
    if isinstance(scheme, PSE):
        L = n if scheme.memory_samples is None else scheme.memory_samples
        stepper = PseStepper(ss, T, L, n)
        label = f"pse(L={'full' if scheme.memory_samples is None else L})"
    elif isinstance(scheme, CFE):
        stepper = CfeStepper(ss, T)
        label = "cfe(p=q=9)"
    else:
        raise InvalidArgumentError(f"unknown scheme {scheme!r}")
    controller = Controller(ctrl, T, scheme, capacity=n)

    u = np.zeros(n)
    x1 = np.zeros(n)
    x2 = np.zeros(n)
    with np.errstate(over="ignore", invalid="ignore"):
        _loop(stepper, controller, setpoint.samples, u, x1, x2)
    return SimulationResult(
        step=T,
        t=np.arange(n) * T,
        u=u,
        y=x1.copy(),
        x1=x1,
        x2=x2,
        memory_bytes_peak=stepper.memory_bytes + controller.memory_bytes,
        scheme=label,
    )


def _loop(stepper, controller, r, u, x1, x2):
    n = u.size
    for k in range(n):
        x1[k], x2[k] = stepper.state
        u[k] = controller.push(r[k] - x1[k])
        if not math.isfinite(u[k]):
            raise InstabilityError(k, f"non-finite controller output at step {k}")
        if k + 1 < n:
            a, b = stepper.advance(u[k])
            if not (math.isfinite(a) and math.isfinite(b)):
                raise InstabilityError(k + 1)
