"""Simulation of fractional-order plants in state-space form.

Grünwald-Letnikov power-series and Tustin continued-fraction operators,
the two-state decomposition of ``a2 y^(alpha) + a1 y^(beta) + a0 y = u``,
controllability analysis and a fractional PI^lambda D^delta controller.
"""

from .cfe import (
    CfeOperator,
    CfePolynomials,
    cfe_expand_reference,
    cfe_operator,
    cfe_polynomials,
    p9_coefficients,
    q9_coefficients,
)
from .control import CFE, PSE, ControllerSpec, controller_output, simulate_closed_loop
from .errors import (
    ConfigurationError,
    ConvergenceError,
    FracStateError,
    InstabilityError,
    InvalidArgumentError,
    InvalidModelError,
)
from .glcore import (
    GlCoefficients,
    SampledSignal,
    gl_coefficients,
    gl_differintegrate,
    pse_operator_coefficients,
)
from .statespace import (
    ControllabilityReport,
    FodeModel,
    SimulationResult,
    StateSpaceModel,
    controllability,
    decompose,
    simulate_cfe,
    simulate_pse,
)

__version__ = "0.1.0"
