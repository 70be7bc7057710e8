"""Sudden-quench work statistics from traces of Haar unitaries.

The work characteristic function of a sudden quench in a translation-invariant
free-fermion chain is a Toeplitz determinant, hence the characteristic
function of a linear statistic ``sum_r (a_r Re Tr U^r + b_r Im Tr U^r)`` of a
Haar unitary.  This package samples that statistic, evaluates the
determinant exactly, inverts it to a density and runs the Gaussian-core
diagnostics on the result.
"""

__version__ = "0.1.0"

from ._errors import ConfigError, NumericalError
from .chains import (
    QuenchXY,
    XXChain,
    block_symbol_check,
    bogoliubov_angle,
    charfn_xy_product,
    effective_dispersion,
    initial_energy,
    loschmidt_xy_product,
    xx_mode_coefficients,
)
from .diagnostics import (
    fd_histogram,
    moment_report,
    qq_normal,
    scatter_correlation,
    theory_ellipse,
)
from .distribution import (
    CharfnTable,
    DensityTable,
    gaussian_charfn,
    gaussian_reference,
    invert_charfn,
    mc_density,
)
from .sampling import (
    SampleConfig,
    SampleMode,
    TraceVector,
    sample_haar_unitary,
    sample_surrogate_traces,
    sample_traces,
    traces_of_powers,
)
from .toeplitz import (
    charfn_toeplitz,
    symbol_from_dispersion,
    szego_asymptote,
    szego_deviation,
    toeplitz_determinant,
)
from .work import (
    ModeCoefficients,
    mixed_moment_mc,
    sample_work,
    skewness_proxy,
    theoretical_variance,
    work_value,
    work_values,
)

__all__ = [
    "__version__",
    "ConfigError",
    "NumericalError",
    "QuenchXY",
    "XXChain",
    "block_symbol_check",
    "bogoliubov_angle",
    "charfn_xy_product",
    "effective_dispersion",
    "initial_energy",
    "loschmidt_xy_product",
    "xx_mode_coefficients",
    "fd_histogram",
    "moment_report",
    "qq_normal",
    "scatter_correlation",
    "theory_ellipse",
    "CharfnTable",
    "DensityTable",
    "gaussian_charfn",
    "gaussian_reference",
    "invert_charfn",
    "mc_density",
    "SampleConfig",
    "SampleMode",
    "TraceVector",
    "sample_haar_unitary",
    "sample_surrogate_traces",
    "sample_traces",
    "traces_of_powers",
    "charfn_toeplitz",
    "symbol_from_dispersion",
    "szego_asymptote",
    "szego_deviation",
    "toeplitz_determinant",
    "ModeCoefficients",
    "mixed_moment_mc",
    "sample_work",
    "skewness_proxy",
    "theoretical_variance",
    "work_value",
    "work_values",
]
