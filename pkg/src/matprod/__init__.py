"""Exact laws, samplers and correlation kernels for squared singular values of
products of truncated Haar orthogonal, unitary and symplectic matrices."""

from .core import (ChainParams, ConstraintError, DegenerateConfigError, as_config,
                   cauchy_det, interlaces, log_vandermonde, partition,
                   validate_chain_params)
from .density import (JacobiParams, JackDensityData, KernelParams, build_mu,
                      dixon_check, jacobi_log_density, kernel_log_density,
                      process_log_density, product_log_density_integral,
                      product_log_density_jack, selberg, selberg_jack_average)
from .jack import jack_eval, jack_moment, jack_principal, schur_eval

__version__ = "0.1.0"
