"""Numerical calculus for the harmonic oscillator H = -Lap + |x|^2:
fractional powers, fractional integrals and Hermite-Riesz transforms by two
independent routes (spectral multipliers and pointwise kernels), plus the
bound-fitting verification lab and its CLI.
"""

from .exceptions import (DomainError, NumericalError, PreconditionError,
                         PrincipalValueError)
from .fractional import (KernelSpec, MultiplierSpec, boundary_term_eval,
                         frac_pointwise, fracint_pointwise, kernel_eval,
                         kernel_eval_batch, multiplier_apply, project_Sk)
from .heat import (heat_apply, heat_kernel, heat_kernel_s, heat_of_one,
                   meda_s_of_t, meda_t_of_s, mehler, mehler_partial, mu_density)
from .hermite import (MultiIndex, QuadratureRule, SpectralCoeffs, eval_multi,
                      expand, hermite_eval_1d, quadrature_rule, synthesize,
                      synthesize_many)
from .holder import (GridFunction, HolderReport, norm_ck_alpha, seminorm_holder,
                     seminorm_weight)
from .lab import (BoundFitReport, BoundForm, MollifierSpec, cancellation_integral,
                  fit_bound_constant, l1_row_bound, lemma_campaign, mollify,
                  schauder_ratio, schauder_report)
from .quadrature import QuadratureSpec
from .riesz import (a_deriv_eval, ladder_apply, riesz_kernel_eval,
                    riesz_pointwise, riesz_spectral)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
