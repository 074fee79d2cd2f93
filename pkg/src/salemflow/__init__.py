"""salemflow: desk verification for Salem-type substitution flows."""

from .substitution import (Substitution, SubstitutionMatrix, PerronData,
                           SalemVerdict, build_matrix, is_primitive,
                           characteristic_polynomial, perron_data, iterate,
                           classify_perron, NotPrimitiveError, LengthCapError,
                           InconclusiveClassification)
from .numberfield import (NumberField, FieldElement, ReducedForm,
                          NotReciprocalError)
from .orbit import (SalemNumber, TraceOrbit, AmplitudeData, trace_orbit,
                    amplitude_data, fractional_orbit, empirical_frequency,
                    torus_frequency, sup_orbit_distance, search_small_eta,
                    rational_independence_probe, PeriodNotFoundError,
                    QuadratureNotConvergedError)
from .trigpoly import (TrigPolynomial, SelbergPair, fejer, vaaler, beurling,
                       selberg_pair, bessel_j0, bessel_product_identity,
                       SandwichViolationError)
from .flow import (TileSequence, TwistedIntegralSeries, HolderFit,
                   generate_tiling, twisted_integral, estimate_GR,
                   holder_fit, product_bound_check, WindowOutOfRangeError,
                   DegenerateFitError)
from .bounds import (CaseParams, DeltaResult, TypeEstimate, R0Bound,
                     garsia_bound, select_case_and_delta, gamma_exponent,
                     star_discrepancy, erdos_turan_bound, type_estimate,
                     koksma_check, n0_N0_r0, InvalidCaseError,
                     RationalInputError)

__version__ = "0.1.0"
