"""Value semigroups, Poincare series and Alexander polynomials attached to
finite sets of divisorial valuations of a regular two-dimensional local ring."""
from .dualgraph import DualGraph, HSet, classify, h_set, path, to_dot
from . import errors
from .errors import ValidationError, ValsemError
from .poincare import (CurveMarking, VkExtension, alexander_general_curve, check_tower_numerator, check_curve_numerator,
                       limit_profile, poincare_acampo, vk_extend)
from .resolution import Center, ResolutionModel, build_model, restrict, validate_minimality
from .semigroup import (IndecomposableFamily, MaximalContactData, SemigroupHandle, curve_indecomposables,
                        curve_member, generating_sequence, maximal_contact, monomial_dominating,
                        monomial_for_component)
from .series import FactoredSeries, SparseSeries, expand, hilbert, recover_dims, specialize_at_one

__version__ = "0.1.0"
