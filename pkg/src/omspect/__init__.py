"""omspect: exact finite orthomodular posets, their Boolean-subalgebra posets,
presheaves over them, and the machinery to interrogate all of it."""

from .scalars import QuadScalar, qs
from .rays import Ray, canonicalize_ray, ZeroRayError
from .oml import (FiniteOML, Block, ProjOp, build_oml_from_rays,
                  build_oml_from_greechie, validate_oml, OmlError,
                  IncompleteContextError, IllegalPastingError)
from .bsub import (BooleanSubalg, BSubPoset, BooleanShadow, enumerate_bsub,
                   enumerate_bsub_star, planes_completion, boolean_shadows)
from .posets import FinitePoset, BudgetExceededError
from .presheaves import (Presheaf, GroupPresheaf, GlobalSection, Subobject,
                         NatTrans, global_sections, check_naturality,
                         spectral_presheaf, outer_projection_presheaf,
                         klein4_presheaf, KleinPresheafError)
from .dasein import (SelfAdjointOp, SpectralFamily, daseinise_projection,
                     spectral_order_leq, outer_daseinise_operator,
                     inner_daseinise_operator, outer_global_section,
                     separating_context, delta_check,
                     DaseinisationUndefinedError, OperatorError)
from .measures import (ZeroOneMeasure, State, PresheafMeasure,
                       section_to_measure, measure_to_section,
                       measure_from_state,
                       projection_measure_from_presheaf_measure, z2_states,
                       NotAMeasureError)
from .autos import (PosetAutomorphism, SpectralAutomorphism,
                    poset_automorphisms, restrict_automorphism,
                    extend_automorphism, check_restriction_isomorphism,
                    spectral_automorphisms_over)
from .logic import DownsetAlgebra, downset_algebra, poset_height, satisfies_phi
from .models import ModelBundle, load_model, resolve_model, MODEL_NAMES

__version__ = "0.1.0"
