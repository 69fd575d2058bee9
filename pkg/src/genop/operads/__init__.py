from .collections import (Collection, Composite, InternalHom, NonFiniteComposite, UnitCollection, collection,
                          collection_from_json, collection_morphisms, compose_collections, compose_maps,
                          composite_is_exact, conv_double, conv_double_kan, conv_unit, empty_collection,
                          internal_hom, monoid_double, product_extension, representable_collection,
                          sum_collections, terminal_collection, unit_collection)
from .structures import (FreeOperadResult, Monoid, OperadData, all_monoid_structures, all_operad_structures,
                         check_monoid, check_operad, free_operad, generator_inclusion, is_operad,
                         monoid_as_operad, monoid_structure, operad_as_lax, operad_as_monoid,
                         operad_from_function, operad_from_json, terminal_operad, unit_operad)
from .basechange import (ColourChange, MateSquare, coreflexivity_report, lax_comparison, lax_unit,
                         left_kan_collection, left_kan_operad, mate_check, presheaf, restrict,
                         strong_comparison)
from .coloured import (Attachment, ColouredMorphism, ColouredOperad, PushoutResult, coloured_from_function,
                       coloured_morphisms, coloured_terminal, coloured_unary, coloured_unit, explicit_pushout,
                       finite_colour_reduction, identity_morphism, is_equivalence, is_essentially_surjective,
                       is_fully_faithful, is_local_fibration_setlevel, pushout_well_defined,
                       underlying_category, universal_property_report)
