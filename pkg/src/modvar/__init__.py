"""modvar: homological invariants of quiver-algebra modules by exact linear
algebra, and a semicontinuity / genericity testing lab for one-parameter
module families."""

from .algebra import (AlgebraSpec, FDAlgebra, build_algebra,
                      check_truncation_stable, injective_module,
                      projective_module, regular_module, simple_module)
from .ar import (E_invariant, E_invariant_both, end_dim, g_vector,
                 g_vector_hom_ext, is_brick, is_rigid, is_tau_rigid, tau)
from .errors import (InputError, PoleError, ResourceLimitError,
                     SpecializationError)
from .exactla import DEFAULT_PRIME, Field
from .generic import (BruteTable, CoupledJordanSampler, FamilySampler,
                      GenericEstimate, HereditarySampler, InvariantMap,
                      SemicontReport, brick_no_dense_orbit_check,
                      brute_force_generic, decomp_conditions, generic_value,
                      load_scenario, run_scenario, semicontinuity_check,
                      theorem_1_5_check)
from .homology import (BarContext, DEFAULT_CELL_LIMIT, ext_dim, ext_dim_bar,
                       euler_truncated, euler_truncated_bar, hom_basis,
                       hom_dim, hom_omega, minimal_presentation,
                       proj_mult_in_resolution, syzygy, top_multiplicities)
from .quiver import Arrow, Path, Quiver, path_from_names, trivial_path
from .rep import (GroupElement, IsoResult, ModuleFamily, Rep, check_relations,
                  conjugate, direct_sum, iso_test, load_module, random_rep,
                  rep_from_json, rep_to_json)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
