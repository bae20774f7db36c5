"""Defect spaces, defect indices and maximality tests for finite row contractions."""
from .errors import (CertificationError, CoinvarianceError, CommutatorError,
                     DimensionMismatchError, HypothesisViolation, NoDefectError,
                     NotHermitianError, NotPSDError, NotRowContractionError,
                     RowDefectError)
from .linalg import (DEFAULT_TOL, Subspace, TolerancePolicy, column_space,
                     null_space, numerical_rank, projection_distance, psd_sqrt,
                     subspace_intersect, subspace_join)
from .words import (apply_multiindex, apply_word, enumerate_multiindices,
                    enumerate_words, max_count)
from .tuples import (DefectProfile, OperatorTuple, cp_iterate, cp_map,
                     defect_operator, defect_sequence, defect_space,
                     defect_space_by_join, purity_report, semigroup_split,
                     sum_formula_residual, tuple_from_json, tuple_to_json,
                     validate_tuple)
from .maximality import (departure_consistency, find_annihilator, is_maximal,
                         minimal_polynomial)
from .fock import (FockTruncation, compress_to_coinvariant, creation_tuple,
                   kernel_intersection_dim, poisson_kernel,
                   pure_maximality_battery)
from .drury_arveson import (DATruncation, blaschke_model, dshift,
                            quotient_theta_maximality, rank_one_decomposition_check,
                            submodule_defect, submodule_from_generators,
                            submodule_maximality_experiment, submodule_poisson_test,
                            weight_gate)
from .experiments import nilpotent_shift, random_contractive_tuple

__version__ = '0.1.0'
