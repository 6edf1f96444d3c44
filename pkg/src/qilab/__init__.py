"""qilab: a numerical laboratory for the asymptotic structure of
quasi-isometries of R^n.

Self-maps are symbolic expression trees with exact evaluation; estimators
sample deterministic annulus/direction schedules to certify quasi-isometry
constants, decide membership in the sublinear and power-law displacement
subgroups, measure commutation defects and torsion orders, and reproduce
the disjoint-ball and clamp constructions at desk scale.
"""

__version__ = "0.1.0"

from .errors import (AlphaMismatch, AlphaOutOfRange, ConfigError,
                     DimensionMismatch, EmptyPlan, EmptyProfile,
                     InsufficientAnnuli, NoSuitableR0, NotExactlyInvertible,
                     NotInH, NotInIntersection, NotOutsideH, ParseError,
                     QILabError, UnsupportedDimension, WitnessTooSparse)
from .maps import (Affine, BallGadget, BlockRotation, Clamp, Compose,
                   Dilation, GadgetData, Identity, LinearOverLog, LogDrift,
                   MapExpr, PolarExp, Reflection, Translation,
                   affine_normal_form, as_point, compose, compose_power,
                   dimension_of, displacement, evaluate, exact_inverse,
                   unit_ball_drift)
from .dsl import (doc_to_dict, dict_to_map, dumps_map, load_map_file,
                  loads_map, map_to_dict, parse_map_doc)
from .sampling import (DEFAULT_SEED, SamplingPlan, canonical_directions,
                       default_plan, distinguished_directions, gadget_plan,
                       geometric_plan, plan_from_dict, profile_directions,
                       sphere_directions)
from .asymptotics import (CONFIRMED, INCONCLUSIVE, REFUTED, DEFAULT_H_TOL,
                          HAlphaCertificate, ProfileEntry, RatioProfile,
                          Verdict, check_certificate, difference_profile,
                          limsup_liminf, membership_H, membership_H_alpha,
                          ratio_profile)
from .certify import (K_GRID, QICertificate, check_qi_inequalities,
                      check_quasi_surjectivity, estimate_qi_constants,
                      grid_ceil)
from .group_ops import (CenterRule, CentralizerRule, WitnessSequence,
                        build_ball_gadget, build_witness_sequence,
                        commutation_defect, composition_certificate,
                        conjugation_certificate, coset_equal_mod_H,
                        gadget_commutator_ratios, gadget_witness_points,
                        torsion_order_mod_H)
from .topology import (DEFAULT_NEIGHBORHOOD_MARGIN, NeighborhoodSpec,
                       clamp_to_alpha, density_witness,
                       neighborhood_contains, refine_intersection)
from .reporting import (build_report, canonical_json, digest, map_digest,
                        plan_digest, profile_csv, report_json,
                        write_profile_csv)
