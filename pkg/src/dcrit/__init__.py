"""Exact symbolic toolkit for algebraic d-critical loci at chart level."""
from .bundles import (Cocycle, OverlapDatum, RatFunc, Transition, assemble_canonical, cocycle_check,
                      orientable, p1_cocycle, p1_degree, tensor)
from .chartcmp import (ChartEmbedding, check_jphi_laws, compose_embeddings, jphi, minimize_chart, qform,
                       stabilize, verify_embedding)
from .dcritical import (CriticalChart, TorusAction, check_equivariant, critical_chart, fixed_chart,
                        local_constancy, product_chart, pullback_section, scale_section, section_closed,
                        section_equal, section_space, validate_dcritical)
from .groebner import (Ideal, contains, ideal_ops, normal_form, quotient_basis, radical_membership,
                       radical_zero_dim, reduced_groebner, unit_in_quotient)
from .jets import Jet, jet_membership, jet_ops, split_quadratic
from .polycore import MonomialOrder, Poly, arith, compose, differentiate, evaluate, var, variables
from .textio import parse_chart_file, parse_document, parse_poly, print_canonical, print_poly

__version__ = "0.1.0"
