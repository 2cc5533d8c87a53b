"""Quantale-enriched categories, Kantorovich liftings, behavioural distances and their logics.

Everything is exact: numeric quantales use :class:`fractions.Fraction`.
"""
from .quantale import (BOOL2, COST, INF, LUK01, MAXCOST, DomainError, FreeQuantale, Quantale,
                       UnsupportedEnumeration, get_quantale)
from .enriched import (MapWitness, VCategory, VRelation, compose_relations, converse, discrete,
                       indiscrete, initial_structure, is_category, kan_extension,
                       validate_category)
from .functors import Dist, Distribution, Identity, Labelled, Maybe, Powerset, functor_from_string
from .predicates import PredicateLifting, box, diamond, expectation, induced_pl
from .extensions import EgliMilner, KantorovichExtension, egli_milner, kantorovich_extension
from .transport import transport_primal, tv_lift, wasserstein_lp
from .liftings import KantorovichLifting, build_lifting, kantorovich_lift, named_lift
from .behaviour import Coalgebra, behavioural_distance, bisimilarity_oracle, coalgebra
from .logic import eval_formula, expressivity_report, logical_distance, parse_formula

__version__ = "0.1.0"
