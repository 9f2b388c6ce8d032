"""Incomplete-information databases: conditional tables, world-set
decompositions, translations between them, decision procedures and
relational prime factorization."""
from .conditions import (TRUE, And, Atom, MutexSet, Not, Or, entails, eq, eval_condition,
                         mutex_build, ne, satisfiable_conjunction)
from .decide import (Decision, empty_world_possible, instance_certain, instance_possible,
                     q_decide, tuple_certain, tuple_possible)
from .errors import (AttrError, BudgetError, CapacityError, CapError, CompletenessError,
                     FragmentError, GWSDError, InstanceError, LevelError, ParseError,
                     RangeError, SchemaError, ValuationError)
from .factorize import (BACKEND, Decomposition, Factorization, decompose_wsd_maximal,
                        divides, factorize_lowmem, factorize_prime, powerset_oracle)
from .formats import Document, dump, load, parse, parse_query
from .query import eval_on_world, eval_positive_on_x
from .reductions import Encoding, encode_reduction
from .relation import Ref, Relation, divide, ra_apply
from .tables import (CMultitable, CTable, EnumBudget, GMultitable, Table, World,
                     XMultitable, normalize_g, rep_enumerate, validate_x)
from .translate import c_to_gtabset, c_to_gwsd, gtabset_to_gwsd, gwsd_to_x, simplify_gwsd
from .tst import GTST, Layout, Tabset, inline, inline_inverse
from .values import BOT, Var
from .wsd import GWSD, compose, rep_enumerate_wsd

__version__ = "0.1.0"
