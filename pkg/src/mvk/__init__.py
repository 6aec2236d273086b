"""Symbolic motivic volumes in the dimension-graded Grothendieck ring and the
rationality obstructions they give."""
from .birational import (
    BirClass,
    Label,
    LabelStore,
    SBClass,
    bir_of,
    can_equal,
    irrational,
    point,
    product,
    rational,
    sb_of,
    unknown,
)
from .errors import BudgetError, InvariantViolation, MvkError, ValidationError
from .ring import (
    Atom,
    AtomTable,
    ClassicalClass,
    GradedClass,
    Ideal,
    Reduction,
    atom_class,
    blowup_delta,
    in_ideal,
    projective_class,
    reduce,
    torus_class,
)
from .strata import StrataComplex, build_complex, from_snc_nerve, make_stratum
from .volume import (
    Verdict,
    obstruct_rational,
    obstruct_stable,
    parity_rule,
    vol,
    vol_bir,
    vol_sb,
)

__version__ = "0.1.0"
