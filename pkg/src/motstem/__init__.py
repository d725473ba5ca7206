"""Stable motivic π₁ of low-dimensional fields: charts, gluing and algebra."""

from .abgrp import FgModule, GroupExpr
from .fieldcat import parse_field
from .fracture import fracture_assemble, rational_pi
from .manss import assemble_e2_column, pi_one_l_complete

__all__ = ["FgModule", "GroupExpr", "assemble_e2_column", "fracture_assemble",
           "parse_field", "pi_one_l_complete", "rational_pi"]
