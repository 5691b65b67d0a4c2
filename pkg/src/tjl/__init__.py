"""Linear temporal justification logic with past operators."""

from .syntax import parse_formula, parse_term, print_formula, print_term
from .profiles import LogicProfile, get_profile

__version__ = "0.1.0"
__all__ = ["parse_formula", "parse_term", "print_formula", "print_term", "LogicProfile",
           "get_profile"]
