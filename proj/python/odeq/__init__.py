"""Classification of scalar fourth-order ODEs up to point transformation.

Thin wrapper over the compiled core; see the individual functions'
docstrings for the expression grammar and report formats.
"""

try:
    from ._odeq import *  # installed package layout
except ImportError:  # in-tree builds put _odeq next to the package
    from _odeq import *  # noqa: F401,F403

__all__ = [
    "parse",
    "evaluate",
    "partial",
    "total_derivative",
    "is_identically_zero",
    "classify",
    "structure",
    "invariants",
    "verify_transform",
    "emit_pde_system",
    "canonical_forms",
    "canonical_database_text",
]
