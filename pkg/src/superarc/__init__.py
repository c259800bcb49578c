"""Exact symbolic engine for free-field vertex superalgebras.

Builds beta-gamma / b-c systems with exact rational operator product
expansions, realizes orthosymplectic and type-A current algebras inside
them, and certifies truncated classical freeness by comparing arc-space
Hilbert series with subalgebra graded dimensions.
"""

__version__ = "0.1.0"

SCHEMA_VERSION = 1
