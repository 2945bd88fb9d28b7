"""Exact computations with dormant opers in characteristic p.

Modules: rings (F_q, Z/p^N, polynomials), rootdata, elliptic, opers,
witt_opers, dop_local, cli.
"""

__version__ = "0.1.0"
