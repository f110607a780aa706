"""Search for strings of consecutive primes in sets ``{n : {F(n)} in U}``."""

from primestrings.realexp import RealExpPoly, RigorousReal, eval_frac, parse_poly

__all__ = ["RealExpPoly", "RigorousReal", "eval_frac", "parse_poly"]
__version__ = "0.1.0"
