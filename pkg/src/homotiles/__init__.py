"""Exact tiling and p-homogeneity tools for Z_{p^n}, Z_{p^n} x Z_q and Z_{p^n} x Z_p."""

from homotiles.errors import BudgetExceeded, TheoremFalsified
from homotiles.groups import GroupSpec, crt_join, crt_split

__all__ = [
    "BudgetExceeded",
    "GroupSpec",
    "TheoremFalsified",
    "crt_join",
    "crt_split",
]

__version__ = "0.1.0"
