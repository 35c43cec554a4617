"""Exact tools for T-characterized subgroups of compact abelian groups."""

from .decision import (GroupDescriptor, connected_dual, minap_admissible, parse_descriptor,
                       tchar_decide)
from .membership import Verdict, member, numeric_oracle
from .models import CharSequence, Element, PAdic, Product, Torus, pair, parse_element, rho
from .witnesses import (WitnessReport, padic_witnesses, product_witnesses, torus_witnesses,
                        unbounded_witnesses)

__all__ = [
    "CharSequence", "Element", "GroupDescriptor", "PAdic", "Product", "Torus", "Verdict",
    "WitnessReport", "connected_dual", "member", "minap_admissible", "numeric_oracle",
    "padic_witnesses", "pair", "parse_descriptor", "parse_element", "product_witnesses",
    "rho", "tchar_decide", "torus_witnesses", "unbounded_witnesses",
]
