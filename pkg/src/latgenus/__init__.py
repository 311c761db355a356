"""Exact classification of single-class genera of definite integral lattices."""

from .lattice import GramLattice, rescale_primitive, partial_dual, is_maximal, is_qf_maximal
from .jordan import jordan_decompose, len_p, is_squarefree, is_strongly_primitive
from .symbol import GenusSymbol, symbol_from_lattice, is_valid_genus_symbol, rescale_symbol
from .symbol_io import parse_symbol, print_symbol
from .massformula import mass, mass_condition, standard_mass
from .autgroup import aut_group_order, short_vectors, is_single_class
from .watson import watson_map, watson_symbol, watson_preimage_symbols
from .construct import construct_representative, hilbert_symbol, hasse_invariant
from .classify import classify_all, classify_squarefree, enumerate_squarefree_candidates

__all__ = [
    "GramLattice", "GenusSymbol",
    "rescale_primitive", "partial_dual", "is_maximal", "is_qf_maximal",
    "jordan_decompose", "len_p", "is_squarefree", "is_strongly_primitive",
    "symbol_from_lattice", "is_valid_genus_symbol", "rescale_symbol",
    "parse_symbol", "print_symbol",
    "mass", "mass_condition", "standard_mass",
    "aut_group_order", "short_vectors", "is_single_class",
    "watson_map", "watson_symbol", "watson_preimage_symbols",
    "construct_representative", "hilbert_symbol", "hasse_invariant",
    "classify_all", "classify_squarefree", "enumerate_squarefree_candidates",
]
