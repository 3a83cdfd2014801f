from .graph import BOND_ORDERS, Atom, Bond, GraphError, MolGraph, make_graph
from .matcher import find_embedding, sub_structure
from .smiles import SmilesError, parse_smiles, write_smiles

__all__ = [
    "Atom",
    "BOND_ORDERS",
    "Bond",
    "GraphError",
    "MolGraph",
    "SmilesError",
    "find_embedding",
    "make_graph",
    "parse_smiles",
    "sub_structure",
    "write_smiles",
]
