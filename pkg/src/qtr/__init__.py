"""Substructure search with a centroid-annotated fingerprint tree."""

from .balltree import BallTree, BuildError, TreeNode, build_tree, default_depth, split_fingerprints
from .bitfp import Fingerprint, FingerprintError, bit_or, count_ones_at, is_submask
from .engine import QueryError, find_meta_structures
from .fingerprinter import FpConfig, fingerprint
from .molgraph import MolGraph, SmilesError, parse_smiles, sub_structure, write_smiles
from .store import FingerprintStore, Index, IndexFormatError, ingest, load_index, save_index

__version__ = "0.1.0"

__all__ = [
    "BallTree",
    "BuildError",
    "Fingerprint",
    "FingerprintError",
    "FingerprintStore",
    "FpConfig",
    "Index",
    "IndexFormatError",
    "MolGraph",
    "QueryError",
    "SmilesError",
    "TreeNode",
    "bit_or",
    "build_tree",
    "count_ones_at",
    "default_depth",
    "find_meta_structures",
    "fingerprint",
    "ingest",
    "is_submask",
    "load_index",
    "parse_smiles",
    "save_index",
    "split_fingerprints",
    "sub_structure",
    "write_smiles",
]
