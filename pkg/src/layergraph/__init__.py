"""Layer-wise semantic graph parsing over MRP graphs.

Graphs are read and written as MRP JSON lines, tokenized, turned into
uniform graphs whose anchors are plain edges, and built up again by a
fixed number of AddNodes/AddEdges iterations.
"""

from .graph import (
    ANCHOR_LABEL, FRAMEWORKS, Edge, Graph, GraphValidationError, MRPFormatError, Node, Violation,
    load_mrp, parse_mrp_line, read_mrp, serialize_mrp, validate, write_mrp,
)
from .tokenizer import Token, Tokenizer, tokenize
from .uniform import AnchorMismatch, UniformGraph, deuniformize, uniformize
from .oracle import OperationScript, canonical_form, coverage, extract_script, replay
from .encoding import RuleInventory, apply_rule, build_inventory, derive_rule
from .config import Config

__version__ = "0.1.0"

__all__ = [
    "ANCHOR_LABEL", "FRAMEWORKS", "AnchorMismatch", "Config", "Edge", "Graph", "GraphValidationError",
    "MRPFormatError", "Node", "OperationScript", "RuleInventory", "Token", "Tokenizer", "UniformGraph",
    "Violation", "apply_rule", "build_inventory", "canonical_form", "coverage", "derive_rule", "deuniformize",
    "extract_script", "load_mrp", "parse_mrp_line", "read_mrp", "replay", "serialize_mrp", "tokenize",
    "uniformize", "validate", "write_mrp",
]
