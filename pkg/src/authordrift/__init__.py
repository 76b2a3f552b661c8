"""Authorship drift between publications and their supplementary research products."""

from authordrift.model import (
    AuthorName,
    ProductId,
    ProductKind,
    Relation,
    ResearchProduct,
    Semantics,
    canonicalize_relation,
    normalize_name,
)

__version__ = "0.1.0"

__all__ = [
    "AuthorName",
    "ProductId",
    "ProductKind",
    "Relation",
    "ResearchProduct",
    "Semantics",
    "canonicalize_relation",
    "normalize_name",
]
