"""Online grammar-compressed self-index.

Builds a compressed index from a byte stream one symbol at a time and
answers count/locate/extract queries directly on the compressed structure;
the plain text is never kept.
"""

from .bits import AppendBitVector
from .errors import (EmptyInputError, EmptyPatternError, FormatError,
                     NotFoundError, OespError, RangeError, StateError,
                     StructureError)
from .esp import EspParams, EspParser
from .index import IndexConfig, OespIndex
from .poppt import PostOrderTree
from .rdict import ReverseDict
from .search import CoreOccurrence, Evidence
from .wavelet import DynamicWaveletTree

__all__ = [
    "AppendBitVector",
    "CoreOccurrence",
    "DynamicWaveletTree",
    "EmptyInputError",
    "EmptyPatternError",
    "EspParams",
    "EspParser",
    "Evidence",
    "FormatError",
    "IndexConfig",
    "NotFoundError",
    "OespError",
    "OespIndex",
    "PostOrderTree",
    "RangeError",
    "ReverseDict",
    "StateError",
    "StructureError",
]

__version__ = "0.1.0"
