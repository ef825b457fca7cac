"""Scoped bit-trie dictionary with O(1) environment open/close."""
from ._accel import BACKEND
from .arena import NIL, Arena, ArenaFull
from .bitstr import EMPTY, BitString, Divergence, DivKind, decode_key, divergence, encode_key, suffix
from .lexikon import Lexikon, SearchOutcome, SearchStats
from .lifo import EnvironmentUnderflow, InsertReport, LifoLexikon
from .oracle import OracleDict, OracleUnderflow

__all__ = [
    "BACKEND",
    "NIL",
    "Arena",
    "ArenaFull",
    "EMPTY",
    "BitString",
    "Divergence",
    "DivKind",
    "decode_key",
    "divergence",
    "encode_key",
    "suffix",
    "Lexikon",
    "SearchOutcome",
    "SearchStats",
    "EnvironmentUnderflow",
    "InsertReport",
    "LifoLexikon",
    "OracleDict",
    "OracleUnderflow",
]
