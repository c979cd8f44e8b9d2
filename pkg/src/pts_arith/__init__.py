"""Base-extension semantics, Hilbert proofs for Robinson arithmetic, and
arithmetized syntax evaluated over the natural numbers."""

__version__ = "0.1.0"
