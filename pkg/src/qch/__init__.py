"""Exact verification of Cayley-Hamilton identities for orthogonal quantum matrix algebras."""

__version__ = "0.1.0"
