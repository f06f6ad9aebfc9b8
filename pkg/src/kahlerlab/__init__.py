"""Left-invariant Kähler and almost-Kähler geometry on Lie algebras."""

__version__ = "0.1.0"
