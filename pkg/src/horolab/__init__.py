"""horolab: verification and experiment toolkit for diagonal flows acting on
polynomial-like curves, weight modules, and unimodular lattices."""

__version__ = "0.1.0"
