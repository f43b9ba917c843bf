"""Non-positively curved 2-complexes, free-by-free monodromy and distortion chains."""

__version__ = "0.1.0"
