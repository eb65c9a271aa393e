"""Volumes of representations via generalized angle sums of geodesic simplices."""

__version__ = "0.1.0"
