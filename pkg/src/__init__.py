"""
linecut: line intersections with polynomial curves and surfaces.

Curves and tensor-product surfaces are implicitized by a family of moving
lines/planes (an SVD null space); each query line then turns into a
generalized eigenvalue problem whose eigenvalues are the intersection
parameters along the line, with the geometry parameters read off the
eigenvectors.
"""

__version__ = "0.3.0"
