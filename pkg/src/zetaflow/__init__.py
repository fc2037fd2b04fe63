"""zetaflow: complex Morse theory, spectral networks and wall-crossing at
desk scale.

Subpackages
-----------
potential   polynomial potentials, critical points, BPS matrices
flow        gradient flow and Lefschetz thimbles
solitons    signed soliton counting (branch continuation + shooting)
periods     exponential periods and Stokes entries
polygons    convex-polygon Hom complexes, mutations, lattice truncation
network     quadratic-differential trajectories, saddle connections, Z
wallcross   exact-rational Kontsevich-Soibelman torus-algebra engine
cli         command-line front end; render: deterministic SVG output
"""

__version__ = "0.1.0"
