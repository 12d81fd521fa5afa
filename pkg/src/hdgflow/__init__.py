"""2D H(div)-conforming hybrid DG flow solver.

Subpackages follow the pipeline: reference polynomial bases and quadrature
(`polybasis`), triangulations (`mesh2d`), global finite element spaces
(`fespace`), bilinear/trilinear form assembly and operator application
(`forms`), static condensation and sparse solves (`linsys`), operator
splitting time integration (`timeloop`), and the benchmark cases plus the
`hdgflow` command line driver (`benchcli`).
"""

__version__ = "0.1.0"
