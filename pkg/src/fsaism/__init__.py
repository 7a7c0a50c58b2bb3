"""Factorized sparse approximate inverse (FSAI) preconditioning for singular irreducible M-matrices."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .sparse_core import (SparseMatrix, dense_solve, from_triplets,  # noqa: F401
                          gather_principal_submatrix, spmv)
from .mmatrix import (InverseAxiomReport, MMatrixReport, Verdict, classify,  # noqa: F401
                      is_irreducible, is_z_matrix, penrose_residuals, positive_null_vector)
from .pattern import (Orientation, TriangularPattern, pattern_banded,  # noqa: F401
                      pattern_complete, pattern_diagonal, pattern_from_matrix, validate)
from .fsai import (FsaiPreconditioner, GeneralizedInverse, build_lower_factor,  # noqa: F401
                   build_one_two_inverse, build_preconditioner, build_upper_factor,
                   preconditioned_matrix_dense)
from .krylov import (SolveConfig, SolveReport, bicgstab, solve, solve_preconditioned,  # noqa: F401
                     stationary_vector)
from .generators import (gen_birth_death, gen_graph_laplacian, gen_lattice2d,  # noqa: F401
                         gen_ncd, generate)
from .mmio import read_matrix_market, write_matrix_market  # noqa: F401
