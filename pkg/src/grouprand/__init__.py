"""Random elements of groups: SL(2,Z) by norm, lattice balls, finite matrix groups, O(n)."""

from ._backend import BACKEND
from .rng import DensitySpec, RandomStream, gen_random
from .hyperbolic import HPoint, Mobius, PolarHPoint, hdist, mobius_apply, pick_halfplane, pick_hyperbolic
from .lattice import pick_lattice_vector, pick_lattice_vectors, pick_matrix
from .sl2z import Mat2Z, count_sl2z, enumerate_sl2z, pick_fancy, pick_sl_naive, reduce2, translation_distance
from .fuchsian import GeneratorSet, greedy_reduce, modular_generators
from .finite import DomainError, FpMatrix, expander_walk_sample, gen_perm, gen_rand_sl, gen_rand_sp
from .orthogonal import random_orthogonal, two_squares_count, visible_point_count
from .stats import SampleReport, chi_square_uniform, tv_distance

__version__ = "0.1.0"
