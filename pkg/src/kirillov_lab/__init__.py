"""Exact Kirillov-model amplitudes, lattice bounds and integral-structure checks over Q_p."""

from .scalars import (CharacterSpec, EmbeddingOracle, FieldParams, Scalar, gauss_sum,
                      solve_linear, valuation)
from .wspace import WElem, WFunction
from .symlat import Lattice, PolyVec, WeightParams, contains, lattice_M, lattice_N
from .kirillov import (AmplitudeTable, GeneratorCoeffs, RepParams, evaluate, expand,
                       mirabolic_act, solve_vanishing, vanishes_outside_integers,
                       verify_two_step)
from .bsverify import (GridSpec, certificate_prop13, check_bs_conditions, check_theorem12,
                       search)

__version__ = "0.1.0"
