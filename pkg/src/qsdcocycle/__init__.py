"""Quantum stochastic operator cocycles built from their associated semigroups,
on finite truncations of the system and noise spaces."""

from .cocycle import (MatrixElementQuery, StepFunction, exp_overlap, qsde_residual,
                      reconstruct, refine_check)
from .generator import (DiagnosticsReport, FormInequalityError, GeneratorMatrix, NoiseBasis,
                        deficit_operator, diagnostics, f_from_g, g_from_f, isometry_defect,
                        journe_dual, max_form_deficit, regularize)
from .models import (CoefficientFunction, birth_death, cayley_shift, growth_check, iho, shg)
from .numerics import DimensionError, expm, herm_max_eig, op_norm, schur_product
from .qds import (QDSSuperoperator, conservativity_defect, cp_check, lindblad_apply,
                  qds_evolve, unitarity_report)
from .semigroup import (SemigroupFamily, TrotterStudy, evolve, generator_cd, schur_criterion,
                        trotter_study)
from .truncation import Geometry, InteriorMask, interior_compress

__version__ = "0.1.0"
