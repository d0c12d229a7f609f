"""Optical bistability of a 1D photonic crystal with an atom-doped defect layer.

The defect layer hosts Lambda-type three-level atoms whose lower doublet
shows spontaneously generated coherence (SGC).  The probe transmission is
computed with a nonlinear characteristic-matrix method.
"""

from .susceptibility import (
    AtomicParams,
    PhysicalScales,
    Susceptibilities,
    chi1_dimensionless,
    chi3_dimensionless,
    effective_rabi,
    gamma_from_dipole,
    physical_intensity,
    scale_factors,
    susceptibilities,
)
from .tmm import (
    CMat2,
    LayerSpec,
    StackSpec,
    compose,
    layer_matrix,
    right_submatrix,
    stack_matrix,
    standard_stack,
    transmission,
    transmittance,
)
from .defect import (
    DefectMedium,
    FieldIntensities,
    OperatingPoint,
    SolverSettings,
    boundary_map,
    defect_matrix,
    operating_point,
    solve_intensities,
    wavevectors,
)
from .response import (
    HysteresisCurve,
    HysteresisSummary,
    chi_scan,
    linear_spectrum,
    summarize,
    trace_hysteresis,
)

__version__ = "0.1.0"
