"""Kerr-type doped defect layer and the self-consistent field intensities.

Intensities ``U+`` and ``U-`` of the forward and backward waves inside the
defect are scaled by chi3, so they are dimensionless (a.u.).  For a given
transmitted intensity ``U_f`` they are fixed by the boundary conditions at
the exit side of the defect, which is solved here by damped fixed-point
iteration.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from scipy.constants import c as C_LIGHT

from .errors import SINGULAR_FLOOR, ConvergenceError, SingularityError
from .tmm import CMat2, StackSpec, left_submatrix, right_submatrix, transmission


@dataclass(frozen=True)
class DefectMedium:
    epsilon_host: float
    chi1: complex
    thickness: float  # m
    k0: float  # vacuum wavenumber, 1/m

    def __post_init__(self):
        if not self.thickness >= 0:
            raise ValueError(f"thickness must be >= 0, got {self.thickness!r}")
        if not self.k0 > 0:
            raise ValueError(f"k0 must be > 0, got {self.k0!r}")

    @property
    def n_l(self) -> complex:
        """Linear index of the doped layer, principal branch."""
        return cmath.sqrt(self.epsilon_host + self.chi1)

    @classmethod
    def from_stack(cls, stack: StackSpec, chi1: complex, omega: float) -> "DefectMedium":
        host = stack.defect
        return cls(
            epsilon_host=complex(host.epsilon).real,
            chi1=chi1,
            thickness=host.thickness,
            k0=omega / C_LIGHT,
        )


@dataclass(frozen=True)
class FieldIntensities:
    u_plus: float = 0.0
    u_minus: float = 0.0

    def __post_init__(self):
        for name in ("u_plus", "u_minus"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")


@dataclass(frozen=True)
class SolverSettings:
    tol: float = 1e-10
    relaxation: float = 0.5
    max_iter: int = 100_000

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be > 0")
        if not 0 < self.relaxation <= 1:
            raise ValueError("relaxation must lie in (0, 1]")
        if self.max_iter < 1:
            raise ValueError("max_iter must be >= 1")


@dataclass(frozen=True)
class SolveResult:
    fields: FieldIntensities
    iterations: int
    residual: float
    converged: bool


@dataclass(frozen=True)
class OperatingPoint:
    """One converged point of the nonlinear response.

    ``t`` is the intensity transmittance |t|^2 and ``u_i = u_f / t``;
    ``t_field`` is the amplitude modulus |t|.
    """

    u_f: float
    fields: FieldIntensities
    t: float
    u_i: float
    iterations: int
    residual: float
    t_field: float
    converged: bool = True


def wavevectors(medium: DefectMedium, fields: FieldIntensities) -> tuple[complex, complex]:
    up, um = fields.u_plus, fields.u_minus
    base = medium.k0 * medium.n_l
    return base * cmath.sqrt(1 + up + 2 * um), base * cmath.sqrt(1 + um + 2 * up)


def defect_matrix(medium: DefectMedium, fields: FieldIntensities) -> CMat2:
    k_plus, k_minus = wavevectors(medium, fields)
    k_sum = k_plus + k_minus
    if abs(k_sum) < SINGULAR_FLOOR:
        raise SingularityError("k+ + k- vanishes")
    d, k0 = medium.thickness, medium.k0
    e_fwd = cmath.exp(-1j * k_plus * d)
    e_bwd = cmath.exp(1j * k_minus * d)
    diff = e_fwd - e_bwd
    return CMat2(
        (k_minus * e_fwd + k_plus * e_bwd) / k_sum,
        k0 * diff / k_sum,
        k_minus * k_plus * diff / (k0 * k_sum),
        (k_plus * e_fwd + k_minus * e_bwd) / k_sum,
    )


def _map(u_f, n_l, exit_e, exit_h, u_plus, u_minus):
    # exit_e, exit_h: tangential E and H at the defect exit per unit output field
    p_plus = n_l * cmath.sqrt(1 + u_minus + 2 * u_plus)
    p_minus = n_l * cmath.sqrt(1 + u_plus + 2 * u_minus)
    p_sum = p_plus + p_minus
    if abs(p_sum) < SINGULAR_FLOOR:
        raise SingularityError("p+ + p- vanishes")
    fwd = p_plus * exit_e
    return abs((fwd + exit_h) / p_sum) ** 2 * u_f, abs((fwd - exit_h) / p_sum) ** 2 * u_f


def _exit_fields(m_r: CMat2, n0: float):
    return m_r.m11 + m_r.m12 * n0, m_r.m21 + m_r.m22 * n0


def boundary_map(
    u_f: float,
    medium: DefectMedium,
    m_r: CMat2,
    fields: FieldIntensities,
    n0: float = 1.0,
) -> FieldIntensities:
    """One application of the intensity map ``(U+, U-) -> (U+', U-')``."""
    if u_f < 0:
        raise ValueError(f"u_f must be >= 0, got {u_f!r}")
    exit_e, exit_h = _exit_fields(m_r, n0)
    up, um = _map(u_f, medium.n_l, exit_e, exit_h, fields.u_plus, fields.u_minus)
    return FieldIntensities(up, um)


def solve_intensities(
    u_f: float,
    medium: DefectMedium,
    m_r: CMat2,
    warm_start: FieldIntensities | None = None,
    settings: SolverSettings | None = None,
    n0: float = 1.0,
) -> SolveResult:
    """Damped fixed-point iteration ``x <- (1-a) x + a map(x)``.

    The residual is the max-norm of ``map(x) - x`` at the returned ``x``.
    Raises :class:`ConvergenceError` after ``max_iter`` map evaluations.
    """
    if u_f < 0:
        raise ValueError(f"u_f must be >= 0, got {u_f!r}")
    settings = settings or SolverSettings()
    alpha, tol = settings.relaxation, settings.tol
    exit_e, exit_h = _exit_fields(m_r, n0)
    n_l = medium.n_l
    start = warm_start or FieldIntensities()
    up, um = start.u_plus, start.u_minus
    residual = math.inf
    for it in range(1, settings.max_iter + 1):
        new_up, new_um = _map(u_f, n_l, exit_e, exit_h, up, um)
        residual = max(abs(new_up - up), abs(new_um - um))
        if residual <= tol:
            return SolveResult(FieldIntensities(up, um), it, residual, True)
        if not (math.isfinite(new_up) and math.isfinite(new_um)):
            break
        up = (1 - alpha) * up + alpha * new_up
        um = (1 - alpha) * um + alpha * new_um
    raise ConvergenceError(
        f"fixed-point iteration did not converge at u_f={u_f!r} "
        f"(residual {residual:.3e} after {it} iterations)",
        u_f=u_f,
        iterations=it,
        residual=residual,
    )


def operating_point(
    u_f: float,
    medium: DefectMedium,
    stack: StackSpec,
    omega: float,
    warm_start: FieldIntensities | None = None,
    settings: SolverSettings | None = None,
) -> OperatingPoint:
    m_left = left_submatrix(stack, omega)
    m_right = right_submatrix(stack, omega)
    return _operating_point(u_f, medium, m_left, m_right, stack.n0, warm_start, settings)


def _operating_point(u_f, medium, m_left, m_right, n0, warm_start, settings):
    solved = solve_intensities(u_f, medium, m_right, warm_start, settings, n0)
    full = m_left @ defect_matrix(medium, solved.fields) @ m_right
    t_field = transmission(full, n0)
    t = t_field * t_field
    if t == 0:
        raise SingularityError(f"zero transmission at u_f={u_f!r}")
    return OperatingPoint(
        u_f=u_f,
        fields=solved.fields,
        t=t,
        u_i=u_f / t,
        iterations=solved.iterations,
        residual=solved.residual,
        t_field=t_field,
    )
