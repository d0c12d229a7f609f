"""Linear and third-order susceptibilities of Lambda atoms with SGC.

All frequencies are in units of gamma (half the spontaneous decay rate),
with equal decay rates into both lower levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy import constants

from .errors import SINGULAR_FLOOR, SingularityError

# a.u. -> mW/cm^2 conversion quoted for omega_13 ~ 1e15 rad/s; not derivable
AU_TO_MW_PER_CM2 = 50.0


@dataclass(frozen=True)
class AtomicParams:
    """Dimensionless control knobs of the dopant atoms.

    ``omega_c0`` is the coupling Rabi frequency for orthogonal dipoles; the
    field actually seen by the atoms is :attr:`omega_c`.
    """

    delta_p: float
    omega_c0: float
    sgc_p: float
    s1: float = 1.0

    def __post_init__(self):
        _check_sgc(self.sgc_p)
        if not self.omega_c0 >= 0:
            raise ValueError(f"omega_c0 must be >= 0, got {self.omega_c0!r}")
        if not self.s1 >= 0:
            raise ValueError(f"s1 must be >= 0, got {self.s1!r}")
        if not math.isfinite(self.delta_p):
            raise ValueError(f"delta_p must be finite, got {self.delta_p!r}")

    @property
    def omega_c(self) -> float:
        return effective_rabi(self.omega_c0, self.sgc_p)


@dataclass(frozen=True)
class PhysicalScales:
    omega_13: float  # rad/s
    gamma: float  # rad/s
    dopant_density: float  # m^-3
    dipole_moment: float  # C m

    def __post_init__(self):
        for name in ("omega_13", "gamma", "dopant_density", "dipole_moment"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be > 0, got {value!r}")

    @classmethod
    def from_dipole(cls, omega_13: float, dopant_density: float, dipole_moment: float):
        """Build scales with gamma fixed by the dipole/decay-rate relation."""
        return cls(
            omega_13=omega_13,
            gamma=gamma_from_dipole(dipole_moment, omega_13),
            dopant_density=dopant_density,
            dipole_moment=dipole_moment,
        )


@dataclass(frozen=True)
class Susceptibilities:
    chi1: complex  # s1 applied
    chi3: complex  # scaled, s3 dropped


def _check_sgc(sgc_p):
    if isinstance(sgc_p, complex):
        raise TypeError("complex SGC parameter is not supported")
    if not 0.0 <= sgc_p <= 1.0:
        raise ValueError(f"sgc_p must lie in [0, 1], got {sgc_p!r}")


def effective_rabi(omega_c0: float, sgc_p: float) -> float:
    """Rabi frequency reduced by the dipole alignment, ``omega_c0*sqrt(1-p^2)``."""
    _check_sgc(sgc_p)
    if omega_c0 < 0:
        raise ValueError(f"omega_c0 must be >= 0, got {omega_c0!r}")
    return omega_c0 * math.sqrt(1.0 - sgc_p * sgc_p)


def _probe_factor(delta_p, omega_c):
    # Omega^2 + i(2 + i Delta) Delta
    return omega_c * omega_c + 1j * (2.0 + 1j * delta_p) * delta_p


def chi1_dimensionless(delta_p: float, omega_c: float) -> complex:
    denom = _probe_factor(delta_p, omega_c)
    if abs(denom) < SINGULAR_FLOOR:
        raise SingularityError("chi1 denominator vanishes (delta_p = omega_c = 0)")
    return -delta_p / denom


def chi3_dimensionless(delta_p: float, omega_c: float, sgc_p: float) -> complex:
    """Scaled Kerr susceptibility with the SGC interference term.

    The denominator is kept as a product of its two factors rather than
    expanded.
    """
    _check_sgc(sgc_p)
    d = delta_p
    w2 = omega_c * omega_c
    a = _probe_factor(d, omega_c)
    b = w2 - 1j * (2.0 - 1j * d) * d
    c = omega_c * w2 - 1j * omega_c * (2.0 - 1j * d) * d
    beta = (c * c) * (a * a * a)
    if abs(beta) < SINGULAR_FLOOR:
        raise SingularityError("chi3 denominator vanishes")
    sgc_term = 8j * w2 * w2 * sgc_p * sgc_p * d * d * (w2 - d * d)
    kerr_term = d * a * b * (2.0 * w2 * w2 - 2j * w2 * d + d * d * (5.0 * w2 + 4.0))
    return (sgc_term + kerr_term) / beta


def susceptibilities(params: AtomicParams) -> Susceptibilities:
    omega_c = params.omega_c
    return Susceptibilities(
        chi1=params.s1 * chi1_dimensionless(params.delta_p, omega_c),
        chi3=chi3_dimensionless(params.delta_p, omega_c, params.sgc_p),
    )


def gamma_from_dipole(dipole_moment: float, omega_13: float) -> float:
    """Half decay rate ``|mu|^2 w^3 / (3 pi eps0 hbar c^3)`` in rad/s."""
    if dipole_moment < 0 or omega_13 < 0:
        raise ValueError("dipole_moment and omega_13 must be non-negative")
    c = constants.c
    return dipole_moment**2 * omega_13**3 / (
        3.0 * math.pi * constants.epsilon_0 * constants.hbar * c**3
    )


def density_for_unit_s1(omega_13: float) -> float:
    """Dopant density making s1 = 1 once gamma follows from the dipole moment."""
    return omega_13**3 / (6.0 * math.pi * constants.c**3)


def scale_factors(scales: PhysicalScales) -> tuple[float, float]:
    """Return ``(s1, s3)``; s1 is dimensionless, s3 is in m^2/V^2."""
    eps0, hbar = constants.epsilon_0, constants.hbar
    n, mu2, g = scales.dopant_density, scales.dipole_moment**2, scales.gamma
    s1 = 2.0 * n * mu2 / (eps0 * hbar * g)
    s3 = 2.0 * n * mu2 * mu2 / (3.0 * eps0 * hbar**3 * g**3)
    return s1, s3


def physical_intensity(u_i: float, chi3_re: float, mw_per_cm2: bool = False) -> float:
    """Incident intensity ``c eps0 U_i / (2 Re chi3)`` from the scaled one.

    With ``mw_per_cm2`` the fixed a.u. -> mW/cm^2 factor is applied; it is a
    quoted pass-through valid only for the reference atomic constants.
    """
    if chi3_re == 0:
        raise ZeroDivisionError("Re(chi3) is zero; intensity is undefined")
    value = constants.c * constants.epsilon_0 * u_i / (2.0 * chi3_re)
    if mw_per_cm2:
        value *= AU_TO_MW_PER_CM2
    return value
