"""Characteristic matrices of homogeneous layers and stack transmission."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

from scipy.constants import c as C_LIGHT

from .errors import SINGULAR_FLOOR, SingularityError


@dataclass(frozen=True)
class CMat2:
    m11: complex
    m12: complex
    m21: complex
    m22: complex

    def __matmul__(self, other: "CMat2") -> "CMat2":
        a, b = self, other
        return CMat2(
            a.m11 * b.m11 + a.m12 * b.m21,
            a.m11 * b.m12 + a.m12 * b.m22,
            a.m21 * b.m11 + a.m22 * b.m21,
            a.m21 * b.m12 + a.m22 * b.m22,
        )

    @property
    def det(self) -> complex:
        return self.m11 * self.m22 - self.m12 * self.m21

    @classmethod
    def identity(cls) -> "CMat2":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    def as_tuple(self):
        return (self.m11, self.m12, self.m21, self.m22)

    def allclose(self, other: "CMat2", atol: float = 1e-12) -> bool:
        return all(abs(x - y) <= atol for x, y in zip(self.as_tuple(), other.as_tuple()))


@dataclass(frozen=True)
class LayerSpec:
    epsilon: complex
    thickness: float  # m
    mu: complex = 1.0

    def __post_init__(self):
        if not self.thickness >= 0:
            raise ValueError(f"thickness must be >= 0, got {self.thickness!r}")

    @property
    def index(self) -> complex:
        return cmath.sqrt(self.epsilon * self.mu)


@dataclass(frozen=True)
class StackSpec:
    """Multilayer with a single marked defect layer.

    ``prefix`` is the incident side, ``suffix`` the exit side.
    """

    prefix: tuple[LayerSpec, ...]
    defect: LayerSpec
    suffix: tuple[LayerSpec, ...]
    n0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "suffix", tuple(self.suffix))
        if not self.n0 > 0:
            raise ValueError(f"n0 must be > 0, got {self.n0!r}")

    @property
    def layers(self) -> tuple[LayerSpec, ...]:
        return self.prefix + (self.defect,) + self.suffix

    def with_defect(self, defect: LayerSpec) -> "StackSpec":
        return StackSpec(self.prefix, defect, self.suffix, self.n0)


def layer_matrix(layer: LayerSpec, omega: float) -> CMat2:
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    if layer.epsilon == 0:
        raise ValueError("layer permittivity must be nonzero")
    phase = cmath.sqrt(layer.epsilon * layer.mu) * omega / C_LIGHT * layer.thickness
    root_eps, root_mu = cmath.sqrt(layer.epsilon), cmath.sqrt(layer.mu)
    cos_, sin_ = cmath.cos(phase), cmath.sin(phase)
    return CMat2(
        cos_,
        -1j * (root_mu / root_eps) * sin_,
        -1j * (root_eps / root_mu) * sin_,
        cos_,
    )


def compose(matrices: Iterable[CMat2]) -> CMat2:
    """Ordered product, incident side first."""
    out = CMat2.identity()
    for m in matrices:
        out = out @ m
    return out


def standard_stack(
    lambda_pc: float = 692e-9,
    n_A: float = 2.22,
    n_B: float = 1.41,
    n_D: float = 1.41,
    n0: float = 1.0,
) -> StackSpec:
    """(AB)^2 A D (AB)^2 A with quarter-wave A, B and a half-wave defect D."""
    for name, value in (("lambda_pc", lambda_pc), ("n_A", n_A), ("n_B", n_B), ("n_D", n_D)):
        if not value > 0:
            raise ValueError(f"{name} must be > 0, got {value!r}")
    a = LayerSpec(n_A**2, lambda_pc / (4 * n_A))
    b = LayerSpec(n_B**2, lambda_pc / (4 * n_B))
    d = LayerSpec(n_D**2, lambda_pc / (2 * n_D))
    mirror = (a, b, a, b, a)
    stack = StackSpec(mirror, d, mirror, n0)
    assert stack.prefix == stack.suffix
    return stack


def right_submatrix(stack: StackSpec, omega: float) -> CMat2:
    return compose(layer_matrix(layer, omega) for layer in stack.suffix)


def left_submatrix(stack: StackSpec, omega: float) -> CMat2:
    return compose(layer_matrix(layer, omega) for layer in stack.prefix)


def stack_matrix(stack: StackSpec, omega: float, defect: CMat2 | None = None) -> CMat2:
    """Full stack matrix; ``defect`` overrides the linear defect-layer matrix."""
    if defect is None:
        defect = layer_matrix(stack.defect, omega)
    return left_submatrix(stack, omega) @ defect @ right_submatrix(stack, omega)


def transmission(m: CMat2, n0: float = 1.0) -> float:
    """Field-amplitude transmission ``|2 n0 / ((m11 + m12 n0) + (m21 + m22 n0))|``.

    This is the modulus of the transmitted amplitude, not the power ratio;
    see :func:`transmittance` for the latter.
    """
    denom = (m.m11 + m.m12 * n0) + (m.m21 + m.m22 * n0)
    if abs(denom) < SINGULAR_FLOOR:
        raise SingularityError("transmission denominator vanishes")
    return abs(2 * n0 / denom)


def transmittance(m: CMat2, n0: float = 1.0) -> float:
    """Intensity transmission, the square of :func:`transmission`."""
    return transmission(m, n0) ** 2


def omega_grid(omega_center: float, n_points: int = 2000, span: float = 0.2) -> list[float]:
    """Uniform grid over ``[(1-span), (1+span)] * omega_center``."""
    if n_points < 1:
        raise ValueError("n_points must be >= 1")
    if n_points == 1:
        return [omega_center]
    lo, hi = (1 - span) * omega_center, (1 + span) * omega_center
    step = (hi - lo) / (n_points - 1)
    return [lo + i * step for i in range(n_points)]


def midgap_omega(lambda_pc: float) -> float:
    return 2 * math.pi * C_LIGHT / lambda_pc


def quarter_wave_gap(n_A: float, n_B: float) -> float:
    """Relative half-width of the infinite quarter-wave mirror stop band."""
    return (2 / math.pi) * math.asin(abs(n_A - n_B) / (n_A + n_B))
