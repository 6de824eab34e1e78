"""Compactly supported kernels on [-1, 1].

Every kernel here is a polynomial in ``|u|`` on its support, which gives
exact (rational) moment integrals and antiderivatives.  Those closed forms
serve as oracles for the finite sums computed elsewhere in the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

import numpy as np

from .errors import InvalidBandwidthError

__all__ = [
    "Family",
    "KernelSpec",
    "EPANECHNIKOV",
    "TRIANGULAR",
    "BIWEIGHT",
    "TRIWEIGHT",
    "UNIFORM",
    "KERNELS",
    "get_kernel",
    "evaluate",
    "evaluate_scaled",
    "support_indices",
    "analytic_moment",
    "partial_moment",
    "riemann_gap",
]


class Family(str, Enum):
    EPANECHNIKOV = "epanechnikov"
    TRIANGULAR = "triangular"
    BIWEIGHT = "biweight"
    TRIWEIGHT = "triweight"
    UNIFORM = "uniform"


class Region(str, Enum):
    INTERIOR = "interior"
    LEFT_BOUNDARY = "left"
    RIGHT_BOUNDARY = "right"


@dataclass(frozen=True)
class KernelSpec:
    """A symmetric kernel ``K(u) = sum_k coef[k] * |u|**k`` on ``|u| <= 1``.

    ``lipschitz`` is ``inf`` for the (discontinuous) uniform kernel.
    """

    family: Family
    coef: tuple[Fraction, ...] = field(repr=False)
    bound: float
    lipschitz: float
    support_radius: float = 1.0
    symmetric: bool = True
    nonnegative: bool = True

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        w = np.abs(u)
        val = np.zeros_like(w)
        for k in reversed(range(len(self.coef))):
            val = val * w + float(self.coef[k])
        out = np.where(w <= self.support_radius, val, 0.0)
        return out if out.ndim else float(out)

    def scaled(self, u, h: float):
        """``K(u/h)/h``."""
        if not h > 0:
            raise InvalidBandwidthError(f"bandwidth must be positive, got {h!r}")
        return self(np.asarray(u, dtype=float) / h) / h

    @property
    def is_lipschitz(self) -> bool:
        return math.isfinite(self.lipschitz)

    def side_coef(self, side: int) -> tuple[Fraction, ...]:
        """Coefficients in ``w`` (not ``|w|``) on [0, 1] (side=+1) or [-1, 0] (side=-1)."""
        if side > 0:
            return self.coef
        return tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coef))


def _make(family: Family, coef, lipschitz: float) -> KernelSpec:
    coef = tuple(Fraction(c) for c in coef)
    return KernelSpec(family=family, coef=coef, bound=float(coef[0]), lipschitz=lipschitz)


# Lipschitz constants are max |K'| on [0, 1], attained at w=1 (Epanechnikov),
# w=1/sqrt(3) (biweight) and w=1/sqrt(5) (triweight).
EPANECHNIKOV = _make(Family.EPANECHNIKOV, [Fraction(3, 4), 0, Fraction(-3, 4)], 1.5)
TRIANGULAR = _make(Family.TRIANGULAR, [1, -1], 1.0)
BIWEIGHT = _make(
    Family.BIWEIGHT,
    [Fraction(15, 16), 0, Fraction(-30, 16), 0, Fraction(15, 16)],
    5.0 / (2.0 * math.sqrt(3.0)),
)
TRIWEIGHT = _make(
    Family.TRIWEIGHT,
    [Fraction(35, 32), 0, Fraction(-105, 32), 0, Fraction(105, 32), 0, Fraction(-35, 32)],
    4.2 / math.sqrt(5.0),
)
UNIFORM = _make(Family.UNIFORM, [Fraction(1, 2)], lipschitz=math.inf)

KERNELS = {k.family.value: k for k in (EPANECHNIKOV, TRIANGULAR, BIWEIGHT, TRIWEIGHT, UNIFORM)}


def get_kernel(name) -> KernelSpec:
    if isinstance(name, KernelSpec):
        return name
    key = name.value if isinstance(name, Family) else str(name).lower()
    if key in ("epan", "epa"):
        key = "epanechnikov"
    try:
        return KERNELS[key]
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; choose from {sorted(KERNELS)}") from None


def evaluate(spec: KernelSpec, u):
    """K(u); exactly zero outside the support."""
    return spec(u)


def evaluate_scaled(spec: KernelSpec, u, h: float):
    """K_h(u) = K(u/h)/h."""
    return spec.scaled(u, h)


def support_indices(T: int, x: float, h: float, L: float = 1.0) -> np.ndarray:
    """1-based indices ``i`` with ``|i/T - x| <= L*h``.

    A relative slack of 1e-12 absorbs rounding in ``i/T - x``, so the result
    is always a superset of the indices where the kernel is nonzero.
    """
    if not h > 0:
        raise InvalidBandwidthError(f"bandwidth must be positive, got {h!r}")
    reach = L * h * T
    lo = max(1, math.floor(x * T - reach) - 1)
    hi = min(T, math.ceil(x * T + reach) + 1)
    i = np.arange(lo, hi + 1)
    keep = np.abs(i - x * T) <= reach * (1.0 + 1e-12)
    idx = i[keep]
    if T * L * h > 1 and idx.size == 0:
        raise AssertionError(f"empty support window at x={x}, h={h}, T={T}")
    return idx


def _poly_integral(coef, j: int, a, b):
    """∫_a^b w**j * sum_k coef[k] w**k dw; works on Fractions or floats."""
    total = 0
    for k, c in enumerate(coef):
        p = k + j + 1
        total += c * (b**p - a**p) / p
    return total


def partial_moment(spec: KernelSpec, j: int, a: float, b: float) -> float:
    """∫_a^b u**j K(u) du for arbitrary limits (clipped to the support)."""
    a, b = max(a, -1.0), min(b, 1.0)
    if a >= b:
        return 0.0
    total = 0.0
    if b > 0:
        total += float(_poly_integral([float(c) for c in spec.side_coef(+1)], j, max(a, 0.0), b))
    if a < 0:
        total += float(_poly_integral([float(c) for c in spec.side_coef(-1)], j, a, min(b, 0.0)))
    return total


def analytic_moment(spec: KernelSpec, j: int, region="interior") -> float:
    """μ_j = ∫_G u**j K(u) du with G = [-1,1], [0,1] (left boundary) or [-1,0]."""
    if j < 0 or j > 4:
        raise NotImplementedError(f"moments are tabulated for 0 <= j <= 4, got j={j}")
    region = Region(region)
    right = _poly_integral(spec.side_coef(+1), j, Fraction(0), Fraction(1))
    left = _poly_integral(spec.side_coef(-1), j, Fraction(-1), Fraction(0))
    if region is Region.INTERIOR:
        return float(left + right)
    if region is Region.LEFT_BOUNDARY:
        return float(right)
    return float(left)


def riemann_gap(spec: KernelSpec, T: int, x: float, h: float, j: int) -> float:
    """|T⁻¹ Σ_i f((i/T-x)/h) - ∫_0^1 f((u-x)/h) du| with f(w) = K(w) w**j."""
    if not 0 < h < 0.5:
        raise InvalidBandwidthError(f"bandwidth must lie in (0, 1/2), got {h!r}")
    idx = support_indices(T, x, h)
    w = (idx / T - x) / h
    riemann = float(np.sum(spec(w) * w**j)) / T
    integral = h * partial_moment(spec, j, -x / h, (1.0 - x) / h)
    return abs(riemann - integral)
