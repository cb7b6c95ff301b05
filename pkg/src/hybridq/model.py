"""Physical parameters of the double-well dot and their dimensionless form.

Laboratory inputs (meV, nm, Tesla) enter through :class:`PhysicalParams`;
:func:`scale` converts them once into the dimensionless coefficient set
:class:`ScaledParams` that every other module works in.  Energies produced
downstream are in units of the dot energy scale hw0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# CODATA 2018 (SI)
HBAR = 1.054_571_817e-34      # J s
M_E = 9.109_383_7015e-31      # kg
E_CHARGE = 1.602_176_634e-19  # C

_MEV = 1e-3 * E_CHARGE        # J per meV
_NM = 1e-9                    # m per nm


@dataclass(frozen=True)
class PhysicalParams:
    """Dot geometry, confinement and field strengths in laboratory units."""

    hw0: float               # confinement energy scale hw0 [meV]
    a: float                 # half separation of the well minima [nm]
    gamma: float = 0.0       # dimensionless tilt (left/right depth imbalance)
    B0: float = 0.0          # uniform Zeeman field along z [T]
    bSLa: float = 0.0        # slanting-field product b_SL*a [T]
    m_ratio: float = 0.041   # effective-mass ratio m*/m_e
    b: float | None = None   # barrier-height length [nm]; None means b = a

    def __post_init__(self) -> None:
        if self.b is None:
            object.__setattr__(self, "b", self.a)
        if self.hw0 <= 0 or self.a <= 0 or self.b <= 0 or self.m_ratio <= 0:
            raise ValueError("hw0, a, b and m_ratio must be positive")
        if self.B0 < 0 or self.bSLa < 0:
            raise ValueError("field strengths B0 and bSLa must be non-negative")
        if abs(self.gamma) >= 1:
            raise ValueError("tilt |gamma| must be < 1 to keep the double well")


@dataclass(frozen=True)
class ScaledParams:
    """Dimensionless coefficients of the scaled two-dimensional Hamiltonian.

    ``r_a`` and ``r_c`` are the confinement and cyclotron energies divided by
    hw0, ``beta`` is bSLa/(2 B0), and ``ab_ratio`` is (a/b)^2 multiplying the
    quartic term only.
    """

    r_a: float
    r_c: float
    beta: float
    ab_ratio: float
    gamma: float

    def __post_init__(self) -> None:
        if self.r_a <= 0:
            raise ValueError("r_a must be positive")
        if self.r_c < 0 or self.beta < 0:
            raise ValueError("r_c and beta must be non-negative")

    @property
    def ell0_over_a(self) -> float:
        """Single-well oscillator length over a: sqrt(hw_a/hw0)."""
        return math.sqrt(self.r_a)


def confinement_energy_mev(a_nm: float, m_ratio: float) -> float:
    """hw_a = hbar^2 / (m* a^2) in meV."""
    m_star = m_ratio * M_E
    return HBAR * HBAR / (m_star * (a_nm * _NM) ** 2) / _MEV


def cyclotron_energy_mev(B0_tesla: float, m_ratio: float) -> float:
    """hw_c = hbar e B0 / m* in meV (the cyclotron / spin-splitting energy)."""
    m_star = m_ratio * M_E
    return HBAR * E_CHARGE * B0_tesla / m_star / _MEV


def scale(p: PhysicalParams) -> ScaledParams:
    """Reduce laboratory parameters to the dimensionless coefficient set.

    Raises
    ------
    ValueError
        If ``bSLa > 0`` with ``B0 = 0``: the scaled Hamiltonian carries the
        slanting field only through bSLa/B0, so a finite gradient needs a
        finite Zeeman field.
    """
    if p.bSLa > 0 and p.B0 == 0:
        raise ValueError("bSLa > 0 requires B0 > 0 (scaled form divides by B0)")
    r_a = confinement_energy_mev(p.a, p.m_ratio) / p.hw0
    r_c = cyclotron_energy_mev(p.B0, p.m_ratio) / p.hw0
    beta = p.bSLa / (2.0 * p.B0) if p.bSLa > 0 else 0.0
    assert p.b is not None
    return ScaledParams(
        r_a=r_a,
        r_c=r_c,
        beta=beta,
        ab_ratio=(p.a / p.b) ** 2,
        gamma=p.gamma,
    )


def potential(zp, s: ScaledParams):
    """Scaled double-well potential at z' = z/a, in units of hw0.

    V(z')/hw0 = ab_ratio/(8 r_a) * (z'^2 - 1)^2 - gamma * z'.
    Accepts scalars or numpy arrays.
    """
    quartic = (zp * zp - 1.0) ** 2
    return s.ab_ratio / (8.0 * s.r_a) * quartic - s.gamma * zp
