"""Array-gain analysis of the RIS beam-split effect.

Closed-form and brute-force gains versus frequency, panel size, panel shape
and centralized/distributed deployment. All public operations take absolute
frequency; the cascaded response converts to a carrier offset internally.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import PathParams, _planar_offsets, subcarrier_frequencies
from .config import SystemConfig


@dataclass(frozen=True)
class RisShape:
    m_x: int
    m_y: int

    def __post_init__(self):
        if self.m_x < 1 or self.m_y < 1:
            raise ValueError("shape dimensions must be >= 1")

    @property
    def elements(self) -> int:
        return self.m_x * self.m_y


@dataclass(frozen=True)
class EquivalentDirection:
    """Equivalent direction pair (u0, v0) seen by the panel at the carrier."""

    u0: float
    v0: float

    def __post_init__(self):
        if abs(self.u0) > 1 or abs(self.v0) > 1:
            raise ValueError("|u0| and |v0| must be <= 1")


@dataclass(frozen=True)
class DeploymentPlan:
    """S co-located sub-panels of identical shape."""

    num_panels: int
    shape: RisShape
    label: str = ""

    def __post_init__(self):
        if self.num_panels < 1:
            raise ValueError("need at least one panel")
        if not self.label:
            object.__setattr__(
                self,
                "label",
                f"{self.num_panels}x{self.shape.m_x}x{self.shape.m_y}",
            )

    @property
    def total_elements(self) -> int:
        return self.num_panels * self.shape.elements


def cascaded_frequency_response(
    paths1: list[PathParams],
    paths2: list[PathParams],
    f: float,
    f_c: float,
    shape: RisShape,
) -> np.ndarray:
    """Per-element frequency response of the cascaded BS->panel->user channel.

    ``f`` is absolute; internally the carrier offset drives the delay term
    while the element phase ramp scales with f/f_c. Element order is
    row-major over (rows, columns).
    """
    offset = f - f_c
    mx, my = _planar_offsets(shape.m_x, shape.m_y)
    out = np.zeros(shape.elements, dtype=complex)
    for p1 in paths1:
        ubar1 = np.sin(p1.ris_azimuth) * np.sin(p1.ris_elevation) / 2
        vbar1 = np.cos(p1.ris_elevation) / 2
        for p2 in paths2:
            ubar2 = np.sin(p2.ris_azimuth) * np.sin(p2.ris_elevation) / 2
            vbar2 = np.cos(p2.ris_elevation) / 2
            u3 = ubar1 - ubar2
            v3 = vbar1 - vbar2
            tau3 = p1.delay + p2.delay
            c3 = p1.gain * p2.gain * np.exp(-2j * np.pi * f_c * tau3)
            out += (
                c3
                * np.exp(-2j * np.pi * (1 + offset / f_c) * (mx * u3 + my * v3))
                * np.exp(-2j * np.pi * offset * tau3)
            )
    return out


def array_gain(
    f: float,
    u: float,
    v: float,
    phases: np.ndarray,
    shape: RisShape,
    f_c: float,
) -> float:
    """Coherent element sum toward equivalent direction (u, v) at frequency f.

    The reflection phases fight the frequency-scaled element ramp
    pi*(1 + f/f_c)*[(m_x)u + (m_y)v]; the result lies in [0, elements].
    """
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (shape.elements,):
        raise ValueError(
            f"need {shape.elements} phases for a "
            f"{shape.m_x}x{shape.m_y} panel, got {phases.shape}"
        )
    mx, my = _planar_offsets(shape.m_x, shape.m_y)
    exponent = phases - np.pi * (1 + f / f_c) * (mx * u + my * v)
    return float(np.abs(np.exp(1j * exponent).sum()))


def optimal_reflection_phases(u0: float, v0: float, shape: RisShape) -> np.ndarray:
    """Reflection phases maximizing the carrier-frequency gain at (u0, v0)."""
    mx, my = _planar_offsets(shape.m_x, shape.m_y)
    return 2 * np.pi * (mx * u0 + my * v0)


def _sinc_ratio(x: float, count: int) -> float:
    """|sin(pi*count*x/2) / sin(pi*x/2)| with its removable singularity."""
    den = np.sin(np.pi * x / 2)
    if abs(den) < 1e-12:
        return float(count)
    return float(abs(np.sin(np.pi * count * x / 2) / den))


def closed_form_gain(
    f: float, u0: float, v0: float, shape: RisShape, f_c: float
) -> float:
    """Sinc-ratio gain at (u0, v0) under the optimal carrier-frequency phases.

    Equals ``array_gain`` with ``optimal_reflection_phases`` evaluated at the
    same direction; exact at the carrier where both factors hit their limit.
    """
    u_hat = (1 - f / f_c) * u0
    v_hat = (1 - f / f_c) * v0
    return _sinc_ratio(u_hat, shape.m_x) * _sinc_ratio(v_hat, shape.m_y)


def shape_objective(m_x: int, z: int, a: float, b: float) -> float:
    """|sin(a*M_x) * sin(b*z/M_x)| over divisor shapes of a fixed element budget."""
    if m_x < 1 or z % m_x != 0:
        raise ValueError(f"m_x={m_x} must divide the element budget z={z}")
    return float(abs(np.sin(a * m_x) * np.sin(b * (z // m_x))))


def divisor_shapes(z: int) -> list[RisShape]:
    """All physical (m_x, m_y) factorizations of z, ascending in m_x."""
    return [RisShape(d, z // d) for d in range(1, z + 1) if z % d == 0]


def distributed_gain(
    f: float, u0: float, v0: float, plan: DeploymentPlan, f_c: float
) -> float:
    """Total gain of S co-located identical sub-panels (sum of magnitudes)."""
    return plan.num_panels * closed_form_gain(f, u0, v0, plan.shape, f_c)


def gain_sweep(
    cfg: SystemConfig,
    target: EquivalentDirection,
    plans: list[DeploymentPlan],
    scenario_id: str = "sweep",
) -> list[dict]:
    """Normalized gain per (subcarrier, plan), ready for CSV serialization.

    Columns: scenario_id, plan_id, subcarrier_index, frequency_hz,
    normalized_gain (gain divided by the plan's total element count).
    """
    freqs = subcarrier_frequencies(cfg)
    rows = []
    for plan in plans:
        for idx, f in enumerate(freqs):
            gain = distributed_gain(f, target.u0, target.v0, plan, cfg.f_c)
            rows.append(
                {
                    "scenario_id": scenario_id,
                    "plan_id": plan.label,
                    "subcarrier_index": idx,
                    "frequency_hz": float(f),
                    "normalized_gain": gain / plan.total_elements,
                }
            )
    return rows
