"""True-time-delay hybrid analog frontend.

Each RF chain drives K_T delayers; each delayer feeds a block of P phase
shifters aligned to one RIS's spatial direction at the carrier. The delays
derotate the per-subcarrier beam back onto that direction across the band.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .channel import ChannelSet, bs_spatial_steering, subcarrier_frequencies
from .config import SystemConfig


@dataclass
class AnalogFrontend:
    """Phase-shifter matrix, per-chain delay vectors and their directions.

    F is (n_tx, k_t * n_rf) block-diagonal per chain; t holds the delay
    vector of each chain in seconds; eta_c the carrier spatial direction
    each chain is aimed at.
    """

    F: np.ndarray          # (n_tx, k_t * n_rf) complex
    t: np.ndarray          # (n_rf, k_t) seconds
    eta_c: np.ndarray      # (n_rf,)
    p_sub: int             # antennas per delayer
    f_c: float

    @property
    def n_rf(self) -> int:
        return self.t.shape[0]

    @property
    def k_t(self) -> int:
        return self.t.shape[1]

    def to_json(self) -> str:
        """Regression dump: directions, delay periods and PS sparsity blocks."""
        z = np.zeros(self.n_rf)
        for n in range(self.n_rf):
            steps = np.diff(self.t[n])
            z[n] = steps[0] * self.f_c if steps.size else 0.0
        blocks = []
        for n in range(self.n_rf):
            cols = self.F[:, n * self.k_t : (n + 1) * self.k_t]
            entries = []
            for kt in range(self.k_t):
                seg = cols[kt * self.p_sub : (kt + 1) * self.p_sub, kt]
                entries.append(np.stack([seg.real, seg.imag], axis=-1).tolist())
            blocks.append(entries)
        return json.dumps(
            {
                "eta_c": self.eta_c.tolist(),
                "z_n": z.tolist(),
                "p_sub": self.p_sub,
                "f_c": self.f_c,
                "ps_blocks": blocks,
            }
        )


def ps_block(eta_c: float, cfg: SystemConfig) -> np.ndarray:
    """Phase-shifter block of one RF chain: (n_tx, k_t).

    Column k_t holds the k_t-th length-P segment of the carrier steering
    vector toward eta_c; every nonzero entry has modulus 1/sqrt(n_tx).
    """
    if cfg.n_tx % cfg.k_t != 0:
        raise ValueError(f"n_tx={cfg.n_tx} not divisible by k_t={cfg.k_t}")
    p = cfg.n_tx // cfg.k_t
    a = bs_spatial_steering(eta_c, cfg.n_tx)
    block = np.zeros((cfg.n_tx, cfg.k_t), dtype=complex)
    for kt in range(cfg.k_t):
        block[kt * p : (kt + 1) * p, kt] = a[kt * p : (kt + 1) * p]
    return block


def td_vector(eta_c: float, cfg: SystemConfig) -> np.ndarray:
    """Delay vector of one RF chain: arithmetic progression with step z_n/f_c,
    z_n = -P*eta_c/2 periods (optionally rounded to integer periods)."""
    z_n = -cfg.p_sub * eta_c / 2
    if cfg.quantize_delays:
        z_n = float(np.round(z_n))
    t_c = 1.0 / cfg.f_c
    return z_n * t_c * np.arange(cfg.k_t, dtype=float)


def td_phase_vector(t_n: np.ndarray, f_m: float, f_c: float) -> np.ndarray:
    """Per-delayer rotation applied at subcarrier f_m.

    Carrier-referenced: exp(-2j*pi*(f_m - f_c)*t_n), so the first entry is 1
    and nothing rotates at the carrier. The discarded exp(-2j*pi*f_c*t_n)
    factor is frequency-flat per delayer and belongs to the PS calibration.
    """
    return np.exp(-2j * np.pi * (f_m - f_c) * np.asarray(t_n))


def build_frontend(
    channels: ChannelSet, cfg: SystemConfig, with_tds: bool = True
) -> AnalogFrontend:
    """Aim chain n at RIS n's LoS direction; zero the delays if asked."""
    if cfg.num_ris != cfg.n_rf:
        raise ValueError("one RF chain per RIS required")
    eta_c = np.array(
        [np.sin(paths[0].bs_angle) for paths in channels.bs_ris_paths]
    )
    return frontend_from_directions(eta_c, cfg, with_tds=with_tds)


def frontend_from_directions(
    eta_c: np.ndarray, cfg: SystemConfig, with_tds: bool = True
) -> AnalogFrontend:
    eta_c = np.asarray(eta_c, dtype=float)
    F = np.zeros((cfg.n_tx, cfg.k_t * len(eta_c)), dtype=complex)
    t = np.zeros((len(eta_c), cfg.k_t))
    for n, eta in enumerate(eta_c):
        F[:, n * cfg.k_t : (n + 1) * cfg.k_t] = ps_block(eta, cfg)
        if with_tds:
            t[n] = td_vector(eta, cfg)
    return AnalogFrontend(F=F, t=t, eta_c=eta_c, p_sub=cfg.p_sub, f_c=cfg.f_c)


def effective_analog(front: AnalogFrontend, m: int, cfg: SystemConfig) -> np.ndarray:
    """Frequency-dependent analog matrix F_A(m): (n_tx, n_rf), unit-norm columns."""
    f_m = subcarrier_frequencies(cfg)[m]
    out = np.zeros((front.F.shape[0], front.n_rf), dtype=complex)
    for n in range(front.n_rf):
        block = front.F[:, n * front.k_t : (n + 1) * front.k_t]
        out[:, n] = block @ td_phase_vector(front.t[n], f_m, front.f_c)
    return out


def effective_analog_all(front: AnalogFrontend, cfg: SystemConfig) -> np.ndarray:
    """F_A for every subcarrier: (M, n_tx, n_rf)."""
    return np.stack(
        [effective_analog(front, m, cfg) for m in range(cfg.num_subcarriers)]
    )


def identity_frontend_all(cfg: SystemConfig) -> np.ndarray:
    """Fully-digital stand-in: F_A(m) = I for every subcarrier."""
    eye = np.eye(cfg.n_tx, dtype=complex)
    return np.broadcast_to(eye, (cfg.num_subcarriers, cfg.n_tx, cfg.n_tx)).copy()
