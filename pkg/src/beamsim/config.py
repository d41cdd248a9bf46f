"""Scenario configuration: system parameters, node placement, JSON ingestion."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0  # m/s, exact


class ConfigError(ValueError):
    """Invalid configuration document or parameter combination."""


class SolverError(RuntimeError):
    """An optimization subroutine failed to produce a usable iterate."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        raise ValueError("power must be positive")
    return 10.0 * np.log10(watts * 1000.0)


@dataclass
class SystemConfig:
    """All scenario parameters: Table-I style system knobs plus solver settings.

    Powers cross the JSON interface in dBm and are exposed internally in
    Watts via ``p_max`` / ``sigma2``. Frequencies are Hz, angles radians.
    """

    f_c: float = 100e9            # carrier frequency
    bandwidth: float = 10e9       # total bandwidth B
    num_subcarriers: int = 8      # M
    n_tx: int = 16                # BS antennas
    n_rf: int = 4                 # RF chains (= number of RISs)
    k_t: int = 16                 # time delayers per RF chain
    num_ris: int = 4              # R
    m_x: int = 8                  # RIS rows (per RIS)
    m_y: int = 8                  # RIS columns (per RIS)
    num_users: int = 4            # K
    p_max_dbm: float = 0.0        # total transmit power budget
    noise_dbm: float = -82.0      # per-user per-subcarrier noise power
    l1: int = 1                   # BS->RIS paths
    l2: int = 1                   # RIS->user paths
    seed: int = 0

    # model switches
    unit_gain: bool = False       # unit-magnitude path gains instead of free-space
    quantize_delays: bool = False  # round TD periods z_n to integers
    unit_modulus: bool = False    # project reflections to |psi|=1 instead of <=1
    identity_frontend: bool = False  # fully-digital mode: F_A = I, n_rf = n_tx

    # solver knobs
    wmmse_tol: float = 1e-4
    wmmse_max_iter: int = 100
    ris_tol: float = 1e-4
    ris_max_sweeps: int = 50
    admm_tol: float = 1e-6
    admm_max_iter: int = 500
    outer_tol: float = 1e-4
    outer_max_iter: int = 50

    def __post_init__(self):
        if self.identity_frontend:
            self.n_rf = self.n_tx
        self.validate()

    def validate(self):
        counts = {
            "num_subcarriers": self.num_subcarriers,
            "n_tx": self.n_tx,
            "n_rf": self.n_rf,
            "k_t": self.k_t,
            "num_ris": self.num_ris,
            "m_x": self.m_x,
            "m_y": self.m_y,
            "num_users": self.num_users,
            "l1": self.l1,
            "l2": self.l2,
        }
        for name, value in counts.items():
            if int(value) != value or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.f_c <= 0 or self.bandwidth <= 0:
            raise ConfigError("f_c and bandwidth must be positive")
        if not self.identity_frontend:
            if self.n_tx % self.k_t != 0:
                raise ConfigError(
                    f"n_tx={self.n_tx} must be divisible by k_t={self.k_t}"
                )
            if self.n_rf != self.num_ris:
                raise ConfigError(
                    f"n_rf={self.n_rf} must equal num_ris={self.num_ris} "
                    "(one RF chain serves one RIS)"
                )

    @property
    def p_max(self) -> float:
        """Transmit power budget in Watts."""
        return dbm_to_watts(self.p_max_dbm)

    @property
    def sigma2(self) -> float:
        """Noise power in Watts."""
        return dbm_to_watts(self.noise_dbm)

    @property
    def n_ris(self) -> int:
        """Elements per RIS."""
        return self.m_x * self.m_y

    @property
    def n_ris_total(self) -> int:
        return self.num_ris * self.n_ris

    @property
    def p_sub(self) -> int:
        """Antennas per time delayer (subarray size)."""
        if self.identity_frontend:
            return 1
        return self.n_tx // self.k_t

    def replace(self, **changes) -> "SystemConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass
class Geometry:
    """Node placement. RIS panels live in the x=0 plane with elements along
    the y (rows) and z (columns) axes; users occupy a disc on the ground."""

    bs_pos: np.ndarray = field(default_factory=lambda: np.array([10.0, 0.0, 2.0]))
    ris_pos: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    user_center: np.ndarray = field(default_factory=lambda: np.array([0.0, 85.0, 0.0]))
    user_radius: float = 1.0
    user_pos: np.ndarray | None = None  # explicit (K, 3); drawn from disc if None

    def __post_init__(self):
        self.bs_pos = np.asarray(self.bs_pos, dtype=float)
        self.ris_pos = np.asarray(self.ris_pos, dtype=float).reshape(-1, 3)
        self.user_center = np.asarray(self.user_center, dtype=float)
        if self.user_pos is not None:
            self.user_pos = np.asarray(self.user_pos, dtype=float).reshape(-1, 3)


def default_ris_positions(num_ris: int) -> np.ndarray:
    """RIS panel centers: the four published positions, extended down-range
    in steps of 20 m if more panels are requested."""
    if num_ris == 1:
        return np.array([[0.0, 90.0, 7.0]])
    pos = []
    for i in range(num_ris):
        y = 80.0 + 20.0 * ((i >> 1) & 1) + 40.0 * (i >> 2)
        z = 6.0 + 2.0 * (i & 1)
        pos.append((0.0, y, z))
    return np.array(pos)


def default_geometry(cfg: SystemConfig) -> Geometry:
    return Geometry(ris_pos=default_ris_positions(cfg.num_ris))


_GEOMETRY_KEYS = {"bs_pos", "ris_pos", "user_center", "user_radius", "user_pos"}


def config_from_dict(doc: dict) -> tuple[SystemConfig, Geometry | None]:
    """Build (SystemConfig, Geometry) from a parsed JSON document.

    Unknown keys are rejected so typos fail loudly.
    """
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    doc = dict(doc)
    geo_doc = doc.pop("geometry", None)
    known = {f.name for f in dataclasses.fields(SystemConfig)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    try:
        cfg = SystemConfig(**doc)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc

    geometry = None
    if geo_doc is not None:
        if not isinstance(geo_doc, dict):
            raise ConfigError("geometry must be a JSON object")
        unknown = set(geo_doc) - _GEOMETRY_KEYS
        if unknown:
            raise ConfigError(f"unknown geometry fields: {sorted(unknown)}")
        kwargs = dict(geo_doc)
        if "ris_pos" not in kwargs:
            kwargs["ris_pos"] = default_ris_positions(cfg.num_ris)
        geometry = Geometry(**kwargs)
        if geometry.ris_pos.shape[0] != cfg.num_ris:
            raise ConfigError(
                f"geometry lists {geometry.ris_pos.shape[0]} RIS positions, "
                f"config expects {cfg.num_ris}"
            )
        if geometry.user_pos is not None and geometry.user_pos.shape[0] != cfg.num_users:
            raise ConfigError(
                f"geometry lists {geometry.user_pos.shape[0]} user positions, "
                f"config expects {cfg.num_users}"
            )
    return cfg, geometry


def load_config(path: str) -> tuple[SystemConfig, Geometry | None]:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    return config_from_dict(doc)
