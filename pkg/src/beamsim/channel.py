"""Seeded wideband THz channel synthesis for BS->RIS and RIS->user links."""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .config import SPEED_OF_LIGHT, Geometry, SystemConfig, default_geometry


@dataclass
class PathParams:
    """One propagation path: complex gain, absolute delay and its angles.

    ``bs_angle`` is the departure angle at the BS (meaningful for BS->RIS
    paths only); ``ris_azimuth``/``ris_elevation`` are the (u, v) pair at
    the RIS aperture for either arrival or departure.
    """

    gain: complex
    delay: float
    bs_angle: float
    ris_azimuth: float
    ris_elevation: float

    def __post_init__(self):
        if self.delay < 0:
            raise ValueError("path delay must be nonnegative")
        half_pi = np.pi / 2 + 1e-12
        if not (-half_pi <= self.bs_angle <= half_pi):
            raise ValueError("bs_angle outside [-pi/2, pi/2]")
        if not (-half_pi <= self.ris_azimuth <= half_pi):
            raise ValueError("ris_azimuth outside [-pi/2, pi/2]")
        if not (-1e-12 <= self.ris_elevation <= np.pi + 1e-12):
            raise ValueError("ris_elevation outside [0, pi]")


def subcarrier_frequencies(cfg: SystemConfig) -> np.ndarray:
    """Absolute subcarrier frequencies, ascending, centered on the carrier."""
    m = np.arange(1, cfg.num_subcarriers + 1, dtype=float)
    return cfg.f_c + (cfg.bandwidth / cfg.num_subcarriers) * (
        m - 1 - (cfg.num_subcarriers - 1) / 2
    )


def bs_steering_vector(theta: float, f: float, f_c: float, n_tx: int) -> np.ndarray:
    """ULA steering vector at frequency f toward physical angle theta.

    Entry n carries phase pi*n*(f/f_c)*sin(theta); half-wavelength spacing
    at the carrier is baked in. Unit Euclidean norm.
    """
    n = np.arange(n_tx)
    return np.exp(1j * np.pi * n * (f / f_c) * np.sin(theta)) / np.sqrt(n_tx)


def bs_spatial_steering(eta: float, n_tx: int) -> np.ndarray:
    """ULA steering vector parameterized directly by spatial direction eta
    (entry-n phase pi*n*eta); equals ``bs_steering_vector`` at eta = (f/f_c)sin(theta)."""
    n = np.arange(n_tx)
    return np.exp(1j * np.pi * n * eta) / np.sqrt(n_tx)


def _planar_offsets(m_x: int, m_y: int) -> tuple[np.ndarray, np.ndarray]:
    # row-major over (m_x, m_y): m_x is the slow index, zero-based offsets
    mx = np.repeat(np.arange(m_x), m_y)
    my = np.tile(np.arange(m_y), m_x)
    return mx, my


def ris_steering_vector(
    u: float, v: float, f: float, f_c: float, m_x: int, m_y: int
) -> np.ndarray:
    """UPA steering vector of an (m_x x m_y) RIS panel at frequency f.

    Element (m_x, m_y) carries phase pi*(f/f_c)*(mx*sin(u)sin(v) + my*cos(v)),
    stacked row-major (rows vary slowest). Unit Euclidean norm.
    """
    mx, my = _planar_offsets(m_x, m_y)
    phase = np.pi * (f / f_c) * (mx * np.sin(u) * np.sin(v) + my * np.cos(v))
    return np.exp(1j * phase) / np.sqrt(m_x * m_y)


@dataclass
class ChannelSet:
    """Per-subcarrier channels for every RIS and user, plus the generating paths.

    G[r, m] is the (n_ris x n_tx) BS->RIS matrix, f[r, m, k] the (n_ris,)
    RIS->user row vector. Arrays are frozen after construction; regeneration
    from the same config/seed is bit-identical.
    """

    G: np.ndarray                      # (R, M, n_ris, n_tx) complex
    f: np.ndarray                      # (R, M, K, n_ris) complex
    bs_ris_paths: list                 # [r] -> list[PathParams]
    ris_user_paths: list               # [r][k] -> list[PathParams]
    frequencies: np.ndarray            # (M,)
    seed: int

    def __post_init__(self):
        for arr in (self.G, self.f, self.frequencies):
            arr.setflags(write=False)

    @property
    def num_ris(self) -> int:
        return self.G.shape[0]

    @property
    def num_subcarriers(self) -> int:
        return self.G.shape[1]

    @property
    def num_users(self) -> int:
        return self.f.shape[2]

    @property
    def n_ris(self) -> int:
        return self.G.shape[2]

    def stacked_G(self, m: int) -> np.ndarray:
        """All RIS blocks vertically stacked: (R*n_ris, n_tx)."""
        return self.G[:, m].reshape(-1, self.G.shape[3])

    def stacked_f(self, m: int, k: int) -> np.ndarray:
        """All RIS->user rows horizontally stacked: (R*n_ris,)."""
        return self.f[:, m, k].reshape(-1)


def _ris_arrival_angles(from_pos: np.ndarray, ris_pos: np.ndarray) -> tuple[float, float]:
    """(u, v) of the unit vector pointing from the RIS toward ``from_pos``.

    The panel's rows step along y and columns along z, so sin(u)sin(v) and
    cos(v) are the y and z direction cosines.
    """
    d = from_pos - ris_pos
    dist = np.linalg.norm(d)
    e = d / dist
    v = float(np.arccos(np.clip(e[2], -1.0, 1.0)))
    sv = np.sin(v)
    if sv < 1e-15:
        u = 0.0  # boresight along z: azimuth undefined, any value works
    else:
        u = float(np.arcsin(np.clip(e[1] / sv, -1.0, 1.0)))
    return u, v


def _path_gain(rng: np.random.Generator, dist: float, cfg: SystemConfig) -> complex:
    phase = np.exp(2j * np.pi * rng.uniform())
    if cfg.unit_gain:
        return phase
    return SPEED_OF_LIGHT / (4 * np.pi * cfg.f_c * dist) * phase


def _nlos_paths(
    rng: np.random.Generator, los: PathParams, count: int, departure: bool
) -> list[PathParams]:
    # config extension beyond the single-LoS default: scatterers cost ~20 dB
    paths = []
    for _ in range(count):
        gain = 0.1 * abs(los.gain) * np.exp(2j * np.pi * rng.uniform())
        delay = los.delay * rng.uniform(1.0, 1.5)
        theta = rng.uniform(-np.pi / 2, np.pi / 2)
        u = rng.uniform(-np.pi / 2, np.pi / 2)
        v = rng.uniform(0.0, np.pi)
        paths.append(PathParams(gain, delay, theta, u, v))
    return paths


def synthesize_channels(cfg: SystemConfig, geometry: Geometry | None = None) -> ChannelSet:
    """Deterministic channel realization from config + seed.

    LoS path parameters come from the geometry; gains get free-space
    magnitude (or unit, per config) with seeded uniform phases. Rejects
    degenerate geometry with coincident nodes.
    """
    if geometry is None:
        geometry = default_geometry(cfg)
    if geometry.ris_pos.shape[0] != cfg.num_ris:
        raise ValueError(
            f"geometry has {geometry.ris_pos.shape[0]} RIS positions, "
            f"config wants {cfg.num_ris}"
        )
    rng = np.random.default_rng(cfg.seed)

    if geometry.user_pos is not None:
        users = np.asarray(geometry.user_pos, dtype=float)
    else:
        radius = geometry.user_radius * np.sqrt(rng.uniform(size=cfg.num_users))
        angle = rng.uniform(0.0, 2 * np.pi, size=cfg.num_users)
        users = geometry.user_center + np.stack(
            [radius * np.cos(angle), radius * np.sin(angle), np.zeros(cfg.num_users)],
            axis=1,
        )

    bs = geometry.bs_pos
    freqs = subcarrier_frequencies(cfg)

    # draw every path parameter up front so per-(r,m,k) synthesis is pure
    bs_ris_paths: list[list[PathParams]] = []
    for r in range(cfg.num_ris):
        pos = geometry.ris_pos[r]
        dist = float(np.linalg.norm(pos - bs))
        if dist < 1e-9:
            raise ValueError(f"RIS {r} coincides with the BS")
        direction = (pos - bs) / dist
        theta = float(np.arcsin(np.clip(direction[1], -1.0, 1.0)))
        u, v = _ris_arrival_angles(bs, pos)
        los = PathParams(_path_gain(rng, dist, cfg), dist / SPEED_OF_LIGHT, theta, u, v)
        paths = [los] + _nlos_paths(rng, los, cfg.l1 - 1, departure=False)
        bs_ris_paths.append(paths)

    ris_user_paths: list[list[list[PathParams]]] = []
    for r in range(cfg.num_ris):
        pos = geometry.ris_pos[r]
        per_user = []
        for k in range(cfg.num_users):
            dist = float(np.linalg.norm(users[k] - pos))
            if dist < 1e-9:
                raise ValueError(f"user {k} coincides with RIS {r}")
            u, v = _ris_arrival_angles(users[k], pos)
            los = PathParams(_path_gain(rng, dist, cfg), dist / SPEED_OF_LIGHT, 0.0, u, v)
            paths = [los] + _nlos_paths(rng, los, cfg.l2 - 1, departure=True)
            per_user.append(paths)
        ris_user_paths.append(per_user)

    G = np.zeros(
        (cfg.num_ris, cfg.num_subcarriers, cfg.n_ris, cfg.n_tx), dtype=complex
    )
    F = np.zeros(
        (cfg.num_ris, cfg.num_subcarriers, cfg.num_users, cfg.n_ris), dtype=complex
    )
    for r in range(cfg.num_ris):
        for m, fm in enumerate(freqs):
            for path in bs_ris_paths[r]:
                b = ris_steering_vector(
                    path.ris_azimuth, path.ris_elevation, fm, cfg.f_c, cfg.m_x, cfg.m_y
                )
                a = bs_steering_vector(path.bs_angle, fm, cfg.f_c, cfg.n_tx)
                G[r, m] += (
                    path.gain
                    * np.exp(-2j * np.pi * path.delay * fm)
                    * np.outer(b, a.conj())
                )
            for k in range(cfg.num_users):
                for path in ris_user_paths[r][k]:
                    b = ris_steering_vector(
                        path.ris_azimuth,
                        path.ris_elevation,
                        fm,
                        cfg.f_c,
                        cfg.m_x,
                        cfg.m_y,
                    )
                    F[r, m, k] += (
                        path.gain * np.exp(-2j * np.pi * path.delay * fm) * b
                    )

    return ChannelSet(
        G=G,
        f=F,
        bs_ris_paths=bs_ris_paths,
        ris_user_paths=ris_user_paths,
        frequencies=freqs,
        seed=cfg.seed,
    )


def cascaded_channel(ch: ChannelSet, psi: np.ndarray, m: int, k: int) -> np.ndarray:
    """Effective BS->user row vector h_{m,k} = sum_r f_{r,m,k} Phi_r G_{r,m}.

    ``psi`` is the stacked reflection vector (R*n_ris,); the diagonal form
    never needs materializing.
    """
    psi = np.asarray(psi)
    return (ch.stacked_f(m, k) * psi) @ ch.stacked_G(m)


def all_cascaded_channels(ch: ChannelSet, psi: np.ndarray) -> np.ndarray:
    """h for every (m, k): (M, K, n_tx)."""
    R, M, K, n = ch.f.shape
    f_stk = ch.f.transpose(1, 2, 0, 3).reshape(M, K, R * n)
    G_stk = ch.G.transpose(1, 0, 2, 3).reshape(M, R * n, -1)
    return np.einsum("mki,mit->mkt", f_stk * psi, G_stk)


def channelset_to_json(ch: ChannelSet) -> str:
    """Serialize dimensions, seed and complex entries as (re, im) pairs."""

    def cplx(arr):
        return np.stack([arr.real, arr.imag], axis=-1).tolist()

    doc = {
        "shape_G": list(ch.G.shape),
        "shape_f": list(ch.f.shape),
        "seed": ch.seed,
        "frequencies": ch.frequencies.tolist(),
        "G": cplx(ch.G),
        "f": cplx(ch.f),
    }
    return json.dumps(doc)


def channelset_from_json(text: str) -> ChannelSet:
    doc = json.loads(text)

    def uncplx(data, shape):
        arr = np.asarray(data, dtype=float)
        return (arr[..., 0] + 1j * arr[..., 1]).reshape(shape)

    return ChannelSet(
        G=uncplx(doc["G"], doc["shape_G"]),
        f=uncplx(doc["f"], doc["shape_f"]),
        bs_ris_paths=[],
        ris_user_paths=[],
        frequencies=np.asarray(doc["frequencies"], dtype=float),
        seed=int(doc["seed"]),
    )
