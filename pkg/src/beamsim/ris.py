"""Reflection-coefficient optimization for fixed precoders.

The sum-rate objective is rewritten with a Lagrangian-dual auxiliary (rho)
and a complex quadratic transform auxiliary (chi), collapsing each sweep
into one convex QCQP over the stacked reflection vector, solved by ADMM
with entrywise unit-disc projection.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .channel import ChannelSet

LN2 = float(np.log(2.0))


@dataclass
class ReflectionState:
    """Stacked reflection vector psi (length R*n_ris, row-major per panel)."""

    psi: np.ndarray

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)

    def blocks(self, n_ris: int) -> np.ndarray:
        return self.psi.reshape(-1, n_ris)


@dataclass
class AuxiliaryVars:
    rho: np.ndarray   # (M, K) nonnegative
    chi: np.ndarray   # (M, K) complex


@dataclass
class QuadraticForm:
    """Hermitian PSD form: Upsilon_2(psi) = -psi^H L psi + 2Re(psi^H u) - s."""

    Lambda: np.ndarray
    upsilon: np.ndarray
    varsigma: float


@dataclass
class AdmmInfo:
    converged: bool
    iterations: int
    objective: float
    trace: list = field(default_factory=list)  # per-iteration csv-able rows
    y: np.ndarray | None = None                # final scaled dual


def cascade_tensor(ch: ChannelSet, w: np.ndarray) -> np.ndarray:
    """c[m, k, j, i] = f_{m,k,i} * (G_m w_{m,j})_i, so Q = c . psi.

    Everything downstream of the reflection vector is linear in psi through
    this tensor; it only changes when the precoders do.
    """
    R, M, K, n = ch.f.shape
    f_stk = ch.f.transpose(1, 2, 0, 3).reshape(M, K, R * n)
    G_stk = ch.G.transpose(1, 0, 2, 3).reshape(M, R * n, -1)
    gw = np.einsum("mit,mjt->mji", G_stk, w)
    return f_stk[:, :, None, :] * gw[:, None, :, :]


def compute_Q(ch: ChannelSet, psi: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Q[m, k, j] = f_{m,k} Phi G_m w_{m,j} for the current reflections."""
    return cascade_tensor(ch, w) @ np.asarray(psi)


def _q_sinr(Q: np.ndarray, sigma2: float) -> np.ndarray:
    power = np.abs(Q) ** 2
    desired = np.einsum("mkk->mk", power)
    interference = power.sum(axis=2) - desired
    return desired / (interference + sigma2)


def rho_update(
    ch: ChannelSet, psi: np.ndarray, w: np.ndarray, sigma2: float
) -> np.ndarray:
    """Optimal LDR auxiliary: rho_{m,k} equals the current SINR."""
    return _q_sinr(compute_Q(ch, psi, w), sigma2)


def chi_update(
    ch: ChannelSet,
    psi: np.ndarray,
    w: np.ndarray,
    rho: np.ndarray,
    sigma2: float,
) -> np.ndarray:
    """Optimal quadratic-transform auxiliary chi_{m,k}."""
    Q = compute_Q(ch, psi, w)
    return _chi_from_Q(Q, rho, sigma2)


def _chi_from_Q(Q: np.ndarray, rho: np.ndarray, sigma2: float) -> np.ndarray:
    denom = np.sum(np.abs(Q) ** 2, axis=2) + sigma2
    desired = np.einsum("mkk->mk", Q)
    return np.sqrt(1.0 + rho) * desired / denom


def assemble_quadratic(
    ch: ChannelSet,
    w: np.ndarray,
    rho: np.ndarray,
    chi: np.ndarray,
    sigma2: float,
) -> QuadraticForm:
    """Collapse the transformed objective into (Lambda, upsilon, varsigma)."""
    return _assemble_from_tensor(cascade_tensor(ch, w), rho, chi, sigma2)


def _assemble_from_tensor(
    c: np.ndarray, rho: np.ndarray, chi: np.ndarray, sigma2: float
) -> QuadraticForm:
    # q_{k,m,j} = conj(chi* . c): the form then lives directly on the
    # reflection vector rather than its conjugate.
    abs2chi = np.abs(chi) ** 2
    Lam = np.einsum("mk,mkji,mkjl->il", abs2chi, c.conj(), c, optimize=True)
    Lam = 0.5 * (Lam + Lam.conj().T)
    M, K = chi.shape
    c_diag = c[np.arange(M)[:, None], np.arange(K)[None, :], np.arange(K)[None, :], :]
    ups = np.einsum("mk,mki->i", np.sqrt(1.0 + rho) * chi, c_diag.conj())
    var = float(sigma2 * np.sum(abs2chi))
    return QuadraticForm(Lambda=Lam, upsilon=ups, varsigma=var)


def quadratic_objective(q: QuadraticForm, psi: np.ndarray) -> float:
    """Upsilon_2 at psi (the maximization form, noise term included)."""
    quad = float(np.real(psi.conj() @ q.Lambda @ psi))
    lin = float(np.real(psi.conj() @ q.upsilon))
    return -quad + 2 * lin - q.varsigma


def transformed_objective_direct(
    ch: ChannelSet,
    psi: np.ndarray,
    w: np.ndarray,
    rho: np.ndarray,
    chi: np.ndarray,
    sigma2: float,
) -> float:
    """Upsilon_2 evaluated term by term from Q; oracle for the assembled form."""
    Q = compute_Q(ch, psi, w)
    desired = np.einsum("mkk->mk", Q)
    denom = np.sum(np.abs(Q) ** 2, axis=2) + sigma2
    terms = 2 * np.sqrt(1.0 + rho) * np.real(np.conj(chi) * desired) - np.abs(
        chi
    ) ** 2 * denom
    return float(np.sum(terms))


def ldr_objective(rho: np.ndarray, Q: np.ndarray, sigma2: float) -> float:
    """f(Phi, W, rho): natural-log LDR surrogate of the sum rate."""
    power = np.abs(Q) ** 2
    desired = np.einsum("mkk->mk", power)
    frac = desired / (power.sum(axis=2) + sigma2)
    return float(np.sum(np.log1p(rho) - rho + (1.0 + rho) * frac))


def _project_disc(x: np.ndarray, unit_modulus: bool) -> np.ndarray:
    mag = np.abs(x)
    if unit_modulus:
        safe = np.where(mag > 0, mag, 1.0)
        out = x / safe
        out[mag == 0] = 1.0
        return out
    scale = np.where(mag > 1.0, mag, 1.0)
    return x / scale


def admm_solve(
    q: QuadraticForm,
    psi0: np.ndarray,
    tol: float = 1e-6,
    max_iter: int = 500,
    unit_modulus: bool = False,
    collect_trace: bool = False,
    y0: np.ndarray | None = None,
    relaxation: float = 1.7,
) -> tuple[np.ndarray, AdmmInfo]:
    """Minimize psi^H L psi - 2Re(psi^H u) subject to |psi_i| <= 1.

    Splitting: unconstrained psi, projected copy z, scaled dual y. The
    psi-step solves (L + (rho/2)I)psi = u + (rho/2)(z - y) in the cached
    eigenbasis of L, so penalty rescaling costs nothing. Over-relaxation
    plus residual balancing (double/halve rho when the residuals diverge
    by 10x) keep the linear rate reasonable; a caller inside an outer
    alternation can warm-start the scaled dual via ``y0``.

    Returns the projected copy z (always feasible) and solver info; hitting
    the iteration cap is reported, not raised.
    """
    n = q.upsilon.shape[0]
    vals, vecs = np.linalg.eigh(q.Lambda)
    vals = np.clip(vals, 0.0, None)

    # trace rule alone collapses when Lambda is much smaller than upsilon
    rho = float(np.sum(vals) / n + 2.0 * np.linalg.norm(q.upsilon) / np.sqrt(n))
    if rho <= 0.0:
        rho = 1.0

    z = _project_disc(np.asarray(psi0, dtype=complex).copy(), unit_modulus)
    y = np.zeros(n, dtype=complex) if y0 is None else np.asarray(y0, complex).copy()
    psi = z.copy()
    trace: list = []
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        rhs = q.upsilon + (rho / 2.0) * (z - y)
        psi = vecs @ ((vecs.conj().T @ rhs) / (vals + rho / 2.0))
        psi_hat = relaxation * psi + (1.0 - relaxation) * z
        z_old = z
        z = _project_disc(psi_hat + y, unit_modulus)
        y = y + psi_hat - z

        r_norm = float(np.linalg.norm(psi - z))
        s_norm = float(rho * np.linalg.norm(z - z_old))
        eps_pri = tol * np.sqrt(n) + tol * max(
            np.linalg.norm(psi), np.linalg.norm(z)
        )
        eps_dual = tol * np.sqrt(n) + tol * rho * np.linalg.norm(y)
        if collect_trace:
            trace.append(
                {
                    "iteration": it,
                    "objective": _admm_objective(q, z),
                    "primal_residual": r_norm,
                    "dual_residual": s_norm,
                    "rho_admm": rho,
                }
            )
        if r_norm <= eps_pri and s_norm <= eps_dual:
            converged = True
            break
        if r_norm > 10.0 * s_norm:
            rho *= 2.0
            y /= 2.0
        elif s_norm > 10.0 * r_norm:
            rho /= 2.0
            y *= 2.0

    info = AdmmInfo(
        converged=converged,
        iterations=it,
        objective=_admm_objective(q, z),
        trace=trace,
        y=y,
    )
    return z, info


def _admm_objective(q: QuadraticForm, psi: np.ndarray) -> float:
    """Upsilon_3 minimization objective (no constant term)."""
    return float(
        np.real(psi.conj() @ q.Lambda @ psi) - 2 * np.real(psi.conj() @ q.upsilon)
    )


def initial_reflection(ch: ChannelSet, cfg) -> np.ndarray:
    """Beam-split-aware warm start: per panel, cancel the carrier-frequency
    cascade phase toward the chain's transmit direction and the user centroid."""
    from .channel import bs_steering_vector, ris_steering_vector

    R = ch.num_ris
    n_ris = ch.n_ris
    psi = np.zeros(R * n_ris, dtype=complex)
    for r in range(R):
        los = ch.bs_ris_paths[r][0]
        b_in = ris_steering_vector(
            los.ris_azimuth, los.ris_elevation, cfg.f_c, cfg.f_c, cfg.m_x, cfg.m_y
        )
        cascade = np.zeros(n_ris, dtype=complex)
        for k in range(ch.num_users):
            user_los = ch.ris_user_paths[r][k][0]
            b_out = ris_steering_vector(
                user_los.ris_azimuth,
                user_los.ris_elevation,
                cfg.f_c,
                cfg.f_c,
                cfg.m_x,
                cfg.m_y,
            )
            cascade += b_in * b_out
        psi[r * n_ris : (r + 1) * n_ris] = np.exp(-1j * np.angle(cascade))
    return psi


def ris_loop(
    ch: ChannelSet,
    w: np.ndarray,
    psi0: np.ndarray,
    sigma2: float,
    tol: float = 1e-4,
    max_sweeps: int = 50,
    admm_tol: float = 1e-6,
    admm_max_iter: int = 500,
    unit_modulus: bool = False,
) -> tuple[ReflectionState, list]:
    """Alternate (rho, chi, psi) updates; the LDR surrogate never decreases.

    Returns the final reflection state and the per-sweep objective trace.
    """
    c = cascade_tensor(ch, w)
    psi = np.asarray(psi0, dtype=complex).copy()
    trace = []
    prev = None
    y = None
    for _ in range(max_sweeps):
        Q = c @ psi
        rho = _q_sinr(Q, sigma2)
        chi = _chi_from_Q(Q, rho, sigma2)
        quad = _assemble_from_tensor(c, rho, chi, sigma2)
        candidate, info = admm_solve(
            quad,
            psi,
            tol=admm_tol,
            max_iter=admm_max_iter,
            unit_modulus=unit_modulus,
            y0=y,
        )
        y = info.y
        # ADMM is approximate: never step to a worse point than the warm start
        if _admm_objective(quad, candidate) <= _admm_objective(quad, psi):
            psi = candidate
        value = ldr_objective(rho, c @ psi, sigma2)
        trace.append(value)
        if prev is not None and value - prev <= tol * max(abs(value), 1e-300):
            break
        prev = value
    return ReflectionState(psi=psi), trace
