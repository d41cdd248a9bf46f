"""WMMSE digital precoding under a total power constraint.

For a fixed analog frontend and reflection state the sum-rate problem is
tackled by alternating closed-form equalizer and weight updates with an
exact KKT solve of the weighted-MSE precoder subproblem (single dual
variable for the coupled power budget, found by bisection).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import SolverError

LN2 = float(np.log(2.0))


@dataclass
class PrecoderSet:
    """Digital vectors d[m, k] (n_rf each); total power sum ||F_A d||^2 <= P."""

    d: np.ndarray  # (M, K, n_rf) complex


@dataclass
class WmmseState:
    u: np.ndarray                      # (M, K) complex equalizers
    tau: np.ndarray                    # (M, K) positive weights
    rate_trace: list = field(default_factory=list)
    mu_trace: list = field(default_factory=list)
    power_trace: list = field(default_factory=list)
    converged: bool = False

    @property
    def mu(self) -> float:
        return self.mu_trace[-1] if self.mu_trace else 0.0

    @property
    def power(self) -> float:
        return self.power_trace[-1] if self.power_trace else 0.0


def _signal_matrix(hhat: np.ndarray, d: np.ndarray) -> np.ndarray:
    """hd[m, k, j] = hhat_{m,k} . d_{m,j}."""
    return np.einsum("mkr,mjr->mkj", hhat, d)


def equalizer_update(hhat: np.ndarray, d: np.ndarray, sigma2: float) -> np.ndarray:
    """MMSE equalizer u_{m,k}; denominator bounded below by the noise power.

    The numerator carries the conjugate of the desired-signal coefficient:
    that is the unique stationary point of the MSE as written (the
    equalizer multiplies the received signal), and the only choice under
    which min-over-u MSE equals 1/(1+SINR).
    """
    hd = _signal_matrix(hhat, d)
    denom = np.sum(np.abs(hd) ** 2, axis=2) + sigma2
    return np.conj(np.einsum("mkk->mk", hd)) / denom


def mse_eval(
    hhat: np.ndarray, d: np.ndarray, u: np.ndarray, sigma2: float
) -> np.ndarray:
    """Per-stream MSE for arbitrary equalizers."""
    hd = _signal_matrix(hhat, d)
    total = np.sum(np.abs(u[:, :, None] * hd) ** 2, axis=2)
    desired = np.einsum("mkk->mk", hd)
    return total - 2 * np.real(u * desired) + np.abs(u) ** 2 * sigma2 + 1.0


def sinr_from_hhat(hhat: np.ndarray, d: np.ndarray, sigma2: float) -> np.ndarray:
    """SINR per (m, k) against the effective per-chain channels."""
    hd = _signal_matrix(hhat, d)
    power = np.abs(hd) ** 2
    desired = np.einsum("mkk->mk", power)
    interference = power.sum(axis=2) - desired
    return desired / (interference + sigma2)


def weight_update(epsilon: np.ndarray) -> np.ndarray:
    """Optimal MSE weights tau = 1/epsilon; rejects non-positive MSEs."""
    epsilon = np.asarray(epsilon)
    if np.any(epsilon <= 0):
        raise ValueError("MSE must be positive")
    return 1.0 / epsilon


def rate_from_hhat(hhat: np.ndarray, d: np.ndarray, sigma2: float) -> float:
    """Sum rate in bits/s/Hz (log1p keeps precision at tiny SINRs)."""
    return float(np.sum(np.log1p(sinr_from_hhat(hhat, d, sigma2)) / LN2))


def _solve_precoders(
    A: np.ndarray, B: np.ndarray, rhs: np.ndarray, mu: float
) -> np.ndarray:
    """d[m, k] = (A_m + mu * B_m)^{-1} rhs_{m,k}, batched over subcarriers."""
    sol = np.linalg.solve(A + mu * B, rhs.transpose(0, 2, 1))
    return sol.transpose(0, 2, 1)


def precoder_update(
    hhat: np.ndarray,
    u: np.ndarray,
    tau: np.ndarray,
    fa: np.ndarray,
    p_max: float,
    power_rel_tol: float = 1e-10,
) -> tuple[np.ndarray, float, float]:
    """Exact solve of the weighted-MSE precoder subproblem.

    Stationarity gives d_{m,k} = (A_m + mu F_A^H F_A)^{-1} tau u* hhat^H with
    A_m the weighted channel Gram; the dual mu >= 0 either vanishes (budget
    slack) or is bisected until the power constraint is tight.

    Returns (d, mu, power_used).
    """
    M, K, _ = hhat.shape
    scale = tau * np.abs(u) ** 2
    A = np.einsum("mk,mkr,mks->mrs", scale, hhat.conj(), hhat)
    B = np.einsum("mtr,mts->mrs", fa.conj(), fa)
    rhs = (tau * np.conj(u))[:, :, None] * hhat.conj()

    if not np.any(rhs):
        return np.zeros_like(hhat), 0.0, 0.0

    def used_power(d: np.ndarray) -> float:
        return float(np.real(np.einsum("mkr,mrs,mks->", d.conj(), B, d)))

    def power_at(mu: float) -> tuple[np.ndarray | None, float]:
        # a singular system means mu is below the usable range: report
        # infinite power so the bisection moves up
        try:
            d = _solve_precoders(A, B, rhs, mu)
        except np.linalg.LinAlgError:
            return None, np.inf
        if not np.all(np.isfinite(d)):
            return None, np.inf
        return d, used_power(d)

    # unconstrained probe via pinv: A_m can be genuinely rank-deficient
    # (nearly parallel users) and rhs always lies in its range
    d0 = np.einsum(
        "mrs,mks->mkr", np.linalg.pinv(A, hermitian=True), rhs
    )
    p0 = used_power(d0)
    if np.all(np.isfinite(d0)) and p0 <= p_max:
        return d0, 0.0, p0

    # bracket: power is strictly decreasing in mu
    a_scale = float(np.max(np.abs(A)))
    mu_hi = max(a_scale, 1e-30)
    for _ in range(400):
        _, p_hi = power_at(mu_hi)
        if p_hi <= p_max:
            break
        mu_hi *= 2.0
    else:
        raise SolverError("power bisection failed to bracket (degenerate channels)")

    mu_lo = 0.0
    for _ in range(200):
        mu_mid = 0.5 * (mu_lo + mu_hi)
        _, p_mid = power_at(mu_mid)
        if p_mid > p_max:
            mu_lo = mu_mid
        else:
            mu_hi = mu_mid
        if (mu_hi - mu_lo) <= power_rel_tol * mu_hi:
            break
    d, used = power_at(mu_hi)
    if d is None:
        raise SolverError("power bisection landed on a singular system")
    return d, mu_hi, used


def weighted_mse_objective(
    hhat: np.ndarray, d: np.ndarray, u: np.ndarray, tau: np.ndarray, sigma2: float
) -> float:
    """P3-form objective sum tau*eps/ln2 (constants in tau kept out)."""
    eps = mse_eval(hhat, d, u, sigma2)
    return float(np.sum(tau * eps) / LN2)


def initial_precoders(hhat: np.ndarray, fa: np.ndarray, p_max: float) -> np.ndarray:
    """Matched-filter directions with an equal power split across streams."""
    M, K, _ = hhat.shape
    d = hhat.conj().copy()
    B = np.einsum("mtr,mts->mrs", fa.conj(), fa)
    per_stream = p_max / (M * K)
    for m in range(M):
        for k in range(K):
            norm2 = float(np.real(d[m, k].conj() @ B[m] @ d[m, k]))
            if norm2 > 0:
                d[m, k] *= np.sqrt(per_stream / norm2)
            else:
                d[m, k] = 0.0
    return d


def wmmse_loop(
    hhat: np.ndarray,
    fa: np.ndarray,
    sigma2: float,
    p_max: float,
    d0: np.ndarray | None = None,
    tol: float = 1e-4,
    max_iter: int = 100,
) -> tuple[PrecoderSet, WmmseState]:
    """Alternate (u, tau, d) updates until the sum rate stalls.

    The rate trace is non-decreasing; iteration stops on relative change
    below ``tol`` or the iteration cap.
    """
    d = initial_precoders(hhat, fa, p_max) if d0 is None else d0.copy()
    B = np.einsum("mtr,mts->mrs", fa.conj(), fa)
    rate = rate_from_hhat(hhat, d, sigma2)
    trace = [rate]
    mus = [0.0]
    powers = [float(np.real(np.einsum("mkr,mrs,mks->", d.conj(), B, d)))]
    u = equalizer_update(hhat, d, sigma2)
    tau = np.ones_like(np.real(u))
    converged = False
    for _ in range(max_iter):
        u = equalizer_update(hhat, d, sigma2)
        # with the optimal equalizer eps = 1/(1+gamma) exactly; this form
        # stays positive where the expanded MSE would cancel to zero
        eps = 1.0 / (1.0 + sinr_from_hhat(hhat, d, sigma2))
        tau = weight_update(eps)
        d, mu, power = precoder_update(hhat, u, tau, fa, p_max)
        new_rate = rate_from_hhat(hhat, d, sigma2)
        trace.append(new_rate)
        mus.append(mu)
        powers.append(power)
        if new_rate - rate <= tol * max(abs(new_rate), 1e-300):
            converged = True
            rate = new_rate
            break
        rate = new_rate
    state = WmmseState(u=u, tau=tau, rate_trace=trace, mu_trace=mus,
                       power_trace=powers, converged=converged)
    return PrecoderSet(d=d), state
