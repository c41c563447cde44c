"""Two-phase sum-rate solver: greedy feed switching, then alternating
gradient-based pinch placement and WMMSE beamforming.

Phase I fixes the binary feed selection by cyclic greedy passes, evaluating
each candidate with the pinch parked at the candidate feed and beams
re-solved by WMMSE.  Phase II alternates a normalized-gradient ascent step
on the pinch positions (backtracking line search, projection onto the
waveguide) with a WMMSE beam update, committing an outer iteration only when
it improves the sum rate by at least the convergence tolerance, so the
reported trace is nondecreasing up to solver noise (relative 1e-8, the slack
the beamforming iteration itself is held to).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .multi_waveguide import (
    MultiWaveguideScenario,
    NetworkState,
    RateReport,
    effective_channel_matrix,
    rate_report,
)

LN2 = math.log(2.0)


@dataclass
class OptimizerConfig:
    epsilon: float = 1e-4                 # sum-rate improvement tolerance
    max_outer_iters: int = 200
    max_greedy_passes: int = 20
    bls_contraction: float = 0.5          # beta
    bls_expansion: float = 1.2            # zeta
    initial_step_m: float | None = None   # None -> L_x / 10
    bls_max_backtracks: int = 30
    wmmse_tolerance: float = 1e-8         # absolute change of the weighted-MSE objective
    wmmse_max_iters: int = 500
    bisection_tolerance: float = 1e-10    # absolute power mismatch at the multiplier
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.bls_contraction < 1.0:
            raise ValueError("contraction factor must lie in (0, 1)")
        if self.bls_expansion <= 1.0:
            raise ValueError("expansion factor must exceed 1")
        for name in ("epsilon", "wmmse_tolerance", "bisection_tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class WmmseResult:
    beams: np.ndarray
    sum_rate: float
    iterations: int
    converged: bool
    rate_trace: list = field(default_factory=list)


def _mrt_beams(channel_matrix: np.ndarray, total_power_w: float) -> np.ndarray:
    """Matched beams, total power split equally over users with nonzero channels."""
    norms = np.linalg.norm(channel_matrix, axis=0)
    active = norms > 0
    beams = np.zeros_like(channel_matrix)
    if active.any():
        per_user = total_power_w / active.sum()
        beams[:, active] = channel_matrix[:, active] / norms[active] * math.sqrt(per_user)
    return beams


def _solve_beams(channel_matrix: np.ndarray, u: np.ndarray, w: np.ndarray,
                 total_power_w: float, bisection_tolerance: float) -> np.ndarray:
    """Beam update from the stationarity system (A + mu I) p_m = w_m u_m h_m.

    A = sum_k w_k |u_k|^2 h_k h_k^H is Hermitian PSD, so one
    eigendecomposition gives the transmit power in closed form for any
    multiplier mu, and the power-budget multiplier is found by bisection.
    With slack power at mu = 0 the minimum-norm (pseudo-inverse) solution is
    used directly.
    """
    scale = w * np.abs(u) ** 2
    a = (channel_matrix * scale) @ channel_matrix.conj().T
    rhs = channel_matrix * (w * u)
    lam, vec = np.linalg.eigh(a)
    lam = np.maximum(lam, 0.0)
    r = vec.conj().T @ rhs                      # rotated right-hand sides
    c = np.sum(np.abs(r) ** 2, axis=1)          # per-eigenvalue power weights

    tiny = max(lam.max(), 1.0) * 1e-14

    def power(mu: float) -> float:
        denom = lam + mu
        if mu == 0.0:
            # pseudo-inverse limit: null-space components carry no power
            mask = lam > tiny
            return float(np.sum(c[mask] / lam[mask] ** 2)) if mask.any() else 0.0
        return float(np.sum(c / denom**2))

    def beams(mu: float) -> np.ndarray:
        denom = lam + mu
        if mu == 0.0:
            inv = np.where(lam > tiny, 1.0 / np.maximum(lam, tiny), 0.0)
        else:
            inv = 1.0 / denom
        return vec @ (r * inv[:, None])

    null_power = float(np.sum(c[lam <= tiny])) if (lam <= tiny).any() else 0.0
    if null_power <= tiny * total_power_w and power(0.0) <= total_power_w:
        return beams(0.0)

    hi = 1.0
    while power(hi) > total_power_w:
        hi *= 2.0
        if hi > 1e30:
            raise FloatingPointError("power multiplier bracket failed to close")
    lo = 0.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        p = power(mid)
        if abs(p - total_power_w) <= bisection_tolerance:
            return beams(mid)
        if p > total_power_w:
            lo = mid
        else:
            hi = mid
    return beams(hi)


def wmmse_beamforming(channel_matrix: np.ndarray, total_power_w: float,
                      noise_power_w: float, cfg: OptimizerConfig,
                      initial_beams: np.ndarray | None = None,
                      tolerance: float | None = None) -> WmmseResult:
    """Weighted-MMSE beamforming under a total power budget.

    Block-coordinate updates of the receiver coefficients u, the MSE weights
    w, and the beams p.  The sum rate is checked every iteration and the
    returned trace is nondecreasing: if a solve ever degrades the rate
    (possible only at the conditioning floor of extreme SINRs) the previous
    iterate is returned instead.  Iteration stops once the weighted-MSE
    objective change falls below the tolerance.
    """
    channel_matrix = np.asarray(channel_matrix, dtype=complex)
    if not np.all(np.isfinite(channel_matrix.view(float))):
        raise ValueError("channel matrix contains non-finite entries")
    tol = cfg.wmmse_tolerance if tolerance is None else tolerance
    beams = _mrt_beams(channel_matrix, total_power_w) if initial_beams is None \
        else np.asarray(initial_beams, dtype=complex).copy()

    def current_rate(b):
        return rate_report(b, channel_matrix, noise_power_w).sum_rate

    rate = current_rate(beams)
    rate_trace = [rate]
    previous_beams = beams
    objective_prev = math.inf
    converged = False
    iterations = 0
    for iterations in range(1, cfg.wmmse_max_iters + 1):
        products = channel_matrix.conj().T @ beams      # (M, M), row m = h_m^H p_i
        totals = np.sum(np.abs(products) ** 2, axis=1) + noise_power_w
        signals = np.abs(np.diag(products)) ** 2
        u = np.diag(products) / totals
        mse = (totals - signals) / totals               # e_m at the optimal receiver
        w = 1.0 / mse
        beams = _solve_beams(channel_matrix, u, w, total_power_w, cfg.bisection_tolerance)

        new_rate = current_rate(beams)
        slack = 1e-8 * max(1.0, abs(rate))
        if new_rate < rate - slack:
            # the block update is only exact in exact arithmetic; at extreme
            # SINRs the solve hits its conditioning floor, so keep the best
            # iterate instead of propagating a worse one
            beams = previous_beams
            break
        rate = new_rate
        rate_trace.append(rate)
        previous_beams = beams

        objective = float(np.sum(w * mse - np.log(w)))
        if abs(objective_prev - objective) < tol:
            converged = True
            break
        objective_prev = objective

    return WmmseResult(beams, rate, iterations, converged, rate_trace)


@dataclass
class GradientVector:
    g: np.ndarray

    @property
    def g_max(self) -> float:
        return float(np.max(np.abs(self.g))) if self.g.size else 0.0


def sum_rate_gradient(scenario: MultiWaveguideScenario, state: NetworkState) -> GradientVector:
    """Analytic gradient of the sum rate with respect to the pinch positions.

    Chain rule through the SINRs with beams held fixed; the per-waveguide
    channel derivative combines the in-waveguide response derivative with the
    LoS and scattered-path derivatives, each obtained by logarithmic
    differentiation of the spherical-wave terms.
    """
    geo = scenario.geometry
    wg = scenario.waveguide
    n_wg, m_users = scenario.num_waveguides, scenario.num_users
    lam = scenario.carrier.wavelength_m
    k_free = 2.0 * math.pi / lam
    decay = complex(0.5 * scenario.alpha.nepers_per_meter, 2.0 * math.pi / wg.guided_wavelength_m)

    channel = np.zeros((n_wg, m_users), dtype=complex)
    d_channel = np.zeros((n_wg, m_users), dtype=complex)
    for n in range(n_wg):
        x_n = float(state.pa_positions[n])
        xi = int(state.feed_selection[n])
        pa = scenario.pa_position(n, x_n)
        nu = np.exp(-decay * (x_n if xi == 1 else wg.length_m - x_n))
        d_nu = -decay * nu if xi == 1 else decay * nu

        for m, user in enumerate(scenario.users):
            r = math.dist((pa.x_m, pa.y_m, pa.z_m), (user.x_m, user.y_m, user.z_m))
            if r == 0.0:
                raise ValueError("gradient is singular: pinch coincides with a user")
            phase = np.exp(-1j * k_free * r)
            los = math.sqrt(scenario.carrier.los_constant) / r * phase
            d_los = -los * (1j * k_free + 1.0 / r) * (x_n - user.x_m) / r

            nlos = 0j
            d_nlos = 0j
            if scenario.scatterers is not None:
                for sc, gamma in zip(scenario.scatterers.positions,
                                     scenario.scatterers.reflection_coefficients):
                    d1 = math.dist((pa.x_m, pa.y_m, pa.z_m), (sc.x_m, sc.y_m, sc.z_m))
                    d2 = math.dist((user.x_m, user.y_m, user.z_m), (sc.x_m, sc.y_m, sc.z_m))
                    if d1 == 0.0 or d2 == 0.0:
                        raise ValueError("gradient is singular: scatterer coincides "
                                         "with pinch or user")
                    term = (complex(gamma) * np.exp(-1j * k_free * d1) / d1
                            * np.exp(-1j * k_free * d2) / d2)
                    nlos += term
                    d_nlos += -term * (1j * k_free + 1.0 / d1) * (x_n - sc.x_m) / d1

            gain = los + nlos
            channel[n, m] = nu * gain
            d_channel[n, m] = d_nu * gain + nu * (d_los + d_nlos)

    beams = state.beamforming
    products = channel.conj().T @ beams                     # (M, M), row m = h_m^H p_i
    powers = np.abs(products) ** 2
    signal = np.diag(powers).copy()
    interference = powers.sum(axis=1) - signal
    denom = interference + scenario.noise_power_w
    gamma = signal / denom

    # h_m^H p_i depends on x_n through conj(h_{n,m}), so
    # d|h_m^H p_i|^2 / dx_n = 2 Re{ (h_m^H p_i)^* p_{n,i} (dh_{n,m}/dx_n)^* }.
    # The interference part sums i != m explicitly: subtracting the signal
    # term instead leaves a rounding residue that the 1/denom^2 factor can
    # amplify catastrophically when a user sees no interference.
    off_diag = products.conj().copy()
    np.fill_diagonal(off_diag, 0.0)
    q_interf = beams @ off_diag.T                           # (N, M): sum_{i != m} p_{n,i} B[m,i]^*
    d_signal = 2.0 * np.real(d_channel.conj() * beams * np.diag(products).conj()[None, :])
    d_interf = 2.0 * np.real(d_channel.conj() * q_interf)

    d_gamma = d_signal / denom[None, :] - (signal / denom**2)[None, :] * d_interf
    weights = 1.0 / (LN2 * (1.0 + gamma))
    g = d_gamma @ weights
    if not np.all(np.isfinite(g)):
        raise FloatingPointError("non-finite sum-rate gradient")
    return GradientVector(np.asarray(g, dtype=float))


@dataclass
class BlsUpdate:
    positions: np.ndarray
    accepted_step_m: float | None
    next_candidate_m: float
    improved: bool
    sum_rate: float


def _positions_rate(scenario: MultiWaveguideScenario, state: NetworkState,
                    positions: np.ndarray) -> float:
    trial = NetworkState(state.feed_selection, positions, state.beamforming)
    matrix = effective_channel_matrix(scenario, trial)
    return rate_report(state.beamforming, matrix, scenario.noise_power_w).sum_rate


def bls_position_update(scenario: MultiWaveguideScenario, state: NetworkState,
                        grad: GradientVector, cfg: OptimizerConfig,
                        step_candidate_m: float) -> BlsUpdate:
    """Backtracking line search along the normalized gradient direction.

    Shrinks the candidate step by the contraction factor until the projected
    update strictly increases the sum rate (beams fixed), then reports the
    expanded candidate for the next iteration.  A zero gradient or an
    exhausted backtrack budget leaves the positions unchanged.
    """
    if step_candidate_m <= 0:
        raise ValueError("step candidate must be positive")
    lx = scenario.geometry.service_length_m
    base_rate = _positions_rate(scenario, state, state.pa_positions)
    if grad.g_max == 0.0:
        return BlsUpdate(state.pa_positions.copy(), None, step_candidate_m, False, base_rate)

    direction = grad.g / grad.g_max
    step = step_candidate_m
    for _ in range(cfg.bls_max_backtracks + 1):
        candidate = np.clip(state.pa_positions + step * direction, 0.0, lx)
        rate = _positions_rate(scenario, state, candidate)
        if rate > base_rate:
            return BlsUpdate(candidate, step, cfg.bls_expansion * step, True, rate)
        step *= cfg.bls_contraction
    return BlsUpdate(state.pa_positions.copy(), None, step_candidate_m, False, base_rate)


def _feed_parked_positions(feed_selection: np.ndarray, lx: float) -> np.ndarray:
    """Each pinch parked at its selected feed: x = 0 for left, L_x for right."""
    return np.where(np.asarray(feed_selection) == 1, 0.0, lx)


@dataclass
class GreedyResult:
    feed_selection: np.ndarray
    beams: np.ndarray
    sum_rate: float
    passes: int
    pass_rates: list


def greedy_feed_switching(scenario: MultiWaveguideScenario, cfg: OptimizerConfig) -> GreedyResult:
    """Cyclic greedy selection of the per-waveguide feed ends.

    Every candidate feed vector is scored by the same deterministic
    evaluation (pinches parked at their feeds, beams solved by WMMSE from the
    matched-beam start at a loosened tolerance), so repeated passes perform
    coordinate ascent on a fixed objective.  Passes stop when a full sweep
    improves the objective by less than the tolerance; ties keep or pick the
    left feed.
    """
    n_wg = scenario.num_waveguides
    lx = scenario.geometry.service_length_m
    cache: dict = {}

    def evaluate(xi: np.ndarray):
        key = tuple(int(v) for v in xi)
        if key not in cache:
            trial = NetworkState(np.array(key), _feed_parked_positions(np.array(key), lx),
                                 np.zeros((n_wg, scenario.num_users), dtype=complex))
            matrix = effective_channel_matrix(scenario, trial)
            result = wmmse_beamforming(matrix, scenario.total_power_w, scenario.noise_power_w,
                                       cfg, tolerance=10.0 * cfg.wmmse_tolerance)
            cache[key] = (result.sum_rate, result.beams)
        return cache[key]

    xi = np.ones(n_wg, dtype=int)
    value, beams = evaluate(xi)
    pass_rates = []
    passes = 0
    for passes in range(1, cfg.max_greedy_passes + 1):
        start_value = value
        for n in range(n_wg):
            left = xi.copy()
            left[n] = 1
            right = xi.copy()
            right[n] = 0
            v_left, b_left = evaluate(left)
            v_right, b_right = evaluate(right)
            if v_left >= v_right:
                xi, value, beams = left, v_left, b_left
            else:
                xi, value, beams = right, v_right, b_right
        pass_rates.append(value)
        if value - start_value < cfg.epsilon:
            break
    return GreedyResult(xi, beams, value, passes, pass_rates)


@dataclass(frozen=True)
class TraceRecord:
    iteration: int
    phase: int
    sum_rate: float
    step_size_m: float | None
    feed_selection: tuple

    def to_dict(self) -> dict:
        return {
            "iteration": self.iteration,
            "phase": self.phase,
            "sum_rate": self.sum_rate,
            "step_size_m": self.step_size_m,
            "feed_selection": list(self.feed_selection),
        }


@dataclass
class TwoPhaseResult:
    state: NetworkState
    report: RateReport
    trace: list
    warnings: list


def two_phase_optimize(scenario: MultiWaveguideScenario, cfg: OptimizerConfig,
                       feed_selection: np.ndarray | None = None) -> TwoPhaseResult:
    """Joint feed-selection / pinch-placement / beamforming optimization.

    Passing `feed_selection` pins the feeds and skips the greedy phase (used
    by the single-fed benchmark).  Phase II starts from the greedy terminal
    state and commits an outer iteration only when it improves the sum rate
    by at least epsilon, so a huge tolerance returns the phase-one state
    untouched and the trace is monotone.
    """
    notes = []
    trace = []

    if feed_selection is None:
        greedy = greedy_feed_switching(scenario, cfg)
        xi, beams = greedy.feed_selection, greedy.beams
        for i, r in enumerate(greedy.pass_rates):
            trace.append(TraceRecord(i, 1, r, None, tuple(int(v) for v in xi)))
    else:
        xi = np.asarray(feed_selection, dtype=int)
        if xi.shape != (scenario.num_waveguides,) or not np.isin(xi, (0, 1)).all():
            raise ValueError("feed selection must be a binary vector, one entry per waveguide")
        beams = None

    lx = scenario.geometry.service_length_m
    positions = _feed_parked_positions(xi, lx)
    state = NetworkState(xi, positions, np.zeros((scenario.num_waveguides,
                                                  scenario.num_users), dtype=complex))
    matrix = effective_channel_matrix(scenario, state)
    warm = wmmse_beamforming(matrix, scenario.total_power_w, scenario.noise_power_w, cfg,
                             initial_beams=beams)
    if not warm.converged:
        notes.append("beamforming hit its iteration cap during initialization")
    state = NetworkState(xi, positions, warm.beams)
    rate = warm.sum_rate
    trace.append(TraceRecord(0, 2, rate, None, tuple(int(v) for v in xi)))

    candidate = cfg.initial_step_m if cfg.initial_step_m is not None else lx / 10.0
    for outer in range(1, cfg.max_outer_iters + 1):
        grad = sum_rate_gradient(scenario, state)
        bls = bls_position_update(scenario, state, grad, cfg, candidate)
        new_positions = bls.positions
        next_candidate = bls.next_candidate_m if bls.improved else candidate

        trial = NetworkState(xi, new_positions, state.beamforming)
        matrix = effective_channel_matrix(scenario, trial)
        solved = wmmse_beamforming(matrix, scenario.total_power_w, scenario.noise_power_w,
                                   cfg, initial_beams=state.beamforming)
        if not solved.converged:
            notes.append(f"beamforming hit its iteration cap at outer iteration {outer}")

        if solved.sum_rate - rate < cfg.epsilon:
            break
        state = NetworkState(xi, new_positions, solved.beams)
        rate = solved.sum_rate
        candidate = next_candidate
        trace.append(TraceRecord(outer, 2, rate, bls.accepted_step_m,
                                 tuple(int(v) for v in xi)))

    final_matrix = effective_channel_matrix(scenario, state)
    report = rate_report(state.beamforming, final_matrix, scenario.noise_power_w)
    state.validate(scenario)
    return TwoPhaseResult(state, report, trace, notes)
