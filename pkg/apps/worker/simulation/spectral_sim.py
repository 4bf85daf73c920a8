"""
Pseudospectral confirmation runs on the periodic box [−L, L]ⁿ.

Problem 1:  u_t = Δu  + k u² (1 − a u − b φ*u)
Problem 2:  u_t = dΔu + u² (a − φ*u) − b u

The convolution is the scaled Fourier image sampled on the lattice times û.
Diffusion is handled by an integrating factor and everything else by Heun's
method (explicit RK2), with 2/3-rule dealiasing of the reaction term.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np
from scipy import fft

from apps.errors import ArgumentError, ConfigurationError, FitError
from apps.settings import get_settings
from apps.worker.analysis.oracle import grid_min_symbol
from apps.worker.spectral.kernels import decay_length, scaled_fourier_image
from apps.worker.spectral.linearization import SpectralSymbol
from apps.worker.stability_config import STABILITY_CONFIG

logger = logging.getLogger(__name__)

CONFIG = STABILITY_CONFIG["simulation"]
MAX_SIM_DIM = 2
TARGET_SAMPLES = 400


def linear_mode_factor(symbol: SpectralSymbol, p, t: float) -> float:
    """e^{−Φ(p)t}, the exact amplitude factor of linearized mode p after time t"""
    if t < 0:
        raise ArgumentError(f"t must be nonnegative, got {t}")
    return math.exp(-float(symbol(p)) * t)


def lattice_frequencies(dim: int, half_length: float, grid_points: int) -> np.ndarray:
    """Frequency vectors πm/L on the rfftn layout, shape (M, ..., M//2+1, dim)"""
    spacing = 2.0 * half_length / grid_points
    full = 2.0 * math.pi * np.fft.fftfreq(grid_points, d=spacing)
    half = 2.0 * math.pi * np.fft.rfftfreq(grid_points, d=spacing)
    axes = [full] * (dim - 1) + [half]
    return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)


def _explicit_bound(symbol: SpectralSymbol, lattice: np.ndarray) -> float:
    return float(np.max(np.abs(symbol.explicit_part(lattice.reshape(-1, symbol.dim)))))


@dataclass(frozen=True)
class SimConfig:
    symbol: SpectralSymbol
    box_half_length: float
    grid_points: int
    dt: float
    t_final: float
    mode: Tuple[int, ...]
    amplitude: float
    sample_every: int = 1

    def __post_init__(self):
        dim = self.symbol.dim
        if dim > MAX_SIM_DIM:
            raise ConfigurationError(
                f"Nonlinear runs are limited to 1D and 2D kernels, {self.symbol.kernel.family.value} is {dim}D"
            )
        M = self.grid_points
        if M < CONFIG["min_grid_points"] or M & (M - 1):
            raise ConfigurationError(f"grid_points must be a power of two >= {CONFIG['min_grid_points']}, got {M}")
        if not self.box_half_length > 0:
            raise ConfigurationError(f"box_half_length must be positive, got {self.box_half_length}")
        if len(self.mode) != dim:
            raise ConfigurationError(f"mode must have {dim} components, got {self.mode}")
        if any(abs(m) >= M // 2 for m in self.mode) or self.mode[-1] < 0:
            raise ConfigurationError(f"mode {self.mode} is outside the lattice for M={M}")
        cap = CONFIG["max_amplitude_ratio"] * abs(self.symbol.base_state)
        if not 0 <= self.amplitude <= cap:
            raise ConfigurationError(f"amplitude must lie in [0, {cap:.3g}], got {self.amplitude}")
        if not (self.dt > 0 and self.t_final > 0):
            raise ConfigurationError(f"dt and t_final must be positive, got dt={self.dt}, t_final={self.t_final}")
        if self.sample_every < 1:
            raise ConfigurationError(f"sample_every must be >= 1, got {self.sample_every}")

        bound = _explicit_bound(self.symbol, self.lattice)
        if bound > 0 and self.dt > 1.0 / bound:
            raise ConfigurationError(f"dt={self.dt} exceeds the explicit stability bound 1/{bound:.6g}")
        if self.steps > CONFIG["max_steps"]:
            raise ConfigurationError(f"{self.steps} steps exceed the limit of {CONFIG['max_steps']}")

    @property
    def dim(self) -> int:
        return self.symbol.dim

    @property
    def lattice(self) -> np.ndarray:
        return lattice_frequencies(self.dim, self.box_half_length, self.grid_points)

    @property
    def seed_frequency(self) -> Tuple[float, ...]:
        return tuple(math.pi * m / self.box_half_length for m in self.mode)

    @property
    def steps(self) -> int:
        return int(math.ceil(self.t_final / self.dt - 1e-9))

    def coordinates(self) -> np.ndarray:
        """Grid points x_j = −L + 2Lj/M, shape (M, ..., M, dim)"""
        L, M = self.box_half_length, self.grid_points
        axis = -L + 2.0 * L * np.arange(M) / M
        return np.stack(np.meshgrid(*([axis] * self.dim), indexing="ij"), axis=-1)


@dataclass
class SimResult:
    times: np.ndarray
    mode_amplitudes: np.ndarray
    field_l2_deviation: np.ndarray
    measured_rate: Optional[float]
    predicted_rate: float
    seed_frequency: Tuple[float, ...]
    blew_up: bool = False
    steps: int = 0
    fit_window: Optional[Tuple[float, float]] = field(default=None)


def _seed_field(cfg: SimConfig) -> np.ndarray:
    x = cfg.coordinates()
    phase = np.tensordot(x, np.asarray(cfg.seed_frequency), axes=([-1], [0]))
    return cfg.amplitude * np.cos(phase)


def _mode_scale(cfg: SimConfig) -> float:
    """Factor turning |ŵ[mode]| into the cosine amplitude"""
    volume = cfg.grid_points ** cfg.dim
    return (1.0 if all(m == 0 for m in cfg.mode) else 2.0) / volume


def _mode_index(cfg: SimConfig) -> Tuple[int, ...]:
    return tuple(m % cfg.grid_points for m in cfg.mode)


def _dealias_mask(cfg: SimConfig) -> np.ndarray:
    M = cfg.grid_points
    full = np.abs(np.fft.fftfreq(M, d=1.0 / M))
    half = np.fft.rfftfreq(M, d=1.0 / M)
    axes = [full] * (cfg.dim - 1) + [half]
    grids = np.meshgrid(*axes, indexing="ij")
    mask = np.ones(grids[0].shape, dtype=bool)
    for g in grids:
        mask &= g <= M / 3.0
    return mask


def integrating_factor_step(v_hat: np.ndarray, decay: np.ndarray, nonlinear, dt: float) -> np.ndarray:
    """
    One Heun step for v' = −D|p|²v + N(v) with the diffusion integrated exactly.

    decay = exp(−D|p|²dt); with N ≡ 0 the step is exactly v ↦ decay·v.
    """
    k1 = nonlinear(v_hat)
    predictor = decay * (v_hat + dt * k1)
    k2 = nonlinear(predictor)
    return decay * (v_hat + 0.5 * dt * k1) + 0.5 * dt * k2


class PseudospectralIntegrator:
    """Integrating-factor RK2 for the full nonlinear problems on a periodic box"""

    def __init__(self, cfg: SimConfig, workers: Optional[int] = None, reaction: bool = True):
        self.cfg = cfg
        self.reaction = reaction
        self.workers = workers or get_settings().fft_workers
        self.axes = tuple(range(cfg.dim))
        self.shape = (cfg.grid_points,) * cfg.dim

        lattice = cfg.lattice
        p_sq = np.sum(lattice * lattice, axis=-1)
        self.image = scaled_fourier_image(cfg.symbol.kernel, lattice.reshape(-1, cfg.dim)).reshape(p_sq.shape)
        self.decay = np.exp(-cfg.symbol.diffusion * p_sq * cfg.dt)
        self.mask = _dealias_mask(cfg)

        model = cfg.symbol.model
        if cfg.symbol.is_p1:
            k, a, b = model.k, model.a, model.b
            self._reaction = lambda u, conv: k * u * u * (1.0 - a * u - b * conv)
        else:
            a, b = model.a, model.b
            self._reaction = lambda u, conv: u * u * (a - conv) - b * u

    def forward(self, u: np.ndarray) -> np.ndarray:
        return fft.rfftn(u, axes=self.axes, workers=self.workers)

    def inverse(self, u_hat: np.ndarray) -> np.ndarray:
        return fft.irfftn(u_hat, s=self.shape, axes=self.axes, workers=self.workers)

    def nonlinear(self, u_hat: np.ndarray) -> np.ndarray:
        if not self.reaction:
            return np.zeros_like(u_hat)
        u = self.inverse(u_hat)
        conv = self.inverse(self.image * u_hat)
        return self.mask * self.forward(self._reaction(u, conv))

    def step_fft(self, u_hat: np.ndarray) -> np.ndarray:
        return integrating_factor_step(u_hat, self.decay, self.nonlinear, self.cfg.dt)


def _l2_norm(w: np.ndarray, cfg: SimConfig) -> float:
    cell = (2.0 * cfg.box_half_length / cfg.grid_points) ** cfg.dim
    return float(np.sqrt(np.sum(w * w) * cell))


def heat_rate(cfg: SimConfig) -> float:
    """−D|p_seed|², the decay rate of the seeded mode under diffusion alone"""
    p = np.asarray(cfg.seed_frequency)
    return -cfg.symbol.diffusion * float(np.dot(p, p))


def _finish(
    cfg: SimConfig, times, amplitudes, deviations, blew_up: bool, steps: int, predicted: Optional[float] = None
) -> SimResult:
    if predicted is None:
        predicted = -float(cfg.symbol(np.asarray(cfg.seed_frequency)))
    result = SimResult(
        times=np.asarray(times),
        mode_amplitudes=np.asarray(amplitudes),
        field_l2_deviation=np.asarray(deviations),
        measured_rate=None,
        predicted_rate=predicted,
        seed_frequency=cfg.seed_frequency,
        blew_up=blew_up,
        steps=steps,
    )
    try:
        window = default_fit_window(result)
        result.measured_rate = measure_growth_rate(result, window)
        result.fit_window = window
    except FitError as exc:
        logger.warning(f"No growth rate fitted: {exc}")
    return result


def simulate_nonlinear(cfg: SimConfig, workers: Optional[int] = None, reaction: bool = True) -> SimResult:
    """
    Integrate the full PDE from base state + seeded cosine.

    reaction=False drops every non-diffusive term, leaving the heat semigroup;
    the predicted rate is then −D|p_seed|².
    """
    integrator = PseudospectralIntegrator(cfg, workers=workers, reaction=reaction)
    base = cfg.symbol.base_state
    limit = CONFIG["blowup_factor"] * abs(base)
    scale = _mode_scale(cfg)
    index = _mode_index(cfg)

    u = base + _seed_field(cfg)
    u_hat = integrator.forward(u)
    base_hat = integrator.forward(np.full(integrator.shape, base))

    kind = "Nonlinear" if reaction else "Heat-only"
    logger.info(
        f"{kind} run: {cfg.symbol.kernel.family.value}, M={cfg.grid_points}, L={cfg.box_half_length:.6g}, "
        f"dt={cfg.dt:.4g}, steps={cfg.steps}, seed mode {cfg.mode}"
    )

    times = [0.0]
    amplitudes = [abs((u_hat - base_hat)[index]) * scale]
    deviations = [_l2_norm(u - base, cfg)]
    blew_up = False
    step = 0
    for step in range(1, cfg.steps + 1):
        u_hat = integrator.step_fft(u_hat)
        if step % cfg.sample_every and step != cfg.steps:
            continue
        u = integrator.inverse(u_hat)
        times.append(step * cfg.dt)
        amplitudes.append(abs((u_hat - base_hat)[index]) * scale)
        deviations.append(_l2_norm(u - base, cfg))
        if not np.all(np.isfinite(u)) or np.max(np.abs(u)) > limit:
            logger.warning(f"Blow-up at t={step * cfg.dt:.6g}; stopping early")
            blew_up = True
            break

    predicted = None if reaction else heat_rate(cfg)
    return _finish(cfg, times, amplitudes, deviations, blew_up, step, predicted)


def simulate_linear(cfg: SimConfig) -> SimResult:
    """Exact diagonal evolution ŵ(t) = ŵ(0)·e^{−Φ(p)t} of the seeded perturbation"""
    lattice = cfg.lattice
    phi = cfg.symbol(lattice.reshape(-1, cfg.dim)).reshape(lattice.shape[:-1])
    axes = tuple(range(cfg.dim))
    shape = (cfg.grid_points,) * cfg.dim
    w_hat0 = fft.rfftn(_seed_field(cfg), axes=axes)
    scale = _mode_scale(cfg)
    index = _mode_index(cfg)

    times, amplitudes, deviations = [], [], []
    sample_steps = list(range(0, cfg.steps + 1, cfg.sample_every))
    if sample_steps[-1] != cfg.steps:
        sample_steps.append(cfg.steps)
    for step in sample_steps:
        t = step * cfg.dt
        w_hat = w_hat0 * np.exp(-phi * t)
        times.append(t)
        amplitudes.append(abs(w_hat[index]) * scale)
        deviations.append(_l2_norm(fft.irfftn(w_hat, s=shape, axes=axes), cfg))
    return _finish(cfg, times, amplitudes, deviations, False, cfg.steps)


def default_fit_window(result: SimResult) -> Tuple[float, float]:
    """
    Growth: from amplitude 2× to 10× the initial value (or the end of the run).
    Decay: from 0.5× to 0.1× the initial value (or the end of the run).
    """
    amps = result.mode_amplitudes
    times = result.times
    if len(amps) < 2 or not amps[0] > 0:
        raise FitError("Seeded mode amplitude is zero; nothing to fit")

    growing = amps[-1] > amps[0]
    lo_ratio, hi_ratio = CONFIG["growth_window"] if growing else CONFIG["decay_window"]

    def first_crossing(ratio: float) -> Optional[float]:
        target = ratio * amps[0]
        hits = np.flatnonzero(amps >= target) if growing else np.flatnonzero(amps <= target)
        return float(times[hits[0]]) if hits.size else None

    t_lo = first_crossing(lo_ratio)
    if t_lo is None:
        t_lo = float(times[0])
    t_hi = first_crossing(hi_ratio)
    if t_hi is None:
        t_hi = float(times[-1])
    return t_lo, t_hi


def measure_growth_rate(result: SimResult, fit_window: Tuple[float, float]) -> float:
    """
    Least-squares slope of log(amplitude) against t on the window.

    The slope is d/dt log|ŵ| ≈ −Φ(p_seed): positive when the mode grows.
    """
    t_lo, t_hi = fit_window
    times = np.asarray(result.times)
    amps = np.asarray(result.mode_amplitudes)
    inside = (times >= t_lo) & (times <= t_hi)
    if np.count_nonzero(inside) < 2:
        raise FitError(f"Fit window [{t_lo}, {t_hi}] holds fewer than two samples")
    if np.any(amps[inside] <= 0):
        raise FitError("Nonpositive amplitudes inside the fit window")
    slope, _ = np.polyfit(times[inside], np.log(amps[inside]), 1)
    return float(slope)


def make_sim_config(
    symbol: SpectralSymbol,
    seed_frequency=None,
    grid_points: Optional[int] = None,
    amplitude_ratio: Optional[float] = None,
    dt: Optional[float] = None,
    t_final: Optional[float] = None,
    box_half_length: Optional[float] = None,
) -> SimConfig:
    """
    Default run for a symbol: seed at the oracle argmin, box sized so the
    seed sits exactly on the lattice, dt = 0.25/max|explicit part|.
    """
    kernel = symbol.kernel
    if symbol.dim > MAX_SIM_DIM:
        raise ConfigurationError(f"Nonlinear runs are limited to 1D and 2D kernels, got {symbol.dim}D")

    if seed_frequency is None:
        seed_frequency = grid_min_symbol(symbol).argmin
    target = np.abs(np.asarray(seed_frequency, dtype=float).reshape(-1))
    if target.shape[0] != symbol.dim:
        raise ConfigurationError(f"Seed frequency needs {symbol.dim} components, got {tuple(seed_frequency)}")

    p_ref = float(np.max(target))
    lengths = []
    if kernel.has_decaying_factor:
        lengths.append(CONFIG["box_decay_lengths"] * decay_length(kernel))
    if kernel.is_window:
        lengths.append(CONFIG["box_window_widths"] * kernel.N)
    if p_ref > 0:
        lengths.append(CONFIG["box_wavelengths"] * 2.0 * math.pi / p_ref)
    L_min = max(lengths)

    if box_half_length is not None:
        L = float(box_half_length)
    elif p_ref > 0:
        L = math.pi * math.ceil(L_min * p_ref / math.pi) / p_ref
    else:
        L = L_min
    mode = tuple(int(round(c * L / math.pi)) for c in target)

    M = grid_points or (CONFIG["grid_points_1d"] if symbol.dim == 1 else CONFIG["grid_points_2d"])
    if grid_points is None:
        while max(mode) >= M / 3.0 and M < 1024:
            M *= 2

    lattice = lattice_frequencies(symbol.dim, L, M)
    bound = _explicit_bound(symbol, lattice)
    if dt is None:
        dt = CONFIG["dt_factor"] / bound if bound > 0 else CONFIG["dt_factor"]

    ratio = CONFIG["default_amplitude_ratio"] if amplitude_ratio is None else amplitude_ratio
    phi_seed = float(symbol(np.asarray([math.pi * m / L for m in mode])))
    if t_final is None:
        if phi_seed < 0:
            t_final = math.log(CONFIG["growth_horizon_factor"]) / -phi_seed
        elif phi_seed > 0:
            t_final = CONFIG["decay_horizon"] / phi_seed
        else:
            t_final = CONFIG["decay_horizon"] / bound
    steps = int(math.ceil(t_final / dt - 1e-9))

    cfg = SimConfig(
        symbol=symbol,
        box_half_length=L,
        grid_points=M,
        dt=dt,
        t_final=t_final,
        mode=mode,
        amplitude=ratio * abs(symbol.base_state),
        sample_every=max(1, steps // TARGET_SAMPLES),
    )
    logger.debug(f"Sim config: L={L:.6g}, M={M}, mode={mode}, Φ(seed)={phi_seed:.6g}, t_final={t_final:.6g}")
    return cfg
