"""Collective emission on the symmetric Dicke ladder after adiabatic cavity
elimination.

In the bad-cavity limit the VUV mode follows the ensemble and the dynamics
reduce to the N+1 symmetric states |j, m>, j = N/2, with

    rho' = -i [D(t) (J+ + J-), rho] + gamma_eff D[J-] rho,

where gamma_eff = gamma_minus + 4 g^2 / kappa_vuv and D(t) is the pump-fed
drive 2 g U eta(t) / kappa_vuv.  The right-hand side uses the banded structure
of J+- directly (no superoperator matrix), so a step costs O(dim^2) and
N = 500 stays cheap.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from functools import partial

import numpy as np

from ._fit import fit_line, fit_loglog
from ._integrate import solve_sampled
from .maxwell_bloch import DriveProfile, OFF
from .params import ModelParams, TimeSeries

__all__ = [
    "DickeSpace",
    "EffectiveModel",
    "PulseResolutionError",
    "build_effective_model",
    "pumped_effective_model",
    "calibrate_pump",
    "simulate_superradiance",
    "post_pump_segment",
    "pulse_width_fwhm",
    "PeakFit",
    "peak_scaling_fit",
    "LifetimeScan",
    "lifetime_vs_kappa",
]

SUPERRADIANCE_COLUMNS = ("intensity", "g1", "jz")


class PulseResolutionError(RuntimeError):
    """Emission pulse not resolved by the sampling or the time window."""


@dataclass(frozen=True)
class DickeSpace:
    """Symmetric subspace of N two-level nuclei: states |j, m>, j = N/2.

    Index k = 0..N maps to m = k - j, so index 0 is the fully de-excited
    state.  J+ is the transpose of J- (real matrices).
    """

    n_nuclei: int

    def __post_init__(self):
        if self.n_nuclei < 1 or int(self.n_nuclei) != self.n_nuclei:
            raise ValueError(f"n_nuclei must be an integer >= 1, got {self.n_nuclei!r}")

    @property
    def j(self) -> float:
        return 0.5 * self.n_nuclei

    @property
    def dim(self) -> int:
        return self.n_nuclei + 1

    def m_values(self) -> np.ndarray:
        return np.arange(self.dim, dtype=float) - self.j

    def lowering_amplitudes(self) -> np.ndarray:
        """c[k] with J-|k> = c[k] |k-1>; c[0] = 0 (ground is dark)."""
        m = self.m_values()
        amp2 = (self.j + m) * (self.j - m + 1.0)
        return np.sqrt(np.maximum(amp2, 0.0))

    def j_minus(self) -> np.ndarray:
        c = self.lowering_amplitudes()
        out = np.zeros((self.dim, self.dim))
        out[np.arange(self.dim - 1), np.arange(1, self.dim)] = c[1:]
        return out

    def j_plus(self) -> np.ndarray:
        return self.j_minus().T

    def j_z(self) -> np.ndarray:
        return np.diag(self.m_values())


@dataclass(frozen=True)
class EffectiveModel:
    """Adiabatically eliminated cavity: drive coupling, decay, pump envelope.

    drive_coupling = 2 g U / kappa_vuv multiplies the pump envelope eta(t)
    to give the instantaneous collective drive D(t); gamma_eff is the
    per-nucleus Purcell-enhanced decay.  bad_cavity_ratio records
    kappa_vuv / (g sqrt(N)) for the configuration the model was built from.
    """

    drive_coupling: float
    gamma_eff: float
    pump: DriveProfile = OFF
    bad_cavity_ratio: float | None = None


def build_effective_model(p: ModelParams, pump: DriveProfile = OFF) -> EffectiveModel:
    """Eliminate the VUV cavity from p.  Warns when the bad-cavity condition
    kappa_vuv >= 10 g sqrt(N) does not hold (the reduction is then dubious)."""
    if p.kappa_vuv <= 0:
        raise ValueError("adiabatic elimination needs kappa_vuv > 0")
    gamma_eff = p.gamma_minus + 4.0 * p.g**2 / p.kappa_vuv
    drive = 2.0 * p.g * p.fwm_u / p.kappa_vuv
    omega_c = p.g * math.sqrt(p.n_nuclei)
    ratio = p.kappa_vuv / omega_c if omega_c > 0 else math.inf
    if ratio < 10.0:
        warnings.warn(
            f"kappa_vuv / (g sqrt(N)) = {ratio:.2f} < 10: the eliminated-cavity "
            "model is outside its validity range",
            stacklevel=2,
        )
    return EffectiveModel(drive_coupling=drive, gamma_eff=gamma_eff, pump=pump,
                          bad_cavity_ratio=ratio)


def pumped_effective_model(p: ModelParams, *, sigma: float,
                           fraction: float = 0.1) -> EffectiveModel:
    """Eliminated-cavity model with a pump calibrated to excitation fraction."""
    base = build_effective_model(p)
    pump = calibrate_pump(base.drive_coupling, sigma=sigma, fraction=fraction)
    return replace(base, pump=pump)


def calibrate_pump(drive_coupling: float, *, sigma: float, center: float | None = None,
                   fraction: float = 0.1) -> DriveProfile:
    """Gaussian pump that tips the Bloch vector to excitation fraction f.

    A resonant drive D(t)(J+ + J-) rotates a coherent state at angle rate
    2 D(t); the full-pulse rotation is theta = 2 * drive_coupling * eta0 *
    sqrt(2 pi) sigma.  Solving theta = arccos(1 - 2 f) for eta0 makes the
    post-pump excitation <Jz> + N/2 = f N independent of N, provided the pulse
    is fast against the collective decay.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"fraction must be in (0, 1), got {fraction}")
    if drive_coupling <= 0:
        raise ValueError("drive_coupling must be > 0 to pump")
    if sigma <= 0:
        raise ValueError("sigma must be > 0")
    if center is None:
        center = 5.0 * sigma
    theta = math.acos(1.0 - 2.0 * fraction)
    eta0 = theta / (2.0 * drive_coupling * math.sqrt(2.0 * math.pi) * sigma)
    return DriveProfile(amplitude=eta0, center=center, width=sigma, kind="gaussian")


def pump_off_time(pump: DriveProfile) -> float:
    """Conventional switch-off instant: center + 4 width (envelope at e^-8)."""
    if pump.kind != "gaussian" or pump.amplitude == 0:
        return 0.0
    return pump.center + 4.0 * pump.width


def simulate_superradiance(
    model: EffectiveModel,
    space: DickeSpace,
    t_span: tuple[float, float] | None = None,
    *,
    n_samples: int = 1200,
    rtol: float = 1e-7,
    atol: float = 1e-9,
    method: str = "RK45",
) -> TimeSeries:
    """Evolve from the fully de-excited state; record intensity, g1, <Jz>.

    intensity I(t) = gamma_eff <J+ J->, g1(t) = |<J->| / sqrt(<J+ J->)
    (coherence fraction, set to 0 where <J+J-> <= 1e-12).  The pump is
    truncated at pump_off_time (relative envelope e^-8), after which the pure
    dissipative half runs without the drive commutator.  Density matrices are
    never stored: observables are streamed sample by sample.
    """
    dim = space.dim
    n = space.n_nuclei
    gamma = model.gamma_eff
    t_off = pump_off_time(model.pump)
    if t_span is None:
        tail = 12.0 / (n * gamma) if gamma > 0 else 1.0
        t_span = (0.0, t_off + tail)

    cdn = space.lowering_amplitudes()
    cdn1 = cdn[1:]
    g2 = cdn**2
    m = space.m_values()
    w_anti = 0.5 * gamma * (g2[:, None] + g2[None, :])

    def dissipator(rho):
        s = np.zeros_like(rho)
        s[:-1, :-1] = cdn1[:, None] * rho[1:, 1:] * cdn1[None, :]
        s = 0.5 * (s + s.conj().T)  # exact Hermiticity at the bit level
        return gamma * s - w_anti * rho

    def rhs_pumped(t, y):
        rho = y.reshape(dim, dim)
        d = model.drive_coupling * model.pump.envelope(t)
        b = np.zeros_like(rho)
        b[1:, :] = cdn1[:, None] * rho[:-1, :]
        b[:-1, :] += cdn1[:, None] * rho[1:, :]
        drho = (-1j * d) * (b - b.conj().T) + dissipator(rho)
        return drho.ravel()

    def rhs_free(t, y):
        rho = y.reshape(dim, dim)
        return dissipator(rho).ravel()

    def observe(t, y):
        rho = y.reshape(dim, dim)
        pops = rho.diagonal().real
        jpjm = float(g2 @ pops)
        jm = complex(cdn1 @ np.diagonal(rho, -1))
        g1 = abs(jm) / math.sqrt(jpjm) if jpjm > 1e-12 else 0.0
        return gamma * jpjm, g1, float(m @ pops)

    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[0, 0] = 1.0

    t0, t1 = t_span
    samples = np.linspace(t0, t1, int(n_samples))
    pumping = model.pump.kind == "gaussian" and model.pump.amplitude != 0 and t_off > t0

    if pumping and t_off < t1:
        head = samples[samples <= t_off]
        tail = samples[samples > t_off]
        # carry the state across the seam exactly at t_off
        _, states = solve_sampled(rhs_pumped, (t0, t_off), rho0.ravel(),
                                  np.array([t_off]), method=method, rtol=rtol,
                                  atol=atol, max_step=model.pump.width / 2.0)
        rho_off = states[-1]
        _, obs_head = solve_sampled(rhs_pumped, (t0, t_off), rho0.ravel(), head,
                                    observe=observe, method=method, rtol=rtol,
                                    atol=atol, max_step=model.pump.width / 2.0)
        _, obs_tail = solve_sampled(rhs_free, (t_off, t1), rho_off, tail,
                                    observe=observe, method=method, rtol=rtol, atol=atol)
        parts = [np.concatenate([a, b]) for a, b in zip(obs_head, obs_tail)]
    else:
        rhs = rhs_pumped if pumping else rhs_free
        _, parts = solve_sampled(rhs, t_span, rho0.ravel(), samples,
                                 observe=observe, method=method, rtol=rtol, atol=atol,
                                 max_step=model.pump.width / 2.0 if pumping else np.inf)

    values = np.column_stack(parts)
    return TimeSeries(
        times=samples,
        values=values,
        columns=SUPERRADIANCE_COLUMNS,
        meta={"n_nuclei": n, "gamma_eff": gamma, "t_off": t_off,
              "model": model, "rtol": rtol, "atol": atol},
    )


def post_pump_segment(ts: TimeSeries):
    """(times, intensity) restricted to t >= the run's pump switch-off."""
    t_off = ts.meta.get("t_off", 0.0)
    mask = ts.times >= t_off
    if not mask.any():
        raise PulseResolutionError("no samples after the pump switch-off")
    return ts.times[mask], ts.column("intensity")[mask]


def pulse_width_fwhm(times: np.ndarray, values: np.ndarray,
                     *, min_samples_across: int = 4) -> float:
    """Full width at half maximum with linear interpolation at the crossings.

    When the segment starts at (or above) half maximum the left crossing is
    clamped to the segment start, so for a monotone decay this reduces to the
    half-decay width.  Too few samples across the width, or a window that never
    falls to half maximum, raises PulseResolutionError.
    """
    t = np.asarray(times, dtype=float)
    y = np.asarray(values, dtype=float)
    if t.shape != y.shape or t.ndim != 1 or len(t) < 4:
        raise ValueError("need matching 1-d arrays of at least 4 samples")
    k = int(np.argmax(y))
    peak = y[k]
    if peak <= 0:
        raise PulseResolutionError("no emission in the window")
    half = 0.5 * peak

    t_left = t[0]
    for i in range(k, 0, -1):
        if y[i - 1] < half <= y[i]:
            frac = (half - y[i - 1]) / (y[i] - y[i - 1])
            t_left = t[i - 1] + frac * (t[i] - t[i - 1])
            break

    t_right = None
    for i in range(k, len(t) - 1):
        if y[i] >= half > y[i + 1]:
            frac = (y[i] - half) / (y[i] - y[i + 1])
            t_right = t[i] + frac * (t[i + 1] - t[i])
            break
    if t_right is None:
        raise PulseResolutionError(
            "intensity never decays to half maximum inside the window; extend t_span")

    width = t_right - t_left
    dt = np.diff(t).mean()
    if width < min_samples_across * dt:
        raise PulseResolutionError(
            f"only {width / dt:.1f} sample intervals across the width; "
            "increase n_samples")
    return float(width)


@dataclass(frozen=True)
class PeakFit:
    """Log-log fit of post-pump peak intensity against N."""

    exponent: float
    prefactor: float
    r_squared: float
    points: tuple  # (n, i_max) pairs


def peak_scaling_fit(runs) -> PeakFit:
    """Fit max post-pump intensity vs N on log-log axes.

    runs: simulate_superradiance outputs (any order).  Requires >= 5 distinct N
    spanning at least a factor 4.
    """
    points = []
    for ts in runs:
        n = ts.meta["n_nuclei"]
        _, intensity = post_pump_segment(ts)
        i_max = float(intensity.max())
        if i_max <= 0:
            raise ValueError(f"run with N={n} has no post-pump emission")
        points.append((n, i_max))
    points.sort()
    ns = [n for n, _ in points]
    if len(set(ns)) < 5:
        raise ValueError(f"need >= 5 distinct N, got {sorted(set(ns))}")
    if max(ns) < 4 * min(ns):
        raise ValueError(f"N range {min(ns)}..{max(ns)} spans less than a factor 4")

    fit = fit_loglog([float(n) for n in ns], [i for _, i in points])
    return PeakFit(exponent=fit.slope, prefactor=float(math.exp(fit.intercept)),
                   r_squared=fit.r_squared, points=tuple(points))


@dataclass(frozen=True)
class LifetimeScan:
    """Emission-pulse width vs cavity linewidth, with its linear fit."""

    points: tuple  # (kappa, tau_eff) pairs
    slope: float
    intercept: float
    r_squared: float


def _lifetime_scan_point(kappa, p, pump_sigma, fraction, n_samples, rtol, atol):
    pk = replace(p, kappa_vuv=kappa)
    model = pumped_effective_model(pk, sigma=pump_sigma, fraction=fraction)
    ts = simulate_superradiance(model, DickeSpace(p.n_nuclei), n_samples=n_samples,
                                rtol=rtol, atol=atol)
    seg_t, seg_i = post_pump_segment(ts)
    return (kappa, pulse_width_fwhm(seg_t, seg_i))


def lifetime_vs_kappa(
    p: ModelParams,
    kappa_values,
    *,
    pump_sigma: float,
    fraction: float = 0.1,
    n_samples: int = 1600,
    rtol: float = 1e-7,
    atol: float = 1e-9,
    map_fn=map,
) -> LifetimeScan:
    """Pulse width tau_eff(kappa) at fixed (N, g), with a linear fit.

    The pump is re-calibrated per kappa so every run starts its free decay from
    the same tipped state; the post-pump dynamics then depend on time only
    through gamma_eff * t, making tau_eff proportional to 1/gamma_eff ~ kappa
    up to the small gamma_minus offset.  map_fn may be an executor's map.
    """
    kappas = sorted(float(k) for k in kappa_values)
    if len(set(kappas)) < 3:
        raise ValueError(f"need >= 3 distinct kappa values, got {kappas}")

    work = partial(_lifetime_scan_point, p=p, pump_sigma=pump_sigma,
                   fraction=fraction, n_samples=n_samples, rtol=rtol, atol=atol)
    points = list(map_fn(work, kappas))

    fit = fit_line([k for k, _ in points], [tau for _, tau in points])
    return LifetimeScan(points=tuple(points), slope=fit.slope,
                        intercept=fit.intercept, r_squared=fit.r_squared)
