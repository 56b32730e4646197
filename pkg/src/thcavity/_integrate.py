"""Thin adaptive-integration layer shared by the dynamics modules.

Wraps scipy's embedded Runge-Kutta pairs (RK45, DOP853), adding uniform
sampling through the dense output and an optional observable callback so that
large states (density matrices) never need to be stored per sample.
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import DOP853, RK45

__all__ = ["IntegrationFailure", "solve_sampled"]

_METHODS = {"RK45": RK45, "DOP853": DOP853}


class IntegrationFailure(RuntimeError):
    """Adaptive stepper gave up (step size underflow or solver error).

    Carries the time reached; the usual fix is a smaller t_span or looser
    tolerances, not a different method.
    """

    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


def solve_sampled(
    rhs,
    t_span: tuple[float, float],
    y0: np.ndarray,
    sample_times: np.ndarray,
    *,
    observe=None,
    method: str = "DOP853",
    rtol: float = 1e-8,
    atol: float = 1e-10,
    max_step: float = np.inf,
):
    """Integrate y' = rhs(t, y) and evaluate it at sample_times.

    sample_times must be increasing and lie inside t_span.  If observe is None
    the full state at each sample is returned as an array (n_samples, dim);
    otherwise observe(t, y) is called per sample and its outputs are stacked,
    keeping memory independent of the state dimension.
    """
    t0, t1 = float(t_span[0]), float(t_span[1])
    if not t1 > t0:
        raise ValueError(f"t_span must be increasing, got {t_span}")
    samples = np.asarray(sample_times, dtype=float)
    if samples.size and (samples[0] < t0 - 1e-12 * abs(t0) or samples[-1] > t1 + 1e-12 * abs(t1)):
        raise ValueError("sample_times must lie within t_span")
    try:
        cls = _METHODS[method]
    except KeyError:
        raise ValueError(f"unknown method {method!r}; have {sorted(_METHODS)}") from None

    y0 = np.asarray(y0)
    solver = cls(rhs, t0, y0, t1, rtol=rtol, atol=atol, max_step=max_step)

    out = []
    i = 0
    # sample exactly at t0 before stepping
    while i < samples.size and samples[i] <= t0:
        out.append(observe(t0, y0) if observe is not None else np.array(y0, copy=True))
        i += 1

    while solver.status == "running":
        msg = solver.step()
        if solver.status == "failed":
            raise IntegrationFailure(
                f"integration failed at t={solver.t:.6g}: {msg or 'step size underflow'}; "
                "try a shorter t_span or looser tolerances",
                t=solver.t,
            )
        if i < samples.size and samples[i] <= solver.t:
            dense = solver.dense_output()
            while i < samples.size and samples[i] <= solver.t:
                ys = dense(samples[i])
                out.append(observe(samples[i], ys) if observe is not None else ys)
                i += 1

    # samples at exactly t1 can be left over through float comparison slop
    while i < samples.size:
        yf = solver.y
        out.append(observe(samples[i], yf) if observe is not None else np.array(yf, copy=True))
        i += 1

    if observe is not None and out and isinstance(out[0], tuple):
        # observable callback returned tuples: split into one array per component
        return samples, [np.asarray(comp) for comp in zip(*out)]
    return samples, np.asarray(out)
