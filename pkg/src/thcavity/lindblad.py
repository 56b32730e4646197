"""Truncated 11-state model of two-color four-wave mixing into a nuclear line,
plus a generic dense Lindblad master-equation integrator.

States are labeled (n1, n2, n_vuv, n_nuc): pump-cavity photons in modes 1 and 2,
VUV cavity photons, and the nuclear excitation.  The 11-state set is the FWM
pathway reachable from two pump photons: |2000> converts through |0110> to
|0101>, with pump-dressed and single-excitation companions.

Two independent Hamiltonian constructions are provided (hand-written matrix
entries vs bosonic operators on the truncated product space, projected); they
must agree element-by-element and the test suite enforces that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from ._integrate import solve_sampled
from .params import ModelParams, TimeSeries

__all__ = [
    "BasisState",
    "BASIS",
    "basis_index",
    "DensityMatrix",
    "MasterEquationAccuracyError",
    "PositivityViolationError",
    "build_hamiltonian_explicit",
    "build_hamiltonian_operators",
    "mode_operators",
    "project_to_basis",
    "standard_collapse_ops",
    "integrate_master",
    "expectation",
    "expectation_series",
    "population_series",
]


class BasisState(NamedTuple):
    n1: int
    n2: int
    n_vuv: int
    n_nuc: int


# Fixed model basis; the order is part of every matrix contract in this module.
BASIS: tuple[BasisState, ...] = (
    BasisState(2, 0, 0, 0),
    BasisState(0, 1, 1, 0),
    BasisState(0, 1, 0, 1),
    BasisState(1, 0, 0, 0),
    BasisState(1, 1, 1, 0),
    BasisState(0, 0, 1, 0),
    BasisState(0, 0, 0, 1),
    BasisState(1, 0, 1, 0),
    BasisState(0, 1, 0, 0),
    BasisState(1, 0, 0, 1),
    BasisState(1, 1, 0, 1),
)

DIM = len(BASIS)

# truncated product space: n1 <= 2, n2 <= 1, n_vuv <= 1, n_nuc <= 1
_SHAPE = (3, 2, 2, 2)
_FULL_DIM = 24


def basis_index(state) -> int:
    """Index of a state tuple in the model basis."""
    s = BasisState(*state)
    try:
        return BASIS.index(s)
    except ValueError:
        raise ValueError(f"{s} is not one of the {DIM} model basis states") from None


def _product_index(s: BasisState) -> int:
    return ((s.n1 * 2 + s.n2) * 2 + s.n_vuv) * 2 + s.n_nuc


_BASIS_IN_PRODUCT = np.array([_product_index(s) for s in BASIS])

_SQRT2 = math.sqrt(2.0)


class MasterEquationAccuracyError(RuntimeError):
    """Trace drifted beyond tolerance: the integration cannot be trusted."""


class PositivityViolationError(RuntimeError):
    """A stored density matrix has an eigenvalue below the physical floor."""


@dataclass
class DensityMatrix:
    """Density matrix with its physicality checks kept at hand."""

    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {m.shape}")
        self.matrix = m

    @classmethod
    def pure(cls, dim: int, index: int) -> "DensityMatrix":
        m = np.zeros((dim, dim), dtype=complex)
        m[index, index] = 1.0
        return cls(m)

    @classmethod
    def from_state(cls, vec) -> "DensityMatrix":
        v = np.asarray(vec, dtype=complex)
        norm = np.vdot(v, v).real
        if norm <= 0:
            raise ValueError("cannot form a density matrix from the zero vector")
        v = v / math.sqrt(norm)
        return cls(np.outer(v, v.conj()))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def trace_defect(self) -> float:
        return abs(complex(np.trace(self.matrix)) - 1.0)

    def min_eigenvalue(self) -> float:
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(h).min())

    def purity(self) -> float:
        return float(np.trace(self.matrix @ self.matrix).real)

    def validate(self, *, trace_tol=1e-9, herm_tol=1e-12, eig_floor=-1e-8):
        if self.hermiticity_defect() > herm_tol:
            raise ValueError(
                f"hermiticity defect {self.hermiticity_defect():.3e} > {herm_tol:g}")
        if self.trace_defect() > trace_tol:
            raise ValueError(f"trace defect {self.trace_defect():.3e} > {trace_tol:g}")
        if self.min_eigenvalue() < eig_floor:
            raise ValueError(
                f"eigenvalue {self.min_eigenvalue():.3e} below floor {eig_floor:g}")
        return self


def build_hamiltonian_explicit(p: ModelParams, t: float = 0.0,
                               *, collective_coupling: bool = False) -> np.ndarray:
    """The 11x11 Hamiltonian with every entry written out.

    Diagonal: total mode energy of each basis state.  Off-diagonal blocks:
    sqrt(2)*U four-wave mixing, the VUV-nuclear exchange g, and the pump
    Omega_p(t) ladder on mode 1.  Upper entries are assigned and mirrored, so
    the result is Hermitian by construction.

    collective_coupling replaces g by g*sqrt(N) (symmetric-ensemble model);
    default is the bare single-nucleus matrix.
    """
    w1, w2, wv, e = p.omega1, p.omega2, p.omega_vuv, p.e_nuc
    u = p.fwm_u
    gc = p.g * math.sqrt(p.n_nuclei) if collective_coupling else p.g
    op = p.pump_envelope(t)

    h = np.zeros((DIM, DIM))
    diag = (2.0 * w1, w2 + wv, w2 + e, w1, w1 + w2 + wv, wv, e,
            w1 + wv, w2, w1 + e, w1 + w2 + e)
    for i, d in enumerate(diag):
        h[i, i] = d

    upper = (
        (0, 1, _SQRT2 * u),    # |2000> <-> |0110>  two pump photons convert
        (1, 2, gc),            # |0110> <-> |0101>  VUV photon <-> nuclear
        (0, 3, _SQRT2 * op),   # pump ladder, n1 = 2 <-> 1
        (1, 4, op),
        (2, 10, op),
        (4, 10, gc),
        (5, 6, gc),
        (5, 7, op),
        (6, 9, op),
        (7, 9, gc),
    )
    for i, j, v in upper:
        h[i, j] = v
        h[j, i] = v
    return h


def _embed(op: np.ndarray, slot: int) -> np.ndarray:
    mats = [np.eye(d) for d in _SHAPE]
    mats[slot] = op
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def mode_operators() -> dict:
    """Bare annihilation operators on the truncated product space.

    Keys: a1, a2, a_vuv, sigma_minus.  Collective sqrt(N) enhancement is
    applied where the operators are used, never baked in here, so number
    operators built from these stay correct.
    """
    a3 = np.diag(np.sqrt(np.arange(1.0, 3.0)), 1)  # truncated at n1 = 2
    a2q = np.diag([1.0], 1)
    return {
        "a1": _embed(a3, 0),
        "a2": _embed(a2q, 1),
        "a_vuv": _embed(a2q, 2),
        "sigma_minus": _embed(a2q, 3),
    }


def project_to_basis(op: np.ndarray) -> np.ndarray:
    """Restrict a 24-dim product-space operator to the 11-state model basis."""
    if op.shape != (_FULL_DIM, _FULL_DIM):
        raise ValueError(f"expected shape {(_FULL_DIM, _FULL_DIM)}, got {op.shape}")
    return op[np.ix_(_BASIS_IN_PRODUCT, _BASIS_IN_PRODUCT)]


def build_hamiltonian_operators(p: ModelParams, t: float = 0.0,
                                *, rwa: bool = True,
                                collective_coupling: bool = False,
                                project: bool = True) -> np.ndarray:
    """Same Hamiltonian assembled from bosonic operators, then projected.

    With rwa=True the VUV-nuclear coupling keeps only excitation-conserving
    terms; rwa=False uses the full (a+adag)(s+sdag) product.  On the projected
    11-state basis both agree identically (the counter-rotating terms map every
    basis state outside the set), so the flag only matters with project=False.
    """
    ops = mode_operators()
    a1, a2q, av, sm = ops["a1"], ops["a2"], ops["a_vuv"], ops["sigma_minus"]
    n1 = a1.conj().T @ a1
    n2 = a2q.conj().T @ a2q
    nv = av.conj().T @ av
    nn = sm.conj().T @ sm

    h = p.omega1 * n1 + p.omega2 * n2 + p.omega_vuv * nv + p.e_nuc * nn

    gc = p.g * math.sqrt(p.n_nuclei) if collective_coupling else p.g
    coupling = av.conj().T @ sm
    if not rwa:
        coupling = coupling + av.conj().T @ sm.conj().T
    h = h + gc * (coupling + coupling.conj().T)

    fwm = av.conj().T @ a2q.conj().T @ a1 @ a1
    h = h + p.fwm_u * (fwm + fwm.conj().T)

    op_t = p.pump_envelope(t)
    h = h + op_t * (a1 + a1.conj().T)

    if project:
        return project_to_basis(h)
    return h


def standard_collapse_ops(p: ModelParams, *, collective_coupling: bool = False,
                          project: bool = True) -> list[np.ndarray]:
    """The four loss channels, each scaled by sqrt(rate).

    Channels with zero rate are omitted.  Projection onto the model basis keeps
    the Lindblad structure (trace exactly preserved) but drops decay channels
    whose target lies outside the 11-state set; run with project=False on the
    full truncated product space when those channels matter.
    """
    ops = mode_operators()
    gm = p.gamma_minus * p.n_nuclei if collective_coupling else p.gamma_minus
    pairs = (
        (p.kappa1, ops["a1"]),
        (p.kappa2, ops["a2"]),
        (p.kappa_vuv, ops["a_vuv"]),
        (gm, ops["sigma_minus"]),
    )
    out = []
    for rate, op in pairs:
        if rate > 0:
            scaled = math.sqrt(rate) * op
            out.append(project_to_basis(scaled) if project else scaled)
    return out


def _master_rhs_factory(hamiltonian, collapse_ops: Sequence[np.ndarray], dim: int):
    """RHS of rho' = -i[H,rho] + sum_j D[L_j]rho, flattened.

    Built so that Hermiticity of rho is preserved to the last bit: the
    commutator enters as C - C^dag, the sandwich term is symmetrized, and the
    anticommutator is assembled as G rho + (G rho)^dag.
    """
    static_h = None if callable(hamiltonian) else np.asarray(hamiltonian, dtype=complex)
    ops = [np.asarray(l, dtype=complex) for l in collapse_ops]
    grams = [l.conj().T @ l for l in ops]

    def rhs(t, y):
        rho = y.reshape(dim, dim)
        h = hamiltonian(t) if static_h is None else static_h
        c = h @ rho
        drho = -1j * (c - c.conj().T)
        for l, g in zip(ops, grams):
            s = l @ rho @ l.conj().T
            gr = g @ rho
            drho = drho + 0.5 * (s + s.conj().T) - 0.5 * (gr + gr.conj().T)
        return drho.ravel()

    return rhs


def integrate_master(
    hamiltonian,
    rho0,
    collapse_ops: Sequence[np.ndarray] = (),
    t_span: tuple[float, float] = (0.0, 1.0),
    *,
    n_samples: int = 400,
    rtol: float = 1e-10,
    atol: float = 1e-12,
    method: str = "DOP853",
    max_step: float = np.inf,
    check: bool = True,
) -> TimeSeries:
    """Integrate the master equation; values are the sampled density matrices.

    hamiltonian is a (d,d) array or a callable t -> (d,d) array; collapse_ops
    must already carry their sqrt(rate) scale.  With check=True the stored
    samples are screened: trace drift beyond 1e-6 raises
    MasterEquationAccuracyError, an eigenvalue below -1e-6 raises
    PositivityViolationError.
    """
    if isinstance(rho0, DensityMatrix):
        rho0 = rho0.matrix
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.ndim != 2 or rho0.shape[0] != rho0.shape[1]:
        raise ValueError(f"rho0 must be square, got shape {rho0.shape}")
    dim = rho0.shape[0]
    h0 = hamiltonian(t_span[0]) if callable(hamiltonian) else np.asarray(hamiltonian)
    if h0.shape != (dim, dim):
        raise ValueError(f"hamiltonian shape {h0.shape} does not match rho {rho0.shape}")
    for l in collapse_ops:
        if np.shape(l) != (dim, dim):
            raise ValueError(f"collapse operator shape {np.shape(l)} != {(dim, dim)}")

    # exact Hermitian start: symmetrize away any representational asymmetry
    rho0 = 0.5 * (rho0 + rho0.conj().T)

    rhs = _master_rhs_factory(hamiltonian, collapse_ops, dim)
    samples = np.linspace(t_span[0], t_span[1], int(n_samples))
    _, flat = solve_sampled(rhs, t_span, rho0.ravel(), samples,
                            method=method, rtol=rtol, atol=atol, max_step=max_step)
    rhos = flat.reshape(len(samples), dim, dim)

    ts = TimeSeries(times=samples, values=rhos,
                    meta={"rtol": rtol, "atol": atol, "method": method})
    if check:
        traces = np.einsum("tii->t", rhos)
        drift = np.abs(traces - 1.0).max()
        if drift > 1e-6:
            raise MasterEquationAccuracyError(
                f"trace drifted by {drift:.3e} (> 1e-6); tighten tolerances")
        for k in range(len(samples)):
            m = rhos[k]
            mn = float(np.linalg.eigvalsh(0.5 * (m + m.conj().T)).min())
            if mn < -1e-6:
                raise PositivityViolationError(
                    f"eigenvalue {mn:.3e} < -1e-6 at t={samples[k]:.6g}")
    return ts


def expectation(rho, op: np.ndarray) -> complex:
    """Tr(op rho).  Real to roundoff for Hermitian op and physical rho."""
    m = rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)
    op = np.asarray(op)
    if m.shape != op.shape:
        raise ValueError(f"shape mismatch: rho {m.shape} vs op {op.shape}")
    return complex(np.trace(op @ m))


def expectation_series(ts: TimeSeries, op: np.ndarray) -> np.ndarray:
    """Tr(op rho(t)) over a stored master-equation trajectory."""
    op = np.asarray(op)
    if ts.values.ndim != 3 or ts.values.shape[1:] != op.shape:
        raise ValueError("time series does not hold density matrices of the op's shape")
    return np.einsum("ij,tji->t", op, ts.values)


def population_series(ts: TimeSeries, index: int) -> np.ndarray:
    """Diagonal occupation of one basis state along the trajectory."""
    return ts.values[:, index, index].real
