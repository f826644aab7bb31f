"""Motion-sickness frequency weighting: a two-state band-pass filter.

Transfer function

    H(s) = s / ((tau1 s + 1) (tau2 s + 1))

realized in controllable-canonical state space

    A = [[-(1/tau1 + 1/tau2), 1], [-1/(tau1 tau2), 0]]
    B = [1/(tau1 tau2), 0]^T
    C = [1, 0]

with poles at -1/tau1 and -1/tau2.  Discretization assumes zero-order
hold per step: A_d = exp(A dt) via eigendecomposition (real distinct
eigenvalues), B_d = A^-1 (A_d - I) B.  ZOH is exact for piecewise-constant
inputs, which is precisely how the planner's per-segment accelerations
enter.

After the last input the filter keeps ringing; sequences are therefore
continued with zero input for a cooldown period (default 30 s) discretized
at the mean step of the main sequence.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, DomainError, ValidationError

# Shipped cut-off defaults: pass band roughly 0.02 - 0.2 Hz, the range in
# which sustained accelerations drive motion sickness.  Tunable; these are
# an assumption, not a measured constant.
DEFAULT_TAU1 = 1.0 / (2.0 * math.pi * 0.2)   # ~0.796 s, low-pass corner
DEFAULT_TAU2 = 1.0 / (2.0 * math.pi * 0.02)  # ~7.96 s, high-pass corner
DEFAULT_COOLDOWN = 30.0


@dataclass(frozen=True)
class FilterSpec:
    """Time constants of the band-pass weighting filter."""

    tau1: float = DEFAULT_TAU1
    tau2: float = DEFAULT_TAU2

    def __post_init__(self):
        if self.tau1 <= 0.0 or self.tau2 <= 0.0:
            raise ValidationError(
                f"time constants must be positive, got tau1={self.tau1}, tau2={self.tau2}"
            )
        if self.tau1 == self.tau2:
            raise ValidationError(
                "tau1 == tau2 gives a non-diagonalizable A; distinct time constants required"
            )


def continuous_matrices(spec: FilterSpec):
    """Continuous state-space realization (A 2x2, B 2x1, C 1x2) of H(s)."""
    inv1 = 1.0 / spec.tau1
    inv2 = 1.0 / spec.tau2
    A = np.array([[-(inv1 + inv2), 1.0], [-inv1 * inv2, 0.0]])
    B = np.array([[inv1 * inv2], [0.0]])
    C = np.array([[1.0, 0.0]])
    return A, B, C


def transfer_function(spec: FilterSpec, s):
    """H(s) evaluated directly from the factored form (vectorized in s)."""
    s = np.asarray(s, dtype=complex)
    return s / ((spec.tau1 * s + 1.0) * (spec.tau2 * s + 1.0))


@dataclass(frozen=True)
class FilteredSeries:
    """Output of filtering one acceleration series, main part plus tail."""

    main: np.ndarray
    main_time_steps: np.ndarray
    tail: np.ndarray
    tail_time_step: float

    @property
    def n_tail(self) -> int:
        return self.tail.shape[0]


class SicknessFilter:
    """FilterSpec plus cached per-step discretizations.

    The eigendecomposition of A is computed once; discretizing for a new
    time step is then two scalar exponentials and a reassembly.  Instances
    are read-mostly (the cache is the only mutable part) and one instance
    should not be shared across threads that discretize concurrently.
    """

    def __init__(self, spec: FilterSpec | None = None):
        self.spec = spec if spec is not None else FilterSpec()
        self.A, self.B, self.C = continuous_matrices(self.spec)
        self._b = self.B[:, 0]
        eigvals, eigvecs = np.linalg.eig(self.A)
        eigvals = np.real_if_close(eigvals, tol=1e6)
        eigvecs = np.real_if_close(eigvecs, tol=1e6)
        if np.iscomplexobj(eigvals):
            raise ValidationError("filter poles must be real and distinct")
        # Sorted for reproducibility; order is otherwise irrelevant.
        order = np.argsort(eigvals)
        self.eigvals = eigvals[order]
        self.P = eigvecs[:, order]
        self.Pinv = np.linalg.inv(self.P)
        self.Ainv = np.linalg.inv(self.A)
        self._cache: dict[float, tuple[np.ndarray, np.ndarray]] = {}

    def discretize(self, dt: float) -> tuple[np.ndarray, np.ndarray]:
        """ZOH discretization for one step: (A_d 2x2, B_d 2-vector)."""
        if dt <= 0.0:
            raise DomainError(f"time step must be positive, got {dt}")
        dt = float(dt)
        hit = self._cache.get(dt)
        if hit is not None:
            return hit
        Ad = (self.P * np.exp(self.eigvals * dt)) @ self.Pinv
        Bd = self.Ainv @ ((Ad - np.eye(2)) @ self._b)
        self._cache[dt] = (Ad, Bd)
        return Ad, Bd

    def discretize_many(self, dts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized discretization: (M,2,2) A_d and (M,2) B_d."""
        dts = np.asarray(dts, dtype=float)
        if np.any(dts <= 0.0):
            raise DomainError("all time steps must be positive")
        lam = np.exp(np.outer(dts, self.eigvals))           # (M, 2)
        Ad = np.einsum("ij,mj,jk->mik", self.P, lam, self.Pinv)
        Bd = np.einsum("ij,mjk,k->mi", self.Ainv, Ad - np.eye(2), self._b)
        return Ad, Bd


@dataclass
class _ForwardPass:
    """Internal record of a filtering run, kept for the adjoint sweep."""

    outputs: np.ndarray       # (M, n_axes) C x_k before the k-th update
    tail_outputs: np.ndarray  # (T, n_axes)
    states: np.ndarray        # (M+1, 2, n_axes), states[k] = x_k
    tail_states: np.ndarray   # (T, 2, n_axes), tail_states[i] = z_i
    Ad: np.ndarray            # (M, 2, 2)
    Bd: np.ndarray            # (M, 2)
    Ad_tail: np.ndarray       # (2, 2)
    dt_bar: float
    inputs: np.ndarray = field(default=None, repr=False)
    dt: np.ndarray = field(default=None, repr=False)


def _run_filter(filt: SicknessFilter, inputs: np.ndarray, dt: np.ndarray,
                cooldown: float) -> _ForwardPass:
    """Shared forward recursion over (M, n_axes) inputs with per-step dt."""
    inputs = np.atleast_2d(np.asarray(inputs, dtype=float).T).T  # (M, n_axes)
    dt = np.asarray(dt, dtype=float)
    m, n_axes = inputs.shape
    if dt.shape[0] != m:
        raise DimensionError(
            f"{m} acceleration samples but {dt.shape[0]} time steps"
        )
    if m == 0:
        raise DimensionError("empty acceleration sequence")
    if np.any(dt <= 0.0):
        raise DomainError("all time steps must be positive")
    if cooldown < 0.0:
        raise DomainError("cooldown must be non-negative")

    Ad, Bd = filt.discretize_many(dt)
    states = np.zeros((m + 1, 2, n_axes))
    outputs = np.empty((m, n_axes))
    x = np.zeros((2, n_axes))
    for k in range(m):
        outputs[k] = x[0]
        x = Ad[k] @ x + np.outer(Bd[k], inputs[k])
        states[k + 1] = x

    dt_bar = float(np.mean(dt))
    n_tail = int(math.ceil(cooldown / dt_bar)) if cooldown > 0.0 else 0
    Ad_tail, _ = filt.discretize(dt_bar) if n_tail else (np.eye(2), None)
    tail_states = np.zeros((n_tail, 2, n_axes))
    tail_outputs = np.empty((n_tail, n_axes))
    z = x
    for i in range(n_tail):
        tail_states[i] = z
        tail_outputs[i] = z[0]
        z = Ad_tail @ z

    return _ForwardPass(
        outputs=outputs, tail_outputs=tail_outputs, states=states,
        tail_states=tail_states, Ad=Ad, Bd=Bd, Ad_tail=Ad_tail,
        dt_bar=dt_bar, inputs=inputs, dt=dt,
    )


def filter_sequence(spec, accels, time_steps, cooldown: float = DEFAULT_COOLDOWN) -> FilteredSeries:
    """Filter one acceleration series through the weighting band-pass.

    Starts from zero state, emits one output per input step (output k uses
    the state before input k is applied), then continues with zero input
    for the cooldown duration discretized at the mean input step.
    """
    filt = spec if isinstance(spec, SicknessFilter) else SicknessFilter(spec)
    accels = np.asarray(accels, dtype=float)
    if accels.ndim != 1:
        raise DimensionError("filter_sequence expects a single 1-D series")
    fwd = _run_filter(filt, accels[:, None], time_steps, cooldown)
    return FilteredSeries(
        main=fwd.outputs[:, 0],
        main_time_steps=np.asarray(time_steps, dtype=float).copy(),
        tail=fwd.tail_outputs[:, 0],
        tail_time_step=fwd.dt_bar,
    )


def weighted_energy(filt: SicknessFilter, ax, ay, dt,
                    cooldown: float = DEFAULT_COOLDOWN) -> float:
    """Sum of squared filtered ax and ay weighted by step time, tail included."""
    inputs = np.column_stack([ax, ay])
    fwd = _run_filter(filt, inputs, dt, cooldown)
    main = float(np.sum(np.sum(fwd.outputs ** 2, axis=1) * fwd.dt))
    tail = float(np.sum(fwd.tail_outputs ** 2) * fwd.dt_bar)
    return main + tail


def weighted_energy_with_grad(filt: SicknessFilter, ax, ay, dt,
                              cooldown: float = DEFAULT_COOLDOWN):
    """Weighted energy plus gradients w.r.t. ax, ay and the step times.

    The adjoint sweep runs the filter recursion backwards; the step-time
    gradient includes the dependence of A_d, B_d on dt (dA_d/ddt = A A_d,
    dB_d/ddt = A_d B) and the tail's dependence on the mean step.  The tail
    sample count is treated as locally constant.
    """
    inputs = np.column_stack([ax, ay])
    fwd = _run_filter(filt, inputs, dt, cooldown)
    m = fwd.inputs.shape[0]
    out = fwd.outputs
    tout = fwd.tail_outputs
    n_tail = tout.shape[0]

    energy = float(np.sum(np.sum(out ** 2, axis=1) * fwd.dt)) \
        + float(np.sum(tout ** 2) * fwd.dt_bar)

    A = filt.A
    b = filt._b
    g_u = np.zeros_like(fwd.inputs)
    g_dt = np.zeros(m)

    # Tail sweep: mu_i = dE/dz_i, plus the dt_bar sensitivity D.
    mu = np.zeros((2, out.shape[1]))
    d_bar = 0.0
    if n_tail:
        AtT = fwd.Ad_tail.T
        A_At = A @ fwd.Ad_tail
        d_bar += float(np.sum(tout ** 2))
        for i in range(n_tail - 1, -1, -1):
            z = fwd.tail_states[i]
            d_bar += float(np.sum(mu * (A_At @ z)))
            mu = AtT @ mu
            mu[0] += 2.0 * fwd.dt_bar * tout[i]

    # Main sweep: lam = dE/dx_{k+1} entering step k.
    lam = mu
    for k in range(m - 1, -1, -1):
        x_k = fwd.states[k]
        u_k = fwd.inputs[k]
        g_u[k] = fwd.Bd[k] @ lam
        g_dt[k] = float(np.sum(out[k] ** 2)) + float(
            np.sum(lam * (A @ fwd.Ad[k] @ x_k + np.outer(fwd.Ad[k] @ b, u_k)))
        )
        lam = fwd.Ad[k].T @ lam
        lam[0] += 2.0 * fwd.dt[k] * out[k]

    if n_tail:
        g_dt += d_bar / m

    return energy, g_u[:, 0], g_u[:, 1], g_dt
