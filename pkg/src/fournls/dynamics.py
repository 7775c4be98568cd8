"""Right-hand sides and time integration for 4NLS / 4WNLS.

Mode equations (convention: u = sum c_n e^{inx}):

  full:  dc_n/dt = i n^4 c_n - i mu * sum_{n1-n2+n3=n} c(n1) conj(c(n2)) c(n3)
  wick:  dc_n/dt = i n^4 c_n + mu * i |c_n|^2 c_n + mu * N_NR(u)(n)

where N_NR keeps only the non-resonant triples ((n1-n2)(n2-n3) != 0).
The stiff linear phase e^{i t n^4} is always handled exactly.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.fft import fft, ifft

from .spectrum import (
    FourierState,
    Trajectory,
    analyze,
    odd_padded_grid_size,
    padded_grid_size,
    project_leq,
    synthesize,
)


class NumericFailure(RuntimeError):
    """NaN/overflow during time stepping; carries the offending step index."""

    def __init__(self, step_index: int):
        super().__init__(f"non-finite amplitudes after step {step_index}")
        self.step_index = step_index


class Kind(enum.Enum):
    FULL_4NLS = "full"
    WICK_4WNLS = "wick"


@dataclass(frozen=True)
class EquationKind:
    """Which equation to integrate and the nonlinearity sign mu.

    mu is +1 or -1; mu = 0 is accepted as a linear-only test mode
    (nonlinearity switched off entirely).
    """

    kind: Kind
    mu: int = 1

    def __post_init__(self):
        if self.mu not in (-1, 0, 1):
            raise ValueError("mu must be +1, -1, or 0 (linear-only test mode)")


FULL = EquationKind(Kind.FULL_4NLS, 1)
WICK = EquationKind(Kind.WICK_4WNLS, 1)


class Scheme(enum.Enum):
    EXP_RK4 = "exp_rk4"
    STRANG = "strang"


@dataclass(frozen=True)
class IntegratorSpec:
    """Time integrator: scheme, step size and optional Galerkin truncation.

    A truncation radius selects the finite-dimensional flow with the
    nonlinearity projected to |n| <= truncation; only EXP_RK4 integrates
    that projected system exactly as written, so STRANG rejects it.
    Negative dt integrates backwards in time.
    """

    scheme: Scheme = Scheme.EXP_RK4
    dt: float = 1e-3
    truncation: int | None = None

    def __post_init__(self):
        if self.dt == 0.0 or not math.isfinite(self.dt):
            raise ValueError("dt must be a nonzero finite number")
        if self.truncation is not None and self.truncation < 0:
            raise ValueError("truncation must be nonnegative")
        if self.truncation is not None and self.scheme is Scheme.STRANG:
            raise ValueError(
                "STRANG is not the truncated-flow semigroup; use EXP_RK4"
            )


def _conv_plan(n_max: int) -> tuple:
    """Precomputed FFT layout for alias-free cubic products at this n_max."""
    m = padded_grid_size(n_max)
    idx = np.arange(-n_max, n_max + 1) % m
    return m, idx


def _cubic_conv_raw(cu, cv, cw, m, idx) -> np.ndarray:
    """Raw-array cubic convolution: one zero-padded grid round trip."""
    su = np.zeros(m, dtype=np.complex128)
    sv = np.zeros(m, dtype=np.complex128)
    sw = np.zeros(m, dtype=np.complex128)
    su[idx], sv[idx], sw[idx] = cu, cv, cw
    with np.errstate(invalid="ignore", over="ignore"):
        prod = ifft(su) * np.conj(ifft(sv)) * ifft(sw) * (m * m)
        return fft(prod)[idx]


def cubic_convolution(u: FourierState, v: FourierState, w: FourierState) -> FourierState:
    """d_n = sum_{n1-n2+n3=n, |ni|<=N, |n|<=N} u(n1) conj(v(n2)) w(n3).

    Computed alias-free via a zero-padded physical grid of length >= 4N+1.
    """
    if not (u.n_max == v.n_max == w.n_max):
        raise ValueError("cubic_convolution requires equal n_max")
    m, idx = _conv_plan(u.n_max)
    return u.with_coeffs(_cubic_conv_raw(u.coeffs, v.coeffs, w.coeffs, m, idx))


def cubic_convolution_direct(u: FourierState, v: FourierState, w: FourierState) -> FourierState:
    """O(N^3) triple-loop evaluation of the cubic convolution (test oracle)."""
    if not (u.n_max == v.n_max == w.n_max):
        raise ValueError("cubic_convolution requires equal n_max")
    nm = u.n_max
    d = np.zeros(2 * nm + 1, dtype=np.complex128)
    for n1 in range(-nm, nm + 1):
        for n2 in range(-nm, nm + 1):
            for n3 in range(-nm, nm + 1):
                n = n1 - n2 + n3
                if abs(n) <= nm:
                    d[n + nm] += u.mode(n1) * np.conj(v.mode(n2)) * w.mode(n3)
    return FourierState(nm, d)


def nonlinearity_resonant(u: FourierState) -> FourierState:
    """Resonant part: N_R(u)(n) = i |c_n|^2 c_n - 2i (sum_k |c_k|^2) c_n."""
    c = u.coeffs
    mass = np.sum(np.abs(c) ** 2)
    return u.with_coeffs(1j * np.abs(c) ** 2 * c - 2j * mass * c)


def nonlinearity_nonresonant(u: FourierState) -> FourierState:
    """Non-resonant part: N_NR(u)(n) = -i sum over non-resonant triples.

    Computed as -i * cubic_convolution(u,u,u) - N_R(u); the splitting
    -i conv = N_R + N_NR is exact by construction.
    """
    conv = cubic_convolution(u, u, u)
    res = nonlinearity_resonant(u)
    return u.with_coeffs(-1j * conv.coeffs - res.coeffs)


def _nonlinear_rhs_raw(c: np.ndarray, kind: EquationKind, m, idx) -> np.ndarray:
    """Nonlinear part of dc/dt (linear phase excluded), raw arrays."""
    if kind.mu == 0:
        return np.zeros_like(c)
    conv = _cubic_conv_raw(c, c, c, m, idx)
    if kind.kind is Kind.FULL_4NLS:
        return -1j * kind.mu * conv
    # wick: resonant self-phase kept, mass shift removed from the convolution
    mass = np.sum(np.abs(c) ** 2)
    return kind.mu * (-1j * conv + 2j * mass * c)


def _nonlinear_rhs(u: FourierState, kind: EquationKind) -> np.ndarray:
    m, idx = _conv_plan(u.n_max)
    return _nonlinear_rhs_raw(u.coeffs, kind, m, idx)


def rhs(u: FourierState, kind: EquationKind, truncation: int | None = None) -> FourierState:
    """Full time derivative dc/dt, optionally with projected nonlinearity."""
    n4 = u.modes.astype(np.float64) ** 4
    if truncation is not None:
        if truncation > u.n_max:
            raise ValueError("truncation exceeds state n_max")
        _check_support(u, truncation)
    nl = _nonlinear_rhs(u, kind)
    if truncation is not None:
        nl = np.where(np.abs(u.modes) <= truncation, nl, 0.0)
    return u.with_coeffs(1j * n4 * u.coeffs + nl)


def _check_support(u: FourierState, truncation: int) -> None:
    if np.any(u.coeffs[np.abs(u.modes) > truncation] != 0.0):
        raise ValueError(
            f"truncated run requires data supported in |n| <= {truncation}"
        )


def _step_exp_rk4(u: FourierState, dt: float, kind: EquationKind,
                  truncation: int | None) -> FourierState:
    """Lawson (interaction-picture) RK4: the linear phase is exact."""
    modes = u.modes
    n4 = modes.astype(np.float64) ** 4
    e_half = np.exp(0.5j * dt * n4)
    e_full = e_half * e_half
    m, idx = _conv_plan(u.n_max)

    if truncation is not None:
        keep = np.abs(modes) <= truncation

        def nl(c):
            out = _nonlinear_rhs_raw(c, kind, m, idx)
            return np.where(keep, out, 0.0)
    else:
        def nl(c):
            return _nonlinear_rhs_raw(c, kind, m, idx)

    c0 = u.coeffs
    k1 = nl(c0)
    k2 = np.conj(e_half) * nl(e_half * (c0 + 0.5 * dt * k1))
    k3 = np.conj(e_half) * nl(e_half * (c0 + 0.5 * dt * k2))
    k4 = np.conj(e_full) * nl(e_full * (c0 + dt * k3))
    a1 = c0 + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return u.with_coeffs(e_full * a1)


def _step_strang_inplace(c: np.ndarray, n4: np.ndarray, fft_index: np.ndarray,
                         dt: float, kind: EquationKind) -> np.ndarray:
    """One Strang step on a full collocation grid; every substep is unitary.

    c holds the 2G+1 amplitudes for n = -G..G with grid size M = 2G+1.
    """
    m = len(c)
    half = np.exp(0.5j * dt * n4)
    c = half * c
    if kind.mu != 0:
        spec = np.zeros(m, dtype=np.complex128)
        spec[fft_index] = c
        grid = ifft(spec) * m
        phase = -kind.mu * np.abs(grid) ** 2 * dt
        if kind.kind is Kind.WICK_4WNLS:
            mass = np.sum(np.abs(c) ** 2)
            phase = phase + 2.0 * kind.mu * mass * dt
        grid = grid * np.exp(1j * phase)
        c = (fft(grid) / m)[fft_index]
    return half * c


def _strang_lift(u: FourierState) -> FourierState:
    """Zero-pad so the collocation grid 2*n_max+1 is alias-safe and odd."""
    m = odd_padded_grid_size(u.n_max)
    return u.pad_to((m - 1) // 2)


def step(u: FourierState, spec: IntegratorSpec, kind: EquationKind) -> FourierState:
    """Advance one step of length spec.dt; raises NumericFailure on NaN."""
    if spec.scheme is Scheme.EXP_RK4:
        try:
            out = _step_exp_rk4(u, spec.dt, kind, spec.truncation)
        except ValueError as exc:
            # overflow inside a stage surfaces as a non-finite state
            raise NumericFailure(0) from exc
    else:
        lifted = _strang_lift(u)
        modes = lifted.modes
        n4 = modes.astype(np.float64) ** 4
        idx = modes % len(lifted.coeffs)
        c = _step_strang_inplace(lifted.coeffs.copy(), n4, idx, spec.dt, kind)
        out = FourierState(lifted.n_max, c).truncate_to(u.n_max)
    if not np.all(np.isfinite(out.coeffs.view(np.float64))):
        raise NumericFailure(0)
    return out


def integrate(u0: FourierState, T: float, spec: IntegratorSpec,
              kind: EquationKind, sample_stride: int = 1) -> Trajectory:
    """Integrate from t=0 to t=T, sampling every sample_stride steps.

    T must be an integer multiple of spec.dt and sample_stride must divide
    the step count, so the returned trajectory is uniformly sampled and
    includes both endpoints. With STRANG the state is zero-padded once to
    the alias-safe collocation grid and evolved there without projection
    (each substep is an l2-isometry), so the returned states carry the
    enlarged n_max.
    """
    if sample_stride < 1:
        raise ValueError("sample_stride must be >= 1")
    if T == 0.0:
        return Trajectory(0.0, spec.dt * sample_stride, (u0,))
    k_float = T / spec.dt
    k = round(k_float)
    if k <= 0 or abs(k_float - k) > 1e-12 * max(1.0, abs(k_float)):
        raise ValueError(f"T={T} is not a positive integer multiple of dt={spec.dt}")
    if k % sample_stride != 0:
        raise ValueError("sample_stride must divide the number of steps")

    if spec.scheme is Scheme.STRANG:
        state = _strang_lift(u0)
        modes = state.modes
        n4 = modes.astype(np.float64) ** 4
        idx = modes % len(state.coeffs)
        c = state.coeffs.copy()
        samples = [FourierState(state.n_max, c.copy())]
        for i in range(k):
            c = _step_strang_inplace(c, n4, idx, spec.dt, kind)
            if not np.all(np.isfinite(c.view(np.float64))):
                raise NumericFailure(i)
            if (i + 1) % sample_stride == 0:
                samples.append(FourierState(state.n_max, c.copy()))
        return Trajectory(0.0, spec.dt * sample_stride, tuple(samples))

    if spec.truncation is not None:
        if spec.truncation > u0.n_max:
            raise ValueError("truncation exceeds state n_max")
        _check_support(u0, spec.truncation)
    state = u0
    samples = [state]
    for i in range(k):
        try:
            state = _step_exp_rk4(state, spec.dt, kind, spec.truncation)
        except ValueError as exc:
            raise NumericFailure(i) from exc
        if not np.all(np.isfinite(state.coeffs.view(np.float64))):
            raise NumericFailure(i)
        if (i + 1) % sample_stride == 0:
            samples.append(state)
    return Trajectory(0.0, spec.dt * sample_stride, tuple(samples))


def exact_resonant_flow(u0: FourierState, t: float, mu: int = 1) -> FourierState:
    """Closed-form flow of the purely resonant system

        dc_n/dt = mu * (i |c_n|^2 - 2i sum_k |c_k|^2) c_n.

    Every |c_n| is a constant of motion, so each mode just rotates:
    c_n(t) = exp(i mu t (|c_n(0)|^2 - 2 M0)) c_n(0) with M0 the mass.
    """
    c = u0.coeffs
    mass0 = np.sum(np.abs(c) ** 2)
    return u0.with_coeffs(np.exp(1j * mu * t * (np.abs(c) ** 2 - 2.0 * mass0)) * c)
