"""Truncated Fourier representation of 2pi-periodic complex fields.

Convention: u(x) = sum_n c_n e^{inx}, c_n = (1/2pi) int_0^{2pi} e^{-inx} u dx.
Under this convention products of functions are plain convolutions of
coefficients and (1/2pi) int |u|^2 dx = sum_n |c_n|^2.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.fft import fft, ifft, next_fast_len

STATE_FORMAT = "4nls-state/1"
TRAJ_FORMAT = "4nls-traj/1"


class FileFormatError(ValueError):
    """Raised when a state/trajectory file cannot be parsed."""


@dataclass(frozen=True)
class FourierState:
    """Complex mode amplitudes c_n for n = -n_max .. n_max (contiguous)."""

    n_max: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.n_max < 0:
            raise ValueError(f"n_max must be nonnegative, got {self.n_max}")
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (2 * self.n_max + 1,):
            raise ValueError(
                f"coeffs must have length {2 * self.n_max + 1}, got {c.shape}"
            )
        if not np.all(np.isfinite(c.view(np.float64))):
            raise ValueError("coeffs contain NaN or Inf")
        c = c.copy()
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, n_max: int) -> "FourierState":
        return cls(n_max, np.zeros(2 * n_max + 1, dtype=np.complex128))

    @classmethod
    def from_modes(cls, n_max: int, modes: dict[int, complex]) -> "FourierState":
        c = np.zeros(2 * n_max + 1, dtype=np.complex128)
        for n, a in modes.items():
            if abs(n) > n_max:
                raise ValueError(f"mode {n} outside truncation |n| <= {n_max}")
            c[n + n_max] = a
        return cls(n_max, c)

    def mode(self, n: int) -> complex:
        """Amplitude c_n; zero outside the truncation."""
        if abs(n) > self.n_max:
            return 0.0 + 0.0j
        return complex(self.coeffs[n + self.n_max])

    @property
    def modes(self) -> np.ndarray:
        """Integer frequencies -n_max..n_max matching ``coeffs``."""
        return np.arange(-self.n_max, self.n_max + 1)

    def with_coeffs(self, coeffs: np.ndarray) -> "FourierState":
        return FourierState(self.n_max, coeffs)

    def pad_to(self, n_max: int) -> "FourierState":
        """Zero-pad to a larger truncation radius."""
        if n_max < self.n_max:
            raise ValueError("pad_to target smaller than current n_max")
        c = np.zeros(2 * n_max + 1, dtype=np.complex128)
        c[n_max - self.n_max : n_max + self.n_max + 1] = self.coeffs
        return FourierState(n_max, c)

    def truncate_to(self, n_max: int) -> "FourierState":
        """Drop modes with |n| > n_max and shrink the carrier."""
        if n_max >= self.n_max:
            return self.pad_to(n_max)
        k = self.n_max - n_max
        return FourierState(n_max, self.coeffs[k : len(self.coeffs) - k])

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def allclose(self, other: "FourierState", atol: float = 0.0, rtol: float = 1e-13) -> bool:
        return self.n_max == other.n_max and np.allclose(
            self.coeffs, other.coeffs, atol=atol, rtol=rtol
        )


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled time series of FourierStates; sample k is at t0 + k*dt."""

    t0: float
    dt: float
    states: tuple

    def __post_init__(self):
        if self.dt == 0.0:
            raise ValueError("dt must be nonzero")
        states = tuple(self.states)
        if not states:
            raise ValueError("trajectory must contain at least one state")
        n_max = states[0].n_max
        if any(s.n_max != n_max for s in states):
            raise ValueError("all states in a trajectory must share n_max")
        object.__setattr__(self, "states", states)

    @property
    def n_max(self) -> int:
        return self.states[0].n_max

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(len(self.states))

    def __len__(self) -> int:
        return len(self.states)

    def coeff_array(self) -> np.ndarray:
        """(num_samples, 2*n_max+1) array of amplitudes."""
        return np.stack([s.coeffs for s in self.states])


@dataclass(frozen=True)
class DyadicBlock:
    """Frequency annulus I_1 = [-1,1], I_N = [-2N,-N/2] u [N/2,2N] for N >= 2."""

    level: int
    index_set: tuple = field(init=False)

    def __post_init__(self):
        n = self.level
        if n < 1 or (n & (n - 1)) != 0:
            raise ValueError(f"level must be a power of two >= 1, got {n}")
        if n == 1:
            intervals = ((-1, 1),)
        else:
            intervals = ((-2 * n, -(n // 2)), (n // 2, 2 * n))
        object.__setattr__(self, "index_set", intervals)

    def contains(self, n: int) -> bool:
        return any(lo <= n <= hi for lo, hi in self.index_set)

    def mask(self, n_max: int) -> np.ndarray:
        ns = np.arange(-n_max, n_max + 1)
        m = np.zeros_like(ns, dtype=bool)
        for lo, hi in self.index_set:
            m |= (ns >= lo) & (ns <= hi)
        return m


def blocks_covering(n_max: int) -> list[DyadicBlock]:
    """Dyadic blocks whose union covers [-n_max, n_max]."""
    blocks = [DyadicBlock(1)]
    level = 2
    while level // 2 <= n_max:
        blocks.append(DyadicBlock(level))
        level *= 2
    return blocks


def analyze(samples, n_max: int) -> FourierState:
    """Discrete Fourier coefficients c_n, |n| <= n_max, of equispaced samples.

    Exact for inputs band-limited to |n| <= n_max when the grid has
    M >= 2*n_max+1 points.
    """
    u = np.asarray(samples, dtype=np.complex128)
    m = u.shape[-1]
    if m < 2 * n_max + 1:
        raise ValueError(
            f"grid of {m} samples too short for n_max={n_max}; need >= {2 * n_max + 1}"
        )
    spec = fft(u) / m
    ns = np.arange(-n_max, n_max + 1)
    return FourierState(n_max, spec[..., ns % m])


def synthesize(state: FourierState, grid_size: int) -> np.ndarray:
    """Evaluate u(x) = sum c_n e^{inx} on the equispaced grid x_j = 2pi j/M."""
    m = grid_size
    if m < 2 * state.n_max + 1:
        raise ValueError(
            f"grid of {m} samples too short for n_max={state.n_max};"
            f" need >= {2 * state.n_max + 1}"
        )
    spec = np.zeros(m, dtype=np.complex128)
    ns = np.arange(-state.n_max, state.n_max + 1)
    spec[ns % m] = state.coeffs
    return ifft(spec) * m


def padded_grid_size(n_max: int) -> int:
    """Smallest efficient transform length >= 4*n_max+1 (alias-free cubic)."""
    return next_fast_len(4 * n_max + 1)


def odd_padded_grid_size(n_max: int) -> int:
    """Smallest efficient odd transform length >= 4*n_max+1."""
    m = next_fast_len(4 * n_max + 1)
    while m % 2 == 0:
        m = next_fast_len(m + 1)
    return m


def project_leq(state: FourierState, cutoff: int) -> FourierState:
    """Zero all modes with |n| > cutoff; the truncation radius is unchanged."""
    if cutoff < 0:
        raise ValueError("cutoff must be nonnegative")
    c = state.coeffs.copy()
    ns = state.modes
    c[np.abs(ns) > cutoff] = 0.0
    return state.with_coeffs(c)


def project_dyadic(state: FourierState, block: DyadicBlock) -> FourierState:
    """Keep exactly the modes with n in the block's index set."""
    c = np.where(block.mask(state.n_max), state.coeffs, 0.0)
    return state.with_coeffs(c)


def hs_norm(state: FourierState, s: float) -> float:
    """Sobolev norm (sum <n>^{2s} |c_n|^2)^{1/2}, <n> = (1+n^2)^{1/2}."""
    w = (1.0 + state.modes.astype(np.float64) ** 2) ** s
    return float(math.sqrt(np.sum(w * np.abs(state.coeffs) ** 2)))


def _fmt(x: float) -> float:
    # round-trip via 17 significant digits; bit-exact for doubles
    return float(f"{x:.17g}")


def _coeff_list(coeffs: np.ndarray) -> list:
    return [[_fmt(z.real), _fmt(z.imag)] for z in coeffs]


def _coeff_array(raw, n_max: int, where: str) -> np.ndarray:
    try:
        arr = np.array([complex(re, im) for re, im in raw], dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise FileFormatError(f"malformed coeffs in {where}: {exc}") from exc
    if arr.shape != (2 * n_max + 1,):
        raise FileFormatError(
            f"{where}: expected {2 * n_max + 1} coefficients, found {arr.shape[0]}"
        )
    return arr


def save_state(state: FourierState, path) -> None:
    doc = {
        "format": STATE_FORMAT,
        "n_max": state.n_max,
        "coeffs": _coeff_list(state.coeffs),
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)
        fh.write("\n")


def load_state(path) -> FourierState:
    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON: {exc}") from exc
    if doc.get("format") != STATE_FORMAT:
        raise FileFormatError(
            f"{path}: version mismatch: expected {STATE_FORMAT!r},"
            f" found {doc.get('format')!r}"
        )
    n_max = int(doc["n_max"])
    return FourierState(n_max, _coeff_array(doc["coeffs"], n_max, str(path)))


def save_trajectory(traj: Trajectory, path) -> None:
    with open(path, "w") as fh:
        header = {
            "format": TRAJ_FORMAT,
            "n_max": traj.n_max,
            "t0": _fmt(traj.t0),
            "dt": _fmt(traj.dt),
        }
        fh.write(json.dumps(header) + "\n")
        for k, s in enumerate(traj.states):
            fh.write(json.dumps({"k": k, "coeffs": _coeff_list(s.coeffs)}) + "\n")


def load_trajectory(path) -> Trajectory:
    with open(path) as fh:
        lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise FileFormatError(f"{path}: empty trajectory file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: bad header: {exc}") from exc
    if header.get("format") != TRAJ_FORMAT:
        raise FileFormatError(
            f"{path}: version mismatch: expected {TRAJ_FORMAT!r},"
            f" found {header.get('format')!r}"
        )
    n_max = int(header["n_max"])
    states = []
    for i, ln in enumerate(lines[1:]):
        try:
            rec = json.loads(ln)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: bad record {i}: {exc}") from exc
        if rec.get("k") != i:
            raise FileFormatError(f"{path}: record {i} carries index {rec.get('k')}")
        states.append(FourierState(n_max, _coeff_array(rec["coeffs"], n_max, f"record {i}")))
    if not states:
        raise FileFormatError(f"{path}: trajectory has no states")
    return Trajectory(float(header["t0"]), float(header["dt"]), tuple(states))
