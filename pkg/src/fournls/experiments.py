"""Desk-scale experiment drivers: truncation-convergence studies,
high-frequency stability studies, and the non-squeezing witness probe.

Every driver is deterministic given its parameters and root seed; reports
echo the full configuration so a run can be reproduced bit-identically.
"""
from __future__ import annotations

import json
import math
import os
import time
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .dynamics import EquationKind, IntegratorSpec, Kind, Scheme, integrate
from .spectrum import FourierState, project_leq


def derive_rng(root_seed: int, *key) -> np.random.Generator:
    """Counter-based splittable seeding: the task key (ints/strings) is
    mapped to a spawn key, so tasks can run in any order or in parallel."""
    spawn = tuple(
        k if isinstance(k, int) else zlib.crc32(str(k).encode()) for k in key
    )
    return np.random.default_rng(np.random.SeedSequence(root_seed, spawn_key=spawn))


def worker_count() -> int:
    """Worker cap from FOURNLS_THREADS (default 1: fully sequential)."""
    try:
        return max(1, int(os.environ.get("FOURNLS_THREADS", "1")))
    except ValueError:
        return 1


def _map_tasks(fn, items):
    workers = worker_count()
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


class ProfileKind(Enum):
    EXP_DECAY = "exp_decay"
    POWER_DECAY = "power_decay"
    SINGLE_MODE = "single_mode"
    EXPLICIT = "explicit"


@dataclass(frozen=True)
class ProfileSpec:
    """Deterministic initial-datum family.

    amplitude is the target l2 norm of the generated state. decay is the
    exponential rate / power exponent; mode selects the excited frequency
    for SINGLE_MODE; state carries the datum for EXPLICIT.
    """

    kind: ProfileKind
    amplitude: float = 1.0
    decay: float = 0.5
    seed: int = 0
    mode: int = 0
    state: FourierState | None = None

    def build(self, n_max: int) -> FourierState:
        if self.kind is ProfileKind.EXPLICIT:
            if self.state is None:
                raise ValueError("EXPLICIT profile requires a state")
            return self.state.truncate_to(n_max)
        if self.kind is ProfileKind.SINGLE_MODE:
            if abs(self.mode) > n_max:
                raise ValueError("single mode outside truncation")
            return FourierState.from_modes(n_max, {self.mode: self.amplitude})
        ns = np.arange(-n_max, n_max + 1)
        rng = derive_rng(self.seed, "profile", self.kind.value)
        phases = np.exp(2j * np.pi * rng.random(2 * n_max + 1))
        if self.kind is ProfileKind.EXP_DECAY:
            mag = np.exp(-self.decay * np.abs(ns))
        else:
            mag = (1.0 + np.abs(ns)) ** (-self.decay)
        c = mag * phases
        c *= self.amplitude / np.linalg.norm(c)
        return FourierState(n_max, c)


@dataclass
class ExperimentReport:
    """Structured result record: parameter ladder -> measured quantity."""

    kind: str
    params: dict
    table: list
    fitted: dict | None = None
    artifacts: list = field(default_factory=list)
    created: float = 0.0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "params": self.params,
            "table": self.table,
            "fitted": self.fitted,
            "artifacts": self.artifacts,
            "created": self.created,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def save_json(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_json() + "\n")
        self.artifacts.append(str(path))

    def stamp(self, deterministic: bool) -> None:
        self.created = 0.0 if deterministic else time.time()


def fit_decay_rate(table) -> tuple[float, float, float]:
    """Least-squares power-law fit on (log x, log y); returns
    (rate, intercept, residual) with rate = -slope."""
    rows = list(table)
    if len(rows) < 3:
        raise ValueError("need at least 3 rows to fit a decay rate")
    xs = np.array([float(x) for x, _ in rows])
    ys = np.array([float(y) for _, y in rows])
    if np.any(ys <= 0.0) or np.any(xs <= 0.0):
        raise ValueError("fit_decay_rate requires positive x and y")
    slope, intercept = np.polyfit(np.log(xs), np.log(ys), 1)
    resid = np.log(ys) - (slope * np.log(xs) + intercept)
    return float(-slope), float(intercept), float(np.sqrt(np.mean(resid**2)))


def _choose_stride(steps: int, target_samples: int = 50) -> int:
    """Largest divisor of steps giving at least target_samples samples."""
    best = 1
    for stride in range(1, steps + 1):
        if steps % stride == 0 and steps // stride >= target_samples:
            best = stride
    return best


def _low_mode_gap(a: FourierState, b: FourierState, cutoff: int) -> float:
    ca = project_leq(a, cutoff)
    cb = project_leq(b, cutoff)
    nm = max(ca.n_max, cb.n_max)
    return float(np.linalg.norm(ca.pad_to(nm).coeffs - cb.pad_to(nm).coeffs))


def run_approximation_study(profile: ProfileSpec, n_ladder, ref_factor: int,
                            T: float, dt: float,
                            scheme: Scheme = Scheme.EXP_RK4,
                            mu_sign: int = 1,
                            kind: Kind = Kind.FULL_4NLS) -> ExperimentReport:
    """Truncation-convergence ladder.

    For each N: datum = P_{<=N}(profile); the reference flow is the
    truncated flow at ref_factor*N (desk-scale stand-in for the
    untruncated flow); error(N) = sup over samples of the l2 gap of the
    modes |n| <= floor(sqrt(N)). Fits error ~ C N^{-sigma}.
    """
    ladder = [int(n) for n in n_ladder]
    if any(b <= a for a, b in zip(ladder, ladder[1:])) or not ladder:
        raise ValueError("N ladder must be strictly increasing and nonempty")
    if ref_factor < 2:
        raise ValueError("ref_factor must be >= 2")
    eq = EquationKind(kind, mu_sign)
    base = profile.build(ladder[-1])
    steps = round(T / dt)
    stride = _choose_stride(steps)

    def one(n: int):
        datum = base.truncate_to(n)
        ref_datum = datum.pad_to(ref_factor * n)
        tr = integrate(datum, T, IntegratorSpec(Scheme.EXP_RK4, dt, truncation=n),
                       eq, stride)
        ref = integrate(ref_datum, T,
                        IntegratorSpec(Scheme.EXP_RK4, dt, truncation=ref_factor * n),
                        eq, stride)
        cutoff = math.isqrt(n)
        err = max(
            _low_mode_gap(a, b, cutoff) for a, b in zip(tr.states, ref.states)
        )
        return {"N": n, "error": err}

    table = _map_tasks(one, ladder)
    fitted = None
    if all(row["error"] > 0 for row in table) and len(table) >= 3:
        rate, intercept, resid = fit_decay_rate(
            [(row["N"], row["error"]) for row in table]
        )
        fitted = {"rate": rate, "intercept": intercept, "residual": resid}
    params = {
        "profile": _profile_params(profile),
        "n_ladder": ladder,
        "ref_factor": ref_factor,
        "T": T,
        "dt": dt,
        "scheme": Scheme.EXP_RK4.value,
        "mu": mu_sign,
        "equation": kind.value,
        "sample_stride": stride,
    }
    return ExperimentReport("approximation_study", params, table, fitted)


def _profile_params(profile: ProfileSpec) -> dict:
    return {
        "kind": profile.kind.value,
        "amplitude": profile.amplitude,
        "decay": profile.decay,
        "seed": profile.seed,
        "mode": profile.mode,
    }


def high_frequency_perturbation(rng: np.random.Generator, n_prime: int,
                                n_max: int, norm: float) -> FourierState:
    """Random datum supported in n_prime < |n| <= n_max with given l2 norm."""
    ns = np.arange(-n_max, n_max + 1)
    c = rng.normal(size=2 * n_max + 1) + 1j * rng.normal(size=2 * n_max + 1)
    c[np.abs(ns) <= n_prime] = 0.0
    scale = np.linalg.norm(c)
    if scale == 0.0:
        raise ValueError("empty perturbation support")
    return FourierState(n_max, c * (norm / scale))


def run_perturbation_study(profile: ProfileSpec, n_primes,
                           perturbation_norm: float, T: float, dt: float,
                           scheme: Scheme = Scheme.EXP_RK4, trials: int = 4,
                           seed: int = 0, mu_sign: int = 1,
                           kind: Kind = Kind.FULL_4NLS) -> ExperimentReport:
    """Low-frequency stability under high-frequency data perturbations.

    For each N' in the ladder: co-evolve the datum and N'-agreeing
    perturbed data at resolution 2N' and record the worst sampled
    divergence of the modes |n| <= N' - floor(sqrt(N'))."""
    if isinstance(n_primes, int):
        n_primes = [n_primes]
    ladder = [int(n) for n in n_primes]
    eq = EquationKind(kind, mu_sign)
    steps = round(T / dt)
    stride = _choose_stride(steps)

    def one(n_prime: int):
        res = 2 * n_prime
        u0 = profile.build(res)
        spec = IntegratorSpec(Scheme.EXP_RK4, dt, truncation=res)
        base_traj = integrate(u0, T, spec, eq, stride)
        cutoff = n_prime - math.isqrt(n_prime)
        worst = 0.0
        for trial in range(trials):
            rng = derive_rng(seed, "perturb", n_prime, trial)
            if perturbation_norm == 0.0:
                pert_traj = base_traj
            else:
                d = high_frequency_perturbation(rng, n_prime, res, perturbation_norm)
                if np.any(d.coeffs[np.abs(d.modes) <= n_prime] != 0.0):
                    raise ValueError("perturbation leaks into |n| <= N'")
                pert_traj = integrate(
                    u0.with_coeffs(u0.coeffs + d.coeffs), T, spec, eq, stride
                )
            div = max(
                _low_mode_gap(a, b, cutoff)
                for a, b in zip(base_traj.states, pert_traj.states)
            )
            worst = max(worst, div)
        return {"N_prime": n_prime, "divergence": worst}

    table = _map_tasks(one, ladder)
    params = {
        "profile": _profile_params(profile),
        "n_primes": ladder,
        "perturbation_norm": perturbation_norm,
        "T": T,
        "dt": dt,
        "scheme": Scheme.EXP_RK4.value,
        "trials": trials,
        "seed": seed,
        "mu": mu_sign,
        "equation": kind.value,
        "sample_stride": stride,
    }
    return ExperimentReport("perturbation_study", params, table)


def run_squeeze_probe(u_star: FourierState, R: float, r: float, n0: int,
                      z: complex, T: float, N: int, dt: float,
                      samples: int = 64, epsilon: float = 0.1, seed: int = 0,
                      mu_sign: int = 1, kind: Kind = Kind.FULL_4NLS) -> ExperimentReport:
    """Sampled search for a non-squeezing witness of the truncated flow.

    Candidates u0 = P_{<=N} u_star + rho * d are drawn mostly on the sphere
    rho = R - epsilon (a targeted phase sweep of the n0 mode plus seeded
    random directions; 10% of the budget probes the ball interior). Each is
    evolved under the truncated flow to time T and scored by

        margin(u0) = |c(T, n0) - z| - r.

    A positive best margin is an explicit witness for this (N, T); a
    negative one only means no witness was found among the samples.
    """
    if not (0.0 < r < R):
        raise ValueError("need 0 < r < R")
    if not (0.0 < epsilon < (R - r) / 2.0):
        raise ValueError("need 0 < epsilon < (R - r)/2")
    if abs(n0) > N:
        raise ValueError("|n0| must be <= N")
    if samples < 1:
        raise ValueError("samples must be >= 1")
    eq = EquationKind(kind, mu_sign)
    base = u_star.truncate_to(N)
    spec = IntegratorSpec(Scheme.EXP_RK4, dt, truncation=N)
    rho = R - epsilon
    dim = 2 * N + 1

    sweep = min(16, samples)
    interior = max(0, samples // 10) if samples > sweep else 0
    n_random = samples - sweep - interior

    candidates = []  # (label, direction, radius)
    for k in range(sweep):
        phi = 2.0 * np.pi * k / sweep
        d = np.zeros(dim, dtype=np.complex128)
        d[n0 + N] = np.exp(1j * phi)
        candidates.append((f"sweep:{k}", d, rho))
    for k in range(n_random):
        rng = derive_rng(seed, "squeeze-dir", k)
        d = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        d /= np.linalg.norm(d)
        candidates.append((f"random:{k}", d, rho))
    for k in range(interior):
        rng = derive_rng(seed, "squeeze-int", k)
        d = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        d /= np.linalg.norm(d)
        candidates.append((f"interior:{k}", d, rho * rng.random()))

    def one(cand):
        label, d, radius = cand
        u0 = base.with_coeffs(base.coeffs + radius * d)
        traj = integrate(u0, T, spec, eq, sample_stride=max(1, round(T / dt)))
        final = traj.states[-1]
        margin = abs(final.mode(n0) - z) - r
        return {"label": label, "radius": radius, "margin": float(margin)}

    table = _map_tasks(one, candidates)
    best = max(table, key=lambda row: row["margin"])
    params = {
        "R": R,
        "r": r,
        "n0": n0,
        "z": [z.real, z.imag] if isinstance(z, complex) else [float(z), 0.0],
        "T": T,
        "N": N,
        "dt": dt,
        "samples": samples,
        "epsilon": epsilon,
        "seed": seed,
        "mu": mu_sign,
        "equation": kind.value,
    }
    report = ExperimentReport("squeeze_probe", params, table)
    report.fitted = {
        "best_label": best["label"],
        "best_margin": best["margin"],
        "witness_found": best["margin"] > 0.0,
    }
    return report
