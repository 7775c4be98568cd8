"""Integer resonance algebra on the convolution hyperplane n1 - n2 + n3 = n.

The quartic phase mismatch for the cubic nonlinearity is

    H(n1, n2, n3) = n1^4 - n2^4 + n3^4 - (n1 - n2 + n3)^4
                  = (n1-n2)(n2-n3)(n1^2 + n2^2 + n3^2 + n^2 + 2(n1+n3)^2),

so it vanishes exactly when n1 = n2 or n2 = n3. All arithmetic here is
exact (Python integers), which makes the identity tests exact as well.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .spectrum import FourierState


@dataclass(frozen=True)
class ResonanceQuadruple:
    n1: int
    n2: int
    n3: int
    n: int
    h: int

    def __post_init__(self):
        if self.n != self.n1 - self.n2 + self.n3:
            raise ValueError("n must equal n1 - n2 + n3")
        if self.h != h_value(self.n1, self.n2, self.n3):
            raise ValueError("h does not match the quartic phase mismatch")
        if self.n1 == self.n2 or self.n2 == self.n3:
            raise ValueError("trivially resonant triple (n1=n2 or n2=n3)")


def h_value(n1: int, n2: int, n3: int) -> int:
    """n1^4 - n2^4 + n3^4 - (n1-n2+n3)^4, exact."""
    n = n1 - n2 + n3
    return n1**4 - n2**4 + n3**4 - n**4


def h_factored(n1: int, n2: int, n3: int) -> int:
    """Factored form (n1-n2)(n2-n3)(n1^2+n2^2+n3^2+n^2+2(n1+n3)^2), exact."""
    n = n1 - n2 + n3
    return (n1 - n2) * (n2 - n3) * (n1**2 + n2**2 + n3**2 + n**2 + 2 * (n1 + n3) ** 2)


def enumerate_nonresonant(n: int, n_max: int) -> list[ResonanceQuadruple]:
    """All non-resonant triples (n1, n2, n3) with n1-n2+n3 = n, |ni| <= n_max.

    Non-resonant means (n1-n2)(n2-n3) != 0. Output is lexicographic in
    (n1, n2); n3 is then determined.
    """
    out = []
    for n1 in range(-n_max, n_max + 1):
        for n2 in range(-n_max, n_max + 1):
            n3 = n - n1 + n2
            if abs(n3) > n_max:
                continue
            if n1 == n2 or n2 == n3:
                continue
            out.append(ResonanceQuadruple(n1, n2, n3, n, h_value(n1, n2, n3)))
    return out


@dataclass(frozen=True)
class ModifiedPhase:
    """Per-mode phase table mu(n) = n^4 + |c0(n)|^2 for a reference datum."""

    reference: FourierState
    table: dict = field(init=False)

    def __post_init__(self):
        ref = self.reference
        table = {
            int(n): float(n) ** 4 + abs(ref.mode(int(n))) ** 2 for n in ref.modes
        }
        object.__setattr__(self, "table", table)

    def mu(self, n: int) -> float:
        try:
            return self.table[n]
        except KeyError:
            raise ValueError(
                f"frequency {n} outside reference support |n| <= {self.reference.n_max}"
            ) from None

    def mu_array(self, n_max: int) -> np.ndarray:
        """mu(n) for n = -n_max..n_max; requires n_max <= reference n_max."""
        return np.array([self.mu(n) for n in range(-n_max, n_max + 1)])

    def weight(self, n: int) -> float:
        """|c0(n)|^2, the data-dependent part of mu(n)."""
        return self.mu(n) - float(n) ** 4


def g_value(n1: int, n2: int, n3: int, phase: ModifiedPhase) -> float:
    """Resonance function of the data-adapted evolution:

    G = H(n1,n2,n3) + |c0(n1)|^2 - |c0(n2)|^2 + |c0(n3)|^2 - |c0(n)|^2.
    """
    n = n1 - n2 + n3
    corr = (
        phase.weight(n1) - phase.weight(n2) + phase.weight(n3) - phase.weight(n)
    )
    return float(h_value(n1, n2, n3)) + corr


def g_tilde_value(
    n11: int, n12: int, n13: int, n2: int, n3: int, phase: ModifiedPhase
) -> float:
    """Six-term resonance function of the twice-iterated normal form.

    With n1 = n11 - n12 + n13 and n = n1 - n2 + n3,

    G~ = (n1-n2)(n2-n3)(n1^2+n2^2+n3^2+n^2+2(n1+n3)^2)
       + (n11-n12)(n12-n13)(n11^2+n12^2+n13^2+n1^2+2(n11+n13)^2)
       + |c0(n11)|^2 - |c0(n12)|^2 + |c0(n13)|^2 - |c0(n2)|^2
       + |c0(n3)|^2 - |c0(n)|^2.
    """
    n1 = n11 - n12 + n13
    n = n1 - n2 + n3
    outer = h_factored(n1, n2, n3)
    inner = h_factored(n11, n12, n13)
    corr = (
        phase.weight(n11)
        - phase.weight(n12)
        + phase.weight(n13)
        - phase.weight(n2)
        + phase.weight(n3)
        - phase.weight(n)
    )
    return float(outer + inner) + corr


def normal_form_boundary(u: FourierState, n: int) -> complex:
    """Boundary sum of the normal-form reduction at frequency n:

    sum over non-resonant triples of c(n1) conj(c(n2)) c(n3) conj(c(n)) / (iH).
    """
    if abs(n) > u.n_max:
        raise ValueError(f"|n|={abs(n)} exceeds state n_max={u.n_max}")
    cn = u.mode(n)
    if cn == 0:
        return 0.0 + 0.0j
    total = 0.0 + 0.0j
    for q in enumerate_nonresonant(n, u.n_max):
        assert q.h != 0  # guaranteed off the trivial resonances
        term = u.mode(q.n1) * np.conj(u.mode(q.n2)) * u.mode(q.n3) * np.conj(cn)
        total += term / (1j * q.h)
    return complex(total)


def resonance_table_rows(n_max: int):
    """Yield (n1, n2, n3, n, H, factored_H) over the full box |ni| <= n_max."""
    for n1 in range(-n_max, n_max + 1):
        for n2 in range(-n_max, n_max + 1):
            for n3 in range(-n_max, n_max + 1):
                n = n1 - n2 + n3
                yield n1, n2, n3, n, h_value(n1, n2, n3), h_factored(n1, n2, n3)
