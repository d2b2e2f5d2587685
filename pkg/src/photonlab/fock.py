"""Truncated Fock space over a finite set of (helicity, k) modes.

States are dense complex tensors with one axis per mode, each of length
n_max + 1, so a state over M modes stores (n_max+1)^M amplitudes.  Mode
axes follow the lexicographic order of (lambda, k_index), which fixes the
tensor layout deterministically.

The single-mode annihilation matrix has a[n-1, n] = sqrt(n) and the raising
operator is its conjugate transpose.  On the truncated space a*adag - adag*a
is the identity except for the (n_max, n_max) entry, which equals -n_max;
raising the top level annihilates it and the lost probability mass is
recorded on the returned state as `truncation_loss`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True, order=True)
class ModeId:
    """Label (helicity, k-lattice index) for one radiation mode.

    `k_index` is a flat index in 1D or an index tuple in 3D.  The zero mode
    carries no transverse excitations and is rejected.
    """

    helicity: int
    k_index: int | tuple[int, ...]

    def __post_init__(self):
        if self.helicity not in (+1, -1):
            raise ValueError(f"helicity must be +1 or -1, got {self.helicity}")
        idx = self.k_index if isinstance(self.k_index, tuple) else (self.k_index,)
        if all(i == 0 for i in idx):
            raise ValueError("k_index is the zero mode; it carries no photons")


@dataclass(frozen=True, eq=False)
class FockState:
    """Immutable amplitude tensor over occupation tuples.

    `truncation_loss` accumulates probability mass removed by the n_max
    cutoff (by ladder_raise at the top level, or by the truncated coherent
    series); it is metadata, not part of the vector.
    """

    modes: tuple[ModeId, ...]
    n_max: int
    amplitudes: np.ndarray = field(repr=False)
    truncation_loss: float = 0.0

    def __post_init__(self):
        expected = (self.n_max + 1,) * len(self.modes)
        if self.amplitudes.shape != expected:
            raise ValueError(
                f"amplitude tensor shape {self.amplitudes.shape} does not "
                f"match {len(self.modes)} modes at n_max={self.n_max}")
        if list(self.modes) != sorted(self.modes):
            raise ValueError("modes must be in lexicographic order")

    def norm_squared(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))

    def norm(self) -> float:
        return float(np.sqrt(self.norm_squared()))

    def normalize(self) -> "FockState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero vector")
        return replace(self, amplitudes=self.amplitudes / n)

    def mode_axis(self, mode: ModeId) -> int:
        try:
            return self.modes.index(mode)
        except ValueError:
            raise ValueError(f"mode {mode} not in state") from None


def annihilation_matrix(n_max: int) -> np.ndarray:
    """Ladder matrix a with a[n-1, n] = sqrt(n); a.conj().T raises."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    n = np.arange(1, n_max + 1, dtype=float)
    return np.diag(np.sqrt(n), k=1)


def _apply_matrix(state: FockState, mode: ModeId, m: np.ndarray) -> np.ndarray:
    ax = state.mode_axis(mode)
    out = np.tensordot(m, state.amplitudes, axes=([1], [ax]))
    return np.moveaxis(out, 0, ax)


def ladder_lower(state: FockState, mode: ModeId) -> FockState:
    """Apply the annihilation operator on one mode; result may be zero."""
    a = annihilation_matrix(state.n_max)
    return replace(state, amplitudes=_apply_matrix(state, mode, a))


def ladder_raise(state: FockState, mode: ModeId) -> FockState:
    """Apply the creation operator; the n_max level is annihilated.

    Probability mass held at n = n_max before the raise is lost to the
    truncation and added to `truncation_loss` on the result.
    """
    adag = annihilation_matrix(state.n_max).conj().T
    ax = state.mode_axis(mode)
    top = np.take(state.amplitudes, state.n_max, axis=ax)
    lost = float(np.sum(np.abs(top) ** 2))
    return replace(state, amplitudes=_apply_matrix(state, mode, adag),
                   truncation_loss=state.truncation_loss + lost)


def _sorted_modes(modes, payload):
    order = sorted(range(len(modes)), key=lambda i: modes[i])
    return tuple(modes[i] for i in order), [payload[i] for i in order], order


def number_state(modes, occupations, n_max: int) -> FockState:
    """Unit-norm basis state |n_1 ... n_M> over the given modes."""
    modes = list(modes)
    occupations = list(occupations)
    if len(modes) != len(occupations):
        raise ValueError("one occupation per mode required")
    if len(set(modes)) != len(modes):
        raise ValueError("duplicate modes")
    for n in occupations:
        if not (0 <= n <= n_max):
            raise ValueError(f"occupation {n} outside [0, n_max={n_max}]")
    smodes, soccs, _ = _sorted_modes(modes, occupations)
    amps = np.zeros((n_max + 1,) * len(smodes), dtype=complex)
    amps[tuple(soccs)] = 1.0
    return FockState(modes=smodes, n_max=n_max, amplitudes=amps)


def vacuum_state(modes, n_max: int) -> FockState:
    return number_state(modes, [0] * len(list(modes)), n_max)


def coherent_state(mode: ModeId, alpha: complex, n_max: int) -> FockState:
    """Single-mode coherent state truncated at n_max.

    Amplitudes are exp(-|alpha|^2/2) alpha^n / sqrt(n!); the norm deficit
    1 - sum P(n) from the cutoff is reported as `truncation_loss`.
    """
    if abs(alpha) ** 2 > n_max / 4:
        warnings.warn(
            f"|alpha|^2 = {abs(alpha)**2:.3g} exceeds n_max/4 = {n_max/4:.3g}; "
            "truncation unreliable", stacklevel=2)
    amps = np.zeros(n_max + 1, dtype=complex)
    amps[0] = np.exp(-0.5 * abs(alpha) ** 2)
    for n in range(1, n_max + 1):
        amps[n] = amps[n - 1] * alpha / np.sqrt(n)
    deficit = max(0.0, 1.0 - float(np.sum(np.abs(amps) ** 2)))
    return FockState(modes=(mode,), n_max=n_max, amplitudes=amps,
                     truncation_loss=deficit)


def tensor_product(s1: FockState, s2: FockState) -> FockState:
    """Product state over the union of two disjoint mode sets."""
    if s1.n_max != s2.n_max:
        raise ValueError("truncation levels differ")
    if set(s1.modes) & set(s2.modes):
        raise ValueError("mode sets overlap")
    modes = list(s1.modes) + list(s2.modes)
    amps = np.multiply.outer(s1.amplitudes, s2.amplitudes)
    smodes, _, order = _sorted_modes(modes, list(range(len(modes))))
    amps = np.transpose(amps, axes=[modes.index(m) for m in smodes])
    loss = 1.0 - (1.0 - s1.truncation_loss) * (1.0 - s2.truncation_loss)
    return FockState(modes=smodes, n_max=s1.n_max, amplitudes=amps,
                     truncation_loss=loss)


def commutator_defect(n_max: int) -> np.ndarray:
    """a adag - adag a on the truncated space.

    Equals the identity except entry (n_max, n_max) = -n_max; the defect is
    the price of the cutoff and is exactly diagonal.
    """
    a = annihilation_matrix(n_max)
    adag = a.conj().T
    return a @ adag - adag @ a


def inner_product(s1: FockState, s2: FockState) -> complex:
    """Hilbert pairing <s1|s2>, conjugate-linear in the first argument."""
    if s1.modes != s2.modes or s1.n_max != s2.n_max:
        raise ValueError("states live on different mode bases")
    return complex(np.vdot(s1.amplitudes, s2.amplitudes))


def number_expectation(state: FockState, mode: ModeId) -> float:
    """<adag_m a_m> = squared norm of the lowered state."""
    return ladder_lower(state, mode).norm_squared()


def coincidence_probability(state: FockState, mode1: ModeId,
                            mode2: ModeId) -> float:
    """Two-detector coincidence rate <adag1 adag2 a2 a1>.

    Evaluated as the squared norm of a2 a1 |state>, which is manifestly
    non-negative.  A one-photon state split over the two modes gives zero:
    both annihilations cannot fire on a single quantum.
    """
    if mode1 == mode2:
        raise ValueError("coincidence requires two distinct modes")
    lowered = ladder_lower(ladder_lower(state, mode1), mode2)
    return lowered.norm_squared()
