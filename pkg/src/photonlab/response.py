"""Coherent-state response of the field to a prescribed classical current.

A classical transverse current drives every radiation mode into a coherent
state.  The covariant amplitude accumulated over a drive window [0, t_f] is

    alpha_lambda(k) = (i / (2 sqrt(eps0 hbar)))
                      int_0^{t_f} dt int dx  e_lambda(k)* . j_perp(t, x)
                                             e^{+i(omega_k t - k.x)},

with the spatial integral evaluated by grid quadrature (it equals V times
the Fourier coefficient of j) and the time integral by composite midpoint.
The prefactor is fixed by an internal consistency requirement rather than
taken on faith: the coherent expectation field rebuilt from alpha,

    <A>(t, x) = sqrt(hbar/eps0) sum_k w_k alpha_lambda(k) e_lambda(k)
                e^{-i(omega t - k.x)}  + c.c.,

must reproduce the classical retarded solution of the driven wave equation
for the same current, which pins the constant uniquely (the cross-check
against the exact-rotation integrator lives in the test suite).

Per-mode photon statistics are Poissonian.  The covariant amplitude maps to
the plain per-mode amplitude through sqrt(w_k) = 1/sqrt(V omega_k), and it
is the plain amplitude whose squared modulus is the mean occupation of that
lattice mode.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import (ModeAmplitudes, FieldSnapshot, CurrentSource,
                     field_from_coefficients, from_helicity, to_helicity,
                     transversality_defect, TRANSVERSE_TOL)
from .fock import ModeId
from .modes import HELICITIES, KGrid


@dataclass(frozen=True, eq=False)
class CoherentAmplitudes:
    """Covariant coherent amplitudes alpha_lambda(k) with drive provenance.

    Layout matches ModeAmplitudes: (2, n, n, n) in 3D (helicity +1 first),
    (n,) in the 1D scalar analog.  The zero mode is empty.
    """

    grid: KGrid
    data: np.ndarray = field(repr=False)
    source_description: str = ""
    t_window: tuple[float, float] = (0.0, 0.0)
    quadrature_dt: float = 0.0

    def __post_init__(self):
        expect = (2,) + self.grid.shape if self.grid.dim == 3 else self.grid.shape
        if self.data.shape != expect:
            raise ValueError(f"amplitude shape {self.data.shape}, expected {expect}")
        if not np.all(np.isfinite(self.data)):
            raise FloatingPointError("non-finite coherent amplitude")
        d = np.array(self.data, dtype=complex)
        d[(Ellipsis,) + self.grid.zero_mode_index] = 0.0
        d.flags.writeable = False
        object.__setattr__(self, "data", d)

    def as_mode_amplitudes(self) -> ModeAmplitudes:
        return ModeAmplitudes(grid=self.grid, data=self.data)

    def plain_amplitude(self, mode: ModeId) -> complex:
        """Per-mode amplitude sqrt(w_k) alpha_lambda(k); |.|^2 is the mean
        occupation of the lattice mode.  The helicity label is ignored in
        the 1D scalar analog."""
        if self.grid.dim == 1:
            idx = mode.k_index
            if not isinstance(idx, int):
                raise ValueError("1D mode index must be an int")
            alpha = self.data[idx]
            w = self.grid.weight[idx]
        else:
            row = HELICITIES.index(mode.helicity)
            idx = mode.k_index
            if not (isinstance(idx, tuple) and len(idx) == 3):
                raise ValueError("3D mode index must be a 3-tuple")
            alpha = self.data[(row,) + idx]
            w = self.grid.weight[idx]
        return complex(np.sqrt(w) * alpha)


def alpha_from_current(source: CurrentSource, grid: KGrid, t_final: float,
                       quadrature_dt: float) -> CoherentAmplitudes:
    """Accumulate coherent amplitudes from a separable current drive.

    Composite-midpoint time quadrature with step `quadrature_dt`, which
    must divide `t_final`; second order in the step.  Raises if the source
    retains a longitudinal component after projection (it cannot, short of
    corrupted coefficients, but the contract is checked).
    """
    if source.grid is not grid:
        raise ValueError("source lives on a different grid")
    if not t_final > 0:
        raise ValueError("t_final must be positive")
    n_steps = int(round(t_final / quadrature_dt))
    if n_steps < 1 or abs(n_steps * quadrature_dt - t_final) > 1e-9 * t_final:
        raise ValueError("quadrature_dt must divide t_final")
    if grid.dim == 3:
        for coeff in source.coefficients:
            if transversality_defect(grid, coeff) > TRANSVERSE_TOL:
                raise ValueError("source is not transverse after projection")

    const = grid.constants
    omega = grid.omega
    # midpoint nodes via phase recurrence: exp(i omega t) advanced per node
    rot = np.exp(1j * omega * quadrature_dt)
    shape = ((2,) + grid.shape) if grid.dim == 3 else grid.shape
    out = np.zeros(shape, dtype=complex)
    for env, coeff in zip(source.envelopes, source.coefficients):
        tint = np.zeros_like(omega, dtype=complex)
        cur = np.exp(1j * omega * (quadrature_dt / 2.0))
        for m in range(n_steps):
            tint += env((m + 0.5) * quadrature_dt) * cur
            cur = cur * rot
        tint *= quadrature_dt
        # spatial integral: int dx j e^{-ikx} = V * Fourier coefficient
        if grid.dim == 1:
            out += tint * grid.volume * coeff
        else:
            ch = to_helicity(grid, coeff)
            out += tint[None] * grid.volume * ch.data
    out *= 1j / (2.0 * np.sqrt(const.eps0 * const.hbar))
    mask = grid.nonzero[None] if grid.dim == 3 else grid.nonzero
    out = np.where(mask, out, 0.0)
    return CoherentAmplitudes(grid=grid, data=out,
                              source_description=source.description,
                              t_window=(0.0, float(t_final)),
                              quadrature_dt=float(quadrature_dt))


def _expectation_complex(alphas: CoherentAmplitudes, t: float) -> np.ndarray:
    """Synthesized expectation field before the imaginary part is dropped."""
    grid = alphas.grid
    const = grid.constants
    phase = np.exp(-1j * grid.omega * t)
    if grid.dim == 1:
        pos = np.sqrt(const.hbar / const.eps0) * grid.weight * alphas.data * phase
    else:
        scaled = alphas.data * (grid.weight * phase)[None]
        pos = np.sqrt(const.hbar / const.eps0) * from_helicity(
            ModeAmplitudes(grid=grid, data=scaled))
    G = pos + np.conj(grid.reverse(pos))
    return field_from_coefficients(grid, G)


def expectation_reality_residual(alphas: CoherentAmplitudes, t: float) -> float:
    """Largest imaginary component of the synthesized expectation field,
    relative to the field scale; zero for an exactly real synthesis."""
    A = _expectation_complex(alphas, t)
    scale = float(np.max(np.abs(A)))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(A.imag)) / scale)


def field_expectation(alphas: CoherentAmplitudes, t: float) -> FieldSnapshot:
    """Real expectation value of the potential in the coherent state.

    <A>(t,x) = sqrt(hbar/eps0) sum_k w_k alpha e_lambda e^{-i(omega t - k.x)}
    plus its complex conjugate; the conjugate part is synthesized from the
    k -> -k flip so a single inverse transform yields the real field.  The
    imaginary residue after the transform must stay below 1e-12 of the
    field scale.
    """
    grid = alphas.grid
    A = _expectation_complex(alphas, t)
    scale = float(np.max(np.abs(A)))
    if scale > 0 and float(np.max(np.abs(A.imag))) > 1e-12 * scale:
        raise FloatingPointError("expectation field failed the reality contract")
    return FieldSnapshot(grid=grid, kind="A_perp", time=float(t), data=A.real)


def photon_count_distribution(alphas: CoherentAmplitudes, mode: ModeId,
                              n_max: int | None = None) -> np.ndarray:
    """Poisson counting distribution P(n) = e^{-|a|^2} |a|^{2n} / n!.

    `a` is the plain per-mode amplitude of the requested lattice mode; the
    default truncation follows n_max >= 4|a|^2 + 20 so the tail mass is
    negligible and the distribution sums to 1 within 1e-10.
    """
    a = alphas.plain_amplitude(mode)
    mean = abs(a) ** 2
    if n_max is None:
        n_max = int(np.ceil(4.0 * mean + 20.0))
    if n_max < 4.0 * mean + 20.0:
        raise ValueError(f"n_max={n_max} too small for |alpha|^2={mean:.3g}")
    p = np.zeros(n_max + 1)
    p[0] = np.exp(-mean)
    for n in range(1, n_max + 1):
        p[n] = p[n - 1] * mean / n
    return p
