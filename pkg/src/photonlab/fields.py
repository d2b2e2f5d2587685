"""Pseudospectral transverse-field engine on a periodic box.

Real-space fields live on the uniform grid x_j = j*dx and are tied to their
spectral representation by the Fourier-series convention

    F(x) = sum_k F~(k) exp(i k.x),        F~(k) = (1/V) int dx F(x) e^{-i k.x},

evaluated with numpy FFTs (F~ = fft(F)/N_total).  The frequency operator
multiplies each mode by omega_k^s = (c|k|)^s, which makes fractional powers
and the inverse exact on the lattice; the k = 0 mode is excluded from all
physics (forced to zero) so negative powers are well defined.

The positive-frequency wavefunction of the radiation pair (A_perp, D) is

    psi = sqrt(eps0/2hbar) Omega^{1/2} [A_perp - i (eps0 Omega)^{-1} D],

diagonal per mode, and the covariant helicity amplitudes associated with a
wavefunction are c_lambda(k) = sqrt(omega_k) V e_lambda(k)* . psi~(k), so
that the k-space pairing sum_lambda sum_k w_k c1* c2 equals the grid
quadrature int dx psi1* . psi2 (Parseval, exact to roundoff).

Time evolution uses exact per-mode free propagators: the (A, D) pair obeys
d/dt A = -D/eps0, d/dt D = eps0 omega^2 A - j~, a harmonic rotation per
mode, while psi obeys i d/dt psi = Omega psi - (2 eps0 hbar Omega)^{-1/2} j~.
Sources are applied with second-order quadratures (see the evolvers).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .modes import (HELICITIES, KGrid, PolarizationBasis, build_polarization)

FIELD_KINDS = ("A_perp", "D", "B", "psi", "j_perp")
REAL_KINDS = ("A_perp", "D", "B", "j_perp")

# spectral transversality criterion |k.F| / (|k||F|) for transverse kinds
TRANSVERSE_TOL = 1e-10


def _axes(grid: KGrid) -> tuple[int, ...]:
    return tuple(range(-grid.dim, 0))


def fft_coefficients(grid: KGrid, f: np.ndarray) -> np.ndarray:
    """Fourier-series coefficients F~(k) of a sampled field."""
    return np.fft.fftn(f, axes=_axes(grid)) / grid.n_modes


def field_from_coefficients(grid: KGrid, fk: np.ndarray) -> np.ndarray:
    """Evaluate sum_k F~(k) e^{ikx} on the grid."""
    return np.fft.ifftn(fk, axes=_axes(grid)) * grid.n_modes


@lru_cache(maxsize=8)
def polarization_for(grid: KGrid) -> PolarizationBasis:
    return build_polarization(grid)


@dataclass(frozen=True, eq=False)
class ModeAmplitudes:
    """Helicity-resolved complex amplitudes over the k-lattice.

    `data` has shape (2, n, n, n) in 3D (helicity +1 first, then -1) and
    (n,) in the 1D scalar analog.  The zero-mode entry is forced to zero at
    construction.  Normalization depends on provenance: plain spectral
    projections carry the field's Fourier coefficients, covariant
    amplitudes carry the extra sqrt(omega) V factor used by the k-space
    scalar product.
    """

    grid: KGrid
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        expect = (2,) + self.grid.shape if self.grid.dim == 3 else self.grid.shape
        if self.data.shape != expect:
            raise ValueError(f"amplitude shape {self.data.shape}, expected {expect}")
        if not np.all(np.isfinite(self.data)):
            raise FloatingPointError("non-finite mode amplitude")
        d = np.array(self.data, dtype=complex)
        d[(Ellipsis,) + self.grid.zero_mode_index] = 0.0
        d.flags.writeable = False
        object.__setattr__(self, "data", d)

    def with_data(self, data: np.ndarray) -> "ModeAmplitudes":
        return ModeAmplitudes(grid=self.grid, data=data)


@dataclass(frozen=True, eq=False)
class FieldSnapshot:
    """One real-space field at one instant.

    Real kinds (A_perp, D, B, j_perp) hold float data; psi is complex.  Data
    is (n,) in 1D and (3, n, n, n) in 3D.
    """

    grid: KGrid
    kind: str
    time: float
    data: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in FIELD_KINDS:
            raise ValueError(f"unknown field kind {self.kind!r}")
        expect = (3,) + self.grid.shape if self.grid.dim == 3 else self.grid.shape
        if self.data.shape != expect:
            raise ValueError(f"field shape {self.data.shape}, expected {expect}")
        if not np.all(np.isfinite(self.data)):
            raise FloatingPointError(f"non-finite values in {self.kind} field")
        if self.kind in REAL_KINDS and np.iscomplexobj(self.data):
            raise ValueError(f"{self.kind} must be real-valued")
        d = self.data.copy()
        d.flags.writeable = False
        object.__setattr__(self, "data", d)

    def spectral(self) -> np.ndarray:
        return fft_coefficients(self.grid, self.data)


def make_snapshot(grid: KGrid, kind: str, data: np.ndarray,
                  time: float = 0.0) -> FieldSnapshot:
    return FieldSnapshot(grid=grid, kind=kind, time=float(time),
                         data=np.asarray(data))


def transversality_defect(grid: KGrid, fk: np.ndarray) -> float:
    """max over modes of |k.F~| / (|k| |F~|), ignoring numerically empty modes."""
    if grid.dim != 3:
        return 0.0
    kdot = np.sum(grid.kvec * fk, axis=0)
    mag = np.sqrt(np.sum(np.abs(fk) ** 2, axis=0))
    scale = grid.kmag * mag
    floor = 1e-14 * np.max(scale) if np.max(scale) > 0 else 1.0
    rel = np.abs(kdot) / np.maximum(scale, floor)
    return float(np.max(np.where(grid.nonzero, rel, 0.0)))


def transverse_project(grid: KGrid, fk: np.ndarray) -> np.ndarray:
    """Apply delta_ij - k_i k_j / |k|^2 per mode; the zero mode maps to 0."""
    if grid.dim != 3:
        raise ValueError("transverse projection requires dim = 3")
    k2 = np.where(grid.nonzero, grid.kmag**2, 1.0)
    kdot = np.sum(grid.kvec * fk, axis=0)
    out = fk - grid.kvec * (kdot / k2)
    return np.where(grid.nonzero, out, 0.0)


def to_helicity(grid: KGrid, fk: np.ndarray) -> ModeAmplitudes:
    """Project a spectral 3-vector field onto the helicity basis.

    Returns the plain components c_lambda(k) = e_lambda(k)* . F~(k); the
    longitudinal part is discarded and the zero mode is empty.
    """
    basis = polarization_for(grid)
    data = np.stack([np.sum(np.conj(basis.helicity(lam)) * fk, axis=0)
                     for lam in HELICITIES])
    return ModeAmplitudes(grid=grid, data=data)


def from_helicity(amps: ModeAmplitudes) -> np.ndarray:
    """Rebuild the transverse spectral 3-vector from helicity components."""
    grid = amps.grid
    if grid.dim != 3:
        raise ValueError("helicity synthesis requires dim = 3")
    basis = polarization_for(grid)
    out = np.zeros((3,) + grid.shape, dtype=complex)
    for i, lam in enumerate(HELICITIES):
        out += amps.data[i][None] * basis.helicity(lam)
    return out


def _omega_pow(grid: KGrid, s: float) -> np.ndarray:
    safe = np.where(grid.nonzero, grid.omega, 1.0)
    return np.where(grid.nonzero, safe**s, 0.0)


def apply_omega_power(obj, s: float):
    """Apply the frequency operator Omega^s = (c|k|)^s mode by mode.

    Accepts ModeAmplitudes, a FieldSnapshot, or a raw real-space array
    (paired with `grid=`).  Real-space input is transformed, scaled and
    transformed back; real input returns real output.  The zero mode maps
    to zero for every s, which keeps negative powers well defined.
    """
    if isinstance(obj, ModeAmplitudes):
        return obj.with_data(obj.data * _omega_pow(obj.grid, s))
    if not isinstance(obj, FieldSnapshot):
        raise TypeError("expected ModeAmplitudes or FieldSnapshot")
    grid = obj.grid
    fk = obj.spectral() * _omega_pow(grid, s)
    out = field_from_coefficients(grid, fk)
    if not np.iscomplexobj(obj.data):
        out = out.real
    return replace(obj, data=out)


def apply_omega_power_array(grid: KGrid, a: np.ndarray, s: float) -> np.ndarray:
    """Omega^s on a raw sampled array; complex output left complex."""
    if not np.all(np.isfinite(a)):
        raise FloatingPointError("non-finite input to frequency operator")
    fk = np.fft.fftn(a, axes=_axes(grid)) * _omega_pow(grid, s)
    out = np.fft.ifftn(fk, axes=_axes(grid))
    return out.real if not np.iscomplexobj(a) else out


# ---------------------------------------------------------------------------
# wavefunction construction and scalar products

def _check_pair(a: FieldSnapshot, b: FieldSnapshot):
    if a.grid is not b.grid:
        raise ValueError("snapshots live on different grids")
    if a.time != b.time:
        raise ValueError(f"snapshot times differ: {a.time} vs {b.time}")


def build_psi(A: FieldSnapshot, D: FieldSnapshot) -> FieldSnapshot:
    """Positive-frequency wavefunction of the radiation pair (A_perp, D).

    psi = sqrt(eps0/2hbar) Omega^{1/2} [A - i (eps0 Omega)^{-1} D], computed
    per mode.  For free data with D = -eps0 dA/dt every mode of psi evolves
    by the pure phase e^{-i omega dt}.
    """
    _check_pair(A, D)
    grid = A.grid
    const = grid.constants
    ak, dk = A.spectral(), D.spectral()
    root = np.sqrt(np.where(grid.nonzero, grid.omega, 1.0))
    pk = np.sqrt(const.eps0 / (2.0 * const.hbar)) * (
        root * ak - 1j * dk / (const.eps0 * root))
    pk = np.where(grid.nonzero, pk, 0.0)
    psi = field_from_coefficients(grid, pk)
    return FieldSnapshot(grid=grid, kind="psi", time=A.time, data=psi)


def amplitudes_from_psi(psi: FieldSnapshot) -> ModeAmplitudes:
    """Covariant helicity amplitudes c_lambda(k) = sqrt(omega) V e_lambda*.psi~."""
    grid = psi.grid
    scale = np.sqrt(np.where(grid.nonzero, grid.omega, 0.0)) * grid.volume
    pk = psi.spectral()
    if grid.dim == 1:
        return ModeAmplitudes(grid=grid, data=scale * pk)
    amp = to_helicity(grid, pk)
    return amp.with_data(amp.data * scale[None])


def psi_from_amplitudes(amps: ModeAmplitudes, time: float = 0.0) -> FieldSnapshot:
    """Inverse of `amplitudes_from_psi`."""
    grid = amps.grid
    root = np.sqrt(np.where(grid.nonzero, grid.omega, 1.0))
    inv = np.where(grid.nonzero, 1.0 / (root * grid.volume), 0.0)
    if grid.dim == 1:
        pk = amps.data * inv
    else:
        pk = from_helicity(amps.with_data(amps.data * inv[None]))
    psi = field_from_coefficients(grid, pk)
    return FieldSnapshot(grid=grid, kind="psi", time=time, data=psi)


def number_density(psi: FieldSnapshot) -> np.ndarray:
    """Pointwise quanta density psi* . psi (real, non-negative)."""
    if psi.kind != "psi":
        raise ValueError("number density is defined for psi snapshots")
    if psi.grid.dim == 1:
        return np.abs(psi.data) ** 2
    return np.sum(np.abs(psi.data) ** 2, axis=0)


def scalar_product_x(psi1: FieldSnapshot, psi2: FieldSnapshot) -> complex:
    """Grid quadrature of int dx psi1* . psi2 (cell-volume rule)."""
    _check_pair(psi1, psi2)
    return complex(psi1.grid.cell_volume * np.sum(np.conj(psi1.data) * psi2.data))


def scalar_product_k(c1: ModeAmplitudes, c2: ModeAmplitudes) -> complex:
    """Covariant k-space pairing sum_lambda sum_k w_k c1* c2."""
    if c1.grid is not c2.grid:
        raise ValueError("amplitudes live on different grids")
    w = c1.grid.weight
    if c1.grid.dim == 3:
        w = w[None]
    return complex(np.sum(w * np.conj(c1.data) * c2.data))


# ---------------------------------------------------------------------------
# energy

def _curl(grid: KGrid, fk: np.ndarray) -> np.ndarray:
    kx, ky, kz = grid.kvec
    return 1j * np.stack([ky * fk[2] - kz * fk[1],
                          kz * fk[0] - kx * fk[2],
                          kx * fk[1] - ky * fk[0]])


def magnetic_field(A: FieldSnapshot) -> FieldSnapshot:
    """B = curl A (3D) or the scalar analog dA/dx (1D), spectrally exact."""
    grid = A.grid
    ak = A.spectral()
    bk = _curl(grid, ak) if grid.dim == 3 else 1j * grid.kvec * ak
    b = field_from_coefficients(grid, bk).real
    return FieldSnapshot(grid=grid, kind="B", time=A.time, data=b)


def em_energy_density(A: FieldSnapshot, D: FieldSnapshot) -> np.ndarray:
    """Transverse-field energy density |D|^2/2eps0 + eps0 c^2 |curl A|^2 / 2."""
    _check_pair(A, D)
    const = A.grid.constants
    B = magnetic_field(A)
    if A.grid.dim == 1:
        d2, b2 = D.data**2, B.data**2
    else:
        d2 = np.sum(D.data**2, axis=0)
        b2 = np.sum(B.data**2, axis=0)
    return d2 / (2.0 * const.eps0) + const.eps0 * const.c**2 * b2 / 2.0


def em_energy(A: FieldSnapshot, D: FieldSnapshot) -> float:
    """Grid quadrature of the transverse-field energy (non-negative)."""
    return float(A.grid.cell_volume * np.sum(em_energy_density(A, D)))


# ---------------------------------------------------------------------------
# classical current sources

@dataclass(frozen=True, eq=False)
class CurrentSource:
    """Prescribed classical transverse current, separable in time and space.

    Stored as a sum of terms env_i(t) * S_i(k) where S_i are fixed spectral
    coefficient arrays (already transverse-projected, zero at k = 0) and
    env_i are real scalar envelopes.  `longitudinal_fraction` records the
    spectral norm fraction removed by the projection of the raw input.
    """

    grid: KGrid
    envelopes: tuple[Callable[[float], float], ...]
    coefficients: tuple[np.ndarray, ...]
    longitudinal_fraction: float = 0.0
    description: str = ""

    @staticmethod
    def null(grid: KGrid) -> "CurrentSource":
        shape = ((3,) + grid.shape) if grid.dim == 3 else grid.shape
        return CurrentSource(grid=grid, envelopes=(),
                             coefficients=(), description="null")

    @staticmethod
    def separable(grid: KGrid, spatial: np.ndarray,
                  temporal: Callable[[float], float],
                  polarization: Sequence[float] | None = None,
                  strict_transverse: bool = False,
                  description: str = "separable") -> "CurrentSource":
        """j(t, x) = temporal(t) * spatial(x) [* polarization vector in 3D].

        A scalar spatial profile in 3D requires `polarization`; the result
        is spectrally projected onto its transverse part.  With
        `strict_transverse` a longitudinal fraction above 1e-10 raises
        instead of being silently projected away.
        """
        spatial = np.asarray(spatial, dtype=float)
        if grid.dim == 3 and spatial.shape == grid.shape:
            if polarization is None:
                raise ValueError("scalar 3D profile needs a polarization vector")
            pol = np.asarray(polarization, dtype=float)
            spatial = pol[:, None, None, None] * spatial[None]
        expect = ((3,) + grid.shape) if grid.dim == 3 else grid.shape
        if spatial.shape != expect:
            raise ValueError(f"spatial profile shape {spatial.shape}, expected {expect}")
        coeff = fft_coefficients(grid, spatial)
        frac = 0.0
        if grid.dim == 3:
            total = float(np.sum(np.abs(coeff) ** 2))
            coeff = transverse_project(grid, coeff)
            kept = float(np.sum(np.abs(coeff) ** 2))
            frac = np.sqrt(max(0.0, total - kept) / total) if total > 0 else 0.0
            if strict_transverse and frac > TRANSVERSE_TOL:
                raise ValueError(
                    f"source is not transverse: longitudinal fraction {frac:.3g}")
        coeff = np.where(grid.nonzero[None] if grid.dim == 3 else grid.nonzero,
                         coeff, 0.0)
        coeff.flags.writeable = False
        return CurrentSource(grid=grid, envelopes=(temporal,),
                             coefficients=(coeff,), longitudinal_fraction=frac,
                             description=description)

    @staticmethod
    def from_polarization_magnetization(
            grid: KGrid, P_spatial: np.ndarray,
            dPdt_envelope: Callable[[float], float],
            M_spatial: np.ndarray | None = None,
            M_envelope: Callable[[float], float] | None = None,
            description: str = "bound") -> "CurrentSource":
        """Bound current j = d/dt P_perp + curl M from separable P and M.

        `dPdt_envelope` must be the time derivative of the polarization
        envelope.  The magnetization term requires dim = 3 (no curl in the
        scalar analog).
        """
        base = CurrentSource.separable(grid, P_spatial, dPdt_envelope,
                                       description=description)
        envs, coeffs = list(base.envelopes), list(base.coefficients)
        if M_spatial is not None:
            if grid.dim != 3:
                raise ValueError("magnetization term requires dim = 3")
            if M_envelope is None:
                raise ValueError("magnetization term needs its envelope")
            mk = fft_coefficients(grid, np.asarray(M_spatial, dtype=float))
            ck = _curl(grid, mk)
            ck = np.where(grid.nonzero[None], ck, 0.0)
            ck.flags.writeable = False
            envs.append(M_envelope)
            coeffs.append(ck)
        return CurrentSource(grid=grid, envelopes=tuple(envs),
                             coefficients=tuple(coeffs),
                             longitudinal_fraction=base.longitudinal_fraction,
                             description=description)

    def spectral(self, t: float) -> np.ndarray:
        """Fourier coefficients j~(k) of the current at time t."""
        shape = ((3,) + self.grid.shape) if self.grid.dim == 3 else self.grid.shape
        out = np.zeros(shape, dtype=complex)
        for env, coeff in zip(self.envelopes, self.coefficients):
            out += env(t) * coeff
        return out

    def snapshot(self, t: float) -> FieldSnapshot:
        j = field_from_coefficients(self.grid, self.spectral(t)).real
        return FieldSnapshot(grid=self.grid, kind="j_perp", time=t, data=j)

    @property
    def is_null(self) -> bool:
        return len(self.envelopes) == 0


# ---------------------------------------------------------------------------
# time evolution

class MaxwellTrajectory:
    """Sampled (A, D) history; spectral internally, materialized on demand."""

    def __init__(self, grid: KGrid, times, ak_list, dk_list):
        self.grid = grid
        self.times = np.asarray(times)
        self._ak = ak_list
        self._dk = dk_list

    def __len__(self):
        return len(self.times)

    def A(self, i: int) -> FieldSnapshot:
        data = field_from_coefficients(self.grid, self._ak[i]).real
        return FieldSnapshot(self.grid, "A_perp", float(self.times[i]), data)

    def D(self, i: int) -> FieldSnapshot:
        data = field_from_coefficients(self.grid, self._dk[i]).real
        return FieldSnapshot(self.grid, "D", float(self.times[i]), data)

    def reality_residual(self, i: int) -> float:
        """max |Im| / max |field| after the inverse transform, both fields."""
        worst = 0.0
        for coeff in (self._ak[i], self._dk[i]):
            f = field_from_coefficients(self.grid, coeff)
            scale = np.max(np.abs(f))
            if scale > 0:
                worst = max(worst, float(np.max(np.abs(f.imag)) / scale))
        return worst

    def final(self) -> tuple[FieldSnapshot, FieldSnapshot]:
        return self.A(len(self) - 1), self.D(len(self) - 1)


class PsiTrajectory:
    """Sampled wavefunction history."""

    def __init__(self, grid: KGrid, times, pk_list):
        self.grid = grid
        self.times = np.asarray(times)
        self._pk = pk_list

    def __len__(self):
        return len(self.times)

    def psi(self, i: int) -> FieldSnapshot:
        data = field_from_coefficients(self.grid, self._pk[i])
        return FieldSnapshot(self.grid, "psi", float(self.times[i]), data)

    def final(self) -> FieldSnapshot:
        return self.psi(len(self) - 1)


def _ingest(grid: KGrid, snap: FieldSnapshot) -> np.ndarray:
    fk = snap.spectral()
    mask = grid.nonzero[None] if grid.dim == 3 else grid.nonzero
    fk = np.where(mask, fk, 0.0)
    if grid.dim == 3 and snap.kind in ("A_perp", "D"):
        defect = transversality_defect(grid, fk)
        if defect > TRANSVERSE_TOL:
            raise ValueError(f"{snap.kind} is not transverse: defect {defect:.3g}")
    return fk


def evolve_maxwell(A: FieldSnapshot, D: FieldSnapshot, source: CurrentSource,
                   dt: float, steps: int, store_every: int = 1) -> MaxwellTrajectory:
    """Advance the sourced radiation pair with exact free rotations.

    Each step applies the exact per-mode rotation of the harmonic pair
    (A rotates into -D/eps0 and D into eps0 omega^2 A) and adds the current
    kick dt * U(dt/2) j~(t + dt/2): the midpoint sample carried through half
    a rotation, a second-order quadrature that leaves free motion exact.
    """
    if dt <= 0 or steps < 1:
        raise ValueError("dt must be positive and steps >= 1")
    _check_pair(A, D)
    grid = A.grid
    const = grid.constants
    ak, dk = _ingest(grid, A), _ingest(grid, D)
    omega = np.where(grid.nonzero, grid.omega, 1.0)
    if grid.dim == 3:
        omega = omega[None]
    cs, sn = np.cos(omega * dt), np.sin(omega * dt)
    csh, snh = np.cos(omega * dt / 2.0), np.sin(omega * dt / 2.0)
    e0 = const.eps0

    times = [A.time]
    ak_hist, dk_hist = [ak], [dk]
    t = A.time
    for step in range(1, steps + 1):
        a_new = ak * cs - dk * sn / (e0 * omega)
        d_new = e0 * omega * ak * sn + dk * cs
        if not source.is_null:
            jk = source.spectral(t + dt / 2.0)
            a_new = a_new + dt * jk * snh / (e0 * omega)
            d_new = d_new - dt * jk * csh
        ak, dk = a_new, d_new
        t = A.time + step * dt
        if step % store_every == 0 or step == steps:
            if not np.all(np.isfinite(ak)):
                raise FloatingPointError(f"field blow-up at step {step}")
            times.append(t)
            ak_hist.append(ak)
            dk_hist.append(dk)
    return MaxwellTrajectory(grid, times, ak_hist, dk_hist)


def evolve_se(psi: FieldSnapshot, source: CurrentSource, dt: float,
              steps: int, store_every: int = 1) -> PsiTrajectory:
    """Advance the wavefunction with exact phases and a trapezoidal source.

    Free motion multiplies each mode by e^{-i omega dt} exactly.  The
    current enters through g(t) = i (2 eps0 hbar omega)^{-1/2} j~(t) and is
    accumulated by the endpoint average (dt/2)[e^{-i omega dt} g(t) +
    g(t+dt)], again second order in dt.
    """
    if dt <= 0 or steps < 1:
        raise ValueError("dt must be positive and steps >= 1")
    grid = psi.grid
    const = grid.constants
    pk = _ingest(grid, psi)
    omega = np.where(grid.nonzero, grid.omega, 1.0)
    mask = grid.nonzero
    if grid.dim == 3:
        omega, mask = omega[None], mask[None]
    phase = np.where(mask, np.exp(-1j * omega * dt), 0.0)
    coef = np.where(mask, 1j / np.sqrt(2.0 * const.eps0 * const.hbar * omega), 0.0)

    def g(tt: float) -> np.ndarray:
        return coef * source.spectral(tt)

    times = [psi.time]
    hist = [pk]
    t = psi.time
    for step in range(1, steps + 1):
        if source.is_null:
            pk = phase * pk
        else:
            pk = phase * pk + 0.5 * dt * (phase * g(t) + g(t + dt))
        t = psi.time + step * dt
        if step % store_every == 0 or step == steps:
            if not np.all(np.isfinite(pk)):
                raise FloatingPointError(f"wavefunction blow-up at step {step}")
            times.append(t)
            hist.append(pk)
    return PsiTrajectory(grid, times, hist)


# ---------------------------------------------------------------------------
# vacuum commutator pairing

def _real_pair_from_amplitudes(c: ModeAmplitudes):
    """Materialize the real (A, D) pair whose covariant content is c.

    A(x) = sqrt(hbar/eps0) sum_k w_k c_lambda(k) e_lambda e^{ikx} + c.c. and
    D = i eps0 omega on the positive part, mirrored to keep D real.
    """
    grid = c.grid
    const = grid.constants
    if grid.dim == 1:
        apos = np.sqrt(const.hbar / const.eps0) * grid.weight * c.data
        dpos = 1j * const.eps0 * grid.omega * apos
    else:
        scaled = c.with_data(c.data * grid.weight[None])
        apos = np.sqrt(const.hbar / const.eps0) * from_helicity(scaled)
        dpos = 1j * const.eps0 * grid.omega[None] * apos
    A = 2.0 * field_from_coefficients(grid, apos).real
    D = 2.0 * field_from_coefficients(grid, dpos).real
    return A, D


def ad_commutator_expectation(c1: ModeAmplitudes, c2: ModeAmplitudes) -> float:
    """Vacuum pairing of two field configurations through the (A, D) operators.

    Materializes the real pairs (A_i, D_i) generated by the amplitude sets,
    then evaluates the grid quadrature

        (1/4hbar) int dx [eps0 (O^(1/2)A1).(O^(1/2)A2)
                          + (1/eps0) (O^(-1/2)D1).(O^(-1/2)D2)],

    with O the frequency operator applied spectrally to the real fields.
    The normalization is fixed so the result equals the real part of the
    covariant k-space product of c1 with c2; this route never touches the
    amplitude pairing directly, making it an independent consistency check.
    """
    if c1.grid is not c2.grid:
        raise ValueError("amplitudes live on different grids")
    grid = c1.grid
    const = grid.constants
    a1, d1 = _real_pair_from_amplitudes(c1)
    a2, d2 = _real_pair_from_amplitudes(c2)
    ha1 = apply_omega_power_array(grid, a1, 0.5)
    ha2 = apply_omega_power_array(grid, a2, 0.5)
    hd1 = apply_omega_power_array(grid, d1, -0.5)
    hd2 = apply_omega_power_array(grid, d2, -0.5)
    if grid.dim == 3:
        aa = np.sum(ha1 * ha2, axis=0)
        dd = np.sum(hd1 * hd2, axis=0)
    else:
        aa, dd = ha1 * ha2, hd1 * hd2
    integral = grid.cell_volume * np.sum(const.eps0 * aa + dd / const.eps0)
    return float(integral / (4.0 * const.hbar))
