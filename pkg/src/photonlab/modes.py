"""Discretized k-space, dispersion, covariant measure and polarization bases.

Everything downstream works on a periodic box of side L with n points per
axis, in 1 or 3 spatial dimensions.  Wavevectors follow the standard
discrete-Fourier ordering k = 2*pi*m/L with m = 0, 1, ..., n/2-1, -n/2, ...
The dispersion is omega_k = c|k| and each mode carries the covariant
quadrature weight

    w_k = (dk)^dim / ((2*pi)^dim * omega_k) = 1 / (V * omega_k),

which discretizes the Lorentz-invariant measure d^dim k / ((2*pi)^dim omega).
The k = 0 mode has no transverse content and omega_0 = 0, so it is flagged
and carries weight zero; all physics code forces its amplitude to zero.

Polarization uses k-space spherical polar unit vectors (e_theta, e_phi, e_k)
with a fixed pole convention (see `spherical_unit_vectors`) and helicity
vectors e_lambda = (e_theta + i*lambda*e_phi)/sqrt(2) for lambda = +-1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HELICITIES = (+1, -1)

# orthonormality / transversality tolerance used by basis invariants
BASIS_TOL = 1e-12


@dataclass(frozen=True)
class PhysicalConstants:
    """Simulation constants; defaults are natural units c = eps0 = hbar = 1."""

    c: float = 1.0
    eps0: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and self.eps0 > 0 and self.hbar > 0):
            raise ValueError("physical constants must be strictly positive")

    @property
    def mu0(self) -> float:
        return 1.0 / (self.eps0 * self.c**2)


@dataclass(frozen=True)
class SpacetimePoint:
    """An event (t, x); x has as many components as the grid dimension."""

    t: float
    x: tuple[float, ...]

    def __post_init__(self):
        if not np.isfinite(self.t) or not np.all(np.isfinite(self.x)):
            raise ValueError("spacetime point components must be finite")


def _readonly(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class KGrid:
    """Wavevector lattice with dispersion and covariant weights.

    Arrays are shaped (n,) in 1D and (n, n, n) in 3D; `kvec` gains a leading
    component axis in 3D.  All arrays are read-only; grids are safe to share.
    """

    dim: int
    n_points: int
    box_length: float
    constants: PhysicalConstants
    kvec: np.ndarray          # (n,) in 1D, (3, n, n, n) in 3D
    kmag: np.ndarray          # |k| per lattice point
    omega: np.ndarray         # c|k| per lattice point
    weight: np.ndarray        # covariant weight, 0 at the zero mode
    nonzero: np.ndarray       # boolean mask, False only at k = 0
    zero_mode_index: tuple[int, ...]
    neg: np.ndarray = field(repr=False)  # per-axis index map i -> index of -k

    @property
    def volume(self) -> float:
        return self.box_length**self.dim

    @property
    def spacing(self) -> float:
        """Real-space grid spacing."""
        return self.box_length / self.n_points

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dim

    @property
    def dk(self) -> float:
        return 2.0 * np.pi / self.box_length

    @property
    def n_modes(self) -> int:
        return self.n_points**self.dim

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n_points,) * self.dim

    def axis_coordinates(self) -> np.ndarray:
        """Real-space sample positions along one axis, x_j = j*dx."""
        return np.arange(self.n_points) * self.spacing

    def reverse(self, a: np.ndarray) -> np.ndarray:
        """Map a lattice-indexed array F(k) to F(-k).

        Works on the trailing `dim` axes, so component axes may lead.
        """
        if self.dim == 1:
            return a[..., self.neg]
        return a[..., self.neg[:, None, None], self.neg[None, :, None],
                 self.neg[None, None, :]]


def build_kgrid(dim: int, n_points: int, box_length: float,
                constants: PhysicalConstants | None = None) -> KGrid:
    """Construct the wavevector lattice for a periodic box.

    Parameters
    ----------
    dim : 1 or 3
    n_points : samples per axis, at least 2
    box_length : side length L > 0
    constants : physical constants; natural units when omitted

    Returns
    -------
    KGrid with omega = c|k| and covariant weights zeroed at k = 0.
    """
    if dim not in (1, 3):
        raise ValueError(f"dim must be 1 or 3, got {dim}")
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    if not box_length > 0:
        raise ValueError(f"box_length must be positive, got {box_length}")
    const = constants if constants is not None else PhysicalConstants()

    k1 = 2.0 * np.pi * np.fft.fftfreq(n_points, d=box_length / n_points)
    if dim == 1:
        kvec = k1.copy()
        kmag = np.abs(k1)
    else:
        kx, ky, kz = np.meshgrid(k1, k1, k1, indexing="ij")
        kvec = np.stack([kx, ky, kz])
        kmag = np.sqrt(kx**2 + ky**2 + kz**2)

    omega = const.c * kmag
    nonzero = omega > 0
    dk = 2.0 * np.pi / box_length
    weight = np.zeros_like(omega)
    weight[nonzero] = dk**dim / ((2.0 * np.pi)**dim * omega[nonzero])

    zero_idx = (0,) * dim
    assert not nonzero[zero_idx] and np.count_nonzero(~nonzero) == 1

    neg = (-np.arange(n_points)) % n_points
    return KGrid(dim=dim, n_points=n_points, box_length=float(box_length),
                 constants=const, kvec=_readonly(kvec), kmag=_readonly(kmag),
                 omega=_readonly(omega), weight=_readonly(weight),
                 nonzero=_readonly(nonzero), zero_mode_index=zero_idx,
                 neg=_readonly(neg))


def spherical_unit_vectors(k) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Right-handed spherical triad (e_theta, e_phi, e_k) for one wavevector.

    Follows the ISO convention e_theta = (cos t cos p, cos t sin p, -sin t),
    e_phi = (-sin p, cos p, 0).  On the z-axis the azimuth is degenerate; we
    fix phi = 0 there, so e_theta(+z) = +x, e_theta(-z) = -x, e_phi = +y for
    both poles.

    Raises ValueError at k = 0 where no direction exists.
    """
    k = np.asarray(k, dtype=float)
    kn = np.linalg.norm(k)
    if kn == 0.0:
        raise ValueError("k = 0 has no polarization triad (zero mode)")
    rho = np.hypot(k[0], k[1])
    ct = k[2] / kn
    if rho == 0.0:
        st, cp, sp = 0.0, 1.0, 0.0
    else:
        st, cp, sp = rho / kn, k[0] / rho, k[1] / rho
    e_k = k / kn
    e_theta = np.array([ct * cp, ct * sp, -st])
    e_phi = np.array([-sp, cp, 0.0])
    return e_theta, e_phi, e_k


def helicity_vector(k, lam: int) -> np.ndarray:
    """Helicity polarization vector e_lambda(k) = (e_theta + i lam e_phi)/sqrt 2."""
    if lam not in HELICITIES:
        raise ValueError(f"helicity must be +1 or -1, got {lam}")
    e_theta, e_phi, _ = spherical_unit_vectors(k)
    return (e_theta + 1j * lam * e_phi) / np.sqrt(2.0)


@dataclass(frozen=True, eq=False)
class PolarizationBasis:
    """Spherical triad fields over a 3D k-lattice.

    Component axis leads: arrays have shape (3, n, n, n).  Rows at the zero
    mode are zero (no direction there).  `helicity` materializes e_lambda.
    """

    grid: KGrid
    e_theta: np.ndarray
    e_phi: np.ndarray
    e_k: np.ndarray

    def helicity(self, lam: int) -> np.ndarray:
        if lam not in HELICITIES:
            raise ValueError(f"helicity must be +1 or -1, got {lam}")
        return (self.e_theta + 1j * lam * self.e_phi) / np.sqrt(2.0)


def build_polarization(grid: KGrid) -> PolarizationBasis:
    """Vectorized spherical triads for every nonzero mode of a 3D grid."""
    if grid.dim != 3:
        raise ValueError("polarization basis requires a 3D grid")
    kx, ky, kz = grid.kvec
    kn = grid.kmag
    safe = np.where(grid.nonzero, kn, 1.0)
    rho = np.hypot(kx, ky)
    ct = kz / safe
    on_axis = rho == 0.0
    safe_rho = np.where(on_axis, 1.0, rho)
    # pole convention: phi = 0 on the z-axis
    st = np.where(on_axis, 0.0, rho / safe)
    cp = np.where(on_axis, 1.0, kx / safe_rho)
    sp = np.where(on_axis, 0.0, ky / safe_rho)

    e_k = np.where(grid.nonzero, np.stack([kx, ky, kz]) / safe, 0.0)
    e_theta = np.where(grid.nonzero, np.stack([ct * cp, ct * sp, -st]), 0.0)
    e_phi = np.where(grid.nonzero, np.stack([-sp, cp, np.zeros_like(sp)]), 0.0)
    return PolarizationBasis(grid=grid, e_theta=_readonly(e_theta),
                             e_phi=_readonly(e_phi), e_k=_readonly(e_k))
