"""Numerical laboratory for the harmonic-oscillator model of light.

Subsystems:

- modes: periodic k-lattice, covariant mode measure, helicity triads
- fock: truncated ladder algebra and multimode occupation states
- fields: radiation pair (A_perp, D), photon wavefunction, evolution
- kernels: propagation kernels and light-cone diagnostics
- response: coherent amplitudes driven by classical currents
- fieldio: field dump format (JSON header + raw little-endian payload)
- experiments: configuration-driven demonstrations with reports
- service / cli: HTTP front end and its command-line client

Submodules load lazily: the command-line entry point must be able to cap
thread pools through PHOTONLAB_THREADS before numpy initializes, so the
package root imports nothing heavy.
"""

from importlib import import_module

__version__ = "0.1.0"

_SUBMODULES = ("modes", "fock", "fields", "kernels", "response", "fieldio",
               "experiments", "service", "cli")


def __getattr__(name: str):
    if name in _SUBMODULES:
        return import_module(f".{name}", __name__)
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")


def __dir__():
    return sorted(set(globals()) | set(_SUBMODULES))
