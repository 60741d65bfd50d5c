"""Full exact diagonalization of the non-Hermitian mixed-field Ising chain.

H = -J sum sigma^z_l sigma^z_{l+1} + h_x sum sigma^x_l + i h_z sum sigma^z_l

The transverse field h_x is real, the longitudinal field i h_z purely
imaginary, so the chain is non-integrable and PT-symmetric-like: the
ground energy stays real in the paramagnetic region and acquires an
imaginary part in the ferromagnetic one.  N <= 12 keeps the dense 2^N
matrix tractable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGroundStateWarning
from .linalg import EigenSystem, eig_right

PBC = "pbc"
OBC = "obc"


@dataclass(frozen=True)
class MixedSpec:
    """Mixed-field chain parameters in units of J."""

    N: int = 10
    J: float = 1.0
    h_x: float = 0.0
    h_z: float = 0.0
    bc: str = PBC

    def __post_init__(self):
        if not 2 <= self.N <= 12:
            raise ValueError("N must lie in [2, 12] for dense diagonalization")
        if self.bc not in (PBC, OBC):
            raise ValueError(f"bc must be '{PBC}' or '{OBC}', got {self.bc!r}")

    def build(self) -> np.ndarray:
        return build_mixed(self)


def _site_signs(N: int) -> np.ndarray:
    """sigma^z eigenvalues per basis state and site, shape (2^N, N).

    Site 0 is the leftmost Kronecker factor, i.e. the most significant bit.
    """
    basis = np.arange(2**N)
    bits = (basis[:, None] >> np.arange(N - 1, -1, -1)[None, :]) & 1
    return 1.0 - 2.0 * bits


def build_mixed(spec: MixedSpec) -> np.ndarray:
    """Dense 2^N x 2^N Hamiltonian (real-valued when h_z = 0).

    The zz bond sum wraps around under periodic boundaries and stops at
    l = N - 1 under open ones; the field sums always run over all sites.
    """
    N = spec.N
    dim = 2**N
    s = _site_signs(N)

    bonds = [(l, (l + 1) % N) for l in range(N if spec.bc == PBC else N - 1)]
    zz = np.zeros(dim)
    for a, b in bonds:
        zz += s[:, a] * s[:, b]
    sz_total = s.sum(axis=1)

    if spec.h_z == 0.0:
        H = np.zeros((dim, dim), dtype=float)
        np.fill_diagonal(H, -spec.J * zz)
    else:
        H = np.zeros((dim, dim), dtype=complex)
        np.fill_diagonal(H, -spec.J * zz + 1j * spec.h_z * sz_total)

    if spec.h_x != 0.0:
        cols = np.arange(dim)
        for l in range(N):
            flipped = cols ^ (1 << (N - 1 - l))
            H[flipped, cols] += spec.h_x
    return H


def ground_state(H: np.ndarray) -> tuple[complex, np.ndarray]:
    """State of minimum real eigenvalue (ties broken by imaginary part).

    Warns :class:`DegenerateGroundStateWarning` when the two smallest real
    parts coincide, which happens on the h_x = 0 axis where 'minimum real
    eigenvalue' no longer identifies a single state.
    """
    system: EigenSystem = eig_right(H)
    w = system.eigenvalues
    if len(w) > 1 and abs(w[1].real - w[0].real) < 1e-10:
        warnings.warn(
            "ground state is degenerate in its real eigenvalue; state "
            "selection is ambiguous",
            DegenerateGroundStateWarning,
            stacklevel=2,
        )
    return complex(w[0]), system.vectors[:, 0]


def magnetization(psi: np.ndarray, N: int) -> complex:
    """Right-state magnetization M_z = <psi| sum_l sigma^z_l |psi> / N.

    Kept complex for uniformity with other right-state expectations even
    though sigma^z is diagonal, which makes this particular one real.
    Consumers plot |M_z|.
    """
    psi = np.asarray(psi)
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise ValueError("psi must be normalized")
    if len(psi) != 2**N:
        raise ValueError(f"psi has length {len(psi)}, expected 2**{N}")
    sz_total = _site_signs(N).sum(axis=1)
    return complex(np.sum(np.abs(psi) ** 2 * sz_total) / N)
