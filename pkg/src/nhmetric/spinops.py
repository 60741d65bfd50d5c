"""Kronecker-product construction of spin-chain operators.

Basis convention: site 0 is the leftmost Kronecker factor, spin-up is
(1, 0), and sigma_z = diag(1, -1).
"""

from __future__ import annotations

import numpy as np

SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
# projector onto spin-up; the gain/loss operator of the cluster chain
SIGMA_U = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)

_BY_NAME = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z, "u": SIGMA_U}


def site_operator(N: int, ops: dict[int, str | np.ndarray]) -> np.ndarray:
    """Operator acting with the given single-site factors, identity elsewhere.

    ``ops`` maps site index (0-based, reduced mod N) to a Pauli label
    ("x", "y", "z", "u") or an explicit 2x2 matrix.
    """
    factors = [IDENTITY_2] * N
    for site, op in ops.items():
        mat = _BY_NAME[op] if isinstance(op, str) else np.asarray(op, dtype=complex)
        site = site % N
        factors[site] = factors[site] @ mat
    out = factors[0]
    for f in factors[1:]:
        out = np.kron(out, f)
    return out
