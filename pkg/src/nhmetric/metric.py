"""Fidelity and diagonal quantum-metric evaluation by finite differences.

The diagonal metric of state ``n`` with respect to parameter ``mu`` is
obtained from the overlap of the self-normalized right eigenstates at
``mu - d/2`` and ``mu + d/2``:

    g = -2 ln|<psi_n(mu - d/2) | psi_n(mu + d/2)>| / d**2

which equals the fidelity susceptibility.  The symmetric stencil is second
order accurate in ``d``; the step is halved automatically (up to 8 times)
whenever the fidelity drops below 0.5 and the quadratic expansion stops
being trustworthy.

Models are frozen dataclasses exposing ``build() -> ndarray``; the swept
parameter is shifted with :func:`dataclasses.replace`, so any real-valued
field of any model works.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import NotNormalizedError, StepTooLargeWarning
from .linalg import EigenSystem, eig_right, match_states

ALL_STATES = "all"

#: floor applied inside log10 so parameter-independent states (g = 0) stay finite
XI_FLOOR = 1e-300

#: number of times the finite-difference step is halved before giving up
MAX_STEP_HALVINGS = 8


@dataclass(frozen=True)
class MetricValue:
    """Diagonal quantum metric of one eigenstate.

    ``g`` is the metric (fidelity susceptibility), ``xi`` its decadic log,
    and ``fidelity`` the overlap magnitude actually measured at the step
    used.  ``g`` can undershoot zero only at rounding level (~1e-12).
    """

    g: float
    xi: float
    fidelity: float


@dataclass(frozen=True)
class MetricRequest:
    """One metric evaluation: which model, which parameter, which state.

    ``state_index`` counts from 0 in the by-real-part eigenvalue ordering
    (0 = ground state) or is :data:`ALL_STATES` for a whole-spectrum
    request.  ``step`` is the total finite-difference separation d(mu).
    """

    model: Any
    parameter: str
    state_index: int | str = 0
    step: float = 1e-4

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("step must be positive")
        value = getattr(self.model, self.parameter, None)
        if value is None or isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ValueError(
                f"parameter {self.parameter!r} does not name a real-valued "
                f"field of {type(self.model).__name__}"
            )


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """Overlap magnitude |<a|b>| of two normalized states.

    Invariant under independent global phase rotations of either argument.
    Raises :class:`NotNormalizedError` if either norm deviates from 1 by
    more than 1e-10.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    for name, v in (("a", a), ("b", b)):
        nrm = np.linalg.norm(v)
        if abs(nrm - 1.0) > 1e-10:
            raise NotNormalizedError(f"state {name} has norm {nrm!r}, expected 1")
    return float(abs(np.vdot(a, b)))


def _eigensystems_at(req: MetricRequest, step: float) -> tuple[EigenSystem, EigenSystem]:
    mu = getattr(req.model, req.parameter)
    lo = dataclasses.replace(req.model, **{req.parameter: mu - step / 2})
    hi = dataclasses.replace(req.model, **{req.parameter: mu + step / 2})
    return eig_right(lo.build()), eig_right(hi.build())


def _value_from_fidelity(f: float, step: float) -> MetricValue:
    # overlaps exceed 1 only by roundoff (Cauchy-Schwarz); clamp so the
    # 1/step^2 amplification cannot manufacture a negative metric
    f_safe = min(f, 1.0)
    g = float(-2.0 * np.log(f_safe) / step**2) if f_safe > 0.0 else float("inf")
    xi = float(np.log10(max(g, XI_FLOOR)))
    return MetricValue(g=g, xi=xi, fidelity=f)


def metric_diagonal(req: MetricRequest) -> MetricValue:
    """Diagonal metric g_{mu,mu} of a single eigenstate.

    The requested state of the lower-shifted system is paired with the
    best-overlap state of the upper-shifted system, so eigenvalue
    reorderings across the step cannot corrupt the result.
    """
    if req.state_index == ALL_STATES:
        raise ValueError("use metric_spectrum for whole-spectrum requests")
    n = int(req.state_index)

    step = req.step
    for attempt in range(MAX_STEP_HALVINGS + 1):
        lo, hi = _eigensystems_at(req, step)
        if not 0 <= n < lo.dim:
            raise IndexError(f"state_index {n} out of range for dim {lo.dim}")
        row = np.abs(lo.vectors[:, n].conj() @ hi.vectors)
        f = float(np.max(row))
        if f >= 0.5:
            return _value_from_fidelity(f, step)
        if attempt < MAX_STEP_HALVINGS:
            step /= 2
    warnings.warn(
        f"fidelity {f:.3f} still below 0.5 after {MAX_STEP_HALVINGS} step "
        f"halvings (final step {step:g}); finite difference unreliable",
        StepTooLargeWarning,
        stacklevel=2,
    )
    return _value_from_fidelity(f, step)


def metric_spectrum(req: MetricRequest) -> list[MetricValue]:
    """Diagonal metric of every eigenstate from one pair of diagonalizations.

    States of the two shifted systems are paired globally with
    :func:`match_states`; entry ``n`` of the result belongs to the state
    with the ``n``-th smallest real eigenvalue at ``mu - step/2``.
    """
    step = req.step
    attempt = 0
    while True:
        lo, hi = _eigensystems_at(req, step)
        perm = match_states(lo, hi)
        overlaps = np.abs(
            np.einsum("in,in->n", lo.vectors.conj(), hi.vectors[:, perm])
        )
        fmin = float(np.min(overlaps))
        if fmin >= 0.5 or attempt == MAX_STEP_HALVINGS:
            break
        step /= 2
        attempt += 1
    if fmin < 0.5:
        warnings.warn(
            f"minimum fidelity {fmin:.3f} still below 0.5 after "
            f"{MAX_STEP_HALVINGS} step halvings (final step {step:g})",
            StepTooLargeWarning,
            stacklevel=2,
        )
    return [_value_from_fidelity(float(f), step) for f in overlaps]
