"""Noise thresholds below which Mermin / Svetlichny violations become impossible.

With isotropic unital noise ``eta`` on ``n`` parties every correlation
entry scales by ``eta**n``, so the largest flattening singular value is
``eta**n * lam`` and the Mermin / Svetlichny bounds fall to the local values
2 and 4 at

    eta_M = (1 / (sqrt2 lam))**(1/n),    eta_S = (1 / lam)**(1/n).
"""
from dataclasses import dataclass
import math

import numpy as np

from .bell import correlation_tensor
from .errors import ConsistencyError, DomainError, UnsupportedInputError
from .states import StateSpec, make_state

SQRT2 = math.sqrt(2)
ETA_2IBC = 1 / SQRT2


@dataclass(frozen=True)
class ThresholdReport:
    spec: StateSpec | None
    eta_M: float
    eta_S: float
    lambda_max_unit: float
    n_noised: int = 1
    eta_2ibc: float = ETA_2IBC
    # W family only: thresholds on the k = 1 - b^2 envelope
    eta_M_envelope: float | None = None
    eta_S_envelope: float | None = None

    @property
    def always_breaks_mermin(self):
        """Threshold >= 1: every physical noise level already forbids a Mermin violation."""
        return self.eta_M >= 1.0

    @property
    def always_breaks_svetlichny(self):
        return self.eta_S >= 1.0

    @property
    def always_breaks_flag(self):
        """``MS`` if both thresholds are >= 1, ``S`` if only Svetlichny's, else ``none``."""
        if self.always_breaks_mermin:
            return "MS"
        if self.always_breaks_svetlichny:
            return "S"
        return "none"

    def params(self):
        if self.spec is None:
            return ()
        return tuple(self.spec.params.values())


def _report(spec, lam, n_noised, **extra):
    if lam <= 0.0:
        return ThresholdReport(spec, math.inf, math.inf, lam, n_noised, **extra)
    eta_m = (1.0 / (SQRT2 * lam)) ** (1.0 / n_noised)
    eta_s = (1.0 / lam) ** (1.0 / n_noised)
    return ThresholdReport(spec, eta_m, eta_s, lam, n_noised, **extra)


def closed_form_singular_values(spec):
    """Singular values at eta = 1 from the family's closed form (unsorted).

    Rows of the flattening are mutually orthogonal for every family here, so
    each singular value is a row norm. For W the two x/y rows depend on the
    amplitude ``b`` of party B (the row party) and the z row on ``a`` and ``c``.
    """
    p = spec.params
    if spec.family == "GHZ":
        xy = 2 * SQRT2 * p["a"] * p["b"]
        return (xy, xy, abs(p["a"] ** 2 - p["b"] ** 2))
    if spec.family == "W":
        a, b, c = p["a"], p["b"], p["c"]
        xy = 2 * b * math.sqrt(a * a + c * c)
        return (xy, xy, math.sqrt(1 + 8 * a * a * c * c))
    if spec.family == "MS":
        a, b = p["a"], p["b"]
        xy = math.sqrt(a * a + 2 * b * b)
        return (xy, xy, math.sqrt((1 + a * a - b * b) ** 2 / 4 + (a * b) ** 2))
    if spec.family == "MixedGHZ":
        xy = SQRT2 * p["p"]
        return (xy, xy, 0.0)
    raise UnsupportedInputError(f"no closed form for the {spec.family} family; use numeric_threshold")


def analytic_threshold(spec, n_noised=1):
    """Closed-form thresholds for GHZ, W, MS and MixedGHZ states.

    ``lam`` is the largest closed-form singular value; for GHZ this is
    ``2 sqrt2 a b`` unless the state is close enough to a product state that
    ``|a^2 - b^2|`` dominates. W reports also carry the envelope
    ``sqrt(1 + 2 k^2)`` maximized over the split of ``k = a^2 + c^2``.
    """
    lam = max(closed_form_singular_values(spec))
    extra = {}
    if spec.family == "W":
        k = spec["a"] ** 2 + spec["c"] ** 2
        env = _report(None, math.sqrt(1 + 2 * k * k), n_noised)
        extra = {"eta_M_envelope": env.eta_M, "eta_S_envelope": env.eta_S}
    return _report(spec, lam, n_noised, **extra)


def numeric_threshold(rho, n_noised=1, spec=None):
    if not 1 <= n_noised <= 3:
        raise DomainError("n_noised must be 1, 2 or 3")
    lam = correlation_tensor(rho).singular_values()[0]
    return _report(spec, lam, n_noised)


def anisotropic_singular_values(spec, noise, tol=1e-10):
    """Closed-form singular values under diagonal noise ``(ex, ey, ez)`` on party B.

    Noise on the row party of the flattening scales rows 1..3 by ``ex, ey, ez``,
    so the values stay row norms and depend linearly on the noise. The triple
    is axis-labelled (x, y, z), not sorted, and is checked against the
    numeric singular values of the noised tensor.
    """
    if spec.family not in ("GHZ", "W"):
        raise UnsupportedInputError("anisotropic closed forms exist for GHZ and W only")
    ex, ey, ez = noise.as_tuple() if hasattr(noise, "as_tuple") else noise
    sx, sy, sz = closed_form_singular_values(spec)
    closed = (sx * abs(ex), sy * abs(ey), sz * abs(ez))
    numeric = correlation_tensor(make_state(spec)).scaled((ex, ey, ez), party=1).singular_values()
    if np.max(np.abs(np.sort(closed)[::-1] - np.asarray(numeric))) > tol:
        raise ConsistencyError(f"closed form {closed} disagrees with numeric {numeric}")
    return closed
