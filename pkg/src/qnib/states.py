"""Three-qubit state families and the random canonical-form sampler.

Qubit order is big-endian: party A is the leftmost tensor factor and the
basis label ``|abc>`` has index ``4a + 2b + c``. Parties are addressed by
0-based index (A=0, B=1, C=2).
"""
from dataclasses import dataclass, field
import math

import numpy as np

from .errors import DomainError, SpecValidationError
from .qmat import hermitian_eigenvalues, is_hermitian

NORM_TOL = 1e-12

# parameter names per family, in canonical order
FAMILY_PARAMS = {
    "GHZ": ("a", "b"),
    "W": ("a", "b", "c"),
    "MS": ("a", "b"),
    "MixedGHZ": ("p",),
    "Acin": ("l0", "l1", "l2", "l3", "l4", "phi"),
}

_ALIASES = {
    "ghz": "GHZ",
    "w": "W",
    "ms": "MS",
    "mixedghz": "MixedGHZ",
    "mixed_ghz": "MixedGHZ",
    "acin": "Acin",
}


@dataclass(frozen=True)
class StateSpec:
    """A named state family plus its real parameters.

    GHZ and MS take amplitudes ``a, b``; W takes ``a, b, c``; MixedGHZ takes
    the mixing weight ``p``; Acin takes ``l0..l4`` and the phase ``phi``.
    """

    family: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        fam = _ALIASES.get(self.family.lower(), self.family)
        if fam not in FAMILY_PARAMS:
            raise SpecValidationError(f"unknown state family {self.family!r}")
        object.__setattr__(self, "family", fam)
        names = FAMILY_PARAMS[fam]
        missing = [n for n in names if n not in self.params]
        extra = [n for n in self.params if n not in names]
        if missing or extra:
            raise SpecValidationError(
                f"{fam} expects parameters {', '.join(names)}; "
                f"missing={missing} unexpected={extra}")
        object.__setattr__(self, "params", {n: float(self.params[n]) for n in names})
        self.validate()

    def __getitem__(self, name):
        return self.params[name]

    def __hash__(self):
        return hash((self.family, tuple(self.params.items())))

    def validate(self):
        p = self.params
        if self.family in ("GHZ", "MS"):
            s = p["a"] ** 2 + p["b"] ** 2
            if abs(s - 1.0) > NORM_TOL:
                raise SpecValidationError(f"{self.family}: a^2 + b^2 = {s!r} != 1")
        elif self.family == "W":
            s = p["a"] ** 2 + p["b"] ** 2 + p["c"] ** 2
            if abs(s - 1.0) > NORM_TOL:
                raise SpecValidationError(f"W: a^2 + b^2 + c^2 = {s!r} != 1")
        elif self.family == "MixedGHZ":
            if not 0.0 <= p["p"] <= 1.0:
                raise SpecValidationError(f"MixedGHZ: p = {p['p']!r} outside [0, 1]")
        else:
            lams = [p[f"l{i}"] for i in range(5)]
            if min(lams) < 0.0:
                raise SpecValidationError("Acin: every l_i must be >= 0")
            s = sum(x * x for x in lams)
            if abs(s - 1.0) > NORM_TOL:
                raise SpecValidationError(f"Acin: sum l_i^2 = {s!r} != 1")
            if not 0.0 <= p["phi"] < math.pi:
                raise SpecValidationError(f"Acin: phi = {p['phi']!r} outside [0, pi)")

    def to_text(self):
        body = ",".join(f"{k}={v!r}" for k, v in self.params.items())
        return f"{self.family}:{body}"

    @classmethod
    def from_text(cls, text, renormalize=False):
        """Parse ``FAMILY:key=value,...``.

        With ``renormalize`` the amplitudes of pure families are rescaled to
        unit norm, so rounded command-line input such as ``a=0.7071`` works.
        Inputs further than 1e-3 from normalized are still rejected.
        """
        fam, sep, body = text.partition(":")
        if not sep:
            raise SpecValidationError(f"state spec {text!r} lacks 'FAMILY:' prefix")
        params = {}
        for item in filter(None, (s.strip() for s in body.split(","))):
            key, eq, val = item.partition("=")
            if not eq:
                raise SpecValidationError(f"state parameter {item!r} is not key=value")
            try:
                params[key.strip()] = float(val)
            except ValueError:
                raise SpecValidationError(f"state parameter {key.strip()!r}: {val!r} is not a number") from None
        fam = _ALIASES.get(fam.strip().lower(), fam.strip())
        if renormalize and fam in ("GHZ", "MS", "W", "Acin"):
            amps = [k for k in FAMILY_PARAMS.get(fam, ()) if k != "phi" and k in params]
            norm = math.sqrt(sum(params[k] ** 2 for k in amps))
            if norm > 0 and abs(norm - 1.0) <= 1e-3:
                for k in amps:
                    params[k] /= norm
        return cls(fam, params)


def ghz(a=1 / math.sqrt(2), b=None):
    if b is None:
        b = math.sqrt(max(0.0, 1.0 - a * a))
    return StateSpec("GHZ", {"a": a, "b": b})


def w_state(a=1 / math.sqrt(3), b=1 / math.sqrt(3), c=None):
    if c is None:
        c = math.sqrt(max(0.0, 1.0 - a * a - b * b))
    return StateSpec("W", {"a": a, "b": b, "c": c})


def basis_ket(label):
    v = np.zeros(2 ** len(label), dtype=complex)
    v[int(label, 2)] = 1.0
    return v


def state_vector(spec):
    """Ket of a pure-state family member (GHZ, W, MS, Acin)."""
    p = spec.params
    v = np.zeros(8, dtype=complex)
    if spec.family == "GHZ":
        v[0b000] = p["a"]
        v[0b111] = p["b"]
    elif spec.family == "W":
        v[0b100] = p["a"]
        v[0b010] = p["b"]
        v[0b001] = p["c"]
    elif spec.family == "MS":
        r = 1 / math.sqrt(2)
        v[0b000] = r
        v[0b110] = r * p["a"]
        v[0b111] = r * p["b"]
    elif spec.family == "Acin":
        v[0b000] = p["l0"]
        v[0b100] = p["l1"] * np.exp(1j * p["phi"])
        v[0b101] = p["l2"]
        v[0b110] = p["l3"]
        v[0b111] = p["l4"]
    else:
        raise DomainError(f"{spec.family} is not a pure-state family")
    return v


def projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


def make_state(spec):
    """Density matrix of a :class:`StateSpec`.

    MixedGHZ is ``p |GHZ><GHZ| + (1-p) (I_2 (x) I~) / 4`` where
    ``I~ = diag(1, 0, 0, 1)``; the 1/4 makes the noise term unit-trace.
    """
    if spec.family == "MixedGHZ":
        p = spec.params["p"]
        g = projector(state_vector(ghz()))
        noise = np.kron(np.eye(2), np.diag([1.0, 0.0, 0.0, 1.0])) / 4.0
        return p * g + (1.0 - p) * noise
    return projector(state_vector(spec))


def bell_state(which="phi+"):
    r = 1 / math.sqrt(2)
    vecs = {
        "phi+": [r, 0, 0, r],
        "phi-": [r, 0, 0, -r],
        "psi+": [0, r, r, 0],
        "psi-": [0, r, -r, 0],
    }
    return projector(np.array(vecs[which], dtype=complex))


def singlet():
    return bell_state("psi-")


def n_qubits(rho):
    dim = np.asarray(rho).shape[0]
    n = dim.bit_length() - 1
    if dim != 1 << n or n < 1:
        raise DomainError(f"dimension {dim} is not a power of two")
    return n


def check_density_matrix(rho, tol=1e-10):
    """Raise DomainError unless ``rho`` is Hermitian, unit-trace and PSD."""
    rho = np.asarray(rho)
    n = n_qubits(rho)
    if n > 3:
        raise DomainError("at most three qubits are supported")
    if not is_hermitian(rho, 1e-12):
        raise DomainError("density matrix is not Hermitian")
    tr = np.trace(rho)
    if abs(tr - 1.0) > 1e-12:
        raise DomainError(f"density matrix trace {tr} != 1")
    lo = hermitian_eigenvalues(rho)[-1]
    if lo < -tol:
        raise DomainError(f"density matrix has negative eigenvalue {lo}")
    return rho


def purity(rho):
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def partial_trace(rho, party):
    """Trace out one party (0-based) of an n-qubit density matrix."""
    rho = np.asarray(rho)
    n = n_qubits(rho)
    if n < 2:
        raise DomainError("partial trace needs at least two qubits")
    if not 0 <= party < n:
        raise DomainError(f"party index {party} out of range for {n} qubits")
    t = rho.reshape((2,) * (2 * n))
    out = np.trace(t, axis1=party, axis2=n + party)
    d = 2 ** (n - 1)
    return out.reshape(d, d)


def acin_spec_from_rng(rng):
    """Draw squared amplitudes from the flat Dirichlet on the 4-simplex and phi ~ U[0, pi)."""
    sq = rng.dirichlet(np.ones(5))
    lams = np.sqrt(sq)
    lams /= math.sqrt(float(np.dot(lams, lams)))
    phi = float(rng.uniform(0.0, math.pi))
    params = {f"l{i}": float(lams[i]) for i in range(5)}
    params["phi"] = phi
    return StateSpec("Acin", params)


def sample_acin_state(rng_seed):
    """Random Acín canonical-form spec, deterministic in ``rng_seed``.

    ``rng_seed`` is anything ``numpy.random.default_rng`` accepts, typically an
    int or a ``(seed, index)`` pair for counter-style streams.
    """
    return acin_spec_from_rng(np.random.default_rng(rng_seed))
