"""Randomized cross-checks between closed forms and independent numerical routes.

Each suite returns a :class:`~qnib.experiments.Dataset` with one row per
randomized item plus an ``ok`` column, so the CLI can write it out and the
tests can compare CSV bytes across worker counts.
"""
import math

import numpy as np

from .bell import (chsh_max, correlation_tensor, mermin_svetlichny_bounds,
                   seesaw_max, is_chsh_nbc_unital)
from .channels import QubitChannel, apply_heisenberg, apply_schrodinger, apply_to_party, tetrahedron_ok
from .compat import UnsharpObservable, is_2ibc_unital
from .experiments import (Dataset, TAG_CHSH, TAG_DUALITY, TAG_ORACLE, TAG_THEOREM,
                          chunk_ranges, draw_noise, item_rng, parallel_map, resolve_workers)
from .states import acin_spec_from_rng, make_state, w_state, ghz
from .qmat import PAULI

BOUND_SLACK = 1e-6


def random_unit(rng):
    v = rng.standard_normal(3)
    return v / np.linalg.norm(v)


def random_qubit_state(rng):
    w = random_unit(rng) * rng.random() ** (1 / 3)
    return 0.5 * (PAULI[0] + sum(c * s for c, s in zip(w, PAULI[1:])))


def random_channel(rng, unital=False):
    """Diagonal-T channel drawn uniformly from the CP tetrahedron in ``[-1, 1]^3``.

    Nonunital draws add a translation scaled into the remaining room so the
    Choi matrix stays positive; candidates failing the check are redrawn.
    """
    from .channels import is_cp

    while True:
        T = rng.uniform(-1, 1, 3)
        if not tetrahedron_ok(*T, tol=0.0):
            continue
        if unital:
            return QubitChannel.unital(*T)
        t = random_unit(rng) * rng.random() * (1 - np.max(np.abs(T)))
        ch = QubitChannel(tuple(t), tuple(T))
        if is_cp(ch):
            return ch


def random_two_qubit_state(rng):
    """Hilbert-Schmidt random mixed state (Ginibre)."""
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


# ---------------------------------------------------------------- duality

def duality(n=1000, seed=0):
    """|Tr[E(rho) A] - Tr[rho E*(A)]| for random (channel, state, observable) triples."""
    data = Dataset(("item", "unital", "gap", "ok"))
    for i in range(n):
        rng = item_rng(seed, TAG_DUALITY, i)
        unital = bool(i % 2)
        ch = random_channel(rng, unital=unital)
        rho = random_qubit_state(rng)
        x = rng.uniform(-0.5, 0.5)
        obs = UnsharpObservable.along(x, rng.uniform(0, 1 - abs(x)), random_unit(rng))
        lhs = np.trace(apply_schrodinger(ch, rho) @ obs.operator()).real
        rhs = np.trace(rho @ apply_heisenberg(ch, obs).operator()).real
        gap = abs(lhs - rhs)
        data.rows.append((i, unital, gap, gap <= 1e-12))
    return data


# ---------------------------------------------------------------- oracle vs bound

def _oracle_item(seed, i, restarts):
    rng = item_rng(seed, TAG_ORACLE, i)
    spec = acin_spec_from_rng(rng)
    noise = draw_noise(rng)
    rho = apply_to_party(noise.channel(), make_state(spec), [0])
    bm, bs = mermin_svetlichny_bounds(correlation_tensor(rho))
    sub = [int(seed), TAG_ORACLE, i, 1]
    vm, _ = seesaw_max(rho, "Mermin", restarts=restarts, rng_seed=sub)
    vs, _ = seesaw_max(rho, "Svetlichny", restarts=restarts, rng_seed=sub)
    ok = vm <= bm + BOUND_SLACK and vs <= bs + BOUND_SLACK
    return (i, bm / (2 * math.sqrt(2)), vm, bm, vs, bs, ok)


def _oracle_chunk(args):
    seed, lo, hi, restarts = args
    return [_oracle_item(seed, i, restarts) for i in range(lo, hi)]


def oracle_vs_bound(n=1000, seed=0, workers=None, restarts=64, chunk=25):
    """See-saw Mermin/Svetlichny values never exceed the singular-value bounds."""
    workers = resolve_workers(workers)
    tasks = [(seed, lo, hi, restarts) for lo, hi in chunk_ranges(n, chunk)]
    rows = [r for part in parallel_map(_oracle_chunk, tasks, workers) for r in part]
    return Dataset(("item", "lam1", "mermin_seesaw", "mermin_bound",
                    "svetlichny_seesaw", "svetlichny_bound", "ok"), rows)


# ---------------------------------------------------------------- theorem equivalence

def _theorem_chunk(args):
    seed, lo, hi = args
    rows = []
    for i in range(lo, hi):
        ch = random_channel(item_rng(seed, TAG_THEOREM, i), unital=True)
        nbc = is_chsh_nbc_unital(ch)
        ibc = is_2ibc_unital(ch.conjugate())
        rows.append((i,) + ch.T + (nbc, ibc, nbc == ibc))
    return rows


def theorem_equivalence(n=500, seed=0, workers=None, chunk=100):
    """CHSH nonlocality breaking <=> conjugate is pairwise incompatibility breaking."""
    workers = resolve_workers(workers)
    tasks = [(seed, lo, hi) for lo, hi in chunk_ranges(n, chunk)]
    rows = [r for part in parallel_map(_theorem_chunk, tasks, workers) for r in part]
    return Dataset(("item", "eta_x", "eta_y", "eta_z", "chsh_nbc", "ibc2", "ok"), rows)


def _chsh_chunk(args):
    seed, lo, hi, restarts, tol = args
    rows = []
    for i in range(lo, hi):
        rho = random_two_qubit_state(item_rng(seed, TAG_CHSH, i))
        closed = chsh_max(rho)
        oracle, _ = seesaw_max(rho, "CHSH", restarts=restarts, rng_seed=[int(seed), TAG_CHSH, i, 1])
        rows.append((i, closed, oracle, abs(closed - oracle) <= tol))
    return rows


def chsh_oracle(n=200, seed=0, workers=None, restarts=64, tol=1e-4, chunk=50):
    """Closed-form CHSH maximum against the see-saw oracle on random two-qubit states."""
    workers = resolve_workers(workers)
    tasks = [(seed, lo, hi, restarts, tol) for lo, hi in chunk_ranges(n, chunk)]
    rows = [r for part in parallel_map(_chsh_chunk, tasks, workers) for r in part]
    return Dataset(("item", "chsh_closed", "chsh_seesaw", "ok"), rows)


# ---------------------------------------------------------------- multi-party scaling

def multiparty_scaling(etas=(0.3, 0.6, 0.9), tol=1e-10):
    """lambda_max under isotropic noise on n parties equals eta**n times the clean value."""
    data = Dataset(("state", "n", "eta", "lam_noisy", "lam_expected", "ok"))
    for name, spec in (("GHZ", ghz()), ("W", w_state())):
        rho = make_state(spec)
        clean = correlation_tensor(rho).singular_values()[0]
        for n in (1, 2, 3):
            for eta in etas:
                noisy = apply_to_party(QubitChannel.isotropic(eta), rho, list(range(n)))
                lam = correlation_tensor(noisy).singular_values()[0]
                want = eta ** n * clean
                data.rows.append((name, n, eta, lam, want, abs(lam - want) <= tol * max(1.0, want)))
    return data


SUITES = ("duality", "oracle", "theorem", "chsh", "scaling")


def run_suite(name, seed=0, workers=None, size=None):
    if name == "duality":
        return duality(size or 1000, seed)
    if name == "oracle":
        return oracle_vs_bound(size or 1000, seed, workers)
    if name == "theorem":
        return theorem_equivalence(size or 500, seed, workers)
    if name == "chsh":
        return chsh_oracle(size or 200, seed, workers)
    if name == "scaling":
        return multiparty_scaling()
    raise ValueError(f"unknown suite {name!r}")
