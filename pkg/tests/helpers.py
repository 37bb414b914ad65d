"""Shared generators and independent oracles for the test suite."""

import math

import numpy as np

from intervalmc.bipp import PartialPrior
from intervalmc.models import Ctmc, exit_rates


def random_m3_prior(rng) -> PartialPrior:
    """Three-band prior with log-uniform edges and a comfortably positive
    top mass (mirrors the magnitudes of the singular-event priors)."""
    eps1 = 10.0 ** rng.uniform(-5.0, -1.0)
    eps2 = eps1 * 10.0 ** rng.uniform(0.3, 1.5)
    th1 = rng.uniform(0.05, 0.6)
    th2 = rng.uniform(0.05, 0.85 - th1)
    return PartialPrior((0.0, eps1, eps2, math.inf), (th1, th2, 1.0 - th1 - th2))


def random_discrete_prior(prior: PartialPrior, rng, points_per_band=3):
    """A fully specified discrete prior satisfying the band constraints:
    each band's mass is split across random interior support points."""
    points, masses = [], []
    for i, theta in enumerate(prior.thetas):
        lo, hi = prior.epsilons[i], prior.epsilons[i + 1]
        if math.isinf(hi):
            hi = lo * 3.0 + 1.0
        k = int(rng.integers(1, points_per_band + 1))
        # strictly inside (lo, hi]
        pts = lo + (hi - lo) * rng.uniform(0.05, 1.0, size=k)
        weights = rng.dirichlet(np.ones(k)) * theta
        points.extend(pts.tolist())
        masses.extend(weights.tolist())
    return np.array(points), np.array(masses)


def random_absorbing_ctmc(rng, transient=6, absorbing=2, target_label="goal"):
    """Random chain whose transient states all feed two absorbing states,
    so trajectories absorb geometrically fast (suits Monte Carlo oracles)."""
    n = transient + absorbing
    rates = np.zeros((n, n))
    rates[:transient, :] = rng.uniform(0.2, 2.0, size=(transient, n))
    rates[:, :transient] *= rng.random((n, transient)) < 0.7  # thin the graph
    np.fill_diagonal(rates, 0.0)
    rates[transient:, :] = 0.0
    # guarantee each transient state exits
    for s in range(transient):
        if rates[s].sum() == 0:
            rates[s, transient] = 1.0
    labels = [set() for _ in range(n)]
    labels[n - 1] = {target_label}
    return Ctmc(rates, 0, labels)


def mc_reach_prob(model: Ctmc, target_label: str, runs: int, seed: int, max_steps=500):
    """Monte Carlo estimate of the reachability probability from the initial
    state, simulating the embedded jump chain (dwell times are irrelevant
    for unbounded reachability).  Returns (estimate, standard_error)."""
    rng = np.random.default_rng(seed)
    n = model.state_count
    target = model.states_with_label(target_label)
    exits = exit_rates(model)
    cum = np.zeros((n, n))
    for s in range(n):
        if exits[s] > 0:
            cum[s] = np.cumsum(model.rates[s] / exits[s])
    state = np.full(runs, model.initial, dtype=np.int64)
    hit = target[state].copy()
    active = ~hit & (exits[state] > 0)
    for _ in range(max_steps):
        if not active.any():
            break
        idx = np.nonzero(active)[0]
        u = rng.random(idx.size)
        nxt = np.empty(idx.size, dtype=np.int64)
        cur = state[idx]
        for s in np.unique(cur):
            mask = cur == s
            nxt[mask] = np.searchsorted(cum[s], u[mask], side="right")
        state[idx] = nxt
        hit[idx] |= target[nxt]
        active[idx] = ~hit[idx] & (exits[nxt] > 0)
    assert not active.any(), "simulation cap reached before absorption"
    p = hit.mean()
    return p, math.sqrt(max(p * (1 - p), 1e-12) / runs)
