"""Closed-form castle-transition probabilities and the absorbing Markov chain
over the number of castles."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np


def balance_probability(i: int, o: int, M: int) -> float:
    """Probability that the moves of i incoming and o outgoing robots, each
    moving with probability 1/M, exactly compensate each other."""
    if i < 0 or o < 0:
        raise ValueError("need i, o >= 0")
    if M < 2:
        raise ValueError("need multiplicity M >= 2")
    s = 1.0 + sum(comb(i, m) * comb(o, m) * (1.0 / (M - 1)) ** (2 * m)
                  for m in range(1, min(i, o) + 1))
    return (1.0 - 1.0 / M) ** (i + o) * s


def increase_probability(i: int, o: int, x: int, M: int) -> float:
    """Probability that x designated incoming robots move while the remaining
    incoming and outgoing robots compensate each other."""
    if x < 0 or x > i:
        raise ValueError("need 0 <= x <= i")
    return comb(i, x) * (1.0 / M) ** x * balance_probability(i - x, o, M)


def single_castle_lower_bound(castle_stats: list[tuple[int, int]], M: int) -> float:
    """Lower bound on the probability that the next configuration has exactly
    one castle of multiplicity M+1: some castle gains one robot while every
    other castle gains nothing. The singleton-castle events are disjoint, so
    they are summed."""
    if len(castle_stats) < 1:
        raise ValueError("need at least one castle")
    if len(castle_stats) == 1:
        return 1.0
    total = 0.0
    for k, (i_k, o_k) in enumerate(castle_stats):
        term = increase_probability(i_k, o_k, 1, M)
        for j, (i_j, o_j) in enumerate(castle_stats):
            if j == k:
                continue
            for x in range(1, i_j + 1):
                term *= 1.0 - increase_probability(i_j, o_j, x, M)
        total += term
    return total


@dataclass(frozen=True)
class MarkovResult:
    absorption_probability: float
    expected_steps: float  # expected hitting time of the gathered state from
    # the distinct state


def markov_transition_matrix(n: int, p: float) -> tuple[np.ndarray, list]:
    """Chain over the number of castles: distinct state D, destroyed state 0,
    castle-count states 2..floor(n/2), single-castle state 1, absorbing G."""
    if not 0 < p < 1:
        raise ValueError("need 0 < p < 1")
    if n < 3:
        raise ValueError("need n >= 3")
    h = n // 2
    states: list = ["D", "0"] + list(range(2, h + 1)) + [1, "G"]
    idx = {s: i for i, s in enumerate(states)}
    m = len(states)
    P = np.zeros((m, m))

    # from D: binomial number of castles formed out of h mutually nearest
    # pairs, each forming with probability 1/2; zero formed repeats D
    for x in range(h + 1):
        prob = comb(h, x) / 2.0 ** h
        if x == 0:
            P[idx["D"], idx["D"]] += prob
        elif x == 1:
            P[idx["D"], idx[1]] += prob
        else:
            P[idx["D"], idx[x]] += prob

    # from 0: worst case recreates the maximal number of castles
    P[idx["0"], idx[h] if h >= 2 else idx[1]] = 1.0

    # from K: binomial number of castles surviving/created; zero means all
    # castles destroyed, K means the situation repeats
    for K in range(2, h + 1):
        for x in range(K + 1):
            prob = comb(K, x) * p ** x * (1.0 - p) ** (K - x)
            if x == 0:
                P[idx[K], idx["0"]] += prob
            elif x == 1:
                P[idx[K], idx[1]] += prob
            elif x == K:
                P[idx[K], idx[K]] += prob
            else:
                P[idx[K], idx[x]] += prob

    # a single castle leads to a gathered configuration
    P[idx[1], idx["G"]] = 1.0
    P[idx["G"], idx["G"]] = 1.0
    return P, states


def markov_absorption(n: int, p: float) -> MarkovResult:
    P, states = markov_transition_matrix(n, p)
    m = len(states)
    transient = list(range(m - 1))  # all but G
    Q = P[np.ix_(transient, transient)]
    R = P[transient, m - 1]
    ident = np.eye(len(transient))
    absorb = np.linalg.solve(ident - Q, R)
    hitting = np.linalg.solve(ident - Q, np.ones(len(transient)))
    d = states.index("D")
    return MarkovResult(float(absorb[d]), float(hitting[d]))


def markov_simulate_hitting(n: int, p: float, walks: int,
                            seed: int = 0) -> float:
    """Monte Carlo oracle: mean number of transitions from the distinct state
    to absorption, vectorized over many simultaneous walkers."""
    P, states = markov_transition_matrix(n, p)
    m = len(states)
    rng = np.random.default_rng(seed)
    state = np.full(walks, states.index("D"), dtype=np.int64)
    steps = np.zeros(walks, dtype=np.int64)
    g = m - 1
    cum = np.cumsum(P, axis=1)
    active = state != g
    while active.any():
        u = rng.random(active.sum())
        cur = state[active]
        nxt = np.empty_like(cur)
        for s in np.unique(cur):
            mask = cur == s
            nxt[mask] = np.searchsorted(cum[s], u[mask], side="right")
        state[active] = nxt
        steps[active] += 1
        active = state != g
    return float(steps.mean())
