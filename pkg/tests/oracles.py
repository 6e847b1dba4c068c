"""Independent brute-force reference implementations used by the tests.

Nothing here calls into the package's numerical code paths: laws come from
explicit path enumeration with an eigenvector stationary law, counts from
explicit shift loops, and risk quantities from their conditional-form
definitions.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter

import numpy as np


def brute_counts(x, D, G):
    L = max(D + G) - min(D + G) + 1
    joint = Counter()
    for i in range(len(x) - L + 1):
        b = tuple(x[d - 1 + i] for d in D)
        a = tuple(x[g - 1 + i] for g in G)
        joint[(b, a)] += 1
    return joint


def brute_fit(x, D, G, A):
    """Scan all a in lexicographic order; keep the first strict maximum."""
    joint = brute_counts(x, D, G)
    seen_b = {b for b, _ in joint}
    table, ties = {}, set()
    for b in seen_b:
        best, best_c, nmax = None, -1, 0
        for a in itertools.product(range(A), repeat=len(G)):
            c = joint.get((b, a), 0)
            if c > best_c:
                best, best_c, nmax = a, c, 1
            elif c == best_c:
                nmax += 1
        table[b] = best
        if nmax > 1:
            ties.add(b)
    totals = Counter()
    for (b, a), c in joint.items():
        totals[a] += c
    best, best_c = None, -1
    for a in itertools.product(range(A), repeat=len(G)):
        if totals.get(a, 0) > best_c:
            best, best_c = a, totals.get(a, 0)
    return table, best, ties


def eig_stationary(P):
    """Left Perron vector by eigendecomposition."""
    w, V = np.linalg.eig(np.asarray(P, dtype=float).T)
    v = np.real(V[:, np.argmin(np.abs(w - 1.0))])
    return v / v.sum()


def brute_markov_law(Q, order, F, A):
    """P(X_F = .) by summing pi(context) * transition products over every path."""
    Q = np.asarray(Q, dtype=float)
    F = sorted(F)
    span = F[-1] - F[0] + 1
    k = order
    # stationary law of the context chain on A**k states
    P = np.zeros((A ** k, A ** k))
    for ctx in range(A ** k):
        for a in range(A):
            P[ctx, (ctx * A + a) % (A ** k)] += Q[ctx, a]
    pi = eig_stationary(P)
    law = Counter()
    for ctx in range(A ** k):
        for path in itertools.product(range(A), repeat=span):
            p = pi[ctx]
            c = ctx
            for s in path:
                p *= Q[c, s]
                c = (c * A + s) % (A ** k)
            key = tuple(path[f - F[0]] for f in F)
            law[key] += p
    return dict(law)


def brute_iid_law(probs, F):
    F = sorted(F)
    A = len(probs)
    return {pat: math.prod(probs[s] for s in pat) for pat in itertools.product(range(A), repeat=len(F))}


def _split(law, F, D, G):
    pos = {f: i for i, f in enumerate(sorted(F))}
    out = Counter()
    for pat, p in law.items():
        b = tuple(pat[pos[d]] for d in D)
        a = tuple(pat[pos[g]] for g in G)
        out[(b, a)] += p
    return out


def brute_delta_beta(law, F, D, G, A, tol=1e-12):
    """Conditional-form definitions: regret of c at b is
    P(X_G != c, X_D = b) - min_a P(X_G != a, X_D = b)."""
    j = _split(law, F, D, G)
    deltas, betas = [], []
    for b in itertools.product(range(A), repeat=len(D)):
        pb = sum(j.get((b, a), 0.0) for a in itertools.product(range(A), repeat=len(G)))
        miss = {a: pb - j.get((b, a), 0.0) for a in itertools.product(range(A), repeat=len(G))}
        m = min(miss.values())
        pos = [miss[c] - m for c in miss if miss[c] - m > tol]
        deltas.append(min(pos) if pos else 0.0)
        betas.append(max(miss.values()) - m)
    return min(deltas), max(betas)


def brute_risk(law, F, D, G, A, rule):
    j = _split(law, F, D, G)
    worst = 0.0
    for b in itertools.product(range(A), repeat=len(D)):
        pb = sum(j.get((b, a), 0.0) for a in itertools.product(range(A), repeat=len(G)))
        miss = {a: pb - j.get((b, a), 0.0) for a in itertools.product(range(A), repeat=len(G))}
        worst = max(worst, miss[rule(b)] - min(miss.values()))
    return worst


def multinomial_risk_iid(probs, n):
    """E[excess risk] of the unigram argmax rule from n i.i.d. draws, by enumerating counts."""
    A = len(probs)
    best = max(probs)
    total = 0.0

    def compositions(n, k):
        if k == 1:
            yield (n,)
            return
        for i in range(n + 1):
            for rest in compositions(n - i, k - 1):
                yield (i,) + rest

    for counts in compositions(n, A):
        coef = math.factorial(n)
        p = 1.0
        for c, q in zip(counts, probs):
            coef //= math.factorial(c)
            p *= q ** c
        choice = counts.index(max(counts))  # first maximizer
        total += coef * p * (best - probs[choice])
    return total
