"""Independent reference implementations used by the test suite.

Everything here is written from the mathematical definitions with plain
loops over full matrices, deliberately ignoring the package's triangle,
mirroring and backend machinery, so agreement is evidence rather than
tautology.
"""

import numpy as np


def naive_sample_covariances(y):
    """(R, C) of an (M, K) block, every entry accumulated separately."""
    m, k = y.shape
    r = np.zeros((m, m), dtype=np.complex128)
    c = np.zeros((m, m), dtype=np.complex128)
    for a in range(m):
        for b in range(m):
            racc = 0.0 + 0.0j
            cacc = 0.0 + 0.0j
            for t in range(k):
                racc += y[a, t] * np.conj(y[b, t])
                cacc += y[a, t] * y[b, t]
            r[a, b] = racc / k
            c[a, b] = cacc / k
    return r, c


def naive_ncc_statistic(r, c):
    """Normalized-energy statistic, written directly from its definition."""
    m = r.shape[0]
    d = np.real(np.diag(r))
    first = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            first += abs(r[a, b]) ** 2 / (d[a] * d[b])
    second = 0.0
    for a in range(m):
        second += abs(c[a, a]) ** 2 / (2.0 * d[a] ** 2)
    third = 0.0
    for a in range(m):
        for b in range(a + 1, m):
            third += abs(c[a, b]) ** 2 / (d[a] * d[b])
    return first + second + third


def naive_cav_statistic(r):
    m = r.shape[0]
    num = sum(abs(r[a, b]) for a in range(m) for b in range(m))
    den = sum(np.real(r[a, a]) for a in range(m))
    return num / den


def naive_hdm_statistic(r):
    sign, logdet = np.linalg.slogdet(r)
    if sign.real <= 0.0:
        return np.inf
    return float(np.sum(np.log(np.real(np.diag(r)))) - logdet)


def naive_lmpit_statistic(r):
    d = np.real(np.diag(r))
    m = r.shape[0]
    return sum(
        abs(r[a, b]) ** 2 / (d[a] * d[b]) for a in range(m) for b in range(m)
    )


def naive_nchdm_statistic(r, c):
    aug = np.block([[r, c], [np.conj(c), np.conj(r)]])
    sign, logdet = np.linalg.slogdet(aug)
    if sign.real <= 0.0:
        return np.inf
    return float(np.sum(np.log(np.real(np.diag(aug)))) - logdet)


def scan_empirical_threshold(stats, target_pf):
    """Smallest order statistic whose strict-exceedance fraction is <= pf."""
    ordered = sorted(float(s) for s in stats)
    n = len(ordered)
    for value in ordered:
        if sum(1 for s in ordered if s > value) <= target_pf * n:
            return value
    raise AssertionError("unreachable: the maximum always qualifies")


def bisect_chi2_quantile(dof, p, survival, lo=0.0, hi=None, iters=200):
    """Quantile of a chi-square survival function by pure bisection."""
    if hi is None:
        hi = 1.0
        while survival(hi) > p:
            hi *= 2.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if survival(mid) > p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def random_block(rng, m, k, signal=False, q=1):
    """Generic complex test block, optionally with a rank-q real-symbol part."""
    y = rng.standard_normal((m, k)) + 1j * rng.standard_normal((m, k))
    if signal:
        h = rng.standard_normal((m, q)) + 1j * rng.standard_normal((m, q))
        s = rng.choice([-1.0, 1.0], size=(q, k))
        y = y + h @ s
    return np.ascontiguousarray(y)
