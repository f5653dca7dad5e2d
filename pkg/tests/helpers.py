"""Shared random-system builders and quadrature oracles for the tests."""

import numpy as np

from dynframes.spectral import SpectralOperator, VectorSet, branch_argument


def random_unitary(rng, d):
    z = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def _draw_separated(rng, draw, min_sep, tries=500):
    # stay out of the ambiguous zone between the grouping tolerance and
    # rounding noise: eigenvalues are either well separated or exactly equal
    for _ in range(tries):
        lam = draw()
        n = lam.size
        if n == 1:
            return lam
        diff = np.abs(lam[:, None] - lam[None, :])
        diff[np.eye(n, dtype=bool)] = np.inf
        if diff.min() >= min_sep:
            return lam
    raise RuntimeError("could not draw separated eigenvalues")


def random_normal_operator(rng, d, min_mod=0.2, max_mod=3.0, with_basis=True,
                           min_sep=1e-3):
    def draw():
        mods = np.exp(rng.uniform(np.log(min_mod), np.log(max_mod), size=d))
        args = rng.uniform(-np.pi, np.pi, size=d)
        return mods * np.exp(1j * args)

    lam = _draw_separated(rng, draw, min_sep)
    basis = random_unitary(rng, d) if with_basis else None
    return SpectralOperator(lam, basis)


def random_self_adjoint_operator(rng, d, min_mod=0.3, max_mod=2.5,
                                 with_basis=True, min_sep=1e-3):
    def draw():
        mods = np.exp(rng.uniform(np.log(min_mod), np.log(max_mod), size=d))
        signs = rng.choice([-1.0, 1.0], size=d)
        return (mods * signs).astype(complex)

    lam = _draw_separated(rng, draw, min_sep)
    basis = random_unitary(rng, d) if with_basis else None
    return SpectralOperator(lam, basis)


def random_vectors(rng, m, d):
    v = (rng.normal(size=(m, d)) + 1j * rng.normal(size=(m, d))) / np.sqrt(2.0)
    return VectorSet(v)


def simpson_quadrature(values, L):
    """Composite Simpson over uniform nodes; len(values) must be odd."""
    n = len(values) - 1
    assert n >= 2 and n % 2 == 0
    h = L / n
    w = np.full(n + 1, 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return (h / 3.0) * np.sum(w * values)


def simpson_pair_integral(lam, mu, L, panels=1 << 14):
    """Quadrature of lam^t conj(mu^t) using only the branch definition."""
    t = np.linspace(0.0, L, panels + 1)
    log_lam = np.log(abs(lam)) + 1j * branch_argument(lam)
    log_mu = np.log(abs(mu)) + 1j * branch_argument(mu)
    vals = np.exp(t * log_lam) * np.conj(np.exp(t * log_mu))
    return simpson_quadrature(vals, L)
