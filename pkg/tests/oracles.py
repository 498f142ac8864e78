"""Independent numerical oracles shared by several test modules."""

import numpy as np
from scipy.fft import dctn, idctn


def grid_center_manifold(p, b_c, lengths, planforms, N, rho, psi):
    """Cubic center-manifold coefficients of the grid-discretized PDE.

    Builds the full right-hand side on a cell-centred Neumann grid, takes
    the Jacobian and the second/third derivatives by finite differences and
    reduces onto ``planforms`` with a dense pseudo-inverse. Shares nothing
    with the graded expansion except the kernel pair used to fix the gauge.
    Returns ``{(k, "self"): ..., (k, "cross"): ...}`` for the cubic terms
    ``a_k^3`` and ``a_k a_o^2`` of amplitude equation ``k``.
    """
    Lx, Ly = lengths
    Nx, Ny = N
    x = (np.arange(Nx) + 0.5) * Lx / Nx
    y = (np.arange(Ny) + 0.5) * Ly / Ny if Ly else np.zeros(1)
    X, Y = np.meshgrid(x, y, indexing="ij")
    kx = np.arange(Nx) * np.pi / Lx
    ky = np.arange(Ny) * np.pi / Ly if Ly else np.zeros(1)
    K2 = kx[:, None] ** 2 + ky[None, :] ** 2

    def lap(f):
        return idctn(-K2 * dctn(f, type=2, norm="ortho"), type=2, norm="ortho")

    Q, e2, G, m, n, b = p.Q, p.eta**2, p.Gamma, p.m, p.n, b_c
    size = X.size

    def F(w):
        u = Q + w[:size].reshape(X.shape)
        v = b / Q + w[size:].reshape(X.shape)
        fu = lap(u ** (m + 1)) + G * (Q - (b + 1) * u + u * u * v)
        fv = lap(v ** (n + 1)) / e2 + G / e2 * (b * u - u * u * v)
        return np.concatenate([fu.ravel(), fv.ravel()])

    nd = 2 * size
    h = 1e-6
    J = np.zeros((nd, nd))
    for j in range(nd):
        e = np.zeros(nd)
        e[j] = h
        J[:, j] = (F(e) - F(-e)) / (2 * h)
    shapes = [np.cos(pp * np.pi * X / Lx) * (np.cos(qq * np.pi * Y / Ly) if Ly else 1.0)
              for pp, qq in planforms]
    E = [np.concatenate([rho[0] * c.ravel(), rho[1] * c.ravel()]) for c in shapes]
    Psi = [np.concatenate([psi[0] * c.ravel(), psi[1] * c.ravel()]) for c in shapes]
    gram_inv = np.linalg.inv(np.array([[P @ Ej for Ej in E] for P in Psi]))
    Psi = [sum(gram_inv[i, j] * Psi[j] for j in range(len(E))) for i in range(len(E))]

    def d2(a, c, hh=1e-3):
        # twice the symmetric bilinear part
        return (F(hh * (a + c)) - F(hh * (a - c)) - F(hh * (c - a)) + F(-hh * (a + c))) / (4 * hh * hh)

    def d3(a, hh=2e-3):
        # six times the cubic part
        return (F(2 * hh * a) - 2 * F(hh * a) + 2 * F(-hh * a) - F(-2 * hh * a)) / (2 * hh**3)

    P = np.eye(nd) - sum(np.outer(Ei, Pi) for Ei, Pi in zip(E, Psi))
    Jp = np.linalg.pinv(J, rcond=1e-10)
    r = len(E)
    H = {}
    for i in range(r):
        for j in range(i, r):
            Bij = d2(E[i], E[j]) / 2 * (1 if i == j else 2)
            H[(i, j)] = -Jp @ (P @ Bij)
    out = {}
    for k in range(r):
        out[(k, "self")] = Psi[k] @ (d3(E[k]) / 6 + d2(E[k], H[(k, k)]))
    if r == 2:
        for k in range(r):
            o = 1 - k

            def cub(s):
                return d3(E[k] + s * E[o]) / 6

            c = (cub(1) + cub(-1)) / 2 - cub(0)
            out[(k, "cross")] = Psi[k] @ (c + d2(E[k], H[(o, o)]) + d2(E[o], H[tuple(sorted((k, o)))]))
    return out
