"""
Differentiation operators on a polar disc grid.

Node layout: index 0 is the center, ring i (1 <= i < n_r) angle j sits at
1 + (i - 1) * n_theta + j. Radial derivatives use three-point stencils on
the nonuniform radii, the angular second derivative is Fourier spectral,
and the center uses the angular-average stencil 4 (mean f_1 - f_0) / r_1^2.
"""

import numpy as np
import scipy.sparse as sp


def radial_weights(radii):
    """
    Weights of f_rr + f_r / r at rings 1..n_r-2.

    Returns (w_minus, w_center, w_plus), each of length n_r - 2.
    Exact on quadratics in r.
    """
    r = radii[1:-1]
    hm = radii[1:-1] - radii[:-2]
    hp = radii[2:] - radii[1:-1]
    denom = hm * hp * (hm + hp)

    d2_minus = 2.0 * hp / denom
    d2_center = -2.0 * (hm + hp) / denom
    d2_plus = 2.0 * hm / denom

    d1_minus = -hp**2 / denom
    d1_center = (hp**2 - hm**2) / denom
    d1_plus = hm**2 / denom

    return d2_minus + d1_minus / r, d2_center + d1_center / r, d2_plus + d1_plus / r


def ring_weights(radii):
    """One-sided weights of f_rr + f_r / r at the truncation ring from its two inner neighbours."""
    x0, x1, x2 = radii[-3], radii[-2], radii[-1]
    second = 2.0 * np.array([
        1.0 / ((x0 - x1) * (x0 - x2)),
        1.0 / ((x1 - x0) * (x1 - x2)),
        1.0 / ((x2 - x0) * (x2 - x1)),
    ])
    first = np.array([
        (x2 - x1) / ((x0 - x1) * (x0 - x2)),
        (x2 - x0) / ((x1 - x0) * (x1 - x2)),
        ((x2 - x0) + (x2 - x1)) / ((x2 - x0) * (x2 - x1)),
    ])
    return second + first / x2


def angular_second_derivative(n_theta):
    """Dense Fourier differentiation matrix for d^2/dtheta^2 on n_theta equispaced angles."""
    if n_theta == 1:
        return np.zeros((1, 1))
    k = np.fft.fftfreq(n_theta, d=1.0 / n_theta)
    eye = np.eye(n_theta)
    return np.real(np.fft.ifft(-(k**2)[:, None] * np.fft.fft(eye, axis=0), axis=0))


def _ring_index(i, j, n_theta):
    return 1 + (i - 1) * n_theta + j


def assemble_laplacian(radii, n_theta):
    """
    Sparse flat Laplacian with rows at the center and interior rings.

    Rows belonging to the truncation ring are empty: ring values enter
    only as Dirichlet data for their inner neighbours.
    """
    n_r = len(radii)
    n_nodes = 1 + (n_r - 1) * n_theta
    rows, cols, vals = [], [], []

    # center: angular average of the first ring
    r1 = radii[1]
    rows.append(np.zeros(n_theta + 1, dtype=np.int64))
    cols.append(np.arange(n_theta + 1, dtype=np.int64))
    vals.append(np.concatenate([[-4.0 / r1**2], np.full(n_theta, 4.0 / (n_theta * r1**2))]))

    # radial part on rings 1..n_r-2
    w_minus, w_center, w_plus = radial_weights(radii)
    ring = np.arange(1, n_r - 1)
    jj = np.arange(n_theta)
    I, J = np.meshgrid(ring, jj, indexing="ij")
    here = _ring_index(I, J, n_theta).ravel()
    inner = np.where(I == 1, 0, _ring_index(I - 1, J, n_theta)).ravel()
    outer = _ring_index(I + 1, J, n_theta).ravel()
    rows += [here, here, here]
    cols += [inner, here, outer]
    vals += [np.repeat(w_minus, n_theta), np.repeat(w_center, n_theta), np.repeat(w_plus, n_theta)]

    operator = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_nodes, n_nodes),
    ).tocsr()

    if n_theta > 1 and n_r > 2:
        d2 = sp.csr_matrix(angular_second_derivative(n_theta))
        block = sp.kron(sp.diags(1.0 / radii[1:-1] ** 2), d2, format="coo")
        angular = sp.coo_matrix(
            (block.data, (block.row + 1, block.col + 1)), shape=(n_nodes, n_nodes)
        )
        operator = operator + angular.tocsr()

    return operator.tocsr()


def assemble_ring_operator(radii, n_theta):
    """Sparse operator with rows only at the truncation ring (one-sided, lower order)."""
    n_r = len(radii)
    n_nodes = 1 + (n_r - 1) * n_theta
    weights = ring_weights(radii)
    jj = np.arange(n_theta)
    here = _ring_index(n_r - 1, jj, n_theta)
    rows, cols, vals = [], [], []
    for offset, w in zip((2, 1, 0), weights):
        i = n_r - 1 - offset
        col = np.zeros(n_theta, dtype=np.int64) if i == 0 else _ring_index(i, jj, n_theta)
        rows.append(here)
        cols.append(col)
        vals.append(np.full(n_theta, w))
    operator = sp.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(n_nodes, n_nodes),
    ).tocsr()
    if n_theta > 1:
        d2 = angular_second_derivative(n_theta) / radii[-1] ** 2
        block = sp.coo_matrix(d2)
        start = _ring_index(n_r - 1, 0, n_theta)
        angular = sp.coo_matrix(
            (block.data, (block.row + start, block.col + start)), shape=(n_nodes, n_nodes)
        )
        operator = operator + angular.tocsr()
    return operator.tocsr()
