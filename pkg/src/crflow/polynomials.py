"""Monomial algebra for polynomials in (x, conj x) restricted to the sphere.

A polynomial is a coefficient vector over the monomial list of a
MonomialSpace(nc, maxdeg): all x^a conj(x)^b with |a| + |b| <= maxdeg, for
nc = n + 1 complex coordinates.  Restrictions to |x| = 1 are not unique
representatives, but every operator used here (ambient Laplacian slicewise,
the Hopf derivative T, the induced sub-Laplacian) is well defined on
restrictions, so any representative gives the same values on the sphere.

Key facts used throughout:

  * ambient Laplacian on C^{nc}:  Lap(x^a conj x^b) = 4 sum_i a_i b_i x^{a-e_i} conj x^{b-e_i}
  * round sphere Laplacian of a degree-k homogeneous piece p_k:
        Lap_S(p_k|_S) = (Lap p_k)|_S - k (k + 2 nc - 2) p_k|_S
  * Hopf derivative:  T(x^a conj x^b) = i (|a| - |b|) x^a conj x^b
  * sub-Laplacian:    Lap_b = (Lap_S - T^2) / 4
"""

from itertools import product

import numpy as np


def _multi_indices(nc, total):
    """All nc-tuples of nonnegative ints summing to total."""
    if nc == 1:
        return [(total,)]
    out = []
    for first in range(total + 1):
        out.extend((first,) + rest for rest in _multi_indices(nc - 1, total - first))
    return out


def monomials_of_bidegree(nc, j, k):
    return [(a, b) for a in _multi_indices(nc, j) for b in _multi_indices(nc, k)]


class MonomialSpace:
    """Indexed monomial basis of polynomials of total degree <= maxdeg."""

    def __init__(self, nc, maxdeg):
        self.nc = nc
        self.maxdeg = maxdeg
        mons = []
        for total in range(maxdeg + 1):
            for j in range(total + 1):
                mons.extend(monomials_of_bidegree(nc, j, total - j))
        self.mons = mons
        self.index = {m: i for i, m in enumerate(mons)}
        self.dim = len(mons)
        self.degree = np.array([sum(a) + sum(b) for a, b in mons])
        self.charge = np.array([sum(a) - sum(b) for a, b in mons])
        self._build_ambient_lap()

    def _build_ambient_lap(self):
        rows, cols, vals = [], [], []
        for col, (a, b) in enumerate(self.mons):
            for i in range(self.nc):
                if a[i] and b[i]:
                    a2 = tuple(a[j] - (j == i) for j in range(self.nc))
                    b2 = tuple(b[j] - (j == i) for j in range(self.nc))
                    rows.append(self.index[(a2, b2)])
                    cols.append(col)
                    vals.append(4.0 * a[i] * b[i])
        self._lap_rows = np.array(rows, dtype=np.int64)
        self._lap_cols = np.array(cols, dtype=np.int64)
        self._lap_vals = np.array(vals)

    # ------------------------------------------------------------------
    # linear operators on coefficient vectors
    # ------------------------------------------------------------------

    def ambient_laplacian(self, coeff):
        out = np.zeros_like(coeff)
        np.add.at(out, self._lap_rows, self._lap_vals * coeff[self._lap_cols])
        return out

    def round_laplacian(self, coeff):
        """Laplace-Beltrami of the restriction, computed slicewise in degree."""
        k = self.degree
        return self.ambient_laplacian(coeff) - k * (k + 2 * self.nc - 2) * coeff

    def hopf_sq(self, coeff):
        """T^2 = -(charge)^2 multiplier."""
        return -(self.charge.astype(float) ** 2) * coeff

    def sub_laplacian(self, coeff):
        return (self.round_laplacian(coeff) - self.hopf_sq(coeff)) / 4.0

    # ------------------------------------------------------------------
    # products
    # ------------------------------------------------------------------

    def product_table(self, space_a, space_b):
        """Flat target indices for the outer product of two sub-spaces.

        Returns idx of shape (dim_a * dim_b,) mapping pairwise monomial
        products into this space; requires maxdeg >= deg_a + deg_b.
        """
        idx = np.empty(space_a.dim * space_b.dim, dtype=np.int64)
        pos = 0
        for (a1, b1) in space_a.mons:
            for (a2, b2) in space_b.mons:
                key = (tuple(u + v for u, v in zip(a1, a2)),
                       tuple(u + v for u, v in zip(b1, b2)))
                idx[pos] = self.index[key]
                pos += 1
        return idx

    def multiply(self, ca, cb, table, dim_b):
        """Coefficients of (poly a) * (poly b) given a product_table."""
        out = np.zeros(self.dim, dtype=np.result_type(ca, cb, float))
        np.add.at(out, table, np.outer(ca, cb).ravel())
        return out

    # ------------------------------------------------------------------
    # evaluation and calculus at points
    # ------------------------------------------------------------------

    def evaluate(self, coeff, points, chunk=512):
        """Values of the polynomial at sphere points, shape (N,)."""
        points = np.asarray(points, dtype=complex)
        N = points.shape[0]
        md = self.maxdeg
        pw = np.empty((self.nc, md + 1, N), dtype=complex)
        cpw = np.empty((self.nc, md + 1, N), dtype=complex)
        pw[:, 0] = 1.0
        cpw[:, 0] = 1.0
        for i in range(self.nc):
            for d in range(1, md + 1):
                pw[i, d] = pw[i, d - 1] * points[:, i]
            cpw[i] = np.conj(pw[i])
        out = np.zeros(N, dtype=complex)
        nz = np.nonzero(np.abs(coeff) > 0)[0]
        for start in range(0, len(nz), chunk):
            block = nz[start:start + chunk]
            vals = np.ones((len(block), N), dtype=complex)
            for row, m in enumerate(block):
                a, b = self.mons[m]
                for i in range(self.nc):
                    if a[i]:
                        vals[row] *= pw[i, a[i]]
                    if b[i]:
                        vals[row] *= cpw[i, b[i]]
            out += coeff[block] @ vals
        return out

    def wirtinger_gradients(self, coeff):
        """Coefficient vectors of d/dx_i and d/d conj(x_i), each in this space."""
        dz = np.zeros((self.nc, self.dim), dtype=complex)
        dzb = np.zeros((self.nc, self.dim), dtype=complex)
        for col, (a, b) in enumerate(self.mons):
            c = coeff[col]
            if c == 0:
                continue
            for i in range(self.nc):
                if a[i]:
                    a2 = tuple(a[j] - (j == i) for j in range(self.nc))
                    dz[i, self.index[(a2, b)]] += a[i] * c
                if b[i]:
                    b2 = tuple(b[j] - (j == i) for j in range(self.nc))
                    dzb[i, self.index[(a, b2)]] += b[i] * c
        return dz, dzb


def real_ambient_gradient(space, coeff, points, _grads=None):
    """Gradient of the (real) polynomial in ambient R^{2nc} coordinates.

    Returns an array of shape (N, 2 nc): derivatives with respect to
    (Re x_1, Im x_1, ..., Re x_nc, Im x_nc).
    """
    dz, dzb = space.wirtinger_gradients(coeff) if _grads is None else _grads
    N = np.asarray(points).shape[0]
    out = np.empty((N, 2 * space.nc))
    for i in range(space.nc):
        gz = space.evaluate(dz[i], points)
        gzb = space.evaluate(dzb[i], points)
        out[:, 2 * i] = np.real(gz + gzb)          # d/d Re(x_i)
        out[:, 2 * i + 1] = np.real(1j * (gz - gzb))  # d/d Im(x_i)
    return out


class PolyCalculus:
    """Cached point calculus for one polynomial: values, sphere gradients,
    Hessian eigenvalues at critical points, sub-Laplacian values."""

    def __init__(self, space, coeff):
        self.space = space
        self.coeff = np.asarray(coeff, dtype=complex)
        self._grads = space.wirtinger_gradients(self.coeff)
        self._lap = space.sub_laplacian(self.coeff)

    def value(self, points):
        return np.real(self.space.evaluate(self.coeff, points))

    def sub_laplacian_value(self, points):
        return np.real(self.space.evaluate(self._lap, points))

    def ambient_gradient(self, points):
        return real_ambient_gradient(self.space, self.coeff, points,
                                     _grads=self._grads)

    def tangent_gradient(self, points):
        points = np.asarray(points, dtype=complex)
        amb = self.ambient_gradient(points)
        X = np.empty((points.shape[0], 2 * self.space.nc))
        X[:, 0::2] = points.real
        X[:, 1::2] = points.imag
        rad = np.sum(amb * X, axis=1)
        tang = amb - rad[:, None] * X
        return tang, np.linalg.norm(tang, axis=1)

    def hessian_eigs(self, point):
        point = np.asarray(point, dtype=complex)
        nc = self.space.nc
        D = 2 * nc
        h = 1e-5
        X = np.empty(D)
        X[0::2] = point.real
        X[1::2] = point.imag

        def grad_at(xreal):
            pt = (xreal[0::2] + 1j * xreal[1::2])[None, :]
            return self.ambient_gradient(pt)[0]

        H = np.empty((D, D))
        for j in range(D):
            e = np.zeros(D)
            e[j] = h
            H[:, j] = (grad_at(X + e) - grad_at(X - e)) / (2 * h)
        H = (H + H.T) / 2.0
        radial = float(np.dot(grad_at(X), X))
        Q = np.linalg.qr(np.concatenate([X[:, None], np.eye(D)], axis=1))[0][:, 1:D]
        return np.linalg.eigvalsh(Q.T @ (H - radial * np.eye(D)) @ Q)


def tangent_sphere_gradient(space, coeff, points):
    """Riemannian gradient of the restriction to the unit sphere.

    Ambient gradient minus its radial component, in real coordinates;
    returns (grad (N, 2nc), norms (N,)).
    """
    points = np.asarray(points, dtype=complex)
    amb = real_ambient_gradient(space, coeff, points)
    X = np.empty((points.shape[0], 2 * space.nc))
    X[:, 0::2] = points.real
    X[:, 1::2] = points.imag
    rad = np.sum(amb * X, axis=1)
    tang = amb - rad[:, None] * X
    return tang, np.linalg.norm(tang, axis=1)


