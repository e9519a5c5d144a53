"""Spectral discretization of scalar fields on S^{2n+1}.

Fields are held as coefficient vectors over an orthonormal basis of bigraded
harmonic polynomial restrictions of total degree <= J, together with cached
values on a quadrature grid.  The grid is a product rule in Hopf coordinates
x_k = sqrt(t_k) e^{i th_k}: uniform phases (exact for charges |a_k - b_k| <=
deg) times a simplex rule in t (exact to the matching algebraic degree), so
all monomials of ambient degree <= 2J + 4 integrate exactly.  Weights are
scaled so the total measure equals the chart-side volume integral.

The sub-Laplacian is diagonal: on the bidegree-(j,k) block its eigenvalue is
(4 j k + 2 n (j + k)) / c, with c calibrated so the linear coordinate
functions carry eigenvalue n/2.
"""

from dataclasses import dataclass
from itertools import product as iter_product
from math import pi

import numpy as np

from .errors import BudgetExceeded
from .hquad import sphere_volume
from .polynomials import MonomialSpace, monomials_of_bidegree

DEFAULT_BUDGET = 3.5e7   # max entries of the synthesis matrix
_VOL_CACHE = {}


def sphere_volume_cached(n):
    if n not in _VOL_CACHE:
        _VOL_CACHE[n] = sphere_volume(n)
    return _VOL_CACHE[n]


# ---------------------------------------------------------------------------
# quadrature grid
# ---------------------------------------------------------------------------

def _gl01(m):
    xg, wg = np.polynomial.legendre.leggauss(m)
    return (xg + 1.0) / 2.0, wg / 2.0


def _simplex_rule(n, tdeg):
    """Nodes (m, n+1) on the simplex sum t = 1 and weights for the uniform
    probability measure, exact for monomials of degree <= tdeg."""
    if n == 1:
        x, w = _gl01((tdeg + 2) // 2 + 1)
        T = np.stack([x, 1.0 - x], axis=1)
        return T, w / w.sum()
    if n == 2:
        mx = (tdeg + 1) // 2 + 1          # xi carries an extra (1 - xi) factor
        me = tdeg // 2 + 1
        x1, w1 = _gl01(mx)
        x2, w2 = _gl01(me)
        T, W = [], []
        for i in range(mx):
            for j in range(me):
                t1 = x1[i]
                t2 = (1.0 - x1[i]) * x2[j]
                T.append((t1, t2, 1.0 - t1 - t2))
                W.append(w1[i] * w2[j] * (1.0 - x1[i]))
        W = np.array(W)
        return np.array(T), W / W.sum()
    # recursive Duffy-type factorization t_1 = xi, rest = (1 - xi) * simplex(n-1)
    mx = (tdeg + n - 1) // 2 + 1
    x1, w1 = _gl01(mx)
    Tsub, Wsub = _simplex_rule(n - 1, tdeg)
    T, W = [], []
    for i in range(mx):
        for Ts, Ws in zip(Tsub, Wsub):
            T.append((x1[i],) + tuple((1.0 - x1[i]) * np.asarray(Ts)))
            W.append(w1[i] * Ws * (1.0 - x1[i]) ** (n - 1))
    W = np.array(W)
    return np.array(T), W / W.sum()


def sphere_quadrature(n, deg):
    """Grid exact for monomials x^a conj(x)^b of total degree <= deg.

    Returns (nodes (N, n+1) complex, weights (N,) summing to the volume)."""
    nc = n + 1
    M = deg + 1
    phases = np.exp(2j * pi * np.arange(M) / M)
    T, WT = _simplex_rule(n, deg // 2 + 1)
    s = np.sqrt(T)                                   # (m, nc)
    m_simplex = len(T)
    N = m_simplex * M ** nc
    nodes = np.empty((N, nc), dtype=complex)
    weights = np.empty(N)
    row = 0
    phase_tuples = np.array(list(iter_product(phases, repeat=nc)))   # (M^nc, nc)
    for it in range(m_simplex):
        nodes[row:row + len(phase_tuples)] = s[it] * phase_tuples
        weights[row:row + len(phase_tuples)] = WT[it]
        row += len(phase_tuples)
    weights *= sphere_volume_cached(n) / weights.sum()
    return nodes, weights


# ---------------------------------------------------------------------------
# basis
# ---------------------------------------------------------------------------

def _harmonic_nullspace(nc, j, k):
    """Monomial list of P_{j,k} and an orthonormal-column matrix spanning the
    kernel of the ambient Laplacian P_{j,k} -> P_{j-1,k-1}."""
    mons = monomials_of_bidegree(nc, j, k)
    if j == 0 or k == 0:
        return mons, np.eye(len(mons))
    lower = monomials_of_bidegree(nc, j - 1, k - 1)
    idx = {m: i for i, m in enumerate(lower)}
    L = np.zeros((len(lower), len(mons)))
    for col, (a, b) in enumerate(mons):
        for i in range(nc):
            if a[i] and b[i]:
                a2 = tuple(a[t] - (t == i) for t in range(nc))
                b2 = tuple(b[t] - (t == i) for t in range(nc))
                L[idx[(a2, b2)], col] += 4.0 * a[i] * b[i]
    _, s, vt = np.linalg.svd(L)
    rank = int(np.sum(s > 1e-10 * s[0])) if s.size else 0
    return mons, vt[rank:].T


def _calibrate_scale(n):
    """Scale c with Lap_b = (Lap_round - T^2)/c, anchored to eigenvalue n/2 on
    the linear coordinate x_1; c comes out 4 for every n."""
    space = MonomialSpace(n + 1, 1)
    e = np.zeros(space.dim)
    a = tuple(1 if i == 0 else 0 for i in range(n + 1))
    b = tuple(0 for _ in range(n + 1))
    e[space.index[(a, b)]] = 1.0
    image = space.round_laplacian(e) - space.hopf_sq(e)
    ratio = image[space.index[(a, b)]]
    off = np.abs(image - ratio * e).max()
    if off > 1e-12:
        raise RuntimeError("coordinate function is not an eigenfunction")
    return float(-ratio) / (n / 2.0)


class Basis:
    """Orthonormal bigraded-harmonic basis with quadrature grid.

    Attributes:
      n, J             : sphere index and truncation degree
      nodes, weights   : quadrature grid, weights sum to vol
      funcs            : (nb, N) complex synthesis matrix (rows orthonormal)
      analysis         : (nb, N) matrix with analyze(vals) = analysis @ vals
      bidegrees        : list of (j, k) per basis function
      eigenvalues      : (nb,) sub-Laplacian eigenvalues, >= 0
      poly             : (nb, dim msJ) coefficients in the monomial space
      vol              : total measure of the sphere
    """

    def __init__(self, n, J, budget=DEFAULT_BUDGET):
        if n < 1:
            raise ValueError("n must be >= 1")
        if J < 1:
            raise ValueError("J must be >= 1")
        nc = n + 1
        deg = 2 * J + 4
        # predict sizes before allocating
        M = deg + 1
        T, _ = _simplex_rule(n, deg // 2 + 1)
        n_nodes = len(T) * M ** nc
        nb = 0
        for m in range(J + 1):
            for j in range(m + 1):
                mons, null = _harmonic_nullspace(nc, j, m - j)
                nb += null.shape[1]
        if nb * n_nodes > budget:
            raise BudgetExceeded(
                f"basis needs {nb} x {n_nodes} grid entries, over budget {budget:.0f}")

        self.n, self.J = n, J
        self.nodes, self.weights = sphere_quadrature(n, deg)
        self.vol = float(self.weights.sum())
        c = _calibrate_scale(n)
        self.space = MonomialSpace(nc, J)
        self._space2 = None
        self._table2 = None

        mon_vals = {}

        def monomial_values(ab):
            if ab not in mon_vals:
                a, b = ab
                v = np.ones(len(self.nodes), dtype=complex)
                for i in range(nc):
                    if a[i]:
                        v = v * self.nodes[:, i] ** a[i]
                    if b[i]:
                        v = v * np.conj(self.nodes[:, i]) ** b[i]
                mon_vals[ab] = v
            return mon_vals[ab]

        rows, eigs, tags, polys = [], [], [], []
        for m in range(J + 1):
            for j in range(m + 1):
                k = m - j
                mons, null = _harmonic_nullspace(nc, j, k)
                if null.shape[1] == 0:
                    continue
                vals = np.stack([monomial_values(ab) for ab in mons])
                block = null.T @ vals                       # (dim, N)
                G = (block * self.weights) @ block.conj().T
                evals, evecs = np.linalg.eigh(G)
                keep = evals > 1e-12 * evals.max()
                R = evecs[:, keep] / np.sqrt(evals[keep])
                onb = R.T @ block
                onb_poly = R.T @ null.T                     # coords in mons
                lam = (4.0 * j * k + 2.0 * n * (j + k)) / c
                for t in range(onb.shape[0]):
                    rows.append(onb[t])
                    eigs.append(lam)
                    tags.append((j, k))
                    pvec = np.zeros(self.space.dim, dtype=complex)
                    for ci, ab in enumerate(mons):
                        pvec[self.space.index[ab]] = onb_poly[t, ci]
                    polys.append(pvec)

        self.funcs = np.ascontiguousarray(np.stack(rows))
        self.analysis = np.ascontiguousarray(self.funcs.conj() * self.weights)
        self.eigenvalues = np.array(eigs)
        self.bidegrees = tags
        self.poly = np.stack(polys)
        self.nb = len(rows)

    # -- transforms -----------------------------------------------------

    def synthesize(self, coeffs):
        return np.asarray(coeffs, dtype=complex) @ self.funcs

    def project(self, values):
        return self.analysis @ np.asarray(values, dtype=complex)

    def quad(self, values):
        """Quadrature integral of grid values (complex allowed)."""
        return complex(self.weights @ np.asarray(values))

    # -- degree-2J machinery (lazy) --------------------------------------

    @property
    def space2(self):
        if self._space2 is None:
            self._space2 = MonomialSpace(self.n + 1, 2 * self.J)
            self._table2 = self._space2.product_table(self.space, self.space)
        return self._space2

    def monomial_coeffs(self, coeffs):
        """Monomial-space representation of a field given basis coefficients."""
        return np.asarray(coeffs, dtype=complex) @ self.poly

    def product_monomial(self, ca, cb):
        """Monomial rep (degree <= 2J) of the product of two basis fields."""
        space2 = self.space2
        ma = self.monomial_coeffs(ca)
        mb = self.monomial_coeffs(cb)
        return space2.multiply(ma, mb, self._table2, self.space.dim)

    def gram_error(self):
        G = (self.funcs * self.weights) @ self.funcs.conj().T
        return float(np.abs(G - np.eye(self.nb)).max())


def build_basis(n, J, budget=DEFAULT_BUDGET):
    return Basis(n, J, budget=budget)


# ---------------------------------------------------------------------------
# fields
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Field:
    """A band-limited scalar field: basis coefficients + cached grid values."""
    basis: Basis
    coeffs: np.ndarray
    values: np.ndarray

    @classmethod
    def from_coeffs(cls, basis, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        return cls(basis, coeffs, basis.synthesize(coeffs))

    @classmethod
    def from_values(cls, basis, values):
        coeffs = basis.project(values)
        return cls(basis, coeffs, basis.synthesize(coeffs))

    @classmethod
    def constant(cls, basis, value=1.0):
        return cls.from_values(basis, np.full(len(basis.nodes), value, dtype=complex))

    @classmethod
    def coordinate(cls, basis, i, conjugate=False):
        vals = np.conj(basis.nodes[:, i]) if conjugate else basis.nodes[:, i]
        return cls.from_values(basis, vals)

    @property
    def real_values(self):
        return np.real(self.values)

    def is_real(self, tol=1e-9):
        return float(np.abs(self.values.imag).max()) <= tol

    def __add__(self, other):
        if not isinstance(other, Field):
            return NotImplemented
        return Field(self.basis, self.coeffs + other.coeffs,
                     self.values + other.values)

    def __sub__(self, other):
        return Field(self.basis, self.coeffs - other.coeffs,
                     self.values - other.values)

    def __mul__(self, scalar):
        return Field(self.basis, scalar * self.coeffs, scalar * self.values)

    __rmul__ = __mul__


def analyze(values, basis):
    """Quadrature projection of grid samples into the basis."""
    return Field.from_values(basis, values)


def synthesize(field):
    return field.basis.synthesize(field.coeffs)


def sub_laplacian(u):
    """Coefficient-wise multiplication by -lambda_{j,k}."""
    return Field.from_coeffs(u.basis, -u.basis.eigenvalues * u.coeffs)


def integrate(u):
    """Quadrature integral against the spherical volume form."""
    val = u.basis.quad(u.values)
    if abs(val.imag) > 1e-9 * (1.0 + abs(val)):
        return val
    return val.real


def inner(u, w):
    """L^2 inner product; equals sum coeff(u) conj(coeff(w)) by Parseval."""
    return complex(np.sum(u.coeffs * np.conj(w.coeffs)))


def grad_inner_values(u, w):
    """Exact grid values of the horizontal-gradient pairing <grad u, grad w>.

    Polarized carre-du-champ: (Lap(uw) - u Lap w - w Lap u) / 2, with the
    product formed symbolically in the degree-2J monomial space and the
    sub-Laplacian applied there.
    """
    basis = u.basis
    space2 = basis.space2
    m_uw = basis.product_monomial(u.coeffs, w.coeffs)
    lap_uw = space2.evaluate(space2.sub_laplacian(m_uw), basis.nodes)
    lap_u = basis.synthesize(-basis.eigenvalues * u.coeffs)
    lap_w = basis.synthesize(-basis.eigenvalues * w.coeffs)
    return 0.5 * (lap_uw - u.values * lap_w - w.values * lap_u)


def horizontal_grad_sq_values(u):
    return np.real(grad_inner_values(u, u))


def horizontal_grad_sq(u):
    """|grad u|^2 as a Field (projection of the exact point values)."""
    return Field.from_values(u.basis, horizontal_grad_sq_values(u))
