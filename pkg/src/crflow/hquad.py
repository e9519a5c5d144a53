"""Adaptive quadrature over the Heisenberg group after radial reduction.

Every integral over H^n = C^n x R of a function depending only on (|z|, tau)
reduces to a 2D integral

    integral = omega_{2n-1} * int_0^inf int_{-inf}^{inf} g(r, tau) r^{2n-1} dtau dr

with omega_{2n-1} = 2 pi^n / (n-1)! the area of the unit sphere in C^n.  The
driver reparametrizes r = tan(phi), tau = (1 + r^2) tan(theta), which plays
the role of a chart-adapted proposal: for every integrand in this package the
transformed function is bounded on the rectangle [0, pi/2) x (-pi/2, pi/2)
and vanishes at the far edge.  The phi-domain is truncated explicitly where a
probed majorant bound falls below half of the error budget, and the boxed
integral runs a worst-panel-first adaptive tensor Gauss rule with an embedded
two-rule error estimate.
"""

import heapq
from math import factorial, pi

import numpy as np

from .errors import NonConvergentQuadrature

_GL_CACHE = {}


def _gl(mpts):
    if mpts not in _GL_CACHE:
        _GL_CACHE[mpts] = np.polynomial.legendre.leggauss(mpts)
    return _GL_CACHE[mpts]


def surface_area_odd_sphere(n):
    """Area of S^{2n-1} in C^n = R^{2n}."""
    return 2.0 * pi ** n / factorial(n - 1)


def _panel_eval(G, x0, x1, y0, y1, mpts):
    xg, wx = _gl(mpts)
    yg, wy = _gl(mpts)
    hx, hy = (x1 - x0) / 2.0, (y1 - y0) / 2.0
    X = x0 + hx * (xg + 1.0)
    Y = y0 + hy * (yg + 1.0)
    XX, YY = np.meshgrid(X, Y, indexing="ij")
    vals = G(XX.ravel(), YY.ravel()).reshape(mpts, mpts)
    return hx * hy * float(wx @ vals @ wy)


def adaptive_box(G, x0, x1, y0, y1, tol, max_panels=12000, m_lo=7, m_hi=11):
    """Adaptive 2D integral of G over [x0,x1] x [y0,y1].

    Per-panel error is the difference between tensor Gauss rules with m_lo
    and m_hi points per axis; the worst panel splits in four until the summed
    estimate is below tol or the panel budget is hit.
    Returns (value, error_estimate).
    """
    def make(a, b, c, d):
        coarse = _panel_eval(G, a, b, c, d, m_lo)
        fine = _panel_eval(G, a, b, c, d, m_hi)
        return (-(abs(fine - coarse)), a, b, c, d, fine)

    heap = [make(x0, x1, y0, y1)]
    n_panels = 1
    while True:
        err_total = -sum(item[0] for item in heap)
        if err_total <= tol or n_panels >= max_panels:
            value = sum(item[5] for item in heap)
            return value, err_total
        _, a, b, c, d, _ = heapq.heappop(heap)
        xm, ym = (a + b) / 2.0, (c + d) / 2.0
        for box in ((a, xm, c, ym), (xm, b, c, ym), (a, xm, ym, d), (xm, b, ym, d)):
            heapq.heappush(heap, make(*box))
        n_panels += 3


def _transformed(g, n):
    """G(phi, theta) = g(r, tau) r^{2n-1} (1+r^2) sec^2(theta) sec^2(phi)."""
    def G(phi, theta):
        r = np.tan(phi)
        sec2_phi = 1.0 + r * r
        t = np.tan(theta)
        sec2_theta = 1.0 + t * t
        tau = sec2_phi * t
        vals = np.asarray(g(r, tau), dtype=float)
        return vals * r ** (2 * n - 1) * sec2_phi * sec2_theta * sec2_phi
    return G


def _phi_cutoff(G, tol, probes=33):
    """Truncation angle: beyond it the probed majorant bound of the remaining
    strip area falls below tol.  Raises if the integrand does not decay."""
    thetas = np.linspace(-pi / 2.0 * (1 - 1e-9), pi / 2.0 * (1 - 1e-9), probes)

    def strip_bound(phi):
        vals = np.abs(G(np.full(probes, phi), thetas))
        return 8.0 * float(vals.max()) * (pi / 2.0 - phi) * pi

    phi = pi / 4.0
    for _ in range(60):
        gap = pi / 2.0 - phi
        if strip_bound(phi) <= tol and strip_bound(phi + 0.5 * gap) <= tol:
            return phi
        phi = pi / 2.0 - 0.5 * gap
        if gap < 1e-12:
            break
    raise NonConvergentQuadrature(
        "integrand does not decay; tail bound never met")


def heisenberg_integral(g, n, tol=1e-9, max_panels=12000, strict=True):
    """omega_{2n-1} * int int g(r, tau) r^{2n-1} dtau dr over r >= 0, tau in R.

    g must be vectorized over numpy arrays and absolutely integrable against
    the radial weight; divergence surfaces as NonConvergentQuadrature.
    Returns (value, error_estimate).
    """
    omega = surface_area_odd_sphere(n)
    G = _transformed(g, n)
    phi_max = _phi_cutoff(G, 0.5 * tol / omega)
    half = pi / 2.0
    value, err = adaptive_box(G, 0.0, phi_max, -half, half,
                              0.5 * tol / omega, max_panels=max_panels)
    value *= omega
    err = err * omega + 0.5 * tol
    if strict and err > max(tol * 8.0, 1e-13 * abs(value)):
        raise NonConvergentQuadrature(
            f"error estimate {err:.3e} above tolerance {tol:.3e}")
    return value, err


def sphere_volume(n, tol=1e-11):
    """Total volume of (S^{2n+1}, theta_0), defined as the Heisenberg integral
    of the chart density K(z, tau); equals 4 pi^{n+1} / n!."""
    def g(r, tau):
        s = 1.0 + r * r
        return (4.0 / (s * s + tau * tau)) ** (n + 1)

    value, _ = heisenberg_integral(g, n, tol=tol)
    return value
