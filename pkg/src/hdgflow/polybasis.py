"""Reference-element polynomial bases and quadrature.

Conventions used throughout the package:

* reference interval: ``[0, 1]`` (measure 1),
* reference triangle: ``{(x, y): x >= 0, y >= 0, x + y <= 1}`` (measure 1/2),
* Legendre modes on the interval are orthonormal w.r.t. ``L2([0,1])``,
* Dubiner modes on the triangle are mutually orthogonal with
  ``int phi_i phi_j = delta_ij / 2`` so that member 0 is the constant 1,
* the Brezzi-Douglas-Marini (BDM) velocity element of degree ``k`` is the
  full vector polynomial space ``[P_k]^2`` with a basis dual to edge-normal
  Legendre moments and interior gradient/curl-bubble moments.
"""

from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.special import eval_jacobi, roots_jacobi, roots_legendre

# reference triangle edges: (start vertex, end vertex, unit outward normal)
REF_VERTICES = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
REF_EDGES = ((0, 1), (1, 2), (2, 0))
REF_EDGE_NORMALS = np.array([[0.0, -1.0], [1.0 / np.sqrt(2.0), 1.0 / np.sqrt(2.0)], [-1.0, 0.0]])
REF_EDGE_LENGTHS = np.array([1.0, np.sqrt(2.0), 1.0])


def ref_edge_points(edge, t):
    """Map interval parameters t in [0,1] to reference-triangle coordinates."""
    a = REF_VERTICES[REF_EDGES[edge][0]]
    b = REF_VERTICES[REF_EDGES[edge][1]]
    t = np.asarray(t, dtype=float)
    return a[None, :] + t[:, None] * (b - a)[None, :]


@dataclass(frozen=True)
class QuadRule:
    """Quadrature rule on the reference interval or triangle."""

    points: np.ndarray  # (n,) for interval, (n, 2) for triangle
    weights: np.ndarray
    degree: int
    domain: str = "triangle"


@lru_cache(maxsize=None)
def quad_interval(degree):
    """Gauss-Legendre rule on [0,1], exact for polynomials up to `degree`."""
    if degree < 0:
        raise ValueError("quadrature degree must be >= 0")
    n = max(1, (degree + 2) // 2)
    x, w = roots_legendre(n)
    return QuadRule(points=(x + 1.0) / 2.0, weights=w / 2.0,
                    degree=2 * n - 1, domain="interval")


# hand-checked positive-weight symmetric rules for the low degrees that
# dominate assembly; anything above falls back to the collapsed tensor rule
_TRI_TABLE = {
    1: (np.array([[1 / 3, 1 / 3]]), np.array([0.5])),
    2: (np.array([[1 / 6, 1 / 6], [2 / 3, 1 / 6], [1 / 6, 2 / 3]]),
        np.array([1 / 6, 1 / 6, 1 / 6])),
    4: None,  # filled below
    5: None,
}


def _symmetric_orbit(a):
    return np.array([[a, a], [1 - 2 * a, a], [a, 1 - 2 * a]])


def _build_tri_table():
    a1, w1 = 0.445948490915965, 0.223381589678011
    a2, w2 = 0.091576213509771, 0.109951743655322
    pts4 = np.vstack([_symmetric_orbit(a1), _symmetric_orbit(a2)])
    wts4 = 0.5 * np.concatenate([np.full(3, w1), np.full(3, w2)])
    _TRI_TABLE[4] = (pts4, wts4)
    b1, v1 = 0.470142064105115, 0.132394152788506
    b2, v2 = 0.101286507323456, 0.125939180544827
    pts5 = np.vstack([np.array([[1 / 3, 1 / 3]]), _symmetric_orbit(b1), _symmetric_orbit(b2)])
    wts5 = 0.5 * np.concatenate([[0.225], np.full(3, v1), np.full(3, v2)])
    _TRI_TABLE[5] = (pts5, wts5)


_build_tri_table()


def _duffy_rule(degree):
    """Collapsed tensor rule: Gauss in the collapsed direction, Gauss-Jacobi
    with weight (1-y) in the radial one.  Positive weights, exact for any
    requested degree."""
    n = max(1, (degree + 2) // 2)
    xa, wa = roots_legendre(n)
    xa = (xa + 1.0) / 2.0
    wa = wa / 2.0
    xj, wj = roots_jacobi(n, 1.0, 0.0)
    y = (xj + 1.0) / 2.0
    wy = wj / 4.0
    pts = np.empty((n * n, 2))
    wts = np.empty(n * n)
    idx = 0
    for j in range(n):
        for i in range(n):
            pts[idx, 0] = xa[i] * (1.0 - y[j])
            pts[idx, 1] = y[j]
            wts[idx] = wa[i] * wy[j]
            idx += 1
    return pts, wts


@lru_cache(maxsize=None)
def quad_triangle(degree):
    """Quadrature on the reference triangle, exact for polynomials up to
    `degree`, all weights positive."""
    if degree < 0:
        raise ValueError("quadrature degree must be >= 0")
    for d in sorted(_TRI_TABLE):
        if degree <= d:
            pts, wts = _TRI_TABLE[d]
            return QuadRule(points=pts, weights=wts, degree=d, domain="triangle")
    pts, wts = _duffy_rule(degree)
    return QuadRule(points=pts, weights=wts, degree=degree, domain="triangle")


def quad_rule(domain, degree):
    if domain == "interval":
        return quad_interval(degree)
    if domain == "triangle":
        return quad_triangle(degree)
    raise ValueError(f"unknown quadrature domain {domain!r}")


# ---------------------------------------------------------------------------
# Legendre modes on [0,1]


def legendre_values(k, t):
    """Orthonormal Legendre modes on [0,1]: values (nt, k+1)."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = 2.0 * t - 1.0
    vals = np.empty((t.size, k + 1))
    vals[:, 0] = 1.0
    if k >= 1:
        vals[:, 1] = x
    for n in range(1, k):
        vals[:, n + 1] = ((2 * n + 1) * x * vals[:, n] - n * vals[:, n - 1]) / (n + 1)
    scale = np.sqrt(2.0 * np.arange(k + 1) + 1.0)
    return vals * scale[None, :]


def legendre_derivs(k, t):
    """d/dt of the orthonormal Legendre modes on [0,1]."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    x = 2.0 * t - 1.0
    p = np.empty((t.size, k + 1))
    dp = np.empty((t.size, k + 1))
    p[:, 0] = 1.0
    dp[:, 0] = 0.0
    if k >= 1:
        p[:, 1] = x
        dp[:, 1] = 1.0
    for n in range(1, k):
        p[:, n + 1] = ((2 * n + 1) * x * p[:, n] - n * p[:, n - 1]) / (n + 1)
        dp[:, n + 1] = dp[:, n - 1] + (2 * n + 1) * p[:, n]
    scale = np.sqrt(2.0 * np.arange(k + 1) + 1.0)
    return 2.0 * dp * scale[None, :]


# ---------------------------------------------------------------------------
# Dubiner modes on the reference triangle


def dubiner_index(k):
    """(i, j) exponent pairs ordered by total degree; dim = (k+1)(k+2)/2."""
    return [(d - j, j) for d in range(k + 1) for j in range(d + 1)]


def _jacobi(n, alpha, x):
    return eval_jacobi(n, alpha, 0.0, x)


def _jacobi_deriv(n, alpha, x):
    if n == 0:
        return np.zeros_like(x)
    return 0.5 * (n + alpha + 1.0) * eval_jacobi(n - 1, alpha + 1.0, 1.0, x)


def dubiner_values(k, pts, with_grads=False):
    """Dubiner modes on the reference triangle.

    Returns values of shape (npts, nb) and, if requested, gradients of shape
    (npts, nb, 2).  Points on the collapsed edge y=1 are perturbed by 1e-12;
    quadrature nodes never lie there.
    """
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    x, y = pts[:, 0].copy(), pts[:, 1].copy()
    y[y > 1.0 - 1e-12] = 1.0 - 1e-12
    npts = x.size
    omy = 1.0 - y
    eta1 = 2.0 * x / omy - 1.0
    eta2 = 2.0 * y - 1.0

    pos = {ij: m for m, ij in enumerate(dubiner_index(k))}
    nb = len(pos)
    vals = np.empty((npts, nb))
    grads = np.empty((npts, nb, 2)) if with_grads else None
    pow_omy = np.vstack([omy ** i for i in range(k + 1)])  # (k+1, npts)

    for i in range(k + 1):
        a = _jacobi(i, 0.0, eta1)
        da = _jacobi_deriv(i, 0.0, eta1)
        alpha = 2.0 * i + 1.0
        for j in range(k - i + 1):
            m = pos[(i, j)]
            c = math.sqrt((2 * i + 1) * (i + j + 1))
            b = _jacobi(j, alpha, eta2)
            vals[:, m] = c * a * pow_omy[i] * b
            if with_grads:
                db = _jacobi_deriv(j, alpha, eta2)
                if i == 0:
                    grads[:, m, 0] = 0.0
                    grads[:, m, 1] = 2.0 * c * a * db
                else:
                    pim1 = pow_omy[i - 1]
                    grads[:, m, 0] = 2.0 * c * da * pim1 * b
                    grads[:, m, 1] = c * (da * (1.0 + eta1) * pim1 * b
                                          - i * pim1 * a * b
                                          + 2.0 * a * pow_omy[i] * db)
    if with_grads:
        return vals, grads
    return vals


def eval_orthobasis(kind, k, pts, with_grads=False):
    """Evaluate an orthogonal basis set at reference points.

    kind: 'Legendre1D' (interval) or 'DubinerTri' (triangle).
    """
    if kind == "Legendre1D":
        vals = legendre_values(k, pts)
        if with_grads:
            return vals, legendre_derivs(k, pts)
        return vals
    if kind == "DubinerTri":
        return dubiner_values(k, pts, with_grads=with_grads)
    raise ValueError(f"unknown orthogonal basis kind {kind!r}")


# ---------------------------------------------------------------------------
# BDM reference element


def _bubble(pts):
    x, y = pts[:, 0], pts[:, 1]
    b = x * y * (1.0 - x - y)
    db = np.stack([y * (1.0 - 2.0 * x - y), x * (1.0 - x - 2.0 * y)], axis=-1)
    return b, db


@dataclass
class BDMBasis:
    """Reference BDM element of degree k on the triangle.

    Members are stored as coefficient columns w.r.t. the raw modal basis
    {e_c * dubiner_i}; member ordering is edge dofs (edge 0..2, Legendre mode
    0..k) followed by interior dofs.  `cond` is the condition number of the
    dual Vandermonde.
    """

    k: int
    coef: np.ndarray          # (nb, nb): raw-modal -> dual-basis coefficients
    vandermonde: np.ndarray   # (nb, nb): functionals applied to raw modes
    cond: float = 0.0
    n_edge: int = 0
    n_interior: int = 0

    @property
    def nb(self):
        return self.coef.shape[0]

    def raw_values(self, pts):
        """Raw modal vector basis values, shape (npts, nb, 2)."""
        nbs = self.nb // 2
        d = dubiner_values(self.k, pts)
        out = np.zeros((d.shape[0], self.nb, 2))
        out[:, :nbs, 0] = d
        out[:, nbs:, 1] = d
        return out

    def raw_gradients(self, pts):
        """d(raw_i)_c / dx_m, shape (npts, nb, 2, 2): [..., c, m]."""
        nbs = self.nb // 2
        _, g = dubiner_values(self.k, pts, with_grads=True)
        out = np.zeros((g.shape[0], self.nb, 2, 2))
        out[:, :nbs, 0, :] = g
        out[:, nbs:, 1, :] = g
        return out

    def raw_divergence(self, pts):
        nbs = self.nb // 2
        _, g = dubiner_values(self.k, pts, with_grads=True)
        out = np.empty((g.shape[0], self.nb))
        out[:, :nbs] = g[:, :, 0]
        out[:, nbs:] = g[:, :, 1]
        return out

    def values(self, pts):
        return np.einsum("pqc,qj->pjc", self.raw_values(pts), self.coef)

    def divergence(self, pts):
        return self.raw_divergence(pts) @ self.coef


def bdm_functionals_applied(k, vals_edge, vals_vol, qe=None, qv=None):
    """Apply the reference dof functionals to a set of vector fields.

    vals_edge: (3, nq_e, nfields, 2) values along the three edges at the
    Gauss points of `qe`; vals_vol: (nq_v, nfields, 2) at points of `qv`.
    Returns (ndofs, nfields).
    """
    qe = qe or quad_interval(2 * k + 2)
    qv = qv or quad_triangle(2 * k + 2)
    nfields = vals_vol.shape[1]
    n_edge = 3 * (k + 1)
    n_int = (k + 1) * (k - 1)
    rows = np.empty((n_edge + n_int, nfields))
    leg = legendre_values(k, qe.points)  # (nq_e, k+1)
    r = 0
    for e in range(3):
        vn = vals_edge[e] @ REF_EDGE_NORMALS[e]  # (nq_e, nfields)
        for m in range(k + 1):
            rows[r] = (qe.weights * leg[:, m]) @ vn
            r += 1
    if n_int:
        dvals, dgrads = dubiner_values(k - 1, qv.points, with_grads=True)
        # gradient moments against Dubiner modes of degree 1..k-1
        for j in range(1, dvals.shape[1]):
            w = dgrads[:, j, :] * qv.weights[:, None]
            rows[r] = np.einsum("pc,pfc->f", w, vals_vol)
            r += 1
        # curl-bubble moments against Dubiner modes of degree <= k-2
        if k >= 2:
            b, db = _bubble(qv.points)
            d2v, d2g = dubiner_values(k - 2, qv.points, with_grads=True)
            for j in range(d2v.shape[1]):
                fy = b * d2g[:, j, 1] + db[:, 1] * d2v[:, j]
                fx = b * d2g[:, j, 0] + db[:, 0] * d2v[:, j]
                curl = np.stack([fy, -fx], axis=-1)  # curl(b*q) = (d_y, -d_x)(b q)
                w = curl * qv.weights[:, None]
                rows[r] = np.einsum("pc,pfc->f", w, vals_vol)
                r += 1
    assert r == n_edge + n_int
    return rows


@lru_cache(maxsize=None)
def build_bdm_basis(k):
    """Construct the degree-k BDM reference element (1 <= k <= 20)."""
    if not 1 <= k <= 20:
        raise ValueError("BDM degree must be in [1, 20]")
    nbs = (k + 1) * (k + 2) // 2
    nb = 2 * nbs
    qe = quad_interval(2 * k + 2)
    qv = quad_triangle(2 * k + 2)

    shell = BDMBasis(k=k, coef=np.eye(nb), vandermonde=np.eye(nb))
    edge_vals = np.stack([shell.raw_values(ref_edge_points(e, qe.points)) for e in range(3)])
    vol_vals = shell.raw_values(qv.points)
    V = bdm_functionals_applied(k, edge_vals, vol_vals)
    if V.shape[0] != nb:
        raise RuntimeError("BDM functional count does not match space dimension")
    cond = float(np.linalg.cond(V))
    if not np.isfinite(cond):
        raise RuntimeError("singular BDM dual Vandermonde: invalid functional set")
    coef = np.linalg.solve(V, np.eye(nb))
    return BDMBasis(k=k, coef=coef, vandermonde=V, cond=cond,
                    n_edge=3 * (k + 1), n_interior=(k + 1) * (k - 1))
