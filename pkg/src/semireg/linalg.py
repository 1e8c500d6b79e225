"""Dense complex linear algebra kernels.

Everything downstream (semigroup profiles, R-bound searches, cosine
families) reduces to the five operations here: matrix exponential,
induced operator norms on weighted grid spaces, resolvents, contour
integrals, and strong integrals of matrix-valued functions.

Conventions
-----------
* Matrices are square ``numpy`` arrays, complex128.
* Norm results carry an ``estimate`` flag: False means the value is
  exact up to rounding (p in {1, 2, inf}, or a diagonal matrix at any
  p); True means a certified lower bound from the nonlinear power
  iteration.
* Quadrature results carry a ``converged`` flag; node-doubling that
  hits the node cap while still moving more than ``_DIVERGENCE_REL``
  relative raises ``QuadratureDivergence``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import BadParams, QuadratureDivergence, SpectrumHit
from .spaces import GridSpace

__all__ = [
    "ContourSpec",
    "OpNormResult",
    "QuadResult",
    "Segment",
    "contour_integral",
    "mat_exp",
    "op_norm",
    "quad_strong_integral",
    "resolvent",
]

_NODE_CAP = 2 ** 14          # max function evaluations per integral
_QUAD_TOL = 1e-8             # Frobenius stop for node-doubling
_DIVERGENCE_REL = 1e-4       # relative motion at the cap that means divergence
_COND_CAP = 1e12             # resolvent condition cap
_POWER_RESTARTS = 8          # random restarts for the p-norm iteration
_POWER_ITERS = 200

# Pade order-13 numerator coefficients for the scaling-and-squaring
# exponential (denominator uses the alternating-sign counterpart).
_PADE13 = (
    64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
    1187353796428800.0, 129060195264000.0, 10559470521600.0, 670442572800.0,
    33522128640.0, 1323241920.0, 40840800.0, 960960.0, 16380.0, 182.0, 1.0,
)
_PADE13_THETA = 5.371920351148152


def _as_matrix(A) -> np.ndarray:
    A = np.asarray(A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] == 0:
        raise BadParams(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise BadParams("matrix has non-finite entries")
    return A


def _is_diagonal(A: np.ndarray) -> bool:
    off = A - np.diag(np.diag(A))
    return not np.any(off)


def mat_exp(A, t: float = 1.0) -> np.ndarray:
    """e^{tA} by order-13 Pade with power-of-two scaling from ||tA||_1.

    Diagonal matrices short-circuit to the entrywise exponential (the
    same value, exact); dense matrices always take the Pade path.
    """
    A = _as_matrix(A)
    if _is_diagonal(A):
        return np.diag(np.exp(t * np.diag(A)))
    M = t * A
    n = M.shape[0]
    ident = np.eye(n, dtype=complex)
    norm1 = float(np.max(np.sum(np.abs(M), axis=0))) if n else 0.0
    s = max(0, int(math.ceil(math.log2(norm1 / _PADE13_THETA))) if norm1 > _PADE13_THETA else 0)
    M = M / (2.0 ** s)
    b = _PADE13
    M2 = M @ M
    M4 = M2 @ M2
    M6 = M4 @ M2
    U = M @ (M6 @ (b[13] * M6 + b[11] * M4 + b[9] * M2)
             + b[7] * M6 + b[5] * M4 + b[3] * M2 + b[1] * ident)
    V = (M6 @ (b[12] * M6 + b[10] * M4 + b[8] * M2)
         + b[6] * M6 + b[4] * M4 + b[2] * M2 + b[0] * ident)
    E = np.linalg.solve(V - U, V + U)
    for _ in range(s):
        E = E @ E
    return E


@dataclass(frozen=True)
class OpNormResult:
    value: float
    estimate: bool
    maximizer: np.ndarray

    def __float__(self) -> float:
        return self.value


def _dual_sign(y: np.ndarray) -> np.ndarray:
    a = np.abs(y)
    out = np.zeros_like(y)
    nz = a > 0.0
    out[nz] = y[nz] / a[nz]
    return out


def _lp(x: np.ndarray, p: float) -> float:
    return float(np.sum(np.abs(x) ** p) ** (1.0 / p))


def _pnorm_lower(B: np.ndarray, p: float, x0: np.ndarray,
                 iters: int = _POWER_ITERS) -> tuple[float, np.ndarray]:
    """Nonlinear power iteration on the unweighted p-norm of B.

    Alternates between the primal map x -> Bx and the duality map of
    the gradient; every iterate certifies ||Bx||_p / ||x||_p, so the
    running best is a true lower bound.
    """
    q = p / (p - 1.0)
    x = x0 / _lp(x0, p)
    best, best_x = 0.0, x
    prev = -1.0
    for _ in range(iters):
        y = B @ x
        g = _lp(y, p)
        if g > best:
            best, best_x = g, x
        if prev >= 0.0 and abs(g - prev) <= 1e-14 * max(g, 1.0):
            break
        prev = g
        z = B.conj().T @ (np.abs(y) ** (p - 1.0) * _dual_sign(y))
        zmax = float(np.max(np.abs(z)))
        if zmax == 0.0:
            break
        z = z / zmax
        x = np.abs(z) ** (q - 1.0) * _dual_sign(z)
        nx = _lp(x, p)
        if nx == 0.0:
            break
        x = x / nx
    return best, best_x


def op_norm(A, space: GridSpace, seed: int = 0) -> OpNormResult:
    """Induced operator norm of A on the weighted grid space.

    Exact closed forms for p in {1, 2, inf} (weighted column sums,
    largest singular value of the weight-conjugated matrix, row sums)
    and for diagonal matrices at any p (max |diagonal|).  Other p run
    the power iteration from 8 seeded random starts plus the p = 2
    maximizer and return a certified lower bound (``estimate=True``).
    """
    A = _as_matrix(A)
    n = A.shape[0]
    if n != space.dim:
        raise BadParams(f"matrix dim {n} does not match space dim {space.dim}")
    p, w = space.p, space.weights
    absA = np.abs(A)

    if _is_diagonal(A):
        d = np.abs(np.diag(A))
        k = int(np.argmax(d))
        x = np.zeros(n, dtype=complex)
        x[k] = 1.0
        return OpNormResult(float(d[k]), False, x)

    if p == 1.0:
        col = (w @ absA) / w
        j = int(np.argmax(col))
        x = np.zeros(n, dtype=complex)
        x[j] = 1.0
        return OpNormResult(float(col[j]), False, x)

    if np.isinf(p):
        row = np.sum(absA, axis=1)
        i = int(np.argmax(row))
        x = _dual_sign(A[i].conj())
        x[np.abs(A[i]) == 0.0] = 1.0
        return OpNormResult(float(row[i]), False, x)

    scale = w ** (1.0 / p)
    B = (scale[:, None] * A) / scale[None, :]

    if p == 2.0:
        U, s, Vh = np.linalg.svd(B)
        x = Vh[0].conj() / scale
        return OpNormResult(float(s[0]), False, x)

    _, _, Vh = np.linalg.svd(B)
    starts = [Vh[0].conj()]
    rng = np.random.default_rng(seed)
    for _ in range(_POWER_RESTARTS):
        starts.append(rng.standard_normal(n) + 1j * rng.standard_normal(n))
    best, best_x = 0.0, starts[0]
    for x0 in starts:
        val, x = _pnorm_lower(B, p, x0)
        if val > best:
            best, best_x = val, x
    return OpNormResult(best, True, best_x / scale)


def resolvent(A, lam: complex) -> np.ndarray:
    """(lam - A)^{-1} by LU solve with a condition cap.

    A 1-norm condition estimate above 1e12 (or a singular factorization)
    means lam is numerically in the spectrum: ``SpectrumHit``.
    """
    A = _as_matrix(A)
    n = A.shape[0]
    M = lam * np.eye(n, dtype=complex) - A
    ident = np.eye(n, dtype=complex)
    try:
        X = np.linalg.solve(M, ident)
    except np.linalg.LinAlgError:
        raise SpectrumHit(f"resolvent at lam={lam}: factorization singular") from None
    norm1 = float(np.max(np.sum(np.abs(M), axis=0)))
    inv1 = float(np.max(np.sum(np.abs(X), axis=0)))
    cond = norm1 * inv1
    if not np.isfinite(cond) or cond > _COND_CAP:
        raise SpectrumHit(f"resolvent at lam={lam}: condition estimate {cond:.3e} exceeds cap")
    R = M @ X - ident
    if float(np.linalg.norm(R, 2)) > 1e-12:
        X = X + np.linalg.solve(M, -R)
    return X


@dataclass(frozen=True)
class Segment:
    """One smooth arc of a contour: s in [0, 1] -> curve(s), with derivative."""
    curve: Callable[[np.ndarray], np.ndarray]
    dcurve: Callable[[np.ndarray], np.ndarray]
    nodes: int = 32


@dataclass(frozen=True)
class ContourSpec:
    segments: Sequence[Segment]
    counterclockwise: bool = True

    @classmethod
    def circle(cls, center: complex, radius: float, nodes: int = 64) -> "ContourSpec":
        if radius <= 0.0:
            raise BadParams(f"circle radius must be positive, got {radius}")
        tau = 2.0j * np.pi

        def curve(s, c=center, r=radius):
            return c + r * np.exp(tau * s)

        def dcurve(s, r=radius):
            return tau * r * np.exp(tau * s)

        return cls((Segment(curve, dcurve, nodes),))

    @classmethod
    def rectangle(cls, re_min: float, re_max: float, im_min: float,
                  im_max: float, nodes: int = 32) -> "ContourSpec":
        if re_min >= re_max or im_min >= im_max:
            raise BadParams("rectangle needs re_min < re_max and im_min < im_max")
        corners = [re_min + 1j * im_min, re_max + 1j * im_min,
                   re_max + 1j * im_max, re_min + 1j * im_max]
        segs = []
        for a, b in zip(corners, corners[1:] + corners[:1]):
            def curve(s, a=a, b=b):
                return a + (b - a) * s

            def dcurve(s, a=a, b=b):
                return (b - a) * np.ones_like(np.asarray(s, dtype=complex))

            segs.append(Segment(curve, dcurve, nodes))
        return cls(tuple(segs))

    def sample(self, per_segment: int = 64) -> np.ndarray:
        """Contour points for spectrum-enclosure and pole-distance checks."""
        s = np.linspace(0.0, 1.0, per_segment, endpoint=False)
        return np.concatenate([seg.curve(s) for seg in self.segments])


@dataclass(frozen=True)
class QuadResult:
    value: np.ndarray
    converged: bool
    nodes: int


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)


def _gl_panels(F: Callable[[complex], np.ndarray], zs: np.ndarray,
               dz: np.ndarray, weights: np.ndarray) -> np.ndarray:
    total = None
    for z, d, w in zip(zs, dz, weights):
        term = F(complex(z)) * (w * d)
        total = term if total is None else total + term
    return total


def _segment_nodes(seg: Segment, panels: int):
    edges = np.linspace(0.0, 1.0, panels + 1)
    mids = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    s = (mids[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return s, w


def contour_integral(F: Callable[[complex], np.ndarray],
                     contour: ContourSpec) -> QuadResult:
    """(1/2 pi i) * closed contour integral of a matrix-valued function.

    Composite 16-node Gauss-Legendre panels per segment; the panel count
    doubles until successive values differ by less than 1e-8 in
    Frobenius norm, capped at 2^14 nodes.
    """
    panels = [max(1, -(-seg.nodes // 16)) for seg in contour.segments]
    prev = None
    while True:
        total = None
        nodes_used = 0
        for seg, P in zip(contour.segments, panels):
            s, w = _segment_nodes(seg, P)
            zs = seg.curve(s)
            dz = seg.dcurve(s)
            nodes_used += s.size
            part = _gl_panels(F, zs, dz, w)
            total = part if total is None else total + part
        total = total / (2.0j * np.pi)
        if not contour.counterclockwise:
            total = -total
        if prev is not None:
            change = float(np.linalg.norm(total - prev, "fro"))
            scale = max(float(np.linalg.norm(total, "fro")), 1.0)
            if change < _QUAD_TOL:
                return QuadResult(total, True, nodes_used)
            if 2 * nodes_used > _NODE_CAP:
                if change / scale > _DIVERGENCE_REL:
                    raise QuadratureDivergence(
                        f"contour integral still moving {change:.3e} at {nodes_used} nodes")
                return QuadResult(total, False, nodes_used)
        elif 2 * nodes_used > _NODE_CAP:
            return QuadResult(total, False, nodes_used)
        prev = total
        panels = [2 * P for P in panels]


def quad_strong_integral(G: Callable[[float], np.ndarray], a: float, b: float,
                         tol: float = 1e-9) -> QuadResult:
    """Adaptive integral of a matrix-valued function on [a, b].

    Bisects panels until the 16- vs 32-node discrepancy is below the
    per-entry tolerance (scaled by panel length), within the node cap.
    """
    if not (b > a):
        raise BadParams(f"integration interval needs b > a, got [{a}, {b}]")

    def gl(lo: float, hi: float, panels: int) -> np.ndarray:
        mid = 0.5 * (lo + hi)
        half = 0.5 * (hi - lo) / panels
        total = None
        for k in range(panels):
            c = lo + (2 * k + 1) * half
            for x, w in zip(_GL_NODES, _GL_WEIGHTS):
                term = G(float(c + half * x)) * (w * half)
                total = term if total is None else total + term
        return total

    budget = _NODE_CAP
    nodes_used = 0
    stack = [(a, b)]
    total = None
    worst_rel = 0.0
    converged = True
    while stack:
        lo, hi = stack.pop()
        coarse = gl(lo, hi, 1)
        fine = gl(lo, hi, 2)
        nodes_used += 48
        err = float(np.max(np.abs(fine - coarse)))
        local_tol = tol * max((hi - lo) / (b - a), 1e-3)
        if err <= local_tol or nodes_used + 96 > budget:
            if err > local_tol:
                converged = False
                scale = max(float(np.max(np.abs(fine))), 1.0)
                worst_rel = max(worst_rel, err / scale)
            total = fine if total is None else total + fine
        else:
            mid = 0.5 * (lo + hi)
            stack.append((lo, mid))
            stack.append((mid, hi))
    if not converged and worst_rel > _DIVERGENCE_REL:
        raise QuadratureDivergence(
            f"strong integral on [{a}, {b}] unresolved at node cap "
            f"(relative error {worst_rel:.3e})")
    return QuadResult(total, converged, nodes_used)
