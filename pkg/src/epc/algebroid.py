"""The twisted algebroid ``A*_H``: bundle maps, anchor, bracket, and pointwise tests.

Frames are fixed as

    A^* : d/dzb_1 .. d/dzb_n, dz_1 .. dz_n
    A   : d/dz_1  .. d/dz_n,  dzb_1 .. dzb_n

so a bundle map ``A^* -> A`` is a ``2n x 2n`` matrix whose column ``j`` holds
the image of the ``j``-th frame element of ``A^*``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .coeff import CoeffFn, GaussianRational, Model
from .exterior import (
    D,
    DB,
    F,
    FB,
    GradedElement,
    SpeciesError,
    astar_generators,
    gen,
    interior,
    species_mask,
)
from .linalg import det, numeric_rank, rank
from .mcstruct import ExtendedPoisson
from .sampling import pmap

__all__ = [
    "BundleMapMatrix",
    "h_sharp",
    "h_bar_sharp",
    "GCReport",
    "gc_criterion",
    "default_grid",
    "apply_vector",
    "vector_bracket",
    "pair_A",
    "anchor_star",
    "anchor_A",
    "anchor_H",
    "local_anchor_H",
    "frame_bracket_H",
    "bracket_star",
    "bracket_H",
    "bracket_H_abstract",
    "lie_derivative",
    "ellipticity_matrix",
    "EllipticReport",
    "check_elliptic",
]

BLOCK_NAMES = ("T01", "L10", "T10", "L01")


def _components(x: GradedElement) -> Dict[int, CoeffFn]:
    """Generator id -> coefficient, for a degree-one element."""
    out = {}
    for m, c in x.items():
        if m.bit_count() != 1:
            raise SpeciesError("expected a degree-one element")
        out[m.bit_length() - 1] = c
    return out


def _astar_check(alpha: GradedElement) -> None:
    n = alpha.model.n
    if any(m.bit_count() != 1 or m & ~species_mask(n, DB, F) for m, _ in alpha.items()):
        raise SpeciesError("expected a degree-one section of A^* (d/dzb and dz only)")


def _a_check(x: GradedElement) -> None:
    n = x.model.n
    if any(m.bit_count() != 1 or m & ~species_mask(n, D, FB) for m, _ in x.items()):
        raise SpeciesError("expected a degree-one section of A (d/dz and dzb only)")


@dataclass(frozen=True)
class BundleMapMatrix:
    """A ``2n x 2n`` matrix of coefficient functions between two split bundles.

    ``domain`` and ``codomain`` name the two summands (first block, second
    block), e.g. ``("T01", "L10")`` for ``A^* = T^{0,1} + Lambda^{1,0}``.
    """

    model: Model
    domain: Tuple[str, str]
    codomain: Tuple[str, str]
    entries: Tuple[Tuple[CoeffFn, ...], ...]

    def __post_init__(self):
        size = 2 * self.model.n
        if len(self.entries) != size or any(len(r) != size for r in self.entries):
            raise ValueError(f"bundle map matrix must be {size}x{size}")
        for lab in self.domain + self.codomain:
            if lab not in BLOCK_NAMES:
                raise ValueError(f"unknown block label {lab!r}")

    @property
    def n(self) -> int:
        return self.model.n

    def block(self, r: int, c: int) -> List[List[CoeffFn]]:
        n = self.n
        return [list(row[c * n:(c + 1) * n]) for row in self.entries[r * n:(r + 1) * n]]

    def is_zero(self) -> bool:
        return all(not e for row in self.entries for e in row)

    def is_constant(self) -> bool:
        return all(e.is_constant() for row in self.entries for e in row)

    def conjugate(self) -> "BundleMapMatrix":
        """The conjugate map between the conjugate bundles."""
        swap = {"T01": "T10", "T10": "T01", "L10": "L01", "L01": "L10"}
        return BundleMapMatrix(
            self.model,
            (swap[self.domain[0]], swap[self.domain[1]]),
            (swap[self.codomain[0]], swap[self.codomain[1]]),
            tuple(tuple(e.conjugate() for e in row) for row in self.entries),
        )

    def __matmul__(self, other: "BundleMapMatrix") -> "BundleMapMatrix":
        """``self o other``; the codomain of ``other`` must be the domain of ``self``."""
        if other.codomain != self.domain:
            raise ValueError(f"cannot compose: {other.codomain} -> {self.domain}")
        size = 2 * self.n
        zero = CoeffFn.zero(self.model)
        rows = []
        for i in range(size):
            row = []
            for j in range(size):
                acc = zero
                for k in range(size):
                    a, b = self.entries[i][k], other.entries[k][j]
                    if a and b:
                        acc = acc + a * b
                row.append(acc)
            rows.append(tuple(row))
        return BundleMapMatrix(self.model, other.domain, self.codomain, tuple(rows))

    def minus_identity(self) -> "BundleMapMatrix":
        if self.domain != self.codomain:
            raise ValueError("identity only makes sense for an endomorphism")
        one = CoeffFn.constant(self.model, 1)
        rows = tuple(
            tuple(e - one if i == j else e for j, e in enumerate(row)) for i, row in enumerate(self.entries)
        )
        return BundleMapMatrix(self.model, self.domain, self.codomain, rows)

    def identity_multiple(self) -> Optional[CoeffFn]:
        """``f`` if the matrix is ``f * Id``, else ``None``."""
        d = self.entries[0][0]
        for i, row in enumerate(self.entries):
            for j, e in enumerate(row):
                if (i == j and e != d) or (i != j and e):
                    return None
        return d

    def constant_matrix(self) -> List[List[GaussianRational]]:
        if not self.is_constant():
            raise ValueError("matrix has nonconstant entries")
        return [[e.constant_value() for e in row] for row in self.entries]

    def evaluate(self, point: Sequence[complex]) -> np.ndarray:
        return np.array([[e.evaluate(point) for e in row] for row in self.entries], dtype=complex)


def h_sharp(H: ExtendedPoisson) -> BundleMapMatrix:
    """``H# : A^* -> A``, ``alpha |-> i_alpha H``.

    In blocks ``(theta_flat, pi_sharp; omega_flat, theta_sharp)``.
    """
    model = H.model
    n = model.n
    h = H.H
    targets = [D * n + i for i in range(n)] + [FB * n + i for i in range(n)]
    cols = []
    for alpha in astar_generators(model):
        comp = _components(interior(alpha, h)) if h else {}
        cols.append([comp.get(t, CoeffFn.zero(model)) for t in targets])
    rows = tuple(tuple(cols[j][i] for j in range(2 * n)) for i in range(2 * n))
    return BundleMapMatrix(model, ("T01", "L10"), ("T10", "L01"), rows)


def h_bar_sharp(H: ExtendedPoisson) -> BundleMapMatrix:
    """``conj(H)# : A -> A^*``."""
    return h_sharp(H).conjugate()


def default_grid(model: Model, G: int = 5) -> List[Tuple[complex, ...]]:
    """Torus: ``G`` points per real direction.  Chart: the origin and unit shifts along each axis."""
    n = model.n
    if G < 1:
        raise ValueError("grid size must be positive")
    if model.is_torus:
        ticks = [Fraction(k, G) for k in range(G)]
        pts = []
        for xs in itertools.product(ticks, repeat=2 * n):
            pts.append(tuple(complex(float(xs[2 * j]), float(xs[2 * j + 1])) for j in range(n)))
        return pts
    pts = [tuple([0j] * n)]
    for j in range(n):
        for s in (1, -1, 1j, -1j):
            p = [0j] * n
            p[j] = s
            pts.append(tuple(p))
    return pts


@dataclass
class GCReport:
    composite: BundleMapMatrix
    exact: bool
    determinants: List[Tuple[Optional[Tuple[complex, ...]], complex | GaussianRational]]
    verdict: bool
    identity_factor: Optional[CoeffFn] = None


def gc_criterion(H: ExtendedPoisson, points: Optional[Sequence[Sequence[complex]]] = None, G: int = 5, tol: float = 1e-9) -> GCReport:
    """Decide invertibility of ``conj(H)# H# - Id`` on ``A^*``.

    The composite is always formed exactly; the determinant is exact when the
    entries are constant and evaluated numerically at ``points`` otherwise.
    """
    comp = h_bar_sharp(H) @ h_sharp(H)
    shifted = comp.minus_identity()
    factor = comp.identity_multiple()
    if shifted.is_constant():
        d = det(shifted.constant_matrix())
        return GCReport(comp, True, [(None, d)], bool(d), factor)
    if points is None:
        points = default_grid(H.model, G)
    if len(points) == 0:
        raise ValueError("gc_criterion needs at least one sample point")
    dets = pmap(lambda p: (tuple(p), complex(np.linalg.det(shifted.evaluate(p)))), list(points))
    verdict = all(abs(v) > tol for _, v in dets)
    return GCReport(comp, False, dets, verdict, factor)


# anchors and brackets ------------------------------------------------------------


def apply_vector(X: GradedElement, f: CoeffFn) -> CoeffFn:
    """A complex vector field (``d/dz``, ``d/dzb`` species) acting on a function."""
    n = X.model.n
    out = CoeffFn.zero(X.model)
    for g, c in _components(X).items():
        s, i = divmod(g, n)
        if s == D:
            out = out + c * f.wirtinger(i)
        elif s == DB:
            out = out + c * f.wirtinger(i, bar=True)
        else:
            raise SpeciesError("apply_vector expects a vector field")
    return out


def vector_bracket(X: GradedElement, Y: GradedElement) -> GradedElement:
    """Lie bracket of complex vector fields in the flat frame."""
    out = GradedElement.zero(X.model)
    for g, c in _components(Y).items():
        out = out + GradedElement._trusted(X.model, {1 << g: CoeffFn.constant(X.model, 1)}) * apply_vector(X, c)
    for g, c in _components(X).items():
        out = out - GradedElement._trusted(X.model, {1 << g: CoeffFn.constant(X.model, 1)}) * apply_vector(Y, c)
    return out


def pair_A(x: GradedElement, alpha: GradedElement) -> CoeffFn:
    """Duality pairing ``<x, alpha>`` of a section of ``A`` with one of ``A^*``."""
    _a_check(x)
    _astar_check(alpha)
    n = x.model.n
    xa = _components(x)
    out = CoeffFn.zero(x.model)
    for g, c in _components(alpha).items():
        partner = (g + 2 * n) % (4 * n)
        if partner in xa:
            out = out + c * xa[partner]
    return out


def anchor_star(alpha: GradedElement) -> GradedElement:
    """``a_*``: keeps the ``T^{0,1}`` part of a section of ``A^*``."""
    _astar_check(alpha)
    return alpha.select(lambda m: bool(m & species_mask(alpha.model.n, DB)))


def anchor_A(x: GradedElement) -> GradedElement:
    """``a``: keeps the ``T^{1,0}`` part of a section of ``A``."""
    _a_check(x)
    return x.select(lambda m: bool(m & species_mask(x.model.n, D)))


def anchor_H(H: ExtendedPoisson, alpha: GradedElement) -> GradedElement:
    """``a_*^H = a_* + a o H#``, computed through the contraction ``i_alpha H``."""
    _astar_check(alpha)
    return anchor_star(alpha) + anchor_A(interior(alpha, H.H))


def local_anchor_H(H: ExtendedPoisson, alpha: GradedElement) -> GradedElement:
    """The anchor from its coordinate expression on the frame, extended linearly."""
    _astar_check(alpha)
    model, n = H.model, H.n
    out = GradedElement.zero(model)
    for g, c in _components(alpha).items():
        s, i = divmod(g, n)
        if s == F:
            img = GradedElement.zero(model)
            for q in range(n):
                img = img + gen(model, D, q) * H.pi_coeff(i, q).scale(2)
        else:
            img = gen(model, DB, i)
            for p in range(n):
                img = img - gen(model, D, p) * H.theta_coeff(p, i)
        out = out + img * c
    return out


def _holo_differential(f: CoeffFn) -> GradedElement:
    """``d_A f = sum_k df/dz_k dz_k`` as a section of ``A^*``."""
    model = f.model
    out = GradedElement.zero(model)
    for k in range(model.n):
        out = out + gen(model, F, k) * f.wirtinger(k)
    return out


def frame_bracket_H(H: ExtendedPoisson, g1: int, g2: int) -> GradedElement:
    """``[e_1, e_2]_H`` for frame generators of ``A^*`` given by their ids."""
    n = H.n
    s1, i = divmod(g1, n)
    s2, j = divmod(g2, n)
    if s1 == DB and s2 == DB:
        return _holo_differential(H.omega_coeff(i, j).scale(2))
    if s1 == F and s2 == F:
        return _holo_differential(H.pi_coeff(i, j).scale(2))
    if s1 == F and s2 == DB:
        return _holo_differential(H.theta_coeff(i, j))
    if s1 == DB and s2 == F:
        return -_holo_differential(H.theta_coeff(j, i))
    raise SpeciesError("frame_bracket_H expects frame elements of A^*")


def _leibniz_bracket(alpha: GradedElement, beta: GradedElement, anchor, frame) -> GradedElement:
    model = alpha.model
    ca, cb = _components(alpha), _components(beta)
    one = CoeffFn.constant(model, 1)
    out = GradedElement.zero(model)
    if frame is not None:
        for g1, a in ca.items():
            for g2, b in cb.items():
                fb = frame(g1, g2)
                if fb:
                    out = out + fb * (a * b)
    Xa, Xb = anchor(alpha), anchor(beta)
    for g, b in cb.items():
        out = out + GradedElement._trusted(model, {1 << g: one}) * apply_vector(Xa, b)
    for g, a in ca.items():
        out = out - GradedElement._trusted(model, {1 << g: one}) * apply_vector(Xb, a)
    return out


def bracket_star(alpha: GradedElement, beta: GradedElement) -> GradedElement:
    """The untwisted bracket of ``A^*`` (flat frame brackets vanish)."""
    _astar_check(alpha)
    _astar_check(beta)
    return _leibniz_bracket(alpha, beta, anchor_star, None)


def bracket_H(H: ExtendedPoisson, alpha: GradedElement, beta: GradedElement) -> GradedElement:
    """``[alpha, beta]_{*H}`` from the frame brackets of ``H`` and the Leibniz rule for ``a_*^H``."""
    _astar_check(alpha)
    _astar_check(beta)
    return _leibniz_bracket(alpha, beta, lambda x: anchor_H(H, x), lambda g1, g2: frame_bracket_H(H, g1, g2))


def lie_derivative(x: GradedElement, beta: GradedElement) -> GradedElement:
    """``L_x beta`` for ``x`` a section of ``A`` and ``beta`` one of ``A^*``."""
    _a_check(x)
    _astar_check(beta)
    model, n = x.model, x.model.n
    X = anchor_A(x)
    xa = _components(x)
    out = GradedElement.zero(model)
    one = CoeffFn.constant(model, 1)
    for g, b in _components(beta).items():
        out = out + GradedElement._trusted(model, {1 << g: one}) * apply_vector(X, b)
        partner = (g + 2 * n) % (4 * n)
        if partner in xa:
            out = out + _holo_differential(xa[partner]) * b
    return out


def bracket_H_abstract(H: ExtendedPoisson, alpha: GradedElement, beta: GradedElement) -> GradedElement:
    """``[a, b]_* + L_{H# a} b - L_{H# b} a - d_A <H# a, b>``."""
    h = H.H
    ha, hb = interior(alpha, h), interior(beta, h)
    twist = lie_derivative(ha, beta) - lie_derivative(hb, alpha) - _holo_differential(pair_A(ha, beta))
    return bracket_star(alpha, beta) + twist


# ellipticity ----------------------------------------------------------------------


def ellipticity_matrix(H: ExtendedPoisson) -> List[List[Tuple[CoeffFn, CoeffFn]]]:
    """Complex blocks ``(theta_flat, pi_sharp)`` of ``F(v, xi) = conj(v) + theta_flat v + pi_sharp xi``."""
    M = h_sharp(H)
    return [M.block(0, 0), M.block(0, 1)]


def _real_F(theta, pi, n: int):
    """Real ``2n x 4n`` matrix of ``F`` in coordinates ``(Re v, Im v, Re xi, Im xi)``."""
    rows = [[0] * (4 * n) for _ in range(2 * n)]
    for i in range(n):
        for j in range(n):
            t, p = theta[i][j], pi[i][j]
            tr, ti = t.real, t.imag
            pr, pim = p.real, p.imag
            rows[i][j] += tr
            rows[i][n + j] += -ti
            rows[n + i][j] += ti
            rows[n + i][n + j] += tr
            rows[i][2 * n + j] += pr
            rows[i][3 * n + j] += -pim
            rows[n + i][2 * n + j] += pim
            rows[n + i][3 * n + j] += pr
        rows[i][i] += 1
        rows[n + i][n + i] += -1
    return rows


class _Exact:
    """Real/imaginary view of a Gaussian rational for the exact real matrix."""

    def __init__(self, c: GaussianRational):
        self.real, self.imag = c.re, c.im


@dataclass
class EllipticReport:
    exact: bool
    points: List[Dict] = field(default_factory=list)
    verdict: bool = True
    degenerate: List[Optional[Tuple[complex, ...]]] = field(default_factory=list)
    note: str = ""


def check_elliptic(H: ExtendedPoisson, grid: Optional[Sequence[Sequence[complex]]] = None, G: int = 5) -> EllipticReport:
    """Pointwise surjectivity of ``F`` onto ``T^{1,0}`` viewed as a real ``2n``-dimensional space."""
    n = H.n
    theta, pi = ellipticity_matrix(H)
    if all(e.is_constant() for blk in (theta, pi) for row in blk for e in row):
        tv = [[_Exact(e.constant_value()) for e in row] for row in theta]
        pv = [[_Exact(e.constant_value()) for e in row] for row in pi]
        real = _real_F(tv, pv, n)
        r = rank({j: GaussianRational(v) for j, v in enumerate(row) if v} for row in real)
        ok = r == 2 * n
        rep = EllipticReport(True, [{"point": None, "rank": r, "elliptic": ok}], ok, [] if ok else [None])
        rep.note = "constant coefficients: the rank of F is the same at every point"
        if not ok:
            rep.note += "; F is rank-deficient everywhere"
        return rep
    if grid is None:
        grid = default_grid(H.model, G)
    if len(grid) == 0:
        raise ValueError("check_elliptic needs a nonempty grid")

    def at(p):
        tv = [[e.evaluate(p) for e in row] for row in theta]
        pv = [[e.evaluate(p) for e in row] for row in pi]
        r = numeric_rank(np.array(_real_F(tv, pv, n), dtype=float))
        return {"point": tuple(p), "rank": r, "elliptic": r == 2 * n}

    pts = pmap(at, list(grid))
    bad = [p["point"] for p in pts if not p["elliptic"]]
    rep = EllipticReport(False, pts, not bad, bad)
    rep.note = f"F drops rank at {len(bad)} of {len(pts)} sampled points"
    return rep
