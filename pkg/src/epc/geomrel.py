"""Linear coisotropic submanifolds and extended Poisson maps between flat models."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Tuple

from .algebroid import _components, anchor_H, bracket_H
from .coeff import CoeffFn, GaussianRational, Model, ModelError
from .exterior import D, DB, F, FB, GradedElement, gen, interior
from .linalg import nullspace, rank
from .mcstruct import ExtendedPoisson, scale_family

__all__ = [
    "LinearSubmanifold",
    "LinearHolomorphicMap",
    "CoisotropicReport",
    "coisotropic_check",
    "SubalgebroidReport",
    "subalgebroid_check",
    "dual_structure",
    "embed_element",
    "product_structure",
    "PoissonMapReport",
    "poisson_map_check",
    "compose",
    "graph",
]

Matrix = Tuple[Tuple[GaussianRational, ...], ...]


def _matrix(rows) -> Matrix:
    return tuple(tuple(GaussianRational.coerce(x) for x in r) for r in rows)


@dataclass(frozen=True)
class LinearSubmanifold:
    """``Y = {V t + offset}`` with ``V`` an ``n x m`` matrix whose columns span ``T^{1,0}Y``.

    On the torus ``V`` must have Gaussian-integer entries (a subtorus
    direction) and the offset must vanish.
    """

    model: Model
    basis: Matrix
    offset: Tuple[GaussianRational, ...] = ()

    def __init__(self, model: Model, basis, offset=None):
        object.__setattr__(self, "model", model)
        object.__setattr__(self, "basis", _matrix(basis))
        n = model.n
        off = tuple(GaussianRational.coerce(x) for x in (offset if offset is not None else [0] * n))
        object.__setattr__(self, "offset", off)
        if len(self.basis) != n or len(off) != n:
            raise ValueError(f"basis must have {n} rows and the offset {n} entries")
        m = len(self.basis[0]) if n else 0
        if any(len(r) != m for r in self.basis):
            raise ValueError("ragged basis matrix")
        cols = [{i: self.basis[i][j] for i in range(n) if self.basis[i][j]} for j in range(m)]
        if rank(cols) != m:
            raise ValueError("basis vectors are linearly dependent")
        if model.is_torus:
            if any(off):
                raise ModelError("torus submanifolds must pass through the origin")
            if not all(x.is_gaussian_integer() for r in self.basis for x in r):
                raise ModelError("torus subtorus directions need Gaussian-integer entries")

    @classmethod
    def from_columns(cls, model: Model, columns: Sequence[Sequence], offset=None) -> "LinearSubmanifold":
        n = model.n
        return cls(model, [[columns[j][i] for j in range(len(columns))] for i in range(n)], offset)

    @property
    def dim(self) -> int:
        return len(self.basis[0]) if self.basis else 0

    @property
    def param_model(self) -> Model:
        return Model(self.model.kind, self.dim)

    def columns(self) -> List[Tuple[GaussianRational, ...]]:
        return [tuple(self.basis[i][j] for i in range(self.model.n)) for j in range(self.dim)]

    def annihilator(self) -> List[Dict[int, GaussianRational]]:
        """Coefficient vectors ``a`` with ``sum_i a_i V_{ij} = 0`` for all ``j`` (``N^{1,0}Y``)."""
        n = self.model.n
        rows_as_cols = [{j: self.basis[i][j] for j in range(self.dim) if self.basis[i][j]} for i in range(n)]
        return nullspace(rows_as_cols)

    def tangent_01(self) -> List[GradedElement]:
        """Frame of ``T^{0,1}Y`` as sections of ``A^*``."""
        model = self.model
        out = []
        for col in self.columns():
            el = GradedElement.zero(model)
            for i, c in enumerate(col):
                if c:
                    el = el + gen(model, DB, i) * c.conjugate()
            out.append(el)
        return out

    def conormal_10(self) -> List[GradedElement]:
        """Frame of ``N^{1,0}Y``."""
        model = self.model
        out = []
        for a in self.annihilator():
            el = GradedElement.zero(model)
            for i, c in a.items():
                el = el + gen(model, F, i) * c
            out.append(el)
        return out

    def K(self) -> List[GradedElement]:
        return self.tangent_01() + self.conormal_10()

    def restrict(self, f: CoeffFn) -> CoeffFn:
        return f.substitute_linear(self.param_model, self.basis, None if self.model.is_torus else self.offset)


@dataclass(frozen=True)
class LinearHolomorphicMap:
    """``f : source -> target``, ``z |-> A z + b`` with ``A`` of shape ``target.n x source.n``."""

    source: Model
    target: Model
    matrix: Matrix
    translation: Tuple[GaussianRational, ...] = ()

    def __init__(self, source: Model, target: Model, matrix, translation=None):
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", _matrix(matrix))
        b = tuple(GaussianRational.coerce(x) for x in (translation if translation is not None else [0] * target.n))
        object.__setattr__(self, "translation", b)
        if source.kind != target.kind:
            raise ModelError("source and target must be the same kind of model")
        if len(self.matrix) != target.n or any(len(r) != source.n for r in self.matrix) or len(b) != target.n:
            raise ValueError("map matrix has the wrong shape")
        if source.is_torus:
            if not all(x.is_gaussian_integer() for r in self.matrix for x in r):
                raise ModelError("a linear torus map needs a Gaussian-integer matrix")
            if any(b):
                raise ModelError("translations are not supported on the torus model")

    @classmethod
    def identity(cls, model: Model) -> "LinearHolomorphicMap":
        n = model.n
        return cls(model, model, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def pullback(self, f: CoeffFn) -> CoeffFn:
        """``f o self`` for ``f`` a function on the target."""
        return f.substitute_linear(self.source, self.matrix, None if self.source.is_torus else self.translation)


def compose(f: LinearHolomorphicMap, g: LinearHolomorphicMap) -> LinearHolomorphicMap:
    """``f o g``."""
    if g.target != f.source:
        raise ValueError("maps do not chain")
    A, B = f.matrix, g.matrix
    prod = [[sum((A[i][k] * B[k][j] for k in range(len(B))), GaussianRational(0)) for j in range(len(B[0]))] for i in range(len(A))]
    b = [sum((A[i][k] * g.translation[k] for k in range(len(B))), GaussianRational(0)) + f.translation[i] for i in range(len(A))]
    return LinearHolomorphicMap(g.source, f.target, prod, b)


# coisotropy ----------------------------------------------------------------------


@dataclass
class CoisotropicReport:
    verdict: bool
    residuals: List[Tuple[int, int, CoeffFn]] = field(default_factory=list)

    def nonzero(self) -> List[Tuple[int, int, CoeffFn]]:
        return [(i, j, r) for i, j, r in self.residuals if r]


def _pair_H(H: ExtendedPoisson, u: GradedElement, v: GradedElement) -> CoeffFn:
    """``H(u, v) = i_v i_u H``."""
    return interior(v, interior(u, H.H)).coeff(0)


def coisotropic_check(H: ExtendedPoisson, Y: LinearSubmanifold) -> CoisotropicReport:
    """``H(u, v)`` restricted to ``Y`` for all pairs of a spanning set of ``K``."""
    if Y.model != H.model:
        raise ValueError("submanifold and structure live on different models")
    K = Y.K()
    res = []
    for i in range(len(K)):
        for j in range(i + 1, len(K)):
            res.append((i, j, Y.restrict(_pair_H(H, K[i], K[j]))))
    return CoisotropicReport(all(not r for _, _, r in res), res)


@dataclass
class SubalgebroidReport:
    precondition: bool
    anchor_ok: bool = False
    bracket_ok: bool = False
    failures: List[str] = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return self.precondition and self.anchor_ok and self.bracket_ok


def _in_tangent(Y: LinearSubmanifold, X: GradedElement) -> bool:
    """Whether a complex vector field restricted to ``Y`` is tangent to ``Y``."""
    n = Y.model.n
    comp = _components(X)
    zero = CoeffFn.zero(Y.model)
    for a in Y.annihilator():
        hol = sum((comp.get(D * n + i, zero) * c for i, c in a.items()), zero)
        anti = sum((comp.get(DB * n + i, zero) * c.conjugate() for i, c in a.items()), zero)
        if Y.restrict(hol) or Y.restrict(anti):
            return False
    return True


def _in_K(Y: LinearSubmanifold, beta: GradedElement) -> bool:
    n = Y.model.n
    comp = _components(beta)
    zero = CoeffFn.zero(Y.model)
    for a in Y.annihilator():
        anti = sum((comp.get(DB * n + i, zero) * c.conjugate() for i, c in a.items()), zero)
        if Y.restrict(anti):
            return False
    for col in Y.columns():
        hol = sum((comp.get(F * n + i, zero) * c for i, c in enumerate(col) if c), zero)
        if Y.restrict(hol):
            return False
    return True


def subalgebroid_check(H: ExtendedPoisson, Y: LinearSubmanifold) -> SubalgebroidReport:
    """Anchor of ``K`` tangent to ``Y`` and brackets of frame sections of ``K`` back in ``K``."""
    if not coisotropic_check(H, Y).verdict:
        return SubalgebroidReport(False, failures=["Y is not coisotropic"])
    K = Y.K()
    rep = SubalgebroidReport(True, True, True)
    for i, k in enumerate(K):
        if not _in_tangent(Y, anchor_H(H, k)):
            rep.anchor_ok = False
            rep.failures.append(f"anchor of K[{i}] leaves TY")
    for i in range(len(K)):
        for j in range(i + 1, len(K)):
            if not _in_K(Y, bracket_H(H, K[i], K[j])):
                rep.bracket_ok = False
                rep.failures.append(f"[K[{i}], K[{j}]] leaves K")
    return rep


# products and maps -----------------------------------------------------------------


def dual_structure(H: ExtendedPoisson) -> ExtendedPoisson:
    """``H^v = -pi + theta - omega``."""
    return scale_family(H, -1)


def embed_element(x: GradedElement, target: Model, offset: int) -> GradedElement:
    """Rename generator ``i`` of each species to ``i + offset`` inside ``target``."""
    n, N = x.model.n, target.n
    out = {}
    for m, c in x.items():
        new = 0
        for g in range(4 * n):
            if m >> g & 1:
                s, i = divmod(g, n)
                new |= 1 << (s * N + i + offset)
        # species blocks keep their relative order, so no sign appears
        out[new] = c.embed(target, offset)
    return GradedElement(target, out)


def product_structure(H1: ExtendedPoisson, H2: ExtendedPoisson) -> ExtendedPoisson:
    """``H1`` on the first factor plus the dual of ``H2`` on the second."""
    if H1.model.kind != H2.model.kind:
        raise ModelError("product of different model kinds")
    n1, n2 = H1.n, H2.n
    target = Model(H1.model.kind, n1 + n2)
    H2d = dual_structure(H2)
    parts = [embed_element(a, target, 0) + embed_element(b, target, n1) for a, b in ((H1.pi, H2d.pi), (H1.theta, H2d.theta), (H1.omega, H2d.omega))]
    return ExtendedPoisson(*parts)


def graph(f: LinearHolomorphicMap) -> LinearSubmanifold:
    """``{(f(z), z)}`` inside ``target x source``."""
    n1, n2 = f.target.n, f.source.n
    model = Model(f.source.kind, n1 + n2)
    basis = [list(f.matrix[i]) for i in range(n1)] + [[1 if i == j else 0 for j in range(n2)] for i in range(n2)]
    offset = list(f.translation) + [0] * n2
    return LinearSubmanifold(model, basis, None if model.is_torus else offset)


@dataclass
class PoissonMapReport:
    verdict: bool
    pi_residual: Dict[Tuple[int, int], CoeffFn]  # coefficient of d/dz_i ^ d/dz_j on the target, as a function on the source
    omega_residual: GradedElement
    theta_residual: List[List[CoeffFn]]
    graph_verdict: bool

    @property
    def consistent(self) -> bool:
        return self.verdict == self.graph_verdict


def _push_vector(f: LinearHolomorphicMap, i: int) -> GradedElement:
    """``f_* d/dz_i`` on the target."""
    out = GradedElement.zero(f.target)
    for r in range(f.target.n):
        c = f.matrix[r][i]
        if c:
            out = out + gen(f.target, D, r) * c
    return out


def _pull_form(f: LinearHolomorphicMap, r: int) -> GradedElement:
    """``f^* dzb_r`` on the source."""
    out = GradedElement.zero(f.source)
    for j in range(f.source.n):
        c = f.matrix[r][j]
        if c:
            out = out + gen(f.source, FB, j) * c.conjugate()
    return out


def _pull_coeffs(f: LinearHolomorphicMap, x: GradedElement) -> Dict[int, CoeffFn]:
    return {m: f.pullback(c) for m, c in x.items()}


def poisson_map_check(H1: ExtendedPoisson, H2: ExtendedPoisson, f: LinearHolomorphicMap) -> PoissonMapReport:
    """Conditions for ``f : (X2, H2) -> (X1, H1)``, cross-checked by coisotropy of the graph."""
    if f.source != H2.model or f.target != H1.model:
        raise ValueError("map does not go from the model of H2 to the model of H1")
    n1, n2 = H1.n, H2.n
    src = f.source
    # pi: push the source bivector forward, compare with pi_1 composed with f (coefficients on X2)
    pushed = {}
    for m, c in H2.pi.items():
        a, b = [g for g in range(n2) if m >> g & 1]
        comb = _push_vector(f, a) ^ _push_vector(f, b)
        for mm, cc in comb.items():
            pushed[mm] = pushed.get(mm, CoeffFn.zero(src)) + c * CoeffFn.constant(src, cc.constant_value())
    pi1f = _pull_coeffs(f, H1.pi)
    pi_terms: Dict[Tuple[int, int], CoeffFn] = {}
    for mm in sorted(set(pushed) | set(pi1f)):
        d = pushed.get(mm, CoeffFn.zero(src)) - pi1f.get(mm, CoeffFn.zero(src))
        if d:
            i, j = [g for g in range(n1) if mm >> g & 1]
            pi_terms[(i, j)] = d
    # omega: pull back omega_1, compare with omega_2
    pulled = GradedElement.zero(src)
    for m, c in H1.omega.items():
        r1, r2 = [g - FB * n1 for g in range(4 * n1) if m >> g & 1]
        pulled = pulled + (_pull_form(f, r1) ^ _pull_form(f, r2)) * f.pullback(c)
    omega_res = pulled - H2.omega
    # theta: A Theta_2 = (Theta_1 o f) conj(A), with Theta[p][i] = theta^p_i
    A = f.matrix
    zero = CoeffFn.zero(src)
    th_res = []
    for p in range(n1):
        row = []
        for i in range(n2):
            lhs = sum((H2.theta_coeff(q, i) * A[p][q] for q in range(n2) if A[p][q]), zero)
            rhs = sum((f.pullback(H1.theta_coeff(p, r)) * A[r][i].conjugate() for r in range(n1) if A[r][i]), zero)
            row.append(lhs - rhs)
        th_res.append(row)
    ok = not pi_terms and omega_res.is_zero() and all(not e for row in th_res for e in row)
    g = coisotropic_check(product_structure(H1, H2), graph(f)).verdict
    return PoissonMapReport(ok, pi_terms, omega_res, th_res, g)
