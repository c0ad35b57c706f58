"""Fourier truncations of the Lichnerowicz-Poisson and Koszul-Brylinski complexes on tori.

A basis element is a pair ``(mask, mode)`` with ``mode = (k, l)`` a
character ``e[k; l]`` of sup-norm at most the cutoff.  When ``H`` has
constant coefficients both differentials preserve the mode, so each mode
block is an exact finite complex and homology is computed block by block.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .algebroid import check_elliptic
from .coeff import CoeffFn, GaussianRational, Model
from .exterior import (
    F,
    FB,
    GradedElement,
    form_bidegree,
    masks_of_degree,
    polyvector_masks,
    species_mask,
    top_holomorphic,
)
from .linalg import Vec, complement, compose_columns, dense, nullspace, rank, rank_bareiss
from .mcstruct import ExtendedPoisson, twisted_delbar
from .sampling import pmap
from .spinor import kb_differential, modular_residual

__all__ = [
    "SpectralError",
    "SpectralComplex",
    "assemble",
    "HomologyReport",
    "homology_dims",
    "PairingReport",
    "pairing_matrix",
    "duality_report",
]

Mode = Tuple[Tuple[int, ...], Tuple[int, ...]]


class SpectralError(ValueError):
    pass


def _modes(n: int, M: int) -> List[Mode]:
    rng = range(-M, M + 1)
    return [(tuple(v[:n]), tuple(v[n:])) for v in itertools.product(rng, repeat=2 * n)]


def _neg(mode: Mode) -> Mode:
    return tuple(-x for x in mode[0]), tuple(-x for x in mode[1])


def degree_masks(n: int, kind: str, k: int) -> List[int]:
    """Monomials spanning degree ``k``: ``wedge^k A`` for LP, ``i - j = n - k`` forms for KB."""
    if kind == "lp":
        return polyvector_masks(n, k)
    if kind == "kb":
        allowed = species_mask(n, F, FB)
        out = []
        for d in range(2 * n + 1):
            out.extend(m for m in masks_of_degree(n, d, allowed) if form_bidegree(m, n)[0] - form_bidegree(m, n)[1] == n - k)
        return sorted(out)
    raise SpectralError(f"unknown complex kind {kind!r} (use 'kb' or 'lp')")


@dataclass
class SpectralComplex:
    H: ExtendedPoisson
    kind: str
    cutoff: int
    spaces: List[List[Tuple[int, Mode]]]
    differentials: List[List[Vec]]
    mode_diagonal: bool
    leaked_columns: List[List[int]] = field(default_factory=list)

    @property
    def model(self) -> Model:
        return self.H.model

    @property
    def top(self) -> int:
        return len(self.spaces) - 1

    def dims(self) -> List[int]:
        return [len(s) for s in self.spaces]

    def element(self, k: int, vec: Vec) -> GradedElement:
        """The graded element represented by a coordinate vector in degree ``k``."""
        model = self.model
        terms: Dict[int, CoeffFn] = {}
        for idx, c in vec.items():
            mask, mode = self.spaces[k][idx]
            f = CoeffFn.character(model, *mode).scale(c)
            terms[mask] = terms[mask] + f if mask in terms else f
        return GradedElement(model, terms)

    def mode_block(self, k: int, mode: Mode) -> List[int]:
        return [i for i, (_, md) in enumerate(self.spaces[k]) if md == mode]

    def d_squared_is_zero(self) -> bool:
        for k in range(self.top - 1):
            comp = compose_columns(self.differentials[k + 1], self.differentials[k])
            if any(comp_col for comp_col in comp):
                return False
        return True


def _operator(H: ExtendedPoisson, kind: str) -> Callable[[GradedElement], GradedElement]:
    if kind == "lp":
        return lambda u: twisted_delbar(H, u)
    return lambda lam: kb_differential(H, lam)


def assemble(H: ExtendedPoisson, kind: str, M: int) -> SpectralComplex:
    """Matrices of the truncated differentials, one column per basis element."""
    model = H.model
    if not model.is_torus:
        raise SpectralError("spectral truncation needs a torus model")
    if M < 0:
        raise SpectralError("cutoff must be nonnegative")
    kind = kind.lower()
    n = model.n
    modes = _modes(n, M)
    spaces = [[(m, md) for md in modes for m in degree_masks(n, kind, k)] for k in range(2 * n + 1)]
    index = [{b: i for i, b in enumerate(sp)} for sp in spaces]
    op = _operator(H, kind)
    mode_diag = H.is_constant()

    def column(job):
        k, (mask, mode) = job
        el = GradedElement._trusted(model, {mask: CoeffFn.character(model, *mode)})
        img = op(el)
        col: Vec = {}
        leaked = False
        for m, c in img.items():
            for key, v in c.items():
                i = index[k + 1].get((m, key))
                if i is None:
                    leaked = True
                    continue
                col[i] = v
        return col, leaked

    diffs, leaks = [], []
    for k in range(2 * n):
        res = pmap(column, [(k, b) for b in spaces[k]])
        diffs.append([c for c, _ in res])
        leaks.append([j for j, (_, lk) in enumerate(res) if lk])
    if mode_diag and any(leaks):
        raise SpectralError("internal error: a mode-diagonal differential left the cutoff")
    return SpectralComplex(H, kind, M, spaces, diffs, mode_diag, leaks)


def _block_ranks(C: SpectralComplex) -> List[int]:
    """``rank d_k`` for each ``k``, summed over mode blocks with fraction-free elimination."""
    n = C.model.n
    modes = _modes(n, C.cutoff)

    def per_mode(mode):
        out = []
        for k in range(C.top):
            src = C.mode_block(k, mode)
            tgt = C.mode_block(k + 1, mode)
            pos = {j: t for t, j in enumerate(tgt)}
            cols = [{pos[i]: v for i, v in C.differentials[k][j].items()} for j in src]
            out.append(rank_bareiss(dense(cols, len(tgt))) if cols and tgt else 0)
        return out

    totals = [0] * C.top
    for ranks in pmap(per_mode, modes):
        for k, r in enumerate(ranks):
            totals[k] += r
    return totals


def _ranks(C: SpectralComplex) -> List[int]:
    if C.mode_diagonal:
        return _block_ranks(C)
    return [rank(col for col in C.differentials[k]) for k in range(C.top)]


def _dims_from_ranks(C: SpectralComplex, ranks: Sequence[int]) -> List[int]:
    out = []
    for k, dim in enumerate(C.dims()):
        r_out = ranks[k] if k < C.top else 0
        r_in = ranks[k - 1] if k > 0 else 0
        out.append(dim - r_out - r_in)
    return out


@dataclass
class HomologyReport:
    kind: str
    cutoff: int
    dims: List[int]
    exact: bool
    ranks: List[int]
    stabilized: Optional[bool] = None
    dims_next: Optional[List[int]] = None


def homology_dims(C: SpectralComplex, heuristic: bool = False) -> HomologyReport:
    """``dim ker - dim im`` in each degree.

    Exact for mode-diagonal complexes.  Otherwise ``heuristic=True`` is
    required; the truncation is repeated at cutoff ``M + 1`` and the report
    says whether the numbers agree.
    """
    if C.mode_diagonal:
        ranks = _ranks(C)
        return HomologyReport(C.kind, C.cutoff, _dims_from_ranks(C, ranks), True, ranks)
    if not heuristic:
        raise SpectralError("H has nonconstant coefficients: the truncation is not a subcomplex (use heuristic mode)")
    ranks = _ranks(C)
    dims = _dims_from_ranks(C, ranks)
    C2 = assemble(C.H, C.kind, C.cutoff + 1)
    dims2 = _dims_from_ranks(C2, _ranks(C2))
    return HomologyReport(C.kind, C.cutoff, dims, False, ranks, dims == dims2, dims2)


def _representatives(C: SpectralComplex, k: int) -> List[Vec]:
    """Basis of a complement of ``im d_{k-1}`` inside ``ker d_k``, built mode by mode."""
    out: List[Vec] = []
    for mode in _modes(C.model.n, C.cutoff):
        block = C.mode_block(k, mode)
        if k < C.top:
            ker_local = nullspace([C.differentials[k][j] for j in block])
            ker = [{block[t]: v for t, v in vec.items()} for vec in ker_local]
        else:
            ker = [{j: GaussianRational(1)} for j in block]
        img = []
        if k > 0:
            for j in C.mode_block(k - 1, mode):
                col = C.differentials[k - 1][j]
                if col:
                    img.append(dict(col))
        out.extend(complement(img, ker))
    return out


@dataclass
class PairingReport:
    degree: int
    matrix: List[List[GaussianRational]]
    rank: int
    dim: int
    dual_dim: int

    @property
    def nondegenerate(self) -> bool:
        return self.rank == self.dim == self.dual_dim


def _top_integral(a: GradedElement, b: GradedElement) -> GaussianRational:
    n = a.model.n
    w = a ^ b
    return w.coeff(species_mask(n, F, FB)).integrate_torus()


def pairing_matrix(H: ExtendedPoisson, k: int, M: int, complex_: Optional[SpectralComplex] = None) -> PairingReport:
    """``integral(zeta ^ eta)`` between representatives of ``H_k`` and ``H_{2n-k}`` (KB)."""
    n = H.n
    if not 0 <= k <= 2 * n:
        raise SpectralError(f"degree {k} outside 0..{2 * n}")
    C = complex_ if complex_ is not None else assemble(H, "kb", M)
    if not C.mode_diagonal:
        raise SpectralError("the pairing is only computed exactly for constant-coefficient H")
    left = [C.element(k, v) for v in _representatives(C, k)]
    right = [C.element(2 * n - k, v) for v in _representatives(C, 2 * n - k)]
    mat = [[_top_integral(a, b) for b in right] for a in left]
    r = rank_bareiss(mat) if mat and right else 0
    return PairingReport(k, mat, r, len(left), len(right))


@dataclass
class DualityRow:
    check: str
    degree: int
    lhs: int
    rhs: int
    status: str


@dataclass
class DualityReport:
    kb_dims: List[int]
    lp_dims: List[int]
    pairing_ranks: List[int]
    unimodular: bool
    elliptic: bool
    rows: List[DualityRow]

    @property
    def passed(self) -> bool:
        return all(r.status != "fail" for r in self.rows)


def duality_report(H: ExtendedPoisson, M: int) -> DualityReport:
    """Compare KB homology with itself (degree ``2n-k``), with the pairing, and with LP cohomology."""
    n = H.n
    kb = assemble(H, "kb", M)
    lp = assemble(H, "lp", M)
    kb_dims = homology_dims(kb).dims
    lp_dims = homology_dims(lp).dims
    pairs = [pairing_matrix(H, k, M, kb) for k in range(2 * n + 1)]
    unimodular = modular_residual(H, top_holomorphic(H.model)).is_zero()
    elliptic = check_elliptic(H).verdict

    def status(ok: bool) -> str:
        return "pass" if ok else "fail"

    rows = []
    for k in range(2 * n + 1):
        rows.append(DualityRow("kb_symmetry", k, kb_dims[k], kb_dims[2 * n - k], status(kb_dims[k] == kb_dims[2 * n - k])))
    for k, p in enumerate(pairs):
        # non-degeneracy is only asserted for elliptic structures
        st = status(p.nondegenerate) if elliptic else "info"
        rows.append(DualityRow("pairing_rank", k, p.rank, kb_dims[k], st))
    if unimodular:
        for k in range(2 * n + 1):
            rows.append(DualityRow("kb_vs_lp_dual", k, kb_dims[k], lp_dims[2 * n - k], status(kb_dims[k] == lp_dims[2 * n - k])))
        for k in range(2 * n + 1):
            rows.append(DualityRow("kb_vs_lp_same", k, kb_dims[k], lp_dims[k], status(kb_dims[k] == lp_dims[k])))
    return DualityReport(kb_dims, lp_dims, [p.rank for p in pairs], unimodular, elliptic, rows)
