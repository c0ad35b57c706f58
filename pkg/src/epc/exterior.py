"""Quadri-graded exterior algebra over the flat frame.

The frame consists of ``4n`` odd generators in the fixed canonical order

    d/dz_1 .. d/dz_n,  d/dzb_1 .. d/dzb_n,  dz_1 .. dz_n,  dzb_1 .. dzb_n

and a monomial is stored as a bitmask over generator ids
``species * n + index``.  Reordering into canonical order is absorbed into
the coefficient sign, so two elements are equal iff their term dicts are.

Polyvectors of ``A = T^{1,0} + (T^{0,1})^*`` use the species ``D`` and
``FB``; forms use ``F`` and ``FB``; sections of ``A^*`` use ``DB`` and ``F``.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, Iterator, List, Tuple

from .coeff import CoeffFn, GaussianRational, Model, ModelError, Scalar

__all__ = [
    "D",
    "DB",
    "F",
    "FB",
    "SpeciesError",
    "GradedElement",
    "gen",
    "wedge",
    "interior",
    "contract",
    "dolbeault",
    "schouten",
    "clifford_act",
    "metric_E",
    "interior_H",
    "bracket_del_iH",
    "species_mask",
    "wedge_sign",
    "monomial_name",
    "monomial_indices",
    "format_element",
    "top_holomorphic",
    "a_generators",
    "astar_generators",
    "masks_of_degree",
    "polyvector_masks",
    "form_masks",
    "form_bidegree",
]

# species codes
D, DB, F, FB = 0, 1, 2, 3
_SPECIES_NAMES = ("d/dz", "d/dzb", "dz", "dzb")


class SpeciesError(ValueError):
    """An operand has frame factors outside the species the operation accepts."""


def species_mask(n: int, *species: int) -> int:
    full = (1 << n) - 1
    m = 0
    for s in species:
        m |= full << (s * n)
    return m


@lru_cache(maxsize=1 << 16)
def wedge_sign(m1: int, m2: int) -> int:
    """Sign of sorting the concatenation ``m1 m2`` into canonical order (0 if they overlap)."""
    if m1 & m2:
        return 0
    s = 0
    m = m2
    while m:
        b = m & -m
        s += (m1 & ~((b << 1) - 1)).bit_count()
        m ^= b
    return -1 if s & 1 else 1


def _left_sign(mask: int, g: int) -> int:
    """Sign of pulling generator ``g`` to the front of ``mask``."""
    return -1 if (mask & ((1 << g) - 1)).bit_count() & 1 else 1


def _right_sign(mask: int, g: int) -> int:
    """Sign of pushing generator ``g`` to the back of ``mask``."""
    return -1 if (mask >> (g + 1)).bit_count() & 1 else 1


def _gens(mask: int) -> List[int]:
    out = []
    while mask:
        b = mask & -mask
        out.append(b.bit_length() - 1)
        mask ^= b
    return out


class GradedElement:
    """Immutable finite sum of frame monomials with :class:`CoeffFn` coefficients."""

    __slots__ = ("model", "_terms", "_hash")

    def __init__(self, model: Model, terms: Dict[int, CoeffFn] | None = None):
        self.model = model
        clean = {}
        if terms:
            for m, c in terms.items():
                if not isinstance(c, CoeffFn):
                    c = CoeffFn.constant(model, c)
                elif c.model != model:
                    raise ModelError(f"model mismatch: {c.model} vs {model}")
                if c:
                    clean[m] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, model: Model, terms: Dict[int, CoeffFn]) -> "GradedElement":
        obj = cls.__new__(cls)
        obj.model = model
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors -----------------------------------------------------------

    @classmethod
    def zero(cls, model: Model) -> "GradedElement":
        return cls._trusted(model, {})

    @classmethod
    def scalar(cls, model: Model, f: CoeffFn | Scalar = 1) -> "GradedElement":
        if not isinstance(f, CoeffFn):
            f = CoeffFn.constant(model, f)
        return cls(model, {0: f})

    @classmethod
    def monomial(
        cls,
        model: Model,
        P: Iterable[int] = (),
        Pb: Iterable[int] = (),
        Q: Iterable[int] = (),
        Qb: Iterable[int] = (),
        coeff: CoeffFn | Scalar = 1,
    ) -> "GradedElement":
        """``coeff * d/dz_P ^ d/dzb_Pb ^ dz_Q ^ dzb_Qb`` with index lists taken in the given order."""
        el = cls.scalar(model, coeff)
        for s, idx in ((D, P), (DB, Pb), (F, Q), (FB, Qb)):
            for i in idx:
                el = el ^ gen(model, s, i)
        return el

    # access -------------------------------------------------------------------

    def items(self) -> Iterator[Tuple[int, CoeffFn]]:
        return iter(self._terms.items())

    @property
    def terms(self) -> Dict[int, CoeffFn]:
        return dict(self._terms)

    def coeff(self, mask: int) -> CoeffFn:
        return self._terms.get(mask, CoeffFn.zero(self.model))

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def degrees(self) -> List[int]:
        return sorted({m.bit_count() for m in self._terms})

    def degree(self) -> int:
        """Total degree of a homogeneous element (0 for zero)."""
        ds = self.degrees()
        if len(ds) > 1:
            raise ValueError("element is not homogeneous")
        return ds[0] if ds else 0

    def homogeneous(self, k: int) -> "GradedElement":
        return GradedElement._trusted(self.model, {m: c for m, c in self._terms.items() if m.bit_count() == k})

    def select(self, pred) -> "GradedElement":
        """Terms whose mask satisfies ``pred(mask)``."""
        return GradedElement._trusted(self.model, {m: c for m, c in self._terms.items() if pred(m)})

    def species_count(self, mask: int, s: int) -> int:
        return (mask & species_mask(self.model.n, s)).bit_count()

    def _only(self, allowed: int) -> bool:
        return all(not (m & ~allowed) for m in self._terms)

    def is_polyvector_A(self) -> bool:
        return self._only(species_mask(self.model.n, D, FB))

    def is_form(self) -> bool:
        return self._only(species_mask(self.model.n, F, FB))

    def is_section_Astar(self) -> bool:
        return self._only(species_mask(self.model.n, DB, F))

    def is_constant(self) -> bool:
        return all(c.is_constant() for c in self._terms.values())

    def frequency_radius(self) -> int:
        return max((c.frequency_radius() for c in self._terms.values()), default=0)

    # arithmetic ---------------------------------------------------------------

    def _check(self, other: "GradedElement") -> None:
        if other.model != self.model:
            raise ModelError(f"model mismatch: {self.model} vs {other.model}")

    def __add__(self, other: "GradedElement") -> "GradedElement":
        if not isinstance(other, GradedElement):
            return NotImplemented
        self._check(other)
        out = dict(self._terms)
        for m, c in other._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return GradedElement._trusted(self.model, out)

    def __neg__(self) -> "GradedElement":
        return GradedElement._trusted(self.model, {m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "GradedElement") -> "GradedElement":
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self + (-other)

    def __mul__(self, f) -> "GradedElement":
        """Multiplication by a coefficient function or scalar."""
        if isinstance(f, GradedElement):
            raise TypeError("use ^ (wedge) or clifford_act for products of graded elements")
        if isinstance(f, CoeffFn):
            if f.model != self.model:
                raise ModelError("model mismatch")
            out = {}
            for m, c in self._terms.items():
                p = c * f
                if p:
                    out[m] = p
            return GradedElement._trusted(self.model, out)
        try:
            c = GaussianRational.coerce(f)
        except TypeError:
            return NotImplemented
        if not c:
            return GradedElement.zero(self.model)
        return GradedElement._trusted(self.model, {m: v.scale(c) for m, v in self._terms.items()})

    __rmul__ = __mul__

    def __xor__(self, other: "GradedElement") -> "GradedElement":
        return wedge(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedElement):
            return NotImplemented
        return self.model == other.model and self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.model, frozenset(self._terms.items())))
        return self._hash

    def map_coeffs(self, fn) -> "GradedElement":
        return GradedElement(self.model, {m: fn(c) for m, c in self._terms.items()})

    def conjugate(self) -> "GradedElement":
        """Complex conjugation: coefficients conjugated, ``d/dz <-> d/dzb``, ``dz <-> dzb``."""
        n = self.model.n
        out = {}
        for m, c in self._terms.items():
            gens = _gens(m)
            swapped = [_conj_gen(g, n) for g in gens]
            # sign of resorting the swapped generator sequence
            el_mask, sign = 0, 1
            for g in swapped:
                s = wedge_sign(el_mask, 1 << g)
                sign *= s
                el_mask |= 1 << g
            out[el_mask] = c.conjugate().scale(sign)
        return GradedElement(self.model, out)

    def max_abs_coeff(self) -> Fraction:
        """Largest ``|re| + |im|`` over all scalar coefficients (exact), used as a residual size."""
        best = Fraction(0)
        for c in self._terms.values():
            for _, v in c.items():
                best = max(best, abs(v.re) + abs(v.im))
        return best

    def __repr__(self) -> str:
        return f"GradedElement({self.model}, {format_element(self)!r})"


def _conj_gen(g: int, n: int) -> int:
    s, i = divmod(g, n)
    return {D: DB, DB: D, F: FB, FB: F}[s] * n + i


def gen(model: Model, species: int, i: int) -> GradedElement:
    """A single frame generator (0-based index)."""
    if not 0 <= i < model.n:
        raise IndexError(f"index {i} out of range for {model}")
    if species not in (D, DB, F, FB):
        raise ValueError(f"unknown species {species}")
    return GradedElement._trusted(model, {1 << (species * model.n + i): CoeffFn.constant(model, 1)})


def monomial_name(mask: int, n: int) -> str:
    if mask == 0:
        return "1"
    parts = []
    for g in _gens(mask):
        s, i = divmod(g, n)
        parts.append(f"{_SPECIES_NAMES[s]}{i + 1}")
    return "^".join(parts)


def monomial_indices(mask: int, n: int) -> Tuple[Tuple[int, ...], ...]:
    """``(P, Pb, Q, Qb)`` index tuples of a monomial (0-based)."""
    out: List[List[int]] = [[], [], [], []]
    for g in _gens(mask):
        s, i = divmod(g, n)
        out[s].append(i)
    return tuple(tuple(x) for x in out)


def format_element(a: GradedElement) -> List[Tuple[str, str]]:
    from .frontend.parser import print_expr

    n = a.model.n
    return [(monomial_name(m, n), print_expr(c)) for m, c in sorted(a.items())]


def wedge(a: GradedElement, b: GradedElement) -> GradedElement:
    """Graded-commutative exterior product."""
    a._check(b)
    out: Dict[int, CoeffFn] = {}
    for m1, c1 in a._terms.items():
        for m2, c2 in b._terms.items():
            s = wedge_sign(m1, m2)
            if not s:
                continue
            p = c1 * c2
            if s < 0:
                p = -p
            m = m1 | m2
            prev = out.get(m)
            out[m] = p if prev is None else prev + p
    return GradedElement._trusted(a.model, {m: c for m, c in out.items() if c})


def _dual(g: int, n: int) -> int:
    return (g + 2 * n) % (4 * n)


def _iota_gen(g: int, a: GradedElement) -> Dict[int, CoeffFn]:
    """Left derivation removing the generator dual to ``g`` (with unit pairing)."""
    n = a.model.n
    h = _dual(g, n)
    bit = 1 << h
    out = {}
    for m, c in a._terms.items():
        if m & bit:
            out[m ^ bit] = c if _left_sign(m, h) > 0 else -c
    return out


def interior(alpha: GradedElement, a: GradedElement) -> GradedElement:
    """Contraction by a degree-one element as a left (anti)derivation.

    Each generator pairs to 1 with its dual (``d/dz_i`` with ``dz_i`` and
    ``d/dzb_i`` with ``dzb_i``), so this covers both ``i_X`` on forms and the
    contraction of ``A^*`` into polyvectors of ``A``.
    """
    alpha._check(a)
    total = GradedElement.zero(a.model)
    for m, c in alpha._terms.items():
        if m.bit_count() != 1:
            raise SpeciesError("interior expects a degree-one element")
        g = m.bit_length() - 1
        total = total + GradedElement._trusted(a.model, _iota_gen(g, a)) * c
    return total


def contract(W: GradedElement, xi: GradedElement) -> GradedElement:
    """``i_W xi`` with ``<i_W xi, X> = <xi, W ^ X>``.

    For ``W = v_1 ^ ... ^ v_w`` this is ``i_{v_w} o ... o i_{v_1}`` and
    ``<dz_I ^ dzb_J, d/dz_I ^ d/dzb_J> = +1`` for identically ordered indices.
    """
    W._check(xi)
    n = W.model.n
    vec = species_mask(n, D, DB)
    if any(m & ~vec for m in W._terms):
        raise SpeciesError("contract: W must be a polyvector")
    if not xi.is_form():
        raise SpeciesError("contract: xi must be a form")
    out: Dict[int, CoeffFn] = {}
    for mw, cw in W._terms.items():
        gens = _gens(mw)
        for mx, cx in xi._terms.items():
            sign, m = 1, mx
            for g in gens:
                h = _dual(g, n)
                if not m & (1 << h):
                    sign = 0
                    break
                sign *= _left_sign(m, h)
                m ^= 1 << h
            if not sign:
                continue
            p = cw * cx
            if sign < 0:
                p = -p
            prev = out.get(m)
            out[m] = p if prev is None else prev + p
    return GradedElement._trusted(W.model, {m: c for m, c in out.items() if c})


def dolbeault(a: GradedElement, bar: bool = True) -> GradedElement:
    """Flat-frame ``dbar`` (``bar=True``) or ``d`` (``bar=False``): ``sum_j d_j(c) dz(b)_j ^ m``."""
    model = a.model
    n = model.n
    species = FB if bar else F
    out: Dict[int, CoeffFn] = {}
    for m, c in a._terms.items():
        for j in range(n):
            g = 1 << (species * n + j)
            if m & g:
                continue
            dc = c.wirtinger(j, bar)
            if not dc:
                continue
            s = wedge_sign(g, m)
            if s < 0:
                dc = -dc
            key = m | g
            prev = out.get(key)
            out[key] = dc if prev is None else prev + dc
    return GradedElement._trusted(model, {m: c for m, c in out.items() if c})


def schouten(u: GradedElement, v: GradedElement) -> GradedElement:
    """Gerstenhaber bracket of ``A = T^{1,0} |><| (T^{0,1})^*``.

    Leibniz extension of ``[d/dz_i, f] = d f / dz_i`` with all frame
    brackets zero and ``dzb_j`` having zero anchor.  With ``xi_i = d/dz_i``
    treated as odd momenta::

        [u, v] = sum_i (u <d/dxi_i) (d_i v) - (-1)^{(p-1)(q-1)} (v <d/dxi_i) (d_i u)

    where ``<d/dxi`` is the right derivative and ``d_i`` the holomorphic
    Wirtinger derivative acting on coefficients.
    """
    u._check(v)
    if not (u.is_polyvector_A() and v.is_polyvector_A()):
        raise SpeciesError("schouten: operands must lie in Gamma(wedge A)")
    n = u.model.n
    out: Dict[int, CoeffFn] = {}

    def acc(mask, c):
        prev = out.get(mask)
        out[mask] = c if prev is None else prev + c

    dv_cache: Dict[Tuple[int, int], CoeffFn] = {}
    du_cache: Dict[Tuple[int, int], CoeffFn] = {}
    for mu, f in u._terms.items():
        p = mu.bit_count()
        for mv, g in v._terms.items():
            q = mv.bit_count()
            swap = -1 if ((p - 1) * (q - 1)) & 1 else 1
            for i in range(n):
                bit = 1 << i  # species D
                if mu & bit:
                    key = (mv, i)
                    dg = dv_cache.get(key)
                    if dg is None:
                        dg = dv_cache[key] = g.wirtinger(i)
                    if dg:
                        rest = mu ^ bit
                        s = _right_sign(mu, i) * wedge_sign(rest, mv)
                        if s:
                            acc(rest | mv, (f * dg) if s > 0 else -(f * dg))
                if mv & bit:
                    key = (mu, i)
                    df = du_cache.get(key)
                    if df is None:
                        df = du_cache[key] = f.wirtinger(i)
                    if df:
                        rest = mv ^ bit
                        s = -swap * _right_sign(mv, i) * wedge_sign(rest, mu)
                        if s:
                            acc(rest | mu, (g * df) if s > 0 else -(g * df))
    return GradedElement._trusted(u.model, {m: c for m, c in out.items() if c})


def clifford_act(x: GradedElement, lam: GradedElement) -> GradedElement:
    """Spinor action ``(W (x) xi) . lam = (-1)^{w(w-1)/2} i_W (xi ^ lam)``, extended linearly."""
    x._check(lam)
    if not lam.is_form():
        raise SpeciesError("clifford_act: lambda must be a form")
    n = x.model.n
    vec = species_mask(n, D, DB)
    total = GradedElement.zero(x.model)
    for m, c in x._terms.items():
        W = m & vec
        xi = m & ~vec
        w = W.bit_count()
        xi_el = GradedElement._trusted(x.model, {xi: c})
        t = wedge(xi_el, lam)
        t = contract(GradedElement._trusted(x.model, {W: CoeffFn.constant(x.model, 1)}), t)
        if (w * (w - 1) // 2) & 1:
            t = -t
        total = total + t
    return total


def metric_E(x: GradedElement, y: GradedElement) -> CoeffFn:
    """``<X1 + xi1, X2 + xi2> = (xi1(X2) + xi2(X1)) / 2`` on degree-one elements."""
    x._check(y)
    n = x.model.n
    if any(m.bit_count() != 1 for m in x._terms) or any(m.bit_count() != 1 for m in y._terms):
        raise SpeciesError("metric_E expects degree-one elements of E")
    total = CoeffFn.zero(x.model)
    for m1, c1 in x._terms.items():
        g = m1.bit_length() - 1
        c2 = y._terms.get(1 << _dual(g, n))
        if c2 is not None:
            total = total + c1 * c2
    return total.scale(GaussianRational(Fraction(1, 2)))


def interior_H(H: GradedElement, lam: GradedElement) -> GradedElement:
    """``i_H lam = -H . lam`` for ``H`` in ``Gamma(wedge^2 A)``."""
    if not H.is_polyvector_A() or any(m.bit_count() != 2 for m, _ in H.items()):
        raise SpeciesError("interior_H: H must be a degree-two element of wedge A")
    return -clifford_act(H, lam)


def bracket_del_iH(H: GradedElement, lam: GradedElement) -> GradedElement:
    """``[d, i_H] lam = d(i_H lam) - i_H(d lam)``."""
    return dolbeault(interior_H(H, lam), bar=False) - interior_H(H, dolbeault(lam, bar=False))


def top_holomorphic(model: Model, coeff: CoeffFn | Scalar = 1) -> GradedElement:
    """``coeff * dz_1 ^ ... ^ dz_n``."""
    return GradedElement.monomial(model, Q=range(model.n), coeff=coeff)


def a_generators(model: Model) -> List[GradedElement]:
    """Frame of ``A``: ``d/dz_i`` then ``dzb_i``."""
    return [gen(model, D, i) for i in range(model.n)] + [gen(model, FB, i) for i in range(model.n)]


def astar_generators(model: Model) -> List[GradedElement]:
    """Frame of ``A^*``: ``d/dzb_i`` then ``dz_i``."""
    return [gen(model, DB, i) for i in range(model.n)] + [gen(model, F, i) for i in range(model.n)]


def masks_of_degree(n: int, k: int, allowed: int) -> List[int]:
    """All monomial masks of degree ``k`` inside ``allowed``, ascending."""
    from itertools import combinations

    bits = _gens(allowed)
    return sorted(sum(1 << b for b in combo) for combo in combinations(bits, k))


def polyvector_masks(n: int, k: int) -> List[int]:
    return masks_of_degree(n, k, species_mask(n, D, FB))


def form_masks(n: int, p: int | None = None, q: int | None = None) -> List[int]:
    allowed = species_mask(n, F, FB)
    out = []
    for k in range(0, 2 * n + 1):
        for m in masks_of_degree(n, k, allowed):
            i = (m & species_mask(n, F)).bit_count()
            j = (m & species_mask(n, FB)).bit_count()
            if (p is None or i == p) and (q is None or j == q):
                out.append(m)
    return sorted(out)


def form_bidegree(mask: int, n: int) -> Tuple[int, int]:
    return (mask & species_mask(n, F)).bit_count(), (mask & species_mask(n, FB)).bit_count()
