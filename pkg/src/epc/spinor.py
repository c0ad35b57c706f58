"""The line ``L = Lambda^{n,0}``, its twisted module structure, and the isomorphism ``tau``.

Sections of ``wedge A (x) L`` are written ``u (x) s`` with the global frame
``s = dz_1 ^ ... ^ dz_n``; a :class:`TwistedElement` stores only ``u``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Optional

from .algebroid import _astar_check, _components, anchor_H, apply_vector
from .coeff import CoeffFn, Model
from .exterior import (
    D,
    DB,
    F,
    FB,
    GradedElement,
    SpeciesError,
    bracket_del_iH,
    clifford_act,
    dolbeault,
    form_bidegree,
    gen,
    interior_H,
    species_mask,
    top_holomorphic,
    wedge_sign,
)
from .mcstruct import ExtendedPoisson, check_mc, twisted_delbar
from .sampling import pmap, random_polyvector, trial_rng

__all__ = [
    "TwistedElement",
    "nabla_H",
    "trace_vector",
    "dd_H",
    "bdelbar_star_H",
    "tau",
    "tau_inverse",
    "kb_differential",
    "Main1Report",
    "verify_main1",
    "modular_residual",
]


@dataclass(frozen=True)
class TwistedElement:
    """``u (x) s`` with ``u`` in ``Gamma(wedge A)``."""

    u: GradedElement

    def __post_init__(self):
        if not self.u.is_polyvector_A():
            raise SpeciesError("the wedge A factor must use d/dz and dzb only")

    @property
    def model(self) -> Model:
        return self.u.model

    @classmethod
    def s(cls, model: Model, g: CoeffFn | int = 1) -> "TwistedElement":
        return cls(GradedElement.scalar(model, g))

    def full(self) -> GradedElement:
        """The element ``u ^ dz_1 ^ ... ^ dz_n`` of the full exterior algebra."""
        return self.u ^ top_holomorphic(self.model)

    @classmethod
    def from_full(cls, x: GradedElement) -> "TwistedElement":
        """Inverse of :meth:`full`: strip the trailing ``dz_1 ^ ... ^ dz_n`` slot."""
        n = x.model.n
        slot = species_mask(n, F)
        out = {}
        for m, c in x.items():
            if m & slot != slot or m & species_mask(n, DB):
                raise SpeciesError("element is not of the form u ^ dz_1 ^ ... ^ dz_n")
            rest = m ^ slot
            out[rest] = c if wedge_sign(rest, slot) > 0 else -c
        return cls(GradedElement(x.model, out))

    def is_zero(self) -> bool:
        return self.u.is_zero()

    def __add__(self, other: "TwistedElement") -> "TwistedElement":
        return TwistedElement(self.u + other.u)

    def __sub__(self, other: "TwistedElement") -> "TwistedElement":
        return TwistedElement(self.u - other.u)

    def __neg__(self) -> "TwistedElement":
        return TwistedElement(-self.u)


def _div_trace(H: ExtendedPoisson):
    """``(2 d_p pi^{i,p})_i`` and ``(-d_p theta^p_i)_i``."""
    n, model = H.n, H.model
    hol, anti = [], []
    for i in range(n):
        a = CoeffFn.zero(model)
        b = CoeffFn.zero(model)
        for p in range(n):
            a = a + H.pi_coeff(i, p).wirtinger(p)
            b = b - H.theta_coeff(p, i).wirtinger(p)
        hol.append(a.scale(2))
        anti.append(b)
    return hol, anti


def trace_vector(H: ExtendedPoisson) -> GradedElement:
    """``V`` with ``D^H s = V (x) s``: ``sum_i 2 d_p pi^{i,p} d/dz_i - d_p theta^p_i dzb_i``."""
    hol, anti = _div_trace(H)
    model = H.model
    out = GradedElement.zero(model)
    for i in range(H.n):
        out = out + gen(model, D, i) * hol[i] + gen(model, FB, i) * anti[i]
    return out


def nabla_H(H: ExtendedPoisson, alpha: GradedElement, t: TwistedElement) -> TwistedElement:
    """``nabla^H_alpha (g s) = (a_*^H(alpha) g) s + g nabla^H_alpha s``."""
    _astar_check(alpha)
    if any(m for m, _ in t.u.items()):
        raise SpeciesError("nabla_H acts on sections g s of the line")
    model, n = H.model, H.n
    g = t.u.coeff(0)
    hol, anti = _div_trace(H)
    out = apply_vector(anchor_H(H, alpha), g)
    for gid, c in _components(alpha).items():
        s, i = divmod(gid, n)
        out = out + c * g * (hol[i] if s == F else anti[i])
    return TwistedElement.s(model, out)


def dd_H(H: ExtendedPoisson, t: TwistedElement) -> TwistedElement:
    """``D^H (g s) = (dbar^H g) (x) s + g V (x) s``."""
    if any(m for m, _ in t.u.items()):
        raise SpeciesError("dd_H acts on sections g s of the line")
    g = t.u
    return TwistedElement(twisted_delbar(H, g) + trace_vector(H) * g.coeff(0))


def bdelbar_star_H(H: ExtendedPoisson, x: TwistedElement) -> TwistedElement:
    """``(dbar^H u) (x) s + (-1)^k u ^ V (x) s`` on each homogeneous degree ``k``."""
    V = trace_vector(H)
    u = x.u
    out = twisted_delbar(H, u)
    for k in set(u.degrees()):
        uk = u.homogeneous(k)
        term = uk ^ V
        out = out + (term if k % 2 == 0 else -term)
    return TwistedElement(out)


def tau(x: TwistedElement) -> GradedElement:
    """``tau(u (x) s) = u . s`` (Clifford action on the top holomorphic form)."""
    return clifford_act(x.u, top_holomorphic(x.model))


@lru_cache(maxsize=None)
def _preimage(model: Model, mask: int):
    """The monomial ``u`` and sign with ``tau(u (x) s) = sign * mask``."""
    n = model.n
    q_part = mask & species_mask(n, F)
    qb_part = mask & species_mask(n, FB)
    p_bits = species_mask(n, F) ^ q_part  # holomorphic slots to be contracted away
    u_mask = (p_bits >> (2 * n)) | qb_part
    image = tau(TwistedElement(GradedElement._trusted(model, {u_mask: CoeffFn.constant(model, 1)})))
    terms = list(image.items())
    assert len(terms) == 1 and terms[0][0] == mask
    sign = terms[0][1].constant_value()
    return u_mask, sign


def tau_inverse(lam: GradedElement) -> TwistedElement:
    """Per-monomial inverse of :func:`tau`."""
    if not lam.is_form():
        raise SpeciesError("tau_inverse expects a form")
    model = lam.model
    out: Dict[int, CoeffFn] = {}
    for m, c in lam.items():
        u_mask, sign = _preimage(model, m)
        out[u_mask] = c.scale(sign.inverse())
    return TwistedElement(GradedElement(model, out))


def kb_differential(H: ExtendedPoisson, lam: GradedElement) -> GradedElement:
    """``dbar lam + [del, i_H] lam``."""
    if not lam.is_form():
        raise SpeciesError("kb_differential expects a form")
    return dolbeault(lam) + bracket_del_iH(H.H, lam)


@dataclass
class Main1Report:
    max_residual: Fraction
    mc_ok: bool
    trials: int
    max_degree: int
    per_degree: Dict[int, Fraction]

    @property
    def is_zero(self) -> bool:
        return self.max_residual == 0


def verify_main1(H: ExtendedPoisson, trials: int = 20, seed: int = 0, max_degree: int = 3) -> Main1Report:
    """Largest coefficient of ``tau(dbar_*^H x) - (dbar + [del, i_H]) tau(x)`` over random ``x``."""
    model = H.model
    mc_ok = check_mc(H).is_zero
    top = min(max_degree, 2 * model.n)

    def one(job):
        k, t = job
        x = TwistedElement(random_polyvector(model, k, trial_rng(seed, "main1", k, t)))
        r = tau(bdelbar_star_H(H, x)) - kb_differential(H, tau(x))
        return k, r.max_abs_coeff()

    per = {k: Fraction(0) for k in range(top + 1)}
    for k, r in pmap(one, [(k, t) for k in range(top + 1) for t in range(trials)]):
        per[k] = max(per[k], r)
    return Main1Report(max(per.values(), default=Fraction(0)), mc_ok, trials, top, per)


def modular_residual(H: ExtendedPoisson, omega0: GradedElement, nowhere_vanishing: Optional[bool] = None) -> GradedElement:
    """``dbar omega0 + del(i_H omega0)`` for an ``(n,0)``-form ``omega0``.

    A constant ``omega0`` is checked to be nonzero; for a nonconstant one
    the caller must vouch that it vanishes nowhere.
    """
    n = H.n
    if not omega0.is_form() or any(form_bidegree(m, n) != (n, 0) for m, _ in omega0.items()):
        raise SpeciesError("omega0 must be of type (n,0)")
    c = omega0.coeff(species_mask(n, F))
    if c.is_constant():
        if not c:
            raise ValueError("omega0 vanishes identically")
    elif not nowhere_vanishing:
        raise ValueError("pass nowhere_vanishing=True to use a nonconstant omega0")
    return dolbeault(omega0) + dolbeault(interior_H(H.H, omega0), bar=False)
