"""Independent reference computations used to cross-check the main implementation."""

from __future__ import annotations

from epc.algebroid import anchor_H, bracket_H
from epc.exterior import DB, F, GradedElement, clifford_act, dolbeault, gen, interior


def _parity(x: GradedElement) -> int:
    degs = set(d % 2 for d in x.degrees())
    assert len(degs) <= 1, "oracle expects elements of pure parity"
    return degs.pop() if degs else 0


def derived_bracket(u: GradedElement, v: GradedElement, lam: GradedElement) -> GradedElement:
    """``[u, v]`` acting on the form ``lam``, through graded commutators with ``d = del``.

    Uses only the Clifford action and the holomorphic de Rham operator:
    ``[u, v] . lam = (-1)^(q+1) [u, [v, del]] lam``.
    """
    p, q = _parity(u), _parity(v)
    d = lambda x: dolbeault(x, bar=False)
    act = clifford_act

    def inner(x):  # [v, del]
        return act(v, d(x)) - d(act(v, x)) * (-1) ** q

    out = act(u, inner(lam)) - inner(act(u, lam)) * (-1) ** (p * (q + 1))
    return out * (-1) ** (q + 1)


def bracket_by_action(u: GradedElement, v: GradedElement, schouten_result: GradedElement, lam: GradedElement) -> bool:
    return clifford_act(schouten_result, lam) == derived_bracket(u, v, lam)


def elw_square(H, alpha):
    """``nabla_alpha`` on ``(top of A^*) (x) (top of T^*)`` via brackets and a Lie derivative."""
    model, n = H.model, H.n
    frame = [gen(model, DB, i) for i in range(n)] + [gen(model, F, i) for i in range(n)]
    top = GradedElement.scalar(model, 1)
    for e in frame:
        top = top ^ e
    swapped = GradedElement.zero(model)
    for i in range(2 * n):
        t = GradedElement.scalar(model, 1)
        for j, e in enumerate(frame):
            t = t ^ (bracket_H(H, alpha, e) if i == j else e)
        swapped = swapped + t
    (m,) = top.terms
    mu = GradedElement.monomial(model, Q=range(n), Qb=range(n))
    (mm,) = mu.terms
    inner = interior(anchor_H(H, alpha), mu)
    lie = dolbeault(inner, bar=False) + dolbeault(inner)
    return swapped.coeff(m) * top.coeff(m) + lie.coeff(mm) * mu.coeff(mm)
