"""Extended Poisson structures ``H = pi + theta + omega`` and their Maurer-Cartan checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Mapping, Tuple

from .coeff import CoeffFn, GaussianRational, Model, ModelError, Scalar
from .exterior import (
    D,
    FB,
    GradedElement,
    SpeciesError,
    dolbeault,
    gen,
    schouten,
    species_mask,
)
from .sampling import pmap, random_polyvector, trial_rng

__all__ = [
    "MCViolation",
    "ExtendedPoisson",
    "MCReport",
    "D2Report",
    "decompose",
    "check_mc",
    "scale_family",
    "twisted_delbar",
    "check_d2",
]

HALF = GaussianRational(Fraction(1, 2))


class MCViolation(ValueError):
    """Raised when an operation requires a Maurer-Cartan element and gets something else."""


def _grade(mask: int, n: int) -> Tuple[int, int]:
    return (mask & species_mask(n, D)).bit_count(), (mask & species_mask(n, FB)).bit_count()


@dataclass(frozen=True)
class ExtendedPoisson:
    """The triple ``(pi, theta, omega)`` of an element of ``Gamma(wedge^2 A)``.

    ``pi`` lives in ``T^{2,0}``, ``theta`` in ``T^{1,0} (x) Lambda^{0,1}`` and
    ``omega`` in ``Lambda^{0,2}``, all stored as graded elements whose
    coefficients are those of ``H`` itself (so ``pi = c d/dz_1 ^ d/dz_2``
    means the antisymmetric tensor has ``pi^{12} = c/2``).
    """

    pi: GradedElement
    theta: GradedElement
    omega: GradedElement

    def __post_init__(self):
        model = self.pi.model
        if self.theta.model != model or self.omega.model != model:
            raise ModelError("components live on different models")
        n = model.n
        for name, el, want in (("pi", self.pi, (2, 0)), ("theta", self.theta, (1, 1)), ("omega", self.omega, (0, 2))):
            if not el.is_polyvector_A():
                raise SpeciesError(f"{name} is not a section of wedge A")
            for m, _ in el.items():
                if _grade(m, n) != want:
                    raise SpeciesError(f"{name} has a term of grade {_grade(m, n)}, expected {want}")

    @property
    def model(self) -> Model:
        return self.pi.model

    @property
    def n(self) -> int:
        return self.pi.model.n

    @property
    def H(self) -> GradedElement:
        return self.pi + self.theta + self.omega

    @classmethod
    def zero(cls, model: Model) -> "ExtendedPoisson":
        z = GradedElement.zero(model)
        return cls(z, z, z)

    @classmethod
    def from_tables(
        cls,
        model: Model,
        pi: Mapping[Tuple[int, int], CoeffFn | Scalar] | None = None,
        theta: Mapping[Tuple[int, int], CoeffFn | Scalar] | None = None,
        omega: Mapping[Tuple[int, int], CoeffFn | Scalar] | None = None,
    ) -> "ExtendedPoisson":
        """Build from 0-based coefficient tables of ``H``.

        ``pi[(i, j)]`` (``i < j``) is the coefficient of ``d/dz_i ^ d/dz_j``,
        ``theta[(p, q)]`` that of ``d/dz_p ^ dzb_q`` and ``omega[(k, l)]``
        (``k < l``) that of ``dzb_k ^ dzb_l``.
        """
        n = model.n
        zero = GradedElement.zero(model)
        parts = []
        for table, sp, ordered in ((pi, (D, D), True), (theta, (D, FB), False), (omega, (FB, FB), True)):
            el = zero
            for (a, b), c in (table or {}).items():
                if not (0 <= a < n and 0 <= b < n):
                    raise IndexError(f"index pair {(a + 1, b + 1)} out of range for n={n}")
                if ordered and a >= b:
                    raise ValueError(f"key {(a + 1, b + 1)} violates the i<j convention")
                el = el + (gen(model, sp[0], a) ^ gen(model, sp[1], b)) * _coeff(model, c)
            parts.append(el)
        return cls(*parts)

    # local coefficient functions ------------------------------------------------

    def pi_coeff(self, i: int, j: int) -> CoeffFn:
        """Antisymmetric ``pi^{i,j}`` with ``H = sum_{i,j} pi^{i,j} d/dz_i ^ d/dz_j``."""
        if i == j:
            return CoeffFn.zero(self.model)
        lo, hi = min(i, j), max(i, j)
        c = self.pi.coeff((1 << lo) | (1 << hi)).scale(HALF)
        return c if i < j else -c

    def theta_coeff(self, p: int, q: int) -> CoeffFn:
        """``theta^p_q`` with ``theta = sum theta^p_q d/dz_p ^ dzb_q``."""
        n = self.n
        return self.theta.coeff((1 << p) | (1 << (FB * n + q)))

    def omega_coeff(self, k: int, l: int) -> CoeffFn:
        """Antisymmetric ``omega_{k,l}`` with ``omega = sum_{k,l} omega_{k,l} dzb_k ^ dzb_l``."""
        if k == l:
            return CoeffFn.zero(self.model)
        n = self.n
        lo, hi = min(k, l), max(k, l)
        c = self.omega.coeff((1 << (FB * n + lo)) | (1 << (FB * n + hi))).scale(HALF)
        return c if k < l else -c

    def is_constant(self) -> bool:
        return self.H.is_constant()

    def frequency_radius(self) -> int:
        return self.H.frequency_radius()


def _coeff(model: Model, c) -> CoeffFn:
    return c if isinstance(c, CoeffFn) else CoeffFn.constant(model, c)


def decompose(H: GradedElement) -> ExtendedPoisson:
    """Split a degree-two section of ``wedge A`` into ``(pi, theta, omega)``."""
    if not H.is_polyvector_A():
        raise SpeciesError("H must be a section of wedge A")
    if any(m.bit_count() != 2 for m, _ in H.items()):
        raise SpeciesError("H must have total degree 2")
    n = H.model.n
    return ExtendedPoisson(
        H.select(lambda m: _grade(m, n) == (2, 0)),
        H.select(lambda m: _grade(m, n) == (1, 1)),
        H.select(lambda m: _grade(m, n) == (0, 2)),
    )


@dataclass(frozen=True)
class MCReport:
    r_omega: GradedElement
    r_theta: GradedElement
    r_pi: GradedElement
    r_pipi: GradedElement
    total: GradedElement
    consistent: bool

    @property
    def is_zero(self) -> bool:
        return self.total.is_zero()

    def components(self) -> Dict[str, GradedElement]:
        return {"R_omega": self.r_omega, "R_theta": self.r_theta, "R_pi": self.r_pi, "R_pipi": self.r_pipi, "R": self.total}


def check_mc(H: ExtendedPoisson) -> MCReport:
    """Residuals of the four component equations and of ``dbar H + [H, H]/2``."""
    pi, theta, omega = H.pi, H.theta, H.omega
    r_omega = dolbeault(omega) + schouten(omega, theta)
    r_theta = dolbeault(theta) + schouten(omega, pi) + schouten(theta, theta) * HALF
    r_pi = dolbeault(pi) + schouten(theta, pi)
    r_pipi = schouten(pi, pi)
    h = H.H
    total = dolbeault(h) + schouten(h, h) * HALF
    consistent = total == r_omega + r_theta + r_pi + r_pipi * HALF
    return MCReport(r_omega, r_theta, r_pi, r_pipi, total, consistent)


def scale_family(H: ExtendedPoisson, lam: Scalar) -> ExtendedPoisson:
    """``(lam pi, theta, omega / lam)``."""
    lam = GaussianRational.coerce(lam)
    if not lam:
        raise ValueError("the scaling parameter must be nonzero")
    return ExtendedPoisson(H.pi * lam, H.theta, H.omega * lam.inverse())


def twisted_delbar(H: ExtendedPoisson, u: GradedElement) -> GradedElement:
    """``dbar^H u = dbar u + [H, u]``."""
    if not u.is_polyvector_A():
        raise SpeciesError("twisted_delbar: u must be a section of wedge A")
    return dolbeault(u) + schouten(H.H, u)


@dataclass
class D2Report:
    max_residual: Fraction
    mc_ok: bool
    trials: int
    max_degree: int
    per_degree: Dict[int, Fraction] = field(default_factory=dict)

    @property
    def is_zero(self) -> bool:
        return self.max_residual == 0


def check_d2(H: ExtendedPoisson, max_degree: int = 3, trials: int = 20, seed: int = 0) -> D2Report:
    """Apply ``dbar^H`` twice to ``trials`` random elements of each degree ``<= max_degree``.

    The residual is the largest ``|re| + |im|`` among the output coefficients;
    it is exactly zero iff ``(dbar^H)^2`` vanished on every sample.
    """
    mc_ok = check_mc(H).is_zero
    model = H.model
    top = min(max_degree, 2 * model.n)

    def one(job):
        k, t = job
        u = random_polyvector(model, k, trial_rng(seed, "d2", k, t))
        return k, twisted_delbar(H, twisted_delbar(H, u)).max_abs_coeff()

    per: Dict[int, Fraction] = {k: Fraction(0) for k in range(top + 1)}
    for k, r in pmap(one, [(k, t) for k in range(top + 1) for t in range(trials)]):
        per[k] = max(per[k], r)
    return D2Report(max(per.values(), default=Fraction(0)), mc_ok, trials, top, per)
