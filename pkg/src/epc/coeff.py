"""Exact coefficient rings for the two flat models.

A :class:`CoeffFn` is a finite sum of monomials with :class:`GaussianRational`
coefficients.  On a chart the monomials are ``z^a zb^b``; on a torus they are
the characters ``e[k;l] = exp(2 pi i (k.x + l.y))`` with ``z = x + i y``.

Torus derivations drop the global factor ``pi``::

    d/dz_j  e[k;l] = (i k_j + l_j) e[k;l]
    d/dzb_j e[k;l] = (i k_j - l_j) e[k;l]

Every operator built on top of these is first order in the derivations, so a
uniform rescaling leaves all identities, kernels and ranks untouched.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Dict, Iterable, Iterator, Sequence, Tuple, Union

__all__ = [
    "GaussianRational",
    "GQ",
    "Model",
    "Chart",
    "Torus",
    "ModelError",
    "CoeffFn",
    "wirtinger",
    "conjugate",
    "evaluate",
    "integrate_torus",
]


class ModelError(ValueError):
    """Operation not defined for the model (or models disagree)."""


class GaussianRational:
    """Exact element ``(a + b i) / d`` of Q(i).

    Stored as three integers with ``d > 0`` and ``gcd(a, b, d) == 1``.
    """

    __slots__ = ("_a", "_b", "_d", "_hash")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational):
            if im:
                raise TypeError("imaginary part must be rational")
            self._a, self._b, self._d = re._a, re._b, re._d
            self._hash = None
            return
        re = Fraction(re)
        im = Fraction(im)
        d = re.denominator * im.denominator // math.gcd(re.denominator, im.denominator)
        self._set(re.numerator * (d // re.denominator), im.numerator * (d // im.denominator), d)

    def _set(self, a: int, b: int, d: int) -> None:
        if d != 1:
            g = math.gcd(math.gcd(a, b), d)
            if g != 1:
                a //= g
                b //= g
                d //= g
        self._a, self._b, self._d = a, b, d
        self._hash = None

    @classmethod
    def _raw(cls, a: int, b: int, d: int) -> "GaussianRational":
        obj = cls.__new__(cls)
        if d < 0:
            a, b, d = -a, -b, -d
        obj._set(a, b, d)
        return obj

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Rational)):
            return cls(x)
        if isinstance(x, complex):
            raise TypeError("floating complex values are not exact; use GaussianRational")
        raise TypeError(f"cannot coerce {type(x).__name__} to GaussianRational")

    @property
    def re(self) -> Fraction:
        return Fraction(self._a, self._d)

    @property
    def im(self) -> Fraction:
        return Fraction(self._b, self._d)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._raw(self._a, -self._b, self._d)

    def norm2(self) -> Fraction:
        """``|x|^2`` as an exact rational."""
        return Fraction(self._a * self._a + self._b * self._b, self._d * self._d)

    def is_gaussian_integer(self) -> bool:
        return self._d == 1

    def __complex__(self) -> complex:
        return complex(self._a / self._d, self._b / self._d)

    def __bool__(self) -> bool:
        return bool(self._a or self._b)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GaussianRational):
            try:
                other = GaussianRational.coerce(other)
            except TypeError:
                return NotImplemented
        return self._a == other._a and self._b == other._b and self._d == other._d

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self._a, self._b, self._d))
        return self._hash

    def __neg__(self) -> "GaussianRational":
        return GaussianRational._raw(-self._a, -self._b, self._d)

    def __add__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        if self._d == o._d:
            return GaussianRational._raw(self._a + o._a, self._b + o._b, self._d)
        return GaussianRational._raw(
            self._a * o._d + o._a * self._d, self._b * o._d + o._b * self._d, self._d * o._d
        )

    __radd__ = __add__

    def __sub__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        a, b, c, e = self._a, self._b, o._a, o._b
        return GaussianRational._raw(a * c - b * e, a * e + b * c, self._d * o._d)

    __rmul__ = __mul__

    def inverse(self) -> "GaussianRational":
        if not self:
            raise ZeroDivisionError("GaussianRational division by zero")
        n = self._a * self._a + self._b * self._b
        return GaussianRational._raw(self._a * self._d, -self._b * self._d, n)

    def __truediv__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) * self.inverse()

    def __pow__(self, k: int) -> "GaussianRational":
        if k < 0:
            return self.inverse() ** (-k)
        out = GaussianRational(1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __repr__(self) -> str:
        return f"GQ({self})"

    def __str__(self) -> str:
        re, im = self.re, self.im
        if not im:
            return str(re)
        if not re:
            return f"{im}i"
        sign = "+" if im > 0 else "-"
        return f"{re}{sign}{abs(im)}i"


GQ = GaussianRational
ZERO = GaussianRational(0)
ONE = GaussianRational(1)
I = GaussianRational(0, 1)

Scalar = Union[GaussianRational, int, Fraction]


@dataclass(frozen=True)
class Model:
    """A flat model: ``kind`` is ``"chart"`` (C^n) or ``"torus"`` (C^n / Z^n + iZ^n)."""

    kind: str
    n: int

    def __post_init__(self):
        if self.kind not in ("chart", "torus"):
            raise ValueError(f"unknown model kind {self.kind!r}")
        if self.n < 1:
            raise ValueError("dimension must be positive")

    @property
    def is_torus(self) -> bool:
        return self.kind == "torus"

    def zero_key(self) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
        z = (0,) * self.n
        return (z, z)

    def __str__(self) -> str:
        return f"{self.kind}({self.n})"


def Chart(n: int) -> Model:
    return Model("chart", n)


def Torus(n: int) -> Model:
    return Model("torus", n)


Key = Tuple[Tuple[int, ...], Tuple[int, ...]]


def _add_keys(k1: Key, k2: Key) -> Key:
    return (
        tuple(x + y for x, y in zip(k1[0], k2[0])),
        tuple(x + y for x, y in zip(k1[1], k2[1])),
    )


class CoeffFn:
    """Immutable exact coefficient function on a flat model.

    ``terms`` maps a key ``(a, b)`` to its coefficient.  Chart keys are
    exponent tuples of ``z`` and ``zb``; torus keys are the frequency tuples
    ``(k, l)`` of a character.  Zero coefficients are never stored.
    """

    __slots__ = ("model", "_terms", "_hash")

    def __init__(self, model: Model, terms: Dict[Key, GaussianRational] | None = None):
        self.model = model
        clean: Dict[Key, GaussianRational] = {}
        if terms:
            for key, c in terms.items():
                c = GaussianRational.coerce(c)
                if c:
                    if len(key[0]) != model.n or len(key[1]) != model.n:
                        raise ModelError(f"key {key} has wrong length for {model}")
                    if model.kind == "chart" and (min(key[0]) < 0 or min(key[1]) < 0):
                        raise ModelError("chart exponents must be nonnegative")
                    clean[key] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _trusted(cls, model: Model, terms: Dict[Key, GaussianRational]) -> "CoeffFn":
        obj = cls.__new__(cls)
        obj.model = model
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors -------------------------------------------------------

    @classmethod
    def zero(cls, model: Model) -> "CoeffFn":
        return cls._trusted(model, {})

    @classmethod
    def constant(cls, model: Model, c: Scalar = 1) -> "CoeffFn":
        c = GaussianRational.coerce(c)
        return cls._trusted(model, {model.zero_key(): c} if c else {})

    @classmethod
    def var(cls, model: Model, j: int, bar: bool = False) -> "CoeffFn":
        """The coordinate ``z_j`` (or ``zb_j``), 0-based.  Chart only."""
        if model.kind != "chart":
            raise ModelError("bare coordinates are not functions on the torus")
        _check_axis(model, j)
        e = [0] * model.n
        e[j] = 1
        z = (0,) * model.n
        key = (z, tuple(e)) if bar else (tuple(e), z)
        return cls._trusted(model, {key: ONE})

    @classmethod
    def character(cls, model: Model, k: Sequence[int], l: Sequence[int]) -> "CoeffFn":
        """The character ``e[k;l]``.  Torus only."""
        if model.kind != "torus":
            raise ModelError("characters are only defined on the torus model")
        key = (tuple(int(x) for x in k), tuple(int(x) for x in l))
        if len(key[0]) != model.n or len(key[1]) != model.n:
            raise ModelError("character frequency length must equal n")
        return cls._trusted(model, {key: ONE})

    # access ---------------------------------------------------------------

    @property
    def terms(self) -> Dict[Key, GaussianRational]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[Key, GaussianRational]]:
        return iter(self._terms.items())

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and self.model.zero_key() in self._terms)

    def constant_value(self) -> GaussianRational:
        """Coefficient of the unit monomial (the torus mean on a torus)."""
        return self._terms.get(self.model.zero_key(), ZERO)

    def frequency_radius(self) -> int:
        """Largest |frequency| component (torus) or total degree (chart)."""
        r = 0
        for (a, b) in self._terms:
            if self.model.is_torus:
                r = max(r, max(map(abs, a), default=0), max(map(abs, b), default=0))
            else:
                r = max(r, sum(a) + sum(b))
        return r

    # arithmetic --------------------------------------------------------------

    def _check(self, other: "CoeffFn") -> None:
        if other.model != self.model:
            raise ModelError(f"model mismatch: {self.model} vs {other.model}")

    def _lift(self, other) -> "CoeffFn":
        if isinstance(other, CoeffFn):
            self._check(other)
            return other
        return CoeffFn.constant(self.model, GaussianRational.coerce(other))

    def __add__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        out = dict(self._terms)
        for key, c in o._terms.items():
            s = out.get(key)
            if s is None:
                out[key] = c
            else:
                s = s + c
                if s:
                    out[key] = s
                else:
                    del out[key]
        return CoeffFn._trusted(self.model, out)

    __radd__ = __add__

    def __neg__(self) -> "CoeffFn":
        return CoeffFn._trusted(self.model, {k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        try:
            o = self._lift(other)
        except TypeError:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Scalar) -> "CoeffFn":
        c = GaussianRational.coerce(c)
        if not c:
            return CoeffFn.zero(self.model)
        return CoeffFn._trusted(self.model, {k: v * c for k, v in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, CoeffFn):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        self._check(other)
        if len(other._terms) == 1 and other.model.zero_key() in other._terms:
            return self.scale(other._terms[other.model.zero_key()])
        out: Dict[Key, GaussianRational] = {}
        for k1, c1 in self._terms.items():
            for k2, c2 in other._terms.items():
                key = _add_keys(k1, k2)
                s = out.get(key)
                out[key] = c1 * c2 if s is None else s + c1 * c2
        return CoeffFn._trusted(self.model, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "CoeffFn":
        if k < 0:
            raise ValueError("negative powers are not in the ring")
        out = CoeffFn.constant(self.model, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other) -> bool:
        if isinstance(other, CoeffFn):
            return self.model == other.model and self._terms == other._terms
        try:
            c = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self == CoeffFn.constant(self.model, c)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.model, frozenset(self._terms.items())))
        return self._hash

    # calculus -----------------------------------------------------------------

    def wirtinger(self, j: int, bar: bool = False) -> "CoeffFn":
        """``d/dz_j`` (``bar=False``) or ``d/dzb_j`` (``bar=True``), 0-based axis."""
        _check_axis(self.model, j)
        out: Dict[Key, GaussianRational] = {}
        if self.model.kind == "chart":
            for (a, b), c in self._terms.items():
                e = b[j] if bar else a[j]
                if e == 0:
                    continue
                if bar:
                    b = b[:j] + (e - 1,) + b[j + 1:]
                else:
                    a = a[:j] + (e - 1,) + a[j + 1:]
                out[(a, b)] = c * e
        else:
            for (k, l), c in self._terms.items():
                lam = GaussianRational._raw(-l[j] if bar else l[j], k[j], 1)
                if lam:
                    out[(k, l)] = c * lam
        return CoeffFn._trusted(self.model, out)

    def conjugate(self) -> "CoeffFn":
        if self.model.kind == "chart":
            return CoeffFn._trusted(self.model, {(b, a): c.conjugate() for (a, b), c in self._terms.items()})
        return CoeffFn._trusted(
            self.model,
            {(tuple(-x for x in k), tuple(-x for x in l)): c.conjugate() for (k, l), c in self._terms.items()},
        )

    def evaluate(self, point: Sequence[complex]) -> complex:
        """Floating-point value at ``point`` (complex coordinates ``z_j = x_j + i y_j``).

        Approximate by nature; only used for pointwise rank checks.
        """
        if len(point) != self.model.n:
            raise ModelError(f"point has dimension {len(point)}, model has {self.model.n}")
        z = [complex(p) for p in point]
        total = 0j
        if self.model.kind == "chart":
            zb = [p.conjugate() for p in z]
            for (a, b), c in self._terms.items():
                v = complex(c)
                for j in range(self.model.n):
                    if a[j]:
                        v *= z[j] ** a[j]
                    if b[j]:
                        v *= zb[j] ** b[j]
                total += v
        else:
            for (k, l), c in self._terms.items():
                phase = sum(k[j] * z[j].real + l[j] * z[j].imag for j in range(self.model.n))
                total += complex(c) * cmath.exp(2j * math.pi * phase)
        return total

    def integrate_torus(self) -> GaussianRational:
        """Mean over the torus (normalized volume 1): the coefficient of ``e[0;0]``."""
        if self.model.kind != "torus":
            raise ModelError("integrate_torus is only defined on the torus model")
        return self.constant_value()

    def substitute_linear(self, target: Model, matrix, offset=None) -> "CoeffFn":
        """Pull back along the affine map ``t -> matrix @ t + offset`` from ``target``.

        ``matrix`` is ``n x m`` with Gaussian-rational entries (``m = target.n``).
        On the torus the entries must be Gaussian integers and ``offset`` is
        not allowed; characters restrict to characters.
        """
        n, m = self.model.n, target.n
        if target.kind != self.model.kind:
            raise ModelError("substitution must stay within one model kind")
        M = [[GaussianRational.coerce(x) for x in row] for row in matrix]
        if len(M) != n or any(len(r) != m for r in M):
            raise ModelError("substitution matrix has wrong shape")
        if self.model.kind == "torus":
            if offset is not None and any(GaussianRational.coerce(o) for o in offset):
                raise ModelError("translations are not supported on the torus model")
            if not all(x.is_gaussian_integer() for r in M for x in r):
                raise ModelError("torus maps need Gaussian-integer matrices")
            out: Dict[Key, GaussianRational] = {}
            for (k, l), c in self._terms.items():
                # x + iy = M (s + iu):  k.x + l.y = k'.s + l'.u
                kk, ll = [], []
                for a in range(m):
                    re = [int(M[j][a].re) for j in range(n)]
                    im = [int(M[j][a].im) for j in range(n)]
                    kk.append(sum(k[j] * re[j] + l[j] * im[j] for j in range(n)))
                    ll.append(sum(-k[j] * im[j] + l[j] * re[j] for j in range(n)))
                key = (tuple(kk), tuple(ll))
                out[key] = out.get(key, ZERO) + c
            return CoeffFn(target, out)
        off = [GaussianRational.coerce(o) for o in (offset or [0] * n)]
        zs = []
        zbs = []
        for j in range(n):
            f = CoeffFn.constant(target, off[j])
            fb = CoeffFn.constant(target, off[j].conjugate())
            for a in range(m):
                if M[j][a]:
                    f = f + CoeffFn.var(target, a).scale(M[j][a])
                    fb = fb + CoeffFn.var(target, a, bar=True).scale(M[j][a].conjugate())
            zs.append(f)
            zbs.append(fb)
        total = CoeffFn.zero(target)
        for (a, b), c in self._terms.items():
            term = CoeffFn.constant(target, c)
            for j in range(n):
                if a[j]:
                    term = term * zs[j] ** a[j]
                if b[j]:
                    term = term * zbs[j] ** b[j]
            total = total + term
        return total

    def embed(self, target: Model, offset: int) -> "CoeffFn":
        """View as a function on a larger model using coordinates ``offset..offset+n-1``."""
        if target.kind != self.model.kind or offset < 0 or offset + self.model.n > target.n:
            raise ModelError("cannot embed into the requested model")
        pad_l = (0,) * offset
        pad_r = (0,) * (target.n - offset - self.model.n)
        return CoeffFn._trusted(
            target, {(pad_l + a + pad_r, pad_l + b + pad_r): c for (a, b), c in self._terms.items()}
        )

    def __repr__(self) -> str:
        from .frontend.parser import print_expr

        return f"CoeffFn({self.model}, {print_expr(self)!r})"


def _check_axis(model: Model, j: int) -> None:
    if not 0 <= j < model.n:
        raise IndexError(f"axis {j} out of range for {model}")


def wirtinger(f: CoeffFn, j: int, bar: bool = False) -> CoeffFn:
    return f.wirtinger(j, bar)


def conjugate(f: CoeffFn) -> CoeffFn:
    return f.conjugate()


def evaluate(f: CoeffFn, point: Sequence[complex]) -> complex:
    return f.evaluate(point)


def integrate_torus(f: CoeffFn) -> GaussianRational:
    return f.integrate_torus()


def sum_coeffs(model: Model, items: Iterable[CoeffFn]) -> CoeffFn:
    total = CoeffFn.zero(model)
    for f in items:
        total = total + f
    return total
