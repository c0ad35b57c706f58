"""Seeded pseudo-random exact elements for property checks, and the thread cap."""

from __future__ import annotations

import os
import random
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

from .coeff import CoeffFn, GaussianRational, Model
from .exterior import (
    D,
    DB,
    F,
    FB,
    GradedElement,
    masks_of_degree,
    polyvector_masks,
    species_mask,
)

T = TypeVar("T")
R = TypeVar("R")

MAX_FREQ = 2


def trial_rng(seed: int, *labels) -> random.Random:
    """Independent generator for one trial, derived from the user seed and labels."""
    return random.Random("epc:" + ":".join(str(x) for x in (seed,) + labels))


def thread_count() -> int:
    raw = os.environ.get("EPC_THREADS")
    if not raw:
        return 1
    try:
        k = int(raw)
    except ValueError:
        raise ValueError(f"EPC_THREADS must be a positive integer, got {raw!r}") from None
    if k < 1:
        raise ValueError(f"EPC_THREADS must be a positive integer, got {raw!r}")
    return k


def pmap(fn: Callable[[T], R], items: Sequence[T]) -> List[R]:
    """Ordered map, run on up to ``EPC_THREADS`` threads (serial when unset)."""
    k = thread_count()
    if k == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as ex:
        return list(ex.map(fn, items))


def random_scalar(rng: random.Random, bound: int = 2) -> GaussianRational:
    while True:
        a, b = rng.randint(-bound, bound), rng.randint(-bound, bound)
        if a or b:
            return GaussianRational(a, b)


def random_coeff(model: Model, rng: random.Random, max_terms: int = 3) -> CoeffFn:
    n = model.n
    terms = {}
    for _ in range(rng.randint(1, max_terms)):
        if model.is_torus:
            key = (
                tuple(rng.randint(-MAX_FREQ, MAX_FREQ) for _ in range(n)),
                tuple(rng.randint(-MAX_FREQ, MAX_FREQ) for _ in range(n)),
            )
        else:
            key = (
                tuple(rng.choice((0, 0, 1, 2)) for _ in range(n)),
                tuple(rng.choice((0, 0, 1, 2)) for _ in range(n)),
            )
        terms[key] = random_scalar(rng)
    f = CoeffFn(model, terms)
    return f if f else CoeffFn.constant(model, 1)


def _random_on_masks(model: Model, masks: Sequence[int], rng: random.Random, max_monomials: int) -> GradedElement:
    if not masks:
        return GradedElement.zero(model)
    chosen = rng.sample(list(masks), min(len(masks), rng.randint(1, max_monomials)))
    return GradedElement(model, {m: random_coeff(model, rng) for m in chosen})


def random_polyvector(model: Model, k: int, rng: random.Random, max_monomials: int = 2) -> GradedElement:
    """Random element of ``Gamma(wedge^k A)``."""
    return _random_on_masks(model, polyvector_masks(model.n, k), rng, max_monomials)


def random_form(model: Model, rng: random.Random, k: int | None = None, max_monomials: int = 2) -> GradedElement:
    """Random form of total degree ``k`` (any degree when ``None``)."""
    allowed = species_mask(model.n, F, FB)
    if k is None:
        k = rng.randint(0, 2 * model.n)
    return _random_on_masks(model, masks_of_degree(model.n, k, allowed), rng, max_monomials)


def random_astar(model: Model, rng: random.Random, max_monomials: int = 2) -> GradedElement:
    """Random section of ``A^* = T^{0,1} + (T^{1,0})^*``."""
    return _random_on_masks(model, masks_of_degree(model.n, 1, species_mask(model.n, DB, F)), rng, max_monomials)


def random_E(model: Model, rng: random.Random, max_monomials: int = 3) -> GradedElement:
    """Random degree-one element of ``E = T_C + T*_C``."""
    return _random_on_masks(model, masks_of_degree(model.n, 1, species_mask(model.n, D, DB, F, FB)), rng, max_monomials)


def random_clifford(model: Model, rng: random.Random, max_degree: int = 3) -> GradedElement:
    allowed = species_mask(model.n, D, DB, F, FB)
    k = rng.randint(0, max_degree)
    return _random_on_masks(model, masks_of_degree(model.n, k, allowed), rng, 2)
