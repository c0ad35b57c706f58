"""Named extended Poisson structures used across the test suite."""

from __future__ import annotations

from epc.coeff import Chart, CoeffFn, GaussianRational, Torus
from epc.mcstruct import ExtendedPoisson

T1, T2, C2, C3 = Torus(1), Torus(2), Chart(2), Chart(3)
I = GaussianRational(0, 1)


def const(model, c):
    return CoeffFn.constant(model, c)


def z(model, j, bar=False):
    return CoeffFn.var(model, j, bar)


def build(model, pi=None, theta=None, omega=None):
    return ExtendedPoisson.from_tables(model, pi=pi or {}, theta=theta or {}, omega=omega or {})


def mc_corpus():
    """Maurer-Cartan instances, keyed by a short name."""
    return {
        "zero_torus": ExtendedPoisson.zero(T1),
        "zero_chart": ExtendedPoisson.zero(C2),
        "holo_pi": build(C2, pi={(0, 1): z(C2, 0).scale(2)}),
        "theta_one": build(T1, theta={(0, 0): const(T1, 1)}),
        "theta_i": build(T1, theta={(0, 0): const(T1, I)}),
        "theta_e10": build(T1, theta={(0, 0): CoeffFn.character(T1, [1], [0])}),
        "omega_n2": build(C2, omega={(0, 1): z(C2, 0) + z(C2, 1) ** 2}),
        "mixed_const": build(
            T2,
            pi={(0, 1): const(T2, 2)},
            theta={(0, 0): const(T2, 1), (1, 0): const(T2, I)},
            omega={(0, 1): const(T2, 3)},
        ),
    }


def non_mc_corpus():
    return {
        "theta_zb2": build(C2, theta={(0, 0): z(C2, 1, bar=True)}),
        "omega_z1zb3": build(C3, omega={(0, 1): z(C3, 0) * z(C3, 2, bar=True)}),
    }


MODELS = (Chart(1), Chart(2), Torus(1), Torus(2))


def seeded_cases(label, count, models=MODELS):
    """``count`` reproducible ``(model, rng)`` pairs cycling through ``models``."""
    from epc.sampling import trial_rng

    return [(models[t % len(models)], trial_rng(0, label, t)) for t in range(count)]
