import random

import pytest

from epc.coeff import Chart, GaussianRational, ModelError, Torus
from epc.geomrel import (
    LinearHolomorphicMap,
    LinearSubmanifold,
    coisotropic_check,
    compose,
    dual_structure,
    graph,
    poisson_map_check,
    product_structure,
    subalgebroid_check,
)
from epc.mcstruct import ExtendedPoisson, check_mc

from corpus import C2, T2, build, const, mc_corpus, z

GQ = GaussianRational
Z2_ZERO = LinearSubmanifold.from_columns(C2, [[1, 0]])
DIAGONAL = LinearSubmanifold.from_columns(C2, [[1, 1]])


def pi_const(c=1, model=C2):
    return build(model, pi={(0, 1): const(model, c)})


def omega_const(c=3, model=C2):
    return build(model, omega={(0, 1): const(model, c)})


THETA_21 = build(C2, theta={(1, 0): const(C2, 1)})
SHEAR = LinearHolomorphicMap(C2, C2, [[1, 0], [1, 1]])


def det2(A):
    return A[0][0] * A[1][1] - A[0][1] * A[1][0]


# coisotropic examples ---------------------------------------------------------------


def test_zero_structure_every_line_is_coisotropic():
    H = ExtendedPoisson.zero(C2)
    for Y in (Z2_ZERO, DIAGONAL, LinearSubmanifold.from_columns(C2, [[1, 0], [0, 1]])):
        assert coisotropic_check(H, Y).verdict
        assert subalgebroid_check(H, Y).verdict


def test_omega_on_z2_zero_is_coisotropic():
    rep = coisotropic_check(omega_const(), Z2_ZERO)
    assert rep.verdict and not rep.nonzero()
    assert subalgebroid_check(omega_const(), Z2_ZERO).verdict


def test_theta_off_diagonal_is_not_coisotropic():
    rep = coisotropic_check(THETA_21, Z2_ZERO)
    assert not rep.verdict
    # K = (dbar_1, dz_2); the only pair picks up theta^2_1 up to sign
    [(i, j, r)] = rep.nonzero()
    assert (i, j) == (0, 1) and r.is_constant() and r.constant_value() in (GQ(1), GQ(-1))
    sub = subalgebroid_check(THETA_21, Z2_ZERO)
    assert not sub.precondition and not sub.verdict and sub.failures == ["Y is not coisotropic"]


def test_pi_on_z2_zero_is_a_subalgebroid():
    assert coisotropic_check(pi_const(), Z2_ZERO).verdict
    sub = subalgebroid_check(pi_const(), Z2_ZERO)
    assert sub.precondition and sub.anchor_ok and sub.bracket_ok


def test_nonconstant_theta_restricted_to_affine_lines():
    H = build(C2, theta={(1, 0): z(C2, 1)})
    # theta^2_1 = z_2 vanishes on z_2 = 0 but not on z_2 = 1
    assert coisotropic_check(H, Z2_ZERO).verdict
    shifted = LinearSubmanifold.from_columns(C2, [[1, 0]], offset=[0, 1])
    rep = coisotropic_check(H, shifted)
    assert not rep.verdict and all(r.is_constant() for _, _, r in rep.nonzero())


def test_lagrangian_oracle_random_constant_omega():
    """For constant omega only the T^{0,1}Y pairs matter: the line spanned by v is
    always coisotropic (one vector), a plane is coisotropic iff omega vanishes."""
    rng = random.Random(3)
    for _ in range(20):
        c = GQ(rng.randint(-3, 3), rng.randint(-3, 3))
        H = omega_const(c)
        v = [GQ(rng.randint(-2, 2), rng.randint(-2, 2)) for _ in range(2)]
        if not any(v):
            continue
        assert coisotropic_check(H, LinearSubmanifold.from_columns(C2, [v])).verdict
        plane = LinearSubmanifold.from_columns(C2, [[1, 0], [0, 1]])
        assert coisotropic_check(H, plane).verdict == (c == 0)


def test_coisotropy_is_invariant_under_duality():
    structures = [ExtendedPoisson.zero(C2), pi_const(), omega_const(), THETA_21, mc_corpus()["holo_pi"], mc_corpus()["omega_n2"]]
    lines = [Z2_ZERO, DIAGONAL, LinearSubmanifold.from_columns(C2, [[0, 1]]), LinearSubmanifold.from_columns(C2, [[1, GQ(0, 1)]])]
    for H in structures:
        for Y in lines:
            assert coisotropic_check(H, Y).verdict == coisotropic_check(dual_structure(H), Y).verdict


def test_submanifold_validation():
    with pytest.raises(ValueError):
        LinearSubmanifold.from_columns(C2, [[1, 1], [2, 2]])
    with pytest.raises(ValueError):
        LinearSubmanifold(C2, [[1]])
    with pytest.raises(ModelError):
        LinearSubmanifold.from_columns(T2, [[GQ(1) / 2, 0]])
    with pytest.raises(ModelError):
        LinearSubmanifold.from_columns(T2, [[1, 0]], offset=[0, 1])
    with pytest.raises(ValueError):
        coisotropic_check(ExtendedPoisson.zero(Chart(3)), Z2_ZERO)


def test_torus_subtorus():
    H = build(T2, omega={(0, 1): const(T2, 1)}, pi={(0, 1): const(T2, 2)})
    Y = LinearSubmanifold.from_columns(T2, [[1, 1]])
    assert coisotropic_check(H, Y).verdict == coisotropic_check(dual_structure(H), Y).verdict


# dual and product structures ------------------------------------------------------


def test_dual_structure():
    H = mc_corpus()["mixed_const"]
    D = dual_structure(H)
    assert D.pi == H.pi * -1 and D.theta == H.theta and D.omega == H.omega * -1
    assert dual_structure(D) == H
    for name, G in mc_corpus().items():
        assert check_mc(dual_structure(G)).is_zero, name


def test_product_structure():
    zero = product_structure(ExtendedPoisson.zero(C2), ExtendedPoisson.zero(Chart(1)))
    assert zero.model == Chart(3) and zero.H.is_zero()
    P = product_structure(pi_const(1), pi_const(5))
    assert P.model == Chart(4)
    expected = build(Chart(4), pi={(0, 1): const(Chart(4), 1), (2, 3): const(Chart(4), -5)})
    assert P == expected
    with pytest.raises(ModelError):
        product_structure(pi_const(), ExtendedPoisson.zero(Torus(1)))


@pytest.mark.parametrize("a", ["holo_pi", "omega_n2", "zero_chart"])
@pytest.mark.parametrize("b", ["holo_pi", "omega_n2"])
def test_product_preserves_mc(a, b):
    corpus = mc_corpus()
    assert check_mc(product_structure(corpus[a], corpus[b])).is_zero


# maps -----------------------------------------------------------------------------


def test_identity_same_structure_passes():
    for H in (pi_const(), omega_const(), THETA_21, mc_corpus()["holo_pi"]):
        rep = poisson_map_check(H, H, LinearHolomorphicMap.identity(C2))
        assert rep.verdict and rep.graph_verdict and rep.consistent


def test_identity_into_zero_fails_with_pi_residual():
    rep = poisson_map_check(ExtendedPoisson.zero(C2), pi_const(), LinearHolomorphicMap.identity(C2))
    assert not rep.verdict and rep.consistent
    [((i, j), c)] = rep.pi_residual.items()
    assert (i, j) == (0, 1) and c == const(C2, 1)
    assert rep.omega_residual.is_zero()


def test_shear_preserves_constant_pi():
    rep = poisson_map_check(pi_const(), pi_const(), SHEAR)
    assert rep.verdict and rep.graph_verdict


def test_pushforward_oracle_constant_pi_and_omega():
    """For constant pi, f_* pi = det(A) pi; for constant omega, f^* omega = conj(det A) omega."""
    rng = random.Random(11)
    for _ in range(25):
        A = [[GQ(rng.randint(-2, 2), rng.randint(-1, 1)) for _ in range(2)] for _ in range(2)]
        f = LinearHolomorphicMap(C2, C2, A)
        d = det2(A)
        rp = poisson_map_check(pi_const(), pi_const(), f)
        assert rp.verdict == (d == 1) and rp.consistent
        ro = poisson_map_check(omega_const(), omega_const(), f)
        assert ro.verdict == (d.conjugate() == 1) and ro.consistent


def test_theta_intertwining_oracle():
    """theta^p_i constant: the condition is A Theta = Theta conj(A)."""
    theta = build(C2, theta={(0, 0): const(C2, 1), (1, 1): const(C2, 1)})  # identity matrix
    real = LinearHolomorphicMap(C2, C2, [[2, 1], [0, 1]])
    assert poisson_map_check(theta, theta, real).verdict
    unreal = LinearHolomorphicMap(C2, C2, [[GQ(0, 1), 0], [0, 1]])
    rep = poisson_map_check(theta, theta, unreal)
    assert not rep.verdict and rep.consistent
    assert rep.theta_residual[0][0] == const(C2, GQ(0, 2))


def test_maps_between_different_dimensions():
    C1 = Chart(1)
    inc = LinearHolomorphicMap(C1, C2, [[1], [0]])
    rep = poisson_map_check(ExtendedPoisson.zero(C2), ExtendedPoisson.zero(C1), inc)
    assert rep.verdict and rep.consistent
    rep = poisson_map_check(omega_const(), ExtendedPoisson.zero(C1), inc)
    assert rep.verdict and rep.consistent  # the pullback of dzb_1 ^ dzb_2 to a line vanishes
    proj = LinearHolomorphicMap(C2, C1, [[1, 0]])
    rep = poisson_map_check(ExtendedPoisson.zero(C1), pi_const(), proj)
    assert rep.verdict and rep.consistent  # f_* (d1 ^ d2) = d1 ^ 0


def test_verdicts_agree_on_random_constant_structures():
    rng = random.Random(5)

    def small():
        return GQ(rng.randint(-1, 1), rng.randint(-1, 1))

    for _ in range(15):
        A = [[small() + (1 if i == j else 0) for j in range(2)] for i in range(2)]
        f = LinearHolomorphicMap(C2, C2, A)
        H2 = build(C2, pi={(0, 1): const(C2, small())}, omega={(0, 1): const(C2, small())})
        H1 = build(C2, pi={(0, 1): const(C2, small())}, omega={(0, 1): const(C2, small())})
        assert poisson_map_check(H1, H2, f).consistent


def test_composition_closure():
    g = LinearHolomorphicMap(C2, C2, [[2, 1], [1, 1]])
    H = pi_const()
    assert poisson_map_check(H, H, SHEAR).verdict and poisson_map_check(H, H, g).verdict
    for h in (compose(SHEAR, g), compose(g, SHEAR)):
        rep = poisson_map_check(H, H, h)
        assert rep.verdict and rep.consistent


def test_compose_and_graph():
    f = LinearHolomorphicMap(C2, C2, [[1, 2], [0, 1]], [1, 0])
    g = LinearHolomorphicMap(C2, C2, [[0, 1], [1, 0]], [0, 3])
    h = compose(f, g)
    assert h.matrix == ((GQ(2), GQ(1)), (GQ(1), GQ(0)))
    assert h.translation == (GQ(7), GQ(3))
    w = z(C2, 0) * z(C2, 1)
    assert h.pullback(w) == g.pullback(f.pullback(w))
    G = graph(f)
    assert G.model == Chart(4) and G.dim == 2 and G.offset[0] == GQ(1)
    with pytest.raises(ValueError):
        compose(LinearHolomorphicMap(Chart(1), C2, [[1], [0]]), SHEAR)


def test_map_validation():
    with pytest.raises(ValueError):
        LinearHolomorphicMap(C2, C2, [[1, 0]])
    with pytest.raises(ModelError):
        LinearHolomorphicMap(T2, T2, [[GQ(1) / 2, 0], [0, 1]])
    with pytest.raises(ModelError):
        LinearHolomorphicMap(C2, T2, [[1, 0], [0, 1]])
    with pytest.raises(ValueError):
        poisson_map_check(pi_const(), ExtendedPoisson.zero(Chart(1)), SHEAR)
