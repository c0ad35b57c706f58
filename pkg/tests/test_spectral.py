from math import comb

import pytest

from epc.coeff import Chart, CoeffFn, GaussianRational
from epc.exterior import D, FB, GradedElement, gen
from epc.mcstruct import ExtendedPoisson
from epc.spectral import (
    SpectralError,
    _modes,
    assemble,
    duality_report,
    homology_dims,
    pairing_matrix,
)

from corpus import T1, T2, build, const, mc_corpus

GQ = GaussianRational
I = GQ(0, 1)

CONSTANT = {
    "zero_n1": ExtendedPoisson.zero(T1),
    "theta_2": build(T1, theta={(0, 0): const(T1, 2)}),
    "theta_one": build(T1, theta={(0, 0): const(T1, 1)}),
    "theta_i": build(T1, theta={(0, 0): const(T1, I)}),
    "zero_n2": ExtendedPoisson.zero(T2),
    "pi_n2": build(T2, pi={(0, 1): const(T2, 3)}),
    "mixed": mc_corpus()["mixed_const"],
}
SMALL = ["zero_n1", "theta_2", "theta_one", "theta_i", "zero_n2", "pi_n2", "mixed"]


def w_vector(H, mode):
    """Left-wedge vector of the LP differential on ``e[k;l]`` for constant ``H``."""
    model, n = H.model, H.n
    k, l = mode
    s = [GQ(l[j], k[j]) for j in range(n)]  # d/dz_j e = (i k_j + l_j) e
    sb = [GQ(-l[j], k[j]) for j in range(n)]  # d/dzb_j e = (i k_j - l_j) e
    w = GradedElement.zero(model)
    for j in range(n):
        w = w + gen(model, FB, j) * sb[j]
    for a in range(n):
        for b in range(a + 1, n):
            c = H.pi.coeff((1 << a) | (1 << b)).constant_value()
            w = w + gen(model, D, a) * (c * s[b]) - gen(model, D, b) * (c * s[a])
    for p in range(n):
        for q in range(n):
            c = H.theta.coeff((1 << p) | (1 << (3 * n + q))).constant_value()
            w = w - gen(model, FB, q) * (c * s[p])
    return w


def cutoff_for(name):
    return 1 if name.endswith("n2") or name == "mixed" else 2


@pytest.mark.parametrize("name", SMALL)
def test_lp_mode_blocks_are_wedge_by_w(name):
    H = CONSTANT[name]
    C = assemble(H, "lp", cutoff_for(name))
    for k in range(C.top):
        for j, (mask, mode) in enumerate(C.spaces[k]):
            basis = GradedElement._trusted(H.model, {mask: CoeffFn.character(H.model, *mode)})
            assert C.element(k + 1, C.differentials[k][j]) == w_vector(H, mode) ^ basis


@pytest.mark.parametrize("name", SMALL)
def test_lp_homology_counts_vanishing_w(name):
    H = CONSTANT[name]
    M = cutoff_for(name)
    n = H.n
    zeros = sum(1 for mode in _modes(n, M) if w_vector(H, mode).is_zero())
    rep = homology_dims(assemble(H, "lp", M))
    assert rep.exact
    assert rep.dims == [comb(2 * n, k) * zeros for k in range(2 * n + 1)]


@pytest.mark.parametrize("name", SMALL)
def test_kb_matches_lp_for_constant_H(name):
    H = CONSTANT[name]
    M = cutoff_for(name)
    assert homology_dims(assemble(H, "kb", M)).dims == homology_dims(assemble(H, "lp", M)).dims


@pytest.mark.parametrize("n", [1, 2])
def test_kb_for_zero_is_hodge_regrouping(n):
    H = ExtendedPoisson.zero(T1 if n == 1 else T2)
    dims = homology_dims(assemble(H, "kb", 1)).dims
    hodge = [sum(comb(n, i) * comb(n, j) for i in range(n + 1) for j in range(n + 1) if i - j == n - k) for k in range(2 * n + 1)]
    assert dims == hodge


@pytest.mark.parametrize("name", SMALL)
@pytest.mark.parametrize("kind", ["kb", "lp"])
def test_d_squared_and_euler_characteristic(name, kind):
    C = assemble(CONSTANT[name], kind, cutoff_for(name))
    assert C.mode_diagonal and C.d_squared_is_zero()
    dims = homology_dims(C).dims
    chi = lambda xs: sum((-1) ** k * x for k, x in enumerate(xs))
    assert chi(C.dims()) == chi(dims)
    for mode in _modes(C.model.n, C.cutoff)[:5]:
        sizes = [len(C.mode_block(k, mode)) for k in range(C.top + 1)]
        assert sum((-1) ** k * x for k, x in enumerate(sizes)) == 0


def test_assemble_examples():
    H = ExtendedPoisson.zero(T1)
    C = assemble(H, "kb", 0)
    assert C.dims() == [1, 2, 1]
    assert all(not col for d in C.differentials for col in d)
    C = assemble(H, "kb", 1)
    for mode in _modes(1, 1):
        if mode == ((0,), (0,)):
            continue
        # d_0 = dbar sends e[k;l] dz to a nonzero multiple of e[k;l] dzb^dz
        assert [len(C.differentials[0][j]) for j in C.mode_block(0, mode)] == [1]
    assert homology_dims(C).dims == [1, 2, 1]


def test_constant_theta_zero_mode_block_equals_untwisted():
    zero = assemble(ExtendedPoisson.zero(T1), "kb", 1)
    theta = assemble(CONSTANT["theta_2"], "kb", 1)
    origin = ((0,), (0,))
    for k in range(2):
        for j in zero.mode_block(k, origin):
            assert zero.differentials[k][j] == theta.differentials[k][j]


def test_non_elliptic_theta_homology_grows_with_cutoff():
    H = CONSTANT["theta_one"]
    assert homology_dims(assemble(H, "kb", 1)).dims == [3, 6, 3]
    assert homology_dims(assemble(H, "kb", 2)).dims == [5, 10, 5]


def test_pairing_examples():
    H = ExtendedPoisson.zero(T1)
    p0 = pairing_matrix(H, 0, 1)
    assert (p0.rank, p0.dim, p0.dual_dim) == (1, 1, 1) and p0.nondegenerate
    p1 = pairing_matrix(H, 1, 1)
    assert p1.rank == 2 and p1.nondegenerate
    with pytest.raises(SpectralError):
        pairing_matrix(H, 3, 1)


def test_errors():
    with pytest.raises(SpectralError):
        assemble(ExtendedPoisson.zero(Chart(1)), "kb", 1)
    with pytest.raises(SpectralError):
        assemble(ExtendedPoisson.zero(T1), "xy", 1)
    with pytest.raises(SpectralError):
        assemble(ExtendedPoisson.zero(T1), "kb", -1)
    C = assemble(mc_corpus()["theta_e10"], "kb", 1)
    assert not C.mode_diagonal and any(C.leaked_columns)
    with pytest.raises(SpectralError):
        homology_dims(C)
    with pytest.raises(SpectralError):
        pairing_matrix(mc_corpus()["theta_e10"], 0, 1)


def test_heuristic_mode_reports_stabilization():
    rep = homology_dims(assemble(mc_corpus()["theta_e10"], "kb", 1), heuristic=True)
    assert not rep.exact and rep.stabilized is not None and rep.dims_next is not None
    assert rep.stabilized == (rep.dims == rep.dims_next)


def test_duality_report_zero():
    rep = duality_report(ExtendedPoisson.zero(T1), 2)
    assert rep.kb_dims == rep.lp_dims == rep.pairing_ranks == [1, 2, 1]
    assert rep.unimodular and rep.elliptic and rep.passed
    assert {r.check for r in rep.rows} == {"kb_symmetry", "pairing_rank", "kb_vs_lp_dual", "kb_vs_lp_same"}


@pytest.mark.parametrize("c", [GQ(2), GQ(1, 1), GQ(1) / 2])
def test_duality_report_elliptic_theta(c):
    rep = duality_report(build(T1, theta={(0, 0): const(T1, c)}), 2)
    assert rep.elliptic and rep.passed
    assert rep.kb_dims == [1, 2, 1] and rep.pairing_ranks == rep.kb_dims


@pytest.mark.parametrize("c", [GQ(1), I])
def test_duality_report_unit_theta_only_informs(c):
    rep = duality_report(build(T1, theta={(0, 0): const(T1, c)}), 1)
    assert not rep.elliptic
    rows = [r for r in rep.rows if r.check == "pairing_rank"]
    assert rows and all(r.status == "info" for r in rows)


def test_threads_give_identical_results(monkeypatch):
    H = CONSTANT["pi_n2"]
    serial = homology_dims(assemble(H, "kb", 1)).dims
    monkeypatch.setenv("EPC_THREADS", "4")
    assert homology_dims(assemble(H, "kb", 1)).dims == serial
    monkeypatch.setenv("EPC_THREADS", "zero")
    with pytest.raises(ValueError):
        assemble(H, "kb", 1)
