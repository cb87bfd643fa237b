from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gmedim.criteria import (
    certify,
    criterion_value,
    ghz_fidelity_threshold,
    ghz_fidelity_witness,
    plan_for,
    q0,
    qm,
    verdict,
    w_fidelity_threshold,
    w_fidelity_witness,
)
from gmedim.errors import InvalidStateError, ParameterError
from gmedim.oracle import q0_two_copy, qm_two_copy
from gmedim.states import (
    dicke,
    ghz,
    ghz_w_mixture,
    random_biseparable,
    random_mixed,
    rho_c,
    w_state,
    white_noise_mix,
)
from gmedim.tensor import DenseProvider, DensityMatrix, MixtureProvider, SparseProvider, SystemShape, white_noise_provider

S33 = SystemShape(3, 3)


def test_q0_pure_ghz3():
    assert q0(ghz(S33).projector()).value == pytest.approx(2, abs=1e-12)


def test_q0_product_state():
    rho = np.zeros((27, 27))
    rho[0, 0] = 1
    assert q0(DensityMatrix(S33, rho)).value == 0


@pytest.mark.parametrize("p", [0.1, 0.375, 0.8])
def test_q0_noisy_ghz3_closed_form(p):
    # 6 ordered off-diagonals (1-p)/3, 18 swap terms p/27
    expected = 2 - 8 * p / 3
    rho = white_noise_mix(ghz(S33), p)
    assert q0(rho).value == pytest.approx(expected, abs=1e-12)
    assert q0(white_noise_provider(ghz(S33), p)).value == pytest.approx(expected, abs=1e-12)
    assert q0_two_copy(rho) == pytest.approx(expected, abs=1e-12)


def test_qm_pure_w3():
    assert qm(w_state(S33).projector(), 1).value == pytest.approx(2, abs=1e-12)


@pytest.mark.parametrize("p", [0.0, 0.1, 9 / 34, 0.6, 1.0])
def test_qm_noisy_w3_closed_form(p):
    # 24 off-diagonals (1-p)/6, 36 swap terms p/27, N_D = 2 times (1-p) + 2p/9
    expected = 2 - 34 * p / 9
    rho = white_noise_mix(w_state(S33), p)
    assert qm(rho, 1).value == pytest.approx(expected, abs=1e-12)
    assert qm_two_copy(rho, 1) == pytest.approx(expected, abs=1e-12)


def test_w3_term_counts():
    plan = plan_for(S33, 1)
    assert plan.off_rows.size == 24 and plan.p_u.size == 36 and plan.d_pos.size == 6 and plan.n_d == 2
    plan0 = plan_for(S33, 0)
    assert plan0.off_rows.size == 6 and plan0.p_u.size == 18


@pytest.mark.parametrize("n", [3, 4, 5])
@pytest.mark.parametrize("d", [2, 3, 4, 5])
def test_q0_ghz_extremal(n, d):
    if d**n > 4096:
        pytest.skip("outside desk scale")
    for f in range(2, d + 1):
        assert abs(q0(ghz(SystemShape(n, d), f)).value - (f - 1)) <= 1e-12


CASES = [(n, d, m) for n in range(2, 7) for d in range(2, 5) for m in range(1, n // 2 + 1) if d**n <= 4096]


@pytest.mark.parametrize("n,d,m", CASES)
def test_qm_dicke_extremal_full_dimension(n, d, m):
    assert abs(qm(dicke(SystemShape(n, d), m, d), m).value - (d - 1)) <= 1e-12


@pytest.mark.parametrize("n,d,m", [c for c in CASES if c[1] > 2])
def test_qm_dicke_truncated_levels(n, d, m):
    # D^m_f inside d > f levels: off-diagonal sum (f-1) m (n-m), diagonal weight 1,
    # all swap terms vanish, so Q_m = (f-1)(n-m) - (d-1)(n-m-1)
    for f in range(2, d):
        expected = (f - 1) * (n - m) - (d - 1) * (n - m - 1)
        value = qm(dicke(SystemShape(n, d), m, f), m).value
        assert abs(value - expected) <= 1e-12
        assert value <= f - 1 + 1e-12


def test_dicke_truncated_matches_two_copy():
    psi = dicke(SystemShape(4, 3), 1, 2)
    assert qm(psi.projector(), 1).value == pytest.approx(qm_two_copy(psi.projector(), 1), abs=1e-12)


def test_d2_reduces_to_plain_gme():
    # only f = 2 is certifiable for qubits
    report = qm(w_state(SystemShape(3, 2)).projector(), 1)
    assert report.value == pytest.approx(1, abs=1e-12) and report.certified_f == 2


@pytest.mark.parametrize("n,d", [(3, 2), (3, 3), (4, 2), (4, 3)])
def test_biseparable_bound(n, d):
    for seed in range(40):
        rho = random_biseparable(SystemShape(n, d), seed, num_terms=1 + seed % 4)
        for m in range(0, n // 2 + 1):
            assert verdict(rho, [m]).reports[0].value <= 1e-9


# certify ---------------------------------------------------------------------


def test_certify_examples():
    assert certify(2.0, 3, 1e-9) == 3
    assert certify(0.0, 3) == 0
    assert certify(1.0, 3) == 2
    assert certify(1.0 + 5e-10, 3) == 2
    assert certify(100.0, 4) == 4
    with pytest.raises(ParameterError):
        certify(1.0, 3, -1)


@given(st.floats(-5, 10, allow_nan=False), st.integers(2, 6))
def test_certify_consistent(value, d):
    f = certify(value, d)
    assert f == 0 or 2 <= f <= d
    if f:
        assert value > f - 2
    if f < d:
        assert not value > (f if f else 1) - 1 + 1e-9


# fidelity baselines ----------------------------------------------------------


@pytest.mark.parametrize("p", [0.0, 0.2, 0.34, 0.35, 0.5, 1.0])
def test_ghz_fidelity(p):
    res = ghz_fidelity_witness(white_noise_provider(ghz(S33), p), 3)
    assert res.fidelity == pytest.approx((1 - p) + p / 27, abs=1e-14)
    assert res.detected == ((1 - p) + p / 27 > 2 / 3)


def test_fidelity_thresholds():
    assert ghz_fidelity_threshold(3) == pytest.approx(2 / 3)
    assert w_fidelity_threshold(3, 3) == pytest.approx(5 / 6)
    mixed = white_noise_provider(ghz(S33), 1.0)
    assert ghz_fidelity_witness(mixed, 3) == (pytest.approx(1 / 27), False)


def test_w_fidelity():
    assert w_fidelity_witness(w_state(S33), 3) == (pytest.approx(1.0), True)
    p = 0.2
    res = w_fidelity_witness(white_noise_provider(w_state(S33), p), 3)
    assert res.fidelity == pytest.approx(1 - p + p / 27, abs=1e-14) and not res.detected


# verdict -----------------------------------------------------------------------


def test_verdict_fig2_corner():
    v = verdict(ghz_w_mixture(1.0, 0.0), [0, 1])
    assert v.best_f == 4 and v.report(0).value == pytest.approx(3)


def test_verdict_maximally_mixed():
    assert verdict(white_noise_provider(ghz(SystemShape(3, 4)), 1.0)).best_f == 0


def test_verdict_rho_c():
    v = verdict(rho_c(), [0, 1])
    assert v.report(0).value <= 1 + 1e-9
    # regression value; the theory only bounds it by 1
    assert v.report(0).value == pytest.approx(1.0, abs=1e-12)
    assert v.best_f == 2


def test_verdict_rejects_bad_m():
    with pytest.raises(ParameterError):
        verdict(rho_c(), [2])


def test_verdict_json_fields():
    d = verdict(ghz(S33), [0], terms=True).to_dict()
    assert set(d) == {"best_f", "reports"}
    assert set(d["reports"][0]) == {"m", "value", "certified_f", "terms"}


# structure ---------------------------------------------------------------------


@pytest.mark.parametrize("m", [0, 1])
def test_term_breakdown_sums_to_value(m):
    rho = random_mixed(S33, 3)
    rep = qm(rho, m, terms=True) if m else q0(rho, terms=True)
    assert sum(t["value"] for t in rep.terms) == pytest.approx(rep.value, abs=1e-12)
    kinds = {t["kind"] for t in rep.terms}
    assert kinds == ({"O", "P", "D"} if m else {"O", "P"})
    p_term = next(t for t in rep.terms if t["kind"] == "P")
    assert "delta" in p_term["indices"]


@pytest.mark.parametrize("seed", range(5))
def test_conjugation_invariance(seed):
    rho = random_mixed(SystemShape(3, 3), seed)
    conj = DensityMatrix(rho.shape, rho.entries.conj())
    for m in (0, 1):
        assert criterion_value(DenseProvider(conj), m) == pytest.approx(criterion_value(DenseProvider(rho), m), abs=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10**6), st.integers(0, 10**6), st.floats(0, 1))
def test_convexity(seed1, seed2, lam):
    shape = SystemShape(3, 3)
    r1, r2 = random_mixed(shape, seed1, 2), random_mixed(shape, seed2, 1)
    mix = DensityMatrix(shape, lam * r1.entries + (1 - lam) * r2.entries)
    for m in (0, 1):
        lhs = criterion_value(DenseProvider(mix), m)
        rhs = lam * criterion_value(DenseProvider(r1), m) + (1 - lam) * criterion_value(DenseProvider(r2), m)
        assert lhs <= rhs + 1e-9


def test_backends_and_exact_sum_agree(backend):
    for seed in range(5):
        rho = random_mixed(SystemShape(4, 3), seed)
        for m in (0, 1, 2):
            fast = criterion_value(DenseProvider(rho), m, backend=backend)
            exact = criterion_value(DenseProvider(rho), m, deterministic=True)
            assert fast == pytest.approx(exact, abs=1e-13)


def test_deterministic_sum_is_bitwise_stable():
    rho = random_mixed(SystemShape(4, 3), 1)
    sparse = SparseProvider.from_dense(rho)
    vals = {criterion_value(p, 1, deterministic=True) for p in (DenseProvider(rho), sparse)}
    assert len(vals) == 1


def test_provider_backends_give_same_criteria():
    psi = w_state(SystemShape(3, 3))
    dense = DenseProvider(white_noise_mix(psi, 0.3))
    for provider in (SparseProvider.from_dense(dense.rho), white_noise_provider(psi, 0.3)):
        for m in (0, 1):
            assert criterion_value(provider, m) == pytest.approx(criterion_value(dense, m), abs=1e-14)


def test_negative_diagonal(backend):
    rho = np.eye(27, dtype=complex) / 27
    i = 1  # label (0,0,1) appears under a square root in Q_0 for n=3
    rho[i, i] = -1e-6
    rho[0, 0] += 1e-6 + 1 / 27 * 0
    bad = DensityMatrix(S33, rho, check=False)
    with pytest.raises(InvalidStateError):
        criterion_value(DenseProvider(bad), 0, backend=backend)
    with pytest.raises(InvalidStateError):
        criterion_value(DenseProvider(bad), 0, deterministic=True)


def test_tiny_negative_diagonal_is_clamped(backend):
    rho = np.eye(27, dtype=complex) / 27
    rho[1, 1] = -5e-13
    rho[0, 0] += 1 / 27 + 5e-13
    value = criterion_value(DenseProvider(DensityMatrix(S33, rho, check=False)), 0, backend=backend)
    assert np.isfinite(value)


@pytest.mark.parametrize("n,d", [(3, 2), (4, 3), (5, 4), (6, 3), (7, 2)])
def test_scaling_contract(n, d):
    for m in range(0, n // 2 + 1):
        plan = plan_for(SystemShape(n, d), m)
        assert plan.num_elements <= d * d * comb(n, max(m, 1)) * 2**n


def test_large_sparse_system_without_dense_storage():
    # n = 12 qutrits: D = 531441, far beyond dense storage; GHZ elements are closed form
    shape = SystemShape(12, 3)
    psi = ghz(shape)
    assert q0(MixtureProvider(shape, [(1.0, psi)])).value == pytest.approx(2, abs=1e-12)
