import numpy as np
import pytest

from ptbound import (
    CertificateKind,
    Povm,
    ValidationError,
    check_global_optimality,
    check_local_realization,
    check_povm_ppt,
    check_qg_optimality,
    example_closed_forms,
    example_ensemble,
    example_global_povm,
    example_labels,
    example_local_povm,
    lagrangian_operators,
    psi_state,
    pt_ensemble,
    solve_pg,
    solve_qg,
    validate_ensemble,
)
from ptbound.ensembles import ExampleLabel
from ptbound.errors import PovmError

from randomized import fixed_diagonal_sigma, random_ensemble


def _pair_projector(label, d):
    # onto span{|ii>, |ij>, |ji>, |jj>}
    i, j = label.i, label.j
    idx = [i * d + i, i * d + j, j * d + i, j * d + j]
    p = np.zeros((d * d, d * d))
    p[idx, idx] = 1.0
    return p


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("use_sigma", [False, True])
def test_global_residual_operator_closed_form(d, use_sigma):
    lam = 0.5
    sigma = fixed_diagonal_sigma(d) if use_sigma else None
    e = example_ensemble(d, lam, sigma)
    ops, asym = lagrangian_operators(e, example_global_povm(d))
    assert asym < 1e-14
    scale = lam / (2 * d * (d - 1))
    for lb, op in zip(example_labels(d), ops):
        psi = psi_state(lb, d)
        expected = scale * (np.eye(d * d) - np.outer(psi, psi.conj()))
        assert np.allclose(op, expected, atol=1e-14)


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("use_sigma", [False, True])
def test_qg_residual_operator_closed_form(d, use_sigma):
    lam = 0.25
    sigma = fixed_diagonal_sigma(d) if use_sigma else None
    e = example_ensemble(d, lam, sigma)
    ops, _ = lagrangian_operators(pt_ensemble(e), example_local_povm(d))
    scale = lam / (4 * d * (d - 1))
    for lb, op in zip(example_labels(d), ops):
        partner = psi_state(ExampleLabel(lb.i, lb.j, 5 - lb.k), d)
        expected = scale * (np.eye(d * d) - _pair_projector(lb, d) + 2 * np.outer(partner, partner.conj()))
        assert np.allclose(op, expected, atol=1e-14)


def test_example_certificates_pass_tight():
    for d in (2, 3):
        e = example_ensemble(d, 1.0)
        g = check_global_optimality(e, example_global_povm(d), 1e-9)
        q = check_qg_optimality(e, example_local_povm(d), 1e-9)
        assert g.passed and g.kind is CertificateKind.GLOBAL_OPT
        assert q.passed and q.kind is CertificateKind.QG_OPT
        assert min(g.lagrangian_residuals) >= -1e-9
        assert max(q.slackness_residuals.values()) <= 1e-12


def test_local_povm_is_not_globally_optimal():
    e = example_ensemble(2, 1.0)
    rep = check_global_optimality(e, example_local_povm(2))
    assert not rep.passed
    assert min(rep.lagrangian_residuals) < -1e-3


def test_single_state_identity_povm():
    e = validate_ensemble([1.0], [np.eye(4) / 4], 2, 2)
    m = Povm(2, 2, (np.eye(4),))
    for check in (check_global_optimality, check_qg_optimality):
        rep = check(e, m)
        assert rep.passed and rep.lagrangian_residuals == (0.0,) and rep.slackness_residuals == {}
    loc = check_local_realization(e, m)
    assert loc.is_product_projective and loc.pl_established
    assert loc.achieved_value == pytest.approx(1.0, abs=1e-15)


def test_count_and_dimension_mismatch():
    e = example_ensemble(2, 0.5)
    with pytest.raises(PovmError):
        check_global_optimality(e, Povm(2, 2, (np.eye(4),)))
    with pytest.raises(ValidationError):
        check_qg_optimality(e, Povm(1, 4, tuple(example_global_povm(2).stacked())))


def test_povm_ppt_check():
    bell = example_global_povm(2)
    ok, mins = check_povm_ppt(bell)
    assert not ok
    assert np.allclose(mins, -0.5)
    assert check_povm_ppt(example_local_povm(3)).is_ppt
    assert check_povm_ppt(Povm(2, 2, (np.eye(4),))).is_ppt


@pytest.mark.parametrize("d, lam", [(2, 1.0), (3, 0.5), (4, 0.25)])
def test_local_realization_on_example(d, lam):
    rep = check_local_realization(example_ensemble(d, lam), example_local_povm(d))
    assert rep.is_product_projective and rep.pl_established
    assert rep.achieved_value == pytest.approx(example_closed_forms(d, lam).q_G, abs=1e-12)


def test_bell_povm_not_recognised():
    rep = check_local_realization(example_ensemble(2, 1.0), example_global_povm(2))
    assert not rep.is_product_projective and not rep.pl_established


def test_recognised_local_povms_are_ppt():
    # any POVM the product test accepts must also be PPT
    rng = np.random.default_rng(4)
    for _ in range(10):
        w = rng.dirichlet(np.ones(3), size=9).T  # 3 elements, each diagonal in |ab>
        m = Povm(3, 3, tuple(np.diag(x).astype(complex) for x in w))
        e = random_ensemble(rng, 3, 3, 3)
        assert check_local_realization(e, m).is_product_projective
        assert check_povm_ppt(m).is_ppt


@pytest.mark.parametrize("seed", range(6))
def test_solver_outputs_certify(seed):
    e = random_ensemble(np.random.default_rng(700 + seed), 2, 2, 3)
    assert check_global_optimality(e, solve_pg(e).povm, 1e-6).passed
    assert check_qg_optimality(e, solve_qg(e).povm, 1e-6).passed


@pytest.mark.parametrize("seed", range(4))
def test_qg_certificate_is_sound(seed):
    # a POVM passing the q_G check attains q_G
    e = random_ensemble(np.random.default_rng(800 + seed), 2, 2, 3)
    res = solve_qg(e)
    rep = check_qg_optimality(e, res.povm, 1e-6)
    assert rep.passed
    assert max(rep.slackness_residuals.values()) <= 1e-6
    achieved = sum(
        p * np.trace(s.matrix @ m.matrix).real
        for p, s, m in zip(e.priors, pt_ensemble(e).states, res.povm.elements)
    )
    assert achieved == pytest.approx(res.value, abs=1e-6)


def test_soundness_on_example_family():
    e = example_ensemble(3, 0.5)
    m = example_local_povm(3)
    assert check_qg_optimality(e, m, 1e-9).passed
    assert solve_qg(e).value == pytest.approx(check_local_realization(e, m).achieved_value, abs=1e-6)


def test_report_serialises():
    rep = check_global_optimality(example_ensemble(2, 0.5), example_global_povm(2))
    d = rep.to_dict()
    assert d["kind"] == "global_opt" and d["passed"] is True
    assert len(d["slackness_residuals"]) == 4 * 3 // 2
