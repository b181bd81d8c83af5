import pytest

from operlab.dell import (DEFAULT_QH_SAMPLES, DELLModel, degeneration_check,
                          dell_commutativity_certificate, dell_current,
                          dell_hamiltonian, ers_hamiltonian)
from operlab.rational import rf_const, rf_var
from operlab.trs import TRSFrame, trs_hamiltonian


@pytest.fixture(scope="module")
def model2():
    return DELLModel.create(2, 0, 0)


@pytest.fixture(scope="module")
def model3():
    return DELLModel.create(3, 1, 1)


def _weight(k):
    return k * (k - 1) // 2


def test_model_validation():
    with pytest.raises(ValueError):
        DELLModel.create(1, 1, 1)
    with pytest.raises(ValueError):
        DELLModel.create(2, -1, 0)


def test_mode_grading_and_weight_bound(model3):
    modes = dell_current(model3)
    for a, op in modes.items():
        for shifts in op.terms:
            assert sum(shifts) == a
            assert sum(_weight(k) for k in shifts) <= model3.w_cap


def test_leading_scalar_invariant(model3):
    # the (p,w)-leading part of O_0 is the scalar that gets inverted
    reg = model3.registry
    lead = rf_const(reg, 1)
    for i in range(3):
        for j in range(i + 1, 3):
            lead = lead * (1 - rf_var(reg, f"x{i + 1}") / rf_var(reg, f"x{j + 1}"))
    c = dell_current(model3)[0].terms[(0, 0, 0)].coefficient((0, 0))
    assert (c - lead).is_zero()


def test_closed_forms_two_particles(model2):
    reg = model2.registry
    x1, x2, h = rf_var(reg, "x1"), rf_var(reg, "x2"), rf_var(reg, "h")
    modes = dell_current(model2)
    o0, o1 = modes[0], modes[1]
    assert sorted(o0.terms) == [(0, 0)]
    assert (o0.terms[(0, 0)].constant_term() - (1 - x1 / x2)).is_zero()
    assert (o1.terms[(1, 0)].constant_term() + (1 - h * x1 / x2)).is_zero()
    assert (o1.terms[(0, 1)].constant_term() + (1 - x1 / (h * x2))).is_zero()
    h1 = dell_hamiltonian(model2, 1, modes)
    den = 1 - x1 / x2
    assert (h1.terms[(1, 0)].constant_term() + (1 - h * x1 / x2) / den).is_zero()
    assert (h1.terms[(0, 1)].constant_term() + (1 - x1 / (h * x2)) / den).is_zero()


def test_free_particle_limit(model2):
    # coupling 1 collapses the lowest Hamiltonian to -(P_1 + P_2)
    reg = model2.registry
    hi = reg.index("h")
    h1 = dell_hamiltonian(model2, 1)
    for shifts in ((1, 0), (0, 1)):
        c = h1.terms[shifts].constant_term().subs_monomial(hi, 1, {})
        assert (c + 1).is_zero()


def test_hamiltonian_errors(model2):
    with pytest.raises(ValueError):
        dell_hamiltonian(model2, 2)
    with pytest.raises(ValueError):
        dell_hamiltonian(model2, 1, ordering="middle")


def test_mode_window_warning():
    m = DELLModel.create(2, 0, 0, zmode_range=1)
    with pytest.warns(UserWarning):
        dell_current(m)


def test_certificate_two_particles():
    # a single Hamiltonian: nothing to pair up, and [H_1, H_1] = 0
    m = DELLModel.create(2, 1, 1)
    rep = dell_commutativity_certificate(m)
    assert rep["passes"] and rep["mode"] == "symbolic" and not rep["pairs"]
    h1 = dell_hamiltonian(m, 1)
    assert h1.commutator(h1).is_zero()


def test_certificate_exact_at_zero_caps():
    # mod (p, w) the Hamiltonians are trigonometric and commute exactly
    rep = dell_commutativity_certificate(DELLModel.create(3, 0, 0))
    assert rep["passes"] and rep["mode"] == "symbolic"
    assert rep["pairs"][(1, 2)]["zero_orders"] == [(0, 0)]


def test_certificate_three_particles(model3):
    rep = dell_commutativity_certificate(model3,
                                         samples=(DEFAULT_QH_SAMPLES[0],))
    assert rep["passes"] and rep["mode"] == "sampled"
    assert rep["pairs"][(1, 2)]["first_failure"] is None
    assert set(rep["pairs"][(1, 2)]["zero_orders"]) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def test_certificate_opposite_ordering(model3):
    # the inverse composed on the right commutes as well at these caps
    rep = dell_commutativity_certificate(model3, ordering="right",
                                         samples=(DEFAULT_QH_SAMPLES[0],))
    assert rep["passes"]


def test_certificate_negative_control(model3):
    # dropping the descending theta factors breaks closure; the corruption
    # leaves every p^0 coefficient untouched, so failure starts at p^1
    rep = dell_commutativity_certificate(model3, corrupt_theta=True,
                                         samples=(DEFAULT_QH_SAMPLES[0],))
    assert not rep["passes"]
    assert rep["pairs"][(1, 2)]["first_failure"] == (1, 0)
    assert set(rep["pairs"][(1, 2)]["zero_orders"]) == {(0, 0), (0, 1)}


def test_ers_top_level_is_pure_momentum():
    op = ers_hamiltonian(3, 3, 2)
    assert sorted(op.terms) == [(1, 1, 1)]
    assert (op.terms[(1, 1, 1)] - 1).is_zero()


def test_ers_cap_zero_equals_trs():
    for n, r in [(2, 1), (3, 1), (3, 2)]:
        op = ers_hamiltonian(n, r, 0)
        frame = TRSFrame.create("generic", n, registry=op.registry, t_name="h")
        trs = trs_hamiltonian(frame, r)
        assert op.map_coefficients(lambda c: c.constant_term()) == trs
    with pytest.raises(ValueError):
        ers_hamiltonian(2, 3, 0)


def test_ers_first_correction_two_particles():
    # order-p term of theta(h u)/theta(u) from the explicit product
    op = ers_hamiltonian(2, 1, 1)
    reg = op.registry
    u = rf_var(reg, "x1") / rf_var(reg, "x2")
    h = rf_var(reg, "h")
    base = (1 - h * u) / (1 - u)
    corr = base * (u + 1 / u - h * u - 1 / (h * u))
    c = op.terms[(1, 0)]
    assert (c.coefficient((0,)) - base).is_zero()
    assert (c.coefficient((1,)) - corr).is_zero()


def test_degeneration_two_particles():
    rep = degeneration_check(2, 1, 1)
    assert rep["passes"]
    factor = rep["hamiltonians"][1]["dell_to_ers_factor"]
    assert (factor + 1).is_zero()


def test_degeneration_three_particles():
    # split caps exercised separately; factor is (-1)^a h^{a(a-1)/2}
    for pc, wc in [(1, 0), (0, 1)]:
        rep = degeneration_check(3, pc, wc)
        assert rep["passes"], (pc, wc)
        f1 = rep["hamiltonians"][1]["dell_to_ers_factor"]
        f2 = rep["hamiltonians"][2]["dell_to_ers_factor"]
        assert (f1 + 1).is_zero()
        h = rf_var(f2.registry, "h")
        assert (f2 - h).is_zero()


def test_coupling_one_collapse_across_tiers():
    # at coupling 1 every tier has unit coefficients (up to the reported sign)
    op = ers_hamiltonian(2, 1, 1)
    reg = op.registry
    hi = reg.index("h")
    collapsed = op.map_coefficients(
        lambda c: c.map_coefficients(lambda rf: rf.subs_monomial(hi, 1, {})))
    for shifts, c in collapsed.terms.items():
        assert (c - 1).is_zero(), shifts
    frame = TRSFrame.create("generic", 2, registry=reg, t_name="h")
    trs = trs_hamiltonian(frame, 1)
    for shifts, c in trs.terms.items():
        assert (c.subs_monomial(hi, 1, {}) - 1).is_zero()
