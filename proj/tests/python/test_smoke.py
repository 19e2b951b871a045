import math

import pytest

kfdp = pytest.importorskip("kfdp")


def test_lr_constants():
    c = kfdp.lr_constants(10, "1/10", 0.05)
    assert len(c) == 10
    assert c[0] == pytest.approx(0.005, rel=1e-15)
    assert c[-1] == pytest.approx(0.05, rel=1e-15)
    assert kfdp.lr_constants(10, 0.1, 0.05) == c


def test_rescaled_lr_template_matches_lr_family():
    lr = kfdp.constants("lr", 30, gamma="1/10")
    sd = kfdp.constants("thm32", 30, gamma="1/10", template="lr", k=1)
    assert sd["direction"] == "sd"
    assert sd["scaling"] == pytest.approx(0.05, rel=1e-12)
    assert sd["constants"] == pytest.approx(lr["constants"], rel=1e-12)


def test_calibrated_family_reports_beta_star():
    r = kfdp.constants("thm38", 10, gamma="1/10", f="independence")
    assert r["beta_star"] == pytest.approx(0.0381009087, rel=1e-7)
    assert abs(r["scaling"] - 0.05) <= 1e-9


def test_stepwise_example():
    p = [0.01, 0.06, 0.07]
    c = [0.02, 0.05, 0.075]
    assert kfdp.step_up(p, c)["r"] == 3
    down = kfdp.step_down(p, c)
    assert down["r"] == 1
    assert down["rejected"] == [0]


def test_error_mapping():
    with pytest.raises(ValueError):
        kfdp.constants("thm34", 10, k=1)
    with pytest.raises(kfdp.ConfigError):
        kfdp.step_up([0.1, 1.5], [0.1, 0.2])
    with pytest.raises(ValueError):
        kfdp.bvn_cdf(0.0, 0.0, 1.5)


def test_exact_exceedance():
    assert not kfdp.exceeds_gamma(1, 10, 1, "1/10")
    assert kfdp.exceeds_gamma(2, 10, 1, "1/10")
    assert kfdp.kfdp_value(2, 8, 3) == 0.0
    assert kfdp.Gamma.parse("0.3") == kfdp.Gamma(3, 10)


def test_kernel_values():
    assert kfdp.bvn_cdf(0.0, 0.0, 0.5) == pytest.approx(1 / 3, abs=1e-12)
    assert kfdp.two_sided_equicorr_F(0.3, 0.4, 0.0) == pytest.approx(0.12, abs=1e-12)


def test_simulation_is_seed_deterministic():
    a = kfdp.simulate("lr-su", n=50, pi0=0.8, rho=0.3, reps=300, seed=4)
    b = kfdp.simulate("lr-su", n=50, pi0=0.8, rho=0.3, reps=300, seed=4, threads=1)
    assert a == b
    assert a["n0"] == 40
    assert 0.0 <= a["exceedance"] <= 1.0
    assert math.isfinite(a["power"])
    assert "thm38" in kfdp.procedure_names()


def test_verify_pairdist_suite():
    rows = kfdp.verify("pairdist", 0, 1)
    assert rows
    assert all(r["passed"] for r in rows)
