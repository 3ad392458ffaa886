"""Parameter validation, accuracy conversions, and shared-contract checks."""

import math

import numpy as np
import pytest

from gradsamp import (
    GsParams,
    GsState,
    NonsmoothPolicy,
    ParamError,
    Rng,
    accuracy_to_distance,
    make_coverage_oracle,
    regularization_rho,
    run,
    validate_params,
)
from gradsamp.coverage import CoverageProblem


def test_defaults_valid_for_small_dims():
    for n in (1, 2, 5):
        validate_params(GsParams(), n)


def test_m_equal_n_plus_one_ok():
    validate_params(GsParams(alpha=0.5, beta=0.5, gamma=0.5, m=4), 3)


def test_m_below_n_plus_one_rejected():
    with pytest.raises(ParamError, match="m < n\\+1"):
        validate_params(GsParams(m=3), 3)


def test_mu_at_one_rejected():
    with pytest.raises(ParamError, match="mu not in \\(0,1\\)"):
        validate_params(GsParams(mu=1.0), 2)


def test_multiple_violations_all_reported():
    with pytest.raises(ParamError) as exc:
        validate_params(GsParams(alpha=0.0, beta=2.0, m=1), 2)
    msg = str(exc.value)
    assert "alpha" in msg and "beta" in msg and "m < n+1" in msg


def test_t_init_factor_floor():
    with pytest.raises(ParamError, match="t_init_factor"):
        validate_params(GsParams(gamma=0.9, t_init_factor=0.2), 2)


def test_effective_m_defaults_to_n_plus_two():
    p = GsParams()
    assert p.effective_m(4) == 6
    assert GsParams(m=9).effective_m(4) == 9


def test_delta_schedule_geometric_and_decreasing():
    p = GsParams(delta1=1e-3, delta_decay=0.95)
    ds = [p.delta_k(k) for k in range(1, 50)]
    assert ds[0] == 1e-3
    assert all(b < a for a, b in zip(ds, ds[1:]))
    assert ds[9] == pytest.approx(1e-3 * 0.95 ** 9)


def test_snapshot_round_trips_policy_as_string():
    snap = GsParams(on_nonsmooth_sample=NonsmoothPolicy.RESAMPLE).snapshot()
    assert snap["on_nonsmooth_sample"] == "resample"


def test_accuracy_to_distance_examples():
    assert accuracy_to_distance(0.5, 1.0) == pytest.approx(1.0)
    assert accuracy_to_distance(2.0, 4.0) == pytest.approx(1.0)
    assert accuracy_to_distance(1e-6, 2.0) == pytest.approx(1e-3)


def test_accuracy_to_distance_rejects_nonpositive():
    with pytest.raises(ValueError):
        accuracy_to_distance(0.0, 1.0)
    with pytest.raises(ValueError):
        accuracy_to_distance(1.0, -1.0)


def test_regularization_rho_examples():
    assert regularization_rho(1.0, 2.0) == pytest.approx(1.0)
    assert regularization_rho(0.01, 1.0) == pytest.approx(0.02)
    assert regularization_rho(0.5, 4.0) == pytest.approx(0.25)


def test_regularization_rho_rejects_nonpositive():
    with pytest.raises(ValueError):
        regularization_rho(-1.0, 1.0)
    with pytest.raises(ValueError):
        regularization_rho(1.0, 0.0)


def _two_agent_oracle():
    prob = CoverageProblem(n_agents=2, bin_edges=(0.0, 2.0, 4.0),
                           theta_lower=(0.0, 0.0), theta_upper=(0.45, 0.45))
    return make_coverage_oracle(prob)


def test_tolerance_coupling_shares_one_exponent():
    """eps and nu are always discounted together: eps/eps1 = mu^a and
    nu/nu1 = vartheta^a with the same integer a at every iteration."""
    oracle = _two_agent_oracle()
    p = GsParams(max_iters=400)
    tr = run(oracle, p, np.array([0.3, 3.3]), Rng(5))
    for r in tr.records:
        a_eps = math.log(r.eps / p.eps1) / math.log(p.mu)
        a_nu = math.log(r.nu / p.nu1) / math.log(p.vartheta)
        assert a_eps == pytest.approx(a_nu, abs=1e-9)
        assert a_eps == pytest.approx(round(a_eps), abs=1e-9)
        assert round(a_eps) >= 0


def test_oracle_purity_double_call():
    oracle = _two_agent_oracle()
    x = np.array([0.7, 3.1])
    theta = np.array([0.3, 0.2])
    assert oracle.eval_F(x, theta) == oracle.eval_F(x, theta)
    np.testing.assert_array_equal(oracle.grad_x_F(x, theta),
                                  oracle.grad_x_F(x, theta))


def test_trace_iteration_numbers_strictly_increasing():
    oracle = _two_agent_oracle()
    tr = run(oracle, GsParams(max_iters=50), np.array([0.3, 3.3]), Rng(3))
    ks = [r.k for r in tr.records]
    assert ks == list(range(1, len(ks) + 1))


def test_state_fields():
    s = GsState(k=3, x=np.array([1.0]), eps=0.1, nu=0.05)
    assert s.k == 3 and s.eps == 0.1 and s.nu == 0.05
