"""Trial-transform exactness, residual correctness, and error measurement."""

import numpy as np
import pytest

from glnlab.autodiff import Jet, grad_fd
from glnlab.deq import (
    PROBLEM_NAMES,
    analytic_residual,
    analytic_values,
    eval_error,
    get_problem,
    make_collocation,
    residual_loss,
    residual_loss_fns,
    residual_values,
    solution_values,
    trial_decay,
    trial_dirichlet_1d,
    trial_dirichlet_2d,
    trial_ivp2,
    trial_solution_jets,
)
from glnlab.network import init_mlp, init_model

ANALYTIC_PROBLEMS = ("decay", "catenary", "sho", "damped", "laplace", "heat")


def random_net(problem, seed, kind="gln"):
    shape = [problem.input_dim, 20, 1]
    return init_model(kind, shape, seed)


# -- plain transform identities ----------------------------------------------


def test_trial_decay_pins_initial_value():
    for u_hat in (0.0, -3.3, 12.0):
        assert trial_decay(u_hat, 0.0) == 1.0
    ts = np.linspace(0, 3, 7)
    assert np.allclose(trial_decay(0.0, ts), 1.0)


def test_trial_decay_perfect_target():
    # exp(-t) corresponds to a raw output identically equal to -1
    ts = np.linspace(0.0, 3.0, 9)
    assert np.allclose(trial_decay(-1.0, ts), np.exp(-ts), atol=1e-15)
    assert trial_decay(-1.0, 1.0) == pytest.approx(0.36787944117144233, abs=1e-15)


def test_trial_dirichlet_1d_pins_both_ends():
    for u_hat in (0.0, 5.0, -2.5):
        assert trial_dirichlet_1d(u_hat, -2.0, -2.0, 2.0, 3.76, 3.76) == 3.76
        assert trial_dirichlet_1d(u_hat, 2.0, -2.0, 2.0, 3.76, 3.76) == 3.76


def test_trial_ivp2_initial_value_and_slope():
    # with zero raw output the transform is u0 + du0*(1 - e^{-t})
    ts = np.linspace(0, 5, 11)
    assert np.allclose(trial_ivp2(0.0, ts, 0.0, 1.0), 1.0 - np.exp(-ts))
    # jets verify value and first derivative at t=0 exactly, any raw output
    for u_hat in (0.0, 4.2, -1.7):
        j = trial_ivp2(Jet.const(u_hat, 2), Jet.seed(0.0, 2), 0.25, -3.5)
        assert j.coeff[0] == 0.25
        assert j.coeff[1] == -3.5


def test_trial_dirichlet_2d_sides():
    ys = np.linspace(0, 1, 5)
    assert np.allclose(trial_dirichlet_2d(7.0, 0.0, ys), np.sin(np.pi * ys))
    assert np.max(np.abs(trial_dirichlet_2d(7.0, 1.0, ys))) <= 1e-12
    xs = np.linspace(0, 1, 5)
    assert np.max(np.abs(trial_dirichlet_2d(7.0, xs, 0.0))) <= 1e-12
    assert np.max(np.abs(trial_dirichlet_2d(7.0, xs, 1.0))) <= 1e-12


# -- condition exactness through real networks --------------------------------


def _conditions_max_violation(name, net):
    prob = get_problem(name)
    worst = 0.0

    def sol(points):
        return solution_values(prob, net, points)

    if name == "decay":
        pts = np.array([[0.0]])
        worst = abs(sol(pts)[0] - 1.0)
    elif name == "catenary":
        pts = np.array([[-2.0, 2.0]])
        worst = np.max(np.abs(sol(pts) - 3.76))
    elif name in ("sho", "damped"):
        jets = trial_solution_jets(prob, net, np.array([[0.0]]))
        u = jets["t"]
        worst = max(abs(float(np.asarray(u.coeff[0]).ravel()[0]) - 0.0),
                    abs(float(np.asarray(u.coeff[1]).ravel()[0]) - 1.0))
    elif name == "laplace":
        side = np.linspace(0.0, 1.0, 9)
        for pts, ref in [
            (np.stack([np.zeros(9), side]), np.sin(np.pi * side)),
            (np.stack([np.ones(9), side]), 0.0),
            (np.stack([side, np.zeros(9)]), 0.0),
            (np.stack([side, np.ones(9)]), 0.0),
        ]:
            worst = max(worst, np.max(np.abs(sol(pts) - ref)))
    elif name == "heat":
        xs = np.linspace(0.0, 2.0, 9)
        worst = np.max(np.abs(sol(np.stack([xs, np.zeros(9)]))
                              - np.sin(np.pi * xs / 2.0)))
        # prescribed fluxes at both space boundaries, checked with jets
        ts = np.linspace(0.0, 2.0, 7)
        rate = 0.3 * np.pi**2 / 4.0
        for x0, sign in ((0.0, 1.0), (2.0, -1.0)):
            pts = np.stack([np.full(7, x0), ts])
            jets = trial_solution_jets(prob, net, pts)
            flux = np.asarray(jets["x"].coeff[1]).ravel()
            want = sign * (np.pi / 2.0) * np.exp(-rate * ts)
            worst = max(worst, np.max(np.abs(flux - want)))
    elif name == "ks":
        xs = np.linspace(-40.0, 40.0, 9)
        worst = np.max(np.abs(sol(np.stack([xs, np.zeros(9)])) - np.exp(-xs**2)))
        ts = np.linspace(0.0, 20.0, 7)
        for x0 in (-40.0, 40.0):
            pts = np.stack([np.full(7, x0), ts])
            worst = max(worst, np.max(np.abs(sol(pts))))
    return worst


@pytest.mark.parametrize("name", PROBLEM_NAMES)
def test_conditions_exact_for_random_networks(name):
    for seed in range(5):
        net = random_net(get_problem(name), seed=100 + seed)
        assert _conditions_max_violation(name, net) <= 1e-12


def test_ks_gaussian_peak_with_zero_net():
    prob = get_problem("ks")
    net = random_net(prob, 0)
    zeroed = net.unflatten(np.zeros(net.flatten().size))
    ts = np.linspace(0, 20, 5)
    pts = np.stack([np.zeros(5), ts])
    assert np.allclose(solution_values(prob, zeroed, pts), 1.0, atol=1e-15)


# -- residuals ----------------------------------------------------------------


@pytest.mark.parametrize("name", ANALYTIC_PROBLEMS)
def test_analytic_solution_annihilates_residual(name):
    prob = get_problem(name)
    rng = np.random.default_rng(17)
    pts = np.stack([rng.uniform(lo, hi, size=1000) for lo, hi in prob.domain])
    r = analytic_residual(prob, pts)
    assert np.max(np.abs(r)) <= 1e-8


def test_rigged_decay_net_reaches_zero_loss():
    prob = get_problem("decay")
    net = init_mlp([1, 20, 1], "gln", seed=0)
    theta = np.zeros(net.flatten().size)
    theta[-1] = -1.0  # output bias: raw output identically -1
    rigged = net.unflatten(theta)
    colloc = make_collocation(prob, 32, seed=1)
    assert residual_loss(rigged, prob, colloc.train_points) <= 1e-8


def test_residual_loss_nonnegative_and_zero_only_at_zero_residual():
    prob = get_problem("sho")
    net = random_net(prob, 3)
    colloc = make_collocation(prob, 16, seed=2)
    loss = residual_loss(net, prob, colloc.train_points)
    assert loss >= 0.0
    r = np.asarray(residual_values(prob, net, colloc.train_points)).ravel()
    assert loss == pytest.approx(np.mean(r**2))
    assert loss > 0.0  # a random net does not solve the equation


def test_catenary_residual_sign_convention():
    # cosh solves u'' - sqrt(1 + u'^2) = 0; flipping the sign must not
    prob = get_problem("catenary")
    pts = np.linspace(-2, 2, 50)[None, :]
    r = analytic_residual(prob, pts)
    assert np.max(np.abs(r)) <= 1e-10
    flipped = np.cosh(pts.ravel()) + np.sqrt(1.0 + np.sinh(pts.ravel()) ** 2)
    assert np.min(np.abs(flipped)) > 1.0


# -- error measurement ---------------------------------------------------------


def test_eval_error_zero_for_injected_analytic():
    prob = get_problem("decay")

    class Exact:
        in_dim = 1

        @staticmethod
        def forward(inputs, pieces=None):
            t = inputs[0] if isinstance(inputs, list) else inputs[0]
            # raw output -1 makes the trial equal exp(-t) exactly
            return np.full((1, np.size(t)), -1.0)

    err, label = eval_error(Exact, prob)
    assert label == "mse_vs_analytic"
    assert err <= 1e-12


def test_eval_error_constant_offset():
    prob = get_problem("decay")
    pts = np.linspace(0, 3, 64)[None, :]
    u = analytic_values(prob, pts) + 0.1
    err = float(np.mean((u - analytic_values(prob, pts)) ** 2))
    assert err == pytest.approx(0.01, abs=1e-12)


def test_eval_error_requires_analytic_when_asked():
    prob = get_problem("ks")
    with pytest.raises(ValueError):
        analytic_values(prob, np.zeros((2, 3)))
    net = random_net(prob, 1)
    val, label = eval_error(net, prob, n_per_axis=8,
                            points=make_collocation(prob, 8, 0).train_points)
    assert label == "residual_mse"
    assert val >= 0.0


# -- differentiability of the residual loss ------------------------------------


@pytest.mark.parametrize("name", ["decay", "catenary", "heat"])
def test_residual_gradients_match_finite_differences(name):
    prob = get_problem(name)
    net = init_mlp([prob.input_dim, 8, 1], "gln", seed=5)
    pts = make_collocation(prob, 6, seed=3).train_points
    fns = residual_loss_fns(prob, net, pts)
    theta = net.flatten()
    analytic = fns.grad_at(theta)
    numeric = grad_fd(fns.value_at, theta)
    denom = np.maximum(np.maximum(np.abs(analytic), np.abs(numeric)), 1e-8)
    assert float(np.max(np.abs(analytic - numeric) / denom)) <= 1e-3
