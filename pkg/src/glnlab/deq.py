"""Seven differential-equation benchmarks trained by squared-residual loss.

Each problem bundles a condition-enforcing trial transform, a residual over
derivative jets, the training collocation convention, a fixed epoch budget,
and (when one exists) the closed-form solution used for error measurement.

The trial transform is written against generic scalar math, so evaluating it
on per-axis seed jets yields the constrained solution together with its
derivatives; running the same code with tape-node parameters makes the
squared residual differentiable with respect to every network parameter.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .autodiff import Jet, Tape, grad
from .autodiff import ops
from .network import Model, unflatten_pieces
from .training import TrainConfig, TrainOutcome, train_residual

MSE_VS_ANALYTIC = "mse_vs_analytic"
RESIDUAL_MSE = "residual_mse"


@dataclass(frozen=True)
class DeqProblem:
    name: str
    axes: tuple[str, ...]
    domain: tuple[tuple[float, float], ...]
    orders: dict
    epochs: int
    trial: Callable
    residual: Callable
    analytic: Optional[Callable]
    metric: str

    @property
    def input_dim(self) -> int:
        return len(self.axes)


@dataclass(frozen=True)
class CollocationSet:
    train_points: np.ndarray  # (dim, n), equispaced grid
    valid_points: np.ndarray  # (dim, n), uniform random inside the domain
    sampling: str
    seed: int
    n_per_axis: int = 32


# -- trial transforms ---------------------------------------------------------

def trial_decay(u_hat, t):
    """Pins u(0) = 1; u approaches the raw output as t grows."""
    return 1.0 + (1.0 - ops.exp(-t)) * u_hat


def trial_dirichlet_1d(u_hat, x, lo, hi, u_lo, u_hi):
    """Linear interpolant of the two boundary values plus a vanishing blend."""
    s = (x - lo) * (1.0 / (hi - lo))
    return (1.0 - s) * u_lo + s * u_hi + (s * (1.0 - s)) * u_hat


def trial_ivp2(u_hat, t, u0, du0):
    """Pins u(0) and u'(0); the squared window keeps u'(0) untouched."""
    w = 1.0 - ops.exp(-t)
    return u0 + du0 * w + (w * w) * u_hat


def trial_dirichlet_2d(u_hat, x, y):
    """Unit square with one sine side and three zero sides."""
    return (1.0 - x) * ops.sin(np.pi * y) + ((x * (1.0 - x)) * (y * (1.0 - y))) * u_hat


def _flux_probe(net_apply, x0: float, t_like):
    """d(raw output)/dx at fixed x = x0, expressed in the algebra of t_like.

    A fresh order-1 jet axis carries the x direction; t rides along as a
    constant coefficient, so when t itself is a jet the result keeps its
    time derivatives (the one mixed partial the heat correction needs).
    """
    x_probe = Jet((x0, 1.0))
    t_wrapped = Jet((t_like, 0.0))
    out = net_apply([x_probe, t_wrapped])
    return out.coeff[1]


def trial_heat(net_apply, x, t, k: float, length: float):
    """Exact initial profile plus a flux-matched correction.

    At t = 0 the transform returns sin(pi x / L) exactly; the x-quadratic
    blend of the two boundary flux errors makes du/dx at x = 0 and x = L
    equal the prescribed decaying fluxes identically for any raw output.
    """
    u_hat = net_apply([x, t])
    rate = k * np.pi**2 / length**2
    flux0 = np.pi / length
    g = flux0 * ops.exp((-rate) * t)
    p0 = x - (x * x) * (0.5 / length)
    p_l = (x * x) * (0.5 / length)
    ux0 = _flux_probe(net_apply, 0.0, t)
    ux_l = _flux_probe(net_apply, length, t)
    w = 1.0 - ops.exp(-t)
    u_init = ops.sin((np.pi / length) * x)
    return (u_init + (g - flux0) * (p0 - p_l)
            + w * (u_hat - ux0 * p0 - ux_l * p_l))


def trial_ks(u_hat, x, t, half_width: float = 40.0):
    """Gaussian initial hump with both spatial boundaries pinned to zero."""
    bump = ops.exp(-(x * x))
    fence = ((x + half_width) * (half_width - x)) * (1.0 / half_width**2)
    return bump + ((1.0 - ops.exp(-t)) * fence) * u_hat


# -- problem definitions ------------------------------------------------------

def _sinh(v):
    return 0.5 * (ops.exp(v) - ops.exp(-v))


def _cosh(v):
    return 0.5 * (ops.exp(v) + ops.exp(-v))


def _decay() -> DeqProblem:
    def trial(napply, c):
        return trial_decay(napply([c["t"]]), c["t"])

    def residual(jets):
        u = jets["t"]
        return u.coeff[1] + u.coeff[0]

    return DeqProblem(
        name="decay", axes=("t",), domain=((0.0, 3.0),), orders={"t": 1},
        epochs=500, trial=trial, residual=residual,
        analytic=lambda c: ops.exp(-c["t"]), metric=MSE_VS_ANALYTIC)


def _catenary() -> DeqProblem:
    u_ends = 3.76

    def trial(napply, c):
        return trial_dirichlet_1d(napply([c["x"]]), c["x"], -2.0, 2.0, u_ends, u_ends)

    def residual(jets):
        u = jets["x"]
        slope = u.coeff[1]
        return u.coeff[2] - ops.sqrt(1.0 + slope * slope)

    return DeqProblem(
        name="catenary", axes=("x",), domain=((-2.0, 2.0),), orders={"x": 2},
        epochs=700, trial=trial, residual=residual,
        analytic=lambda c: _cosh(c["x"]), metric=MSE_VS_ANALYTIC)


def _sho() -> DeqProblem:
    def trial(napply, c):
        return trial_ivp2(napply([c["t"]]), c["t"], 0.0, 1.0)

    def residual(jets):
        u = jets["t"]
        return u.coeff[2] + u.coeff[0]

    return DeqProblem(
        name="sho", axes=("t",), domain=((0.0, 3.0 * np.pi),), orders={"t": 2},
        epochs=700, trial=trial, residual=residual,
        analytic=lambda c: ops.sin(c["t"]), metric=MSE_VS_ANALYTIC)


def _damped() -> DeqProblem:
    def trial(napply, c):
        return trial_ivp2(napply([c["t"]]), c["t"], 0.0, 1.0)

    def residual(jets):
        u = jets["t"]
        return u.coeff[2] + u.coeff[1] + u.coeff[0]

    # roots -1/2 +- i sqrt(3)/2 for u'' + u' + u = 0 with u(0)=0, u'(0)=1
    omega = np.sqrt(3.0) / 2.0

    def analytic(c):
        t = c["t"]
        return (1.0 / omega) * (ops.exp(-0.5 * t) * ops.sin(omega * t))

    return DeqProblem(
        name="damped", axes=("t",), domain=((0.0, 6.0 * np.pi),), orders={"t": 2},
        epochs=1000, trial=trial, residual=residual,
        analytic=analytic, metric=MSE_VS_ANALYTIC)


def _laplace() -> DeqProblem:
    def trial(napply, c):
        return trial_dirichlet_2d(napply([c["x"], c["y"]]), c["x"], c["y"])

    def residual(jets):
        return jets["x"].coeff[2] + jets["y"].coeff[2]

    sinh_pi = float(np.sinh(np.pi))

    def analytic(c):
        return ops.sin(np.pi * c["y"]) * _sinh(np.pi * (1.0 - c["x"])) * (1.0 / sinh_pi)

    return DeqProblem(
        name="laplace", axes=("x", "y"),
        domain=((0.0, 1.0), (0.0, 1.0)), orders={"x": 2, "y": 2},
        epochs=300, trial=trial, residual=residual,
        analytic=analytic, metric=MSE_VS_ANALYTIC)


HEAT_K = 0.3
HEAT_LENGTH = 2.0


def _heat() -> DeqProblem:
    k, length = HEAT_K, HEAT_LENGTH

    def trial(napply, c):
        return trial_heat(napply, c["x"], c["t"], k, length)

    def residual(jets):
        return jets["t"].coeff[1] - k * jets["x"].coeff[2]

    rate = k * np.pi**2 / length**2

    def analytic(c):
        return ops.sin((np.pi / length) * c["x"]) * ops.exp((-rate) * c["t"])

    return DeqProblem(
        name="heat", axes=("x", "t"),
        domain=((0.0, length), (0.0, 2.0)), orders={"x": 2, "t": 1},
        epochs=300, trial=trial, residual=residual,
        analytic=analytic, metric=MSE_VS_ANALYTIC)


def _ks() -> DeqProblem:
    def trial(napply, c):
        return trial_ks(napply([c["x"], c["t"]]), c["x"], c["t"])

    def residual(jets):
        ux = jets["x"]
        ut = jets["t"]
        return ut.coeff[1] + ux.coeff[0] * ux.coeff[1] + ux.coeff[2] + ux.coeff[4]

    return DeqProblem(
        name="ks", axes=("x", "t"),
        domain=((-40.0, 40.0), (0.0, 20.0)), orders={"x": 4, "t": 1},
        epochs=1500, trial=trial, residual=residual,
        analytic=None, metric=RESIDUAL_MSE)


_BUILDERS = {
    "decay": _decay, "catenary": _catenary, "sho": _sho, "damped": _damped,
    "laplace": _laplace, "heat": _heat, "ks": _ks,
}

PROBLEM_NAMES = tuple(_BUILDERS)


def get_problem(name: str) -> DeqProblem:
    try:
        return _BUILDERS[name]()
    except KeyError:
        raise ValueError(f"unknown problem: {name!r}") from None


# -- evaluation pipeline ------------------------------------------------------

def _grid_points(problem: DeqProblem, n_per_axis: int) -> np.ndarray:
    axes = [np.linspace(lo, hi, n_per_axis) for lo, hi in problem.domain]
    if problem.input_dim == 1:
        return axes[0][None, :]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=0)


def make_collocation(problem: DeqProblem, n_per_axis: int = 32,
                     seed: int = 0) -> CollocationSet:
    """Equispaced training grid plus a same-size uniform-random validation set."""
    train = _grid_points(problem, n_per_axis)
    rng = np.random.default_rng(seed)
    total = train.shape[1]
    cols = [rng.uniform(lo, hi, size=total) for lo, hi in problem.domain]
    valid = np.stack(cols, axis=0)
    return CollocationSet(train, valid, "uniform-random", seed, n_per_axis)


def trial_solution_jets(problem: DeqProblem, model: Model,
                        points: np.ndarray, pieces=None) -> dict:
    """Per-axis jets of the constrained solution at `points` ((dim, n) array)."""

    def napply(components):
        return model.forward(list(components), pieces=pieces)

    out = {}
    for ai, axis in enumerate(problem.axes):
        order = problem.orders[axis]
        coords = {}
        for bi, other in enumerate(problem.axes):
            row = points[bi]
            coords[other] = Jet.seed(row, order) if bi == ai else row
        out[axis] = problem.trial(napply, coords)
    return out


def residual_values(problem: DeqProblem, model: Model, points: np.ndarray,
                    pieces=None):
    jets = trial_solution_jets(problem, model, points, pieces)
    return problem.residual(jets)


def residual_loss(model: Model, problem: DeqProblem, points: np.ndarray) -> float:
    """Mean squared residual of the trial solution over `points`."""
    return ops.mean_square(residual_values(problem, model, points))


def solution_values(problem: DeqProblem, model: Model,
                    points: np.ndarray) -> np.ndarray:
    """Constrained solution values (no derivatives) at `points`."""

    def napply(components):
        return model.forward(list(components))

    coords = {axis: points[i] for i, axis in enumerate(problem.axes)}
    return np.asarray(problem.trial(napply, coords)).ravel()


def analytic_values(problem: DeqProblem, points: np.ndarray) -> np.ndarray:
    if problem.analytic is None:
        raise ValueError(f"problem {problem.name!r} has no closed-form solution")
    coords = {axis: points[i] for i, axis in enumerate(problem.axes)}
    return np.asarray(problem.analytic(coords)).ravel()


def analytic_solution_jets(problem: DeqProblem, points: np.ndarray) -> dict:
    """Closed-form solution injected as a jet source, one jet per axis."""
    if problem.analytic is None:
        raise ValueError(f"problem {problem.name!r} has no closed-form solution")
    out = {}
    for ai, axis in enumerate(problem.axes):
        order = problem.orders[axis]
        coords = {}
        for bi, other in enumerate(problem.axes):
            row = points[bi]
            coords[other] = Jet.seed(row, order) if bi == ai else row
        out[axis] = problem.analytic(coords)
    return out


def analytic_residual(problem: DeqProblem, points: np.ndarray) -> np.ndarray:
    """Residual of the closed-form solution; should vanish to rounding."""
    jets = analytic_solution_jets(problem, points)
    return np.asarray(problem.residual(jets)).ravel()


def eval_error(model: Model, problem: DeqProblem, n_per_axis: int = 100,
               points: np.ndarray | None = None) -> tuple[float, str]:
    """Test-grid error: MSE against the closed form, or mean squared residual
    (labelled distinctly) when no closed form exists."""
    if points is None:
        per_axis = n_per_axis if problem.input_dim == 1 else 32
        points = _grid_points(problem, per_axis)
    if problem.metric == MSE_VS_ANALYTIC:
        u = solution_values(problem, model, points)
        ref = analytic_values(problem, points)
        return float(np.mean((u - ref) ** 2)), MSE_VS_ANALYTIC
    return float(ops.mean_square(residual_values(problem, model, points))), RESIDUAL_MSE


# -- training glue ------------------------------------------------------------

class ResidualObjective:
    """Residual loss over a collocation bundle, with the solver conventions:
    every epoch jitters the equispaced grid with normal noise of std one
    quarter of the grid spacing per axis, shuffles it, and steps per
    minibatch of 16; validation uses the bundle's fixed random set.
    """

    batch_size = 16

    def __init__(self, problem: DeqProblem, colloc: CollocationSet,
                 jitter: bool = True):
        self.problem = problem
        self.colloc = colloc
        self.jitter = jitter
        spans = np.array([hi - lo for lo, hi in problem.domain])
        self._noise_std = (spans / colloc.n_per_axis / 4.0)[:, None]

    def epoch_points(self, rng: np.random.Generator) -> np.ndarray:
        base = self.colloc.train_points
        if not self.jitter:
            return base
        return base + rng.normal(0.0, 1.0, size=base.shape) * self._noise_std

    def loss_nodes(self, model: Model, pieces, points: np.ndarray):
        return ops.mean_square(residual_values(self.problem, model, points, pieces))

    def validation_loss(self, model: Model, pieces) -> float:
        r = residual_values(self.problem, model, self.colloc.valid_points, pieces)
        return float(ops.mean_square(r))


def solve(model: Model, problem: DeqProblem, colloc: CollocationSet,
          cfg: TrainConfig, epochs: int | None = None) -> TrainOutcome:
    """Train `model` on the problem's residual for its fixed epoch budget."""
    objective = ResidualObjective(problem, colloc)
    return train_residual(model, objective, epochs or problem.epochs, cfg)


def residual_loss_fns(problem: DeqProblem, model: Model, points: np.ndarray):
    """value_at/grad_at pair over flat parameters, for gradient checking."""
    template = model.param_pieces()

    class _Fns:
        @staticmethod
        def value_at(theta):
            pieces = unflatten_pieces(theta, template)
            return float(ops.mean_square(
                residual_values(problem, model, points, pieces)))

        @staticmethod
        def grad_at(theta):
            tape = Tape()
            nodes = [tape.leaf(p) for p in unflatten_pieces(theta, template)]
            loss = ops.mean_square(residual_values(problem, model, points, nodes))
            return grad(loss, nodes)

    return _Fns


def export_solution(problem: DeqProblem, model: Model, path,
                    n_per_axis: int = 100) -> None:
    """Solution grid as CSV: coordinates, u, analytic-or-residual reference, error."""
    per_axis = n_per_axis if problem.input_dim == 1 else 32
    points = _grid_points(problem, per_axis)
    u = solution_values(problem, model, points)
    if problem.metric == MSE_VS_ANALYTIC:
        ref = analytic_values(problem, points)
        err = u - ref
        ref_label = "analytic"
    else:
        ref = np.asarray(residual_values(problem, model, points)).ravel()
        err = ref
        ref_label = "residual"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(problem.axes) + ["u", ref_label, "error"])
        for j in range(points.shape[1]):
            row = [repr(points[i, j]) for i in range(points.shape[0])]
            writer.writerow(row + [repr(u[j]), repr(ref[j]), repr(err[j])])
