"""Management of the per-interface flow-regime field r(x, t) in [0, 1].

r = 0 selects the stratified probability pair, r = 1 the disperse one.
Policies: constant, piecewise-constant in x, stochastic random-walk updates
(clamped to [0, 1]), and a uniform-resample comparison mode drawing fresh
U[0, 1] values each step (distribution bounds are an assumption; the use
case only states "uniformly randomly chosen").
"""

from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError

# recorded in output metadata so runs are reproducible across builds
RNG_ALGORITHM = "numpy-pcg64"


@dataclass(frozen=True)
class ConstantRegime:
    value: float

    def describe(self):
        return f"constant:r={self.value:g}"


@dataclass(frozen=True)
class PiecewiseRegime:
    """r(x) = values[j] on [breakpoints[j-1], breakpoints[j]); open-ended
    outermost pieces."""

    breakpoints: tuple
    values: tuple

    def describe(self):
        bps = ",".join(f"{b:g}" for b in self.breakpoints)
        vals = ",".join(f"{v:g}" for v in self.values)
        return f"piecewise:breakpoints={bps}:values={vals}"


@dataclass(frozen=True)
class StochasticRegime:
    """Per-step random walk r += epsilon * Unif[-1, 1], clamped to [0, 1]."""

    epsilon: float
    seed: int
    initial: float = 0.0

    def describe(self):
        return f"stochastic:epsilon={self.epsilon:g}:r0={self.initial:g}:seed={self.seed}"


@dataclass(frozen=True)
class UniformRandomRegime:
    """Fresh U[0, 1] draw per interface per step (comparison mode)."""

    seed: int

    def describe(self):
        return f"uniform:seed={self.seed}"


@dataclass(frozen=True)
class RegimeField:
    """Immutable per-step snapshot of the interface r values; the generator is
    shared across snapshots so a run consumes one stream, interface-major
    within each step."""

    values: np.ndarray
    policy: object
    rng: np.random.Generator | None = None


def init_field(policy, grid) -> RegimeField:
    """Sample the policy at the grid's interface positions."""
    xs = grid.interface_positions()
    if isinstance(policy, ConstantRegime):
        _check_unit(policy.value)
        values = np.full(xs.shape, float(policy.value))
        return RegimeField(values, policy)
    if isinstance(policy, PiecewiseRegime):
        bps = np.asarray(policy.breakpoints, dtype=float)
        vals = np.asarray(policy.values, dtype=float)
        if bps.size + 1 != vals.size:
            raise ConfigError("piecewise regime needs len(values) == len(breakpoints) + 1")
        if np.any(np.diff(bps) <= 0.0):
            raise ConfigError("piecewise regime breakpoints must be strictly increasing")
        if np.any(bps <= grid.x_min) or np.any(bps >= grid.x_max):
            raise ConfigError("piecewise regime breakpoints outside the domain")
        for v in vals:
            _check_unit(v)
        values = vals[np.searchsorted(bps, xs, side="right")]
        return RegimeField(values, policy)
    if isinstance(policy, StochasticRegime):
        _check_unit(policy.initial)
        rng = np.random.default_rng(policy.seed)
        values = np.full(xs.shape, float(policy.initial))
        return RegimeField(values, policy, rng)
    if isinstance(policy, UniformRandomRegime):
        rng = np.random.default_rng(policy.seed)
        return RegimeField(rng.random(xs.shape), policy, rng)
    raise ConfigError(f"unknown regime policy {policy!r}")


def stochastic_update(field: RegimeField) -> RegimeField:
    """Advance a stochastic or uniform-resample field by one step; one draw per
    interface, deterministic given the seed. Other policies are not updated."""
    if isinstance(field.policy, StochasticRegime):
        q = 2.0 * field.rng.random(field.values.shape) - 1.0
        perturbed = field.values + field.policy.epsilon * q
        return replace(field, values=np.clip(perturbed, 0.0, 1.0))
    if isinstance(field.policy, UniformRandomRegime):
        return replace(field, values=field.rng.random(field.values.shape))
    raise ConfigError(f"policy {field.policy!r} has no stochastic update")


def _check_unit(v):
    if not 0.0 <= v <= 1.0:
        raise ConfigError(f"regime value {v} outside [0, 1]")
