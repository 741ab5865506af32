"""Ensemble-averaged Godunov scheme with the one-parameter probability family.

Per interface, four Riemann problems (each phase pairing) feed probability-
weighted conservative fluxes plus signed cross-phase Lagrangian terms; the
volume fraction advances with the same machinery under the formal substitution
flux -> 0, state -> 1 (so the Lagrangian flux reduces to -sigma). Time
integration is forward Euler under a CFL bound, with optional per-cell
relaxation after each step (operator splitting).
"""

from dataclasses import dataclass, replace

import numpy as np

from .eos import sound_speed
from .errors import DemflowError, SolverError
from .probability import AlphaPair, ProbabilityQuad, convex_quad
from .regime import RegimeField, StochasticRegime, UniformRandomRegime, init_field, stochastic_update
from .relaxation import relax_continuous, relax_projection
from .riemann import RiemannFan, hllc, lagrangian_flux
from .state import (Conserved, MixtureCell, PhaseCellState, Primitive,
                    cons_to_prim, prim_to_cons, validate_mixture)


@dataclass(frozen=True)
class Grid1D:
    """Uniform mesh; cells is a struct-of-arrays MixtureCell whose leaf fields
    all have shape (n_cells,)."""

    x_min: float
    x_max: float
    n_cells: int
    cells: MixtureCell

    def __post_init__(self):
        if self.n_cells < 3:
            raise SolverError("grid needs at least 3 cells")
        if not self.x_max > self.x_min:
            raise SolverError("grid domain is empty")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.n_cells

    def cell_centers(self):
        return self.x_min + (np.arange(self.n_cells) + 0.5) * self.dx

    def interface_positions(self):
        return self.x_min + np.arange(self.n_cells + 1) * self.dx


def beta(sigma):
    """Flux indicator: +1 where the contact speed is >= 0, else -1.
    (beta)+ and (-beta)+ act as {0, 1} switches on the cross-phase terms."""
    return np.where(np.asarray(sigma) >= 0.0, 1, -1)


@dataclass(frozen=True)
class InterfaceFluxSet:
    """Everything one interface contributes: the four phase-pairing fans,
    the probability quad (phase 1 as k), and the cross-pair flux indicators."""

    fan_11: RiemannFan
    fan_12: RiemannFan
    fan_21: RiemannFan
    fan_22: RiemannFan
    quad: ProbabilityQuad
    beta_12: np.ndarray
    beta_21: np.ndarray


def interface_fluxes(v1_left, v1_right, v2_left, v2_right,
                     alpha1_left, alpha1_right, r, eos1, eos2) -> InterfaceFluxSet:
    """Solve the four Riemann problems of one interface (arrays solve a whole
    row of interfaces at once) and attach the probability coefficients."""
    fan_11 = hllc(v1_left, v1_right, eos1, eos1)
    fan_12 = hllc(v1_left, v2_right, eos1, eos2)
    fan_21 = hllc(v2_left, v1_right, eos2, eos1)
    fan_22 = hllc(v2_left, v2_right, eos2, eos2)
    quad = convex_quad(AlphaPair(alpha1_left, alpha1_right), r)
    return InterfaceFluxSet(fan_11, fan_12, fan_21, fan_22, quad,
                            beta(fan_12.sigma), beta(fan_21.sigma))


def ensemble_flux(ifs: InterfaceFluxSet):
    """Probability-weighted conservative flux per phase at each interface.
    Cross-phase candidates only count when the sampled Godunov state belongs
    to the receiving phase (beta switches)."""
    q = ifs.quad
    on12 = (ifs.beta_12 > 0).astype(float)
    on21 = (ifs.beta_21 > 0).astype(float)
    e1 = (q.p_kk * ifs.fan_11.flux0
          + on12 * q.p_kl * ifs.fan_12.flux0
          + (1.0 - on21) * q.p_lk * ifs.fan_21.flux0)
    e2 = (q.p_ll * ifs.fan_22.flux0
          + on21 * q.p_lk * ifs.fan_21.flux0
          + (1.0 - on12) * q.p_kl * ifs.fan_12.flux0)
    return e1, e2


def _lagrangian_cell_sums(ifs, weight_12, weight_21):
    """Assemble the four-term signed Lagrangian sum per cell from per-interface
    weights: inflow terms from the left interface ((beta)+ switches) plus
    inflow terms from the right interface ((-beta)+ switches). Phase 2's sum
    is the exact negative of phase 1's."""
    q = ifs.quad
    on12 = (ifs.beta_12 > 0).astype(float)
    on21 = (ifs.beta_21 > 0).astype(float)
    term21 = q.p_lk * weight_21
    term12 = q.p_kl * weight_12
    plus = on21 * term21 - on12 * term12
    minus = (1.0 - on21) * term21 - (1.0 - on12) * term12
    phase1 = plus[..., :-1] + minus[..., 1:]
    return phase1, -phase1


def boundary_lagrangian(ifs: InterfaceFluxSet):
    """Cross-phase Lagrangian flux sums per cell and phase, shape (3, n) given
    n + 1 interfaces."""
    return _lagrangian_cell_sums(ifs,
                                 lagrangian_flux(ifs.fan_12),
                                 lagrangian_flux(ifs.fan_21))


def volume_fraction_rhs(ifs: InterfaceFluxSet):
    """Discrete right-hand side of the volume-fraction transport per cell and
    phase (flux -> 0, state -> 1 turns the Lagrangian flux into -sigma). The
    two phases sum to zero, preserving saturation exactly."""
    return _lagrangian_cell_sums(ifs,
                                 -np.asarray(ifs.fan_12.sigma),
                                 -np.asarray(ifs.fan_21.sigma))


def cfl_dt(grid: Grid1D, cfl, eos1, eos2) -> float:
    """Largest stable time step: cfl * dx / max(|u| + a) over cells and phases."""
    fastest = 0.0
    for phase, eos in ((grid.cells.phase1, eos1), (grid.cells.phase2, eos2)):
        v = cons_to_prim(phase.cons, eos)
        fastest = max(fastest, float(np.max(np.abs(v.u) + sound_speed(v.rho, v.p, eos))))
    if not np.isfinite(fastest) or fastest <= 0.0:
        raise SolverError("non-finite wave speed in CFL estimate")
    return float(cfl) * grid.dx / fastest


def apply_bc(grid: Grid1D) -> Grid1D:
    """Extend the grid with two transmissive (zero-gradient) ghost cells per
    side."""
    def pad(arr):
        arr = np.asarray(arr, dtype=float)
        return np.concatenate([arr[:1], arr[:1], arr, arr[-1:], arr[-1:]])

    def pad_phase(phase):
        return PhaseCellState(
            alpha=pad(phase.alpha),
            cons=Conserved(pad(phase.cons.mass), pad(phase.cons.momentum),
                           pad(phase.cons.energy)),
        )

    return Grid1D(
        x_min=grid.x_min - 2.0 * grid.dx,
        x_max=grid.x_max + 2.0 * grid.dx,
        n_cells=grid.n_cells + 4,
        cells=MixtureCell(pad_phase(grid.cells.phase1), pad_phase(grid.cells.phase2)),
    )


def hyperbolic_step(grid: Grid1D, regime: RegimeField, dt, eos1, eos2) -> Grid1D:
    """One forward-Euler update of alpha*U and alpha for both phases.

    Interface computations read only the two adjacent cells and the
    interface's r; cell updates read only precomputed interface data, summed
    in a fixed order, so the result is independent of any parallel split.
    """
    n = grid.n_cells
    if np.shape(regime.values) != (n + 1,):
        raise SolverError("regime field does not match the grid's interfaces")
    ext = apply_bc(grid)
    a1_ext = np.asarray(ext.cells.phase1.alpha, dtype=float)
    v1_ext = cons_to_prim(ext.cells.phase1.cons, eos1)
    v2_ext = cons_to_prim(ext.cells.phase2.cons, eos2)

    lft = slice(1, n + 2)
    rgt = slice(2, n + 3)

    def window(v, s):
        return Primitive(v.rho[s], v.u[s], v.p[s])

    ifs = interface_fluxes(window(v1_ext, lft), window(v1_ext, rgt),
                           window(v2_ext, lft), window(v2_ext, rgt),
                           a1_ext[lft], a1_ext[rgt], regime.values, eos1, eos2)
    e1, e2 = ensemble_flux(ifs)
    l1, l2 = boundary_lagrangian(ifs)
    w1, w2 = volume_fraction_rhs(ifs)

    lam = dt / grid.dx

    def update_phase(phase, e, lag, vrhs):
        alpha = np.asarray(phase.alpha, dtype=float)
        u_old = phase.cons.as_array()
        alpha_u = alpha * u_old - lam * (e[:, 1:] - e[:, :-1]) + lam * lag
        alpha_new = alpha + lam * vrhs
        present = alpha_new > 0.0
        u_new = np.where(present, alpha_u / np.where(present, alpha_new, 1.0), u_old)
        return PhaseCellState(alpha=alpha_new,
                              cons=Conserved(u_new[0], u_new[1], u_new[2]))

    cells = MixtureCell(
        phase1=update_phase(grid.cells.phase1, e1, l1, w1),
        phase2=update_phase(grid.cells.phase2, e2, l2, w2),
    )
    validate_mixture(cells, eos1, eos2, context="after hyperbolic step")
    return replace(grid, cells=cells)


def initial_grid(config) -> Grid1D:
    """Build the two-state (left/right of diaphragm) grid of a run config."""
    n = config.n_cells
    dx = (config.x_max - config.x_min) / n
    x = config.x_min + (np.arange(n) + 0.5) * dx
    on_left = x < config.diaphragm

    def phase(init_l, init_r, eos):
        prim = Primitive(
            rho=np.where(on_left, init_l.rho, init_r.rho),
            u=np.where(on_left, init_l.u, init_r.u),
            p=np.where(on_left, init_l.p, init_r.p),
        )
        return PhaseCellState(alpha=np.where(on_left, init_l.alpha, init_r.alpha),
                              cons=prim_to_cons(prim, eos))

    cells = MixtureCell(phase(config.left1, config.right1, config.eos1),
                        phase(config.left2, config.right2, config.eos2))
    return Grid1D(config.x_min, config.x_max, n, cells)


@dataclass(frozen=True)
class Snapshot:
    t: float
    grid: Grid1D
    regime_values: np.ndarray


_RELAXERS = {"none": None, "continuous": relax_continuous, "projection": relax_projection}
_MAX_STEPS = 10_000_000


def run(config) -> list:
    """Operator-split driver: CFL-limited hyperbolic steps, optional per-cell
    relaxation, per-step regime updates for random policies; emits snapshots
    at the requested times, each hit exactly by clipping the step."""
    eos1, eos2 = config.eos1, config.eos2
    grid = initial_grid(config)
    validate_mixture(grid.cells, eos1, eos2, context="initial condition")
    field = init_field(config.regime_policy, grid)
    relaxer = _RELAXERS[config.relaxation]
    random_policy = isinstance(config.regime_policy,
                               (StochasticRegime, UniformRandomRegime))

    targets = sorted(set(float(s) for s in config.snapshot_times) | {float(config.t_end)})
    snapshots = []
    t = 0.0
    if targets[0] == 0.0:
        snapshots.append(Snapshot(0.0, grid, field.values.copy()))
        targets = targets[1:]

    steps = 0
    for target in targets:
        while t < target:
            steps += 1
            if steps > _MAX_STEPS:
                raise SolverError("time loop exceeded the step budget")
            try:
                dt = cfl_dt(grid, config.cfl, eos1, eos2)
                hit = t + dt >= target
                if hit:
                    dt = target - t
                if random_policy:
                    field = stochastic_update(field)
                grid = hyperbolic_step(grid, field, dt, eos1, eos2)
                if relaxer is not None:
                    grid = replace(grid, cells=relaxer(grid.cells, eos1, eos2))
                    validate_mixture(grid.cells, eos1, eos2, context="after relaxation")
            except DemflowError as exc:
                raise type(exc)(f"{exc} (at t = {t:.9e} s, step {steps})") from exc
            t = target if hit else t + dt
        snapshots.append(Snapshot(t, grid, field.values.copy()))
    return snapshots
