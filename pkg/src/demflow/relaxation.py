"""Infinite-drag pressure/velocity equilibration per cell.

Two strategies produce a cell on the equilibrium variety (common velocity and
pressure): relax_continuous solves the coupled density/pressure system with a
damped Newton iteration and conserves per-phase mass exactly, mixture momentum
exactly and mixture energy to solver tolerance; relax_projection applies the
kernel-projection matrix of the linearized source, a one-shot update accurate
to second order in the pre-relaxation disequilibrium.

All operations accept cells holding scalars or arrays (whole grids at once).
"""

from dataclasses import dataclass

import numpy as np

from .eos import EosParams, de_dp, de_drho, internal_energy, sound_speed
from .errors import ConvergenceError, InvalidStateError
from .state import (MixtureCell, PhaseCellState, Primitive, cons_to_prim,
                    prim_to_cons)


@dataclass(frozen=True)
class ReducedEquilibrium:
    """Reduced variable vector on the equilibrium variety: per-phase volume
    fraction and density, one shared velocity and pressure."""

    alpha1: float | np.ndarray
    rho1: float | np.ndarray
    u: float | np.ndarray
    p: float | np.ndarray
    alpha2: float | np.ndarray
    rho2: float | np.ndarray


def maxwellian(red: ReducedEquilibrium, eos1: EosParams, eos2: EosParams) -> MixtureCell:
    """Rebuild a full two-phase cell from reduced equilibrium variables."""
    for a in (red.alpha1, red.alpha2):
        arr = np.asarray(a)
        if np.any(arr < 0.0) or np.any(arr > 1.0) or not np.all(np.isfinite(arr)):
            raise InvalidStateError("reconstructed volume fraction left [0, 1]")
    return MixtureCell(
        phase1=PhaseCellState(alpha=red.alpha1,
                              cons=prim_to_cons(Primitive(red.rho1, red.u, red.p), eos1)),
        phase2=PhaseCellState(alpha=red.alpha2,
                              cons=prim_to_cons(Primitive(red.rho2, red.u, red.p), eos2)),
    )


def reduce_equilibrium(cell: MixtureCell, eos1: EosParams, eos2: EosParams) -> ReducedEquilibrium:
    """Project a cell onto reduced variables (mass-weighted velocity,
    volume-weighted pressure); inverse of maxwellian on equilibrium cells."""
    v1 = cons_to_prim(cell.phase1.cons, eos1)
    v2 = cons_to_prim(cell.phase2.cons, eos2)
    a1, a2 = cell.phase1.alpha, cell.phase2.alpha
    m1, m2 = a1 * v1.rho, a2 * v2.rho
    return ReducedEquilibrium(
        alpha1=a1, rho1=v1.rho,
        u=(m1 * v1.u + m2 * v2.u) / (m1 + m2),
        p=a1 * v1.p + a2 * v2.p,
        alpha2=a2, rho2=v2.rho,
    )


def _phase_arrays(cell, eos1, eos2):
    a1 = np.atleast_1d(np.asarray(cell.phase1.alpha, dtype=float))
    a2 = np.atleast_1d(np.asarray(cell.phase2.alpha, dtype=float))
    v1 = cons_to_prim(cell.phase1.cons, eos1)
    v2 = cons_to_prim(cell.phase2.cons, eos2)
    prims = [np.atleast_1d(np.asarray(x, dtype=float))
             for x in (v1.rho, v1.u, v1.p, v2.rho, v2.u, v2.p)]
    return (a1, a2, *prims)


def _restore_shape(value, like):
    return value.reshape(np.shape(like)) if np.ndim(like) else float(value[0])


def relax_continuous(cell: MixtureCell, eos1: EosParams, eos2: EosParams,
                     tol=1e-10, max_iter=100) -> MixtureCell:
    """Equilibrate to common velocity and pressure via the continuous-limit
    relaxation system.

    The mixture velocity is the exact mass-weighted mean. Densities and the
    common pressure solve the per-phase energy relations (with interfacial
    pressure/velocity approximated by their relaxed values) plus the
    saturation constraint, via damped Newton iteration. Per-phase alpha*rho
    is preserved exactly by construction.
    """
    a1, a2, rho10, u1, p1, rho20, u2, p2 = _phase_arrays(cell, eos1, eos2)
    shape_like = cell.phase1.alpha
    if np.any(a1 <= 0.0) or np.any(a1 >= 1.0) or np.any(a2 <= 0.0) or np.any(a2 >= 1.0):
        raise InvalidStateError("relaxation requires both phases present (0 < alpha < 1)")

    m1 = a1 * rho10
    m2 = a2 * rho20
    u_star = (m1 * u1 + m2 * u2) / (m1 + m2)
    du1sq = (u_star - u1) ** 2
    du2sq = (u_star - u2) ** 2
    e10 = internal_energy(rho10, p1, eos1)
    e20 = internal_energy(rho20, p2, eos2)
    z1 = rho10 * sound_speed(rho10, p1, eos1)
    z2 = rho20 * sound_speed(rho20, p2, eos2)
    p_guess = (z1 * p2 + z2 * p1) / (z1 + z2)
    pscale = np.maximum.reduce([np.abs(p_guess), p1 + eos1.pi_inf, p2 + eos2.pi_inf])

    r1 = rho10.copy()
    r2 = rho20.copy()
    p = p_guess.copy()
    active = np.ones(r1.shape, dtype=bool)

    def residuals(r1, r2, p):
        f1 = (2.0 * r1 * rho10 * (internal_energy(r1, p, eos1) - e10)
              - r1 * rho10 * du1sq - 2.0 * p * (r1 - rho10))
        f2 = (2.0 * r2 * rho20 * (internal_energy(r2, p, eos2) - e20)
              - r2 * rho20 * du2sq - 2.0 * p * (r2 - rho20))
        f3 = m1 / r1 + m2 / r2 - 1.0
        return f1, f2, f3

    converged = False
    for _ in range(max_iter):
        f1, f2, f3 = residuals(r1, r2, p)
        A1 = (2.0 * rho10 * (internal_energy(r1, p, eos1) - e10)
              + 2.0 * r1 * rho10 * de_drho(r1, p, eos1) - rho10 * du1sq - 2.0 * p)
        A2 = (2.0 * rho20 * (internal_energy(r2, p, eos2) - e20)
              + 2.0 * r2 * rho20 * de_drho(r2, p, eos2) - rho20 * du2sq - 2.0 * p)
        B1 = 2.0 * r1 * rho10 * de_dp(r1, p, eos1) - 2.0 * (r1 - rho10)
        B2 = 2.0 * r2 * rho20 * de_dp(r2, p, eos2) - 2.0 * (r2 - rho20)
        C1 = -m1 / r1**2
        C2 = -m2 / r2**2
        denom = C1 * B1 / A1 + C2 * B2 / A2
        if np.any(active & ((A1 == 0.0) | (A2 == 0.0) | (denom == 0.0)
                            | ~np.isfinite(denom))):
            raise ConvergenceError("singular Jacobian in relaxation Newton solve")
        dp = (f3 - C1 * f1 / A1 - C2 * f2 / A2) / denom
        dr1 = -(f1 + B1 * dp) / A1
        dr2 = -(f2 + B2 * dp) / A2

        # damp per cell until the trial state stays admissible
        step = np.ones_like(r1)
        for _ in range(30):
            r1_try = r1 + step * dr1
            r2_try = r2 + step * dr2
            p_try = p + step * dp
            bad = active & ((r1_try <= 0.0) | (r2_try <= 0.0)
                            | (p_try + eos1.pi_inf <= 0.0)
                            | (p_try + eos2.pi_inf <= 0.0))
            if not bad.any():
                break
            step = np.where(bad, 0.5 * step, step)
        else:
            raise ConvergenceError("relaxation Newton left the admissible region")
        r1 = np.where(active, r1_try, r1)
        r2 = np.where(active, r2_try, r2)
        p = np.where(active, p_try, p)

        increment = np.maximum.reduce([
            np.abs(step * dr1) / rho10,
            np.abs(step * dr2) / rho20,
            np.abs(step * dp) / pscale,
        ])
        # residuals mapped to pressure units; saturation must reach the state
        # invariant tolerance, tighter than the generic stop criterion
        res_ok = ((np.abs(f1) * (eos1.gamma - 1.0) / (2.0 * rho10) <= tol * pscale)
                  & (np.abs(f2) * (eos2.gamma - 1.0) / (2.0 * rho20) <= tol * pscale)
                  & (np.abs(f3) <= 1e-12))
        active &= ~((increment <= tol) & res_ok)
        if not active.any():
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"relaxation Newton did not converge in {max_iter} iterations "
            f"({int(np.count_nonzero(active))} cells remaining)")

    red = ReducedEquilibrium(
        alpha1=_restore_shape(m1 / r1, shape_like),
        rho1=_restore_shape(r1, shape_like),
        u=_restore_shape(u_star, shape_like),
        p=_restore_shape(p, shape_like),
        alpha2=_restore_shape(m2 / r2, shape_like),
        rho2=_restore_shape(r2, shape_like),
    )
    return maxwellian(red, eos1, eos2)


def relax_projection(cell: MixtureCell, eos1: EosParams, eos2: EosParams) -> MixtureCell:
    """One-shot equilibration through the kernel projection of the linearized
    relaxation source, built from the pre-relaxation state."""
    a1, a2, rho1, u1, p1, rho2, u2, p2 = _phase_arrays(cell, eos1, eos2)
    shape_like = cell.phase1.alpha
    if np.any(a1 <= 0.0) or np.any(a1 >= 1.0) or np.any(a2 <= 0.0) or np.any(a2 >= 1.0):
        raise InvalidStateError("relaxation requires both phases present (0 < alpha < 1)")
    c1sq = sound_speed(rho1, p1, eos1) ** 2
    c2sq = sound_speed(rho2, p2, eos2) ** 2
    d = a1 * rho2 * c2sq + a2 * rho1 * c1sq
    if np.any(d <= 0.0) or not np.all(np.isfinite(d)):
        raise InvalidStateError("degenerate acoustic impedances in projection relaxation")
    m1 = a1 * rho1
    m2 = a2 * rho2
    dp = p1 - p2
    red = ReducedEquilibrium(
        alpha1=_restore_shape(a1 + a1 * a2 * dp / d, shape_like),
        rho1=_restore_shape(rho1 - a2 * rho1 * dp / d, shape_like),
        u=_restore_shape((m1 * u1 + m2 * u2) / (m1 + m2), shape_like),
        p=_restore_shape((a1 * rho2 * c2sq * p1 + a2 * rho1 * c1sq * p2) / d, shape_like),
        alpha2=_restore_shape(a2 - a1 * a2 * dp / d, shape_like),
        rho2=_restore_shape(rho2 + a1 * rho2 * dp / d, shape_like),
    )
    return maxwellian(red, eos1, eos2)


def projection_matrix(cell: MixtureCell, eos1: EosParams, eos2: EosParams) -> np.ndarray:
    """The 6x8 projection onto the kernel of the linearized relaxation source,
    evaluated at the cell's state. Maps the primitive 8-vector
    (alpha1, rho1, u1, p1, alpha2, rho2, u2, p2) to reduced variables.
    Batched cells give shape (..., 6, 8)."""
    a1, a2, rho1, _, p1, rho2, _, p2 = _phase_arrays(cell, eos1, eos2)
    c1sq = sound_speed(rho1, p1, eos1) ** 2
    c2sq = sound_speed(rho2, p2, eos2) ** 2
    d = a1 * rho2 * c2sq + a2 * rho1 * c1sq
    m1 = a1 * rho1
    m2 = a2 * rho2
    pi = np.zeros(a1.shape + (6, 8))
    pi[..., 0, 0] = 1.0
    pi[..., 0, 3] = a1 * a2 / d
    pi[..., 0, 7] = -a1 * a2 / d
    pi[..., 1, 1] = 1.0
    pi[..., 1, 3] = -a2 * rho1 / d
    pi[..., 1, 7] = a2 * rho1 / d
    pi[..., 2, 2] = m1 / (m1 + m2)
    pi[..., 2, 6] = m2 / (m1 + m2)
    pi[..., 3, 3] = a1 * rho2 * c2sq / d
    pi[..., 3, 7] = a2 * rho1 * c1sq / d
    pi[..., 4, 3] = -a1 * a2 / d
    pi[..., 4, 4] = 1.0
    pi[..., 4, 7] = a1 * a2 / d
    pi[..., 5, 3] = a1 * rho2 / d
    pi[..., 5, 5] = 1.0
    pi[..., 5, 7] = -a1 * rho2 / d
    if np.ndim(cell.phase1.alpha) == 0:
        return pi[0]
    return pi


def reduced_jacobian() -> np.ndarray:
    """Constant 8x6 Jacobian of the map from reduced variables to the
    primitive 8-vector (the shared u and p fan out to both phases)."""
    dm = np.zeros((8, 6))
    for row, col in ((0, 0), (1, 1), (2, 2), (3, 3), (4, 4), (5, 5), (6, 2), (7, 3)):
        dm[row, col] = 1.0
    return dm


def kernel_range_vectors(cell: MixtureCell, eos1: EosParams, eos2: EosParams):
    """The two primitive-variable directions spanned by the linearized
    relaxation source; the projection matrix annihilates both.
    Batched cells give shapes (..., 8)."""
    a1, a2, rho1, _, p1, rho2, _, p2 = _phase_arrays(cell, eos1, eos2)
    c1sq = sound_speed(rho1, p1, eos1) ** 2
    c2sq = sound_speed(rho2, p2, eos2) ** 2
    zeros = np.zeros_like(a1)
    v1 = np.stack([np.ones_like(a1), -rho1 / a1, zeros, -rho1 * c1sq / a1,
                   -np.ones_like(a1), rho2 / a2, zeros, rho2 * c2sq / a2], axis=-1)
    v2 = np.stack([zeros, zeros, 1.0 / (a1 * rho1), zeros,
                   zeros, zeros, -1.0 / (a2 * rho2), zeros], axis=-1)
    if np.ndim(cell.phase1.alpha) == 0:
        return v1[0], v2[0]
    return v1, v2
