"""Riemann solvers between arbitrary phase pairings.

hllc is the workhorse flux (per-side stiffened-gas parameters, Davis wave
speed estimates). exact_rp is the iterative exact solver used as an oracle.
lagrangian_flux extracts the moving-interface flux p* [0, 1, sigma] from a
solved fan, and interfacial_decomposition gives the closed-form acoustic
contact speed / pressure split into symmetric and antisymmetric parts.
"""

from dataclasses import dataclass

import numpy as np

from .eos import EosParams, internal_energy, sound_speed
from .errors import InvalidStateError, SolverError
from .state import Conserved, Primitive


def physical_flux(v: Primitive, eos: EosParams):
    """Exact flux [rho u, rho u^2 + p, u (rho E + p)] of a primitive state,
    stacked as shape (3, ...)."""
    e = internal_energy(v.rho, v.p, eos)
    rho_E = v.rho * (e + 0.5 * v.u**2)
    return np.stack(np.broadcast_arrays(
        v.rho * v.u,
        v.rho * v.u**2 + v.p,
        v.u * (rho_E + v.p),
    ))


@dataclass(frozen=True)
class RiemannFan:
    """Solved Riemann fan: flux and Godunov state sampled at x/t = 0, contact
    speed sigma, star pressure, and outer wave speed estimates."""

    flux0: np.ndarray
    sigma: float | np.ndarray
    p_star: float | np.ndarray
    u_star0: Conserved
    s_left: float | np.ndarray
    s_right: float | np.ndarray


def hllc(left: Primitive, right: Primitive, eos_left: EosParams,
         eos_right: EosParams) -> RiemannFan:
    """HLLC solver generalized to a different stiffened-gas EOS per side.

    Wave speed estimates are Davis-type: s_L = min(u_L - a_L, u_R - a_R) and
    s_R = max(u_L + a_L, u_R + a_R), each side with its own sound speed. The
    star flux satisfies F* = sigma U* + p* [0, 1, sigma], so the fan feeds
    lagrangian_flux directly. Consistency: hllc(V, V) returns the exact flux.
    """
    rl, ul, pl = (np.asarray(x, dtype=float) for x in (left.rho, left.u, left.p))
    rr, ur, pr = (np.asarray(x, dtype=float) for x in (right.rho, right.u, right.p))
    al = sound_speed(rl, pl, eos_left)
    ar = sound_speed(rr, pr, eos_right)

    s_l = np.minimum(ul - al, ur - ar)
    s_r = np.maximum(ul + al, ur + ar)
    if np.any(~(s_l < s_r)):
        raise SolverError("HLLC wave speed estimates crossed (vacuum-adjacent states)")

    # signed mass fluxes through the outer waves; q_l < 0 < q_r
    q_l = rl * (s_l - ul)
    q_r = rr * (s_r - ur)
    sigma = (pr - pl + ul * q_l - ur * q_r) / (q_l - q_r)
    p_star = pl + q_l * (sigma - ul)
    if np.any(~((s_l <= sigma) & (sigma <= s_r))):
        raise SolverError("HLLC contact speed left the wave fan")

    E_l = internal_energy(rl, pl, eos_left) + 0.5 * ul**2
    E_r = internal_energy(rr, pr, eos_right) + 0.5 * ur**2
    U_l = np.stack(np.broadcast_arrays(rl, rl * ul, rl * E_l))
    U_r = np.stack(np.broadcast_arrays(rr, rr * ur, rr * E_r))
    F_l = physical_flux(Primitive(rl, ul, pl), eos_left)
    F_r = physical_flux(Primitive(rr, ur, pr), eos_right)

    fac_l = rl * (s_l - ul) / (s_l - sigma)
    fac_r = rr * (s_r - ur) / (s_r - sigma)
    U_star_l = np.stack(np.broadcast_arrays(
        fac_l,
        fac_l * sigma,
        fac_l * (E_l + (sigma - ul) * (sigma + pl / q_l)),
    ))
    U_star_r = np.stack(np.broadcast_arrays(
        fac_r,
        fac_r * sigma,
        fac_r * (E_r + (sigma - ur) * (sigma + pr / q_r)),
    ))
    F_star_l = F_l + s_l * (U_star_l - U_l)
    F_star_r = F_r + s_r * (U_star_r - U_r)

    # sample at x/t = 0; the contact at exactly 0 takes the left star state
    flux0 = np.where(s_l >= 0.0, F_l,
                     np.where(sigma >= 0.0, F_star_l,
                              np.where(s_r >= 0.0, F_star_r, F_r)))
    state0 = np.where(s_l >= 0.0, U_l,
                      np.where(sigma >= 0.0, U_star_l,
                               np.where(s_r >= 0.0, U_star_r, U_r)))
    return RiemannFan(
        flux0=flux0,
        sigma=sigma,
        p_star=p_star,
        u_star0=Conserved(mass=state0[0], momentum=state0[1], energy=state0[2]),
        s_left=s_l,
        s_right=s_r,
    )


def lagrangian_flux(fan: RiemannFan):
    """Star-region value of F - sigma U: exactly p* [0, 1, sigma], with zero
    mass component. Side-independent because both star states share p* and
    sigma, shape (3, ...)."""
    p_star = np.asarray(fan.p_star, dtype=float)
    return np.stack(np.broadcast_arrays(
        np.zeros_like(p_star),
        p_star,
        p_star * fan.sigma,
    ))


@dataclass(frozen=True)
class AcousticInterface:
    """Closed-form acoustic contact speed and pressure with their symmetric /
    antisymmetric parts: sigma = sigma_sym - sigma_asym, p_star = p_sym - p_asym."""

    sigma: float | np.ndarray
    p_star: float | np.ndarray
    sigma_sym: float | np.ndarray
    sigma_asym: float | np.ndarray
    p_sym: float | np.ndarray
    p_asym: float | np.ndarray


def interfacial_decomposition(left: Primitive, right: Primitive,
                              z_left, z_right) -> AcousticInterface:
    """Acoustic interfacial quantities for impedances Z:
    sigma = (Z_L u_L + Z_R u_R)/(Z_L+Z_R) - (p_R - p_L)/(Z_L+Z_R) and
    p* = (Z_R p_L + Z_L p_R)/(Z_L+Z_R) - Z_L Z_R (u_R - u_L)/(Z_L+Z_R)."""
    zl = np.asarray(z_left, dtype=float)
    zr = np.asarray(z_right, dtype=float)
    zsum = zl + zr
    if np.any(zsum <= 0.0):
        raise InvalidStateError("acoustic impedances must have positive sum")
    sigma_sym = (zl * left.u + zr * right.u) / zsum
    sigma_asym = (right.p - left.p) / zsum
    p_sym = (zr * left.p + zl * right.p) / zsum
    p_asym = zl * zr * (right.u - left.u) / zsum
    return AcousticInterface(
        sigma=sigma_sym - sigma_asym,
        p_star=p_sym - p_asym,
        sigma_sym=sigma_sym,
        sigma_asym=sigma_asym,
        p_sym=p_sym,
        p_asym=p_asym,
    )


class _Side:
    """Per-side constants of the exact solver, in shifted-pressure form
    (every pressure enters as p + pi_inf, which reduces the stiffened gas to
    an ideal gas for the wave relations)."""

    def __init__(self, prim: Primitive, eos: EosParams):
        self.rho = float(prim.rho)
        self.u = float(prim.u)
        self.p = float(prim.p)
        self.gamma = eos.gamma
        self.pi = eos.pi_inf
        self.pbar = self.p + self.pi
        self.a = float(sound_speed(self.rho, self.p, eos))
        g = self.gamma
        self.A = 2.0 / ((g + 1.0) * self.rho)
        self.B = (g - 1.0) / (g + 1.0) * self.pbar
        self.exp = (g - 1.0) / (2.0 * g)

    def f(self, p):
        """Velocity change across the wave connecting this side to pressure p."""
        pbar = p + self.pi
        if p > self.p:
            return (p - self.p) * np.sqrt(self.A / (pbar + self.B))
        return 2.0 * self.a / (self.gamma - 1.0) * ((pbar / self.pbar) ** self.exp - 1.0)

    def df(self, p):
        pbar = p + self.pi
        if p > self.p:
            root = np.sqrt(self.A / (pbar + self.B))
            return root * (1.0 - 0.5 * (p - self.p) / (pbar + self.B))
        return (pbar / self.pbar) ** (-(self.gamma + 1.0) / (2.0 * self.gamma)) \
            / (self.rho * self.a)


def _sample_left_of_contact(side: _Side, u_star, p_star, xi):
    """Profile left of the contact for a left-side wave; arrays over xi."""
    g = side.gamma
    P = (p_star + side.pi) / side.pbar
    if p_star > side.p:
        s = side.u - side.a * np.sqrt((g + 1.0) / (2.0 * g) * P + (g - 1.0) / (2.0 * g))
        gg = (g - 1.0) / (g + 1.0)
        rho_star = side.rho * (P + gg) / (gg * P + 1.0)
        pre = xi < s
        rho = np.where(pre, side.rho, rho_star)
        u = np.where(pre, side.u, u_star)
        p = np.where(pre, side.p, p_star)
        return rho, u, p, ("shock", s, s)
    a_star = side.a * P**side.exp
    head = side.u - side.a
    tail = u_star - a_star
    # evaluated everywhere then masked; floor keeps the dead region finite
    a_fan = np.maximum(2.0 / (g + 1.0) * (side.a + 0.5 * (g - 1.0) * (side.u - xi)),
                       1e-30)
    u_fan = 2.0 / (g + 1.0) * (side.a + 0.5 * (g - 1.0) * side.u + xi)
    pbar_fan = side.pbar * (a_fan / side.a) ** (2.0 * g / (g - 1.0))
    rho_fan = g * pbar_fan / a_fan**2
    rho_star = side.rho * P ** (1.0 / g)
    rho = np.where(xi < head, side.rho, np.where(xi < tail, rho_fan, rho_star))
    u = np.where(xi < head, side.u, np.where(xi < tail, u_fan, u_star))
    p = np.where(xi < head, side.p, np.where(xi < tail, pbar_fan - side.pi, p_star))
    return rho, u, p, ("rarefaction", head, tail)


class ExactRiemannSolution:
    """Exact solution of a (possibly two-material) Riemann problem.

    Calling the object with xi = x/t samples the self-similar solution;
    left of the contact the left material applies, right of it the right one.
    """

    def __init__(self, left: Primitive, right: Primitive, eos_left: EosParams,
                 eos_right: EosParams, p_star, u_star, residual, iterations):
        self._left = _Side(left, eos_left)
        # mirrored right side: the right wave of (rho_R, u_R, p_R) is the left
        # wave of (rho_R, -u_R, p_R) under xi -> -xi
        self._right_m = _Side(Primitive(right.rho, -np.asarray(right.u, dtype=float),
                                        right.p), eos_right)
        self.p_star = float(p_star)
        self.u_star = float(u_star)
        self.residual = float(residual)
        self.iterations = int(iterations)
        _, _, _, self.left_wave = _sample_left_of_contact(
            self._left, self.u_star, self.p_star, np.asarray(0.0))
        _, _, _, wave_m = _sample_left_of_contact(
            self._right_m, -self.u_star, self.p_star, np.asarray(0.0))
        self.right_wave = (wave_m[0], -wave_m[2], -wave_m[1])

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        rho_l, u_l, p_l, _ = _sample_left_of_contact(self._left, self.u_star,
                                                     self.p_star, xi)
        rho_r, u_rm, p_r, _ = _sample_left_of_contact(self._right_m, -self.u_star,
                                                      self.p_star, -xi)
        on_left = xi < self.u_star
        return Primitive(
            rho=np.where(on_left, rho_l, rho_r),
            u=np.where(on_left, u_l, -u_rm),
            p=np.where(on_left, p_l, p_r),
        )

    sample = __call__


def _two_rarefaction_guess(sl: _Side, sr: _Side, du):
    g = 0.5 * (sl.gamma + sr.gamma)
    z = (g - 1.0) / (2.0 * g)
    pi_mean = 0.5 * (sl.pi + sr.pi)
    num = sl.a + sr.a - 0.5 * (g - 1.0) * du
    if num <= 0.0:
        return None
    den = sl.a / sl.pbar**z + sr.a / sr.pbar**z
    return (num / den) ** (1.0 / z) - pi_mean


def exact_rp(left: Primitive, right: Primitive, eos_left: EosParams,
             eos_right: EosParams, tol=1e-10, max_iter=100) -> ExactRiemannSolution:
    """Exact Riemann solver with per-side stiffened-gas parameters.

    Newton iteration on the monotone pressure function (shock and rarefaction
    branches per side), started from a two-rarefaction estimate and safeguarded
    by bisection on a bracketing interval. Vacuum formation (no root with both
    shifted pressures positive) raises SolverError.
    """
    sl = _Side(left, eos_left)
    sr = _Side(right, eos_right)
    du = sr.u - sl.u
    scale = max(sl.a, sr.a, abs(du), 1e-30)

    p_floor = -min(sl.pi, sr.pi)

    def f_total(p):
        return sl.f(p) + sr.f(p) + du

    if f_total(p_floor) >= 0.0:
        raise SolverError("exact Riemann problem forms vacuum (no positive root)")

    lo = p_floor
    hi = max(sl.p, sr.p)
    grow = max(hi - p_floor, sl.pbar, sr.pbar)
    for _ in range(200):
        if f_total(hi) > 0.0:
            break
        grow *= 2.0
        hi = p_floor + grow
    else:
        raise SolverError("exact Riemann solver failed to bracket the root")

    guess = _two_rarefaction_guess(sl, sr, du)
    span = hi - lo
    p = guess if guess is not None and lo + 1e-12 * span < guess < hi else 0.5 * (lo + hi)

    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        fp = f_total(p)
        if fp > 0.0:
            hi = p
        else:
            lo = p
        dfp = sl.df(p) + sr.df(p)
        p_new = p - fp / dfp if dfp > 0.0 else 0.5 * (lo + hi)
        if not lo < p_new < hi:
            p_new = 0.5 * (lo + hi)
        dp = abs(p_new - p)
        p = p_new
        if dp <= tol * max(p - p_floor, 1e-300) and abs(f_total(p)) <= tol * scale:
            converged = True
            break
    if not converged:
        raise SolverError(
            f"exact Riemann solver did not converge in {max_iter} iterations"
        )

    u_star = 0.5 * (sl.u + sr.u) + 0.5 * (sr.f(p) - sl.f(p))
    return ExactRiemannSolution(left, right, eos_left, eos_right,
                                p_star=p, u_star=u_star,
                                residual=abs(f_total(p)) / scale,
                                iterations=iterations)
