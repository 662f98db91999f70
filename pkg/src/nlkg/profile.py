"""Slow dynamics of the weighted frequency profile.

Unwinding the free phase and weighting by <xi>^kappa turns the reduced
system into an ODE family over frequencies: psi_j = <xi>^kappa e^{it<xi>}
vhat_j.  A cubic product of v and conj(v) splits into eight conjugation
patterns; each pattern carries a dilation by omega = 2*(number of
unconjugated slots) - 3 and a phase weight mu.  The three omega = 1 rows
are resonant and reproduce the symmetrised cubic Ftilde; the remaining
five oscillate with frequency b(xi) bounded away from zero, which is what
the non-resonant probes quantify.  Under the Hermitian structure
criterion the resonant flow conserves psi . A psi pointwise in xi.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .evolution import SolutionTrajectory, _g_hat
from .nonlinearity import CubicTensor, HermitianForm, eval_Ftilde
from .spectral import SpectralGrid, bracket, fft_forward

__all__ = [
    "InteractionRow", "INTERACTION_ROWS", "RESONANT_INDICES",
    "NONRESONANT_INDICES", "PhasePair", "phase_bound_scan",
    "ProfileState", "ProfileTrajectory", "extract_psi",
    "main_term", "remainder_probe", "resonant_rhs", "nonresonant_rhs",
    "integrate_profile_ode", "lyapunov", "scalar_resonant_closed_form",
]


@dataclass(frozen=True)
class InteractionRow:
    """One conjugation pattern of the cubic term.

    alpha marks the unconjugated slots of (k, l, m); omega is the induced
    dilation parameter 2*sum(alpha) - 3 and mu the constant weight.  The
    weights of a mirrored pattern pair (alpha and 1 - alpha) are complex
    conjugates of each other, which is forced by the product of v + conj v
    being real; row pairs (1,8), (2,7), (3,6), (4,5) therefore satisfy
    mu = conj(mu of partner).  This was also confirmed numerically: the
    expansion only matches the directly computed cubic term (remainder
    decaying below 1/t) with the conjugate-pair convention.
    """

    index: int
    alpha: tuple
    omega: int
    mu: complex

    @property
    def resonant(self) -> bool:
        return self.omega == 1


def _mu(alpha) -> complex:
    # -exp(-i pi s / 2) / 2 for the forward rows (omega > 0); the backward
    # rows carry the conjugate of their mirrored partner's weight
    s = sum(alpha)
    if 2 * s - 3 > 0:
        return -cmath.exp(-0.5j * math.pi * s) / 2.0
    return (-cmath.exp(-0.5j * math.pi * (3 - s)) / 2.0).conjugate()


INTERACTION_ROWS = tuple(
    InteractionRow(i + 1, a, 2 * sum(a) - 3, _mu(a))
    for i, a in enumerate([
        (1, 1, 1), (1, 1, 0), (1, 0, 1), (1, 0, 0),
        (0, 1, 1), (0, 1, 0), (0, 0, 1), (0, 0, 0),
    ])
)

RESONANT_INDICES = (2, 3, 5)
NONRESONANT_INDICES = (1, 4, 6, 7, 8)


@dataclass(frozen=True)
class PhasePair:
    """Amplitude and phase speed of one non-resonant interaction row.

    a(xi) = <xi>^(kappa-1) <xi/omega>^(3-3kappa)
    b(xi) = omega <xi/omega> - <xi>
    For omega != 1 the phase speed never vanishes, so the row is purely
    oscillatory and integrates by parts against 1/b.
    """

    omega: int
    kappa: float

    def a(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return bracket(xi) ** (self.kappa - 1.0) * bracket(xi / self.omega) ** (3.0 - 3.0 * self.kappa)

    def b(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return self.omega * bracket(xi / self.omega) - bracket(xi)


def phase_bound_scan(kappa: float, xi_cap: float = 32.0, n: int = 64001) -> dict:
    """Grid extrema of |b|<xi> and |a/b| for every non-resonant row."""
    xi = np.linspace(-xi_cap, xi_cap, n)
    out = {}
    for idx in NONRESONANT_INDICES:
        row = INTERACTION_ROWS[idx - 1]
        pair = PhasePair(row.omega, kappa)
        a, b = pair.a(xi), pair.b(xi)
        out[idx] = {
            "omega": row.omega,
            "min_b_bracket": float(np.min(np.abs(b) * bracket(xi))),
            "sup_ratio": float(np.max(np.abs(a / b))),
        }
    return out


@dataclass
class ProfileState:
    """psi(t, xi) on a sorted frequency grid, with its weight kappa."""

    kappa: float
    xi: np.ndarray
    psi: np.ndarray  # (N, m) complex
    t: float

    def __post_init__(self):
        if not (1.5 <= self.kappa <= 4.0):
            raise ValueError("kappa must lie in [3/2, 4]")
        if self.t < 1.0:
            raise ValueError("profiles are defined for t >= 1")
        self.psi = np.atleast_2d(np.asarray(self.psi, dtype=complex))
        if self.psi.shape[-1] != np.asarray(self.xi).size:
            raise ValueError("psi and xi shapes disagree")

    @property
    def n_components(self) -> int:
        return self.psi.shape[0]

    def copy(self) -> "ProfileState":
        return ProfileState(self.kappa, self.xi, self.psi.copy(), self.t)

    def sup(self) -> float:
        return float(np.max(np.abs(self.psi)))


@dataclass
class ProfileTrajectory:
    kappa: float
    xi: np.ndarray
    times: np.ndarray
    states: np.ndarray  # (n_times, N, m)

    def at(self, t: float) -> ProfileState:
        i = int(np.argmin(np.abs(self.times - t)))
        return ProfileState(self.kappa, self.xi, self.states[i].copy(), self.times[i])


def extract_psi(traj: SolutionTrajectory, t: float, kappa: float) -> ProfileState:
    """psi_j(t, xi) = <xi>^kappa exp(it<xi>) vhat_j(t, xi) from a snapshot."""
    if t < 1.0:
        raise ValueError("profile extraction needs t >= 1")
    grid = traj.grid
    vhat = traj.v_hat(t)
    weight = grid.xi_bracket ** kappa * np.exp(1j * t * grid.xi_bracket)
    psi = grid.sorted_view(weight * vhat)
    return ProfileState(kappa, grid.xi_sorted.copy(), psi, t)


def _factor_eval(splines, alpha, targets):
    """Product over slots of psi_lambda or conj(psi_lambda) at the targets."""
    prod = np.ones_like(targets, dtype=complex)
    for spline, unconj in zip(splines, alpha):
        vals = np.nan_to_num(spline(targets), nan=0.0)
        prod = prod * (vals if unconj else np.conj(vals))
    return prod


def main_term(tensor: CubicTensor, phi_hat: np.ndarray, xi: np.ndarray,
              t: float, kappa: float = 1.0, rows=None) -> np.ndarray:
    """Leading large-time part of the transformed cubic term.

    For profiles phi_hat sampled on the sorted frequencies, returns per
    component j

        i t^-1 e^{it<xi>} <xi>^(kappa-1) sum_{klm, rows} mu C[j,k,l,m]
            |omega|^{-1/2} e^{-it omega <xi/omega>} <xi/omega>^(3-3kappa)
            prod_slots ((conj or plain) <.>^kappa phi_hat)(xi/omega)

    so that kappa = 1 is the plain <xi/omega>^3-weighted expression.
    Dilated arguments are obtained by cubic interpolation of the smooth
    profiles.
    """
    if t < 1:
        raise ValueError("the expansion is used for t >= 1")
    xi = np.asarray(xi, dtype=float)
    phi_hat = np.atleast_2d(np.asarray(phi_hat, dtype=complex))
    N = tensor.n_components
    if phi_hat.shape[0] != N:
        raise ValueError("profile component count does not match the tensor")
    use_rows = [INTERACTION_ROWS[i - 1] for i in (rows or range(1, 9))]
    splines = [CubicSpline(xi, phi_hat[j], extrapolate=False) for j in range(N)]
    br = bracket(xi)
    out = np.zeros((N, xi.size), dtype=complex)
    for row in use_rows:
        w = row.omega
        scaled = xi / w
        br_s = bracket(scaled)
        osc = np.exp(-1j * t * w * br_s) * br_s ** (3.0 - 3.0 * kappa)
        dil = abs(w) ** -0.5
        for (j, k, l, m), c in tensor.coeffs:
            prod = _factor_eval((splines[k], splines[l], splines[m]),
                                row.alpha, scaled)
            # factors carry the kappa-weight of the profile variables
            prod = prod * br_s ** (3.0 * kappa)
            out[j] += (row.mu * float(c) * dil) * osc * prod
    prefactor = (1j / t) * np.exp(1j * t * br) * br ** (kappa - 1.0)
    return prefactor * out


def remainder_probe(grid: SpectralGrid, tensor: CubicTensor,
                    phi_fields: np.ndarray, t_values, j: int = 0,
                    window=None) -> dict:
    """Difference between the exact transformed cubic term and its main term.

    The left side F e^{it<iD>} <iD> G_j(e^{-it<iD>} phi) is evaluated by
    spectral composition on the grid (the only t-dependence is in exact
    phases), the main term by the interpolated row sum; their gap is the
    remainder whose sup norm is fitted against t.
    """
    phi_fields = np.atleast_2d(np.asarray(phi_fields, dtype=complex))
    phi_hat = fft_forward(grid, phi_fields)
    phi_hat_sorted = grid.sorted_view(phi_hat)
    br = grid.xi_bracket
    t_values = list(t_values)
    sups = []
    for t in t_values:
        vhat = np.exp(-1j * t * br) * phi_hat
        lhs = np.exp(1j * t * br) * (br * _g_hat(grid, tensor, vhat))
        lhs_sorted = grid.sorted_view(lhs[j])
        main = main_term(tensor, phi_hat_sorted, grid.xi_sorted, t)[j]
        sups.append(float(np.max(np.abs(lhs_sorted - main))))
    if window is None:
        window = (min(t_values), max(t_values))
    tv = np.asarray(t_values, dtype=float)
    sv = np.asarray(sups, dtype=float)
    mask = (tv >= window[0]) & (tv <= window[1]) & (sv > 0)
    if np.count_nonzero(mask) >= 2:
        slope, intercept = np.polyfit(np.log(tv[mask]), np.log(sv[mask]), 1)
    else:
        slope, intercept = math.nan, math.nan
    return {"t_values": list(map(float, t_values)), "sup_values": sups,
            "slope": float(slope), "intercept": float(intercept),
            "window": list(window), "component": j + 1}


def resonant_rhs(tensor: CubicTensor, psi: np.ndarray, t: float,
                 xi: np.ndarray, kappa: float) -> np.ndarray:
    """(i/2) t^-1 <xi>^(2-2kappa) Ftilde(psi), pointwise in xi."""
    if t < 1:
        raise ValueError("the slow system is posed for t >= 1")
    weight = bracket(xi) ** (2.0 - 2.0 * kappa)
    return (0.5j / t) * weight * eval_Ftilde(tensor, np.atleast_2d(psi))


def nonresonant_rhs(state: ProfileState, tensor: CubicTensor) -> np.ndarray:
    """Oscillatory part of the slow system, rows with omega != 1.

    i t^-1 sum C^row a(xi) e^{-it b(xi)} prod(psi factors at xi/omega)
    with C^row = mu * C[j,k,l,m] * |omega|^{-1/2} (the dilation constant
    folded in explicitly).
    """
    xi = np.asarray(state.xi, dtype=float)
    psi = state.psi
    N = tensor.n_components
    splines = [CubicSpline(xi, psi[j], extrapolate=False) for j in range(N)]
    out = np.zeros_like(psi)
    for idx in NONRESONANT_INDICES:
        row = INTERACTION_ROWS[idx - 1]
        pair = PhasePair(row.omega, state.kappa)
        osc = pair.a(xi) * np.exp(-1j * state.t * pair.b(xi))
        dil = abs(row.omega) ** -0.5
        scaled = xi / row.omega
        for (j, k, l, m), c in tensor.coeffs:
            prod = _factor_eval((splines[k], splines[l], splines[m]),
                                row.alpha, scaled)
            out[j] += (row.mu * float(c) * dil) * osc * prod
    return (1j / state.t) * out


def _ode_rhs(tensor, state: ProfileState, include_nonresonant: bool) -> np.ndarray:
    rhs = resonant_rhs(tensor, state.psi, state.t, state.xi, state.kappa)
    if include_nonresonant:
        rhs = rhs + nonresonant_rhs(state, tensor)
    return rhs


def integrate_profile_ode(tensor: CubicTensor, initial: ProfileState,
                          t_end: float, include_nonresonant: bool = False,
                          steps_per_unit_log: int = 400,
                          n_samples: int = 33) -> ProfileTrajectory:
    """March the slow system with RK4 on steps uniform in log t.

    The right side scales like 1/t, so log-uniform steps keep the local
    error balanced; this is plain RK4 in t with a step t*(e^ds - 1).  A
    step whose update exceeds a tenth of the state magnitude is rejected
    and retried with half the step.
    """
    if t_end <= initial.t:
        raise ValueError("t_end must exceed the initial time")
    kappa, xi = initial.kappa, np.asarray(initial.xi)
    span = math.log(t_end / initial.t)
    n_steps = max(8, int(math.ceil(steps_per_unit_log * span)))
    ds = span / n_steps
    sample_times = np.exp(np.linspace(math.log(initial.t), math.log(t_end),
                                      n_samples))
    times = [initial.t]
    states = [initial.psi.copy()]
    next_sample = 1

    def rk4_step(psi, t, dt):
        def f(p, tt):
            st = ProfileState(kappa, xi, p, tt)
            return _ode_rhs(tensor, st, include_nonresonant)
        k1 = f(psi, t)
        k2 = f(psi + 0.5 * dt * k1, t + 0.5 * dt)
        k3 = f(psi + 0.5 * dt * k2, t + 0.5 * dt)
        k4 = f(psi + dt * k3, t + dt)
        return psi + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)

    t = initial.t
    psi = initial.psi.copy()
    while t < t_end * (1.0 - 1e-12):
        attempt = min(ds, math.log(t_end / t))
        for _ in range(24):
            dt = t * (math.exp(attempt) - 1.0)
            new_psi = rk4_step(psi, t, dt)
            scale = max(np.max(np.abs(psi)), 1e-300)
            if np.max(np.abs(new_psi - psi)) <= 0.1 * scale:
                break
            attempt *= 0.5
        else:
            raise RuntimeError(
                "profile step kept being rejected (update above a tenth of the "
                "state); the cubic flow is likely blowing up, try smaller data")
        psi = new_psi
        t = t * math.exp(attempt)
        while next_sample < n_samples and t >= sample_times[next_sample] * (1.0 - 1e-12):
            times.append(t)
            states.append(psi.copy())
            next_sample += 1
    if times[-1] < t_end * (1.0 - 1e-9):
        times.append(t)
        states.append(psi.copy())
    return ProfileTrajectory(kappa, xi, np.array(times), np.array(states))


def lyapunov(state: ProfileState, A: HermitianForm) -> np.ndarray:
    """Pointwise psi . A psi, asserted real and eigenvalue-sandwiched."""
    if not A.is_hermitian():
        raise ValueError("the functional needs a Hermitian matrix")
    A.assert_positive_definite()
    Af = A.array
    psi = state.psi
    vals = np.einsum("jm,jk,km->m", psi, np.conj(Af), np.conj(psi))
    if np.max(np.abs(vals.imag)) > 1e-10 * max(np.max(np.abs(vals)), 1e-300):
        raise AssertionError("quadratic form failed to be real")
    out = vals.real
    c_lo, c_hi = A.eigen_bounds()
    mag = np.sum(np.abs(psi) ** 2, axis=0)
    tol = 1e-9 * max(float(np.max(mag)), 1e-300) + 1e-12
    if np.any(out < c_lo * mag - tol) or np.any(out > c_hi * mag + tol):
        raise AssertionError("eigenvalue sandwich violated")
    return out


def scalar_resonant_closed_form(psi0: np.ndarray, xi: np.ndarray,
                                kappa: float, t: float) -> np.ndarray:
    """Exact resonant solution for the scalar unit tensor.

    The modulus is conserved and the phase winds logarithmically:
    psi(t) = psi(1) exp(i (3/2) <xi>^(2-2kappa) |psi(1)|^2 log t).
    """
    weight = bracket(xi) ** (2.0 - 2.0 * kappa)
    return psi0 * np.exp(1.5j * weight * np.abs(psi0) ** 2 * math.log(t))
