"""Lifshitz theory of the atom-surface C3 coefficient.

In the nonretarded limit the wall coefficient is an integral over
imaginary frequency,

    C3 = (hbar / 4 pi) Int_0^inf alpha(i w) g(i w) dw,
    g  = (eps(i w) - 1) / (eps(i w) + 1),

which in the energy variable E = hbar w and with alpha in nm^3 gives
C3 [meV nm^3] = 1000 / (4 pi) * Int alpha(iE) g(iE) dE [eV].

The dielectric function on the imaginary axis follows from the
absorptive spectrum by the Kramers-Kronig relation

    eps(i E) = 1 + (2 / pi) Int_0^inf E' eps2(E') / (E'^2 + E^2) dE',

evaluated here for a Tauc-Lorentz model of an amorphous insulator:

    eps2(E) = E_A E_O E_G (E - E_T)^2
              / { [(E^2 - E_O^2)^2 + E_G^2 E^2] E }     for E > E_T,
    eps2(E) = 0                                          below the gap,

with band gap E_T, strength E_A, resonance E_O and width E_G, all in eV.
Above a hard spectral limit w_max the model tail integrates in closed
form, so the numerical part of the KK integral has finite support.

The atom enters through alpha(iE): either a one-oscillator form
alpha0 / (1 + (E/E_a)^2) with E_a fixed by the known C6 via
E_a = 4 C6 / (3 alpha0^2), or a tabulated alpha(iE).  For surfaces
described by a single Lorentz oscillator, g(iE) = g0 / (1 + (E/E_S)^2),
the C3 integral collapses to the closed form

    C3 = alpha0 g0 E_a E_S / (8 (E_a + E_S)).

All energies eV, polarizabilities nm^3, C3 meV nm^3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import PchipInterpolator

from .errors import InvalidInputError, QuadratureError
from .grating import _finite, _require

__all__ = [
    "C3Result",
    "CachedDielectric",
    "LorentzSurface",
    "OneOscillatorAtom",
    "TabulatedPolarizability",
    "TaucLorentzParams",
    "c3_lifshitz",
    "c3_one_oscillator",
    "eps_imaginary_axis",
    "g_from_eps",
    "one_oscillator_alpha",
    "oscillator_energy_from_c6",
    "static_response_g0",
    "tauc_lorentz_eps2",
]

_SPECTRAL_LIMIT_EV = 1e4  # hard upper edge of the modeled spectrum


@dataclass(frozen=True)
class TaucLorentzParams:
    """Tauc-Lorentz absorption parameters, all in eV and positive."""

    band_gap: float
    strength: float
    resonance: float
    width: float

    def __post_init__(self):
        vals = [self.band_gap, self.strength, self.resonance, self.width]
        _require(_finite(vals), "Tauc-Lorentz parameters must be finite")
        _require(all(v > 0 for v in vals),
                 "Tauc-Lorentz parameters must be positive")
        _require(self.band_gap < _SPECTRAL_LIMIT_EV,
                 "band gap must lie below the spectral limit")


@dataclass(frozen=True)
class LorentzSurface:
    """One-oscillator surface response g(iE) = g0 / (1 + (E/energy)^2)."""

    g0: float
    energy: float

    def __post_init__(self):
        _require(_finite([self.g0, self.energy]),
                 "surface parameters must be finite")
        _require(0 < self.g0 < 1, "g0 must lie in (0, 1)")
        _require(self.energy > 0, "surface energy must be positive")

    def g(self, energy):
        energy = np.asarray(energy, dtype=float)
        out = self.g0 / (1.0 + (energy / self.energy) ** 2)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class OneOscillatorAtom:
    """alpha(iE) = alpha0 / (1 + (E/energy)^2), alpha0 in nm^3, energy in eV."""

    alpha0: float
    energy: float

    def __post_init__(self):
        _require(_finite([self.alpha0, self.energy]),
                 "atom parameters must be finite")
        _require(self.alpha0 > 0, "alpha0 must be positive")
        _require(self.energy > 0, "oscillator energy must be positive")

    def alpha(self, energy):
        return one_oscillator_alpha(energy, self)


@dataclass(frozen=True, eq=False)
class TabulatedPolarizability:
    """alpha(iE) sampled on a grid starting at E = 0.

    Between nodes the curve is interpolated shape-preservingly (linear in
    E up to the first positive node, piecewise cubic in log E beyond);
    past the last node it falls off as alpha_last (E_last / E)^2, the
    correct asymptotic of any finite-f-sum polarizability.
    """

    energy: np.ndarray
    alpha: np.ndarray

    def __post_init__(self):
        energy = np.asarray(self.energy, dtype=float).copy()
        alpha = np.asarray(self.alpha, dtype=float).copy()
        energy.setflags(write=False)
        alpha.setflags(write=False)
        object.__setattr__(self, "energy", energy)
        object.__setattr__(self, "alpha", alpha)
        _require(energy.ndim == 1 and energy.size >= 2,
                 "need at least two table nodes")
        _require(alpha.shape == energy.shape, "column lengths must match")
        _require(_finite(energy) and _finite(alpha), "table must be finite")
        _require(energy[0] == 0.0, "first energy node must be 0")
        _require(np.all(np.diff(energy) > 0),
                 "energies must be strictly increasing")
        _require(np.all(alpha >= 0), "alpha must be nonnegative")
        _require(np.all(np.diff(alpha) <= 0),
                 "alpha(iE) must be non-increasing")
        head = min(4, energy.size)
        object.__setattr__(self, "_head",
                           PchipInterpolator(energy[:head], alpha[:head]))
        if energy.size >= 3:
            object.__setattr__(
                self, "_log_tail",
                PchipInterpolator(np.log(energy[1:]), alpha[1:]))
        else:
            object.__setattr__(self, "_log_tail", None)

    @property
    def alpha0(self):
        return float(self.alpha[0])

    def __call__(self, energy):
        e = np.asarray(energy, dtype=float)
        _require(_finite(e) and np.all(e >= 0), "energy must be >= 0")
        e1 = self.energy[1]
        e_last = self.energy[-1]
        scalar = e.ndim == 0
        e = np.atleast_1d(e)
        out = np.empty_like(e)
        lo = e <= e1
        out[lo] = self._head(e[lo])
        mid = (~lo) & (e <= e_last)
        if self._log_tail is not None:
            out[mid] = self._log_tail(np.log(e[mid]))
        else:
            out[mid] = self._head(e[mid])
        hi = e > e_last
        out[hi] = self.alpha[-1] * (e_last / e[hi]) ** 2
        out = np.clip(out, 0.0, None)
        return float(out[0]) if scalar else out

    def alpha_iw(self, energy):
        return self(energy)


def one_oscillator_alpha(energy, atom):
    """alpha(iE) of a single effective oscillator, nm^3."""
    e = np.asarray(energy, dtype=float)
    out = atom.alpha0 / (1.0 + (e / atom.energy) ** 2)
    return float(out) if out.ndim == 0 else out


def oscillator_energy_from_c6(c6_ev_nm6, alpha0_nm3):
    """Effective oscillator energy E_a = 4 C6 / (3 alpha0^2), eV.

    Follows from matching the one-oscillator alpha(iE) to the London
    formula C6 = (3/4) alpha0^2 E_a for identical atoms.
    """
    _require(_finite([c6_ev_nm6, alpha0_nm3]) and c6_ev_nm6 > 0
             and alpha0_nm3 > 0, "C6 and alpha0 must be positive")
    return 4.0 * c6_ev_nm6 / (3.0 * alpha0_nm3**2)


# ---------------------------------------------------------------------------
# Tauc-Lorentz spectrum and Kramers-Kronig transform


def tauc_lorentz_eps2(energy, params):
    """Absorptive part eps2(E) of the Tauc-Lorentz model (dimensionless)."""
    e = np.asarray(energy, dtype=float)
    _require(_finite(e) and np.all(e >= 0), "energy must be >= 0")
    above = e > params.band_gap
    den = ((e**2 - params.resonance**2) ** 2
           + (params.width * e) ** 2) * np.where(above, e, 1.0)
    num = (params.strength * params.resonance * params.width
           * (e - params.band_gap) ** 2)
    out = np.where(above, num / den, 0.0)
    return float(out) if out.ndim == 0 else out


def _kk_tail(w, c_tail, wmax):
    """Closed-form KK contribution of eps2 ~ C / E'^3 beyond wmax.

    (2/pi) C Int_wmax^inf dE' / (E'^2 (E'^2 + w^2))
        = (2/pi) C (1/w^2) [1/wmax - arctan(w/wmax)/w],
    with the series branch (1/wmax^3)(1/3 - r^2/5 + r^4/7), r = w/wmax,
    taking over for small r where the bracket cancels.
    """
    w = np.asarray(w, dtype=float)
    r = w / wmax
    small = r < 1e-4
    ws = np.where(small, 1.0, w)
    exact = (1.0 / ws**2) * (1.0 / wmax - np.arctan(ws / wmax) / ws)
    series = (1.0 / wmax**3) * (1.0 / 3.0 - r**2 / 5.0 + r**4 / 7.0)
    q = np.where(small, series, exact)
    return (2.0 / math.pi) * c_tail * q


def _kk_sum(w, params, n_panels, n_gauss=12, wmax=_SPECTRAL_LIMIT_EV):
    """Gauss-Legendre KK integral on log-spaced panels over [gap, wmax].

    Vectorized over the requested imaginary energies w (shape (m,)).
    """
    edges = np.geomspace(params.band_gap, wmax, n_panels + 1)
    x, gw = leggauss(n_gauss)
    mid = 0.5 * (edges[1:] + edges[:-1])
    hw = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + hw[:, None] * x[None, :]).ravel()
    weights = (hw[:, None] * gw[None, :]).ravel()
    f = nodes * tauc_lorentz_eps2(nodes, params) * weights
    w = np.asarray(w, dtype=float)
    denom = nodes[None, :] ** 2 + w[:, None] ** 2
    return (2.0 / math.pi) * (f[None, :] / denom).sum(axis=1)


def eps_imaginary_axis(energy, params, tol=1e-10, max_panels=4096):
    """eps(iE) of the Tauc-Lorentz model by the Kramers-Kronig transform.

    Vectorized over energy (eV, >= 0).  Panels double until the result
    moves by less than tol relative, then the analytic spectral tail is
    added.  Raises QuadratureError if max_panels is not enough.
    """
    e = np.asarray(energy, dtype=float)
    _require(_finite(e) and np.all(e >= 0), "energy must be >= 0")
    scalar = e.ndim == 0
    w = np.atleast_1d(e)
    c_tail = params.strength * params.resonance * params.width
    tail = _kk_tail(w, c_tail, _SPECTRAL_LIMIT_EV)
    n = 64
    prev = _kk_sum(w, params, n)
    while True:
        n *= 2
        cur = _kk_sum(w, params, n)
        delta = np.max(np.abs(cur - prev) / np.maximum(np.abs(cur), 1e-30))
        if delta <= tol:
            break
        if n >= max_panels:
            raise QuadratureError(
                f"KK transform stalled at {delta:.3e} relative with "
                f"{n} panels", achieved=float(delta))
        prev = cur
    out = 1.0 + cur + tail
    return float(out[0]) if scalar else out


def g_from_eps(eps):
    """Surface response g = (eps - 1) / (eps + 1)."""
    eps = np.asarray(eps, dtype=float)
    out = (eps - 1.0) / (eps + 1.0)
    return float(out) if out.ndim == 0 else out


def static_response_g0(params, tol=1e-10):
    """Static limit g0 = (eps(0) - 1) / (eps(0) + 1) of the model surface."""
    return g_from_eps(eps_imaginary_axis(0.0, params, tol))


class CachedDielectric:
    """eps(iE) of a Tauc-Lorentz surface, precomputed and interpolated.

    The constructor evaluates the KK transform once on a fixed grid
    (E = 0 plus log-spaced nodes up to the spectral limit) and fits a
    shape-preserving cubic through the values.  Queries then cost an
    interpolation; beyond the grid eps - 1 falls off as 1/E^2.  The
    attribute interp_error holds the largest |interpolated - direct|
    found at probe energies between grid nodes.
    """

    def __init__(self, params, n_nodes=512, e_lo=1e-3, tol=1e-10):
        _require(int(n_nodes) >= 16, "need at least 16 grid nodes")
        _require(0 < e_lo < _SPECTRAL_LIMIT_EV, "e_lo out of range")
        self.params = params
        grid = np.concatenate(
            [[0.0], np.geomspace(e_lo, _SPECTRAL_LIMIT_EV, int(n_nodes) - 1)])
        values = eps_imaginary_axis(grid, params, tol)
        self.grid = grid
        self.values = values
        self._pchip = PchipInterpolator(grid, values)
        self._e_hi = grid[-1]
        self._eps_hi = float(values[-1])
        probes = np.geomspace(e_lo * 3.0, 1e3, 9)
        direct = eps_imaginary_axis(probes, params, tol)
        self.interp_error = float(np.max(np.abs(self._pchip(probes) - direct)))

    def eps(self, energy):
        e = np.asarray(energy, dtype=float)
        _require(_finite(e) and np.all(e >= 0), "energy must be >= 0")
        scalar = e.ndim == 0
        e = np.atleast_1d(e)
        out = np.empty_like(e)
        inside = e <= self._e_hi
        out[inside] = self._pchip(e[inside])
        far = ~inside
        out[far] = 1.0 + (self._eps_hi - 1.0) * (self._e_hi / e[far]) ** 2
        return float(out[0]) if scalar else out

    def g(self, energy):
        return g_from_eps(self.eps(energy))

    @property
    def g0(self):
        """Static surface response from the exact E = 0 grid value."""
        return g_from_eps(float(self.values[0]))


# ---------------------------------------------------------------------------
# C3 integrals


@dataclass(frozen=True)
class C3Result:
    """C3 in meV nm^3 with a numerical error estimate of the same unit."""

    c3: float
    error: float


def _surface_g(surface):
    if isinstance(surface, (LorentzSurface, CachedDielectric)):
        return surface.g
    if isinstance(surface, TaucLorentzParams):
        return CachedDielectric(surface).g
    raise InvalidInputError(
        "surface must be LorentzSurface, CachedDielectric or "
        "TaucLorentzParams")


def _atom_alpha(atom):
    if isinstance(atom, OneOscillatorAtom):
        return atom.alpha, atom.energy
    if isinstance(atom, TabulatedPolarizability):
        # reference scale: energy where alpha first drops to half height
        below = np.nonzero(atom.alpha <= 0.5 * atom.alpha0)[0]
        e_ref = float(atom.energy[below[0]]) if below.size else \
            float(atom.energy[-1])
        return atom, max(e_ref, 1e-3)
    raise InvalidInputError(
        "atom must be OneOscillatorAtom or TabulatedPolarizability")


def c3_lifshitz(atom, surface, tol=1e-8, e_ref=None):
    """C3 = (1 / 4 pi) Int_0^inf alpha(iE) g(iE) dE, in meV nm^3.

    The half-line maps to x in [0, pi/2) via E = e_ref tan(x); composite
    Gauss-Legendre panels double until the value moves by less than tol
    relative.  e_ref defaults to the atom's oscillator energy (or the
    half-height energy of a tabulated alpha), which puts the integrand's
    bulk in the middle of the x range.

    Returns a C3Result whose error field combines the last doubling
    change with the propagated eps-interpolation error of a cached
    surface.
    """
    _require(_finite([tol]) and 0 < tol <= 1e-2, "tol must lie in (0, 1e-2]")
    alpha_fn, auto_ref = _atom_alpha(atom)
    g_fn = _surface_g(surface)
    if e_ref is None:
        e_ref = auto_ref
    _require(_finite([e_ref]) and e_ref > 0, "e_ref must be positive")

    x_hi = math.pi / 2.0
    gx, gw = leggauss(16)

    def panel_sum(n_panels):
        edges = np.linspace(0.0, x_hi, n_panels + 1)
        mid = 0.5 * (edges[1:] + edges[:-1])
        hw = 0.5 * (edges[1:] - edges[:-1])
        x = (mid[:, None] + hw[:, None] * gx[None, :]).ravel()
        wts = (hw[:, None] * gw[None, :]).ravel()
        e = e_ref * np.tan(x)
        jac = e_ref / np.cos(x) ** 2
        a = np.asarray(alpha_fn(e), dtype=float)
        return float(np.sum(wts * a * g_fn(e) * jac)), \
            float(np.sum(wts * a * jac))

    n = 16
    prev, _ = panel_sum(n)
    while True:
        n *= 2
        cur, alpha_int = panel_sum(n)
        delta = abs(cur - prev) / max(abs(cur), 1e-300)
        if delta <= tol:
            break
        if n >= 2048:
            raise QuadratureError(
                f"C3 integral stalled at {delta:.3e} relative with {n} "
                "panels", achieved=delta)
        prev = cur
    c3 = 1000.0 * cur / (4.0 * math.pi)  # eV nm^3 -> meV nm^3
    err = 1000.0 * abs(cur - prev) / (4.0 * math.pi)
    if isinstance(surface, CachedDielectric):
        # |dg/deps| = 2/(eps+1)^2 <= 1/2 for eps >= 1
        err += 1000.0 * surface.interp_error * 0.5 * alpha_int / (4.0 * math.pi)
    return C3Result(c3=c3, error=err)


def c3_one_oscillator(alpha0, g0, atom_energy, surface_energy):
    """Closed form for one-oscillator atom and surface, meV nm^3.

    C3 = alpha0 g0 E_a E_S / (8 (E_a + E_S)); this is the exact value of
    the Lifshitz integral for two Lorentzians.
    """
    _require(_finite([alpha0, g0, atom_energy, surface_energy]),
             "inputs must be finite")
    _require(alpha0 > 0 and atom_energy > 0 and surface_energy > 0,
             "alpha0 and energies must be positive")
    _require(0 < g0 < 1, "g0 must lie in (0, 1)")
    c3_ev = (alpha0 * g0 * atom_energy * surface_energy
             / (8.0 * (atom_energy + surface_energy)))
    return 1000.0 * c3_ev
