"""Fraunhofer diffraction of an atom beam by a transmission grating whose
bars attract the atom with a -C3/l^3 wall potential.

Geometry: a grating of period d (nm) has slits of geometric width s0
between bars of depth t whose side walls are tapered by a wedge angle
beta, so a trajectory entering at distance zeta from a wall sees the
wall recede as it crosses the bar.  In the eikonal approximation the
bar imprints a phase

    phi(zeta) = (1 / hbar v) * Int_0^t C3 / (zeta + z tan beta)^3 dz
              = A (2 zeta + c) / (2 zeta^2 (zeta + c)^2)

with A = C3 t / (hbar v) (nm^3) and c = t tan(beta) (nm), and the slit
transmission factor is tau(zeta) = exp(i phi(zeta)).  The far-field
amplitude of one slit at diffraction angle theta is

    f(theta) = (2 cos theta / sqrt(lambda))
               * Int_0^{s0/2} cos[b (s0/2 - zeta)] tau(zeta) dzeta,

b = k sin(theta), which folds the two half-slits together.  phi diverges
at the wall, so the integrand oscillates without bound as zeta -> 0; see
_slit_integrals for how the quadrature handles that.

Intensities: R_n = |f(theta_n)|^2 normalized so the retained orders sum
to one.  A full angular pattern multiplies |f|^2 by the N-slit grating
interference factor.  Units follow constants.py (nm, eV, m/s, rad).
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .constants import ATOMIC_MASS_KG, EV_J, HBAR_EV_S, NM_PER_M, PLANCK_EV_S
from .errors import EvanescentOrderError, InvalidInputError, QuadratureError

__all__ = [
    "AngularScan",
    "BeamState",
    "GratingGeometry",
    "OrderIntensities",
    "Potential",
    "angular_pattern",
    "de_broglie_wavelength",
    "diffraction_angle",
    "grating_factor",
    "intensities_for_orders",
    "order_intensities",
    "slit_amplitude",
    "transmission_factor",
    "velocity_averaged_intensities",
    "wall_phase",
]


def _require(cond, message):
    if not cond:
        raise InvalidInputError(message)


def _finite(x):
    return np.all(np.isfinite(x))


# ---------------------------------------------------------------------------
# Domain types


@dataclass(frozen=True)
class GratingGeometry:
    """Transmission grating cross-section.

    Parameters
    ----------
    period : float
        Grating period d, nm.
    slit_width : float
        Geometric slit width s0 at the entrance face, nm.  0 < s0 < d.
    bar_depth : float
        Bar depth t along the beam, nm.
    wedge_angle : float
        Taper half-angle beta of the bar walls, rad.  0 <= beta < pi/2.
    """

    period: float
    slit_width: float
    bar_depth: float
    wedge_angle: float

    def __post_init__(self):
        _require(_finite([self.period, self.slit_width, self.bar_depth,
                          self.wedge_angle]), "geometry values must be finite")
        _require(self.period > 0, "period must be positive")
        _require(0 < self.slit_width < self.period,
                 "slit_width must satisfy 0 < s0 < d")
        _require(self.bar_depth > 0, "bar_depth must be positive")
        _require(0 <= self.wedge_angle < math.pi / 2,
                 "wedge_angle must lie in [0, pi/2)")

    @property
    def half_width(self):
        """Half slit width s0/2, nm."""
        return 0.5 * self.slit_width


@dataclass(frozen=True)
class BeamState:
    """Monochromatic beam component: species mass and flow velocity.

    dv_over_u is the relative FWHM of the velocity distribution; it is
    only consulted by velocity_averaged_intensities.
    """

    mass_u: float
    velocity: float
    dv_over_u: float = 0.0

    def __post_init__(self):
        _require(_finite([self.mass_u, self.velocity, self.dv_over_u]),
                 "beam values must be finite")
        _require(self.mass_u > 0, "mass_u must be positive")
        _require(self.velocity > 0, "velocity must be positive")
        _require(0 <= self.dv_over_u < 1, "dv_over_u must lie in [0, 1)")

    @property
    def wavelength(self):
        """de Broglie wavelength lambda = h / (m v), nm."""
        return de_broglie_wavelength(self.mass_u, self.velocity)

    @property
    def wavevector(self):
        """k = 2 pi / lambda, 1/nm."""
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class Potential:
    """Attractive wall potential -C3 / l^3 with C3 in meV nm^3."""

    c3: float

    def __post_init__(self):
        _require(_finite([self.c3]), "c3 must be finite")
        _require(self.c3 >= 0, "c3 must be nonnegative")


def _as_readonly(a, dtype=float):
    out = np.asarray(a, dtype=dtype).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True, eq=False)
class OrderIntensities:
    """Relative diffraction-order intensities.

    orders are strictly increasing integers; intensity sums to one over
    the retained orders (that normalization is the class invariant).
    sigma, when present, are one-sigma uncertainties on the normalized
    values.
    """

    orders: tuple
    intensity: np.ndarray
    sigma: np.ndarray | None = None

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "intensity", _as_readonly(self.intensity))
        if self.sigma is not None:
            object.__setattr__(self, "sigma", _as_readonly(self.sigma))
        _require(len(orders) >= 1, "need at least one order")
        _require(all(b > a for a, b in zip(orders, orders[1:])),
                 "orders must be strictly increasing")
        _require(self.intensity.ndim == 1 and self.intensity.size == len(orders),
                 "intensity must be 1-d with one entry per order")
        _require(_finite(self.intensity), "intensities must be finite")
        _require(np.all(self.intensity >= 0), "intensities must be nonnegative")
        _require(abs(float(self.intensity.sum()) - 1.0) <= 1e-9,
                 "intensities must sum to one (use from_raw to normalize)")
        if self.sigma is not None:
            _require(self.sigma.shape == self.intensity.shape,
                     "sigma must match intensity shape")
            _require(_finite(self.sigma) and np.all(self.sigma >= 0),
                     "sigma must be finite and nonnegative")

    @classmethod
    def from_raw(cls, orders, values, sigma=None):
        """Normalize raw nonnegative weights to unit sum and wrap them."""
        values = np.asarray(values, dtype=float)
        total = float(values.sum())
        _require(total > 0, "raw intensities must have a positive sum")
        if sigma is not None:
            sigma = np.asarray(sigma, dtype=float) / total
        return cls(tuple(orders), values / total, sigma)

    def __getitem__(self, n):
        i = self.orders.index(int(n))
        return float(self.intensity[i])


@dataclass(frozen=True, eq=False)
class AngularScan:
    """Sampled diffraction pattern: counts versus detector angle.

    n_slits records how many grating slits interfered coherently; it is
    needed to convert peak areas back to order intensities.
    """

    angles: np.ndarray
    values: np.ndarray
    n_slits: int = 1

    def __post_init__(self):
        object.__setattr__(self, "angles", _as_readonly(self.angles))
        object.__setattr__(self, "values", _as_readonly(self.values))
        _require(self.angles.ndim == 1 and self.angles.size >= 2,
                 "need a 1-d grid of at least two angles")
        _require(self.values.shape == self.angles.shape,
                 "values must match angles shape")
        _require(_finite(self.angles) and _finite(self.values),
                 "scan data must be finite")
        _require(np.all(np.diff(self.angles) > 0),
                 "angles must be strictly increasing")
        _require(np.all(self.values >= 0), "counts must be nonnegative")
        _require(int(self.n_slits) >= 1, "n_slits must be a positive integer")
        object.__setattr__(self, "n_slits", int(self.n_slits))


# ---------------------------------------------------------------------------
# Kinematics


def de_broglie_wavelength(mass_u, velocity):
    """lambda = h / (m v) in nm for mass in u and velocity in m/s."""
    _require(_finite([mass_u, velocity]) and mass_u > 0 and velocity > 0,
             "mass and velocity must be positive and finite")
    lam_m = (PLANCK_EV_S * EV_J) / (mass_u * ATOMIC_MASS_KG * velocity)
    return lam_m * NM_PER_M


def diffraction_angle(order, wavelength, period):
    """Angle of principal maximum n: sin(theta_n) = n lambda / d.

    Raises EvanescentOrderError when |n| lambda / d > 1.
    """
    _require(_finite([wavelength, period]) and wavelength > 0 and period > 0,
             "wavelength and period must be positive and finite")
    s = order * wavelength / period
    if abs(s) > 1.0:
        raise EvanescentOrderError(
            f"order {order} is evanescent: |n lambda / d| = {abs(s):.6g} > 1")
    return math.asin(s)


# ---------------------------------------------------------------------------
# Wall phase

class _WallPhase:
    """Closed-form eikonal phase of one tapered bar wall.

    phi(z)   = A (2 z + c) / (2 z^2 (z + c)^2)
    phi'(z)  = phi * L,   L = 2/(2z+c) - 2/z - 2/(z+c)
    phi''(z) = phi * (L^2 + L')

    with A = C3 t / (hbar v) in nm^3 and c = t tan(beta) in nm.  The
    rational forms stay exact for c = 0 where phi reduces to A / z^3.
    """

    __slots__ = ("a", "c")

    def __init__(self, potential, geometry, beam):
        c3_ev = potential.c3 * 1e-3  # meV nm^3 -> eV nm^3
        hv = HBAR_EV_S * beam.velocity * NM_PER_M  # eV nm
        self.a = c3_ev * geometry.bar_depth / hv
        self.c = geometry.bar_depth * math.tan(geometry.wedge_angle)

    def phi(self, z):
        z = np.asarray(z, dtype=float)
        return self.a * (2.0 * z + self.c) / (2.0 * z**2 * (z + self.c) ** 2)

    def _logder(self, z):
        return 2.0 / (2.0 * z + self.c) - 2.0 / z - 2.0 / (z + self.c)

    def dphi(self, z):
        z = np.asarray(z, dtype=float)
        return self.phi(z) * self._logder(z)

    def d2phi(self, z):
        z = np.asarray(z, dtype=float)
        lam = self._logder(z)
        dlam = (-4.0 / (2.0 * z + self.c) ** 2 + 2.0 / z**2
                + 2.0 / (z + self.c) ** 2)
        return self.phi(z) * (lam * lam + dlam)


def wall_phase(zeta, potential, geometry, beam):
    """Eikonal phase phi(zeta) in rad at wall distance zeta (nm, > 0)."""
    zeta = np.asarray(zeta, dtype=float)
    _require(_finite(zeta) and np.all(zeta > 0),
             "zeta must be positive and finite")
    out = _WallPhase(potential, geometry, beam).phi(zeta)
    return float(out) if out.ndim == 0 else out


def transmission_factor(zeta, potential, geometry, beam):
    """tau(zeta) = exp(i phi(zeta)); unimodular for the attractive wall."""
    return np.exp(1j * wall_phase(zeta, potential, geometry, beam))


# ---------------------------------------------------------------------------
# Oscillatory slit quadrature
#
# Strategy: cut [0, s0/2] at zeta_min chosen so the stationary-phase
# bound on the discarded piece is below eta; replace the discarded piece
# with the first two integration-by-parts endpoint terms at zeta_min
# (their size also bounds the truncation error); split the rest into
# panels across which neither the wall phase nor the Fourier phase
# b * zeta advances by more than the budget, and apply 8-point
# Gauss-Legendre on each.  All orders share one mesh, so tau is
# evaluated once and each order costs a cosine-weighted dot product.

_GAUSS_N = 8
_PANEL_CAP = 2_000_000
_CUTOFF_FLOOR = 1e-7  # nm; smallest admissible cutoff scan point


def _cutoff(ph, half, b_max, eta):
    """Largest zeta where the endpoint-term error bound drops below eta.

    The bound b_max/phi'^2 + |phi''|/|phi'|^3 decreases toward the wall
    and blows up where phi' flattens, so the admissible region is a left
    segment of the scan grid and its last True entry is the answer.
    """
    zz = np.geomspace(_CUTOFF_FLOOR, half / 4.0, 4000)
    p1 = np.abs(ph.dphi(zz))
    p2 = np.abs(ph.d2phi(zz))
    with np.errstate(divide="ignore", over="ignore"):
        bound = b_max / p1**2 + p2 / p1**3
    ok = bound <= eta
    if not ok.any():
        raise QuadratureError(
            "no admissible wall cutoff: requested tolerance too tight "
            "for the endpoint expansion")
    return float(zz[np.nonzero(ok)[0][-1]])


def _invert_phase(ph, targets, z_lo, z_hi):
    """Solve phi(z) = target on [z_lo, z_hi] for decreasing targets.

    Seeds from log-log interpolation on a dense grid, then polishes with
    a few clipped Newton steps.  Exactness is not required; the roots
    only become panel boundaries.
    """
    zz = np.geomspace(z_lo, z_hi, 4096)
    pp = ph.phi(zz)
    # interp wants increasing abscissae; phi decreases along zz
    z = np.exp(np.interp(np.log(targets[::-1]), np.log(pp[::-1]),
                         np.log(zz[::-1])))[::-1]
    for _ in range(4):
        z = z - (ph.phi(z) - targets) / ph.dphi(z)
        z = np.clip(z, z_lo, z_hi)
    return z


def _mesh_edges(ph, z_min, half, b_max, budget):
    """Panel edges on [z_min, half] bounding the phase change per panel."""
    pieces = [np.linspace(z_min, half, 9)]
    if ph.a > 0:
        dphi_total = float(ph.phi(z_min) - ph.phi(half))
        n_vdw = int(dphi_total // budget)
        if n_vdw > _PANEL_CAP:
            raise QuadratureError(
                f"wall-phase panel count {n_vdw} exceeds cap {_PANEL_CAP}")
        if n_vdw > 0:
            targets = float(ph.phi(z_min)) - budget * np.arange(1, n_vdw + 1)
            pieces.append(_invert_phase(ph, targets, z_min, half))
    if b_max * (half - z_min) > budget:
        pieces.append(np.arange(z_min, half, budget / b_max))
    edges = np.unique(np.concatenate(pieces))
    return np.clip(edges, z_min, half)


def _gauss_nodes(edges):
    x, w = leggauss(_GAUSS_N)
    mid = 0.5 * (edges[1:] + edges[:-1])
    hw = 0.5 * (edges[1:] - edges[:-1])
    nodes = (mid[:, None] + hw[:, None] * x[None, :]).ravel()
    weights = (hw[:, None] * w[None, :]).ravel()
    return nodes, weights


def _endpoint_terms(ph, delta, bs, half):
    """First two IBP terms for Int_0^delta cos[b(half-z)] e^{i phi} dz.

    Returns (complex correction per b, |last term| per b); the size of
    the last retained term is the usual asymptotic-series estimate of
    the truncation error.
    """
    g = np.cos(bs * (half - delta))
    gp = bs * np.sin(bs * (half - delta))
    p1 = float(ph.dphi(np.asarray(delta)))
    p2 = float(ph.d2phi(np.asarray(delta)))
    w1 = -1j * g / p1
    w2 = -gp / p1**2 + g * p2 / p1**3
    corr = np.exp(1j * float(ph.phi(np.asarray(delta)))) * (w1 - w2)
    return corr, np.abs(w2)


def _cos_dot(bs, nodes, core, half):
    """out[j] = sum_i cos(bs[j] (half - nodes[i])) core[i], chunked."""
    out = np.empty(bs.size, dtype=complex)
    span = half - nodes
    step = max(1, int(4_000_000 // max(nodes.size, 1)))
    for i in range(0, bs.size, step):
        out[i:i + step] = np.cos(bs[i:i + step, None] * span[None, :]) @ core
    return out


def _integrals_once(ph, bs, half, budget, eta):
    """One quadrature pass; returns (values, per-b truncation bound)."""
    b_max = float(bs.max())
    if ph.a == 0:
        edges = _mesh_edges(ph, 0.0, half, b_max, budget)
        nodes, weights = _gauss_nodes(edges)
        vals = _cos_dot(bs, nodes, weights.astype(complex), half)
        return vals, np.zeros_like(bs)
    z_min = _cutoff(ph, half, b_max, eta)
    edges = _mesh_edges(ph, z_min, half, b_max, budget)
    nodes, weights = _gauss_nodes(edges)
    core = weights * np.exp(1j * ph.phi(nodes))
    vals = _cos_dot(bs, nodes, core, half)
    corr, tail_abs = _endpoint_terms(ph, z_min, bs, half)
    return vals + corr, tail_abs


def _slit_integrals(potential, geometry, beam, bs, tol):
    """Int_0^{s0/2} cos[b (s0/2 - zeta)] e^{i phi(zeta)} dzeta for many b.

    Returns (values, error estimates), both length len(bs), in nm.  The
    estimate per b is |fine - coarse| between two passes with halved
    phase budget plus the endpoint truncation bound of the fine pass.
    Convergence is judged against tol * (s0/2), the zero-order scale;
    one extra refinement is attempted before raising QuadratureError.
    """
    _require(_finite([tol]) and 0 < tol <= 1e-2, "tol must lie in (0, 1e-2]")
    bs = np.asarray(bs, dtype=float)
    _require(_finite(bs) and np.all(bs >= 0), "b values must be >= 0")
    ph = _WallPhase(potential, geometry, beam)
    half = geometry.half_width
    scale = half
    # At the default tol of 1e-8 this reproduces the documented policy
    # of discarding less than 1e-10 of the zero-order scale.
    eta = scale * tol / 100.0
    floor = 1e-15 * scale

    # Both passes share the cutoff, so their difference probes the panel
    # error; the endpoint bound accounts for the common truncation.
    coarse, _ = _integrals_once(ph, bs, half, math.pi / 4.0, eta)
    fine, tail = _integrals_once(ph, bs, half, math.pi / 8.0, eta)
    est = np.abs(fine - coarse) + tail + floor
    if np.any(est > tol * scale):
        finer, tail2 = _integrals_once(ph, bs, half, math.pi / 16.0, eta / 16.0)
        est = np.abs(finer - fine) + tail2 + floor
        fine = finer
        if np.any(est > tol * scale):
            worst = float(np.max(est / scale))
            raise QuadratureError(
                f"slit quadrature stalled at relative error {worst:.3e} "
                f"(requested {tol:.3e})", achieved=worst)
    return fine, est


def _amplitude_prefactor(theta, wavelength):
    return 2.0 * math.cos(theta) / math.sqrt(wavelength)


def slit_amplitude(theta, potential, geometry, beam, tol=1e-8):
    """Complex far-field amplitude of a single slit at angle theta.

    f(theta) = (2 cos theta / sqrt(lambda)) *
               Int_0^{s0/2} cos[k sin(theta) (s0/2 - zeta)] tau(zeta) dzeta

    The amplitude carries units of sqrt(nm); only ratios of |f|^2 are
    physically meaningful here.
    """
    _require(_finite([theta]) and abs(theta) < math.pi / 2,
             "theta must satisfy |theta| < pi/2")
    b = beam.wavevector * abs(math.sin(theta))
    vals, _ = _slit_integrals(potential, geometry, beam, np.array([b]), tol)
    return complex(_amplitude_prefactor(theta, beam.wavelength) * vals[0])


def _order_thetas(orders, wavelength, period):
    return np.array([diffraction_angle(n, wavelength, period) for n in orders])


def _raw_order_intensities(potential, geometry, beam, orders, tol):
    """Unnormalized |f(theta_n)|^2 and propagated quadrature error."""
    thetas = _order_thetas(orders, beam.wavelength, geometry.period)
    bs = beam.wavevector * np.abs(np.sin(thetas))
    # mirrored orders share |b|; integrate each distinct b once
    uniq, inverse = np.unique(bs, return_inverse=True)
    vals_u, ests_u = _slit_integrals(potential, geometry, beam, uniq, tol)
    vals, ests = vals_u[inverse], ests_u[inverse]
    pref = 2.0 * np.cos(thetas) / math.sqrt(beam.wavelength)
    amp = np.abs(pref * vals)
    err = np.abs(pref) * ests
    # |amp^2 - true^2| <= 2 amp err + err^2 for |amp - true| <= err
    return amp**2, 2.0 * amp * err + err**2


def _normalize_with_sigma(orders, raw, raw_sigma):
    total = float(raw.sum())
    _require(total > 0, "order intensities vanished; nothing to normalize")
    r = raw / total
    # first-order propagation through the normalization, correlations
    # folded in with absolute values (conservative)
    sig = (raw_sigma + r * raw_sigma.sum()) / total
    return OrderIntensities(tuple(orders), r, sig)


def intensities_for_orders(potential, geometry, beam, orders, tol=1e-8):
    """Relative intensities over an explicit order subset.

    Normalization runs over exactly the requested orders, which is what
    a fit against a partial set of measured orders needs.
    """
    orders = tuple(int(n) for n in orders)
    _require(len(orders) >= 1, "need at least one order")
    _require(all(b > a for a, b in zip(orders, orders[1:])),
             "orders must be strictly increasing")
    raw, raw_sigma = _raw_order_intensities(potential, geometry, beam,
                                            orders, tol)
    return _normalize_with_sigma(orders, raw, raw_sigma)


def order_intensities(potential, geometry, beam, n_max=10, tol=1e-8):
    """Relative intensities R_n for all orders |n| <= n_max.

    sigma holds the quadrature error propagated through normalization.
    """
    _require(int(n_max) >= 1, "n_max must be >= 1")
    orders = range(-int(n_max), int(n_max) + 1)
    return intensities_for_orders(potential, geometry, beam, orders, tol)


# ---------------------------------------------------------------------------
# Angular pattern and velocity averaging


def grating_factor(theta, n_slits, wavelength, period):
    """N-slit interference factor D(theta) = sin(N x)/sin(x), x = (k d / 2) sin(theta).

    The removable singularities at principal maxima are evaluated by the
    exact limit N cos(N x)/cos(x) when |sin x| < 1e-12.
    """
    _require(int(n_slits) >= 1, "n_slits must be a positive integer")
    theta = np.asarray(theta, dtype=float)
    x = (math.pi * period / wavelength) * np.sin(theta)
    sx = np.sin(x)
    near = np.abs(sx) < 1e-12
    safe = np.where(near, 1.0, sx)
    d = np.where(near,
                 n_slits * np.cos(n_slits * x) / np.cos(x),
                 np.sin(n_slits * x) / safe)
    return float(d) if d.ndim == 0 else d


def angular_pattern(theta_grid, potential, geometry, beam, n_slits=100,
                    tol=1e-8):
    """Coherent diffraction pattern I(theta) = |D(theta) f(theta)|^2.

    Returns an AngularScan in the arbitrary units of |f|^2; at a
    principal maximum the value equals n_slits^2 |f(theta_n)|^2.
    """
    theta_grid = np.asarray(theta_grid, dtype=float)
    _require(theta_grid.ndim == 1 and theta_grid.size >= 2,
             "theta_grid must be 1-d with at least two points")
    _require(_finite(theta_grid), "theta_grid must be finite")
    _require(np.all(np.abs(theta_grid) < math.pi / 2),
             "angles must satisfy |theta| < pi/2")
    _require(np.all(np.diff(theta_grid) > 0),
             "theta_grid must be strictly increasing")
    bs = beam.wavevector * np.abs(np.sin(theta_grid))
    vals, _ = _slit_integrals(potential, geometry, beam, bs, tol)
    pref = 2.0 * np.cos(theta_grid) / math.sqrt(beam.wavelength)
    envelope = np.abs(pref * vals) ** 2
    d = grating_factor(theta_grid, n_slits, beam.wavelength, geometry.period)
    return AngularScan(theta_grid, envelope * d**2, n_slits=n_slits)


def velocity_averaged_intensities(potential, geometry, beam, n_max=10,
                                  quad_points=11, tol=1e-8):
    """Order intensities averaged over a Gaussian velocity distribution.

    The beam velocity distribution is Gaussian with mean u and FWHM
    u * dv_over_u.  Detector positions stay fixed at the mean-velocity
    angles theta_n(u); each velocity class contributes its normalized
    intensity there, weighted by Gauss-Hermite quadrature.  quad_points
    must be odd so the mean velocity is a node; quad_points = 1
    reproduces order_intensities exactly.
    """
    _require(int(n_max) >= 1, "n_max must be >= 1")
    quad_points = int(quad_points)
    _require(quad_points >= 1 and quad_points % 2 == 1,
             "quad_points must be a positive odd integer")
    orders = tuple(range(-int(n_max), int(n_max) + 1))
    thetas = _order_thetas(orders, beam.wavelength, geometry.period)

    x, w = np.polynomial.hermite.hermgauss(quad_points)
    w = w / w.sum()
    sigma_v = beam.dv_over_u * beam.velocity / (2.0 * math.sqrt(2.0 * math.log(2.0)))
    velocities = beam.velocity + math.sqrt(2.0) * sigma_v * x
    if np.any(velocities <= 0):
        raise InvalidInputError(
            "velocity spread too large: quadrature node at v <= 0; "
            "reduce quad_points or dv_over_u")

    accum = np.zeros(len(orders))
    accum_sig = np.zeros(len(orders))
    sin_t = np.abs(np.sin(thetas))
    uniq_s, inverse = np.unique(sin_t, return_inverse=True)
    for wj, vj in zip(w, velocities):
        beam_j = dataclasses.replace(beam, velocity=float(vj))
        vals_u, ests_u = _slit_integrals(potential, geometry, beam_j,
                                         beam_j.wavevector * uniq_s, tol)
        vals, ests = vals_u[inverse], ests_u[inverse]
        pref = 2.0 * np.cos(thetas) / math.sqrt(beam_j.wavelength)
        amp = np.abs(pref * vals)
        raw = amp**2
        raw_sig = 2.0 * amp * np.abs(pref) * ests + (np.abs(pref) * ests) ** 2
        total = float(raw.sum())
        accum += wj * raw / total
        accum_sig += wj * (raw_sig + (raw / total) * raw_sig.sum()) / total
    return _normalize_with_sigma(orders, accum, accum_sig)
