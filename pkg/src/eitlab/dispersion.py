"""Linear propagation: the dispersion relation, its Taylor layer, and oracles.

The probe sideband at frequency ``omega`` accumulates phase exp(i*kappa*z)
with kappa(omega) = omega/c - eta * s1(omega)/q(omega), where s1 and q are
the response numerator and denominator (cubic and quartic polynomials in
omega).  Everything here flows from that single function: kappa(0) carries
the phase shift (real part) and absorption (imaginary part, chi = 2 Im),
the first derivative the inverse group velocity, and half the second
derivative the group-velocity dispersion.

The Taylor coefficients are computed by exact differentiation of the
polynomial ratio and are cross-checked against Richardson finite
differences of kappa itself; a closed-form Gaussian propagator and an FFT
propagator provide mutually independent oracles for pulse evolution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import GridTooNarrow, SingularDenominator
from .numerics import ComplexGrid, fft, ifft
from .params import FieldConfig
from .response import SINGULAR_RTOL

#: Relative field level required at both grid edges before FFT propagation.
EDGE_LEVEL = 1e-8

#: Default FFT grid for pulse sampling.
DEFAULT_GRID_POINTS = 2**14
DEFAULT_WINDOW_WIDTHS = 40.0


@dataclass(frozen=True)
class DispersionExpansion:
    """Taylor data of the dispersion relation at the probe carrier.

    kappa0 (cm^-1), kappa1 (cm^-1 s), kappa2 (cm^-1 s^2) follow the Taylor
    convention kappa ~ kappa0 + kappa1 w + kappa2 w^2, i.e. kappa2 includes
    the 1/2 of the second derivative.  ``v_g`` = 1/kappa1 (complex, cm/s);
    ``chi`` = 2 Im kappa0 is the intensity absorption per cm and
    ``phase_shift`` = Re kappa0 the phase per cm.
    """

    kappa0: complex
    kappa1: complex
    kappa2: complex
    v_g: complex
    chi: float
    phase_shift: float


@dataclass(frozen=True)
class GaussianPulseSpec:
    """Input probe pulse amplitude * exp(-(t/tau0)^2)."""

    amplitude: float
    tau0: float

    def __post_init__(self):
        if not (self.tau0 > 0):
            raise ValueError(f"tau0 must be > 0, got {self.tau0}")

    def envelope(self, t) -> np.ndarray:
        return self.amplitude * np.exp(-((np.asarray(t, dtype=float) / self.tau0) ** 2))

    def sample(self, points: int = DEFAULT_GRID_POINTS,
               window: float | None = None) -> ComplexGrid:
        """Sample the pulse on a symmetric power-of-two grid around t = 0."""
        if window is None:
            window = DEFAULT_WINDOW_WIDTHS * self.tau0
        spacing = window / points
        origin = -0.5 * window
        t = origin + spacing * np.arange(points)
        return ComplexGrid(values=self.envelope(t).astype(complex),
                           spacing=spacing, origin=origin)


def response_polynomials(cfg: FieldConfig) -> tuple[np.ndarray, np.ndarray]:
    """Ascending-power coefficient arrays of s1(omega) and q(omega).

    Built exactly from the linear drift terms, so polynomial evaluation
    reproduces the pointwise response scalars to machine precision.
    """
    o1, o2, o3, o4 = cfg.control_values
    t1 = np.array([1j * cfg.gamma_b / 2.0 + cfg.delta_p, 1.0], dtype=complex)
    t2 = np.array([cfg.delta_p - cfg.delta_2, 1.0], dtype=complex)
    t3 = np.array([1j * cfg.gamma_e / 2.0 + cfg.delta_p - cfg.delta_2 + cfg.delta_3, 1.0],
                  dtype=complex)
    w12 = abs(o1) ** 2 + abs(o2) ** 2
    omega_sq = abs(o3) ** 2 + abs(o4) ** 2
    a_om = np.conj(o1) * o3 + np.conj(o2) * o4

    tt = npoly.polysub(npoly.polymul(t2, t3), [omega_sq])
    s1 = npoly.polymul(t2, tt)
    q = npoly.polysub(
        npoly.polymul(npoly.polysub(npoly.polymul(t1, t2), [w12]), tt),
        [abs(a_om) ** 2],
    )
    return s1, q


def _tol_for(cfg: FieldConfig, omega) -> np.ndarray:
    ctx_scale = np.maximum.reduce([
        np.abs(omega + 1j * cfg.gamma_b / 2.0 + cfg.delta_p),
        np.abs(omega + cfg.delta_p - cfg.delta_2),
        np.abs(omega + 1j * cfg.gamma_e / 2.0 + cfg.delta_p - cfg.delta_2 + cfg.delta_3),
        np.full_like(np.asarray(omega, dtype=float), cfg.control_scale),
    ])
    return SINGULAR_RTOL * ctx_scale**4


def kappa_of_omega(cfg: FieldConfig, omega):
    """Dispersion relation kappa(omega) in cm^-1; accepts scalars or arrays.

    This is the single source of truth: the Taylor layer differentiates it
    and the FFT propagator exponentiates it.
    """
    w = np.asarray(omega, dtype=float)
    s1, q = response_polynomials(cfg)
    s1v = npoly.polyval(w, s1)
    qv = npoly.polyval(w, q)
    tol = _tol_for(cfg, w)
    if np.any(np.abs(qv) <= tol):
        bad = w[np.abs(qv) <= tol] if w.ndim else w
        raise SingularDenominator(f"response denominator vanishes near omega = {bad}")
    out = w / cfg.c_light - cfg.eta * s1v / qv
    return out if w.ndim else complex(out)


def taylor_coefficients(cfg: FieldConfig) -> DispersionExpansion:
    """Exact kappa(0), kappa'(0), and kappa''(0)/2 of the dispersion relation.

    Derivatives come from differentiating the polynomial ratio; they agree
    with Richardson central differences of kappa_of_omega to better than
    1e-6 relative (enforced by the test suite).
    """
    s1, q = response_polynomials(cfg)
    s1d = npoly.polyder(s1)
    s1dd = npoly.polyder(s1d)
    qd = npoly.polyder(q)
    qdd = npoly.polyder(qd)

    s10 = complex(npoly.polyval(0.0, s1))
    q0 = complex(npoly.polyval(0.0, q))
    tol = float(_tol_for(cfg, 0.0))
    if abs(q0) <= tol:
        raise SingularDenominator(f"response denominator |q(0)| = {abs(q0):.3e} below floor")
    s11 = complex(npoly.polyval(0.0, s1d))
    s12 = complex(npoly.polyval(0.0, s1dd))
    q1 = complex(npoly.polyval(0.0, qd))
    q2 = complex(npoly.polyval(0.0, qdd))

    eta = cfg.eta
    kappa0 = -eta * s10 / q0
    kappa1 = 1.0 / cfg.c_light - eta * (s11 / q0 - s10 * q1 / q0**2)
    second = -eta * (s12 / q0 - 2.0 * s11 * q1 / q0**2 - s10 * q2 / q0**2
                     + 2.0 * s10 * q1**2 / q0**3)
    kappa2 = second / 2.0
    return DispersionExpansion(
        kappa0=kappa0,
        kappa1=kappa1,
        kappa2=kappa2,
        v_g=1.0 / kappa1,
        chi=2.0 * kappa0.imag,
        phase_shift=kappa0.real,
    )


def gaussian_field(kappa0: complex, kappa1: complex, kappa2: complex,
                   pulse: GaussianPulseSpec, z: float, t):
    """Closed-form propagated Gaussian for a quadratic dispersion relation.

    Exact solution of the sideband-domain propagation with
    kappa = kappa0 + kappa1 w + kappa2 w^2: a complex width factor
    l = 1 - 4i kappa2 z / tau0^2 rescales amplitude and width, the pulse
    center rides at t = kappa1 z, and exp(i kappa0 z) carries phase and
    absorption.  At z = 0 this is the input pulse exactly.
    """
    t = np.asarray(t, dtype=float)
    tau0 = pulse.tau0
    l = 1.0 - 4.0j * kappa2 * z / tau0**2
    shifted = t - kappa1 * z
    out = (pulse.amplitude / np.sqrt(l)) * np.exp(1j * kappa0 * z - shifted**2 / (l * tau0**2))
    return out if t.ndim else complex(out)


def gaussian_closed_form(cfg: FieldConfig, pulse: GaussianPulseSpec, z: float, t):
    """Closed-form Gaussian propagation using the config's Taylor coefficients."""
    exp = taylor_coefficients(cfg)
    return gaussian_field(exp.kappa0, exp.kappa1, exp.kappa2, pulse, z, t)


def _check_edges(values: np.ndarray) -> None:
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return
    edge = max(abs(values[0]), abs(values[-1]))
    if edge > EDGE_LEVEL * peak:
        raise GridTooNarrow(
            f"field at grid edges is {edge / peak:.3e} of peak (need <= {EDGE_LEVEL:.0e})"
        )


def spectral_propagate(cfg: FieldConfig, grid: ComplexGrid, z: float,
                       kappa: str = "full") -> ComplexGrid:
    """Propagate sampled field by exponentiating the dispersion relation.

    ``kappa`` selects the phase function: "full" uses kappa_of_omega,
    "taylor" its quadratic truncation, or pass a callable omega -> kappa.
    Sideband frequencies follow the exp(-i*omega*t) convention, so a
    positive group delay moves the pulse to later times.
    """
    values = grid.values
    _check_edges(values)
    n = values.size
    omega = -2.0 * math.pi * np.fft.fftfreq(n, d=grid.spacing)

    if callable(kappa):
        phase = np.asarray(kappa(omega), dtype=complex)
    elif kappa == "full":
        phase = np.asarray(kappa_of_omega(cfg, omega), dtype=complex)
    elif kappa == "taylor":
        exp = taylor_coefficients(cfg)
        phase = exp.kappa0 + exp.kappa1 * omega + exp.kappa2 * omega**2
    else:
        raise ValueError(f"kappa must be 'full', 'taylor', or a callable, got {kappa!r}")

    spectrum = fft(values) * np.exp(1j * phase * z)
    return ComplexGrid(values=ifft(spectrum), spacing=grid.spacing, origin=grid.origin)
