//! Planar array geometry and far/near-field array response vectors.
//!
//! Elements sit on a uniform rectangular grid with spacing `d`, indexed
//! `(x, y)` with `x = 1..=n_h`, `y = 1..=n_v`; the reference antenna `(1, 1)`
//! is storage index 0 and storage is row-major in `x` (index
//! `(x-1)*n_v + (y-1)`). Angles enter through the direction cosines
//! `theta = cos(az)*sin(el)` and `phi = sin(az)*sin(el)`.

use nalgebra::DVector;

use crate::{C64, Error, Result};

/// Uniform planar (or linear, when one side is 1) antenna array.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ArrayGeometry {
    /// Element count along the horizontal axis.
    pub n_h: usize,
    /// Element count along the vertical axis.
    pub n_v: usize,
    /// Element spacing in meters.
    pub spacing_m: f64,
}

impl ArrayGeometry {
    pub fn new(n_h: usize, n_v: usize, spacing_m: f64) -> Result<Self> {
        if n_h < 1 || n_v < 1 {
            return Err(Error::Config(format!(
                "array must have at least one element per axis, got {n_h}x{n_v}"
            )));
        }
        if !(spacing_m > 0.0) || !spacing_m.is_finite() {
            return Err(Error::Config(format!(
                "element spacing must be positive, got {spacing_m}"
            )));
        }
        Ok(Self { n_h, n_v, spacing_m })
    }

    /// Half-wavelength spacing for the given carrier.
    pub fn half_wave(n_h: usize, n_v: usize, carrier_hz: f64) -> Result<Self> {
        let lambda = crate::LIGHT_SPEED / carrier_hz;
        Self::new(n_h, n_v, lambda / 2.0)
    }

    /// Total element count.
    pub fn len(&self) -> usize {
        self.n_h * self.n_v
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Diagonal aperture in meters.
    pub fn aperture_m(&self) -> f64 {
        let dx = (self.n_h - 1) as f64 * self.spacing_m;
        let dy = (self.n_v - 1) as f64 * self.spacing_m;
        (dx * dx + dy * dy).sqrt()
    }
}

/// Direction cosines `(theta, phi)` of an (azimuth, elevation) pair.
pub fn direction_cosines(theta_az: f64, theta_el: f64) -> (f64, f64) {
    let s = theta_el.sin();
    (theta_az.cos() * s, theta_az.sin() * s)
}

/// Far-field planar array response: `kron(a_x(theta), a_y(phi))` with
/// `a_x[m] = exp(-j*pi*m*theta)`, all entries unit modulus.
pub fn far_steering(theta: f64, phi: f64, geom: &ArrayGeometry) -> DVector<C64> {
    let n = geom.len();
    let mut v = DVector::from_element(n, C64::new(0.0, 0.0));
    let mut idx = 0;
    for x in 0..geom.n_h {
        for y in 0..geom.n_v {
            let phase = -std::f64::consts::PI * (x as f64 * theta + y as f64 * phi);
            v[idx] = C64::from_polar(1.0, phase);
            idx += 1;
        }
    }
    v
}

/// Evaluation mode for the inter-element path difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltaRMode {
    /// Exact spherical geometry (square-root form).
    Exact,
    /// Second-order Taylor expansion: far-field linear term plus the
    /// `d^2/2r` quadratic correction.
    Taylor,
}

/// Path-length difference between element `(x, y)` and the reference
/// antenna `(1, 1)` for a source at distance `r` along `(theta_az, theta_el)`.
///
/// `x` and `y` are 1-based element indices.
pub fn delta_r(
    r: f64,
    theta_az: f64,
    theta_el: f64,
    x: usize,
    y: usize,
    d: f64,
    mode: DeltaRMode,
) -> Result<f64> {
    if !(r > 0.0) {
        return Err(Error::Config(format!("distance must be positive, got {r}")));
    }
    if x < 1 || y < 1 {
        return Err(Error::Config(format!(
            "element indices are 1-based, got ({x}, {y})"
        )));
    }
    let (theta, phi) = direction_cosines(theta_az, theta_el);
    Ok(delta_r_cosines(r, theta, phi, (x - 1) as f64, (y - 1) as f64, d, mode))
}

/// Same as [`delta_r`] but parameterized directly by direction cosines and
/// 0-based element offsets `(u, v)`.
pub(crate) fn delta_r_cosines(
    r: f64,
    theta: f64,
    phi: f64,
    u: f64,
    v: f64,
    d: f64,
    mode: DeltaRMode,
) -> f64 {
    let s = u * theta + v * phi;
    match mode {
        DeltaRMode::Taylor => -d * s + d * d / (2.0 * r) * (u * u + v * v - s * s),
        DeltaRMode::Exact => {
            // sqrt(r^2 - 2*r*d*s + d^2*(u^2+v^2)) - r, rearranged to avoid
            // cancellation when r dominates the aperture.
            let delta = -2.0 * r * d * s + d * d * (u * u + v * v);
            delta / ((r * r + delta).sqrt() + r)
        }
    }
}

/// Per-element spherical-wavefront phase `pi * delta_r_taylor / d` for the
/// element at 0-based offsets `(u, v)`, plus its partial derivatives with
/// respect to `(theta, phi, r)`.
pub(crate) fn near_phase_and_partials(
    r: f64,
    theta: f64,
    phi: f64,
    u: f64,
    v: f64,
    d: f64,
) -> (f64, f64, f64, f64) {
    use std::f64::consts::PI;
    let s = u * theta + v * phi;
    let quad = u * u + v * v - s * s;
    let g = -PI * s + PI * d / (2.0 * r) * quad;
    let dg_dtheta = -PI * u - PI * d / r * s * u;
    let dg_dphi = -PI * v - PI * d / r * s * v;
    let dg_dr = -PI * d / (2.0 * r * r) * quad;
    (g, dg_dtheta, dg_dphi, dg_dr)
}

/// Near-field array response: element-wise phase `exp(j*pi*delta_r/d)` with
/// the Taylor-mode path difference, equal to the spherical phase-shift
/// diagonal applied to [`far_steering`].
pub fn near_steering(r: f64, theta: f64, phi: f64, geom: &ArrayGeometry) -> Result<DVector<C64>> {
    if !(r > 0.0) {
        return Err(Error::Config(format!("distance must be positive, got {r}")));
    }
    let n = geom.len();
    let d = geom.spacing_m;
    let mut out = DVector::from_element(n, C64::new(0.0, 0.0));
    let mut idx = 0;
    for x in 0..geom.n_h {
        for y in 0..geom.n_v {
            let (g, _, _, _) = near_phase_and_partials(r, theta, phi, x as f64, y as f64, d);
            out[idx] = C64::from_polar(1.0, g);
            idx += 1;
        }
    }
    Ok(out)
}

/// Rayleigh distance `2 D^2 / lambda` for the array's diagonal aperture `D`.
pub fn rayleigh_distance(geom: &ArrayGeometry, wavelength: f64) -> f64 {
    let d = geom.aperture_m();
    2.0 * d * d / wavelength
}
