//! Parametric near-field channel synthesis and UE trajectory evolution.
//!
//! The line-of-sight channel for subcarrier `k` is the rank-1 outer product
//! of the receive- and transmit-side near-field steering vectors, scaled by
//! the complex path gain and a per-subcarrier delay phase. Large-scale
//! parameters (angles, distance) evolve on the beam-coherence time scale as
//! the UE moves; the path gain is redrawn every channel-coherence interval.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::array::{near_steering, ArrayGeometry};
use crate::{C64, Error, Result, LIGHT_SPEED};

/// Static system parameters shared by every module.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SystemConfig {
    /// Carrier frequency in Hz.
    pub carrier_hz: f64,
    /// Subcarrier spacing in Hz.
    pub subcarrier_spacing_hz: f64,
    /// Base-station (transmit) array.
    pub bs_array: ArrayGeometry,
    /// User-equipment (receive) array.
    pub ue_array: ArrayGeometry,
    /// Number of pilot subcarriers K.
    pub n_subcarriers_pilot: usize,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.carrier_hz > 0.0) {
            return Err(Error::Config("carrier_hz must be positive".into()));
        }
        if !(self.subcarrier_spacing_hz > 0.0) {
            return Err(Error::Config("subcarrier_spacing_hz must be positive".into()));
        }
        if self.n_subcarriers_pilot < 1 {
            return Err(Error::Config("need at least one pilot subcarrier".into()));
        }
        Ok(())
    }

    /// Carrier wavelength in meters (always derived, never stored).
    pub fn wavelength(&self) -> f64 {
        LIGHT_SPEED / self.carrier_hz
    }

    pub fn n_tx(&self) -> usize {
        self.bs_array.len()
    }

    pub fn n_rx(&self) -> usize {
        self.ue_array.len()
    }
}

/// Geometric channel state for one beam-coherence block: direction cosines
/// on both link ends and the BS-UE distance.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LargeScaleParams {
    pub theta_r: f64,
    pub phi_r: f64,
    pub theta_t: f64,
    pub phi_t: f64,
    pub r_m: f64,
}

impl LargeScaleParams {
    pub fn new(theta_r: f64, phi_r: f64, theta_t: f64, phi_t: f64, r_m: f64) -> Result<Self> {
        let p = Self { theta_r, phi_r, theta_t, phi_t, r_m };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, c) in [
            ("theta_r", self.theta_r),
            ("phi_r", self.phi_r),
            ("theta_t", self.theta_t),
            ("phi_t", self.phi_t),
        ] {
            if !(c.abs() < 1.0) {
                return Err(Error::Config(format!(
                    "direction cosine {name} must lie in (-1,1), got {c}"
                )));
            }
        }
        if !(self.r_m > 0.0) || !self.r_m.is_finite() {
            return Err(Error::Config(format!("distance must be positive, got {}", self.r_m)));
        }
        Ok(())
    }

    /// Flatten in the network's output order.
    pub fn to_array(&self) -> [f64; 5] {
        [self.theta_r, self.phi_r, self.theta_t, self.phi_t, self.r_m]
    }
}

/// Fast-fading complex path gain.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SmallScaleParams {
    pub alpha: C64,
}

impl SmallScaleParams {
    pub fn new(alpha: C64) -> Result<Self> {
        if !alpha.re.is_finite() || !alpha.im.is_finite() {
            return Err(Error::Numerical("path gain must be finite".into()));
        }
        Ok(Self { alpha })
    }
}

/// Per-subcarrier channel matrices of one coherence block, together with the
/// parameters that generated them.
#[derive(Debug, Clone)]
pub struct ChannelBlock {
    /// K matrices, each `n_rx x n_tx`.
    pub h_per_subcarrier: Vec<DMatrix<C64>>,
    pub truth_large: LargeScaleParams,
    pub truth_small: SmallScaleParams,
    /// 1-based beam-coherence block index.
    pub block_index: usize,
}

/// Channel matrix `H[k] = alpha * exp(-j*2*pi*(r/c)*k*f_s) * a_R * a_T^H`
/// for the 1-based pilot subcarrier `k`. Receive side on rows.
pub fn synth_channel(
    sys: &SystemConfig,
    large: &LargeScaleParams,
    small: &SmallScaleParams,
    k: usize,
) -> Result<DMatrix<C64>> {
    if k < 1 || k > sys.n_subcarriers_pilot {
        return Err(Error::Config(format!(
            "subcarrier index {k} outside 1..={}",
            sys.n_subcarriers_pilot
        )));
    }
    large.validate()?;
    let small = SmallScaleParams::new(small.alpha)?;
    let a_r = near_steering(large.r_m, large.theta_r, large.phi_r, &sys.ue_array)?;
    let a_t = near_steering(large.r_m, large.theta_t, large.phi_t, &sys.bs_array)?;
    let phase = -2.0 * std::f64::consts::PI * large.r_m / LIGHT_SPEED
        * k as f64
        * sys.subcarrier_spacing_hz;
    let scale = small.alpha * C64::from_polar(1.0, phase);
    Ok(&a_r * a_t.adjoint() * scale)
}

/// All K subcarrier matrices of one block.
pub fn synth_block(
    sys: &SystemConfig,
    large: &LargeScaleParams,
    small: &SmallScaleParams,
    block_index: usize,
) -> Result<ChannelBlock> {
    let h = (1..=sys.n_subcarriers_pilot)
        .map(|k| synth_channel(sys, large, small, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(ChannelBlock {
        h_per_subcarrier: h,
        truth_large: *large,
        truth_small: *small,
        block_index,
    })
}

/// Straight-line UE motion sampled at beam-coherence instants.
///
/// The BS array sits at the origin spanning the global x/y axes. The UE
/// array is aimed broadside at the BS from the trajectory start point and
/// then tilted by `ue_tilt_rad` about its local x axis; the orientation is
/// frozen for the rest of the trajectory, so receive angles drift as the UE
/// moves.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Trajectory {
    /// Start position in meters, BS at the origin.
    pub start_position: [f64; 3],
    /// Speed in m/s (default 3 km/h).
    pub velocity_mps: f64,
    /// Unit heading vector.
    pub heading: [f64; 3],
    /// Beam-coherence (large-scale) block duration in seconds.
    pub beam_interval_s: f64,
    /// Fixed UE array tilt away from the BS boresight, radians.
    pub ue_tilt_rad: f64,
}

impl Default for Trajectory {
    fn default() -> Self {
        Self {
            start_position: [5.0, 0.0, -1.6],
            velocity_mps: 3.0 / 3.6,
            heading: [1.0, 0.0, 0.0],
            beam_interval_s: 20e-3,
            ue_tilt_rad: 0.25,
        }
    }
}

impl Trajectory {
    pub fn validate(&self) -> Result<()> {
        if self.velocity_mps < 0.0 {
            return Err(Error::Config("velocity must be non-negative".into()));
        }
        let n = norm3(self.heading);
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::Config(format!("heading must be unit norm, got {n}")));
        }
        if !(self.beam_interval_s > 0.0) {
            return Err(Error::Config("beam interval must be positive".into()));
        }
        Ok(())
    }

    /// UE position at 1-based block index `l`.
    pub fn position_at(&self, l: usize) -> [f64; 3] {
        let t = (l - 1) as f64 * self.beam_interval_s;
        let s = self.velocity_mps * t;
        [
            self.start_position[0] + s * self.heading[0],
            self.start_position[1] + s * self.heading[1],
            self.start_position[2] + s * self.heading[2],
        ]
    }

    /// Orthonormal UE frame `(x, y, z)` with `z` boresight, frozen at the
    /// trajectory start and tilted by `ue_tilt_rad` about local x.
    fn ue_frame(&self) -> ([f64; 3], [f64; 3], [f64; 3]) {
        let p0 = self.start_position;
        let z0 = normalize3([-p0[0], -p0[1], -p0[2]]);
        // Reference up; fall back when the boresight is (anti)parallel to it.
        let up = if z0[2].abs() > 1.0 - 1e-9 { [1.0, 0.0, 0.0] } else { [0.0, 0.0, 1.0] };
        let x = normalize3(cross3(up, z0));
        let y = cross3(z0, x);
        // Tilt about local x: rotates y and z.
        let (s, c) = self.ue_tilt_rad.sin_cos();
        let yt = [
            c * y[0] + s * z0[0],
            c * y[1] + s * z0[1],
            c * y[2] + s * z0[2],
        ];
        let zt = [
            -s * y[0] + c * z0[0],
            -s * y[1] + c * z0[1],
            -s * y[2] + c * z0[2],
        ];
        (x, yt, zt)
    }
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = norm3(v);
    [v[0] / n, v[1] / n, v[2] / n]
}

fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

/// Direction cosines stay strictly inside (-1, 1); trajectories that graze
/// the array plane would otherwise land exactly on the boundary.
const COSINE_GUARD: f64 = 1.0 - 1e-9;

fn clamp_cosine(c: f64) -> f64 {
    c.clamp(-COSINE_GUARD, COSINE_GUARD)
}

/// Large- and small-scale parameters of the 1-based block `l`.
///
/// Transmit angles follow the BS-frame direction to the UE, receive angles
/// the UE-frame direction back to the BS; the path gain is a fresh unit-
/// variance circular complex Gaussian draw.
pub fn evolve_trajectory<R: Rng + ?Sized>(
    traj: &Trajectory,
    _sys: &SystemConfig,
    l: usize,
    rng: &mut R,
) -> Result<(LargeScaleParams, SmallScaleParams)> {
    if l < 1 {
        return Err(Error::Config("block index is 1-based".into()));
    }
    traj.validate()?;
    let p = traj.position_at(l);
    let r = norm3(p);
    if r < 1e-6 {
        return Err(Error::Config(format!(
            "UE position coincides with the BS origin at block {l}"
        )));
    }
    // BS array spans global x/y: transmit cosines are the normalized
    // in-plane coordinates of the UE.
    let theta_t = clamp_cosine(p[0] / r);
    let phi_t = clamp_cosine(p[1] / r);
    // Direction from UE back to the BS, expressed in the frozen UE frame.
    let d = [-p[0] / r, -p[1] / r, -p[2] / r];
    let (ux, uy, _uz) = traj.ue_frame();
    let theta_r = clamp_cosine(d[0] * ux[0] + d[1] * ux[1] + d[2] * ux[2]);
    let phi_r = clamp_cosine(d[0] * uy[0] + d[1] * uy[1] + d[2] * uy[2]);
    let large = LargeScaleParams::new(theta_r, phi_r, theta_t, phi_t, r)?;
    let small = SmallScaleParams::new(complex_gaussian(rng, 1.0))?;
    Ok((large, small))
}

/// One draw of a circular complex Gaussian with the given total variance.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, variance: f64) -> C64 {
    let s = (variance / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(s * re, s * im)
}

/// Normalized inner product magnitude between the transmit-side near-field
/// steering vectors of two parameter sets, in [0, 1].
pub fn temporal_correlation(
    p1: &LargeScaleParams,
    p2: &LargeScaleParams,
    geom: &ArrayGeometry,
) -> f64 {
    let a1 = near_steering(p1.r_m, p1.theta_t, p1.phi_t, geom).expect("valid params");
    let a2 = near_steering(p2.r_m, p2.theta_t, p2.phi_t, geom).expect("valid params");
    let ip: C64 = a1.dotc(&a2);
    ip.norm() / (a1.norm() * a2.norm())
}

/// Narrowband far-field multipath generator.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct MultipathConfig {
    /// Number of propagation paths.
    pub n_paths: usize,
    /// Power gain P0.
    pub power_gain_p0: f64,
    /// Center frequency f (the per-path gain variance is P0/(f^2 R^2)).
    pub center_freq_f: f64,
    /// Link distance R.
    pub distance_r: f64,
}

impl MultipathConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(Error::Config("need at least one path".into()));
        }
        if self.power_gain_p0 < 0.0 || !(self.center_freq_f > 0.0) || !(self.distance_r > 0.0) {
            return Err(Error::Config("multipath gains/frequency/distance out of range".into()));
        }
        Ok(())
    }
}

/// Sum-of-paths channel `h = sqrt(n_t/L) * sum_l rho_l * a(theta_l)` with
/// `rho_l ~ CN(0, P0/(f^2 R^2))` and the `1/n_t`-normalized response
/// `a(theta) = (1/n_t)[1, e^{j theta}, ..., e^{j (n_t-1) theta}]`.
pub fn farfield_multipath<R: Rng + ?Sized>(
    cfg: &MultipathConfig,
    n_t: usize,
    rng: &mut R,
) -> Result<DVector<C64>> {
    cfg.validate()?;
    let var = cfg.power_gain_p0 / (cfg.center_freq_f * cfg.center_freq_f * cfg.distance_r * cfg.distance_r);
    let mut h = DVector::from_element(n_t, C64::new(0.0, 0.0));
    for _ in 0..cfg.n_paths {
        let rho = complex_gaussian(rng, var);
        let theta: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        for (i, e) in h.iter_mut().enumerate() {
            *e += rho * C64::from_polar(1.0 / n_t as f64, theta * i as f64);
        }
    }
    let scale = (n_t as f64 / cfg.n_paths as f64).sqrt();
    Ok(h * C64::new(scale, 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn test_system(n_t: (usize, usize), n_r: (usize, usize), k: usize) -> SystemConfig {
        let carrier = 1e12;
        SystemConfig {
            carrier_hz: carrier,
            subcarrier_spacing_hz: 120e3,
            bs_array: ArrayGeometry::half_wave(n_t.0, n_t.1, carrier).unwrap(),
            ue_array: ArrayGeometry::half_wave(n_r.0, n_r.1, carrier).unwrap(),
            n_subcarriers_pilot: k,
        }
    }

    fn params(r: f64) -> LargeScaleParams {
        LargeScaleParams::new(0.21, -0.33, 0.48, 0.11, r).unwrap()
    }

    #[test]
    fn synth_channel_zero_gain_gives_zero_matrix() {
        let sys = test_system((4, 1), (2, 1), 2);
        let h = synth_channel(
            &sys,
            &params(3.0),
            &SmallScaleParams::new(C64::new(0.0, 0.0)).unwrap(),
            1,
        )
        .unwrap();
        assert!(h.iter().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn synth_channel_unit_case() {
        // Both arrays single-element, alpha = 1: only the delay phase remains,
        // and a zero-phase configuration gives exactly [[1]].
        let mut sys = test_system((1, 1), (1, 1), 1);
        sys.subcarrier_spacing_hz = 120e3;
        let large = LargeScaleParams::new(0.0, 0.0, 0.0, 0.0, LIGHT_SPEED / 120e3).unwrap();
        // phase = -2*pi*(r/c)*k*f_s = -2*pi -> wraps to 1.
        let h = synth_channel(&sys, &large, &SmallScaleParams::new(C64::new(1.0, 0.0)).unwrap(), 1)
            .unwrap();
        assert!((h[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn synth_channel_is_rank_one_with_expected_gain() {
        let sys = test_system((4, 1), (2, 1), 2);
        let alpha = C64::new(0.8, -0.6);
        let h = synth_channel(&sys, &params(0.35), &SmallScaleParams::new(alpha).unwrap(), 2).unwrap();
        assert_eq!(h.nrows(), 2);
        assert_eq!(h.ncols(), 4);
        let svd = h.clone().svd(false, false);
        let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
        sv.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // Unit-modulus steering entries: top singular value |alpha|*sqrt(N_T*N_R).
        assert!((sv[0] - alpha.norm() * (8.0_f64).sqrt()).abs() < 1e-10);
        assert!(sv[1] < 1e-10 * sv[0]);
    }

    #[test]
    fn synth_channel_rejects_nonfinite() {
        let sys = test_system((2, 1), (2, 1), 1);
        assert!(synth_channel(
            &sys,
            &params(1.0),
            &SmallScaleParams { alpha: C64::new(f64::NAN, 0.0) },
            1
        )
        .is_err());
    }

    #[test]
    fn trajectory_zero_velocity_is_static() {
        let sys = test_system((4, 1), (2, 1), 2);
        let traj = Trajectory { velocity_mps: 0.0, ..Trajectory::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let (l1, _) = evolve_trajectory(&traj, &sys, 1, &mut rng).unwrap();
        let (l9, _) = evolve_trajectory(&traj, &sys, 9, &mut rng).unwrap();
        assert_eq!(l1, l9);
    }

    #[test]
    fn trajectory_distance_hand_arithmetic() {
        // start (5,0,0), heading (1,0,0), 0.8333 m/s, 20 ms blocks:
        // r_l = 5 + 0.016667*(l-1).
        let sys = test_system((4, 1), (2, 1), 2);
        let traj = Trajectory {
            start_position: [5.0, 0.0, 0.0],
            velocity_mps: 0.8333,
            heading: [1.0, 0.0, 0.0],
            beam_interval_s: 20e-3,
            ue_tilt_rad: 0.25,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for l in 1..=5 {
            let (p, _) = evolve_trajectory(&traj, &sys, l, &mut rng).unwrap();
            let want = 5.0 + 0.8333 * 20e-3 * (l - 1) as f64;
            assert!((p.r_m - want).abs() < 1e-12, "block {l}: {} vs {want}", p.r_m);
        }
    }

    #[test]
    fn slower_motion_has_higher_temporal_correlation() {
        // Monte Carlo over random starts: consecutive-block correlation at
        // 3 km/h exceeds that at 30 km/h for the same geometry.
        let sys = test_system((8, 1), (4, 1), 2);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut sum_slow = 0.0;
        let mut sum_fast = 0.0;
        let trials = 200;
        for _ in 0..trials {
            let ang: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let rad: f64 = rng.random_range(1.0..8.0);
            let start = [rad * ang.cos(), rad * ang.sin(), -1.5];
            let hang: f64 = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            let heading = [hang.cos(), hang.sin(), 0.0];
            for (speed_kmh, acc) in [(3.0, &mut sum_slow), (30.0, &mut sum_fast)] {
                let traj = Trajectory {
                    start_position: start,
                    velocity_mps: speed_kmh / 3.6,
                    heading,
                    beam_interval_s: 20e-3,
                    ue_tilt_rad: 0.25,
                };
                let (p1, _) = evolve_trajectory(&traj, &sys, 1, &mut rng).unwrap();
                let (p2, _) = evolve_trajectory(&traj, &sys, 2, &mut rng).unwrap();
                *acc += temporal_correlation(&p1, &p2, &sys.bs_array);
            }
        }
        assert!(
            sum_slow / trials as f64 > sum_fast / trials as f64,
            "slow {} <= fast {}",
            sum_slow / trials as f64,
            sum_fast / trials as f64
        );
    }

    #[test]
    fn evolve_rejects_origin() {
        let sys = test_system((2, 1), (2, 1), 1);
        let traj = Trajectory {
            start_position: [0.0, 0.0, 0.0],
            velocity_mps: 0.0,
            ..Trajectory::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(evolve_trajectory(&traj, &sys, 1, &mut rng).is_err());
    }

    #[test]
    fn temporal_correlation_identity_and_symmetry() {
        let g = ArrayGeometry::half_wave(6, 1, 1e12).unwrap();
        let p1 = params(2.0);
        let p2 = params(2.3);
        assert!((temporal_correlation(&p1, &p1, &g) - 1.0).abs() < 1e-12);
        let a = temporal_correlation(&p1, &p2, &g);
        let b = temporal_correlation(&p2, &p1, &g);
        assert!((a - b).abs() < 1e-12);
        assert!((0.0..=1.0 + 1e-12).contains(&a));
    }

    #[test]
    fn temporal_correlation_orthogonal_grid_directions() {
        // Grid-spaced direction cosines on an (N,1) array are orthogonal in
        // the far-field limit.
        let n = 8;
        let g = ArrayGeometry::half_wave(n, 1, 1e12).unwrap();
        let r_far = 1e12;
        let p1 = LargeScaleParams::new(0.1, 0.0, 0.25, 0.0, r_far).unwrap();
        let p2 = LargeScaleParams::new(0.1, 0.0, 0.25 + 2.0 / n as f64, 0.0, r_far).unwrap();
        let c = temporal_correlation(&p1, &p2, &g);
        assert!(c < 1e-12, "correlation {c}");
    }

    #[test]
    fn temporal_correlation_matches_inner_product_oracle() {
        let g = ArrayGeometry::half_wave(5, 1, 1e12).unwrap();
        let p1 = params(1.7);
        let p2 = LargeScaleParams::new(0.2, -0.3, 0.5, 0.1, 1.8).unwrap();
        let a1 = near_steering(p1.r_m, p1.theta_t, p1.phi_t, &g).unwrap();
        let a2 = near_steering(p2.r_m, p2.theta_t, p2.phi_t, &g).unwrap();
        let mut ip = C64::new(0.0, 0.0);
        for i in 0..g.len() {
            ip += a1[i].conj() * a2[i];
        }
        let oracle = ip.norm() / (a1.norm() * a2.norm());
        assert!((temporal_correlation(&p1, &p2, &g) - oracle).abs() < 1e-14);
    }

    #[test]
    fn multipath_zero_power_gives_zero_vector() {
        let cfg = MultipathConfig {
            n_paths: 3,
            power_gain_p0: 0.0,
            center_freq_f: 28e9,
            distance_r: 10.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let h = farfield_multipath(&cfg, 8, &mut rng).unwrap();
        assert!(h.iter().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn multipath_single_fixed_path_shape() {
        // One path with rho forced to 1 (variance chosen so the draw is
        // deterministic is not possible; instead check the deterministic
        // direction part): theta=0 column is sqrt(n_t)*(1/n_t)*ones once the
        // random gain is divided out.
        let cfg = MultipathConfig {
            n_paths: 1,
            power_gain_p0: 1.0,
            center_freq_f: 1.0,
            distance_r: 1.0,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n_t = 6;
        let h = farfield_multipath(&cfg, n_t, &mut rng).unwrap();
        // All entries share |rho|/sqrt(n_t) magnitude for a single path.
        let mags: Vec<f64> = h.iter().map(|e| e.norm()).collect();
        for m in &mags {
            assert!((m - mags[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn multipath_energy_matches_monte_carlo_oracle() {
        // Empirical E||h||^2 against an independent oracle that re-draws the
        // generative formula directly, 1e5 draws, 2% tolerance.
        let cfg = MultipathConfig {
            n_paths: 4,
            power_gain_p0: 2.5,
            center_freq_f: 3.0,
            distance_r: 2.0,
        };
        let n_t = 8;
        let draws = 100_000;
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut sum = 0.0;
        for _ in 0..draws {
            sum += farfield_multipath(&cfg, n_t, &mut rng).unwrap().norm_squared();
        }
        let mean = sum / draws as f64;

        // Oracle: independent scalar-level simulation of the same formula.
        let mut orng = ChaCha8Rng::seed_from_u64(987);
        let var = cfg.power_gain_p0
            / (cfg.center_freq_f * cfg.center_freq_f * cfg.distance_r * cfg.distance_r);
        let mut osum = 0.0;
        for _ in 0..draws {
            let mut acc = vec![C64::new(0.0, 0.0); n_t];
            for _ in 0..cfg.n_paths {
                let rho = complex_gaussian(&mut orng, var);
                let th: f64 = orng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
                for (i, a) in acc.iter_mut().enumerate() {
                    *a += rho * C64::from_polar(1.0 / n_t as f64, th * i as f64);
                }
            }
            let scale = (n_t as f64 / cfg.n_paths as f64).sqrt();
            osum += acc.iter().map(|e| (e * scale).norm_sqr()).sum::<f64>();
        }
        let oracle = osum / draws as f64;
        assert!(
            (mean - oracle).abs() < 0.02 * oracle,
            "mean {mean} vs oracle {oracle}"
        );
    }
}
