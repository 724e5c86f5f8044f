//! Pilot acquisition: precoder/combiner codebooks, noisy beamformed
//! measurements, and the Kronecker system operator.
//!
//! During one coherence block the BS sweeps `M` precoder beams, the UE
//! listens with `T` combiner beams per frame, and `K` pilot subcarriers are
//! observed, giving `Y[k] = W^H H[k] F S[k] + N[k]` per subcarrier. The
//! stacked measurement concatenates the column-major vectorizations of the
//! `Y[k]` in subcarrier order.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use crate::array::far_steering;
use crate::channel::{complex_gaussian, ChannelBlock, SystemConfig};
use crate::{C64, Error, Result};

/// Pilot pattern configuration.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct PilotConfig {
    /// Pilot subcarrier count K.
    pub k_subcarriers: usize,
    /// Time frames M (one precoder beam per frame).
    pub m_frames: usize,
    /// Sub-frames T (one combiner beam per sub-frame).
    pub t_subframes: usize,
    /// Per-antenna SNR in dB used when deriving the noise variance.
    pub snr_db: f64,
    /// K x M unit-modulus pilot symbols; `None` means all-ones.
    #[serde(default)]
    pub pilot_symbols: Option<Vec<Vec<(f64, f64)>>>,
}

impl PilotConfig {
    pub fn all_ones(k: usize, m: usize, t: usize, snr_db: f64) -> Self {
        Self {
            k_subcarriers: k,
            m_frames: m,
            t_subframes: t,
            snr_db,
            pilot_symbols: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_subcarriers < 1 || self.m_frames < 1 || self.t_subframes < 1 {
            return Err(Error::Config("pilot dimensions must be at least 1".into()));
        }
        if let Some(s) = &self.pilot_symbols {
            if s.len() != self.k_subcarriers || s.iter().any(|row| row.len() != self.m_frames) {
                return Err(Error::Dimension(format!(
                    "pilot symbols must be {}x{}",
                    self.k_subcarriers, self.m_frames
                )));
            }
            for row in s {
                for &(re, im) in row {
                    let m = (re * re + im * im).sqrt();
                    if (m - 1.0).abs() > 1e-12 {
                        return Err(Error::Config(format!(
                            "pilot symbols must be unit modulus, got |s| = {m}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Pilot symbol `s_m[k]`, 1-based `k` and `m`.
    pub fn symbol(&self, k: usize, m: usize) -> C64 {
        match &self.pilot_symbols {
            None => C64::new(1.0, 0.0),
            Some(s) => {
                let (re, im) = s[k - 1][m - 1];
                C64::new(re, im)
            }
        }
    }

    /// Fill the pilot pattern with seeded QPSK symbols.
    pub fn with_qpsk_symbols<R: Rng + ?Sized>(mut self, rng: &mut R) -> Self {
        let root = std::f64::consts::FRAC_1_SQRT_2;
        let mut rows = Vec::with_capacity(self.k_subcarriers);
        for _ in 0..self.k_subcarriers {
            let mut row = Vec::with_capacity(self.m_frames);
            for _ in 0..self.m_frames {
                let re = if rng.random::<bool>() { root } else { -root };
                let im = if rng.random::<bool>() { root } else { -root };
                row.push((re, im));
            }
            rows.push(row);
        }
        self.pilot_symbols = Some(rows);
        self
    }
}

/// Beam codebooks: precoder `F` (N_T x M) and combiner `W` (N_R x T),
/// unit-norm columns.
#[derive(Debug, Clone)]
pub struct Codebooks {
    pub precoder_f: DMatrix<C64>,
    pub combiner_w: DMatrix<C64>,
}

/// Factor `m` beams into a horizontal x vertical grid matching the array
/// aspect ratio as closely as possible; linear arrays use all beams on the
/// horizontal cosine.
fn beam_grid(m: usize, n_h: usize, n_v: usize) -> (usize, usize) {
    if n_v == 1 {
        return (m, 1);
    }
    let target = n_h as f64 / n_v as f64;
    let mut best = (m, 1);
    let mut best_err = f64::INFINITY;
    for mv in 1..=m {
        if m % mv != 0 {
            continue;
        }
        let mh = m / mv;
        let err = ((mh as f64 / mv as f64).ln() - target.ln()).abs();
        if err < best_err {
            best_err = err;
            best = (mh, mv);
        }
    }
    best
}

/// Unit-norm far-field steering columns on the uniform direction-cosine grid
/// `theta_i = -1 + 2i/n` (the grid image of equally spaced beams over
/// (-pi/2, pi/2]).
fn steering_codebook(geom: &crate::array::ArrayGeometry, m: usize) -> DMatrix<C64> {
    let (mh, mv) = beam_grid(m, geom.n_h, geom.n_v);
    let n = geom.len();
    let scale = C64::new(1.0 / (n as f64).sqrt(), 0.0);
    let mut out = DMatrix::from_element(n, m, C64::new(0.0, 0.0));
    let mut col = 0;
    for ih in 0..mh {
        let theta = -1.0 + 2.0 * (ih + 1) as f64 / mh as f64;
        for iv in 0..mv {
            let phi = if mv == 1 { 0.0 } else { -1.0 + 2.0 * (iv + 1) as f64 / mv as f64 };
            let a = far_steering(theta, phi, geom) * scale;
            out.set_column(col, &a);
            col += 1;
        }
    }
    out
}

/// Build the precoder/combiner codebooks for the system.
pub fn build_codebooks(sys: &SystemConfig, cfg: &PilotConfig) -> Codebooks {
    Codebooks {
        precoder_f: steering_codebook(&sys.bs_array, cfg.m_frames),
        combiner_w: steering_codebook(&sys.ue_array, cfg.t_subframes),
    }
}

/// Processed pilot observations of one coherence block.
#[derive(Debug, Clone)]
pub struct MeasurementBlock {
    /// K matrices, each T x M.
    pub y_per_subcarrier: Vec<DMatrix<C64>>,
    /// Concatenated column-major vectorizations, length K*M*T.
    pub stacked: DVector<C64>,
    /// Noise variance used for this block.
    pub noise_var: f64,
}

/// Concatenate the column-major vectorizations of the per-subcarrier
/// measurement matrices: `stacked[(k-1)MT + (m-1)T + t] = Y[k][t, m]`.
pub fn stack(y_per_subcarrier: &[DMatrix<C64>]) -> DVector<C64> {
    let per = y_per_subcarrier.first().map_or(0, |y| y.len());
    let mut out = DVector::from_element(y_per_subcarrier.len() * per, C64::new(0.0, 0.0));
    let mut idx = 0;
    for y in y_per_subcarrier {
        for c in 0..y.ncols() {
            for r in 0..y.nrows() {
                out[idx] = y[(r, c)];
                idx += 1;
            }
        }
    }
    out
}

/// Inverse of [`stack`].
pub fn unstack(stacked: &DVector<C64>, k: usize, t: usize, m: usize) -> Vec<DMatrix<C64>> {
    let per = t * m;
    (0..k)
        .map(|ki| DMatrix::from_fn(t, m, |r, c| stacked[ki * per + c * t + r]))
        .collect()
}

/// Noise variance matching the configured SNR for this channel realization:
/// the per-receive-antenna signal power averaged over precoder beams and
/// subcarriers, divided by the linear SNR.
pub fn noise_var_for_snr(channel: &ChannelBlock, books: &Codebooks, cfg: &PilotConfig) -> f64 {
    let k = channel.h_per_subcarrier.len();
    let n_r = books.combiner_w.nrows();
    let m = books.precoder_f.ncols();
    let mut power = 0.0;
    for h in &channel.h_per_subcarrier {
        power += (h * &books.precoder_f).norm_squared();
    }
    let signal = power / (k * m * n_r) as f64;
    signal * 10f64.powf(-cfg.snr_db / 10.0)
}

/// Synthesize the noisy pilot observation of one block with the noise
/// variance implied by the configured SNR.
pub fn measure<R: Rng + ?Sized>(
    channel: &ChannelBlock,
    books: &Codebooks,
    cfg: &PilotConfig,
    rng: &mut R,
) -> Result<MeasurementBlock> {
    let noise_var = noise_var_for_snr(channel, books, cfg);
    measure_with_noise_var(channel, books, cfg, noise_var, rng)
}

/// Synthesize the noisy pilot observation with an explicit noise variance.
pub fn measure_with_noise_var<R: Rng + ?Sized>(
    channel: &ChannelBlock,
    books: &Codebooks,
    cfg: &PilotConfig,
    noise_var: f64,
    rng: &mut R,
) -> Result<MeasurementBlock> {
    cfg.validate()?;
    let k = cfg.k_subcarriers;
    if channel.h_per_subcarrier.len() != k {
        return Err(Error::Dimension(format!(
            "channel has {} subcarriers, pilot config expects {k}",
            channel.h_per_subcarrier.len()
        )));
    }
    let (t, m) = (cfg.t_subframes, cfg.m_frames);
    if books.precoder_f.ncols() != m || books.combiner_w.ncols() != t {
        return Err(Error::Dimension("codebook beam counts do not match pilot config".into()));
    }
    let mut per = Vec::with_capacity(k);
    for (ki, h) in channel.h_per_subcarrier.iter().enumerate() {
        if h.nrows() != books.combiner_w.nrows() || h.ncols() != books.precoder_f.nrows() {
            return Err(Error::Dimension(format!(
                "channel matrix is {}x{}, codebooks expect {}x{}",
                h.nrows(),
                h.ncols(),
                books.combiner_w.nrows(),
                books.precoder_f.nrows()
            )));
        }
        let mut y = books.combiner_w.adjoint() * h * &books.precoder_f;
        for c in 0..m {
            let s = cfg.symbol(ki + 1, c + 1);
            for r in 0..t {
                y[(r, c)] = y[(r, c)] * s + complex_gaussian(rng, noise_var);
            }
        }
        per.push(y);
    }
    let stacked = stack(&per);
    Ok(MeasurementBlock {
        y_per_subcarrier: per,
        stacked,
        noise_var,
    })
}

/// The Kronecker operator `(F S[k])^T (x) W^H` (MT x N_T*N_R) mapping
/// `vec(H[k])` to the noise-free `vec(Y[k])`, 1-based `k`.
pub fn system_matrix(books: &Codebooks, cfg: &PilotConfig, k: usize) -> DMatrix<C64> {
    let f = &books.precoder_f;
    let w = &books.combiner_w;
    let (n_t, m) = (f.nrows(), f.ncols());
    let (n_r, t) = (w.nrows(), w.ncols());
    let mut out = DMatrix::from_element(m * t, n_t * n_r, C64::new(0.0, 0.0));
    for mi in 0..m {
        let s = cfg.symbol(k, mi + 1);
        for ti in 0..t {
            let row = mi * t + ti;
            for j in 0..n_t {
                let a = f[(j, mi)] * s;
                for i in 0..n_r {
                    // vec(H) is column-major: entry (i, j) at j*n_r + i.
                    out[(row, j * n_r + i)] = a * w[(i, ti)].conj();
                }
            }
        }
    }
    out
}
