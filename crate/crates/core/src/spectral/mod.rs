//! Periodic lattice fields, discrete Fourier transforms, Fourier
//! multipliers, and norm computations.
//!
//! Conventions, fixed once for the whole crate:
//!
//! - lattice points `x_j = j L/n`, frequencies `ξ_k = 2πk/L` with integer
//!   `k ∈ [-n/2, n/2)` per axis;
//! - transforms are unitary (`1/sqrt(n^d)` in both directions), so
//!   `Σ_x |f|² = Σ_ξ |f̂|²` exactly and `‖f‖_{L²}² = (L/n)^d Σ_ξ |f̂|²`;
//! - the radial symbol `|ξ|^s` at `ξ = 0` is defined as `0` for `s > 0`
//!   and `1` for `s = 0`; for `s < 0` the operand must have (numerically)
//!   zero mean, else the operation reports a [`WaveError::MeanNonzero`].
//! - the rescaling `u ↦ λ u(λ·)` is realized in frequency space by the
//!   index map `k ↦ λk` with amplitude `×λ` on the *same* grid. The result
//!   models a field on a box of side `L/λ`; norms computed against that
//!   smaller box acquire the volume factor `λ^{-d/2}` relative to
//!   [`sobolev_norm`] on the original grid. This is the discrete analogue
//!   of the continuum scaling map, not the literal map on `ℝ^d`.

mod fft;
pub mod io;

use crate::error::{Result, WaveError};
use crate::parallel;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Hard cap on total lattice points (`n^d`), a memory guard.
pub const MAX_POINTS: usize = 1 << 24;

/// Maximum supported spatial dimension.
pub const MAX_DIM: usize = 8;

/// Relative threshold below which a zero-frequency coefficient counts as
/// zero for the negative-order operators.
pub const MEAN_ZERO_TOL: f64 = 1e-12;

/// Periodic lattice: `dim` axes, `n` points per axis, box side `box_len`.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    dim: usize,
    n: usize,
    box_len: f64,
}

impl PartialEq for GridSpec {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.n == other.n && self.box_len == other.box_len
    }
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, box_len: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(WaveError::Domain(format!("dimension {dim} outside 1..={MAX_DIM}")));
        }
        if n < 4 || !n.is_power_of_two() {
            return Err(WaveError::Domain(format!("n = {n} must be a power of two >= 4")));
        }
        if !(box_len.is_finite() && box_len > 0.0) {
            return Err(WaveError::Domain(format!("box length {box_len} must be positive")));
        }
        let points = (n as u128).pow(dim as u32);
        if points > MAX_POINTS as u128 {
            return Err(WaveError::Domain(format!(
                "n^d = {points} exceeds the memory cap {MAX_POINTS}"
            )));
        }
        Ok(GridSpec { dim, n, box_len })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn box_len(&self) -> f64 {
        self.box_len
    }

    /// Total number of lattice points `n^d`.
    pub fn points(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    /// Lattice spacing `L/n`.
    pub fn spacing(&self) -> f64 {
        self.box_len / self.n as f64
    }

    /// Volume element `(L/n)^d`.
    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    /// Smallest nonzero frequency `2π/L`.
    pub fn fundamental_frequency(&self) -> f64 {
        std::f64::consts::TAU / self.box_len
    }

    /// Largest frequency magnitude on the lattice.
    pub fn max_frequency(&self) -> f64 {
        self.fundamental_frequency() * (self.n as f64 / 2.0) * (self.dim as f64).sqrt()
    }

    #[inline]
    fn log2_n(&self) -> usize {
        self.n.trailing_zeros() as usize
    }

    /// Index along `axis` (axis 0 slowest, row-major).
    #[inline]
    pub fn axis_index(&self, flat: usize, axis: usize) -> usize {
        let m = self.log2_n();
        (flat >> (m * (self.dim - 1 - axis))) & (self.n - 1)
    }

    /// Signed integer frequency of a per-axis index.
    #[inline]
    pub fn freq_int(&self, idx: usize) -> i64 {
        if idx < self.n / 2 {
            idx as i64
        } else {
            idx as i64 - self.n as i64
        }
    }

    /// Physical frequency component along `axis`.
    #[inline]
    pub fn xi_component(&self, flat: usize, axis: usize) -> f64 {
        self.freq_int(self.axis_index(flat, axis)) as f64 * self.fundamental_frequency()
    }

    /// `|ξ|²` of the mode at flat index `flat`.
    #[inline]
    pub fn xi_sq(&self, flat: usize) -> f64 {
        let m = self.log2_n();
        let mask = self.n - 1;
        let base = self.fundamental_frequency();
        let mut acc = 0.0;
        let mut f = flat;
        for _ in 0..self.dim {
            let idx = f & mask;
            let k = self.freq_int(idx) as f64;
            acc += k * k;
            f >>= m;
        }
        acc * base * base
    }

    /// Fill `out[..dim]` with the frequency vector `ξ` of mode `flat`.
    #[inline]
    pub fn xi_vector(&self, flat: usize, out: &mut [f64]) {
        let base = self.fundamental_frequency();
        for (axis, slot) in out.iter_mut().take(self.dim).enumerate() {
            *slot = self.freq_int(self.axis_index(flat, axis)) as f64 * base;
        }
    }

    /// Physical coordinates of lattice point `flat`.
    #[inline]
    pub fn position(&self, flat: usize, out: &mut [f64]) {
        let h = self.spacing();
        for (axis, slot) in out.iter_mut().take(self.dim).enumerate() {
            *slot = self.axis_index(flat, axis) as f64 * h;
        }
    }

    /// Squared torus distance (minimal image) between lattice point `flat`
    /// and an arbitrary point `p`.
    pub fn torus_dist_sq(&self, flat: usize, p: &[f64]) -> f64 {
        let h = self.spacing();
        let l = self.box_len;
        let mut acc = 0.0;
        for axis in 0..self.dim {
            let x = self.axis_index(flat, axis) as f64 * h;
            let mut dx = (x - p[axis]).rem_euclid(l);
            if dx > l / 2.0 {
                dx = l - dx;
            }
            acc += dx * dx;
        }
        acc
    }
}

/// Real scalar field sampled on a [`GridSpec`] lattice (row-major).
#[derive(Clone, Debug, PartialEq)]
pub struct RealField {
    grid: GridSpec,
    samples: Vec<f64>,
}

impl RealField {
    pub fn zeros(grid: GridSpec) -> Self {
        RealField { grid, samples: vec![0.0; grid.points()] }
    }

    pub fn from_samples(grid: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.points() {
            return Err(WaveError::GridMismatch(format!(
                "{} samples on a grid of {} points",
                samples.len(),
                grid.points()
            )));
        }
        if !samples.iter().all(|v| v.is_finite()) {
            return Err(WaveError::Domain("non-finite sample".into()));
        }
        Ok(RealField { grid, samples })
    }

    /// Evaluate `f(x)` at every lattice point.
    pub fn from_fn(grid: GridSpec, f: impl Fn(&[f64]) -> f64 + Sync) -> Self {
        let mut field = RealField::zeros(grid);
        let g = grid;
        parallel::for_each_enumerated(&mut field.samples, |i, v| {
            let mut x = [0.0; MAX_DIM];
            g.position(i, &mut x);
            *v = f(&x[..g.dim()]);
        });
        field
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn samples_mut(&mut self) -> &mut [f64] {
        &mut self.samples
    }
}

/// Complex Fourier coefficients on the frequency lattice of a [`GridSpec`].
#[derive(Clone, Debug)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        SpectralField { grid, coeffs: vec![Complex64::default(); grid.points()] }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.points() {
            return Err(WaveError::GridMismatch(format!(
                "{} coefficients on a grid of {} points",
                coeffs.len(),
                grid.points()
            )));
        }
        Ok(SpectralField { grid, coeffs })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    /// ℓ² norm of the coefficient vector (no volume factor).
    pub fn l2_coeff_norm(&self) -> f64 {
        parallel::sum_indexed(self.coeffs.len(), |i| self.coeffs[i].norm_sqr()).sqrt()
    }
}

/// Phase-space point `(u, u_t)` of the wave flow.
#[derive(Clone, Debug)]
pub struct StatePair {
    pub u: RealField,
    pub ut: RealField,
}

impl StatePair {
    pub fn new(u: RealField, ut: RealField) -> Result<Self> {
        if u.grid() != ut.grid() {
            return Err(WaveError::GridMismatch("u and u_t on different grids".into()));
        }
        Ok(StatePair { u, ut })
    }

    pub fn zeros(grid: GridSpec) -> Self {
        StatePair { u: RealField::zeros(grid), ut: RealField::zeros(grid) }
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }
}

/// Unitary forward transform.
pub fn forward_transform(f: &RealField) -> SpectralField {
    let grid = *f.grid();
    let mut coeffs: Vec<Complex64> =
        f.samples().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    fft::transform_all_axes(&mut coeffs, grid.n(), grid.dim(), false);
    SpectralField { grid, coeffs }
}

/// Unitary inverse transform; the imaginary residue of a Hermitian input
/// is discarded.
pub fn inverse_transform(field: &SpectralField) -> RealField {
    let grid = *field.grid();
    let mut work = field.coeffs.clone();
    fft::transform_all_axes(&mut work, grid.n(), grid.dim(), true);
    let mut out = RealField::zeros(grid);
    parallel::zip_apply(out.samples_mut(), &mut work, |_, v, z| *v = z.re);
    out
}

pub(crate) fn forward_in_place(buf: &mut [Complex64], grid: &GridSpec) {
    fft::transform_all_axes(buf, grid.n(), grid.dim(), false);
}

pub(crate) fn inverse_in_place(buf: &mut [Complex64], grid: &GridSpec) {
    fft::transform_all_axes(buf, grid.n(), grid.dim(), true);
}

/// Coefficientwise multiplication by a real symbol `ξ ↦ m(ξ)`.
///
/// Fails with [`WaveError::Singularity`] if the symbol is not finite at a
/// lattice point whose coefficient is nonzero.
pub fn apply_multiplier(
    field: &SpectralField,
    symbol: impl Fn(&[f64]) -> f64 + Sync,
) -> Result<SpectralField> {
    let grid = *field.grid();
    let mut out = field.clone();
    let singular = std::sync::atomic::AtomicBool::new(false);
    parallel::for_each_enumerated(out.coeffs_mut(), |i, z| {
        let mut xi = [0.0; MAX_DIM];
        grid.xi_vector(i, &mut xi);
        let m = symbol(&xi[..grid.dim()]);
        if m.is_finite() {
            *z *= m;
        } else if z.norm_sqr() > 0.0 {
            singular.store(true, std::sync::atomic::Ordering::Relaxed);
        } else {
            *z = Complex64::default();
        }
    });
    if singular.load(std::sync::atomic::Ordering::Relaxed) {
        return Err(WaveError::Singularity(
            "symbol not finite at a lattice point carrying mass".into(),
        ));
    }
    Ok(out)
}

/// Radial multiplier `m(|ξ|)`.
pub fn apply_radial_multiplier(
    field: &SpectralField,
    symbol: impl Fn(f64) -> f64 + Sync,
) -> Result<SpectralField> {
    let grid = *field.grid();
    let mut out = field.clone();
    let singular = std::sync::atomic::AtomicBool::new(false);
    parallel::for_each_enumerated(out.coeffs_mut(), |i, z| {
        let m = symbol(grid.xi_sq(i).sqrt());
        if m.is_finite() {
            *z *= m;
        } else if z.norm_sqr() > 0.0 {
            singular.store(true, std::sync::atomic::Ordering::Relaxed);
        } else {
            *z = Complex64::default();
        }
    });
    if singular.load(std::sync::atomic::Ordering::Relaxed) {
        return Err(WaveError::Singularity(
            "radial symbol not finite at a lattice point carrying mass".into(),
        ));
    }
    Ok(out)
}

/// `|ξ|^s` with the zero-mode convention (`0` for `s > 0`, `1` for `s = 0`).
#[inline]
pub(crate) fn xi_power(xi_sq: f64, s: f64) -> f64 {
    if xi_sq == 0.0 {
        if s == 0.0 {
            1.0
        } else if s > 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else if s == 0.0 {
        1.0
    } else if s == 2.0 {
        xi_sq
    } else if s == 1.0 {
        xi_sq.sqrt()
    } else if s == -1.0 {
        1.0 / xi_sq.sqrt()
    } else if s == -2.0 {
        1.0 / xi_sq
    } else {
        xi_sq.powf(s / 2.0)
    }
}

fn check_mean_zero(field: &SpectralField, what: &str) -> Result<()> {
    let zero_mode = field.coeffs[0].norm();
    let scale = field.l2_coeff_norm();
    if zero_mode > MEAN_ZERO_TOL * scale {
        return Err(WaveError::MeanNonzero(format!(
            "{what}: |f̂(0)| = {zero_mode:.3e} exceeds {MEAN_ZERO_TOL:.0e} × ‖f̂‖ = {:.3e}",
            MEAN_ZERO_TOL * scale
        )));
    }
    Ok(())
}

/// `|∇|^s` on spectral data. Zero mode: unchanged for `s = 0`, annihilated
/// for `s > 0`, and required (numerically) zero for `s < 0`.
pub fn fractional_derivative_spectral(field: &SpectralField, s: f64) -> Result<SpectralField> {
    if s == 0.0 {
        return Ok(field.clone());
    }
    if s < 0.0 {
        check_mean_zero(field, "fractional derivative of negative order")?;
    }
    let grid = *field.grid();
    let mut out = field.clone();
    parallel::for_each_enumerated(out.coeffs_mut(), |i, z| {
        let xi_sq = grid.xi_sq(i);
        if xi_sq == 0.0 {
            *z = Complex64::default();
        } else {
            *z *= xi_power(xi_sq, s);
        }
    });
    Ok(out)
}

/// `|∇|^s f` for a real field.
pub fn fractional_derivative(f: &RealField, s: f64) -> Result<RealField> {
    let hat = forward_transform(f);
    Ok(inverse_transform(&fractional_derivative_spectral(&hat, s)?))
}

/// Homogeneous Sobolev norm `‖f‖_{Ḣ^s} = ‖ |∇|^s f ‖_{L²}` from spectral
/// data, including the lattice volume factor.
pub fn sobolev_norm_spectral(field: &SpectralField, s: f64) -> Result<f64> {
    if s < 0.0 {
        check_mean_zero(field, "Sobolev norm of negative order")?;
    }
    let grid = *field.grid();
    let coeffs = &field.coeffs;
    let sum = parallel::sum_indexed(coeffs.len(), |i| {
        let xi_sq = grid.xi_sq(i);
        if xi_sq == 0.0 && s != 0.0 {
            0.0
        } else {
            xi_power(xi_sq, 2.0 * s) * coeffs[i].norm_sqr()
        }
    });
    Ok((grid.cell_volume() * sum).sqrt())
}

/// Same as [`sobolev_norm_spectral`] but silently dropping the zero mode,
/// for monitored seminorms of mean-carrying data. Documented wherever used.
pub fn sobolev_seminorm_spectral(field: &SpectralField, s: f64) -> f64 {
    let grid = *field.grid();
    let coeffs = &field.coeffs;
    let sum = parallel::sum_indexed(coeffs.len(), |i| {
        let xi_sq = grid.xi_sq(i);
        if xi_sq == 0.0 {
            0.0
        } else {
            xi_power(xi_sq, 2.0 * s) * coeffs[i].norm_sqr()
        }
    });
    (grid.cell_volume() * sum).sqrt()
}

pub fn sobolev_norm(f: &RealField, s: f64) -> Result<f64> {
    sobolev_norm_spectral(&forward_transform(f), s)
}

/// Lebesgue norm `(L/n)^{d/p} (Σ|f|^p)^{1/p}`; `p = ∞` gives the max norm.
pub fn lebesgue_norm(f: &RealField, p: f64) -> Result<f64> {
    if p.is_infinite() && p > 0.0 {
        return Ok(f
            .samples()
            .iter()
            .fold(0.0f64, |acc, &v| acc.max(v.abs())));
    }
    if !(p >= 1.0) {
        return Err(WaveError::Domain(format!("Lebesgue exponent p = {p} < 1")));
    }
    let samples = f.samples();
    let sum = if p == 2.0 {
        parallel::sum_indexed(samples.len(), |i| samples[i] * samples[i])
    } else if p == 4.0 {
        parallel::sum_indexed(samples.len(), |i| {
            let v = samples[i] * samples[i];
            v * v
        })
    } else {
        parallel::sum_indexed(samples.len(), |i| samples[i].abs().powf(p))
    };
    Ok(f.grid().cell_volume().powf(1.0 / p) * sum.powf(1.0 / p))
}

/// Real L² inner product `(L/n)^d Σ f g`.
pub fn l2_inner(f: &RealField, g: &RealField) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(WaveError::GridMismatch("inner product across grids".into()));
    }
    let (a, b) = (f.samples(), g.samples());
    Ok(f.grid().cell_volume() * parallel::sum_indexed(a.len(), |i| a[i] * b[i]))
}

/// Real part of the spectral pairing `(L/n)^d Σ F Ḡ`; equals [`l2_inner`]
/// of the corresponding real fields by unitarity.
pub fn spectral_inner(f: &SpectralField, g: &SpectralField) -> Result<f64> {
    if f.grid() != g.grid() {
        return Err(WaveError::GridMismatch("inner product across grids".into()));
    }
    let (a, b) = (f.coeffs(), g.coeffs());
    Ok(f.grid().cell_volume()
        * parallel::sum_indexed(a.len(), |i| (a[i] * b[i].conj()).re))
}

/// Frequency-space rescaling `u ↦ λ u(λ·)`: mode `k ↦ λk`, amplitude `×λ`,
/// on the same grid. Requires the input band-limited to `|k| < n/(2λ)` per
/// axis (relative mass above the band `≤ 1e-12`), else fails with
/// [`WaveError::Aliasing`]. See the module notes for the box-rescaling
/// convention under which the critical norm is invariant.
pub fn scaling_transform(f: &RealField, lambda: usize) -> Result<RealField> {
    if lambda < 2 {
        return Err(WaveError::Domain(format!("λ = {lambda} must be >= 2")));
    }
    let grid = *f.grid();
    let n = grid.n();
    let band = n / (2 * lambda);
    if band == 0 {
        return Err(WaveError::Aliasing(format!("λ = {lambda} too large for n = {n}")));
    }
    let hat = forward_transform(f);
    let total: f64 = parallel::sum_indexed(hat.coeffs().len(), |i| hat.coeffs()[i].norm_sqr());
    let outside = parallel::sum_indexed(hat.coeffs().len(), |i| {
        let in_band = (0..grid.dim())
            .all(|a| grid.freq_int(grid.axis_index(i, a)).unsigned_abs() < band as u64);
        if in_band {
            0.0
        } else {
            hat.coeffs()[i].norm_sqr()
        }
    });
    if outside > 1e-24 * total {
        return Err(WaveError::Aliasing(format!(
            "mass fraction {:.3e} above the |k| < {band} band",
            outside / total
        )));
    }

    let mut out = SpectralField::zeros(grid);
    let src = hat.coeffs();
    // Sequential scatter: the target indices are a permutation image of the
    // band, and the band is a vanishing fraction of the grid.
    let m = n.trailing_zeros() as usize;
    for (i, &c) in src.iter().enumerate() {
        if c.norm_sqr() == 0.0 {
            continue;
        }
        let mut target = 0usize;
        let mut ok = true;
        for a in 0..grid.dim() {
            let k = grid.freq_int(grid.axis_index(i, a));
            if k.unsigned_abs() >= band as u64 {
                ok = false;
                break;
            }
            let kl = (k * lambda as i64).rem_euclid(n as i64) as usize;
            target = (target << m) | kl;
        }
        if ok {
            out.coeffs_mut()[target] = c * lambda as f64;
        }
    }
    Ok(inverse_transform(&out))
}

/// iid standard normal samples; deterministic in `seed`.
pub fn random_real_field(grid: GridSpec, seed: u64) -> RealField {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let samples: Vec<f64> = (0..grid.points())
        .map(|_| {
            // Box-Muller from two uniforms.
            let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
            let u2: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            (-2.0 * u1.ln()).sqrt() * u2.cos()
        })
        .collect();
    RealField { grid, samples }
}

/// Random field band-limited to `|k| <= kmax` per axis.
pub fn random_band_limited(grid: GridSpec, kmax: i64, seed: u64) -> RealField {
    let f = random_real_field(grid, seed);
    let mut hat = forward_transform(&f);
    let g = grid;
    parallel::for_each_enumerated(hat.coeffs_mut(), |i, z| {
        let inside = (0..g.dim()).all(|a| g.freq_int(g.axis_index(i, a)).abs() <= kmax);
        if !inside {
            *z = Complex64::default();
        }
    });
    inverse_transform(&hat)
}

/// Mean-zero localized bump: Laplacian of a Gaussian of width `sigma`
/// centered at `center`, scaled to peak amplitude ~`amplitude`.
pub fn gaussian_bump(
    grid: GridSpec,
    amplitude: f64,
    sigma: f64,
    center: &[f64],
    mean_zero: bool,
) -> RealField {
    let d = grid.dim() as f64;
    let c: Vec<f64> = center.to_vec();
    RealField::from_fn(grid, move |x| {
        let mut r2 = 0.0;
        for (xi, ci) in x.iter().zip(c.iter()) {
            let l = grid.box_len();
            let mut dx = (xi - ci).rem_euclid(l);
            if dx > l / 2.0 {
                dx = l - dx;
            }
            r2 += dx * dx;
        }
        let e = (-r2 / (2.0 * sigma * sigma)).exp();
        if mean_zero {
            amplitude * (r2 / (sigma * sigma) - d) * e
        } else {
            amplitude * e
        }
    })
}
