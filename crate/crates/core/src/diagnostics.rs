//! Scalar functionals and scenario diagnostics: energy, the weighted
//! spacetime monotonicity integral, the frequency scale `N(t)`, the
//! spatial center `x(t)`, the tightness modulus `C(η)`, support-growth
//! checking, and the three-scenario classifier.

use crate::error::{Result, WaveError};
use crate::littlewood_paley::DyadicIndex;
use crate::parallel;
use crate::solver::Trajectory;
use crate::spectral::{
    forward_transform, inverse_transform, xi_power, GridSpec, RealField, StatePair,
};
use num_complex::Complex64;

/// Average of `1/|x|` over the unit square, `4·asinh(1)`.
const UNIT_CELL_INV_DIST_2D: f64 = 3.525_494_348_078_172;
/// Average of `1/|x|` over the unit cube.
const UNIT_CELL_INV_DIST_3D: f64 = 2.380_077_363_979_553;

/// Energy `∫ ½|∇u|² + ½|u_t|² + ¼|u|⁴ dx` (defocusing form). The gradient
/// term is evaluated spectrally, the quartic term on the lattice.
pub fn energy(state: &StatePair) -> f64 {
    let grid = *state.grid();
    let vol = grid.cell_volume();
    let u_hat = forward_transform(&state.u);
    let grad_sq = parallel::sum_indexed(grid.points(), |i| {
        grid.xi_sq(i) * u_hat.coeffs()[i].norm_sqr()
    });
    let ut = state.ut.samples();
    let ut_sq = parallel::sum_indexed(ut.len(), |i| ut[i] * ut[i]);
    let u = state.u.samples();
    let quartic = parallel::sum_indexed(u.len(), |i| {
        let v = u[i] * u[i];
        v * v
    });
    vol * (0.5 * grad_sq + 0.5 * ut_sq + 0.25 * quartic)
}

/// `∫ |u(x)|⁴ / dist(x, center) dx` with the periodic (minimal-image)
/// distance. The cell containing the center uses the analytic cell average
/// of `1/|x|` (`4 asinh(1)/h` in d = 2, `2.38007736…/h` in d = 3); in
/// d >= 4 that cell's `O(h^{d-1})` contribution is skipped. d = 1 is
/// rejected (the line integral of `1/|x|` diverges).
pub fn morawetz_space_integral(f: &RealField, center: &[f64]) -> Result<f64> {
    let grid = *f.grid();
    let d = grid.dim();
    if d < 2 {
        return Err(WaveError::Domain("weighted integral undefined in d = 1".into()));
    }
    if center.len() != d {
        return Err(WaveError::Domain("center dimension mismatch".into()));
    }
    let h = grid.spacing();
    let singular_weight = match d {
        2 => UNIT_CELL_INV_DIST_2D / h,
        3 => UNIT_CELL_INV_DIST_3D / h,
        _ => 0.0,
    };
    let samples = f.samples();
    let half_cell_sq = (h / 2.0) * (h / 2.0) * d as f64 * (1.0 + 1e-12);
    let c = center.to_vec();
    let sum = parallel::sum_indexed(samples.len(), |i| {
        let v2 = samples[i] * samples[i];
        let quart = v2 * v2;
        let dist_sq = grid.torus_dist_sq(i, &c);
        if dist_sq <= half_cell_sq {
            quart * singular_weight
        } else {
            quart / dist_sq.sqrt()
        }
    });
    Ok(grid.cell_volume() * sum)
}

/// Time-Riemann accumulation of [`morawetz_space_integral`] over the
/// snapshots of a trajectory (uniform snapshot spacing required).
pub fn morawetz_accumulate(traj: &Trajectory, center: &[f64]) -> Result<f64> {
    if traj.snapshots.is_empty() {
        return Err(WaveError::Structural("trajectory holds no snapshots".into()));
    }
    let gap = if traj.snapshots.len() > 1 {
        let g = traj.snapshots[1].0 - traj.snapshots[0].0;
        if g == 0 || !traj.snapshots.windows(2).all(|w| w[1].0 - w[0].0 == g) {
            return Err(WaveError::Structural("snapshots not uniformly spaced".into()));
        }
        g
    } else {
        1
    };
    let dt_eff = traj.dt * gap as f64;
    let mut acc = 0.0;
    for (_, state) in &traj.snapshots {
        acc += dt_eff * morawetz_space_integral(&state.u, center)?;
    }
    Ok(acc)
}

/// `|∇|^s f` with the zero mode dropped for `s != 0` (seminorm version of
/// the weighting, usable on mean-carrying data).
fn weighted_component(f: &RealField, s: f64) -> RealField {
    if s == 0.0 {
        return f.clone();
    }
    let mut hat = forward_transform(f);
    let grid = *f.grid();
    parallel::for_each_enumerated(hat.coeffs_mut(), |i, z| {
        let xi_sq = grid.xi_sq(i);
        if xi_sq == 0.0 {
            *z = Complex64::default();
        } else {
            *z *= xi_power(xi_sq, s);
        }
    });
    inverse_transform(&hat)
}

/// Pointwise critical-norm density
/// `||∇|^{s_c} u|² + ||∇|^{s_c-1} u_t|²` and its lattice integral.
fn critical_density(state: &StatePair) -> (Vec<f64>, f64) {
    let grid = *state.grid();
    let sc = (grid.dim() as f64 - 2.0) / 2.0;
    let a = weighted_component(&state.u, sc);
    let b = weighted_component(&state.ut, sc - 1.0);
    let density: Vec<f64> = a
        .samples()
        .iter()
        .zip(b.samples())
        .map(|(x, y)| x * x + y * y)
        .collect();
    let total = grid.cell_volume() * parallel::sum_indexed(density.len(), |i| density[i]);
    (density, total)
}

/// Per-mode critical spectral mass of the pair (volume factor included),
/// split into the `u` and `u_t` contributions.
fn critical_spectral_masses(state: &StatePair) -> (Vec<f64>, Vec<f64>, GridSpec) {
    let grid = *state.grid();
    let sc = (grid.dim() as f64 - 2.0) / 2.0;
    let vol = grid.cell_volume();
    let u_hat = forward_transform(&state.u);
    let ut_hat = forward_transform(&state.ut);
    let mass = |coeffs: &[Complex64], s: f64| -> Vec<f64> {
        (0..grid.points())
            .map(|i| {
                let xi_sq = grid.xi_sq(i);
                if xi_sq == 0.0 && s != 0.0 {
                    0.0
                } else {
                    vol * xi_power(xi_sq, 2.0 * s) * coeffs[i].norm_sqr()
                }
            })
            .collect()
    };
    (mass(u_hat.coeffs(), sc), mass(ut_hat.coeffs(), sc - 1.0), grid)
}

/// Frequency scale `N(t)`: the smallest dyadic `N` whose high-frequency
/// tail `|ξ| > N` carries at most `η` of the total critical spectral mass.
pub fn frequency_scale(state: &StatePair, eta: f64) -> Result<DyadicIndex> {
    if !(0.0 < eta && eta < 1.0) {
        return Err(WaveError::Domain(format!("η = {eta} outside (0, 1)")));
    }
    let (mu, mut_, grid) = critical_spectral_masses(state);
    let total: f64 = mu.iter().sum::<f64>() + mut_.iter().sum::<f64>();
    if total <= 0.0 {
        return Err(WaveError::ZeroState("frequency scale of the zero state".into()));
    }
    // bucket by ceil(log2 |ξ|): tail(2^k) = Σ_{b > k} bucket_b
    let lo = (grid.fundamental_frequency().log2().floor() as i32) - 1;
    let hi = (grid.max_frequency().log2().ceil() as i32) + 1;
    let nb = (hi - lo + 1) as usize;
    let mut buckets = vec![0.0f64; nb];
    for i in 0..grid.points() {
        let m = mu[i] + mut_[i];
        if m == 0.0 {
            continue;
        }
        let xi = grid.xi_sq(i).sqrt();
        if xi == 0.0 {
            // mean content sits below every dyadic
            buckets[0] += m;
        } else {
            let b = (xi.log2().ceil() as i32).clamp(lo, hi);
            buckets[(b - lo) as usize] += m;
        }
    }
    let mut tail = 0.0;
    let mut suffix = vec![0.0f64; nb + 1];
    for b in (0..nb).rev() {
        tail += buckets[b];
        suffix[b] = tail;
    }
    for b in 0..nb {
        // tail above N = 2^(lo + b) is suffix[b + 1]
        if suffix[b + 1] <= eta * total {
            return Ok(DyadicIndex(lo + b as i32));
        }
    }
    Ok(DyadicIndex(hi))
}

/// Torus-safe center estimate from the first circular moment.
#[derive(Clone, Debug)]
pub struct CenterEstimate {
    pub point: Vec<f64>,
    /// Smallest per-axis moment magnitude over total mass; near zero when
    /// the density cancels (e.g. antipodal bumps).
    pub confidence: f64,
    pub low_confidence: bool,
}

/// Spatial center `x(t)`: per-axis circular mean of the critical-norm
/// density (phase of the first Fourier moment), well defined on the torus.
pub fn spatial_center(state: &StatePair) -> Result<CenterEstimate> {
    let grid = *state.grid();
    let (density, total) = critical_density(state);
    if total <= 0.0 {
        return Err(WaveError::ZeroState("center of the zero state".into()));
    }
    let l = grid.box_len();
    let mut point = vec![0.0; grid.dim()];
    let mut confidence = f64::INFINITY;
    let raw_total: f64 = parallel::sum_indexed(density.len(), |i| density[i]);
    for axis in 0..grid.dim() {
        let re = parallel::sum_indexed(density.len(), |i| {
            let x = grid.axis_index(i, axis) as f64 * grid.spacing();
            density[i] * (std::f64::consts::TAU * x / l).cos()
        });
        let im = parallel::sum_indexed(density.len(), |i| {
            let x = grid.axis_index(i, axis) as f64 * grid.spacing();
            density[i] * (std::f64::consts::TAU * x / l).sin()
        });
        let theta = im.atan2(re);
        point[axis] = (theta * l / std::f64::consts::TAU).rem_euclid(l);
        confidence = confidence.min((re * re + im * im).sqrt() / raw_total);
    }
    Ok(CenterEstimate { point, confidence, low_confidence: confidence < 0.05 })
}

/// Tightness radius measurement.
#[derive(Clone, Debug)]
pub struct ModulusReport {
    /// Radius in physical units.
    pub radius: f64,
    /// Radius in `1/N_t` units (`radius · N_t`).
    pub radius_scaled: f64,
    /// Set when the required radius exceeds the half box: the state is not
    /// spatially tight at this `η`.
    pub saturated: bool,
}

/// Compactness modulus `C(η)`: the smallest radius around `x_t` outside of
/// which the critical-norm mass is at most `η` of the total, reported in
/// units of `1/N_t`.
pub fn compactness_modulus(
    state: &StatePair,
    eta: f64,
    n_t: f64,
    x_t: &[f64],
) -> Result<ModulusReport> {
    if !(0.0 < eta && eta < 1.0) {
        return Err(WaveError::Domain(format!("η = {eta} outside (0, 1)")));
    }
    if !(n_t > 0.0) {
        return Err(WaveError::Domain(format!("N_t = {n_t} must be positive")));
    }
    let grid = *state.grid();
    if x_t.len() != grid.dim() {
        return Err(WaveError::Domain("center dimension mismatch".into()));
    }
    let (density, total) = critical_density(state);
    if total <= 0.0 {
        return Err(WaveError::ZeroState("modulus of the zero state".into()));
    }
    let vol = grid.cell_volume();
    let mut by_dist: Vec<(f64, f64)> = density
        .iter()
        .enumerate()
        .map(|(i, &m)| (grid.torus_dist_sq(i, x_t), vol * m))
        .collect();
    by_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let mut outside = total;
    let mut radius = 0.0;
    for (d2, m) in &by_dist {
        if outside <= eta * total {
            break;
        }
        outside -= m;
        radius = d2.sqrt();
    }
    Ok(ModulusReport {
        radius,
        radius_scaled: radius * n_t,
        saturated: radius > grid.box_len() / 2.0,
    })
}

/// Support-growth check: with initial data numerically supported in the
/// ball of radius `r0` about the box center, verify that at every recorded
/// snapshot the local pair density `|u|² + |u_t|²` outside
/// `B(center, r0 + t + 2Δx)` stays at or below `tol` relative to that
/// snapshot's total.
///
/// The density is deliberately local: fractional weightings of nonzero
/// order are nonlocal operators and smear any compact support by
/// algebraic tails, which would mask the propagation-cone statement this
/// check is after.
pub fn finite_speed_check(traj: &Trajectory, r0: f64, tol: f64) -> Result<bool> {
    if traj.snapshots.is_empty() {
        return Err(WaveError::Structural("trajectory holds no snapshots".into()));
    }
    let grid = *traj.grid();
    let center = vec![grid.box_len() / 2.0; grid.dim()];
    let h = grid.spacing();
    for (step, state) in &traj.snapshots {
        let t = traj.times[*step];
        let allowed = r0 + t + 2.0 * h;
        let u = state.u.samples();
        let ut = state.ut.samples();
        let total = parallel::sum_indexed(u.len(), |i| u[i] * u[i] + ut[i] * ut[i]);
        if total <= 0.0 {
            continue;
        }
        let outside = parallel::sum_indexed(u.len(), |i| {
            if grid.torus_dist_sq(i, &center).sqrt() > allowed {
                u[i] * u[i] + ut[i] * ut[i]
            } else {
                0.0
            }
        });
        if outside > tol * total {
            return Ok(false);
        }
    }
    Ok(true)
}

// ---------------------------------------------------------------------------
// Almost-periodicity records and the cascade energy bounds
// ---------------------------------------------------------------------------

/// Sharp-cutoff spectral masses at a ladder of dyadic cutoffs, split into
/// `u` / `u_t` contributions, for the frequency-cascade energy bounds.
#[derive(Clone, Debug)]
pub struct SpectralMassProfile {
    pub eps: f64,
    /// Dyadic cutoffs `M` (ascending).
    pub cutoffs: Vec<f64>,
    /// `Σ_{0<|ξ|<=M} |ξ|^{2s_c} |û|²` per cutoff.
    pub low_crit_u: Vec<f64>,
    /// `Σ_{0<|ξ|<=M} |ξ|^{2(s_c-1)} |û_t|²` per cutoff.
    pub low_crit_ut: Vec<f64>,
    /// `Σ_{|ξ|<=M} |ξ|² |û|²` per cutoff.
    pub low_energy_u: Vec<f64>,
    /// `Σ_{|ξ|<=M} |û_t|²` per cutoff (zero mode included: weight 1).
    pub low_energy_ut: Vec<f64>,
    /// `Σ_{|ξ|<=M} |ξ|^{2(1-ε)} |û|²` per cutoff.
    pub low_interp_u: Vec<f64>,
    /// `Σ_{0<|ξ|<=M} |ξ|^{-2ε} |û_t|²` per cutoff.
    pub low_interp_ut: Vec<f64>,
    /// `Σ_{|ξ|>M} |ξ|²|û|² + |û_t|²` per cutoff.
    pub high_energy: Vec<f64>,
    /// Total critical mass of the pair.
    pub total_crit: f64,
}

/// Build the mass profile of a state for interpolation exponent `eps`.
pub fn spectral_mass_profile(state: &StatePair, eps: f64) -> Result<SpectralMassProfile> {
    if !(eps > 0.0) {
        return Err(WaveError::Domain(format!("ε = {eps} must be positive")));
    }
    let grid = *state.grid();
    let sc = (grid.dim() as f64 - 2.0) / 2.0;
    let vol = grid.cell_volume();
    let u_hat = forward_transform(&state.u);
    let ut_hat = forward_transform(&state.ut);

    let lo = (grid.fundamental_frequency().log2().floor() as i32) - 1;
    let hi = (grid.max_frequency().log2().ceil() as i32) + 1;
    let cutoffs: Vec<f64> = (lo..=hi).map(|k| (k as f64).exp2()).collect();
    let nc = cutoffs.len();

    let mut profile = SpectralMassProfile {
        eps,
        cutoffs: cutoffs.clone(),
        low_crit_u: vec![0.0; nc],
        low_crit_ut: vec![0.0; nc],
        low_energy_u: vec![0.0; nc],
        low_energy_ut: vec![0.0; nc],
        low_interp_u: vec![0.0; nc],
        low_interp_ut: vec![0.0; nc],
        high_energy: vec![0.0; nc],
        total_crit: 0.0,
    };

    let weight = |xi_sq: f64, s: f64| -> f64 {
        if xi_sq == 0.0 && s != 0.0 {
            0.0
        } else {
            xi_power(xi_sq, 2.0 * s)
        }
    };

    for i in 0..grid.points() {
        let xi_sq = grid.xi_sq(i);
        let xi = xi_sq.sqrt();
        let mu = vol * u_hat.coeffs()[i].norm_sqr();
        let mt = vol * ut_hat.coeffs()[i].norm_sqr();
        let crit_u = weight(xi_sq, sc) * mu;
        let crit_ut = weight(xi_sq, sc - 1.0) * mt;
        let energy_u = weight(xi_sq, 1.0) * mu;
        let energy_ut = mt;
        let interp_u = weight(xi_sq, 1.0 - eps) * mu;
        let interp_ut = weight(xi_sq, -eps) * mt;
        profile.total_crit += crit_u + crit_ut;
        for (c, &m) in cutoffs.iter().enumerate() {
            if xi <= m {
                profile.low_crit_u[c] += crit_u;
                profile.low_crit_ut[c] += crit_ut;
                profile.low_energy_u[c] += energy_u;
                profile.low_energy_ut[c] += energy_ut;
                profile.low_interp_u[c] += interp_u;
                profile.low_interp_ut[c] += interp_ut;
            } else {
                profile.high_energy[c] += energy_u + energy_ut;
            }
        }
    }
    Ok(profile)
}

/// Time-stamped modulation record: `N(t)`, `x(t)`, `C(η)` at the requested
/// tightness levels, the critical pair norm, and (optionally) the spectral
/// mass profile for the cascade bounds.
#[derive(Clone, Debug)]
pub struct AlmostPeriodicityRecord {
    pub t: f64,
    pub n_t: f64,
    pub x_t: Vec<f64>,
    /// `(η, C(η))` with the radius in `1/N_t` units; radii are
    /// nonincreasing in `η`.
    pub c_eta: Vec<(f64, f64)>,
    pub crit_norm: f64,
    pub profile: Option<SpectralMassProfile>,
}

/// Measure one almost-periodicity record. `etas` must be in `(0, 1)`.
pub fn almost_periodicity_record(
    state: &StatePair,
    t: f64,
    etas: &[f64],
    profile_eps: Option<f64>,
) -> Result<AlmostPeriodicityRecord> {
    let n_t = frequency_scale(state, etas.first().copied().unwrap_or(0.1))?;
    let center = spatial_center(state)?;
    let mut c_eta = Vec::with_capacity(etas.len());
    for &eta in etas {
        let m = compactness_modulus(state, eta, n_t.value(), &center.point)?;
        c_eta.push((eta, m.radius_scaled));
    }
    let profile = match profile_eps {
        Some(eps) => Some(spectral_mass_profile(state, eps)?),
        None => None,
    };
    Ok(AlmostPeriodicityRecord {
        t,
        n_t: n_t.value(),
        x_t: center.point,
        c_eta,
        crit_norm: crate::solver::critical_pair_norm(state),
        profile,
    })
}

/// Outcome of the low/high frequency energy bounds for one record.
#[derive(Clone, Debug)]
pub struct CascadeBound {
    pub t: f64,
    pub cutoff: f64,
    /// measured low-frequency energy / interpolation bound
    pub low_constant: f64,
    /// measured high-frequency energy / Chebyshev bound
    pub high_constant: f64,
}

#[derive(Clone, Debug)]
pub struct CascadeReport {
    pub bounds: Vec<CascadeBound>,
    pub all_within: bool,
}

/// Check the two displayed frequency-cascade energy bounds on each record:
/// the interpolation bound
/// `Σ_{|ξ|<=M} |ξ|²|û|²+|û_t|² <= (low crit)^θ (low interp)^{1-θ}`,
/// `θ = ε/(ε+s_c-1)`, and the Chebyshev bound
/// `Σ_{|ξ|>M} |ξ|²|û|²+|û_t|² <= M^{-2(s_c-1)} · total crit`,
/// at cutoff `M = N(t)`. Requires `s_c > 1` (d >= 5) and recorded
/// profiles. `constant_cap` bounds the tolerated measured/bound ratio.
pub fn cascade_energy_vanishing_check(
    records: &[AlmostPeriodicityRecord],
    dim: usize,
    constant_cap: f64,
) -> Result<CascadeReport> {
    let sc = (dim as f64 - 2.0) / 2.0;
    if sc <= 1.0 {
        return Err(WaveError::Inapplicable(format!(
            "cascade bounds need s_c > 1 (d >= 5), got s_c = {sc}"
        )));
    }
    let mut bounds = Vec::with_capacity(records.len());
    let mut all_within = true;
    for rec in records {
        let p = rec.profile.as_ref().ok_or_else(|| {
            WaveError::Structural("record carries no spectral mass profile".into())
        })?;
        let theta = p.eps / (p.eps + sc - 1.0);
        // cutoff index: nearest dyadic at or above N(t)
        let c = p
            .cutoffs
            .iter()
            .position(|&m| m >= rec.n_t * (1.0 - 1e-12))
            .unwrap_or(p.cutoffs.len() - 1);
        let low_measured = p.low_energy_u[c] + p.low_energy_ut[c];
        let holder_u = p.low_crit_u[c].powf(theta) * p.low_interp_u[c].powf(1.0 - theta);
        let holder_ut = p.low_crit_ut[c].powf(theta) * p.low_interp_ut[c].powf(1.0 - theta);
        let low_bound = holder_u + holder_ut;
        let high_measured = p.high_energy[c];
        let high_bound = p.cutoffs[c].powf(-2.0 * (sc - 1.0)) * p.total_crit;
        let low_constant = if low_bound > 0.0 {
            low_measured / low_bound
        } else if low_measured > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        let high_constant = if high_bound > 0.0 {
            high_measured / high_bound
        } else if high_measured > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if low_constant > constant_cap || high_constant > constant_cap {
            all_within = false;
        }
        bounds.push(CascadeBound { t: rec.t, cutoff: p.cutoffs[c], low_constant, high_constant });
    }
    Ok(CascadeReport { bounds, all_within })
}

// ---------------------------------------------------------------------------
// Scenario classifier
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioLabel {
    FiniteTime,
    SolitonLike,
    CascadeLike,
    Unclassified,
}

impl std::fmt::Display for ScenarioLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ScenarioLabel::FiniteTime => "finite-time",
            ScenarioLabel::SolitonLike => "soliton-like",
            ScenarioLabel::CascadeLike => "cascade-like",
            ScenarioLabel::Unclassified => "unclassified",
        };
        write!(f, "{s}")
    }
}

/// Heuristic thresholds of the classifier; all tunable.
#[derive(Clone, Copy, Debug)]
pub struct ClassifierThresholds {
    /// `max N / min N` at or below this factor counts as constant.
    pub soliton_factor: f64,
    /// `max N / min N` at or above this factor counts as a cascade.
    pub cascade_factor: f64,
    /// Critical-norm growth factor that marks a truncated run as blow-up.
    pub divergence_factor: f64,
}

impl Default for ClassifierThresholds {
    fn default() -> Self {
        ClassifierThresholds {
            soliton_factor: 2.0,
            cascade_factor: 8.0,
            divergence_factor: 10.0,
        }
    }
}

/// Classify a run from its modulation records. Heuristic by construction:
/// the trichotomy holds for exact global solutions, while a measured run
/// can only suggest membership.
pub fn classify_scenario(
    records: &[AlmostPeriodicityRecord],
    truncated: bool,
    thresholds: &ClassifierThresholds,
) -> Result<ScenarioLabel> {
    if records.len() < 10 {
        return Err(WaveError::Domain(format!(
            "classifier needs at least 10 records, got {}",
            records.len()
        )));
    }
    if truncated {
        let first = records.first().unwrap().crit_norm.max(1e-300);
        let last = records.last().unwrap().crit_norm;
        if last / first >= thresholds.divergence_factor {
            return Ok(ScenarioLabel::FiniteTime);
        }
        return Ok(ScenarioLabel::Unclassified);
    }
    let n0 = records.first().unwrap().n_t;
    let n_min = records.iter().map(|r| r.n_t).fold(f64::INFINITY, f64::min);
    let n_max = records.iter().map(|r| r.n_t).fold(0.0f64, f64::max);
    if n_max / n_min <= thresholds.soliton_factor {
        return Ok(ScenarioLabel::SolitonLike);
    }
    if n_min >= n0 * (1.0 - 1e-12) && n_max / n_min >= thresholds.cascade_factor {
        return Ok(ScenarioLabel::CascadeLike);
    }
    Ok(ScenarioLabel::Unclassified)
}
