//! The linear half-wave group on state pairs.
//!
//! Mode by mode the flow is the rotation-like matrix
//!
//! ```text
//! û(t)   =  cos(t|ξ|) û₀ + sin(t|ξ|)/|ξ| û_t₀
//! û_t(t) = -|ξ| sin(t|ξ|) û₀ + cos(t|ξ|) û_t₀
//! ```
//!
//! with the analytic `ξ → 0` limit `û(t) = û₀ + t û_t₀` on the zero mode.
//! That free drift makes the periodic linear flow unbounded in time for
//! data whose `u_t` carries mean; it is forced by continuity of
//! `sin(t|ξ|)/|ξ|`.

use crate::error::{Result, WaveError};
use crate::parallel;
use crate::spectral::{
    forward_transform, inverse_transform, lebesgue_norm, spectral_inner, GridSpec, RealField,
    SpectralField, StatePair,
};
use num_complex::Complex64;

/// Apply the half-wave rotation by time `t` to spectral pair data in place.
pub(crate) fn rotate_pair_spectral(
    u: &mut [Complex64],
    ut: &mut [Complex64],
    grid: &GridSpec,
    t: f64,
) {
    let g = *grid;
    parallel::zip_apply(u, ut, |i, zu, zt| {
        let om = g.xi_sq(i).sqrt();
        if om == 0.0 {
            *zu += t * *zt;
        } else {
            let (s, c) = (t * om).sin_cos();
            let new_u = c * *zu + (s / om) * *zt;
            let new_t = -om * s * *zu + c * *zt;
            *zu = new_u;
            *zt = new_t;
        }
    });
}

/// Evolve a state pair by the linear wave group for time `t`.
pub fn evolve_linear(state: &StatePair, t: f64) -> StatePair {
    let grid = *state.grid();
    let mut u = forward_transform(&state.u);
    let mut ut = forward_transform(&state.ut);
    rotate_pair_spectral(u.coeffs_mut(), ut.coeffs_mut(), &grid, t);
    StatePair { u: inverse_transform(&u), ut: inverse_transform(&ut) }
}

/// Per-mode linear energy `|ξ|²|û|² + |û_t|²`, invariant mode by mode
/// under [`evolve_linear`]. Raw coefficient weights, no volume factor.
pub fn linear_energy_per_mode(state: &StatePair) -> Vec<f64> {
    let grid = *state.grid();
    let u = forward_transform(&state.u);
    let ut = forward_transform(&state.ut);
    (0..grid.points())
        .map(|i| grid.xi_sq(i) * u.coeffs()[i].norm_sqr() + ut.coeffs()[i].norm_sqr())
        .collect()
}

/// Numerical support of `f`: center (pointer to the max-magnitude sample)
/// and the smallest radius holding all but `frac` of the squared mass.
pub(crate) fn support_radius(f: &RealField, frac: f64) -> (Vec<f64>, f64) {
    let grid = *f.grid();
    let samples = f.samples();
    let mut imax = 0usize;
    let mut vmax = 0.0f64;
    for (i, &v) in samples.iter().enumerate() {
        if v.abs() > vmax {
            vmax = v.abs();
            imax = i;
        }
    }
    let mut center = vec![0.0; grid.dim()];
    grid.position(imax, &mut center);
    let mut by_dist: Vec<(f64, f64)> = samples
        .iter()
        .enumerate()
        .map(|(i, &v)| (grid.torus_dist_sq(i, &center), v * v))
        .collect();
    by_dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    let total: f64 = by_dist.iter().map(|x| x.1).sum();
    let mut outside = total;
    let mut radius = 0.0;
    for (d2, m) in &by_dist {
        outside -= m;
        radius = d2.sqrt();
        if outside <= frac * total {
            break;
        }
    }
    (center, radius)
}

/// Result of a dispersive-decay measurement.
#[derive(Clone, Debug)]
pub struct DecayFit {
    pub times: Vec<f64>,
    pub norms: Vec<f64>,
    /// Least-squares slope of `log ‖·‖_p` against `log t`.
    pub slope: f64,
    /// The free-space rate `-(d-1)/2 (1 - 2/p)`.
    pub target: f64,
}

/// Evolve `sin(t|∇|)/|∇| g` and fit the decay of its `L^p` norm.
///
/// `g` must be localized (numerical support radius at most `L/8`) and all
/// sample times must stay below the wrap-around horizon
/// `L/2 - diam(supp g)`; beyond it the periodic images re-enter the box
/// and the measurement is meaningless.
pub fn dispersive_decay_fit(g: &RealField, p: f64, times: &[f64]) -> Result<DecayFit> {
    let grid = *g.grid();
    let d = grid.dim();
    if !(2..=3).contains(&d) {
        return Err(WaveError::Domain(format!(
            "decay measurement supports d in {{2, 3}}, got {d}"
        )));
    }
    if times.len() < 3 {
        return Err(WaveError::Domain("need at least 3 sample times".into()));
    }
    let (_, r0) = support_radius(g, 1e-10);
    let l = grid.box_len();
    if r0 > l / 8.0 {
        return Err(WaveError::Domain(format!(
            "data not localized: support radius {r0:.3} > L/8 = {:.3}",
            l / 8.0
        )));
    }
    let horizon = l / 2.0 - 2.0 * r0;
    for &t in times {
        if !(t > 0.0) {
            return Err(WaveError::Domain(format!("sample time {t} must be positive")));
        }
        if t > horizon {
            return Err(WaveError::Horizon(format!(
                "t = {t:.3} beyond horizon {horizon:.3} (support radius {r0:.3})"
            )));
        }
    }

    let hat = forward_transform(g);
    let mut norms = Vec::with_capacity(times.len());
    for &t in times {
        let mut evolved = hat.clone();
        let gg = grid;
        parallel::for_each_enumerated(evolved.coeffs_mut(), |i, z| {
            let om = gg.xi_sq(i).sqrt();
            *z *= if om == 0.0 { t } else { (t * om).sin() / om };
        });
        let field = inverse_transform(&evolved);
        norms.push(lebesgue_norm(&field, p)?);
    }

    let slope = log_log_slope(times, &norms)?;
    let target = -(d as f64 - 1.0) / 2.0 * (1.0 - 2.0 / p);
    Ok(DecayFit { times: times.to_vec(), norms, slope, target })
}

fn log_log_slope(times: &[f64], norms: &[f64]) -> Result<f64> {
    let n = times.len() as f64;
    let mut sx = 0.0;
    let mut sy = 0.0;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&t, &v) in times.iter().zip(norms.iter()) {
        if !(v > 0.0) {
            return Err(WaveError::Domain("vanishing norm in decay fit".into()));
        }
        let (x, y) = (t.ln(), v.ln());
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    Ok((n * sxy - sx * sy) / (n * sxx - sx * sx))
}

/// Residual of the trigonometric pairing identity
///
/// ```text
/// <|∇| sin(t₁|∇|)/|∇| g, -|∇| sin(t₂|∇|)/|∇| h> + <cos(t₁|∇|) g, -cos(t₂|∇|) h>
///   = <g, -cos((t₁-t₂)|∇|) h>
/// ```
///
/// with both sides computed independently in frequency space.
pub fn double_duhamel_residual(g: &RealField, h: &RealField, t1: f64, t2: f64) -> Result<f64> {
    if g.grid() != h.grid() {
        return Err(WaveError::GridMismatch("pairing across grids".into()));
    }
    let grid = *g.grid();
    let gh = forward_transform(g);
    let hh = forward_transform(h);

    let weight = |src: &SpectralField, f: &dyn Fn(f64) -> f64| -> SpectralField {
        let mut out = src.clone();
        for (i, z) in out.coeffs_mut().iter_mut().enumerate() {
            *z *= f(grid.xi_sq(i).sqrt());
        }
        out
    };

    // |∇| sin(t|∇|)/|∇| = sin(t|∇|), continuous through ξ = 0.
    let a1 = weight(&gh, &|om| (t1 * om).sin());
    let b1 = weight(&hh, &|om| -(t2 * om).sin());
    let a2 = weight(&gh, &|om| (t1 * om).cos());
    let b2 = weight(&hh, &|om| -(t2 * om).cos());
    let lhs = spectral_inner(&a1, &b1)? + spectral_inner(&a2, &b2)?;

    let b3 = weight(&hh, &|om| -((t1 - t2) * om).cos());
    let rhs = spectral_inner(&gh, &b3)?;
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{gaussian_bump, random_real_field, sobolev_seminorm_spectral};

    fn grid2(n: usize) -> GridSpec {
        GridSpec::new(2, n, std::f64::consts::TAU).unwrap()
    }

    fn random_state(g: GridSpec, seed: u64) -> StatePair {
        StatePair::new(random_real_field(g, seed), random_real_field(g, seed + 5000)).unwrap()
    }

    fn max_diff(a: &StatePair, b: &StatePair) -> f64 {
        let mut m = 0.0f64;
        for (x, y) in a.u.samples().iter().zip(b.u.samples()) {
            m = m.max((x - y).abs());
        }
        for (x, y) in a.ut.samples().iter().zip(b.ut.samples()) {
            m = m.max((x - y).abs());
        }
        m
    }

    #[test]
    fn zero_time_is_identity() {
        let g = grid2(32);
        let s = random_state(g, 1);
        let e = evolve_linear(&s, 0.0);
        assert!(max_diff(&s, &e) < 1e-13);
    }

    #[test]
    fn single_mode_cosine_factor() {
        let g = grid2(32);
        let f = RealField::from_fn(g, |x| (3.0 * x[0]).cos());
        let s = StatePair::new(f.clone(), RealField::zeros(g)).unwrap();
        let t = 0.37;
        let e = evolve_linear(&s, t);
        let factor = (3.0 * t).cos();
        for (a, b) in e.u.samples().iter().zip(f.samples()) {
            assert!((a - factor * b).abs() < 1e-12);
        }
    }

    #[test]
    fn group_law_holds_on_random_states() {
        let g = grid2(16);
        for trial in 0..100 {
            let s = random_state(g, 100 + trial);
            let t1 = 0.03 * trial as f64 - 1.2;
            let t2 = 0.7 + 0.011 * trial as f64;
            let a = evolve_linear(&evolve_linear(&s, t1), t2);
            let b = evolve_linear(&s, t1 + t2);
            let scale = lebesgue_norm(&s.u, f64::INFINITY).unwrap()
                + lebesgue_norm(&s.ut, f64::INFINITY).unwrap()
                + (t1 + t2).abs();
            assert!(max_diff(&a, &b) < 1e-12 * scale.max(1.0), "trial {trial}");
        }
    }

    #[test]
    fn per_mode_energy_is_invariant() {
        let g = grid2(16);
        let s = random_state(g, 7);
        let before = linear_energy_per_mode(&s);
        let after = linear_energy_per_mode(&evolve_linear(&s, 1.7));
        let scale: f64 = before.iter().cloned().fold(0.0, f64::max);
        for (a, b) in before.iter().zip(after.iter()) {
            assert!((a - b).abs() < 1e-12 * scale, "{a} vs {b}");
        }
        let zero = StatePair::zeros(g);
        assert!(linear_energy_per_mode(&zero).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn quarter_period_swaps_single_mode_components() {
        // at t = π/(2|ξ₀|) the rotation maps (û, û_t) to (û_t/ω, -ω û);
        // at t = π/|ξ₀| both components are negated. Energy is unchanged
        // either way.
        let g = grid2(32);
        let om = 2.0;
        let f = RealField::from_fn(g, |x| (om * x[0]).cos());
        let s = StatePair::new(f.clone(), RealField::zeros(g)).unwrap();
        let quarter = evolve_linear(&s, std::f64::consts::FRAC_PI_2 / om);
        for v in quarter.u.samples() {
            assert!(v.abs() < 1e-12);
        }
        for (a, b) in quarter.ut.samples().iter().zip(f.samples()) {
            assert!((a + om * b).abs() < 1e-12);
        }
        let half = evolve_linear(&s, std::f64::consts::PI / om);
        for (a, b) in half.u.samples().iter().zip(f.samples()) {
            assert!((a + b).abs() < 1e-12);
        }
        let e0 = linear_energy_per_mode(&s);
        let e1 = linear_energy_per_mode(&quarter);
        for (a, b) in e0.iter().zip(e1.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn time_reversal_recovers_state() {
        let g = grid2(16);
        for trial in 0..20 {
            let s = random_state(g, 300 + trial);
            let t = 0.9 + 0.05 * trial as f64;
            let mut fwd = evolve_linear(&s, t);
            for v in fwd.ut.samples_mut() {
                *v = -*v;
            }
            let mut back = evolve_linear(&fwd, t);
            for v in back.ut.samples_mut() {
                *v = -*v;
            }
            let scale = lebesgue_norm(&s.u, f64::INFINITY).unwrap().max(1.0);
            assert!(max_diff(&s, &back) < 1e-12 * scale);
        }
    }

    #[test]
    fn commutes_with_fourier_multipliers() {
        use crate::littlewood_paley::{project_band, DyadicIndex};
        let g = grid2(32);
        let s = random_state(g, 11);
        let t = 0.83;
        let a = project_band(&evolve_linear(&s, t).u, DyadicIndex(2));
        let proj = StatePair::new(
            project_band(&s.u, DyadicIndex(2)),
            project_band(&s.ut, DyadicIndex(2)),
        )
        .unwrap();
        let b = evolve_linear(&proj, t).u;
        let scale = lebesgue_norm(&s.u, f64::INFINITY).unwrap().max(1.0);
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).abs() < 1e-12 * scale);
        }
    }

    #[test]
    fn double_duhamel_identity_equal_times_and_random() {
        let g = grid2(16);
        let f = random_real_field(g, 41);
        let h = random_real_field(g, 42);
        // t1 = t2 reduces to -<g, h>
        let res = double_duhamel_residual(&f, &h, 1.3, 1.3).unwrap();
        assert!(res < 1e-12 * 100.0);
        for trial in 0..50 {
            let t1 = -10.0 + 0.4 * trial as f64;
            let t2 = 10.0 - 0.37 * trial as f64;
            let r = double_duhamel_residual(&f, &h, t1, t2).unwrap();
            let scale = lebesgue_norm(&f, 2.0).unwrap() * lebesgue_norm(&h, 2.0).unwrap();
            assert!(r < 1e-12 * scale.max(1.0), "trial {trial}: {r}");
        }
    }

    #[test]
    fn double_duhamel_single_mode_closed_form() {
        let g = grid2(32);
        let f = RealField::from_fn(g, |x| (2.0 * x[1]).cos());
        let (t1, t2) = (0.9, -0.4);
        // LHS = RHS = -cos((t1-t2)|ξ₀|) ‖f‖_{L²}²
        let gh = forward_transform(&f);
        let hh = gh.clone();
        let lhs_a = spectral_inner(
            &{
                let mut a = gh.clone();
                for (i, z) in a.coeffs_mut().iter_mut().enumerate() {
                    *z *= (t1 * g.xi_sq(i).sqrt()).sin();
                }
                a
            },
            &{
                let mut b = hh.clone();
                for (i, z) in b.coeffs_mut().iter_mut().enumerate() {
                    *z *= -(t2 * g.xi_sq(i).sqrt()).sin();
                }
                b
            },
        )
        .unwrap();
        let lhs_b = spectral_inner(
            &{
                let mut a = gh.clone();
                for (i, z) in a.coeffs_mut().iter_mut().enumerate() {
                    *z *= (t1 * g.xi_sq(i).sqrt()).cos();
                }
                a
            },
            &{
                let mut b = hh.clone();
                for (i, z) in b.coeffs_mut().iter_mut().enumerate() {
                    *z *= -(t2 * g.xi_sq(i).sqrt()).cos();
                }
                b
            },
        )
        .unwrap();
        let l2sq = lebesgue_norm(&f, 2.0).unwrap().powi(2);
        let expect = -((t1 - t2) * 2.0).cos() * l2sq;
        assert!((lhs_a + lhs_b - expect).abs() < 1e-12 * l2sq);
        assert!(double_duhamel_residual(&f, &f, t1, t2).unwrap() < 1e-12 * l2sq);
    }

    #[test]
    fn dispersive_slope_short_checks() {
        // d = 2, p = 4 at modest resolution; the acceptance suite runs the
        // full configuration.
        let g = GridSpec::new(2, 256, 1.0).unwrap();
        let bump = gaussian_bump(g, 1.0, 1.0 / 100.0, &[0.5, 0.5], true);
        let times: Vec<f64> = (0..10)
            .map(|i| 0.08 * (0.38f64 / 0.08).powf(i as f64 / 9.0))
            .collect();
        let fit = dispersive_decay_fit(&bump, 4.0, &times).unwrap();
        assert!(
            (fit.slope - fit.target).abs() < 0.1,
            "slope {} vs {}",
            fit.slope,
            fit.target
        );
        // p = 2: no decay
        let fit2 = dispersive_decay_fit(&bump, 2.0, &times).unwrap();
        assert!(fit2.slope.abs() < 0.1, "slope {}", fit2.slope);
    }

    #[test]
    fn horizon_is_enforced() {
        let g = GridSpec::new(2, 64, 1.0).unwrap();
        let bump = gaussian_bump(g, 1.0, 1.0 / 64.0, &[0.5, 0.5], true);
        let err = dispersive_decay_fit(&bump, 4.0, &[0.1, 0.2, 0.49]);
        assert!(matches!(err, Err(WaveError::Horizon(_))));
    }

    #[test]
    fn sobolev_pair_seminorm_sane_under_flow() {
        // the critical pair seminorm is conserved by the linear flow for
        // mean-zero data (it is a weighted per-mode energy)
        let g = grid2(32);
        let f = gaussian_bump(g, 1.0, 0.5, &[3.0, 3.0], true);
        let s = StatePair::new(f, RealField::zeros(g)).unwrap();
        let sc = 0.0;
        let before = {
            let u = forward_transform(&s.u);
            let ut = forward_transform(&s.ut);
            (sobolev_seminorm_spectral(&u, sc).powi(2)
                + sobolev_seminorm_spectral(&ut, sc - 1.0).powi(2))
            .sqrt()
        };
        let evolved = evolve_linear(&s, 0.7);
        let after = {
            let u = forward_transform(&evolved.u);
            let ut = forward_transform(&evolved.ut);
            (sobolev_seminorm_spectral(&u, sc).powi(2)
                + sobolev_seminorm_spectral(&ut, sc - 1.0).powi(2))
            .sqrt()
        };
        assert!((before - after).abs() < 1e-12 * before.max(1.0));
    }
}
