//! Ratios lhs/rhs for the dispersive and Strichartz estimates, measured on the ring.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::harness::admissible::AdmissiblePair;
use crate::harness::records::RatioRecord;
use crate::lattice::{
    field_norm, field_norm_unchecked, make_state, support_radius, time_norm, Exponent,
    SpaceTimeField, SpinorField, StateKind, WalkParams,
};
use crate::multiplier::{fractional_weight, littlewood_paley};
use crate::walk::{time_to_steps, Trajectory};

/// Steps excluded from decay fits as initial transient.
pub const TRANSIENT_STEPS: u64 = 8;

/// Whether the Duhamel sum Σ_s U(t-s)f(s) carries a factor δ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DuhamelWeighting {
    #[default]
    Unweighted,
    Weighted,
}

impl DuhamelWeighting {
    fn factor(self, delta: f64) -> f64 {
        match self {
            DuhamelWeighting::Unweighted => 1.0,
            DuhamelWeighting::Weighted => delta,
        }
    }
}

fn japanese(x: f64) -> f64 {
    (1.0 + x * x).sqrt()
}

fn check_lambda(lambda: f64, delta: f64) -> Result<()> {
    if !(lambda > 0.0 && lambda < 2.0 * PI / delta) {
        return Err(Error::InvalidParameter(format!(
            "lambda = {lambda} outside (0, 2*pi/delta) = (0, {})",
            2.0 * PI / delta
        )));
    }
    Ok(())
}

fn horizon_steps(t: f64, delta: f64) -> Result<u64> {
    let n = time_to_steps(t, delta)?;
    if n < 0 {
        return Err(Error::TimeGrid { t, delta });
    }
    Ok(n as u64)
}

fn record(params: WalkParams, t: f64, lhs: f64, rhs: f64, wrap_ok: bool) -> RatioRecord {
    RatioRecord {
        delta: params.delta(),
        mass: params.mass(),
        lambda: None,
        t_or_horizon: t,
        p: None,
        q: None,
        ptilde: None,
        qtilde: None,
        lhs,
        rhs,
        ratio: lhs / rhs,
        wrap_ok,
        seed: 0,
    }
}

/// ‖U(t)P_λu‖_∞ / (λ^{1/3}⟨λ⟩t^{-1/3}‖u‖₁) at a single time t ≥ δ.
pub fn dispersive_ratio(u: &SpinorField, lambda: f64, t: f64) -> Result<RatioRecord> {
    let n = horizon_steps(t, u.delta())?;
    if n == 0 {
        return Err(Error::ZeroTime);
    }
    Ok(dispersive_series(u, lambda, &[n])?.remove(0))
}

/// Dispersive ratios along an increasing list of step counts, from one trajectory.
///
/// The wrap-guard verdict refers to the support of `u`; the projection is a
/// ring multiplier and is exact on the ring by construction.
pub fn dispersive_series(u: &SpinorField, lambda: f64, steps: &[u64]) -> Result<Vec<RatioRecord>> {
    let params = u.params();
    params.require_mass_window()?;
    check_lambda(lambda, params.delta())?;
    if steps.contains(&0) {
        return Err(Error::ZeroTime);
    }
    if steps.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "time ladder must be strictly increasing".into(),
        ));
    }
    let l1 = field_norm(u, Exponent::Finite(1.0))?;
    if l1 == 0.0 {
        return Err(Error::DegenerateInput("zero initial state".into()));
    }
    let projected = littlewood_paley(u, lambda)?.field;
    let radius = support_radius(u, 0.0);
    let delta = params.delta();
    let mut traj = Trajectory::new(&projected);
    let mut out = Vec::with_capacity(steps.len());
    for &n in steps {
        while traj.steps() < n {
            traj.advance();
        }
        let t = n as f64 * delta;
        let lhs = traj
            .values()
            .iter()
            .map(crate::lattice::spinor_norm)
            .fold(0.0, f64::max);
        let rhs = lambda.cbrt() * japanese(lambda) * t.powf(-1.0 / 3.0) * l1;
        let mut r = record(params, t, lhs, rhs, radius + t < u.half_width());
        r.lambda = Some(lambda);
        out.push(r);
    }
    Ok(out)
}

/// Step counts from `first` to `last`, geometrically spaced with `per_octave`
/// points per doubling, rounded to integers and deduplicated.
pub fn log_time_ladder(first: u64, last: u64, per_octave: u32) -> Vec<u64> {
    let mut out = Vec::new();
    if first == 0 || last < first {
        return out;
    }
    let mut k = 0u32;
    loop {
        let v = (first as f64 * 2f64.powf(k as f64 / per_octave as f64)).round() as u64;
        if v > last {
            break;
        }
        if out.last() != Some(&v) {
            out.push(v);
        }
        k += 1;
    }
    if out.last() != Some(&last) {
        out.push(last);
    }
    out
}

/// Ordinary least squares of log y against log t.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in log space.
    pub residual: f64,
    pub points: usize,
}

pub fn fit_power_law(ts: &[f64], ys: &[f64]) -> Result<SlopeFit> {
    if ts.len() != ys.len() {
        return Err(Error::Shape(
            "time and value series differ in length".into(),
        ));
    }
    let n = ts.len();
    if n < 3 {
        return Err(Error::TooFewPoints(n));
    }
    if ts.iter().chain(ys).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::DegenerateInput(
            "log-log fit needs positive finite data".into(),
        ));
    }
    let xs: Vec<f64> = ts.iter().map(|t| t.ln()).collect();
    let ls: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ls.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ls).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateInput("all times equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(&ls)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(SlopeFit {
        slope,
        intercept,
        residual: (ss / nf).sqrt(),
        points: n,
    })
}

/// Fit of log lhs against log t over the records' times.
pub fn decay_slope_fit(records: &[RatioRecord]) -> Result<SlopeFit> {
    let ts: Vec<f64> = records.iter().map(|r| r.t_or_horizon).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.lhs).collect();
    fit_power_law(&ts, &ys)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DecayRun {
    pub records: Vec<RatioRecord>,
    pub fit: SlopeFit,
}

/// Dispersive ratios of `u` along a log-spaced ladder over [8δ, t_max] and the
/// decay-exponent fit of ‖U(t)P_λu‖_∞.
pub fn decay_run(u: &SpinorField, lambda: f64, t_max: f64) -> Result<DecayRun> {
    let last = horizon_steps(t_max, u.delta())?;
    let steps = log_time_ladder(TRANSIENT_STEPS, last, 4);
    if steps.len() < 3 {
        return Err(Error::TooFewPoints(steps.len()));
    }
    let records = dispersive_series(u, lambda, &steps)?;
    let fit = decay_slope_fit(&records)?;
    Ok(DecayRun { records, fit })
}

/// Σ_{s ∈ [0,t] ∩ δℤ} U(t - s)f(s), optionally weighted by δ.
pub fn duhamel(f: &SpaceTimeField, t: f64, weighting: DuhamelWeighting) -> Result<SpinorField> {
    let params = f.params();
    let n = horizon_steps(t, params.delta())?;
    let mut out = None;
    duhamel_scan(f, n, weighting, |_, d| out = Some(d.field()))?;
    Ok(out.expect("scan visits the final step"))
}

/// Runs the recursion D(0) = f(0), D(k+1) = U·D(k) + f(k+1), calling `visit`
/// with each partial sum up to step `last`.
fn duhamel_scan(
    f: &SpaceTimeField,
    last: u64,
    weighting: DuhamelWeighting,
    mut visit: impl FnMut(u64, &Trajectory),
) -> Result<()> {
    let slice = |k: u64| f.slice_at_step(k).ok_or(Error::MissingSlice(k));
    for k in 0..=last {
        slice(k)?;
    }
    let w = weighting.factor(f.params().delta());
    let scaled = |k: u64| -> Result<SpinorField> {
        let s = slice(k)?;
        Ok(if w == 1.0 {
            s.clone()
        } else {
            s.scale(w.into())
        })
    };
    let mut traj = Trajectory::new(&scaled(0)?);
    visit(0, &traj);
    for k in 1..=last {
        traj.advance();
        traj.add(&scaled(k)?);
        visit(k, &traj);
    }
    Ok(())
}

/// ‖U(t)u‖_{l^p l^q over [0,T]} / ‖|D|^{1/p}⟨D⟩^{3/p}u‖₂.
pub fn homogeneous_ratio(
    u: &SpinorField,
    pair: AdmissiblePair,
    horizon: f64,
) -> Result<RatioRecord> {
    pair.require_discrete()?;
    let params = u.params();
    let steps = horizon_steps(horizon, params.delta())?;
    let weighted = fractional_weight(u, pair.p.recip(), 3.0 * pair.p.recip())?;
    let rhs = field_norm(&weighted, Exponent::Finite(2.0))?;
    if rhs == 0.0 {
        return Err(Error::DegenerateInput("right-hand side vanishes".into()));
    }
    let norms = trajectory_norms(u, pair.q, steps);
    let lhs = time_norm(&norms, params.delta(), pair.p);
    let mut r = record(
        params,
        steps as f64 * params.delta(),
        lhs,
        rhs,
        crate::walk::wrap_guard(u, steps),
    );
    r.p = Some(pair.p);
    r.q = Some(pair.q);
    Ok(r)
}

/// ‖U(t)u‖_{l^q} for t = 0, δ, …, steps·δ.
pub fn trajectory_norms(u: &SpinorField, q: Exponent, steps: u64) -> Vec<f64> {
    let mut traj = Trajectory::new(u);
    let mut norms = Vec::with_capacity(steps as usize + 1);
    norms.push(field_norm_unchecked(u, q));
    for _ in 0..steps {
        traj.advance();
        norms.push(slice_norm(traj.values(), u.params(), q));
    }
    norms
}

fn slice_norm(values: &[crate::lattice::Spinor], params: WalkParams, q: Exponent) -> f64 {
    let field = SpinorField::from_values_unchecked(params, values.to_vec());
    field_norm_unchecked(&field, q)
}

/// ‖Σ_{s≤t}U(t-s)f(s)‖_{l^p l^q} / ‖|D|^{a}⟨D⟩^{b}f‖_{l^{p̃′} l^{q̃′}} with
/// a = 1/p + 1/p̃ and b = 3/p + 3/p̃, the weight applied slice by slice.
pub fn inhomogeneous_ratio(
    f: &SpaceTimeField,
    pair: AdmissiblePair,
    pair_tilde: AdmissiblePair,
    horizon: f64,
    weighting: DuhamelWeighting,
) -> Result<RatioRecord> {
    pair.require_discrete()?;
    pair_tilde.require_discrete()?;
    let params = f.params();
    let delta = params.delta();
    let steps = horizon_steps(horizon, delta)?;
    let a = pair.p.recip() + pair_tilde.p.recip();
    let b = 3.0 * a;
    let (pc, qc) = (pair_tilde.p.conjugate(), pair_tilde.q.conjugate());
    let mut rhs_slices = Vec::with_capacity(steps as usize + 1);
    let mut wrap_ok = true;
    for k in 0..=steps {
        let s = f.slice_at_step(k).ok_or(Error::MissingSlice(k))?;
        rhs_slices.push(field_norm(&fractional_weight(s, a, b)?, qc)?);
        wrap_ok &= support_radius(s, 0.0) + (steps - k) as f64 * delta < s.half_width();
    }
    let rhs = time_norm(&rhs_slices, delta, pc);
    if rhs == 0.0 {
        return Err(Error::DegenerateInput("right-hand side vanishes".into()));
    }
    let mut lhs_slices = Vec::with_capacity(steps as usize + 1);
    duhamel_scan(f, steps, weighting, |_, d| {
        lhs_slices.push(slice_norm(d.values(), params, pair.q))
    })?;
    let lhs = time_norm(&lhs_slices, delta, pair.p);
    let mut r = record(params, steps as f64 * delta, lhs, rhs, wrap_ok);
    r.p = Some(pair.p);
    r.q = Some(pair.q);
    r.ptilde = Some(pair_tilde.p);
    r.qtilde = Some(pair_tilde.q);
    Ok(r)
}

/// Seeded forcing with independent random slices on |j| ≤ radius for steps 0..=steps.
pub fn random_forcing(
    params: WalkParams,
    sites: usize,
    steps: u64,
    seed: u64,
    radius: Option<usize>,
) -> Result<SpaceTimeField> {
    let slices = (0..=steps)
        .map(|k| {
            make_state(
                StateKind::Random {
                    seed: seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k),
                    radius,
                },
                params,
                sites,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeField::new(params, 0, slices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{l2_norm, mixed_norm, NormSpec};
    use crate::walk::{evolve_steps, step};
    use num_complex::Complex64;

    fn params(d: f64, m: f64) -> WalkParams {
        WalkParams::new(d, m).unwrap()
    }

    #[test]
    fn fit_examples() {
        let ts: Vec<f64> = (1..=20).map(|k| k as f64 * 3.0).collect();
        let half: Vec<f64> = ts.iter().map(|t| t.powf(-0.5)).collect();
        let f = fit_power_law(&ts, &half).unwrap();
        assert!((f.slope + 0.5).abs() < 1e-12);
        let third: Vec<f64> = ts.iter().map(|t| 3.0 * t.powf(-1.0 / 3.0)).collect();
        let f = fit_power_law(&ts, &third).unwrap();
        assert!((f.slope + 1.0 / 3.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(f.residual < 1e-12);
        assert_eq!(
            fit_power_law(&ts[..2], &half[..2]),
            Err(Error::TooFewPoints(2))
        );
    }

    #[test]
    fn ladder_shape() {
        let l = log_time_ladder(8, 1024, 4);
        assert_eq!(l[0], 8);
        assert_eq!(*l.last().unwrap(), 1024);
        assert!(l.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(l.len(), 29);
    }

    #[test]
    fn dispersive_ratio_errors() {
        let p = params(1.0, 1.0);
        let u = make_state(StateKind::Impulse { site: 0 }, p, 256).unwrap();
        assert_eq!(dispersive_ratio(&u, 1.0, 0.0), Err(Error::ZeroTime));
        let z = SpinorField::zeros(p, 256).unwrap();
        assert!(matches!(
            dispersive_ratio(&z, 1.0, 4.0),
            Err(Error::DegenerateInput(_))
        ));
        assert!(dispersive_ratio(&u, 7.0, 4.0).is_err());
        let massless = make_state(StateKind::Impulse { site: 0 }, params(1.0, 0.0), 256).unwrap();
        assert!(dispersive_ratio(&massless, 1.0, 4.0).is_err());
    }

    #[test]
    fn dispersive_ratio_is_scale_invariant() {
        let p = params(0.5, 1.0);
        let u = make_state(
            StateKind::Random {
                seed: 1,
                radius: Some(6),
            },
            p,
            512,
        )
        .unwrap();
        let a = dispersive_ratio(&u, 1.0, 16.0).unwrap();
        let b = dispersive_ratio(&u.scale(Complex64::new(2.0, 0.0)), 1.0, 16.0).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-14 * a.ratio);
    }

    fn dense_step_matrix(params: WalkParams, n: usize) -> Vec<Vec<Complex64>> {
        // Column c is the image of the c-th unit vector (site c/2, component c%2).
        let dim = 2 * n;
        let mut m = vec![vec![Complex64::new(0.0, 0.0); dim]; dim];
        for c in 0..dim {
            let mut vals = vec![[Complex64::new(0.0, 0.0); 2]; n];
            vals[c / 2][c % 2] = Complex64::new(1.0, 0.0);
            let img = step(&SpinorField::from_values(params, vals).unwrap());
            for (i, v) in img.values().iter().enumerate() {
                m[2 * i][c] = v[0];
                m[2 * i + 1][c] = v[1];
            }
        }
        m
    }

    fn matmul(a: &[Vec<Complex64>], b: &[Vec<Complex64>]) -> Vec<Vec<Complex64>> {
        let n = a.len();
        let mut out = vec![vec![Complex64::new(0.0, 0.0); n]; n];
        for i in 0..n {
            for k in 0..n {
                let aik = a[i][k];
                for j in 0..n {
                    out[i][j] += aik * b[k][j];
                }
            }
        }
        out
    }

    #[test]
    fn dispersive_lhs_matches_dense_matrix_power() {
        let p = params(1.0, 1.0);
        let n = 64;
        let u = make_state(StateKind::Impulse { site: 0 }, p, n).unwrap();
        let lambda = 1.0;
        let rec = dispersive_ratio(&u, lambda, 16.0).unwrap();

        let one = dense_step_matrix(p, n);
        let mut power = one.clone();
        for _ in 1..16 {
            power = matmul(&power, &one);
        }
        let pu = littlewood_paley(&u, lambda).unwrap().field;
        let flat: Vec<Complex64> = pu.values().iter().flat_map(|v| [v[0], v[1]]).collect();
        let mut best: f64 = 0.0;
        for i in 0..n {
            let a: Complex64 = (0..2 * n).map(|c| power[2 * i][c] * flat[c]).sum();
            let b: Complex64 = (0..2 * n).map(|c| power[2 * i + 1][c] * flat[c]).sum();
            best = best.max((a.norm_sqr() + b.norm_sqr()).sqrt());
        }
        assert!((rec.lhs - best).abs() < 1e-10);
    }

    #[test]
    fn duhamel_examples() {
        let p0 = params(0.5, 0.0);
        let imp = make_state(StateKind::Impulse { site: 0 }, p0, 32).unwrap();
        let f = SpaceTimeField::new(p0, 0, vec![imp.clone(); 3]).unwrap();
        let d = duhamel(&f, 1.0, DuhamelWeighting::Unweighted).unwrap();
        for j in -16..16 {
            let v = d.at_site(j);
            let want = if (0..=2).contains(&j) { 1.0 } else { 0.0 };
            assert_eq!(v[0], Complex64::new(want, 0.0));
            assert_eq!(v[1], Complex64::new(0.0, 0.0));
        }
        assert_eq!(duhamel(&f, 0.0, DuhamelWeighting::Unweighted).unwrap(), imp);

        let p = params(0.5, 1.0);
        let g = make_state(
            StateKind::Random {
                seed: 3,
                radius: Some(4),
            },
            p,
            64,
        )
        .unwrap();
        let z = SpinorField::zeros(p, 64).unwrap();
        let f = SpaceTimeField::new(p, 0, vec![g.clone(), z.clone(), z.clone(), z]).unwrap();
        assert_eq!(
            duhamel(&f, 1.5, DuhamelWeighting::Unweighted).unwrap(),
            evolve_steps(&g, 3).field
        );

        let short = SpaceTimeField::new(p, 0, vec![g]).unwrap();
        assert_eq!(
            duhamel(&short, 1.0, DuhamelWeighting::Unweighted),
            Err(Error::MissingSlice(1))
        );
    }

    #[test]
    fn duhamel_recursion_matches_direct_sum_and_is_linear() {
        let p = params(0.25, 1.0);
        let f = random_forcing(p, 64, 12, 5, Some(5)).unwrap();
        let g = random_forcing(p, 64, 12, 6, Some(5)).unwrap();
        let t = 12.0 * 0.25;
        let rec = duhamel(&f, t, DuhamelWeighting::Unweighted).unwrap();
        let mut direct = SpinorField::zeros(p, 64).unwrap();
        for s in 0..=12u64 {
            direct = direct
                .add(&evolve_steps(f.slice_at_step(s).unwrap(), 12 - s).field)
                .unwrap();
        }
        assert!(l2_norm(&rec.sub(&direct).unwrap()) < 1e-12 * l2_norm(&direct));

        let c = Complex64::new(0.3, -1.2);
        let combo = SpaceTimeField::new(
            p,
            0,
            f.slices()
                .iter()
                .zip(g.slices())
                .map(|(a, b)| a.scale(c).add(b).unwrap())
                .collect(),
        )
        .unwrap();
        let lhs = duhamel(&combo, t, DuhamelWeighting::Unweighted).unwrap();
        let rhs = rec
            .scale(c)
            .add(&duhamel(&g, t, DuhamelWeighting::Unweighted).unwrap())
            .unwrap();
        assert!(l2_norm(&lhs.sub(&rhs).unwrap()) < 1e-12 * l2_norm(&rhs));

        let w = duhamel(&f, t, DuhamelWeighting::Weighted).unwrap();
        assert!(l2_norm(&w.sub(&rec.scale(0.25.into())).unwrap()) < 1e-13 * l2_norm(&rec));
    }

    #[test]
    fn homogeneous_energy_pair_is_exactly_one() {
        let p = params(0.5, 1.0);
        let u = make_state(
            StateKind::Gaussian {
                width: 4.0,
                carrier: 0.3,
            },
            p,
            1024,
        )
        .unwrap();
        let r = homogeneous_ratio(&u, AdmissiblePair::energy(), 64.0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12);
        assert!(r.wrap_ok);
    }

    #[test]
    fn homogeneous_ratio_properties() {
        let p = params(1.0, 1.0);
        let pair = AdmissiblePair::discrete(Exponent::Finite(6.0), Exponent::Infinite).unwrap();
        let u = make_state(
            StateKind::Gaussian {
                width: 4.0,
                carrier: 0.0,
            },
            p,
            2048,
        )
        .unwrap();
        let mut prev = 0.0;
        for t in [0.0, 8.0, 64.0, 256.0] {
            let r = homogeneous_ratio(&u, pair, t).unwrap();
            assert!(r.ratio >= prev);
            prev = r.ratio;
        }
        let a = homogeneous_ratio(&u, pair, 64.0).unwrap();
        let b = homogeneous_ratio(&u.scale(Complex64::new(0.0, -3.0)), pair, 64.0).unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-13 * a.ratio);

        // lhs equals the mixed norm of the stored trajectory
        let mut slices = vec![u.clone()];
        for _ in 0..64 {
            slices.push(step(slices.last().unwrap()));
        }
        let f = SpaceTimeField::new(p, 0, slices).unwrap();
        let direct = mixed_norm(&f, NormSpec::new(pair.p, pair.q)).unwrap();
        assert!((direct - a.lhs).abs() < 1e-13 * direct);

        let continuous = AdmissiblePair::new(
            Exponent::Finite(4.0),
            Exponent::Infinite,
            crate::harness::PairKind::Continuous,
        )
        .unwrap();
        assert!(matches!(
            homogeneous_ratio(&u, continuous, 8.0),
            Err(Error::NotAdmissible { .. })
        ));
    }

    #[test]
    fn inhomogeneous_single_slice_reduces_to_homogeneous() {
        let p = params(0.5, 1.0);
        let pair = AdmissiblePair::discrete(Exponent::Finite(6.0), Exponent::Infinite).unwrap();
        let g = make_state(
            StateKind::Random {
                seed: 2,
                radius: Some(8),
            },
            p,
            512,
        )
        .unwrap();
        let steps = 40u64;
        let mut slices = vec![g.clone()];
        slices.extend((0..steps).map(|_| SpinorField::zeros(p, 512).unwrap()));
        let f = SpaceTimeField::new(p, 0, slices).unwrap();
        let r = inhomogeneous_ratio(
            &f,
            pair,
            AdmissiblePair::energy(),
            20.0,
            DuhamelWeighting::Unweighted,
        )
        .unwrap();
        let h = homogeneous_ratio(&g, pair, 20.0).unwrap();
        assert!((r.lhs - h.lhs).abs() < 1e-13 * h.lhs);
    }

    #[test]
    fn inhomogeneous_energy_pairs_obey_triangle_bound() {
        for (delta, weighting, bound) in [
            (1.0, DuhamelWeighting::Unweighted, 1.0),
            (0.5, DuhamelWeighting::Weighted, 1.0),
            (0.5, DuhamelWeighting::Unweighted, 2.0),
        ] {
            let p = params(delta, 1.0);
            let f = random_forcing(p, 256, 32, 9, Some(10)).unwrap();
            let e = AdmissiblePair::energy();
            let r = inhomogeneous_ratio(&f, e, e, 32.0 * delta, weighting).unwrap();
            assert!(
                r.ratio <= bound * (1.0 + 1e-12),
                "delta {delta}: {}",
                r.ratio
            );
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn scalar() -> impl Strategy<Value = Complex64> {
            (0.01f64..100.0, 0.0f64..6.28).prop_map(|(r, th)| Complex64::from_polar(r, th))
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(32))]

            #[test]
            fn ratios_ignore_scaling(seed in any::<u64>(), c in scalar()) {
                let p = params(0.5, 1.0);
                let u = make_state(StateKind::Random { seed, radius: Some(6) }, p, 256).unwrap();
                let v = u.scale(c);
                let pair = AdmissiblePair::discrete(Exponent::Finite(6.0), Exponent::Infinite).unwrap();
                let a = homogeneous_ratio(&u, pair, 8.0).unwrap();
                let b = homogeneous_ratio(&v, pair, 8.0).unwrap();
                prop_assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);
                let a = dispersive_ratio(&u, 1.0, 8.0).unwrap();
                let b = dispersive_ratio(&v, 1.0, 8.0).unwrap();
                prop_assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);
            }

            #[test]
            fn duhamel_is_linear(s1 in any::<u64>(), s2 in any::<u64>(), c in scalar(), steps in 1u64..12) {
                let p = params(0.5, 1.0);
                let f = random_forcing(p, 64, steps, s1, Some(4)).unwrap();
                let g = random_forcing(p, 64, steps, s2, Some(4)).unwrap();
                let combo = SpaceTimeField::new(
                    p,
                    0,
                    f.slices().iter().zip(g.slices()).map(|(a, b)| a.scale(c).add(b).unwrap()).collect(),
                )
                .unwrap();
                let t = steps as f64 * 0.5;
                for w in [DuhamelWeighting::Unweighted, DuhamelWeighting::Weighted] {
                    let lhs = duhamel(&combo, t, w).unwrap();
                    let rhs = duhamel(&f, t, w).unwrap().scale(c).add(&duhamel(&g, t, w).unwrap()).unwrap();
                    prop_assert!(l2_norm(&lhs.sub(&rhs).unwrap()) < 1e-12 * (1.0 + l2_norm(&rhs)));
                }
            }

            #[test]
            fn records_are_bitwise_reproducible(seed in any::<u64>(), lambda in prop::sample::select(vec![0.5, 1.0, 2.0])) {
                let p = params(0.25, 1.0);
                let u = make_state(StateKind::Random { seed, radius: Some(8) }, p, 256).unwrap();
                prop_assert_eq!(dispersive_ratio(&u, lambda, 4.0).unwrap(), dispersive_ratio(&u, lambda, 4.0).unwrap());
                let f = random_forcing(p, 128, 8, seed, Some(4)).unwrap();
                prop_assert_eq!(f, random_forcing(p, 128, 8, seed, Some(4)).unwrap());
            }
        }
    }
}
