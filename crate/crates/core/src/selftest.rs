//! A fast battery of independent oracles run by `qwalk selftest`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::harness::{
    admissible_check, duhamel, homogeneous_ratio, inhomogeneous_ratio, kernel_convolve,
    random_forcing, AdmissiblePair, DuhamelWeighting, PairKind,
};
use crate::lattice::{
    l2_norm, make_state, support_radius, Exponent, SpinorField, StateKind, WalkParams,
};
use crate::mat2;
use crate::multiplier::{
    apply_multiplier, companion_projection, dyadic_ladder, littlewood_paley, Multiplier,
};
use crate::spectral::{
    dispersion, dispersion_derivatives, forward_transform, locate_degeneracies, spectral_decompose,
    spectral_evolve, FrequencyGrid,
};
use crate::walk::{evolve_steps, Trajectory};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Check = fn() -> Result<String, String>;

fn within(what: &str, err: f64, tol: f64) -> Result<String, String> {
    if err < tol {
        Ok(format!("{what} = {err:.3e} < {tol:e}"))
    } else {
        Err(format!("{what} = {err:.3e} >= {tol:e}"))
    }
}

fn p(delta: f64, mass: f64) -> WalkParams {
    WalkParams::new(delta, mass).expect("valid selftest parameters")
}

fn random(params: WalkParams, n: usize, seed: u64, radius: Option<usize>) -> SpinorField {
    make_state(StateKind::Random { seed, radius }, params, n).expect("valid selftest state")
}

fn fft_vs_dft() -> Result<String, String> {
    let u = random(p(0.5, 1.0), 32, 1, None);
    let fast = forward_transform(&u);
    let grid = fast.grid();
    let mut err: f64 = 0.0;
    for (l, got) in fast.values().iter().enumerate() {
        let xi = grid.xi(l);
        let mut acc = [Complex64::new(0.0, 0.0); 2];
        for (i, v) in u.values().iter().enumerate() {
            let e = Complex64::from_polar(1.0, -u.position(i) * xi);
            acc[0] += e * v[0];
            acc[1] += e * v[1];
        }
        let s = u.delta() / (2.0 * PI).sqrt();
        err = err
            .max((acc[0] * s - got[0]).norm())
            .max((acc[1] * s - got[1]).norm());
    }
    within("max |fft - dft|", err, 1e-12)
}

fn stepping_vs_spectral() -> Result<String, String> {
    let mut worst: f64 = 0.0;
    for d in [1.0, 0.5, 0.25] {
        let u = random(p(d, 1.0), 512, 2, Some(32));
        let a = evolve_steps(&u, 100).field;
        let b = spectral_evolve(&u, 100.0 * d).map_err(|e| e.to_string())?;
        worst = worst.max(l2_norm(&a.sub(&b).unwrap()) / l2_norm(&u));
    }
    within("relative l2 gap", worst, 1e-10)
}

fn unitarity_and_cone() -> Result<String, String> {
    let imp = make_state(StateKind::Impulse { site: 0 }, p(0.5, 1.0), 1024).unwrap();
    let mut traj = Trajectory::new(&imp);
    for n in 1..=200u64 {
        traj.advance();
        let f = traj.field();
        if (l2_norm(&f) - l2_norm(&imp)).abs() > 1e-12 {
            return Err(format!("norm drift at step {n}"));
        }
        let r = support_radius(&f, 0.0) / 0.5;
        if r != n as f64 {
            return Err(format!("support radius {r} after {n} steps"));
        }
    }
    Ok("200 steps".into())
}

fn dispersion_identity() -> Result<String, String> {
    let mut err: f64 = 0.0;
    for d in [1.0, 0.25, 0.0625] {
        let params = p(d, 1.0);
        let grid = FrequencyGrid::new(params, 4096).unwrap();
        for xi in grid.frequencies() {
            err = err.max(((d * dispersion(xi, params)).cos() - d.cos() * (d * xi).cos()).abs());
        }
    }
    within("max |cos(dp) - cos(dm)cos(dxi)|", err, 1e-13)
}

fn derivatives_vs_differences() -> Result<String, String> {
    let params = p(0.5, 1.0);
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for k in 0..200 {
        let xi = -PI / 0.5 + (k as f64 + 0.37) * (2.0 * PI / 0.5) / 200.0;
        if (xi.abs() - PI).abs() < 1e-2 || xi.abs() < 1e-2 || ((xi * 0.5).abs() - PI).abs() < 1e-2 {
            continue;
        }
        let at = |x: f64| dispersion_derivatives(x, params).map_err(|e| e.to_string());
        let d = at(xi)?;
        let fd1 = (dispersion(xi + h, params) - dispersion(xi - h, params)) / (2.0 * h);
        let fd2 = (at(xi + h)?.first - at(xi - h)?.first) / (2.0 * h);
        let fd3 = (at(xi + h)?.second - at(xi - h)?.second) / (2.0 * h);
        for (c, f) in [(d.first, fd1), (d.second, fd2), (d.third, fd3)] {
            if c.abs() > 1e-3 {
                worst = worst.max((c - f).abs() / c.abs());
            }
        }
    }
    let deg = locate_degeneracies(params).map_err(|e| e.to_string())?;
    if deg.second.len() != 2 || deg.third.len() != 3 {
        return Err("degeneracy count".into());
    }
    within("max relative error", worst, 1e-6)
}

fn projector_algebra() -> Result<String, String> {
    let params = p(0.25, 1.0);
    let dec = spectral_decompose(params, FrequencyGrid::new(params, 1024).unwrap())
        .map_err(|e| e.to_string())?;
    let mut err: f64 = 0.0;
    for (a, b) in dec.q_plus.iter().zip(&dec.q_minus) {
        err = err
            .max(mat2::max_abs(&mat2::sub(&mat2::add(a, b), &mat2::IDENTITY)))
            .max(mat2::max_abs(&mat2::sub(&mat2::mul(a, a), a)))
            .max(mat2::max_abs(&mat2::mul(a, b)));
    }
    within("projector residual", err, 1e-12)
}

fn littlewood_paley_identities() -> Result<String, String> {
    let params = p(0.5, 1.0);
    let u = random(params, 1024, 4, None);
    let pu = littlewood_paley(&u, 1.0).unwrap().field;
    let ppu = companion_projection(&pu, 1.0).unwrap();
    let e1 = l2_norm(&pu.sub(&ppu).unwrap()) / l2_norm(&u);
    // dyadic pieces sum to the identity away from ξ = 0
    let grid = FrequencyGrid::of(&u);
    let mean_free = apply_multiplier(
        &u,
        &Multiplier::from_real_fn(grid, |xi| if xi == 0.0 { 0.0 } else { 1.0 }),
    )
    .unwrap();
    let mut sum = SpinorField::zeros(params, 1024).unwrap();
    for l in dyadic_ladder(grid) {
        sum = sum
            .add(&littlewood_paley(&mean_free, l).unwrap().field)
            .unwrap();
    }
    let e2 = l2_norm(&sum.sub(&mean_free).unwrap()) / l2_norm(&mean_free);
    within("max(P - PP~, reconstruction)", e1.max(e2), 1e-10)
}

fn kernel_representation() -> Result<String, String> {
    let u = random(p(1.0, 1.0), 64, 5, Some(8));
    let want = evolve_steps(&littlewood_paley(&u, 1.0).unwrap().field, 8).field;
    let got = kernel_convolve(&u, 1.0, 8.0, 8).map_err(|e| e.to_string())?;
    within(
        "relative gap",
        l2_norm(&got.sub(&want).unwrap()) / l2_norm(&u),
        1e-8,
    )
}

fn duhamel_direct_sum() -> Result<String, String> {
    let params = p(0.5, 1.0);
    let f = random_forcing(params, 128, 10, 6, Some(6)).map_err(|e| e.to_string())?;
    let rec = duhamel(&f, 5.0, DuhamelWeighting::Unweighted).map_err(|e| e.to_string())?;
    let mut direct = SpinorField::zeros(params, 128).unwrap();
    for s in 0..=10u64 {
        direct = direct
            .add(&evolve_steps(f.slice_at_step(s).unwrap(), 10 - s).field)
            .unwrap();
    }
    within(
        "relative gap",
        l2_norm(&rec.sub(&direct).unwrap()) / l2_norm(&direct),
        1e-12,
    )
}

fn endpoint_ratios() -> Result<String, String> {
    let params = p(1.0, 1.0);
    let u = make_state(
        StateKind::Gaussian {
            width: 4.0,
            carrier: 0.0,
        },
        params,
        1024,
    )
    .unwrap();
    let e = AdmissiblePair::energy();
    let h = homogeneous_ratio(&u, e, 64.0).map_err(|e| e.to_string())?;
    let f = random_forcing(params, 512, 32, 7, Some(10)).map_err(|e| e.to_string())?;
    let i = inhomogeneous_ratio(&f, e, e, 32.0, DuhamelWeighting::Unweighted)
        .map_err(|e| e.to_string())?;
    if i.ratio > 1.0 + 1e-12 {
        return Err(format!("inhomogeneous ratio {}", i.ratio));
    }
    within("|homogeneous ratio - 1|", (h.ratio - 1.0).abs(), 1e-12)
}

fn admissibility() -> Result<String, String> {
    let inf = Exponent::Infinite;
    let f = Exponent::Finite;
    let ok = admissible_check(inf, f(2.0), PairKind::Discrete).admissible
        && admissible_check(f(6.0), inf, PairKind::Discrete).admissible
        && !admissible_check(f(8.0), f(4.0), PairKind::Discrete).admissible
        && admissible_check(f(4.0), inf, PairKind::Continuous).admissible;
    if ok {
        Ok("pair table".into())
    } else {
        Err("pair table".into())
    }
}

const CHECKS: &[(&str, Check)] = &[
    ("fft-vs-dft", fft_vs_dft),
    ("stepping-vs-spectral", stepping_vs_spectral),
    ("unitarity-and-light-cone", unitarity_and_cone),
    ("dispersion-identity", dispersion_identity),
    ("derivatives-vs-differences", derivatives_vs_differences),
    ("projector-algebra", projector_algebra),
    ("littlewood-paley", littlewood_paley_identities),
    ("kernel-representation", kernel_representation),
    ("duhamel-direct-sum", duhamel_direct_sum),
    ("endpoint-ratios", endpoint_ratios),
    ("admissible-pairs", admissibility),
];

pub fn run_selftest() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|&(name, check)| {
            let r = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
            match r {
                Ok(detail) => CheckOutcome {
                    name,
                    passed: true,
                    detail,
                },
                Err(detail) => CheckOutcome {
                    name,
                    passed: false,
                    detail,
                },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    #[test]
    fn battery_passes() {
        for c in super::run_selftest() {
            assert!(c.passed, "{}: {}", c.name, c.detail);
        }
    }
}
