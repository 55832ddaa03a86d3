//! The oscillatory kernels I_s(t, x) = (1/2π)∫ e^{i(s p(ξ) t + xξ)} Q_s(ξ) ψ_λ(ξ) dξ
//! and their use as convolution kernels for U(t)P_λ.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{Spinor, SpinorField, WalkParams, ZERO_SPINOR};
use crate::mat2::{self, Mat2};
use crate::multiplier::psi_lambda;
use crate::spectral::{symbol_projectors, FrequencyGrid};
use crate::walk::time_to_steps;

pub const DEFAULT_REFINEMENT: usize = 8;

/// Eigenphase branch e^{±iδp}.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub const BOTH: [Branch; 2] = [Branch::Plus, Branch::Minus];

    pub fn sign(self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

/// Quadrature nodes of one kernel: the refined periodic grid restricted to supp ψ_λ.
#[derive(Clone, Debug)]
pub struct KernelNodes {
    branch: Branch,
    weight: f64,
    xi: Vec<f64>,
    p: Vec<f64>,
    /// Q_s(ξ)ψ_λ(ξ) at each node.
    amp: Vec<Mat2>,
}

impl KernelNodes {
    /// Nodes ξ_k = 2πk/(Mδ), k = -M/2..M/2-1; the trapezoid rule on a periodic
    /// integrand reduces to the equal-weight sum.
    pub fn new(params: WalkParams, lambda: f64, branch: Branch, nodes: usize) -> Result<Self> {
        let delta = params.delta();
        if !(lambda > 0.0 && lambda < 2.0 * PI / delta) {
            return Err(Error::InvalidParameter(format!(
                "lambda = {lambda} outside (0, 2*pi/delta)"
            )));
        }
        let fine = FrequencyGrid::new(params, nodes)?;
        let mut out = Self {
            branch,
            weight: fine.spacing() / (2.0 * PI),
            xi: vec![],
            p: vec![],
            amp: vec![],
        };
        for l in 0..nodes {
            let xi = fine.xi(l);
            let psi = psi_lambda(xi, lambda, delta);
            if psi == 0.0 {
                continue;
            }
            let sym = symbol_projectors(xi, params).ok_or(Error::DegenerateSymbol {
                k: fine.k_of_index(l),
                xi,
            })?;
            let q = match branch {
                Branch::Plus => sym.q_plus,
                Branch::Minus => sym.q_minus,
            };
            out.xi.push(xi);
            out.p.push(sym.p);
            out.amp.push(mat2::scale(&q, psi.into()));
        }
        Ok(out)
    }

    pub fn len(&self) -> usize {
        self.xi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xi.is_empty()
    }

    pub fn eval(&self, t: f64, x: f64) -> Mat2 {
        let s = self.branch.sign();
        let mut acc = [[Complex64::new(0.0, 0.0); 2]; 2];
        for ((xi, p), a) in self.xi.iter().zip(&self.p).zip(&self.amp) {
            let e = Complex64::from_polar(1.0, s * p * t + x * xi);
            for (row, arow) in acc.iter_mut().zip(a) {
                for (c, v) in row.iter_mut().zip(arow) {
                    *c += e * v;
                }
            }
        }
        mat2::scale(&acc, self.weight.into())
    }
}

/// I_s(t, x) by quadrature on `refinement` times the nodes of `grid`.
pub fn kernel_quadrature(
    grid: FrequencyGrid,
    lambda: f64,
    branch: Branch,
    t: f64,
    x: f64,
    refinement: usize,
) -> Result<Mat2> {
    check_refinement(refinement)?;
    Ok(KernelNodes::new(grid.params(), lambda, branch, grid.sites() * refinement)?.eval(t, x))
}

fn check_refinement(r: usize) -> Result<()> {
    if r == 0 || !r.is_power_of_two() {
        return Err(Error::InvalidParameter(format!(
            "refinement {r} is not a power of two"
        )));
    }
    Ok(())
}

/// Kernel of U(t)P_λ on the N-ring at offsets 0, δ, …, (N-1)δ.
///
/// The quadrature kernel lives on a ring r times longer; summing its r images
/// x + jNδ keeps exactly the nodes of the coarse grid, so the result is the
/// ring operator's kernel rather than an approximation of it.
pub fn ring_kernel(
    grid: FrequencyGrid,
    lambda: f64,
    t: f64,
    refinement: usize,
) -> Result<Vec<Mat2>> {
    check_refinement(refinement)?;
    let params = grid.params();
    let n = grid.sites();
    let delta = params.delta();
    let nodes: Vec<KernelNodes> = Branch::BOTH
        .iter()
        .map(|&b| KernelNodes::new(params, lambda, b, n * refinement))
        .collect::<Result<_>>()?;
    Ok((0..n)
        .into_par_iter()
        .map(|j| {
            let mut k = [[Complex64::new(0.0, 0.0); 2]; 2];
            for image in 0..refinement {
                let x = (j + image * n) as f64 * delta;
                for nd in &nodes {
                    k = mat2::add(&k, &nd.eval(t, x));
                }
            }
            k
        })
        .collect())
}

/// Σ_s I_s * u with (I * u)(x) = δ Σ_y I(x - y)u(y) on the ring.
pub fn kernel_convolve(
    u: &SpinorField,
    lambda: f64,
    t: f64,
    refinement: usize,
) -> Result<SpinorField> {
    time_to_steps(t, u.delta())?;
    let grid = FrequencyGrid::of(u);
    let kernel = ring_kernel(grid, lambda, t, refinement)?;
    let n = u.sites();
    let delta = u.delta();
    let src = u.values();
    let values: Vec<Spinor> = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut acc = ZERO_SPINOR;
            for (b, v) in src.iter().enumerate() {
                let w = mat2::apply(&kernel[(a + n - b) % n], v);
                acc[0] += w[0];
                acc[1] += w[1];
            }
            [acc[0] * delta, acc[1] * delta]
        })
        .collect();
    SpinorField::from_values(u.params(), values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{l2_norm, make_state, StateKind};
    use crate::multiplier::littlewood_paley;
    use crate::walk::evolve_steps;

    fn params(d: f64) -> WalkParams {
        WalkParams::new(d, 1.0).unwrap()
    }

    #[test]
    fn kernel_at_origin_integrates_the_bump() {
        for (d, lambda) in [(1.0, 1.0), (0.5, 2.0), (0.25, 0.5)] {
            let grid = FrequencyGrid::new(params(d), 256).unwrap();
            let sum = mat2::add(
                &kernel_quadrature(grid, lambda, Branch::Plus, 0.0, 0.0, 8).unwrap(),
                &kernel_quadrature(grid, lambda, Branch::Minus, 0.0, 0.0, 8).unwrap(),
            );
            // midpoint rule on a much finer grid, independent of the node layout above
            let m = 1 << 20;
            let h = 2.0 * PI / d / m as f64;
            let integral: f64 = (0..m)
                .map(|k| psi_lambda(-PI / d + (k as f64 + 0.5) * h, lambda, d))
                .sum::<f64>()
                * h;
            let want = integral / (2.0 * PI);
            assert!(
                (sum[0][0].re - want).abs() < 1e-9,
                "{} vs {want}",
                sum[0][0].re
            );
            assert!((sum[1][1].re - want).abs() < 1e-9);
            assert!(sum[0][1].norm() < 1e-12 && sum[1][0].norm() < 1e-12);
            assert!(sum[0][0].im.abs() < 1e-12);
        }
    }

    #[test]
    fn ring_kernel_matches_multiplier_on_an_impulse() {
        let p = params(0.5);
        let n = 64;
        let u = make_state(StateKind::Impulse { site: 0 }, p, n).unwrap();
        let grid = FrequencyGrid::of(&u);
        let k = ring_kernel(grid, 1.0, 0.0, 4).unwrap();
        let pu = littlewood_paley(&u, 1.0).unwrap().field;
        for j in 0..n as i64 {
            let got = k[j as usize][0][0] * 0.5;
            assert!((got - pu.at_site(j)[0]).norm() < 1e-13);
        }
    }

    #[test]
    fn convolution_reproduces_projected_evolution() {
        let p = params(1.0);
        let u = make_state(
            StateKind::Random {
                seed: 11,
                radius: Some(20),
            },
            p,
            256,
        )
        .unwrap();
        let steps = 32;
        let want = evolve_steps(&littlewood_paley(&u, 1.0).unwrap().field, steps).field;
        let got = kernel_convolve(&u, 1.0, steps as f64, DEFAULT_REFINEMENT).unwrap();
        assert!(l2_norm(&got.sub(&want).unwrap()) < 1e-8 * l2_norm(&u));
    }

    #[test]
    fn reversing_time_gives_the_adjoint_kernel() {
        let grid = FrequencyGrid::new(params(0.5), 128).unwrap();
        for (t, x) in [(4.0, 1.5), (16.0, -3.0), (2.5, 0.0)] {
            let total = |t: f64, x: f64| {
                Branch::BOTH
                    .iter()
                    .fold([[Complex64::new(0.0, 0.0); 2]; 2], |acc, &b| {
                        mat2::add(&acc, &kernel_quadrature(grid, 2.0, b, t, x, 8).unwrap())
                    })
            };
            let back = total(-t, x);
            let fwd = mat2::adjoint(&total(t, -x));
            assert!(mat2::max_abs(&mat2::sub(&back, &fwd)) < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_input() {
        let grid = FrequencyGrid::new(params(1.0), 64).unwrap();
        assert!(kernel_quadrature(grid, 7.0, Branch::Plus, 0.0, 0.0, 8).is_err());
        assert!(kernel_quadrature(grid, 1.0, Branch::Plus, 0.0, 0.0, 3).is_err());
        let massless = FrequencyGrid::new(WalkParams::new(1.0, 0.0).unwrap(), 64).unwrap();
        assert!(matches!(
            kernel_quadrature(massless, 3.0, Branch::Plus, 0.0, 0.0, 8),
            Err(Error::DegenerateSymbol { .. })
        ));
    }
}
