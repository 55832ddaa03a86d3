//! Fourier multipliers on the ring: the dyadic bump, Littlewood–Paley
//! projections `P_λ` with companions `P̃_λ`, and the weights |D|^a⟨D⟩^b.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, RwLock};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::SpinorField;
use crate::spectral::{forward_transform, inverse_transform, FrequencyGrid};

#[inline]
fn smooth_g(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth step h(s) = g(s)/(g(s) + g(1-s)), g(s) = e^{-1/s} for s > 0.
#[inline]
pub fn smooth_step(s: f64) -> f64 {
    let a = smooth_g(s);
    let b = smooth_g(1.0 - s);
    a / (a + b)
}

/// φ = 1 on [-1, 1], 0 outside (-2, 2), h(2 - |x|) in between.
#[inline]
pub fn bump_phi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a >= 2.0 {
        0.0
    } else {
        smooth_step(2.0 - a)
    }
}

/// ψ(x) = φ(x) - φ(2x), supported in 1/2 ≤ |x| ≤ 2.
#[inline]
pub fn bump_psi(x: f64) -> f64 {
    bump_phi(x) - bump_phi(2.0 * x)
}

/// ψ̃(x) = φ(x/2) - φ(4x): equal to 1 on supp ψ and zero for |x| ≤ 1/4.
#[inline]
pub fn bump_psi_tilde(x: f64) -> f64 {
    bump_phi(x / 2.0) - bump_phi(4.0 * x)
}

fn in_band(xi: f64, delta: f64) -> bool {
    xi.abs() <= std::f64::consts::PI / delta
}

/// ψ_{δ,λ}(ξ) = ψ(ξ/λ) on [-π/δ, π/δ], zero outside.
pub fn psi_lambda(xi: f64, lambda: f64, delta: f64) -> f64 {
    if in_band(xi, delta) {
        bump_psi(xi / lambda)
    } else {
        0.0
    }
}

pub fn psi_tilde_lambda(xi: f64, lambda: f64, delta: f64) -> f64 {
    if in_band(xi, delta) {
        bump_psi_tilde(xi / lambda)
    } else {
        0.0
    }
}

/// Scalar symbol sampled on a frequency grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Multiplier {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl Multiplier {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.sites() {
            return Err(Error::Shape(format!(
                "{} symbol samples for a grid of {}",
                values.len(),
                grid.sites()
            )));
        }
        if values
            .iter()
            .any(|z| !(z.re.is_finite() && z.im.is_finite()))
        {
            return Err(Error::InvalidField("non-finite symbol samples".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: FrequencyGrid, f: impl Fn(f64) -> Complex64) -> Self {
        let values = (0..grid.sites()).map(|l| f(grid.xi(l))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: FrequencyGrid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |xi| Complex64::new(f(xi), 0.0))
    }

    pub fn littlewood_paley(grid: FrequencyGrid, lambda: f64) -> Self {
        let delta = grid.params().delta();
        Self::from_real_fn(grid, |xi| psi_lambda(xi, lambda, delta))
    }

    pub fn companion(grid: FrequencyGrid, lambda: f64) -> Self {
        let delta = grid.params().delta();
        Self::from_real_fn(grid, |xi| psi_tilde_lambda(xi, lambda, delta))
    }

    /// |ξ|^a ⟨ξ⟩^b; at ξ = 0 the value is 1 when a = 0 and 0 otherwise.
    pub fn fractional(grid: FrequencyGrid, a: f64, b: f64) -> Self {
        Self::from_real_fn(grid, |xi| {
            let radial = if xi == 0.0 {
                if a == 0.0 {
                    1.0
                } else {
                    0.0
                }
            } else {
                xi.abs().powf(a)
            };
            radial * (1.0 + xi * xi).powf(b / 2.0)
        })
    }

    pub fn grid(&self) -> FrequencyGrid {
        self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Pointwise product m₁·m₂.
    pub fn compose(&self, other: &Multiplier) -> Result<Multiplier> {
        if self.grid != other.grid {
            return Err(Error::Shape("multipliers live on different grids".into()));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        Ok(Multiplier {
            grid: self.grid,
            values,
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "k,xi,re,im")?;
        for (l, z) in self.values.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                self.grid.k_of_index(l),
                self.grid.xi(l),
                z.re,
                z.im
            )?;
        }
        Ok(())
    }
}

/// p(D_δ)u = F_δ⁻¹(p·F_δu).
pub fn apply_multiplier(u: &SpinorField, m: &Multiplier) -> Result<SpinorField> {
    if FrequencyGrid::of(u) != m.grid {
        return Err(Error::Shape(format!(
            "field grid (N = {}, delta = {}) does not match multiplier grid (N = {}, delta = {})",
            u.sites(),
            u.delta(),
            m.grid.sites(),
            m.grid.params().delta()
        )));
    }
    let mut v = forward_transform(u);
    for (s, z) in v.values_mut().iter_mut().zip(&m.values) {
        s[0] *= z;
        s[1] *= z;
    }
    Ok(inverse_transform(&v))
}

/// Output of a projection; `vanished` is set when λ ≥ 2π/δ forces P_λ = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct Projected {
    pub field: SpinorField,
    pub vanished: bool,
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "lambda must be positive, got {lambda}"
        )));
    }
    Ok(())
}

fn vanishes(lambda: f64, delta: f64) -> bool {
    lambda >= 2.0 * std::f64::consts::PI / delta
}

/// P_λu.
pub fn littlewood_paley(u: &SpinorField, lambda: f64) -> Result<Projected> {
    check_lambda(lambda)?;
    if vanishes(lambda, u.delta()) {
        return Ok(Projected {
            field: SpinorField::zeros(u.params(), u.sites())?,
            vanished: true,
        });
    }
    let m = global_cache().get(
        FrequencyGrid::of(u),
        MultiplierKind::LittlewoodPaley(lambda),
    );
    Ok(Projected {
        field: apply_multiplier(u, &m)?,
        vanished: false,
    })
}

/// P̃_λu.
pub fn companion_projection(u: &SpinorField, lambda: f64) -> Result<SpinorField> {
    check_lambda(lambda)?;
    let m = global_cache().get(FrequencyGrid::of(u), MultiplierKind::Companion(lambda));
    apply_multiplier(u, &m)
}

/// |D_δ|^a ⟨D_δ⟩^b u.
pub fn fractional_weight(u: &SpinorField, a: f64, b: f64) -> Result<SpinorField> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidParameter(
            "fractional exponents must be finite".into(),
        ));
    }
    if a < 0.0 {
        let v = forward_transform(u);
        let zero = v.grid().sites() / 2;
        let scale = v
            .values()
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let z0 = v.values()[zero];
        if z0[0].norm().max(z0[1].norm()) > 1e-12 * scale {
            return Err(Error::AnnihilatorInverse);
        }
    }
    let m = global_cache().get(FrequencyGrid::of(u), MultiplierKind::Fractional(a, b));
    apply_multiplier(u, &m)
}

/// Dyadic λ_j = 2^j with 2^{j_min} at or below the smallest nonzero |ξ_k| and
/// 2^{j_max} at or above π/δ, so that Σ_j ψ(ξ/λ_j) = 1 on every nonzero grid frequency.
pub fn dyadic_ladder(grid: FrequencyGrid) -> Vec<f64> {
    let lo = grid.spacing().log2().floor() as i32;
    let hi = (std::f64::consts::PI / grid.params().delta()).log2().ceil() as i32;
    (lo..=hi).map(|j| 2f64.powi(j)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MultiplierKind {
    LittlewoodPaley(f64),
    Companion(f64),
    Fractional(f64, f64),
}

impl MultiplierKind {
    pub fn build(&self, grid: FrequencyGrid) -> Multiplier {
        match *self {
            MultiplierKind::LittlewoodPaley(l) => Multiplier::littlewood_paley(grid, l),
            MultiplierKind::Companion(l) => Multiplier::companion(grid, l),
            MultiplierKind::Fractional(a, b) => Multiplier::fractional(grid, a, b),
        }
    }

    fn key(&self) -> (u8, u64, u64) {
        match *self {
            MultiplierKind::LittlewoodPaley(l) => (0, l.to_bits(), 0),
            MultiplierKind::Companion(l) => (1, l.to_bits(), 0),
            MultiplierKind::Fractional(a, b) => (2, a.to_bits(), b.to_bits()),
        }
    }
}

type CacheKey = (usize, u64, (u8, u64, u64));

/// Read-mostly table of symbol samples keyed by (grid, kind).
#[derive(Default)]
pub struct MultiplierCache {
    table: RwLock<HashMap<CacheKey, Arc<Multiplier>>>,
}

impl MultiplierCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, grid: FrequencyGrid, kind: MultiplierKind) -> Arc<Multiplier> {
        // Symbols depend on δ and N only, not on the mass.
        let key = (grid.sites(), grid.params().delta().to_bits(), kind.key());
        if let Some(m) = self
            .table
            .read()
            .expect("multiplier cache poisoned")
            .get(&key)
        {
            if m.grid == grid {
                return Arc::clone(m);
            }
            return Arc::new(Multiplier {
                grid,
                values: m.values.clone(),
            });
        }
        let built = Arc::new(kind.build(grid));
        let mut table = self.table.write().expect("multiplier cache poisoned");
        let stored = table.entry(key).or_insert_with(|| Arc::clone(&built));
        if stored.grid == grid {
            Arc::clone(stored)
        } else {
            built
        }
    }

    pub fn len(&self) -> usize {
        self.table.read().expect("multiplier cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn global_cache() -> &'static MultiplierCache {
    static CACHE: std::sync::OnceLock<MultiplierCache> = std::sync::OnceLock::new();
    CACHE.get_or_init(MultiplierCache::new)
}
