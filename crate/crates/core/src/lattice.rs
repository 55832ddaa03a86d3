//! Spinor fields on a periodic window of the lattice δℤ and their norms.
//!
//! The infinite lattice is represented by a ring of `N` sites (a power of two)
//! indexed by `j = -N/2 .. N/2 - 1`, so site `j` sits at `x = j·δ`. Storage is
//! in natural order: array index `i = j + N/2`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A value of ℂ², the fibre of a spinor field.
pub type Spinor = [Complex64; 2];

pub const ZERO_SPINOR: Spinor = [Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)];

/// Default ring size, 2¹⁴ sites.
pub const DEFAULT_SITES: usize = 1 << 14;

/// Euclidean norm of a spinor, without underflow for tiny entries.
#[inline]
pub fn spinor_norm(v: &Spinor) -> f64 {
    v[0].norm().hypot(v[1].norm())
}

/// Lattice width and coin mass.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WalkParams {
    delta: f64,
    mass: f64,
}

impl WalkParams {
    pub fn new(delta: f64, mass: f64) -> Result<Self> {
        if !(delta.is_finite() && delta > 0.0 && delta <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1], got {delta}"
            )));
        }
        if !mass.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "mass must be finite, got {mass}"
            )));
        }
        Ok(Self { delta, mass })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// The coin angle δm.
    pub fn coin_angle(&self) -> f64 {
        self.delta * self.mass
    }

    /// Whether δ|m| lies in the open window (0, π/2) used by every estimate run.
    pub fn in_mass_window(&self) -> bool {
        let a = self.coin_angle().abs();
        a > 0.0 && a < FRAC_PI_2
    }

    pub fn require_mass_window(&self) -> Result<()> {
        if self.in_mass_window() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "delta*|mass| = {} outside (0, pi/2)",
                self.coin_angle().abs()
            )))
        }
    }
}

/// Extended real exponent in [1, ∞].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinite,
}

impl Exponent {
    pub fn finite(v: f64) -> Result<Self> {
        if v.is_nan() || v < 1.0 {
            return Err(Error::InvalidParameter(format!(
                "exponent must be in [1, inf], got {v}"
            )));
        }
        if v.is_infinite() {
            Ok(Exponent::Infinite)
        } else {
            Ok(Exponent::Finite(v))
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinite)
    }

    /// 1/p with 1/∞ = 0.
    pub fn recip(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => 1.0 / p,
            Exponent::Infinite => 0.0,
        }
    }

    /// Hölder conjugate p′ with 1/p + 1/p′ = 1.
    pub fn conjugate(&self) -> Exponent {
        match *self {
            Exponent::Infinite => Exponent::Finite(1.0),
            Exponent::Finite(1.0) => Exponent::Infinite,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Exponent::Finite(p) => p,
            Exponent::Infinite => f64::INFINITY,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Finite(p) => write!(f, "{p}"),
            Exponent::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        match t.to_ascii_lowercase().as_str() {
            "inf" | "infinity" | "+inf" | "∞" => Ok(Exponent::Infinite),
            _ => {
                let v: f64 = t
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("not an exponent: {t:?}")))?;
                Exponent::finite(v)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match *self {
            Exponent::Finite(p) => s.serialize_f64(p),
            Exponent::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Exponent::finite(v).map_err(serde::de::Error::custom),
            Raw::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Exponents (p, q) of a mixed space-time norm l^p_δ l^q_δ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormSpec {
    pub p: Exponent,
    pub q: Exponent,
}

impl NormSpec {
    pub fn new(p: Exponent, q: Exponent) -> Self {
        Self { p, q }
    }
}

/// A ℂ²-valued function on a periodic ring of `N` lattice sites.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinorField {
    params: WalkParams,
    values: Vec<Spinor>,
}

fn check_ring_size(n: usize) -> Result<()> {
    if n < 2 || !n.is_power_of_two() {
        return Err(Error::InvalidField(format!(
            "ring size must be a power of two >= 2, got {n}"
        )));
    }
    Ok(())
}

impl SpinorField {
    pub fn zeros(params: WalkParams, sites: usize) -> Result<Self> {
        check_ring_size(sites)?;
        Ok(Self {
            params,
            values: vec![ZERO_SPINOR; sites],
        })
    }

    /// Builds a field from values in natural order (`values[i]` lives at site `i - N/2`).
    pub fn from_values(params: WalkParams, values: Vec<Spinor>) -> Result<Self> {
        check_ring_size(values.len())?;
        if let Some(i) = values.iter().position(|v| {
            !(v[0].re.is_finite()
                && v[0].im.is_finite()
                && v[1].re.is_finite()
                && v[1].im.is_finite())
        }) {
            return Err(Error::InvalidField(format!(
                "non-finite entry at index {i}"
            )));
        }
        Ok(Self { params, values })
    }

    /// Builds a field whose finiteness the caller already guarantees.
    pub(crate) fn from_values_unchecked(params: WalkParams, values: Vec<Spinor>) -> Self {
        debug_assert!(values.len().is_power_of_two());
        Self { params, values }
    }

    pub fn params(&self) -> WalkParams {
        self.params
    }

    pub fn delta(&self) -> f64 {
        self.params.delta
    }

    pub fn sites(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[Spinor] {
        &self.values
    }

    pub fn into_values(self) -> Vec<Spinor> {
        self.values
    }

    /// Lattice index `j` of storage slot `i`.
    #[inline]
    pub fn site_of_index(&self, i: usize) -> i64 {
        i as i64 - (self.sites() / 2) as i64
    }

    /// Storage slot of lattice index `j`, wrapping around the ring.
    #[inline]
    pub fn index_of_site(&self, j: i64) -> usize {
        let n = self.sites() as i64;
        (j + n / 2).rem_euclid(n) as usize
    }

    pub fn position(&self, i: usize) -> f64 {
        self.site_of_index(i) as f64 * self.params.delta
    }

    pub fn at_site(&self, j: i64) -> Spinor {
        self.values[self.index_of_site(j)]
    }

    /// Radius of the ring, N·δ/2.
    pub fn half_width(&self) -> f64 {
        self.sites() as f64 * self.params.delta / 2.0
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| {
            v[0].re.is_finite() && v[0].im.is_finite() && v[1].re.is_finite() && v[1].im.is_finite()
        })
    }

    pub fn scale(&self, c: Complex64) -> SpinorField {
        let values = self.values.iter().map(|v| [v[0] * c, v[1] * c]).collect();
        SpinorField::from_values_unchecked(self.params, values)
    }

    pub fn add(&self, other: &SpinorField) -> Result<SpinorField> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| [a[0] + b[0], a[1] + b[1]])
            .collect();
        Ok(SpinorField::from_values_unchecked(self.params, values))
    }

    pub fn sub(&self, other: &SpinorField) -> Result<SpinorField> {
        self.check_compatible(other)?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| [a[0] - b[0], a[1] - b[1]])
            .collect();
        Ok(SpinorField::from_values_unchecked(self.params, values))
    }

    /// Translation by `k` sites: the result at `j` is the input at `j - k`.
    pub fn translate(&self, k: i64) -> SpinorField {
        let n = self.sites();
        let shift = k.rem_euclid(n as i64) as usize;
        let mut values = self.values.clone();
        values.rotate_right(shift);
        SpinorField::from_values_unchecked(self.params, values)
    }

    pub fn check_compatible(&self, other: &SpinorField) -> Result<()> {
        if self.sites() != other.sites() || self.params != other.params {
            return Err(Error::Shape(format!(
                "fields differ: N = {} vs {}, params {:?} vs {:?}",
                self.sites(),
                other.sites(),
                self.params,
                other.params
            )));
        }
        Ok(())
    }
}

/// The weighted lattice norm (δ Σ_x ‖u(x)‖^p)^{1/p}; the max over sites for p = ∞.
pub fn field_norm(u: &SpinorField, p: Exponent) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::InvalidField("non-finite entries".into()));
    }
    Ok(field_norm_unchecked(u, p))
}

pub(crate) fn field_norm_unchecked(u: &SpinorField, p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => u.values.iter().map(spinor_norm).fold(0.0, f64::max),
        Exponent::Finite(2.0) => {
            let s: f64 = u
                .values
                .iter()
                .map(|v| v[0].norm_sqr() + v[1].norm_sqr())
                .sum();
            (u.delta() * s).sqrt()
        }
        Exponent::Finite(1.0) => u.delta() * u.values.iter().map(spinor_norm).sum::<f64>(),
        Exponent::Finite(p) => {
            let s: f64 = u.values.iter().map(|v| spinor_norm(v).powf(p)).sum();
            (u.delta() * s).powf(1.0 / p)
        }
    }
}

/// The l²_δ norm.
pub fn l2_norm(u: &SpinorField) -> f64 {
    field_norm_unchecked(u, Exponent::Finite(2.0))
}

/// Slices of a field on a contiguous window of times `t = (start + k)·δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceTimeField {
    params: WalkParams,
    start_step: u64,
    slices: Vec<SpinorField>,
}

impl SpaceTimeField {
    pub fn new(params: WalkParams, start_step: u64, slices: Vec<SpinorField>) -> Result<Self> {
        if let Some(first) = slices.first() {
            for s in &slices {
                if s.params != params || s.sites() != first.sites() {
                    return Err(Error::Shape(
                        "slices must share params and ring size".into(),
                    ));
                }
            }
        }
        Ok(Self {
            params,
            start_step,
            slices,
        })
    }

    pub fn params(&self) -> WalkParams {
        self.params
    }

    pub fn start_step(&self) -> u64 {
        self.start_step
    }

    pub fn slices(&self) -> &[SpinorField] {
        &self.slices
    }

    pub fn len(&self) -> usize {
        self.slices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slices.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.slices.len() as u64)
            .map(|k| (self.start_step + k) as f64 * self.params.delta)
            .collect()
    }

    /// Slice at step index `n` (time `n·δ`), if present.
    pub fn slice_at_step(&self, n: u64) -> Option<&SpinorField> {
        n.checked_sub(self.start_step)
            .and_then(|k| self.slices.get(k as usize))
    }
}

/// (Σ_t δ (Σ_x δ ‖f(t,x)‖^q)^{p/q})^{1/p}, with max for infinite exponents.
pub fn mixed_norm(f: &SpaceTimeField, spec: NormSpec) -> Result<f64> {
    if f.is_empty() {
        return Err(Error::EmptyWindow);
    }
    let mut inner = Vec::with_capacity(f.len());
    for s in &f.slices {
        inner.push(field_norm(s, spec.q)?);
    }
    Ok(time_norm(&inner, f.params.delta, spec.p))
}

/// Weighted l^p over time of per-slice norms.
pub fn time_norm(slice_norms: &[f64], delta: f64, p: Exponent) -> f64 {
    match p {
        Exponent::Infinite => slice_norms.iter().copied().fold(0.0, f64::max),
        Exponent::Finite(p) => {
            let s: f64 = slice_norms.iter().map(|v| v.powf(p)).sum();
            (delta * s).powf(1.0 / p)
        }
    }
}

/// Initial-state recipes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StateKind {
    /// (1, 0) at lattice index `site`.
    Impulse { site: i64 },
    /// e^{-x²/(2w²)} e^{iξ₀x}·(1, 0).
    Gaussian { width: f64, carrier: f64 },
    /// Independent uniform entries in the unit square for both components on
    /// `|j| <= radius` (the whole ring when `radius` is `None`).
    Random { seed: u64, radius: Option<usize> },
}

pub fn make_state(kind: StateKind, params: WalkParams, sites: usize) -> Result<SpinorField> {
    let mut u = SpinorField::zeros(params, sites)?;
    match kind {
        StateKind::Impulse { site } => {
            let i = u.index_of_site(site);
            u.values[i] = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)];
        }
        StateKind::Gaussian { width, carrier } => {
            if !(width.is_finite() && width > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "width must be positive, got {width}"
                )));
            }
            if !carrier.is_finite() {
                return Err(Error::InvalidParameter("carrier must be finite".into()));
            }
            for i in 0..sites {
                let x = u.position(i);
                let amp = (-x * x / (2.0 * width * width)).exp();
                u.values[i][0] = Complex64::from_polar(amp, carrier * x);
            }
        }
        StateKind::Random { seed, radius } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let r = radius.map(|r| r as i64).unwrap_or(i64::MAX);
            for i in 0..sites {
                let j = u.site_of_index(i);
                // Draw for every site so the stream does not depend on the radius cut.
                let v = [
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                ];
                if j.abs() <= r {
                    u.values[i] = v;
                }
            }
        }
    }
    Ok(u)
}

/// max |x| over sites where ‖u(x)‖ > tol; 0 for a field with no such site.
pub fn support_radius(u: &SpinorField, tol: f64) -> f64 {
    let mut best = 0i64;
    for (i, v) in u.values.iter().enumerate() {
        if spinor_norm(v) > tol {
            best = best.max(u.site_of_index(i).abs());
        }
    }
    best as f64 * u.delta()
}
