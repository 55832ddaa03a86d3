//! Coin, shift and the one-step walk `U = S·C`, stepped directly in position space.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{support_radius, Spinor, SpinorField, WalkParams};

/// The coin e^{-iδmσ₁}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoinMatrix {
    pub entries: [[Complex64; 2]; 2],
}

impl CoinMatrix {
    pub fn new(params: WalkParams) -> Self {
        let (s, c) = params.coin_angle().sin_cos();
        let d = Complex64::new(c, 0.0);
        let o = Complex64::new(0.0, -s);
        Self {
            entries: [[d, o], [o, d]],
        }
    }

    #[inline]
    pub fn apply(&self, v: &Spinor) -> Spinor {
        let e = &self.entries;
        [
            e[0][0] * v[0] + e[0][1] * v[1],
            e[1][0] * v[0] + e[1][1] * v[1],
        ]
    }

    pub fn determinant(&self) -> Complex64 {
        let e = &self.entries;
        e[0][0] * e[1][1] - e[0][1] * e[1][0]
    }
}

pub fn coin_apply(u: &SpinorField) -> SpinorField {
    let coin = CoinMatrix::new(u.params());
    let values = u.values().iter().map(|v| coin.apply(v)).collect();
    SpinorField::from_values_unchecked(u.params(), values)
}

/// (Su)(x) = (u₁(x - δ), u₂(x + δ)) with periodic wrap.
pub fn shift_apply(u: &SpinorField) -> SpinorField {
    let n = u.sites();
    let src = u.values();
    let values = (0..n)
        .map(|i| [src[(i + n - 1) % n][0], src[(i + 1) % n][1]])
        .collect();
    SpinorField::from_values_unchecked(u.params(), values)
}

pub fn step(u: &SpinorField) -> SpinorField {
    let mut cur = u.values().to_vec();
    let mut next = cur.clone();
    step_into(&CoinMatrix::new(u.params()), &cur, &mut next);
    std::mem::swap(&mut cur, &mut next);
    SpinorField::from_values_unchecked(u.params(), cur)
}

/// One application of S·C from `src` into `dst`.
#[inline]
pub(crate) fn step_into(coin: &CoinMatrix, src: &[Spinor], dst: &mut [Spinor]) {
    let n = src.len();
    let e = &coin.entries;
    // dst[i].0 = (C src[i-1]).0, dst[i].1 = (C src[i+1]).1
    for i in 0..n {
        let l = &src[if i == 0 { n - 1 } else { i - 1 }];
        let r = &src[if i + 1 == n { 0 } else { i + 1 }];
        dst[i] = [
            e[0][0] * l[0] + e[0][1] * l[1],
            e[1][0] * r[0] + e[1][1] * r[1],
        ];
    }
}

/// Converts a time on δℤ to a step count, rejecting off-grid values.
pub fn time_to_steps(t: f64, delta: f64) -> Result<i64> {
    if !t.is_finite() {
        return Err(Error::TimeGrid { t, delta });
    }
    let n = t / delta;
    let r = n.round();
    if (n - r).abs() > 1e-9 * r.abs().max(1.0) || r.abs() > 9.0e15 {
        return Err(Error::TimeGrid { t, delta });
    }
    Ok(r as i64)
}

/// Result of forward evolution together with the wrap-guard verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Evolved {
    pub field: SpinorField,
    /// `support_radius(u, 0) + t < N·δ/2`: ring evolution equals the infinite-lattice one.
    pub wrap_guard_ok: bool,
}

pub fn wrap_guard(u: &SpinorField, steps: u64) -> bool {
    support_radius(u, 0.0) + steps as f64 * u.delta() < u.half_width()
}

/// U_δ(t)u = U^{t/δ}u for t ∈ δℤ, t ≥ 0.
pub fn evolve(u: &SpinorField, t: f64) -> Result<Evolved> {
    let n = time_to_steps(t, u.delta())?;
    if n < 0 {
        return Err(Error::TimeGrid {
            t,
            delta: u.delta(),
        });
    }
    Ok(evolve_steps(u, n as u64))
}

pub fn evolve_steps(u: &SpinorField, steps: u64) -> Evolved {
    let wrap_guard_ok = wrap_guard(u, steps);
    let mut traj = Trajectory::new(u);
    for _ in 0..steps {
        traj.advance();
    }
    Evolved {
        field: traj.into_field(),
        wrap_guard_ok,
    }
}

/// Reusable double buffer for stepping a field forward one step at a time.
pub struct Trajectory {
    params: WalkParams,
    coin: CoinMatrix,
    cur: Vec<Spinor>,
    next: Vec<Spinor>,
    steps: u64,
}

impl Trajectory {
    pub fn new(u: &SpinorField) -> Self {
        Self {
            params: u.params(),
            coin: CoinMatrix::new(u.params()),
            cur: u.values().to_vec(),
            next: u.values().to_vec(),
            steps: 0,
        }
    }

    pub fn advance(&mut self) {
        step_into(&self.coin, &self.cur, &mut self.next);
        std::mem::swap(&mut self.cur, &mut self.next);
        self.steps += 1;
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn values(&self) -> &[Spinor] {
        &self.cur
    }

    /// Adds `f` pointwise to the current state.
    pub fn add(&mut self, f: &SpinorField) {
        for (a, b) in self.cur.iter_mut().zip(f.values()) {
            a[0] += b[0];
            a[1] += b[1];
        }
    }

    pub fn field(&self) -> SpinorField {
        SpinorField::from_values_unchecked(self.params, self.cur.clone())
    }

    pub fn into_field(self) -> SpinorField {
        SpinorField::from_values_unchecked(self.params, self.cur)
    }
}
