use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lattice::Exponent;

pub const CSV_HEADER: &str =
    "delta,mass,lambda,t_or_T,p,q,ptilde,qtilde,lhs,rhs,ratio,wrap_ok,seed";

/// One measured sample of an estimate's implicit constant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioRecord {
    pub delta: f64,
    pub mass: f64,
    pub lambda: Option<f64>,
    #[serde(rename = "t_or_T")]
    pub t_or_horizon: f64,
    pub p: Option<Exponent>,
    pub q: Option<Exponent>,
    pub ptilde: Option<Exponent>,
    pub qtilde: Option<Exponent>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub wrap_ok: bool,
    pub seed: u64,
}

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

impl RatioRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.delta,
            self.mass,
            opt(&self.lambda),
            self.t_or_horizon,
            opt(&self.p),
            opt(&self.q),
            opt(&self.ptilde),
            opt(&self.qtilde),
            self.lhs,
            self.rhs,
            self.ratio,
            self.wrap_ok,
            self.seed
        )
    }
}

pub fn write_csv<W: Write>(mut w: W, records: &[RatioRecord]) -> Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    Ok(())
}

pub fn write_jsonl<W: Write>(mut w: W, records: &[RatioRecord]) -> Result<()> {
    for r in records {
        let line = serde_json::to_string(r).map_err(|e| crate::Error::Io(e.to_string()))?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}
