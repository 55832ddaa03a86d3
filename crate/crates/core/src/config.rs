//! `key = value` sweep configuration files.
//!
//! ```text
//! # comment
//! delta_ladder = 1, 0.5, 0.25
//! p = inf, 6
//! q = 2, inf
//! ```

use std::collections::HashMap;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::harness::{AdmissiblePair, Profile, SweepConfig};
use crate::lattice::Exponent;

const KEYS: &[&str] = &[
    "delta_ladder",
    "mass",
    "lambda_ladder",
    "t_max",
    "p",
    "q",
    "ring_size",
    "seeds",
    "state",
    "width",
    "carrier",
];

struct Entry {
    line: usize,
    value: String,
}

fn scalar<T: FromStr>(e: &Entry, key: &str) -> Result<T> {
    e.value.parse().map_err(|_| Error::Parse {
        line: e.line,
        msg: format!("bad value for {key}: {:?}", e.value),
    })
}

fn list<T: FromStr>(e: &Entry, key: &str) -> Result<Vec<T>> {
    if e.value.is_empty() {
        return Ok(Vec::new());
    }
    e.value
        .split(',')
        .map(|s| {
            s.trim().parse().map_err(|_| Error::Parse {
                line: e.line,
                msg: format!("bad list item for {key}: {:?}", s.trim()),
            })
        })
        .collect()
}

/// Parses and validates; keys left out keep their defaults.
pub fn parse_config_str(text: &str) -> Result<SweepConfig> {
    let mut entries: HashMap<&str, Entry> = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((k, v)) = body.split_once('=') else {
            return Err(Error::Parse {
                line,
                msg: format!("expected `key = value`, got {body:?}"),
            });
        };
        let k = k.trim();
        let Some(&key) = KEYS.iter().find(|&&known| known == k) else {
            return Err(Error::Parse {
                line,
                msg: format!("unknown key {k:?}"),
            });
        };
        if let Some(prev) = entries.get(key) {
            return Err(Error::Parse {
                line,
                msg: format!("duplicate key {key:?} (first set on line {})", prev.line),
            });
        }
        entries.insert(
            key,
            Entry {
                line,
                value: v.trim().to_string(),
            },
        );
    }

    let mut cfg = SweepConfig::default();
    if let Some(e) = entries.get("delta_ladder") {
        cfg.delta_ladder = list(e, "delta_ladder")?;
    }
    if let Some(e) = entries.get("mass") {
        cfg.mass = scalar(e, "mass")?;
    }
    if let Some(e) = entries.get("lambda_ladder") {
        cfg.lambda_ladder = list(e, "lambda_ladder")?;
    }
    if let Some(e) = entries.get("t_max") {
        cfg.t_max = scalar(e, "t_max")?;
    }
    if let Some(e) = entries.get("ring_size") {
        cfg.ring_size = scalar(e, "ring_size")?;
    }
    if let Some(e) = entries.get("seeds") {
        cfg.seeds = list(e, "seeds")?;
    }
    match (entries.get("p"), entries.get("q")) {
        (None, None) => {}
        (Some(pe), Some(qe)) => {
            let ps: Vec<Exponent> = list(pe, "p")?;
            let qs: Vec<Exponent> = list(qe, "q")?;
            if ps.len() != qs.len() {
                return Err(Error::Parse {
                    line: qe.line,
                    msg: format!("{} p values but {} q values", ps.len(), qs.len()),
                });
            }
            cfg.pairs = ps
                .into_iter()
                .zip(qs)
                .map(|(p, q)| {
                    AdmissiblePair::discrete(p, q).map_err(|e| Error::Config(e.to_string()))
                })
                .collect::<Result<_>>()?;
        }
        (Some(e), None) | (None, Some(e)) => {
            return Err(Error::Parse {
                line: e.line,
                msg: "p and q must be given together".into(),
            });
        }
    }
    let width = entries
        .get("width")
        .map(|e| scalar(e, "width"))
        .transpose()?;
    let carrier = entries
        .get("carrier")
        .map(|e| scalar(e, "carrier"))
        .transpose()?;
    let state = entries.get("state");
    cfg.profile = match state.map(|e| e.value.as_str()).unwrap_or("gaussian") {
        "gaussian" => Profile::Gaussian {
            width: width.unwrap_or(4.0),
            carrier: carrier.unwrap_or(0.0),
        },
        "random" => Profile::Random {
            width: width.unwrap_or(4.0),
        },
        "impulse" => Profile::Impulse,
        other => {
            let line = state.map(|e| e.line).unwrap_or(0);
            return Err(Error::Parse {
                line,
                msg: format!("unknown state {other:?} (gaussian, random, impulse)"),
            });
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

pub fn parse_config(path: &Path) -> Result<SweepConfig> {
    let text =
        std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let cfg = parse_config_str("delta_ladder = 1, 0.5, 0.25\n").unwrap();
        assert_eq!(cfg.delta_ladder, vec![1.0, 0.5, 0.25]);
        let cfg = parse_config_str("p = inf\nq = 2 # energy\n").unwrap();
        assert_eq!(cfg.pairs, vec![AdmissiblePair::energy()]);
        assert_eq!(cfg.pairs[0].p, Exponent::Infinite);
        let err = parse_config_str("mass = 1\n\n# x\nmass = 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
    }

    #[test]
    fn full_file() {
        let text = "\
# sweep
delta_ladder = 1, 0.5
mass = 0.5
lambda_ladder = 0.5, 1
t_max = 32
p = 6, inf
q = inf, 2
ring_size = 4096
seeds = 3, 4
state = random
width = 2.5
";
        let cfg = parse_config_str(text).unwrap();
        assert_eq!(cfg.lambda_ladder, vec![0.5, 1.0]);
        assert_eq!(cfg.pairs.len(), 2);
        assert_eq!(cfg.ring_size, 4096);
        assert_eq!(cfg.seeds, vec![3, 4]);
        assert_eq!(cfg.profile, Profile::Random { width: 2.5 });
        assert_eq!(
            parse_config_str("lambda_ladder =\n").unwrap().lambda_ladder,
            Vec::<f64>::new()
        );
    }

    #[test]
    fn rejections() {
        assert!(matches!(
            parse_config_str("colour = red\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_str("\nmass 1\n"),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_config_str("seeds = 1, x\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_config_str("p = 6\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_config_str("p = 8\nq = 4\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            parse_config_str("delta_ladder = 2\n"),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            parse_config_str("state = square\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
