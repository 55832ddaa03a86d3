//! Columnar text format for spinor fields.
//!
//! ```text
//! # delta=<v> N=<v> mass=<v>
//! j re(u1) im(u1) re(u2) im(u2)
//! ```
//!
//! One row per site, `j` running from `-N/2` to `N/2 - 1`. Other lines starting
//! with `#` are ignored on read, so a run manifest may precede the header.

use std::io::{BufRead, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::{SpinorField, WalkParams, ZERO_SPINOR};

pub fn write_field<W: Write>(mut w: W, u: &SpinorField) -> Result<()> {
    let p = u.params();
    writeln!(w, "# delta={} N={} mass={}", p.delta(), u.sites(), p.mass())?;
    for (i, v) in u.values().iter().enumerate() {
        writeln!(
            w,
            "{} {:e} {:e} {:e} {:e}",
            u.site_of_index(i),
            v[0].re,
            v[0].im,
            v[1].re,
            v[1].im
        )?;
    }
    Ok(())
}

fn parse_header(line: &str, lineno: usize) -> Result<Option<(f64, usize, f64)>> {
    let body = line.trim_start_matches('#').trim();
    if !body.starts_with("delta=") {
        return Ok(None);
    }
    let (mut delta, mut n, mut mass) = (None, None, None);
    for tok in body.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| Error::Parse {
            line: lineno,
            msg: format!("bad header token {tok:?}"),
        })?;
        let bad = |_| Error::Parse {
            line: lineno,
            msg: format!("bad value for {k}: {v:?}"),
        };
        match k {
            "delta" => delta = Some(v.parse::<f64>().map_err(bad)?),
            "N" => {
                n = Some(v.parse::<usize>().map_err(|_| Error::Parse {
                    line: lineno,
                    msg: format!("bad N {v:?}"),
                })?)
            }
            "mass" => mass = Some(v.parse::<f64>().map_err(bad)?),
            _ => {
                return Err(Error::Parse {
                    line: lineno,
                    msg: format!("unknown header key {k}"),
                })
            }
        }
    }
    match (delta, n, mass) {
        (Some(d), Some(n), Some(m)) => Ok(Some((d, n, m))),
        _ => Err(Error::Parse {
            line: lineno,
            msg: "header needs delta, N and mass".into(),
        }),
    }
}

pub fn read_field<R: BufRead>(r: R) -> Result<SpinorField> {
    let mut header = None;
    let mut values = Vec::new();
    let mut seen = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let t = line.trim();
        if t.is_empty() {
            continue;
        }
        if t.starts_with('#') {
            if header.is_none() {
                if let Some(h) = parse_header(t, lineno)? {
                    let n = h.1;
                    values = vec![ZERO_SPINOR; n];
                    seen = vec![false; n];
                    header = Some(h);
                }
            }
            continue;
        }
        let (_, n, _) = header.ok_or(Error::Parse {
            line: lineno,
            msg: "data before header".into(),
        })?;
        let cols: Vec<&str> = t.split_whitespace().collect();
        if cols.len() != 5 {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected 5 columns, got {}", cols.len()),
            });
        }
        let j: i64 = cols[0].parse().map_err(|_| Error::Parse {
            line: lineno,
            msg: format!("bad site index {:?}", cols[0]),
        })?;
        let half = (n / 2) as i64;
        if j < -half || j >= half {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("site {j} outside ring"),
            });
        }
        let mut x = [0.0; 4];
        for (k, c) in cols[1..].iter().enumerate() {
            x[k] = c.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("bad number {c:?}"),
            })?;
        }
        let i = (j + half) as usize;
        if seen[i] {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("duplicate site {j}"),
            });
        }
        seen[i] = true;
        values[i] = [Complex64::new(x[0], x[1]), Complex64::new(x[2], x[3])];
    }
    let (delta, _, mass) = header.ok_or(Error::Parse {
        line: 0,
        msg: "missing header".into(),
    })?;
    if let Some(i) = seen.iter().position(|s| !s) {
        return Err(Error::Parse {
            line: 0,
            msg: format!(
                "missing row for site {}",
                i as i64 - (seen.len() / 2) as i64
            ),
        });
    }
    SpinorField::from_values(WalkParams::new(delta, mass)?, values)
}
