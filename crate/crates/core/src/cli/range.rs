//! `lo:hi:count` grid syntax with optional `(log)` spacing.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// A single value or an inclusive, evenly (or log-evenly) spaced grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log: bool,
}

impl Range {
    pub fn single(x: f64) -> Self {
        Self {
            lo: x,
            hi: x,
            count: 1,
            log: false,
        }
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let n = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                let t = i as f64 / n;
                if i == 0 {
                    self.lo
                } else if i + 1 == self.count {
                    self.hi
                } else if self.log {
                    (self.lo.ln() + t * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + t * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

impl FromStr for Range {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let log = s.contains("(log)");
        let cleaned = s.replace("(log)", "");
        let parts: Vec<&str> = cleaned.split(':').map(str::trim).collect();
        let num = |t: &str| -> Result<f64, String> {
            let x: f64 = t.parse().map_err(|_| format!("`{t}` is not a number"))?;
            if !x.is_finite() {
                return Err(format!("`{t}` is not finite"));
            }
            Ok(x)
        };
        let r = match parts.as_slice() {
            [x] if !log => Range::single(num(x)?),
            [lo, hi, count] => {
                let count: usize = count.parse().map_err(|_| format!("`{count}` is not a positive count"))?;
                let (lo, hi) = (num(lo)?, num(hi)?);
                if count < 2 {
                    return Err("a range needs count >= 2 (use a single number for one value)".into());
                }
                if !(lo < hi) {
                    return Err(format!("need lo < hi, got {lo}:{hi}"));
                }
                if log && lo <= 0.0 {
                    return Err("log spacing needs lo > 0".into());
                }
                Range { lo, hi, count, log }
            }
            _ => return Err(format!("`{s}`: expected a number or lo:hi:count with optional (log)")),
        };
        Ok(r)
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count == 1 {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}:{}{}", self.lo, self.hi, self.count, if self.log { "(log)" } else { "" })
        }
    }
}
