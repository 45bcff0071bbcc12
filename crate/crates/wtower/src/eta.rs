//! Crossing-change accounting for a null homotopy of one link component
//! over the other.
//!
//! Each self-crossing change removed during the null homotopy is recorded as
//! a sign and an integer linking count `n` (defined up to sign, which the
//! symmetrized combination absorbs). The generating polynomial
//! `mu = sum e_p t^(n_p)` symmetrizes to `lambda = mu + involute(mu)`; the
//! invariant series is `lambda` rewritten in `x = 2 - t - t^-1`, which
//! requires the signed crossing count to vanish.

use std::fmt;

use thiserror::Error;

use crate::laurent::{LaurentError, LaurentPoly, XPoly};
use crate::sign::Sign;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EtaError {
    #[error("not a null-homotopy: signed crossing count is {count}, so lambda(1) = {} != 0", 2 * .count)]
    NotNullHomotopic { count: i64 },
    #[error("crossing list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
}

/// One crossing change: the sign of the change and the linking count of the
/// loop it bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CrossingChange {
    pub sign: Sign,
    pub linking: i64,
}

impl CrossingChange {
    pub fn new(sign: Sign, linking: i64) -> CrossingChange {
        CrossingChange { sign, linking }
    }
}

impl fmt::Display for CrossingChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.sign, self.linking)
    }
}

/// `sum e_p t^(n_p)` over the recorded crossing changes.
pub fn mu(changes: &[CrossingChange]) -> LaurentPoly {
    LaurentPoly::from_terms(changes.iter().map(|c| (c.sign.to_i64(), c.linking)))
}

/// The symmetrization `mu + involute(mu) = sum e_p (t^(n_p) + t^(-n_p))`.
pub fn lambda(changes: &[CrossingChange]) -> LaurentPoly {
    let m = mu(changes);
    m.add(&m.involute())
}

/// The symmetrized polynomial, guarded by the null-homotopy condition: the
/// signed crossing count must vanish (equivalently `lambda(1) = 0`).
pub fn eta(changes: &[CrossingChange]) -> Result<LaurentPoly, EtaError> {
    let count: i64 = changes.iter().map(|c| c.sign.to_i64()).sum();
    if count != 0 {
        return Err(EtaError::NotNullHomotopic { count });
    }
    Ok(lambda(changes))
}

/// [`eta`] rewritten as a polynomial in `x = 2 - t - t^-1`.
pub fn beta_series(changes: &[CrossingChange]) -> Result<XPoly, EtaError> {
    Ok(eta(changes)?.to_x_poly()?)
}

/// The crossing-change record of the standard one-parameter twist family:
/// `[(-, k), (+, k+1), (+, k+1), (-, k+2)]`.
pub fn example_lk(k: i64) -> Vec<CrossingChange> {
    vec![
        CrossingChange::new(Sign::Minus, k),
        CrossingChange::new(Sign::Plus, k + 1),
        CrossingChange::new(Sign::Plus, k + 1),
        CrossingChange::new(Sign::Minus, k + 2),
    ]
}

/// Parses a crossing list: one `+ INT` or `- INT` per line, `#` comments,
/// blank lines ignored. The integer may be negative.
pub fn parse_crossings(input: &str) -> Result<Vec<CrossingChange>, EtaError> {
    let mut out = Vec::new();
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let mut chars = text.chars();
        let sign = chars
            .next()
            .and_then(Sign::from_char)
            .ok_or_else(|| EtaError::Parse {
                line,
                msg: format!("expected '+' or '-', got '{text}'"),
            })?;
        let rest = chars.as_str().trim();
        let linking: i64 = rest.parse().map_err(|_| EtaError::Parse {
            line,
            msg: format!("expected an integer linking count, got '{rest}'"),
        })?;
        out.push(CrossingChange::new(sign, linking));
    }
    Ok(out)
}

/// Renders a crossing list in the file format accepted by
/// [`parse_crossings`].
pub fn render_crossings(changes: &[CrossingChange]) -> String {
    let mut out = String::new();
    for c in changes {
        out.push_str(&format!("{c}\n"));
    }
    out
}
