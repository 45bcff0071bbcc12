//! Exact integer Laurent polynomials in `t` and power series in
//! `x = (1-t)(1-t^-1) = 2 - t - t^-1`.
//!
//! Coefficients are arbitrary-precision integers and evaluation is exact
//! rational arithmetic. The change of variables into `x` uses the basis
//! `p_n = t^n + t^-n`, which satisfies `p_0 = 2`, `p_1 = 2 - x`, and
//! `p_n = (2-x) p_{n-1} - p_{n-2}`; a symmetric Laurent polynomial that
//! vanishes at `t = 1` is an integer combination of the `p_n` with zero
//! constant part in `x`.

use std::collections::BTreeMap;
use std::fmt;

use num::{BigInt, BigRational, One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LaurentError {
    #[error("polynomial is not symmetric under t -> 1/t: coefficient at t^{exp} is {plus}, at t^-{exp} is {minus}")]
    NotSymmetric {
        exp: i64,
        plus: BigInt,
        minus: BigInt,
    },
    #[error("polynomial does not vanish at t = 1 (value {value})")]
    DoesNotVanishAtOne { value: BigInt },
    #[error("cannot evaluate a Laurent polynomial at 0")]
    EvalAtZero,
}

/// An integer Laurent polynomial `sum c_e t^e`. Zero coefficients are never
/// stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct LaurentPoly {
    coeffs: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> LaurentPoly {
        LaurentPoly::default()
    }

    /// The monomial `c * t^e`.
    pub fn term(c: impl Into<BigInt>, e: i64) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        p.add_term(c.into(), e);
        p
    }

    pub fn from_terms<I, C>(terms: I) -> LaurentPoly
    where
        I: IntoIterator<Item = (C, i64)>,
        C: Into<BigInt>,
    {
        let mut p = LaurentPoly::zero();
        for (c, e) in terms {
            p.add_term(c.into(), e);
        }
        p
    }

    pub fn add_term(&mut self, c: BigInt, e: i64) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(e).or_insert_with(BigInt::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&e);
        }
    }

    pub fn coeff(&self, e: i64) -> BigInt {
        self.coeffs.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Iterates `(exponent, coefficient)` in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn add(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(c.clone(), e);
        }
        out
    }

    pub fn sub(&self, other: &LaurentPoly) -> LaurentPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }

    pub fn scale(&self, k: impl Into<BigInt>) -> LaurentPoly {
        let k = k.into();
        if k.is_zero() {
            return LaurentPoly::zero();
        }
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (*e, c * &k)).collect(),
        }
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = LaurentPoly::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(c1 * c2, e1 + e2);
            }
        }
        out
    }

    /// The involution `t -> 1/t`.
    pub fn involute(&self) -> LaurentPoly {
        LaurentPoly {
            coeffs: self.coeffs.iter().map(|(e, c)| (-*e, c.clone())).collect(),
        }
    }

    /// Fixed under [`involute`](LaurentPoly::involute)?
    pub fn is_symmetric(&self) -> bool {
        self.symmetry_defect().is_none()
    }

    fn symmetry_defect(&self) -> Option<i64> {
        self.coeffs
            .keys()
            .find(|&&e| self.coeff(e) != self.coeff(-e))
            .copied()
            .map(i64::abs)
    }

    /// Value at `t = 1`: the sum of all coefficients.
    pub fn value_at_one(&self) -> BigInt {
        self.coeffs.values().sum()
    }

    pub fn vanishes_at_one(&self) -> bool {
        self.value_at_one().is_zero()
    }

    /// Exact evaluation at a nonzero rational.
    pub fn eval(&self, t: &BigRational) -> Result<BigRational, LaurentError> {
        if t.is_zero() {
            return Err(LaurentError::EvalAtZero);
        }
        let mut acc = BigRational::zero();
        for (e, c) in self.terms() {
            acc += BigRational::from(c.clone()) * pow_rational(t, e);
        }
        Ok(acc)
    }

    /// Rewrites a symmetric, at-1-vanishing polynomial in the variable
    /// `x = 2 - t - t^-1`. Processes exponents from the highest magnitude
    /// down; a leftover constant that the `p_0` basis element cannot absorb
    /// evenly indicates a violated precondition.
    pub fn to_x_poly(&self) -> Result<XPoly, LaurentError> {
        if let Some(exp) = self.symmetry_defect() {
            return Err(LaurentError::NotSymmetric {
                exp,
                plus: self.coeff(exp),
                minus: self.coeff(-exp),
            });
        }
        let at_one = self.value_at_one();
        if !at_one.is_zero() {
            return Err(LaurentError::DoesNotVanishAtOne { value: at_one });
        }
        let top = self.coeffs.keys().map(|e| e.abs()).max().unwrap_or(0);
        // Peel p_n = t^n + t^-n from the top down; what remains is the
        // constant term, absorbed exactly by p_0 = 2 thanks to vanishing.
        let mut acc: Vec<BigInt> = Vec::new(); // ascending powers of x
        let mut p_prev: Vec<BigInt> = vec![BigInt::from(2)]; // p_0
        let mut p_cur: Vec<BigInt> = vec![BigInt::from(2), BigInt::from(-1)]; // p_1
        let leftover = self.coeff(0);
        let half = &leftover / BigInt::from(2);
        debug_assert!(
            (&half * BigInt::from(2)) == leftover,
            "a symmetric polynomial vanishing at 1 has an even constant term"
        );
        add_scaled(&mut acc, &half, &p_prev);
        for n in 1..=top {
            if n >= 2 {
                let next = recurrence_step(&p_cur, &p_prev);
                p_prev = std::mem::replace(&mut p_cur, next);
            }
            let c = self.coeff(n);
            if !c.is_zero() {
                add_scaled(&mut acc, &c, &p_cur);
            }
        }
        while acc.last().is_some_and(Zero::is_zero) {
            acc.pop();
        }
        debug_assert!(acc.first().is_none_or(Zero::is_zero));
        if acc.is_empty() {
            return Ok(XPoly::zero());
        }
        Ok(XPoly::from_coeffs(acc[1..].to_vec()))
    }
}

/// `(2 - x) * p_cur - p_prev` on ascending-power coefficient vectors.
fn recurrence_step(p_cur: &[BigInt], p_prev: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); p_cur.len() + 1];
    for (i, c) in p_cur.iter().enumerate() {
        out[i] += c * BigInt::from(2);
        out[i + 1] -= c;
    }
    for (i, c) in p_prev.iter().enumerate() {
        out[i] -= c;
    }
    out
}

fn add_scaled(acc: &mut Vec<BigInt>, k: &BigInt, v: &[BigInt]) {
    if acc.len() < v.len() {
        acc.resize(v.len(), BigInt::zero());
    }
    for (i, c) in v.iter().enumerate() {
        acc[i] += k * c;
    }
}

fn pow_rational(q: &BigRational, e: i64) -> BigRational {
    if e == 0 {
        return BigRational::one();
    }
    let base = if e < 0 { q.recip() } else { q.clone() };
    let mut n = e.unsigned_abs();
    let mut acc = BigRational::one();
    let mut sq = base;
    while n > 0 {
        if n & 1 == 1 {
            acc *= &sq;
        }
        n >>= 1;
        if n > 0 {
            sq = &sq * &sq;
        }
    }
    acc
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter() {
            write_term(f, &mut first, c, "t", *e)?;
        }
        Ok(())
    }
}

fn write_term(
    f: &mut fmt::Formatter<'_>,
    first: &mut bool,
    c: &BigInt,
    var: &str,
    e: i64,
) -> fmt::Result {
    let mag = c.abs();
    if *first {
        if c.is_negative() {
            write!(f, "-")?;
        }
        *first = false;
    } else if c.is_negative() {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    if e == 0 {
        write!(f, "{mag}")
    } else {
        if !mag.is_one() {
            write!(f, "{mag}")?;
        }
        if e == 1 {
            write!(f, "{var}")
        } else {
            write!(f, "{var}^{e}")
        }
    }
}

/// An integer polynomial in `x` with no constant term: coefficient `i` (from
/// zero) multiplies `x^(i+1)`. Trailing zeros are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct XPoly {
    coeffs: Vec<BigInt>,
}

impl XPoly {
    pub fn zero() -> XPoly {
        XPoly::default()
    }

    /// Builds from coefficients of `x^1, x^2, ...`.
    pub fn from_coeffs(mut coeffs: Vec<BigInt>) -> XPoly {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        XPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> XPoly {
        XPoly::from_coeffs(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// Coefficient of `x^n` (`n >= 1`).
    pub fn coeff(&self, n: usize) -> BigInt {
        assert!(n >= 1, "XPoly has no constant term");
        self.coeffs.get(n - 1).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Coefficients of `x^1, x^2, ...` with trailing zeros trimmed.
    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = (acc + BigRational::from(c.clone())) * x;
        }
        acc
    }

    /// Substitutes `x = 2 - t - t^-1`, recovering a symmetric Laurent
    /// polynomial that vanishes at `t = 1`.
    pub fn to_laurent(&self) -> LaurentPoly {
        let x = LaurentPoly::from_terms([(2, 0), (-1, 1), (-1, -1)]);
        let mut acc = LaurentPoly::zero();
        let mut power = x.clone(); // x^1
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                power = power.mul(&x);
            }
            acc = acc.add(&power.scale(c.clone()));
        }
        acc
    }
}

impl fmt::Display for XPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            write_term(f, &mut first, c, "x", (i + 1) as i64)?;
        }
        Ok(())
    }
}
