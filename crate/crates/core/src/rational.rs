//! Rational helpers shared by every module.

use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Parses `"p/q"` or `"p"`. Decimal and float literals are rejected.
pub fn parse(s: &str) -> Result<Rational> {
    let t = s.trim();
    let ok = !t.is_empty()
        && t.chars().all(|c| c.is_ascii_digit() || c == '/' || c == '-' || c == '+');
    if !ok {
        return Err(Error::Parse(format!("not an exact rational: {s:?}")));
    }
    let r = Rational::from_str(t).map_err(|e| Error::Parse(format!("{s:?}: {e}")))?;
    Ok(r)
}

/// Canonical `p/q` text, `p` for integers.
pub fn format(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn sign(r: &Rational) -> i8 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

pub fn square(r: &Rational) -> Rational {
    r * r
}

pub fn max<'a>(a: &'a Rational, b: &'a Rational) -> &'a Rational {
    if a >= b {
        a
    } else {
        b
    }
}

/// Solves `m * x = rhs` exactly. Free variables are set to zero. Returns
/// `None` when the system is inconsistent.
pub fn solve_linear(m: &[Vec<Rational>], rhs: &[Rational], cols: usize) -> Option<Vec<Rational>> {
    let rows = m.len();
    let mut a: Vec<Vec<Rational>> = m
        .iter()
        .zip(rhs)
        .map(|(row, b)| {
            let mut r = row.clone();
            r.push(b.clone());
            r
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let inv = a[r][c].recip();
        for k in c..=cols {
            a[r][k] = &a[r][k] * &inv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let factor = a[i][c].clone();
                for k in c..=cols {
                    let d = &factor * &a[r][k];
                    a[i][k] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    if a[r..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (i, &c) in pivots.iter().enumerate() {
        x[c] = a[i][cols].clone();
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_rejects_decimals() {
        assert!(parse("1.5").is_err());
        assert!(parse("NaN").is_err());
        assert!(parse("").is_err());
        assert_eq!(parse("-3/6").unwrap(), frac(-1, 2));
        assert_eq!(parse("7").unwrap(), int(7));
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format(&frac(4, 8)), "1/2");
        assert_eq!(format(&int(-3)), "-3");
    }

    #[test]
    fn solve_linear_handles_rank_deficiency() {
        let m = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        let x = solve_linear(&m, &[int(2), int(4)], 2).unwrap();
        assert_eq!(x, vec![int(2), int(0)]);
        assert!(solve_linear(&m, &[int(2), int(5)], 2).is_none());
    }
}
