//! Polynomials with rational coefficients, their PL interpolation on a grid
//! and a rigorous bound on the interpolation error.
//!
//! Error bound on a cell with steps `h_k`: for `x = sum_j l_j v_j`,
//! `PL(x) - p(x) = sum_j l_j grad p(xi_j) . (v_j - x)` by the mean value
//! theorem. Since `sum_j l_j (v_j - x) = 0`, each partial derivative may be
//! recentred at the midpoint of its interval enclosure, giving
//! `|PL(x) - p(x)| <= sum_k halfwidth(d_k p over the cell) * h_k`.

use std::collections::BTreeMap;

use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::io::grid::{freudenthal_grid, Grid};
use crate::pl_map::{CriticalValue, Norm, PLMap};
use crate::rational::{self, Rational};
use crate::robsat::{decide_robsat, RobVerdict};

/// Closed rational interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(x: Rational) -> Interval {
        Interval { lo: x.clone(), hi: x }
    }

    fn add(&self, o: &Interval) -> Interval {
        Interval { lo: &self.lo + &o.lo, hi: &self.hi + &o.hi }
    }

    fn mul(&self, o: &Interval) -> Interval {
        let p = [&self.lo * &o.lo, &self.lo * &o.hi, &self.hi * &o.lo, &self.hi * &o.hi];
        Interval { lo: p.iter().min().unwrap().clone(), hi: p.iter().max().unwrap().clone() }
    }

    fn scale(&self, c: &Rational) -> Interval {
        let (a, b) = (&self.lo * c, &self.hi * c);
        if a <= b {
            Interval { lo: a, hi: b }
        } else {
            Interval { lo: b, hi: a }
        }
    }

    fn pow(&self, e: u32) -> Interval {
        if e == 0 {
            return Interval::point(Rational::one());
        }
        let (a, b) = (pow(&self.lo, e), pow(&self.hi, e));
        if e % 2 == 1 || !self.lo.is_negative() {
            Interval { lo: a, hi: b }
        } else if !self.hi.is_positive() {
            Interval { lo: b, hi: a }
        } else {
            Interval { lo: Rational::zero(), hi: a.max(b) }
        }
    }

    pub fn halfwidth(&self) -> Rational {
        (&self.hi - &self.lo) / rational::int(2)
    }
}

fn pow(x: &Rational, e: u32) -> Rational {
    (0..e).fold(Rational::one(), |acc, _| acc * x)
}

/// A polynomial in `nvars` variables, as exponent vectors to coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Vec<u32>, Rational>,
}

impl Polynomial {
    pub fn constant(nvars: usize, c: Rational) -> Polynomial {
        let mut p = Polynomial { nvars, terms: BTreeMap::new() };
        p.add_term(vec![0; nvars], c);
        p
    }

    pub fn variable(nvars: usize, k: usize) -> Polynomial {
        let mut e = vec![0; nvars];
        e[k] = 1;
        let mut p = Polynomial { nvars, terms: BTreeMap::new() };
        p.add_term(e, Rational::one());
        p
    }

    fn add_term(&mut self, e: Vec<u32>, c: Rational) {
        let entry = self.terms.entry(e).or_insert_with(Rational::zero);
        *entry += c;
        self.terms.retain(|_, c| !c.is_zero());
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&vec![0; self.nvars]).cloned(),
            _ => None,
        }
    }

    pub fn add(&self, o: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (e, c) in &o.terms {
            p.add_term(e.clone(), c.clone());
        }
        p
    }

    pub fn neg(&self) -> Polynomial {
        Polynomial { nvars: self.nvars, terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect() }
    }

    pub fn mul(&self, o: &Polynomial) -> Polynomial {
        let mut p = Polynomial { nvars: self.nvars, terms: BTreeMap::new() };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &o.terms {
                let e = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                p.add_term(e, c1 * c2);
            }
        }
        p
    }

    pub fn pow(&self, k: u32) -> Polynomial {
        (0..k).fold(Polynomial::constant(self.nvars, Rational::one()), |acc, _| acc.mul(self))
    }

    pub fn derivative(&self, k: usize) -> Polynomial {
        let mut p = Polynomial { nvars: self.nvars, terms: BTreeMap::new() };
        for (e, c) in &self.terms {
            if e[k] > 0 {
                let mut d = e.clone();
                d[k] -= 1;
                p.add_term(d, c * rational::int(e[k] as i64));
            }
        }
        p
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(x).fold(c.clone(), |acc, (k, xi)| acc * pow(xi, *k)))
            .sum()
    }

    /// Natural interval extension over a box.
    pub fn eval_interval(&self, x: &[Interval]) -> Interval {
        self.terms.iter().fold(Interval::point(Rational::zero()), |acc, (e, c)| {
            let mono = e.iter().zip(x).fold(Interval::point(Rational::one()), |m, (k, xi)| m.mul(&xi.pow(*k)));
            acc.add(&mono.scale(c))
        })
    }

    /// Parses `+ - * / ^`, parentheses, integer literals and the given variable names.
    /// Division is only by nonzero constants; exponents are non-negative integers.
    pub fn parse(text: &str, vars: &[&str]) -> Result<Polynomial> {
        let tokens = tokenize(text)?;
        let mut p = Parser { tokens, pos: 0, vars };
        let out = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::NonPolynomial(format!("unexpected {:?} in {text:?}", p.tokens[p.pos])));
        }
        Ok(out)
    }
}

/// Default variable names for `m` variables: `x, y, z` up to three, else `x1, x2, ...`.
pub fn default_vars(m: usize) -> Vec<String> {
    if m <= 3 {
        ["x", "y", "z"][..m].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=m).map(|i| format!("x{i}")).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(Rational),
    Ident(String),
    Op(char),
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && (chars[i] == '.' || chars[i] == 'e' || chars[i] == 'E') {
                return Err(Error::NonPolynomial("floating-point literals are not accepted".into()));
            }
            let s: String = chars[start..i].iter().collect();
            out.push(Token::Num(rational::parse(&s)?));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Token::Op(c));
            i += 1;
        } else {
            return Err(Error::NonPolynomial(format!("unexpected character {c:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn peek_op(&self) -> Option<char> {
        match self.tokens.get(self.pos) {
            Some(Token::Op(c)) => Some(*c),
            _ => None,
        }
    }

    fn expr(&mut self) -> Result<Polynomial> {
        let mut acc = self.term()?;
        while let Some(op @ ('+' | '-')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == '+' { acc.add(&rhs) } else { acc.add(&rhs.neg()) };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Polynomial> {
        let mut acc = self.unary()?;
        while let Some(op @ ('*' | '/')) = self.peek_op() {
            self.pos += 1;
            let rhs = self.unary()?;
            acc = if op == '*' {
                acc.mul(&rhs)
            } else {
                match rhs.as_constant() {
                    Some(c) if !c.is_zero() => acc.mul(&Polynomial::constant(acc.nvars, c.recip())),
                    _ => return Err(Error::NonPolynomial("division by a non-constant or zero".into())),
                }
            };
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Polynomial> {
        match self.peek_op() {
            Some('-') => {
                self.pos += 1;
                Ok(self.unary()?.neg())
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Polynomial> {
        let base = self.atom()?;
        if self.peek_op() == Some('^') {
            self.pos += 1;
            let e = match self.tokens.get(self.pos) {
                Some(Token::Num(q)) if q.is_integer() => q.to_integer().to_u32(),
                _ => None,
            };
            let Some(e) = e else {
                return Err(Error::NonPolynomial("exponents must be non-negative integer literals".into()));
            };
            self.pos += 1;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Polynomial> {
        let nvars = self.vars.len();
        match self.tokens.get(self.pos).cloned() {
            Some(Token::Num(q)) => {
                self.pos += 1;
                Ok(Polynomial::constant(nvars, q))
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                match self.vars.iter().position(|v| *v == name) {
                    Some(k) => Ok(Polynomial::variable(nvars, k)),
                    None => Err(Error::NonPolynomial(format!("unknown symbol {name:?}"))),
                }
            }
            Some(Token::Op('(')) => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek_op() != Some(')') {
                    return Err(Error::NonPolynomial("unbalanced parentheses".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            other => Err(Error::NonPolynomial(format!("unexpected {other:?}"))),
        }
    }
}

/// A sampled system with per-component interpolation error bounds.
#[derive(Clone, Debug)]
pub struct SampledMap {
    pub f: PLMap,
    pub grid: Grid,
    /// `max |p_i - PL_i|` is at most `component_eps[i]`.
    pub component_eps: Vec<Rational>,
}

impl SampledMap {
    /// A rational bound on `|p - PL|` in the given norm.
    pub fn epsilon(&self, norm: Norm) -> Rational {
        match norm {
            Norm::LInf => self.component_eps.iter().max().cloned().unwrap_or_else(Rational::zero),
            Norm::L1 | Norm::L2 => self.component_eps.iter().sum(),
        }
    }
}

pub fn sample_polynomial(polys: &[Polynomial], grid: &Grid) -> Result<SampledMap> {
    let m = grid.dim();
    if let Some(p) = polys.iter().find(|p| p.nvars() != m) {
        return Err(Error::Dimension(format!("polynomial in {} variables on a {m}-dimensional grid", p.nvars())));
    }
    let f = grid.sample(polys.len(), |x| polys.iter().map(|p| p.eval(x)).collect())?;
    let steps: Vec<Rational> = (0..m)
        .map(|k| (&grid.bounds[k].1 - &grid.bounds[k].0) / rational::int(grid.resolution[k] as i64))
        .collect();
    let derivs: Vec<Vec<Polynomial>> = polys.iter().map(|p| (0..m).map(|k| p.derivative(k)).collect()).collect();
    let mut component_eps = vec![Rational::zero(); polys.len()];
    let mut cell = vec![0usize; m];
    loop {
        let cell_box: Vec<Interval> = (0..m)
            .map(|k| {
                let lo = &grid.bounds[k].0 + &steps[k] * rational::int(cell[k] as i64);
                Interval { hi: &lo + &steps[k], lo }
            })
            .collect();
        for (i, ds) in derivs.iter().enumerate() {
            let bound: Rational = ds.iter().zip(&steps).map(|(d, h)| d.eval_interval(&cell_box).halfwidth() * h).sum();
            if bound > component_eps[i] {
                component_eps[i] = bound;
            }
        }
        let mut k = 0;
        while k < m && cell[k] + 1 == grid.resolution[k] {
            cell[k] = 0;
            k += 1;
        }
        if k == m {
            break;
        }
        cell[k] += 1;
    }
    Ok(SampledMap { f, grid: grid.clone(), component_eps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SampledVerdict {
    /// Every `alpha`-perturbation of the polynomial map has a root.
    EveryAlphaHasRoot,
    /// Some `(alpha + eps)`-perturbation has no root.
    ExistsAlphaPlusEpsNoRoot,
    Unknown,
}

impl SampledVerdict {
    pub fn tag(self) -> &'static str {
        match self {
            SampledVerdict::EveryAlphaHasRoot => "every_alpha_perturbation_has_root",
            SampledVerdict::ExistsAlphaPlusEpsNoRoot => "exists_alpha_plus_eps_perturbation_without_root",
            SampledVerdict::Unknown => "unknown",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SampledDecision {
    pub verdict: SampledVerdict,
    pub resolution: usize,
    pub epsilon: Rational,
    pub vertices: usize,
}

/// Largest grid the sampler will refine to.
pub const MAX_SAMPLED_VERTICES: usize = 1 << 16;

/// Refines until the interpolation bound is at most `eps / 2`, then decides
/// the PL map at `alpha + eps / 2`. A robust PL answer covers every
/// `alpha`-perturbation of the polynomials; a non-robust one yields a
/// rootless perturbation within `alpha + eps`.
pub fn decide_sampled(
    polys: &[Polynomial],
    bounds: &[(Rational, Rational)],
    resolution: usize,
    alpha: &Rational,
    eps: &Rational,
    norm: Norm,
) -> Result<SampledDecision> {
    if !alpha.is_positive() || !eps.is_positive() {
        return Err(Error::NonPositiveAlpha);
    }
    let half = eps / rational::int(2);
    let mut res = resolution.max(1);
    let sampled = loop {
        let grid = freudenthal_grid(bounds, &vec![res; bounds.len()])?;
        let s = sample_polynomial(polys, &grid)?;
        if s.epsilon(norm) <= half {
            break s;
        }
        if (2 * res + 1).pow(bounds.len() as u32) > MAX_SAMPLED_VERTICES {
            return Ok(SampledDecision {
                verdict: SampledVerdict::Unknown,
                resolution: res,
                epsilon: s.epsilon(norm),
                vertices: grid.complex.num_vertices(),
            });
        }
        res *= 2;
    };
    let level = CriticalValue::Rat(alpha + &half);
    let verdict = match decide_robsat(&sampled.f, &level, norm)? {
        RobVerdict::RobustYes => SampledVerdict::EveryAlphaHasRoot,
        RobVerdict::RobustNo(_) => SampledVerdict::ExistsAlphaPlusEpsNoRoot,
        RobVerdict::Unknown => SampledVerdict::Unknown,
    };
    Ok(SampledDecision {
        verdict,
        resolution: res,
        epsilon: sampled.epsilon(norm),
        vertices: sampled.f.complex().num_vertices(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn parsing() {
        let p = Polynomial::parse("x^2 - 2*x*y + 1/3", &["x", "y"]).unwrap();
        assert_eq!(p.eval(&[int(2), int(1)]), frac(1, 3));
        assert_eq!(p.degree(), 2);
        assert!(matches!(Polynomial::parse("sin(x)", &["x"]), Err(Error::NonPolynomial(_))));
        assert!(Polynomial::parse("x^-1", &["x"]).is_err());
        assert!(Polynomial::parse("1/x", &["x"]).is_err());
        assert!(Polynomial::parse("1.5*x", &["x"]).is_err());
        assert_eq!(Polynomial::parse("-(x+1)^2", &["x"]).unwrap().eval(&[int(1)]), int(-4));
    }

    #[test]
    fn epsilon_bounds() {
        let unit = freudenthal_grid(&[(int(0), int(1))], &[1]).unwrap();
        let lin = Polynomial::parse("3*x - 1", &["x"]).unwrap();
        assert_eq!(sample_polynomial(&[lin], &unit).unwrap().component_eps, vec![int(0)]);
        let sq = Polynomial::parse("x^2", &["x"]).unwrap();
        let s = sample_polynomial(&[sq], &unit).unwrap();
        assert!(s.component_eps[0] >= frac(1, 4));
        let c = Polynomial::parse("7", &["x"]).unwrap();
        assert_eq!(sample_polynomial(&[c], &unit).unwrap().epsilon(Norm::L1), int(0));
    }

    #[test]
    fn interval_powers() {
        let i = Interval { lo: int(-2), hi: int(1) };
        assert_eq!(i.pow(2), Interval { lo: int(0), hi: int(4) });
        assert_eq!(i.pow(3), Interval { lo: int(-8), hi: int(1) });
    }

    #[test]
    fn sampled_decisions() {
        let x = Polynomial::parse("x", &["x"]).unwrap();
        let b = [(int(-1), int(1))];
        let d = decide_sampled(&[x], &b, 2, &frac(1, 2), &frac(1, 10), Norm::LInf).unwrap();
        assert_eq!(d.verdict, SampledVerdict::EveryAlphaHasRoot);
        let q = Polynomial::parse("x^2 + 1", &["x"]).unwrap();
        let b2 = [(int(-2), int(2))];
        let d = decide_sampled(&[q], &b2, 4, &frac(1, 2), &frac(1, 10), Norm::LInf).unwrap();
        assert_eq!(d.verdict, SampledVerdict::ExistsAlphaPlusEpsNoRoot);
        let two = [Polynomial::parse("x", &["x"]).unwrap(), Polynomial::parse("x", &["x"]).unwrap()];
        let d = decide_sampled(&two, &b, 2, &frac(1, 2), &frac(1, 10), Norm::LInf).unwrap();
        assert_eq!(d.verdict, SampledVerdict::ExistsAlphaPlusEpsNoRoot);
    }
}
