use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{ToPrimitive, Zero};

use super::unipoly::forward_owned;
use super::{format_terms, monomial_str, Rational, UniPoly};

/// Polynomial in Q[mu][V], stored as coefficients of V^0, V^1, ... .
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    coeffs: Vec<UniPoly>,
}

impl BiPoly {
    pub fn new(mut coeffs: Vec<UniPoly>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        BiPoly { coeffs }
    }

    /// Build from `(coefficient, mu exponent, V exponent)` triples.
    pub fn from_terms(terms: &[(Rational, usize, usize)]) -> Self {
        let mut p = BiPoly::zero();
        for (c, i, j) in terms {
            p = &p + &BiPoly::monomial(c.clone(), *i, *j);
        }
        p
    }

    pub fn from_int_terms(terms: &[(i64, usize, usize)]) -> Self {
        let t: Vec<_> = terms.iter().map(|&(c, i, j)| (super::int(c), i, j)).collect();
        Self::from_terms(&t)
    }

    pub fn zero() -> Self {
        BiPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: UniPoly) -> Self {
        Self::new(vec![c])
    }

    pub fn monomial(c: Rational, mu_exp: usize, v_exp: usize) -> Self {
        let mut v = vec![UniPoly::zero(); v_exp + 1];
        v[v_exp] = UniPoly::monomial(c, mu_exp);
        Self::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn deg_v(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn deg_mu(&self) -> Option<usize> {
        self.coeffs.iter().filter_map(|c| c.degree()).max()
    }

    pub fn coeffs(&self) -> &[UniPoly] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> UniPoly {
        self.coeffs.get(j).cloned().unwrap_or_default()
    }

    pub fn coeff_ref(&self, j: usize) -> Option<&UniPoly> {
        self.coeffs.get(j)
    }

    /// Leading coefficient in V.
    pub fn leading(&self) -> Option<&UniPoly> {
        self.coeffs.last()
    }

    /// Rational coefficient of mu^i V^j.
    pub fn term(&self, i: usize, j: usize) -> Rational {
        self.coeffs.get(j).map(|c| c.coeff(i)).unwrap_or_else(Rational::zero)
    }

    /// `(mu exponent, V exponent)` pairs with nonzero coefficients.
    pub fn support(&self) -> Vec<(usize, usize)> {
        let mut s = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate() {
            for (i, a) in c.coeffs().iter().enumerate() {
                if !a.is_zero() {
                    s.push((i, j));
                }
            }
        }
        s
    }

    pub fn derivative_v(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(j, c)| c.scale(&super::int(j as i64)))
                .collect(),
        )
    }

    pub fn derivative_mu(&self) -> Self {
        Self::new(self.coeffs.iter().map(|c| c.derivative()).collect())
    }

    /// Swap the roles of mu and V.
    pub fn transpose(&self) -> Self {
        let dm = match self.deg_mu() {
            Some(d) => d,
            None => return Self::zero(),
        };
        let mut out = vec![vec![Rational::zero(); self.coeffs.len()]; dm + 1];
        for (j, c) in self.coeffs.iter().enumerate() {
            for (i, a) in c.coeffs().iter().enumerate() {
                out[i][j] = a.clone();
            }
        }
        Self::new(out.into_iter().map(UniPoly::new).collect())
    }

    /// Substitute mu, leaving a polynomial in V.
    pub fn eval_mu(&self, mu: &Rational) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|c| c.eval(mu)).collect())
    }

    /// Substitute V, leaving a polynomial in mu.
    pub fn eval_v(&self, v: &Rational) -> UniPoly {
        let mut acc = UniPoly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc.scale(v) + c;
        }
        acc
    }

    pub fn eval_f64(&self, mu: f64, v: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * v + c.eval_f64(mu);
        }
        acc
    }

    /// Sum of absolute values of the coefficients.
    pub fn coeff_norm1(&self) -> f64 {
        self.coeffs
            .iter()
            .flat_map(|c| c.coeffs().iter())
            .map(|a| a.to_f64().unwrap_or(f64::INFINITY).abs())
            .sum()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::new(self.coeffs.iter().map(|p| p.scale(c)).collect())
    }

    pub fn mul_uni(&self, u: &UniPoly) -> Self {
        Self::new(self.coeffs.iter().map(|p| p * u).collect())
    }

    /// Divide every coefficient by `u`; `None` if some division is inexact.
    pub fn div_uni_exact(&self, u: &UniPoly) -> Option<Self> {
        let mut v = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            v.push(c.div_exact(u)?);
        }
        Some(Self::new(v))
    }

    /// Multiply by V^k.
    pub fn shift_v(&self, k: usize) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut v = vec![UniPoly::zero(); k];
        v.extend(self.coeffs.iter().cloned());
        Self::new(v)
    }

    /// Pseudo-remainder in V: lc(d)^(deg self - deg d + 1) * self mod d.
    pub fn pseudo_rem(&self, d: &Self) -> Self {
        let dd = d.deg_v().expect("pseudo-remainder by zero");
        let lc = d.coeffs[dd].clone();
        let mut r = self.clone();
        let mut e = match self.deg_v() {
            Some(n) if n >= dd => n - dd + 1,
            _ => return self.clone(),
        };
        while let Some(rd) = r.deg_v() {
            if rd < dd {
                break;
            }
            let t = BiPoly::constant(r.coeffs[rd].clone()).shift_v(rd - dd);
            r = &r.mul_uni(&lc) - &(&t * d);
            e -= 1;
        }
        r.mul_uni(&lc.pow(e as u32))
    }

    /// Exact division in Q[mu][V]; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let dd = d.deg_v()?;
        let lc = &d.coeffs[dd];
        let mut r = self.clone();
        let mut q = vec![UniPoly::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(rd) = r.deg_v() {
            if rd < dd {
                return None;
            }
            let c = r.coeffs[rd].div_exact(lc)?;
            let t = BiPoly::constant(c.clone()).shift_v(rd - dd);
            r = &r - &(&t * d);
            q[rd - dd] = c;
        }
        Some(Self::new(q))
    }

    pub fn display_with(&self, mu: &str, v: &str) -> String {
        let mut terms: Vec<(Rational, usize, usize)> = Vec::new();
        for (j, c) in self.coeffs.iter().enumerate().rev() {
            for (i, a) in c.coeffs().iter().enumerate().rev() {
                if !a.is_zero() {
                    terms.push((a.clone(), i, j));
                }
            }
        }
        let flat: Vec<(Rational, usize)> =
            terms.iter().enumerate().map(|(k, (a, _, _))| (a.clone(), k)).collect();
        format_terms(&flat, |k| {
            let (_, i, j) = &terms[k];
            let a = monomial_str(mu, *i);
            let b = monomial_str(v, *j);
            match (a.is_empty(), b.is_empty()) {
                (true, _) => b,
                (_, true) => a,
                _ => format!("{a}*{b}"),
            }
        })
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with("mu", "V"))
    }
}

impl Add for &BiPoly {
    type Output = BiPoly;
    fn add(self, o: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        BiPoly::new((0..n).map(|j| &self.coeff(j) + &o.coeff(j)).collect())
    }
}

impl Sub for &BiPoly {
    type Output = BiPoly;
    fn sub(self, o: &BiPoly) -> BiPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        BiPoly::new((0..n).map(|j| &self.coeff(j) - &o.coeff(j)).collect())
    }
}

impl Mul for &BiPoly {
    type Output = BiPoly;
    fn mul(self, o: &BiPoly) -> BiPoly {
        if self.is_zero() || o.is_zero() {
            return BiPoly::zero();
        }
        let mut v = vec![UniPoly::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                v[i + j] = &v[i + j] + &(a * b);
            }
        }
        BiPoly::new(v)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly { coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

forward_owned!(BiPoly, Add, add);
forward_owned!(BiPoly, Sub, sub);
forward_owned!(BiPoly, Mul, mul);

impl Neg for BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        -&self
    }
}
