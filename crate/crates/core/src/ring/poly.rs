//! Univariate polynomials over ℚ or 𝔽_p with exact coefficients.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::Field;
use crate::error::{Error, Result};
use crate::zlinalg::Int;

/// Coefficients from low to high degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Poly {
    pub field: Field,
    pub coeffs: Vec<BigRational>,
}

fn reduce_coeff(field: Field, c: BigRational) -> BigRational {
    match field {
        Field::Rationals => c,
        Field::PrimeField(p) => {
            let p = BigInt::from(p);
            let num = c.numer().clone();
            let den = c.denom().clone();
            let inv = mod_inverse(&((den % &p + &p) % &p), &p);
            let v = ((num % &p + &p) % &p * inv) % &p;
            BigRational::from_integer(v)
        }
    }
}

fn mod_inverse(a: &BigInt, p: &BigInt) -> BigInt {
    // p is prime, so a^(p-2)
    a.modpow(&(p - BigInt::from(2)), p)
}

impl Poly {
    pub fn new(field: Field, coeffs: Vec<BigRational>) -> Self {
        let mut p = Poly {
            field,
            coeffs: coeffs.into_iter().map(|c| reduce_coeff(field, c)).collect(),
        };
        p.trim();
        p
    }

    pub fn from_ints(field: Field, coeffs: &[Int]) -> Self {
        Self::new(
            field,
            coeffs
                .iter()
                .map(|&c| BigRational::from_integer(BigInt::from(c)))
                .collect(),
        )
    }

    pub fn zero(field: Field) -> Self {
        Poly {
            field,
            coeffs: vec![],
        }
    }

    pub fn one(field: Field) -> Self {
        Self::constant(field, BigRational::one())
    }

    pub fn x(field: Field) -> Self {
        Self::new(field, vec![BigRational::zero(), BigRational::one()])
    }

    pub fn constant(field: Field, c: BigRational) -> Self {
        Self::new(field, vec![c])
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> BigRational {
        self.coeffs
            .last()
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    fn scale(&self, c: &BigRational) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = reduce_coeff(self.field, BigRational::one() / self.lead());
        self.scale(&inv)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let z = BigRational::zero();
        let c = (0..n)
            .map(|i| self.coeffs.get(i).unwrap_or(&z) + other.coeffs.get(i).unwrap_or(&z))
            .collect();
        Poly::new(self.field, c)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.field, self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let mut c = vec![BigRational::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(self.field, c)
    }

    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let mut r = self.clone();
        let dd = d.degree().unwrap();
        let inv = reduce_coeff(self.field, BigRational::one() / d.lead());
        let mut q = vec![BigRational::zero(); self.coeffs.len().saturating_sub(dd).max(1)];
        while let Some(rd) = r.degree() {
            if rd < dd {
                break;
            }
            let c = reduce_coeff(self.field, r.lead() * &inv);
            let shift = rd - dd;
            q[shift] = c.clone();
            let mut t = vec![BigRational::zero(); shift];
            t.extend(d.coeffs.iter().map(|a| a * &c));
            r = r.sub(&Poly::new(self.field, t));
        }
        (Poly::new(self.field, q), r)
    }

    /// Monic gcd; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `g = s·self + t·other` monic.
    pub fn ext_gcd(&self, other: &Poly) -> (Poly, Poly, Poly) {
        let f = self.field;
        let (mut r0, mut r1) = (self.clone(), other.clone());
        let (mut s0, mut s1) = (Poly::one(f), Poly::zero(f));
        let (mut t0, mut t1) = (Poly::zero(f), Poly::one(f));
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = s0.sub(&q.mul(&s1));
            let t2 = t0.sub(&q.mul(&t1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s2);
            (t0, t1) = (t1, t2);
        }
        if r0.is_zero() {
            return (r0, s0, t0);
        }
        let inv = reduce_coeff(f, BigRational::one() / r0.lead());
        (r0.scale(&inv), s0.scale(&inv), t0.scale(&inv))
    }

    pub fn lcm(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field);
        }
        let g = self.gcd(other);
        self.mul(other).div_rem(&g).0.monic()
    }

    pub fn divides(&self, other: &Poly) -> bool {
        if self.is_zero() {
            return other.is_zero();
        }
        other.div_rem(self).1.is_zero()
    }

    pub fn parse(field: Field, s: &str) -> Result<Poly> {
        let err = |reason: &str| Error::Parse {
            what: "polynomial",
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if t.is_empty() {
            return Err(err("empty"));
        }
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut cur = String::new();
        let mut neg = false;
        for (i, ch) in t.chars().enumerate() {
            if (ch == '+' || ch == '-') && i > 0 && !cur.ends_with('^') {
                terms.push((neg, std::mem::take(&mut cur)));
                neg = ch == '-';
            } else if (ch == '+' || ch == '-') && i == 0 {
                neg = ch == '-';
            } else {
                cur.push(ch);
            }
        }
        terms.push((neg, cur));
        let mut acc = Poly::zero(field);
        for (neg, term) in terms {
            if term.is_empty() {
                return Err(err("empty term"));
            }
            let (coef, deg) = match term.find('x') {
                None => (term.as_str(), 0usize),
                Some(pos) => {
                    let rest = &term[pos + 1..];
                    let deg = if rest.is_empty() {
                        1
                    } else if let Some(e) = rest.strip_prefix('^') {
                        e.parse::<usize>().map_err(|_| err("bad exponent"))?
                    } else {
                        return Err(err("unexpected text after x"));
                    };
                    (term[..pos].trim_end_matches('*'), deg)
                }
            };
            let c = if coef.is_empty() {
                BigRational::one()
            } else {
                parse_rational(coef).ok_or_else(|| err("bad coefficient"))?
            };
            let c = if neg { -c } else { c };
            let mut v = vec![BigRational::zero(); deg + 1];
            v[deg] = c;
            acc = acc.add(&Poly::new(field, v));
        }
        Ok(acc)
    }
}

pub fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let a: BigInt = a.parse().ok()?;
            let b: BigInt = b.parse().ok()?;
            if b.is_zero() {
                return None;
            }
            Some(BigRational::new(a, b))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { "-" } else { "+" })?;
            }
            first = false;
            let show_coef = i == 0 || !a.is_one();
            if show_coef {
                write!(f, "{a}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print() {
        let p = Poly::parse(Field::Rationals, "x^2+1").unwrap();
        assert_eq!(p.to_string(), "x^2+1");
        let q = Poly::parse(Field::Rationals, "-1/2x^3 + 2x - 3").unwrap();
        assert_eq!(q.to_string(), "-1/2x^3+2x-3");
        assert_eq!(Poly::parse(Field::Rationals, &q.to_string()).unwrap(), q);
    }

    #[test]
    fn gcd_over_rationals() {
        let a = Poly::parse(Field::Rationals, "x^2-1").unwrap();
        let b = Poly::parse(Field::Rationals, "2x^2+4x+2").unwrap();
        assert_eq!(a.gcd(&b).to_string(), "x+1");
        let (g, s, t) = a.ext_gcd(&b);
        assert_eq!(s.mul(&a).add(&t.mul(&b)), g);
    }

    #[test]
    fn prime_field_reduction() {
        let p = Poly::parse(Field::PrimeField(3), "x^2+4x+5").unwrap();
        assert_eq!(p.to_string(), "x^2+x+2");
        let q = Poly::parse(Field::PrimeField(3), "x+2").unwrap();
        assert!(!q.divides(&p));
        assert!(q.divides(&p.mul(&q)));
    }
}
