//! The closed family of computable rings and their elements.

mod ideal;
mod poly;
mod zalg;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use ideal::{CanonicalForm, Ideal, QFMorphism};
pub use poly::Poly;
pub use zalg::ZAlg;

use crate::error::{Error, Result};
use crate::zlinalg::{is_prime, is_square_free, rem, Int};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rationals,
    PrimeField(Int),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RingHandle {
    Integers,
    IntegersMod(Int),
    UnivariatePoly(Field),
    /// ℤ[w] with w² = d.
    QuadraticOrder(Int),
    UpperTriangular2(Field),
}

impl RingHandle {
    pub fn validate(self) -> Result<Self> {
        let bad = |m: String| Err(Error::InvalidRing(m));
        match self {
            RingHandle::IntegersMod(n) if n < 2 => bad(format!("IntegersMod({n}) needs n >= 2")),
            RingHandle::UnivariatePoly(Field::PrimeField(p))
            | RingHandle::UpperTriangular2(Field::PrimeField(p))
                if !is_prime(p) =>
            {
                bad(format!("{p} is not prime"))
            }
            RingHandle::UpperTriangular2(Field::Rationals) => {
                bad("UpperTriangular2 needs a prime field".into())
            }
            RingHandle::QuadraticOrder(d) if d == 0 || d == 1 || !is_square_free(d) => bad(
                format!("QuadraticOrder({d}) needs square-free d not in {{0, 1}}"),
            ),
            _ => Ok(self),
        }
    }

    pub fn is_commutative(self) -> bool {
        !matches!(self, RingHandle::UpperTriangular2(_))
    }

    pub fn is_finite(self) -> bool {
        matches!(
            self,
            RingHandle::IntegersMod(_) | RingHandle::UpperTriangular2(_)
        )
    }

    /// Additive model as a ℤ-algebra, for every class except polynomial rings.
    pub fn zalg(self) -> Option<ZAlg> {
        ZAlg::of(self)
    }

    pub fn zero(self) -> RingElement {
        self.from_int(0)
    }

    pub fn one(self) -> RingElement {
        self.from_int(1)
    }

    pub fn from_int(self, n: Int) -> RingElement {
        let payload = match self {
            RingHandle::Integers => Payload::Int(n),
            RingHandle::IntegersMod(m) => Payload::Int(rem(n, m)),
            RingHandle::UnivariatePoly(f) => Payload::Poly(Poly::from_ints(f, &[n])),
            RingHandle::QuadraticOrder(_) => Payload::Quad(n, 0),
            RingHandle::UpperTriangular2(Field::PrimeField(p)) => {
                Payload::Tri(rem(n, p), 0, rem(n, p))
            }
            RingHandle::UpperTriangular2(Field::Rationals) => unreachable!("validated handle"),
        };
        RingElement {
            handle: self,
            payload,
        }
    }

    /// Ring generators as used by samplers: 1 plus the algebra generators.
    pub fn generators(self) -> Vec<RingElement> {
        match self {
            RingHandle::Integers | RingHandle::IntegersMod(_) => vec![self.one()],
            RingHandle::UnivariatePoly(f) => vec![self.one(), RingElement::poly(self, Poly::x(f))],
            RingHandle::QuadraticOrder(_) => vec![self.one(), self.quad(0, 1)],
            RingHandle::UpperTriangular2(_) => {
                vec![self.one(), self.tri(1, 0, 0), self.tri(0, 1, 0)]
            }
        }
    }

    /// All elements of a finite ring in canonical order.
    pub fn elements(self) -> Option<Vec<RingElement>> {
        match self {
            RingHandle::IntegersMod(n) => Some((0..n).map(|a| self.from_int(a)).collect()),
            RingHandle::UpperTriangular2(Field::PrimeField(p)) => {
                let mut v = Vec::new();
                for a in 0..p {
                    for b in 0..p {
                        for c in 0..p {
                            v.push(self.tri(a, b, c));
                        }
                    }
                }
                Some(v)
            }
            _ => None,
        }
    }

    pub fn quad(self, a: Int, b: Int) -> RingElement {
        assert!(matches!(self, RingHandle::QuadraticOrder(_)));
        RingElement {
            handle: self,
            payload: Payload::Quad(a, b),
        }
    }

    pub fn tri(self, a: Int, b: Int, c: Int) -> RingElement {
        let RingHandle::UpperTriangular2(Field::PrimeField(p)) = self else {
            panic!("tri on {self}")
        };
        RingElement {
            handle: self,
            payload: Payload::Tri(rem(a, p), rem(b, p), rem(c, p)),
        }
    }

    pub fn parse_element(self, s: &str) -> Result<RingElement> {
        RingElement::parse(self, s)
    }
}

impl fmt::Display for RingHandle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RingHandle::Integers => write!(f, "ℤ"),
            RingHandle::IntegersMod(n) => write!(f, "ℤ/{n}"),
            RingHandle::UnivariatePoly(Field::Rationals) => write!(f, "ℚ[x]"),
            RingHandle::UnivariatePoly(Field::PrimeField(p)) => write!(f, "𝔽{p}[x]"),
            RingHandle::QuadraticOrder(d) => write!(f, "ℤ[√{d}]"),
            RingHandle::UpperTriangular2(Field::PrimeField(p)) => write!(f, "UT2(𝔽{p})"),
            RingHandle::UpperTriangular2(Field::Rationals) => write!(f, "UT2(ℚ)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Payload {
    Int(Int),
    Poly(Poly),
    /// a + b·w
    Quad(Int, Int),
    /// [[a, b], [0, c]]
    Tri(Int, Int, Int),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement {
    handle: RingHandle,
    payload: Payload,
}

impl RingElement {
    pub fn poly(handle: RingHandle, p: Poly) -> Self {
        RingElement {
            handle,
            payload: Payload::Poly(p),
        }
    }

    pub fn handle(&self) -> RingHandle {
        self.handle
    }

    pub fn payload(&self) -> &Payload {
        &self.payload
    }

    pub fn as_int(&self) -> Option<Int> {
        match self.payload {
            Payload::Int(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_poly(&self) -> Option<&Poly> {
        match &self.payload {
            Payload::Poly(p) => Some(p),
            _ => None,
        }
    }

    fn check(&self, other: &RingElement) -> Result<()> {
        if self.handle != other.handle {
            return Err(Error::HandleMismatch(
                self.handle.to_string(),
                other.handle.to_string(),
            ));
        }
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        *self == self.handle.zero()
    }

    pub fn add(&self, o: &RingElement) -> RingElement {
        self.check(o).expect("same ring");
        let h = self.handle;
        let payload = match (&self.payload, &o.payload) {
            (Payload::Int(a), Payload::Int(b)) => match h {
                RingHandle::IntegersMod(n) => Payload::Int(rem(a + b, n)),
                _ => Payload::Int(a + b),
            },
            (Payload::Poly(a), Payload::Poly(b)) => Payload::Poly(a.add(b)),
            (Payload::Quad(a, b), Payload::Quad(c, d)) => Payload::Quad(a + c, b + d),
            (Payload::Tri(..), Payload::Tri(..)) => {
                let (a, b, c) = self.tri_parts();
                let (x, y, z) = o.tri_parts();
                return h.tri(a + x, b + y, c + z);
            }
            _ => unreachable!(),
        };
        RingElement { handle: h, payload }
    }

    pub fn neg(&self) -> RingElement {
        let h = self.handle;
        let payload = match &self.payload {
            Payload::Int(a) => match h {
                RingHandle::IntegersMod(n) => Payload::Int(rem(-a, n)),
                _ => Payload::Int(-a),
            },
            Payload::Poly(p) => Payload::Poly(p.neg()),
            Payload::Quad(a, b) => Payload::Quad(-a, -b),
            Payload::Tri(a, b, c) => return h.tri(-a, -b, -c),
        };
        RingElement { handle: h, payload }
    }

    pub fn sub(&self, o: &RingElement) -> RingElement {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &RingElement) -> RingElement {
        self.check(o).expect("same ring");
        let h = self.handle;
        let payload = match (&self.payload, &o.payload) {
            (Payload::Int(a), Payload::Int(b)) => match h {
                RingHandle::IntegersMod(n) => Payload::Int(rem(a * b, n)),
                _ => Payload::Int(a * b),
            },
            (Payload::Poly(a), Payload::Poly(b)) => Payload::Poly(a.mul(b)),
            (Payload::Quad(a, b), Payload::Quad(c, e)) => {
                let RingHandle::QuadraticOrder(d) = h else {
                    unreachable!()
                };
                Payload::Quad(a * c + d * b * e, a * e + b * c)
            }
            (Payload::Tri(a, b, c), Payload::Tri(x, y, z)) => {
                return h.tri(a * x, a * y + b * z, c * z)
            }
            _ => unreachable!(),
        };
        RingElement { handle: h, payload }
    }

    pub fn pow(&self, e: u32) -> RingElement {
        let mut r = self.handle.one();
        for _ in 0..e {
            r = r.mul(self);
        }
        r
    }

    fn tri_parts(&self) -> (Int, Int, Int) {
        match self.payload {
            Payload::Tri(a, b, c) => (a, b, c),
            _ => unreachable!(),
        }
    }

    /// Coordinates in the ℤ-algebra basis of the handle (see [`ZAlg`]).
    pub fn coords(&self) -> Vec<Int> {
        match self.payload {
            Payload::Int(a) => vec![a],
            Payload::Quad(a, b) => vec![a, b],
            Payload::Tri(a, b, c) => {
                let RingHandle::UpperTriangular2(Field::PrimeField(p)) = self.handle else {
                    unreachable!()
                };
                vec![c, rem(a - c, p), b]
            }
            Payload::Poly(_) => panic!("polynomial rings have no lattice model"),
        }
    }

    pub fn from_coords(handle: RingHandle, v: &[Int]) -> RingElement {
        match handle {
            RingHandle::Integers | RingHandle::IntegersMod(_) => handle.from_int(v[0]),
            RingHandle::QuadraticOrder(_) => handle.quad(v[0], v[1]),
            RingHandle::UpperTriangular2(_) => handle.tri(v[0] + v[1], v[2], v[0]),
            RingHandle::UnivariatePoly(_) => panic!("polynomial rings have no lattice model"),
        }
    }

    pub fn parse(handle: RingHandle, s: &str) -> Result<RingElement> {
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = |what: &'static str, reason: &str| Error::Parse {
            what,
            input: s.to_string(),
            reason: reason.into(),
        };
        match handle {
            RingHandle::Integers => t
                .parse::<Int>()
                .map(|n| handle.from_int(n))
                .map_err(|_| err("integer", "not an integer")),
            RingHandle::IntegersMod(n) => {
                let (a, m) = match t.split_once("mod") {
                    Some((a, m)) => (a, Some(m)),
                    None => (t.as_str(), None),
                };
                let a: Int = a.parse().map_err(|_| err("residue", "not an integer"))?;
                if let Some(m) = m {
                    let m: Int = m.parse().map_err(|_| err("residue", "bad modulus"))?;
                    if m != n {
                        return Err(err("residue", "modulus does not match the ring"));
                    }
                }
                Ok(handle.from_int(a))
            }
            RingHandle::UnivariatePoly(f) => Ok(RingElement::poly(handle, Poly::parse(f, &t)?)),
            RingHandle::QuadraticOrder(_) => parse_quad(&t)
                .map(|(a, b)| handle.quad(a, b))
                .ok_or_else(|| err("quadratic integer", "expected a+bw")),
            RingHandle::UpperTriangular2(_) => {
                let nums: Vec<&str> = t
                    .trim_start_matches("[[")
                    .trim_end_matches("]]")
                    .split(|c| c == ',' || c == '[' || c == ']')
                    .filter(|x| !x.is_empty())
                    .collect();
                if nums.len() != 4 || !t.starts_with("[[") {
                    return Err(err("triangular matrix", "expected [[a,b],[0,c]]"));
                }
                let v: Vec<Int> = nums
                    .iter()
                    .map(|x| x.parse::<Int>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|_| err("triangular matrix", "bad entry"))?;
                let RingHandle::UpperTriangular2(Field::PrimeField(p)) = handle else {
                    unreachable!()
                };
                if rem(v[2], p) != 0 {
                    return Err(err("triangular matrix", "lower-left entry must be 0"));
                }
                Ok(handle.tri(v[0], v[1], v[3]))
            }
        }
    }
}

fn parse_quad(t: &str) -> Option<(Int, Int)> {
    if !t.contains('w') {
        return Some((t.parse().ok()?, 0));
    }
    let body = t.strip_suffix('w')?;
    // split at the last sign that is not the leading one
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .last();
    let (a, b) = match split {
        Some((i, _)) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let a: Int = a.parse().ok()?;
    let b: Int = match b.trim_start_matches('+') {
        "" => 1,
        "-" => -1,
        x => x.trim_end_matches('*').parse().ok()?,
    };
    Some((a, b))
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.payload, self.handle) {
            (Payload::Int(a), RingHandle::IntegersMod(n)) => write!(f, "{a} mod {n}"),
            (Payload::Int(a), _) => write!(f, "{a}"),
            (Payload::Poly(p), _) => write!(f, "{p}"),
            (Payload::Quad(a, b), _) => {
                if *b < 0 {
                    write!(f, "{a}{b}w")
                } else {
                    write!(f, "{a}+{b}w")
                }
            }
            (Payload::Tri(a, b, c), _) => write!(f, "[[{a},{b}],[0,{c}]]"),
        }
    }
}
