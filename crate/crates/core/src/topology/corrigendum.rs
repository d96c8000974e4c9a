//! Bounded-degree evaluator for the filter 𝐇 on `k[x_1, x_2, …, y_1, y_2, …]`
//! that is a union of Gabriel topologies but fails T4.
//!
//! `J_0 = (x_i : i ≥ 1)`, `J_n = (y_1⋯y_n·x_i : i ≥ 1)`, `G_J` is the set of
//! ideals containing a power of every generator of `J`, and `𝐇 = ⋃_n G_{J_n}`.
//! The ideal `I = (x_i·y_i : i ≥ 1)` is not in `𝐇`, yet `J_0 ∈ 𝐇` and
//! `(I : s) ∈ 𝐇` for every `s ∈ J_0`. Only variables with index at most
//! `vars` and powers at most `max_power` are examined.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{Verdict, Witness};

/// Exponents of `x_1..x_N` and `y_1..y_N`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: Vec<u32>,
    pub y: Vec<u32>,
}

impl Monomial {
    pub fn one(vars: usize) -> Monomial {
        Monomial {
            x: vec![0; vars],
            y: vec![0; vars],
        }
    }

    pub fn x(vars: usize, i: usize) -> Monomial {
        let mut m = Self::one(vars);
        m.x[i - 1] = 1;
        m
    }

    pub fn y(vars: usize, i: usize) -> Monomial {
        let mut m = Self::one(vars);
        m.y[i - 1] = 1;
        m
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        Monomial {
            x: self.x.iter().zip(&o.x).map(|(a, b)| a + b).collect(),
            y: self.y.iter().zip(&o.y).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Monomial {
        Monomial {
            x: self.x.iter().map(|a| a * e).collect(),
            y: self.y.iter().map(|a| a * e).collect(),
        }
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.x.iter().zip(&o.x).all(|(a, b)| a <= b) && self.y.iter().zip(&o.y).all(|(a, b)| a <= b)
    }

    /// `y_1⋯y_n`.
    pub fn y_prefix(vars: usize, n: usize) -> Monomial {
        let mut m = Self::one(vars);
        for e in &mut m.y[..n] {
            *e = 1;
        }
        m
    }

    /// Largest `i` with `x_i` dividing the monomial.
    pub fn max_x(&self) -> usize {
        self.x.iter().rposition(|&e| e > 0).map_or(0, |i| i + 1)
    }
}

impl std::fmt::Display for Monomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts = Vec::new();
        for (name, exps) in [("x", &self.x), ("y", &self.y)] {
            for (i, &e) in exps.iter().enumerate() {
                match e {
                    0 => {}
                    1 => parts.push(format!("{name}{}", i + 1)),
                    _ => parts.push(format!("{name}{}^{e}", i + 1)),
                }
            }
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join("·"))
        }
    }
}

/// A polynomial with rational-integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct MPoly(pub BTreeMap<Monomial, i64>);

impl MPoly {
    pub fn monomial(m: Monomial) -> MPoly {
        MPoly(BTreeMap::from([(m, 1)]))
    }

    pub fn add(&self, o: &MPoly) -> MPoly {
        let mut out = self.0.clone();
        for (m, c) in &o.0 {
            *out.entry(m.clone()).or_insert(0) += c;
        }
        out.retain(|_, c| *c != 0);
        MPoly(out)
    }

    pub fn mul_monomial(&self, m: &Monomial) -> MPoly {
        MPoly(self.0.iter().map(|(a, c)| (a.mul(m), *c)).collect())
    }

    pub fn terms(&self) -> impl Iterator<Item = &Monomial> {
        self.0.keys()
    }
}

impl std::fmt::Display for MPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(m, c)| match c {
                1 => m.to_string(),
                -1 => format!("-{m}"),
                _ => format!("{c}·{m}"),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// An ideal generated by monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialIdeal {
    pub gens: Vec<Monomial>,
}

impl MonomialIdeal {
    pub fn contains_monomial(&self, m: &Monomial) -> bool {
        self.gens.iter().any(|g| g.divides(m))
    }

    /// A polynomial lies in a monomial ideal iff every term does.
    pub fn contains(&self, p: &MPoly) -> bool {
        p.terms().all(|m| self.contains_monomial(m))
    }
}

/// The regression instance at a fixed bound.
#[derive(Clone, Debug)]
pub struct Corrigendum {
    pub vars: usize,
    pub max_power: u32,
}

/// Facts established at the bound.
#[derive(Clone, Debug, Serialize)]
pub struct CorrigendumReport {
    pub vars: usize,
    pub max_power: u32,
    /// `J_0` lies in `G_{J_0}`.
    pub j0_in_h: bool,
    /// For each sampled `s ∈ J_0`: `s`, the level `n`, and whether every
    /// generator of `J_n` (to the bound) lies in `(I : s)`.
    pub colons: Vec<(String, usize, bool)>,
    /// For each `n`: the generator `y_1⋯y_n·x_{n+1}` none of whose powers
    /// lies in `I`, or `None` if some power does.
    pub exclusions: Vec<(usize, Option<String>)>,
    pub t4: Verdict,
}

impl Corrigendum {
    pub fn new(vars: usize, max_power: u32) -> Corrigendum {
        assert!(vars >= 2);
        Corrigendum { vars, max_power }
    }

    /// `I = (x_i·y_i)`.
    pub fn witness_ideal(&self) -> MonomialIdeal {
        MonomialIdeal {
            gens: (1..=self.vars)
                .map(|i| Monomial::x(self.vars, i).mul(&Monomial::y(self.vars, i)))
                .collect(),
        }
    }

    /// Generators of `J_n` with `x`-index at most the bound.
    pub fn level_generators(&self, n: usize) -> Vec<Monomial> {
        let p = Monomial::y_prefix(self.vars, n);
        (1..=self.vars)
            .map(|i| p.mul(&Monomial::x(self.vars, i)))
            .collect()
    }

    /// Whether every generator of `J_n` has a power (up to the bound) in
    /// the set described by `member`.
    pub fn in_level(&self, n: usize, member: impl Fn(&MPoly) -> bool) -> bool {
        self.level_generators(n)
            .iter()
            .all(|g| (1..=self.max_power).any(|e| member(&MPoly::monomial(g.pow(e)))))
    }

    /// Sampled elements of `J_0`: each term carries some `x_i`.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<MPoly> {
        let v = self.vars;
        let mut out: Vec<MPoly> = (1..=v)
            .map(|i| MPoly::monomial(Monomial::x(v, i)))
            .collect();
        out.push(
            MPoly::monomial(Monomial::x(v, 1))
                .add(&MPoly::monomial(Monomial::x(v, 2).mul(&Monomial::y(v, 1)))),
        );
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        while out.len() < v + 1 + count {
            let mut p = MPoly::default();
            for _ in 0..rng.gen_range(1..=3) {
                // keep x-indices below the bound so that J_n is testable
                let mut m = Monomial::x(v, rng.gen_range(1..v));
                for _ in 0..rng.gen_range(0..=2) {
                    let other = if rng.gen_bool(0.5) {
                        Monomial::x(v, rng.gen_range(1..=v))
                    } else {
                        Monomial::y(v, rng.gen_range(1..=v))
                    };
                    m = m.mul(&other);
                }
                let c = rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 };
                p = p.add(&MPoly(BTreeMap::from([(m, c)])));
            }
            if !p.0.is_empty() {
                out.push(p);
            }
        }
        out
    }

    pub fn run(&self, seed: u64, count: usize) -> CorrigendumReport {
        let i = self.witness_ideal();
        let j0_in_h = self.in_level(0, |p| p.terms().all(|m| m.max_x() > 0));
        let colons: Vec<(String, usize, bool)> = self
            .sample(seed, count)
            .iter()
            .map(|s| {
                let n = s.terms().map(|m| m.max_x()).max().unwrap_or(0);
                // g ∈ (I : s) iff g·s ∈ I
                let ok = self
                    .level_generators(n)
                    .iter()
                    .all(|g| i.contains(&s.mul_monomial(g)));
                (s.to_string(), n, ok)
            })
            .collect();
        let exclusions: Vec<(usize, Option<String>)> = (0..self.vars)
            .map(|n| {
                let g = Monomial::y_prefix(self.vars, n).mul(&Monomial::x(self.vars, n + 1));
                let excluded = (1..=self.max_power).all(|e| !i.contains_monomial(&g.pow(e)));
                (n, excluded.then(|| g.to_string()))
            })
            .collect();
        let colon_ok = colons.iter().all(|c| c.2);
        let i_outside = exclusions.iter().all(|e| e.1.is_some());
        let t4 = if j0_in_h && colon_ok && i_outside {
            Verdict::Failed {
                witness: Witness {
                    ideals: vec!["(x_i·y_i : i ≥ 1)".into(), "(x_i : i ≥ 1)".into()],
                    elements: colons.iter().map(|c| c.0.clone()).collect(),
                    detail: format!(
                        "J_0 ∈ 𝐇 and (I : s) ∈ 𝐇 for {} sampled s ∈ J_0, but I ∉ G_{{J_n}} for n < {} (powers ≤ {})",
                        colons.len(),
                        self.vars,
                        self.max_power
                    ),
                },
            }
        } else {
            Verdict::Unchecked
        };
        CorrigendumReport {
            vars: self.vars,
            max_power: self.max_power,
            j0_in_h,
            colons,
            exclusions,
            t4,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn regression_reproduces_the_t4_failure() {
        let r = Corrigendum::new(6, 4).run(0, 12);
        assert!(r.j0_in_h);
        assert!(r.colons.iter().all(|c| c.2));
        assert_eq!(r.exclusions[2].1.as_deref(), Some("x3·y1·y2"));
        let w = r.t4.witness().expect("T4 fails");
        assert_eq!(w.ideals[0], "(x_i·y_i : i ≥ 1)");
    }

    #[test]
    fn members_of_levels() {
        let c = Corrigendum::new(4, 3);
        let i = c.witness_ideal();
        // I contains no power of x_1, so I misses G_{J_0}
        assert!(!c.in_level(0, |p| i.contains(p)));
        // y_1 kills x_1 into I: (I : x_1) ⊇ (y_1) ⊇ J_1
        let s = MPoly::monomial(Monomial::x(4, 1));
        assert!(c
            .level_generators(1)
            .iter()
            .all(|g| i.contains(&s.mul_monomial(g))));
        assert!(!c
            .level_generators(0)
            .iter()
            .all(|g| i.contains(&s.mul_monomial(g))));
    }
}
