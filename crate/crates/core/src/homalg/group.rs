//! Finitely generated abelian groups as subquotients of ℤ^n.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::zlinalg::{lcm, rem, smith, Int, Lattice, Smith};

/// Isomorphism type `ℤ/d_1 ⊕ … ⊕ ℤ/d_t ⊕ ℤ^f` with `d_1 | d_2 | …`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupType {
    pub torsion: Vec<Int>,
    pub free_rank: usize,
}

impl GroupType {
    pub fn trivial() -> Self {
        GroupType {
            torsion: vec![],
            free_rank: 0,
        }
    }

    pub fn cyclic(n: Int) -> Self {
        if n == 1 {
            Self::trivial()
        } else if n == 0 {
            GroupType {
                torsion: vec![],
                free_rank: 1,
            }
        } else {
            GroupType {
                torsion: vec![n],
                free_rank: 0,
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.torsion.is_empty() && self.free_rank == 0
    }

    pub fn order(&self) -> Option<Int> {
        (self.free_rank == 0).then(|| self.torsion.iter().product())
    }

    /// Elementary divisors (prime powers), sorted; useful for comparing sums.
    pub fn elementary_divisors(&self) -> Vec<Int> {
        let mut out = Vec::new();
        for &d in &self.torsion {
            for (p, e) in crate::zlinalg::factor(d) {
                out.push(p.pow(e));
            }
        }
        out.sort();
        out
    }

    /// Builds the type from elementary divisors or arbitrary cyclic orders.
    pub fn from_cyclic_orders(orders: &[Int], free_rank: usize) -> Self {
        let mut rows = Vec::new();
        let n = orders.len();
        for (i, &d) in orders.iter().enumerate() {
            let mut r = vec![0; n];
            r[i] = d;
            rows.push(r);
        }
        let s = smith(&Lattice::new(n, &rows, 0));
        GroupType {
            torsion: s.torsion,
            free_rank: free_rank + s.free_rank,
        }
    }

    pub fn direct_sum(&self, other: &GroupType) -> GroupType {
        let mut orders = self.torsion.clone();
        orders.extend(&other.torsion);
        GroupType::from_cyclic_orders(&orders, self.free_rank + other.free_rank)
    }

    pub fn exponent(&self) -> Int {
        if self.free_rank > 0 {
            0
        } else {
            self.torsion.iter().fold(1, |a, &b| lcm(a, b))
        }
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("ℤ/{d}")).collect();
        match self.free_rank {
            0 => {}
            1 => parts.push("ℤ".into()),
            r => parts.push(format!("ℤ^{r}")),
        }
        write!(f, "{}", parts.join(" ⊕ "))
    }
}

/// `S / T` for lattices `T ⊆ S ⊆ ℤ^n`, with Smith coordinates.
#[derive(Clone, Debug)]
pub struct Subquotient {
    pub sub: Lattice,
    pub rel: Lattice,
    smith: Smith,
}

impl Subquotient {
    pub fn new(sub: Lattice, rel: Lattice) -> Self {
        debug_assert!(
            sub.contains_lattice(&rel),
            "relations must lie in the subgroup"
        );
        let r = sub.rank();
        let coords: Vec<Vec<Int>> = rel
            .basis()
            .iter()
            .map(|v| sub.coordinates(v).expect("relation outside subgroup"))
            .collect();
        let inner = Lattice::new(r, &coords, rel.modulus());
        let smith = smith(&inner);
        Subquotient { sub, rel, smith }
    }

    /// ℤ^n / rel.
    pub fn quotient(rel: Lattice) -> Self {
        Self::new(Lattice::full(rel.dim()), rel)
    }

    pub fn group_type(&self) -> GroupType {
        GroupType {
            torsion: self.smith.torsion.clone(),
            free_rank: self.smith.free_rank,
        }
    }

    pub fn order(&self) -> Option<Int> {
        self.smith.order()
    }

    pub fn is_zero(&self) -> bool {
        self.ngens() == 0
    }

    /// Number of Smith generators.
    pub fn ngens(&self) -> usize {
        self.smith.torsion.len() + self.smith.free_rank
    }

    /// Orders of the Smith generators (0 for free ones).
    pub fn gen_orders(&self) -> Vec<Int> {
        let mut v = self.smith.torsion.clone();
        v.extend(std::iter::repeat(0).take(self.smith.free_rank));
        v
    }

    /// Smith coordinates of `v ∈ S`, or `None` when `v ∉ S`.
    pub fn to_group(&self, v: &[Int]) -> Option<Vec<Int>> {
        let c = self.sub.coordinates(v)?;
        Some(self.smith.to_coords(&c))
    }

    /// A representative in ℤ^n of the element with Smith coordinates `y`.
    pub fn from_group(&self, y: &[Int]) -> Vec<Int> {
        let c = self.smith.from_coords(y, 0);
        let n = self.sub.dim();
        let mut out = vec![0; n];
        for (ci, row) in c.iter().zip(self.sub.basis()) {
            if *ci != 0 {
                for (o, x) in out.iter_mut().zip(row) {
                    *o += ci * x;
                }
            }
        }
        self.rel.reduce(&out)
    }

    /// Whether `v ∈ S` represents zero.
    pub fn is_zero_element(&self, v: &[Int]) -> bool {
        self.rel.contains(v)
    }

    pub fn generators(&self) -> Vec<Vec<Int>> {
        (0..self.ngens())
            .map(|j| {
                let mut y = vec![0; self.ngens()];
                y[j] = 1;
                self.from_group(&y)
            })
            .collect()
    }

    /// Reduces Smith coordinates into canonical range.
    pub fn normalize(&self, y: &[Int]) -> Vec<Int> {
        y.iter()
            .zip(self.gen_orders())
            .map(|(&a, d)| rem(a, d))
            .collect()
    }

    /// All elements as Smith coordinates, for finite groups.
    pub fn elements(&self) -> Vec<Vec<Int>> {
        let orders = self.gen_orders();
        assert!(orders.iter().all(|&d| d > 0), "infinite group");
        let mut out = vec![vec![]];
        for &d in &orders {
            let mut next = Vec::with_capacity(out.len() * d as usize);
            for v in &out {
                for a in 0..d {
                    let mut w: Vec<Int> = v.clone();
                    w.push(a);
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subquotient_of_multiples() {
        // 2ℤ / 12ℤ ≅ ℤ/6
        let s = Lattice::new(1, &[vec![2]], 0);
        let t = Lattice::new(1, &[vec![12]], 0);
        let q = Subquotient::new(s, t);
        assert_eq!(q.group_type(), GroupType::cyclic(6));
        let y = q.to_group(&[4]).unwrap();
        assert_eq!(
            q.normalize(&y),
            q.normalize(&q.to_group(&q.from_group(&y)).unwrap())
        );
    }

    #[test]
    fn cyclic_orders_combine() {
        let g = GroupType::from_cyclic_orders(&[4, 6], 0);
        assert_eq!(g.torsion, vec![2, 12]);
        assert_eq!(g.elementary_divisors(), vec![2, 3, 4]);
        assert_eq!(g.to_string(), "ℤ/2 ⊕ ℤ/12");
    }
}
