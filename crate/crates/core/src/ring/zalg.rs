//! Rings presented as ℤ-algebras: ℤ^rank modulo additive relations, with
//! structure constants on a basis whose first element is 1.

use super::{Field, RingElement, RingHandle};
use crate::zlinalg::{vec_mat, Int, Lattice};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZAlg {
    pub handle: RingHandle,
    pub rank: usize,
    /// Additive relations among the basis elements.
    pub relations: Lattice,
    /// `mul[i][j]` holds the coordinates of `b_i · b_j`.
    pub mul: Vec<Vec<Vec<Int>>>,
}

impl ZAlg {
    pub fn of(handle: RingHandle) -> Option<ZAlg> {
        let one = |n: Int| vec![vec![vec![n]]];
        let (rank, relations, mul) = match handle {
            RingHandle::Integers => (1, Lattice::zero(1), one(1)),
            RingHandle::IntegersMod(n) => (1, Lattice::scaled(1, n), one(1)),
            RingHandle::QuadraticOrder(d) => {
                let mul = vec![vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1], vec![d, 0]]];
                (2, Lattice::zero(2), mul)
            }
            RingHandle::UpperTriangular2(Field::PrimeField(p)) => {
                // basis 1, e11, e12
                let mul = vec![
                    vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
                    vec![vec![0, 1, 0], vec![0, 1, 0], vec![0, 0, 1]],
                    vec![vec![0, 0, 1], vec![0, 0, 0], vec![0, 0, 0]],
                ];
                (3, Lattice::scaled(3, p), mul)
            }
            _ => return None,
        };
        Some(ZAlg {
            handle,
            rank,
            relations,
            mul,
        })
    }

    /// Exponent of the additive group, 0 when infinite.
    pub fn characteristic(&self) -> Int {
        self.relations.modulus()
    }

    pub fn reduce(&self, v: &[Int]) -> Vec<Int> {
        self.relations.reduce(v)
    }

    pub fn mul(&self, x: &[Int], y: &[Int]) -> Vec<Int> {
        let mut out = vec![0; self.rank];
        for (i, xi) in x.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if *yj == 0 {
                    continue;
                }
                for (o, c) in out.iter_mut().zip(&self.mul[i][j]) {
                    *o += xi * yj * c;
                }
            }
        }
        self.reduce(&out)
    }

    pub fn one(&self) -> Vec<Int> {
        let mut e = vec![0; self.rank];
        e[0] = 1;
        e
    }

    pub fn basis_element(&self, i: usize) -> Vec<Int> {
        let mut e = vec![0; self.rank];
        e[i] = 1;
        e
    }

    /// Row `k` is `b_k · x`: the matrix of right multiplication by `x`.
    pub fn right_mult(&self, x: &[Int]) -> Vec<Vec<Int>> {
        (0..self.rank)
            .map(|k| self.mul(&self.basis_element(k), x))
            .collect()
    }

    /// Row `k` is `x · b_k`: the matrix of left multiplication by `x`.
    pub fn left_mult(&self, x: &[Int]) -> Vec<Vec<Int>> {
        (0..self.rank)
            .map(|k| self.mul(x, &self.basis_element(k)))
            .collect()
    }

    pub fn element(&self, v: &[Int]) -> RingElement {
        RingElement::from_coords(self.handle, &self.reduce(v))
    }

    /// Image of `v` under the linear map with the given matrix.
    pub fn apply(&self, v: &[Int], m: &[Vec<Int>]) -> Vec<Int> {
        self.reduce(&vec_mat(v, m))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_constants_match_element_arithmetic() {
        for h in [
            RingHandle::Integers,
            RingHandle::IntegersMod(12),
            RingHandle::QuadraticOrder(-5),
            RingHandle::UpperTriangular2(Field::PrimeField(2)),
        ] {
            let z = ZAlg::of(h).unwrap();
            let samples: Vec<RingElement> = match h.elements() {
                Some(v) => v,
                None => {
                    let g = h.generators();
                    let mut v = g.clone();
                    for a in &g {
                        for b in &g {
                            v.push(a.mul(b).add(&h.from_int(3)));
                        }
                    }
                    v
                }
            };
            for a in &samples {
                for b in &samples {
                    assert_eq!(z.element(&z.mul(&a.coords(), &b.coords())), a.mul(b));
                }
            }
        }
    }
}
