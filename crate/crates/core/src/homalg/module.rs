//! Modules over a ℤ-algebra, stored as ℤ^n / L with one action matrix per
//! basis element of the ring.
//!
//! Elements are row vectors; the basis element `b_i` acts by `x ↦ x·act[i]`
//! on either side. For right modules `act[i]·act[j] = act[b_i b_j]`, for
//! left modules `act[j]·act[i] = act[b_i b_j]`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::group::{GroupType, Subquotient};
use crate::ring::ZAlg;
use crate::zlinalg::{identity, kernel_mod, mat_mul, vec_mat, Int, Lattice};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

pub type Matrix = Vec<Vec<Int>>;

#[derive(Clone, Debug)]
pub struct Module {
    pub alg: Arc<ZAlg>,
    pub side: Side,
    pub rel: Lattice,
    pub act: Vec<Matrix>,
}

impl Module {
    pub fn new(alg: Arc<ZAlg>, side: Side, rel: Lattice, act: Vec<Matrix>) -> Module {
        Module {
            alg,
            side,
            rel,
            act,
        }
    }

    pub fn dim(&self) -> usize {
        self.rel.dim()
    }

    /// A multiple of the exponent, or 0 when the module may be infinite.
    pub fn modulus(&self) -> Int {
        self.rel.modulus()
    }

    pub fn zero(alg: Arc<ZAlg>, side: Side) -> Module {
        let k = alg.rank;
        Module {
            alg,
            side,
            rel: Lattice::zero(0),
            act: vec![vec![]; k],
        }
    }

    /// The free module of the given rank.
    pub fn free(alg: Arc<ZAlg>, side: Side, rank: usize) -> Module {
        let k = alg.rank;
        let n = k * rank;
        let mut rel_rows = Vec::new();
        for j in 0..rank {
            for b in alg.relations.basis() {
                let mut r = vec![0; n];
                r[j * k..(j + 1) * k].copy_from_slice(b);
                rel_rows.push(r);
            }
        }
        let rel = Lattice::new(n, &rel_rows, alg.characteristic());
        let act = (0..k)
            .map(|i| {
                let bi = alg.basis_element(i);
                let block = match side {
                    Side::Right => alg.right_mult(&bi),
                    Side::Left => alg.left_mult(&bi),
                };
                block_diag(&block, rank)
            })
            .collect();
        Module {
            alg,
            side,
            rel,
            act,
        }
    }

    /// `R / I` for a one-sided ideal given as a lattice in ring coordinates.
    pub fn cyclic(alg: Arc<ZAlg>, side: Side, ideal: &Lattice) -> Module {
        let f = Module::free(alg, side, 1);
        f.quotient(ideal).0
    }

    pub fn reduce(&self, x: &[Int]) -> Vec<Int> {
        self.rel.reduce(x)
    }

    pub fn is_zero_elem(&self, x: &[Int]) -> bool {
        self.rel.contains(x)
    }

    pub fn eq_elem(&self, x: &[Int], y: &[Int]) -> bool {
        self.is_zero_elem(&sub(x, y))
    }

    /// `x · b_i` (or `b_i · x` for left modules).
    pub fn act_basis(&self, x: &[Int], i: usize) -> Vec<Int> {
        self.reduce(&vec_mat(x, &self.act[i]))
    }

    /// Action of the ring element with coordinates `r`.
    pub fn act(&self, x: &[Int], r: &[Int]) -> Vec<Int> {
        self.reduce(&vec_mat(x, &self.action_matrix(r)))
    }

    pub fn action_matrix(&self, r: &[Int]) -> Matrix {
        let n = self.dim();
        let mut m = vec![vec![0; n]; n];
        for (i, ri) in r.iter().enumerate() {
            if *ri != 0 {
                for a in 0..n {
                    for b in 0..n {
                        m[a][b] += ri * self.act[i][a][b];
                    }
                }
            }
        }
        m
    }

    /// Checks the module axioms; returns a description of the first failure.
    pub fn check(&self) -> Result<(), String> {
        let n = self.dim();
        let k = self.alg.rank;
        if self.act.len() != k {
            return Err("wrong number of action matrices".into());
        }
        let same = |a: &Matrix, b: &Matrix| (0..n).all(|r| self.eq_elem(&a[r], &b[r]));
        if !same(&self.act[0], &identity(n)) {
            return Err("1 does not act as the identity".into());
        }
        for i in 0..k {
            for l in self.rel.basis() {
                if !self.is_zero_elem(&vec_mat(l, &self.act[i])) {
                    return Err(format!("basis element {i} does not preserve relations"));
                }
            }
        }
        for r in self.alg.relations.basis() {
            let m = self.action_matrix(r);
            if !(0..n).all(|row| self.is_zero_elem(&m[row])) {
                return Err("ring relation does not act as zero".into());
            }
        }
        for i in 0..k {
            for j in 0..k {
                let lhs = match self.side {
                    Side::Right => mat_mul(&self.act[i], &self.act[j]),
                    Side::Left => mat_mul(&self.act[j], &self.act[i]),
                };
                let rhs = self.action_matrix(&self.alg.mul[i][j]);
                if !same(&lhs, &rhs) {
                    return Err(format!("associativity fails for basis pair ({i}, {j})"));
                }
            }
        }
        Ok(())
    }

    pub fn group(&self) -> Subquotient {
        Subquotient::quotient(self.rel.clone())
    }

    pub fn group_type(&self) -> GroupType {
        self.group().group_type()
    }

    pub fn order(&self) -> Option<Int> {
        self.rel.index()
    }

    pub fn is_zero_module(&self) -> bool {
        self.rel.is_full_rank() && self.order() == Some(1)
    }

    /// Canonical representatives of all elements of a finite module.
    pub fn elements(&self) -> Vec<Vec<Int>> {
        self.rel.quotient_elements()
    }

    /// The R-submodule generated by `gens`, as a lattice containing `rel`.
    pub fn span(&self, gens: &[Vec<Int>]) -> Lattice {
        let mut rows = Vec::new();
        for g in gens {
            for a in &self.act {
                rows.push(vec_mat(g, a));
            }
        }
        self.rel.add_rows(&rows)
    }

    /// A small set of R-module generators of the submodule `s ⊇ rel`.
    pub fn generators_of(&self, s: &Lattice) -> Vec<Vec<Int>> {
        let mut cur = self.rel.clone();
        let mut gens = Vec::new();
        // Try Smith generators of s/rel first: they tend to be fewer.
        let sq = Subquotient::new(s.clone(), self.rel.clone());
        let mut candidates = sq.generators();
        candidates.extend(s.basis().iter().cloned());
        for v in candidates {
            if cur == *s {
                break;
            }
            if !cur.contains(&v) {
                gens.push(v.clone());
                let rows: Vec<Vec<Int>> = self.act.iter().map(|a| vec_mat(&v, a)).collect();
                cur = cur.add_rows(&rows);
            }
        }
        gens
    }

    pub fn generators(&self) -> Vec<Vec<Int>> {
        self.generators_of(&Lattice::full(self.dim()))
    }

    /// The quotient by an R-stable lattice `s ⊇ rel`, with its projection.
    pub fn quotient(&self, s: &Lattice) -> (Module, ModuleMap) {
        let s = s.sum(&self.rel);
        let q = Module {
            alg: self.alg.clone(),
            side: self.side,
            rel: s,
            act: self.act.clone(),
        };
        let proj = ModuleMap::new(self.clone(), q.clone(), identity(self.dim()));
        (q, proj)
    }

    /// The submodule given by an R-stable lattice `s ⊇ rel`, with its inclusion.
    pub fn submodule(&self, s: &Lattice) -> (Module, ModuleMap) {
        let s = s.sum(&self.rel);
        let basis = s.basis().to_vec();
        let r = basis.len();
        let coords = |v: &[Int]| s.coordinates(v).expect("vector in submodule");
        let rel_rows: Vec<Vec<Int>> = self.rel.basis().iter().map(|v| coords(v)).collect();
        let rel = Lattice::new(r, &rel_rows, self.rel.modulus());
        let act = self
            .act
            .iter()
            .map(|a| basis.iter().map(|b| coords(&vec_mat(b, a))).collect())
            .collect();
        let m = Module {
            alg: self.alg.clone(),
            side: self.side,
            rel,
            act,
        };
        let incl = ModuleMap::new(m.clone(), self.clone(), basis);
        m.simplify_with(incl)
    }

    /// An isomorphic module on Smith generators, with maps both ways.
    pub fn simplify(&self) -> (Module, ModuleMap, ModuleMap) {
        let sq = self.group();
        let gens = sq.generators();
        let k = gens.len();
        let orders = sq.gen_orders();
        let mut rel_rows = Vec::new();
        for (j, &d) in orders.iter().enumerate() {
            if d > 0 {
                let mut r = vec![0; k];
                r[j] = d;
                rel_rows.push(r);
            }
        }
        let modulus = if orders.iter().all(|&d| d > 0) {
            self.modulus()
        } else {
            0
        };
        let rel = Lattice::new(k, &rel_rows, if k == 0 { 0 } else { modulus });
        let to = |v: &[Int]| sq.to_group(v).expect("in ambient");
        let act = self
            .act
            .iter()
            .map(|a| gens.iter().map(|g| to(&vec_mat(g, a))).collect())
            .collect();
        let m = Module {
            alg: self.alg.clone(),
            side: self.side,
            rel,
            act,
        };
        let fwd: Matrix = (0..self.dim())
            .map(|i| {
                let mut e = vec![0; self.dim()];
                e[i] = 1;
                to(&e)
            })
            .collect();
        let f = ModuleMap::new(self.clone(), m.clone(), fwd);
        let b = ModuleMap::new(m.clone(), self.clone(), gens);
        (m, f, b)
    }

    fn simplify_with(&self, incl: ModuleMap) -> (Module, ModuleMap) {
        let (m, _, back) = self.simplify();
        let incl = back.then(&incl);
        (m, incl)
    }

    pub fn direct_sum(parts: &[Module]) -> (Module, Vec<ModuleMap>, Vec<ModuleMap>) {
        assert!(!parts.is_empty());
        let alg = parts[0].alg.clone();
        let side = parts[0].side;
        let n: usize = parts.iter().map(|m| m.dim()).sum();
        let mut rel_rows = Vec::new();
        let mut offs = Vec::new();
        let mut off = 0;
        let mut modulus: Int = 1;
        for m in parts {
            offs.push(off);
            for b in m.rel.basis() {
                let mut r = vec![0; n];
                r[off..off + m.dim()].copy_from_slice(b);
                rel_rows.push(r);
            }
            modulus = if modulus == 0 || m.modulus() == 0 {
                0
            } else {
                crate::zlinalg::lcm(modulus, m.modulus())
            };
            off += m.dim();
        }
        let rel = Lattice::new(n, &rel_rows, if n == 0 { 0 } else { modulus });
        let act = (0..alg.rank)
            .map(|i| {
                let mut a = vec![vec![0; n]; n];
                for (m, &o) in parts.iter().zip(&offs) {
                    for r in 0..m.dim() {
                        for c in 0..m.dim() {
                            a[o + r][o + c] = m.act[i][r][c];
                        }
                    }
                }
                a
            })
            .collect();
        let sum = Module {
            alg,
            side,
            rel,
            act,
        };
        let mut inj = Vec::new();
        let mut proj = Vec::new();
        for (m, &o) in parts.iter().zip(&offs) {
            let mi: Matrix = (0..m.dim())
                .map(|r| {
                    let mut v = vec![0; n];
                    v[o + r] = 1;
                    v
                })
                .collect();
            inj.push(ModuleMap::new(m.clone(), sum.clone(), mi));
            let mp: Matrix = (0..n)
                .map(|r| {
                    let mut v = vec![0; m.dim()];
                    if r >= o && r < o + m.dim() {
                        v[r - o] = 1;
                    }
                    v
                })
                .collect();
            proj.push(ModuleMap::new(sum.clone(), m.clone(), mp));
        }
        (sum, inj, proj)
    }

    pub fn power(&self, k: usize) -> Module {
        if k == 0 {
            return Module::zero(self.alg.clone(), self.side);
        }
        Module::direct_sum(&vec![self.clone(); k]).0
    }

    /// The annihilated submodule `{x | x·r = 0 for all r in gens}`.
    pub fn annihilated_by(&self, gens: &[Vec<Int>]) -> Lattice {
        let mut cur = Lattice::full(self.dim());
        for r in gens {
            let k = kernel_mod(&self.action_matrix(r), &self.rel, self.modulus());
            cur = cur.intersect(&k);
        }
        cur
    }

    /// `x·I` summed over the ideal's ℤ-basis: the lattice of `M·I`.
    pub fn times_ideal(&self, ideal: &Lattice) -> Lattice {
        let mut rows = Vec::new();
        for r in ideal.basis() {
            let a = self.action_matrix(r);
            rows.extend(a.into_iter());
        }
        self.rel.add_rows(&rows)
    }

    /// Same module regarded with the relations reduced to canonical vectors.
    pub fn same_shape(&self, other: &Module) -> bool {
        self.dim() == other.dim() && self.rel == other.rel && self.act == other.act
    }
}

fn sub(x: &[Int], y: &[Int]) -> Vec<Int> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

fn block_diag(block: &Matrix, copies: usize) -> Matrix {
    let k = block.len();
    let n = k * copies;
    let mut m = vec![vec![0; n]; n];
    for c in 0..copies {
        for r in 0..k {
            for s in 0..k {
                m[c * k + r][c * k + s] = block[r][s];
            }
        }
    }
    m
}

/// An R-linear map given by the images of the ℤ-generators of the source.
#[derive(Clone, Debug)]
pub struct ModuleMap {
    pub source: Module,
    pub target: Module,
    pub matrix: Matrix,
}

impl ModuleMap {
    pub fn new(source: Module, target: Module, matrix: Matrix) -> ModuleMap {
        debug_assert_eq!(matrix.len(), source.dim());
        ModuleMap {
            source,
            target,
            matrix,
        }
    }

    pub fn zero(source: Module, target: Module) -> ModuleMap {
        let m = vec![vec![0; target.dim()]; source.dim()];
        ModuleMap::new(source, target, m)
    }

    pub fn identity(m: &Module) -> ModuleMap {
        ModuleMap::new(m.clone(), m.clone(), identity(m.dim()))
    }

    pub fn apply(&self, x: &[Int]) -> Vec<Int> {
        if self.target.dim() == 0 {
            return vec![];
        }
        self.target.reduce(&vec_mat(x, &self.matrix))
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ModuleMap) -> ModuleMap {
        let m = if self.matrix.is_empty() {
            vec![]
        } else if other.matrix.is_empty() {
            vec![vec![0; other.target.dim()]; self.source.dim()]
        } else {
            mat_mul(&self.matrix, &other.matrix)
        };
        ModuleMap::new(self.source.clone(), other.target.clone(), m)
    }

    pub fn check(&self) -> Result<(), String> {
        let t = &self.target;
        for l in self.source.rel.basis() {
            if !t.is_zero_elem(&vec_mat(l, &self.matrix)) {
                return Err("relations are not preserved".into());
            }
        }
        for i in 0..self.source.alg.rank {
            for r in 0..self.source.dim() {
                let lhs = vec_mat(
                    &vec_mat(&identity_row(self.source.dim(), r), &self.source.act[i]),
                    &self.matrix,
                );
                let rhs = vec_mat(&self.matrix[r], &t.act[i]);
                if !t.eq_elem(&lhs, &rhs) {
                    return Err(format!("not linear for basis element {i}"));
                }
            }
        }
        Ok(())
    }

    pub fn kernel_lattice(&self) -> Lattice {
        if self.target.dim() == 0 {
            return Lattice::full(self.source.dim());
        }
        kernel_mod(&self.matrix, &self.target.rel, self.source.modulus()).sum(&self.source.rel)
    }

    pub fn image_lattice(&self) -> Lattice {
        self.target.rel.add_rows(&self.matrix)
    }

    pub fn kernel(&self) -> (Module, ModuleMap) {
        self.source.submodule(&self.kernel_lattice())
    }

    pub fn image(&self) -> (Module, ModuleMap) {
        self.target.submodule(&self.image_lattice())
    }

    pub fn cokernel(&self) -> (Module, ModuleMap) {
        self.target.quotient(&self.image_lattice())
    }

    pub fn is_injective(&self) -> bool {
        self.kernel_lattice() == self.source.rel
    }

    pub fn is_surjective(&self) -> bool {
        self.image_lattice().is_full_rank() && self.image_lattice().index() == Some(1)
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective() && self.is_surjective()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| self.target.is_zero_elem(r))
    }

    /// Equality as maps.
    pub fn same_as(&self, other: &ModuleMap) -> bool {
        self.matrix
            .iter()
            .zip(&other.matrix)
            .all(|(a, b)| self.target.eq_elem(a, b))
    }

    /// A preimage of `y` under the map, if any.
    pub fn preimage(&self, y: &[Int]) -> Option<Vec<Int>> {
        crate::zlinalg::solve_mod(&self.matrix, y, &self.target.rel, self.source.modulus())
    }
}

fn identity_row(n: usize, r: usize) -> Vec<Int> {
    let mut e = vec![0; n];
    e[r] = 1;
    e
}
