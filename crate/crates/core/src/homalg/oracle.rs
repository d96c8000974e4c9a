//! Brute-force classification of extensions `0 → N → E → M → 0` by factor sets.
//!
//! `M` is put on Smith generators `ĝ_i` of orders `d_i` with integer action
//! matrices `A_t`. An extension is pinned down by a lift of each `ĝ_i` to `E`,
//! which gives `a_i = d_i·ĝ_i ∈ N` and `b_{t,i} = ĝ_i·b_t − Σ_j A_t[i][j]·ĝ_j ∈ N`.
//! Valid data form a group `Z` under Baer sum; split data (those admitting a
//! module section) form the subgroup `B`, and `Ext¹ = Z/B`.

use std::collections::HashSet;

use super::group::GroupType;
use super::module::{Matrix, Module, Side};
use crate::error::{Error, Result};
use crate::zlinalg::{factor, identity, kernel_mod, vec_mat, Int, Lattice};

/// Above this many candidate data the valid set is found by linear algebra
/// instead of testing every candidate module.
const ENUMERATION_LIMIT: usize = 4096;

pub struct ExtOracle {
    n: Module,
    /// `M` rewritten on its Smith generators.
    m: Module,
    orders: Vec<Int>,
    k: usize,
    rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleReport {
    pub group_type: GroupType,
    /// `|Z|`: number of valid factor sets.
    pub cocycles: usize,
    /// `|B|`: number of split factor sets.
    pub split: usize,
    /// Whether `Z` was found by testing every candidate module.
    pub exhaustive: bool,
}

impl ExtOracle {
    pub fn new(m: &Module, n: &Module) -> Result<ExtOracle> {
        if m.side != n.side {
            return Err(Error::Unsupported("modules on different sides".into()));
        }
        if m.order().is_none() || n.order().is_none() {
            return Err(Error::FiniteOnly);
        }
        let (ms, _, _) = m.simplify();
        let orders = m.group().gen_orders();
        let k = orders.len();
        let rank = m.alg.rank;
        Ok(ExtOracle {
            n: n.clone(),
            m: ms,
            orders,
            k,
            rank,
        })
    }

    fn nd(&self) -> usize {
        self.n.dim()
    }

    fn blocks(&self) -> usize {
        self.k * self.rank
    }

    /// Block of `a_i` (t = 0) or `b_{t,i}`.
    fn block<'a>(&self, z: &'a [Int], t: usize, i: usize) -> &'a [Int] {
        let nd = self.nd();
        let b = t * self.k + i;
        &z[b * nd..(b + 1) * nd]
    }

    fn act_m(&self, t: usize) -> &Matrix {
        &self.m.act[t]
    }

    /// Integer vector `Σ c_r·A_r[i]` and N-part `Σ c_r·b_{r,i}` of `ĝ_i·(Σ c_r b_r)`.
    fn act_lift(&self, z: &[Int], i: usize, c: &[Int]) -> (Vec<Int>, Vec<Int>) {
        let mut g = vec![0; self.k];
        let mut nv = vec![0; self.nd()];
        for (r, &cr) in c.iter().enumerate() {
            if cr == 0 {
                continue;
            }
            for (gj, a) in g.iter_mut().zip(&self.act_m(r)[i]) {
                *gj += cr * a;
            }
            if r > 0 {
                for (x, y) in nv.iter_mut().zip(self.block(z, r, i)) {
                    *x += cr * y;
                }
            }
        }
        (g, nv)
    }

    /// `Σ_j (w_j / d_j)·a_j` for `w` divisible by the orders.
    fn carry(&self, z: &[Int], w: &[Int]) -> Vec<Int> {
        let mut out = vec![0; self.nd()];
        for (j, &wj) in w.iter().enumerate() {
            debug_assert_eq!(wj % self.orders[j], 0);
            let q = wj / self.orders[j];
            if q != 0 {
                for (x, y) in out.iter_mut().zip(self.block(z, 0, j)) {
                    *x += q * y;
                }
            }
        }
        out
    }

    /// The obstruction map: `z` is a valid factor set iff every entry vanishes in `N`.
    fn obstruction(&self, z: &[Int]) -> Vec<Int> {
        let n = &self.n;
        let mut out = Vec::new();
        let alg = &self.m.alg;
        let unit = |r: usize| {
            let mut e = vec![0; self.rank];
            e[r] = 1;
            e
        };
        for i in 0..self.k {
            let di = self.orders[i];
            // relation d_i ĝ_i = a_i must be stable under each b_t
            for t in 1..self.rank {
                let mut v: Vec<Int> = vec_mat(self.block(z, 0, i), &n.act[t])
                    .iter()
                    .map(|x| -x)
                    .collect();
                for (x, y) in v.iter_mut().zip(self.block(z, t, i)) {
                    *x += di * y;
                }
                let w: Vec<Int> = self.act_m(t)[i].iter().map(|a| di * a).collect();
                for (x, y) in v.iter_mut().zip(self.carry(z, &w)) {
                    *x += y;
                }
                out.extend(v);
            }
            // ring relations act as zero
            for rho in alg.relations.basis() {
                let (g, mut v) = self.act_lift(z, i, rho);
                for (x, y) in v.iter_mut().zip(self.carry(z, &g)) {
                    *x += y;
                }
                out.extend(v);
            }
            // associativity
            for s in 1..self.rank {
                for s2 in 1..self.rank {
                    let (g1, n1) = self.act_lift(z, i, &unit(s));
                    // (ĝ_i·s)·s2
                    let mut lhs_n = vec_mat(&n1, &n.act[s2]);
                    for (j, &c) in g1.iter().enumerate() {
                        if c != 0 {
                            for (x, y) in lhs_n.iter_mut().zip(self.block(z, s2, j)) {
                                *x += c * y;
                            }
                        }
                    }
                    let lhs_g = vec_mat(&g1, self.act_m(s2));
                    let prod = match self.m.side {
                        Side::Right => &alg.mul[s][s2],
                        Side::Left => &alg.mul[s2][s],
                    };
                    let (rhs_g, rhs_n) = self.act_lift(z, i, prod);
                    let w: Vec<Int> = lhs_g.iter().zip(&rhs_g).map(|(a, b)| a - b).collect();
                    let mut v: Vec<Int> = lhs_n.iter().zip(&rhs_n).map(|(a, b)| a - b).collect();
                    for (x, y) in v.iter_mut().zip(self.carry(z, &w)) {
                        *x += y;
                    }
                    out.extend(v);
                }
            }
        }
        out
    }

    fn obstruction_count(&self) -> usize {
        let nrel = self.m.alg.relations.basis().len();
        self.k * ((self.rank - 1) + nrel + (self.rank - 1) * (self.rank - 1))
    }

    /// The extension module `E` for factor set `z`, on `N ⊕ ℤ^k`.
    pub fn extension(&self, z: &[Int]) -> Module {
        let nd = self.nd();
        let dim = nd + self.k;
        let mut rows = Vec::new();
        for r in self.n.rel.basis() {
            let mut v = r.clone();
            v.resize(dim, 0);
            rows.push(v);
        }
        for i in 0..self.k {
            let mut v: Vec<Int> = self.block(z, 0, i).iter().map(|x| -x).collect();
            v.resize(dim, 0);
            v[nd + i] = self.orders[i];
            rows.push(v);
        }
        // exp(E) divides exp(N)·exp(M)
        let modulus = self.n.modulus() * self.m.modulus().max(1);
        let rel = Lattice::new(dim, &rows, modulus);
        let act = (0..self.rank)
            .map(|t| {
                if t == 0 {
                    return identity(dim);
                }
                let mut mat = Vec::with_capacity(dim);
                for r in &self.n.act[t] {
                    let mut v = r.clone();
                    v.resize(dim, 0);
                    mat.push(v);
                }
                for i in 0..self.k {
                    let mut v = self.block(z, t, i).to_vec();
                    v.extend(self.act_m(t)[i].iter().cloned());
                    mat.push(v);
                }
                mat
            })
            .collect();
        Module::new(self.m.alg.clone(), self.m.side, rel, act)
    }

    fn is_valid_by_construction(&self, z: &[Int]) -> bool {
        self.extension(z).check().is_ok()
    }

    /// The factor set obtained by moving the lifts by `n_i`.
    pub fn coboundary(&self, ns: &[Vec<Int>]) -> Vec<Int> {
        let nd = self.nd();
        let mut z = vec![0; self.blocks() * nd];
        for i in 0..self.k {
            for (x, y) in z[i * nd..(i + 1) * nd].iter_mut().zip(&ns[i]) {
                *x = self.orders[i] * y;
            }
            for t in 1..self.rank {
                let b = t * self.k + i;
                let mut v = vec_mat(&ns[i], &self.n.act[t]);
                for (j, nj) in ns.iter().enumerate() {
                    let c = self.act_m(t)[i][j];
                    if c != 0 {
                        for (x, y) in v.iter_mut().zip(nj) {
                            *x -= c * y;
                        }
                    }
                }
                z[b * nd..(b + 1) * nd].copy_from_slice(&v);
            }
        }
        z
    }

    fn key(&self, z: &[Int]) -> Vec<Int> {
        let nd = self.nd();
        if nd == 0 {
            return vec![];
        }
        z.chunks(nd).flat_map(|c| self.n.reduce(c)).collect()
    }

    fn tuples(&self) -> Vec<Vec<Vec<Int>>> {
        let elems = self.n.elements();
        let mut out: Vec<Vec<Vec<Int>>> = vec![vec![]];
        for _ in 0..self.k {
            let mut next = Vec::with_capacity(out.len() * elems.len());
            for t in &out {
                for e in &elems {
                    let mut t2 = t.clone();
                    t2.push(e.clone());
                    next.push(t2);
                }
            }
            out = next;
        }
        out
    }

    /// Searches for a module section of `E_z → M`.
    pub fn splits(&self, z: &[Int]) -> bool {
        let e = self.extension(z);
        let nd = self.nd();
        let lift = |ns: &[Vec<Int>], i: usize| {
            let mut v = ns[i].clone();
            v.resize(nd + self.k, 0);
            v[nd + i] += 1;
            v
        };
        self.tuples().into_iter().any(|ns| {
            (0..self.k).all(|i| {
                let s = lift(&ns, i);
                let di: Vec<Int> = s.iter().map(|x| x * self.orders[i]).collect();
                if !e.is_zero_elem(&di) {
                    return false;
                }
                (1..self.rank).all(|t| {
                    let mut v = vec_mat(&s, &e.act[t]);
                    for j in 0..self.k {
                        let c = self.act_m(t)[i][j];
                        if c != 0 {
                            for (x, y) in v.iter_mut().zip(lift(&ns, j)) {
                                *x -= c * y;
                            }
                        }
                    }
                    e.is_zero_elem(&v)
                })
            })
        })
    }

    fn data_lattice(&self) -> Lattice {
        let nd = self.nd();
        let blocks = self.blocks();
        let mut rows = Vec::new();
        for b in 0..blocks {
            for r in self.n.rel.basis() {
                let mut v = vec![0; blocks * nd];
                v[b * nd..(b + 1) * nd].copy_from_slice(r);
                rows.push(v);
            }
        }
        Lattice::new(blocks * nd, &rows, self.n.modulus())
    }

    /// All valid factor sets as canonical keys.
    pub fn cocycles(&self) -> (Vec<Vec<Int>>, bool) {
        let nd = self.nd();
        let blocks = self.blocks();
        let total = blocks * nd;
        let nsize = self.n.order().unwrap() as f64;
        let candidates = nsize.powi(blocks as i32);
        if candidates <= ENUMERATION_LIMIT as f64 {
            let elems = self.n.elements();
            let mut out = Vec::new();
            let mut z: Vec<Vec<Int>> = vec![vec![]];
            for _ in 0..blocks {
                let mut next = Vec::new();
                for v in &z {
                    for e in &elems {
                        let mut w = v.clone();
                        w.extend(e);
                        next.push(w);
                    }
                }
                z = next;
            }
            for v in z {
                if self.is_valid_by_construction(&v) {
                    out.push(self.key(&v));
                }
            }
            return (out, true);
        }
        let count = self.obstruction_count();
        let rows: Matrix = (0..total)
            .map(|u| {
                let mut e = vec![0; total];
                e[u] = 1;
                self.obstruction(&e)
            })
            .collect();
        let target_rows: Vec<Vec<Int>> = (0..count)
            .flat_map(|c| {
                self.n.rel.basis().iter().map(move |r| {
                    let mut v = vec![0; count * nd];
                    v[c * nd..(c + 1) * nd].copy_from_slice(r);
                    v
                })
            })
            .collect();
        let target = Lattice::new(count * nd, &target_rows, self.n.modulus());
        let data = self.data_lattice();
        let zl = kernel_mod(&rows, &target, self.n.modulus()).sum(&data);
        let sq = super::group::Subquotient::new(zl, data);
        let out: Vec<Vec<Int>> = sq
            .elements()
            .iter()
            .map(|y| self.key(&sq.from_group(y)))
            .collect();
        // every generator must give a genuine module
        for g in sq.generators() {
            assert!(
                self.is_valid_by_construction(&g),
                "linear solution is not a module"
            );
        }
        (out, false)
    }

    /// All split factor sets.
    pub fn split_set(&self) -> HashSet<Vec<Int>> {
        self.tuples()
            .iter()
            .map(|ns| self.key(&self.coboundary(ns)))
            .collect()
    }

    pub fn run(&self) -> OracleReport {
        let (z, exhaustive) = self.cocycles();
        let b = self.split_set();
        debug_assert!(b.iter().all(|x| z.contains(x)));
        let index = z.len() / b.len();
        let mut orders = Vec::new();
        for (p, e) in factor(index as Int) {
            // log_p |G[p^j]| for j = 0..=e
            let mut logs = vec![0u32];
            let mut pj: Int = 1;
            for _ in 0..e {
                pj *= p;
                let killed = z
                    .iter()
                    .filter(|v| {
                        let w: Vec<Int> = v.iter().map(|x| x * pj).collect();
                        b.contains(&self.key(&w))
                    })
                    .count()
                    / b.len();
                logs.push(log(killed as Int, p));
            }
            let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
            for j in 0..at_least.len() {
                let next = at_least.get(j + 1).copied().unwrap_or(0);
                for _ in 0..(at_least[j] - next) {
                    orders.push(p.pow(j as u32 + 1));
                }
            }
        }
        OracleReport {
            group_type: GroupType::from_cyclic_orders(&orders, 0),
            cocycles: z.len(),
            split: b.len(),
            exhaustive,
        }
    }
}

fn log(mut x: Int, p: Int) -> u32 {
    let mut e = 0;
    while x > 1 {
        assert_eq!(x % p, 0, "torsion count is not a power of p");
        x /= p;
        e += 1;
    }
    e
}

/// `Ext¹(M, N)` by factor-set enumeration.
pub fn brute_force_ext1(m: &Module, n: &Module) -> Result<GroupType> {
    Ok(ExtOracle::new(m, n)?.run().group_type)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::homalg::functors::ext;
    use crate::ring::{Field, RingHandle};

    fn zmod(h: RingHandle, d: Int) -> Module {
        let a = Arc::new(h.zalg().unwrap());
        Module::cyclic(
            a.clone(),
            Side::Right,
            &Lattice::new(1, &[vec![d]], a.characteristic()),
        )
    }

    #[test]
    fn z12_mod_two_self_extensions() {
        let h = RingHandle::IntegersMod(12);
        let m = zmod(h, 2);
        let o = ExtOracle::new(&m, &m).unwrap();
        let r = o.run();
        assert_eq!(r.group_type, GroupType::cyclic(2));
        assert!(r.exhaustive);
        // ℤ/4 is the nonsplit one; ℤ/2 ⊕ ℤ/2 splits
        assert!(o.splits(&[0]));
        assert!(!o.splits(&[1]));
    }

    #[test]
    fn agrees_with_resolution_over_integers_mod() {
        let h = RingHandle::IntegersMod(12);
        for a in [1, 2, 3, 4, 6, 12] {
            for b in [2, 3, 4, 6, 12] {
                let (m, n) = (zmod(h, a), zmod(h, b));
                let res = ext(1, &m, &n).unwrap().group_type();
                assert_eq!(brute_force_ext1(&m, &n).unwrap(), res, "Ext¹(ℤ/{a}, ℤ/{b})");
            }
        }
    }

    #[test]
    fn triangular_simple_modules() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let a = Arc::new(h.zalg().unwrap());
        let r = Module::free(a.clone(), Side::Right, 1);
        let ideal = |v: Vec<Vec<Int>>| Lattice::new(3, &v, 2);
        // S1 = R / span{e11, e12}: e11 acts by 0; S2 = R / span{e12, e22}: e11 acts by 1
        let s1 = r.quotient(&ideal(vec![vec![0, 1, 0], vec![0, 0, 1]])).0;
        let s2 = r.quotient(&ideal(vec![vec![0, 0, 1], vec![1, 1, 0]])).0;
        for (m, n) in [(&s1, &s2), (&s2, &s1), (&s1, &s1), (&s2, &s2)] {
            let res = ext(1, m, n).unwrap().group_type();
            let o = ExtOracle::new(m, n).unwrap();
            assert_eq!(o.run().group_type, res);
        }
        let nonzero = [(&s1, &s2), (&s2, &s1)]
            .iter()
            .filter(|(m, n)| !ext(1, m, n).unwrap().is_zero())
            .count();
        assert_eq!(nonzero, 1);
    }

    #[test]
    fn splitting_search_matches_coboundaries() {
        let h = RingHandle::IntegersMod(12);
        let m = zmod(h, 4);
        let n = zmod(h, 6);
        let o = ExtOracle::new(&m, &n).unwrap();
        let (z, _) = o.cocycles();
        let b = o.split_set();
        for v in z {
            assert_eq!(o.splits(&v), b.contains(&v));
        }
    }
}
