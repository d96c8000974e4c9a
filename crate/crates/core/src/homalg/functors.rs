//! Free resolutions, Hom, Ext, tensor products and extension classes.

use super::enumerate::abelian_group;
use super::group::Subquotient;
use super::module::{Matrix, Module, ModuleMap, Side};
use crate::error::{Error, Result};
use crate::zlinalg::{gcd, kernel_mod, vec_mat, Int, Lattice};

/// Default ceiling on the ℤ-dimension of any free module in a resolution.
pub const DEFAULT_BUDGET: usize = 4096;

/// `… → F_1 → F_0 → M → 0` with explicit generator images.
#[derive(Clone, Debug)]
pub struct FreeResolution {
    pub module: Module,
    pub free: Vec<Module>,
    /// `gens[k][j]`: image of the j-th basis element of `F_k`, in `F_{k-1}`
    /// coordinates (in `M` coordinates for `k = 0`).
    pub gens: Vec<Vec<Vec<Int>>>,
}

/// ℤ-matrix of the map `F → X` sending the free generators to `gens`.
pub fn free_map_matrix(x: &Module, gens: &[Vec<Int>]) -> Matrix {
    let k = x.alg.rank;
    let mut rows = Vec::with_capacity(gens.len() * k);
    for g in gens {
        for i in 0..k {
            rows.push(vec_mat(g, &x.act[i]));
        }
    }
    rows
}

/// `Hom(F, N) → Hom(F', N)` for the map `F' → F` of free modules sending
/// the j-th generator of `F'` to `gens[j]` (coordinates in `F` of rank
/// `source_rank`), as a ℤ-matrix on `N^{source_rank} → N^{gens.len()}`.
pub fn hom_matrix(gens: &[Vec<Int>], source_rank: usize, n: &Module) -> Matrix {
    let m = n.dim();
    let ring_rank = n.alg.rank;
    let mut out = vec![vec![0; m * gens.len()]; m * source_rank];
    for (j, g) in gens.iter().enumerate() {
        // g: coefficients c[l*rank + i] of e_l·b_i
        for l in 0..source_rank {
            for i in 0..ring_rank {
                let c = g[l * ring_rank + i];
                if c == 0 {
                    continue;
                }
                for a in 0..m {
                    for b in 0..m {
                        out[l * m + a][j * m + b] += c * n.act[i][a][b];
                    }
                }
            }
        }
    }
    out
}

impl FreeResolution {
    pub fn new(m: &Module, length: usize) -> Result<FreeResolution> {
        Self::with_budget(m, length, DEFAULT_BUDGET)
    }

    pub fn with_budget(m: &Module, length: usize, budget: usize) -> Result<FreeResolution> {
        let alg = m.alg.clone();
        let side = m.side;
        let g0 = m.generators();
        let mut free = vec![Module::free(alg.clone(), side, g0.len())];
        let mut gens = vec![g0];
        let mut target = m.clone();
        for _ in 0..length {
            let f = free.last().unwrap().clone();
            if f.dim() > budget {
                return Err(Error::BudgetExceeded(format!(
                    "free module of ℤ-rank {} > {budget}",
                    f.dim()
                )));
            }
            let mat = free_map_matrix(&target, gens.last().unwrap());
            let d = ModuleMap::new(f.clone(), target.clone(), mat);
            let k = d.kernel_lattice();
            let next = f.generators_of(&k);
            free.push(Module::free(alg.clone(), side, next.len()));
            gens.push(next);
            target = f;
        }
        Ok(FreeResolution {
            module: m.clone(),
            free,
            gens,
        })
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    pub fn rank(&self, k: usize) -> usize {
        self.gens[k].len()
    }

    /// The differential `F_k → F_{k-1}` (the augmentation for `k = 0`).
    pub fn differential(&self, k: usize) -> ModuleMap {
        let target = if k == 0 {
            self.module.clone()
        } else {
            self.free[k - 1].clone()
        };
        let mat = free_map_matrix(&target, &self.gens[k]);
        ModuleMap::new(self.free[k].clone(), target, mat)
    }
}

/// The cochain complex `Hom(F_•, N)` with `Hom(F_k, N) = N^{rank F_k}`.
#[derive(Clone, Debug)]
pub struct HomComplex {
    pub res: FreeResolution,
    pub target: Module,
    /// `terms[k] = N^{rank F_k}`.
    pub terms: Vec<Module>,
}

impl HomComplex {
    pub fn new(res: FreeResolution, target: Module) -> HomComplex {
        assert_eq!(
            res.module.side, target.side,
            "Hom needs modules on the same side"
        );
        let terms = (0..res.len()).map(|k| target.power(res.rank(k))).collect();
        HomComplex { res, target, terms }
    }

    /// The coboundary `Hom(F_{k-1}, N) → Hom(F_k, N)` as a ℤ-matrix.
    pub fn coboundary(&self, k: usize) -> Matrix {
        hom_matrix(&self.res.gens[k], self.res.rank(k - 1), &self.target)
    }

    pub fn cocycles(&self, k: usize) -> Lattice {
        let term = &self.terms[k];
        if k + 1 >= self.res.len() {
            panic!("resolution too short for degree {k}");
        }
        let next = &self.terms[k + 1];
        if next.dim() == 0 {
            return Lattice::full(term.dim());
        }
        kernel_mod(&self.coboundary(k + 1), &next.rel, term.modulus()).sum(&term.rel)
    }

    pub fn coboundaries(&self, k: usize) -> Lattice {
        let term = &self.terms[k];
        if k == 0 {
            return term.rel.clone();
        }
        term.rel.add_rows(&self.coboundary(k))
    }

    pub fn cohomology(&self, k: usize) -> Subquotient {
        Subquotient::new(self.cocycles(k), self.coboundaries(k))
    }

    /// The module map `M → N` represented by a 0-cocycle.
    pub fn cocycle_to_map(&self, c: &[Int]) -> ModuleMap {
        let m = &self.res.module;
        let aug = self.res.differential(0);
        let n = &self.target;
        let rank = n.alg.rank;
        let mut rows = Vec::with_capacity(m.dim());
        for a in 0..m.dim() {
            let mut e = vec![0; m.dim()];
            e[a] = 1;
            let pre = aug.preimage(&e).expect("augmentation is onto");
            let mut img = vec![0; n.dim()];
            for l in 0..self.res.rank(0) {
                for i in 0..rank {
                    let co = pre[l * rank + i];
                    if co != 0 {
                        let v = vec_mat(&c[l * n.dim()..(l + 1) * n.dim()], &n.act[i]);
                        for (x, y) in img.iter_mut().zip(v) {
                            *x += co * y;
                        }
                    }
                }
            }
            rows.push(n.reduce(&img));
        }
        ModuleMap::new(m.clone(), n.clone(), rows)
    }

    pub fn map_to_cocycle(&self, f: &ModuleMap) -> Vec<Int> {
        let mut out = Vec::new();
        for g in &self.res.gens[0] {
            out.extend(f.apply(g));
        }
        out
    }

    /// Composes a cochain with a map `N → N'`, componentwise.
    pub fn push(&self, c: &[Int], g: &ModuleMap) -> Vec<Int> {
        let m = self.target.dim();
        let mut out = Vec::new();
        for chunk in c.chunks(m.max(1)).take(c.len() / m.max(1)) {
            out.extend(g.apply(chunk));
        }
        out
    }
}

/// `Hom_R(M, N)` as a subquotient of `N^{#gens}`.
#[derive(Clone, Debug)]
pub struct HomSpace {
    pub complex: HomComplex,
    pub group: Subquotient,
}

impl HomSpace {
    pub fn new(m: &Module, n: &Module) -> Result<HomSpace> {
        let res = FreeResolution::new(m, 1)?;
        let complex = HomComplex::new(res, n.clone());
        let group = complex.cohomology(0);
        Ok(HomSpace { complex, group })
    }

    pub fn maps(&self) -> Vec<ModuleMap> {
        self.group
            .elements()
            .into_iter()
            .map(|y| self.complex.cocycle_to_map(&self.group.from_group(&y)))
            .collect()
    }

    pub fn generator_maps(&self) -> Vec<ModuleMap> {
        self.group
            .generators()
            .into_iter()
            .map(|c| self.complex.cocycle_to_map(&c))
            .collect()
    }
}

pub fn hom(m: &Module, n: &Module) -> Result<Subquotient> {
    Ok(HomSpace::new(m, n)?.group)
}

/// `Ext^k_R(M, N)`.
pub fn ext(k: usize, m: &Module, n: &Module) -> Result<Subquotient> {
    let res = FreeResolution::new(m, k + 1)?;
    Ok(HomComplex::new(res, n.clone()).cohomology(k))
}

/// Ext¹ together with the data needed to name classes of extensions.
pub struct Ext1 {
    pub complex: HomComplex,
    pub group: Subquotient,
}

impl Ext1 {
    pub fn new(m: &Module, n: &Module) -> Result<Ext1> {
        let res = FreeResolution::new(m, 2)?;
        let complex = HomComplex::new(res, n.clone());
        let group = complex.cohomology(1);
        Ok(Ext1 { complex, group })
    }

    /// The 1-cocycle of an extension `0 → N → X → M → 0`.
    pub fn class_cocycle(&self, iota: &ModuleMap, pi: &ModuleMap) -> Vec<Int> {
        let res = &self.complex.res;
        let x = &pi.source;
        let lifts: Vec<Vec<Int>> = res.gens[0]
            .iter()
            .map(|g| pi.preimage(g).expect("projection is onto"))
            .collect();
        let rank = x.alg.rank;
        let mut out = Vec::new();
        for g in &res.gens[1] {
            let mut y = vec![0; x.dim()];
            for (l, lift) in lifts.iter().enumerate() {
                for i in 0..rank {
                    let c = g[l * rank + i];
                    if c != 0 {
                        let v = vec_mat(lift, &x.act[i]);
                        for (a, b) in y.iter_mut().zip(v) {
                            *a += c * b;
                        }
                    }
                }
            }
            let y = x.reduce(&y);
            debug_assert!(pi.source.dim() == 0 || pi.target.is_zero_elem(&pi.apply(&y)));
            let n = iota
                .preimage(&y)
                .expect("kernel of the projection is the image of N");
            out.extend(iota.source.reduce(&n));
        }
        out
    }

    pub fn class(&self, iota: &ModuleMap, pi: &ModuleMap) -> Vec<Int> {
        let c = self.class_cocycle(iota, pi);
        self.group.to_group(&c).expect("extension gives a cocycle")
    }

    pub fn is_split(&self, iota: &ModuleMap, pi: &ModuleMap) -> bool {
        self.group.is_zero_element(&self.class_cocycle(iota, pi))
    }

    /// An extension `0 → N → X → M → 0` realising a 1-cocycle.
    pub fn realize(&self, c: &[Int]) -> (Module, ModuleMap, ModuleMap) {
        let res = &self.complex.res;
        let n = &self.complex.target;
        let f0 = &res.free[0];
        let (sum, inj, _) = Module::direct_sum(&[n.clone(), f0.clone()]);
        let mut rows = Vec::new();
        for (j, g) in res.gens[1].iter().enumerate() {
            let nj = &c[j * n.dim()..(j + 1) * n.dim()];
            let mut v: Vec<Int> = nj.to_vec();
            v.extend(g.iter().map(|a| -a));
            rows.push(v);
        }
        let s = sum.span(&rows);
        let (x, proj) = sum.quotient(&s);
        let iota = inj[0].then(&proj);
        // X → M: (n, f) ↦ aug(f)
        let aug = res.differential(0);
        let mut mat = vec![vec![0; res.module.dim()]; n.dim()];
        mat.extend(aug.matrix.iter().cloned());
        let pi = ModuleMap::new(x.clone(), res.module.clone(), mat);
        (x, iota, pi)
    }
}

/// `M ⊗_R N` for a right module `M` and a left module `N`.
pub struct Tensor {
    pub left_dim: usize,
    pub right_dim: usize,
    pub group: Subquotient,
    /// The module structure coming from `M`'s action, when the ring is
    /// commutative.
    pub module: Option<Module>,
}

impl Tensor {
    pub fn new(m: &Module, n: &Module) -> Tensor {
        assert_eq!(m.side, Side::Right);
        assert_eq!(n.side, Side::Left);
        let (a, b) = (m.dim(), n.dim());
        let d = a * b;
        let idx = |i: usize, j: usize| i * b + j;
        let mut rows = Vec::new();
        for l in m.rel.basis() {
            for j in 0..b {
                let mut r = vec![0; d];
                for i in 0..a {
                    r[idx(i, j)] = l[i];
                }
                rows.push(r);
            }
        }
        for l in n.rel.basis() {
            for i in 0..a {
                let mut r = vec![0; d];
                for j in 0..b {
                    r[idx(i, j)] = l[j];
                }
                rows.push(r);
            }
        }
        for t in 1..m.alg.rank {
            for i in 0..a {
                for j in 0..b {
                    let mut r = vec![0; d];
                    for (i2, c) in m.act[t][i].iter().enumerate() {
                        r[idx(i2, j)] += c;
                    }
                    for (j2, c) in n.act[t][j].iter().enumerate() {
                        r[idx(i, j2)] -= c;
                    }
                    rows.push(r);
                }
            }
        }
        let modulus = gcd(m.modulus(), n.modulus());
        let rel = Lattice::new(d, &rows, if d == 0 { 0 } else { modulus });
        let commutative = m.alg.handle.is_commutative();
        let module = commutative.then(|| {
            let act = (0..m.alg.rank)
                .map(|t| {
                    let mut mat = vec![vec![0; d]; d];
                    for i in 0..a {
                        for j in 0..b {
                            for (i2, c) in m.act[t][i].iter().enumerate() {
                                mat[idx(i, j)][idx(i2, j)] += c;
                            }
                        }
                    }
                    mat
                })
                .collect();
            Module::new(m.alg.clone(), Side::Left, rel.clone(), act)
        });
        Tensor {
            left_dim: a,
            right_dim: b,
            group: Subquotient::quotient(rel),
            module,
        }
    }

    /// Coordinates of `x ⊗ y` in ℤ^{a·b}.
    pub fn pure(&self, x: &[Int], y: &[Int]) -> Vec<Int> {
        let mut v = vec![0; self.left_dim * self.right_dim];
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                v[i * self.right_dim + j] = xi * yj;
            }
        }
        self.group.rel.reduce(&v)
    }
}

/// Pushout of `0 → A → X → M → 0` along `g: A → B`.
pub fn pushout(iota: &ModuleMap, pi: &ModuleMap, g: &ModuleMap) -> (Module, ModuleMap, ModuleMap) {
    let b = &g.target;
    let x = &iota.target;
    let (sum, inj, _) = Module::direct_sum(&[b.clone(), x.clone()]);
    let mut rows = Vec::new();
    for i in 0..iota.source.dim() {
        let mut v = g.matrix[i].clone();
        v.extend(iota.matrix[i].iter().map(|c| -c));
        rows.push(v);
    }
    let s = sum.span(&rows);
    let (y, proj) = sum.quotient(&s);
    let new_iota = inj[0].then(&proj);
    let mut mat = vec![vec![0; pi.target.dim()]; b.dim()];
    mat.extend(pi.matrix.iter().cloned());
    let new_pi = ModuleMap::new(y.clone(), pi.target.clone(), mat);
    (y, new_iota, new_pi)
}

/// Pullback of `0 → A → X → M → 0` along `h: M' → M`.
pub fn pullback(iota: &ModuleMap, pi: &ModuleMap, h: &ModuleMap) -> (Module, ModuleMap, ModuleMap) {
    let x = &pi.source;
    let mp = &h.source;
    let (sum, inj, proj) = Module::direct_sum(&[x.clone(), mp.clone()]);
    // (x, m') ↦ π(x) − h(m')
    let mut mat: Matrix = pi.matrix.clone();
    mat.extend(h.matrix.iter().map(|r| r.iter().map(|c| -c).collect()));
    let diff = ModuleMap::new(sum.clone(), pi.target.clone(), mat);
    let (p, incl) = diff.kernel();
    let new_pi = incl.then(&proj[1]);
    // A → P: a ↦ (ι(a), 0)
    let into_sum = iota.then(&inj[0]);
    let rows: Matrix = (0..iota.source.dim())
        .map(|i| {
            incl.preimage(&into_sum.apply(&unit(iota.source.dim(), i)))
                .expect("ι lands in the pullback")
        })
        .collect();
    let new_iota = ModuleMap::new(iota.source.clone(), p.clone(), rows);
    (p, new_iota, new_pi)
}

/// A subquotient as an abelian group on its Smith generators.
pub fn group_module(sq: &Subquotient) -> Module {
    abelian_group(&sq.gen_orders())
}

/// The map of groups induced on Smith generators by a ℤ-matrix on the
/// ambient coordinates.
pub fn induced(
    src: &Subquotient,
    tgt: &Subquotient,
    f: impl Fn(&[Int]) -> Vec<Int>,
) -> Result<ModuleMap> {
    let rows = src
        .generators()
        .iter()
        .map(|g| {
            tgt.to_group(&f(g))
                .ok_or_else(|| Error::NotAMorphism("a cocycle leaves its target".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModuleMap::new(group_module(src), group_module(tgt), rows))
}

/// `im f = ker g` at the middle of `A --f--> B --g--> C`.
pub fn exact_at(f: &ModuleMap, g: &ModuleMap) -> bool {
    f.image_lattice().sum(&f.target.rel) == g.kernel_lattice().sum(&g.source.rel)
}

/// `h^*: Ext¹(X, M) → Ext¹(X', M)` for `h: X' → X`, by pullback.
pub fn ext_pullback(src: &Ext1, tgt: &Ext1, h: &ModuleMap) -> Result<ModuleMap> {
    induced(&src.group, &tgt.group, |c| {
        let (_, iota, pi) = src.realize(c);
        let (_, i2, p2) = pullback(&iota, &pi, h);
        tgt.class_cocycle(&i2, &p2)
    })
}

/// `g_*: Ext¹(X, M) → Ext¹(X, M')` for `g: M → M'`, by pushout.
pub fn ext_pushout(src: &Ext1, tgt: &Ext1, g: &ModuleMap) -> Result<ModuleMap> {
    induced(&src.group, &tgt.group, |c| {
        let (_, iota, pi) = src.realize(c);
        let (_, i2, p2) = pushout(&iota, &pi, g);
        tgt.class_cocycle(&i2, &p2)
    })
}

/// `h^*: Hom(X, M) → Hom(X', M)` for `h: X' → X`.
pub fn hom_pullback(src: &HomSpace, tgt: &HomSpace, h: &ModuleMap) -> Result<ModuleMap> {
    induced(&src.group, &tgt.group, |c| {
        tgt.complex
            .map_to_cocycle(&h.then(&src.complex.cocycle_to_map(c)))
    })
}

/// `g_*: Hom(X, M) → Hom(X, M')`.
pub fn hom_pushout(src: &HomSpace, tgt: &HomSpace, g: &ModuleMap) -> Result<ModuleMap> {
    induced(&src.group, &tgt.group, |c| {
        tgt.complex
            .map_to_cocycle(&src.complex.cocycle_to_map(c).then(g))
    })
}

/// Exactness of `0 → Hom(M, A) → Hom(M, B) → Hom(M, C) → Ext¹(M, A) →
/// Ext¹(M, B) → Ext¹(M, C)` for `0 → A --ι--> B --π--> C → 0`, at the five
/// nodes from `Hom(M, A)` to `Ext¹(M, B)`.
pub fn hom_ext_sequence(m: &Module, iota: &ModuleMap, pi: &ModuleMap) -> Result<Vec<bool>> {
    let (a, b, c) = (&iota.source, &iota.target, &pi.target);
    let (ha, hb, hc) = (
        HomSpace::new(m, a)?,
        HomSpace::new(m, b)?,
        HomSpace::new(m, c)?,
    );
    let (ea, eb, ec) = (Ext1::new(m, a)?, Ext1::new(m, b)?, Ext1::new(m, c)?);
    let h1 = hom_pushout(&ha, &hb, iota)?;
    let h2 = hom_pushout(&hb, &hc, pi)?;
    let conn = induced(&hc.group, &ea.group, |x| {
        let (_, i2, p2) = pullback(iota, pi, &hc.complex.cocycle_to_map(x));
        ea.class_cocycle(&i2, &p2)
    })?;
    let e1 = ext_pushout(&ea, &eb, iota)?;
    let e2 = ext_pushout(&eb, &ec, pi)?;
    Ok(vec![
        h1.is_injective(),
        exact_at(&h1, &h2),
        exact_at(&h2, &conn),
        exact_at(&conn, &e1),
        exact_at(&e1, &e2),
    ])
}

fn unit(n: usize, i: usize) -> Vec<Int> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::homalg::GroupType;
    use crate::ring::{Field, RingHandle};

    fn zmod(h: RingHandle, side: Side, d: Int) -> Module {
        let a = Arc::new(h.zalg().unwrap());
        Module::cyclic(
            a.clone(),
            side,
            &Lattice::new(1, &[vec![d]], a.characteristic()),
        )
    }

    #[test]
    fn hom_and_ext_over_integers() {
        let z = RingHandle::Integers;
        let m6 = zmod(z, Side::Right, 6);
        let m4 = zmod(z, Side::Right, 4);
        assert_eq!(hom(&m6, &m4).unwrap().group_type(), GroupType::cyclic(2));
        let free = Module::free(Arc::new(z.zalg().unwrap()), Side::Right, 1);
        assert_eq!(
            ext(1, &m4, &free).unwrap().group_type(),
            GroupType::cyclic(4)
        );
        assert!(ext(1, &free, &m4).unwrap().is_zero());
        assert_eq!(hom(&free, &m4).unwrap().group_type(), GroupType::cyclic(4));
    }

    #[test]
    fn ext_over_z12() {
        let h = RingHandle::IntegersMod(12);
        let m2 = zmod(h, Side::Right, 2);
        assert_eq!(ext(1, &m2, &m2).unwrap().group_type(), GroupType::cyclic(2));
        let m3 = zmod(h, Side::Right, 3);
        let m4 = zmod(h, Side::Right, 4);
        assert!(hom(&m3, &m4).unwrap().is_zero());
    }

    #[test]
    fn tensor_products() {
        let z = RingHandle::Integers;
        let t = Tensor::new(&zmod(z, Side::Right, 4), &zmod(z, Side::Left, 6));
        assert_eq!(t.group.group_type(), GroupType::cyclic(2));
        let h = RingHandle::IntegersMod(12);
        let t = Tensor::new(&zmod(h, Side::Right, 4), &zmod(h, Side::Left, 3));
        assert!(t.group.is_zero());
    }

    #[test]
    fn realized_extension_has_its_class() {
        let h = RingHandle::IntegersMod(12);
        let m2 = zmod(h, Side::Right, 2);
        let e = Ext1::new(&m2, &m2).unwrap();
        for y in e.group.elements() {
            let c = e.group.from_group(&y);
            let (x, iota, pi) = e.realize(&c);
            assert_eq!(x.check(), Ok(()));
            assert!(iota.is_injective());
            assert!(pi.is_surjective());
            assert_eq!(
                e.group.normalize(&e.class(&iota, &pi)),
                e.group.normalize(&y)
            );
        }
    }

    #[test]
    fn triangular_hom_dimensions() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let a = Arc::new(h.zalg().unwrap());
        let r = Module::free(a.clone(), Side::Right, 1);
        // End(R_R) ≅ R has 8 elements
        assert_eq!(hom(&r, &r).unwrap().order(), Some(8));
    }
}
