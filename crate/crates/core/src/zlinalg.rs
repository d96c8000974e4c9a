//! Integer lattices: Hermite and Smith forms, kernels, solving.
//!
//! Lattices live in ℤ^n and are stored by their row Hermite normal form.
//! A lattice may carry a modulus `m > 0` meaning `mℤ^n` is known to be
//! contained in it; all arithmetic is then done on residues, which keeps
//! the entries small for torsion groups.

use serde::{Deserialize, Serialize};

pub type Int = i128;

pub fn gcd(a: Int, b: Int) -> Int {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

pub fn lcm(a: Int, b: Int) -> Int {
    if a == 0 || b == 0 {
        return 0;
    }
    (a / gcd(a, b) * b).abs()
}

/// Returns `(g, x, y)` with `g = gcd(a, b) >= 0` and `g = x*a + y*b`.
pub fn ext_gcd(a: Int, b: Int) -> (Int, Int, Int) {
    let (mut r0, mut r1) = (a, b);
    let (mut s0, mut s1) = (1, 0);
    let (mut t0, mut t1) = (0, 1);
    while r1 != 0 {
        let q = r0.div_euclid(r1);
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 < 0 {
        (-r0, -s0, -t0)
    } else {
        (r0, s0, t0)
    }
}

/// Nonnegative remainder; `m == 0` leaves `a` unchanged.
pub fn rem(a: Int, m: Int) -> Int {
    if m == 0 {
        a
    } else {
        a.rem_euclid(m)
    }
}

pub fn is_prime(n: Int) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as (prime, exponent) pairs, ascending.
pub fn factor(mut n: Int) -> Vec<(Int, u32)> {
    n = n.abs();
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_square_free(n: Int) -> bool {
    n != 0 && factor(n).iter().all(|&(_, e)| e == 1)
}

fn reduce_row(row: &mut [Int], moduli: &[Int], from: usize) {
    for c in from..row.len() {
        row[c] = rem(row[c], moduli[c]);
    }
}

fn axpy(dst: &mut [Int], a: Int, src: &[Int], from: usize) {
    if a == 0 {
        return;
    }
    for c in from..dst.len() {
        if src[c] != 0 {
            dst[c] += a * src[c];
        }
    }
}

/// Row Hermite normal form of the lattice spanned by `rows` and by
/// `moduli[c] * e_c` for every column with a nonzero modulus.
///
/// Output rows are in echelon form with positive pivots and entries above
/// each pivot reduced into `[0, pivot)`.
pub fn hnf(rows: &[Vec<Int>], moduli: &[Int]) -> Vec<Vec<Int>> {
    let n = moduli.len();
    let mut work: Vec<Vec<Int>> = rows
        .iter()
        .map(|r| {
            debug_assert_eq!(r.len(), n);
            let mut r = r.clone();
            reduce_row(&mut r, moduli, 0);
            r
        })
        .filter(|r| r.iter().any(|&x| x != 0))
        .collect();
    let mut basis: Vec<Vec<Int>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    for c in 0..n {
        let mut pivot: Option<Vec<Int>> = if moduli[c] > 0 {
            let mut e = vec![0; n];
            e[c] = moduli[c];
            Some(e)
        } else {
            None
        };
        let mut rest = Vec::with_capacity(work.len());
        for row in work.drain(..) {
            if row[c] == 0 {
                rest.push(row);
                continue;
            }
            match pivot.take() {
                None => pivot = Some(row),
                Some(p) => {
                    let (g, x, y) = ext_gcd(p[c], row[c]);
                    let (pa, ra) = (p[c] / g, row[c] / g);
                    let mut np = vec![0; n];
                    let mut other = vec![0; n];
                    for k in c..n {
                        np[k] = x * p[k] + y * row[k];
                        other[k] = ra * p[k] - pa * row[k];
                    }
                    reduce_row(&mut np, moduli, c + 1);
                    reduce_row(&mut other, moduli, c + 1);
                    debug_assert_eq!(other[c], 0);
                    if other.iter().any(|&v| v != 0) {
                        rest.push(other);
                    }
                    pivot = Some(np);
                }
            }
        }
        work = rest;
        if let Some(mut p) = pivot {
            if p[c] < 0 {
                p.iter_mut().for_each(|v| *v = -*v);
                reduce_row(&mut p, moduli, c + 1);
            }
            basis.push(p);
            pivots.push(c);
        }
    }
    for i in (0..basis.len()).rev() {
        for j in i + 1..basis.len() {
            let c = pivots[j];
            let q = basis[i][c].div_euclid(basis[j][c]);
            if q != 0 {
                let src = basis[j].clone();
                axpy(&mut basis[i], -q, &src, c);
                reduce_row(&mut basis[i], moduli, c + 1);
            }
        }
    }
    basis
}

/// A sublattice of ℤ^dim in Hermite normal form.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lattice {
    dim: usize,
    basis: Vec<Vec<Int>>,
    pivots: Vec<usize>,
    modulus: Int,
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.basis == other.basis
    }
}

impl Eq for Lattice {}

impl std::hash::Hash for Lattice {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.basis.hash(state);
    }
}

impl Lattice {
    pub fn new(dim: usize, rows: &[Vec<Int>], modulus: Int) -> Self {
        let moduli = vec![modulus.max(0); dim];
        Self::from_hnf(dim, hnf(rows, &moduli), modulus.max(0))
    }

    fn from_hnf(dim: usize, basis: Vec<Vec<Int>>, modulus: Int) -> Self {
        let pivots = basis
            .iter()
            .map(|r| r.iter().position(|&x| x != 0).expect("nonzero hnf row"))
            .collect();
        let mut l = Lattice {
            dim,
            basis,
            pivots,
            modulus,
        };
        if l.modulus == 0 && l.is_full_rank() {
            l.modulus = l.exponent_bound();
        }
        l
    }

    pub fn zero(dim: usize) -> Self {
        Lattice {
            dim,
            basis: vec![],
            pivots: vec![],
            modulus: 0,
        }
    }

    pub fn full(dim: usize) -> Self {
        Self::scaled(dim, 1)
    }

    pub fn scaled(dim: usize, m: Int) -> Self {
        if m == 0 {
            return Self::zero(dim);
        }
        let basis = (0..dim)
            .map(|i| {
                let mut e = vec![0; dim];
                e[i] = m.abs();
                e
            })
            .collect();
        Lattice {
            dim,
            basis,
            pivots: (0..dim).collect(),
            modulus: m.abs(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Vec<Int>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// A positive `m` with `mℤ^dim ⊆ self`, or 0 when none is known.
    pub fn modulus(&self) -> Int {
        self.modulus
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full_rank(&self) -> bool {
        self.basis.len() == self.dim
    }

    /// Index of the lattice in ℤ^dim when of full rank.
    pub fn index(&self) -> Option<Int> {
        if !self.is_full_rank() {
            return None;
        }
        Some(
            self.basis
                .iter()
                .zip(&self.pivots)
                .map(|(r, &c)| r[c])
                .product(),
        )
    }

    /// Exponent of ℤ^dim/self for a full-rank lattice, or 0 on overflow.
    fn exponent_bound(&self) -> Int {
        let n = self.dim;
        let mut exp: Int = 1;
        for i in 0..n {
            // order of e_i: back-substitute through the triangular basis
            let mut r = unit(n, i);
            let mut den: Int = 1;
            let mut order: Int = 1;
            for j in i..n {
                let p = self.basis[j][j];
                if r[j] == 0 {
                    continue;
                }
                let g = gcd(r[j], p);
                let scale = p / g;
                den = match den.checked_mul(scale) {
                    Some(d) => d,
                    None => return 0,
                };
                if scale != 1 {
                    for x in r.iter_mut() {
                        *x *= scale;
                    }
                }
                let q = r[j] / p;
                let row = &self.basis[j];
                for c in j..n {
                    r[c] -= q * row[c];
                }
                order = lcm(order, den / gcd(q, den));
            }
            exp = lcm(exp, order);
            if exp > (1 << 60) {
                return 0;
            }
        }
        exp
    }

    /// Canonical representative of `v` modulo the lattice.
    pub fn reduce(&self, v: &[Int]) -> Vec<Int> {
        let mut v: Vec<Int> = v.iter().map(|&x| rem(x, self.modulus)).collect();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            let q = v[c].div_euclid(row[c]);
            if q != 0 {
                axpy(&mut v, -q, row, c);
                for x in v.iter_mut().skip(c + 1) {
                    *x = rem(*x, self.modulus);
                }
            }
        }
        v
    }

    pub fn contains(&self, v: &[Int]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis.iter().all(|r| self.contains(r))
    }

    /// Coordinates of `v` in the stored basis, if `v` lies in the lattice.
    pub fn coordinates(&self, v: &[Int]) -> Option<Vec<Int>> {
        let mut v = v.to_vec();
        let mut out = Vec::with_capacity(self.basis.len());
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            if v[c] % row[c] != 0 {
                return None;
            }
            let q = v[c] / row[c];
            axpy(&mut v, -q, row, c);
            out.push(q);
        }
        if v.iter().all(|&x| x == 0) {
            Some(out)
        } else {
            None
        }
    }

    pub fn sum(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let mut rows = self.basis.clone();
        rows.extend(other.basis.iter().cloned());
        Lattice::new(self.dim, &rows, gcd(self.modulus, other.modulus))
    }

    pub fn add_rows(&self, rows: &[Vec<Int>]) -> Lattice {
        let mut all = self.basis.clone();
        all.extend(rows.iter().cloned());
        Lattice::new(self.dim, &all, self.modulus)
    }

    pub fn intersect(&self, other: &Lattice) -> Lattice {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let m = lcm(self.modulus, other.modulus);
        let mut moduli = vec![other.modulus; n];
        moduli.extend(std::iter::repeat(m).take(n));
        let mut rows = Vec::new();
        for a in &self.basis {
            let mut r = a.clone();
            r.extend(a.iter().cloned());
            rows.push(r);
        }
        for b in &other.basis {
            let mut r = b.clone();
            r.extend(std::iter::repeat(0).take(n));
            rows.push(r);
        }
        let h = hnf(&rows, &moduli);
        let inner: Vec<Vec<Int>> = h
            .into_iter()
            .filter(|r| r[..n].iter().all(|&x| x == 0))
            .map(|r| r[n..].to_vec())
            .collect();
        Lattice::new(n, &inner, m)
    }

    /// Preimage `{x ∈ ℤ^k : x·A ∈ self}` for a `k × dim` matrix `A`.
    pub fn preimage(&self, a: &[Vec<Int>], source_modulus: Int) -> Lattice {
        kernel_mod(a, self, source_modulus)
    }

    /// Enumerates canonical representatives of ℤ^dim / self.
    pub fn quotient_elements(&self) -> Vec<Vec<Int>> {
        assert!(self.is_full_rank(), "quotient is infinite");
        let bounds: Vec<Int> = self
            .basis
            .iter()
            .zip(&self.pivots)
            .map(|(r, &c)| r[c])
            .collect();
        let mut out = vec![vec![0; self.dim]];
        for c in 0..self.dim {
            let mut next = Vec::with_capacity(out.len() * bounds[c] as usize);
            for v in &out {
                for x in 0..bounds[c] {
                    let mut w = v.clone();
                    w[c] = x;
                    next.push(w);
                }
            }
            out = next;
        }
        out
    }
}

/// `{x ∈ ℤ^k : x·A ∈ target}` where `A` has `k` rows of length `target.dim()`.
///
/// `source_modulus` must be 0 or a number `m` with `m·A` having rows in
/// `target`; it is used to keep entries small.
pub fn kernel_mod(a: &[Vec<Int>], target: &Lattice, source_modulus: Int) -> Lattice {
    let k = a.len();
    let m = target.dim();
    let mut moduli = vec![target.modulus(); m];
    moduli.extend(std::iter::repeat(source_modulus).take(k));
    let mut rows = Vec::with_capacity(k + target.rank());
    for (i, r) in a.iter().enumerate() {
        let mut row = r.clone();
        row.extend(std::iter::repeat(0).take(k));
        row[m + i] = 1;
        rows.push(row);
    }
    for b in target.basis() {
        let mut row = b.clone();
        row.extend(std::iter::repeat(0).take(k));
        rows.push(row);
    }
    let h = hnf(&rows, &moduli);
    let inner: Vec<Vec<Int>> = h
        .into_iter()
        .filter(|r| r[..m].iter().all(|&x| x == 0))
        .map(|r| r[m..].to_vec())
        .collect();
    Lattice::new(k, &inner, source_modulus)
}

/// Finds `x ∈ ℤ^k` with `x·A ≡ t` modulo `target`, if one exists.
pub fn solve_mod(
    a: &[Vec<Int>],
    t: &[Int],
    target: &Lattice,
    source_modulus: Int,
) -> Option<Vec<Int>> {
    let k = a.len();
    let m = target.dim();
    let mut moduli = vec![target.modulus(); m];
    moduli.extend(std::iter::repeat(source_modulus).take(k));
    let mut rows = Vec::with_capacity(k + target.rank());
    for (i, r) in a.iter().enumerate() {
        let mut row = r.clone();
        row.extend(std::iter::repeat(0).take(k));
        row[m + i] = 1;
        rows.push(row);
    }
    for b in target.basis() {
        let mut row = b.clone();
        row.extend(std::iter::repeat(0).take(k));
        rows.push(row);
    }
    let h = hnf(&rows, &moduli);
    let mut v: Vec<Int> = t.to_vec();
    v.extend(std::iter::repeat(0).take(k));
    for x in v.iter_mut().enumerate() {
        *x.1 = rem(*x.1, moduli[x.0]);
    }
    for row in &h {
        let c = row.iter().position(|&x| x != 0).unwrap();
        if c >= m {
            break;
        }
        if v[c] % row[c] != 0 {
            return None;
        }
        let q = v[c] / row[c];
        axpy(&mut v, -q, row, c);
        for (j, x) in v.iter_mut().enumerate().skip(c + 1) {
            *x = rem(*x, moduli[j]);
        }
    }
    if v[..m].iter().any(|&x| x != 0) {
        return None;
    }
    Some(
        v[m..]
            .iter()
            .zip(&moduli[m..])
            .map(|(&x, &md)| rem(-x, md))
            .collect(),
    )
}

/// Smith decomposition of ℤ^n / L.
#[derive(Clone, Debug)]
pub struct Smith {
    /// Nontrivial invariant factors `d_1 | d_2 | …`, all `> 1`.
    pub torsion: Vec<Int>,
    pub free_rank: usize,
    /// `n × (t + f)` matrix: `x ↦ x·coords` gives SNF coordinates.
    pub coords: Vec<Vec<Int>>,
    /// `(t + f)` rows: the generator of each SNF coordinate in ℤ^n.
    pub gens: Vec<Vec<Int>>,
}

impl Smith {
    pub fn order(&self) -> Option<Int> {
        if self.free_rank > 0 {
            None
        } else {
            Some(self.torsion.iter().product())
        }
    }

    /// SNF coordinates of `x`, torsion parts reduced.
    pub fn to_coords(&self, x: &[Int]) -> Vec<Int> {
        let k = self.torsion.len() + self.free_rank;
        let mut out = vec![0; k];
        for (i, xi) in x.iter().enumerate() {
            if *xi != 0 {
                for j in 0..k {
                    out[j] += xi * self.coords[i][j];
                }
            }
        }
        for (j, d) in self.torsion.iter().enumerate() {
            out[j] = rem(out[j], *d);
        }
        out
    }

    pub fn from_coords(&self, y: &[Int], modulus: Int) -> Vec<Int> {
        let n = self.coords.len();
        let mut out = vec![0; n];
        for (j, yj) in y.iter().enumerate() {
            if *yj != 0 {
                for i in 0..n {
                    out[i] = rem(out[i] + yj * self.gens[j][i], modulus);
                }
            }
        }
        out
    }
}

pub fn smith(l: &Lattice) -> Smith {
    let n = l.dim();
    let md = l.modulus();
    let mut a: Vec<Vec<Int>> = l.basis().to_vec();
    let r = a.len();
    let mut v: Vec<Vec<Int>> = (0..n).map(|i| unit(n, i)).collect();
    let mut vinv: Vec<Vec<Int>> = (0..n).map(|i| unit(n, i)).collect();
    let red = |x: Int| rem(x, md);

    // column op: col j += q * col t   (A and V), row t -= q * row j (Vinv)
    let col_add = |a: &mut Vec<Vec<Int>>,
                   v: &mut Vec<Vec<Int>>,
                   vinv: &mut Vec<Vec<Int>>,
                   j: usize,
                   t: usize,
                   q: Int| {
        for row in a.iter_mut() {
            row[j] += q * row[t];
        }
        for row in v.iter_mut() {
            row[j] = red(row[j] + q * row[t]);
        }
        for c in 0..n {
            let x = vinv[j][c];
            vinv[t][c] = red(vinv[t][c] - q * x);
        }
    };
    let col_swap = |a: &mut Vec<Vec<Int>>,
                    v: &mut Vec<Vec<Int>>,
                    vinv: &mut Vec<Vec<Int>>,
                    i: usize,
                    j: usize| {
        for row in a.iter_mut() {
            row.swap(i, j);
        }
        for row in v.iter_mut() {
            row.swap(i, j);
        }
        vinv.swap(i, j);
    };

    let mut diag = Vec::new();
    let mut t = 0;
    while t < r.min(n) {
        // pick smallest nonzero entry in the remaining block
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..n {
                if a[i][j] != 0 && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        a.swap(t, bi);
        col_swap(&mut a, &mut v, &mut vinv, t, bj);
        loop {
            let mut dirty = false;
            for i in t + 1..r {
                if a[i][t] != 0 {
                    let q = a[i][t].div_euclid(a[t][t]);
                    let src = a[t].clone();
                    for c in t..n {
                        a[i][c] -= q * src[c];
                    }
                    if a[i][t] != 0 {
                        a.swap(t, i);
                        dirty = true;
                    }
                }
            }
            for j in t + 1..n {
                if a[t][j] != 0 {
                    let q = a[t][j].div_euclid(a[t][t]);
                    col_add(&mut a, &mut v, &mut vinv, j, t, -q);
                    if a[t][j] != 0 {
                        col_swap(&mut a, &mut v, &mut vinv, t, j);
                        dirty = true;
                    }
                }
            }
            if dirty {
                continue;
            }
            let p = a[t][t];
            let mut bad = None;
            'outer: for i in t + 1..r {
                for j in t + 1..n {
                    if a[i][j] % p != 0 {
                        bad = Some(i);
                        break 'outer;
                    }
                }
            }
            match bad {
                Some(i) => {
                    let src = a[i].clone();
                    for c in t..n {
                        a[t][c] += src[c];
                    }
                }
                None => break,
            }
        }
        if a[t][t] < 0 {
            for c in t..n {
                a[t][c] = -a[t][c];
            }
        }
        diag.push(a[t][t]);
        t += 1;
    }
    let mut torsion = Vec::new();
    let mut keep = Vec::new();
    for (j, &d) in diag.iter().enumerate() {
        if d != 1 {
            torsion.push(d);
            keep.push(j);
        }
    }
    let free: Vec<usize> = (diag.len()..n).collect();
    let free_rank = free.len();
    keep.extend(free);
    let coords = v
        .iter()
        .map(|row| keep.iter().map(|&j| row[j]).collect())
        .collect();
    let gens = keep.iter().map(|&j| vinv[j].clone()).collect();
    Smith {
        torsion,
        free_rank,
        coords,
        gens,
    }
}

fn unit(n: usize, i: usize) -> Vec<Int> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

/// Row vector times matrix.
pub fn vec_mat(x: &[Int], m: &[Vec<Int>]) -> Vec<Int> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0; cols];
    for (i, xi) in x.iter().enumerate() {
        if *xi != 0 {
            for (o, mij) in out.iter_mut().zip(&m[i]) {
                *o += xi * mij;
            }
        }
    }
    out
}

pub fn mat_mul(a: &[Vec<Int>], b: &[Vec<Int>]) -> Vec<Vec<Int>> {
    a.iter().map(|r| vec_mat(r, b)).collect()
}

pub fn identity(n: usize) -> Vec<Vec<Int>> {
    (0..n).map(|i| unit(n, i)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hnf_of_small_lattice() {
        let l = Lattice::new(2, &[vec![4, 0], vec![0, 6]], 0);
        assert_eq!(l.index(), Some(24));
        assert!(l.contains(&[8, -6]));
        assert!(!l.contains(&[2, 0]));
    }

    #[test]
    fn smith_invariants() {
        let l = Lattice::new(2, &[vec![4, 0], vec![0, 6]], 0);
        let s = smith(&l);
        assert_eq!(s.torsion, vec![2, 12]);
        assert_eq!(s.free_rank, 0);
    }

    #[test]
    fn free_rank_from_empty_relations() {
        let s = smith(&Lattice::zero(2));
        assert_eq!(s.free_rank, 2);
        assert!(s.torsion.is_empty());
    }

    #[test]
    fn kernel_of_multiplication() {
        // x ↦ 4x from ℤ/12 to ℤ/12
        let target = Lattice::scaled(1, 12);
        let k = kernel_mod(&[vec![4]], &target, 12);
        assert_eq!(k.basis(), &[vec![3]]);
    }

    #[test]
    fn intersection_is_lcm() {
        let a = Lattice::new(1, &[vec![4]], 0);
        let b = Lattice::new(1, &[vec![6]], 0);
        assert_eq!(a.intersect(&b).basis(), &[vec![12]]);
        assert_eq!(a.sum(&b).basis(), &[vec![2]]);
    }

    #[test]
    fn solve_finds_combination() {
        let target = Lattice::zero(2);
        let a = vec![vec![2, 0], vec![0, 3], vec![1, 1]];
        let x = solve_mod(&a, &[3, 4], &target, 0).unwrap();
        assert_eq!(vec_mat(&x, &a), vec![3, 4]);
    }
}
