//! Isomorphism classes of small modules over the finite rings.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::module::{Module, Side};
use crate::error::{Error, Result};
use crate::ring::{Field, RingHandle, ZAlg};
use crate::zlinalg::{factor, identity, Int, Lattice};

/// All modules of order at most `max_size` over a finite ring, one per
/// isomorphism class.
pub fn small_modules(handle: RingHandle, side: Side, max_size: Int) -> Result<Vec<Module>> {
    match handle {
        RingHandle::IntegersMod(n) => Ok(cyclic_ring_modules(n, side, max_size)),
        RingHandle::UpperTriangular2(Field::PrimeField(p)) => {
            let mut d = 0;
            while p.pow(d + 1) <= max_size {
                d += 1;
            }
            triangular_modules(p, side, d as usize)
        }
        _ => Err(Error::FiniteOnly),
    }
}

/// ℤ/n-modules are abelian groups of exponent dividing n.
pub fn cyclic_ring_modules(n: Int, side: Side, max_size: Int) -> Vec<Module> {
    let alg = Arc::new(RingHandle::IntegersMod(n).zalg().expect("valid ring"));
    let prime_powers: Vec<Int> = factor(n)
        .into_iter()
        .flat_map(|(p, e)| (1..=e).map(move |j| p.pow(j)))
        .collect();
    let mut out = Vec::new();
    // multisets of prime powers, nondecreasing
    fn rec(
        pp: &[Int],
        start: usize,
        size: Int,
        max: Int,
        cur: &mut Vec<Int>,
        out: &mut Vec<Vec<Int>>,
    ) {
        out.push(cur.clone());
        for i in start..pp.len() {
            if size * pp[i] <= max {
                cur.push(pp[i]);
                rec(pp, i, size * pp[i], max, cur, out);
                cur.pop();
            }
        }
    }
    let mut shapes = Vec::new();
    rec(&prime_powers, 0, 1, max_size, &mut vec![], &mut shapes);
    for orders in shapes {
        out.push(abelian_module(alg.clone(), side, &orders));
    }
    out
}

/// `⊕ ℤ/d_i` as a module over a ring of rank one.
pub fn abelian_module(alg: Arc<ZAlg>, side: Side, orders: &[Int]) -> Module {
    let k = orders.len();
    let rows: Vec<Vec<Int>> = orders
        .iter()
        .enumerate()
        .map(|(i, &d)| {
            let mut r = vec![0; k];
            r[i] = d;
            r
        })
        .collect();
    let modulus = orders.iter().fold(1, |a, &b| crate::zlinalg::lcm(a, b));
    Module::new(
        alg,
        side,
        Lattice::new(k, &rows, modulus),
        vec![identity(k)],
    )
}

/// `⊕ ℤ/d_i` as a ℤ-module; `d_i = 0` gives a free summand.
pub fn abelian_group(orders: &[Int]) -> Module {
    let alg = Arc::new(RingHandle::Integers.zalg().expect("valid ring"));
    abelian_module(alg, Side::Left, orders)
}

type FpMat = Vec<Vec<Int>>;

fn fp_mul(a: &FpMat, b: &FpMat, p: Int) -> FpMat {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (0..d).map(|l| a[i][l] * b[l][j]).sum::<Int>().rem_euclid(p))
                .collect()
        })
        .collect()
}

fn all_matrices(d: usize, p: Int) -> Vec<FpMat> {
    let cells = d * d;
    let total = (p as usize).pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut m = vec![vec![0; d]; d];
            for c in 0..cells {
                m[c / d][c % d] = (code % p as usize) as Int;
                code /= p as usize;
            }
            m
        })
        .collect()
}

fn fp_inverse(a: &FpMat, p: Int) -> Option<FpMat> {
    let d = a.len();
    let mut m: Vec<Vec<Int>> = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..d).map(|j| Int::from(i == j)));
            row
        })
        .collect();
    for c in 0..d {
        let piv = (c..d).find(|&r| m[r][c] % p != 0)?;
        m.swap(c, piv);
        let inv = crate::zlinalg::ext_gcd(m[c][c], p).1.rem_euclid(p);
        for x in m[c].iter_mut() {
            *x = (*x * inv).rem_euclid(p);
        }
        for r in 0..d {
            if r != c && m[r][c] != 0 {
                let f = m[r][c];
                for j in 0..2 * d {
                    m[r][j] = (m[r][j] - f * m[c][j]).rem_euclid(p);
                }
            }
        }
    }
    Some(m.into_iter().map(|r| r[d..].to_vec()).collect())
}

/// Modules over UT2(𝔽_p) on 𝔽_p^d for d ≤ `max_dim`, up to conjugation.
pub fn triangular_modules(p: Int, side: Side, max_dim: usize) -> Result<Vec<Module>> {
    let handle = RingHandle::UpperTriangular2(Field::PrimeField(p));
    let alg = Arc::new(
        handle
            .zalg()
            .ok_or_else(|| Error::InvalidRing(handle.to_string()))?,
    );
    if (p as f64).powi(2 * (max_dim * max_dim) as i32) > 1e7 {
        return Err(Error::BudgetExceeded(format!(
            "UT2 modules of dimension {max_dim} over 𝔽{p}"
        )));
    }
    let mut out = Vec::new();
    for d in 0..=max_dim {
        let mats = all_matrices(d, p);
        let gl: Vec<(FpMat, FpMat)> = mats
            .iter()
            .filter_map(|g| fp_inverse(g, p).map(|gi| (g.clone(), gi)))
            .collect();
        let id: FpMat = identity(d);
        let action = |e: &FpMat, n: &FpMat, c: &[Int]| -> FpMat {
            (0..d)
                .map(|i| {
                    (0..d)
                        .map(|j| (c[0] * id[i][j] + c[1] * e[i][j] + c[2] * n[i][j]).rem_euclid(p))
                        .collect()
                })
                .collect()
        };
        let mut seen = BTreeSet::new();
        for e in &mats {
            if fp_mul(e, e, p) != *e {
                continue;
            }
            for n in &mats {
                let acts = [id.clone(), e.clone(), n.clone()];
                let ok = (0..3).all(|i| {
                    (0..3).all(|j| {
                        let lhs = match side {
                            Side::Right => fp_mul(&acts[i], &acts[j], p),
                            Side::Left => fp_mul(&acts[j], &acts[i], p),
                        };
                        lhs == action(e, n, &alg.mul[i][j])
                    })
                });
                if !ok {
                    continue;
                }
                let key = gl
                    .iter()
                    .map(|(g, gi)| {
                        (
                            fp_mul(&fp_mul(g, e, p), gi, p),
                            fp_mul(&fp_mul(g, n, p), gi, p),
                        )
                    })
                    .min()
                    .unwrap_or((e.clone(), n.clone()));
                if seen.insert(key.clone()) {
                    let rel = Lattice::scaled(d, p);
                    out.push(Module::new(
                        alg.clone(),
                        side,
                        rel,
                        vec![identity(d), key.0, key.1],
                    ));
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z12_has_eleven_small_modules() {
        let ms = small_modules(RingHandle::IntegersMod(12), Side::Right, 12).unwrap();
        assert_eq!(ms.len(), 11);
        let mut types: Vec<String> = ms.iter().map(|m| m.group_type().to_string()).collect();
        types.sort();
        types.dedup();
        assert_eq!(types.len(), 11);
        assert!(ms.iter().all(|m| m.check().is_ok()));
    }

    #[test]
    fn triangular_modules_up_to_dimension_three() {
        for side in [Side::Right, Side::Left] {
            let ms = triangular_modules(2, side, 3).unwrap();
            assert!(ms.iter().all(|m| m.check().is_ok()));
            let by_dim: Vec<usize> = (0..=3)
                .map(|d| ms.iter().filter(|m| m.dim() == d).count())
                .collect();
            assert_eq!(by_dim, vec![1, 2, 4, 6]);
        }
    }
}
