//! Character duals `Hom_ℤ(N, ℚ/ℤ)` of finite modules.

use super::module::{Module, ModuleMap};
use crate::error::{Error, Result};
use crate::zlinalg::{lcm, rem, Int, Lattice};

/// The dual of a finite module, on the opposite side.
///
/// Its ℤ-basis is the characters `χ_j` with `χ_j(ĝ_i) = δ_ij / d_i` on the
/// Smith generators `ĝ_i` of `N`.
pub fn char_dual(n: &Module) -> Result<Module> {
    if n.order().is_none() {
        return Err(Error::InfiniteDual);
    }
    let (s, _, _) = n.simplify();
    let d = n.group().gen_orders();
    let k = d.len();
    let rows: Vec<Vec<Int>> = (0..k)
        .map(|i| {
            let mut r = vec![0; k];
            r[i] = d[i];
            r
        })
        .collect();
    let modulus = d.iter().fold(1, |a, &b| lcm(a, b));
    // (χ·t)(ĝ_i) = χ(ĝ_i·t): coefficient of χ_i in (χ_j·t) is d_i·A_t[i][j]/d_j
    let act = s
        .act
        .iter()
        .map(|a| {
            (0..k)
                .map(|j| (0..k).map(|i| rem(d[i] * a[i][j] / d[j], d[i])).collect())
                .collect()
        })
        .collect();
    Ok(Module::new(
        n.alg.clone(),
        n.side.opposite(),
        Lattice::new(k, &rows, modulus),
        act,
    ))
}

/// `⟨χ, x⟩ ∈ ℚ/ℤ` as a numerator over `denominator`.
pub fn pairing(n: &Module, chi: &[Int], x: &[Int]) -> (Int, Int) {
    let sq = n.group();
    let d = sq.gen_orders();
    let y = sq.to_group(x).expect("element of N");
    let den = d.iter().fold(1, |a, &b| lcm(a, b));
    let num: Int = (0..d.len()).map(|i| chi[i] * y[i] * (den / d[i])).sum();
    (rem(num, den), den)
}

/// The evaluation map `N → N**`.
pub fn double_dual_map(n: &Module) -> Result<ModuleMap> {
    let dual = char_dual(n)?;
    let dd = char_dual(&dual)?;
    let sq = dual.group();
    let d2 = sq.gen_orders();
    let gens = sq.generators();
    let rows = (0..n.dim())
        .map(|a| {
            let mut e = vec![0; n.dim()];
            e[a] = 1;
            // coefficient on the l-th basis character of N** is d2_l·⟨ĥ_l, e⟩
            gens.iter()
                .zip(&d2)
                .map(|(h, &dl)| {
                    let (num, den) = pairing(n, h, &e);
                    rem(num * dl / den, dl)
                })
                .collect()
        })
        .collect();
    Ok(ModuleMap::new(n.clone(), dd, rows))
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::homalg::functors::{hom, Tensor};
    use crate::homalg::module::Side;
    use crate::homalg::GroupType;
    use crate::ring::{Field, RingHandle};

    #[test]
    fn cyclic_groups_are_self_dual() {
        let a = Arc::new(RingHandle::Integers.zalg().unwrap());
        let m = Module::cyclic(a.clone(), Side::Right, &Lattice::new(1, &[vec![6]], 0));
        let d = char_dual(&m).unwrap();
        assert_eq!(d.group_type(), GroupType::cyclic(6));
        assert_eq!(d.side, Side::Left);
        assert!(char_dual(&Module::zero(a.clone(), Side::Left))
            .unwrap()
            .is_zero_module());
        assert_eq!(
            char_dual(&Module::free(a, Side::Left, 1)).unwrap_err(),
            Error::InfiniteDual
        );
    }

    #[test]
    fn triangular_ideal_dual() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let a = Arc::new(h.zalg().unwrap());
        let r = Module::free(a, Side::Right, 1);
        let (e12r, _) = r.submodule(&r.span(&[vec![0, 0, 1]]));
        assert_eq!(e12r.order(), Some(2));
        let d = char_dual(&e12r).unwrap();
        assert_eq!((d.side, d.order()), (Side::Left, Some(2)));
        assert_eq!(d.check(), Ok(()));
        let ev = double_dual_map(&e12r).unwrap();
        assert_eq!(ev.check(), Ok(()));
        assert!(ev.is_iso());
    }

    #[test]
    fn hom_tensor_adjunction_over_triangular() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let a = Arc::new(h.zalg().unwrap());
        let rr = Module::free(a.clone(), Side::Right, 1);
        let rl = Module::free(a, Side::Left, 1);
        let nr = rr.quotient(&rr.span(&[vec![0, 1, 0]])).0;
        let ml = rl.quotient(&rl.span(&[vec![0, 0, 1]])).0;
        // Hom(M, N*) ≅ (N ⊗ M)*
        let lhs = hom(&ml, &char_dual(&nr).unwrap()).unwrap().group_type();
        let t = Tensor::new(&nr, &ml);
        assert_eq!(lhs, t.group.group_type());
    }
}
