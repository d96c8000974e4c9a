use std::sync::Arc;

use proptest::prelude::*;

use gabriel::contra::{
    complete_module, complete_ring, completion_levels_agree, monad_laws, roundtrip_covariant,
    star_subgroup, strong_generation_rewrite, tp,
};
use gabriel::delta::{beta_theta, delta_module, five_term, Coefficients, KComplex};
use gabriel::homalg::dual::char_dual;
use gabriel::homalg::enumerate::abelian_module;
use gabriel::homalg::fp::{normal_form, FPModule};
use gabriel::homalg::functors::{ext, hom, hom_ext_sequence, Tensor};
use gabriel::homalg::oracle::brute_force_ext1;
use gabriel::homalg::tower::{tower_limits, Lim1, Tower};
use gabriel::homalg::{Module, ModuleMap, Side};
use gabriel::quotients::{ring_of_quotients, torsion_submodule};
use gabriel::ring::{Field, Ideal, RingElement, RingHandle, ZAlg};
use gabriel::sflat::{strongly_flat_check, ExtensionDatum, FlatInput};
use gabriel::topology::{
    check_axioms, right_ideals, saturate, t4_generator_sides, Sample, TOmegaWitness, TopologyBase,
};
use gabriel::zlinalg::{Int, Lattice};

const UT2: RingHandle = RingHandle::UpperTriangular2(Field::PrimeField(2));

fn alg(h: RingHandle) -> Arc<ZAlg> {
    Arc::new(h.zalg().unwrap())
}

fn p_adic(p: Int, depth: usize) -> TopologyBase {
    TopologyBase::powers(&RingHandle::Integers.from_int(p), depth).unwrap()
}

fn small_ring() -> impl Strategy<Value = RingHandle> {
    prop_oneof![
        Just(RingHandle::Integers),
        (2i128..=30).prop_map(RingHandle::IntegersMod),
        Just(RingHandle::QuadraticOrder(-5)),
        Just(RingHandle::QuadraticOrder(2)),
    ]
}

fn element(h: RingHandle) -> impl Strategy<Value = RingElement> {
    (-12i128..=12, -6i128..=6).prop_map(move |(a, b)| match h {
        RingHandle::QuadraticOrder(_) => h.quad(a, b),
        _ => h.from_int(a),
    })
}

fn ideal(h: RingHandle) -> impl Strategy<Value = Ideal> {
    prop::collection::vec(element(h), 1..=2).prop_map(move |g| Ideal::new(h, &g).unwrap())
}

fn ring_and_ideal() -> impl Strategy<Value = (RingHandle, Ideal, RingElement)> {
    small_ring().prop_flat_map(|h| (Just(h), ideal(h), element(h)))
}

/// A finitely generated abelian group `ℤ^free ⊕ ⊕ ℤ/d`.
fn z_module(free: usize, torsion: &[Int]) -> Module {
    let z = alg(RingHandle::Integers);
    let n = free + torsion.len();
    let m = Module::free(z, Side::Left, n);
    let rels: Vec<Vec<Int>> = torsion
        .iter()
        .enumerate()
        .map(|(k, &d)| (0..n).map(|j| if j == free + k { d } else { 0 }).collect())
        .collect();
    m.quotient(&m.span(&rels)).0
}

fn times(m: &Module, c: Int) -> ModuleMap {
    let d = m.dim();
    ModuleMap::new(
        m.clone(),
        m.clone(),
        (0..d)
            .map(|i| (0..d).map(|j| if i == j { c } else { 0 }).collect())
            .collect(),
    )
}

fn divisors(n: Int) -> Vec<Int> {
    (1..=n).filter(|d| n % d == 0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn colon_degeneracies((h, i, s) in ring_and_ideal()) {
        prop_assert_eq!(i.colon(&h.one()).unwrap(), i.clone());
        if i.contains(&s) {
            prop_assert!(i.colon(&s).unwrap().is_unit());
        }
        // commutative classes only
        prop_assert!(i.is_subset(&i.colon(&s).unwrap()));
    }

    #[test]
    fn translate_product_contains_products((h, i, s) in ring_and_ideal()) {
        let t = Ideal::translate_product(std::slice::from_ref(&s), &i).unwrap();
        for k in i.generators() {
            prop_assert!(t.contains(&s.mul(k)), "{}·{} ∉ {}", s, k, t);
        }
        let _ = h;
    }

    #[test]
    fn canonical_forms_are_idempotent((_, i, _) in ring_and_ideal()) {
        let c = i.canonicalize();
        prop_assert_eq!(c.canonicalize(), c.clone());
        prop_assert_eq!(c, i);
    }

    #[test]
    fn triangular_ideal_operations_match_sets(a in 0usize..64, b in 0usize..64, s in 0usize..8) {
        let all = right_ideals(UT2).unwrap();
        let (i, j) = (&all[a % all.len()], &all[b % all.len()]);
        let els = UT2.elements().unwrap();
        let s = &els[s];
        let set = |x: &Ideal| {
            let mut v: Vec<String> = x.elements().unwrap().iter().map(|e| e.to_string()).collect();
            v.sort();
            v
        };
        let brute = |keep: &dyn Fn(&RingElement) -> bool| {
            let mut v: Vec<String> = els.iter().filter(|e| keep(e)).map(|e| e.to_string()).collect();
            v.sort();
            v
        };
        prop_assert_eq!(set(&i.colon(s).unwrap()), brute(&|r| i.contains(&s.mul(r))));
        prop_assert_eq!(set(&i.intersect(j).unwrap()), brute(&|r| i.contains(r) && j.contains(r)));
        let sums = brute(&|r| i.elements().unwrap().iter().any(|x| j.contains(&r.sub(x))));
        prop_assert_eq!(set(&i.sum(j).unwrap()), sums);
        prop_assert_eq!(i.is_subset(j), set(i).iter().all(|e| set(j).contains(e)));
    }

    #[test]
    fn ext1_matches_extension_oracle(n in prop::sample::select(vec![4i128, 6, 8, 9, 12]), a in 0usize..8, b in 0usize..8, c in 0usize..8) {
        let h = RingHandle::IntegersMod(n);
        let ds = divisors(n);
        let pick = |k: usize| ds[k % ds.len()];
        let m = abelian_module(alg(h), Side::Right, &[pick(a)]);
        let nn = abelian_module(alg(h), Side::Right, &[pick(b), pick(c)]);
        prop_assume!(nn.order().unwrap() <= 36);
        prop_assert_eq!(ext(1, &m, &nn).unwrap().group_type(), brute_force_ext1(&m, &nn).unwrap());
    }

    #[test]
    fn hom_into_dual_is_dual_of_tensor(n in prop::sample::select(vec![6i128, 8, 12, 18]), a in 0usize..8, b in 0usize..8, c in 0usize..8) {
        let h = RingHandle::IntegersMod(n);
        let ds = divisors(n);
        let pick = |k: usize| ds[k % ds.len()];
        let m = abelian_module(alg(h), Side::Left, &[pick(a), pick(b)]);
        let nr = abelian_module(alg(h), Side::Right, &[pick(c)]);
        let lhs = hom(&m, &char_dual(&nr).unwrap()).unwrap().group_type();
        // a finite abelian group and its character group have the same type
        prop_assert_eq!(lhs, Tensor::new(&nr, &m).group.group_type());
    }

    #[test]
    fn surjective_towers_have_no_lim1(orders in prop::collection::vec(1i128..=6, 2..=5)) {
        let z = alg(RingHandle::Integers);
        let mut acc = 1;
        let levels: Vec<Module> = orders
            .iter()
            .map(|d| {
                acc *= d;
                Module::cyclic(z.clone(), Side::Left, &Lattice::scaled(1, acc))
            })
            .collect();
        let maps = (0..levels.len() - 1)
            .map(|n| ModuleMap::new(levels[n + 1].clone(), levels[n].clone(), vec![vec![1]]))
            .collect();
        let t = Tower::inverse(levels, maps).unwrap();
        prop_assert!(t.all_surjective());
        let zero = matches!(tower_limits(&t).unwrap().lim1, Lim1::Zero { .. });
        prop_assert!(zero);
    }

    #[test]
    fn normal_form_ignores_change_of_basis(
        rows in prop::collection::vec(prop::collection::vec(-9i128..=9, 3), 1..=3),
        ops in prop::collection::vec((0usize..3, 0usize..3, -2i128..=2, any::<bool>()), 0..6),
    ) {
        let h = RingHandle::Integers;
        let build = |r: &Vec<Vec<Int>>| {
            let els = r.iter().map(|row| row.iter().map(|&x| h.from_int(x)).collect()).collect();
            FPModule::new(h, Side::Left, 3, els).unwrap()
        };
        let mut changed = rows.clone();
        for (i, j, c, on_columns) in ops {
            if i == j {
                continue;
            }
            if on_columns {
                for r in changed.iter_mut() {
                    r[i] += c * r[j];
                }
            } else if i < changed.len() && j < changed.len() {
                let src = changed[j].clone();
                for (x, y) in changed[i].iter_mut().zip(src) {
                    *x += c * y;
                }
            }
        }
        prop_assert_eq!(normal_form(&build(&rows)).unwrap(), normal_form(&build(&changed)).unwrap());
    }

    #[test]
    fn hom_ext_sequence_is_exact(n in prop::sample::select(vec![4i128, 6, 8, 12]), a in 0usize..8, b in 0usize..8, x in 0i128..12, y in 0i128..12, c in 0usize..8) {
        let h = RingHandle::IntegersMod(n);
        let ds = divisors(n);
        let pick = |k: usize| ds[k % ds.len()];
        let bmod = abelian_module(alg(h), Side::Left, &[pick(a), pick(b)]);
        let (amod, iota) = bmod.submodule(&bmod.span(&[vec![x, y]]));
        let (_, pi) = bmod.quotient(&iota.image_lattice());
        let m = abelian_module(alg(h), Side::Left, &[pick(c)]);
        let exact = hom_ext_sequence(&m, &iota, &pi).unwrap();
        prop_assert!(exact.iter().all(|&e| e), "{:?} for A = {}", exact, amod.group_type());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn saturation_is_idempotent(g in 2i128..=30) {
        let seed = Ideal::principal(&RingHandle::Integers.from_int(g));
        let s = saturate(std::slice::from_ref(&seed), &TOmegaWitness::Identity, 3, 6).unwrap();
        prop_assert!(s.base.in_filter(&seed));
        prop_assert!(s.base.flags.t4_prime.is_verified());
        let again = saturate(&s.base.ideals, &TOmegaWitness::Identity, 3, 6).unwrap();
        prop_assert_eq!(again.base.ideals, s.base.ideals.clone());
        // verdicts are reproducible under the same bounds
        let sample = Sample::standard(&s.base);
        prop_assert_eq!(check_axioms(&s.base, &sample), check_axioms(&s.base, &sample));
    }

    #[test]
    fn t4_reduces_to_generators(p in prop::sample::select(vec![2i128, 3, 5]), i in 1i128..=200, j1 in 1i128..=40, j2 in 1i128..=40) {
        let h = RingHandle::Integers;
        let b = p_adic(p, 5);
        let i = Ideal::principal(&h.from_int(i));
        let j = Ideal::new(h, &[h.from_int(j1), h.from_int(j2)]).unwrap();
        let sample: Vec<RingElement> = (-6..=6).map(|x| h.from_int(x)).collect();
        let (all, gens) = t4_generator_sides(&b, &i, &j, &sample);
        prop_assert_eq!(all, gens);
    }

    #[test]
    fn kernel_of_u_is_torsion(n in prop::sample::select(vec![8i128, 12, 18, 20, 24, 36]), d in 0usize..8) {
        let h = RingHandle::IntegersMod(n);
        let ds: Vec<Int> = divisors(n).into_iter().filter(|&d| d > 1 && d < n).collect();
        let g = ds[d % ds.len()];
        let base = TopologyBase::powers(&h.from_int(g), 4).unwrap();
        let q = ring_of_quotients(&base, 4).unwrap();
        let r = Module::free(alg(h), Side::Right, 1);
        prop_assert_eq!(q.kernel_lattice(), torsion_submodule(&r, &base).unwrap().lattice());
        prop_assert!(q.epimorphism_check().is_verified());
    }

    #[test]
    fn completion_identities(p in prop::sample::select(vec![2i128, 3, 5]), free in 0usize..=2, torsion in prop::collection::vec(2i128..=12, 0..=2)) {
        prop_assume!(free + torsion.len() > 0);
        let m = z_module(free, &torsion);
        let base = p_adic(p, 3);
        let c = complete_module(&m, &base, 3).unwrap();
        prop_assert!(monad_laws(&c, 0, 8).unwrap().is_verified());
        prop_assert!(completion_levels_agree(&c).unwrap().iter().all(|&b| b));
        let ring = complete_ring(&base, 3).unwrap();
        for i in &ring.ideals {
            let s = star_subgroup(i, &c).unwrap();
            prop_assert!(s.contains_product() && s.equal());
        }
        prop_assert!(roundtrip_covariant(&tp(&c)).unwrap().holds());
    }

    #[test]
    fn rewrites_round_trip(p in prop::sample::select(vec![2i128, 3]), units in prop::collection::vec(1i128..=20, 1..=4)) {
        let h = RingHandle::Integers;
        let ring = complete_ring(&p_adic(p, 4), 4).unwrap();
        let family: Vec<RingElement> = units.iter().enumerate().map(|(k, u)| h.from_int(p.pow(k as u32 + 1) * (u * p + 1))).collect();
        let t = strong_generation_rewrite(&ring, &[h.from_int(p)], &family).unwrap();
        prop_assert!(t.verify(&ring));
    }

    #[test]
    fn five_term_is_exact_over_integers(p in prop::sample::select(vec![2i128, 3, 5]), free in 0usize..=2, torsion in prop::collection::vec(2i128..=12, 0..=2)) {
        prop_assume!(free + torsion.len() > 0);
        let k = KComplex::new(&p_adic(p, 3), 3).unwrap();
        let f = five_term(&z_module(free, &torsion).into(), &k).unwrap();
        prop_assert!(f.exact(), "{:?}", f.levels);
    }

    #[test]
    fn comparison_triangles_commute(p in prop::sample::select(vec![2i128, 3, 5]), rank in 1usize..=3) {
        let k = KComplex::new(&p_adic(p, 3), 3).unwrap();
        let bt = beta_theta(&z_module(rank, &[]), &k).unwrap();
        for l in &bt.levels {
            prop_assert!(l.triangle && l.beta_delta && l.xi && l.zeta, "{:?}", l);
        }
    }

    #[test]
    fn delta_of_u_modules_vanishes(p in prop::sample::select(vec![2i128, 3, 5]), rank in 1usize..=2) {
        let k = KComplex::new(&p_adic(p, 3), 3).unwrap();
        let d = delta_module(&Coefficients::Stationary(times(&z_module(rank, &[]), p)), &k).unwrap();
        prop_assert!(d.is_zero());
    }

    #[test]
    fn glued_extensions_pass_both_conditions(p in prop::sample::select(vec![2i128, 3, 5]), glue in prop::collection::vec(-4i128..=4, 1..=2)) {
        let k = KComplex::new(&p_adic(p, 3), 3).unwrap();
        let d = ExtensionDatum::new(glue.len(), 1, vec![glue.clone()]).unwrap();
        let r = strongly_flat_check(&FlatInput::Extension(d), &k).unwrap();
        prop_assert!(r.verdict.is_verified(), "{:?}", r);
    }
}
