//! The two-term complex `K = (R → U)`, `Δ_u(M) = Ext¹(K, M)`, the five-term
//! sequence of `R → U → K`, the comparison maps between `Δ_u` and `Λ`,
//! membership in `U^⊥`, `Ext²(U, −)`, and `End(U/R)` against the completion.
//!
//! Two shapes of `K` are handled. Over a finite ring `U` is a finite module
//! and everything is computed from a resolution of `U`. When `u` is
//! injective and `U = R[1/c]`, `U/R` is the direct tower
//! `Q_1 → Q_2 → …` with `Q_n = E_n/R`, `E_n = {x ∈ U | x·I_n ⊆ R}`, and
//! `Δ_u` is read through lim / lim¹ of towers over `n`.

use std::sync::Arc;

use serde::Serialize;

use crate::contra::{complete_ring, TruncatedTopRing};
use crate::error::{Error, Result};
use crate::homalg::fp::sided;
use crate::homalg::functors::{
    exact_at, ext_pullback, ext_pushout, group_module, hom_matrix, hom_pullback, hom_pushout,
    induced, pullback, pushout, Ext1, FreeResolution, HomComplex, HomSpace, Tensor,
};
use crate::homalg::group::Subquotient;
use crate::homalg::tower::{tower_limits, Lim1, LimReport, Limit, Tower};
use crate::homalg::{GroupType, Matrix, Module, ModuleMap, Side};
use crate::quotients::{
    annihilator_preimage, check_perfect, ring_of_quotients, stationary_colimit, Colimit,
    QuotientRing,
};
use crate::ring::{RingHandle, ZAlg};
use crate::topology::{TopologyBase, Verdict};
use crate::zlinalg::{identity, kernel_mod, vec_mat, Int, Lattice};

pub(crate) fn unit_vec(n: usize, i: usize) -> Vec<Int> {
    let mut e = vec![0; n];
    e[i] = 1;
    e
}

fn integers() -> Arc<ZAlg> {
    Arc::new(RingHandle::Integers.zalg().expect("ℤ"))
}

/// The abelian group of a module, on the same coordinates.
pub fn underlying(m: &Module) -> Module {
    Module::new(
        integers(),
        Side::Left,
        m.rel.clone(),
        vec![identity(m.dim())],
    )
}

// ---------------------------------------------------------------------------
// the complex K

/// `K` over a finite ring: a resolution `F_•` of `U` and a lift of `u`.
#[derive(Clone, Debug)]
pub struct FiniteK {
    pub quotient: QuotientRing,
    pub base: TopologyBase,
    /// `u: R → U` as left modules.
    pub u: ModuleMap,
    pub res: FreeResolution,
    /// `ũ(1) ∈ F_0` over `u(1)`.
    pub lift: Vec<Int>,
}

/// One level of the direct tower `U/R`: `0 → R → E_n → Q_n → 0`.
#[derive(Clone, Debug)]
pub struct Stage {
    /// `E_n ≅ c^n·E_n ⊆ R` as a left ideal, on simplified coordinates.
    pub e: Module,
    /// `c^n·E_n ↪ R`.
    pub incl: ModuleMap,
    /// `R → E_n`, `1 ↦ 1` (that is `c^n` in `c^n·E_n`).
    pub iota: ModuleMap,
    pub q: Module,
    pub pi: ModuleMap,
}

/// `K` for an injective `u: R → R[1/c]`, truncated along the chain.
#[derive(Clone, Debug)]
pub struct TowerK {
    pub quotient: QuotientRing,
    pub base: TopologyBase,
    pub ring: TruncatedTopRing,
    pub c: Int,
    pub stages: Vec<Stage>,
    /// `E_n → E_{n+1}`.
    pub e_maps: Vec<ModuleMap>,
    /// `Q_n → Q_{n+1}`.
    pub q_maps: Vec<ModuleMap>,
}

#[derive(Clone, Debug)]
pub enum KComplex {
    Finite(FiniteK),
    Tower(TowerK),
}

impl KComplex {
    pub fn new(base: &TopologyBase, depth: usize) -> Result<KComplex> {
        let q = ring_of_quotients(base, depth)?;
        if let Some(fq) = q.finite() {
            let u = fq.unit_map(Side::Left);
            let res = FreeResolution::new(&u.target, 3)?;
            let u1 = u.apply(&q.alg().one());
            let lift = res
                .differential(0)
                .preimage(&u1)
                .expect("augmentation is onto");
            return Ok(KComplex::Finite(FiniteK {
                quotient: q.clone(),
                base: base.clone(),
                u,
                res,
                lift,
            }));
        }
        let c = q
            .fractions()
            .map(|f| f.c)
            .ok_or_else(|| Error::Unsupported("ring of quotients without a carrier".into()))?;
        let ring = complete_ring(base, depth)?;
        let alg = ring.alg.clone();
        let rl = Module::free(alg.clone(), Side::Left, 1);
        let mut stages = Vec::new();
        for (n, level) in ring.lattices.iter().enumerate() {
            let cn = c.pow(n as u32 + 1);
            let target = Lattice::scaled(alg.rank, cn).sum(&alg.relations);
            let a = level
                .basis()
                .iter()
                .fold(Lattice::full(alg.rank), |acc, b| {
                    acc.intersect(&kernel_mod(&alg.right_mult(b), &target, 0))
                });
            let (e, incl) = rl.submodule(&a);
            let iota_rows = (0..alg.rank)
                .map(|t| {
                    incl.preimage(
                        &alg.mul(
                            &alg.basis_element(t),
                            &[cn]
                                .iter()
                                .copied()
                                .chain(std::iter::repeat(0))
                                .take(alg.rank)
                                .collect::<Vec<_>>(),
                        ),
                    )
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Unsupported("c^n is not in its own colon ideal".into()))?;
            let iota = ModuleMap::new(rl.clone(), e.clone(), iota_rows);
            let (qn, pi) = e.quotient(&iota.image_lattice());
            stages.push(Stage {
                e,
                incl,
                iota,
                q: qn,
                pi,
            });
        }
        let mut e_maps = Vec::new();
        let mut q_maps = Vec::new();
        for n in 0..stages.len().saturating_sub(1) {
            let (s, t) = (&stages[n], &stages[n + 1]);
            let rows = s
                .incl
                .matrix
                .iter()
                .map(|v| {
                    t.incl
                        .preimage(&v.iter().map(|x| x * c).collect::<Vec<_>>())
                })
                .collect::<Option<Vec<_>>>()
                .ok_or_else(|| Error::Unsupported("E_n does not embed in E_{n+1}".into()))?;
            let f = ModuleMap::new(s.e.clone(), t.e.clone(), rows.clone());
            q_maps.push(ModuleMap::new(
                s.q.clone(),
                t.q.clone(),
                rows.iter().map(|r| t.q.reduce(r)).collect(),
            ));
            e_maps.push(f);
        }
        Ok(KComplex::Tower(TowerK {
            quotient: q,
            base: base.clone(),
            ring,
            c,
            stages,
            e_maps,
            q_maps,
        }))
    }

    pub fn handle(&self) -> RingHandle {
        match self {
            KComplex::Finite(k) => k.quotient.handle,
            KComplex::Tower(k) => k.quotient.handle,
        }
    }

    pub fn alg(&self) -> Arc<ZAlg> {
        match self {
            KComplex::Finite(k) => k.quotient.alg().clone(),
            KComplex::Tower(k) => k.ring.alg.clone(),
        }
    }

    /// `H⁻¹(K) = ker u`.
    pub fn h_minus1(&self) -> Module {
        match self {
            KComplex::Finite(k) => k.u.kernel().0,
            KComplex::Tower(k) => Module::zero(k.ring.alg.clone(), Side::Left),
        }
    }

    pub fn is_faithful(&self) -> bool {
        self.h_minus1().is_zero_module()
    }
}

// ---------------------------------------------------------------------------
// finite K: the cone of ũ

/// `Hom(T, B)` for the free complex `T = (… → F_2 → F_1 ⊕ R → F_0)`
/// quasi-isomorphic to `K`, with `F_1 ⊕ R` in degree −1.
struct ConeCochains {
    /// `C^0 = B^{r0}`, `C^1 = B^{r1} ⊕ B`, `C^n = B^{rn}`.
    terms: Vec<Module>,
    /// `d[n]: C^n → C^{n+1}`.
    d: Vec<Matrix>,
}

impl ConeCochains {
    fn new(k: &FiniteK, b: &Module) -> ConeCochains {
        let hc = HomComplex::new(k.res.clone(), b.clone());
        let res = &k.res;
        let m = b.dim();
        let r = |n: usize| res.rank(n);
        let mut terms = vec![b.power(r(0)), b.power(r(1) + 1)];
        for n in 2..res.len() {
            terms.push(b.power(r(n)));
        }
        let lift = hom_matrix(&[k.lift.clone()], r(0), b);
        let cob1 = hc.coboundary(1);
        let d0: Matrix = (0..m * r(0))
            .map(|i| cob1[i].iter().chain(&lift[i]).copied().collect())
            .collect();
        let cob2 = hc.coboundary(2);
        let mut d1 = cob2;
        d1.extend((0..m).map(|_| vec![0; m * r(2)]));
        let mut d = vec![d0, d1];
        for n in 3..res.len() {
            d.push(hc.coboundary(n));
        }
        ConeCochains { terms, d }
    }

    fn cohomology(&self, n: usize) -> Subquotient {
        let term = &self.terms[n];
        let next = &self.terms[n + 1];
        let cocycles = if next.dim() == 0 || term.dim() == 0 {
            Lattice::full(term.dim())
        } else {
            kernel_mod(&self.d[n], &next.rel, term.modulus()).sum(&term.rel)
        };
        let cocycles = cocycles.sum(&term.rel);
        let boundaries = if n == 0 || term.dim() == 0 {
            term.rel.clone()
        } else {
            term.rel.add_rows(&self.d[n - 1])
        };
        Subquotient::new(cocycles, boundaries)
    }
}

/// `Ext^n(K, B)` over a finite ring, `n ≤ 2`.
pub fn ext_k(k: &FiniteK, b: &Module, n: usize) -> Result<GroupType> {
    let b = sided(b, Side::Left)?;
    Ok(ConeCochains::new(k, &b).cohomology(n).group_type())
}

// ---------------------------------------------------------------------------
// tower K: Hom and Ext against the stages

/// `R → M`, `r ↦ r·x`.
fn orbit_map(m: &Module, x: &[Int]) -> ModuleMap {
    let alg = &m.alg;
    let rows = (0..alg.rank)
        .map(|t| m.act(x, &alg.basis_element(t)))
        .collect();
    ModuleMap::new(Module::free(alg.clone(), Side::Left, 1), m.clone(), rows)
}

/// The five stage groups at one level and the maps between them.
struct StageSequence {
    hom_q: HomSpace,
    hom_e: HomSpace,
    ext_q: Ext1,
    ext_e: Ext1,
    /// `Hom(Q_n, M) → Hom(E_n, M) → M → Ext¹(Q_n, M) → Ext¹(E_n, M)`.
    maps: Vec<ModuleMap>,
}

impl StageSequence {
    fn new(stage: &Stage, m: &Module) -> Result<StageSequence> {
        let hom_q = HomSpace::new(&stage.q, m)?;
        let hom_e = HomSpace::new(&stage.e, m)?;
        let ext_q = Ext1::new(&stage.q, m)?;
        let ext_e = Ext1::new(&stage.e, m)?;
        let a = hom_pullback(&hom_q, &hom_e, &stage.pi)?;
        let one = m.alg.one();
        let e1 = stage.iota.apply(&one);
        let b_rows = hom_e
            .group
            .generators()
            .iter()
            .map(|c| hom_e.complex.cocycle_to_map(c).apply(&e1))
            .collect();
        let b = ModuleMap::new(group_module(&hom_e.group), underlying(m), b_rows);
        let c = connecting(stage, &ext_q, m)?;
        let d = ext_pullback(&ext_q, &ext_e, &stage.pi)?;
        Ok(StageSequence {
            hom_q,
            hom_e,
            ext_q,
            ext_e,
            maps: vec![a, b, c, d],
        })
    }

    fn exactness(&self) -> Vec<bool> {
        let m = &self.maps;
        vec![
            m[0].is_injective(),
            exact_at(&m[0], &m[1]),
            exact_at(&m[1], &m[2]),
            exact_at(&m[2], &m[3]),
            m[3].is_surjective(),
        ]
    }
}

/// `δ_n: M → Ext¹(Q_n, M)`, pushing `0 → R → E_n → Q_n → 0` along `1 ↦ x`.
fn connecting(stage: &Stage, ext: &Ext1, m: &Module) -> Result<ModuleMap> {
    let rows = (0..m.dim())
        .map(|a| {
            let g = orbit_map(m, &unit_vec(m.dim(), a));
            let (_, iota, pi) = pushout(&stage.iota, &stage.pi, &g);
            ext.group
                .to_group(&ext.class_cocycle(&iota, &pi))
                .ok_or_else(|| Error::NotAMorphism("pushout class is not a cocycle".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ModuleMap::new(
        underlying(m),
        group_module(&ext.group),
        rows,
    ))
}

fn inverse_tower(levels: Vec<Module>, maps: Vec<ModuleMap>) -> Result<LimReport> {
    if levels.len() < 2 {
        return Err(Error::MalformedTower("lim needs depth at least 2".into()));
    }
    tower_limits(&Tower::inverse(levels, maps)?)
}

/// A node of a five-term sequence or a level of `Δ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum NodeValue {
    Group {
        group: GroupType,
    },
    /// The colimit of a stationary system.
    Colimit {
        colimit: Colimit,
    },
}

impl NodeValue {
    pub fn is_zero(&self) -> bool {
        match self {
            NodeValue::Group { group } => group.is_zero(),
            NodeValue::Colimit { colimit } => matches!(colimit, Colimit::Zero { .. }),
        }
    }
}

/// Coefficients: a module, or `colim(M --f--> M --f--> …)` such as
/// `ℤ[1/p] = colim(ℤ --p--> ℤ)`.
#[derive(Clone, Debug)]
pub enum Coefficients {
    Module(Module),
    Stationary(ModuleMap),
}

impl Coefficients {
    fn module(&self) -> Result<Module> {
        sided(
            match self {
                Coefficients::Module(m) => m,
                Coefficients::Stationary(f) => &f.source,
            },
            Side::Left,
        )
    }
}

impl From<Module> for Coefficients {
    fn from(m: Module) -> Self {
        Coefficients::Module(m)
    }
}

// ---------------------------------------------------------------------------
// Δ

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum DeltaReport {
    /// `Ext¹(K, M)` over a finite ring.
    Exact { group: GroupType },
    /// `Ext¹(Q_n, M)` per level with lim / lim¹ of the `Ext¹` and `Hom`
    /// towers; `Δ = lim` when lim¹ of `Hom(Q_n, M)` vanishes.
    Tower {
        levels: Vec<NodeValue>,
        ext_limits: Option<LimReport>,
        hom_lim1: Option<Lim1>,
        determined: bool,
    },
}

impl DeltaReport {
    pub fn is_zero(&self) -> bool {
        match self {
            DeltaReport::Exact { group } => group.is_zero(),
            DeltaReport::Tower {
                levels, determined, ..
            } => *determined && levels.iter().all(|l| l.is_zero()),
        }
    }
}

pub fn delta_module(m: &Coefficients, k: &KComplex) -> Result<DeltaReport> {
    match k {
        KComplex::Finite(fk) => {
            let Coefficients::Module(m) = m else {
                return Err(Error::Unsupported(
                    "stationary coefficients need a tower complex".into(),
                ));
            };
            Ok(DeltaReport::Exact {
                group: ext_k(fk, m, 1)?,
            })
        }
        KComplex::Tower(tk) => {
            let module = m.module()?;
            let exts: Vec<Ext1> = tk
                .stages
                .iter()
                .map(|s| Ext1::new(&s.q, &module))
                .collect::<Result<_>>()?;
            match m {
                Coefficients::Module(_) => {
                    let levels = exts
                        .iter()
                        .map(|e| NodeValue::Group {
                            group: e.group.group_type(),
                        })
                        .collect();
                    if tk.stages.len() < 2 {
                        return Ok(DeltaReport::Tower {
                            levels,
                            ext_limits: None,
                            hom_lim1: None,
                            determined: false,
                        });
                    }
                    let ext_maps = (0..exts.len() - 1)
                        .map(|n| ext_pullback(&exts[n + 1], &exts[n], &tk.q_maps[n]))
                        .collect::<Result<Vec<_>>>()?;
                    let ext_limits = inverse_tower(
                        exts.iter().map(|e| group_module(&e.group)).collect(),
                        ext_maps,
                    )?;
                    let homs: Vec<HomSpace> = tk
                        .stages
                        .iter()
                        .map(|s| HomSpace::new(&s.q, &module))
                        .collect::<Result<_>>()?;
                    let hom_maps = (0..homs.len() - 1)
                        .map(|n| hom_pullback(&homs[n + 1], &homs[n], &tk.q_maps[n]))
                        .collect::<Result<Vec<_>>>()?;
                    let hom_limits = inverse_tower(
                        homs.iter().map(|h| group_module(&h.group)).collect(),
                        hom_maps,
                    )?;
                    let determined = !matches!(hom_limits.lim1, Lim1::Indeterminate { .. })
                        && !matches!(ext_limits.limit, Limit::Indeterminate { .. });
                    Ok(DeltaReport::Tower {
                        levels,
                        ext_limits: Some(ext_limits),
                        hom_lim1: Some(hom_limits.lim1),
                        determined,
                    })
                }
                Coefficients::Stationary(f) => {
                    let f = ModuleMap::new(module.clone(), module.clone(), f.matrix.clone());
                    let levels = exts
                        .iter()
                        .map(|e| {
                            Ok(NodeValue::Colimit {
                                colimit: stationary_colimit(&ext_pushout(e, e, &f)?),
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    let determined = levels.iter().all(|l| {
                        !matches!(
                            l,
                            NodeValue::Colimit {
                                colimit: Colimit::Indeterminate { .. }
                            }
                        )
                    });
                    Ok(DeltaReport::Tower {
                        levels,
                        ext_limits: None,
                        hom_lim1: None,
                        determined,
                    })
                }
            }
        }
    }
}

// ---------------------------------------------------------------------------
// the five-term sequence

#[derive(Clone, Debug, Serialize)]
pub struct FiveTermLevel {
    /// `Ext⁰(K,B)`, `Hom(U,B)`, `B`, `Δ(B)`, `Ext¹(U,B)` (their stage
    /// versions for tower complexes).
    pub objects: Vec<NodeValue>,
    pub exact: Vec<bool>,
    /// For stationary coefficients: the maps commute with the endomorphisms.
    pub natural: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct TowerLimits {
    /// `Hom(U, B) = lim Hom(E_n, B)`, `Ext¹(U, B) = lim¹ Hom(E_n, B)`.
    pub hom_u: LimReport,
    pub delta: LimReport,
    pub hom_q: LimReport,
}

#[derive(Clone, Debug)]
pub struct FiveTermData {
    pub levels: Vec<FiveTermLevel>,
    /// `δ_{u,B}: B → Δ(B)` per level, on the underlying groups.
    pub delta_maps: Vec<ModuleMap>,
    pub limits: Option<TowerLimits>,
}

impl FiveTermData {
    pub fn exact(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.natural && l.exact.iter().all(|&e| e))
    }
}

pub fn five_term(b: &Coefficients, k: &KComplex) -> Result<FiveTermData> {
    match k {
        KComplex::Finite(fk) => {
            let Coefficients::Module(b) = b else {
                return Err(Error::Unsupported(
                    "stationary coefficients need a tower complex".into(),
                ));
            };
            finite_five_term(fk, &sided(b, Side::Left)?)
        }
        KComplex::Tower(tk) => tower_five_term(tk, b),
    }
}

fn finite_five_term(k: &FiniteK, b: &Module) -> Result<FiveTermData> {
    let cone = ConeCochains::new(k, b);
    let hc = HomComplex::new(k.res.clone(), b.clone());
    let m = b.dim();
    let r1 = k.res.rank(1);
    let nodes = [
        cone.cohomology(0),
        hc.cohomology(0),
        Subquotient::quotient(b.rel.clone()),
        cone.cohomology(1),
        hc.cohomology(1),
    ];
    let lift = hom_matrix(&[k.lift.clone()], k.res.rank(0), b);
    let a = induced(&nodes[0], &nodes[1], |x| x.to_vec())?;
    let bm = induced(&nodes[1], &nodes[2], |x| vec_mat(x, &lift))?;
    let c = induced(&nodes[2], &nodes[3], |x| {
        let mut v = vec![0; m * r1];
        v.extend_from_slice(x);
        v
    })?;
    let d = induced(&nodes[3], &nodes[4], |x| x[..m * r1].to_vec())?;
    let exact = vec![
        a.is_injective(),
        exact_at(&a, &bm),
        exact_at(&bm, &c),
        exact_at(&c, &d),
        d.is_surjective(),
    ];
    let objects = nodes
        .iter()
        .map(|n| NodeValue::Group {
            group: n.group_type(),
        })
        .collect();
    // δ on the coordinates of B
    let delta = ModuleMap::new(
        underlying(b),
        group_module(&nodes[3]),
        (0..m)
            .map(|i| {
                let mut v = vec![0; m * r1];
                v.extend(unit_vec(m, i));
                nodes[3].to_group(&v).expect("B lands in cocycles")
            })
            .collect(),
    );
    Ok(FiveTermData {
        levels: vec![FiveTermLevel {
            objects,
            exact,
            natural: true,
        }],
        delta_maps: vec![delta],
        limits: None,
    })
}

fn tower_five_term(k: &TowerK, b: &Coefficients) -> Result<FiveTermData> {
    let module = b.module()?;
    let seqs: Vec<StageSequence> = k
        .stages
        .iter()
        .map(|s| StageSequence::new(s, &module))
        .collect::<Result<_>>()?;
    let mut levels = Vec::new();
    for s in &seqs {
        let exact = s.exactness();
        let (objects, natural) = match b {
            Coefficients::Module(_) => (
                vec![
                    &s.hom_q.group,
                    &s.hom_e.group,
                    &Subquotient::quotient(module.rel.clone()),
                    &s.ext_q.group,
                    &s.ext_e.group,
                ]
                .into_iter()
                .map(|g| NodeValue::Group {
                    group: g.group_type(),
                })
                .collect(),
                true,
            ),
            Coefficients::Stationary(f) => {
                let f = ModuleMap::new(module.clone(), module.clone(), f.matrix.clone());
                let fu = ModuleMap::new(underlying(&module), underlying(&module), f.matrix.clone());
                let endos = [
                    hom_pushout(&s.hom_q, &s.hom_q, &f)?,
                    hom_pushout(&s.hom_e, &s.hom_e, &f)?,
                    fu,
                    ext_pushout(&s.ext_q, &s.ext_q, &f)?,
                    ext_pushout(&s.ext_e, &s.ext_e, &f)?,
                ];
                let natural = (0..4).all(|i| {
                    s.maps[i]
                        .then(&endos[i + 1])
                        .same_as(&endos[i].then(&s.maps[i]))
                });
                (
                    endos
                        .iter()
                        .map(|e| NodeValue::Colimit {
                            colimit: stationary_colimit(e),
                        })
                        .collect(),
                    natural,
                )
            }
        };
        levels.push(FiveTermLevel {
            objects,
            exact,
            natural,
        });
    }
    let delta_maps = seqs.iter().map(|s| s.maps[2].clone()).collect();
    let limits = match b {
        Coefficients::Module(_) if seqs.len() >= 2 => {
            let n = seqs.len();
            let hom_u = inverse_tower(
                seqs.iter().map(|s| group_module(&s.hom_e.group)).collect(),
                (0..n - 1)
                    .map(|i| hom_pullback(&seqs[i + 1].hom_e, &seqs[i].hom_e, &k.e_maps[i]))
                    .collect::<Result<_>>()?,
            )?;
            let delta = inverse_tower(
                seqs.iter().map(|s| group_module(&s.ext_q.group)).collect(),
                (0..n - 1)
                    .map(|i| ext_pullback(&seqs[i + 1].ext_q, &seqs[i].ext_q, &k.q_maps[i]))
                    .collect::<Result<_>>()?,
            )?;
            let hom_q = inverse_tower(
                seqs.iter().map(|s| group_module(&s.hom_q.group)).collect(),
                (0..n - 1)
                    .map(|i| hom_pullback(&seqs[i + 1].hom_q, &seqs[i].hom_q, &k.q_maps[i]))
                    .collect::<Result<_>>()?,
            )?;
            Some(TowerLimits {
                hom_u,
                delta,
                hom_q,
            })
        }
        _ => None,
    };
    Ok(FiveTermData {
        levels,
        delta_maps,
        limits,
    })
}

// ---------------------------------------------------------------------------
// β and θ

#[derive(Clone, Debug)]
pub struct BetaThetaLevel {
    /// `δ_n: M → Δ_n`.
    pub delta: ModuleMap,
    /// `λ_n: M → M/I_nM`.
    pub lambda: ModuleMap,
    pub theta: ModuleMap,
    pub beta: ModuleMap,
    /// `θ∘β = id`.
    pub xi: bool,
    /// `β∘θ = id`.
    pub zeta: bool,
    /// `θ∘λ = δ`.
    pub triangle: bool,
    /// `β∘δ = λ`.
    pub beta_delta: bool,
}

impl BetaThetaLevel {
    pub fn holds(&self) -> bool {
        self.xi && self.zeta && self.triangle && self.beta_delta
    }
}

#[derive(Clone, Debug)]
pub struct BetaTheta {
    pub levels: Vec<BetaThetaLevel>,
}

impl BetaTheta {
    pub fn holds(&self) -> bool {
        self.levels.iter().all(|l| l.holds())
    }
}

/// Builds `θ: Λ(M) → Δ(M)` level by level from `M → Hom(Q_n, Q_n⊗M)` and
/// the connecting map of `0 → M → E_n⊗M → Q_n⊗M → 0`, and `β` as the map
/// with `β∘δ = λ`.
pub fn beta_theta(m: &Module, k: &KComplex) -> Result<BetaTheta> {
    let KComplex::Tower(tk) = k else {
        return Err(Error::Unsupported(
            "β and θ are built for injective units on a chain".into(),
        ));
    };
    let m = sided(m, Side::Left)?;
    let mut levels = Vec::new();
    for (n, stage) in tk.stages.iter().enumerate() {
        let ext = Ext1::new(&stage.q, &m)?;
        let delta_grp = group_module(&ext.group);
        let delta = connecting(stage, &ext, &m)?;
        let lam_mod = underlying(&m.quotient(&m.times_ideal(&tk.ring.lattices[n])).0);
        let lambda = ModuleMap::new(underlying(&m), lam_mod.clone(), identity(m.dim()));

        // 0 → M → E_n⊗M → Q_n⊗M → 0
        let er = sided(&stage.e, Side::Right)?;
        let qr = sided(&stage.q, Side::Right)?;
        let te = Tensor::new(&er, &m);
        let tq = Tensor::new(&qr, &m);
        let (em, qm) = (
            te.module
                .clone()
                .ok_or(Error::Unsupported("noncommutative tensor".into()))?,
            tq.module.clone().unwrap(),
        );
        let e1 = stage.iota.apply(&m.alg.one());
        let iota_m = ModuleMap::new(
            m.clone(),
            em.clone(),
            (0..m.dim())
                .map(|a| te.pure(&e1, &unit_vec(m.dim(), a)))
                .collect(),
        );
        if !iota_m.is_injective() {
            let w = iota_m
                .kernel_lattice()
                .basis()
                .iter()
                .find(|v| !m.rel.contains(v))
                .cloned()
                .unwrap_or_default();
            return Err(Error::TorsionObstruction(format!("{w:?}")));
        }
        let pi_rows = (0..stage.e.dim())
            .flat_map(|i| (0..m.dim()).map(move |j| (i, j)))
            .map(|(i, j)| tq.pure(&stage.pi.matrix[i], &unit_vec(m.dim(), j)))
            .collect();
        let pi_m = ModuleMap::new(em.clone(), qm.clone(), pi_rows);
        // m ↦ (q ↦ q⊗m), then the connecting map; the erasing map Λ_n(Hom) → Hom
        // is the identity at level n since Hom(Q_n, −) is killed by I_n
        let theta_rows = (0..m.dim())
            .map(|a| {
                let phi = ModuleMap::new(
                    stage.q.clone(),
                    qm.clone(),
                    (0..stage.q.dim())
                        .map(|i| tq.pure(&unit_vec(stage.q.dim(), i), &unit_vec(m.dim(), a)))
                        .collect(),
                );
                let (_, i2, p2) = pullback(&iota_m, &pi_m, &phi);
                ext.group
                    .to_group(&ext.class_cocycle(&i2, &p2))
                    .ok_or_else(|| Error::NotAMorphism("θ".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let theta = ModuleMap::new(lam_mod.clone(), delta_grp.clone(), theta_rows);
        theta
            .check()
            .map_err(|e| Error::NotAMorphism(format!("θ is not defined on M/I_nM: {e}")))?;
        let beta_rows = (0..delta_grp.dim())
            .map(|j| {
                delta
                    .preimage(&unit_vec(delta_grp.dim(), j))
                    .map(|x| lam_mod.reduce(&x))
            })
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| Error::NotAMorphism("δ is not onto Δ".into()))?;
        let beta = ModuleMap::new(delta_grp.clone(), lam_mod.clone(), beta_rows);
        let beta_ok = beta.check().is_ok();
        let xi = beta_ok && beta.then(&theta).same_as(&ModuleMap::identity(&delta_grp));
        let zeta = beta_ok && theta.then(&beta).same_as(&ModuleMap::identity(&lam_mod));
        let triangle = lambda.then(&theta).same_as(&delta);
        let beta_delta = beta_ok && delta.then(&beta).same_as(&lambda);
        levels.push(BetaThetaLevel {
            delta,
            lambda,
            theta,
            beta,
            xi,
            zeta,
            triangle,
            beta_delta,
        });
    }
    Ok(BetaTheta { levels })
}

// ---------------------------------------------------------------------------
// U^⊥

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Membership {
    Member,
    NonMember { reason: String },
    Indeterminate { reason: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct PerpReport {
    pub membership: Membership,
    pub hom_zero: Option<bool>,
    pub ext1_zero: Option<bool>,
    /// For non-injective finite `u`: a submodule `C'` with `C'` and `C/C'`
    /// killed by the deepest base ideal (so both carry `R̂`-actions).
    pub extension: Option<Option<Vec<Vec<Int>>>>,
}

pub enum PerpInput {
    Module(Module),
    /// An inverse tower `C = lim C_m` with surjective maps.
    Tower(Tower),
}

pub fn perp_membership(c: &PerpInput, k: &KComplex) -> Result<PerpReport> {
    match c {
        PerpInput::Tower(t) => {
            if !t.all_surjective() {
                let reason = "tower maps are not surjective".to_string();
                return Ok(PerpReport {
                    membership: Membership::Indeterminate { reason },
                    hom_zero: None,
                    ext1_zero: None,
                    extension: None,
                });
            }
            for (i, l) in t.levels.iter().enumerate() {
                let r = perp_membership(&PerpInput::Module(l.clone()), k)?;
                if r.membership != Membership::Member {
                    let reason = format!("level {} is not a member", i + 1);
                    return Ok(PerpReport {
                        membership: Membership::Indeterminate { reason },
                        ..r
                    });
                }
            }
            Ok(PerpReport {
                membership: Membership::Member,
                hom_zero: Some(true),
                ext1_zero: Some(true),
                extension: None,
            })
        }
        PerpInput::Module(m) => match k {
            KComplex::Finite(fk) => {
                let m = sided(m, Side::Left)?;
                let hc = HomComplex::new(fk.res.clone(), m.clone());
                let hom_zero = hc.cohomology(0).is_zero();
                let ext1_zero = hc.cohomology(1).is_zero();
                let extension = (!k.is_faithful()).then(|| two_step_hull(fk, &m));
                let membership = if hom_zero && ext1_zero {
                    Membership::Member
                } else {
                    Membership::NonMember {
                        reason: if hom_zero {
                            "Ext¹(U, C) ≠ 0".into()
                        } else {
                            "Hom(U, C) ≠ 0".into()
                        },
                    }
                };
                Ok(PerpReport {
                    membership,
                    hom_zero: Some(hom_zero),
                    ext1_zero: Some(ext1_zero),
                    extension,
                })
            }
            KComplex::Tower(tk) => {
                let m = sided(m, Side::Left)?;
                let seqs: Vec<StageSequence> = tk
                    .stages
                    .iter()
                    .map(|s| StageSequence::new(s, &m))
                    .collect::<Result<_>>()?;
                if seqs.iter().any(|s| !s.ext_e.group.is_zero()) {
                    let reason = "Ext¹(E_n, C) ≠ 0".to_string();
                    return Ok(PerpReport {
                        membership: Membership::Indeterminate { reason },
                        hom_zero: None,
                        ext1_zero: None,
                        extension: None,
                    });
                }
                let n = seqs.len();
                if n < 2 {
                    return Err(Error::MalformedTower("lim needs depth at least 2".into()));
                }
                let hom_u = inverse_tower(
                    seqs.iter().map(|s| group_module(&s.hom_e.group)).collect(),
                    (0..n - 1)
                        .map(|i| hom_pullback(&seqs[i + 1].hom_e, &seqs[i].hom_e, &tk.e_maps[i]))
                        .collect::<Result<_>>()?,
                )?;
                let hom_zero = match &hom_u.limit {
                    Limit::Zero { .. } | Limit::Vanishing { .. } => Some(true),
                    Limit::Stable { group, .. } | Limit::Truncated { group, .. } => {
                        Some(group.is_zero())
                    }
                    Limit::Indeterminate { .. } => None,
                };
                let ext1_zero = match &hom_u.lim1 {
                    Lim1::Zero { .. } => Some(true),
                    Lim1::Nonzero { .. } => Some(false),
                    Lim1::Indeterminate { .. } => None,
                };
                let membership = match (hom_zero, ext1_zero) {
                    (Some(true), Some(true)) => Membership::Member,
                    (Some(false), _) => Membership::NonMember {
                        reason: "Hom(U, C) = lim Hom(E_n, C) ≠ 0".into(),
                    },
                    (_, Some(false)) => Membership::NonMember {
                        reason: "Ext¹(U, C) ⊇ lim¹ Hom(E_n, C) ≠ 0".into(),
                    },
                    _ => Membership::Indeterminate {
                        reason: "tower verdict indeterminate".into(),
                    },
                };
                Ok(PerpReport {
                    membership,
                    hom_zero,
                    ext1_zero,
                    extension: None,
                })
            }
        },
    }
}

/// A submodule `C' ⊆ C` with `I·C' = 0` and `I·(C/C') = 0` for the deepest
/// ideal `I` of the base. Every such `C'` contains `I·C`, and then
/// `I·C' = 0` forces `I·(I·C) = 0`, so `C' = I·C` is the only candidate
/// that needs testing.
fn two_step_hull(k: &FiniteK, c: &Module) -> Option<Vec<Vec<Int>>> {
    let deepest = k.base.minimal_ideal()?;
    let l = deepest.lattice()?;
    let ic = c.times_ideal(l);
    let (sub, _) = c.submodule(&ic);
    let kills = sub.rel.contains_lattice(&sub.times_ideal(l));
    kills.then(|| c.generators_of(&ic))
}

// ---------------------------------------------------------------------------
// Ext²

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Ext2Report {
    Zero {
        cone_agrees: bool,
    },
    Nonzero {
        group: GroupType,
    },
    /// Global dimension at most one.
    Vacuous {
        reason: String,
    },
}

pub fn ext2_vanish(k: &KComplex, b: &Module) -> Result<Ext2Report> {
    match k {
        KComplex::Tower(tk) => Ok(Ext2Report::Vacuous {
            reason: format!("{} is hereditary, so Ext² vanishes", tk.quotient.handle),
        }),
        KComplex::Finite(fk) => {
            let b = sided(b, Side::Left)?;
            let u = &fk.u.target;
            let res = FreeResolution::new(u, 3)?;
            let e2 = HomComplex::new(res, b.clone()).cohomology(2).group_type();
            let cone = ext_k(fk, &b, 2)?;
            if e2.is_zero() {
                Ok(Ext2Report::Zero {
                    cone_agrees: cone == e2,
                })
            } else {
                Ok(Ext2Report::Nonzero { group: e2 })
            }
        }
    }
}

// ---------------------------------------------------------------------------
// End(U/R)

#[derive(Clone, Debug, Serialize)]
pub struct EndoLevel {
    /// `|R/I_n|`.
    pub ring_order: Option<Int>,
    /// `Hom(Q_n, Q_m)` for the deepest `m`, the truncation of `End(U/R)`.
    pub endo: GroupType,
    /// `Hom(Q_n, Q_m) → Hom(Q_n, Q_{m+1})` is bijective at the last step.
    pub stabilized: bool,
    pub injective: bool,
    pub bijective: bool,
    /// `ker(R → End(Q_n)) = I_n`.
    pub topology_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EndoReport {
    pub levels: Vec<EndoLevel>,
    /// For each certificate `Σ s_k v_k = 1`: the annihilator of the `v_k`
    /// lies in the certified ideal.
    pub witnesses: Vec<(String, String, bool)>,
}

impl EndoReport {
    pub fn holds(&self) -> bool {
        self.levels
            .iter()
            .all(|l| l.stabilized && l.bijective && l.topology_matches)
            && self.witnesses.iter().all(|w| w.2)
    }
}

/// `σ_n: R/I_n → Hom(Q_n, Q_m)`, `r ↦ (x ↦ r·x)`, against the stabilized
/// `Hom(Q_n, Q_m)`, for levels `n = 1..depth`. One extra stage is built
/// to witness the stabilization.
pub fn endo_compare(base: &TopologyBase, depth: usize) -> Result<EndoReport> {
    let k = &KComplex::new(base, depth + 1)?;
    let KComplex::Tower(tk) = k else {
        return Err(if k.is_faithful() {
            Error::Unsupported("endomorphism comparison over a finite ring".into())
        } else {
            Error::FaithfulOnly
        });
    };
    let depth = tk.stages.len();
    if depth < 2 {
        return Err(Error::MalformedTower(
            "the comparison needs depth at least 2".into(),
        ));
    }
    let alg = &tk.ring.alg;
    let last = depth - 1;
    let mut levels = Vec::new();
    for n in 0..last {
        let qn = &tk.stages[n].q;
        // Q_n → Q_{last-1} → Q_last
        let into = |m: usize| (n..m).fold(ModuleMap::identity(qn), |f, i| f.then(&tk.q_maps[i]));
        let h_prev = HomSpace::new(qn, &tk.stages[last - 1].q)?;
        let h_last = HomSpace::new(qn, &tk.stages[last].q)?;
        let step = hom_pushout(&h_prev, &h_last, &tk.q_maps[last - 1])?;
        let stabilized = last - 1 >= n && step.is_iso();
        let j = into(last);
        let ring_level = underlying(&tk.ring.levels[n]);
        let rows = (0..alg.rank)
            .map(|t| {
                let r = ModuleMap::new(
                    qn.clone(),
                    qn.clone(),
                    qn.action_matrix(&alg.basis_element(t)),
                );
                h_last
                    .group
                    .to_group(&h_last.complex.map_to_cocycle(&r.then(&j)))
                    .ok_or_else(|| Error::NotAMorphism("σ".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        let sigma = ModuleMap::new(ring_level.clone(), group_module(&h_last.group), rows);
        let defined = sigma.check().is_ok();
        let injective = defined && sigma.is_injective();
        let bijective = injective && sigma.is_surjective();
        // ker(R → End(Q_n)) on all of R
        let r_free = ModuleMap::new(
            underlying(&Module::free(alg.clone(), Side::Right, 1)),
            sigma.target.clone(),
            sigma.matrix.clone(),
        );
        let topology_matches = r_free.kernel_lattice() == tk.ring.lattices[n].sum(&alg.relations);
        levels.push(EndoLevel {
            ring_order: tk.ring.levels[n].order(),
            endo: h_last.group.group_type(),
            stabilized,
            injective,
            bijective,
            topology_matches,
        });
    }
    let perfect = check_perfect(&tk.base, &tk.quotient)?;
    let witnesses = perfect
        .certificates
        .iter()
        .map(|cert| {
            let a = annihilator_preimage(cert, &tk.quotient)?;
            Ok((cert.ideal.to_string(), a.ideal.to_string(), a.contained))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EndoReport { levels, witnesses })
}

/// Whether a verdict-style report came out positive.
pub fn verdict_of(ok: bool, detail: &str) -> Verdict {
    if ok {
        Verdict::Verified {
            bound: crate::topology::Bound::Exhaustive,
        }
    } else {
        Verdict::Failed {
            witness: crate::topology::Witness {
                ideals: vec![],
                elements: vec![],
                detail: detail.into(),
            },
        }
    }
}
