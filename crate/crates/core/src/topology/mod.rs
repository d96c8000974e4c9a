//! Bases of right ideals, Gabriel axiom checks, the T_ω condition,
//! saturation and directed unions.

pub mod corrigendum;

use std::collections::{BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ring::{Field, Ideal, Poly, RingElement, RingHandle};
use crate::zlinalg::Int;

/// How far a verdict reaches.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Bound {
    /// Every ideal and element of a finite ring was examined.
    Exhaustive,
    /// True for every base, by the way bases are represented.
    Construction,
    /// Materialized to `depth`, containments searched to `search_depth`,
    /// elements drawn from a sample of the given size.
    Truncated {
        depth: usize,
        search_depth: usize,
        samples: usize,
    },
}

/// A concrete failure: the ideals and elements that break an axiom.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub ideals: Vec<String>,
    pub elements: Vec<String>,
    pub detail: String,
}

impl Witness {
    fn new(ideals: &[&Ideal], elements: &[&RingElement], detail: impl Into<String>) -> Witness {
        Witness {
            ideals: ideals.iter().map(|i| i.to_string()).collect(),
            elements: elements.iter().map(|e| e.to_string()).collect(),
            detail: detail.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    Verified { bound: Bound },
    Failed { witness: Witness },
    Unchecked,
}

impl Verdict {
    pub fn is_verified(&self) -> bool {
        matches!(self, Verdict::Verified { .. })
    }

    pub fn is_failed(&self) -> bool {
        matches!(self, Verdict::Failed { .. })
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Failed { witness } => Some(witness),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomFlags {
    pub t0: Verdict,
    pub t1: Verdict,
    pub t2: Verdict,
    pub t3: Verdict,
    pub t4_prime: Verdict,
    /// The unreduced axiom, decided only over finite rings.
    pub t4: Verdict,
}

impl AxiomFlags {
    pub fn unchecked() -> AxiomFlags {
        AxiomFlags {
            t0: Verdict::Unchecked,
            t1: Verdict::Unchecked,
            t2: Verdict::Unchecked,
            t3: Verdict::Unchecked,
            t4_prime: Verdict::Unchecked,
            t4: Verdict::Unchecked,
        }
    }

    pub fn all(&self) -> [(&'static str, &Verdict); 6] {
        [
            ("T0", &self.t0),
            ("T1", &self.t1),
            ("T2", &self.t2),
            ("T3", &self.t3),
            ("T4'", &self.t4_prime),
            ("T4", &self.t4),
        ]
    }

    pub fn any_failed(&self) -> bool {
        self.all().iter().any(|(_, v)| v.is_failed())
    }
}

/// The n-th ideal of a chain base (n ≥ 1).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ChainRule {
    /// `I^n`.
    Powers(Ideal),
    /// A finite descending list, constant after its last entry.
    Explicit(Vec<Ideal>),
}

impl ChainRule {
    pub fn ideal(&self, n: usize) -> Ideal {
        assert!(n >= 1);
        match self {
            ChainRule::Powers(i) => i.power(n as u32),
            ChainRule::Explicit(v) => v[(n - 1).min(v.len() - 1)].clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseKind {
    FiniteSet,
    Chain(ChainRule),
    /// Every right ideal in the filter of a finite ring.
    FullEnumeration,
    /// Merged bases of a directed family.
    Union(usize),
}

#[derive(Clone, Debug)]
pub struct TopologyBase {
    pub handle: RingHandle,
    pub kind: BaseKind,
    pub depth: usize,
    /// The materialized base ideals.
    pub ideals: Vec<Ideal>,
    /// Ideals searched when deciding whether something contains a base
    /// ideal; deeper than `ideals` for chains.
    pub pool: Vec<Ideal>,
    pub flags: AxiomFlags,
}

fn dedup(v: Vec<Ideal>) -> Vec<Ideal> {
    let mut seen = std::collections::HashSet::new();
    v.into_iter().filter(|i| seen.insert(i.clone())).collect()
}

impl TopologyBase {
    pub fn finite_set(handle: RingHandle, ideals: Vec<Ideal>) -> Result<TopologyBase> {
        if ideals.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        check_handles(handle, &ideals)?;
        let ideals = dedup(ideals);
        Ok(TopologyBase {
            handle,
            kind: BaseKind::FiniteSet,
            depth: ideals.len(),
            pool: ideals.clone(),
            ideals,
            flags: AxiomFlags::unchecked(),
        })
    }

    /// A chain base materialized to `depth`; containments are searched to
    /// depth `2·depth + 1`.
    pub fn chain(handle: RingHandle, rule: ChainRule, depth: usize) -> Result<TopologyBase> {
        if depth < 2 {
            return Err(Error::MalformedChain(depth));
        }
        if let ChainRule::Explicit(v) = &rule {
            if v.is_empty() {
                return Err(Error::EmptyGenerators);
            }
        }
        let search = 2 * depth + 1;
        let pool: Vec<Ideal> = (1..=search).map(|n| rule.ideal(n)).collect();
        check_handles(handle, &pool)?;
        for n in 1..search {
            if !pool[n].is_subset(&pool[n - 1]) {
                return Err(Error::MalformedChain(n + 1));
            }
        }
        Ok(TopologyBase {
            handle,
            kind: BaseKind::Chain(rule),
            depth,
            ideals: pool[..depth].to_vec(),
            pool,
            flags: AxiomFlags::unchecked(),
        })
    }

    /// The chain `(g^n)`.
    pub fn powers(g: &RingElement, depth: usize) -> Result<TopologyBase> {
        Self::chain(g.handle(), ChainRule::Powers(Ideal::principal(g)), depth)
    }

    /// Every right ideal of a finite ring that contains one of `seed`.
    pub fn full_enumeration(handle: RingHandle, seed: &[Ideal]) -> Result<TopologyBase> {
        if seed.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        check_handles(handle, seed)?;
        let all = right_ideals(handle)?;
        let ideals: Vec<Ideal> = all
            .into_iter()
            .filter(|i| seed.iter().any(|s| s.is_subset(i)))
            .collect();
        Ok(TopologyBase {
            handle,
            kind: BaseKind::FullEnumeration,
            depth: ideals.len(),
            pool: ideals.clone(),
            ideals,
            flags: AxiomFlags::unchecked(),
        })
    }

    pub fn search_depth(&self) -> usize {
        match self.kind {
            BaseKind::Chain(_) => 2 * self.depth + 1,
            _ => self.pool.len(),
        }
    }

    /// Whether `i` contains a base ideal from the search pool.
    pub fn in_filter(&self, i: &Ideal) -> bool {
        self.pool.iter().any(|w| w.is_subset(i))
    }

    /// The smallest ideal of the filter, when the ring is finite.
    pub fn minimal_ideal(&self) -> Option<Ideal> {
        if !self.handle.is_finite() {
            return None;
        }
        let mut acc = self.pool[0].clone();
        for i in &self.pool[1..] {
            acc = acc.intersect(i).ok()?;
        }
        Some(acc)
    }

    pub fn is_chain(&self) -> bool {
        matches!(self.kind, BaseKind::Chain(_))
    }

    fn bound(&self, samples: usize) -> Bound {
        if self.handle.is_finite() {
            Bound::Exhaustive
        } else {
            Bound::Truncated {
                depth: self.depth,
                search_depth: self.search_depth(),
                samples,
            }
        }
    }

    /// Runs the axiom checks and records the verdicts.
    pub fn checked(mut self, sample: &Sample) -> TopologyBase {
        self.flags = check_axioms(&self, sample);
        self
    }

    /// Filters generated by `self` and `other` agree at the materialized
    /// depth.
    pub fn same_filter(&self, other: &TopologyBase) -> bool {
        self.ideals.iter().all(|i| other.in_filter(i))
            && other.ideals.iter().all(|i| self.in_filter(i))
    }

    /// `F_self ⊆ F_other` at the materialized depth.
    pub fn coarser_than(&self, other: &TopologyBase) -> bool {
        self.ideals.iter().all(|i| other.in_filter(i))
    }
}

fn check_handles(handle: RingHandle, ideals: &[Ideal]) -> Result<()> {
    match ideals.iter().find(|i| i.handle() != handle) {
        Some(i) => Err(Error::HandleMismatch(
            handle.to_string(),
            i.handle().to_string(),
        )),
        None => Ok(()),
    }
}

/// All right ideals of a finite ring.
pub fn right_ideals(handle: RingHandle) -> Result<Vec<Ideal>> {
    let els = handle.elements().ok_or(Error::FiniteOnly)?;
    let principal: Vec<Ideal> = dedup(els.iter().map(Ideal::principal).collect());
    let mut all: BTreeSet<Vec<RingElement>> = BTreeSet::new();
    let mut out = Vec::new();
    let mut frontier = principal.clone();
    for i in &principal {
        if all.insert(i.elements().unwrap()) {
            out.push(i.clone());
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for a in &frontier {
            for p in &principal {
                let s = a.sum(p)?;
                if all.insert(s.elements().unwrap()) {
                    out.push(s.clone());
                    next.push(s);
                }
            }
        }
        frontier = next;
    }
    out.sort_by_key(|i| {
        (
            std::cmp::Reverse(i.elements().unwrap().len()),
            i.to_string(),
        )
    });
    Ok(out)
}

/// Elements used to probe axioms that quantify over the ring.
#[derive(Clone, Debug)]
pub struct Sample {
    pub elements: Vec<RingElement>,
}

impl Sample {
    /// Ring generators, base generators, their pairwise products, 0 and 1.
    pub fn standard(base: &TopologyBase) -> Sample {
        let h = base.handle;
        if let Some(all) = h.elements() {
            return Sample { elements: all };
        }
        let mut gens = h.generators();
        for i in &base.ideals {
            gens.extend(i.canonical_generators());
        }
        let mut els = vec![h.zero(), h.one()];
        els.extend(gens.iter().cloned());
        for a in &gens {
            for b in &gens {
                els.push(a.mul(b));
            }
        }
        Sample {
            elements: dedup_elements(els),
        }
    }

    /// The standard sample plus `count` pseudo-random small elements.
    pub fn seeded(base: &TopologyBase, seed: u64, count: usize) -> Sample {
        let mut s = Self::standard(base);
        if base.handle.is_finite() {
            return s;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..count {
            s.elements.push(random_element(base.handle, &mut rng));
        }
        s.elements = dedup_elements(s.elements);
        s
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

fn dedup_elements(v: Vec<RingElement>) -> Vec<RingElement> {
    let mut seen = BTreeSet::new();
    v.into_iter().filter(|e| seen.insert(e.clone())).collect()
}

/// A small pseudo-random element of an infinite ring.
pub fn random_element(h: RingHandle, rng: &mut impl Rng) -> RingElement {
    match h {
        RingHandle::Integers => h.from_int(rng.gen_range(-30..=30)),
        RingHandle::QuadraticOrder(_) => h.quad(rng.gen_range(-9..=9), rng.gen_range(-9..=9)),
        RingHandle::UnivariatePoly(f) => {
            let deg = rng.gen_range(0..=3);
            let coeffs: Vec<Int> = (0..=deg).map(|_| rng.gen_range(-4..=4)).collect();
            RingElement::poly(h, Poly::from_ints(f, &coeffs))
        }
        _ => {
            let els = h.elements().expect("finite ring");
            els[rng.gen_range(0..els.len())].clone()
        }
    }
}

/// Decides T0–T4′ (and T4 over finite rings) for a base.
pub fn check_axioms(base: &TopologyBase, sample: &Sample) -> AxiomFlags {
    let finite = base.handle.is_finite();
    let samples: Vec<RingElement> = if finite {
        base.handle.elements().expect("finite ring")
    } else {
        sample.elements.clone()
    };
    let bound = base.bound(samples.len());
    let t0 = if base.ideals.is_empty() {
        Verdict::Failed {
            witness: Witness::new(&[], &[], "empty base: R is not in the filter"),
        }
    } else {
        Verdict::Verified {
            bound: Bound::Construction,
        }
    };
    let t1 = Verdict::Verified {
        bound: Bound::Construction,
    };
    let t2 = check_t2(base, &bound);
    let t3 = if samples.is_empty() {
        Verdict::Unchecked
    } else {
        check_t3(base, &samples, &bound)
    };
    let t4_prime = check_t4_prime(base, &bound);
    let t4 = if finite {
        check_t4_exhaustive(base)
    } else {
        Verdict::Unchecked
    };
    AxiomFlags {
        t0,
        t1,
        t2,
        t3,
        t4_prime,
        t4,
    }
}

fn check_t2(base: &TopologyBase, bound: &Bound) -> Verdict {
    if base.is_chain() {
        return Verdict::Verified {
            bound: bound.clone(),
        };
    }
    for (a, u) in base.ideals.iter().enumerate() {
        for v in &base.ideals[a + 1..] {
            let w = u.intersect(v).expect("shared handle");
            if !base.in_filter(&w) {
                return Verdict::Failed {
                    witness: Witness::new(
                        &[u, v, &w],
                        &[],
                        format!("{u} ∩ {v} = {w} contains no base ideal"),
                    ),
                };
            }
        }
    }
    Verdict::Verified {
        bound: bound.clone(),
    }
}

fn check_t3(base: &TopologyBase, samples: &[RingElement], bound: &Bound) -> Verdict {
    for i in &base.ideals {
        for s in samples {
            let c = i.colon(s).expect("shared handle");
            if !base.in_filter(&c) {
                return Verdict::Failed {
                    witness: Witness::new(
                        &[i, &c],
                        &[s],
                        format!("({i} : {s}) = {c} contains no base ideal"),
                    ),
                };
            }
        }
    }
    Verdict::Verified {
        bound: bound.clone(),
    }
}

fn check_t4_prime(base: &TopologyBase, bound: &Bound) -> Verdict {
    for j in &base.ideals {
        let gens = j.canonical_generators();
        for k in &base.ideals {
            let p = Ideal::translate_product(&gens, k).expect("shared handle");
            if !base.in_filter(&p) {
                return Verdict::Failed {
                    witness: Witness::new(
                        &[j, k, &p],
                        &gens.iter().collect::<Vec<_>>(),
                        format!(
                            "s_1K + … + s_mK = {p} for J = {j}, K = {k} contains no base ideal"
                        ),
                    ),
                };
            }
        }
    }
    Verdict::Verified {
        bound: bound.clone(),
    }
}

/// T4 over all right ideals of a finite ring: if `J ∈ F` and `(I:s) ∈ F`
/// for every `s ∈ J` then `I ∈ F`.
fn check_t4_exhaustive(base: &TopologyBase) -> Verdict {
    let all = right_ideals(base.handle).expect("finite ring");
    let members: Vec<&Ideal> = all.iter().filter(|i| base.in_filter(i)).collect();
    for i in all.iter().filter(|i| !base.in_filter(i)) {
        for j in &members {
            let js = j.elements().expect("finite ring");
            if js
                .iter()
                .all(|s| base.in_filter(&i.colon(s).expect("shared handle")))
            {
                return Verdict::Failed {
                    witness: Witness::new(
                        &[i, j],
                        &[],
                        format!("(I : s) is open for all s ∈ {j} but {i} is not"),
                    ),
                };
            }
        }
    }
    Verdict::Verified {
        bound: Bound::Exhaustive,
    }
}

/// The rule `I ↦ F_I` of the T_ω condition.
#[derive(Clone, Debug)]
pub enum TOmegaWitness {
    /// `F_I = {I}`; enough for commutative rings.
    Identity,
    /// `F_I` = base ideals contained in `I` that are two-sided.
    ContainedBase,
    /// `F_I = {R}`, which only works when `I = R`.
    Unit,
    Explicit(HashMap<Ideal, Vec<Ideal>>),
}

impl TOmegaWitness {
    pub fn family(&self, base: &TopologyBase, i: &Ideal) -> Vec<Ideal> {
        match self {
            TOmegaWitness::Identity => vec![i.clone()],
            TOmegaWitness::ContainedBase => base
                .pool
                .iter()
                .filter(|w| w.is_subset(i) && w.is_two_sided())
                .cloned()
                .collect(),
            TOmegaWitness::Unit => vec![Ideal::unit(i.handle())],
            TOmegaWitness::Explicit(m) => m.get(i).cloned().unwrap_or_default(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            TOmegaWitness::Identity => "identity",
            TOmegaWitness::ContainedBase => "contained-base",
            TOmegaWitness::Unit => "unit",
            TOmegaWitness::Explicit(_) => "explicit",
        }
    }
}

/// For each base ideal `I` and sampled `s`, finds `J ∈ F_I` with `sJ ⊆ I`.
pub fn check_t_omega(base: &TopologyBase, w: &TOmegaWitness, sample: &Sample) -> Verdict {
    let samples = match base.handle.elements() {
        Some(all) => all,
        None => sample.elements.clone(),
    };
    for i in &base.ideals {
        let fam = w.family(base, i);
        for s in &samples {
            let ok = fam.iter().any(|j| {
                Ideal::translate_product(std::slice::from_ref(s), j).is_ok_and(|p| p.is_subset(i))
            });
            if !ok {
                let fams: Vec<String> = fam.iter().map(|j| j.to_string()).collect();
                return Verdict::Failed {
                    witness: Witness::new(
                        &[i],
                        &[s],
                        format!("no J in F_I = {{{}}} has {s}·J ⊆ {i}", fams.join(", ")),
                    ),
                };
            }
        }
    }
    Verdict::Verified {
        bound: base.bound(samples.len()),
    }
}

/// Result of [`saturate`].
#[derive(Clone, Debug)]
pub struct Saturation {
    pub base: TopologyBase,
    pub rounds: usize,
    /// False when the last round still produced new ideals or the ideal cap
    /// dropped some: the closure is partial.
    pub closed: bool,
}

/// Entries beyond this size are not retained, to keep products in range.
const SIZE_CAP: Int = 1 << 50;

fn oversized(i: &Ideal) -> bool {
    i.lattice()
        .is_some_and(|l| l.basis().iter().flatten().any(|x| x.abs() > SIZE_CAP))
}

fn index_key(i: &Ideal) -> (Int, String) {
    (i.index().unwrap_or(Int::MAX), i.to_string())
}

/// Closes `seed` under the four steps of the saturation procedure: pick
/// finitely generated subideals, adjoin witness families, adjoin
/// `s_1K + … + s_mK` for all pairs, adjoin pairwise intersections. At most
/// `max_ideals` ideals of smallest index are kept (seeds always).
pub fn saturate(
    seed: &[Ideal],
    w: &TOmegaWitness,
    rounds: usize,
    max_ideals: usize,
) -> Result<Saturation> {
    let handle = seed.first().ok_or(Error::EmptyGenerators)?.handle();
    check_handles(handle, seed)?;
    let seed = dedup(seed.to_vec());
    let mut set = seed.clone();
    let mut closed = false;
    let mut truncated = false;
    let mut used = 0;
    for _ in 0..rounds {
        used += 1;
        let scratch = TopologyBase {
            handle,
            kind: BaseKind::FiniteSet,
            depth: set.len(),
            ideals: set.clone(),
            pool: set.clone(),
            flags: AxiomFlags::unchecked(),
        };
        // (a) every ideal here is finitely generated, so it is its own choice
        let mut next = set.clone();
        // (b)
        for i in &set {
            next.extend(w.family(&scratch, i));
        }
        // (c)
        for j in &set {
            let gens = j.canonical_generators();
            for k in &set {
                next.push(Ideal::translate_product(&gens, k)?);
            }
        }
        // (d)
        for (a, u) in set.iter().enumerate() {
            for v in &set[a + 1..] {
                next.push(u.intersect(v)?);
            }
        }
        let mut next = dedup(next);
        let before = next.len();
        next.retain(|i| seed.contains(i) || !oversized(i));
        let mut rest: Vec<Ideal> = next.into_iter().filter(|i| !seed.contains(i)).collect();
        rest.sort_by_key(index_key);
        let room = max_ideals.saturating_sub(seed.len());
        if rest.len() > room || before > seed.len() + rest.len() {
            truncated = true;
        }
        rest.truncate(room);
        let mut new_set = seed.clone();
        new_set.extend(rest);
        let grew = new_set.len() != set.len() || new_set.iter().any(|i| !set.contains(i));
        set = new_set;
        if !grew {
            closed = !truncated;
            break;
        }
    }
    let base = as_base(handle, set)?;
    let sample = Sample::standard(&base);
    Ok(Saturation {
        base: base.checked(&sample),
        rounds: used,
        closed,
    })
}

/// Packages a saturated set: a chain of powers when it is one, the full
/// filter over a finite ring, a finite set otherwise.
fn as_base(handle: RingHandle, mut set: Vec<Ideal>) -> Result<TopologyBase> {
    set.sort_by_key(index_key);
    if handle.is_finite() {
        return TopologyBase::finite_set(handle, set);
    }
    let top = set[0].clone();
    let is_powers = set.len() >= 2
        && set
            .iter()
            .enumerate()
            .all(|(n, i)| *i == top.power(n as u32 + 1));
    if is_powers {
        TopologyBase::chain(handle, ChainRule::Powers(top), set.len())
    } else {
        TopologyBase::finite_set(handle, set)
    }
}

/// A family of bases with their containment relation.
#[derive(Clone, Debug)]
pub struct TopologyFamily {
    pub members: Vec<TopologyBase>,
    /// `order[i][j]`: the filter of member `i` is inside that of member `j`.
    pub order: Vec<Vec<bool>>,
}

impl TopologyFamily {
    pub fn new(members: Vec<TopologyBase>) -> Result<TopologyFamily> {
        if members.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        let h = members[0].handle;
        if let Some(m) = members.iter().find(|m| m.handle != h) {
            return Err(Error::HandleMismatch(h.to_string(), m.handle.to_string()));
        }
        let order = members
            .iter()
            .map(|a| members.iter().map(|b| a.coarser_than(b)).collect())
            .collect();
        Ok(TopologyFamily { members, order })
    }

    /// An upper bound in the family for every pair, if there is one.
    pub fn upper_bounds(&self) -> std::result::Result<Vec<Vec<usize>>, (usize, usize)> {
        let n = self.members.len();
        let mut out = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                out[a][b] = (0..n)
                    .find(|&c| self.order[a][c] && self.order[b][c])
                    .ok_or((a, b))?;
            }
        }
        Ok(out)
    }

    pub fn is_directed(&self) -> bool {
        self.upper_bounds().is_ok()
    }
}

/// The union of a directed family: merged bases with the axioms re-run.
pub fn union_topologies(family: &TopologyFamily) -> Result<TopologyBase> {
    if let Err((a, b)) = family.upper_bounds() {
        return Err(Error::NotDirected(format!(
            "members {} and {} have no upper bound",
            a + 1,
            b + 1
        )));
    }
    if let Some(m) = family
        .members
        .iter()
        .position(|m| !m.flags.t4_prime.is_verified())
    {
        return Err(Error::NotDirected(format!(
            "member {} lacks a verified T4'",
            m + 1
        )));
    }
    let handle = family.members[0].handle;
    let ideals = dedup(
        family
            .members
            .iter()
            .flat_map(|m| m.ideals.clone())
            .collect(),
    );
    let pool = dedup(family.members.iter().flat_map(|m| m.pool.clone()).collect());
    let depth = family.members.iter().map(|m| m.depth).max().unwrap_or(0);
    let base = TopologyBase {
        handle,
        kind: BaseKind::Union(family.members.len()),
        depth,
        ideals,
        pool,
        flags: AxiomFlags::unchecked(),
    };
    let sample = Sample::standard(&base);
    Ok(base.checked(&sample))
}

/// Both sides of the reduction of T4 to generators: whether `(I:s)` is open
/// for every sampled `s ∈ J`, and whether `(I:s_j)` is for each generator.
pub fn t4_generator_sides(
    base: &TopologyBase,
    i: &Ideal,
    j: &Ideal,
    sample: &[RingElement],
) -> (bool, bool) {
    let gens = j.canonical_generators();
    let elements: Vec<RingElement> = match j.elements() {
        Some(els) => els,
        None => {
            let mut v = gens.clone();
            for g in &gens {
                for r in sample {
                    v.push(g.mul(r));
                }
            }
            v
        }
    };
    let open = |s: &RingElement| base.in_filter(&i.colon(s).expect("shared handle"));
    (elements.iter().all(open), gens.iter().all(open))
}

/// Every Gabriel topology of a finite ring, as the filter above its
/// smallest ideal.
pub fn gabriel_topologies(handle: RingHandle) -> Result<Vec<TopologyBase>> {
    let mut out = Vec::new();
    for i in right_ideals(handle)? {
        let b = TopologyBase::full_enumeration(handle, std::slice::from_ref(&i))?;
        let sample = Sample::standard(&b);
        let b = b.checked(&sample);
        if !b.flags.any_failed() {
            out.push(b);
        }
    }
    Ok(out)
}

/// The topology `{R, e₁₂R + e₂₂R}` on UT2(𝔽_p).
pub fn triangular_base(p: Int) -> Result<TopologyBase> {
    let h = RingHandle::UpperTriangular2(Field::PrimeField(p)).validate()?;
    let j = Ideal::new(h, &[h.tri(0, 1, 0), h.tri(0, 0, 1)])?;
    TopologyBase::full_enumeration(h, &[j])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(n: Int) -> Ideal {
        Ideal::principal(&RingHandle::Integers.from_int(n))
    }

    #[test]
    fn p_adic_chain_passes() {
        let b = TopologyBase::powers(&RingHandle::Integers.from_int(5), 6).unwrap();
        let s = Sample::standard(&b);
        let f = check_axioms(&b, &s);
        for (name, v) in f.all().iter().take(5) {
            assert!(v.is_verified(), "{name}: {v:?}");
        }
        assert_eq!(f.t4, Verdict::Unchecked);
    }

    #[test]
    fn coprime_pair_fails_t2() {
        let b = TopologyBase::finite_set(RingHandle::Integers, vec![z(2), z(3)]).unwrap();
        let f = check_axioms(&b, &Sample::standard(&b));
        let w = f.t2.witness().expect("T2 fails");
        assert_eq!(w.ideals, vec!["(2)", "(3)", "(6)"]);
    }

    #[test]
    fn non_descending_chain_is_rejected() {
        let rule = ChainRule::Explicit(vec![z(4), z(2)]);
        assert_eq!(
            TopologyBase::chain(RingHandle::Integers, rule, 2).unwrap_err(),
            Error::MalformedChain(2)
        );
    }

    #[test]
    fn saturating_six() {
        let s = saturate(&[z(6)], &TOmegaWitness::Identity, 3, 8).unwrap();
        let gens: Vec<Int> = s.base.ideals.iter().map(|i| i.index().unwrap()).collect();
        assert_eq!(gens, (1..=8).map(|n| 6i128.pow(n)).collect::<Vec<_>>());
        assert!(s.base.flags.t4_prime.is_verified());
        assert!(!s.closed);
        let again = saturate(&s.base.ideals, &TOmegaWitness::Identity, 3, 8).unwrap();
        assert_eq!(again.base.ideals, s.base.ideals);
        let unit = saturate(&[z(1)], &TOmegaWitness::Identity, 3, 8).unwrap();
        assert_eq!(unit.base.ideals, vec![z(1)]);
        assert!(unit.closed);
    }

    #[test]
    fn saturating_triangular_ideal() {
        let t = triangular_base(2).unwrap();
        let j = t.minimal_ideal().unwrap();
        let s = saturate(std::slice::from_ref(&j), &TOmegaWitness::Identity, 3, 16).unwrap();
        assert!(s.closed);
        assert_eq!(s.base.ideals, vec![j]);
        for (name, v) in s.base.flags.all() {
            assert_eq!(
                *v,
                Verdict::Verified {
                    bound: if name == "T1" || name == "T0" {
                        Bound::Construction
                    } else {
                        Bound::Exhaustive
                    }
                },
                "{name}"
            );
        }
    }

    #[test]
    fn right_ideals_match_brute_force() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let all = right_ideals(h).unwrap();
        let mut sizes: Vec<usize> = all.iter().map(|i| i.elements().unwrap().len()).collect();
        sizes.sort();
        let brute = brute_right_ideals(h);
        assert_eq!(sizes, brute);
    }

    /// Subsets closed under addition and right multiplication, by brute force.
    fn brute_right_ideals(h: RingHandle) -> Vec<usize> {
        let els = h.elements().unwrap();
        let n = els.len();
        let mut sizes = Vec::new();
        for mask in 0u32..(1 << n) {
            let set: Vec<&RingElement> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| &els[i])
                .collect();
            if !set.iter().any(|e| e.is_zero()) {
                continue;
            }
            let has = |x: &RingElement| set.iter().any(|e| *e == x);
            let closed = set
                .iter()
                .all(|a| set.iter().all(|b| has(&a.add(b))) && els.iter().all(|r| has(&a.mul(r))));
            if closed {
                sizes.push(set.len());
            }
        }
        sizes.sort();
        sizes
    }

    #[test]
    fn t_omega_controls() {
        let b = TopologyBase::powers(&RingHandle::Integers.from_int(3), 4).unwrap();
        let s = Sample::standard(&b);
        assert!(check_t_omega(&b, &TOmegaWitness::Identity, &s).is_verified());
        let bad = check_t_omega(&b, &TOmegaWitness::Unit, &s);
        assert!(bad.witness().unwrap().detail.contains("no J"));
        let t = triangular_base(2).unwrap();
        assert!(
            check_t_omega(&t, &TOmegaWitness::ContainedBase, &Sample::standard(&t)).is_verified()
        );
    }

    #[test]
    fn union_of_prime_power_chains() {
        let chain = |n: Int| {
            let b = TopologyBase::powers(&RingHandle::Integers.from_int(n), 4).unwrap();
            let s = Sample::standard(&b);
            b.checked(&s)
        };
        let fam = TopologyFamily::new(vec![chain(2), chain(3), chain(6)]).unwrap();
        assert_eq!(fam.order[0], vec![true, false, true]);
        let u = union_topologies(&fam).unwrap();
        assert!(u.same_filter(&chain(6)));
        assert!(!u.flags.any_failed());
        let undirected = TopologyFamily::new(vec![chain(2), chain(3)]).unwrap();
        assert!(matches!(
            union_topologies(&undirected),
            Err(Error::NotDirected(_))
        ));
        let single = TopologyFamily::new(vec![chain(5)]).unwrap();
        assert!(union_topologies(&single).unwrap().same_filter(&chain(5)));
    }

    #[test]
    fn triangular_gabriel_topologies() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let all = gabriel_topologies(h).unwrap();
        assert!(all
            .iter()
            .any(|b| b.same_filter(&triangular_base(2).unwrap())));
        // a comparable pair unites to the larger one
        let (a, b) = all
            .iter()
            .flat_map(|a| all.iter().map(move |b| (a, b)))
            .find(|(a, b)| a.coarser_than(b) && !b.coarser_than(a))
            .unwrap();
        let u =
            union_topologies(&TopologyFamily::new(vec![a.clone(), b.clone()]).unwrap()).unwrap();
        assert!(u.same_filter(b));
        assert!(!u.flags.any_failed());
    }

    #[test]
    fn t4_reduces_to_generators_over_triangular() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let ideals = right_ideals(h).unwrap();
        for b in gabriel_topologies(h).unwrap() {
            for i in &ideals {
                for j in &ideals {
                    let (all, gens) = t4_generator_sides(&b, i, j, &[]);
                    assert_eq!(all, gens, "{i} {j}");
                }
            }
        }
    }
}
