//! Fixture documents: a ring, a topology base, named modules and options.

use std::collections::BTreeMap;

use serde::Deserialize;

use gabriel::homalg::fp::FPModule;
use gabriel::homalg::{Module, ModuleMap, Side};
use gabriel::ring::{Ideal, RingElement, RingHandle};
use gabriel::sflat::ExtensionDatum;
use gabriel::topology::{ChainRule, TopologyBase};
use gabriel::zlinalg::Int;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Document {
    pub ring: RingHandle,
    #[serde(default)]
    pub topology: Option<TopologyLit>,
    #[serde(default)]
    pub modules: BTreeMap<String, ModuleLit>,
    #[serde(default)]
    pub extensions: BTreeMap<String, ExtensionLit>,
    #[serde(default)]
    pub options: OptionsLit,
}

/// Ideals are lists of generator literals.
#[derive(Debug, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologyLit {
    FiniteSet(Vec<Vec<String>>),
    /// Powers of one principal ideal.
    Powers(String),
    /// Powers of a finitely generated ideal.
    ChainPowers(Vec<String>),
    ExplicitChain(Vec<Vec<String>>),
    /// Every right ideal containing a product of the seeds.
    FullEnumeration(Vec<Vec<String>>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleLit {
    pub generators: usize,
    #[serde(default)]
    pub relations: Vec<Vec<String>>,
    #[serde(default)]
    pub side: Option<Side>,
    /// Read the module as `colim(M --f--> M --f--> …)`; row `i` is `f(e_i)`.
    #[serde(default)]
    pub endomorphism: Option<Vec<Vec<String>>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionLit {
    pub v_rank: usize,
    pub w_rank: usize,
    pub glue: Vec<Vec<Int>>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptionsLit {
    pub depth: Option<usize>,
    pub seed: Option<u64>,
    pub budget: Option<usize>,
    /// Saturation rounds.
    pub rounds: Option<usize>,
    /// `"identity"`, `"contained_base"` or `"unit"`.
    pub witness: Option<String>,
    pub corrigendum: Option<CorrigendumLit>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrigendumLit {
    pub vars: usize,
    pub max_power: u32,
}

/// A document error with the path of the offending field.
#[derive(Debug)]
pub struct ParseError {
    pub location: String,
    pub message: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn at(location: impl Into<String>) -> impl FnOnce(gabriel::Error) -> ParseError {
    let location = location.into();
    move |e| ParseError {
        location,
        message: e.to_string(),
    }
}

pub fn parse(text: &str) -> Result<Document, ParseError> {
    let doc: Document = serde_json::from_str(text).map_err(|e| ParseError {
        location: format!("line {} column {}", e.line(), e.column()),
        message: e.to_string(),
    })?;
    doc.ring.validate().map_err(at("ring"))?;
    Ok(doc)
}

/// A module together with an optional stationary endomorphism.
pub struct NamedModule {
    pub name: String,
    pub module: Module,
    pub endomorphism: Option<ModuleMap>,
}

/// Validated contents.
pub struct Fixture {
    pub handle: RingHandle,
    pub base: Option<TopologyBase>,
    /// The seed ideals as written.
    pub seeds: Vec<Ideal>,
    pub modules: Vec<NamedModule>,
    pub extensions: Vec<(String, ExtensionDatum)>,
}

fn element(h: RingHandle, s: &str, loc: &str) -> Result<RingElement, ParseError> {
    RingElement::parse(h, s).map_err(at(loc))
}

fn ideal(h: RingHandle, gens: &[String], loc: &str) -> Result<Ideal, ParseError> {
    let els = gens
        .iter()
        .enumerate()
        .map(|(i, g)| element(h, g, &format!("{loc}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ideal::new(h, &els).map_err(at(loc))
}

fn ideals(h: RingHandle, lists: &[Vec<String>], loc: &str) -> Result<Vec<Ideal>, ParseError> {
    lists
        .iter()
        .enumerate()
        .map(|(i, g)| ideal(h, g, &format!("{loc}[{i}]")))
        .collect()
}

impl Document {
    pub fn fixture(&self, depth: usize) -> Result<Fixture, ParseError> {
        let h = self.ring;
        let (base, seeds) = match &self.topology {
            None => (None, vec![]),
            Some(t) => {
                let (base, seeds) = match t {
                    TopologyLit::FiniteSet(l) => {
                        let seeds = ideals(h, l, "topology.finite_set")?;
                        (TopologyBase::finite_set(h, seeds.clone()), seeds)
                    }
                    TopologyLit::Powers(g) => {
                        let g = element(h, g, "topology.powers")?;
                        (TopologyBase::powers(&g, depth), vec![Ideal::principal(&g)])
                    }
                    TopologyLit::ChainPowers(gens) => {
                        let i = ideal(h, gens, "topology.chain_powers")?;
                        (
                            TopologyBase::chain(h, ChainRule::Powers(i.clone()), depth),
                            vec![i],
                        )
                    }
                    TopologyLit::ExplicitChain(l) => {
                        let seeds = ideals(h, l, "topology.explicit_chain")?;
                        (
                            TopologyBase::chain(h, ChainRule::Explicit(seeds.clone()), depth),
                            seeds,
                        )
                    }
                    TopologyLit::FullEnumeration(l) => {
                        let seeds = ideals(h, l, "topology.full_enumeration")?;
                        (TopologyBase::full_enumeration(h, &seeds), seeds)
                    }
                };
                (Some(base.map_err(at("topology"))?), seeds)
            }
        };
        let mut modules = Vec::new();
        for (name, lit) in &self.modules {
            let loc = format!("modules.{name}");
            let rows = lit
                .relations
                .iter()
                .enumerate()
                .map(|(i, r)| {
                    r.iter()
                        .enumerate()
                        .map(|(j, s)| element(h, s, &format!("{loc}.relations[{i}][{j}]")))
                        .collect::<Result<Vec<_>, _>>()
                })
                .collect::<Result<Vec<_>, _>>()?;
            let fp = FPModule::new(h, lit.side.unwrap_or(Side::Left), lit.generators, rows)
                .map_err(at(&loc))?;
            let module = fp.to_module().map_err(at(&loc))?;
            let endomorphism = match &lit.endomorphism {
                None => None,
                Some(m) => Some(endomorphism(
                    &module,
                    lit.generators,
                    m,
                    &format!("{loc}.endomorphism"),
                )?),
            };
            modules.push(NamedModule {
                name: name.clone(),
                module,
                endomorphism,
            });
        }
        let extensions = self
            .extensions
            .iter()
            .map(|(name, e)| {
                ExtensionDatum::new(e.v_rank, e.w_rank, e.glue.clone())
                    .map(|d| (name.clone(), d))
                    .map_err(at(format!("extensions.{name}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Fixture {
            handle: h,
            base,
            seeds,
            modules,
            extensions,
        })
    }
}

/// `e_i ↦ Σ_j a_ij·e_j` on the ring coordinates of `M`.
fn endomorphism(
    m: &Module,
    ngens: usize,
    a: &[Vec<String>],
    loc: &str,
) -> Result<ModuleMap, ParseError> {
    let alg = &m.alg;
    let k = alg.rank;
    if a.len() != ngens || a.iter().any(|r| r.len() != ngens) {
        return Err(ParseError {
            location: loc.into(),
            message: format!("expected a {ngens}×{ngens} matrix"),
        });
    }
    let mut rows = Vec::with_capacity(ngens * k);
    for (i, row) in a.iter().enumerate() {
        let els = row
            .iter()
            .enumerate()
            .map(|(j, s)| element(m.alg.handle, s, &format!("{loc}[{i}][{j}]")))
            .collect::<Result<Vec<_>, _>>()?;
        for t in 0..k {
            let mut v = vec![0; ngens * k];
            for (j, e) in els.iter().enumerate() {
                let b = alg.mul(&alg.basis_element(t), &alg.reduce(&e.coords()));
                v[j * k..(j + 1) * k].copy_from_slice(&b);
            }
            rows.push(v);
        }
    }
    let f = ModuleMap::new(m.clone(), m.clone(), rows);
    f.check().map_err(|e| ParseError {
        location: loc.into(),
        message: e,
    })?;
    Ok(f)
}
