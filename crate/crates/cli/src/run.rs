//! One function per subcommand; each returns a JSON report and whether a
//! verdict failed.

use serde_json::{json, Value};

use gabriel::contra::{complete_module, complete_ring, completion_levels_agree, monad_laws};
use gabriel::delta::{
    beta_theta, delta_module, endo_compare, five_term, perp_membership, Coefficients, KComplex,
    Membership, PerpInput,
};
use gabriel::homalg::tower::Tower;
use gabriel::quotients::{annihilator_preimage, check_perfect, ring_of_quotients};
use gabriel::sflat::{strongly_flat_check, weakly_cotorsion_check, CotorsionInput, FlatInput};
use gabriel::topology::corrigendum::Corrigendum;
use gabriel::topology::{check_axioms, saturate, Sample, TOmegaWitness, TopologyBase, Verdict};
use gabriel::{Error, Result};

use crate::doc::{Fixture, NamedModule};

/// Resolved bounds shared by all subcommands.
#[derive(Clone, Copy, Debug)]
pub struct Bounds {
    pub depth: usize,
    pub seed: u64,
    pub budget: Option<usize>,
}

pub struct Outcome {
    pub report: Value,
    pub failed: bool,
}

fn to_value<T: serde::Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("reports serialize")
}

fn base(f: &Fixture) -> Result<&TopologyBase> {
    f.base
        .as_ref()
        .ok_or_else(|| Error::Unsupported("the document has no topology".into()))
}

fn verdict_failed(v: &Verdict) -> bool {
    v.is_failed()
}

pub fn check_axioms_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let base = base(f)?;
    let sample = Sample::seeded(base, b.seed, b.budget.unwrap_or(16));
    let flags = check_axioms(base, &sample);
    Ok(Outcome {
        report: json!({
            "ideals": base.ideals.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "sample_size": sample.len(),
            "axioms": to_value(&flags),
        }),
        failed: flags.any_failed(),
    })
}

pub fn saturate_cmd(f: &Fixture, b: Bounds, rounds: usize, witness: &str) -> Result<Outcome> {
    let w = match witness {
        "identity" => TOmegaWitness::Identity,
        "contained_base" => TOmegaWitness::ContainedBase,
        "unit" => TOmegaWitness::Unit,
        other => return Err(Error::Unsupported(format!("witness {other:?}"))),
    };
    if f.seeds.is_empty() {
        return Err(Error::EmptyGenerators);
    }
    let cap = b.budget.unwrap_or(8);
    let s = saturate(&f.seeds, &w, rounds, cap)?;
    let again = saturate(&s.base.ideals, &w, rounds, cap)?;
    let idempotent = again.base.ideals == s.base.ideals;
    let flags = check_axioms(&s.base, &Sample::seeded(&s.base, b.seed, 16));
    Ok(Outcome {
        report: json!({
            "ideals": s.base.ideals.iter().map(|i| i.to_string()).collect::<Vec<_>>(),
            "rounds": s.rounds,
            "closed": s.closed,
            "idempotent": idempotent,
            "cap": cap,
            "axioms": to_value(&flags),
        }),
        failed: flags.any_failed() || !idempotent,
    })
}

pub fn quotient_ring_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let base = base(f)?;
    let q = ring_of_quotients(base, b.depth)?;
    let perfect = check_perfect(base, &q)?;
    let certificates = perfect
        .certificates
        .iter()
        .map(|c| {
            let a = annihilator_preimage(c, &q)?;
            Ok(json!({ "certificate": to_value(&c.record(&q)), "annihilator": a.ideal.to_string(), "contained": a.contained }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Outcome {
        report: json!({
            "quotient": to_value(&q.summary()),
            "cross_check": to_value(&q.cross_check(b.seed)),
            "perfect": to_value(&perfect.verdict),
            "certificates": certificates,
        }),
        failed: verdict_failed(&perfect.verdict) || verdict_failed(&q.cross_check(b.seed)),
    })
}

pub fn complete_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let base = base(f)?;
    let ring = complete_ring(base, b.depth)?;
    let cross = ring.cross_check(b.seed);
    let mut failed = verdict_failed(&cross);
    let mut modules = serde_json::Map::new();
    for m in &f.modules {
        let c = complete_module(&m.module, base, b.depth)?;
        let monad = monad_laws(&c, b.seed, b.budget.unwrap_or(8))?;
        let agree = completion_levels_agree(&c)?;
        failed |= verdict_failed(&monad) || agree.iter().any(|a| !a);
        modules.insert(
            m.name.clone(),
            json!({
                "levels": to_value(&c.level_types()),
                "monad_laws": to_value(&monad),
                "star_equals_product": agree,
            }),
        );
    }
    Ok(Outcome {
        report: json!({
            "ring_levels": ring.level_orders(),
            "stabilized_at": ring.stabilized_at(),
            "cross_check": to_value(&cross),
            "modules": modules,
        }),
        failed,
    })
}

fn coefficients(m: &NamedModule) -> Coefficients {
    match &m.endomorphism {
        Some(f) => Coefficients::Stationary(f.clone()),
        None => Coefficients::Module(m.module.clone()),
    }
}

pub fn delta_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let k = KComplex::new(base(f)?, b.depth)?;
    let mut failed = false;
    let mut modules = serde_json::Map::new();
    for m in &f.modules {
        let c = coefficients(m);
        let d = delta_module(&c, &k)?;
        let ft = five_term(&c, &k)?;
        failed |= !ft.exact();
        modules.insert(
            m.name.clone(),
            json!({
                "delta": to_value(&d),
                "five_term": to_value(&ft.levels),
                "five_term_exact": ft.exact(),
                "limits": to_value(&ft.limits),
            }),
        );
    }
    Ok(Outcome {
        report: json!({
            "faithful": k.is_faithful(),
            "ker_u": to_value(&k.h_minus1().group_type()),
            "modules": modules,
        }),
        failed,
    })
}

pub fn compare_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let k = KComplex::new(base(f)?, b.depth)?;
    let mut failed = false;
    let mut modules = serde_json::Map::new();
    for m in &f.modules {
        let bt = beta_theta(&m.module, &k)?;
        failed |= !bt.holds();
        let levels: Vec<Value> = bt
            .levels
            .iter()
            .enumerate()
            .map(|(n, l)| {
                json!({
                    "level": n + 1,
                    "completion": to_value(&l.lambda.target.group_type()),
                    "delta": to_value(&l.delta.target.group_type()),
                    "theta_beta_id": l.xi,
                    "beta_theta_id": l.zeta,
                    "theta_lambda_delta": l.triangle,
                    "beta_delta_lambda": l.beta_delta,
                })
            })
            .collect();
        let n = bt.levels.len();
        let summary = if bt.holds() {
            format!("β∘θ = id, θ∘β = id at levels 1..{n}")
        } else {
            let bad: Vec<usize> = bt
                .levels
                .iter()
                .enumerate()
                .filter(|(_, l)| !l.holds())
                .map(|(i, _)| i + 1)
                .collect();
            format!("comparison fails at levels {bad:?}")
        };
        modules.insert(
            m.name.clone(),
            json!({ "summary": summary, "levels": levels }),
        );
    }
    Ok(Outcome {
        report: json!({ "modules": modules }),
        failed,
    })
}

pub fn perp_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let base = base(f)?;
    let k = KComplex::new(base, b.depth)?;
    // Hom(U, R/I_n) vanishes only after n further levels of U/R
    let deep = 2 * b.depth + 1;
    let k_deep = if matches!(k, KComplex::Tower(_)) {
        Some(KComplex::new(base, deep)?)
    } else {
        None
    };
    let mut modules = serde_json::Map::new();
    let mut failed = false;
    for m in &f.modules {
        let r = perp_membership(&PerpInput::Module(m.module.clone()), &k)?;
        let mut entry = json!({ "module": to_value(&r) });
        if let Some(kd) = &k_deep {
            let c = complete_module(&m.module, base, b.depth)?;
            let t = Tower::inverse(c.levels.clone(), c.transitions.clone())?;
            let lam = perp_membership(&PerpInput::Tower(t), kd)?;
            failed |= lam.membership != Membership::Member;
            entry["completion"] = json!({ "k_depth": deep, "report": to_value(&lam) });
        }
        modules.insert(m.name.clone(), entry);
    }
    Ok(Outcome {
        report: json!({ "faithful": k.is_faithful(), "modules": modules }),
        failed,
    })
}

pub fn endo_ring_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let e = endo_compare(base(f)?, b.depth)?;
    Ok(Outcome {
        report: to_value(&e),
        failed: !e.holds(),
    })
}

pub fn strongly_flat_cmd(f: &Fixture, b: Bounds) -> Result<Outcome> {
    let k = KComplex::new(base(f)?, b.depth)?;
    let mut failed = false;
    let mut modules = serde_json::Map::new();
    for m in &f.modules {
        let input = match &m.endomorphism {
            Some(g) => FlatInput::Stationary(g.clone()),
            None => FlatInput::Module(m.module.clone()),
        };
        let flat = strongly_flat_check(&input, &k)?;
        let cot = match &m.endomorphism {
            Some(g) => weakly_cotorsion_check(&CotorsionInput::Stationary(g.clone()), &k),
            None => weakly_cotorsion_check(&CotorsionInput::Module(m.module.clone()), &k),
        };
        let cot = match cot {
            Ok(d) => to_value(&d),
            Err(e) => json!({ "kind": "Error", "reason": e.to_string() }),
        };
        failed |= flat.verdict.is_failed();
        modules.insert(
            m.name.clone(),
            json!({ "strongly_flat": to_value(&flat), "weakly_cotorsion": cot }),
        );
    }
    for (name, d) in &f.extensions {
        let flat = strongly_flat_check(&FlatInput::Extension(d.clone()), &k)?;
        failed |= flat.verdict.is_failed();
        modules.insert(name.clone(), json!({ "strongly_flat": to_value(&flat) }));
    }
    Ok(Outcome {
        report: json!({ "modules": modules }),
        failed,
    })
}

pub fn regress_corrigendum_cmd(vars: usize, max_power: u32, b: Bounds) -> Outcome {
    let r = Corrigendum::new(vars, max_power).run(b.seed, b.budget.unwrap_or(12));
    let reproduced = r.j0_in_h
        && r.colons.iter().all(|c| c.2)
        && r.exclusions.iter().all(|e| e.1.is_some())
        && r.t4.is_failed();
    Outcome {
        report: json!({ "facts": to_value(&r), "reproduced": reproduced }),
        failed: !reproduced,
    }
}
