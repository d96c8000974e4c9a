//! Finitely presented modules given by relation matrices over a ring, and
//! their isomorphism-invariant normal forms.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use super::functors::{ext, hom, Tensor};
use super::group::{GroupType, Subquotient};
use super::module::{Module, Side};
use crate::error::{Error, Result};
use crate::ring::{Poly, RingElement, RingHandle};
use crate::zlinalg::{Int, Lattice};

/// `R^g / (rows)`: each relation row lists one coefficient per generator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FPModule {
    pub handle: RingHandle,
    pub side: Side,
    pub ngens: usize,
    pub relations: Vec<Vec<RingElement>>,
}

impl FPModule {
    pub fn new(
        handle: RingHandle,
        side: Side,
        ngens: usize,
        relations: Vec<Vec<RingElement>>,
    ) -> Result<Self> {
        for row in &relations {
            if row.len() != ngens {
                return Err(Error::Unsupported(format!(
                    "relation row of length {} for {ngens} generators",
                    row.len()
                )));
            }
            for e in row {
                if e.handle() != handle {
                    return Err(Error::HandleMismatch(
                        handle.to_string(),
                        e.handle().to_string(),
                    ));
                }
            }
        }
        Ok(FPModule {
            handle,
            side,
            ngens,
            relations,
        })
    }

    /// Parses a matrix of element literals.
    pub fn parse(
        handle: RingHandle,
        side: Side,
        ngens: usize,
        rows: &[Vec<String>],
    ) -> Result<Self> {
        let relations = rows
            .iter()
            .map(|r| {
                r.iter()
                    .map(|s| RingElement::parse(handle, s))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(handle, side, ngens, relations)
    }

    pub fn free(handle: RingHandle, side: Side, rank: usize) -> Self {
        FPModule {
            handle,
            side,
            ngens: rank,
            relations: vec![],
        }
    }

    /// The zero module, presented by the identity relation matrix.
    pub fn zero(handle: RingHandle, side: Side) -> Self {
        FPModule {
            handle,
            side,
            ngens: 1,
            relations: vec![vec![handle.one()]],
        }
    }

    /// `R / (gens)` on one generator.
    pub fn cyclic(handle: RingHandle, side: Side, gens: &[RingElement]) -> Self {
        FPModule {
            handle,
            side,
            ngens: 1,
            relations: gens.iter().map(|g| vec![g.clone()]).collect(),
        }
    }

    /// The module over the ring's ℤ-basis, for rings other than polynomial rings.
    pub fn to_module(&self) -> Result<Module> {
        let alg =
            Arc::new(self.handle.zalg().ok_or_else(|| {
                Error::Unsupported(format!("no finite ℤ-basis for {}", self.handle))
            })?);
        let k = alg.rank;
        let free = Module::free(alg, self.side, self.ngens);
        let rows: Vec<Vec<Int>> = self
            .relations
            .iter()
            .map(|row| {
                let mut v = vec![0; k * self.ngens];
                for (j, e) in row.iter().enumerate() {
                    v[j * k..(j + 1) * k].copy_from_slice(&e.coords());
                }
                v
            })
            .collect();
        let span = free.span(&rows);
        Ok(free.quotient(&span).0)
    }

    fn check_handle(&self, other: &FPModule) -> Result<()> {
        if self.handle != other.handle {
            return Err(Error::HandleMismatch(
                self.handle.to_string(),
                other.handle.to_string(),
            ));
        }
        Ok(())
    }

    /// `Hom_R(self, other)` as an abelian group.
    pub fn hom(&self, other: &FPModule) -> Result<Subquotient> {
        self.check_handle(other)?;
        let (m, n) = (self.to_module()?, other.to_module()?);
        hom(&m, &sided(&n, m.side)?)
    }

    /// `self ⊗_R other` with `self` read as a right and `other` as a left module.
    pub fn tensor(&self, other: &FPModule) -> Result<GroupType> {
        self.check_handle(other)?;
        let m = sided(&self.to_module()?, Side::Right)?;
        let n = sided(&other.to_module()?, Side::Left)?;
        Ok(Tensor::new(&m, &n).group.group_type())
    }

    pub fn ext1(&self, other: &FPModule) -> Result<Subquotient> {
        self.check_handle(other)?;
        let (m, n) = (self.to_module()?, other.to_module()?);
        ext(1, &m, &sided(&n, m.side)?)
    }
}

/// Reinterprets a module over a commutative ring on the requested side.
pub fn sided(m: &Module, side: Side) -> Result<Module> {
    if m.side == side {
        return Ok(m.clone());
    }
    if !m.alg.handle.is_commutative() {
        return Err(Error::Unsupported(format!(
            "{:?} module needed over {}",
            side, m.alg.handle
        )));
    }
    let mut out = m.clone();
    out.side = side;
    Ok(out)
}

impl fmt::Display for FPModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .relations
            .iter()
            .map(|r| {
                format!(
                    "[{}]",
                    r.iter()
                        .map(|e| e.to_string())
                        .collect::<Vec<_>>()
                        .join(", ")
                )
            })
            .collect();
        write!(f, "{}^{} / [{}]", self.handle, self.ngens, rows.join(", "))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum NormalForm {
    /// Free rank and invariant factors `d_1 | d_2 | …` (non-units).
    Pid {
        free_rank: usize,
        invariants: Vec<String>,
    },
    /// A finite module: its size, group type and element table.
    Finite {
        size: Int,
        group: GroupType,
        elements: Vec<Vec<Int>>,
    },
    /// `R^f ⊕ ⊕ R/I_j` over a quadratic order, the `I_j` as HNF lattice bases.
    Quadratic {
        free_rank: usize,
        quotients: Vec<Vec<Vec<Int>>>,
    },
}

pub fn normal_form(m: &FPModule) -> Result<NormalForm> {
    match m.handle {
        RingHandle::Integers => {
            let t = m.to_module()?.group_type();
            Ok(NormalForm::Pid {
                free_rank: t.free_rank,
                invariants: t.torsion.iter().map(|d| d.to_string()).collect(),
            })
        }
        RingHandle::IntegersMod(_) | RingHandle::UpperTriangular2(_) => {
            let md = m.to_module()?;
            let (simple, _, _) = md.simplify();
            Ok(NormalForm::Finite {
                size: md.order().expect("finite ring"),
                group: md.group_type(),
                elements: simple.elements(),
            })
        }
        RingHandle::UnivariatePoly(field) => {
            let mat: Vec<Vec<Poly>> = m
                .relations
                .iter()
                .map(|r| {
                    r.iter()
                        .map(|e| e.as_poly().expect("polynomial").clone())
                        .collect()
                })
                .collect();
            let diag = poly_smith(mat, m.ngens, field);
            let nonzero = diag.iter().filter(|p| !p.is_zero()).count();
            let invariants = diag
                .iter()
                .filter(|p| !p.is_zero() && p.degree() != Some(0))
                .map(|p| p.to_string())
                .collect();
            Ok(NormalForm::Pid {
                free_rank: m.ngens - nonzero,
                invariants,
            })
        }
        RingHandle::QuadraticOrder(_) => {
            let raw = || Error::UnsupportedPresentation(m.to_string());
            let alg = m.handle.zalg().expect("quadratic order");
            let mut per_gen: Vec<Vec<Vec<Int>>> = vec![vec![]; m.ngens];
            for row in &m.relations {
                let nz: Vec<usize> = (0..m.ngens).filter(|&j| !row[j].is_zero()).collect();
                match nz.as_slice() {
                    [] => {}
                    [j] => per_gen[*j].push(row[*j].coords()),
                    _ => return Err(raw()),
                }
            }
            let mut free_rank = 0;
            let mut quotients = Vec::new();
            for gens in per_gen {
                let mut rows = Vec::new();
                for g in &gens {
                    rows.extend(alg.left_mult(g));
                }
                let l = Lattice::new(2, &rows, 0);
                match l.index() {
                    _ if l.rank() == 0 => free_rank += 1,
                    Some(1) => {}
                    Some(_) => quotients.push(l.basis().to_vec()),
                    None => return Err(raw()),
                }
            }
            quotients.sort();
            Ok(NormalForm::Quadratic {
                free_rank,
                quotients,
            })
        }
    }
}

/// Diagonal of the Smith form over `F[x]`, monic, padded with zeros to `ncols`.
pub fn poly_smith(mut a: Vec<Vec<Poly>>, ncols: usize, field: crate::ring::Field) -> Vec<Poly> {
    let nrows = a.len();
    let zero = Poly::zero(field);
    let mut diag = Vec::new();
    let mut t = 0;
    while t < nrows.min(ncols) {
        // pivot of least degree in the remaining block
        let pivot = (t..nrows)
            .flat_map(|i| (t..ncols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[i][j].is_zero())
            .min_by_key(|&(i, j)| a[i][j].degree());
        let Some((pi, pj)) = pivot else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        let mut clean = true;
        for i in t + 1..nrows {
            let (q, r) = a[i][t].div_rem(&a[t][t]);
            for j in t..ncols {
                a[i][j] = a[i][j].sub(&q.mul(&a[t][j]));
            }
            clean &= r.is_zero();
        }
        for j in t + 1..ncols {
            let (q, r) = a[t][j].div_rem(&a[t][t]);
            for i in t..nrows {
                a[i][j] = a[i][j].sub(&q.mul(&a[i][t]));
            }
            clean &= r.is_zero();
        }
        if !clean {
            continue;
        }
        // divisibility: fold an offending row into row t and retry
        let bad = (t + 1..nrows).find(|&i| (t + 1..ncols).any(|j| !a[t][t].divides(&a[i][j])));
        if let Some(i) = bad {
            for j in t..ncols {
                a[t][j] = a[t][j].add(&a[i][j]);
            }
            continue;
        }
        diag.push(a[t][t].monic());
        t += 1;
    }
    diag.resize(ncols, zero);
    diag
}
