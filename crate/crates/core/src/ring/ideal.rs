//! Finitely generated right ideals and morphisms between them.

use std::fmt;
use std::hash::{Hash, Hasher};

use super::{Poly, RingElement, RingHandle, ZAlg};
use crate::error::{Error, Result};
use crate::zlinalg::{kernel_mod, Int, Lattice};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CanonicalForm {
    /// Nonnegative generator over ℤ.
    Principal(Int),
    /// Monic generator over a polynomial ring; the zero polynomial for (0).
    MonicPoly(Poly),
    /// Hermite basis of the ideal as a lattice in ℤ², over a quadratic order.
    LatticeBasis(Vec<Vec<Int>>),
    /// Sorted member list, over a finite ring.
    ElementSet(Vec<RingElement>),
}

#[derive(Clone, Debug)]
pub struct Ideal {
    handle: RingHandle,
    generators: Vec<RingElement>,
    canonical: CanonicalForm,
    lattice: Option<Lattice>,
}

impl PartialEq for Ideal {
    fn eq(&self, other: &Self) -> bool {
        self.handle == other.handle && self.canonical == other.canonical
    }
}

impl Eq for Ideal {}

impl Hash for Ideal {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.handle.hash(state);
        self.canonical.hash(state);
    }
}

fn mismatch(a: RingHandle, b: RingHandle) -> Error {
    Error::HandleMismatch(a.to_string(), b.to_string())
}

impl Ideal {
    /// The right ideal generated by `gens`.
    pub fn new(handle: RingHandle, gens: &[RingElement]) -> Result<Ideal> {
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        if let Some(g) = gens.iter().find(|g| g.handle() != handle) {
            return Err(mismatch(handle, g.handle()));
        }
        match handle.zalg() {
            Some(z) => {
                let mut rows = Vec::new();
                for g in gens {
                    rows.extend(z.left_mult(&g.coords()));
                }
                let lattice = z.relations.add_rows(&rows);
                Ok(Self::from_lattice_with_gens(&z, lattice, gens.to_vec()))
            }
            None => {
                let mut g = Poly::zero(poly_field(handle));
                for e in gens {
                    g = g.gcd(e.as_poly().expect("polynomial element"));
                }
                Ok(Ideal {
                    handle,
                    generators: gens.to_vec(),
                    canonical: CanonicalForm::MonicPoly(g),
                    lattice: None,
                })
            }
        }
    }

    pub fn principal(e: &RingElement) -> Ideal {
        Ideal::new(e.handle(), std::slice::from_ref(e)).expect("nonempty")
    }

    pub fn unit(handle: RingHandle) -> Ideal {
        Ideal::principal(&handle.one())
    }

    pub fn zero(handle: RingHandle) -> Ideal {
        Ideal::principal(&handle.zero())
    }

    /// Builds an ideal from a ℤ-lattice in the algebra coordinates; the
    /// lattice must already be a right ideal containing the relations.
    pub fn from_lattice(z: &ZAlg, lattice: Lattice) -> Ideal {
        let gens: Vec<RingElement> = if lattice.rank() == 0 {
            vec![z.handle.zero()]
        } else {
            lattice
                .basis()
                .iter()
                .map(|r| z.element(r))
                .filter(|e| !e.is_zero())
                .collect()
        };
        let gens = if gens.is_empty() {
            vec![z.handle.zero()]
        } else {
            gens
        };
        Self::from_lattice_with_gens(z, lattice, gens)
    }

    fn from_lattice_with_gens(z: &ZAlg, lattice: Lattice, generators: Vec<RingElement>) -> Ideal {
        let handle = z.handle;
        let canonical = match handle {
            RingHandle::Integers => {
                CanonicalForm::Principal(lattice.basis().first().map_or(0, |r| r[0]))
            }
            RingHandle::QuadraticOrder(_) => CanonicalForm::LatticeBasis(lattice.basis().to_vec()),
            _ => {
                let mut els: Vec<RingElement> = handle
                    .elements()
                    .expect("finite ring")
                    .into_iter()
                    .filter(|e| lattice.contains(&e.coords()))
                    .collect();
                els.sort();
                CanonicalForm::ElementSet(els)
            }
        };
        Ideal {
            handle,
            generators,
            canonical,
            lattice: Some(lattice),
        }
    }

    /// Canonical generators: the minimal description recorded by the normal form.
    pub fn canonical_generators(&self) -> Vec<RingElement> {
        match &self.canonical {
            CanonicalForm::Principal(g) => vec![self.handle.from_int(*g)],
            CanonicalForm::MonicPoly(p) => vec![RingElement::poly(self.handle, p.clone())],
            CanonicalForm::LatticeBasis(rows) => {
                if rows.is_empty() {
                    vec![self.handle.zero()]
                } else {
                    rows.iter()
                        .map(|r| RingElement::from_coords(self.handle, r))
                        .collect()
                }
            }
            CanonicalForm::ElementSet(_) => self.generators.clone(),
        }
    }

    pub fn canonicalize(&self) -> Ideal {
        Ideal::new(self.handle, &self.canonical_generators()).expect("nonempty")
    }

    pub fn handle(&self) -> RingHandle {
        self.handle
    }

    pub fn generators(&self) -> &[RingElement] {
        &self.generators
    }

    pub fn canonical(&self) -> &CanonicalForm {
        &self.canonical
    }

    pub fn lattice(&self) -> Option<&Lattice> {
        self.lattice.as_ref()
    }

    fn poly_gen(&self) -> &Poly {
        match &self.canonical {
            CanonicalForm::MonicPoly(p) => p,
            _ => unreachable!(),
        }
    }

    fn same(&self, other: &Ideal) -> Result<()> {
        if self.handle != other.handle {
            return Err(mismatch(self.handle, other.handle));
        }
        Ok(())
    }

    fn zalg(&self) -> ZAlg {
        self.handle.zalg().expect("lattice class")
    }

    pub fn contains(&self, e: &RingElement) -> bool {
        assert_eq!(e.handle(), self.handle);
        match &self.lattice {
            Some(l) => l.contains(&e.coords()),
            None => self.poly_gen().divides(e.as_poly().unwrap()),
        }
    }

    /// `self ⊆ other`.
    pub fn is_subset(&self, other: &Ideal) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    pub fn is_unit(&self) -> bool {
        self.contains(&self.handle.one())
    }

    pub fn is_zero(&self) -> bool {
        match &self.lattice {
            Some(l) => l == &self.zalg().relations,
            None => self.poly_gen().is_zero(),
        }
    }

    /// `|R/I|` when finite.
    pub fn index(&self) -> Option<Int> {
        match &self.lattice {
            Some(l) => l.index(),
            None => match (self.handle, self.poly_gen().degree()) {
                (RingHandle::UnivariatePoly(super::Field::PrimeField(p)), Some(d)) => {
                    Some(p.pow(d as u32))
                }
                (_, Some(0)) => Some(1),
                _ => None,
            },
        }
    }

    /// `(I : s) = {r | s·r ∈ I}`.
    pub fn colon(&self, s: &RingElement) -> Result<Ideal> {
        if s.handle() != self.handle {
            return Err(mismatch(self.handle, s.handle()));
        }
        match &self.lattice {
            Some(l) => {
                let z = self.zalg();
                let k = kernel_mod(&z.left_mult(&s.coords()), l, z.characteristic());
                Ok(Ideal::from_lattice(&z, k.sum(&z.relations)))
            }
            None => {
                let f = self.poly_gen();
                let sp = s.as_poly().unwrap();
                let g = if f.is_zero() {
                    if sp.is_zero() {
                        Poly::one(f.field)
                    } else {
                        Poly::zero(f.field)
                    }
                } else {
                    f.div_rem(&f.gcd(sp)).0
                };
                Ideal::new(self.handle, &[RingElement::poly(self.handle, g)])
            }
        }
    }

    pub fn sum(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        match (&self.lattice, &other.lattice) {
            (Some(a), Some(b)) => Ok(Ideal::from_lattice(&self.zalg(), a.sum(b))),
            _ => {
                let g = self.poly_gen().gcd(other.poly_gen());
                Ideal::new(self.handle, &[RingElement::poly(self.handle, g)])
            }
        }
    }

    pub fn intersect(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        match (&self.lattice, &other.lattice) {
            (Some(a), Some(b)) => Ok(Ideal::from_lattice(&self.zalg(), a.intersect(b))),
            _ => {
                let g = self.poly_gen().lcm(other.poly_gen());
                Ideal::new(self.handle, &[RingElement::poly(self.handle, g)])
            }
        }
    }

    /// `s_1 K + … + s_m K`.
    pub fn translate_product(gens: &[RingElement], k: &Ideal) -> Result<Ideal> {
        if gens.is_empty() {
            return Err(Error::EmptyGenerators);
        }
        if let Some(g) = gens.iter().find(|g| g.handle() != k.handle) {
            return Err(mismatch(k.handle, g.handle()));
        }
        match &k.lattice {
            Some(l) => {
                let z = k.zalg();
                let mut rows = Vec::new();
                for s in gens {
                    let m = z.left_mult(&s.coords());
                    for b in l.basis() {
                        rows.push(z.apply(b, &m));
                    }
                }
                Ok(Ideal::from_lattice(&z, z.relations.add_rows(&rows)))
            }
            None => {
                let mut g = Poly::zero(k.poly_gen().field);
                for s in gens {
                    g = g.gcd(s.as_poly().unwrap());
                }
                let p = g.mul(k.poly_gen());
                Ideal::new(k.handle, &[RingElement::poly(k.handle, p)])
            }
        }
    }

    /// Product ideal `I·J`, generated by all products of generators.
    pub fn product(&self, other: &Ideal) -> Result<Ideal> {
        self.same(other)?;
        let mut gens = Vec::new();
        for a in self.canonical_generators() {
            for b in other.canonical_generators() {
                gens.push(a.mul(&b));
            }
        }
        Ideal::new(self.handle, &gens)
    }

    pub fn power(&self, n: u32) -> Ideal {
        let mut acc = Ideal::unit(self.handle);
        for _ in 0..n {
            acc = acc.product(self).expect("same ring");
        }
        acc
    }

    /// Left ideal test: `R·I ⊆ I`, so the right ideal is two-sided.
    pub fn is_two_sided(&self) -> bool {
        if self.handle.is_commutative() {
            return true;
        }
        let gens = self.handle.generators();
        self.canonical_generators()
            .iter()
            .all(|g| gens.iter().all(|t| self.contains(&t.mul(g))))
    }

    /// Elements of the ideal when the ring is finite.
    pub fn elements(&self) -> Option<Vec<RingElement>> {
        match &self.canonical {
            CanonicalForm::ElementSet(v) => Some(v.clone()),
            _ => None,
        }
    }
}

fn poly_field(h: RingHandle) -> super::Field {
    match h {
        RingHandle::UnivariatePoly(f) => f,
        _ => unreachable!(),
    }
}

impl fmt::Display for Ideal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens = match &self.canonical {
            CanonicalForm::ElementSet(els) => {
                // smallest generating set found greedily, for display only
                let mut chosen: Vec<RingElement> = Vec::new();
                for e in els {
                    let cur = if chosen.is_empty() {
                        Ideal::zero(self.handle)
                    } else {
                        Ideal::new(self.handle, &chosen).unwrap()
                    };
                    if !cur.contains(e) {
                        chosen.push(e.clone());
                    }
                }
                if chosen.is_empty() {
                    vec![self.handle.zero()]
                } else {
                    chosen
                }
            }
            _ => self.canonical_generators(),
        };
        let parts: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A morphism `J → I` of right ideals given by left multiplication by `s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QFMorphism {
    pub source: Ideal,
    pub target: Ideal,
    pub scalar: RingElement,
}

impl QFMorphism {
    pub fn new(source: Ideal, target: Ideal, scalar: RingElement) -> Result<QFMorphism> {
        source.same(&target)?;
        if scalar.handle() != source.handle {
            return Err(mismatch(source.handle, scalar.handle()));
        }
        for g in source.generators() {
            if !target.contains(&scalar.mul(g)) {
                return Err(Error::NotAMorphism(format!(
                    "{}·{} ∉ {}",
                    scalar, g, target
                )));
            }
        }
        Ok(QFMorphism {
            source,
            target,
            scalar,
        })
    }

    /// `self ∘ g`, where `g: K → J` and `self: J → I`; the composite
    /// multiplies by `self.scalar · g.scalar`.
    pub fn compose(&self, g: &QFMorphism) -> Result<QFMorphism> {
        if self.source != g.target {
            return Err(Error::CompositionMismatch(
                self.source.to_string(),
                g.target.to_string(),
            ));
        }
        QFMorphism::new(
            g.source.clone(),
            self.target.clone(),
            self.scalar.mul(&g.scalar),
        )
    }

    /// All morphisms `J → I` of a finite ring.
    pub fn enumerate(source: &Ideal, target: &Ideal) -> Vec<QFMorphism> {
        let els = source.handle.elements().expect("finite ring");
        els.into_iter()
            .filter_map(|s| QFMorphism::new(source.clone(), target.clone(), s).ok())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Field;

    fn zi(n: Int) -> Ideal {
        Ideal::principal(&RingHandle::Integers.from_int(n))
    }

    #[test]
    fn integer_ideal_arithmetic() {
        let z = RingHandle::Integers;
        assert_eq!(zi(6).colon(&z.from_int(4)).unwrap(), zi(3));
        assert_eq!(zi(5).colon(&z.zero()).unwrap(), zi(1));
        assert_eq!(zi(4).intersect(&zi(6)).unwrap(), zi(12));
        assert_eq!(zi(4).sum(&zi(6)).unwrap(), zi(2));
        assert_eq!(
            Ideal::translate_product(&[z.from_int(6)], &zi(4)).unwrap(),
            zi(24)
        );
        assert_eq!(
            Ideal::translate_product(&[z.from_int(2), z.from_int(3)], &zi(5)).unwrap(),
            zi(5)
        );
        assert_eq!(*zi(-6).canonical(), CanonicalForm::Principal(6));
    }

    #[test]
    fn quadratic_ideal_is_not_unit() {
        let h = RingHandle::QuadraticOrder(-5);
        let p = Ideal::principal(&h.from_int(2))
            .sum(&Ideal::principal(&h.quad(1, 1)))
            .unwrap();
        assert!(!p.is_unit());
        assert_eq!(p.index(), Some(2));
        assert_eq!(p.power(2), Ideal::principal(&h.from_int(2)));
    }

    #[test]
    fn triangular_colon_and_translate() {
        let h = RingHandle::UpperTriangular2(Field::PrimeField(2));
        let e11 = h.tri(1, 0, 0);
        let e12 = h.tri(0, 1, 0);
        let e22 = h.tri(0, 0, 1);
        let e12r = Ideal::principal(&e12);
        let expected = Ideal::new(h, &[e12.clone(), e22]).unwrap();
        assert_eq!(e12r.colon(&e11).unwrap(), expected);
        assert_eq!(Ideal::translate_product(&[e11], &e12r).unwrap(), e12r);
    }

    #[test]
    fn polynomial_ideals() {
        let h = RingHandle::UnivariatePoly(Field::Rationals);
        let p = |s: &str| RingElement::parse(h, s).unwrap();
        let i = Ideal::principal(&p("x^2-1"));
        assert_eq!(i.colon(&p("x-1")).unwrap(), Ideal::principal(&p("x+1")));
        assert_eq!(
            i.sum(&Ideal::principal(&p("2x+2"))).unwrap(),
            Ideal::principal(&p("x+1"))
        );
    }

    #[test]
    fn compose_multiplies_scalars() {
        let z = RingHandle::Integers;
        let f = QFMorphism::new(zi(9), zi(3), z.one()).unwrap();
        let g = QFMorphism::new(zi(27), zi(9), z.one()).unwrap();
        let c = f.compose(&g).unwrap();
        assert_eq!((c.source.clone(), c.target.clone()), (zi(27), zi(3)));
        let d = QFMorphism::new(zi(3), zi(3), z.from_int(2)).unwrap();
        assert_eq!(d.compose(&d).unwrap().scalar, z.from_int(4));
        assert!(matches!(f.compose(&d), Err(Error::CompositionMismatch(..))));
    }
}
