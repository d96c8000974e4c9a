//! Truncated inverse and direct systems with lim / lim¹ verdicts.

use serde::Serialize;

use super::group::GroupType;
use super::module::{Module, ModuleMap};
use crate::error::{Error, Result};
use crate::zlinalg::{gcd, Int, Lattice};

/// Number of consecutive agreeing levels that count as stabilization.
pub const STABLE_LEVELS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    Inverse,
    Direct,
}

/// Levels `M_1, …, M_k` with maps `M_{n+1} → M_n` (inverse) or
/// `M_n → M_{n+1}` (direct). `maps[n]` joins `levels[n]` and `levels[n+1]`.
#[derive(Clone, Debug)]
pub struct Tower {
    pub direction: Direction,
    pub levels: Vec<Module>,
    pub maps: Vec<ModuleMap>,
}

impl Tower {
    pub fn new(direction: Direction, levels: Vec<Module>, maps: Vec<ModuleMap>) -> Result<Tower> {
        if levels.is_empty() {
            return Err(Error::MalformedTower("depth must be at least 1".into()));
        }
        if maps.len() + 1 != levels.len() {
            return Err(Error::MalformedTower(format!(
                "{} levels but {} maps",
                levels.len(),
                maps.len()
            )));
        }
        for (n, f) in maps.iter().enumerate() {
            let (s, t) = match direction {
                Direction::Inverse => (&levels[n + 1], &levels[n]),
                Direction::Direct => (&levels[n], &levels[n + 1]),
            };
            if f.source.dim() != s.dim()
                || f.target.dim() != t.dim()
                || f.source.rel != s.rel
                || f.target.rel != t.rel
            {
                return Err(Error::MalformedTower(format!(
                    "map {} has the wrong endpoints",
                    n + 1
                )));
            }
            f.check()
                .map_err(|e| Error::MalformedTower(format!("map {}: {e}", n + 1)))?;
        }
        Ok(Tower {
            direction,
            levels,
            maps,
        })
    }

    pub fn inverse(levels: Vec<Module>, maps: Vec<ModuleMap>) -> Result<Tower> {
        Self::new(Direction::Inverse, levels, maps)
    }

    pub fn direct(levels: Vec<Module>, maps: Vec<ModuleMap>) -> Result<Tower> {
        Self::new(Direction::Direct, levels, maps)
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// For an inverse tower, the composite `M_j → M_n` (`j ≥ n`, 0-based).
    pub fn composite(&self, j: usize, n: usize) -> ModuleMap {
        assert!(j >= n);
        let mut f = ModuleMap::identity(&self.levels[j]);
        for m in (n..j).rev() {
            f = match self.direction {
                Direction::Inverse => f.then(&self.maps[m]),
                Direction::Direct => panic!("composite is defined for inverse towers"),
            };
        }
        f
    }

    pub fn all_surjective(&self) -> bool {
        self.maps.iter().all(|f| f.is_surjective())
    }

    pub fn all_injective(&self) -> bool {
        self.maps.iter().all(|f| f.is_injective())
    }

    pub fn all_finite(&self) -> bool {
        self.levels.iter().all(|m| m.order().is_some())
    }

    /// First level (1-based) from which `STABLE_LEVELS` consecutive levels
    /// are joined by isomorphisms.
    pub fn stabilized_at(&self) -> Option<usize> {
        let need = STABLE_LEVELS - 1;
        (0..self.maps.len())
            .find(|&n| {
                n + need <= self.maps.len() && self.maps[n..n + need].iter().all(|f| f.is_iso())
            })
            .map(|n| n + 1)
    }

    /// The chain `im(M_j → M_n)` for `j = n, …, k-1`.
    pub fn image_chain(&self, n: usize) -> Vec<Lattice> {
        (n..self.depth())
            .map(|j| self.composite(j, n).image_lattice())
            .collect()
    }

    /// Kernel and cokernel of `Π M_n → Π_{n<k} M_n, (x_n) ↦ (x_n − f(x_{n+1}))`.
    pub fn truncated_complex(&self) -> (GroupType, GroupType) {
        assert_eq!(self.direction, Direction::Inverse);
        let k = self.depth();
        let dims: Vec<usize> = self.levels.iter().map(|m| m.dim()).collect();
        let off: Vec<usize> = dims
            .iter()
            .scan(0, |s, d| {
                let o = *s;
                *s += d;
                Some(o)
            })
            .collect();
        let src: usize = dims.iter().sum();
        let tgt: usize = dims[..k - 1].iter().sum();
        let mut mat = vec![vec![0; tgt]; src];
        for n in 0..k - 1 {
            for a in 0..dims[n] {
                mat[off[n] + a][off[n] + a] += 1;
            }
            for a in 0..dims[n + 1] {
                for (b, c) in self.maps[n].matrix[a].iter().enumerate() {
                    mat[off[n + 1] + a][off[n] + b] -= c;
                }
            }
        }
        let (prod, _, _) = Module::direct_sum(&self.levels);
        let (target, _, _) = Module::direct_sum(&self.levels[..k - 1]);
        let d = ModuleMap::new(prod, target, mat);
        (d.kernel().0.group_type(), d.cokernel().0.group_type())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Limit {
    /// The tower is constant from `level` on.
    Stable {
        level: usize,
        group: GroupType,
    },
    /// Surjective maps: the limit maps onto every level; the deepest level is
    /// reported.
    Truncated {
        depth: usize,
        group: GroupType,
    },
    /// Injective maps whose images in level 1 lie in ever smaller multiples
    /// `c_n·M_1`; `contents` lists the `c_n`.
    Zero {
        depth: usize,
        contents: Vec<Int>,
    },
    /// Finite levels where every `steps`-fold composite is zero.
    Vanishing {
        depth: usize,
        steps: usize,
    },
    Indeterminate {
        depth: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind")]
pub enum Lim1 {
    Zero {
        reason: String,
    },
    /// Image chain in level 1 strictly decreasing through the depth, given as
    /// successive indices `[im_n : im_{n+1}]` (0 for infinite).
    Nonzero {
        level: usize,
        indices: Vec<Int>,
    },
    Indeterminate {
        depth: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LimReport {
    pub limit: Limit,
    pub lim1: Lim1,
    pub stabilized_at: Option<usize>,
}

/// Index of `b` in `a` as abelian groups, 0 if infinite.
fn relative_index(a: &Lattice, b: &Lattice) -> Int {
    let sq = super::group::Subquotient::new(a.clone(), b.clone());
    sq.order().unwrap_or(0)
}

/// Largest `c` with `L ⊆ c·ℤ^n + rel` for a free level (`rel = 0`).
fn content(l: &Lattice) -> Int {
    l.basis().iter().flatten().fold(0, |g, &x| gcd(g, x))
}

/// Smallest `s < k` with every composite `M_{n+s} → M_n` zero, for towers
/// of finite levels.
fn vanishing_steps(t: &Tower) -> Option<usize> {
    let k = t.depth();
    if !t.all_finite() {
        return None;
    }
    (1..k).find(|&s| (0..k - s).all(|n| t.composite(n + s, n).is_zero()))
}

pub fn tower_limits(t: &Tower) -> Result<LimReport> {
    if t.direction != Direction::Inverse {
        return Err(Error::MalformedTower("lim needs an inverse tower".into()));
    }
    let k = t.depth();
    if k < 2 {
        return Err(Error::MalformedTower("lim needs depth at least 2".into()));
    }
    let stabilized_at = t.stabilized_at();
    let surjective = t.all_surjective();
    let limit = if let Some(level) = stabilized_at {
        Limit::Stable {
            level,
            group: t.levels[level - 1].group_type(),
        }
    } else if surjective {
        Limit::Truncated {
            depth: k,
            group: t.levels[k - 1].group_type(),
        }
    } else if t.all_injective() && t.levels[0].rel.rank() == 0 {
        let contents: Vec<Int> = t.image_chain(0).iter().map(content).collect();
        let growing = contents
            .windows(2)
            .all(|w| w[0] != 0 && w[1] != 0 && w[1] % w[0] == 0 && w[1] != w[0]);
        if growing {
            Limit::Zero { depth: k, contents }
        } else {
            Limit::Indeterminate { depth: k }
        }
    } else if let Some(steps) = vanishing_steps(t) {
        Limit::Vanishing { depth: k, steps }
    } else {
        Limit::Indeterminate { depth: k }
    };
    let lim1 = if surjective {
        Lim1::Zero {
            reason: "all maps surjective".into(),
        }
    } else if t.all_finite() {
        Lim1::Zero {
            reason: "finite levels".into(),
        }
    } else {
        let mut verdict = None;
        let mut all_stable = true;
        for n in 0..k {
            let chain = t.image_chain(n);
            let stable = chain
                .windows(STABLE_LEVELS)
                .any(|w| w.iter().all(|l| *l == w[0]));
            let strictly = chain.len() >= STABLE_LEVELS && chain.windows(2).all(|w| w[0] != w[1]);
            if strictly && verdict.is_none() {
                let indices = chain
                    .windows(2)
                    .map(|w| relative_index(&w[0], &w[1]))
                    .collect();
                verdict = Some(Lim1::Nonzero {
                    level: n + 1,
                    indices,
                });
            }
            // the last few levels have chains too short to judge
            if !stable && chain.len() >= STABLE_LEVELS {
                all_stable = false;
            }
        }
        match verdict {
            Some(v) => v,
            None if all_stable => Lim1::Zero {
                reason: "image chains stabilize".into(),
            },
            None => Lim1::Indeterminate { depth: k },
        }
    };
    Ok(LimReport {
        limit,
        lim1,
        stabilized_at,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::homalg::module::Side;
    use crate::ring::RingHandle;

    fn z() -> Arc<crate::ring::ZAlg> {
        Arc::new(RingHandle::Integers.zalg().unwrap())
    }

    fn cyclic(d: Int) -> Module {
        Module::cyclic(z(), Side::Left, &Lattice::new(1, &[vec![d]], 0))
    }

    fn p_adic(p: Int, k: u32) -> Tower {
        let levels: Vec<Module> = (1..=k).map(|n| cyclic(p.pow(n))).collect();
        let maps = (0..k as usize - 1)
            .map(|n| ModuleMap::new(levels[n + 1].clone(), levels[n].clone(), vec![vec![1]]))
            .collect();
        Tower::inverse(levels, maps).unwrap()
    }

    #[test]
    fn projections_have_no_lim1() {
        let r = tower_limits(&p_adic(3, 4)).unwrap();
        assert_eq!(r.stabilized_at, None);
        assert!(matches!(r.lim1, Lim1::Zero { .. }));
        assert_eq!(
            r.limit,
            Limit::Truncated {
                depth: 4,
                group: GroupType::cyclic(81)
            }
        );
    }

    #[test]
    fn zero_tower() {
        let zero = Module::zero(z(), Side::Left);
        let maps = (0..3)
            .map(|_| ModuleMap::zero(zero.clone(), zero.clone()))
            .collect();
        let r = tower_limits(&Tower::inverse(vec![zero.clone(); 4], maps).unwrap()).unwrap();
        assert_eq!(
            r.limit,
            Limit::Stable {
                level: 1,
                group: GroupType::trivial()
            }
        );
        assert!(matches!(r.lim1, Lim1::Zero { .. }));
    }

    #[test]
    fn multiplication_tower_has_lim1() {
        let p = 5;
        let free = Module::free(z(), Side::Left, 1);
        let maps = (0..3)
            .map(|_| ModuleMap::new(free.clone(), free.clone(), vec![vec![p]]))
            .collect();
        let t = Tower::inverse(vec![free.clone(); 4], maps).unwrap();
        let r = tower_limits(&t).unwrap();
        assert_eq!(
            r.limit,
            Limit::Zero {
                depth: 4,
                contents: vec![1, 5, 25, 125]
            }
        );
        assert_eq!(
            r.lim1,
            Lim1::Nonzero {
                level: 1,
                indices: vec![5, 5, 5]
            }
        );
        // the truncated two-term complex cannot see lim¹
        let (ker, coker) = t.truncated_complex();
        assert_eq!(ker, GroupType::cyclic(0));
        assert!(coker.is_zero());
    }

    #[test]
    fn malformed_maps_are_rejected() {
        let a = cyclic(4);
        let b = cyclic(6);
        // 1 ↦ 1 is not well defined ℤ/4 → ℤ/6
        let bad = ModuleMap::new(a.clone(), b.clone(), vec![vec![1]]);
        assert!(matches!(
            Tower::inverse(vec![b, a], vec![bad]),
            Err(Error::MalformedTower(_))
        ));
    }
}
