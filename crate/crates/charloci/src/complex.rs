//! Bounded complexes of free modules and the derived toolkit built on them:
//! cohomology presentations, derived fibers, duality, truncations, cones,
//! twists, coordinate inversion, minimization, and free replacement of
//! complexes of finitely presented modules.

use crate::error::{Error, Result};
use crate::groebner::{lift_through, matrix_module_gb, syzygies, MPoly};
use crate::ideal::{Codim, Ideal};
use crate::matrix::{combinations, PolyMatrix};
use crate::modules::{gb_columns, FPModule};
use crate::poly::{q_int, Poly, PolyRing, Q};
use num::Zero;
use std::collections::BTreeMap;
use std::sync::Arc;

/// Cochain complex of free modules; `differentials[d]` maps degree d to
/// degree d+1 and has shape ranks[d+1] x ranks[d].
#[derive(Debug, Clone, PartialEq)]
pub struct FreeComplex {
    pub ring: Arc<PolyRing>,
    pub lo: i32,
    pub hi: i32,
    pub ranks: BTreeMap<i32, usize>,
    pub differentials: BTreeMap<i32, PolyMatrix>,
}

impl FreeComplex {
    pub fn new(
        ring: &Arc<PolyRing>,
        ranks: BTreeMap<i32, usize>,
        differentials: BTreeMap<i32, PolyMatrix>,
    ) -> Result<Self> {
        let ranks: BTreeMap<i32, usize> = ranks.into_iter().filter(|&(_, r)| r > 0).collect();
        let (lo, hi) = match (ranks.keys().next(), ranks.keys().next_back()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => (0, 0),
        };
        let rank_at = |d: i32| *ranks.get(&d).unwrap_or(&0);
        let mut diffs = BTreeMap::new();
        for (d, m) in differentials {
            if !m.ring.same_vars(ring) {
                return Err(Error::RingMismatch("differential in wrong ring".into()));
            }
            if m.rows != rank_at(d + 1) || m.cols != rank_at(d) {
                return Err(Error::InvalidInput(format!(
                    "differential at degree {} has shape {}x{}, expected {}x{}",
                    d,
                    m.rows,
                    m.cols,
                    rank_at(d + 1),
                    rank_at(d)
                )));
            }
            if m.rows > 0 && m.cols > 0 {
                diffs.insert(d, m);
            }
        }
        let c = FreeComplex { ring: ring.clone(), lo, hi, ranks, differentials: diffs };
        for d in c.lo..c.hi {
            if !c.diff(d + 1).mul(&c.diff(d)).is_zero() {
                return Err(Error::InvalidInput(format!(
                    "differentials at degrees {} and {} do not compose to zero",
                    d,
                    d + 1
                )));
            }
        }
        Ok(c)
    }

    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        FreeComplex {
            ring: ring.clone(),
            lo: 0,
            hi: 0,
            ranks: BTreeMap::new(),
            differentials: BTreeMap::new(),
        }
    }

    pub fn concentrated(ring: &Arc<PolyRing>, degree: i32, rank: usize) -> Self {
        if rank == 0 {
            return FreeComplex::zero(ring);
        }
        FreeComplex {
            ring: ring.clone(),
            lo: degree,
            hi: degree,
            ranks: [(degree, rank)].into_iter().collect(),
            differentials: BTreeMap::new(),
        }
    }

    pub fn rank(&self, d: i32) -> usize {
        *self.ranks.get(&d).unwrap_or(&0)
    }

    /// Differential out of degree d, materialized as a zero matrix of the
    /// right shape when absent.
    pub fn diff(&self, d: i32) -> PolyMatrix {
        match self.differentials.get(&d) {
            Some(m) => m.clone(),
            None => PolyMatrix::zero(&self.ring, self.rank(d + 1), self.rank(d)),
        }
    }

    pub fn is_zero_complex(&self) -> bool {
        self.ranks.is_empty()
    }

    pub fn total_rank(&self) -> usize {
        self.ranks.values().sum()
    }

    /// Presentation of ker(d_i) / im(d_{i-1}) via syzygies.
    pub fn cohomology_module(&self, i: i32) -> FPModule {
        if self.rank(i) == 0 {
            return FPModule::zero(&self.ring);
        }
        let kernel = syzygies(&self.diff(i));
        if kernel.cols == 0 {
            return FPModule::zero(&self.ring);
        }
        let stacked = kernel.hstack(&self.diff(i - 1));
        let syz = syzygies(&stacked);
        let rel_cols: Vec<Vec<Poly>> = (0..syz.cols)
            .map(|j| (0..kernel.cols).map(|t| syz.get(t, j).clone()).collect())
            .collect();
        let relations =
            gb_columns(&PolyMatrix::from_cols(&self.ring, kernel.cols, rel_cols));
        FPModule { ring: self.ring.clone(), n_generators: kernel.cols, relations }
    }

    /// dim H^k of the complex of rational vector spaces obtained by
    /// evaluating every differential at the point.
    pub fn derived_fiber(&self, point: &[Q]) -> BTreeMap<i32, usize> {
        let mut out = BTreeMap::new();
        if self.is_zero_complex() {
            return out;
        }
        let mut ranks_of_diff: BTreeMap<i32, usize> = BTreeMap::new();
        for d in (self.lo - 1)..=self.hi {
            ranks_of_diff.insert(d, self.diff(d).eval(point).rank());
        }
        for d in self.lo..=self.hi {
            out.insert(d, self.rank(d) - ranks_of_diff[&d] - ranks_of_diff[&(d - 1)]);
        }
        out
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.ranks
            .iter()
            .map(|(&d, &r)| if d.rem_euclid(2) == 0 { r as i64 } else { -(r as i64) })
            .sum()
    }

    /// RHom(-, R) on free complexes: degree -d gets rank ranks[d], and the
    /// differential out of degree e is (-1)^(e(e+1)/2) times the transpose
    /// of the differential out of degree -e-1. With this sign the dual is
    /// an involution on the nose.
    pub fn dual(&self) -> FreeComplex {
        let mut ranks = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for (&d, &r) in &self.ranks {
            ranks.insert(-d, r);
        }
        for d in self.lo..self.hi {
            let e = -d - 1;
            let mut m = self.diff(d).transpose();
            if (i64::from(e) * (i64::from(e) + 1) / 2).rem_euclid(2) == 1 {
                m = m.scale(&q_int(-1));
            }
            if m.rows > 0 && m.cols > 0 {
                diffs.insert(e, m);
            }
        }
        FreeComplex::new(&self.ring, ranks, diffs).expect("dual preserves d*d = 0")
    }

    /// shift(c, s)^i = c^{i+s}; differentials pick up the sign (-1)^s.
    pub fn shift(&self, s: i32) -> FreeComplex {
        let mut ranks = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for (&d, &r) in &self.ranks {
            ranks.insert(d - s, r);
        }
        for (&d, m) in &self.differentials {
            let m = if s.rem_euclid(2) == 1 { m.scale(&q_int(-1)) } else { m.clone() };
            diffs.insert(d - s, m);
        }
        FreeComplex::new(&self.ring, ranks, diffs).expect("shift preserves d*d = 0")
    }

    pub fn direct_sum(&self, other: &FreeComplex) -> Result<FreeComplex> {
        if !self.ring.same_vars(&other.ring) {
            return Err(Error::RingMismatch("direct sum over different rings".into()));
        }
        let lo = self.lo.min(other.lo);
        let hi = self.hi.max(other.hi);
        let mut ranks = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for d in lo..=hi {
            let r = self.rank(d) + other.rank(d);
            if r > 0 {
                ranks.insert(d, r);
            }
        }
        for d in lo..hi {
            let a = self.diff(d);
            let b = other.diff(d);
            let mut m = PolyMatrix::zero(&self.ring, a.rows + b.rows, a.cols + b.cols);
            for i in 0..a.rows {
                for j in 0..a.cols {
                    m.set(i, j, a.get(i, j).clone());
                }
            }
            for i in 0..b.rows {
                for j in 0..b.cols {
                    m.set(a.rows + i, a.cols + j, b.get(i, j).clone());
                }
            }
            diffs.insert(d, m);
        }
        FreeComplex::new(&self.ring, ranks, diffs)
    }

    /// Substitutes x_i -> c_i * x_i in every differential.
    pub fn twist(&self, scales: &[Q]) -> Result<FreeComplex> {
        if scales.len() != self.ring.n() {
            return Err(Error::InvalidInput("twist point has wrong length".into()));
        }
        if scales.iter().any(|c| c.is_zero()) {
            return Err(Error::ZeroValue);
        }
        let diffs = self
            .differentials
            .iter()
            .map(|(&d, m)| (d, m.map(|p| p.scale_vars(scales))))
            .collect();
        FreeComplex::new(&self.ring, self.ranks.clone(), diffs)
    }

    /// Substitutes x_i -> x_i^{-1}, then clears denominators in each
    /// differential by one global monomial; the result is equivalent to the
    /// pullback along inversion only after localizing at the coordinates.
    pub fn invert_coords(&self) -> FreeComplex {
        let n = self.ring.n();
        let diffs = self
            .differentials
            .iter()
            .map(|(&d, m)| {
                let mut top = vec![0u32; n];
                for i in 0..m.rows {
                    for j in 0..m.cols {
                        for (exp, _) in &m.get(i, j).terms {
                            for v in 0..n {
                                top[v] = top[v].max(exp[v]);
                            }
                        }
                    }
                }
                let inv = m.map(|p| {
                    let terms = p
                        .terms
                        .iter()
                        .map(|(exp, c)| {
                            let flipped: Vec<u32> =
                                (0..n).map(|v| top[v] - exp[v]).collect();
                            (flipped, c.clone())
                        })
                        .collect();
                    Poly::from_terms(&self.ring, terms)
                });
                (d, inv)
            })
            .collect();
        FreeComplex::new(&self.ring, self.ranks.clone(), diffs)
            .expect("inversion preserves d*d = 0")
    }

    /// Annihilator and codimension of every cohomology module, optionally
    /// saturated at a unit monomial (torus mode).
    pub fn support_profile(&self, saturate_at: Option<&Poly>) -> Result<SupportProfile> {
        let mut entries = BTreeMap::new();
        if self.is_zero_complex() {
            return Ok(SupportProfile { entries });
        }
        for d in self.lo..=self.hi {
            let h = self.cohomology_module(d);
            if h.is_zero_module() {
                entries.insert(d, (Ideal::unit(&self.ring), Codim::Infinity));
                continue;
            }
            let ann = h.annihilator()?;
            let ideal = match saturate_at {
                Some(u) => ann.saturation(u)?,
                None => ann,
            };
            let codim = if ideal.is_unit_ideal()? { Codim::Infinity } else { ideal.codim()? };
            entries.insert(d, (ideal, codim));
        }
        Ok(SupportProfile { entries })
    }

    /// Canonical truncation keeping cohomology in degrees >= n, as a free
    /// complex: the cokernel of d^{n-1} is replaced by its free resolution
    /// spliced below degree n.
    pub fn truncate_geq(&self, n: i32) -> Result<FreeComplex> {
        if n <= self.lo || self.is_zero_complex() {
            return Ok(self.clone());
        }
        if n > self.hi {
            return Ok(FreeComplex::zero(&self.ring));
        }
        let mut ranks = BTreeMap::new();
        let mut diffs = BTreeMap::new();
        for d in n..=self.hi {
            if self.rank(d) > 0 {
                ranks.insert(d, self.rank(d));
            }
            if d < self.hi {
                diffs.insert(d, self.diff(d));
            }
        }
        // resolve ker(R^{ranks[n]} ->> coker d^{n-1}) = im d^{n-1}
        let bound = self.ring.n() + 3;
        let mut chain = gb_columns(&self.diff(n - 1));
        let mut d = n - 1;
        while chain.cols > 0 {
            ranks.insert(d, chain.cols);
            diffs.insert(d, chain.clone());
            if (n - 1 - d) as usize >= bound {
                return Err(Error::ResolutionTooLong { bound });
            }
            chain = gb_columns(&syzygies(&chain));
            d -= 1;
        }
        FreeComplex::new(&self.ring, ranks, diffs)
    }

    /// Canonical truncation keeping cohomology in degrees <= n, realized as
    /// cone(c -> model of truncate_geq(n+1)) shifted down by one.
    pub fn truncate_leq(&self, n: i32) -> Result<FreeComplex> {
        if n >= self.hi || self.is_zero_complex() {
            return Ok(self.clone());
        }
        if n < self.lo {
            return Ok(FreeComplex::zero(&self.ring));
        }
        let t = self.truncate_geq(n + 1)?;
        // chain map phi: identity above n, lifted through the resolution
        // splice at and below n
        let mut maps: BTreeMap<i32, PolyMatrix> = BTreeMap::new();
        for d in (n + 1)..=self.hi {
            if self.rank(d) > 0 {
                maps.insert(d, PolyMatrix::identity(&self.ring, self.rank(d)));
            }
        }
        let t_lo = t.lo;
        for e in (self.lo..=n).rev() {
            let prev = maps
                .get(&(e + 1))
                .cloned()
                .unwrap_or_else(|| PolyMatrix::zero(&self.ring, t.rank(e + 1), self.rank(e + 1)));
            let rhs = prev.mul(&self.diff(e));
            if t.rank(e) == 0 {
                if !rhs.is_zero() {
                    return Err(Error::PreconditionFailed(
                        "truncation lift fell off the resolution".into(),
                    ));
                }
                if e < t_lo {
                    break;
                }
                continue;
            }
            let phi = if rhs.is_zero() {
                PolyMatrix::zero(&self.ring, t.rank(e), self.rank(e))
            } else {
                lift_through(&t.diff(e), &rhs).ok_or_else(|| {
                    Error::PreconditionFailed("truncation lift failed".into())
                })?
            };
            maps.insert(e, phi);
        }
        Ok(cone(self, &t, &maps)?.shift(-1).minimize())
    }

    /// Strips split-exact summands: repeatedly cancels unit entries of the
    /// differentials. Quasi-isomorphism class is preserved.
    pub fn minimize(&self) -> FreeComplex {
        let mut ranks = self.ranks.clone();
        let mut diffs = self.differentials.clone();
        let rank_at = |ranks: &BTreeMap<i32, usize>, d: i32| *ranks.get(&d).unwrap_or(&0);
        loop {
            let mut pivot: Option<(i32, usize, usize)> = None;
            'scan: for (&k, m) in &diffs {
                for i in 0..m.rows {
                    for j in 0..m.cols {
                        let e = m.get(i, j);
                        if e.is_unit() {
                            pivot = Some((k, i, j));
                            break 'scan;
                        }
                    }
                }
            }
            let Some((k, r, c)) = pivot else { break };
            let g = diffs.get(&k).unwrap().clone();
            let a = g.get(r, c).leading().unwrap().1.clone();
            // degree-k differential: cancel row r and column c, with the
            // Gaussian correction on what remains
            let mut new_k = PolyMatrix::zero(&self.ring, g.rows - 1, g.cols - 1);
            for i in 0..g.rows {
                if i == r {
                    continue;
                }
                for j in 0..g.cols {
                    if j == c {
                        continue;
                    }
                    let corr = g.get(i, c).mul(g.get(r, j)).mul_q(&(Q::from_integer(1.into()) / &a));
                    let v = g.get(i, j).sub(&corr);
                    new_k.set(i - usize::from(i > r), j - usize::from(j > c), v);
                }
            }
            // degree k-1: drop row c; degree k+1: drop column r
            let prev = diffs.get(&(k - 1)).map(|m| {
                let keep: Vec<usize> = (0..m.rows).filter(|&i| i != c).collect();
                let all: Vec<usize> = (0..m.cols).collect();
                m.submatrix(&keep, &all)
            });
            let next = diffs.get(&(k + 1)).map(|m| {
                let keep: Vec<usize> = (0..m.cols).filter(|&j| j != r).collect();
                let all: Vec<usize> = (0..m.rows).collect();
                m.submatrix(&all, &keep)
            });
            *ranks.get_mut(&k).unwrap() -= 1;
            *ranks.get_mut(&(k + 1)).unwrap() -= 1;
            if rank_at(&ranks, k) == 0 {
                ranks.remove(&k);
            }
            if rank_at(&ranks, k + 1) == 0 {
                ranks.remove(&(k + 1));
            }
            let mut put = |d: i32, m: PolyMatrix| {
                if m.rows > 0 && m.cols > 0 {
                    diffs.insert(d, m);
                } else {
                    diffs.remove(&d);
                }
            };
            put(k, new_k);
            if let Some(m) = prev {
                put(k - 1, m);
            }
            if let Some(m) = next {
                put(k + 1, m);
            }
        }
        FreeComplex::new(&self.ring, ranks, diffs).expect("minimization preserves d*d = 0")
    }
}

/// Per-degree support data: (saturated) annihilator of the cohomology and
/// its codimension, with the +infinity sentinel for vanishing cohomology.
#[derive(Debug, Clone)]
pub struct SupportProfile {
    pub entries: BTreeMap<i32, (Ideal, Codim)>,
}

impl SupportProfile {
    pub fn codim(&self, d: i32) -> Codim {
        self.entries.get(&d).map(|(_, c)| *c).unwrap_or(Codim::Infinity)
    }
}

/// Mapping cone of a chain map given by per-degree matrices
/// (to.rank(i) x from.rank(i)); missing degrees are zero maps.
/// cone^i = from^{i+1} (+) to^i.
pub fn cone(
    from: &FreeComplex,
    to: &FreeComplex,
    maps: &BTreeMap<i32, PolyMatrix>,
) -> Result<FreeComplex> {
    if !from.ring.same_vars(&to.ring) {
        return Err(Error::RingMismatch("cone over different rings".into()));
    }
    let ring = &from.ring;
    let phi = |i: i32| -> PolyMatrix {
        match maps.get(&i) {
            Some(m) => m.clone(),
            None => PolyMatrix::zero(ring, to.rank(i), from.rank(i)),
        }
    };
    let lo = from.lo.min(to.lo) - 1;
    let hi = from.hi.max(to.hi);
    for (&i, m) in maps {
        if m.rows != to.rank(i) || m.cols != from.rank(i) {
            return Err(Error::NotAChainMap);
        }
    }
    for i in lo..=hi {
        if phi(i + 1).mul(&from.diff(i)) != to.diff(i).mul(&phi(i)) {
            return Err(Error::NotAChainMap);
        }
    }
    let mut ranks = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    for i in lo..=hi {
        let r = from.rank(i + 1) + to.rank(i);
        if r > 0 {
            ranks.insert(i, r);
        }
    }
    for i in lo..hi {
        let a = from.diff(i + 1).scale(&q_int(-1));
        let p = phi(i + 1);
        let b = to.diff(i);
        let rows = from.rank(i + 2) + to.rank(i + 1);
        let cols = from.rank(i + 1) + to.rank(i);
        if rows == 0 || cols == 0 {
            continue;
        }
        let mut m = PolyMatrix::zero(ring, rows, cols);
        for r in 0..a.rows {
            for c in 0..a.cols {
                m.set(r, c, a.get(r, c).clone());
            }
        }
        for r in 0..p.rows {
            for c in 0..p.cols {
                m.set(from.rank(i + 2) + r, c, p.get(r, c).clone());
            }
        }
        for r in 0..b.rows {
            for c in 0..b.cols {
                m.set(from.rank(i + 2) + r, from.rank(i + 1) + c, b.get(r, c).clone());
            }
        }
        diffs.insert(i, m);
    }
    FreeComplex::new(ring, ranks, diffs)
}

/// Bounded complex of finitely presented modules; maps are matrices on
/// generators, required to be well defined and to compose to zero modulo
/// relations.
#[derive(Debug, Clone)]
pub struct ModuleComplex {
    pub ring: Arc<PolyRing>,
    pub terms: BTreeMap<i32, FPModule>,
    pub maps: BTreeMap<i32, PolyMatrix>,
}

impl ModuleComplex {
    pub fn new(
        ring: &Arc<PolyRing>,
        terms: BTreeMap<i32, FPModule>,
        maps: BTreeMap<i32, PolyMatrix>,
    ) -> Result<Self> {
        let gens = |d: i32| terms.get(&d).map(|m| m.n_generators).unwrap_or(0);
        for (&d, m) in &maps {
            if m.rows != gens(d + 1) || m.cols != gens(d) {
                return Err(Error::InvalidInput(format!(
                    "module map at degree {} has the wrong shape",
                    d
                )));
            }
        }
        let mc = ModuleComplex { ring: ring.clone(), terms, maps };
        for (&d, m) in &mc.maps {
            let target = &mc.terms[&(d + 1)];
            let tgb = matrix_module_gb(&target.relations);
            // well defined: relations land in relations
            if let Some(src) = mc.terms.get(&d) {
                let moved = m.mul(&src.relations);
                for j in 0..moved.cols {
                    if !tgb.contains(&MPoly::from_comps(&moved.col(j))) {
                        return Err(Error::InvalidInput(format!(
                            "map at degree {} is not well defined",
                            d
                        )));
                    }
                }
            }
            // composite zero modulo relations one step up
            if let Some(next) = mc.maps.get(&(d + 1)) {
                let comp = next.mul(m);
                let ngb = matrix_module_gb(&mc.terms[&(d + 2)].relations);
                for j in 0..comp.cols {
                    if !ngb.contains(&MPoly::from_comps(&comp.col(j))) {
                        return Err(Error::InvalidInput(format!(
                            "maps at degrees {} and {} do not compose to zero",
                            d,
                            d + 1
                        )));
                    }
                }
            }
        }
        Ok(mc)
    }

    pub fn single(m: FPModule, degree: i32) -> Self {
        let ring = m.ring.clone();
        ModuleComplex { ring, terms: [(degree, m)].into_iter().collect(), maps: BTreeMap::new() }
    }

    pub fn from_free(c: &FreeComplex) -> Self {
        let mut terms = BTreeMap::new();
        let mut maps = BTreeMap::new();
        for (&d, &r) in &c.ranks {
            terms.insert(d, FPModule::free(&c.ring, r));
        }
        for (&d, m) in &c.differentials {
            maps.insert(d, m.clone());
        }
        ModuleComplex { ring: c.ring.clone(), terms, maps }
    }

    fn gens(&self, d: i32) -> usize {
        self.terms.get(&d).map(|m| m.n_generators).unwrap_or(0)
    }

    fn map_at(&self, d: i32) -> PolyMatrix {
        match self.maps.get(&d) {
            Some(m) => m.clone(),
            None => PolyMatrix::zero(&self.ring, self.gens(d + 1), self.gens(d)),
        }
    }

    /// Cohomology at degree i, directly from the presentations.
    pub fn cohomology(&self, i: i32) -> FPModule {
        let Some(term) = self.terms.get(&i) else {
            return FPModule::zero(&self.ring);
        };
        let g = term.n_generators;
        if g == 0 {
            return FPModule::zero(&self.ring);
        }
        // kernel of the induced map: v with u*v in im(relations above)
        let u = self.map_at(i);
        let above = self
            .terms
            .get(&(i + 1))
            .map(|t| t.relations.clone())
            .unwrap_or_else(|| PolyMatrix::zero(&self.ring, u.rows, 0));
        let stacked = u.hstack(&above);
        let syz = syzygies(&stacked);
        let k_cols: Vec<Vec<Poly>> = (0..syz.cols)
            .map(|j| (0..g).map(|t| syz.get(t, j).clone()).collect())
            .collect();
        let kernel = gb_columns(&PolyMatrix::from_cols(&self.ring, g, k_cols));
        if kernel.cols == 0 {
            return FPModule::zero(&self.ring);
        }
        let below = self.map_at(i - 1);
        let boundary = below.hstack(&term.relations);
        let syz2 = syzygies(&kernel.hstack(&boundary));
        let rel_cols: Vec<Vec<Poly>> = (0..syz2.cols)
            .map(|j| (0..kernel.cols).map(|t| syz2.get(t, j).clone()).collect())
            .collect();
        let relations = gb_columns(&PolyMatrix::from_cols(&self.ring, kernel.cols, rel_cols));
        FPModule { ring: self.ring.clone(), n_generators: kernel.cols, relations }
    }

    /// Quasi-isomorphic bounded free complex, built degree by degree as an
    /// iterated cone over free resolutions of the terms.
    pub fn free_replacement(&self) -> Result<FreeComplex> {
        Ok(self.free_replacement_with_map()?.0)
    }

    /// Free replacement plus the per-degree comparison matrices
    /// (generators of the terms) x (free ranks) realizing the quasi-iso.
    pub fn free_replacement_with_map(&self) -> Result<(FreeComplex, BTreeMap<i32, PolyMatrix>)> {
        // fast path: already a free complex with strict zero composites
        if self.terms.values().all(|m| m.relations.is_zero()) {
            let strict = self
                .maps
                .iter()
                .all(|(&d, m)| self.map_at(d + 1).mul(m).is_zero());
            if strict {
                let mut ranks = BTreeMap::new();
                let mut psi = BTreeMap::new();
                for (&d, t) in &self.terms {
                    if t.n_generators > 0 {
                        ranks.insert(d, t.n_generators);
                        psi.insert(d, PolyMatrix::identity(&self.ring, t.n_generators));
                    }
                }
                let c = FreeComplex::new(&self.ring, ranks, self.maps.clone())?;
                return Ok((c, psi));
            }
        }
        let bound = self.ring.n() + 2;
        let mut f = FreeComplex::zero(&self.ring);
        let mut psi: BTreeMap<i32, PolyMatrix> = BTreeMap::new();
        let degrees: Vec<i32> = self.terms.keys().cloned().collect();
        for d in degrees {
            let term = &self.terms[&d];
            let q = resolution_complex(term, d, bound)?;
            let a = f.shift(-1); // a^i = f^{i-1}, differentials negated
            let mut maps: BTreeMap<i32, PolyMatrix> = BTreeMap::new();
            if q.rank(d) > 0 && a.rank(d) > 0 {
                // top of the gluing map: previous comparison followed by
                // the module map into this term
                let u = self.map_at(d - 1);
                let prev_psi = psi
                    .get(&(d - 1))
                    .cloned()
                    .unwrap_or_else(|| PolyMatrix::zero(&self.ring, self.gens(d - 1), f.rank(d - 1)));
                let top = u.mul(&prev_psi);
                if !top.is_zero() {
                    maps.insert(d, top);
                }
                for e in (a.lo.min(q.lo)..d).rev() {
                    let up = maps
                        .get(&(e + 1))
                        .cloned()
                        .unwrap_or_else(|| PolyMatrix::zero(&self.ring, q.rank(e + 1), a.rank(e + 1)));
                    let rhs = up.mul(&a.diff(e));
                    if rhs.is_zero() {
                        continue;
                    }
                    if q.rank(e) == 0 {
                        return Err(Error::PreconditionFailed(
                            "free replacement lift fell off the resolution".into(),
                        ));
                    }
                    let phi = lift_through(&q.diff(e), &rhs).ok_or_else(|| {
                        Error::PreconditionFailed("free replacement lift failed".into())
                    })?;
                    maps.insert(e, phi);
                }
            }
            let next = cone(&a, &q, &maps)?;
            // update comparison maps: blocks are [old f part | new q part]
            let mut new_psi = BTreeMap::new();
            for (&i, t) in &self.terms {
                if i > d || t.n_generators == 0 {
                    continue;
                }
                let old = psi
                    .get(&i)
                    .cloned()
                    .unwrap_or_else(|| PolyMatrix::zero(&self.ring, t.n_generators, f.rank(i)));
                let rho = if i == d {
                    PolyMatrix::identity(&self.ring, t.n_generators)
                } else {
                    PolyMatrix::zero(&self.ring, t.n_generators, q.rank(i))
                };
                new_psi.insert(i, old.hstack(&rho));
            }
            psi = new_psi;
            f = next;
        }
        Ok((f, psi))
    }
}

/// Free resolution of a module placed so its augmentation target sits at
/// `degree`: ranks[degree] = n_generators, relations spliced below.
pub fn resolution_complex(m: &FPModule, degree: i32, bound: usize) -> Result<FreeComplex> {
    if m.n_generators == 0 {
        return Ok(FreeComplex::zero(&m.ring));
    }
    let chain = m.resolution_matrices(bound)?;
    let mut ranks = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    ranks.insert(degree, m.n_generators);
    for (j, mat) in chain.iter().enumerate() {
        let d = degree - 1 - j as i32;
        ranks.insert(d, mat.cols);
        diffs.insert(d, mat.clone());
    }
    FreeComplex::new(&m.ring, ranks, diffs)
}

/// Koszul complex in degrees 0..s on pairwise commuting operators acting on
/// a free module: C^j has rank binom(s,j) * rk, with the usual signs.
pub fn koszul_complex(ring: &Arc<PolyRing>, operators: &[PolyMatrix]) -> Result<FreeComplex> {
    let s = operators.len();
    let rk = if s == 0 { 1 } else { operators[0].rows };
    for op in operators {
        if op.rows != rk || op.cols != rk {
            return Err(Error::InvalidInput("Koszul operators must be square of equal size".into()));
        }
        if !op.ring.same_vars(ring) {
            return Err(Error::RingMismatch("Koszul operator in wrong ring".into()));
        }
    }
    for i in 0..s {
        for j in (i + 1)..s {
            if operators[i].mul(&operators[j]) != operators[j].mul(&operators[i]) {
                return Err(Error::NonCommuting);
            }
        }
    }
    if s == 0 {
        return Ok(FreeComplex::concentrated(ring, 0, rk));
    }
    let mut ranks = BTreeMap::new();
    let mut diffs = BTreeMap::new();
    let mut subsets: Vec<Vec<Vec<usize>>> = Vec::new();
    for j in 0..=s {
        subsets.push(combinations(s, j));
        ranks.insert(j as i32, subsets[j].len() * rk);
    }
    for j in 0..s {
        let index_of: BTreeMap<&[usize], usize> = subsets[j + 1]
            .iter()
            .enumerate()
            .map(|(k, v)| (v.as_slice(), k))
            .collect();
        let mut m = PolyMatrix::zero(ring, subsets[j + 1].len() * rk, subsets[j].len() * rk);
        for (si, set) in subsets[j].iter().enumerate() {
            for i in 0..s {
                if set.contains(&i) {
                    continue;
                }
                let mut bigger = set.clone();
                bigger.push(i);
                bigger.sort();
                let ti = index_of[bigger.as_slice()];
                let sign = set.iter().filter(|&&t| t < i).count();
                let block = if sign % 2 == 1 {
                    operators[i].scale(&q_int(-1))
                } else {
                    operators[i].clone()
                };
                for r in 0..rk {
                    for c in 0..rk {
                        let cur = m.get(ti * rk + r, si * rk + c).add(block.get(r, c));
                        m.set(ti * rk + r, si * rk + c, cur);
                    }
                }
            }
        }
        diffs.insert(j as i32, m);
    }
    FreeComplex::new(ring, ranks, diffs)
}
