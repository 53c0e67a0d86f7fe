//! Finitely presented modules coker(relations) and the module-level
//! operations the homological layers are built on: duals, reflexivity,
//! annihilators, free resolutions.

use crate::error::{Error, Result};
use crate::groebner::{lift_through, matrix_module_gb, syzygies, MPoly};
use crate::ideal::{Codim, Ideal};
use crate::matrix::{combinations, PolyMatrix};
use crate::poly::{Poly, PolyRing, Q};
use std::sync::Arc;

/// Module presented as coker(relations: R^cols -> R^n_generators).
#[derive(Debug, Clone, PartialEq)]
pub struct FPModule {
    pub ring: Arc<PolyRing>,
    pub n_generators: usize,
    pub relations: PolyMatrix,
}

impl FPModule {
    pub fn new(ring: &Arc<PolyRing>, n_generators: usize, relations: PolyMatrix) -> Result<Self> {
        if relations.rows != n_generators {
            return Err(Error::InvalidInput(format!(
                "presentation shape mismatch: {} generators, {} relation rows",
                n_generators, relations.rows
            )));
        }
        if !relations.ring.same_vars(ring) {
            return Err(Error::RingMismatch("relations in wrong ring".into()));
        }
        Ok(FPModule { ring: ring.clone(), n_generators, relations })
    }

    pub fn free(ring: &Arc<PolyRing>, rank: usize) -> Self {
        FPModule {
            ring: ring.clone(),
            n_generators: rank,
            relations: PolyMatrix::zero(ring, rank, 0),
        }
    }

    /// Canonical zero module: no generators.
    pub fn zero(ring: &Arc<PolyRing>) -> Self {
        FPModule::free(ring, 0)
    }

    /// R / I as a cyclic module.
    pub fn quotient_by_ideal(i: &Ideal) -> Self {
        let rel = PolyMatrix::from_rows(&i.ring, vec![i.generators.clone()]);
        FPModule { ring: i.ring.clone(), n_generators: 1, relations: rel }
    }

    pub fn is_zero_module(&self) -> bool {
        if self.n_generators == 0 {
            return true;
        }
        matrix_module_gb(&self.relations).is_full_module()
    }

    /// dim_k(M ⊗ κ(point)).
    pub fn fiber_dim(&self, point: &[Q]) -> usize {
        self.n_generators - self.relations.eval(point).rank()
    }

    /// Annihilator ideal, computed as the intersection of the colon ideals
    /// (im relations : e_i).
    pub fn annihilator(&self) -> Result<Ideal> {
        let comps = self.annihilator_components()?;
        let mut acc: Option<Ideal> = None;
        for c in comps {
            acc = Some(match acc {
                None => c,
                Some(prev) => prev.intersection(&c)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Ideal::unit(&self.ring)))
    }

    /// The colon ideals (im relations : e_i); their intersection is the
    /// annihilator, and V(annihilator) = union of their vanishing loci.
    pub fn annihilator_components(&self) -> Result<Vec<Ideal>> {
        let mut out = Vec::with_capacity(self.n_generators);
        for i in 0..self.n_generators {
            let mut unit_col = vec![Poly::zero(&self.ring); self.n_generators];
            unit_col[i] = Poly::one(&self.ring);
            let stacked = PolyMatrix::from_cols(&self.ring, self.n_generators, vec![unit_col])
                .hstack(&self.relations);
            let syz = syzygies(&stacked);
            let gens: Vec<Poly> = (0..syz.cols).map(|j| syz.get(0, j).clone()).collect();
            out.push(Ideal::new(&self.ring, gens)?);
        }
        Ok(out)
    }

    /// 0-th Fitting ideal (maximal minors of the presentation); same radical
    /// as the annihilator.
    pub fn fitting0(&self) -> Ideal {
        crate::ideal::minors_ideal(&self.relations, self.n_generators)
    }

    /// Codimension of the support in affine n-space, optionally after
    /// saturating at a unit monomial (Laurent/torus mode).
    pub fn support_codim(&self, saturate_at: Option<&Poly>) -> Result<Codim> {
        if self.is_zero_module() {
            return Ok(Codim::Infinity);
        }
        let mut best = Codim::Infinity;
        for comp in self.annihilator_components()? {
            let ideal = match saturate_at {
                Some(u) => comp.saturation(u)?,
                None => comp,
            };
            let c = ideal.codim()?;
            if c < best {
                best = c;
            }
        }
        Ok(best)
    }

    /// Hom(M, R) as a submodule of R^n_generators: returns the presentation
    /// of the dual together with the matrix whose columns are the
    /// functionals in dual-basis coordinates.
    pub fn dual(&self) -> DualModule {
        let z = syzygies(&self.relations.transpose());
        let rel = syzygies(&z);
        DualModule {
            module: FPModule {
                ring: self.ring.clone(),
                n_generators: z.cols,
                relations: rel,
            },
            functionals: z,
        }
    }

    /// The double dual together with the canonical map M -> M**.
    pub fn double_dual(&self) -> Result<(FPModule, PolyMatrix)> {
        let d1 = self.dual();
        let d2 = d1.module.dual();
        // e_i evaluates functionals: its image in M** has coordinates
        // row i of the functional matrix of the first dual
        let rows: Vec<Vec<Poly>> = (0..self.n_generators)
            .map(|i| (0..d1.functionals.cols).map(|j| d1.functionals.get(i, j).clone()).collect())
            .collect();
        let eval_vectors =
            PolyMatrix::from_cols(&self.ring, d1.functionals.cols, rows);
        let kappa = lift_through(&d2.functionals, &eval_vectors).ok_or_else(|| {
            Error::InvalidInput("canonical map does not land in the double dual".into())
        })?;
        Ok((d2.module, kappa))
    }

    pub fn is_reflexive(&self) -> Result<bool> {
        if self.n_generators == 0 {
            return Ok(true);
        }
        let (dd, kappa) = self.double_dual()?;
        // surjective: every generator of M** lies in im(kappa) + relations
        let combined = kappa.hstack(&dd.relations);
        if !matrix_module_gb(&combined).is_full_module() {
            return Ok(false);
        }
        // injective: preimages of relations of M** must already be
        // relations of M
        let syz = syzygies(&combined);
        let rel_gb = matrix_module_gb(&self.relations);
        for j in 0..syz.cols {
            let u: Vec<Poly> = (0..kappa.cols).map(|i| syz.get(i, j).clone()).collect();
            if !rel_gb.contains(&MPoly::from_comps(&u)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn reflexive_hull(&self) -> Result<FPModule> {
        Ok(self.double_dual()?.0)
    }

    /// Chain of matrices d1, d2, ..., dL with d1 = relations and
    /// d_{k+1} = generators of ker(d_k); empty when the module is free.
    pub fn resolution_matrices(&self, max_length: usize) -> Result<Vec<PolyMatrix>> {
        let mut out: Vec<PolyMatrix> = Vec::new();
        // start from an inter-reduced generating set of the relation module
        let first = gb_columns(&self.relations);
        if first.cols == 0 {
            return Ok(out);
        }
        out.push(first);
        loop {
            let next = syzygies(out.last().unwrap());
            if next.cols == 0 {
                return Ok(out);
            }
            if out.len() == max_length {
                return Err(Error::ResolutionTooLong { bound: max_length });
            }
            out.push(gb_columns(&next));
        }
    }
}

/// Presentation of Hom(M, R) plus the embedding into R^g.
#[derive(Debug, Clone)]
pub struct DualModule {
    pub module: FPModule,
    pub functionals: PolyMatrix,
}

/// Replaces the columns by the reduced module Gröbner basis of their span;
/// same submodule, deterministic and inter-reduced.
pub fn gb_columns(m: &PolyMatrix) -> PolyMatrix {
    if m.cols == 0 {
        return m.clone();
    }
    let gb = matrix_module_gb(m);
    let cols: Vec<Vec<Poly>> = gb.elements.iter().map(|e| e.to_comps(&m.ring)).collect();
    PolyMatrix::from_cols(&m.ring, m.rows, cols)
}

/// Sound isomorphism surrogate: equality of Fitting ideals plus fiber
/// dimensions on a sample panel. Equal outputs are necessary for
/// isomorphism; reported matches mean "indistinguishable by these
/// invariants".
pub fn presentations_equivalent(a: &FPModule, b: &FPModule, panel: &[Vec<Q>]) -> Result<bool> {
    let az = a.is_zero_module();
    let bz = b.is_zero_module();
    if az || bz {
        return Ok(az == bz);
    }
    for p in panel {
        if a.fiber_dim(p) != b.fiber_dim(p) {
            return Ok(false);
        }
    }
    let max_g = a.n_generators.max(b.n_generators);
    for j in 0..=max_g {
        let fa = fitting_ideal(a, j);
        let fb = fitting_ideal(b, j);
        match (fa, fb) {
            (Some(ia), Some(ib)) => {
                if !ia.same_ideal(&ib)? {
                    return Ok(false);
                }
            }
            // minor budget exceeded: fall back to two-sided radical
            // membership of the 0-th Fitting ideals
            _ => {
                let ia = a.fitting0();
                let ib = b.fitting0();
                for g in &ia.generators {
                    if !ib.radical_membership(g)? {
                        return Ok(false);
                    }
                }
                for g in &ib.generators {
                    if !ia.radical_membership(g)? {
                        return Ok(false);
                    }
                }
                return Ok(true);
            }
        }
    }
    Ok(true)
}

const MINOR_BUDGET: usize = 20_000;

/// j-th Fitting ideal, or None when the number of minors exceeds the budget.
fn fitting_ideal(m: &FPModule, j: usize) -> Option<Ideal> {
    let size = m.n_generators.saturating_sub(j);
    if size == 0 {
        return Some(Ideal::unit(&m.ring));
    }
    if size > m.relations.cols || size > m.relations.rows {
        return Some(Ideal::zero(&m.ring));
    }
    let count = combinations(m.relations.rows, size).len() * combinations(m.relations.cols, size).len();
    if count > MINOR_BUDGET {
        return None;
    }
    Some(crate::ideal::minors_ideal(&m.relations, size))
}

/// Hom(R/I, M) = 0 test: no nonzero element of M is killed by I.
pub fn torsion_hom_is_zero(i: &Ideal, m: &FPModule) -> Result<bool> {
    if m.n_generators == 0 || i.generators.is_empty() {
        return Ok(true);
    }
    // elements v of R^g with f_j * v in im(relations) for all j, modulo
    // im(relations): stack the conditions as one syzygy computation
    let g = m.n_generators;
    let k = i.generators.len();
    // big matrix over R^(g*k): columns are (f_1 e_t, ..., f_k e_t) for each
    // candidate generator slot t, plus relation columns repeated per block
    let ring = &m.ring;
    let mut cols: Vec<Vec<Poly>> = Vec::new();
    // candidate columns: v = e_t placed once, conditions in each block
    for t in 0..g {
        let mut col = vec![Poly::zero(ring); g * k];
        for (blk, f) in i.generators.iter().enumerate() {
            col[blk * g + t] = f.clone();
        }
        cols.push(col);
    }
    // relation columns per block
    for blk in 0..k {
        for c in 0..m.relations.cols {
            let mut col = vec![Poly::zero(ring); g * k];
            for r in 0..g {
                col[blk * g + r] = m.relations.get(r, c).clone();
            }
            cols.push(col);
        }
    }
    let big = PolyMatrix::from_cols(ring, g * k, cols);
    let syz = syzygies(&big);
    // first g syzygy coordinates span the candidate kernel elements
    let rel_gb = matrix_module_gb(&m.relations);
    for j in 0..syz.cols {
        let mut v = vec![Poly::zero(ring); g];
        let mut nonzero = false;
        for t in 0..g {
            let entry = syz.get(t, j).clone();
            if !entry.is_zero() {
                nonzero = true;
            }
            v[t] = entry;
        }
        if !nonzero {
            continue;
        }
        if !rel_gb.contains(&MPoly::from_comps(&v)) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Deterministic panel of sample points with all coordinates nonzero.
pub fn default_panel(n: usize) -> Vec<Vec<Q>> {
    let base: Vec<i64> = vec![1, -1, 2, 3, -2, 5, 7, -3];
    let mut panel = Vec::new();
    for shift in 0..6 {
        let pt: Vec<Q> = (0..n)
            .map(|i| crate::poly::q_int(base[(i + shift) % base.len()]))
            .collect();
        panel.push(pt);
    }
    panel
}
