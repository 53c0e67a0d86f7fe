//! Buchberger's algorithm for submodules of free modules over Q[x1..xn].
//!
//! Elements of a free module R^r are kept as sparse term lists under a
//! position-over-term order (lower position index wins, ties broken by the
//! ring's monomial order). Ideals are the r = 1 case. Every basis element
//! carries its expression in the input generators, which is what powers
//! syzygy computations and membership lifts.

use crate::error::{Error, Result};
use crate::matrix::PolyMatrix;
use crate::poly::{exp_deg, exp_div, exp_lcm, Exp, MonomialOrder, Poly, PolyRing, Q};
use num::{One, Zero};
use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::sync::Arc;

#[derive(Debug, Clone, PartialEq)]
pub struct MTerm {
    pub pos: usize,
    pub exp: Exp,
    pub coef: Q,
}

/// Element of a free module R^rank, terms sorted strictly descending.
#[derive(Debug, Clone, PartialEq)]
pub struct MPoly {
    pub rank: usize,
    pub terms: Vec<MTerm>,
}

fn cmp_mterm(order: MonomialOrder, a: &MTerm, b: &MTerm) -> Ordering {
    b.pos.cmp(&a.pos).then_with(|| order.cmp_exp(&a.exp, &b.exp))
}

impl MPoly {
    pub fn zero(rank: usize) -> Self {
        MPoly { rank, terms: vec![] }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn from_comps(comps: &[Poly]) -> Self {
        let rank = comps.len();
        let mut terms = Vec::new();
        for (pos, p) in comps.iter().enumerate() {
            for (e, c) in &p.terms {
                terms.push(MTerm { pos, exp: e.clone(), coef: c.clone() });
            }
        }
        // components are individually sorted; stable sort by position keeps
        // the POT invariant
        MPoly { rank, terms }
    }

    pub fn to_comps(&self, ring: &Arc<PolyRing>) -> Vec<Poly> {
        let mut comps = vec![Poly::zero(ring); self.rank];
        for t in &self.terms {
            comps[t.pos] = comps[t.pos].add(&Poly::monomial(ring, t.exp.clone(), t.coef.clone()));
        }
        comps
    }

    pub fn leading(&self) -> Option<&MTerm> {
        self.terms.first()
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|t| MTerm { pos: t.pos, exp: t.exp.clone(), coef: -t.coef.clone() })
                .collect(),
        }
    }

    pub fn mul_term(&self, exp: &[u32], coef: &Q) -> MPoly {
        if coef.is_zero() {
            return MPoly::zero(self.rank);
        }
        MPoly {
            rank: self.rank,
            terms: self
                .terms
                .iter()
                .map(|t| MTerm {
                    pos: t.pos,
                    exp: t.exp.iter().zip(exp).map(|(a, b)| a + b).collect(),
                    coef: &t.coef * coef,
                })
                .collect(),
        }
    }

    pub fn add(&self, other: &MPoly, order: MonomialOrder) -> MPoly {
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match cmp_mterm(order, &self.terms[i], &other.terms[j]) {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].coef + &other.terms[j].coef;
                    if !c.is_zero() {
                        out.push(MTerm {
                            pos: self.terms[i].pos,
                            exp: self.terms[i].exp.clone(),
                            coef: c,
                        });
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.terms[i..]);
        out.extend_from_slice(&other.terms[j..]);
        MPoly { rank: self.rank, terms: out }
    }

    pub fn sub(&self, other: &MPoly, order: MonomialOrder) -> MPoly {
        self.add(&other.neg(), order)
    }

    fn monic(&self) -> MPoly {
        match self.leading() {
            None => self.clone(),
            Some(t) => {
                let inv = t.coef.recip();
                MPoly {
                    rank: self.rank,
                    terms: self
                        .terms
                        .iter()
                        .map(|t| MTerm { pos: t.pos, exp: t.exp.clone(), coef: &t.coef * &inv })
                        .collect(),
                }
            }
        }
    }
}

/// Reduced Gröbner basis of a submodule of R^rank, with representations of
/// each basis element in the input generators.
#[derive(Debug, Clone)]
pub struct ModuleGB {
    pub ring: Arc<PolyRing>,
    pub rank: usize,
    pub n_inputs: usize,
    pub elements: Vec<MPoly>,
    /// reps[k][j]: coefficient of input generator j in basis element k.
    pub reps: Vec<Vec<Poly>>,
}

struct Item {
    v: MPoly,
    rep: Vec<Poly>,
}

/// Full division of `f` by monic items; returns (remainder, quotients).
fn reduce_full(
    ring: &Arc<PolyRing>,
    items: &[Item],
    f: &MPoly,
) -> (MPoly, Vec<Poly>) {
    let order = ring.order;
    let mut rem_terms: Vec<MTerm> = Vec::new();
    let mut quotients = vec![Poly::zero(ring); items.len()];
    let mut work = f.clone();
    'outer: while let Some(lt) = work.leading().cloned() {
        for (k, item) in items.iter().enumerate() {
            let Some(glt) = item.v.leading() else { continue };
            if glt.pos != lt.pos {
                continue;
            }
            if let Some(qexp) = exp_div(&lt.exp, &glt.exp) {
                // items are monic
                let qc = lt.coef.clone();
                work = work.sub(&item.v.mul_term(&qexp, &qc), order);
                quotients[k] = quotients[k].add(&Poly::monomial(ring, qexp, qc));
                continue 'outer;
            }
        }
        // move leading term to remainder
        rem_terms.push(lt);
        work.terms.remove(0);
    }
    (MPoly { rank: f.rank, terms: rem_terms }, quotients)
}

pub fn module_gb(ring: &Arc<PolyRing>, rank: usize, gens: &[MPoly]) -> ModuleGB {
    let order = ring.order;
    let n_inputs = gens.len();
    let mut items: Vec<Item> = Vec::new();
    for (j, g) in gens.iter().enumerate() {
        if g.is_zero() {
            continue;
        }
        assert_eq!(g.rank, rank);
        let lc = g.leading().unwrap().coef.clone();
        let mut rep = vec![Poly::zero(ring); n_inputs];
        rep[j] = Poly::constant(ring, lc.recip());
        items.push(Item { v: g.monic(), rep });
    }

    // pair queue keyed by (lcm degree, i, j) — normal selection strategy
    let mut pairs: BTreeSet<(u64, usize, usize)> = BTreeSet::new();
    let pair_key = |items: &[Item], i: usize, j: usize| -> Option<(u64, usize, usize)> {
        let a = items[i].v.leading()?;
        let b = items[j].v.leading()?;
        if a.pos != b.pos {
            return None;
        }
        // product criterion, valid for ideals
        if rank == 1 && a.exp.iter().zip(&b.exp).all(|(x, y)| *x == 0 || *y == 0) {
            return None;
        }
        Some((exp_deg(&exp_lcm(&a.exp, &b.exp)), i, j))
    };
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            if let Some(k) = pair_key(&items, i, j) {
                pairs.insert(k);
            }
        }
    }

    while let Some(&(deg, i, j)) = pairs.iter().next() {
        pairs.remove(&(deg, i, j));
        let (a, b) = (items[i].v.leading().unwrap().clone(), items[j].v.leading().unwrap().clone());
        let lcm = exp_lcm(&a.exp, &b.exp);
        let ea = exp_div(&lcm, &a.exp).unwrap();
        let eb = exp_div(&lcm, &b.exp).unwrap();
        // both monic: S = x^ea * f_i - x^eb * f_j
        let s = items[i]
            .v
            .mul_term(&ea, &Q::one())
            .sub(&items[j].v.mul_term(&eb, &Q::one()), order);
        let (rem, quot) = reduce_full(ring, &items, &s);
        if rem.is_zero() {
            continue;
        }
        // rep of remainder: x^ea rep_i - x^eb rep_j - sum quot_k rep_k
        let mut rep = vec![Poly::zero(ring); n_inputs];
        let add_scaled = |rep: &mut Vec<Poly>, src: &[Poly], factor: &Poly| {
            for (t, s) in rep.iter_mut().zip(src) {
                if !s.is_zero() && !factor.is_zero() {
                    *t = t.add(&factor.mul(s));
                }
            }
        };
        add_scaled(&mut rep, &items[i].rep, &Poly::monomial(ring, ea, Q::one()));
        add_scaled(&mut rep, &items[j].rep, &Poly::monomial(ring, eb, Q::one()).neg());
        for (k, q) in quot.iter().enumerate() {
            if !q.is_zero() {
                add_scaled(&mut rep, &items[k].rep, &q.neg());
            }
        }
        let lc = rem.leading().unwrap().coef.clone();
        let inv = lc.recip();
        let rep: Vec<Poly> = rep.into_iter().map(|p| p.mul_q(&inv)).collect();
        let new_idx = items.len();
        items.push(Item { v: rem.monic(), rep });
        for k in 0..new_idx {
            if let Some(key) = pair_key(&items, k, new_idx) {
                pairs.insert(key);
            }
        }
    }

    inter_reduce(ring, items, rank, n_inputs)
}

fn inter_reduce(
    ring: &Arc<PolyRing>,
    items: Vec<Item>,
    rank: usize,
    n_inputs: usize,
) -> ModuleGB {
    let order = ring.order;
    // minimalize: drop items whose leading term is divisible by another's
    let mut keep: Vec<Item> = Vec::new();
    let mut sorted = items;
    sorted.sort_by(|a, b| match (a.v.leading(), b.v.leading()) {
        (Some(x), Some(y)) => cmp_mterm(order, x, y),
        _ => Ordering::Equal,
    });
    for item in sorted {
        let lt = item.v.leading().unwrap();
        let redundant = keep.iter().any(|k| {
            let klt = k.v.leading().unwrap();
            klt.pos == lt.pos && exp_div(&lt.exp, &klt.exp).is_some()
        });
        if !redundant {
            keep.push(item);
        }
    }
    // tail-reduce each against the others
    let mut reduced: Vec<Item> = Vec::new();
    for i in 0..keep.len() {
        let others: Vec<&Item> = keep.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, it)| it).collect();
        let (rem, quot) = {
            // reduce_full wants a slice of Item; rebuild a temp view
            let tmp: Vec<Item> = others
                .iter()
                .map(|it| Item { v: it.v.clone(), rep: it.rep.clone() })
                .collect();
            reduce_full(ring, &tmp, &keep[i].v)
        };
        debug_assert!(!rem.is_zero());
        let mut rep = keep[i].rep.clone();
        let mut oidx = 0;
        for (j, it) in keep.iter().enumerate() {
            if j == i {
                continue;
            }
            let q = &quot[oidx];
            oidx += 1;
            if q.is_zero() {
                continue;
            }
            for (t, s) in rep.iter_mut().zip(&it.rep) {
                *t = t.sub(&q.mul(s));
            }
        }
        let lc = rem.leading().unwrap().coef.clone();
        let inv = lc.recip();
        reduced.push(Item {
            v: rem.monic(),
            rep: rep.into_iter().map(|p| p.mul_q(&inv)).collect(),
        });
    }
    // deterministic output order: descending leading terms
    reduced.sort_by(|a, b| cmp_mterm(order, b.v.leading().unwrap(), a.v.leading().unwrap()));
    ModuleGB {
        ring: ring.clone(),
        rank,
        n_inputs,
        elements: reduced.iter().map(|it| it.v.clone()).collect(),
        reps: reduced.into_iter().map(|it| it.rep).collect(),
    }
}

impl ModuleGB {
    pub fn normal_form(&self, f: &MPoly) -> MPoly {
        self.normal_form_with_quotients(f).0
    }

    pub fn normal_form_with_quotients(&self, f: &MPoly) -> (MPoly, Vec<Poly>) {
        let items: Vec<Item> = self
            .elements
            .iter()
            .zip(&self.reps)
            .map(|(v, rep)| Item { v: v.clone(), rep: rep.clone() })
            .collect();
        reduce_full(&self.ring, &items, f)
    }

    pub fn contains(&self, f: &MPoly) -> bool {
        self.normal_form(f).is_zero()
    }

    /// Expresses `f` in the original input generators, if it lies in the
    /// submodule.
    pub fn lift(&self, f: &MPoly) -> Option<Vec<Poly>> {
        let (rem, quot) = self.normal_form_with_quotients(f);
        if !rem.is_zero() {
            return None;
        }
        let mut out = vec![Poly::zero(&self.ring); self.n_inputs];
        for (k, q) in quot.iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            for (t, r) in out.iter_mut().zip(&self.reps[k]) {
                if !r.is_zero() {
                    *t = t.add(&q.mul(r));
                }
            }
        }
        Some(out)
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.is_empty()
    }

    /// Whether the submodule is all of R^rank.
    pub fn is_full_module(&self) -> bool {
        (0..self.rank).all(|i| {
            let mut comps = vec![Poly::zero(&self.ring); self.rank];
            comps[i] = Poly::one(&self.ring);
            self.contains(&MPoly::from_comps(&comps))
        })
    }
}

// ---------------------------------------------------------------------------
// Ideal-level conveniences
// ---------------------------------------------------------------------------

/// Reduced Gröbner basis of the ideal generated by `gens` in their ring.
pub fn groebner_basis(gens: &[Poly]) -> Result<Vec<Poly>> {
    let Some(first) = gens.first() else { return Ok(vec![]) };
    let ring = first.ring.clone();
    for g in gens {
        if !g.ring.same_vars(&ring) || g.ring.order != ring.order {
            return Err(Error::RingMismatch("generators in different rings".into()));
        }
    }
    let mgens: Vec<MPoly> = gens.iter().map(|p| MPoly::from_comps(std::slice::from_ref(p))).collect();
    let gb = module_gb(&ring, 1, &mgens);
    Ok(gb.elements.iter().map(|e| e.to_comps(&ring).pop().unwrap()).collect())
}

/// Remainder of full division of `p` by a Gröbner basis.
pub fn normal_form(p: &Poly, basis: &[Poly]) -> Result<Poly> {
    for g in basis {
        if !g.ring.same_vars(&p.ring) {
            return Err(Error::RingMismatch("basis in a different ring".into()));
        }
    }
    let ring = p.ring.clone();
    let items: Vec<Item> = basis
        .iter()
        .filter(|g| !g.is_zero())
        .map(|g| Item {
            v: MPoly::from_comps(std::slice::from_ref(g)).monic(),
            rep: vec![],
        })
        .collect();
    let (rem, _) = reduce_full(&ring, &items, &MPoly::from_comps(std::slice::from_ref(p)));
    Ok(rem.to_comps(&ring).pop().unwrap())
}

/// Checks the Buchberger criterion: every S-polynomial of the basis reduces
/// to zero against it.
pub fn buchberger_criterion(ring: &Arc<PolyRing>, _rank: usize, basis: &[MPoly]) -> bool {
    let order = ring.order;
    let items: Vec<Item> = basis
        .iter()
        .filter(|b| !b.is_zero())
        .map(|b| Item { v: b.monic(), rep: vec![] })
        .collect();
    for i in 0..items.len() {
        for j in i + 1..items.len() {
            let a = items[i].v.leading().unwrap();
            let b = items[j].v.leading().unwrap();
            if a.pos != b.pos {
                continue;
            }
            let lcm = exp_lcm(&a.exp, &b.exp);
            let s = items[i]
                .v
                .mul_term(&exp_div(&lcm, &a.exp).unwrap(), &Q::one())
                .sub(&items[j].v.mul_term(&exp_div(&lcm, &b.exp).unwrap(), &Q::one()), order);
            let (rem, _) = reduce_full(ring, &items, &s);
            if !rem.is_zero() {
                return false;
            }
        }
    }
    true
}

pub fn ideal_buchberger_criterion(basis: &[Poly]) -> bool {
    let Some(first) = basis.first() else { return true };
    let ring = first.ring.clone();
    let m: Vec<MPoly> = basis.iter().map(|p| MPoly::from_comps(std::slice::from_ref(p))).collect();
    buchberger_criterion(&ring, 1, &m)
}

// ---------------------------------------------------------------------------
// Matrix-level operations
// ---------------------------------------------------------------------------

/// Gröbner basis of the column span of `m` inside R^rows.
pub fn matrix_module_gb(m: &PolyMatrix) -> ModuleGB {
    let gens: Vec<MPoly> = (0..m.cols).map(|j| MPoly::from_comps(&m.col(j))).collect();
    module_gb(&m.ring, m.rows.max(1), &gens)
}

/// Columns of the result generate ker(m); m * syzygies(m) = 0 exactly.
pub fn syzygies(m: &PolyMatrix) -> PolyMatrix {
    let ring = &m.ring;
    let a = m.rows;
    let s = m.cols;
    if s == 0 {
        return PolyMatrix::zero(ring, 0, 0);
    }
    // embed column j as (col_j, e_j) in R^(a+s); POT order makes the first
    // block dominate, so basis elements supported in the tail block are
    // exactly the syzygies
    let gens: Vec<MPoly> = (0..s)
        .map(|j| {
            let mut comps = m.col(j);
            comps.extend((0..s).map(|k| {
                if k == j {
                    Poly::one(ring)
                } else {
                    Poly::zero(ring)
                }
            }));
            MPoly::from_comps(&comps)
        })
        .collect();
    let gb = module_gb(ring, a + s, &gens);
    let mut cols: Vec<Vec<Poly>> = Vec::new();
    for e in &gb.elements {
        if e.terms.iter().all(|t| t.pos >= a) {
            let comps = e.to_comps(ring);
            cols.push(comps[a..].to_vec());
        }
    }
    PolyMatrix::from_cols(ring, s, cols)
}

/// Solves m * U = targets column-by-column; `None` if some column is not in
/// the column span of `m`.
pub fn lift_through(m: &PolyMatrix, targets: &PolyMatrix) -> Option<PolyMatrix> {
    assert_eq!(m.rows, targets.rows);
    let gb = matrix_module_gb(m);
    let mut cols = Vec::with_capacity(targets.cols);
    for j in 0..targets.cols {
        let v = MPoly::from_comps(&targets.col(j));
        let u = gb.lift(&v)?;
        cols.push(u);
    }
    Some(PolyMatrix::from_cols(&m.ring, m.cols, cols))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::q_int;

    fn lexring(vars: &[&str]) -> Arc<PolyRing> {
        PolyRing::new(vars.iter().map(|s| s.to_string()).collect(), MonomialOrder::Lex).unwrap()
    }

    #[test]
    fn coprime_leading_terms_already_reduced() {
        let r = lexring(&["x", "y"]);
        let gens = vec![Poly::parse(&r, "x - 1").unwrap(), Poly::parse(&r, "y - 1").unwrap()];
        let gb = groebner_basis(&gens).unwrap();
        assert_eq!(gb, gens);
    }

    #[test]
    fn empty_input_empty_basis() {
        let gb = groebner_basis(&[]).unwrap();
        assert!(gb.is_empty());
    }

    #[test]
    fn hand_run_buchberger_fixture() {
        // {x^2 - 1, x*y - 1} under lex x > y reduces to {x - y, y^2 - 1}:
        // S(x^2-1, xy-1) = y(x^2-1) - x(xy-1) = x - y, then
        // S(xy-1, x-y) = y^2 - 1, and the two inputs reduce away.
        let r = lexring(&["x", "y"]);
        let gens = vec![Poly::parse(&r, "x^2 - 1").unwrap(), Poly::parse(&r, "x*y - 1").unwrap()];
        let gb = groebner_basis(&gens).unwrap();
        let expect = vec![Poly::parse(&r, "x - y").unwrap(), Poly::parse(&r, "y^2 - 1").unwrap()];
        assert_eq!(gb, expect);
        assert!(ideal_buchberger_criterion(&gb));
    }

    #[test]
    fn normal_form_examples() {
        let r = lexring(&["x", "y"]);
        let basis = vec![Poly::parse(&r, "x - 1").unwrap(), Poly::parse(&r, "y - 1").unwrap()];
        let p = Poly::parse(&r, "x*y - 1").unwrap();
        assert!(normal_form(&p, &basis).unwrap().is_zero());

        let x = Poly::var(&r, 0);
        assert_eq!(normal_form(&x, &[]).unwrap(), x);

        let basis2 = vec![Poly::parse(&r, "x^2 - y").unwrap()];
        let p2 = Poly::parse(&r, "x^2").unwrap();
        assert_eq!(normal_form(&p2, &basis2).unwrap(), Poly::var(&r, 1));
    }

    #[test]
    fn normal_form_independent_of_generator_order() {
        let r = lexring(&["x", "y"]);
        let b1 = vec![Poly::parse(&r, "x - y").unwrap(), Poly::parse(&r, "y^2 - 1").unwrap()];
        let b2: Vec<Poly> = b1.iter().rev().cloned().collect();
        for src in ["x^3*y - x + 2", "x*y^2", "y^5 - x^5"] {
            let p = Poly::parse(&r, src).unwrap();
            assert_eq!(normal_form(&p, &b1).unwrap(), normal_form(&p, &b2).unwrap());
        }
    }

    #[test]
    fn koszul_syzygy() {
        let r = lexring(&["x", "y"]);
        let m = PolyMatrix::from_rows(
            &r,
            vec![vec![Poly::parse(&r, "x - 1").unwrap(), Poly::parse(&r, "y - 1").unwrap()]],
        );
        let s = syzygies(&m);
        assert!(m.mul(&s).is_zero());
        assert!(s.cols >= 1);
        // the Koszul relation (-(y-1), x-1)^t is in the syzygy module
        let target = PolyMatrix::from_cols(
            &r,
            2,
            vec![vec![Poly::parse(&r, "y - 1").unwrap().neg(), Poly::parse(&r, "x - 1").unwrap()]],
        );
        assert!(lift_through(&s, &target).is_some());
    }

    #[test]
    fn identity_has_no_syzygies() {
        let r = lexring(&["x", "y"]);
        let m = PolyMatrix::identity(&r, 2);
        let s = syzygies(&m);
        assert!(s.is_zero() || s.cols == 0);
    }

    #[test]
    fn regular_column_has_no_syzygies() {
        // m = [[x],[y]]: x, y regular, kernel is zero
        let r = lexring(&["x", "y"]);
        let m = PolyMatrix::from_cols(&r, 2, vec![vec![Poly::var(&r, 0), Poly::var(&r, 1)]]);
        let s = syzygies(&m);
        assert_eq!(s.cols, 0);
        // independent check: no nonzero kernel element of degree <= 3 exists
        // (syzygy soundness m * s = 0 is vacuous here); brute-force the
        // monomials of degree <= 3 and verify p*(x,y) = 0 forces p = 0 by
        // checking the product is never zero for single monomials
        for ex in 0..=3u32 {
            for ey in 0..=3 - ex {
                let p = Poly::monomial(&r, vec![ex, ey], q_int(1));
                assert!(!p.mul(&Poly::var(&r, 0)).is_zero());
            }
        }
    }

    #[test]
    fn lift_reports_membership() {
        let r = lexring(&["x", "y"]);
        let m = PolyMatrix::from_rows(
            &r,
            vec![vec![Poly::parse(&r, "x - 1").unwrap(), Poly::parse(&r, "y - 1").unwrap()]],
        );
        let in_ideal = PolyMatrix::from_rows(&r, vec![vec![Poly::parse(&r, "x*y - 1").unwrap()]]);
        let u = lift_through(&m, &in_ideal).unwrap();
        assert_eq!(m.mul(&u), in_ideal);
        let not_in = PolyMatrix::from_rows(&r, vec![vec![Poly::parse(&r, "x").unwrap()]]);
        assert!(lift_through(&m, &not_in).is_none());
    }

    #[test]
    fn buchberger_criterion_detects_non_basis() {
        let r = lexring(&["x", "y"]);
        let not_gb = vec![Poly::parse(&r, "x^2 - 1").unwrap(), Poly::parse(&r, "x*y - 1").unwrap()];
        assert!(!ideal_buchberger_criterion(&not_gb));
    }
}
