//! Cohomology jump loci of free complexes over the character torus:
//! minor-ideal presentations, point-sampling cross-checks, decomposition
//! into translated subtori, and radical-level verification.

use crate::complex::FreeComplex;
use crate::error::Result;
use crate::ideal::{minors_ideal, Ideal};
use crate::matrix::QMatrix;
use crate::poly::{Poly, PolyRing, Q};
use crate::torus::{
    saturate_at_units, smith_normal_form, subtorus_ideal, torsion_check, CharacterPoint,
    CharacterTorus, TranslatedSubtorus,
};
use num::{BigInt, One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// S_m^k as a finite union of component ideals, one per split of the rank
/// conditions between the two neighboring differentials.
#[derive(Debug, Clone)]
pub struct JumpLocus {
    pub k: i32,
    pub m: usize,
    pub components: Vec<Ideal>,
}

impl JumpLocus {
    /// Single ideal cutting out the same closed set: intersection of the
    /// components (unit ideal when the locus is empty).
    pub fn flatten(&self, ring: &Arc<PolyRing>) -> Result<Ideal> {
        let mut acc: Option<Ideal> = None;
        for c in &self.components {
            acc = Some(match acc {
                None => c.clone(),
                Some(prev) => prev.intersection(c)?,
            });
        }
        Ok(acc.unwrap_or_else(|| Ideal::unit(ring)))
    }
}

/// {rho : dim H^k(c tensor kappa(rho)) >= m} via vanishing of minors: the
/// component for index i imposes rank d^k <= ranks[k] - m - i together with
/// rank d^{k-1} <= i.
pub fn jump_locus(
    c: &FreeComplex,
    k: i32,
    m: usize,
    torus: &CharacterTorus,
) -> Result<JumpLocus> {
    assert!(m >= 1, "multiplicity must be at least 1");
    let f = c.diff(k - 1);
    let g = c.diff(k);
    let a = c.rank(k - 1);
    let b = c.rank(k);
    let mut components = Vec::new();
    for i in 0..=a {
        let needed = b as i64 - m as i64 - i as i64 + 1;
        if needed <= 0 {
            continue; // rank condition unsatisfiable: empty component
        }
        let from_g = minors_ideal(&g, needed as usize);
        let from_f = minors_ideal(&f, i + 1);
        let comp = saturate_at_units(&from_g.sum(&from_f)?, torus)?;
        if comp.is_unit_ideal()? {
            continue;
        }
        components.push(comp);
    }
    Ok(JumpLocus { k, m, components })
}

pub fn locus_membership(rho: &CharacterPoint, locus: &JumpLocus) -> bool {
    locus.components.iter().any(|c| c.vanishes_at(&rho.coords))
}

/// Deterministic seeded sampling report comparing locus membership with the
/// fiber-dimension oracle.
#[derive(Debug, Clone)]
pub struct SampleReport {
    pub seed: u64,
    pub samples: usize,
    pub mismatches: Vec<Vec<Q>>,
}

impl SampleReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Base sampling palette; callers extend it with twist coordinates and
/// monodromy eigenvalues of their inputs.
pub fn base_palette() -> Vec<Q> {
    [
        (1, 1),
        (-1, 1),
        (2, 1),
        (-2, 1),
        (3, 1),
        (-3, 1),
        (1, 2),
        (-1, 2),
        (1, 3),
        (-1, 3),
        (5, 1),
        (-5, 1),
    ]
    .into_iter()
    .map(|(p, q)| crate::poly::q_ratio(p, q))
    .collect()
}

pub fn sample_points(
    n: usize,
    samples: usize,
    seed: u64,
    extra_values: &[Q],
) -> Vec<CharacterPoint> {
    let mut palette = base_palette();
    for v in extra_values {
        if !v.is_zero() && !palette.contains(v) {
            palette.push(v.clone());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let coords: Vec<Q> = (0..n)
                .map(|_| palette[rng.gen_range(0..palette.len())].clone())
                .collect();
            CharacterPoint { coords }
        })
        .collect()
}

pub fn sampled_oracle_check(
    c: &FreeComplex,
    k: i32,
    m: usize,
    torus: &CharacterTorus,
    samples: usize,
    seed: u64,
    extra_values: &[Q],
) -> Result<SampleReport> {
    let locus = jump_locus(c, k, m, torus)?;
    let mut mismatches = Vec::new();
    for rho in sample_points(torus.n(), samples, seed, extra_values) {
        let member = locus_membership(&rho, &locus);
        let dim = c.derived_fiber(&rho.coords).get(&k).copied().unwrap_or(0);
        if member != (dim >= m) {
            mismatches.push(rho.coords.clone());
        }
    }
    Ok(SampleReport { seed, samples, mismatches })
}

/// Result of the binomial decomposition: when certified, the union of the
/// reported (possibly non-primitive) translated subtori equals V(input) up
/// to radical.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub input: Ideal,
    pub subtori: Vec<TranslatedSubtorus>,
    pub certified: bool,
    pub arithmetic: bool,
}

/// Certificate-producing decomposition: succeeds when the reduced Gröbner
/// basis consists of twisted binomials c1*x^a - c2*x^b; the exponent
/// lattice is put in Smith normal form to produce one translated-subtorus
/// description (non-primitive bases encode finite unions of parallel
/// cosets). Non-binomial bases yield certified = false.
pub fn decompose_translated_subtori(
    i: &Ideal,
    torus: &CharacterTorus,
) -> Result<DecompositionReport> {
    let sat = saturate_at_units(i, torus)?;
    let gb = sat.gb()?;
    let n = torus.n();
    let fail = |input: Ideal| DecompositionReport {
        input,
        subtori: vec![],
        certified: false,
        arithmetic: false,
    };
    if gb.is_empty() {
        // zero ideal: the whole torus
        let whole = TranslatedSubtorus::new(n, vec![], vec![])?;
        return Ok(DecompositionReport { input: sat, subtori: vec![whole], certified: true, arithmetic: true });
    }
    if sat.is_unit_ideal()? {
        // empty locus: union of no subtori
        return Ok(DecompositionReport { input: sat, subtori: vec![], certified: true, arithmetic: true });
    }
    // extract one relation x^{a-b} = c2/c1 per basis element
    let mut rows: Vec<Vec<i64>> = Vec::new();
    let mut values: Vec<Q> = Vec::new();
    for p in &gb {
        if p.terms.len() != 2 {
            return Ok(fail(sat));
        }
        let (ea, ca) = &p.terms[0];
        let (eb, cb) = &p.terms[1];
        let w: Vec<i64> = (0..n).map(|t| ea[t] as i64 - eb[t] as i64).collect();
        rows.push(w);
        values.push(-(cb / ca));
    }
    // Smith normal form of the exponent lattice: U*W*V = D, so the rows of
    // U*W generate the same lattice with diagonal structure
    let (u, d, _) = smith_normal_form(&rows);
    let r = rows.len();
    let mut basis = Vec::new();
    let mut vals = Vec::new();
    for irow in 0..r {
        let new_row: Vec<i64> = (0..n)
            .map(|t| (0..r).map(|j| u[irow][j] * rows[j][t]).sum())
            .collect();
        let mut val = Q::one();
        for j in 0..r {
            val *= pow_q(&values[j], u[irow][j]);
        }
        if new_row.iter().all(|&e| e == 0) {
            if !val.is_one() {
                // inconsistent relations: the saturated locus is empty but
                // the basis did not show it; refuse to certify
                return Ok(fail(sat));
            }
            continue;
        }
        basis.push(new_row);
        vals.push(val);
    }
    let _ = d;
    let sub = TranslatedSubtorus::new(n, basis, vals)?;
    let arithmetic = torsion_check(&sub, 2);
    let subtori = vec![sub];
    let certified = verify_decomposition(&sat, &subtori, torus)?;
    Ok(DecompositionReport { input: sat, subtori, certified, arithmetic })
}

fn pow_q(c: &Q, e: i64) -> Q {
    let mut out = Q::one();
    for _ in 0..e.abs() {
        out *= c;
    }
    if e < 0 {
        Q::one() / out
    } else {
        out
    }
}

/// Radical equality of V(i) with the union of the candidate subtori:
/// two-sided radical membership of generators after unit saturation.
pub fn verify_decomposition(
    i: &Ideal,
    candidates: &[TranslatedSubtorus],
    torus: &CharacterTorus,
) -> Result<bool> {
    let sat = saturate_at_units(i, torus)?;
    let mut union: Option<Ideal> = None;
    for t in candidates {
        let ti = subtorus_ideal(torus, t)?;
        union = Some(match union {
            None => ti,
            Some(prev) => prev.intersection(&ti)?,
        });
    }
    let union = union.unwrap_or_else(|| Ideal::unit(&torus.ring));
    for g in &union.generators {
        if !sat.radical_membership(g)? {
            return Ok(false);
        }
    }
    for g in &sat.generators {
        if !union.radical_membership(g)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Decomposition of a whole locus: candidates are gathered per component
/// (components are cheaper and often binomial even when their intersection
/// is not) and the union is certified against the flattened ideal.
pub fn decompose_locus(locus: &JumpLocus, torus: &CharacterTorus) -> Result<DecompositionReport> {
    let sat = saturate_at_units(&locus.flatten(&torus.ring)?, torus)?;
    let mut subtori: Vec<TranslatedSubtorus> = Vec::new();
    for comp in &locus.components {
        let dec = decompose_translated_subtori(comp, torus)?;
        if dec.certified {
            for s in dec.subtori {
                if !subtori.contains(&s) {
                    subtori.push(s);
                }
            }
        }
    }
    let certified = verify_decomposition(&sat, &subtori, torus)?;
    let arithmetic = subtori.iter().all(|s| torsion_check(s, 2));
    Ok(DecompositionReport { input: sat, subtori, certified, arithmetic })
}

/// Rational eigenvalues of an exact rational matrix, via the characteristic
/// polynomial and rational root search. Used to seed sampling palettes.
pub fn rational_eigenvalues(m: &QMatrix) -> Vec<Q> {
    assert_eq!(m.rows, m.cols);
    let ring = PolyRing::new(vec!["t".into()], crate::poly::MonomialOrder::Lex).unwrap();
    let t = Poly::var(&ring, 0);
    let mut pm = crate::matrix::PolyMatrix::zero(&ring, m.rows, m.cols);
    for i in 0..m.rows {
        for j in 0..m.cols {
            let mut p = Poly::constant(&ring, m.get(i, j).clone());
            if i == j {
                p = p.sub(&t);
            }
            pm.set(i, j, p);
        }
    }
    let charpoly = pm.det();
    if charpoly.is_zero() {
        return vec![];
    }
    // integer coefficients after clearing denominators
    let denom_lcm = charpoly
        .terms
        .iter()
        .fold(BigInt::one(), |acc, (_, c)| lcm(&acc, c.denom()));
    let coef_of = |deg: u32| -> BigInt {
        charpoly
            .terms
            .iter()
            .find(|(e, _)| e[0] == deg)
            .map(|(_, c)| c.numer() * (&denom_lcm / c.denom()))
            .unwrap_or_else(BigInt::zero)
    };
    let top = charpoly.total_degree().unwrap_or(0) as u32;
    // lowest nonzero coefficient (zero roots are impossible for our
    // invertible inputs but handled anyway)
    let mut low = 0;
    while low <= top && coef_of(low).is_zero() {
        low += 1;
    }
    let a0 = coef_of(low);
    let alead = coef_of(top);
    let mut out = Vec::new();
    for p in divisors(&a0) {
        for q in divisors(&alead) {
            for sign in [1i64, -1] {
                let cand = Q::new(BigInt::from(sign) * &p, q.clone());
                if charpoly.eval(std::slice::from_ref(&cand)).is_zero()
                    && !out.contains(&cand)
                {
                    out.push(cand);
                }
            }
        }
    }
    out.sort();
    out
}

fn lcm(a: &BigInt, b: &BigInt) -> BigInt {
    (a * b).abs() / num::Integer::gcd(a, b)
}

fn divisors(v: &BigInt) -> Vec<BigInt> {
    let v = v.abs();
    if v.is_zero() {
        return vec![BigInt::one()];
    }
    let mut out = Vec::new();
    let mut d = BigInt::one();
    while &d * &d <= v {
        if (&v % &d).is_zero() {
            out.push(d.clone());
            out.push(&v / &d);
        }
        d += 1;
    }
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q_int, q_ratio, MonomialOrder};
    use crate::torus::CharacterPoint;
    use crate::transform::{mellin_transform, LocalSystemObject};

    fn torus(g: usize) -> CharacterTorus {
        CharacterTorus::new(g, MonomialOrder::GrevLex).unwrap()
    }

    fn constant_sheaf_complex(t: &CharacterTorus) -> FreeComplex {
        let obj = LocalSystemObject::new(
            t.clone(),
            1,
            vec![vec![1, 0], vec![0, 1]],
            vec![QMatrix::identity(1), QMatrix::identity(1)],
            CharacterPoint::trivial(2),
            1,
        )
        .unwrap();
        mellin_transform(&obj).unwrap()
    }

    #[test]
    fn jump_locus_of_constant_sheaf() {
        let t = torus(1);
        let c = constant_sheaf_complex(&t);
        let l = jump_locus(&c, 0, 1, &t).unwrap();
        assert!(!l.components.is_empty());
        let point = TranslatedSubtorus::new(2, vec![vec![1, 0], vec![0, 1]], vec![q_int(1); 2]).unwrap();
        let flat = l.flatten(&t.ring).unwrap();
        assert!(verify_decomposition(&flat, &[point], &t).unwrap());
        // multiplicity beyond the maximum fiber dimension: empty
        let l3 = jump_locus(&c, 0, 3, &t).unwrap();
        assert!(l3.components.is_empty());
    }

    #[test]
    fn jump_locus_of_skyscraper_is_everything() {
        let t = torus(1);
        let c = FreeComplex::concentrated(&t.ring, 0, 3);
        let l = jump_locus(&c, 0, 3, &t).unwrap();
        assert!(l.components.iter().any(|i| i.generators.is_empty()));
        let rho = CharacterPoint::new(vec![q_int(7), q_ratio(2, 3)]).unwrap();
        assert!(locus_membership(&rho, &l));
        assert!(jump_locus(&c, 0, 4, &t).unwrap().components.is_empty());
    }

    #[test]
    fn membership_examples() {
        let t = torus(1);
        let c = constant_sheaf_complex(&t);
        let l = jump_locus(&c, 0, 1, &t).unwrap();
        assert!(locus_membership(&CharacterPoint::trivial(2), &l));
        let off = CharacterPoint::new(vec![q_int(2), q_int(1)]).unwrap();
        assert!(!locus_membership(&off, &l));
    }

    #[test]
    fn sampling_oracle_agrees() {
        let t = torus(1);
        let c = constant_sheaf_complex(&t);
        for k in -1..=1 {
            for m in 1..=2 {
                let rep = sampled_oracle_check(&c, k, m, &t, 50, 42, &[]).unwrap();
                assert!(rep.ok(), "k={} m={}", k, m);
            }
        }
        let sky = FreeComplex::concentrated(&t.ring, 0, 2);
        let rep = sampled_oracle_check(&sky, 0, 2, &t, 30, 7, &[]).unwrap();
        assert!(rep.ok());
    }

    #[test]
    fn twist_translates_the_locus() {
        let t = torus(1);
        let c = constant_sheaf_complex(&t);
        let rho0 = CharacterPoint::new(vec![q_int(2), q_int(3)]).unwrap();
        let tw = c.twist(&rho0.coords).unwrap();
        let l = jump_locus(&c, 0, 1, &t).unwrap();
        let lt = jump_locus(&tw, 0, 1, &t).unwrap();
        for rho in sample_points(2, 40, 11, &rho0.coords) {
            let shifted = CharacterPoint::new(
                rho.coords.iter().zip(&rho0.coords).map(|(a, b)| a * b).collect(),
            )
            .unwrap();
            assert_eq!(locus_membership(&rho, &lt), locus_membership(&shifted, &l));
        }
    }

    #[test]
    fn monotonicity_in_m() {
        let t = torus(1);
        let c = constant_sheaf_complex(&t);
        let l1 = jump_locus(&c, 0, 1, &t).unwrap();
        let l2 = jump_locus(&c, 0, 2, &t).unwrap();
        for rho in sample_points(2, 40, 3, &[]) {
            if locus_membership(&rho, &l2) {
                assert!(locus_membership(&rho, &l1));
            }
        }
    }

    #[test]
    fn decomposition_examples() {
        let t = torus(1);
        let parse = |s: &str| Poly::parse(&t.ring, s).unwrap();

        let i = Ideal::new(&t.ring, vec![parse("x1 - 1"), parse("x2 - 1")]).unwrap();
        let rep = decompose_translated_subtori(&i, &t).unwrap();
        assert!(rep.certified && rep.arithmetic);
        assert_eq!(rep.subtori.len(), 1);
        assert_eq!(rep.subtori[0].dim(), 0);
        assert!(rep.subtori[0].is_primitive());
        assert!(rep.subtori[0].contains(&CharacterPoint::trivial(2)));

        let i = Ideal::new(&t.ring, vec![parse("2*x1 - 1")]).unwrap();
        let rep = decompose_translated_subtori(&i, &t).unwrap();
        assert!(rep.certified && !rep.arithmetic);
        assert_eq!(rep.subtori[0].basis, vec![vec![1, 0]]);
        assert_eq!(rep.subtori[0].values, vec![q_ratio(1, 2)]);

        let i = Ideal::new(&t.ring, vec![parse("x1*x2 - 1")]).unwrap();
        let rep = decompose_translated_subtori(&i, &t).unwrap();
        assert!(rep.certified && rep.arithmetic);
        assert_eq!(rep.subtori[0].basis, vec![vec![1, 1]]);
        assert_eq!(rep.subtori[0].values, vec![q_int(1)]);

        // non-primitive: two cosets reported as one doubled subtorus
        let i = Ideal::new(&t.ring, vec![parse("x1^2 - 1")]).unwrap();
        let rep = decompose_translated_subtori(&i, &t).unwrap();
        assert!(rep.certified);
        assert!(!rep.subtori[0].is_primitive());

        // non-binomial: refused, not mis-certified
        let i = Ideal::new(&t.ring, vec![parse("x1 + x2 - 3")]).unwrap();
        let rep = decompose_translated_subtori(&i, &t).unwrap();
        assert!(!rep.certified);
        assert!(rep.subtori.is_empty());
    }

    #[test]
    fn verification_examples() {
        let t = torus(1);
        let parse = |s: &str| Poly::parse(&t.ring, s).unwrap();
        let point = TranslatedSubtorus::new(2, vec![vec![1, 0], vec![0, 1]], vec![q_int(1); 2]).unwrap();

        let i = Ideal::new(&t.ring, vec![parse("x1 - 1"), parse("x2 - 1")]).unwrap();
        assert!(verify_decomposition(&i, &[point.clone()], &t).unwrap());

        let line = Ideal::new(&t.ring, vec![parse("x1 - 1")]).unwrap();
        assert!(!verify_decomposition(&line, &[point], &t).unwrap());

        let pair = Ideal::new(&t.ring, vec![parse("x1^2 - 1")]).unwrap();
        let plus = TranslatedSubtorus::new(2, vec![vec![1, 0]], vec![q_int(1)]).unwrap();
        let minus = TranslatedSubtorus::new(2, vec![vec![1, 0]], vec![q_int(-1)]).unwrap();
        assert!(verify_decomposition(&pair, &[plus, minus], &t).unwrap());
    }

    #[test]
    fn eigenvalue_extraction() {
        let m = QMatrix::from_rows(vec![
            vec![q_int(2), q_int(0)],
            vec![q_int(1), q_ratio(1, 3)],
        ]);
        assert_eq!(rational_eigenvalues(&m), vec![q_ratio(1, 3), q_int(2)]);
        // rotation-like matrix with no rational eigenvalues
        let r = QMatrix::from_rows(vec![
            vec![q_int(0), q_int(-1)],
            vec![q_int(1), q_int(0)],
        ]);
        assert!(rational_eigenvalues(&r).is_empty());
    }
}
