//! Supporting functions on codimension and the induced perverse coherent
//! t-structures: membership tests through support profiles, the middle
//! perversity pair m / m-hat, duality exchange, and the codimension-2r
//! diagnostics for the least nonzero degree.

use crate::complex::FreeComplex;
use crate::error::{Error, Result};
use crate::ideal::Codim;
use crate::loci::decompose_translated_subtori;
use crate::torus::CharacterTorus;

/// Integer-valued function of codimension c in 0..=n.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportingFunction {
    pub values: Vec<i64>,
}

impl SupportingFunction {
    pub fn new(values: Vec<i64>) -> Self {
        SupportingFunction { values }
    }

    pub fn n(&self) -> usize {
        self.values.len().saturating_sub(1)
    }

    pub fn at(&self, codim: usize) -> i64 {
        self.values[codim.min(self.n())]
    }

    /// Nondecreasing in codimension.
    pub fn is_supporting(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Dual function c - p(c).
    pub fn dual(&self) -> SupportingFunction {
        SupportingFunction {
            values: self.values.iter().enumerate().map(|(c, p)| c as i64 - p).collect(),
        }
    }
}

/// m(c) = floor(c/2).
pub fn make_m(n: usize) -> SupportingFunction {
    SupportingFunction::new((0..=n).map(|c| (c / 2) as i64).collect())
}

/// m-hat(c) = ceil(c/2).
pub fn make_m_hat(n: usize) -> SupportingFunction {
    SupportingFunction::new((0..=n).map(|c| c.div_ceil(2) as i64).collect())
}

/// p and its dual are both supporting, i.e. increments lie in {0, 1};
/// exactly the pairs defining a bounded t-structure on both sides.
pub fn is_valid_pair(p: &SupportingFunction) -> bool {
    p.is_supporting() && p.dual().is_supporting()
}

/// F in pD^{<=k}: p(codim Supp H^i) >= i - k for all i, with vanishing
/// cohomology passing vacuously.
pub fn in_leq(
    c: &FreeComplex,
    k: i32,
    p: &SupportingFunction,
    torus: Option<&CharacterTorus>,
) -> Result<bool> {
    if !is_valid_pair(p) {
        return Err(Error::PreconditionFailed("supporting function pair invalid".into()));
    }
    let profile = c.support_profile(torus.map(|t| &t.unit_monomial))?;
    for (&i, &(_, codim)) in profile.entries.iter().map(|(d, e)| (d, e)) {
        match codim {
            Codim::Infinity => continue,
            Codim::Finite(cd) => {
                if p.at(cd.max(0) as usize) < i64::from(i - k) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// F in pD^{>=k}, evaluated through duality: dual(F) in p^D^{<=-k} for the
/// dual supporting function.
pub fn in_geq(
    c: &FreeComplex,
    k: i32,
    p: &SupportingFunction,
    torus: Option<&CharacterTorus>,
) -> Result<bool> {
    in_leq(&c.dual(), -k, &p.dual(), torus)
}

/// Heart of the m-structure at k = 0.
pub fn is_m_perverse(c: &FreeComplex, torus: Option<&CharacterTorus>) -> Result<bool> {
    let m = make_m(c.ring.n());
    Ok(in_leq(c, 0, &m, torus)? && in_geq(c, 0, &m, torus)?)
}

/// Diagnostics for the least nonzero cohomological degree r of a complex
/// with F and its dual both in mD^{<=0}: the support there must have
/// codimension exactly 2r.
#[derive(Debug, Clone)]
pub struct SurpriseReport {
    pub r: i32,
    pub codim: Codim,
    pub codim_equals_2r: bool,
    pub equi_certified: bool,
}

pub fn surprise_diagnostics(
    c: &FreeComplex,
    torus: &CharacterTorus,
) -> Result<SurpriseReport> {
    let m = make_m(c.ring.n());
    if !in_leq(c, 0, &m, Some(torus))? || !in_leq(&c.dual(), 0, &m, Some(torus))? {
        return Err(Error::PreconditionFailed(
            "complex and its dual must both lie in mD^{<=0}".into(),
        ));
    }
    let profile = c.support_profile(Some(&torus.unit_monomial))?;
    let r = profile
        .entries
        .iter()
        .find(|(_, (_, cd))| *cd != Codim::Infinity)
        .map(|(&d, _)| d)
        .ok_or_else(|| Error::PreconditionFailed("complex has no cohomology".into()))?;
    let codim = profile.codim(r);
    let codim_equals_2r = codim == Codim::Finite(2 * i64::from(r));
    // equidimensionality via the subtorus decomposer on each support
    // component of H^r
    let h = c.cohomology_module(r);
    let mut equi_certified = true;
    for comp in h.annihilator_components()? {
        let sat = crate::torus::saturate_at_units(&comp, torus)?;
        if sat.is_unit_ideal()? {
            continue;
        }
        let rep = decompose_translated_subtori(&sat, torus)?;
        let all_match = rep.certified
            && rep
                .subtori
                .iter()
                .all(|s| s.basis.len() as i64 == 2 * i64::from(r));
        if !all_match {
            equi_certified = false;
        }
    }
    Ok(SurpriseReport { r, codim, codim_equals_2r, equi_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::QMatrix;
    use crate::poly::MonomialOrder;
    use crate::torus::CharacterPoint;
    use crate::transform::{mellin_transform, LocalSystemObject};

    fn torus(g: usize) -> CharacterTorus {
        CharacterTorus::new(g, MonomialOrder::GrevLex).unwrap()
    }

    fn perverse_constant(g: usize) -> (CharacterTorus, FreeComplex) {
        let t = torus(g);
        let emb = (0..2 * g)
            .map(|i| (0..2 * g).map(|j| i64::from(i == j)).collect())
            .collect();
        let obj = LocalSystemObject::new(
            t.clone(),
            g,
            emb,
            vec![QMatrix::identity(1); 2 * g],
            CharacterPoint::trivial(2 * g),
            g as i32,
        )
        .unwrap();
        let c = mellin_transform(&obj).unwrap();
        (t, c)
    }

    #[test]
    fn middle_perversity_tables() {
        assert_eq!(make_m(4).values, vec![0, 0, 1, 1, 2]);
        assert_eq!(make_m_hat(4).values, vec![0, 1, 1, 2, 2]);
        assert_eq!(make_m(0).values, vec![0]);
        assert_eq!(make_m_hat(0).values, vec![0]);
        assert_eq!(make_m(4).dual(), make_m_hat(4));
        assert_eq!(make_m_hat(4).dual(), make_m(4));
    }

    #[test]
    fn validity_examples() {
        assert!(is_valid_pair(&make_m(6)));
        assert!(is_valid_pair(&make_m_hat(6)));
        assert!(is_valid_pair(&SupportingFunction::new(vec![0; 5])));
        assert!(!is_valid_pair(&SupportingFunction::new(vec![0, 2, 2, 2, 2])));
        // decreasing is not supporting
        assert!(!is_valid_pair(&SupportingFunction::new(vec![1, 0, 0])));
    }

    #[test]
    fn leq_examples() {
        let (t, c) = perverse_constant(1);
        let m = make_m(2);
        assert!(in_leq(&c, 0, &m, Some(&t)).unwrap());
        // shifted into degrees 0..2: H^2 has codim 2 < 4
        let bad = c.shift(-1);
        assert!(!in_leq(&bad, 0, &m, Some(&t)).unwrap());
        let zero = FreeComplex::zero(&t.ring);
        assert!(in_leq(&zero, -5, &m, Some(&t)).unwrap());
    }

    #[test]
    fn geq_examples() {
        let (t, c) = perverse_constant(1);
        let m = make_m(2);
        assert!(in_geq(&c, 0, &m, Some(&t)).unwrap());
        let low = FreeComplex::concentrated(&t.ring, -1, 1);
        assert!(!in_geq(&low, 0, &m, Some(&t)).unwrap());
        assert!(in_geq(&FreeComplex::zero(&t.ring), 0, &m, Some(&t)).unwrap());
    }

    #[test]
    fn m_perverse_examples() {
        let (t, c) = perverse_constant(1);
        assert!(is_m_perverse(&c, Some(&t)).unwrap());
        assert!(!is_m_perverse(&c.shift(1), Some(&t)).unwrap());
        let sky = FreeComplex::concentrated(&t.ring, 0, 2);
        assert!(is_m_perverse(&sky, Some(&t)).unwrap());
    }

    #[test]
    fn zero_function_is_standard_t_structure() {
        let (t, c) = perverse_constant(1);
        let p0 = SupportingFunction::new(vec![0; 3]);
        // cohomology lives in degree 1 only
        assert!(in_leq(&c, 1, &p0, Some(&t)).unwrap());
        assert!(!in_leq(&c, 0, &p0, Some(&t)).unwrap());
        assert!(in_geq(&c, 1, &p0, Some(&t)).unwrap());
        assert!(!in_geq(&c, 2, &p0, Some(&t)).unwrap());
    }

    #[test]
    fn duality_exchange() {
        let (t, c) = perverse_constant(1);
        let m = make_m(2);
        let mh = make_m_hat(2);
        for k in -1..=2 {
            for (cpx, name) in [(&c, "c"), (&c.shift(1), "shifted")] {
                let lhs = in_leq(cpx, k, &m, Some(&t)).unwrap();
                let rhs = in_geq(&cpx.dual(), -k, &mh, Some(&t)).unwrap();
                assert_eq!(lhs, rhs, "k={} {}", k, name);
            }
        }
    }

    #[test]
    fn geq_zero_forces_nonnegative_cohomology() {
        let (t, c) = perverse_constant(1);
        let m = make_m(2);
        if in_geq(&c, 0, &m, Some(&t)).unwrap() {
            for d in c.lo..0 {
                assert!(c.cohomology_module(d).is_zero_module());
            }
        }
    }

    #[test]
    fn surprise_constant_sheaf() {
        let (t, c) = perverse_constant(1);
        let rep = surprise_diagnostics(&c, &t).unwrap();
        assert_eq!(rep.r, 1);
        assert_eq!(rep.codim, Codim::Finite(2));
        assert!(rep.codim_equals_2r);
        assert!(rep.equi_certified);
    }

    #[test]
    fn surprise_skyscraper() {
        let t = torus(1);
        let sky = FreeComplex::concentrated(&t.ring, 0, 1);
        let rep = surprise_diagnostics(&sky, &t).unwrap();
        assert_eq!(rep.r, 0);
        assert_eq!(rep.codim, Codim::Finite(0));
        assert!(rep.codim_equals_2r);
    }

    #[test]
    fn surprise_subtorus_pushforward() {
        // g = 2, local system on the 2-dimensional subtorus spanned by
        // e1, e2, trivial monodromy, perverse shift s = 1
        let t = torus(2);
        let obj = LocalSystemObject::new(
            t.clone(),
            1,
            vec![vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 0]],
            vec![QMatrix::identity(1); 2],
            CharacterPoint::trivial(4),
            1,
        )
        .unwrap();
        let c = mellin_transform(&obj).unwrap();
        let rep = surprise_diagnostics(&c, &t).unwrap();
        assert_eq!(rep.r, 1);
        assert_eq!(rep.codim, Codim::Finite(2));
        assert!(rep.codim_equals_2r);
        assert!(rep.equi_certified);
    }

    #[test]
    fn surprise_precondition() {
        let t = torus(1);
        let low = FreeComplex::concentrated(&t.ring, -2, 1);
        assert!(matches!(
            surprise_diagnostics(&low, &t),
            Err(Error::PreconditionFailed(_))
        ));
    }
}
