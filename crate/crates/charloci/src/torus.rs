//! The character torus Char(A) = Spec C[Z^{2g}] in the saturated
//! polynomial-ring model: character points, translated subtori and their
//! ideals, torsion detection, lattice surjections and the induced
//! restriction of coordinates, plus integer Smith normal form.

use crate::error::{Error, Result};
use crate::ideal::Ideal;
use crate::matrix::QMatrix;
use crate::poly::{q_int, Exp, Poly, PolyRing, Q};
use num::{One, Zero};
use std::sync::Arc;

/// Char(A) for an abelian variety of dimension g: a torus of rank n = 2g,
/// coordinatized by a polynomial ring with the units x1*...*xn inverted on
/// demand (saturation).
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterTorus {
    pub g: usize,
    pub ring: Arc<PolyRing>,
    pub unit_monomial: Poly,
}

impl CharacterTorus {
    pub fn new(g: usize, order: crate::poly::MonomialOrder) -> Result<Self> {
        if g == 0 {
            return Err(Error::TorusMismatch("need g >= 1".into()));
        }
        let ring = PolyRing::standard(2 * g, order);
        Ok(Self::on_ring(g, &ring))
    }

    pub fn on_ring(g: usize, ring: &Arc<PolyRing>) -> Self {
        assert_eq!(ring.n(), 2 * g);
        let exp: Exp = vec![1; 2 * g];
        let unit_monomial = Poly::monomial(ring, exp, Q::one());
        CharacterTorus { g, ring: ring.clone(), unit_monomial }
    }

    pub fn n(&self) -> usize {
        2 * self.g
    }
}

/// A rational point of the torus: all coordinates nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct CharacterPoint {
    pub coords: Vec<Q>,
}

impl CharacterPoint {
    pub fn new(coords: Vec<Q>) -> Result<Self> {
        if coords.iter().any(|c| c.is_zero()) {
            return Err(Error::ZeroValue);
        }
        Ok(CharacterPoint { coords })
    }

    pub fn trivial(n: usize) -> Self {
        CharacterPoint { coords: vec![Q::one(); n] }
    }

    pub fn inverse(&self) -> CharacterPoint {
        CharacterPoint { coords: self.coords.iter().map(|c| Q::one() / c).collect() }
    }

    /// rho^v for an integer exponent vector.
    pub fn pow(&self, v: &[i64]) -> Q {
        let mut out = Q::one();
        for (c, &e) in self.coords.iter().zip(v) {
            if e >= 0 {
                for _ in 0..e {
                    out *= c;
                }
            } else {
                for _ in 0..(-e) {
                    out /= c;
                }
            }
        }
        out
    }
}

/// Locus {x : x^{b_j} = c_j}: a coset of a subtorus when the basis is
/// primitive, a finite union of cosets otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslatedSubtorus {
    pub n: usize,
    pub basis: Vec<Vec<i64>>,
    pub values: Vec<Q>,
}

impl TranslatedSubtorus {
    pub fn new(n: usize, basis: Vec<Vec<i64>>, values: Vec<Q>) -> Result<Self> {
        if basis.len() != values.len() {
            return Err(Error::InvalidInput("basis/values length mismatch".into()));
        }
        if basis.iter().any(|b| b.len() != n) {
            return Err(Error::InvalidInput("basis vector of wrong length".into()));
        }
        if values.iter().any(|c| c.is_zero()) {
            return Err(Error::ZeroValue);
        }
        let rows: Vec<Vec<Q>> =
            basis.iter().map(|b| b.iter().map(|&e| q_int(e)).collect()).collect();
        if !basis.is_empty() && QMatrix::from_rows(rows).rank() != basis.len() {
            return Err(Error::InvalidInput("basis vectors are linearly dependent".into()));
        }
        Ok(TranslatedSubtorus { n, basis, values })
    }

    pub fn dim(&self) -> usize {
        self.n - self.basis.len()
    }

    pub fn contains(&self, rho: &CharacterPoint) -> bool {
        self.basis
            .iter()
            .zip(&self.values)
            .all(|(b, c)| &rho.pow(b) == c)
    }

    /// Primitive iff the basis extends to a lattice basis: Smith form has
    /// all elementary divisors 1.
    pub fn is_primitive(&self) -> bool {
        if self.basis.is_empty() {
            return true;
        }
        let (_, d, _) = smith_normal_form(&self.basis);
        (0..self.basis.len()).all(|i| d[i][i] == 1)
    }
}

/// x^{b+} - c * x^{b-} per basis vector, saturated at the units.
pub fn subtorus_ideal(torus: &CharacterTorus, t: &TranslatedSubtorus) -> Result<Ideal> {
    if t.n != torus.n() {
        return Err(Error::TorusMismatch("subtorus rank mismatch".into()));
    }
    let ring = &torus.ring;
    let mut gens = Vec::new();
    for (b, c) in t.basis.iter().zip(&t.values) {
        let plus: Exp = b.iter().map(|&e| if e > 0 { e as u32 } else { 0 }).collect();
        let minus: Exp = b.iter().map(|&e| if e < 0 { (-e) as u32 } else { 0 }).collect();
        let lhs = Poly::monomial(ring, plus, Q::one());
        let rhs = Poly::monomial(ring, minus, c.clone());
        gens.push(lhs.sub(&rhs));
    }
    let ideal = Ideal::new(ring, gens)?;
    saturate_at_units(&ideal, torus)
}

/// True iff every character value is a root of unity of order at most
/// max_order; over the rationals that means 1, or -1 when max_order >= 2.
pub fn torsion_check(t: &TranslatedSubtorus, max_order: usize) -> bool {
    t.values.iter().all(|c| {
        if c.is_one() {
            return true;
        }
        max_order >= 2 && (-c).is_one()
    })
}

/// Saturation at x1*...*xn: the ideal of the closure of the torus part.
pub fn saturate_at_units(i: &Ideal, torus: &CharacterTorus) -> Result<Ideal> {
    if !i.ring.same_vars(&torus.ring) {
        return Err(Error::RingMismatch("ideal not on the torus ring".into()));
    }
    i.saturation(&torus.unit_monomial)
}

/// Surjection Z^{2 source_g} ->> Z^{2 target_g} (columns are images of the
/// source basis vectors); induces a closed embedding of character tori.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeSurjection {
    pub source_g: usize,
    pub target_g: usize,
    pub matrix: Vec<Vec<i64>>,
}

impl LatticeSurjection {
    pub fn new(source_g: usize, target_g: usize, matrix: Vec<Vec<i64>>) -> Result<Self> {
        let rows = 2 * target_g;
        let cols = 2 * source_g;
        if matrix.len() != rows || matrix.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("lattice matrix has wrong shape".into()));
        }
        let (_, d, _) = smith_normal_form(&matrix);
        let surjective = (0..rows).all(|i| i < cols && d[i][i].abs() == 1);
        if !surjective {
            return Err(Error::NotSurjective);
        }
        Ok(LatticeSurjection { source_g, target_g, matrix })
    }

    /// Image of the i-th source basis vector: column i.
    pub fn image_of(&self, i: usize) -> Vec<i64> {
        self.matrix.iter().map(|row| row[i]).collect()
    }
}

/// Substitution x_i -> y^{f(e_i)} realizing the restriction of a complex on
/// Char(source) to the embedded Char(target).
#[derive(Debug, Clone)]
pub struct RestrictionMap {
    pub target_ring: Arc<PolyRing>,
    pub f: LatticeSurjection,
}

pub fn restriction_substitution(f: &LatticeSurjection, order: crate::poly::MonomialOrder) -> RestrictionMap {
    let target_ring = PolyRing::standard(2 * f.target_g, order);
    RestrictionMap { target_ring, f: f.clone() }
}

impl RestrictionMap {
    /// Applies the substitution; negative exponents are cleared by one
    /// global monomial shift, returned as the exponent vector of the unit
    /// factor: image of p = y^{shift} * result.
    pub fn apply(&self, p: &Poly) -> (Poly, Vec<i64>) {
        let m = 2 * self.f.target_g;
        if p.is_zero() {
            return (Poly::zero(&self.target_ring), vec![0; m]);
        }
        let images: Vec<Vec<i64>> = (0..2 * self.f.source_g).map(|i| self.f.image_of(i)).collect();
        let mut raw: Vec<(Vec<i64>, Q)> = Vec::new();
        for (exp, c) in &p.terms {
            let mut w = vec![0i64; m];
            for (i, &e) in exp.iter().enumerate() {
                for t in 0..m {
                    w[t] += images[i][t] * e as i64;
                }
            }
            raw.push((w, c.clone()));
        }
        let mut shift = vec![0i64; m];
        for t in 0..m {
            shift[t] = raw.iter().map(|(w, _)| w[t]).min().unwrap().min(0);
        }
        let terms: Vec<(Exp, Q)> = raw
            .into_iter()
            .map(|(w, c)| {
                let e: Exp = (0..m).map(|t| (w[t] - shift[t]) as u32).collect();
                (e, c)
            })
            .collect();
        (Poly::from_terms(&self.target_ring, terms), shift)
    }
}

/// Smith normal form over Z: returns (u, d, v) with u * a * v = d, u and v
/// unimodular, d diagonal with d_i dividing d_{i+1}, entries nonnegative.
pub fn smith_normal_form(a: &[Vec<i64>]) -> (Vec<Vec<i64>>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut d: Vec<Vec<i64>> = a.to_vec();
    let mut u: Vec<Vec<i64>> = (0..rows)
        .map(|i| (0..rows).map(|j| i64::from(i == j)).collect())
        .collect();
    let mut v: Vec<Vec<i64>> = (0..cols)
        .map(|i| (0..cols).map(|j| i64::from(i == j)).collect())
        .collect();
    let k = rows.min(cols);
    for t in 0..k {
        loop {
            // move a minimal nonzero entry of the trailing block to (t, t)
            let mut best: Option<(usize, usize)> = None;
            for i in t..rows {
                for j in t..cols {
                    if d[i][j] != 0
                        && best.map_or(true, |(bi, bj)| d[i][j].abs() < d[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((bi, bj)) = best else { break };
            d.swap(t, bi);
            u.swap(t, bi);
            if bj != t {
                for row in d.iter_mut() {
                    row.swap(t, bj);
                }
                for row in v.iter_mut() {
                    row.swap(t, bj);
                }
            }
            let mut clean = true;
            for i in (t + 1)..rows {
                let q = d[i][t].div_euclid(d[t][t]);
                if q != 0 {
                    for j in 0..cols {
                        d[i][j] -= q * d[t][j];
                    }
                    for j in 0..rows {
                        u[i][j] -= q * u[t][j];
                    }
                }
                if d[i][t] != 0 {
                    clean = false;
                }
            }
            for j in (t + 1)..cols {
                let q = d[t][j].div_euclid(d[t][t]);
                if q != 0 {
                    for i in 0..rows {
                        d[i][j] -= q * d[i][t];
                    }
                    for i in 0..cols {
                        v[i][j] -= q * v[i][t];
                    }
                }
                if d[t][j] != 0 {
                    clean = false;
                }
            }
            if clean {
                // enforce divisibility d[t][t] | trailing block
                let mut fixed = true;
                'check: for i in (t + 1)..rows {
                    for j in (t + 1)..cols {
                        if d[i][j] % d[t][t] != 0 {
                            for jj in 0..cols {
                                d[t][jj] += d[i][jj];
                            }
                            for jj in 0..rows {
                                u[t][jj] += u[i][jj];
                            }
                            fixed = false;
                            break 'check;
                        }
                    }
                }
                if fixed {
                    break;
                }
            }
        }
        if d[t][t] < 0 {
            for j in 0..cols {
                d[t][j] = -d[t][j];
            }
            for j in 0..rows {
                u[t][j] = -u[t][j];
            }
        }
    }
    (u, d, v)
}
