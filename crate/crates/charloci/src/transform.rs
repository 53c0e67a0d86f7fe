//! The group-ring transform of elementary constructible objects on the
//! character torus: shifted, twisted local systems on subtori become
//! explicit Koszul-type free complexes, with an independent linear-algebra
//! oracle for twisted cohomology and Verdier duals.

use crate::complex::{koszul_complex, FreeComplex};
use crate::error::{Error, Result};
use crate::matrix::{combinations, PolyMatrix, QMatrix};
use crate::poly::{Exp, Poly, Q};
use crate::torus::{CharacterPoint, CharacterTorus};
use num::{One, Zero};
use std::collections::BTreeMap;

/// i_*(L)[s] tensored with a rank-one twist: a local system of rank rk on
/// the subtorus spanned by the embedded sublattice (columns of `embedding`),
/// described by 2h commuting invertible monodromy matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSystemObject {
    pub torus: CharacterTorus,
    pub h: usize,
    pub embedding: Vec<Vec<i64>>, // n rows x 2h columns
    pub monodromy: Vec<QMatrix>,  // 2h commuting invertible rk x rk matrices
    pub twist: CharacterPoint,
    pub shift: i32,
    pub rk: usize,
}

impl LocalSystemObject {
    pub fn new(
        torus: CharacterTorus,
        h: usize,
        embedding: Vec<Vec<i64>>,
        monodromy: Vec<QMatrix>,
        twist: CharacterPoint,
        shift: i32,
    ) -> Result<Self> {
        let n = torus.n();
        if h > torus.g {
            return Err(Error::TorusMismatch("subtorus dimension exceeds ambient".into()));
        }
        if embedding.len() != n || embedding.iter().any(|r| r.len() != 2 * h) {
            return Err(Error::InvalidInput("embedding must be n x 2h".into()));
        }
        if monodromy.len() != 2 * h {
            return Err(Error::InvalidInput("need one monodromy matrix per lattice generator".into()));
        }
        if twist.coords.len() != n {
            return Err(Error::TorusMismatch("twist lives on the wrong torus".into()));
        }
        let rk = monodromy.first().map(|m| m.rows).unwrap_or(1);
        if rk == 0 {
            return Err(Error::InvalidInput("rank must be at least 1".into()));
        }
        for m in &monodromy {
            if m.rows != rk || m.cols != rk {
                return Err(Error::InvalidInput("monodromy matrices must share one size".into()));
            }
            if m.det().is_zero() {
                return Err(Error::NonInvertible);
            }
        }
        for i in 0..monodromy.len() {
            for j in (i + 1)..monodromy.len() {
                if monodromy[i].mul(&monodromy[j]) != monodromy[j].mul(&monodromy[i]) {
                    return Err(Error::NonCommuting);
                }
            }
        }
        if h > 0 {
            let rows: Vec<Vec<Q>> = (0..2 * h)
                .map(|j| embedding.iter().map(|r| crate::poly::q_int(r[j])).collect())
                .collect();
            if QMatrix::from_rows(rows).rank() != 2 * h {
                return Err(Error::InvalidInput("embedding columns are dependent".into()));
            }
        }
        Ok(LocalSystemObject { torus, h, embedding, monodromy, twist, shift, rk })
    }

    pub fn skyscraper(torus: CharacterTorus, rk: usize, shift: i32) -> Result<Self> {
        let n = torus.n();
        let twist = CharacterPoint::trivial(n);
        let mut obj = LocalSystemObject::new(torus, 0, vec![vec![]; n], vec![], twist, shift)?;
        obj.rk = rk.max(1);
        Ok(obj)
    }

    /// Column j of the embedding: the image of the j-th sublattice
    /// generator in the ambient lattice.
    fn lattice_vector(&self, j: usize) -> Vec<i64> {
        self.embedding.iter().map(|row| row[j]).collect()
    }

    /// The commuting operators of the group-action Koszul model:
    /// T_j = c^{v_j} x^{v_j+} M_j - x^{v_j-}, with v_j the j-th embedded
    /// lattice vector and c the twist.
    fn operators(&self) -> Vec<PolyMatrix> {
        let ring = &self.torus.ring;
        let n = self.torus.n();
        (0..2 * self.h)
            .map(|j| {
                let v = self.lattice_vector(j);
                let c = self.twist.pow(&v);
                let plus: Exp = (0..n).map(|i| if v[i] > 0 { v[i] as u32 } else { 0 }).collect();
                let minus: Exp = (0..n).map(|i| if v[i] < 0 { (-v[i]) as u32 } else { 0 }).collect();
                let mut m = PolyMatrix::zero(ring, self.rk, self.rk);
                for r in 0..self.rk {
                    for cc in 0..self.rk {
                        let mut p = Poly::monomial(
                            ring,
                            plus.clone(),
                            &c * self.monodromy[j].get(r, cc),
                        );
                        if r == cc {
                            p = p.sub(&Poly::monomial(ring, minus.clone(), Q::one()));
                        }
                        m.set(r, cc, p);
                    }
                }
                m
            })
            .collect()
    }
}

/// Koszul model of the transform, placed in degrees [-s, 2h - s].
pub fn mellin_transform(obj: &LocalSystemObject) -> Result<FreeComplex> {
    if obj.h == 0 {
        return Ok(FreeComplex::concentrated(&obj.torus.ring, -obj.shift, obj.rk));
    }
    let k = koszul_complex(&obj.torus.ring, &obj.operators())?;
    Ok(k.shift(obj.shift))
}

/// dim H^k(A, obj tensor C_rho): Koszul cohomology of the evaluated
/// operators on Q^rk. Pure linear algebra, independent of the transform.
pub fn twisted_cohomology(obj: &LocalSystemObject, rho: &CharacterPoint) -> BTreeMap<i32, usize> {
    let s = obj.shift;
    if obj.h == 0 {
        return [(-s, obj.rk)].into_iter().collect();
    }
    let ops: Vec<QMatrix> = (0..2 * obj.h)
        .map(|j| {
            let v = obj.lattice_vector(j);
            let scale = obj.twist.pow(&v) * rho.pow(&v);
            let mut m = obj.monodromy[j].clone();
            for r in 0..obj.rk {
                for c in 0..obj.rk {
                    let e = m.get(r, c) * &scale - if r == c { Q::one() } else { Q::zero() };
                    m.set(r, c, e);
                }
            }
            m
        })
        .collect();
    numeric_koszul_dims(&ops, obj.rk)
        .into_iter()
        .map(|(d, v)| (d - s, v))
        .collect()
}

/// Cohomology dimensions of the Koszul complex of commuting operators on
/// Q^rk, in degrees 0..len.
fn numeric_koszul_dims(ops: &[QMatrix], rk: usize) -> BTreeMap<i32, usize> {
    let s = ops.len();
    let subsets: Vec<Vec<Vec<usize>>> = (0..=s).map(|j| combinations(s, j)).collect();
    let mut diff_ranks: Vec<usize> = Vec::new();
    for j in 0..s {
        let index_of: BTreeMap<&[usize], usize> = subsets[j + 1]
            .iter()
            .enumerate()
            .map(|(k, v)| (v.as_slice(), k))
            .collect();
        let mut m = QMatrix::zero(subsets[j + 1].len() * rk, subsets[j].len() * rk);
        for (si, set) in subsets[j].iter().enumerate() {
            for i in 0..s {
                if set.contains(&i) {
                    continue;
                }
                let mut bigger = set.clone();
                bigger.push(i);
                bigger.sort();
                let ti = index_of[bigger.as_slice()];
                let neg = set.iter().filter(|&&t| t < i).count() % 2 == 1;
                for r in 0..rk {
                    for c in 0..rk {
                        let e = ops[i].get(r, c).clone();
                        m.set(ti * rk + r, si * rk + c, if neg { -e } else { e });
                    }
                }
            }
        }
        diff_ranks.push(m.rank());
    }
    let mut out = BTreeMap::new();
    for j in 0..=s {
        let total = subsets[j].len() * rk;
        let above = if j < s { diff_ranks[j] } else { 0 };
        let below = if j > 0 { diff_ranks[j - 1] } else { 0 };
        out.insert(j as i32, total - above - below);
    }
    out
}

/// Verdier dual: inverse-transpose monodromy, inverse twist, shift
/// s -> 2h - s.
pub fn verdier_dual(obj: &LocalSystemObject) -> Result<LocalSystemObject> {
    let monodromy = obj
        .monodromy
        .iter()
        .map(|m| m.transpose().inverse().ok_or(Error::NonInvertible))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalSystemObject {
        torus: obj.torus.clone(),
        h: obj.h,
        embedding: obj.embedding.clone(),
        monodromy,
        twist: obj.twist.inverse(),
        shift: 2 * obj.h as i32 - obj.shift,
        rk: obj.rk,
    })
}

/// Finite direct sum of elementary objects on one ambient torus.
#[derive(Debug, Clone)]
pub struct ElementaryComplex {
    pub torus: CharacterTorus,
    pub summands: Vec<LocalSystemObject>,
}

impl ElementaryComplex {
    pub fn new(torus: CharacterTorus, summands: Vec<LocalSystemObject>) -> Result<Self> {
        for s in &summands {
            if s.torus != torus {
                return Err(Error::TorusMismatch("summand on a different torus".into()));
            }
        }
        Ok(ElementaryComplex { torus, summands })
    }
}

pub fn transform_sum(e: &ElementaryComplex) -> Result<FreeComplex> {
    let mut acc = FreeComplex::zero(&e.torus.ring);
    for s in &e.summands {
        acc = acc.direct_sum(&mellin_transform(s)?)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{q_int, q_ratio, MonomialOrder};

    fn torus(g: usize) -> CharacterTorus {
        CharacterTorus::new(g, MonomialOrder::GrevLex).unwrap()
    }

    fn rank1(vals: &[i64]) -> Vec<QMatrix> {
        vals.iter().map(|&v| QMatrix::from_rows(vec![vec![q_int(v)]])).collect()
    }

    fn full_embedding(g: usize) -> Vec<Vec<i64>> {
        (0..2 * g).map(|i| (0..2 * g).map(|j| i64::from(i == j)).collect()).collect()
    }

    fn constant_sheaf(g: usize, shift: i32) -> LocalSystemObject {
        let t = torus(g);
        let n = t.n();
        LocalSystemObject::new(
            t,
            g,
            full_embedding(g),
            rank1(&vec![1; 2 * g]),
            CharacterPoint::trivial(n),
            shift,
        )
        .unwrap()
    }

    #[test]
    fn constant_sheaf_transform_is_koszul_at_one() {
        let c = mellin_transform(&constant_sheaf(1, 1)).unwrap();
        assert_eq!((c.lo, c.hi), (-1, 1));
        assert_eq!((c.rank(-1), c.rank(0), c.rank(1)), (1, 2, 1));
        let fiber = c.derived_fiber(&[q_int(1), q_int(1)]);
        assert_eq!(fiber, [(-1, 1), (0, 2), (1, 1)].into_iter().collect());
        let away = c.derived_fiber(&[q_int(3), q_int(1)]);
        assert!(away.values().all(|&v| v == 0));
    }

    #[test]
    fn skyscraper_transform_is_free() {
        let t = torus(1);
        let sky = LocalSystemObject::skyscraper(t, 3, 0).unwrap();
        let c = mellin_transform(&sky).unwrap();
        assert_eq!((c.lo, c.hi), (0, 0));
        assert_eq!(c.rank(0), 3);
        assert_eq!(c.euler_characteristic(), 3);
    }

    #[test]
    fn nontrivial_monodromy_moves_the_support() {
        let t = torus(1);
        let obj = LocalSystemObject::new(
            t,
            1,
            full_embedding(1),
            rank1(&[2, 5]),
            CharacterPoint::trivial(2),
            0,
        )
        .unwrap();
        let c = mellin_transform(&obj).unwrap();
        assert_eq!((c.lo, c.hi), (0, 2));
        let jump = CharacterPoint::new(vec![q_ratio(1, 2), q_ratio(1, 5)]).unwrap();
        assert_eq!(c.derived_fiber(&jump.coords)[&2], 1);
        assert!(c
            .derived_fiber(&[q_int(1), q_int(1)])
            .values()
            .all(|&v| v == 0));
        assert_eq!(c.euler_characteristic(), 0);
    }

    #[test]
    fn twisted_cohomology_examples() {
        let obj = constant_sheaf(1, 1);
        let triv = CharacterPoint::trivial(2);
        assert_eq!(
            twisted_cohomology(&obj, &triv),
            [(-1, 1), (0, 2), (1, 1)].into_iter().collect()
        );
        let off = CharacterPoint::new(vec![q_int(3), q_int(1)]).unwrap();
        assert!(twisted_cohomology(&obj, &off).values().all(|&v| v == 0));
        let sky = LocalSystemObject::skyscraper(torus(1), 4, 0).unwrap();
        assert_eq!(twisted_cohomology(&sky, &off), [(0, 4)].into_iter().collect());
    }

    #[test]
    fn base_change_identity_on_sampled_points() {
        let t = torus(1);
        let objects = vec![
            constant_sheaf(1, 1),
            LocalSystemObject::new(
                t.clone(),
                1,
                full_embedding(1),
                rank1(&[2, 5]),
                CharacterPoint::new(vec![q_int(-1), q_int(1)]).unwrap(),
                1,
            )
            .unwrap(),
            // unipotent rank 2
            LocalSystemObject::new(
                t.clone(),
                1,
                full_embedding(1),
                vec![
                    QMatrix::from_rows(vec![vec![q_int(1), q_int(1)], vec![q_int(0), q_int(1)]]),
                    QMatrix::identity(2),
                ],
                CharacterPoint::trivial(2),
                0,
            )
            .unwrap(),
            // local system on the subtorus spanned by e1, e2 inside g = 2
            LocalSystemObject::new(
                torus(2),
                1,
                vec![vec![1, 0], vec![0, 1], vec![0, 0], vec![0, 0]],
                rank1(&[3, 1]),
                CharacterPoint::trivial(4),
                1,
            )
            .unwrap(),
        ];
        let samples: &[i64] = &[1, -1, 2, 3, -2, 5];
        for obj in &objects {
            let c = mellin_transform(obj).unwrap();
            let n = obj.torus.n();
            let mut count = 0;
            for a in samples {
                for b in samples {
                    let mut coords = vec![q_int(*a), q_int(*b)];
                    coords.extend(std::iter::repeat(q_ratio(1, 2)).take(n - 2));
                    let rho = CharacterPoint::new(coords).unwrap();
                    let fiber = c.derived_fiber(&rho.coords);
                    let oracle = twisted_cohomology(obj, &rho);
                    for d in c.lo..=c.hi {
                        assert_eq!(
                            fiber.get(&d).copied().unwrap_or(0),
                            oracle.get(&d).copied().unwrap_or(0),
                            "degree {} at ({}, {})",
                            d,
                            a,
                            b
                        );
                    }
                    count += 1;
                }
            }
            assert!(count >= 20);
        }
    }

    #[test]
    fn verdier_dual_examples() {
        let c_a = constant_sheaf(1, 1);
        let d = verdier_dual(&c_a).unwrap();
        assert_eq!(d, c_a); // self-dual in the perverse normalization

        let sky = LocalSystemObject::skyscraper(torus(1), 2, 0).unwrap();
        assert_eq!(verdier_dual(&sky).unwrap().shift, 0);

        let t = torus(1);
        let obj = LocalSystemObject::new(
            t,
            1,
            full_embedding(1),
            rank1(&[2, 5]),
            CharacterPoint::trivial(2),
            1,
        )
        .unwrap();
        let d = verdier_dual(&obj).unwrap();
        assert_eq!(d.shift, 1);
        let expected: Vec<QMatrix> = [q_ratio(1, 2), q_ratio(1, 5)]
            .into_iter()
            .map(|v| QMatrix::from_rows(vec![vec![v]]))
            .collect();
        assert_eq!(d.monodromy, expected);
    }

    #[test]
    fn verdier_relation_pointwise() {
        let t = torus(1);
        let obj = LocalSystemObject::new(
            t,
            1,
            full_embedding(1),
            rank1(&[2, 5]),
            CharacterPoint::new(vec![q_int(-1), q_int(3)]).unwrap(),
            1,
        )
        .unwrap();
        let dual = verdier_dual(&obj).unwrap();
        let pts = [
            vec![q_int(2), q_int(3)],
            vec![q_ratio(-1, 2), q_ratio(1, 15)],
            vec![q_int(1), q_int(1)],
        ];
        for coords in pts {
            let rho = CharacterPoint::new(coords).unwrap();
            let fwd = twisted_cohomology(&obj, &rho);
            let bwd = twisted_cohomology(&dual, &rho.inverse());
            for (k, v) in &fwd {
                assert_eq!(bwd.get(&(-k)).copied().unwrap_or(0), *v);
            }
        }
    }

    #[test]
    fn transform_sum_examples() {
        let t = torus(1);
        let s1 = LocalSystemObject::skyscraper(t.clone(), 1, 0).unwrap();
        let s2 = LocalSystemObject::skyscraper(t.clone(), 1, 0).unwrap();
        let e = ElementaryComplex::new(t.clone(), vec![s1, s2]).unwrap();
        let c = transform_sum(&e).unwrap();
        assert_eq!(c.rank(0), 2);
        let empty = ElementaryComplex::new(t.clone(), vec![]).unwrap();
        assert!(transform_sum(&empty).unwrap().is_zero_complex());
        // chi additivity
        let mixed = ElementaryComplex::new(
            t.clone(),
            vec![
                LocalSystemObject::skyscraper(t.clone(), 3, 0).unwrap(),
                constant_sheaf(1, 1),
            ],
        )
        .unwrap();
        assert_eq!(transform_sum(&mixed).unwrap().euler_characteristic(), 3 + 0);
    }

    #[test]
    fn rank_one_support_is_one_coset() {
        use crate::torus::{subtorus_ideal, TranslatedSubtorus};
        let t = torus(1);
        let obj = LocalSystemObject::new(
            t.clone(),
            1,
            full_embedding(1),
            rank1(&[2, 5]),
            CharacterPoint::trivial(2),
            0,
        )
        .unwrap();
        let c = mellin_transform(&obj).unwrap();
        let prof = c.support_profile(Some(&t.unit_monomial)).unwrap();
        // only the top degree carries support: the single point (1/2, 1/5)
        let (ideal, codim) = &prof.entries[&2];
        assert_eq!(*codim, crate::ideal::Codim::Finite(2));
        let coset = TranslatedSubtorus::new(
            2,
            vec![vec![1, 0], vec![0, 1]],
            vec![q_ratio(1, 2), q_ratio(1, 5)],
        )
        .unwrap();
        let target = subtorus_ideal(&t, &coset).unwrap();
        assert!(ideal.same_ideal(&target).unwrap());
        for d in c.lo..2 {
            assert_eq!(prof.codim(d), crate::ideal::Codim::Infinity);
        }
    }

    #[test]
    fn invalid_objects_rejected() {
        let t = torus(1);
        assert!(matches!(
            LocalSystemObject::new(
                t.clone(),
                1,
                full_embedding(1),
                rank1(&[0, 1]),
                CharacterPoint::trivial(2),
                0
            ),
            Err(Error::NonInvertible)
        ));
        let nc = vec![
            QMatrix::from_rows(vec![vec![q_int(1), q_int(1)], vec![q_int(0), q_int(1)]]),
            QMatrix::from_rows(vec![vec![q_int(1), q_int(0)], vec![q_int(1), q_int(1)]]),
        ];
        assert!(matches!(
            LocalSystemObject::new(
                t.clone(),
                1,
                full_embedding(1),
                nc,
                CharacterPoint::trivial(2),
                0
            ),
            Err(Error::NonCommuting)
        ));
        // dependent embedding columns
        assert!(LocalSystemObject::new(
            t,
            1,
            vec![vec![1, 1], vec![1, 1]],
            rank1(&[1, 1]),
            CharacterPoint::trivial(2),
            0
        )
        .is_err());
    }
}
