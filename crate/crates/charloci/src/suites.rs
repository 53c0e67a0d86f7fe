//! Verification suites over the bundled example corpus. Each suite
//! re-checks one family of claims with an oracle that is independent of the
//! code path it certifies; the CLI `verify` command and the integration
//! tests both run these.

use crate::complex::{cone, FreeComplex};
use crate::error::Result;
use crate::ideal::{Codim, Dim, Ideal};
use crate::io::InputFile;
use crate::loci::{
    decompose_translated_subtori, jump_locus, rational_eigenvalues, sample_points,
    sampled_oracle_check, verify_decomposition,
};
use crate::matrix::PolyMatrix;
use crate::modules::FPModule;
use crate::perversity::{in_geq, in_leq, is_m_perverse, make_m, make_m_hat, surprise_diagnostics};
use crate::poly::{q_int, MonomialOrder, Poly, PolyRing, Q};
use crate::torus::{saturate_at_units, CharacterTorus};
use crate::transform::{mellin_transform, transform_sum, ElementaryComplex};
use num::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::Arc;

pub const EXAMPLES: &[(&str, &str)] = &[
    ("const_g1", include_str!("../examples/const_g1.json")),
    ("const_g2", include_str!("../examples/const_g2.json")),
    ("rank1_torsion_g1", include_str!("../examples/rank1_torsion_g1.json")),
    ("rank1_monodromy_g1", include_str!("../examples/rank1_monodromy_g1.json")),
    ("unipotent_g1", include_str!("../examples/unipotent_g1.json")),
    ("pushforward_g2_h1", include_str!("../examples/pushforward_g2_h1.json")),
    ("skyscraper_g1", include_str!("../examples/skyscraper_g1.json")),
    ("cone_g1", include_str!("../examples/cone_g1.json")),
    ("ic_syzygy_n4", include_str!("../examples/ic_syzygy_n4.json")),
];

pub fn bundled_examples() -> Result<Vec<(String, InputFile)>> {
    EXAMPLES
        .iter()
        .map(|(name, src)| Ok((name.to_string(), InputFile::parse_str(src)?)))
        .collect()
}

#[derive(Debug, Clone)]
pub struct SuiteResult {
    pub name: &'static str,
    pub failures: Vec<String>,
}

impl SuiteResult {
    fn new(name: &'static str) -> Self {
        SuiteResult { name, failures: vec![] }
    }

    pub fn pass(&self) -> bool {
        self.failures.is_empty()
    }

    fn check(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        if !ok {
            self.failures.push(msg());
        }
    }
}

fn objects_examples(order: MonomialOrder) -> Result<Vec<(String, ElementaryComplex)>> {
    let mut out = Vec::new();
    for (name, f) in bundled_examples()? {
        if let InputFile::Objects(obj) = f {
            out.push((name, obj.to_elementary(order)?));
        }
    }
    Ok(out)
}

/// Sampling palette extension making the known jump points reachable:
/// rational monodromy eigenvalues, twist coordinates, and their inverses.
fn extra_palette(e: &ElementaryComplex) -> Vec<Q> {
    let mut out: Vec<Q> = Vec::new();
    let mut push = |q: Q| {
        if !q.is_zero() {
            if !out.contains(&q) {
                out.push(q.clone());
            }
            let inv = Q::one() / q;
            if !out.contains(&inv) {
                out.push(inv);
            }
        }
    };
    for o in &e.summands {
        for c in &o.twist.coords {
            push(c.clone());
        }
        for m in &o.monodromy {
            for ev in rational_eigenvalues(m) {
                push(ev);
            }
        }
    }
    out
}

fn nonzero_dims(m: &BTreeMap<i32, usize>) -> BTreeMap<i32, usize> {
    m.iter().filter(|(_, &v)| v > 0).map(|(&k, &v)| (k, v)).collect()
}

/// Derived fibers of the transform against the numeric twisted-cohomology
/// oracle, per object and per summed file.
pub fn suite_base_change(samples: usize, seed: u64) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("base-change");
    for (name, e) in objects_examples(MonomialOrder::GrevLex)? {
        let extra = extra_palette(&e);
        let points = sample_points(e.torus.n(), samples, seed, &extra);
        for (oi, obj) in e.summands.iter().enumerate() {
            let c = mellin_transform(obj)?;
            for rho in &points {
                let fiber = nonzero_dims(&c.derived_fiber(&rho.coords));
                let oracle = nonzero_dims(&crate::transform::twisted_cohomology(obj, rho));
                res.check(fiber == oracle, || {
                    format!(
                        "{name} object {oi}: derived fiber {:?} != twisted cohomology {:?} at {:?}",
                        fiber, oracle, rho.coords
                    )
                });
            }
        }
        let total = transform_sum(&e)?;
        for rho in &points {
            let fiber = nonzero_dims(&total.derived_fiber(&rho.coords));
            let mut oracle: BTreeMap<i32, usize> = BTreeMap::new();
            for obj in &e.summands {
                for (d, v) in crate::transform::twisted_cohomology(obj, rho) {
                    *oracle.entry(d).or_insert(0) += v;
                }
            }
            res.check(fiber == nonzero_dims(&oracle), || {
                format!("{name}: summed fiber mismatch at {:?}", rho.coords)
            });
        }
    }
    Ok(res)
}

/// Determinantal jump loci against direct fiber-dimension sampling for
/// every degree and multiplicity up to 3.
pub fn suite_jump_loci(samples: usize, seed: u64) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("jump-loci");
    for (name, e) in objects_examples(MonomialOrder::GrevLex)? {
        let c = transform_sum(&e)?;
        let extra = extra_palette(&e);
        for k in c.lo..=c.hi {
            for m in 1..=3 {
                let rep = sampled_oracle_check(&c, k, m, &e.torus, samples, seed, &extra)?;
                res.check(rep.ok(), || {
                    format!(
                        "{name}: locus membership disagrees with fiber dimension at k={k} m={m}: {} mismatches",
                        rep.mismatches.len()
                    )
                });
            }
        }
    }
    Ok(res)
}

fn all_rank_one(e: &ElementaryComplex) -> bool {
    e.summands.iter().all(|o| o.rk == 1)
}

fn expected_arithmetic(e: &ElementaryComplex) -> bool {
    e.summands.iter().all(|o| {
        o.twist.coords.iter().all(|c| c.abs().is_one())
            && o.monodromy.iter().all(|m| {
                (0..m.rows).all(|i| (0..m.cols).all(|j| {
                    let v = m.get(i, j);
                    if i == j { v.abs().is_one() || v.is_zero() } else { v.is_zero() }
                }))
            })
    })
}

/// Every nonempty degree-k locus of a rank-one or pushforward example is a
/// certified finite union of translated subtori, with the torsion flag
/// matching the input arithmetic.
pub fn suite_structure() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("structure");
    for (name, e) in objects_examples(MonomialOrder::GrevLex)? {
        if !all_rank_one(&e) {
            continue;
        }
        let c = transform_sum(&e)?;
        let want_arith = expected_arithmetic(&e);
        for k in c.lo..=c.hi {
            let locus = jump_locus(&c, k, 1, &e.torus)?;
            if locus.components.is_empty() {
                continue;
            }
            let dec = crate::loci::decompose_locus(&locus, &e.torus)?;
            res.check(dec.certified, || {
                format!("{name} k={k}: subtorus decomposition not certified")
            });
            res.check(verify_decomposition(&dec.input, &dec.subtori, &e.torus)?, || {
                format!("{name} k={k}: decomposition does not match the locus")
            });
            res.check(dec.arithmetic == want_arith, || {
                format!(
                    "{name} k={k}: arithmetic flag {} but input torsion data says {}",
                    dec.arithmetic, want_arith
                )
            });
        }
    }
    Ok(res)
}

/// Perversity of the normalized examples, failure of both shifted
/// neighbors, and the codimension bound codim S_1^k >= |2k|.
pub fn suite_codim() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("codim");
    for (name, e) in objects_examples(MonomialOrder::GrevLex)? {
        let c = transform_sum(&e)?;
        let t = &e.torus;
        let m = make_m(t.n());
        res.check(is_m_perverse(&c, Some(t))?, || format!("{name}: not m-perverse"));
        res.check(!in_geq(&c.shift(1), 0, &m, Some(t))?, || {
            format!("{name}: shift by +1 still satisfies the lower bound")
        });
        res.check(!in_leq(&c.shift(-1), 0, &m, Some(t))?, || {
            format!("{name}: shift by -1 still satisfies the upper bound")
        });
        for k in c.lo..=c.hi {
            let locus = jump_locus(&c, k, 1, t)?;
            let bound = 2 * i64::from(k).abs();
            let mut attained = false;
            for comp in &locus.components {
                let cd = comp.codim()?;
                res.check(cd.at_least(bound), || {
                    format!("{name} k={k}: component codim {:?} below {bound}", cd)
                });
                if cd == Codim::Finite(bound) {
                    attained = true;
                }
            }
            if name == "pushforward_g2_h1" && k.abs() == 1 {
                res.check(attained, || {
                    format!("{name} k={k}: codim bound not attained at |k| = h")
                });
            }
        }
    }
    Ok(res)
}

/// Properness of the positive/negative-degree loci and the sign and
/// vanishing pattern of the Euler characteristic.
pub fn suite_generic_vanishing() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("generic-vanishing");
    for (name, e) in objects_examples(MonomialOrder::GrevLex)? {
        let c = transform_sum(&e)?;
        for k in c.lo..=c.hi {
            if k == 0 {
                continue;
            }
            let flat = jump_locus(&c, k, 1, &e.torus)?.flatten(&e.torus.ring)?;
            res.check(!flat.is_zero_ideal()?, || {
                format!("{name}: S_1^{k} is the whole torus")
            });
        }
        let chi = c.euler_characteristic();
        res.check(chi >= 0, || format!("{name}: negative Euler characteristic {chi}"));
        for (oi, obj) in e.summands.iter().enumerate() {
            let chi_o = mellin_transform(obj)?.euler_characteristic();
            if obj.h >= 1 {
                res.check(chi_o == 0, || {
                    format!("{name} object {oi}: pullback from a positive-dimensional subtorus has chi {chi_o}")
                });
            } else {
                res.check(chi_o == obj.rk as i64, || {
                    format!("{name} object {oi}: skyscraper chi {chi_o} != rank {}", obj.rk)
                });
            }
        }
    }
    Ok(res)
}

/// The least nonzero degree of the g=2 pushforward has codimension exactly
/// two, carried by a single certified subtorus.
pub fn suite_surprise() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("surprise");
    for (name, e) in objects_examples(MonomialOrder::GrevLex)? {
        if name != "pushforward_g2_h1" {
            continue;
        }
        let c = transform_sum(&e)?;
        let rep = surprise_diagnostics(&c, &e.torus)?;
        res.check(rep.r == 1, || format!("least nonzero degree {} != 1", rep.r));
        res.check(rep.codim == Codim::Finite(2), || {
            format!("support codim {:?} != 2", rep.codim)
        });
        res.check(rep.codim_equals_2r && rep.equi_certified, || {
            "support is not certified equidimensional of codim 2r".to_string()
        });
        let ann = c.cohomology_module(rep.r).annihilator()?;
        let dec =
            decompose_translated_subtori(&saturate_at_units(&ann, &e.torus)?, &e.torus)?;
        res.check(dec.certified && dec.subtori.len() == 1, || {
            format!("expected one certified subtorus, got {}", dec.subtori.len())
        });
    }
    Ok(res)
}

/// Duality exchange on a randomized corpus of shifts, sums, and cones of
/// the bundled transforms: the two membership computations run on
/// independently rebuilt complexes.
pub fn suite_exchange(seed: u64) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("exchange");
    let torus = CharacterTorus::new(1, MonomialOrder::GrevLex)?;
    let mut bases: Vec<FreeComplex> = Vec::new();
    for (_, e) in objects_examples(MonomialOrder::GrevLex)? {
        if e.torus.g == 1 {
            bases.push(transform_sum(&e)?);
        }
    }
    let m = make_m(torus.n());
    let m_hat = make_m_hat(torus.n());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..20 {
        let a = bases[rng.gen_range(0..bases.len())].shift(rng.gen_range(-1..=1));
        let b = bases[rng.gen_range(0..bases.len())].shift(rng.gen_range(-1..=1));
        let c = match rng.gen_range(0..3) {
            0 => a.direct_sum(&b)?,
            1 => cone(&a, &b, &BTreeMap::new())?, // cone of the zero map
            _ => {
                let mut id = BTreeMap::new();
                for d in a.lo..=a.hi {
                    id.insert(d, PolyMatrix::identity(&a.ring, a.rank(d)));
                }
                cone(&a, &a, &id)?
            }
        };
        for k in -2..=2 {
            let lhs = in_leq(&c, k, &m, Some(&torus))?;
            // right side recomputed from scratch on the double dual
            let rebuilt = c.dual().dual();
            let profile = rebuilt.support_profile(Some(&torus.unit_monomial))?;
            let mut rhs = true;
            for (&i, &(_, cd)) in profile.entries.iter().map(|(d, e)| (d, e)) {
                if let Codim::Finite(v) = cd {
                    if m.at(v.max(0) as usize) < i64::from(i - k) {
                        rhs = false;
                    }
                }
            }
            res.check(lhs == rhs, || {
                format!("case {case} k={k}: upper-bound membership {lhs} vs dual-side {rhs}")
            });
            res.check(lhs == in_geq(&c.dual(), -k, &m_hat, Some(&torus))?, || {
                format!("case {case} k={k}: exchange identity fails")
            });
        }
    }
    Ok(res)
}

/// Intersection-complex verification on the free and second-syzygy inputs.
pub fn suite_ic() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("ic");
    for (n, want) in [(1usize, 1usize), (3, 1), (4, 3)] {
        res.check(crate::intersection::ell(n) == want, || {
            format!("ell({n}) != {want}")
        });
    }
    let r4 = PolyRing::standard(4, MonomialOrder::GrevLex);
    let free = crate::intersection::ICInput::new(FPModule::free(&r4, 2), 4, false)?;
    let rep = crate::intersection::ic_verify(&free)?;
    res.check(rep.all_pass(), || format!("free module report fails: {rep:?}"));
    for (name, f) in bundled_examples()? {
        if let InputFile::Module(mf) = f {
            let inp = mf.to_ic_input()?;
            let rep = crate::intersection::ic_verify(&inp)?;
            res.check(rep.h0_matches, || format!("{name}: degree-0 cohomology differs"));
            res.check(rep.codim_bounds.iter().all(|b| b.ok), || {
                format!("{name}: codim bound violated: {:?}", rep.codim_bounds)
            });
            res.check(rep.m_perverse, || format!("{name}: result not m-perverse"));
            res.check(rep.stable_under_ell_increase, || {
                format!("{name}: truncation-depth increase changed cohomology")
            });
            res.check(rep.all_pass(), || format!("{name}: {rep:?}"));
        }
    }
    let torsion = Ideal::new(&r4, vec![Poly::var(&r4, 0)])?;
    let bad = crate::intersection::ICInput::new(FPModule::quotient_by_ideal(&torsion), 4, false)?;
    res.check(
        matches!(crate::intersection::ic_verify(&bad), Err(crate::Error::NotReflexive)),
        || "torsion input was not rejected".to_string(),
    );
    Ok(res)
}

fn random_poly(rng: &mut ChaCha8Rng, ring: &Arc<PolyRing>) -> Poly {
    let n = ring.n();
    let mut p = Poly::zero(ring);
    for _ in 0..rng.gen_range(1..=3) {
        let exp: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
        let coef = q_int(rng.gen_range(-3..=3i64));
        p = p.add(&Poly::monomial(ring, exp, coef));
    }
    p
}

/// Kernel-level spot checks on randomized inputs: the S-polynomial
/// criterion on emitted bases, resolution exactness, and dimension counts
/// with a brute-force combinatorial oracle.
pub fn suite_kernel(seed: u64) -> Result<SuiteResult> {
    let mut res = SuiteResult::new("kernel");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for case in 0..30 {
        let n = rng.gen_range(2..=4usize);
        let ring = PolyRing::standard(n, MonomialOrder::GrevLex);

        // linear regular sequence: dimension is n - r
        let r = rng.gen_range(1..=n);
        let gens: Vec<Poly> = (0..r)
            .map(|i| {
                Poly::var(&ring, i).sub(&Poly::constant(&ring, q_int(rng.gen_range(1..=3i64))))
            })
            .collect();
        let ideal = Ideal::new(&ring, gens)?;
        res.check(
            ideal.krull_dimension()? == Dim::Finite(n - r),
            || format!("case {case}: linear system of rank {r} has wrong dimension"),
        );
        res.check(
            crate::groebner::ideal_buchberger_criterion(&ideal.gb()?),
            || format!("case {case}: linear-system basis fails the S-pair test"),
        );

        // monomial ideal: dimension against a direct subset search
        let mono_gens: Vec<Poly> = (0..rng.gen_range(1..=3))
            .map(|_| {
                let exp: Vec<u32> =
                    (0..n).map(|_| rng.gen_range(0..=2u32)).collect();
                Poly::monomial(&ring, exp, Q::one())
            })
            .filter(|p| !p.terms.is_empty() && p.terms[0].0.iter().any(|&e| e > 0))
            .collect();
        if !mono_gens.is_empty() {
            let supports: Vec<Vec<usize>> = mono_gens
                .iter()
                .map(|p| (0..n).filter(|&i| p.terms[0].0[i] > 0).collect())
                .collect();
            let mut best = 0usize;
            for mask in 0..(1u32 << n) {
                let keep: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
                let independent = supports
                    .iter()
                    .all(|s| !s.iter().all(|i| keep.contains(i)));
                if independent {
                    best = best.max(keep.len());
                }
            }
            let ideal = Ideal::new(&ring, mono_gens)?;
            res.check(
                ideal.krull_dimension()? == Dim::Finite(best),
                || format!("case {case}: monomial ideal dimension disagrees with subset search"),
            );
        }

        // random ideal: emitted basis passes the criterion
        let gens: Vec<Poly> = (0..2).map(|_| random_poly(&mut rng, &ring)).collect();
        let ideal = Ideal::new(&ring, gens.into_iter().filter(|p| !p.terms.is_empty()).collect())?;
        res.check(
            crate::groebner::ideal_buchberger_criterion(&ideal.gb()?),
            || format!("case {case}: random basis fails the S-pair test"),
        );

        // random module resolution: zero composites and interior exactness
        let rows = rng.gen_range(1..=2usize);
        let cols = rng.gen_range(1..=2usize);
        let mut rel = PolyMatrix::zero(&ring, rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                rel.set(i, j, random_poly(&mut rng, &ring));
            }
        }
        let module = FPModule::new(&ring, rows, rel)?;
        let chain = module.resolution_matrices(n + 2)?;
        for w in chain.windows(2) {
            res.check(w[0].mul(&w[1]).is_zero(), || {
                format!("case {case}: resolution composite is nonzero")
            });
            let syz = crate::groebner::syzygies(&w[0]);
            let gb = crate::groebner::matrix_module_gb(&w[1]);
            for j in 0..syz.cols {
                let col: Vec<Poly> =
                    (0..syz.rows).map(|i| syz.get(i, j).clone()).collect();
                res.check(gb.contains(&crate::groebner::MPoly::from_comps(&col)), || {
                    format!("case {case}: resolution misses a syzygy")
                });
            }
        }
    }
    Ok(res)
}

/// Parse/print round-trips and the expectation blocks attached to each
/// bundled example file.
pub fn suite_examples() -> Result<SuiteResult> {
    let mut res = SuiteResult::new("examples");
    let examples = bundled_examples()?;
    res.check(examples.len() >= 8, || "fewer than 8 bundled examples".to_string());
    for (name, f) in &examples {
        // round-trip through the serializer
        let printed = serde_json::to_string(f)?;
        let back = InputFile::parse_str(&printed)?;
        res.check(
            serde_json::to_string(&back)? == printed,
            || format!("{name}: file does not round-trip"),
        );
        if let InputFile::Module(mf) = f {
            let inp = mf.to_ic_input()?;
            if let Some(want) = f.expect().and_then(|e| e.reflexive) {
                res.check(inp.module.is_reflexive()? == want, || {
                    format!("{name}: reflexivity disagrees with the expectation block")
                });
            }
            continue;
        }
        let (c, torus) = f.realize(MonomialOrder::GrevLex)?;
        let Some(expect) = f.expect() else { continue };
        if let Some(chi) = expect.euler {
            res.check(c.euler_characteristic() == chi, || {
                format!("{name}: chi {} != expected {chi}", c.euler_characteristic())
            });
        }
        if let Some(p) = expect.perverse {
            res.check(is_m_perverse(&c, torus.as_ref())? == p, || {
                format!("{name}: perversity disagrees with the expectation block")
            });
        }
        if let (Some(loci), Some(t)) = (&expect.loci, &torus) {
            for le in loci {
                let locus = jump_locus(&c, le.k, le.m, t)?;
                res.check(locus.components.len() == le.components, || {
                    format!(
                        "{name} k={} m={}: {} components, expected {}",
                        le.k,
                        le.m,
                        locus.components.len(),
                        le.components
                    )
                });
                let dec = crate::loci::decompose_locus(&locus, t)?;
                res.check(dec.certified == le.certified, || {
                    format!("{name} k={} m={}: certification mismatch", le.k, le.m)
                });
                if let Some(want) = le.arithmetic {
                    res.check(dec.arithmetic == want, || {
                        format!("{name} k={} m={}: arithmetic flag mismatch", le.k, le.m)
                    });
                }
            }
        }
    }
    Ok(res)
}

pub const SUITE_NAMES: &[&str] = &[
    "base-change",
    "jump-loci",
    "structure",
    "codim",
    "generic-vanishing",
    "surprise",
    "exchange",
    "ic",
    "kernel",
    "examples",
];

pub fn run_suite(name: &str, samples: usize, seed: u64) -> Result<SuiteResult> {
    match name {
        "base-change" => suite_base_change(samples, seed),
        "jump-loci" => suite_jump_loci(samples, seed),
        "structure" => suite_structure(),
        "codim" => suite_codim(),
        "generic-vanishing" => suite_generic_vanishing(),
        "surprise" => suite_surprise(),
        "exchange" => suite_exchange(seed),
        "ic" => suite_ic(),
        "kernel" => suite_kernel(seed),
        "examples" => suite_examples(),
        other => Err(crate::Error::InvalidInput(format!("unknown suite: {other}"))),
    }
}
