//! JSON file formats (complexes, local-system objects, module inputs) and
//! report serialization. Polynomials and rationals travel as their exact
//! text forms, so files round-trip byte-for-byte after one canonical print.

use crate::complex::FreeComplex;
use crate::error::{Error, Result};
use crate::ideal::Codim;
use crate::intersection::{ICInput, ICReport};
use crate::loci::{decompose_translated_subtori, JumpLocus};
use crate::matrix::{PolyMatrix, QMatrix};
use crate::modules::FPModule;
use crate::poly::{MonomialOrder, Poly, PolyRing, Q};
use crate::torus::{torsion_check, CharacterPoint, CharacterTorus, TranslatedSubtorus};
use crate::transform::{ElementaryComplex, LocalSystemObject};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::Arc;

fn parse_q(s: &str) -> Result<Q> {
    Q::from_str(s.trim())
        .map_err(|_| Error::InvalidInput(format!("bad rational literal: {s}")))
}

fn fmt_q(q: &Q) -> String {
    q.to_string()
}

fn order_from_str(s: &str) -> Result<MonomialOrder> {
    match s {
        "grevlex" => Ok(MonomialOrder::GrevLex),
        "lex" => Ok(MonomialOrder::Lex),
        other => Err(Error::InvalidInput(format!("unknown monomial order: {other}"))),
    }
}

fn order_to_str(o: MonomialOrder) -> &'static str {
    match o {
        MonomialOrder::GrevLex => "grevlex",
        MonomialOrder::Lex => "lex",
        MonomialOrder::Elim(_) => "grevlex", // internal-only order, never serialized
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RingJson {
    pub vars: Vec<String>,
    pub order: String,
}

impl RingJson {
    pub fn to_ring(&self) -> Result<Arc<PolyRing>> {
        PolyRing::new(self.vars.clone(), order_from_str(&self.order)?)
    }

    pub fn from_ring(r: &PolyRing) -> RingJson {
        RingJson { vars: r.vars.clone(), order: order_to_str(r.order).to_string() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComplexJson {
    pub ring: RingJson,
    pub lo: i32,
    pub hi: i32,
    pub ranks: BTreeMap<String, usize>,
    pub differentials: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<ExpectBlock>,
}

fn parse_matrix(ring: &Arc<PolyRing>, rows: &[Vec<String>]) -> Result<PolyMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    let mut m = PolyMatrix::zero(ring, r, c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(Error::InvalidInput("ragged matrix in input file".into()));
        }
        for (j, s) in row.iter().enumerate() {
            m.set(i, j, Poly::parse(ring, s)?);
        }
    }
    Ok(m)
}

fn print_matrix(m: &PolyMatrix) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| m.get(i, j).to_string()).collect())
        .collect()
}

impl ComplexJson {
    pub fn to_complex(&self) -> Result<FreeComplex> {
        let ring = self.ring.to_ring()?;
        let mut ranks = BTreeMap::new();
        for (k, &v) in &self.ranks {
            let d: i32 = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad degree key: {k}")))?;
            ranks.insert(d, v);
        }
        let mut diffs = BTreeMap::new();
        for (k, rows) in &self.differentials {
            let d: i32 = k
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad degree key: {k}")))?;
            diffs.insert(d, parse_matrix(&ring, rows)?);
        }
        FreeComplex::new(&ring, ranks, diffs)
    }

    pub fn from_complex(c: &FreeComplex) -> ComplexJson {
        ComplexJson {
            ring: RingJson::from_ring(&c.ring),
            lo: c.lo,
            hi: c.hi,
            ranks: c.ranks.iter().map(|(d, &r)| (d.to_string(), r)).collect(),
            differentials: c
                .differentials
                .iter()
                .filter(|(_, m)| m.rows > 0 && m.cols > 0)
                .map(|(d, m)| (d.to_string(), print_matrix(m)))
                .collect(),
            expect: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectJson {
    pub id: String,
    pub h: usize,
    pub embedding: Vec<Vec<i64>>,
    pub monodromy: Vec<Vec<Vec<String>>>,
    pub twist: Vec<String>,
    pub shift: i32,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ObjectsFile {
    pub g: usize,
    pub objects: Vec<ObjectJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<ExpectBlock>,
}

fn parse_qmatrix(rows: &[Vec<String>]) -> Result<QMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    let mut m = QMatrix::zero(r, c);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != c {
            return Err(Error::InvalidInput("ragged monodromy matrix".into()));
        }
        for (j, s) in row.iter().enumerate() {
            m.set(i, j, parse_q(s)?);
        }
    }
    Ok(m)
}

fn print_qmatrix(m: &QMatrix) -> Vec<Vec<String>> {
    (0..m.rows)
        .map(|i| (0..m.cols).map(|j| fmt_q(m.get(i, j))).collect())
        .collect()
}

impl ObjectsFile {
    pub fn to_elementary(&self, order: MonomialOrder) -> Result<ElementaryComplex> {
        let torus = CharacterTorus::new(self.g, order)?;
        let mut summands = Vec::new();
        for o in &self.objects {
            let twist = CharacterPoint::new(
                o.twist.iter().map(|s| parse_q(s)).collect::<Result<_>>()?,
            )?;
            let monodromy = o
                .monodromy
                .iter()
                .map(|m| parse_qmatrix(m))
                .collect::<Result<Vec<_>>>()?;
            summands.push(LocalSystemObject::new(
                torus.clone(),
                o.h,
                o.embedding.clone(),
                monodromy,
                twist,
                o.shift,
            )?);
        }
        ElementaryComplex::new(torus, summands)
    }

    pub fn from_elementary(e: &ElementaryComplex) -> ObjectsFile {
        ObjectsFile {
            g: e.torus.g,
            objects: e
                .summands
                .iter()
                .enumerate()
                .map(|(i, o)| ObjectJson {
                    id: format!("obj{}", i + 1),
                    h: o.h,
                    embedding: o.embedding.clone(),
                    monodromy: o.monodromy.iter().map(print_qmatrix).collect(),
                    twist: o.twist.coords.iter().map(fmt_q).collect(),
                    shift: o.shift,
                })
                .collect(),
            expect: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModuleFile {
    pub ring: RingJson,
    pub generators: usize,
    pub relations: Vec<Vec<String>>,
    #[serde(default)]
    pub torus_mode: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expect: Option<ExpectBlock>,
}

impl ModuleFile {
    pub fn to_ic_input(&self) -> Result<ICInput> {
        let ring = self.ring.to_ring()?;
        let relations = if self.relations.is_empty() {
            PolyMatrix::zero(&ring, self.generators, 0)
        } else {
            parse_matrix(&ring, &self.relations)?
        };
        let module = FPModule::new(&ring, self.generators, relations)?;
        let n = ring.n();
        ICInput::new(module, n, self.torus_mode)
    }
}

/// Attached expectations checked by `verify --suite examples`.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ExpectBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perverse: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub loci: Option<Vec<LocusExpect>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reflexive: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LocusExpect {
    pub k: i32,
    pub m: usize,
    pub components: usize,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub arithmetic: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InputFile {
    Objects(ObjectsFile),
    Complex(ComplexJson),
    Module(ModuleFile),
}

impl InputFile {
    pub fn parse_str(src: &str) -> Result<InputFile> {
        Ok(serde_json::from_str(src)?)
    }

    pub fn load(path: &std::path::Path) -> Result<InputFile> {
        InputFile::parse_str(&std::fs::read_to_string(path)?)
    }

    /// The free complex an input denotes, plus the torus it lives on when
    /// the input is torus-flavored.
    pub fn realize(&self, order: MonomialOrder) -> Result<(FreeComplex, Option<CharacterTorus>)> {
        match self {
            InputFile::Objects(f) => {
                let e = f.to_elementary(order)?;
                let c = crate::transform::transform_sum(&e)?;
                Ok((c, Some(e.torus.clone())))
            }
            InputFile::Complex(f) => {
                let c = f.to_complex()?;
                let torus = if c.ring.n() % 2 == 0 {
                    Some(CharacterTorus::on_ring(c.ring.n() / 2, &c.ring))
                } else {
                    None
                };
                Ok((c, torus))
            }
            InputFile::Module(_) => Err(Error::InvalidInput(
                "module files describe IC inputs, not complexes".into(),
            )),
        }
    }

    pub fn expect(&self) -> Option<&ExpectBlock> {
        match self {
            InputFile::Objects(f) => f.expect.as_ref(),
            InputFile::Complex(f) => f.expect.as_ref(),
            InputFile::Module(f) => f.expect.as_ref(),
        }
    }
}

fn codim_json(c: Codim) -> Value {
    match c {
        Codim::Finite(v) => json!(v),
        Codim::Infinity => json!("infinity"),
    }
}

fn subtorus_json(t: &TranslatedSubtorus) -> Value {
    json!({
        "basis": t.basis,
        "values": t.values.iter().map(fmt_q).collect::<Vec<_>>(),
    })
}

/// {k, m, components: [{generators, codim, subtorus?, arithmetic?}], certified}
pub fn locus_report(
    locus: &JumpLocus,
    torus: &CharacterTorus,
    max_order: usize,
) -> Result<Value> {
    let mut components = Vec::new();
    for ideal in &locus.components {
        let mut entry = serde_json::Map::new();
        entry.insert(
            "generators".into(),
            json!(ideal.generators.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
        );
        entry.insert("codim".into(), codim_json(ideal.codim()?));
        let dec = decompose_translated_subtori(ideal, torus)?;
        if dec.certified && dec.subtori.len() == 1 {
            entry.insert("subtorus".into(), subtorus_json(&dec.subtori[0]));
            entry.insert(
                "arithmetic".into(),
                json!(torsion_check(&dec.subtori[0], max_order)),
            );
        }
        components.push(Value::Object(entry));
    }
    let certified = crate::loci::decompose_locus(locus, torus)?.certified;
    Ok(json!({
        "k": locus.k,
        "m": locus.m,
        "components": components,
        "certified": certified,
    }))
}

/// {leq, geq, heart, profile: [{degree, codim}], surprise?}
pub fn perversity_report(c: &FreeComplex, torus: Option<&CharacterTorus>) -> Result<Value> {
    let m = crate::perversity::make_m(c.ring.n());
    let leq = crate::perversity::in_leq(c, 0, &m, torus)?;
    let geq = crate::perversity::in_geq(c, 0, &m, torus)?;
    let profile = c.support_profile(torus.map(|t| &t.unit_monomial))?;
    let prof_json: Vec<Value> = profile
        .entries
        .iter()
        .map(|(&d, &(_, cd))| json!({"degree": d, "codim": codim_json(cd)}))
        .collect();
    let mut out = json!({
        "leq": leq,
        "geq": geq,
        "heart": leq && geq,
        "profile": prof_json,
    });
    if let Some(t) = torus {
        match crate::perversity::surprise_diagnostics(c, t) {
            Ok(rep) => {
                out["surprise"] = json!({
                    "r": rep.r,
                    "codim": codim_json(rep.codim),
                    "equi_certified": rep.equi_certified,
                });
            }
            Err(Error::PreconditionFailed(_)) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// {h0_matches, codim_bounds: [{i, codim, required}], m_perverse,
///  dual_h0_matches, dual_codim_ok, stable_under_ell_increase}
pub fn ic_report(rep: &ICReport) -> Value {
    json!({
        "h0_matches": rep.h0_matches,
        "codim_bounds": rep.codim_bounds.iter().map(|b| json!({
            "i": b.i,
            "codim": codim_json(b.codim),
            "required": b.required,
        })).collect::<Vec<_>>(),
        "m_perverse": rep.m_perverse,
        "dual_h0_matches": rep.dual_h0_matches,
        "dual_codim_ok": rep.dual_codim_ok,
        "stable_under_ell_increase": rep.stable_under_ell_increase,
    })
}

pub fn fiber_report(dims: &BTreeMap<i32, usize>) -> Value {
    json!({
        "dims": dims.iter().map(|(d, n)| json!({"degree": d, "dim": n})).collect::<Vec<_>>(),
    })
}

pub fn parse_point(s: &str) -> Result<CharacterPoint> {
    let coords: Vec<Q> = s
        .split(',')
        .map(parse_q)
        .collect::<Result<_>>()?;
    CharacterPoint::new(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::transform::mellin_transform;

    #[test]
    fn complex_round_trip() {
        let t = CharacterTorus::new(1, MonomialOrder::GrevLex).unwrap();
        let obj = LocalSystemObject::skyscraper(t.clone(), 2, 0).unwrap();
        let mut c = mellin_transform(&obj).unwrap();
        c = crate::complex::koszul_complex(
            &t.ring,
            &[PolyMatrix::from_rows(
                &t.ring,
                vec![vec![Poly::parse(&t.ring, "x1 - 1").unwrap()]],
            )],
        )
        .unwrap()
        .direct_sum(&c)
        .unwrap();
        let j = ComplexJson::from_complex(&c);
        let text = serde_json::to_string(&j).unwrap();
        let back: ComplexJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_complex().unwrap(), c);
        assert_eq!(serde_json::to_string(&back).unwrap(), text);
    }

    #[test]
    fn objects_round_trip() {
        let src = r#"{
            "g": 1,
            "objects": [{
                "id": "a",
                "h": 1,
                "embedding": [[1, 0], [0, 1]],
                "monodromy": [[["2"]], [["5"]]],
                "twist": ["1", "-1/3"],
                "shift": 1
            }]
        }"#;
        let f: InputFile = InputFile::parse_str(src).unwrap();
        let InputFile::Objects(obj) = &f else { panic!("expected objects file") };
        let e = obj.to_elementary(MonomialOrder::GrevLex).unwrap();
        let printed = ObjectsFile::from_elementary(&e);
        assert_eq!(printed.objects[0].twist, vec!["1", "-1/3"]);
        assert_eq!(printed.objects[0].monodromy[1][0][0], "5");
        let (c, torus) = f.realize(MonomialOrder::GrevLex).unwrap();
        assert!(torus.is_some());
        assert_eq!((c.lo, c.hi), (-1, 1));
    }

    #[test]
    fn module_file_to_ic_input() {
        let src = r#"{
            "ring": {"vars": ["x1", "x2"], "order": "grevlex"},
            "generators": 1,
            "relations": [],
            "torus_mode": false,
            "expect": {"reflexive": true}
        }"#;
        let f = InputFile::parse_str(src).unwrap();
        let InputFile::Module(m) = &f else { panic!("expected module file") };
        let inp = m.to_ic_input().unwrap();
        assert!(inp.module.is_reflexive().unwrap());
        assert_eq!(f.expect().unwrap().reflexive, Some(true));
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(parse_q("abc").is_err());
        assert!(parse_point("1,0").is_err()); // zero coordinate
        assert!(order_from_str("deglex").is_err());
        let src = r#"{"ring": {"vars": ["x1"], "order": "grevlex"}, "lo": 0, "hi": 1,
                      "ranks": {"0": 1, "1": 1}, "differentials": {"0": [["x1 +"]]}}"#;
        let f = InputFile::parse_str(src).unwrap();
        let InputFile::Complex(c) = f else { panic!() };
        assert!(matches!(c.to_complex(), Err(Error::Parse { .. })));
    }

    #[test]
    fn locus_report_shape() {
        let t = CharacterTorus::new(1, MonomialOrder::GrevLex).unwrap();
        let obj = LocalSystemObject::new(
            t.clone(),
            1,
            vec![vec![1, 0], vec![0, 1]],
            vec![QMatrix::identity(1); 2],
            CharacterPoint::trivial(2),
            1,
        )
        .unwrap();
        let c = mellin_transform(&obj).unwrap();
        let locus = crate::loci::jump_locus(&c, 1, 1, &t).unwrap();
        let rep = locus_report(&locus, &t, 2).unwrap();
        assert_eq!(rep["k"], 1);
        assert_eq!(rep["certified"], true);
        let comp = &rep["components"][0];
        assert_eq!(comp["codim"], 2);
        assert_eq!(comp["arithmetic"], true);
        assert_eq!(comp["subtorus"]["values"], json!(["1", "1"]));
    }
}
