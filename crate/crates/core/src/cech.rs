//! Degree slices of the localization complex of a coefficient-monomial
//! ideal, and the local cohomology components they compute.
//!
//! For generators f_k = c_k X^{w_k} and a subset S of them, the localization
//! at the product f_S = c_S X^{w_S} has degree-u component zero when some
//! variable outside supp(w_S) would need a negative exponent; otherwise it is
//! a copy of A when c_S is a p-unit and a copy of K when p divides c_S. The
//! maps are localization maps, which act as the identity on the degree-u
//! coordinate under the common embedding into K, with the alternating sign of
//! the inserted index.

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::module_calc::{cohomology_at, ChainMap, ElementaryModule, ModuleShape, SummandTag};
use crate::scalar::{PrimeParam, Scalar};

/// One generator c X^w with c a nonzero element of Z_(p) and w in N^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CMonomialGenerator {
    pub coeff: Scalar,
    pub exponent: Vec<u32>,
}

/// A coefficient-monomial ideal of Z_(p)[X_1, ..., X_n], kept as the
/// generators the user wrote; no radical or minimality normalization is
/// applied, since the localization complex computes the same cohomology for
/// any generating set with the same radical.
#[derive(Debug, Clone)]
pub struct IdealSpec {
    p: PrimeParam,
    n: usize,
    generators: Vec<CMonomialGenerator>,
}

/// Hard cap on the generator count; the localization diagram has 2^r nodes.
pub const MAX_GENERATORS: usize = 16;

/// Hard cap on the variable count; windowed sweeps walk (2W+1)^n degrees.
pub const MAX_VARIABLES: usize = 32;

impl IdealSpec {
    pub fn new(p: PrimeParam, n: usize, generators: Vec<CMonomialGenerator>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidIdeal("need at least one variable".into()));
        }
        if n > MAX_VARIABLES {
            return Err(Error::InvalidIdeal(format!(
                "{n} variables exceeds the supported maximum {MAX_VARIABLES}"
            )));
        }
        if generators.is_empty() {
            return Err(Error::InvalidIdeal(
                "ideal needs at least one generator".into(),
            ));
        }
        if generators.len() > MAX_GENERATORS {
            return Err(Error::TooManyGenerators(generators.len()));
        }
        for (k, g) in generators.iter().enumerate() {
            if g.coeff.is_zero() {
                return Err(Error::InvalidIdeal(format!(
                    "generator {} has zero coefficient",
                    k + 1
                )));
            }
            if !g.coeff.is_integral(&p) {
                return Err(Error::InvalidIdeal(format!(
                    "generator {} has coefficient of negative valuation",
                    k + 1
                )));
            }
            if g.exponent.len() != n {
                return Err(Error::InvalidIdeal(format!(
                    "generator {} has exponent of length {}, expected {}",
                    k + 1,
                    g.exponent.len(),
                    n
                )));
            }
        }
        Ok(IdealSpec { p, n, generators })
    }

    pub fn prime(&self) -> &PrimeParam {
        &self.p
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[CMonomialGenerator] {
        &self.generators
    }

    /// The same ideal with one generator appended.
    pub fn with_extra_generator(&self, g: CMonomialGenerator) -> Result<IdealSpec> {
        let mut gens = self.generators.clone();
        gens.push(g);
        IdealSpec::new(self.p, self.n, gens)
    }
}

/// A multidegree u in Z^n.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct GradedDegree(pub Vec<i64>);

impl GradedDegree {
    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    /// Indices with strictly positive entry.
    pub fn supp_plus(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|&i| self.0[i] > 0).collect()
    }
}

impl std::fmt::Display for GradedDegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

/// Degree-u component of one localization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocalizationKind {
    Zero,
    FreeA,
    FullK,
}

/// Static data of a localization vertex: which generators are inverted, the
/// valuation of the coefficient product, and the union of exponent supports.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Slot {
    pub mask: u32,
    pub coeff_val: i64,
    pub supp_mask: u64,
}

impl Slot {
    /// Degree-u sign condition: every variable outside the inverted support
    /// must appear with nonnegative exponent.
    pub fn sign_alive(&self, u: &GradedDegree) -> bool {
        u.coords()
            .iter()
            .enumerate()
            .all(|(j, &uj)| self.supp_mask >> j & 1 == 1 || uj >= 0)
    }
}

/// All 2^r localization vertices, grouped by subset size; within one size,
/// subsets are ordered lexicographically as sorted index lists.
pub(crate) fn enumerate_slots(ideal: &IdealSpec) -> Vec<Vec<Slot>> {
    let r = ideal.num_generators();
    let p = ideal.prime();
    let gen_vals: Vec<i64> = ideal
        .generators()
        .iter()
        .map(|g| g.coeff.valuation(p).finite().expect("nonzero coefficient"))
        .collect();
    let gen_supp: Vec<u64> = ideal
        .generators()
        .iter()
        .map(|g| {
            g.exponent
                .iter()
                .enumerate()
                .fold(0u64, |m, (j, &e)| if e > 0 { m | 1 << j } else { m })
        })
        .collect();
    let slot_of_mask = |mask: u32| {
        let mut coeff_val = 0i64;
        let mut supp_mask = 0u64;
        for k in 0..r {
            if mask >> k & 1 == 1 {
                coeff_val += gen_vals[k];
                supp_mask |= gen_supp[k];
            }
        }
        Slot {
            mask,
            coeff_val,
            supp_mask,
        }
    };
    (0..=r)
        .map(|t| {
            combinations_lex(r, t)
                .into_iter()
                .map(slot_of_mask)
                .collect()
        })
        .collect()
}

/// Bitmasks of all size-t subsets of {0, ..., r-1} in lexicographic order of
/// the sorted index lists.
pub(crate) fn combinations_lex(r: usize, t: usize) -> Vec<u32> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..t).collect();
    if t > r {
        return out;
    }
    loop {
        out.push(idx.iter().fold(0u32, |m, &i| m | 1 << i));
        // Advance to the next combination.
        let mut i = t;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + r - t {
                break;
            }
        }
        idx[i] += 1;
        for j in i + 1..t {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Sign of the localization map from S to S + {k}: the parity of the number
/// of inverted indices below k.
pub(crate) fn insertion_sign(mask: u32, k: usize) -> i64 {
    let below = (mask & ((1u32 << k) - 1)).count_ones();
    if below.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Degree-u component of the localization at the product of the generators
/// indexed by `subset` (0-based, nonempty).
pub fn localization_component(
    ideal: &IdealSpec,
    subset: &[usize],
    u: &GradedDegree,
) -> LocalizationKind {
    assert!(!subset.is_empty(), "localization subset must be nonempty");
    assert_eq!(u.coords().len(), ideal.num_vars(), "degree length mismatch");
    let mask = subset.iter().fold(0u32, |m, &i| m | 1 << i);
    let p = ideal.prime();
    let mut coeff_val = 0i64;
    let mut supp_mask = 0u64;
    for (k, g) in ideal.generators().iter().enumerate() {
        if mask >> k & 1 == 1 {
            coeff_val += g.coeff.valuation(p).finite().expect("nonzero coefficient");
            supp_mask |=
                g.exponent
                    .iter()
                    .enumerate()
                    .fold(0u64, |m, (j, &e)| if e > 0 { m | 1 << j } else { m });
        }
    }
    let slot = Slot {
        mask,
        coeff_val,
        supp_mask,
    };
    if !slot.sign_alive(u) {
        LocalizationKind::Zero
    } else if coeff_val == 0 {
        LocalizationKind::FreeA
    } else {
        LocalizationKind::FullK
    }
}

/// The degree-u slice of the localization complex: one term per cohomological
/// position, zero summands dropped. `alive[t]` keeps the subset masks backing
/// the summands of position t, for provenance.
#[derive(Debug, Clone)]
pub struct DegreeComplex {
    pub terms: Vec<ElementaryModule>,
    pub maps: Vec<ChainMap>,
    pub alive: Vec<Vec<u32>>,
}

pub fn build_degree_complex(ideal: &IdealSpec, u: &GradedDegree) -> DegreeComplex {
    assert_eq!(u.coords().len(), ideal.num_vars(), "degree length mismatch");
    let p = ideal.prime();
    let slots = enumerate_slots(ideal);
    let r = ideal.num_generators();

    let mut alive: Vec<Vec<u32>> = Vec::with_capacity(r + 1);
    let mut tags: Vec<Vec<SummandTag>> = Vec::with_capacity(r + 1);
    for level in &slots {
        let mut masks = Vec::new();
        let mut level_tags = Vec::new();
        for slot in level {
            if slot.sign_alive(u) {
                masks.push(slot.mask);
                level_tags.push(if slot.coeff_val == 0 {
                    SummandTag::FreeA
                } else {
                    SummandTag::FullK
                });
            }
        }
        alive.push(masks);
        tags.push(level_tags);
    }

    let terms: Vec<ElementaryModule> = tags
        .iter()
        .map(|t| ElementaryModule::new(t.clone()))
        .collect();

    let mut maps = Vec::with_capacity(r);
    for t in 0..r {
        let src = &alive[t];
        let tgt = &alive[t + 1];
        let mut matrix = Matrix::zero(tgt.len(), src.len());
        for (row, &tm) in tgt.iter().enumerate() {
            for (col, &sm) in src.iter().enumerate() {
                let diff = tm & !sm;
                if sm & !tm == 0 && diff.count_ones() == 1 {
                    let k = diff.trailing_zeros() as usize;
                    matrix.set(row, col, Scalar::from_int(insertion_sign(sm, k)));
                }
            }
        }
        let map = ChainMap::new(terms[t].clone(), terms[t + 1].clone(), matrix, p)
            .expect("localization maps satisfy the hom constraints");
        maps.push(map);
    }

    for t in 0..maps.len().saturating_sub(1) {
        assert!(
            maps[t].composes_to_zero(&maps[t + 1]),
            "sign bookkeeping broke the complex at position {t}"
        );
    }

    DegreeComplex { terms, maps, alive }
}

/// Shape of H^i of the degree-u slice; zero for i outside [0, r].
pub fn local_cohomology_component(
    ideal: &IdealSpec,
    i: usize,
    u: &GradedDegree,
) -> Result<ModuleShape> {
    if i > ideal.num_generators() {
        return Ok(ModuleShape::zero());
    }
    let complex = build_degree_complex(ideal, u);
    cohomology_at(&complex.terms, &complex.maps, i, ideal.prime())
}

// ---------------------------------------------------------------------------
// Ideal documents: a line-oriented text form and a JSON form, both accepted
// by `parse_ideal` and both produced by the writers below.

#[derive(Serialize, Deserialize)]
struct IdealDoc {
    p: u64,
    n: usize,
    generators: Vec<GeneratorDoc>,
}

#[derive(Serialize, Deserialize)]
struct GeneratorDoc {
    coeff: CoeffDoc,
    exponent: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffDoc {
    Int(i64),
    Text(String),
}

impl CoeffDoc {
    fn to_scalar(&self) -> Result<Scalar> {
        match self {
            CoeffDoc::Int(n) => Ok(Scalar::from_int(*n)),
            CoeffDoc::Text(s) => {
                let n: BigInt = s
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidIdeal(format!("bad integer coefficient {s:?}")))?;
                Ok(Scalar::from_bigint(n))
            }
        }
    }

    fn from_scalar(s: &Scalar) -> CoeffDoc {
        use num_traits::ToPrimitive;
        debug_assert!(s.is_integer());
        let n = s.to_rational().to_integer();
        match n.to_i64() {
            Some(v) => CoeffDoc::Int(v),
            None => CoeffDoc::Text(n.to_string()),
        }
    }
}

/// Parse an ideal document. A leading `{` selects the JSON form; anything
/// else is read as the line-oriented text form:
///
/// ```text
/// # comment
/// p = 5
/// n = 2
/// gen = 25 [2 0]
/// gen = 1 [1 1]
/// ```
pub fn parse_ideal(text: &str) -> Result<IdealSpec> {
    if text.trim_start().starts_with('{') {
        parse_ideal_json(text)
    } else {
        parse_ideal_text(text)
    }
}

fn parse_ideal_json(text: &str) -> Result<IdealSpec> {
    let doc: IdealDoc = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        msg: e.to_string(),
    })?;
    ideal_from_doc(doc)
}

fn ideal_from_doc(doc: IdealDoc) -> Result<IdealSpec> {
    let p = PrimeParam::new(doc.p).map_err(|_| Error::InvalidIdeal("p must be prime".into()))?;
    let generators = doc
        .generators
        .iter()
        .map(|g| {
            Ok(CMonomialGenerator {
                coeff: g.coeff.to_scalar()?,
                exponent: g.exponent.clone(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    IdealSpec::new(p, doc.n, generators)
}

fn parse_ideal_text(text: &str) -> Result<IdealSpec> {
    let mut p: Option<(u64, usize)> = None;
    let mut n: Option<usize> = None;
    let mut gens: Vec<CMonomialGenerator> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::Parse {
                line: line_no,
                msg: format!("expected `key = value`, got {line:?}"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        match key {
            "p" => {
                if p.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "duplicate p".into(),
                    });
                }
                let v = value.parse::<u64>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad p value {value:?}"),
                })?;
                p = Some((v, line_no));
            }
            "n" => {
                if n.is_some() {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "duplicate n".into(),
                    });
                }
                let v = value.parse::<usize>().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad n value {value:?}"),
                })?;
                n = Some(v);
            }
            "gen" => {
                let Some(n) = n else {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "n must be declared before generators".into(),
                    });
                };
                gens.push(parse_generator(value, n, line_no)?);
            }
            other => {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("unknown key {other:?}"),
                });
            }
        }
    }
    let Some((p_val, p_line)) = p else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing p".into(),
        });
    };
    let Some(n) = n else {
        return Err(Error::Parse {
            line: 0,
            msg: "missing n".into(),
        });
    };
    let p = PrimeParam::new(p_val).map_err(|_| Error::Parse {
        line: p_line,
        msg: "p must be prime".into(),
    })?;
    IdealSpec::new(p, n, gens)
}

/// `<coeff> [e_1 e_2 ... e_n]`
fn parse_generator(value: &str, n: usize, line_no: usize) -> Result<CMonomialGenerator> {
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let Some((coeff_part, rest)) = value.split_once('[') else {
        return Err(err(format!(
            "generator needs a bracketed exponent list, got {value:?}"
        )));
    };
    let Some((exp_part, tail)) = rest.split_once(']') else {
        return Err(err("unterminated exponent list".into()));
    };
    if !tail.trim().is_empty() {
        return Err(err(format!(
            "trailing input after exponent list: {:?}",
            tail.trim()
        )));
    }
    let coeff_text = coeff_part.trim();
    let coeff: BigInt = coeff_text
        .parse()
        .map_err(|_| err(format!("bad integer coefficient {coeff_text:?}")))?;
    let exponent = exp_part
        .split_whitespace()
        .map(|tok| {
            tok.parse::<u32>()
                .map_err(|_| err(format!("bad exponent {tok:?} (need a nonnegative integer)")))
        })
        .collect::<Result<Vec<u32>>>()?;
    if exponent.len() != n {
        return Err(err(format!(
            "exponent list has {} entries, expected {n}",
            exponent.len()
        )));
    }
    Ok(CMonomialGenerator {
        coeff: Scalar::from_bigint(coeff),
        exponent,
    })
}

/// Canonical text form; `parse_ideal` round-trips it.
pub fn ideal_to_text(ideal: &IdealSpec) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    writeln!(out, "p = {}", ideal.prime().value()).unwrap();
    writeln!(out, "n = {}", ideal.num_vars()).unwrap();
    for g in ideal.generators() {
        let exps: Vec<String> = g.exponent.iter().map(u32::to_string).collect();
        writeln!(out, "gen = {} [{}]", g.coeff, exps.join(" ")).unwrap();
    }
    out
}

/// Canonical JSON form; `parse_ideal` round-trips it.
pub fn ideal_to_json(ideal: &IdealSpec) -> String {
    let doc = IdealDoc {
        p: ideal.prime().value(),
        n: ideal.num_vars(),
        generators: ideal
            .generators()
            .iter()
            .map(|g| GeneratorDoc {
                coeff: CoeffDoc::from_scalar(&g.coeff),
                exponent: g.exponent.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("ideal documents serialize")
}
