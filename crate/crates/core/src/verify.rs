//! Block decomposition of Z^n, windowed sweeps, Bass numbers, and the
//! verification passes: constancy of shapes and Bass numbers on blocks,
//! boundedness of torsion exponents by the unit-cube maximum, and the two
//! field-oracle identities.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cech::{build_degree_complex, GradedDegree, IdealSpec};
use crate::error::Result;
use crate::module_calc::{cohomology_at, ModuleShape};
use crate::oracle::{all_dims_over_fp, all_dims_over_q, FieldDim};

/// One of the 2^n blocks of Z^n: degrees that are nonnegative exactly at the
/// member variables and at most -1 elsewhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct BlockId {
    n: usize,
    mask: u64,
}

impl BlockId {
    /// 1-based indices of the variables with nonnegative entries.
    pub fn members(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|j| self.mask >> j & 1 == 1)
            .map(|j| j + 1)
            .collect()
    }

    /// The corner closest to the origin: 0 at members, -1 elsewhere.
    pub fn corner(&self) -> GradedDegree {
        GradedDegree(
            (0..self.n)
                .map(|j| if self.mask >> j & 1 == 1 { 0 } else { -1 })
                .collect(),
        )
    }

    pub fn contains(&self, u: &GradedDegree) -> bool {
        u.coords().len() == self.n
            && u.coords()
                .iter()
                .enumerate()
                .all(|(j, &uj)| (uj >= 0) == (self.mask >> j & 1 == 1))
    }

    /// Compact label for reports: member indices joined by `+`, `-` for the
    /// empty set.
    pub fn label(&self) -> String {
        let members = self.members();
        if members.is_empty() {
            "-".to_string()
        } else {
            members
                .iter()
                .map(usize::to_string)
                .collect::<Vec<_>>()
                .join("+")
        }
    }
}

impl Serialize for BlockId {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.label())
    }
}

impl std::fmt::Display for BlockId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "B({})", self.label())
    }
}

/// All 2^n blocks, full member set first: for n = 2 the corners come out as
/// (0,0), (-1,0), (0,-1), (-1,-1).
pub fn blocks(n: usize) -> Vec<BlockId> {
    assert!((1..=63).contains(&n));
    (0..1u64 << n)
        .rev()
        .map(|mask| BlockId { n, mask })
        .collect()
}

/// The unique block containing u.
pub fn block_of(u: &GradedDegree) -> BlockId {
    let n = u.coords().len();
    let mask = u
        .coords()
        .iter()
        .enumerate()
        .fold(0u64, |m, (j, &uj)| if uj >= 0 { m | 1 << j } else { m });
    BlockId { n, mask }
}

/// First two Bass numbers of a component shape with respect to the maximal
/// ideal of A. The higher ones vanish identically: A/pA has the length-one
/// free resolution multiplication-by-p, so Ext^i vanishes for i >= 2 and no
/// column for them exists anywhere in the reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BassNumbers {
    pub mu0: usize,
    pub mu1: usize,
}

pub fn bass_numbers(shape: &ModuleShape) -> BassNumbers {
    let t = shape.torsion_count();
    BassNumbers {
        mu0: shape.l + t,
        mu1: shape.a + t,
    }
}

/// Everything computed for one (i, u) cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentReport {
    pub i: usize,
    pub u: Vec<i64>,
    pub shape: ModuleShape,
    pub mu0: usize,
    pub mu1: usize,
    pub dim_q: FieldDim,
    pub dim_fp: FieldDim,
}

impl ComponentReport {
    pub fn degree(&self) -> GradedDegree {
        GradedDegree(self.u.clone())
    }

    pub fn block(&self) -> BlockId {
        block_of(&self.degree())
    }
}

/// All degrees in [-window, window]^n in lexicographic order.
fn window_cells(n: usize, window: u32) -> Vec<Vec<i64>> {
    let w = window as i64;
    let mut cells = vec![Vec::new()];
    for _ in 0..n {
        cells = cells
            .into_iter()
            .flat_map(|prefix| {
                (-w..=w).map(move |x| {
                    let mut v = prefix.clone();
                    v.push(x);
                    v
                })
            })
            .collect();
    }
    cells
}

/// Refuse sweeps whose windows could not be materialized.
const MAX_SWEEP_CELLS: u128 = 50_000_000;

/// Compute reports for every u in the window and every requested i, in
/// deterministic (i, then lexicographic u) order. Cells run in parallel; the
/// output order does not depend on the parallelism degree.
pub fn sweep(ideal: &IdealSpec, window: u32, i_list: &[usize]) -> Result<Vec<ComponentReport>> {
    assert!(window >= 1, "window must be at least 1");
    let mut wanted: Vec<usize> = i_list.to_vec();
    wanted.sort_unstable();
    wanted.dedup();
    if wanted.is_empty() {
        return Ok(Vec::new());
    }
    let cell_count = (2u128 * window as u128 + 1)
        .checked_pow(ideal.num_vars() as u32)
        .unwrap_or(u128::MAX);
    if cell_count > MAX_SWEEP_CELLS {
        return Err(crate::error::Error::WindowTooLarge {
            cells: cell_count,
            limit: MAX_SWEEP_CELLS,
        });
    }
    let cells = window_cells(ideal.num_vars(), window);
    let p = ideal.prime();
    let per_cell: Vec<Vec<ComponentReport>> = cells
        .par_iter()
        .map(|u| -> Result<Vec<ComponentReport>> {
            let degree = GradedDegree(u.clone());
            let complex = build_degree_complex(ideal, &degree);
            let q = all_dims_over_q(ideal, &degree);
            let fp = all_dims_over_fp(ideal, &degree);
            wanted
                .iter()
                .map(|&i| {
                    let shape = cohomology_at(&complex.terms, &complex.maps, i, p)?;
                    let bass = bass_numbers(&shape);
                    Ok(ComponentReport {
                        i,
                        u: u.clone(),
                        shape,
                        mu0: bass.mu0,
                        mu1: bass.mu1,
                        dim_q: FieldDim(q.dims.get(i).copied().unwrap_or(0)),
                        dim_fp: FieldDim(fp.dims.get(i).copied().unwrap_or(0)),
                    })
                })
                .collect()
        })
        .collect::<Result<Vec<_>>>()?;
    let mut reports: Vec<ComponentReport> = per_cell.into_iter().flatten().collect();
    reports.sort_by(|x, y| (x.i, &x.u).cmp(&(y.i, &y.u)));
    Ok(reports)
}

/// Constancy result for one (i, block) pair.
#[derive(Debug, Clone, Serialize)]
pub struct BlockConstancy {
    pub i: usize,
    pub block: BlockId,
    pub constant: bool,
    pub witness: ModuleShape,
    /// A degree whose shape differs from the witness, if any.
    pub counterexample: Option<(Vec<i64>, ModuleShape)>,
    pub mu_constant: bool,
    pub mu_counterexample: Option<(Vec<i64>, BassNumbers)>,
}

/// Compare every shape in each (i, block) group against the block corner's
/// shape, componentwise including the full alpha vector; Bass numbers are
/// checked the same way on top.
pub fn verify_block_constancy(reports: &[ComponentReport]) -> Vec<BlockConstancy> {
    let mut groups: BTreeMap<(usize, std::cmp::Reverse<u64>), Vec<&ComponentReport>> =
        BTreeMap::new();
    for rep in reports {
        let block = rep.block();
        groups
            .entry((rep.i, std::cmp::Reverse(block.mask)))
            .or_default()
            .push(rep);
    }
    let mut out = Vec::new();
    for ((i, std::cmp::Reverse(mask)), group) in groups {
        let n = group[0].u.len();
        let block = BlockId { n, mask };
        let corner = block.corner();
        let witness = group
            .iter()
            .find(|r| r.u == corner.coords())
            .or_else(|| group.first())
            .expect("group is nonempty");
        let mut counterexample = None;
        let mut mu_counterexample = None;
        for rep in &group {
            if counterexample.is_none() && rep.shape != witness.shape {
                counterexample = Some((rep.u.clone(), rep.shape.clone()));
            }
            if mu_counterexample.is_none() && (rep.mu0, rep.mu1) != (witness.mu0, witness.mu1) {
                mu_counterexample = Some((
                    rep.u.clone(),
                    BassNumbers {
                        mu0: rep.mu0,
                        mu1: rep.mu1,
                    },
                ));
            }
        }
        out.push(BlockConstancy {
            i,
            block,
            constant: counterexample.is_none(),
            witness: witness.shape.clone(),
            counterexample,
            mu_constant: mu_counterexample.is_none(),
            mu_counterexample,
        });
    }
    out
}

/// Torsion exponent bound: m over the cube [-1,1]^n, s over the whole
/// window.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TorsionBound {
    pub m: usize,
    pub s: usize,
    pub bound_ok: bool,
}

pub fn verify_torsion_bound(reports: &[ComponentReport]) -> TorsionBound {
    let mut m = 0usize;
    let mut s = 0usize;
    for rep in reports {
        let beta = rep.shape.max_torsion_exponent();
        s = s.max(beta);
        if rep.u.iter().all(|&x| (-1..=1).contains(&x)) {
            m = m.max(beta);
        }
    }
    TorsionBound {
        m,
        s,
        bound_ok: s <= m,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleFailure {
    pub i: usize,
    pub u: Vec<i64>,
    pub expected: usize,
    pub got: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct EulerFailure {
    pub u: Vec<i64>,
    pub alternating_dims: i64,
    pub alternating_slots: i64,
    pub over: String,
}

/// Results of the field-oracle cross-checks.
#[derive(Debug, Clone, Serialize, Default)]
pub struct OracleChecks {
    /// Cells where dim over Q differs from a + b.
    pub q_failures: Vec<OracleFailure>,
    /// Cells where dim over F_p differs from a_i + t_i + l_{i+1} + t_{i+1}.
    pub fp_failures: Vec<OracleFailure>,
    /// Degrees where an alternating-sum identity fails.
    pub euler_failures: Vec<EulerFailure>,
    /// F_p identity cells skipped because the i+1 shape was not swept.
    pub fp_skipped: usize,
}

impl OracleChecks {
    pub fn passed(&self) -> bool {
        self.q_failures.is_empty() && self.fp_failures.is_empty() && self.euler_failures.is_empty()
    }
}

/// Check the two rank identities tying the field oracles to the shapes.
///
/// Over Q, tensoring kills torsion and the divisible-torsion part, so the
/// component dimension is a + b. Over F_p, the reduction long exact sequence
/// splits dimensionwise into the cokernel of p on H^i (dimension a_i + t_i)
/// and the kernel of p on H^{i+1} (dimension l_{i+1} + t_{i+1}).
///
/// Euler characteristics over both fields compare the alternating sum of
/// component dimensions with the alternating count of surviving slots; they
/// are checked for every degree whose full position range was swept.
pub fn verify_oracle_identities(ideal: &IdealSpec, reports: &[ComponentReport]) -> OracleChecks {
    let r = ideal.num_generators();
    let shape_at: BTreeMap<(usize, &[i64]), &ModuleShape> = reports
        .iter()
        .map(|rep| ((rep.i, rep.u.as_slice()), &rep.shape))
        .collect();
    let mut checks = OracleChecks::default();

    for rep in reports {
        let expected_q = rep.shape.a + rep.shape.b;
        if rep.dim_q.0 != expected_q {
            checks.q_failures.push(OracleFailure {
                i: rep.i,
                u: rep.u.clone(),
                expected: expected_q,
                got: rep.dim_q.0,
            });
        }
        let next = shape_at.get(&(rep.i + 1, rep.u.as_slice())).copied();
        let next_shape = match next {
            Some(s) => s.clone(),
            None if rep.i + 1 > r => ModuleShape::zero(),
            None => {
                checks.fp_skipped += 1;
                continue;
            }
        };
        let expected_fp =
            rep.shape.a + rep.shape.torsion_count() + next_shape.l + next_shape.torsion_count();
        if rep.dim_fp.0 != expected_fp {
            checks.fp_failures.push(OracleFailure {
                i: rep.i,
                u: rep.u.clone(),
                expected: expected_fp,
                got: rep.dim_fp.0,
            });
        }
    }

    // Euler characteristics, per degree with full i coverage.
    let mut by_u: BTreeMap<&[i64], Vec<&ComponentReport>> = BTreeMap::new();
    for rep in reports {
        by_u.entry(rep.u.as_slice()).or_default().push(rep);
    }
    for (u, group) in by_u {
        let covered: std::collections::BTreeSet<usize> = group.iter().map(|r| r.i).collect();
        if !(0..=r).all(|i| covered.contains(&i)) {
            continue;
        }
        let degree = GradedDegree(u.to_vec());
        let alt = |xs: &[usize]| -> i64 {
            xs.iter()
                .enumerate()
                .map(|(t, &x)| if t % 2 == 0 { x as i64 } else { -(x as i64) })
                .sum()
        };
        let q = all_dims_over_q(ideal, &degree);
        let fp = all_dims_over_fp(ideal, &degree);
        for (dims, counts, name) in [
            (&q.dims, &q.slot_counts, "Q"),
            (&fp.dims, &fp.slot_counts, "F_p"),
        ] {
            let lhs = alt(dims);
            let rhs = alt(counts);
            if lhs != rhs {
                checks.euler_failures.push(EulerFailure {
                    u: u.to_vec(),
                    alternating_dims: lhs,
                    alternating_slots: rhs,
                    over: name.to_string(),
                });
            }
        }
    }
    checks
}

/// Combined verdict of all verification passes.
#[derive(Debug, Clone, Serialize)]
pub struct VerificationVerdict {
    pub constancy: Vec<BlockConstancy>,
    pub torsion: TorsionBound,
    pub oracle: OracleChecks,
}

impl VerificationVerdict {
    pub fn passed(&self) -> bool {
        self.constancy.iter().all(|c| c.constant && c.mu_constant)
            && self.torsion.bound_ok
            && self.oracle.passed()
    }

    /// One line per failed check, for diagnostics.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        for c in &self.constancy {
            if let Some((u, shape)) = &c.counterexample {
                out.push(format!(
                    "shape not constant on {} at i={}: corner gives {}, u={:?} gives {}",
                    c.block, c.i, c.witness, u, shape
                ));
            }
            if let Some((u, mu)) = &c.mu_counterexample {
                out.push(format!(
                    "Bass numbers not constant on {} at i={}: u={:?} gives ({}, {})",
                    c.block, c.i, u, mu.mu0, mu.mu1
                ));
            }
        }
        if !self.torsion.bound_ok {
            out.push(format!(
                "torsion bound violated: window max {} exceeds cube max {}",
                self.torsion.s, self.torsion.m
            ));
        }
        for f in &self.oracle.q_failures {
            out.push(format!(
                "Q-rank identity fails at i={}, u={:?}: a+b={}, oracle={}",
                f.i, f.u, f.expected, f.got
            ));
        }
        for f in &self.oracle.fp_failures {
            out.push(format!(
                "F_p-rank identity fails at i={}, u={:?}: expected {}, oracle={}",
                f.i, f.u, f.expected, f.got
            ));
        }
        for f in &self.oracle.euler_failures {
            out.push(format!(
                "Euler identity over {} fails at u={:?}: dims {}, slots {}",
                f.over, f.u, f.alternating_dims, f.alternating_slots
            ));
        }
        out
    }
}

/// Sweep the full position range [0, r] and run every verification pass.
pub fn verify_all(
    ideal: &IdealSpec,
    window: u32,
) -> Result<(Vec<ComponentReport>, VerificationVerdict)> {
    let i_list: Vec<usize> = (0..=ideal.num_generators()).collect();
    let reports = sweep(ideal, window, &i_list)?;
    let verdict = VerificationVerdict {
        constancy: verify_block_constancy(&reports),
        torsion: verify_torsion_bound(&reports),
        oracle: verify_oracle_identities(ideal, &reports),
    };
    Ok((reports, verdict))
}
