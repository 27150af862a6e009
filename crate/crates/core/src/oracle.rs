//! Independent rank computations over the two residue-level fields.
//!
//! Over Q every nonzero coefficient becomes a unit, so a localization slot
//! survives exactly when its sign condition holds; over F_p a slot whose
//! coefficient product has positive valuation is the zero ring and is
//! dropped. Either way the degree-u slice is a complex of finite-dimensional
//! vector spaces with entries 0 and +-1, and its cohomology dimensions follow
//! from rank-nullity.
//!
//! These functions share the subset enumeration and sign conventions with the
//! complex builder and nothing else; elimination here is written against
//! plain scalar rows (Q) and machine residues (F_p), not against the module
//! calculus.

use serde::Serialize;

use crate::cech::{enumerate_slots, insertion_sign, GradedDegree, IdealSpec, Slot};
use crate::scalar::Scalar;

/// A dimension over a field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct FieldDim(pub usize);

/// dim over Q of H^i of the degree-u slice of the localization complex of
/// I Q[X_1..X_n].
pub fn cech_dim_over_q(ideal: &IdealSpec, i: usize, u: &GradedDegree) -> FieldDim {
    FieldDim(all_dims_over_q(ideal, u).dims.get(i).copied().unwrap_or(0))
}

/// dim over F_p of H^i of the degree-u slice of the localization complex of
/// I F_p[X_1..X_n].
pub fn cech_dim_over_fp(ideal: &IdealSpec, i: usize, u: &GradedDegree) -> FieldDim {
    FieldDim(all_dims_over_fp(ideal, u).dims.get(i).copied().unwrap_or(0))
}

/// Dimensions over Q at every position 0..=r in one pass (the ranks are
/// shared between neighbouring positions).
pub fn cech_dims_over_q(ideal: &IdealSpec, u: &GradedDegree) -> Vec<FieldDim> {
    all_dims_over_q(ideal, u)
        .dims
        .into_iter()
        .map(FieldDim)
        .collect()
}

/// Dimensions over F_p at every position 0..=r in one pass.
pub fn cech_dims_over_fp(ideal: &IdealSpec, u: &GradedDegree) -> Vec<FieldDim> {
    all_dims_over_fp(ideal, u)
        .dims
        .into_iter()
        .map(FieldDim)
        .collect()
}

/// Cohomology dimensions at every position, plus the surviving slot counts
/// (for Euler-characteristic checks).
#[derive(Debug, Clone)]
pub(crate) struct OracleDims {
    pub dims: Vec<usize>,
    pub slot_counts: Vec<usize>,
}

pub(crate) fn all_dims_over_q(ideal: &IdealSpec, u: &GradedDegree) -> OracleDims {
    let alive = alive_masks(ideal, u, false);
    let ranks: Vec<usize> = (0..alive.len() - 1)
        .map(|t| rank_q(differential_rows(&alive[t], &alive[t + 1])))
        .collect();
    dims_from_ranks(&alive, &ranks)
}

pub(crate) fn all_dims_over_fp(ideal: &IdealSpec, u: &GradedDegree) -> OracleDims {
    let p = ideal.prime().value();
    let alive = alive_masks(ideal, u, true);
    let ranks: Vec<usize> = (0..alive.len() - 1)
        .map(|t| {
            let rows = differential_rows(&alive[t], &alive[t + 1]);
            let rows_mod_p: Vec<Vec<u64>> = rows
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|v| v.rem_euclid(p as i64) as u64)
                        .collect()
                })
                .collect();
            rank_fp(rows_mod_p, p)
        })
        .collect();
    dims_from_ranks(&alive, &ranks)
}

fn dims_from_ranks(alive: &[Vec<u32>], ranks: &[usize]) -> OracleDims {
    let slot_counts: Vec<usize> = alive.iter().map(Vec::len).collect();
    let dims = (0..alive.len())
        .map(|i| {
            let out = ranks.get(i).copied().unwrap_or(0);
            let inc = if i == 0 { 0 } else { ranks[i - 1] };
            slot_counts[i]
                .checked_sub(out + inc)
                .expect("rank-nullity holds for a complex")
        })
        .collect();
    OracleDims { dims, slot_counts }
}

/// Masks of the slots surviving at degree u, per position. Over F_p
/// (`drop_nonunits`) slots with p dividing the coefficient product are the
/// zero ring.
fn alive_masks(ideal: &IdealSpec, u: &GradedDegree, drop_nonunits: bool) -> Vec<Vec<u32>> {
    enumerate_slots(ideal)
        .iter()
        .map(|level| {
            level
                .iter()
                .filter(|slot: &&Slot| slot.sign_alive(u) && !(drop_nonunits && slot.coeff_val > 0))
                .map(|slot| slot.mask)
                .collect()
        })
        .collect()
}

/// The +-1 incidence rows of the differential between two slot levels.
fn differential_rows(src: &[u32], tgt: &[u32]) -> Vec<Vec<i64>> {
    tgt.iter()
        .map(|&tm| {
            src.iter()
                .map(|&sm| {
                    let diff = tm & !sm;
                    if sm & !tm == 0 && diff.count_ones() == 1 {
                        insertion_sign(sm, diff.trailing_zeros() as usize)
                    } else {
                        0
                    }
                })
                .collect()
        })
        .collect()
}

/// Rank by Gaussian elimination over Q on scalar rows.
#[allow(clippy::needless_range_loop)]
fn rank_q(rows: Vec<Vec<i64>>) -> usize {
    let mut rows: Vec<Vec<Scalar>> = rows
        .into_iter()
        .map(|r| r.into_iter().map(Scalar::from_int).collect())
        .collect();
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = &Scalar::one() / &rows[rank][col];
        for r in rank + 1..nrows {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] * &inv;
            for c in col..ncols {
                if !rows[rank][c].is_zero() {
                    rows[r][c] = &rows[r][c] - &(&f * &rows[rank][c]);
                }
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

/// Rank by Gaussian elimination mod p on machine residues.
#[allow(clippy::needless_range_loop)]
fn rank_fp(mut rows: Vec<Vec<u64>>, p: u64) -> usize {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0usize;
    for col in 0..ncols {
        let Some(pr) = (rank..nrows).find(|&r| !rows[r][col].is_multiple_of(p)) else {
            continue;
        };
        rows.swap(rank, pr);
        let inv = mod_inverse(rows[rank][col] % p, p);
        for r in rank + 1..nrows {
            let lead = rows[r][col] % p;
            if lead == 0 {
                continue;
            }
            let f = lead * inv % p;
            for c in col..ncols {
                let sub = f * (rows[rank][c] % p) % p;
                rows[r][c] = (rows[r][c] % p + p - sub) % p;
            }
        }
        rank += 1;
        if rank == nrows {
            break;
        }
    }
    rank
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p is prime, so a^(p-2) works; exponentiation keeps everything in u128.
    let mut base = a as u128 % p as u128;
    let mut e = p - 2;
    let mut acc: u128 = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::CMonomialGenerator;
    use crate::scalar::PrimeParam;

    fn ideal(p: u64, n: usize, gens: &[(i64, &[u32])]) -> IdealSpec {
        IdealSpec::new(
            PrimeParam::new(p).unwrap(),
            n,
            gens.iter()
                .map(|&(c, e)| CMonomialGenerator {
                    coeff: Scalar::from_int(c),
                    exponent: e.to_vec(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn deg(u: &[i64]) -> GradedDegree {
        GradedDegree(u.to_vec())
    }

    #[test]
    fn q_dims_for_p_x() {
        let i = ideal(5, 1, &[(5, &[1])]);
        // Degree 0: over Q the slice is Q -> Q, exact everywhere.
        assert_eq!(cech_dim_over_q(&i, 1, &deg(&[0])), FieldDim(0));
        // Degree -1: only the localized slot survives.
        assert_eq!(cech_dim_over_q(&i, 1, &deg(&[-1])), FieldDim(1));
        assert_eq!(cech_dim_over_q(&i, 0, &deg(&[0])), FieldDim(0));
    }

    #[test]
    fn fp_dims_for_p_x() {
        let i = ideal(5, 1, &[(5, &[1])]);
        // Over F_5 the generator reduces to zero, so nothing is inverted and
        // the degree-0 slice is just the ring itself.
        assert_eq!(cech_dim_over_fp(&i, 0, &deg(&[0])), FieldDim(1));
        assert_eq!(cech_dim_over_fp(&i, 1, &deg(&[0])), FieldDim(0));
    }

    #[test]
    fn fp_dims_for_x() {
        let i = ideal(5, 1, &[(1, &[1])]);
        assert_eq!(cech_dim_over_fp(&i, 1, &deg(&[-1])), FieldDim(1));
        assert_eq!(cech_dim_over_q(&i, 0, &deg(&[3])), FieldDim(0));
    }

    #[test]
    fn rank_small_cases() {
        // [[1, 1], [1, -1]] has determinant -2: full rank over Q and F_3,
        // rank 1 over F_2.
        assert_eq!(rank_q(vec![vec![1, 1], vec![1, -1]]), 2);
        assert_eq!(rank_fp(vec![vec![1, 1], vec![1, 1]], 2), 1);
        assert_eq!(rank_fp(vec![vec![1, 1], vec![1, 2]], 3), 2);
        assert_eq!(rank_fp(vec![], 5), 0);
        assert_eq!(rank_q(vec![vec![0, 0]]), 0);
    }
}
