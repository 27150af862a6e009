//! Acceptance suite: golden fixtures, the torsion fixture, the randomized
//! oracle-checked corpus, the invariant-factor oracle, and redundant-generator
//! invariance. Each test prints one PASS line; a failure panics with the
//! counterexample.

use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use localcoh::{
    bass_numbers, block_of, local_cohomology_component, smith_normal_form_dvr, sweep,
    verify_block_constancy, verify_oracle_identities, verify_torsion_bound, CMonomialGenerator,
    ComponentReport, GradedDegree, IdealSpec, Matrix, ModuleShape, PrimeParam, Scalar,
};

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

fn shape(a: usize, b: usize, l: usize, alpha: &[usize]) -> ModuleShape {
    ModuleShape::new(a, b, l, alpha.to_vec())
}

/// splitmix64: deterministic test randomness without extra dependencies.
struct Rng(u64);

impl Rng {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: u64) -> u64 {
        self.next() % n
    }
}

#[test]
fn acceptance_1_golden_p_x() {
    let start = Instant::now();
    let fixture = ideal(5, 1, &[(5, &[1])]);
    let reports = sweep(&fixture, 3, &[0, 1]).unwrap();
    assert_eq!(reports.len(), 14);
    for rep in &reports {
        match (rep.i, rep.u[0]) {
            (0, _) => assert!(rep.shape.is_zero(), "H^0 must vanish at u={:?}", rep.u),
            (1, u) if u >= 0 => assert_eq!(rep.shape, shape(0, 0, 1, &[]), "u={u}"),
            (1, _) => assert_eq!(rep.shape, shape(0, 1, 0, &[]), "u={:?}", rep.u),
            _ => unreachable!(),
        }
        if rep.i == 1 {
            let nonneg = rep.u[0] >= 0;
            assert_eq!((rep.mu0, rep.mu1), if nonneg { (1, 0) } else { (0, 0) });
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:.2?}");
    println!("acceptance 1 (golden ideal (pX), W=3): PASS in {elapsed:.2?}");
}

#[test]
fn acceptance_2_golden_x() {
    let start = Instant::now();
    // Coefficient 1, so the prime is arbitrary; take 7.
    let fixture = ideal(7, 1, &[(1, &[1])]);
    let reports = sweep(&fixture, 3, &[0, 1]).unwrap();
    for rep in &reports {
        match (rep.i, rep.u[0]) {
            (0, _) => assert!(rep.shape.is_zero()),
            (1, u) if u >= 0 => assert!(rep.shape.is_zero(), "u={u}"),
            (1, _) => {
                assert_eq!(rep.shape, shape(1, 0, 0, &[]));
                assert_eq!((rep.mu0, rep.mu1), (0, 1));
            }
            _ => unreachable!(),
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:.2?}");
    println!("acceptance 2 (golden ideal (X)): PASS in {elapsed:.2?}");
}

/// Stanley-Reisner ideal of the 6-vertex projective plane: ten squarefree
/// cubic generators, one per minimal non-face. Over p = 2 its fourth
/// cohomology carries 2-torsion, the smallest coefficient-monomial example
/// with a nonzero alpha: torsion of these components always descends from the
/// unit-coefficient part of the ideal, where it is simplicial, and six
/// vertices is the simplicial minimum.
fn projective_plane_ideal() -> IdealSpec {
    let non_faces: [[usize; 3]; 10] = [
        [1, 2, 3],
        [1, 2, 5],
        [1, 3, 4],
        [1, 4, 6],
        [1, 5, 6],
        [2, 3, 6],
        [2, 4, 5],
        [2, 4, 6],
        [3, 4, 5],
        [3, 5, 6],
    ];
    let gens = non_faces
        .iter()
        .map(|t| {
            let mut e = vec![0u32; 6];
            for &v in t {
                e[v - 1] = 1;
            }
            CMonomialGenerator {
                coeff: Scalar::from_int(1),
                exponent: e,
            }
        })
        .collect();
    IdealSpec::new(PrimeParam::new(2).unwrap(), 6, gens).unwrap()
}

#[test]
fn acceptance_3_torsion_fixture() {
    let start = Instant::now();
    let fixture = projective_plane_ideal();
    let p = *fixture.prime();

    // The torsion cell, checked first through the classical invariant-factor
    // route: at an all-negative degree every surviving slot is a free
    // summand, so H^4 = ker d4 / im d3 follows from two diagonalizations
    // (coker d3 = H^4 + free of rank d4).
    let corner = GradedDegree(vec![-1; 6]);
    let complex = localcoh::build_degree_complex(&fixture, &corner);
    assert!(complex
        .terms
        .iter()
        .all(|t| t.free_positions().len() == t.ambient_dim()));
    let n4 = complex.terms[4].ambient_dim();
    let snf3 = smith_normal_form_dvr(complex.maps[3].matrix(), &p).unwrap();
    let snf4 = smith_normal_form_dvr(complex.maps[4].matrix(), &p).unwrap();
    let mut alpha = vec![0usize; snf3.exponents.iter().copied().max().unwrap_or(0) as usize];
    for &d in &snf3.exponents {
        if d >= 1 {
            alpha[d as usize - 1] += 1;
        }
    }
    let classical = ModuleShape::new(n4 - snf3.rank - snf4.rank, 0, 0, alpha);
    assert_eq!(classical, shape(0, 0, 0, &[1]), "classical route");

    let engine = local_cohomology_component(&fixture, 4, &corner).unwrap();
    assert_eq!(
        engine, classical,
        "presentation route differs from classical route"
    );

    // Sweep the unit window at the torsion position and check the bound.
    let reports = sweep(&fixture, 1, &[4]).unwrap();
    let with_torsion: Vec<&ComponentReport> = reports
        .iter()
        .filter(|r| r.shape.torsion_count() > 0)
        .collect();
    assert!(
        !with_torsion.is_empty(),
        "no component with torsion in the sweep"
    );
    assert!(with_torsion.iter().any(|r| r.u == vec![-1; 6]));

    let bound = verify_torsion_bound(&reports);
    assert!(
        bound.bound_ok,
        "torsion bound failed: m={} s={}",
        bound.m, bound.s
    );
    assert_eq!((bound.m, bound.s), (1, 1));

    // Full-position oracle identities on every block corner, where the
    // torsion terms t_i and t_{i+1} both enter the F_2 dimension count.
    let mut corner_reports = Vec::new();
    for mask in 0..64u32 {
        let u: Vec<i64> = (0..6)
            .map(|j| if mask >> j & 1 == 1 { 0 } else { -1 })
            .collect();
        let degree = GradedDegree(u.clone());
        let complex = localcoh::build_degree_complex(&fixture, &degree);
        let dims_q = localcoh::oracle::cech_dims_over_q(&fixture, &degree);
        let dims_fp = localcoh::oracle::cech_dims_over_fp(&fixture, &degree);
        for i in 0..=fixture.num_generators() {
            let s = localcoh::cohomology_at(&complex.terms, &complex.maps, i, &p).unwrap();
            let bass = bass_numbers(&s);
            corner_reports.push(ComponentReport {
                i,
                u: u.clone(),
                shape: s,
                mu0: bass.mu0,
                mu1: bass.mu1,
                dim_q: dims_q[i],
                dim_fp: dims_fp[i],
            });
        }
    }
    let oracle = verify_oracle_identities(&fixture, &corner_reports);
    assert!(
        oracle.q_failures.is_empty(),
        "{:?}",
        oracle.q_failures.first()
    );
    assert!(
        oracle.fp_failures.is_empty(),
        "{:?}",
        oracle.fp_failures.first()
    );
    assert!(
        oracle.euler_failures.is_empty(),
        "{:?}",
        oracle.euler_failures.first()
    );
    assert_eq!(oracle.fp_skipped, 0);

    // Mixing in a generator with a non-unit coefficient keeps the torsion
    // (only unit-coefficient subsets contribute free slots) and adds a
    // divisible line at this corner.
    let mixed = fixture
        .with_extra_generator(CMonomialGenerator {
            coeff: Scalar::from_int(2),
            exponent: vec![1, 0, 0, 0, 0, 0],
        })
        .unwrap();
    let mixed_shape = local_cohomology_component(&mixed, 4, &corner).unwrap();
    assert_eq!(mixed_shape, shape(0, 1, 0, &[1]), "coefficient mixing");

    let elapsed = start.elapsed();
    println!(
        "acceptance 3 (torsion fixture, projective-plane ideal at p=2): PASS in {elapsed:.2?} \
         ({} torsion cells, m={}, s={})",
        with_torsion.len(),
        bound.m,
        bound.s
    );
}

/// Deterministic corpus: n <= 3 variables, <= 4 generators, exponents <= 2,
/// coefficients p^e * unit with e <= 2, p in {2, 3, 5}.
fn corpus(count: usize) -> Vec<IdealSpec> {
    let mut rng = Rng(0x1cebe11a);
    let mut out = Vec::new();
    while out.len() < count {
        let p = [2u64, 3, 5][out.len() % 3];
        let n = 1 + rng.below(3) as usize;
        let gens = 1 + rng.below(4) as usize;
        let generators: Vec<CMonomialGenerator> = (0..gens)
            .map(|_| {
                let e = rng.below(3) as u32;
                let unit = loop {
                    let candidates = [1i64, 2, 3, -1, -3, 7];
                    let u = candidates[rng.below(candidates.len() as u64) as usize];
                    if !u.unsigned_abs().is_multiple_of(p) {
                        break u;
                    }
                };
                let coeff = Scalar::from_int(unit * (p as i64).pow(e));
                let exponent = (0..n).map(|_| rng.below(3) as u32).collect();
                CMonomialGenerator { coeff, exponent }
            })
            .collect();
        out.push(IdealSpec::new(PrimeParam::new(p).unwrap(), n, generators).unwrap());
    }
    out
}

#[test]
fn acceptance_4_randomized_corpus() {
    let start = Instant::now();
    let i_list: Vec<usize> = (0..=4).collect();
    for (idx, fixture) in corpus(50).iter().enumerate() {
        let reports = sweep(fixture, 3, &i_list).unwrap();
        let oracle = verify_oracle_identities(fixture, &reports);
        assert!(
            oracle.q_failures.is_empty(),
            "ideal {idx}: Q identity failed: {:?}",
            oracle.q_failures[0]
        );
        assert!(
            oracle.fp_failures.is_empty(),
            "ideal {idx}: F_p identity failed: {:?}",
            oracle.fp_failures[0]
        );
        assert!(
            oracle.euler_failures.is_empty(),
            "ideal {idx}: Euler identity failed: {:?}",
            oracle.euler_failures[0]
        );
        assert_eq!(oracle.fp_skipped, 0, "ideal {idx}: incomplete i coverage");
        for c in verify_block_constancy(&reports) {
            assert!(
                c.constant,
                "ideal {idx}: shape not constant on {} at i={}: {:?}",
                c.block, c.i, c.counterexample
            );
            assert!(
                c.mu_constant,
                "ideal {idx}: Bass numbers not constant on {} at i={}: {:?}",
                c.block, c.i, c.mu_counterexample
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 300.0, "took {elapsed:.2?}");
    println!("acceptance 4 (randomized corpus, 50 ideals): PASS in {elapsed:.2?}");
}

// Independent minor-valuation oracle for the invariant factors.

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 0..=n - k {
        for mut rest in combinations(n - first - 1, k - 1) {
            for x in rest.iter_mut() {
                *x += first + 1;
            }
            let mut v = vec![first];
            v.append(&mut rest);
            out.push(v);
        }
    }
    out
}

fn determinant(rows: &[Vec<BigRational>]) -> BigRational {
    let n = rows.len();
    if n == 0 {
        return BigRational::from_integer(BigInt::from(1));
    }
    if n == 1 {
        return rows[0][0].clone();
    }
    let mut det = BigRational::zero();
    for (j, top) in rows[0].iter().enumerate() {
        if top.is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigRational>> = rows[1..]
            .iter()
            .map(|r| {
                r.iter()
                    .enumerate()
                    .filter(|(c, _)| *c != j)
                    .map(|(_, v)| v.clone())
                    .collect()
            })
            .collect();
        let term = top * determinant(&minor);
        if j % 2 == 0 {
            det += term;
        } else {
            det -= term;
        }
    }
    det
}

fn valuation_of(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let count = |n: &BigInt| -> i64 {
        let p = BigInt::from(p);
        let mut m = n.clone();
        let mut v = 0;
        while (&m % &p).is_zero() {
            m /= &p;
            v += 1;
        }
        v
    };
    Some(count(x.numer()) - count(x.denom()))
}

#[test]
fn acceptance_5_snf_oracle() {
    let start = Instant::now();
    let mut rng = Rng(0x5eedf00d);
    for case in 0..200 {
        let p = [2u64, 3, 5][rng.below(3) as usize];
        let bound = (p as i64).pow(4);
        let rows = 1 + rng.below(6) as usize;
        let cols = 1 + rng.below(6) as usize;
        let m = Matrix::from_fn(rows, cols, |_, _| {
            Scalar::from_int(rng.below(2 * bound as u64 + 1) as i64 - bound)
        });
        let prime = PrimeParam::new(p).unwrap();
        let snf = smith_normal_form_dvr(&m, &prime).unwrap();

        let rational: Vec<Vec<BigRational>> = (0..rows)
            .map(|r| (0..cols).map(|c| m.at(r, c).to_rational()).collect())
            .collect();
        let mut partial = 0i64;
        for j in 1..=rows.min(cols) {
            let mut best: Option<i64> = None;
            for rsel in combinations(rows, j) {
                for csel in combinations(cols, j) {
                    let sub: Vec<Vec<BigRational>> = rsel
                        .iter()
                        .map(|&r| csel.iter().map(|&c| rational[r][c].clone()).collect())
                        .collect();
                    if let Some(v) = valuation_of(&determinant(&sub), p) {
                        best = Some(best.map_or(v, |b| b.min(v)));
                    }
                }
            }
            if j <= snf.rank {
                partial += snf.exponents[j - 1] as i64;
                assert_eq!(
                    best,
                    Some(partial),
                    "case {case}: minor valuation mismatch at size {j}"
                );
            } else {
                assert_eq!(best, None, "case {case}: rank overshoot at size {j}");
            }
        }

        // Permutation invariance.
        let mut rsel: Vec<usize> = (0..rows).collect();
        let mut csel: Vec<usize> = (0..cols).collect();
        for i in (1..rsel.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            rsel.swap(i, j);
        }
        for i in (1..csel.len()).rev() {
            let j = rng.below(i as u64 + 1) as usize;
            csel.swap(i, j);
        }
        let shuffled = Matrix::from_fn(rows, cols, |r, c| m.at(rsel[r], csel[c]).clone());
        assert_eq!(
            smith_normal_form_dvr(&shuffled, &prime).unwrap(),
            snf,
            "case {case}: permutation changed the invariants"
        );
    }
    let elapsed = start.elapsed();
    println!("acceptance 5 (invariant-factor oracle, 200 matrices): PASS in {elapsed:.2?}");
}

#[test]
fn acceptance_6_redundant_generator_invariance() {
    let start = Instant::now();
    let fixtures = corpus(60);
    let mut tested = 0;
    for fixture in fixtures.iter() {
        if fixture.num_generators() < 2 {
            continue;
        }
        if tested == 10 {
            break;
        }
        tested += 1;
        let g0 = &fixture.generators()[0];
        let g1 = &fixture.generators()[1];
        let product = CMonomialGenerator {
            coeff: &g0.coeff * &g1.coeff,
            exponent: g0
                .exponent
                .iter()
                .zip(&g1.exponent)
                .map(|(a, b)| a + b)
                .collect(),
        };
        let extended = fixture.with_extra_generator(product).unwrap();
        let i_list: Vec<usize> = (0..=fixture.num_generators()).collect();
        let base = sweep(fixture, 3, &i_list).unwrap();
        let ext = sweep(&extended, 3, &i_list).unwrap();
        assert_eq!(base.len(), ext.len());
        for (x, y) in base.iter().zip(&ext) {
            assert_eq!((x.i, &x.u), (y.i, &y.u));
            assert_eq!(
                x.shape, y.shape,
                "shape changed at i={}, u={:?} after appending a redundant generator",
                x.i, x.u
            );
        }
    }
    assert_eq!(tested, 10);
    let elapsed = start.elapsed();
    println!("acceptance 6 (redundant-generator invariance, 10 ideals): PASS in {elapsed:.2?}");
}

#[test]
fn acceptance_bass_and_blocks_spot_checks() {
    // Cross-checks tying Bass numbers and block labels to the report layer.
    let e = shape(0, 0, 1, &[]);
    assert_eq!((bass_numbers(&e).mu0, bass_numbers(&e).mu1), (1, 0));
    let free = shape(1, 0, 0, &[]);
    assert_eq!((bass_numbers(&free).mu0, bass_numbers(&free).mu1), (0, 1));
    let divisible = shape(0, 3, 0, &[]);
    assert_eq!(
        (bass_numbers(&divisible).mu0, bass_numbers(&divisible).mu1),
        (0, 0)
    );
    assert_eq!(block_of(&GradedDegree(vec![2, -1])).label(), "1");
    println!("acceptance spot checks (Bass numbers, blocks): PASS");
}
