//! The module calculus over A = Z_(p): complexes whose terms are finite
//! direct sums of A and K = Q, kernel and image presentations, and
//! cohomology classified as A^a + K^b + E^l + sum of A/p^j summands, where
//! E = K/A is the injective hull of the residue field.
//!
//! Only four summand species occur (A, K, E, A/p^j); K and E are injective
//! and A is projective, so every extension between them splits and a shape
//! tuple determines the module. E summands are tracked by multiplicity only;
//! no element of E is ever materialized.
//!
//! Presenting submodules as a divisible part plus a finitely generated
//! lattice, and classifying quotients by a joint diagonalization, is an
//! algorithmic choice of this crate; the shape it produces is canonical even
//! though the presentations are not.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{canonical_row_basis, reduce_against_rref, Matrix};
use crate::scalar::{p_power, PrimeParam, Scalar, Valuation};

/// Summand species of a term: a rank-one free module A, or the full fraction
/// field K.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SummandTag {
    FreeA,
    FullK,
}

/// A finite direct sum of A- and K-summands, embedded coordinatewise in
/// K^ambient_dim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ElementaryModule {
    summands: Vec<SummandTag>,
}

impl ElementaryModule {
    pub fn new(summands: Vec<SummandTag>) -> Self {
        ElementaryModule { summands }
    }

    pub fn empty() -> Self {
        ElementaryModule {
            summands: Vec::new(),
        }
    }

    pub fn free(n: usize) -> Self {
        ElementaryModule {
            summands: vec![SummandTag::FreeA; n],
        }
    }

    pub fn full(n: usize) -> Self {
        ElementaryModule {
            summands: vec![SummandTag::FullK; n],
        }
    }

    pub fn ambient_dim(&self) -> usize {
        self.summands.len()
    }

    pub fn summands(&self) -> &[SummandTag] {
        &self.summands
    }

    pub fn tag(&self, i: usize) -> SummandTag {
        self.summands[i]
    }

    /// Coordinates carrying an A-summand.
    pub fn free_positions(&self) -> Vec<usize> {
        (0..self.summands.len())
            .filter(|&i| self.summands[i] == SummandTag::FreeA)
            .collect()
    }
}

/// A morphism between elementary modules, given by a target x source matrix
/// over K acting on ambient coordinates.
///
/// Hom constraints of the category: an entry from a K-summand into an
/// A-summand must vanish (Hom(K, A) = 0), and an entry between two
/// A-summands must be integral (Hom(A, A) = A).
#[derive(Debug, Clone)]
pub struct ChainMap {
    source: ElementaryModule,
    target: ElementaryModule,
    matrix: Matrix,
}

impl ChainMap {
    pub fn new(
        source: ElementaryModule,
        target: ElementaryModule,
        matrix: Matrix,
        p: &PrimeParam,
    ) -> Result<Self> {
        if matrix.rows() != target.ambient_dim() || matrix.cols() != source.ambient_dim() {
            return Err(Error::DimensionMismatch(format!(
                "map matrix is {}x{}, expected {}x{}",
                matrix.rows(),
                matrix.cols(),
                target.ambient_dim(),
                source.ambient_dim()
            )));
        }
        for r in 0..matrix.rows() {
            for c in 0..matrix.cols() {
                let entry = matrix.at(r, c);
                if entry.is_zero() {
                    continue;
                }
                match (source.tag(c), target.tag(r)) {
                    (SummandTag::FullK, SummandTag::FreeA) => {
                        return Err(Error::HomConstraint { row: r, col: c });
                    }
                    (SummandTag::FreeA, SummandTag::FreeA) => {
                        if let Valuation::Finite(v) = entry.valuation(p) {
                            if v < 0 {
                                return Err(Error::NonIntegralEntry {
                                    row: r,
                                    col: c,
                                    val: v,
                                });
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        Ok(ChainMap {
            source,
            target,
            matrix,
        })
    }

    pub fn zero(source: ElementaryModule, target: ElementaryModule) -> Self {
        let matrix = Matrix::zero(target.ambient_dim(), source.ambient_dim());
        ChainMap {
            source,
            target,
            matrix,
        }
    }

    pub fn source(&self) -> &ElementaryModule {
        &self.source
    }

    pub fn target(&self) -> &ElementaryModule {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    /// Whether next . self = 0, walking nonzero entries only.
    #[allow(clippy::needless_range_loop)]
    pub fn composes_to_zero(&self, next: &ChainMap) -> bool {
        debug_assert_eq!(self.target.ambient_dim(), next.source.ambient_dim());
        let mid = self.target.ambient_dim();
        let out = next.target.ambient_dim();
        let mut acc = vec![Scalar::zero(); out];
        for c in 0..self.source.ambient_dim() {
            for x in acc.iter_mut() {
                *x = Scalar::zero();
            }
            for k in 0..mid {
                let f = self.matrix.at(k, c);
                if f.is_zero() {
                    continue;
                }
                for r in 0..out {
                    let g = next.matrix.at(r, k);
                    if !g.is_zero() {
                        acc[r] = &acc[r] + &(f * g);
                    }
                }
            }
            if acc.iter().any(|x| !x.is_zero()) {
                return false;
            }
        }
        true
    }
}

/// A submodule of an elementary module: a divisible part D (a K-subspace,
/// spanned by `divisible_basis`) plus an A-lattice generated by
/// `lattice_gens`. The module presented is D + A.lattice_gens.
#[derive(Debug, Clone)]
pub struct SubmodulePresentation {
    ambient: ElementaryModule,
    divisible_basis: Vec<Vec<Scalar>>,
    lattice_gens: Vec<Vec<Scalar>>,
}

impl SubmodulePresentation {
    /// Validates: basis vectors have the ambient length and are K-linearly
    /// independent; the presented module is contained in the ambient module
    /// (divisible vectors vanish on A-coordinates, since a K-line through a
    /// nonzero A-coordinate leaves the module; lattice generators are
    /// integral there).
    pub fn new(
        ambient: ElementaryModule,
        divisible_basis: Vec<Vec<Scalar>>,
        lattice_gens: Vec<Vec<Scalar>>,
        p: &PrimeParam,
    ) -> Result<Self> {
        let n = ambient.ambient_dim();
        for v in divisible_basis.iter().chain(lattice_gens.iter()) {
            if v.len() != n {
                return Err(Error::DimensionMismatch(format!(
                    "presentation vector has length {}, ambient is {}",
                    v.len(),
                    n
                )));
            }
        }
        let free = ambient.free_positions();
        for v in &divisible_basis {
            for &i in &free {
                if !v[i].is_zero() {
                    return Err(Error::NotContained(format!(
                        "divisible vector meets free coordinate {i}"
                    )));
                }
            }
        }
        if !divisible_basis.is_empty() {
            let rank = Matrix::from_rows(divisible_basis.clone()).rank();
            if rank != divisible_basis.len() {
                return Err(Error::DependentDivisibleBasis);
            }
        }
        for (k, v) in lattice_gens.iter().enumerate() {
            for &i in &free {
                if !v[i].is_integral(p) {
                    return Err(Error::NotContained(format!(
                        "lattice generator {k} is non-integral at free coordinate {i}"
                    )));
                }
            }
        }
        Ok(SubmodulePresentation {
            ambient,
            divisible_basis,
            lattice_gens,
        })
    }

    /// The zero submodule.
    pub fn zero(ambient: ElementaryModule) -> Self {
        SubmodulePresentation {
            ambient,
            divisible_basis: Vec::new(),
            lattice_gens: Vec::new(),
        }
    }

    /// The whole ambient module: K-coordinates span the divisible part, unit
    /// vectors at A-coordinates generate the lattice.
    pub fn full(ambient: ElementaryModule) -> Self {
        let n = ambient.ambient_dim();
        let unit = |i: usize| {
            let mut v = vec![Scalar::zero(); n];
            v[i] = Scalar::one();
            v
        };
        let mut divisible_basis = Vec::new();
        let mut lattice_gens = Vec::new();
        for i in 0..n {
            match ambient.tag(i) {
                SummandTag::FullK => divisible_basis.push(unit(i)),
                SummandTag::FreeA => lattice_gens.push(unit(i)),
            }
        }
        SubmodulePresentation {
            ambient,
            divisible_basis,
            lattice_gens,
        }
    }

    pub fn ambient(&self) -> &ElementaryModule {
        &self.ambient
    }

    pub fn divisible_basis(&self) -> &[Vec<Scalar>] {
        &self.divisible_basis
    }

    pub fn lattice_gens(&self) -> &[Vec<Scalar>] {
        &self.lattice_gens
    }
}

/// The isomorphism class of a subquotient: A^a + K^b + E^l + sum over j of
/// (A/p^j)^{alpha[j-1]}. Trailing zeros of alpha are trimmed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleShape {
    pub a: usize,
    pub b: usize,
    pub l: usize,
    pub alpha: Vec<usize>,
}

impl ModuleShape {
    pub fn new(a: usize, b: usize, l: usize, mut alpha: Vec<usize>) -> Self {
        while alpha.last() == Some(&0) {
            alpha.pop();
        }
        ModuleShape { a, b, l, alpha }
    }

    pub fn zero() -> Self {
        ModuleShape::new(0, 0, 0, Vec::new())
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0 && self.l == 0 && self.alpha.is_empty()
    }

    /// Total torsion multiplicity t = sum of alpha.
    pub fn torsion_count(&self) -> usize {
        self.alpha.iter().sum()
    }

    /// Largest torsion exponent (0 when torsion-free).
    pub fn max_torsion_exponent(&self) -> usize {
        self.alpha.len()
    }
}

impl std::fmt::Display for ModuleShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "(a={}, b={}, l={}, alpha={:?})",
            self.a, self.b, self.l, self.alpha
        )
    }
}

/// Invariant factors p^{d_1} | ... | p^{d_r} of an integral matrix, with the
/// K-rank r.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithInvariants {
    pub exponents: Vec<u32>,
    pub rank: usize,
}

/// Diagonalize over Z_(p): there are transformations invertible over A with
/// U M V = diag(p^{d_1}, ..., p^{d_r}, 0, ...), d_1 <= ... <= d_r.
///
/// Pivoting takes the entry of minimum valuation (ties topmost, then
/// leftmost) and divides the pivot row by the pivot's unit part, so pivots
/// are pure powers of p and all elimination quotients stay integral.
pub fn smith_normal_form_dvr(m: &Matrix, p: &PrimeParam) -> Result<SmithInvariants> {
    for r in 0..m.rows() {
        for c in 0..m.cols() {
            if let Valuation::Finite(v) = m.at(r, c).valuation(p) {
                if v < 0 {
                    return Err(Error::NonIntegralEntry {
                        row: r,
                        col: c,
                        val: v,
                    });
                }
            }
        }
    }
    let mut work = m.clone();
    let exponents = snf_in_place(&mut work, p, None, None);
    let rank = exponents.len();
    Ok(SmithInvariants { exponents, rank })
}

/// In-place diagonalization engine.
///
/// `companion` receives every column operation applied to `x` (it must have
/// the same column count); this classifies a stacked map into free and
/// divisible coordinates simultaneously.
///
/// `row_inverse` accumulates the inverse of the row transformation: starting
/// from the identity, after termination U x_original V = diag and
/// `row_inverse` holds U^{-1}. Used to read off lattice bases.
fn snf_in_place(
    x: &mut Matrix,
    p: &PrimeParam,
    mut companion: Option<&mut Matrix>,
    mut row_inverse: Option<&mut Matrix>,
) -> Vec<u32> {
    let (rows, cols) = (x.rows(), x.cols());
    if let Some(cm) = companion.as_deref() {
        assert_eq!(cm.cols(), cols, "companion column count mismatch");
    }
    if let Some(w) = row_inverse.as_deref() {
        assert_eq!(w.rows(), rows, "row_inverse must be rows x rows");
        assert_eq!(w.cols(), rows, "row_inverse must be rows x rows");
    }
    let mut exponents = Vec::new();
    for k in 0..rows.min(cols) {
        // Minimum-valuation pivot over the untouched submatrix.
        let mut best: Option<(i64, usize, usize)> = None;
        for r in k..rows {
            for c in k..cols {
                if let Valuation::Finite(v) = x.at(r, c).valuation(p) {
                    debug_assert!(v >= 0, "snf_in_place requires integral entries");
                    if best.is_none_or(|(bv, _, _)| v < bv) {
                        best = Some((v, r, c));
                    }
                }
            }
        }
        let Some((d, pr, pc)) = best else { break };

        x.swap_rows(k, pr);
        if let Some(w) = row_inverse.as_deref_mut() {
            w.swap_cols(k, pr);
        }
        x.swap_cols(k, pc);
        if let Some(cm) = companion.as_deref_mut() {
            cm.swap_cols(k, pc);
        }

        // Make the pivot the exact power p^d.
        let unit = x
            .at(k, k)
            .unit_part(p)
            .expect("pivot is nonzero by construction");
        if !unit.is_one() {
            let inv = &Scalar::one() / &unit;
            for c in k..cols {
                if !x.at(k, c).is_zero() {
                    let v = x.at(k, c) * &inv;
                    x.set(k, c, v);
                }
            }
            if let Some(w) = row_inverse.as_deref_mut() {
                // Scaling row k by 1/unit multiplies column k of U^{-1} by unit.
                for r in 0..rows {
                    if !w.at(r, k).is_zero() {
                        let v = w.at(r, k) * &unit;
                        w.set(r, k, v);
                    }
                }
            }
        }
        let pivot = p_power(p, d);
        debug_assert_eq!(x.at(k, k), &pivot);

        // Clear the pivot column; quotients are integral because d is minimal.
        for r in k + 1..rows {
            let f = x.at(r, k) / &pivot;
            if f.is_zero() {
                continue;
            }
            for c in k..cols {
                if !x.at(k, c).is_zero() {
                    let v = x.at(r, c) - &(&f * x.at(k, c));
                    x.set(r, c, v);
                }
            }
            if let Some(w) = row_inverse.as_deref_mut() {
                // row r -= f * row k  <=>  column k of U^{-1} += f * column r.
                for i in 0..rows {
                    if !w.at(i, r).is_zero() {
                        let v = w.at(i, k) + &(&f * w.at(i, r));
                        w.set(i, k, v);
                    }
                }
            }
        }

        // Clear the pivot row; rows below have a zero in column k already, so
        // these column operations touch only row k outside column k.
        for c in k + 1..cols {
            let g = x.at(k, c) / &pivot;
            if g.is_zero() {
                continue;
            }
            for r in k..rows {
                if !x.at(r, k).is_zero() {
                    let v = x.at(r, c) - &(&g * x.at(r, k));
                    x.set(r, c, v);
                }
            }
            if let Some(cm) = companion.as_deref_mut() {
                for r in 0..cm.rows() {
                    if !cm.at(r, k).is_zero() {
                        let v = cm.at(r, c) - &(&g * cm.at(r, k));
                        cm.set(r, c, v);
                    }
                }
            }
        }

        exponents.push(u32::try_from(d).expect("valuation fits u32"));
    }
    exponents
}

/// Kernel of a chain map, presented as divisible part + lattice.
///
/// With V the K-nullspace and F the A-coordinates of the source, the
/// divisible part is ker(projection to F) restricted to V, and the lattice is
/// an A-basis of (projection of V to F) intersected with A^F, lifted back
/// into V. The two parts together are K-linearly independent, so the returned
/// presentation is reduced.
pub fn kernel_presentation(d: &ChainMap, p: &PrimeParam) -> Result<SubmodulePresentation> {
    let source = d.source().clone();
    let n = source.ambient_dim();
    let nullspace = d.matrix().nullspace();
    let k = nullspace.len();
    let free = source.free_positions();

    // Projection of the nullspace onto the A-coordinates.
    let proj = Matrix::from_fn(free.len(), k, |r, c| nullspace[c][free[r]].clone());

    // Divisible part: nullspace vectors with zero A-part.
    let d_coeffs = proj.nullspace();
    let mut divisible: Vec<Vec<Scalar>> = Vec::with_capacity(d_coeffs.len());
    for coeff in &d_coeffs {
        let mut v = vec![Scalar::zero(); n];
        for (j, c) in coeff.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (x, e) in v.iter_mut().zip(&nullspace[j]) {
                if !e.is_zero() {
                    *x = &*x + &(c * e);
                }
            }
        }
        divisible.push(v);
    }
    let (divisible, _) = canonical_row_basis(&divisible);

    // Lattice part: column basis of the projection, made integral, then the
    // intersection with A^F read off the inverse row transform of the
    // diagonalization.
    let pivot_cols = proj.clone().rref();
    let rho = pivot_cols.len();
    let mut lattice: Vec<Vec<Scalar>> = Vec::with_capacity(rho);
    if rho > 0 {
        let mut basis = Matrix::from_fn(free.len(), rho, |r, c| proj.at(r, pivot_cols[c]).clone());
        for c in 0..rho {
            let min_val = (0..free.len())
                .filter_map(|r| basis.at(r, c).valuation(p).finite())
                .min()
                .expect("pivot column is nonzero");
            if min_val < 0 {
                let scale = p_power(p, -min_val);
                for r in 0..free.len() {
                    if !basis.at(r, c).is_zero() {
                        let v = basis.at(r, c) * &scale;
                        basis.set(r, c, v);
                    }
                }
            }
        }
        let mut w = Matrix::identity(free.len());
        let exps = snf_in_place(&mut basis, p, None, Some(&mut w));
        debug_assert_eq!(exps.len(), rho, "column basis has full column rank");
        // Lattice basis vectors in K^F are the first rho columns of U^{-1};
        // lift each one through the projection.
        let lattice_f = Matrix::from_fn(free.len(), rho, |r, c| w.at(r, c).clone());
        let lifts = proj.solve_columns(&lattice_f);
        for (j, lift) in lifts.into_iter().enumerate() {
            let coeff = lift
                .unwrap_or_else(|| unreachable!("lattice vector {j} lies in the projected image"));
            let mut v = vec![Scalar::zero(); n];
            for (jj, c) in coeff.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (x, e) in v.iter_mut().zip(&nullspace[jj]) {
                    if !e.is_zero() {
                        *x = &*x + &(c * e);
                    }
                }
            }
            // Sign-normalize: unit rescaling keeps the lattice.
            if v.iter()
                .find(|x| !x.is_zero())
                .is_some_and(|x| x < &Scalar::zero())
            {
                for x in v.iter_mut() {
                    *x = -&*x;
                }
            }
            lattice.push(v);
        }
    }

    SubmodulePresentation::new(source, divisible, lattice, p)
}

/// Image of a chain map: columns at K-summands of the source span the
/// divisible part (K maps onto a K-line), columns at A-summands generate the
/// lattice part.
pub fn image_presentation(d: &ChainMap, p: &PrimeParam) -> Result<SubmodulePresentation> {
    let target = d.target().clone();
    let mut divisible = Vec::new();
    let mut lattice = Vec::new();
    for c in 0..d.source().ambient_dim() {
        let col = d.matrix().col(c);
        match d.source().tag(c) {
            SummandTag::FullK => {
                if col.iter().any(|x| !x.is_zero()) {
                    divisible.push(col);
                }
            }
            SummandTag::FreeA => {
                if col.iter().any(|x| !x.is_zero()) {
                    lattice.push(col);
                }
            }
        }
    }
    let (divisible, _) = canonical_row_basis(&divisible);
    SubmodulePresentation::new(target, divisible, lattice, p)
}

/// Shape of ker/im.
///
/// The kernel presentation is first reduced to a split form D + free lattice.
/// Every image generator is expressed in that basis (failure means the image
/// is not a subobject; non-integral lattice coordinates mean the same).
/// Quotienting by the image divisible part leaves b0 divisible slots; the
/// image lattice is then diagonalized over A jointly with its divisible-slot
/// coordinates. Invariant factor p^d with d >= 1 contributes a torsion
/// summand, d = 0 cancels a free slot; lattice directions that survive only
/// in the divisible slots each turn one K into one E (a full-rank lattice
/// inside a K-line has quotient K/A = E).
#[allow(clippy::needless_range_loop)]
pub fn quotient_shape(
    ker: &SubmodulePresentation,
    im: &SubmodulePresentation,
    p: &PrimeParam,
) -> Result<ModuleShape> {
    if ker.ambient() != im.ambient() {
        return Err(Error::DimensionMismatch(
            "kernel and image live in different ambient modules".into(),
        ));
    }
    let n = ker.ambient().ambient_dim();

    // Reduced kernel: canonical divisible rows, lattice reduced mod D and
    // column-echelonized over A.
    let (dk, dk_pivots) = canonical_row_basis(ker.divisible_basis());
    if dk.len() != ker.divisible_basis().len() {
        return Err(Error::DependentDivisibleBasis);
    }
    let mut lk: Vec<Vec<Scalar>> = ker.lattice_gens().to_vec();
    for v in lk.iter_mut() {
        reduce_against_rref(v, &dk, &dk_pivots);
    }
    let lk = lattice_column_basis(lk, p);
    let bk = dk.len();
    let r = lk.len();

    // Coordinates of every image generator in the kernel basis.
    let mut basis_cols: Vec<Vec<Scalar>> = Vec::with_capacity(bk + r);
    basis_cols.extend(dk.iter().cloned());
    basis_cols.extend(lk.iter().cloned());
    let basis = Matrix::from_cols(basis_cols, n);
    let im_d = im.divisible_basis();
    let im_l = im.lattice_gens();
    let rhs_cols: Vec<Vec<Scalar>> = im_d.iter().chain(im_l.iter()).cloned().collect();
    let rhs = Matrix::from_cols(rhs_cols, n);
    let solutions = basis.solve_columns(&rhs);

    let md = im_d.len();
    let ml = im_l.len();
    let mut p_d = Matrix::zero(bk, md);
    for j in 0..md {
        let Some(z) = &solutions[j] else {
            return Err(Error::NotSubobject(format!(
                "divisible generator {j} of the image is outside the kernel"
            )));
        };
        if z[bk..].iter().any(|x| !x.is_zero()) {
            return Err(Error::NotSubobject(format!(
                "divisible generator {j} of the image is not divisible inside the kernel"
            )));
        }
        for i in 0..bk {
            p_d.set(i, j, z[i].clone());
        }
    }
    let mut z_d = Matrix::zero(bk, ml);
    let mut x = Matrix::zero(r, ml);
    for j in 0..ml {
        let Some(z) = &solutions[md + j] else {
            return Err(Error::NotSubobject(format!(
                "lattice generator {j} of the image is outside the kernel"
            )));
        };
        for (i, v) in z[bk..].iter().enumerate() {
            if !v.is_integral(p) {
                return Err(Error::NotSubobject(format!(
                    "lattice generator {j} of the image has non-integral coordinate in the kernel lattice"
                )));
            }
            x.set(i, j, v.clone());
        }
        for i in 0..bk {
            z_d.set(i, j, z[i].clone());
        }
    }

    // Quotient the divisible coordinates by the image divisible part.
    let (pd_rows, pd_pivots) =
        canonical_row_basis(&(0..md).map(|j| p_d.col(j)).collect::<Vec<_>>());
    if pd_rows.len() != md {
        return Err(Error::DependentDivisibleBasis);
    }
    let keep: Vec<usize> = (0..bk).filter(|i| !pd_pivots.contains(i)).collect();
    let b0 = keep.len();
    let mut y = Matrix::zero(b0, ml);
    for j in 0..ml {
        let mut col = z_d.col(j);
        reduce_against_rref(&mut col, &pd_rows, &pd_pivots);
        for (row, &i) in keep.iter().enumerate() {
            y.set(row, j, col[i].clone());
        }
    }

    // Joint diagonalization: invariant factors classify the lattice-vs-free
    // interaction, leftover columns act purely on the divisible slots.
    let exps = snf_in_place(&mut x, p, Some(&mut y), None);
    let rank_x = exps.len();
    let mut alpha: Vec<usize> = Vec::new();
    for &d in &exps {
        if d >= 1 {
            let d = d as usize;
            if alpha.len() < d {
                alpha.resize(d, 0);
            }
            alpha[d - 1] += 1;
        }
    }
    let a = r - rank_x;
    let leftover: Vec<Vec<Scalar>> = (rank_x..ml).map(|j| y.col(j)).collect();
    let rho = if leftover.is_empty() {
        0
    } else {
        Matrix::from_rows(leftover).rank()
    };
    let l = rho;
    let b = b0 - rho;
    Ok(ModuleShape::new(a, b, l, alpha))
}

/// A-basis of the lattice generated by the given vectors: column echelon over
/// Z_(p), pivoting on the minimum-valuation entry of each row in turn so the
/// elimination coefficients stay integral.
#[allow(clippy::needless_range_loop)]
fn lattice_column_basis(gens: Vec<Vec<Scalar>>, p: &PrimeParam) -> Vec<Vec<Scalar>> {
    let mut cols: Vec<Vec<Scalar>> = gens
        .into_iter()
        .filter(|v| v.iter().any(|x| !x.is_zero()))
        .collect();
    if cols.is_empty() {
        return cols;
    }
    let n = cols[0].len();
    let mut next = 0usize;
    for row in 0..n {
        if next == cols.len() {
            break;
        }
        let mut best: Option<(i64, usize)> = None;
        for (j, col) in cols.iter().enumerate().skip(next) {
            if let Valuation::Finite(v) = col[row].valuation(p) {
                if best.is_none_or(|(bv, _)| v < bv) {
                    best = Some((v, j));
                }
            }
        }
        let Some((_, pj)) = best else { continue };
        cols.swap(next, pj);
        let pivot = cols[next][row].clone();
        for j in next + 1..cols.len() {
            if cols[j][row].is_zero() {
                continue;
            }
            let f = &cols[j][row] / &pivot;
            debug_assert!(f.is_integral(p), "pivot valuation is minimal in its row");
            for i in 0..n {
                if !cols[next][i].is_zero() {
                    cols[j][i] = &cols[j][i] - &(&f * &cols[next][i]);
                }
            }
        }
        next += 1;
    }
    cols.truncate(next);
    cols
}

/// Cohomology of a complex of elementary modules at one position:
/// quotient of the kernel of the outgoing map by the image of the incoming
/// one. Boundary positions use zero maps; positions outside the complex give
/// the zero shape.
pub fn cohomology_at(
    terms: &[ElementaryModule],
    maps: &[ChainMap],
    position: usize,
    p: &PrimeParam,
) -> Result<ModuleShape> {
    if !terms.is_empty() {
        if maps.len() + 1 != terms.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} terms need {} maps, got {}",
                terms.len(),
                terms.len() - 1,
                maps.len()
            )));
        }
        for (i, m) in maps.iter().enumerate() {
            if m.source() != &terms[i] || m.target() != &terms[i + 1] {
                return Err(Error::DimensionMismatch(format!(
                    "map {i} does not match its terms"
                )));
            }
        }
    }
    if position >= terms.len() {
        return Ok(ModuleShape::zero());
    }
    if position >= 1
        && position < maps.len()
        && !maps[position - 1].composes_to_zero(&maps[position])
    {
        return Err(Error::NotAComplex(position));
    }
    let ker = if position < maps.len() {
        kernel_presentation(&maps[position], p)?
    } else {
        SubmodulePresentation::full(terms[position].clone())
    };
    let im = if position == 0 {
        SubmodulePresentation::zero(terms[0].clone())
    } else {
        image_presentation(&maps[position - 1], p)?
    };
    quotient_shape(&ker, &im, p)
}
