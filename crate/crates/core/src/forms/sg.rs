//! Gasket cells with the standard harmonic structure.
//!
//! The three extension matrices are derived at construction time by
//! minimizing the level-1 network energy over the interior vertices; they are
//! never hard-coded. Functions are piecewise harmonic: a level-`m` function is
//! stored by its values on the level-`m` vertex set and extended harmonically
//! inside each level-`m` cell. With the `r = 3/5` renormalization the energy
//! of a level-`m` function is `(5/3)^m * sum over level-m cells of Q(a_w)`
//! where `Q(a,b) = sum_{i<j} (a_i-a_j)(b_i-b_j)` on cell corner values, and
//! the energy measure of a level-`n` cell is `2 (5/3)^n Q(a_v, b_v)`, which
//! makes the total mass equal to twice the energy.

use std::collections::HashMap;

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::atoms::{AtomSpace, BackendKind};
use crate::error::{FormError, Result};

/// Energy renormalization factor per level.
pub const RENORM: f64 = 5.0 / 3.0;

/// `Q(a,b) = sum_{i<j} (a_i - a_j)(b_i - b_j)` on corner triples.
pub fn q_form(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - a[1]) * (b[0] - b[1]) + (a[0] - a[2]) * (b[0] - b[2]) + (a[1] - a[2]) * (b[1] - b[2])
}

/// Solve the level-1 interior minimization and read off the three extension
/// matrices. Cell `i` has corners `(F_i q_0, F_i q_1, F_i q_2)`; row `j` of
/// `A_i` expresses the value at the `j`-th corner of cell `i` in terms of the
/// boundary values `(q_0, q_1, q_2)`.
pub fn derive_extension_matrices() -> Result<[Matrix3<f64>; 3]> {
    // Interior vertices (y01, y02, y12), each with four unit-conductance
    // neighbors on the level-1 network; stationarity of the quadratic energy
    // gives 4*y - (other two interiors adjacent) = boundary terms.
    let system = Matrix3::new(4.0, -1.0, -1.0, -1.0, 4.0, -1.0, -1.0, -1.0, 4.0);
    let rhs = Matrix3::new(1.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 1.0);
    let lu = system.lu();
    let mut interior = Matrix3::zeros();
    for col in 0..3 {
        let b = Vector3::new(rhs[(0, col)], rhs[(1, col)], rhs[(2, col)]);
        let x = lu.solve(&b).ok_or(FormError::SingularInterior)?;
        interior.set_column(col, &x);
    }
    // interior rows: y01, y02, y12 as linear functions of (q0, q1, q2)
    let y01 = interior.row(0).transpose();
    let y02 = interior.row(1).transpose();
    let y12 = interior.row(2).transpose();
    let e0 = Vector3::new(1.0, 0.0, 0.0);
    let e1 = Vector3::new(0.0, 1.0, 0.0);
    let e2 = Vector3::new(0.0, 0.0, 1.0);
    let rows_to_matrix = |r0: Vector3<f64>, r1: Vector3<f64>, r2: Vector3<f64>| {
        Matrix3::from_rows(&[r0.transpose(), r1.transpose(), r2.transpose()])
    };
    Ok([
        rows_to_matrix(e0, y01, y02),
        rows_to_matrix(y01, e1, y12),
        rows_to_matrix(y02, y12, e2),
    ])
}

fn det3_shifted(a: &Matrix3<f64>, lambda: f64) -> f64 {
    let s = a - Matrix3::identity() * lambda;
    s.determinant()
}

/// Row sums, spectrum {1, 3/5, 1/5}, and the energy self-similarity identity,
/// all to 1e-12.
pub fn validate_extension_matrices(mats: &[Matrix3<f64>; 3]) -> Result<()> {
    for (i, a) in mats.iter().enumerate() {
        for r in 0..3 {
            let sum: f64 = a.row(r).iter().sum();
            if (sum - 1.0).abs() > 1e-12 {
                return Err(FormError::InvalidModel(format!(
                    "extension matrix {i} row {r} sums to {sum}"
                )));
            }
        }
        for lambda in [1.0, 3.0 / 5.0, 1.0 / 5.0] {
            let d = det3_shifted(a, lambda);
            if d.abs() > 1e-12 {
                return Err(FormError::InvalidModel(format!(
                    "extension matrix {i} has no eigenvalue at {lambda}: det {d:e}"
                )));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5347);
    for _ in 0..20 {
        let a = [
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ];
        let total = q_form(&a, &a);
        let mut refined = 0.0;
        for m in mats {
            let v = m * Vector3::from_column_slice(&a);
            let va = [v[0], v[1], v[2]];
            refined += q_form(&va, &va);
        }
        let err = (total - RENORM * refined).abs();
        if err > 1e-12 * total.abs().max(1.0) {
            return Err(FormError::InvalidModel(format!(
                "energy self-similarity violated: |Q - (5/3) sum Q_i| = {err:e}"
            )));
        }
    }
    Ok(())
}

/// Canonical enumeration of the level-`m` vertex set.
///
/// Vertices are indexed in first-seen order while scanning cells in
/// lexicographic word order with corners 0,1,2; positions use oblique integer
/// coordinates (`q0 = (0,0)`, `q1 = (1,0)`, `q2 = (0,1)`, scaled by `2^m`) so
/// shared corners deduplicate exactly.
#[derive(Debug, Clone)]
pub struct VertexTable {
    level: usize,
    positions: Vec<(i64, i64)>,
    /// Per cell (lex order), the vertex indices of its three corners.
    cell_corners: Vec<[usize; 3]>,
}

const Q_COORDS: [(i64, i64); 3] = [(0, 0), (1, 0), (0, 1)];

/// Digits of the lexicographic cell word, outermost letter first.
pub fn cell_word(index: usize, level: usize) -> Vec<u8> {
    let mut w = vec![0u8; level];
    let mut rem = index;
    for k in (0..level).rev() {
        w[k] = (rem % 3) as u8;
        rem /= 3;
    }
    w
}

impl VertexTable {
    pub fn new(level: usize) -> Self {
        let n_cells = 3usize.pow(level as u32);
        let mut index: HashMap<(i64, i64), usize> = HashMap::new();
        let mut positions = Vec::new();
        let mut cell_corners = Vec::with_capacity(n_cells);
        for ci in 0..n_cells {
            let w = cell_word(ci, level);
            // scaled corner position: q_j + sum_k 2^(m-k) q_{w_k}, k = 1..m
            let mut base = (0i64, 0i64);
            for (k, &letter) in w.iter().enumerate() {
                let scale = 1i64 << (level - k - 1);
                let q = Q_COORDS[letter as usize];
                base.0 += scale * q.0;
                base.1 += scale * q.1;
            }
            let mut corners = [0usize; 3];
            for (j, q) in Q_COORDS.iter().enumerate() {
                let pos = (base.0 + q.0, base.1 + q.1);
                let next = positions.len();
                let idx = *index.entry(pos).or_insert_with(|| {
                    positions.push(pos);
                    next
                });
                corners[j] = idx;
            }
            cell_corners.push(corners);
        }
        VertexTable { level, positions, cell_corners }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn positions(&self) -> &[(i64, i64)] {
        &self.positions
    }

    pub fn cell_corners(&self) -> &[[usize; 3]] {
        &self.cell_corners
    }
}

/// Piecewise-harmonic function: values on the level-`level` vertex set,
/// extended harmonically inside each level-`level` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SgFunction {
    level: usize,
    values: Vec<f64>,
}

impl SgFunction {
    pub fn new(level: usize, values: Vec<f64>) -> Result<Self> {
        let expected = VertexTable::new(level).vertex_count();
        if values.len() != expected {
            return Err(FormError::FunctionLength { expected, got: values.len() });
        }
        Ok(SgFunction { level, values })
    }

    /// Globally harmonic function with the given boundary values.
    pub fn harmonic(boundary: [f64; 3]) -> Self {
        SgFunction { level: 0, values: boundary.to_vec() }
    }

    pub fn constant(c: f64) -> Self {
        SgFunction { level: 0, values: vec![c; 3] }
    }

    /// Indicator of one level-`level` vertex.
    pub fn vertex_indicator(level: usize, vertex: usize) -> Result<Self> {
        let n = VertexTable::new(level).vertex_count();
        if vertex >= n {
            return Err(FormError::InvalidInput(format!(
                "vertex {vertex} out of range for level {level} ({n} vertices)"
            )));
        }
        let mut values = vec![0.0; n];
        values[vertex] = 1.0;
        Ok(SgFunction { level, values })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

#[derive(Debug, Clone)]
pub struct SgForm {
    level: usize,
    ext: [Matrix3<f64>; 3],
    space: AtomSpace,
    table: VertexTable,
}

impl SgForm {
    pub fn new(level: usize) -> Result<Self> {
        let ext = derive_extension_matrices()?;
        validate_extension_matrices(&ext)?;
        let n_cells = 3usize.pow(level as u32);
        let ids: Vec<String> = (0..n_cells)
            .map(|ci| {
                let w = cell_word(ci, level);
                let digits: String = w.iter().map(|d| char::from(b'0' + d)).collect();
                format!("c{digits}")
            })
            .collect();
        let m = vec![3f64.powi(-(level as i32)); n_cells];
        let space = AtomSpace::new(BackendKind::SgCells, ids, m)?;
        let table = VertexTable::new(level);
        Ok(SgForm { level, ext, space, table })
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn extension_matrices(&self) -> &[Matrix3<f64>; 3] {
        &self.ext
    }

    pub fn cell_count(&self) -> usize {
        self.space.len()
    }

    /// Corner values of every level-`f.level` cell.
    fn corner_values(&self, f: &SgFunction, table: &VertexTable) -> Vec<[f64; 3]> {
        table
            .cell_corners()
            .iter()
            .map(|c| [f.values[c[0]], f.values[c[1]], f.values[c[2]]])
            .collect()
    }

    /// One harmonic refinement step: level `m` values to level `m+1` values.
    pub fn refine(&self, f: &SgFunction) -> SgFunction {
        let parent = VertexTable::new(f.level);
        let child = VertexTable::new(f.level + 1);
        let parents = self.corner_values(f, &parent);
        let mut values = vec![0.0; child.vertex_count()];
        for (ci, corners) in child.cell_corners().iter().enumerate() {
            let letter = ci % 3;
            let a = parents[ci / 3];
            let v = self.ext[letter] * Vector3::from_column_slice(&a);
            for j in 0..3 {
                values[corners[j]] = v[j];
            }
        }
        SgFunction { level: f.level + 1, values }
    }

    pub fn refine_to(&self, f: &SgFunction, level: usize) -> Result<SgFunction> {
        if f.level > level {
            return Err(FormError::LevelMismatch { function: f.level, form: level });
        }
        let mut g = f.clone();
        while g.level < level {
            g = self.refine(&g);
        }
        Ok(g)
    }

    /// Renormalized energy, evaluated at the coarsest common level of the two
    /// functions (harmonic refinement leaves it invariant).
    pub fn energy(&self, f: &SgFunction, g: &SgFunction) -> Result<f64> {
        let level = f.level.max(g.level);
        if level > self.level {
            return Err(FormError::LevelMismatch { function: level, form: self.level });
        }
        let fr = self.refine_to(f, level)?;
        let gr = self.refine_to(g, level)?;
        let table = VertexTable::new(level);
        let fa = self.corner_values(&fr, &table);
        let ga = self.corner_values(&gr, &table);
        let scale = RENORM.powi(level as i32);
        let mut acc = 0.0;
        for (a, b) in fa.iter().zip(&ga) {
            acc += q_form(a, b);
        }
        Ok(scale * acc)
    }

    /// Mutual energy measure over the level-`self.level` cells:
    /// `mu<f,g>(K_v) = 2 (5/3)^n Q(a_v, b_v)`.
    pub fn mutual_measure(&self, f: &SgFunction, g: &SgFunction) -> Result<Vec<f64>> {
        let fr = self.refine_to(f, self.level)?;
        let gr = self.refine_to(g, self.level)?;
        let fa = self.corner_values(&fr, &self.table);
        let ga = self.corner_values(&gr, &self.table);
        let scale = 2.0 * RENORM.powi(self.level as i32);
        Ok(fa
            .iter()
            .zip(&ga)
            .map(|(a, b)| scale * q_form(a, b))
            .collect())
    }

    /// Diagonal case through explicit squares (entries stay nonnegative).
    pub fn diagonal_measure(&self, f: &SgFunction) -> Result<Vec<f64>> {
        let fr = self.refine_to(f, self.level)?;
        let fa = self.corner_values(&fr, &self.table);
        let scale = 2.0 * RENORM.powi(self.level as i32);
        Ok(fa
            .iter()
            .map(|a| {
                let d01 = a[0] - a[1];
                let d02 = a[0] - a[2];
                let d12 = a[1] - a[2];
                scale * (d01 * d01 + d02 * d02 + d12 * d12)
            })
            .collect())
    }

    /// Pointwise linear combination; operands are refined to a common level.
    pub fn linear_combination(&self, terms: &[(f64, &SgFunction)]) -> Result<SgFunction> {
        if terms.is_empty() {
            return Err(FormError::EmptyFamily);
        }
        let level = terms.iter().map(|(_, f)| f.level).max().unwrap();
        if level > self.level {
            return Err(FormError::LevelMismatch { function: level, form: self.level });
        }
        let n = VertexTable::new(level).vertex_count();
        let mut values = vec![0.0; n];
        for &(c, f) in terms {
            let fr = self.refine_to(f, level)?;
            for (v, &x) in values.iter_mut().zip(fr.values()) {
                *v += c * x;
            }
        }
        Ok(SgFunction { level, values })
    }

    /// Harmonic boundary indicators plus the level-1 interior vertex tents.
    pub fn default_family(&self) -> Vec<SgFunction> {
        let mut fam = vec![
            SgFunction::harmonic([1.0, 0.0, 0.0]),
            SgFunction::harmonic([0.0, 1.0, 0.0]),
            SgFunction::harmonic([0.0, 0.0, 1.0]),
        ];
        if self.level >= 1 {
            // boundary vertices of V_1 are the fixed corners of the three cells
            let t1 = VertexTable::new(1);
            let is_boundary = |v: usize| (0..3).any(|i| t1.cell_corners()[i][i] == v);
            for v in 0..t1.vertex_count() {
                if !is_boundary(v) {
                    fam.push(SgFunction::vertex_indicator(1, v).unwrap());
                }
            }
        }
        fam
    }

    /// Two harmonic generators, orthonormal in energy, used for the
    /// harmonic-measure statistics.
    pub fn orthonormal_harmonic_pair() -> (SgFunction, SgFunction) {
        let s18 = 18f64.sqrt();
        let s6 = 6f64.sqrt();
        (
            SgFunction::harmonic([2.0 / s18, -1.0 / s18, -1.0 / s18]),
            SgFunction::harmonic([0.0, 1.0 / s6, -1.0 / s6]),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Independent elimination oracle for the interior system: solve
    /// 4a - b - c = r0, -a + 4b - c = r1, -a - b + 4c = r2 by hand.
    fn interior_oracle(r: [f64; 3]) -> [f64; 3] {
        // summing the three equations gives 2(a+b+c) = r0+r1+r2, and
        // substituting b+c = s-a into the first gives 5a = r0 + s.
        let s = (r[0] + r[1] + r[2]) / 2.0;
        [(r[0] + s) / 5.0, (r[1] + s) / 5.0, (r[2] + s) / 5.0]
    }

    #[test]
    fn extension_matrices_match_elimination_oracle() {
        let mats = derive_extension_matrices().unwrap();
        // boundary (1,0,0): rhs (q0+q1, q0+q2, q1+q2) = (1,1,0)
        let y = interior_oracle([1.0, 1.0, 0.0]);
        assert_relative_eq!(y[0], 0.4, epsilon = 1e-14); // y01
        assert_relative_eq!(y[1], 0.4, epsilon = 1e-14); // y02
        assert_relative_eq!(y[2], 0.2, epsilon = 1e-14); // y12
        let a = Vector3::new(1.0, 0.0, 0.0);
        let a0 = mats[0] * a;
        assert_relative_eq!(a0[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(a0[1], 0.4, epsilon = 1e-14);
        assert_relative_eq!(a0[2], 0.4, epsilon = 1e-14);
        let a1 = mats[1] * a;
        assert_relative_eq!(a1[0], 0.4, epsilon = 1e-14);
        assert_relative_eq!(a1[1], 0.0, epsilon = 1e-14);
        assert_relative_eq!(a1[2], 0.2, epsilon = 1e-14);
    }

    #[test]
    fn constants_extend_to_constants() {
        let mats = derive_extension_matrices().unwrap();
        let ones = Vector3::new(1.0, 1.0, 1.0);
        for m in &mats {
            let v = m * ones;
            for j in 0..3 {
                assert_relative_eq!(v[j], 1.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn validation_passes() {
        let mats = derive_extension_matrices().unwrap();
        validate_extension_matrices(&mats).unwrap();
    }

    #[test]
    fn self_similarity_hand_values() {
        let mats = derive_extension_matrices().unwrap();
        let a = [1.0, 0.0, 0.0];
        let mut qs = Vec::new();
        for m in &mats {
            let v = m * Vector3::from_column_slice(&a);
            let va = [v[0], v[1], v[2]];
            qs.push(q_form(&va, &va));
        }
        assert_relative_eq!(qs[0], 0.72, epsilon = 1e-14);
        assert_relative_eq!(qs[1], 0.24, epsilon = 1e-14);
        assert_relative_eq!(qs[2], 0.24, epsilon = 1e-14);
        assert_relative_eq!(RENORM * (qs[0] + qs[1] + qs[2]), 2.0, epsilon = 1e-13);
    }

    #[test]
    fn harmonic_energy_matches_level_one_minimum() {
        // level-1 minimization oracle: harmonic extension attains the minimal
        // renormalized level-1 energy, which equals Q on the boundary.
        let form = SgForm::new(1).unwrap();
        let h = SgFunction::harmonic([1.0, 0.0, 0.0]);
        let e = form.energy(&h, &h).unwrap();
        assert_relative_eq!(e, 2.0, epsilon = 1e-13);
        // the refined function evaluated at level 1 gives the same value
        let h1 = form.refine_to(&h, 1).unwrap();
        let e1 = form.energy(&h1, &h1).unwrap();
        assert_relative_eq!(e1, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn level_one_cell_measure() {
        let form = SgForm::new(1).unwrap();
        let h = SgFunction::harmonic([1.0, 0.0, 0.0]);
        let mu = form.diagonal_measure(&h).unwrap();
        // entries 2*(5/3)*Q(A_i a); total = 2 * energy = 4
        assert_relative_eq!(mu[0], 2.4, epsilon = 1e-13);
        assert_relative_eq!(mu[1], 0.8, epsilon = 1e-13);
        assert_relative_eq!(mu[2], 0.8, epsilon = 1e-13);
        assert_relative_eq!(mu.iter().sum::<f64>(), 4.0, epsilon = 1e-13);
    }

    #[test]
    fn refinement_additivity() {
        let coarse = SgForm::new(2).unwrap();
        let fine = SgForm::new(3).unwrap();
        let h = SgFunction::harmonic([0.3, -1.2, 0.4]);
        let mu2 = coarse.diagonal_measure(&h).unwrap();
        let mu3 = fine.diagonal_measure(&h).unwrap();
        for (ci, &parent) in mu2.iter().enumerate() {
            let children: f64 = (0..3).map(|i| mu3[ci * 3 + i]).sum();
            assert_relative_eq!(parent, children, epsilon = 1e-12, max_relative = 1e-12);
        }
    }

    #[test]
    fn constant_is_null() {
        let form = SgForm::new(2).unwrap();
        let c = SgFunction::constant(3.0);
        assert_eq!(form.energy(&c, &c).unwrap(), 0.0);
        // refinement of constants picks up last-bit rounding, so the cell
        // measures are only zero to the 1e-12 budget
        assert!(form
            .diagonal_measure(&c)
            .unwrap()
            .iter()
            .all(|&x| x.abs() <= 1e-13));
    }

    #[test]
    fn pwh_indicator_total_mass() {
        // indicator of boundary corner q0 on the level-1 vertex set:
        // level-1 graph energy is Q((1,0,0)) = 2 from the one supporting cell,
        // so the total measure is 2 * (5/3) * 2 = 20/3.
        let form = SgForm::new(2).unwrap();
        let f = SgFunction::vertex_indicator(1, 0).unwrap();
        let e = form.energy(&f, &f).unwrap();
        assert_relative_eq!(e, RENORM * 2.0, epsilon = 1e-13);
        let mu = form.diagonal_measure(&f).unwrap();
        assert_relative_eq!(mu.iter().sum::<f64>(), 2.0 * RENORM * 2.0, epsilon = 1e-12);
    }

    #[test]
    fn vertex_counts() {
        for (level, expected) in [(0usize, 3usize), (1, 6), (2, 15), (3, 42)] {
            assert_eq!(VertexTable::new(level).vertex_count(), expected);
        }
    }

    #[test]
    fn default_family_size() {
        let form = SgForm::new(3).unwrap();
        assert_eq!(form.default_family().len(), 6);
    }

    #[test]
    fn orthonormal_pair_is_orthonormal() {
        let form = SgForm::new(1).unwrap();
        let (h1, h2) = SgForm::orthonormal_harmonic_pair();
        assert_relative_eq!(form.energy(&h1, &h1).unwrap(), 1.0, epsilon = 1e-13);
        assert_relative_eq!(form.energy(&h2, &h2).unwrap(), 1.0, epsilon = 1e-13);
        assert_relative_eq!(form.energy(&h1, &h2).unwrap(), 0.0, epsilon = 1e-13);
    }
}
