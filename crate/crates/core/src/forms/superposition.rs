//! Superposition form on `[-1,1]^n`: a bulk Dirichlet integral plus a
//! lower-dimensional Dirichlet integral on the hyperplane `{y = 0}`.
//!
//! Coordinates are `(x_1, ..., x_{n-1}, y)`. Atoms are midpoint-quadrature
//! cells: a uniform grid of the cube (bulk) and of the hyperplane (surface).
//! Functions form a fixed quadratic catalogue with exact gradients; energies
//! are midpoint sums (second-order accurate in the grid against the continuum
//! integrals, exact as the finite model's ground truth). The density of
//! `mu<f,g>` at a bulk cell is the full gradient inner product at the center;
//! at a surface cell the `y`-derivative drops out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::atoms::{AtomSpace, BackendKind};
use crate::error::{FormError, Result};

/// One catalogue entry. `Coord(k)` is `x_{k+1}` for `k < n-1`; `Y` is the last
/// coordinate; the quadratic entries are the pairwise monomials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Basis {
    Coord(usize),
    Y,
    Prod(usize, usize),
    CoordY(usize),
    YSquared,
}

impl Basis {
    pub fn value(self, pt: &[f64]) -> f64 {
        let n = pt.len();
        match self {
            Basis::Coord(k) => pt[k],
            Basis::Y => pt[n - 1],
            Basis::Prod(j, k) => pt[j] * pt[k],
            Basis::CoordY(k) => pt[k] * pt[n - 1],
            Basis::YSquared => pt[n - 1] * pt[n - 1],
        }
    }

    pub fn add_gradient(self, pt: &[f64], scale: f64, out: &mut [f64]) {
        let n = pt.len();
        match self {
            Basis::Coord(k) => out[k] += scale,
            Basis::Y => out[n - 1] += scale,
            Basis::Prod(j, k) => {
                out[j] += scale * pt[k];
                out[k] += scale * pt[j];
            }
            Basis::CoordY(k) => {
                out[k] += scale * pt[n - 1];
                out[n - 1] += scale * pt[k];
            }
            Basis::YSquared => out[n - 1] += scale * 2.0 * pt[n - 1],
        }
    }

    pub fn label(self) -> String {
        match self {
            Basis::Coord(k) => format!("x{}", k + 1),
            Basis::Y => "y".into(),
            Basis::Prod(j, k) => format!("x{}*x{}", j + 1, k + 1),
            Basis::CoordY(k) => format!("x{}*y", k + 1),
            Basis::YSquared => "y^2".into(),
        }
    }
}

/// Function as a linear combination over the catalogue plus a constant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuperFunction {
    pub coeffs: Vec<f64>,
    pub constant: f64,
}

impl SuperFunction {
    pub fn basis(catalogue_len: usize, index: usize) -> Self {
        let mut coeffs = vec![0.0; catalogue_len];
        coeffs[index] = 1.0;
        SuperFunction { coeffs, constant: 0.0 }
    }

    pub fn constant(catalogue_len: usize, c: f64) -> Self {
        SuperFunction { coeffs: vec![0.0; catalogue_len], constant: c }
    }
}

#[derive(Debug, Clone)]
struct Cell {
    center: Vec<f64>,
    weight: f64,
}

#[derive(Debug, Clone)]
pub struct SuperpositionForm {
    n: usize,
    grid: usize,
    catalogue: Vec<Basis>,
    cells: Vec<Cell>,
    n_bulk: usize,
    space: AtomSpace,
}

impl SuperpositionForm {
    /// `n >= 2` coordinates, `grid` cells per axis.
    pub fn new(n: usize, grid: usize) -> Result<Self> {
        if n < 2 {
            return Err(FormError::InvalidModel(format!("dimension {n} < 2")));
        }
        if grid == 0 {
            return Err(FormError::InvalidModel("grid must be positive".into()));
        }
        let catalogue = build_catalogue(n);
        let mut cells = Vec::new();
        let mut ids = Vec::new();
        let h = 2.0 / grid as f64;
        // bulk cells: n-dimensional midpoint grid of [-1,1]^n
        let bulk_count = grid.pow(n as u32);
        for flat in 0..bulk_count {
            let idx = unflatten(flat, grid, n);
            let center: Vec<f64> = idx.iter().map(|&i| -1.0 + h * (i as f64 + 0.5)).collect();
            ids.push(format!(
                "b{}",
                idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("_")
            ));
            cells.push(Cell { center, weight: h.powi(n as i32) });
        }
        let n_bulk = cells.len();
        // surface cells: (n-1)-dimensional grid of the hyperplane {y = 0}
        let surf_count = grid.pow(n as u32 - 1);
        for flat in 0..surf_count {
            let idx = unflatten(flat, grid, n - 1);
            let mut center: Vec<f64> =
                idx.iter().map(|&i| -1.0 + h * (i as f64 + 0.5)).collect();
            center.push(0.0);
            ids.push(format!(
                "s{}",
                idx.iter().map(|i| i.to_string()).collect::<Vec<_>>().join("_")
            ));
            cells.push(Cell { center, weight: h.powi(n as i32 - 1) });
        }
        let m: Vec<f64> = cells.iter().map(|c| c.weight).collect();
        let space = AtomSpace::new(BackendKind::Superposition, ids, m)?;
        Ok(SuperpositionForm { n, grid, catalogue, cells, n_bulk, space })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn catalogue(&self) -> &[Basis] {
        &self.catalogue
    }

    pub fn bulk_count(&self) -> usize {
        self.n_bulk
    }

    pub fn surface_count(&self) -> usize {
        self.cells.len() - self.n_bulk
    }

    pub fn is_bulk(&self, atom: usize) -> bool {
        atom < self.n_bulk
    }

    pub fn cell_center(&self, atom: usize) -> &[f64] {
        &self.cells[atom].center
    }

    pub fn cell_weight(&self, atom: usize) -> f64 {
        self.cells[atom].weight
    }

    pub fn check(&self, f: &SuperFunction) -> Result<()> {
        if f.coeffs.len() != self.catalogue.len() {
            return Err(FormError::FunctionLength {
                expected: self.catalogue.len(),
                got: f.coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn value(&self, f: &SuperFunction, pt: &[f64]) -> f64 {
        let mut acc = f.constant;
        for (c, b) in f.coeffs.iter().zip(&self.catalogue) {
            if *c != 0.0 {
                acc += c * b.value(pt);
            }
        }
        acc
    }

    pub fn gradient(&self, f: &SuperFunction, pt: &[f64], out: &mut [f64]) {
        out.fill(0.0);
        for (c, b) in f.coeffs.iter().zip(&self.catalogue) {
            if *c != 0.0 {
                b.add_gradient(pt, *c, out);
            }
        }
    }

    /// Exact closed-form density of `mu<f,g>` at one atom center: the full
    /// gradient inner product on bulk atoms, the tangential part on surface
    /// atoms (the `y`-derivative is absent from the surface term).
    pub fn density_at(&self, f: &SuperFunction, g: &SuperFunction, atom: usize) -> Result<f64> {
        self.check(f)?;
        self.check(g)?;
        let pt = &self.cells[atom].center;
        let mut gf = vec![0.0; self.n];
        let mut gg = vec![0.0; self.n];
        self.gradient(f, pt, &mut gf);
        self.gradient(g, pt, &mut gg);
        let upto = if self.is_bulk(atom) { self.n } else { self.n - 1 };
        Ok(gf[..upto].iter().zip(&gg[..upto]).map(|(a, b)| a * b).sum())
    }

    /// `mu<f,g>(cell) = density(center) * quadrature weight`.
    pub fn mutual_measure(&self, f: &SuperFunction, g: &SuperFunction) -> Result<Vec<f64>> {
        self.check(f)?;
        self.check(g)?;
        let mut out = vec![0.0; self.cells.len()];
        let mut gf = vec![0.0; self.n];
        let mut gg = vec![0.0; self.n];
        for (i, cell) in self.cells.iter().enumerate() {
            self.gradient(f, &cell.center, &mut gf);
            self.gradient(g, &cell.center, &mut gg);
            let upto = if i < self.n_bulk { self.n } else { self.n - 1 };
            let dot: f64 = gf[..upto].iter().zip(&gg[..upto]).map(|(a, b)| a * b).sum();
            out[i] = dot * cell.weight;
        }
        Ok(out)
    }

    pub fn diagonal_measure(&self, f: &SuperFunction) -> Result<Vec<f64>> {
        self.check(f)?;
        let mut out = vec![0.0; self.cells.len()];
        let mut gf = vec![0.0; self.n];
        for (i, cell) in self.cells.iter().enumerate() {
            self.gradient(f, &cell.center, &mut gf);
            let upto = if i < self.n_bulk { self.n } else { self.n - 1 };
            let sq: f64 = gf[..upto].iter().map(|a| a * a).sum();
            out[i] = sq * cell.weight;
        }
        Ok(out)
    }

    /// Midpoint-rule energy: half the total measure mass, split out so the
    /// total-mass identity is a real check of the shared quadrature.
    pub fn energy(&self, f: &SuperFunction, g: &SuperFunction) -> Result<f64> {
        let mu = self.mutual_measure(f, g)?;
        Ok(0.5 * mu.iter().sum::<f64>())
    }

    pub fn linear_combination(&self, terms: &[(f64, &SuperFunction)]) -> Result<SuperFunction> {
        if terms.is_empty() {
            return Err(FormError::EmptyFamily);
        }
        let mut coeffs = vec![0.0; self.catalogue.len()];
        let mut constant = 0.0;
        for &(c, f) in terms {
            self.check(f)?;
            constant += c * f.constant;
            for (acc, &x) in coeffs.iter_mut().zip(&f.coeffs) {
                *acc += c * x;
            }
        }
        Ok(SuperFunction { coeffs, constant })
    }

    /// The full catalogue as a family, in catalogue order.
    pub fn default_family(&self) -> Vec<SuperFunction> {
        (0..self.catalogue.len())
            .map(|i| SuperFunction::basis(self.catalogue.len(), i))
            .collect()
    }

    /// Symbolic polynomial of a function in the coordinates, for products.
    pub(crate) fn to_poly(&self, f: &SuperFunction) -> Poly {
        let mut p = Poly::constant(self.n, f.constant);
        for (c, b) in f.coeffs.iter().zip(&self.catalogue) {
            if *c != 0.0 {
                p.add_assign(&Poly::from_basis(self.n, *b).scaled(*c));
            }
        }
        p
    }

    /// Reduce a polynomial back into the catalogue; errors when a monomial
    /// falls outside the quadratic catalogue span.
    pub(crate) fn from_poly(&self, p: &Poly) -> Result<SuperFunction> {
        let mut f = SuperFunction::constant(self.catalogue.len(), 0.0);
        for (mono, &c) in &p.terms {
            if c == 0.0 {
                continue;
            }
            match self.match_monomial(mono) {
                Some(None) => f.constant += c,
                Some(Some(idx)) => f.coeffs[idx] += c,
                None => {
                    return Err(FormError::NotRepresentable(format!(
                        "monomial with exponents {mono:?}"
                    )))
                }
            }
        }
        Ok(f)
    }

    /// `Some(None)` = constant, `Some(Some(i))` = catalogue index `i`.
    fn match_monomial(&self, mono: &[u8]) -> Option<Option<usize>> {
        let target: Vec<(usize, u8)> = mono
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| (i, e))
            .collect();
        if target.is_empty() {
            return Some(None);
        }
        let basis = match target.as_slice() {
            [(i, 1)] if *i == self.n - 1 => Basis::Y,
            [(i, 1)] => Basis::Coord(*i),
            [(i, 2)] if *i == self.n - 1 => Basis::YSquared,
            [(i, 2)] => Basis::Prod(*i, *i),
            [(i, 1), (j, 1)] if *j == self.n - 1 => Basis::CoordY(*i),
            [(i, 1), (j, 1)] => Basis::Prod(*i, *j),
            _ => return None,
        };
        self.catalogue.iter().position(|b| *b == basis).map(Some)
    }
}

fn build_catalogue(n: usize) -> Vec<Basis> {
    let mut cat = Vec::new();
    for k in 0..n - 1 {
        cat.push(Basis::Coord(k));
    }
    cat.push(Basis::Y);
    for j in 0..n - 1 {
        for k in j..n - 1 {
            cat.push(Basis::Prod(j, k));
        }
    }
    for k in 0..n - 1 {
        cat.push(Basis::CoordY(k));
    }
    cat.push(Basis::YSquared);
    cat
}

fn unflatten(mut flat: usize, grid: usize, dims: usize) -> Vec<usize> {
    let mut idx = vec![0usize; dims];
    for k in (0..dims).rev() {
        idx[k] = flat % grid;
        flat /= grid;
    }
    idx
}

/// Sparse polynomial in the `n` coordinates, exponents per variable.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Poly {
    n: usize,
    pub(crate) terms: BTreeMap<Vec<u8>, f64>,
}

impl Poly {
    pub fn constant(n: usize, c: f64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert(vec![0u8; n], c);
        }
        Poly { n, terms }
    }

    pub fn from_basis(n: usize, b: Basis) -> Self {
        let mut exps = vec![0u8; n];
        match b {
            Basis::Coord(k) => exps[k] = 1,
            Basis::Y => exps[n - 1] = 1,
            Basis::Prod(j, k) => {
                exps[j] += 1;
                exps[k] += 1;
            }
            Basis::CoordY(k) => {
                exps[k] = 1;
                exps[n - 1] = 1;
            }
            Basis::YSquared => exps[n - 1] = 2,
        }
        let mut terms = BTreeMap::new();
        terms.insert(exps, 1.0);
        Poly { n, terms }
    }

    pub fn scaled(mut self, c: f64) -> Self {
        if c == 0.0 {
            self.terms.clear();
        } else {
            for v in self.terms.values_mut() {
                *v *= c;
            }
        }
        self
    }

    pub fn add_assign(&mut self, other: &Poly) {
        for (mono, &c) in &other.terms {
            *self.terms.entry(mono.clone()).or_insert(0.0) += c;
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut terms: BTreeMap<Vec<u8>, f64> = BTreeMap::new();
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let mono: Vec<u8> = ma.iter().zip(mb).map(|(a, b)| a + b).collect();
                *terms.entry(mono).or_insert(0.0) += ca * cb;
            }
        }
        Poly { n: self.n, terms }
    }
}
