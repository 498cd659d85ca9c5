//! Weighted-graph Dirichlet forms.
//!
//! The energy is `E(f,g) = (1/2) * sum over ordered pairs c(x,y)(f(x)-f(y))(g(x)-g(y))`
//! and the energy measure places `mu<f,g>({x}) = sum_y c(x,y)(f(x)-f(y))(g(x)-g(y))`
//! on each vertex, so the total-mass identity `mu<f>(X) = 2 E(f)` holds with the
//! factor from the strong-local theory.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::atoms::{AtomSpace, BackendKind};
use crate::error::{FormError, Result};

#[derive(Debug, Clone)]
pub struct GraphForm {
    space: AtomSpace,
    /// Deduplicated edges with i < j and c > 0.
    edges: Vec<(usize, usize, f64)>,
    /// Per-vertex neighbor list (neighbor, conductance).
    adjacency: Vec<Vec<(usize, f64)>>,
}

impl GraphForm {
    /// Build from an edge list. Conductances must be nonnegative; zero entries
    /// are dropped; self-loops are rejected; every vertex needs at least one
    /// positive conductance.
    pub fn new(space: AtomSpace, conductances: &[(usize, usize, f64)]) -> Result<Self> {
        let form = Self::assemble(space, conductances)?;
        for (x, nbrs) in form.adjacency.iter().enumerate() {
            if nbrs.is_empty() {
                return Err(FormError::InvalidModel(format!(
                    "atom `{}` has no positive conductance",
                    form.space.id(x)
                )));
            }
        }
        Ok(form)
    }

    /// Like [`GraphForm::new`] but allows isolated vertices. Degenerate models
    /// built this way are only meaningful for testing domination failures.
    pub fn new_allow_isolated(space: AtomSpace, conductances: &[(usize, usize, f64)]) -> Result<Self> {
        Self::assemble(space, conductances)
    }

    fn assemble(space: AtomSpace, conductances: &[(usize, usize, f64)]) -> Result<Self> {
        let n = space.len();
        let mut weight = std::collections::HashMap::new();
        for &(i, j, c) in conductances {
            if i >= n || j >= n {
                return Err(FormError::InvalidModel(format!(
                    "edge ({i},{j}) out of range for {n} atoms"
                )));
            }
            if i == j {
                if c != 0.0 {
                    return Err(FormError::InvalidModel(format!("self-loop at atom {i}")));
                }
                continue;
            }
            if c < 0.0 || !c.is_finite() {
                return Err(FormError::InvalidModel(format!(
                    "conductance {c} on edge ({i},{j}) is not finite nonnegative"
                )));
            }
            if c == 0.0 {
                continue;
            }
            let key = (i.min(j), i.max(j));
            if let Some(prev) = weight.insert(key, c) {
                if (prev - c).abs() > 0.0 {
                    return Err(FormError::InvalidModel(format!(
                        "conflicting conductances {prev} and {c} on edge {key:?}"
                    )));
                }
            }
        }
        let mut edges: Vec<(usize, usize, f64)> =
            weight.into_iter().map(|((i, j), c)| (i, j, c)).collect();
        edges.sort_unstable_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j, c) in &edges {
            adjacency[i].push((j, c));
            adjacency[j].push((i, c));
        }
        Ok(GraphForm { space, edges, adjacency })
    }

    /// Path graph `v0 - v1 - ... - v{n-1}` with unit conductances and unit base weights.
    pub fn path(n: usize) -> Result<Self> {
        let space = unit_space(n)?;
        let edges: Vec<_> = (0..n.saturating_sub(1)).map(|i| (i, i + 1, 1.0)).collect();
        if n == 1 {
            return Self::new_allow_isolated(space, &edges);
        }
        Self::new(space, &edges)
    }

    /// Complete graph on `n` vertices with unit conductances and unit base weights.
    pub fn complete(n: usize) -> Result<Self> {
        let space = unit_space(n)?;
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j, 1.0));
            }
        }
        Self::new(space, &edges)
    }

    /// Seeded random connected graph: a random attachment tree plus `n/2`
    /// extra edges, conductances uniform in [0.5, 2], unit base weights.
    pub fn random_connected(n: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(FormError::InvalidModel("empty graph".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        let mut present = std::collections::HashSet::new();
        for v in 1..n {
            let u = rng.random_range(0..v);
            edges.push((u, v, rng.random_range(0.5..2.0)));
            present.insert((u.min(v), u.max(v)));
        }
        let extra = n / 2;
        let mut added = 0;
        let mut guard = 0;
        while added < extra && guard < 50 * (extra + 1) {
            guard += 1;
            let u = rng.random_range(0..n);
            let v = rng.random_range(0..n);
            if u == v {
                continue;
            }
            let key = (u.min(v), u.max(v));
            if present.insert(key) {
                edges.push((key.0, key.1, rng.random_range(0.5..2.0)));
                added += 1;
            }
        }
        Self::new(unit_space(n)?, &edges)
    }

    pub fn space(&self) -> &AtomSpace {
        &self.space
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, atom: usize) -> &[(usize, f64)] {
        &self.adjacency[atom]
    }

    pub fn degree(&self, atom: usize) -> usize {
        self.adjacency[atom].len()
    }

    pub fn check_len(&self, values: &[f64]) -> Result<()> {
        if values.len() != self.space.len() {
            return Err(FormError::FunctionLength {
                expected: self.space.len(),
                got: values.len(),
            });
        }
        Ok(())
    }

    pub fn energy(&self, f: &[f64], g: &[f64]) -> Result<f64> {
        self.check_len(f)?;
        self.check_len(g)?;
        let mut acc = 0.0;
        for &(i, j, c) in &self.edges {
            acc += c * (f[i] - f[j]) * (g[i] - g[j]);
        }
        Ok(acc)
    }

    /// `mu<f,g>({x}) = sum_y c(x,y)(f(x)-f(y))(g(x)-g(y))`, signed in general.
    pub fn mutual_measure(&self, f: &[f64], g: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        self.check_len(g)?;
        let mut out = vec![0.0; self.space.len()];
        for (x, nbrs) in self.adjacency.iter().enumerate() {
            let mut acc = 0.0;
            for &(y, c) in nbrs {
                acc += c * (f[x] - f[y]) * (g[x] - g[y]);
            }
            out[x] = acc;
        }
        Ok(out)
    }

    /// Diagonal case computed through explicit squares so entries stay
    /// nonnegative in floating point.
    pub fn diagonal_measure(&self, f: &[f64]) -> Result<Vec<f64>> {
        self.check_len(f)?;
        let mut out = vec![0.0; self.space.len()];
        for (x, nbrs) in self.adjacency.iter().enumerate() {
            let mut acc = 0.0;
            for &(y, c) in nbrs {
                let d = f[x] - f[y];
                acc += c * d * d;
            }
            out[x] = acc;
        }
        Ok(out)
    }

    /// Vertex indicators in atom order; their span is the whole function space.
    pub fn indicator_family(&self) -> Vec<Vec<f64>> {
        let n = self.space.len();
        (0..n)
            .map(|i| {
                let mut v = vec![0.0; n];
                v[i] = 1.0;
                v
            })
            .collect()
    }
}

fn unit_space(n: usize) -> Result<AtomSpace> {
    AtomSpace::new(
        BackendKind::Graph,
        (0..n).map(|i| format!("v{i}")).collect(),
        vec![1.0; n],
    )
}
