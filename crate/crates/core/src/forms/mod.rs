//! Form backends and the unified model interface.
//!
//! Three backends expose the same contract: a bilinear energy, per-atom
//! energy measures whose total mass is twice the energy, and signed mutual
//! measures obeying polarization and the atomwise Cauchy-Schwarz bound.

pub mod graph;
pub mod sg;
pub mod superposition;

pub use graph::GraphForm;
pub use sg::{SgForm, SgFunction, VertexTable};
pub use superposition::{Basis, SuperFunction, SuperpositionForm};

use crate::atoms::{AtomSpace, BackendKind, MeasureVec, SignedMeasureVec};
use crate::error::{FormError, Result};

/// A function in the domain of one backend.
#[derive(Debug, Clone, PartialEq)]
pub enum Function {
    Graph(Vec<f64>),
    Sg(SgFunction),
    Super(SuperFunction),
}

impl Function {
    pub fn backend_name(&self) -> &'static str {
        match self {
            Function::Graph(_) => "graph",
            Function::Sg(_) => "sg-cells",
            Function::Super(_) => "superposition",
        }
    }
}

/// One of the three Dirichlet-form backends.
#[derive(Debug, Clone)]
pub enum FormModel {
    Graph(GraphForm),
    Sg(SgForm),
    Super(SuperpositionForm),
}

impl FormModel {
    pub fn atoms(&self) -> &AtomSpace {
        match self {
            FormModel::Graph(g) => g.space(),
            FormModel::Sg(s) => s.space(),
            FormModel::Super(s) => s.space(),
        }
    }

    pub fn kind(&self) -> BackendKind {
        self.atoms().kind()
    }

    fn mismatch(&self, f: &Function) -> FormError {
        FormError::BackendMismatch {
            model: self.kind().name(),
            function: f.backend_name(),
        }
    }

    /// Bilinear energy `E(f,g)`.
    pub fn energy(&self, f: &Function, g: &Function) -> Result<f64> {
        match (self, f, g) {
            (FormModel::Graph(m), Function::Graph(a), Function::Graph(b)) => m.energy(a, b),
            (FormModel::Sg(m), Function::Sg(a), Function::Sg(b)) => m.energy(a, b),
            (FormModel::Super(m), Function::Super(a), Function::Super(b)) => m.energy(a, b),
            _ => Err(self.mismatch(if f.backend_name() != self.kind().name() { f } else { g })),
        }
    }

    /// Energy measure `mu<f>` as a nonnegative atom vector with total
    /// `2 E(f,f)`.
    pub fn energy_measure(&self, f: &Function) -> Result<MeasureVec> {
        let weights = match (self, f) {
            (FormModel::Graph(m), Function::Graph(a)) => m.diagonal_measure(a)?,
            (FormModel::Sg(m), Function::Sg(a)) => m.diagonal_measure(a)?,
            (FormModel::Super(m), Function::Super(a)) => m.diagonal_measure(a)?,
            _ => return Err(self.mismatch(f)),
        };
        MeasureVec::new(weights)
    }

    /// Mutual energy measure through the direct bilinear formula of each
    /// backend.
    pub fn mutual_energy_measure(&self, f: &Function, g: &Function) -> Result<SignedMeasureVec> {
        let weights = match (self, f, g) {
            (FormModel::Graph(m), Function::Graph(a), Function::Graph(b)) => {
                m.mutual_measure(a, b)?
            }
            (FormModel::Sg(m), Function::Sg(a), Function::Sg(b)) => m.mutual_measure(a, b)?,
            (FormModel::Super(m), Function::Super(a), Function::Super(b)) => {
                m.mutual_measure(a, b)?
            }
            _ => return Err(self.mismatch(if f.backend_name() != self.kind().name() { f } else { g })),
        };
        Ok(SignedMeasureVec::new(weights))
    }

    /// Mutual energy measure through polarization,
    /// `(mu<f+g> - mu<f> - mu<g>) / 2`. Kept as an independent route; the two
    /// must agree atomwise.
    pub fn mutual_energy_measure_polarized(
        &self,
        f: &Function,
        g: &Function,
    ) -> Result<SignedMeasureVec> {
        let sum = self.linear_combination(&[(1.0, f), (1.0, g)])?;
        let mu_sum = self.energy_measure(&sum)?;
        let mu_f = self.energy_measure(f)?;
        let mu_g = self.energy_measure(g)?;
        let weights = mu_sum
            .weights()
            .iter()
            .zip(mu_f.weights())
            .zip(mu_g.weights())
            .map(|((s, a), b)| 0.5 * (s - a - b))
            .collect();
        Ok(SignedMeasureVec::new(weights))
    }

    pub fn linear_combination(&self, terms: &[(f64, &Function)]) -> Result<Function> {
        if terms.is_empty() {
            return Err(FormError::EmptyFamily);
        }
        match self {
            FormModel::Graph(m) => {
                let n = m.space().len();
                let mut values = vec![0.0; n];
                for &(c, f) in terms {
                    match f {
                        Function::Graph(v) => {
                            m.check_len(v)?;
                            for (acc, &x) in values.iter_mut().zip(v) {
                                *acc += c * x;
                            }
                        }
                        _ => return Err(self.mismatch(f)),
                    }
                }
                Ok(Function::Graph(values))
            }
            FormModel::Sg(m) => {
                let mut sg_terms = Vec::with_capacity(terms.len());
                for &(c, f) in terms {
                    match f {
                        Function::Sg(s) => sg_terms.push((c, s)),
                        _ => return Err(self.mismatch(f)),
                    }
                }
                Ok(Function::Sg(m.linear_combination(&sg_terms)?))
            }
            FormModel::Super(m) => {
                let mut s_terms = Vec::with_capacity(terms.len());
                for &(c, f) in terms {
                    match f {
                        Function::Super(s) => s_terms.push((c, s)),
                        _ => return Err(self.mismatch(f)),
                    }
                }
                Ok(Function::Super(m.linear_combination(&s_terms)?))
            }
        }
    }

    /// The constant function `c`.
    pub fn constant(&self, c: f64) -> Function {
        match self {
            FormModel::Graph(m) => Function::Graph(vec![c; m.space().len()]),
            FormModel::Sg(_) => Function::Sg(SgFunction::constant(c)),
            FormModel::Super(m) => Function::Super(SuperFunction::constant(m.catalogue().len(), c)),
        }
    }

    /// Default generating family: vertex indicators on graphs, the harmonic
    /// basis plus level-1 tents on cells, the full catalogue on the
    /// superposition model.
    pub fn default_family(&self) -> Vec<Function> {
        match self {
            FormModel::Graph(m) => m.indicator_family().into_iter().map(Function::Graph).collect(),
            FormModel::Sg(m) => m.default_family().into_iter().map(Function::Sg).collect(),
            FormModel::Super(m) => m.default_family().into_iter().map(Function::Super).collect(),
        }
    }

    pub fn validate_function(&self, f: &Function) -> Result<()> {
        match (self, f) {
            (FormModel::Graph(m), Function::Graph(v)) => m.check_len(v),
            (FormModel::Sg(m), Function::Sg(s)) => {
                if s.level() > m.level() {
                    Err(FormError::LevelMismatch { function: s.level(), form: m.level() })
                } else {
                    Ok(())
                }
            }
            (FormModel::Super(m), Function::Super(s)) => m.check(s),
            _ => Err(self.mismatch(f)),
        }
    }
}
