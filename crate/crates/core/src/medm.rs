//! Minimal energy-dominant measures and Radon-Nikodym density fields.
//!
//! A dominant measure is built from a finite generating family as the
//! geometric mixture `nu = sum_i 2^{-i} mu<f_i>`; it charges every atom that
//! any generator's energy measure charges, which is the finite-atom form of
//! domination. Densities divide atomwise with the `0/0 := 1` convention, and
//! a domination failure (mass against a null atom) is a hard error because
//! every downstream formula divides by `nu`.

use serde::{Deserialize, Serialize};

use crate::atoms::{AtomSpace, MeasureVec};
use crate::error::{FormError, Result};
use crate::forms::{FormModel, Function};
use crate::tol::Tolerances;

/// Energy-dominant measure with its generating family.
#[derive(Debug, Clone)]
pub struct DominantMeasure {
    nu: MeasureVec,
    family: Vec<Function>,
    mix_weights: Vec<f64>,
    degenerate: bool,
}

impl DominantMeasure {
    pub fn weights(&self) -> &MeasureVec {
        &self.nu
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.nu.get(atom)
    }

    pub fn family(&self) -> &[Function] {
        &self.family
    }

    pub fn mix_weights(&self) -> &[f64] {
        &self.mix_weights
    }

    /// True when every atom weight is below the zero threshold (for example a
    /// family of constants).
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn positive_atoms<'a>(&'a self, tols: &Tolerances) -> impl Iterator<Item = usize> + 'a {
        let tau = tols.tau_zero;
        (0..self.nu.len()).filter(move |&i| self.nu.get(i) > tau)
    }
}

/// `nu = sum_i 2^{-i} mu<f_i>`, `i` starting at 1.
pub fn build_medm(model: &FormModel, family: &[Function]) -> Result<DominantMeasure> {
    if family.is_empty() {
        return Err(FormError::EmptyFamily);
    }
    let n = model.atoms().len();
    let mut nu = vec![0.0; n];
    let mut mix_weights = Vec::with_capacity(family.len());
    for (i, f) in family.iter().enumerate() {
        let w = 0.5f64.powi(i as i32 + 1);
        mix_weights.push(w);
        let mu = model.energy_measure(f)?;
        for (acc, &x) in nu.iter_mut().zip(mu.weights()) {
            *acc += w * x;
        }
    }
    let degenerate = nu.iter().all(|&x| x <= Tolerances::default().tau_zero);
    Ok(DominantMeasure {
        nu: MeasureVec::new(nu)?,
        family: family.to_vec(),
        mix_weights,
        degenerate,
    })
}

/// Per-atom Radon-Nikodym density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField(Vec<f64>);

impl DensityField {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, atom: usize) -> f64 {
        self.0[atom]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Atomwise `mu / nu` with `0/0 := 1`; an atom with `nu = 0` but `mu != 0`
/// is a domination violation.
pub fn density(
    mu: &[f64],
    nu: &MeasureVec,
    atoms: &AtomSpace,
    tols: &Tolerances,
) -> Result<DensityField> {
    if mu.len() != nu.len() || mu.len() != atoms.len() {
        return Err(FormError::InvalidInput(format!(
            "density over {} atoms given mu of {} and nu of {}",
            atoms.len(),
            mu.len(),
            nu.len()
        )));
    }
    let mut out = vec![0.0; mu.len()];
    for i in 0..mu.len() {
        let m = mu[i];
        let w = nu.get(i);
        out[i] = if w > tols.tau_zero {
            m / w
        } else if m.abs() <= tols.tau_zero {
            1.0
        } else {
            return Err(FormError::DominationViolation {
                atom: atoms.id(i).to_string(),
                mu: m,
                nu: w,
            });
        };
    }
    Ok(DensityField(out))
}

/// Outcome of the two-sided dominant-measure check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MedmReport {
    pub is_medm: bool,
    /// Atoms where the candidate vanishes but some family measure does not.
    pub domination_failures: Vec<String>,
    /// Atoms where the reference mixture vanishes but the candidate does not.
    pub minimality_failures: Vec<String>,
}

/// Check domination (every `mu<f>` vanishes where the candidate vanishes) and
/// minimality (the candidate vanishes where the reference mixture vanishes)
/// against a spanning test family.
pub fn is_medm(
    candidate: &MeasureVec,
    model: &FormModel,
    test_family: &[Function],
    tols: &Tolerances,
) -> Result<MedmReport> {
    if candidate.len() != model.atoms().len() {
        return Err(FormError::InvalidInput(format!(
            "candidate has {} weights for {} atoms",
            candidate.len(),
            model.atoms().len()
        )));
    }
    let reference = build_medm(model, test_family)?;
    let mut domination_failures = Vec::new();
    let mut minimality_failures = Vec::new();
    for atom in 0..candidate.len() {
        let cand_zero = candidate.get(atom) <= tols.tau_zero;
        let ref_zero = reference.weight(atom) <= tols.tau_zero;
        if cand_zero && !ref_zero {
            // some generator charges this atom: reference mixture is positive
            domination_failures.push(model.atoms().id(atom).to_string());
        }
        if ref_zero && !cand_zero {
            minimality_failures.push(model.atoms().id(atom).to_string());
        }
    }
    Ok(MedmReport {
        is_medm: domination_failures.is_empty() && minimality_failures.is_empty(),
        domination_failures,
        minimality_failures,
    })
}

/// Nested partitions of the atom set: each level refines the previous and the
/// last level is the singleton partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PartitionChain {
    /// Per level, the block id of every atom.
    levels: Vec<Vec<usize>>,
}

impl PartitionChain {
    pub fn new(levels: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(FormError::InvalidChain("no levels".into()));
        }
        let n = levels[0].len();
        if n == 0 {
            return Err(FormError::InvalidChain("empty atom set".into()));
        }
        for (l, blocks) in levels.iter().enumerate() {
            if blocks.len() != n {
                return Err(FormError::InvalidChain(format!(
                    "level {l} labels {} atoms, expected {n}",
                    blocks.len()
                )));
            }
        }
        // refinement: atoms sharing a block at level l+1 share one at level l
        for l in 0..levels.len() - 1 {
            let coarse = &levels[l];
            let fine = &levels[l + 1];
            let mut block_parent = std::collections::HashMap::new();
            for atom in 0..n {
                match block_parent.entry(fine[atom]) {
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(coarse[atom]);
                    }
                    std::collections::hash_map::Entry::Occupied(e) => {
                        if *e.get() != coarse[atom] {
                            return Err(FormError::InvalidChain(format!(
                                "level {} block {} straddles level {l} blocks",
                                l + 1,
                                fine[atom]
                            )));
                        }
                    }
                }
            }
        }
        // finest level must separate every atom
        let last = levels.last().unwrap();
        let distinct: std::collections::HashSet<_> = last.iter().collect();
        if distinct.len() != n {
            return Err(FormError::InvalidChain(
                "finest level is not the singleton partition".into(),
            ));
        }
        Ok(PartitionChain { levels })
    }

    /// Word-prefix chain for gasket cells: level `l` groups the `3^n` cells by
    /// the first `l` letters; level `n` is the singleton partition.
    pub fn sg_prefix_chain(cell_level: usize) -> Self {
        let n = 3usize.pow(cell_level as u32);
        let levels = (0..=cell_level)
            .map(|l| {
                let shift = 3usize.pow((cell_level - l) as u32);
                (0..n).map(|atom| atom / shift).collect()
            })
            .collect();
        PartitionChain { levels }
    }

    /// One coarse block, then singletons.
    pub fn trivial(n_atoms: usize) -> Self {
        PartitionChain {
            levels: vec![vec![0; n_atoms], (0..n_atoms).collect()],
        }
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn blocks(&self, level: usize) -> Result<&[usize]> {
        self.levels
            .get(level)
            .map(|v| v.as_slice())
            .ok_or(FormError::LevelOutOfRange {
                level,
                levels: self.levels.len(),
            })
    }

    pub fn levels(&self) -> &[Vec<usize>] {
        &self.levels
    }
}

/// Block-constant density `Z_level(x) = mu(B) / nu(B)` on the block of `x`,
/// with `0/0 := 1`. At the finest level this is the pointwise density.
pub fn partition_densities(
    mu: &[f64],
    nu: &MeasureVec,
    atoms: &AtomSpace,
    chain: &PartitionChain,
    level: usize,
    tols: &Tolerances,
) -> Result<DensityField> {
    let blocks = chain.blocks(level)?;
    if blocks.len() != mu.len() || mu.len() != nu.len() {
        return Err(FormError::InvalidInput(
            "partition chain does not match the measures".into(),
        ));
    }
    let n_blocks = blocks.iter().copied().max().map_or(0, |b| b + 1);
    let mut mu_block = vec![0.0; n_blocks];
    let mut nu_block = vec![0.0; n_blocks];
    for atom in 0..mu.len() {
        mu_block[blocks[atom]] += mu[atom];
        nu_block[blocks[atom]] += nu.get(atom);
    }
    let mut values = vec![0.0; mu.len()];
    for atom in 0..mu.len() {
        let b = blocks[atom];
        values[atom] = if nu_block[b] > tols.tau_zero {
            mu_block[b] / nu_block[b]
        } else if mu_block[b].abs() <= tols.tau_zero {
            1.0
        } else {
            return Err(FormError::DominationViolation {
                atom: atoms.id(atom).to_string(),
                mu: mu_block[b],
                nu: nu_block[b],
            });
        };
    }
    Ok(DensityField(values))
}

/// `L^1(nu)` distance between two density fields.
pub fn l1_distance(a: &DensityField, b: &DensityField, nu: &MeasureVec) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .zip(nu.weights())
        .map(|((x, y), w)| (x - y).abs() * w)
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::atoms::BackendKind;
    use crate::forms::{GraphForm, SgForm};
    use approx::assert_relative_eq;

    fn p3() -> FormModel {
        FormModel::Graph(GraphForm::path(3).unwrap())
    }

    fn indicator(n: usize, i: usize) -> Function {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Function::Graph(v)
    }

    #[test]
    fn p3_mixture_matches_hand_values() {
        let model = p3();
        let family = vec![indicator(3, 1), indicator(3, 2)];
        let nu = build_medm(&model, &family).unwrap();
        assert_eq!(nu.weights().weights(), &[0.5, 1.25, 0.75]);
        assert!(!nu.is_degenerate());
        assert_eq!(nu.mix_weights(), &[0.5, 0.25]);
    }

    #[test]
    fn constant_family_is_degenerate() {
        let model = p3();
        let nu = build_medm(&model, &[model.constant(4.0)]).unwrap();
        assert!(nu.is_degenerate());
        assert!(nu.weights().weights().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn density_divides_and_reconstructs() {
        let model = p3();
        let tols = Tolerances::default();
        let family = vec![indicator(3, 1), indicator(3, 2)];
        let nu = build_medm(&model, &family).unwrap();
        let mu = model
            .energy_measure(&Function::Graph(vec![0.0, 1.0, 3.0]))
            .unwrap();
        let d = density(mu.weights(), nu.weights(), model.atoms(), &tols).unwrap();
        assert_relative_eq!(d.get(0), 1.0 / 0.5, epsilon = 1e-15);
        assert_relative_eq!(d.get(1), 5.0 / 1.25, epsilon = 1e-15);
        assert_relative_eq!(d.get(2), 4.0 / 0.75, epsilon = 1e-14);
        // reconstruction: density * nu = mu on positive atoms
        for i in 0..3 {
            assert_relative_eq!(d.get(i) * nu.weight(i), mu.get(i), max_relative = 1e-12);
        }
    }

    #[test]
    fn zero_over_zero_is_one() {
        let space = AtomSpace::new(
            BackendKind::Graph,
            vec!["a".into(), "b".into()],
            vec![1.0, 1.0],
        )
        .unwrap();
        let tols = Tolerances::default();
        let nu = MeasureVec::new(vec![2.0, 0.0]).unwrap();
        let d = density(&[0.0, 0.0], &nu, &space, &tols).unwrap();
        assert_eq!(d.values(), &[0.0, 1.0]);
    }

    #[test]
    fn density_of_measure_against_itself_is_ones() {
        let model = p3();
        let tols = Tolerances::default();
        let nu = build_medm(&model, &model.default_family()).unwrap();
        let d = density(nu.weights().weights(), nu.weights(), model.atoms(), &tols).unwrap();
        assert!(d.values().iter().all(|&v| (v - 1.0).abs() < 1e-15));
    }

    #[test]
    fn domination_violation_is_reported_with_atom() {
        let model = p3();
        let tols = Tolerances::default();
        let nu = MeasureVec::new(vec![1.0, 0.0, 1.0]).unwrap();
        let err = density(&[0.0, 0.5, 0.0], &nu, model.atoms(), &tols).unwrap_err();
        match err {
            FormError::DominationViolation { atom, .. } => assert_eq!(atom, "v1"),
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn built_measure_passes_the_check() {
        let model = p3();
        let tols = Tolerances::default();
        let family = model.default_family();
        let nu = build_medm(&model, &family).unwrap();
        let report = is_medm(nu.weights(), &model, &family, &tols).unwrap();
        assert!(report.is_medm);
    }

    #[test]
    fn extra_mass_on_decoupled_atom_fails_minimality() {
        // v2 is decoupled, so no energy measure charges it
        let space = AtomSpace::new(
            BackendKind::Graph,
            vec!["v0".into(), "v1".into(), "v2".into()],
            vec![1.0, 1.0, 1.0],
        )
        .unwrap();
        let graph = GraphForm::new_allow_isolated(space, &[(0, 1, 1.0)]).unwrap();
        let model = FormModel::Graph(graph);
        let tols = Tolerances::default();
        let family = model.default_family();
        let nu = build_medm(&model, &family).unwrap();
        assert_eq!(nu.weight(2), 0.0);
        let mut candidate = nu.weights().weights().to_vec();
        candidate[2] += 1.0;
        let report =
            is_medm(&MeasureVec::new(candidate).unwrap(), &model, &family, &tols).unwrap();
        assert!(!report.is_medm);
        assert_eq!(report.minimality_failures, vec!["v2".to_string()]);
    }

    #[test]
    fn zeroed_half_fails_domination() {
        let model = p3();
        let tols = Tolerances::default();
        let family = model.default_family();
        let nu = build_medm(&model, &family).unwrap();
        let mut candidate = nu.weights().weights().to_vec();
        candidate[0] = 0.0;
        let report =
            is_medm(&MeasureVec::new(candidate).unwrap(), &model, &family, &tols).unwrap();
        assert!(!report.is_medm);
        assert_eq!(report.domination_failures, vec!["v0".to_string()]);
    }

    #[test]
    fn chain_validation_rejects_non_nested() {
        // level 1 block 0 straddles level 0 blocks 0 and 1
        assert!(PartitionChain::new(vec![vec![0, 1], vec![0, 0]]).is_err());
        // finest not singletons
        assert!(PartitionChain::new(vec![vec![0, 0]]).is_err());
        assert!(PartitionChain::new(vec![vec![0, 0], vec![0, 1]]).is_ok());
    }

    #[test]
    fn sg_prefix_chain_blocks_by_parent_cell() {
        let chain = PartitionChain::sg_prefix_chain(2);
        assert_eq!(chain.num_levels(), 3);
        assert_eq!(chain.blocks(1).unwrap()[0..4], [0, 0, 0, 1]);
        let model = FormModel::Sg(SgForm::new(2).unwrap());
        assert_eq!(chain.blocks(2).unwrap().len(), model.atoms().len());
    }

    #[test]
    fn coarsened_density_is_ratio_of_block_sums() {
        let form = SgForm::new(2).unwrap();
        let model = FormModel::Sg(form);
        let tols = Tolerances::default();
        let (h1, h2) = SgForm::orthonormal_harmonic_pair();
        let family = vec![Function::Sg(h1.clone()), Function::Sg(h2)];
        let nu = build_medm(&model, &family).unwrap();
        let mu = model.energy_measure(&Function::Sg(h1)).unwrap();
        let chain = PartitionChain::sg_prefix_chain(2);
        let coarse =
            partition_densities(mu.weights(), nu.weights(), model.atoms(), &chain, 1, &tols)
                .unwrap();
        // block value = sum of children mu / sum of children nu
        for block in 0..3 {
            let mu_sum: f64 = (0..3).map(|i| mu.get(block * 3 + i)).sum();
            let nu_sum: f64 = (0..3).map(|i| nu.weight(block * 3 + i)).sum();
            for i in 0..3 {
                assert_relative_eq!(
                    coarse.get(block * 3 + i),
                    mu_sum / nu_sum,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn finest_level_matches_pointwise_density() {
        let model = FormModel::Sg(SgForm::new(3).unwrap());
        let tols = Tolerances::default();
        let (h1, h2) = SgForm::orthonormal_harmonic_pair();
        let family = vec![Function::Sg(h1.clone()), Function::Sg(h2)];
        let nu = build_medm(&model, &family).unwrap();
        let mu = model.energy_measure(&Function::Sg(h1)).unwrap();
        let chain = PartitionChain::sg_prefix_chain(3);
        let finest =
            partition_densities(mu.weights(), nu.weights(), model.atoms(), &chain, 3, &tols)
                .unwrap();
        let pointwise = density(mu.weights(), nu.weights(), model.atoms(), &tols).unwrap();
        assert_eq!(finest, pointwise);
    }

    #[test]
    fn tower_property_block_masses() {
        let model = FormModel::Sg(SgForm::new(3).unwrap());
        let tols = Tolerances::default();
        let (h1, h2) = SgForm::orthonormal_harmonic_pair();
        let family = vec![Function::Sg(h1.clone()), Function::Sg(h2.clone())];
        let nu = build_medm(&model, &family).unwrap();
        let mu = model
            .mutual_energy_measure(&Function::Sg(h1), &Function::Sg(h2))
            .unwrap();
        let chain = PartitionChain::sg_prefix_chain(3);
        let finest = density(mu.weights(), nu.weights(), model.atoms(), &tols).unwrap();
        for level in 0..3 {
            let coarse = partition_densities(
                mu.weights(),
                nu.weights(),
                model.atoms(),
                &chain,
                level,
                &tols,
            )
            .unwrap();
            let blocks = chain.blocks(level).unwrap();
            let n_blocks = blocks.iter().max().unwrap() + 1;
            for b in 0..n_blocks {
                let lhs: f64 = (0..mu.len())
                    .filter(|&i| blocks[i] == b)
                    .map(|i| finest.get(i) * nu.weight(i))
                    .sum();
                let rhs: f64 = (0..mu.len())
                    .filter(|&i| blocks[i] == b)
                    .map(|i| coarse.get(i) * nu.weight(i))
                    .sum();
                assert_relative_eq!(lhs, rhs, epsilon = 1e-12, max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn mutual_absolute_continuity_of_two_mixtures() {
        let model = p3();
        let tols = Tolerances::default();
        let fam1 = model.default_family();
        let fam2: Vec<Function> = fam1.iter().rev().cloned().collect();
        let nu1 = build_medm(&model, &fam1).unwrap();
        let nu2 = build_medm(&model, &fam2).unwrap();
        for atom in 0..3 {
            let z1 = nu1.weight(atom) <= tols.tau_zero;
            let z2 = nu2.weight(atom) <= tols.tau_zero;
            assert_eq!(z1, z2);
        }
    }
}
