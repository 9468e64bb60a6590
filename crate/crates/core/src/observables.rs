//! Observables over states and traces: regional magnetizations,
//! bipartite entanglement entropy, reference entropies, and the
//! subharmonic diagnostic.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::evolution::{all_local_magnetizations, StateVector};
use crate::network::{Region, RegionPartition};

#[derive(Debug, Error, PartialEq)]
pub enum ObservablesError {
    #[error("partition covers {got} sites, state has {expected}")]
    SizeMismatch { got: usize, expected: usize },
    #[error("partition is degenerate; both regions must be non-empty")]
    DegeneratePartition,
    #[error("subharmonic window must be non-empty and within the series (window {window}, series {len})")]
    BadWindow { window: usize, len: usize },
    #[error("reference entropies need at least 2 sites, got {0}")]
    TooFewSites(usize),
    #[error("reduced density matrix violates {what}: deviation {dev:e}")]
    InvalidDensityMatrix { what: &'static str, dev: f64 },
}

/// Regional magnetizations in the 2/N normalization used for equal
/// halves, plus the per-region means for unequal partitions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionalMagnetization {
    /// (2/N) sum of sigma^z over region A.
    pub m_a: f64,
    /// (2/N) sum of sigma^z over region B.
    pub m_b: f64,
    /// Plain mean over region A sites.
    pub mean_a: f64,
    /// Plain mean over region B sites.
    pub mean_b: f64,
}

/// Regional sums of local magnetization. The `m_*` fields carry the
/// 2/N normalization; for unequal regions the per-region means are the
/// meaningful variant and are reported alongside.
pub fn regional_magnetization(
    state: &StateVector,
    partition: &RegionPartition,
) -> Result<RegionalMagnetization, ObservablesError> {
    let n = state.n_sites();
    if partition.n_sites() != n {
        return Err(ObservablesError::SizeMismatch { got: partition.n_sites(), expected: n });
    }
    let local = all_local_magnetizations(state);
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    for (l, &m) in local.iter().enumerate() {
        match partition.region(l) {
            Region::A => sum_a += m,
            Region::B => sum_b += m,
        }
    }
    let n_a = partition.len(Region::A);
    let n_b = partition.len(Region::B);
    Ok(RegionalMagnetization {
        m_a: 2.0 / n as f64 * sum_a,
        m_b: 2.0 / n as f64 * sum_b,
        mean_a: if n_a > 0 { sum_a / n_a as f64 } else { 0.0 },
        mean_b: if n_b > 0 { sum_b / n_b as f64 } else { 0.0 },
    })
}

/// Reduced density matrix of one region, Hermitian with unit trace.
#[derive(Debug, Clone)]
pub struct ReducedDensityMatrix {
    n_kept: usize,
    mat: DMatrix<Complex64>,
}

impl ReducedDensityMatrix {
    pub fn n_kept_sites(&self) -> usize {
        self.n_kept
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Real eigenvalues in ascending order, checked against the density
    /// matrix range [-1e-10, 1 + 1e-10].
    pub fn eigenvalues(&self) -> Result<Vec<f64>, ObservablesError> {
        let eig = self.mat.clone().symmetric_eigen();
        let mut vals: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if vals.first().is_some_and(|&v| v < -1e-10) || vals.last().is_some_and(|&v| v > 1.0 + 1e-10)
        {
            return Err(ObservablesError::InvalidDensityMatrix {
                what: "eigenvalue range",
                dev: vals[0].min(1.0 - vals[vals.len() - 1]).abs(),
            });
        }
        Ok(vals)
    }
}

/// Scatter the low bits of `compact` into the positions listed in
/// `sites`.
fn scatter_bits(compact: usize, sites: &[usize]) -> usize {
    let mut out = 0usize;
    for (k, &site) in sites.iter().enumerate() {
        if compact & (1 << k) != 0 {
            out |= 1 << site;
        }
    }
    out
}

/// Partial trace over the complement of `keep`, by index grouping over
/// the kept-region bit masks.
pub fn reduced_density_matrix(
    state: &StateVector,
    partition: &RegionPartition,
    keep: Region,
) -> Result<ReducedDensityMatrix, ObservablesError> {
    let n = state.n_sites();
    if partition.n_sites() != n {
        return Err(ObservablesError::SizeMismatch { got: partition.n_sites(), expected: n });
    }
    if partition.is_degenerate() {
        return Err(ObservablesError::DegeneratePartition);
    }
    let kept_sites = partition.sites(keep);
    let traced_sites = partition.sites(match keep {
        Region::A => Region::B,
        Region::B => Region::A,
    });
    let kd = 1usize << kept_sites.len();
    let td = 1usize << traced_sites.len();
    let kept_idx: Vec<usize> = (0..kd).map(|i| scatter_bits(i, &kept_sites)).collect();
    let traced_idx: Vec<usize> = (0..td).map(|a| scatter_bits(a, &traced_sites)).collect();

    let amps = state.amplitudes();
    let mut mat = DMatrix::from_element(kd, kd, Complex64::new(0.0, 0.0));
    for i in 0..kd {
        for j in 0..=i {
            let mut acc = Complex64::new(0.0, 0.0);
            for &t in &traced_idx {
                acc += amps[t | kept_idx[i]] * amps[t | kept_idx[j]].conj();
            }
            mat[(i, j)] = acc;
            if i != j {
                mat[(j, i)] = acc.conj();
            }
        }
    }

    let herm_dev = (0..kd)
        .flat_map(|i| (0..kd).map(move |j| (i, j)))
        .map(|(i, j)| (mat[(i, j)] - mat[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    if herm_dev > 1e-12 {
        return Err(ObservablesError::InvalidDensityMatrix { what: "hermiticity", dev: herm_dev });
    }
    let trace: Complex64 = (0..kd).map(|i| mat[(i, i)]).sum();
    let trace_dev = (trace - Complex64::new(1.0, 0.0)).norm();
    if trace_dev > 1e-10 {
        return Err(ObservablesError::InvalidDensityMatrix { what: "unit trace", dev: trace_dev });
    }
    Ok(ReducedDensityMatrix { n_kept: kept_sites.len(), mat })
}

/// Von Neumann entropy of one region in natural-log units.
/// Eigenvalues below 1e-14 are skipped before the lambda ln lambda sum.
pub fn entropy_of_region(
    state: &StateVector,
    partition: &RegionPartition,
    region: Region,
) -> Result<f64, ObservablesError> {
    let rho = reduced_density_matrix(state, partition, region)?;
    let mut s = 0.0;
    for lam in rho.eigenvalues()? {
        if lam > 1e-14 {
            s -= lam * lam.ln();
        }
    }
    Ok(s)
}

/// Entanglement entropy S_B between the regions of a pure state.
pub fn entanglement_entropy(
    state: &StateVector,
    partition: &RegionPartition,
) -> Result<f64, ObservablesError> {
    entropy_of_region(state, partition, Region::B)
}

/// Reference entropy values: the thermal prediction (N ln2 - 1)/2 and
/// the localized-phase value ln 2.
pub fn reference_entropies(n_sites: usize) -> Result<(f64, f64), ObservablesError> {
    if n_sites < 2 {
        return Err(ObservablesError::TooFewSites(n_sites));
    }
    let ln2 = std::f64::consts::LN_2;
    Ok(((n_sites as f64 * ln2 - 1.0) / 2.0, ln2))
}

/// Period-doubling diagnostic over the first `window` entries of a
/// stride-1 stroboscopic series: |sum of (-1)^n x_n| / window. Equals 1
/// for perfect alternation and ~0 for a constant series over an even
/// window.
pub fn subharmonic_weight(series: &[f64], window: usize) -> Result<f64, ObservablesError> {
    if window == 0 || window > series.len() {
        return Err(ObservablesError::BadWindow { window, len: series.len() });
    }
    let sum: f64 = series[..window]
        .iter()
        .enumerate()
        .map(|(n, &x)| if n % 2 == 0 { x } else { -x })
        .sum();
    Ok(sum.abs() / window as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{prepare_polarized, prepare_tilted};
    use crate::network::{half_partition, SplitMix64};
    use proptest::prelude::*;
    use std::f64::consts::{LN_2, PI};

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = SplitMix64::new(seed);
        let dim = 1usize << n;
        let mut amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(2.0 * rng.next_f64() - 1.0, 2.0 * rng.next_f64() - 1.0))
            .collect();
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        for a in &mut amps {
            *a /= norm;
        }
        StateVector::new(n, amps).unwrap()
    }

    fn two_term_state(n: usize, s0: usize, s1: usize) -> StateVector {
        let dim = 1usize << n;
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        let x = std::f64::consts::FRAC_1_SQRT_2;
        amps[s0] = Complex64::new(x, 0.0);
        amps[s1] = Complex64::new(x, 0.0);
        StateVector::new(n, amps).unwrap()
    }

    #[test]
    fn polarized_regional_magnetization_is_one() {
        let s = prepare_polarized(8).unwrap();
        let p = half_partition(8).unwrap();
        let r = regional_magnetization(&s, &p).unwrap();
        assert!((r.m_a - 1.0).abs() < 1e-15);
        assert!((r.m_b - 1.0).abs() < 1e-15);
        assert_eq!(r.m_a, r.mean_a);
    }

    #[test]
    fn flipped_a_region() {
        // basis state with A bits (0..3) zero and B bits (4..7) one
        let s = StateVector::basis_state(8, 0b1111_0000).unwrap();
        let p = half_partition(8).unwrap();
        let r = regional_magnetization(&s, &p).unwrap();
        assert!((r.m_a + 1.0).abs() < 1e-15);
        assert!((r.m_b - 1.0).abs() < 1e-15);
    }

    #[test]
    fn tilted_regional_magnetization() {
        let s = prepare_tilted(8, 0.2 * PI).unwrap();
        let p = half_partition(8).unwrap();
        let r = regional_magnetization(&s, &p).unwrap();
        let c = (0.2 * PI).cos();
        assert!((r.m_a - c).abs() < 1e-12);
        assert!((r.m_b - c).abs() < 1e-12);
    }

    #[test]
    fn product_state_density_matrix_is_rank_one() {
        let s = prepare_tilted(4, 0.3).unwrap();
        let p = half_partition(4).unwrap();
        let rho = reduced_density_matrix(&s, &p, Region::B).unwrap();
        let vals = rho.eigenvalues().unwrap();
        assert!((vals.last().unwrap() - 1.0).abs() < 1e-12);
        for &v in &vals[..vals.len() - 1] {
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn bell_pair_is_maximally_mixed() {
        let s = two_term_state(2, 0b00, 0b11);
        let p = half_partition(2).unwrap();
        let rho = reduced_density_matrix(&s, &p, Region::B).unwrap();
        assert_eq!(rho.dim(), 2);
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 0.5 } else { 0.0 };
                assert!((rho.matrix()[(i, j)] - Complex64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn schmidt_spectra_agree_across_the_cut() {
        let s = random_state(4, 99);
        let p = half_partition(4).unwrap();
        let va = reduced_density_matrix(&s, &p, Region::A).unwrap().eigenvalues().unwrap();
        let vb = reduced_density_matrix(&s, &p, Region::B).unwrap().eigenvalues().unwrap();
        for (a, b) in va.iter().zip(&vb) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_entropy_is_zero() {
        let s = prepare_tilted(6, 0.4).unwrap();
        let p = half_partition(6).unwrap();
        assert!(entanglement_entropy(&s, &p).unwrap() < 1e-12);
    }

    #[test]
    fn bell_pair_entropy_is_ln2() {
        let s = two_term_state(2, 0b00, 0b11);
        let p = half_partition(2).unwrap();
        assert!((entanglement_entropy(&s, &p).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn ghz_half_cut_entropy_is_ln2() {
        let s = two_term_state(4, 0b0000, 0b1111);
        let p = half_partition(4).unwrap();
        let rho = reduced_density_matrix(&s, &p, Region::B).unwrap();
        let vals = rho.eigenvalues().unwrap();
        // two-term Schmidt spectrum (1/2, 1/2)
        let nonzero: Vec<f64> = vals.into_iter().filter(|v| *v > 1e-12).collect();
        assert_eq!(nonzero.len(), 2);
        assert!((nonzero[0] - 0.5).abs() < 1e-12);
        assert!((nonzero[1] - 0.5).abs() < 1e-12);
        assert!((entanglement_entropy(&s, &p).unwrap() - LN_2).abs() < 1e-12);
    }

    #[test]
    fn degenerate_partition_rejected() {
        let s = prepare_polarized(3).unwrap();
        let p = crate::network::RegionPartition::new_degenerate(vec![Region::A; 3]).unwrap();
        assert_eq!(
            reduced_density_matrix(&s, &p, Region::A).unwrap_err(),
            ObservablesError::DegeneratePartition
        );
    }

    #[test]
    fn reference_entropy_values() {
        let (thermal, mbl) = reference_entropies(8).unwrap();
        assert!((thermal - 2.272_588_722_239_781).abs() < 1e-15);
        assert!((thermal - 2.3).abs() < 0.05);
        assert!((mbl - LN_2).abs() == 0.0);
        let (t2, _) = reference_entropies(2).unwrap();
        assert!((t2 - 0.1931471805599453).abs() < 1e-15);
        assert!(reference_entropies(1).is_err());
    }

    #[test]
    fn subharmonic_weight_values() {
        let alternating: Vec<f64> = (0..10).map(|n| if n % 2 == 0 { 1.0 } else { -1.0 }).collect();
        assert!((subharmonic_weight(&alternating, 10).unwrap() - 1.0).abs() < 1e-15);
        let constant = vec![1.0; 10];
        assert!(subharmonic_weight(&constant, 10).unwrap().abs() < 1e-15);
        assert!(subharmonic_weight(&constant, 0).is_err());
        assert!(subharmonic_weight(&constant, 11).is_err());
    }

    proptest! {
        #[test]
        fn entropy_symmetric_and_bounded(seed in any::<u64>(), n in 2usize..7) {
            let n = if n % 2 == 0 { n } else { n + 1 };
            let s = random_state(n, seed);
            let p = half_partition(n).unwrap();
            let sa = entropy_of_region(&s, &p, Region::A).unwrap();
            let sb = entropy_of_region(&s, &p, Region::B).unwrap();
            prop_assert!((sa - sb).abs() < 1e-10);
            let bound = (n / 2) as f64 * LN_2;
            prop_assert!(sb >= 0.0 && sb <= bound + 1e-9);
        }

        #[test]
        fn regional_sums_are_consistent(seed in any::<u64>()) {
            let s = random_state(6, seed);
            let p = half_partition(6).unwrap();
            let r = regional_magnetization(&s, &p).unwrap();
            let total: f64 = all_local_magnetizations(&s).iter().sum();
            prop_assert!((r.m_a + r.m_b - 2.0 / 6.0 * total).abs() < 1e-12);
        }
    }
}
