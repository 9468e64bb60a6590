//! Dense-matrix construction of the effective Hamiltonians and Floquet
//! operators, used as correctness oracles for the fast kernels and to
//! quantify the high-frequency approximation.
//!
//! The two-period effective Hamiltonian implemented here is the full
//! form with operator-valued rotation angles
//! theta_l = 2 W_l T2 + 2 T2 sum_{m in B} J_lm sigma^z_m for l in A,
//! valid for eps_B = 1:
//!
//! H_eff = (T2/T) sum_{l<m in A} J sz sz
//!       - (pi eps_A T2 / 2T) sum_{l != m in A} J sz_l sy_m
//!       - (pi eps_A / 4T) sum_{l in A} [(cos theta_l + 1) sx_l + sin theta_l sy_l]
//!       + (T2/T) sum_{l<m in B} J sz sz + (T2/T) sum_{l in B} W_l sz_l
//!
//! At eps_A = 0 it reduces to the decoupled Hamiltonian and the squared
//! Floquet operator equals exp(-2i T H_dec) exactly, up to a global
//! phase.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::evolution::{
    evolve_record, DriveProtocol, EvolutionError, ObservableSet, StateVector,
};
use crate::network::{
    derive_seed, sample_disorder, BoundsMode, DisorderField, Region, RegionPartition, SpinNetwork,
};

#[derive(Debug, Error, PartialEq)]
pub enum EffectiveError {
    #[error("dense path limited to {max} sites, got {got} (raise the guard to override)")]
    DenseGuard { got: usize, max: usize },
    #[error("this builder assumes eps_B = 1, got {0}")]
    EpsBNotOne(f64),
    #[error("matrix is not Hermitian: max deviation {0:e}")]
    NotHermitian(f64),
    #[error("matrix dimensions differ: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("dimension {got} does not match {expected} sites")]
    BadDimension { got: usize, expected: usize },
    #[error("network has no nonzero coupling; the coupling ratio is undefined")]
    ZeroCoupling,
    #[error("evolution failed: {0}")]
    Evolution(#[from] EvolutionError),
}

/// Size guard for dense 2^N x 2^N paths.
#[derive(Debug, Clone, Copy)]
pub struct DenseOptions {
    pub max_sites: usize,
}

impl Default for DenseOptions {
    fn default() -> Self {
        Self { max_sites: 12 }
    }
}

fn cplx(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn z_of(s: usize, site: usize) -> f64 {
    if s & (1 << site) != 0 {
        1.0
    } else {
        -1.0
    }
}

/// Explicit Hermitian matrix in inverse-time units over the 2^N basis.
#[derive(Debug, Clone)]
pub struct DenseHermitian {
    n_sites: usize,
    mat: DMatrix<Complex64>,
}

impl DenseHermitian {
    /// Wrap a matrix, validating Hermiticity to 1e-12 in max-norm.
    pub fn new(n_sites: usize, mat: DMatrix<Complex64>) -> Result<Self, EffectiveError> {
        let dim = 1usize << n_sites;
        if mat.nrows() != dim || mat.ncols() != dim {
            return Err(EffectiveError::BadDimension { got: mat.nrows(), expected: n_sites });
        }
        let dev = hermiticity_deviation(&mat);
        if dev > 1e-12 {
            return Err(EffectiveError::NotHermitian(dev));
        }
        Ok(Self { n_sites, mat })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.mat
    }

    /// Eigendecomposition, reusable across propagation times.
    pub fn eigen(&self) -> HermitianEigen {
        let eig = self.mat.clone().symmetric_eigen();
        HermitianEigen { values: eig.eigenvalues.iter().cloned().collect(), vectors: eig.eigenvectors }
    }
}

/// Cached eigendecomposition of a Hermitian matrix.
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: DMatrix<Complex64>,
}

impl HermitianEigen {
    /// Unitary propagator exp(-i H t) = Q exp(-i Lambda t) Q^dagger.
    pub fn propagator(&self, t: f64) -> DMatrix<Complex64> {
        let dim = self.values.len();
        let phases = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            dim,
            self.values.iter().map(|&lam| Complex64::from_polar(1.0, -lam * t)),
        ));
        &self.vectors * phases * self.vectors.adjoint()
    }
}

pub fn hermiticity_deviation(mat: &DMatrix<Complex64>) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..mat.nrows() {
        for j in 0..=i {
            dev = dev.max((mat[(i, j)] - mat[(j, i)].conj()).norm());
        }
    }
    dev
}

/// Largest deviation of U from unitarity, max|U^dagger U - I|.
pub fn unitarity_deviation(u: &DMatrix<Complex64>) -> f64 {
    let g = u.adjoint() * u;
    let mut dev: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let expected = if i == j { cplx(1.0) } else { cplx(0.0) };
            dev = dev.max((g[(i, j)] - expected).norm());
        }
    }
    dev
}

// Dense Pauli embeddings, kept separate from the bitmask kernels so the
// two routes stay independent.

pub fn sigma_x_dense(n_sites: usize, site: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n_sites;
    let bit = 1usize << site;
    let mut m = DMatrix::from_element(dim, dim, cplx(0.0));
    for s in 0..dim {
        m[(s ^ bit, s)] = cplx(1.0);
    }
    m
}

pub fn sigma_y_dense(n_sites: usize, site: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n_sites;
    let bit = 1usize << site;
    let mut m = DMatrix::from_element(dim, dim, cplx(0.0));
    for s in 0..dim {
        // Y|0> = i|1>, Y|1> = -i|0>
        m[(s ^ bit, s)] = Complex64::new(0.0, -z_of(s, site));
    }
    m
}

pub fn sigma_z_dense(n_sites: usize, site: usize) -> DMatrix<Complex64> {
    let dim = 1usize << n_sites;
    let mut m = DMatrix::from_element(dim, dim, cplx(0.0));
    for s in 0..dim {
        m[(s, s)] = cplx(z_of(s, site));
    }
    m
}

/// Dense pulse Hamiltonian H1 = g sum_l (1 - eps_region(l)) sigma^x_l.
pub fn build_h1_dense(
    protocol: &DriveProtocol,
    partition: &RegionPartition,
) -> Result<DenseHermitian, EffectiveError> {
    let n = partition.n_sites();
    let dim = 1usize << n;
    let bit_of = |l: usize| 1usize << l;
    let mut mat = DMatrix::from_element(dim, dim, cplx(0.0));
    for l in 0..n {
        let coeff = protocol.g() * (1.0 - protocol.eps(partition.region(l)));
        for s in 0..dim {
            mat[(s ^ bit_of(l), s)] += cplx(coeff);
        }
    }
    DenseHermitian::new(n, mat)
}

/// Dense Ising-plus-field Hamiltonian H2, diagonal in the z basis.
pub fn build_h2_dense(
    network: &SpinNetwork,
    disorder: &DisorderField,
) -> Result<DenseHermitian, EffectiveError> {
    let n = network.n_sites();
    let dim = 1usize << n;
    let mut mat = DMatrix::from_element(dim, dim, cplx(0.0));
    for s in 0..dim {
        mat[(s, s)] = cplx(crate::evolution::diagonal_energy(network, disorder, s));
    }
    DenseHermitian::new(n, mat)
}

/// Dense single-period Floquet operator exp(-i H2 T2) exp(-i H1 T1),
/// assembled from the dense Hamiltonians through eigendecomposition.
pub fn build_floquet_matrix(
    network: &SpinNetwork,
    disorder: &DisorderField,
    protocol: &DriveProtocol,
    partition: &RegionPartition,
    opts: &DenseOptions,
) -> Result<DMatrix<Complex64>, EffectiveError> {
    let n = network.n_sites();
    if n > opts.max_sites {
        return Err(EffectiveError::DenseGuard { got: n, max: opts.max_sites });
    }
    let h1 = build_h1_dense(protocol, partition)?;
    let h2 = build_h2_dense(network, disorder)?;
    let u1 = h1.eigen().propagator(protocol.t1());
    let u2 = h2.eigen().propagator(protocol.t2());
    Ok(u2 * u1)
}

/// Index convention for the sigma^z sigma^y cross term of the full
/// effective Hamiltonian.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZySumConvention {
    /// Sum over ordered pairs l != m, both orientations of every edge.
    #[default]
    OrderedPairs,
    /// Each unordered pair counted once, l < m.
    UnorderedOnce,
}

/// B-region Hamiltonian (T2/T)(sum_{l<m in B} J sz sz + sum_{l in B} W sz),
/// the conserved block of the effective Hamiltonian at eps_B = 1.
pub fn build_h_region_b(
    network: &SpinNetwork,
    disorder: &DisorderField,
    partition: &RegionPartition,
    protocol: &DriveProtocol,
) -> Result<DenseHermitian, EffectiveError> {
    let n = network.n_sites();
    let dim = 1usize << n;
    let w = protocol.t2() / protocol.period();
    let mut mat = DMatrix::from_element(dim, dim, cplx(0.0));
    for s in 0..dim {
        let mut e = 0.0;
        for edge in network.edges() {
            if partition.region(edge.l) == Region::B && partition.region(edge.m) == Region::B {
                e += edge.coupling * z_of(s, edge.l) * z_of(s, edge.m);
            }
        }
        for l in partition.sites(Region::B) {
            e += disorder.value(l) * z_of(s, l);
        }
        mat[(s, s)] = cplx(w * e);
    }
    DenseHermitian::new(n, mat)
}

/// Exact two-period effective Hamiltonian at eps_A = 0: intra-region
/// Ising terms plus the B fields, no cross terms and no A fields.
pub fn build_h_eff_decoupled(
    network: &SpinNetwork,
    disorder: &DisorderField,
    partition: &RegionPartition,
    protocol: &DriveProtocol,
) -> Result<DenseHermitian, EffectiveError> {
    let n = network.n_sites();
    let dim = 1usize << n;
    let w = protocol.t2() / protocol.period();
    let mut mat = DMatrix::from_element(dim, dim, cplx(0.0));
    for s in 0..dim {
        let mut e = 0.0;
        for edge in network.edges() {
            if partition.region(edge.l) == partition.region(edge.m) {
                e += edge.coupling * z_of(s, edge.l) * z_of(s, edge.m);
            }
        }
        for l in partition.sites(Region::B) {
            e += disorder.value(l) * z_of(s, l);
        }
        mat[(s, s)] = cplx(w * e);
    }
    DenseHermitian::new(n, mat)
}

/// Full two-period effective Hamiltonian for eps_B = 1, including the
/// operator-valued rotation angles of the region coupling.
pub fn build_h_eff_full(
    network: &SpinNetwork,
    disorder: &DisorderField,
    protocol: &DriveProtocol,
    partition: &RegionPartition,
) -> Result<DenseHermitian, EffectiveError> {
    build_h_eff_full_variant(network, disorder, protocol, partition, ZySumConvention::default())
}

pub fn build_h_eff_full_variant(
    network: &SpinNetwork,
    disorder: &DisorderField,
    protocol: &DriveProtocol,
    partition: &RegionPartition,
    zy: ZySumConvention,
) -> Result<DenseHermitian, EffectiveError> {
    if (protocol.eps_b() - 1.0).abs() > 1e-12 {
        return Err(EffectiveError::EpsBNotOne(protocol.eps_b()));
    }
    let n = network.n_sites();
    let dim = 1usize << n;
    let t2 = protocol.t2();
    let t = protocol.period();
    let eps_a = protocol.eps_a();
    let ising_w = t2 / t;
    let zy_w = -std::f64::consts::PI * eps_a * t2 / (2.0 * t);
    let xy_w = -std::f64::consts::PI * eps_a / (4.0 * t);

    let mut mat = DMatrix::from_element(dim, dim, cplx(0.0));

    // Diagonal: intra-region Ising plus B fields.
    for s in 0..dim {
        let mut e = 0.0;
        for edge in network.edges() {
            if partition.region(edge.l) == partition.region(edge.m) {
                e += edge.coupling * z_of(s, edge.l) * z_of(s, edge.m);
            }
        }
        for l in partition.sites(Region::B) {
            e += disorder.value(l) * z_of(s, l);
        }
        mat[(s, s)] += cplx(ising_w * e);
    }

    // sigma^z_l sigma^y_m over A pairs.
    let mut add_zy = |zl: usize, ym: usize, c: f64| {
        let bit = 1usize << ym;
        for s in 0..dim {
            mat[(s ^ bit, s)] += Complex64::new(0.0, -c * z_of(s, zl) * z_of(s, ym));
        }
    };
    for edge in network.edges() {
        if partition.region(edge.l) == Region::A && partition.region(edge.m) == Region::A {
            let c = zy_w * edge.coupling;
            match zy {
                ZySumConvention::OrderedPairs => {
                    add_zy(edge.l, edge.m, c);
                    add_zy(edge.m, edge.l, c);
                }
                ZySumConvention::UnorderedOnce => add_zy(edge.l, edge.m, c),
            }
        }
    }

    // Region coupling: (cos theta_l + 1) sigma^x_l + sin theta_l sigma^y_l,
    // with theta_l diagonal in the computational basis.
    for l in partition.sites(Region::A) {
        let b_edges: Vec<(usize, f64)> = network
            .edges()
            .iter()
            .filter_map(|e| {
                if e.l == l && partition.region(e.m) == Region::B {
                    Some((e.m, e.coupling))
                } else if e.m == l && partition.region(e.l) == Region::B {
                    Some((e.l, e.coupling))
                } else {
                    None
                }
            })
            .collect();
        let w_l = disorder.value(l);
        let theta = |s: usize| -> f64 {
            2.0 * w_l * t2
                + 2.0 * t2 * b_edges.iter().map(|&(m, j)| j * z_of(s, m)).sum::<f64>()
        };
        let bit = 1usize << l;
        for s in 0..dim {
            let th = theta(s);
            mat[(s ^ bit, s)] += cplx(xy_w * (th.cos() + 1.0));
            mat[(s ^ bit, s)] += Complex64::new(0.0, -xy_w * th.sin() * z_of(s, l));
        }
    }

    DenseHermitian::new(n, mat)
}

/// Soft validity bound for the small-error effective Hamiltonian.
pub const SMALL_ERROR_GUARD: f64 = 0.2;

/// Two-period effective Hamiltonian for small errors in both regions:
/// full-network Ising term plus per-region transverse terms weighted by
/// (1 + cos 2 W_l T2) and sin 2 W_l T2. The longitudinal fields average
/// out over two periods and carry no term of their own.
pub fn build_h_eff_small_errors(
    network: &SpinNetwork,
    disorder: &DisorderField,
    protocol: &DriveProtocol,
    partition: &RegionPartition,
) -> Result<DenseHermitian, EffectiveError> {
    let n = network.n_sites();
    let dim = 1usize << n;
    let t2 = protocol.t2();
    let t = protocol.period();
    let ising_w = t2 / t;

    let mut mat = DMatrix::from_element(dim, dim, cplx(0.0));
    for s in 0..dim {
        let mut e = 0.0;
        for edge in network.edges() {
            e += edge.coupling * z_of(s, edge.l) * z_of(s, edge.m);
        }
        mat[(s, s)] += cplx(ising_w * e);
    }
    for l in 0..n {
        let eps = protocol.eps(partition.region(l));
        let w = -std::f64::consts::PI * eps / (4.0 * t);
        let angle = 2.0 * disorder.value(l) * t2;
        let x_c = w * (1.0 + angle.cos());
        let y_c = w * angle.sin();
        let bit = 1usize << l;
        for s in 0..dim {
            mat[(s ^ bit, s)] += cplx(x_c);
            mat[(s ^ bit, s)] += Complex64::new(0.0, -y_c * z_of(s, l));
        }
    }
    DenseHermitian::new(n, mat)
}

/// Propagate a state by exp(-i H t) through the eigendecomposition of H.
pub fn evolve_dense(
    h: &DenseHermitian,
    state: &StateVector,
    t: f64,
) -> Result<StateVector, EffectiveError> {
    if h.dim() != state.dim() {
        return Err(EffectiveError::DimensionMismatch(h.dim(), state.dim()));
    }
    let eig = h.eigen();
    let psi = nalgebra::DVector::from_column_slice(state.amplitudes());
    let coeffs = eig.vectors.adjoint() * psi;
    let rotated = nalgebra::DVector::from_iterator(
        h.dim(),
        coeffs
            .iter()
            .zip(&eig.values)
            .map(|(c, &lam)| c * Complex64::from_polar(1.0, -lam * t)),
    );
    let out = &eig.vectors * rotated;
    let norm = out.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    if !norm.is_finite() || (norm - 1.0).abs() > 1e-11 {
        return Err(EffectiveError::Evolution(EvolutionError::NormDrift {
            period: 0,
            norm: norm * norm,
        }));
    }
    let amps: Vec<Complex64> = out.iter().map(|a| a / norm).collect();
    Ok(StateVector::new(state.n_sites(), amps).expect("normalized amplitudes"))
}

/// Spectral norm (largest singular value) via the Hermitian
/// eigendecomposition of M^dagger M.
pub fn spectral_norm(mat: &DMatrix<Complex64>) -> f64 {
    if mat.nrows() == 0 {
        return 0.0;
    }
    let gram = mat.adjoint() * mat;
    let eig = gram.symmetric_eigen();
    eig.eigenvalues.iter().cloned().fold(0.0, f64::max).max(0.0).sqrt()
}

/// Spectral norm of the commutator XY - YX.
pub fn commutator_norm(
    x: &DMatrix<Complex64>,
    y: &DMatrix<Complex64>,
) -> Result<f64, EffectiveError> {
    if x.nrows() != y.nrows() || x.ncols() != y.ncols() {
        return Err(EffectiveError::DimensionMismatch(x.nrows(), y.nrows()));
    }
    Ok(spectral_norm(&(x * y - y * x)))
}

/// Phase-aligned spectral distance min over phi of ||U - e^{i phi} V||.
///
/// The trace-aligned phase phi = arg tr(V^dagger U) is taken as a
/// candidate and the minimum is refined over a phase grid with ternary
/// search; the grid covers the case tr(V^dagger U) = 0 where the trace
/// carries no phase information. Each candidate is evaluated directly on
/// the difference matrix, which stays accurate down to machine-size
/// distances.
pub fn global_phase_distance(
    u: &DMatrix<Complex64>,
    v: &DMatrix<Complex64>,
) -> Result<f64, EffectiveError> {
    if u.nrows() != v.nrows() || u.ncols() != v.ncols() {
        return Err(EffectiveError::DimensionMismatch(u.nrows(), v.nrows()));
    }
    let dist_at = |phi: f64| -> f64 {
        let rotated = v.map(|x| x * Complex64::from_polar(1.0, phi));
        spectral_norm(&(u - rotated))
    };

    // tr(V^dagger U) without forming the product
    let trace: Complex64 = v.iter().zip(u.iter()).map(|(a, b)| a.conj() * b).sum();
    let mut best = dist_at(trace.arg());

    // Coarse grid to bracket the optimum, then ternary refinement.
    const GRID: usize = 48;
    let tau = std::f64::consts::TAU;
    let mut best_k = 0;
    let mut best_grid = f64::INFINITY;
    for i in 0..GRID {
        let d = dist_at(tau * i as f64 / GRID as f64);
        if d < best_grid {
            best_grid = d;
            best_k = i;
        }
    }
    let mut lo = tau * (best_k as f64 - 1.0) / GRID as f64;
    let mut hi = tau * (best_k as f64 + 1.0) / GRID as f64;
    for _ in 0..60 {
        let m1 = lo + (hi - lo) / 3.0;
        let m2 = hi - (hi - lo) / 3.0;
        if dist_at(m1) <= dist_at(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    best = best.min(dist_at(0.5 * (lo + hi))).min(best_grid);
    Ok(best)
}

/// Ratio of the effective transverse field on region A to the coupling
/// scale: eps_A pi (1 + mean cos theta) / (2 J0 T). The critical point
/// sits near 1.
pub fn delta_x(
    protocol: &DriveProtocol,
    network: &SpinNetwork,
    cos_theta_mean: f64,
) -> Result<f64, EffectiveError> {
    let j0t = network.max_coupling() * protocol.period();
    if j0t <= 0.0 {
        return Err(EffectiveError::ZeroCoupling);
    }
    Ok(protocol.eps_a() * std::f64::consts::PI * (1.0 + cos_theta_mean) / (2.0 * j0t))
}

/// Small-error balance parameters pi eps / (4 J0 T2) for each region.
pub fn delta_x_regional(
    protocol: &DriveProtocol,
    network: &SpinNetwork,
) -> Result<(f64, f64), EffectiveError> {
    let j0 = network.max_coupling();
    if j0 <= 0.0 {
        return Err(EffectiveError::ZeroCoupling);
    }
    let scale = std::f64::consts::PI / (4.0 * j0 * protocol.t2());
    Ok((scale * protocol.eps_a(), scale * protocol.eps_b()))
}

/// Ensemble estimate of the mean cos theta_l entering `delta_x`:
/// averages the diagonal eigenvalues of cos theta_l over A sites,
/// disorder realizations, and basis configurations weighted by the
/// reference state.
#[allow(clippy::too_many_arguments)]
pub fn estimate_cos_theta_mean(
    network: &SpinNetwork,
    partition: &RegionPartition,
    protocol: &DriveProtocol,
    disorder_strength: f64,
    bounds: BoundsMode,
    n_realizations: u64,
    master_seed: u64,
    reference: &StateVector,
) -> Result<f64, EffectiveError> {
    let n = network.n_sites();
    if reference.n_sites() != n {
        return Err(EffectiveError::BadDimension { got: reference.n_sites(), expected: n });
    }
    let t2 = protocol.t2();
    let a_sites = partition.sites(Region::A);
    if a_sites.is_empty() || n_realizations == 0 {
        return Ok(0.0);
    }
    let mut acc = 0.0;
    for r in 0..n_realizations {
        let field = sample_disorder(n, disorder_strength, bounds, derive_seed(master_seed, r))
            .map_err(|_| EffectiveError::ZeroCoupling)?;
        for &l in &a_sites {
            let b_edges: Vec<(usize, f64)> = network
                .edges()
                .iter()
                .filter_map(|e| {
                    if e.l == l && partition.region(e.m) == Region::B {
                        Some((e.m, e.coupling))
                    } else if e.m == l && partition.region(e.l) == Region::B {
                        Some((e.l, e.coupling))
                    } else {
                        None
                    }
                })
                .collect();
            for (s, amp) in reference.amplitudes().iter().enumerate() {
                let p = amp.norm_sqr();
                if p == 0.0 {
                    continue;
                }
                let th = 2.0 * field.value(l) * t2
                    + 2.0 * t2 * b_edges.iter().map(|&(m, j)| j * z_of(s, m)).sum::<f64>();
                acc += p * th.cos();
            }
        }
    }
    Ok(acc / (n_realizations as f64 * a_sites.len() as f64))
}

/// Comparison of the exact Floquet dynamics against the effective
/// Hamiltonian: operator distance, trajectory deviation, and the
/// conservation commutators.
#[derive(Debug, Clone, Serialize)]
pub struct EffectiveReport {
    pub operator_distance: f64,
    pub trajectory_deviation: f64,
    pub commutators: CommutatorNorms,
    pub params: ReportParams,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommutatorNorms {
    pub h_b: f64,
    pub sigma_z_b_max: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReportParams {
    pub n_sites: usize,
    pub j0t: f64,
    pub eps_a: f64,
    pub eps_b: f64,
    pub t2_over_t: f64,
    pub horizon_periods: u64,
}

impl EffectiveReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn is_finite(&self) -> bool {
        self.operator_distance.is_finite()
            && self.trajectory_deviation.is_finite()
            && self.commutators.h_b.is_finite()
            && self.commutators.sigma_z_b_max.is_finite()
            && self.operator_distance >= 0.0
            && self.trajectory_deviation >= 0.0
    }
}

/// Validate the effective Hamiltonian against exact dynamics: the
/// phase-aligned distance between the squared Floquet operator and
/// exp(-2i T H_eff), the worst local-magnetization deviation at
/// two-period stroboscopic times over the horizon, and the conservation
/// commutator norms.
pub fn validate_effective(
    network: &SpinNetwork,
    disorder: &DisorderField,
    protocol: &DriveProtocol,
    partition: &RegionPartition,
    initial: &StateVector,
    horizon_periods: u64,
    opts: &DenseOptions,
) -> Result<EffectiveReport, EffectiveError> {
    let n = network.n_sites();
    if n > opts.max_sites {
        return Err(EffectiveError::DenseGuard { got: n, max: opts.max_sites });
    }
    let t = protocol.period();

    let f = build_floquet_matrix(network, disorder, protocol, partition, opts)?;
    let f2 = &f * &f;
    let h_eff = build_h_eff_full(network, disorder, protocol, partition)?;
    let eig = h_eff.eigen();
    let u_eff = eig.propagator(2.0 * t);
    let operator_distance = global_phase_distance(&f2, &u_eff)?;

    // Exact trajectory via the fast kernels, recorded every 2 periods.
    let horizon = horizon_periods.max(2);
    let mut exact_state = initial.clone();
    let exact = evolve_record(
        &mut exact_state,
        protocol,
        network,
        disorder,
        partition,
        horizon,
        2,
        ObservableSet::default(),
    )?;

    // Effective trajectory by repeated application of exp(-2i T H_eff).
    let mut trajectory_deviation: f64 = 0.0;
    let mut psi = nalgebra::DVector::from_column_slice(initial.amplitudes());
    let mut records = exact.local_mz.iter();
    let first = records.next().expect("initial record");
    for (l, &m) in first.iter().enumerate() {
        let m_eff = dense_local_mz(&psi, l);
        trajectory_deviation = trajectory_deviation.max((m - m_eff).abs());
    }
    for row in records {
        psi = &u_eff * psi;
        for (l, &m) in row.iter().enumerate() {
            let m_eff = dense_local_mz(&psi, l);
            trajectory_deviation = trajectory_deviation.max((m - m_eff).abs());
        }
    }

    let h_b = build_h_region_b(network, disorder, partition, protocol)?;
    let comm_h_b = commutator_norm(h_b.matrix(), h_eff.matrix())?;
    let mut comm_z_max: f64 = 0.0;
    for l in partition.sites(Region::B) {
        let z = sigma_z_dense(n, l);
        comm_z_max = comm_z_max.max(commutator_norm(&z, h_eff.matrix())?);
    }

    Ok(EffectiveReport {
        operator_distance,
        trajectory_deviation,
        commutators: CommutatorNorms { h_b: comm_h_b, sigma_z_b_max: comm_z_max },
        params: ReportParams {
            n_sites: n,
            j0t: network.max_coupling() * t,
            eps_a: protocol.eps_a(),
            eps_b: protocol.eps_b(),
            t2_over_t: protocol.t2() / t,
            horizon_periods: horizon,
        },
    })
}

fn dense_local_mz(psi: &nalgebra::DVector<Complex64>, site: usize) -> f64 {
    let bit = 1usize << site;
    psi.iter()
        .enumerate()
        .map(|(s, a)| if s & bit != 0 { a.norm_sqr() } else { -a.norm_sqr() })
        .sum()
}
