//! Exact state-vector representation and the fast kernels for the
//! two-step drive.
//!
//! Basis convention: basis index `s` has the bit of site `l` at position
//! `l` (site 0 is the least significant bit), and bit value 1 means
//! sigma^z eigenvalue +1. The fully polarized state |1,1,...,1> is the
//! highest basis index.
//!
//! One drive period applies the transverse rotation layer for `T1`
//! followed by the diagonal Ising-plus-field phase for `T2`.

use num_complex::Complex64;
use thiserror::Error;

use crate::network::{DisorderField, Region, RegionPartition, SpinNetwork};
use crate::observables;

/// Hard cap on the site count; 2^24 amplitudes is already far beyond the
/// dense regime this simulator targets.
pub const MAX_SITES: usize = 24;

#[derive(Debug, Error, PartialEq)]
pub enum EvolutionError {
    #[error("site count {0} out of supported range 1..={MAX_SITES}")]
    BadSiteCount(usize),
    #[error("{what}: got {got}, expected {expected}")]
    DimensionMismatch { what: &'static str, got: usize, expected: usize },
    #[error("site index {site} out of range for {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },
    #[error("state vector norm deviates from 1: |norm-1| = {0:e}")]
    NotNormalized(f64),
    #[error("drive duration must be positive and finite, got {0}")]
    InvalidDuration(f64),
    #[error("rotation error must lie in [0, 1], got {0}")]
    InvalidRotationError(f64),
    #[error("drive amplitude must be finite, got {0}")]
    InvalidAmplitude(f64),
    #[error("schedule invalid: {0}")]
    InvalidSchedule(&'static str),
    #[error("non-finite amplitudes detected at period {period}")]
    NonFinite { period: u64 },
    #[error("norm drifted to {norm} at period {period}")]
    NormDrift { period: u64, norm: f64 },
}

/// Normalized complex amplitudes over the 2^N computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// Wrap an amplitude array, validating the length and normalization.
    pub fn new(n_sites: usize, amps: Vec<Complex64>) -> Result<Self, EvolutionError> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(EvolutionError::BadSiteCount(n_sites));
        }
        let dim = 1usize << n_sites;
        if amps.len() != dim {
            return Err(EvolutionError::DimensionMismatch {
                what: "amplitude count",
                got: amps.len(),
                expected: dim,
            });
        }
        let state = Self { n_sites, amps };
        let drift = (state.norm_sqr() - 1.0).abs();
        if drift > 1e-12 {
            return Err(EvolutionError::NotNormalized(drift));
        }
        Ok(state)
    }

    /// Computational basis state |index>.
    pub fn basis_state(n_sites: usize, index: usize) -> Result<Self, EvolutionError> {
        if n_sites == 0 || n_sites > MAX_SITES {
            return Err(EvolutionError::BadSiteCount(n_sites));
        }
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(EvolutionError::DimensionMismatch {
                what: "basis index",
                got: index,
                expected: dim,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n_sites, amps })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Largest per-amplitude deviation from `other`.
    pub fn max_diff(&self, other: &Self) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest per-amplitude deviation after aligning the global phase on
    /// the largest component of `other`.
    pub fn phase_aligned_max_diff(&self, other: &Self) -> f64 {
        let k = other
            .amps
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm_sqr().partial_cmp(&b.1.norm_sqr()).unwrap())
            .map(|(i, _)| i)
            .unwrap();
        let phase = self.amps[k] * other.amps[k].conj();
        let phase = if phase.norm() > 0.0 { phase / phase.norm() } else { Complex64::new(1.0, 0.0) };
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - phase * b).norm())
            .fold(0.0, f64::max)
    }
}

/// All spins up along z: amplitude 1 on the all-ones bitstring.
pub fn prepare_polarized(n_sites: usize) -> Result<StateVector, EvolutionError> {
    let dim = 1usize
        .checked_shl(n_sites as u32)
        .filter(|_| (1..=MAX_SITES).contains(&n_sites))
        .ok_or(EvolutionError::BadSiteCount(n_sites))?;
    StateVector::basis_state(n_sites, dim - 1)
}

/// Polarized state rotated by exp(-i theta/2 sigma^x) on every site;
/// models imperfect initial-state preparation.
pub fn prepare_tilted(n_sites: usize, theta: f64) -> Result<StateVector, EvolutionError> {
    let mut state = prepare_polarized(n_sites)?;
    apply_x_rotation_layer(&mut state, &vec![theta; n_sites])?;
    Ok(state)
}

/// Drive parameters for one period: transverse pulses of amplitude `g`
/// for `t1` with regional rotation errors, then the Ising-plus-field
/// phase for `t2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveProtocol {
    g: f64,
    t1: f64,
    t2: f64,
    eps_a: f64,
    eps_b: f64,
}

impl DriveProtocol {
    pub fn new(g: f64, t1: f64, t2: f64, eps_a: f64, eps_b: f64) -> Result<Self, EvolutionError> {
        if t1 <= 0.0 || !t1.is_finite() {
            return Err(EvolutionError::InvalidDuration(t1));
        }
        if t2 <= 0.0 || !t2.is_finite() {
            return Err(EvolutionError::InvalidDuration(t2));
        }
        if !g.is_finite() {
            return Err(EvolutionError::InvalidAmplitude(g));
        }
        for eps in [eps_a, eps_b] {
            if !(0.0..=1.0).contains(&eps) {
                return Err(EvolutionError::InvalidRotationError(eps));
            }
        }
        Ok(Self { g, t1, t2, eps_a, eps_b })
    }

    /// Preset constructor with the drive amplitude locked to g*T1 = pi/2,
    /// so an error-free pulse is an exact pi rotation.
    pub fn resonant(t1: f64, t2: f64, eps_a: f64, eps_b: f64) -> Result<Self, EvolutionError> {
        let g = std::f64::consts::FRAC_PI_2 / t1;
        let p = Self::new(g, t1, t2, eps_a, eps_b)?;
        debug_assert!((p.g * p.t1 - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
        Ok(p)
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn t1(&self) -> f64 {
        self.t1
    }

    pub fn t2(&self) -> f64 {
        self.t2
    }

    pub fn period(&self) -> f64 {
        self.t1 + self.t2
    }

    pub fn eps(&self, region: Region) -> f64 {
        match region {
            Region::A => self.eps_a,
            Region::B => self.eps_b,
        }
    }

    pub fn eps_a(&self) -> f64 {
        self.eps_a
    }

    pub fn eps_b(&self) -> f64 {
        self.eps_b
    }

    /// Full rotation angle 2 g (1 - eps) T1 accumulated by a spin of the
    /// given region during one pulse.
    pub fn rotation_angle(&self, region: Region) -> f64 {
        2.0 * self.g * (1.0 - self.eps(region)) * self.t1
    }

    /// Per-site pulse angles for a partition.
    pub fn rotation_angles(&self, partition: &RegionPartition) -> Vec<f64> {
        partition.labels().iter().map(|&r| self.rotation_angle(r)).collect()
    }
}

/// Apply exp(-i angle/2 sigma^x) site by site. Amplitude pairs differing
/// only in bit `l` mix through the 2x2 rotation; the norm is preserved.
pub fn apply_x_rotation_layer(
    state: &mut StateVector,
    angles: &[f64],
) -> Result<(), EvolutionError> {
    if angles.len() != state.n_sites {
        return Err(EvolutionError::DimensionMismatch {
            what: "rotation angle count",
            got: angles.len(),
            expected: state.n_sites,
        });
    }
    for (l, &angle) in angles.iter().enumerate() {
        rotate_site(&mut state.amps, l, angle);
    }
    Ok(())
}

fn rotate_site(amps: &mut [Complex64], site: usize, angle: f64) {
    let c = (0.5 * angle).cos();
    let s = (0.5 * angle).sin();
    if s == 0.0 && c == 1.0 {
        return;
    }
    let mis = Complex64::new(0.0, -s);
    let bit = 1usize << site;
    let dim = amps.len();
    let mut base = 0;
    while base < dim {
        for i0 in base..base + bit {
            let i1 = i0 | bit;
            let a0 = amps[i0];
            let a1 = amps[i1];
            amps[i0] = c * a0 + mis * a1;
            amps[i1] = mis * a0 + c * a1;
        }
        base += bit << 1;
    }
}

/// Ising-plus-field energy of basis state `s`, in inverse time:
/// sum over edges of J z_l z_m plus sum over sites of W_l z_l.
pub fn diagonal_energy(network: &SpinNetwork, disorder: &DisorderField, s: usize) -> f64 {
    let z = |l: usize| if (s >> l) & 1 == 1 { 1.0 } else { -1.0 };
    let mut e = 0.0;
    for edge in network.edges() {
        e += edge.coupling * z(edge.l) * z(edge.m);
    }
    for (l, &w) in disorder.values().iter().enumerate() {
        e += w * z(l);
    }
    e
}

fn diagonal_phase_table(
    network: &SpinNetwork,
    disorder: &DisorderField,
    t2: f64,
) -> Vec<Complex64> {
    let dim = 1usize << network.n_sites();
    (0..dim)
        .map(|s| {
            let e = diagonal_energy(network, disorder, s);
            Complex64::from_polar(1.0, -t2 * e)
        })
        .collect()
}

/// Multiply each basis amplitude by exp(-i t2 E(s)); moduli unchanged.
pub fn apply_diagonal_phase(
    state: &mut StateVector,
    network: &SpinNetwork,
    disorder: &DisorderField,
    t2: f64,
) -> Result<(), EvolutionError> {
    check_sites(state, network, disorder, None)?;
    let table = diagonal_phase_table(network, disorder, t2);
    for (a, p) in state.amps.iter_mut().zip(&table) {
        *a *= p;
    }
    Ok(())
}

fn check_sites(
    state: &StateVector,
    network: &SpinNetwork,
    disorder: &DisorderField,
    partition: Option<&RegionPartition>,
) -> Result<(), EvolutionError> {
    let n = state.n_sites;
    if network.n_sites() != n {
        return Err(EvolutionError::DimensionMismatch {
            what: "network sites",
            got: network.n_sites(),
            expected: n,
        });
    }
    if disorder.n_sites() != n {
        return Err(EvolutionError::DimensionMismatch {
            what: "disorder sites",
            got: disorder.n_sites(),
            expected: n,
        });
    }
    if let Some(p) = partition {
        if p.n_sites() != n {
            return Err(EvolutionError::DimensionMismatch {
                what: "partition sites",
                got: p.n_sites(),
                expected: n,
            });
        }
    }
    Ok(())
}

/// Precomputed single-period stepper. The pulse rotations and the
/// diagonal phase table are fixed across periods, so repeated stepping
/// costs one rotation layer plus one table multiply.
pub struct FloquetKernel {
    angles: Vec<f64>,
    phases: Vec<Complex64>,
}

impl FloquetKernel {
    pub fn new(
        protocol: &DriveProtocol,
        network: &SpinNetwork,
        disorder: &DisorderField,
        partition: &RegionPartition,
    ) -> Result<Self, EvolutionError> {
        if network.n_sites() != partition.n_sites() || network.n_sites() != disorder.n_sites() {
            return Err(EvolutionError::DimensionMismatch {
                what: "kernel sites",
                got: partition.n_sites(),
                expected: network.n_sites(),
            });
        }
        Ok(Self {
            angles: protocol.rotation_angles(partition),
            phases: diagonal_phase_table(network, disorder, protocol.t2()),
        })
    }

    /// One full period: pulse layer first, diagonal phase second.
    pub fn step(&self, state: &mut StateVector) -> Result<(), EvolutionError> {
        if state.dim() != self.phases.len() {
            return Err(EvolutionError::DimensionMismatch {
                what: "state dimension",
                got: state.dim(),
                expected: self.phases.len(),
            });
        }
        for (l, &angle) in self.angles.iter().enumerate() {
            rotate_site(&mut state.amps, l, angle);
        }
        for (a, p) in state.amps.iter_mut().zip(&self.phases) {
            *a *= p;
        }
        Ok(())
    }
}

/// Advance the state by exactly one drive period.
pub fn floquet_step(
    state: &mut StateVector,
    protocol: &DriveProtocol,
    network: &SpinNetwork,
    disorder: &DisorderField,
    partition: &RegionPartition,
) -> Result<(), EvolutionError> {
    check_sites(state, network, disorder, Some(partition))?;
    FloquetKernel::new(protocol, network, disorder, partition)?.step(state)
}

/// Expectation value of sigma^z at one site.
pub fn local_magnetization(state: &StateVector, site: usize) -> Result<f64, EvolutionError> {
    if site >= state.n_sites {
        return Err(EvolutionError::SiteOutOfRange { site, n_sites: state.n_sites });
    }
    let bit = 1usize << site;
    let mut m = 0.0;
    for (s, a) in state.amps.iter().enumerate() {
        let p = a.norm_sqr();
        m += if s & bit != 0 { p } else { -p };
    }
    Ok(m)
}

/// sigma^z expectation at every site in one sweep, fixed summation order.
pub fn all_local_magnetizations(state: &StateVector) -> Vec<f64> {
    let n = state.n_sites;
    let mut m = vec![0.0; n];
    for (s, a) in state.amps.iter().enumerate() {
        let p = a.norm_sqr();
        for (l, ml) in m.iter_mut().enumerate() {
            *ml += if s & (1 << l) != 0 { p } else { -p };
        }
    }
    m
}

/// Which optional observables to record besides the per-site
/// magnetizations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ObservableSet {
    pub regional_magnetization: bool,
    pub entropy: bool,
}

impl ObservableSet {
    pub fn all() -> Self {
        Self { regional_magnetization: true, entropy: true }
    }
}

/// Observables sampled at stroboscopic times t = nT.
#[derive(Debug, Clone, PartialEq)]
pub struct StroboscopicTrace {
    pub n_sites: usize,
    /// Period indices n at which records were taken, strictly increasing,
    /// starting with 0 for the initial state.
    pub record_times: Vec<u64>,
    /// One row per record; m^z_l for each site.
    pub local_mz: Vec<Vec<f64>>,
    /// Regional magnetizations (M_A, M_B) in the 2/N normalization.
    pub regional_mz: Option<Vec<(f64, f64)>>,
    /// Entanglement entropy of region B.
    pub entropy_b: Option<Vec<f64>>,
}

impl StroboscopicTrace {
    /// Check the trace invariants: magnetizations within [-1, 1] and
    /// strictly increasing record times.
    pub fn validate(&self) -> Result<(), EvolutionError> {
        for w in self.record_times.windows(2) {
            if w[1] <= w[0] {
                return Err(EvolutionError::InvalidSchedule("record times not increasing"));
            }
        }
        for row in &self.local_mz {
            if row.len() != self.n_sites {
                return Err(EvolutionError::DimensionMismatch {
                    what: "trace row",
                    got: row.len(),
                    expected: self.n_sites,
                });
            }
            if row.iter().any(|m| m.is_nan() || m.abs() > 1.0 + 1e-9) {
                return Err(EvolutionError::InvalidSchedule("magnetization out of range"));
            }
        }
        Ok(())
    }

    pub fn n_records(&self) -> usize {
        self.record_times.len()
    }

    /// Time series of M_A over the records (2/N normalization).
    pub fn m_a_series(&self) -> Option<Vec<f64>> {
        self.regional_mz.as_ref().map(|v| v.iter().map(|&(a, _)| a).collect())
    }

    pub fn m_b_series(&self) -> Option<Vec<f64>> {
        self.regional_mz.as_ref().map(|v| v.iter().map(|&(_, b)| b).collect())
    }

    /// CSV document: header `n,site_0,...,site_{N-1}[,M_A,M_B,S_B]`, one
    /// row per record, floats printed with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push('n');
        for l in 0..self.n_sites {
            out.push_str(&format!(",site_{l}"));
        }
        if self.regional_mz.is_some() {
            out.push_str(",M_A,M_B");
        }
        if self.entropy_b.is_some() {
            out.push_str(",S_B");
        }
        out.push('\n');
        for (i, &n) in self.record_times.iter().enumerate() {
            out.push_str(&n.to_string());
            for m in &self.local_mz[i] {
                out.push_str(&format!(",{m:.16e}"));
            }
            if let Some(reg) = &self.regional_mz {
                out.push_str(&format!(",{:.16e},{:.16e}", reg[i].0, reg[i].1));
            }
            if let Some(ent) = &self.entropy_b {
                out.push_str(&format!(",{:.16e}", ent[i]));
            }
            out.push('\n');
        }
        out
    }
}

/// Evolve for `n_periods`, recording the initial state and then every
/// `record_stride` periods. Stride 2 gives the 2T-stroboscopic view.
#[allow(clippy::too_many_arguments)]
pub fn evolve_record(
    state: &mut StateVector,
    protocol: &DriveProtocol,
    network: &SpinNetwork,
    disorder: &DisorderField,
    partition: &RegionPartition,
    n_periods: u64,
    record_stride: u64,
    observables: ObservableSet,
) -> Result<StroboscopicTrace, EvolutionError> {
    if n_periods == 0 {
        return Err(EvolutionError::InvalidSchedule("n_periods must be >= 1"));
    }
    if record_stride == 0 {
        return Err(EvolutionError::InvalidSchedule("record_stride must be >= 1"));
    }
    check_sites(state, network, disorder, Some(partition))?;
    let kernel = FloquetKernel::new(protocol, network, disorder, partition)?;

    let mut trace = StroboscopicTrace {
        n_sites: state.n_sites,
        record_times: Vec::new(),
        local_mz: Vec::new(),
        regional_mz: observables.regional_magnetization.then(Vec::new),
        entropy_b: observables.entropy.then(Vec::new),
    };

    let mut record = |state: &StateVector, n: u64| -> Result<(), EvolutionError> {
        let norm = state.norm_sqr();
        if !norm.is_finite() {
            return Err(EvolutionError::NonFinite { period: n });
        }
        trace.record_times.push(n);
        trace.local_mz.push(all_local_magnetizations(state));
        if let Some(reg) = trace.regional_mz.as_mut() {
            let r = observables::regional_magnetization(state, partition)
                .map_err(|_| EvolutionError::DimensionMismatch {
                    what: "partition sites",
                    got: partition.n_sites(),
                    expected: state.n_sites,
                })?;
            reg.push((r.m_a, r.m_b));
        }
        if let Some(ent) = trace.entropy_b.as_mut() {
            let s = observables::entanglement_entropy(state, partition)
                .map_err(|_| EvolutionError::InvalidSchedule("entropy on degenerate partition"))?;
            ent.push(s);
        }
        Ok(())
    };

    record(state, 0)?;
    for n in 1..=n_periods {
        kernel.step(state)?;
        if n.is_multiple_of(record_stride) {
            record(state, n)?;
        }
    }
    let final_drift = (state.norm_sqr() - 1.0).abs();
    if final_drift > 1e-9 {
        return Err(EvolutionError::NormDrift { period: n_periods, norm: state.norm_sqr() });
    }
    trace.validate()?;
    Ok(trace)
}
