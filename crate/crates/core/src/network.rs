//! Spin network construction: coupling graphs, region partitions, and
//! disorder fields.
//!
//! Couplings and fields are stored in physical inverse-time units. Run
//! configurations specify the dimensionless products `J*T` and `W*T`; the
//! conversion divides by the drive period before anything reaches this
//! module.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum NetworkError {
    #[error("coupling scale must be finite, got {0}")]
    NonFiniteCoupling(f64),
    #[error("power-law exponent must be >= 0, got {0}")]
    NegativeExponent(f64),
    #[error("network needs at least one site")]
    NoSites,
    #[error("ladder needs at least 2 rungs, got {0}")]
    TooFewRungs(usize),
    #[error("disorder strength must be >= 0, got {0}")]
    NegativeStrength(f64),
    #[error("half partition needs an even site count, got {0}")]
    OddSiteCount(usize),
    #[error("partition must assign every site: got {got} labels for {expected} sites")]
    PartitionLength { got: usize, expected: usize },
    #[error("partition is degenerate (single region); use an explicit degenerate constructor")]
    DegeneratePartition,
    #[error("edge ({l},{m}) is invalid for {n_sites} sites")]
    BadEdge { l: usize, m: usize, n_sites: usize },
    #[error("duplicate edge ({l},{m})")]
    DuplicateEdge { l: usize, m: usize },
}

/// One coupling edge: sites `l < m` joined with strength `coupling`
/// (inverse time).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub l: usize,
    pub m: usize,
    pub coupling: f64,
}

/// Weighted coupling graph over `n_sites` spins. Immutable after
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinNetwork {
    n_sites: usize,
    edges: Vec<Edge>,
}

impl SpinNetwork {
    /// Build from an explicit edge list. Edges are normalized to `l < m`
    /// order; duplicates and out-of-range indices are rejected.
    pub fn from_edges(
        n_sites: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self, NetworkError> {
        if n_sites == 0 {
            return Err(NetworkError::NoSites);
        }
        let mut out: Vec<Edge> = Vec::new();
        for (a, b, coupling) in edges {
            if !coupling.is_finite() {
                return Err(NetworkError::NonFiniteCoupling(coupling));
            }
            let (l, m) = if a < b { (a, b) } else { (b, a) };
            if l == m || m >= n_sites {
                return Err(NetworkError::BadEdge { l: a, m: b, n_sites });
            }
            if out.iter().any(|e| e.l == l && e.m == m) {
                return Err(NetworkError::DuplicateEdge { l, m });
            }
            out.push(Edge { l, m, coupling });
        }
        out.sort_by_key(|e| (e.l, e.m));
        Ok(Self { n_sites, edges: out })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Coupling between `a` and `b`, or 0 when no edge joins them.
    pub fn coupling(&self, a: usize, b: usize) -> f64 {
        let (l, m) = if a < b { (a, b) } else { (b, a) };
        self.edges
            .iter()
            .find(|e| e.l == l && e.m == m)
            .map_or(0.0, |e| e.coupling)
    }

    /// Largest coupling magnitude; the `J_0` scale of the network.
    pub fn max_coupling(&self) -> f64 {
        self.edges.iter().map(|e| e.coupling.abs()).fold(0.0, f64::max)
    }
}

/// Interaction-range exponent for the power-law chain. Infinity is a
/// distinct variant so nearest-neighbor truncation is exact and
/// serializes unambiguously.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerLawExponent {
    Finite(f64),
    Infinite,
}

/// Chain of `n` sites with couplings `J0 / |l-m|^alpha` on every pair.
///
/// `alpha = 0` gives uniform all-to-all coupling, `alpha = Infinite`
/// keeps nearest-neighbor edges only.
pub fn build_power_law_chain(
    n: usize,
    j0: f64,
    alpha: PowerLawExponent,
) -> Result<SpinNetwork, NetworkError> {
    if n == 0 {
        return Err(NetworkError::NoSites);
    }
    if !j0.is_finite() {
        return Err(NetworkError::NonFiniteCoupling(j0));
    }
    if let PowerLawExponent::Finite(a) = alpha {
        if a.is_nan() || a < 0.0 {
            return Err(NetworkError::NegativeExponent(a));
        }
    }
    let mut edges = Vec::new();
    for l in 0..n {
        for m in (l + 1)..n {
            let coupling = match alpha {
                PowerLawExponent::Infinite => {
                    if m - l == 1 {
                        j0
                    } else {
                        continue;
                    }
                }
                PowerLawExponent::Finite(a) => j0 / ((m - l) as f64).powf(a),
            };
            edges.push((l, m, coupling));
        }
    }
    SpinNetwork::from_edges(n, edges)
}

/// Two-rail ladder with `n_rungs` rungs and uniform coupling `j` on all
/// 3*n_rungs - 2 edges. Sites 0..n_rungs-1 form the bottom rail,
/// n_rungs..2*n_rungs-1 the top rail; rung r joins r and n_rungs + r.
pub fn build_ladder(n_rungs: usize, j: f64) -> Result<SpinNetwork, NetworkError> {
    if n_rungs < 2 {
        return Err(NetworkError::TooFewRungs(n_rungs));
    }
    if !j.is_finite() {
        return Err(NetworkError::NonFiniteCoupling(j));
    }
    let mut edges = Vec::new();
    for r in 0..n_rungs - 1 {
        edges.push((r, r + 1, j));
        edges.push((n_rungs + r, n_rungs + r + 1, j));
    }
    for r in 0..n_rungs {
        edges.push((r, n_rungs + r, j));
    }
    SpinNetwork::from_edges(2 * n_rungs, edges)
}

/// Region label for the two drive regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Region {
    A,
    B,
}

/// Per-site assignment of drive regions.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionPartition {
    labels: Vec<Region>,
}

impl RegionPartition {
    /// Explicit assignment; both regions must be non-empty.
    pub fn new(labels: Vec<Region>) -> Result<Self, NetworkError> {
        if labels.is_empty() {
            return Err(NetworkError::NoSites);
        }
        let n_a = labels.iter().filter(|&&r| r == Region::A).count();
        if n_a == 0 || n_a == labels.len() {
            return Err(NetworkError::DegeneratePartition);
        }
        Ok(Self { labels })
    }

    /// Single-region assignment, allowed only through this explicit entry
    /// point.
    pub fn new_degenerate(labels: Vec<Region>) -> Result<Self, NetworkError> {
        if labels.is_empty() {
            return Err(NetworkError::NoSites);
        }
        Ok(Self { labels })
    }

    pub fn n_sites(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Region] {
        &self.labels
    }

    pub fn region(&self, site: usize) -> Region {
        self.labels[site]
    }

    /// Sites carrying the given label, in ascending order.
    pub fn sites(&self, region: Region) -> Vec<usize> {
        (0..self.labels.len()).filter(|&l| self.labels[l] == region).collect()
    }

    pub fn len(&self, region: Region) -> usize {
        self.labels.iter().filter(|&&r| r == region).count()
    }

    pub fn is_degenerate(&self) -> bool {
        let n_a = self.len(Region::A);
        n_a == 0 || n_a == self.labels.len()
    }

    /// Bitmask with bit l set for every site l in `region`.
    pub fn mask(&self, region: Region) -> u64 {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &r)| r == region)
            .fold(0u64, |acc, (l, _)| acc | (1u64 << l))
    }
}

/// Sites 0..n/2-1 labeled A, the rest B.
pub fn half_partition(n: usize) -> Result<RegionPartition, NetworkError> {
    if n == 0 {
        return Err(NetworkError::NoSites);
    }
    if !n.is_multiple_of(2) {
        return Err(NetworkError::OddSiteCount(n));
    }
    let labels = (0..n).map(|l| if l < n / 2 { Region::A } else { Region::B }).collect();
    RegionPartition::new(labels)
}

/// Interval convention for the uniform disorder draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundsMode {
    /// W_l uniform in [-W, W].
    Symmetric,
    /// W_l uniform in [0, W].
    Positive,
}

/// Per-site longitudinal fields drawn i.i.d. uniform, reproducible from
/// the seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DisorderField {
    values: Vec<f64>,
    strength: f64,
    bounds: BoundsMode,
    seed: u64,
}

impl DisorderField {
    /// Uniform field with the same value on every site.
    pub fn constant(n: usize, value: f64) -> Self {
        Self {
            values: vec![value; n],
            strength: value.abs(),
            bounds: if value >= 0.0 { BoundsMode::Positive } else { BoundsMode::Symmetric },
            seed: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, site: usize) -> f64 {
        self.values[site]
    }

    pub fn n_sites(&self) -> usize {
        self.values.len()
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn bounds(&self) -> BoundsMode {
        self.bounds
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// SplitMix64 stream. Hand-rolled so disorder values and derived seeds
/// are bitwise reproducible independent of any external crate's value
/// stream.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform double in [0, 1) with 53 random bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }
}

/// Seed for realization `r` derived from a master seed. Injective in `r`,
/// so derived seeds never collide within one ensemble.
pub fn derive_seed(master_seed: u64, realization: u64) -> u64 {
    let mut rng = SplitMix64::new(
        master_seed.wrapping_add(realization.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    );
    rng.next_u64()
}

/// Draw an n-site disorder field, uniform within the declared bounds,
/// deterministic per (seed, n, strength, bounds).
pub fn sample_disorder(
    n: usize,
    strength: f64,
    bounds: BoundsMode,
    seed: u64,
) -> Result<DisorderField, NetworkError> {
    if n == 0 {
        return Err(NetworkError::NoSites);
    }
    if strength < 0.0 || !strength.is_finite() {
        return Err(NetworkError::NegativeStrength(strength));
    }
    let mut rng = SplitMix64::new(seed);
    let values = (0..n)
        .map(|_| {
            let u = rng.next_f64();
            match bounds {
                BoundsMode::Symmetric => strength * (2.0 * u - 1.0),
                BoundsMode::Positive => strength * u,
            }
        })
        .collect();
    Ok(DisorderField { values, strength, bounds, seed })
}

/// Zero field on every site.
pub fn zero_disorder(n: usize) -> DisorderField {
    DisorderField { values: vec![0.0; n], strength: 0.0, bounds: BoundsMode::Positive, seed: 0 }
}

/// Standalone JSON document for a network: edge list with dimensionless
/// couplings, partition labels, and the disorder draw parameters.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct NetworkSpec {
    pub n_sites: usize,
    /// Triples [l, m, J*T].
    pub edges: Vec<(usize, usize, f64)>,
    pub partition: Vec<Region>,
    pub disorder: DisorderSpec,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct DisorderSpec {
    #[serde(rename = "WT")]
    pub wt: f64,
    pub bounds: BoundsMode,
    pub seed: u64,
}

impl NetworkSpec {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network spec serializes")
    }

    /// Build the physical objects at drive period `t`: couplings and fields divide
    /// the dimensionless products by `t`.
    pub fn realize(
        &self,
        t: f64,
    ) -> Result<(SpinNetwork, RegionPartition, DisorderField), NetworkError> {
        let network = SpinNetwork::from_edges(
            self.n_sites,
            self.edges.iter().map(|&(l, m, jt)| (l, m, jt / t)),
        )?;
        let partition = RegionPartition::new(self.partition.clone())?;
        let disorder =
            sample_disorder(self.n_sites, self.disorder.wt / t, self.disorder.bounds, self.disorder.seed)?;
        Ok((network, partition, disorder))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn two_site_chain_has_unit_nearest_neighbor_coupling() {
        let net = build_power_law_chain(2, 1.0, PowerLawExponent::Finite(1.51)).unwrap();
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.coupling(0, 1), 1.0);
    }

    #[test]
    fn power_law_distance_two_matches_formula() {
        let net = build_power_law_chain(3, 1.0, PowerLawExponent::Finite(1.51)).unwrap();
        // Independent route: J = exp(-alpha ln 2).
        let expected = (-1.51 * std::f64::consts::LN_2).exp();
        assert!((net.coupling(0, 2) - expected).abs() < 1e-15);
        assert!((net.coupling(0, 2) - 0.3511).abs() < 1e-4);
    }

    #[test]
    fn infinite_alpha_keeps_nearest_neighbors_only() {
        let net = build_power_law_chain(3, 1.0, PowerLawExponent::Infinite).unwrap();
        assert_eq!(net.edges().len(), 2);
        assert_eq!(net.coupling(0, 1), 1.0);
        assert_eq!(net.coupling(1, 2), 1.0);
        assert_eq!(net.coupling(0, 2), 0.0);
    }

    #[test]
    fn alpha_zero_is_uniform_all_to_all() {
        let net = build_power_law_chain(4, 0.7, PowerLawExponent::Finite(0.0)).unwrap();
        assert_eq!(net.edges().len(), 6);
        for e in net.edges() {
            assert_eq!(e.coupling, 0.7);
        }
    }

    #[test]
    fn power_law_rejects_bad_inputs() {
        assert!(build_power_law_chain(3, f64::NAN, PowerLawExponent::Finite(1.0)).is_err());
        assert!(build_power_law_chain(3, f64::INFINITY, PowerLawExponent::Finite(1.0)).is_err());
        assert!(build_power_law_chain(3, 1.0, PowerLawExponent::Finite(-0.5)).is_err());
        assert!(build_power_law_chain(0, 1.0, PowerLawExponent::Finite(1.0)).is_err());
    }

    #[test]
    fn power_law_couplings_decrease_with_distance() {
        let net = build_power_law_chain(8, 1.0, PowerLawExponent::Finite(1.51)).unwrap();
        for d in 2..7usize {
            assert!(net.coupling(0, d) < net.coupling(0, d - 1));
        }
    }

    #[test]
    fn large_alpha_non_nearest_couplings_below_threshold() {
        let j0 = 1.0;
        let net = build_power_law_chain(6, j0, PowerLawExponent::Finite(64.0)).unwrap();
        for e in net.edges() {
            if e.m - e.l > 1 {
                assert!(e.coupling <= j0 * 2f64.powi(-64));
            }
        }
        // And the Infinite builder matches the nearest-neighbor truncation
        // exactly: same edge set, identical couplings.
        let nn = build_power_law_chain(6, j0, PowerLawExponent::Infinite).unwrap();
        let truncated: Vec<Edge> = net
            .edges()
            .iter()
            .copied()
            .filter(|e| e.m - e.l == 1)
            .collect();
        assert_eq!(nn.edges(), truncated.as_slice());
    }

    #[test]
    fn smallest_ladder() {
        let net = build_ladder(2, 1.0).unwrap();
        assert_eq!(net.n_sites(), 4);
        assert_eq!(net.edges().len(), 4);
        // two rails, two rungs
        assert_eq!(net.coupling(0, 1), 1.0);
        assert_eq!(net.coupling(2, 3), 1.0);
        assert_eq!(net.coupling(0, 2), 1.0);
        assert_eq!(net.coupling(1, 3), 1.0);
    }

    #[test]
    fn four_rung_ladder_counts() {
        let net = build_ladder(4, 0.2).unwrap();
        assert_eq!(net.n_sites(), 8);
        assert_eq!(net.edges().len(), 10);
        for e in net.edges() {
            assert_eq!(e.coupling, 0.2);
        }
    }

    #[test]
    fn zero_coupling_ladder_is_valid() {
        let net = build_ladder(3, 0.0).unwrap();
        assert_eq!(net.edges().len(), 7);
        assert!(net.edges().iter().all(|e| e.coupling == 0.0));
    }

    #[test]
    fn ladder_rejects_single_rung() {
        assert_eq!(build_ladder(1, 1.0).unwrap_err(), NetworkError::TooFewRungs(1));
    }

    #[test]
    fn ladder_edge_count_law() {
        for r in 2..12 {
            let net = build_ladder(r, 1.0).unwrap();
            assert_eq!(net.edges().len(), 3 * r - 2);
        }
    }

    #[test]
    fn duplicate_and_out_of_range_edges_rejected() {
        assert!(matches!(
            SpinNetwork::from_edges(3, vec![(0, 1, 1.0), (1, 0, 2.0)]),
            Err(NetworkError::DuplicateEdge { l: 0, m: 1 })
        ));
        assert!(matches!(
            SpinNetwork::from_edges(3, vec![(0, 3, 1.0)]),
            Err(NetworkError::BadEdge { .. })
        ));
        assert!(matches!(
            SpinNetwork::from_edges(3, vec![(1, 1, 1.0)]),
            Err(NetworkError::BadEdge { .. })
        ));
    }

    #[test]
    fn half_partition_labels() {
        let p = half_partition(8).unwrap();
        assert_eq!(p.sites(Region::A), vec![0, 1, 2, 3]);
        assert_eq!(p.sites(Region::B), vec![4, 5, 6, 7]);
        let p2 = half_partition(2).unwrap();
        assert_eq!(p2.sites(Region::A), vec![0]);
        assert_eq!(p2.sites(Region::B), vec![1]);
        let p6 = half_partition(6).unwrap();
        assert_eq!(p6.sites(Region::A), vec![0, 1, 2]);
        assert_eq!(p6.sites(Region::B), vec![3, 4, 5]);
    }

    #[test]
    fn half_partition_rejects_odd() {
        assert_eq!(half_partition(5).unwrap_err(), NetworkError::OddSiteCount(5));
    }

    #[test]
    fn degenerate_partition_needs_explicit_constructor() {
        assert_eq!(
            RegionPartition::new(vec![Region::A; 4]).unwrap_err(),
            NetworkError::DegeneratePartition
        );
        let p = RegionPartition::new_degenerate(vec![Region::A; 4]).unwrap();
        assert!(p.is_degenerate());
        assert_eq!(p.len(Region::A), 4);
    }

    #[test]
    fn partition_masks() {
        let p = half_partition(4).unwrap();
        assert_eq!(p.mask(Region::A), 0b0011);
        assert_eq!(p.mask(Region::B), 0b1100);
    }

    #[test]
    fn zero_strength_disorder_is_zero() {
        let d = sample_disorder(8, 0.0, BoundsMode::Positive, 42).unwrap();
        assert!(d.values().iter().all(|&w| w == 0.0));
    }

    #[test]
    fn disorder_is_deterministic() {
        let a = sample_disorder(16, 1.3, BoundsMode::Symmetric, 7).unwrap();
        let b = sample_disorder(16, 1.3, BoundsMode::Symmetric, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_seeds_give_distinct_fields() {
        let a = sample_disorder(8, 1.0, BoundsMode::Positive, 1).unwrap();
        let b = sample_disorder(8, 1.0, BoundsMode::Positive, 2).unwrap();
        assert_ne!(a.values(), b.values());
    }

    #[test]
    fn positive_mode_respects_bounds() {
        let w = 2.0 * std::f64::consts::PI;
        let d = sample_disorder(8, w, BoundsMode::Positive, 1).unwrap();
        assert_eq!(d.n_sites(), 8);
        assert!(d.values().iter().all(|&v| (0.0..w).contains(&v)));
    }

    #[test]
    fn negative_strength_rejected() {
        assert!(sample_disorder(4, -1.0, BoundsMode::Positive, 0).is_err());
    }

    #[test]
    fn derived_seeds_distinct_over_wide_range() {
        let mut seen = std::collections::HashSet::new();
        for r in 0..100_000u64 {
            assert!(seen.insert(derive_seed(99, r)), "collision at r={r}");
        }
    }

    #[test]
    fn network_spec_json_round_trip() {
        let spec = NetworkSpec {
            n_sites: 4,
            edges: vec![(0, 1, 0.2), (1, 2, 0.2), (2, 3, 0.2)],
            partition: vec![Region::A, Region::A, Region::B, Region::B],
            disorder: DisorderSpec {
                wt: 2.0 * std::f64::consts::PI,
                bounds: BoundsMode::Positive,
                seed: 5,
            },
        };
        let text = spec.to_json();
        let back = NetworkSpec::from_json(&text).unwrap();
        assert_eq!(spec, back);
        let (net, part, dis) = back.realize(1.0).unwrap();
        assert_eq!(net.n_sites(), 4);
        assert_eq!(part.len(Region::A), 2);
        assert_eq!(dis.n_sites(), 4);
    }

    proptest! {
        #[test]
        fn power_law_couplings_depend_only_on_distance(
            n in 2usize..10,
            alpha in 0.0f64..4.0,
            j0 in 0.01f64..2.0,
        ) {
            let net = build_power_law_chain(n, j0, PowerLawExponent::Finite(alpha)).unwrap();
            for e in net.edges() {
                let expected = j0 / ((e.m - e.l) as f64).powf(alpha);
                prop_assert!((e.coupling - expected).abs() <= 1e-15 * expected.abs().max(1.0));
                // symmetric lookup
                prop_assert_eq!(net.coupling(e.l, e.m), net.coupling(e.m, e.l));
            }
        }

        #[test]
        fn disorder_within_declared_bounds(
            n in 1usize..32,
            w in 0.0f64..10.0,
            seed in any::<u64>(),
            symmetric in any::<bool>(),
        ) {
            let mode = if symmetric { BoundsMode::Symmetric } else { BoundsMode::Positive };
            let d = sample_disorder(n, w, mode, seed).unwrap();
            for &v in d.values() {
                match mode {
                    BoundsMode::Symmetric => prop_assert!((-w..=w).contains(&v)),
                    BoundsMode::Positive => prop_assert!((0.0..=w).contains(&v)),
                }
            }
        }
    }
}
