//! Torus shapes and the arithmetic of the anisotropic Laplacian symbol.
//!
//! A rectangular torus with side lengths `(l1, l2, l3)` rescales to the unit
//! torus with Laplacian coefficients `beta_i = l_i^{-2}`. The symbol of that
//! Laplacian is the quadratic form `Q(k) = sum_i beta_i k_i^2`; its
//! polarization `Q(l, m) = sum_i beta_i l_i m_i` measures near-resonances
//! between frequency pairs. Rational tori admit many exact resonances
//! (`Q(k, l) = 0` on whole sublattices); generic tori suppress them, which is
//! quantified here by [`diophantine_margin`] and [`resonant_lattice_count`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Side lengths of a rectangular torus and the derived coefficients of the
/// anisotropic Laplacian on the unit torus.
///
/// `betas()[i]` is always exactly `lengths()[i].powi(-2)`; the betas are
/// derived in one place ([`betas_from_lengths`]) and never set directly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusSpec {
    lengths: [f64; 3],
    betas: [f64; 3],
}

impl TorusSpec {
    /// Build a torus from its side lengths. Fails on nonpositive or
    /// non-finite lengths.
    pub fn from_lengths(lengths: [f64; 3]) -> Result<Self> {
        let betas = betas_from_lengths(lengths)?;
        Ok(Self { lengths, betas })
    }

    /// The square unit torus, `lengths = betas = (1, 1, 1)`.
    pub fn unit() -> Self {
        Self::from_lengths([1.0, 1.0, 1.0]).expect("unit lengths are valid")
    }

    /// The irrational reference torus with lengths `(1, 2^{1/4}, 3^{1/4})`,
    /// hence `betas = (1, 2^{-1/2}, 3^{-1/2})`.
    pub fn quartic_irrational() -> Self {
        Self::from_lengths([1.0, 2.0_f64.powf(0.25), 3.0_f64.powf(0.25)])
            .expect("reference lengths are valid")
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn betas(&self) -> [f64; 3] {
        self.betas
    }
}

/// `beta_i = l_i^{-2}`. The single derivation point for Laplacian
/// coefficients; everything else goes through [`TorusSpec`].
pub fn betas_from_lengths(lengths: [f64; 3]) -> Result<[f64; 3]> {
    for (i, &l) in lengths.iter().enumerate() {
        if !l.is_finite() || l <= 0.0 {
            return Err(Error::InvalidInput(format!(
                "torus length {} must be finite and positive, got {l}",
                i + 1
            )));
        }
    }
    Ok([
        lengths[0].powi(-2),
        lengths[1].powi(-2),
        lengths[2].powi(-2),
    ])
}

/// The quadratic form `Q(k) = sum_i beta_i k_i^2` of the Laplacian symbol.
///
/// Nonnegative, and zero only at `k = 0` since every `beta_i > 0`.
pub fn q_form(betas: [f64; 3], k: [i64; 3]) -> f64 {
    let mut q = 0.0;
    for i in 0..3 {
        let ki = k[i] as f64;
        q += betas[i] * ki * ki;
    }
    q
}

/// The bilinear polarization `Q(l, m) = sum_i beta_i l_i m_i`.
///
/// Symmetric in `(l, m)`, and `q_bilinear(b, k, k) == q_form(b, k)`.
pub fn q_bilinear(betas: [f64; 3], l: [i64; 3], m: [i64; 3]) -> f64 {
    let mut q = 0.0;
    for i in 0..3 {
        q += betas[i] * (l[i] as f64) * (m[i] as f64);
    }
    q
}

/// Smallest weighted small-divisor value
/// `|n1 b1 + n2 b2 + n3 b3| * (|n1| + |n2| + |n3|)^exponent`
/// over nonzero integer triples with `|n_i| <= n_max`, together with an
/// attaining witness.
///
/// A margin of zero certifies an exact rational relation among the betas
/// within the searched range (e.g. any torus with two equal lengths); a
/// strictly positive margin is the desk-scale Diophantine genericity check.
/// The exhaustive `O(n_max^3)` scan is the ground truth at the ranges used
/// here (`n_max <= ~100`).
pub fn diophantine_margin(betas: [f64; 3], n_max: u32, exponent: f64) -> (f64, [i64; 3]) {
    assert!(n_max >= 1, "n_max must be at least 1");
    let n = n_max as i64;
    let mut best = f64::INFINITY;
    let mut witness = [0i64; 3];
    for n1 in -n..=n {
        for n2 in -n..=n {
            for n3 in -n..=n {
                if n1 == 0 && n2 == 0 && n3 == 0 {
                    continue;
                }
                let lin = (n1 as f64) * betas[0] + (n2 as f64) * betas[1] + (n3 as f64) * betas[2];
                let weight = ((n1.abs() + n2.abs() + n3.abs()) as f64).powf(exponent);
                let value = lin.abs() * weight;
                if value < best {
                    best = value;
                    witness = [n1, n2, n3];
                }
            }
        }
    }
    (best, witness)
}

/// Parameters for near-resonant lattice counting.
///
/// Counts frequencies `k` with Euclidean `|k| <= radius` that are
/// near-orthogonal, under the bilinear form, to some small nonzero integer
/// vector `l` with `|l_i| <= floor(radius^gamma0)` per component. The
/// component-wise bound on `l` keeps diagonal directions such as
/// `(1, -1, 0)` in play at desk-scale radii, which is where rational and
/// generic tori actually differ. Near-orthogonality means
/// `|Q(k, l)| <= width_prefactor * radius^gamma1`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ResonanceQuery {
    pub radius: u32,
    pub gamma0: f64,
    pub gamma1: f64,
    pub width_prefactor: f64,
    /// Cap on `(#k) * (#l)` enumeration pairs.
    pub budget: u128,
}

impl ResonanceQuery {
    pub const DEFAULT_BUDGET: u128 = 1 << 34;

    /// Fails unless `0 < gamma0 < 1`, `0 < gamma1 < 1`, `gamma1 > gamma0`,
    /// `width_prefactor >= 0` and `radius >= 1`.
    pub fn new(radius: u32, gamma0: f64, gamma1: f64, width_prefactor: f64) -> Result<Self> {
        if radius == 0 {
            return Err(Error::InvalidInput("resonance radius must be >= 1".into()));
        }
        if !(0.0..1.0).contains(&gamma0) || gamma0 == 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma0 must lie in (0, 1), got {gamma0}"
            )));
        }
        if !(0.0..1.0).contains(&gamma1) || gamma1 == 0.0 {
            return Err(Error::InvalidInput(format!(
                "gamma1 must lie in (0, 1), got {gamma1}"
            )));
        }
        if gamma1 <= gamma0 {
            return Err(Error::InvalidInput(format!(
                "gamma1 ({gamma1}) must exceed gamma0 ({gamma0})"
            )));
        }
        if !(width_prefactor >= 0.0 && width_prefactor.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "width prefactor must be finite and >= 0, got {width_prefactor}"
            )));
        }
        Ok(Self {
            radius,
            gamma0,
            gamma1,
            width_prefactor,
            budget: Self::DEFAULT_BUDGET,
        })
    }

    pub fn with_budget(mut self, budget: u128) -> Self {
        self.budget = budget;
        self
    }

    /// Whether the exponents satisfy `gamma1 > 4 gamma0`, the wider margin
    /// the supporting analysis assumes. Callers should warn when this fails;
    /// `gamma1 > gamma0` alone is still accepted.
    pub fn has_analysis_margin(&self) -> bool {
        self.gamma1 > 4.0 * self.gamma0
    }

    /// Half-width of the accepted `|Q(k, l)|` band.
    pub fn width(&self) -> f64 {
        self.width_prefactor * (self.radius as f64).powf(self.gamma1)
    }

    /// Component bound for the small vectors `l`.
    pub fn small_vector_bound(&self) -> i64 {
        (self.radius as f64).powf(self.gamma0).floor() as i64
    }
}

/// Number of lattice points `k` with `|k| <= radius` (Euclidean) such that
/// some nonzero `l` with `|l_i| <= floor(radius^gamma0)` has
/// `|Q(k, l)| <= width_prefactor * radius^gamma1`.
///
/// Monotone nondecreasing in the radius and in the width prefactor. Errors
/// when the worst-case pair enumeration would exceed `query.budget`. The scan
/// is partitioned over `k_1` slabs and combined by summation.
pub fn resonant_lattice_count(betas: [f64; 3], query: &ResonanceQuery) -> Result<u64> {
    let radius = query.radius as i64;
    let l_bound = query.small_vector_bound().max(1);
    let width = query.width();

    let k_points = (2 * radius + 1) as u128;
    let l_points = (2 * l_bound + 1) as u128;
    let needed = k_points.pow(3) * l_points.pow(3);
    if needed > query.budget {
        return Err(Error::BudgetExceeded {
            needed,
            budget: query.budget,
        });
    }

    let small_vectors: Vec<[i64; 3]> = {
        let mut vs = Vec::new();
        for l1 in -l_bound..=l_bound {
            for l2 in -l_bound..=l_bound {
                for l3 in -l_bound..=l_bound {
                    if (l1, l2, l3) != (0, 0, 0) {
                        vs.push([l1, l2, l3]);
                    }
                }
            }
        }
        vs
    };

    let r2 = radius * radius;
    let count = (-radius..=radius)
        .into_par_iter()
        .map(|k1| {
            let mut slab = 0u64;
            for k2 in -radius..=radius {
                for k3 in -radius..=radius {
                    if k1 * k1 + k2 * k2 + k3 * k3 > r2 {
                        continue;
                    }
                    let k = [k1, k2, k3];
                    if small_vectors
                        .iter()
                        .any(|&l| q_bilinear(betas, k, l).abs() <= width)
                    {
                        slab += 1;
                    }
                }
            }
            slab
        })
        .sum();
    Ok(count)
}

/// Deterministic pseudo-random torus with lengths uniform in `[low, high]`.
///
/// Any absolutely continuous law realizes "generic" side lengths, so a
/// reproducible uniform draw is used. The same seed always yields the same
/// torus.
pub fn sample_generic_torus(seed: u64, low: f64, high: f64) -> Result<TorusSpec> {
    if !(low.is_finite() && high.is_finite() && 0.0 < low && low < high) {
        return Err(Error::InvalidInput(format!(
            "length range must satisfy 0 < low < high, got [{low}, {high}]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lengths = [
        rng.gen_range(low..high),
        rng.gen_range(low..high),
        rng.gen_range(low..high),
    ];
    TorusSpec::from_lengths(lengths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn betas_identity_and_scaling() {
        assert_eq!(betas_from_lengths([1.0, 1.0, 1.0]).unwrap(), [1.0, 1.0, 1.0]);
        assert_eq!(
            betas_from_lengths([2.0, 2.0, 2.0]).unwrap(),
            [0.25, 0.25, 0.25]
        );
    }

    #[test]
    fn betas_quartic_reference() {
        let b = betas_from_lengths([1.0, 2.0_f64.powf(0.25), 3.0_f64.powf(0.25)]).unwrap();
        assert_relative_eq!(b[0], 1.0, max_relative = 1e-15);
        assert_relative_eq!(b[1], 2.0_f64.powf(-0.5), max_relative = 1e-14);
        assert_relative_eq!(b[2], 3.0_f64.powf(-0.5), max_relative = 1e-14);
    }

    #[test]
    fn betas_reject_bad_lengths() {
        assert!(betas_from_lengths([0.0, 1.0, 1.0]).is_err());
        assert!(betas_from_lengths([1.0, -2.0, 1.0]).is_err());
        assert!(betas_from_lengths([1.0, f64::NAN, 1.0]).is_err());
        assert!(betas_from_lengths([1.0, f64::INFINITY, 1.0]).is_err());
    }

    #[test]
    fn torus_spec_keeps_betas_derived() {
        let t = TorusSpec::from_lengths([1.5, 0.7, 2.0]).unwrap();
        let b = betas_from_lengths(t.lengths()).unwrap();
        assert_eq!(t.betas(), b);
    }

    #[test]
    fn q_form_values() {
        assert_eq!(q_form([1.0, 1.0, 1.0], [1, 0, 0]), 1.0);
        assert_eq!(q_form([1.0, 1.0, 1.0], [1, 2, 3]), 14.0);
        let b = [1.0, 2.0_f64.powf(-0.5), 3.0_f64.powf(-0.5)];
        assert_relative_eq!(
            q_form(b, [0, 1, 1]),
            1.284_457_050_376_173_4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn q_bilinear_values() {
        assert_eq!(q_bilinear([1.0, 1.0, 1.0], [1, 0, 0], [0, 1, 0]), 0.0);
        assert_eq!(q_bilinear([1.0, 1.0, 1.0], [1, 2, 3], [1, 2, 3]), 14.0);
        assert_eq!(
            q_bilinear([1.0, 0.5, 0.25], [1, 1, 1], [1, -1, 2]),
            1.0 - 0.5 + 0.5
        );
    }

    #[test]
    fn q_bilinear_symmetry_and_polarization() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let betas = [
                rng.gen_range(0.1..4.0),
                rng.gen_range(0.1..4.0),
                rng.gen_range(0.1..4.0),
            ];
            let l = [
                rng.gen_range(-20..=20i64),
                rng.gen_range(-20..=20i64),
                rng.gen_range(-20..=20i64),
            ];
            let m = [
                rng.gen_range(-20..=20i64),
                rng.gen_range(-20..=20i64),
                rng.gen_range(-20..=20i64),
            ];
            assert_eq!(q_bilinear(betas, l, m), q_bilinear(betas, m, l));
            let sum = [l[0] + m[0], l[1] + m[1], l[2] + m[2]];
            let lhs = q_form(betas, sum);
            let rhs = q_form(betas, l) + 2.0 * q_bilinear(betas, l, m) + q_form(betas, m);
            assert_relative_eq!(lhs, rhs, max_relative = 1e-12, epsilon = 1e-12);
            assert!(q_form(betas, l) >= 0.0);
            if l != [0, 0, 0] {
                assert!(q_form(betas, l) > 0.0);
            }
        }
    }

    #[test]
    fn diophantine_margin_rational_is_zero() {
        let (margin, witness) = diophantine_margin([1.0, 1.0, 1.0], 1, 4.0);
        assert_eq!(margin, 0.0);
        let w: Vec<i64> = witness.iter().map(|v| v.abs()).collect();
        let mut sorted = w.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 1], "witness {witness:?} should cancel");

        let (margin0, _) = diophantine_margin([1.0, 1.0, 1.0], 1, 0.0);
        assert_eq!(margin0, 0.0);
    }

    // Frozen from the exhaustive enumeration itself (the oracle at this
    // scale); guards against regressions in the scan order or weighting.
    // The minimum is attained at the unit triple (0, 0, -1), whose weight is
    // 1, so the margin is exactly beta_3 = 3^{-1/2}.
    #[test]
    fn diophantine_margin_quartic_regression() {
        let b = [1.0, 2.0_f64.powf(-0.5), 3.0_f64.powf(-0.5)];
        let (margin, witness) = diophantine_margin(b, 50, 4.0);
        assert!(margin > 0.0);
        assert_relative_eq!(margin, 0.577_350_269_189_625_7, max_relative = 1e-15);
        assert_eq!([witness[0], witness[1], witness[2].abs()], [0, 0, 1]);
    }

    #[test]
    fn diophantine_margin_monotone_in_n_max() {
        let b = [1.0, 2.0_f64.powf(-0.5), 3.0_f64.powf(-0.5)];
        let mut prev = f64::INFINITY;
        for n_max in [1, 2, 5, 10, 20, 40] {
            let (m, _) = diophantine_margin(b, n_max, 4.0);
            assert!(m <= prev, "margin must be nonincreasing in n_max");
            prev = m;
        }
    }

    #[test]
    fn resonance_query_validation() {
        assert!(ResonanceQuery::new(8, 0.2, 0.5, 1.0).is_ok());
        assert!(ResonanceQuery::new(8, 0.5, 0.2, 1.0).is_err());
        assert!(ResonanceQuery::new(8, 0.2, 0.2, 1.0).is_err());
        assert!(ResonanceQuery::new(0, 0.2, 0.5, 1.0).is_err());
        let q = ResonanceQuery::new(8, 0.1, 0.5, 1.0).unwrap();
        assert!(q.has_analysis_margin());
        let q = ResonanceQuery::new(8, 0.2, 0.5, 1.0).unwrap();
        assert!(!q.has_analysis_margin());
    }

    /// Independent re-implementation with the loop order exchanged
    /// (l outermost, collecting k into a set).
    fn count_loops_exchanged(betas: [f64; 3], query: &ResonanceQuery) -> u64 {
        use std::collections::HashSet;
        let radius = query.radius as i64;
        let l_bound = query.small_vector_bound().max(1);
        let width = query.width();
        let mut hits: HashSet<[i64; 3]> = HashSet::new();
        for l1 in -l_bound..=l_bound {
            for l2 in -l_bound..=l_bound {
                for l3 in -l_bound..=l_bound {
                    if (l1, l2, l3) == (0, 0, 0) {
                        continue;
                    }
                    for k1 in -radius..=radius {
                        for k2 in -radius..=radius {
                            for k3 in -radius..=radius {
                                if k1 * k1 + k2 * k2 + k3 * k3 > radius * radius {
                                    continue;
                                }
                                let q = q_bilinear(betas, [k1, k2, k3], [l1, l2, l3]);
                                if q.abs() <= width {
                                    hits.insert([k1, k2, k3]);
                                }
                            }
                        }
                    }
                }
            }
        }
        hits.len() as u64
    }

    #[test]
    fn resonant_count_matches_exchanged_loops() {
        let query = ResonanceQuery::new(4, 0.05, 0.29, 0.9).unwrap();
        // K = 4: width = 0.9 * 4^0.29 < 1 and l-bound 1.
        assert!(query.width() < 1.0);
        for betas in [
            [1.0, 1.0, 1.0],
            [1.0, 2.0_f64.powf(-0.5), 3.0_f64.powf(-0.5)],
            [0.9, 1.3, 0.6],
        ] {
            let fast = resonant_lattice_count(betas, &query).unwrap();
            let slow = count_loops_exchanged(betas, &query);
            assert_eq!(fast, slow, "betas {betas:?}");
        }
    }

    #[test]
    fn resonant_count_zero_width_unit_torus() {
        // width 0 requests exact orthogonality; k = (1,-1,0) pairs with
        // l = (1,1,0) already at radius 1.
        let query = ResonanceQuery::new(1, 0.05, 0.29, 0.0).unwrap();
        let count = resonant_lattice_count([1.0, 1.0, 1.0], &query).unwrap();
        assert!(count >= 1);
    }

    #[test]
    fn resonant_count_monotone_in_width_and_radius() {
        let betas = [1.0, 2.0_f64.powf(-0.5), 3.0_f64.powf(-0.5)];
        let mut prev = 0;
        for c in [0.0, 0.5, 1.0, 2.0] {
            let q = ResonanceQuery::new(8, 0.1, 0.3, c).unwrap();
            let n = resonant_lattice_count(betas, &q).unwrap();
            assert!(n >= prev, "count must be nondecreasing in the prefactor");
            prev = n;
        }
        let mut prev = 0;
        for radius in [2, 4, 8, 16] {
            let q = ResonanceQuery::new(radius, 0.1, 0.3, 1.0).unwrap();
            let n = resonant_lattice_count(betas, &q).unwrap();
            assert!(n >= prev, "count must be nondecreasing in the radius");
            prev = n;
        }
    }

    #[test]
    fn resonant_count_budget() {
        let q = ResonanceQuery::new(16, 0.1, 0.3, 1.0).unwrap().with_budget(10);
        match resonant_lattice_count([1.0, 1.0, 1.0], &q) {
            Err(Error::BudgetExceeded { needed, budget }) => {
                assert!(needed > budget);
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn sample_generic_torus_deterministic() {
        let a = sample_generic_torus(1, 0.5, 2.0).unwrap();
        let b = sample_generic_torus(1, 0.5, 2.0).unwrap();
        assert_eq!(a.lengths(), b.lengths());
        let c = sample_generic_torus(2, 0.5, 2.0).unwrap();
        assert_ne!(a.lengths(), c.lengths());
        for l in a.lengths() {
            assert!((0.5..2.0).contains(&l));
        }
        assert!(sample_generic_torus(1, 2.0, 0.5).is_err());
        assert!(sample_generic_torus(1, -1.0, 2.0).is_err());
    }

    #[test]
    fn sampled_tori_are_diophantine_generic() {
        let mut positive = 0;
        for seed in 0..100 {
            let t = sample_generic_torus(seed, 0.5, 2.0).unwrap();
            let (margin, _) = diophantine_margin(t.betas(), 20, 4.0);
            if margin > 0.0 {
                positive += 1;
            }
        }
        assert!(positive >= 99, "only {positive}/100 samples had positive margin");
    }
}
