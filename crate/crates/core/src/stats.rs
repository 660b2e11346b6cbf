//! Counting formulas, probability bounds, and the Monte Carlo harness that
//! checks them, plus the exhaustive MinRank solver used as an independent
//! oracle at toy scale.
//!
//! Bound evaluations and verdicts run in exact rational arithmetic; floats
//! appear only in reported estimates and in the chi-square p-values.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::canonical::{reduce_r, ReduceOutcome, Reduction};
use crate::gf::Fe;
use crate::keygen::{
    generator, KeygenError, MinRankInstance, Params, SecretKey, Variant, Witness,
};
use crate::matgf::{KOutcome, MatError, MatGF};
use crate::prg::{PrgStream, Seed};

#[derive(Debug, thiserror::Error)]
pub enum StatsError {
    #[error("input must be positive")]
    NonPositiveInput,
    #[error("invalid rank {r} for {m}x{n}")]
    InvalidRank { r: usize, m: usize, n: usize },
    #[error("instance too large for exhaustive search (q^k > 2^24)")]
    TooLarge,
    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),
    #[error("invalid parameters for kind: {0}")]
    InvalidKindParams(String),
    #[error(transparent)]
    Keygen(#[from] KeygenError),
    #[error(transparent)]
    Mat(#[from] MatError),
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// tau(x) = min(0.72, 2.1 x), exactly min(18/25, 21x/10).
pub fn tau(x: &BigRational) -> Result<BigRational, StatsError> {
    if x <= &BigRational::zero() {
        return Err(StatsError::NonPositiveInput);
    }
    let cap = ratio(18, 25);
    let lin = ratio(21, 10) * x;
    Ok(if lin < cap { lin } else { cap })
}

/// tau(q^-s) as an exact rational.
pub fn tau_q_pow(q: u32, s: u32) -> BigRational {
    let x = BigRational::new(BigInt::one(), BigInt::from(q).pow(s));
    tau(&x).expect("q^-s > 0")
}

/// Number of m x n matrices of rank r over GF(q):
/// prod_{i=0}^{r-1} (q^m - q^i)(q^n - q^i) / (q^r - q^i).
pub fn rank_count(q: u32, m: usize, n: usize, r: usize) -> Result<BigInt, StatsError> {
    if r > m.min(n) {
        return Err(StatsError::InvalidRank { r, m, n });
    }
    let q = BigInt::from(q);
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..r {
        let qi = q.pow(i as u32);
        num *= q.pow(m as u32) - &qi;
        num *= q.pow(n as u32) - &qi;
        den *= q.pow(r as u32) - &qi;
    }
    Ok(num / den)
}

/// prod_{j=s}^{s+terms-1} (1 - q^-j), exactly.
pub fn truncated_tail_product(q: u32, s: u32, terms: u32) -> BigRational {
    let q = BigInt::from(q);
    let mut acc = BigRational::one();
    for j in s..s + terms {
        acc *= BigRational::one() - BigRational::new(BigInt::one(), q.pow(j));
    }
    acc
}

/// The upper bound on the probability that a uniform s x t matrix is not of
/// full rank: tau(q^(-|s-t|-1)).
pub fn full_rank_failure_bound(q: u32, s: u32, t: u32) -> BigRational {
    tau_q_pow(q, s.abs_diff(t) + 1)
}

// ---------------------------------------------------------------------------
// trial reports

/// The result of a Monte Carlo run compared against a bound or significance
/// level. The verdict is computed in exact rationals.
#[derive(Debug, Clone)]
pub struct TrialReport {
    pub kind: String,
    pub trials: u64,
    pub successes: u64,
    pub estimate: f64,
    pub bound: f64,
    pub sigma: f64,
    pub verdict: bool,
}

impl TrialReport {
    /// One-sided lower-bound acceptance at 3 sigma: pass when
    /// estimate >= bound - 3 sigma, with sigma^2 = p(1-p)/n.
    fn lower_bound(kind: &str, trials: u64, successes: u64, bound: &BigRational) -> TrialReport {
        let est = BigRational::new(BigInt::from(successes), BigInt::from(trials));
        let sigma_sq = &est * (BigRational::one() - &est) / big(trials as i64);
        let verdict = if est >= *bound {
            true
        } else {
            let gap = bound - &est;
            &gap * &gap <= big(9) * &sigma_sq
        };
        TrialReport {
            kind: kind.to_string(),
            trials,
            successes,
            estimate: est.to_f64().unwrap_or(f64::NAN),
            bound: bound.to_f64().unwrap_or(f64::NAN),
            sigma: sigma_sq.to_f64().map(f64::sqrt).unwrap_or(f64::NAN),
            verdict,
        }
    }

    /// Chi-square acceptance: pass when the p-value exceeds the significance.
    fn chi_square(kind: &str, trials: u64, p_value: f64, significance: f64) -> TrialReport {
        TrialReport {
            kind: kind.to_string(),
            trials,
            successes: 0,
            estimate: p_value,
            bound: significance,
            sigma: 0.0,
            verdict: p_value > significance,
        }
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{:.6},{:.6},{:.6},{}",
            self.kind,
            self.trials,
            self.successes,
            self.estimate,
            self.bound,
            self.sigma,
            if self.verdict { "pass" } else { "fail" }
        )
    }

    pub fn human_line(&self) -> String {
        format!(
            "{:<24} trials={:<8} estimate={:<10.6} bound={:<10.6} sigma={:<9.6} {}",
            self.kind,
            self.trials,
            self.estimate,
            self.bound,
            self.sigma,
            if self.verdict { "PASS" } else { "FAIL" }
        )
    }

    pub const CSV_HEADER: &'static str = "kind,trials,successes,estimate,bound,sigma,verdict";
}

/// Goodness-of-fit chi-square against given cell probabilities; returns
/// (statistic, p-value).
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> (f64, f64) {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    for (&c, &p) in counts.iter().zip(probs.iter()) {
        let expected = n as f64 * p;
        let d = c as f64 - expected;
        stat += d * d / expected;
    }
    let df = (counts.len() - 1) as f64;
    let p_value = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    (stat, p_value)
}

/// Two-sample chi-square over a shared cell layout; returns (statistic,
/// p-value). Cells empty on both sides are dropped from the statistic.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> (f64, f64) {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let total = (na + nb) as f64;
    let mut stat = 0.0;
    let mut cells = 0usize;
    for (&ca, &cb) in a.iter().zip(b.iter()) {
        let col = (ca + cb) as f64;
        if col == 0.0 {
            continue;
        }
        cells += 1;
        let ea = col * na as f64 / total;
        let eb = col * nb as f64 / total;
        let da = ca as f64 - ea;
        let db = cb as f64 - eb;
        stat += da * da / ea + db * db / eb;
    }
    let df = (cells.max(2) - 1) as f64;
    let p_value = 1.0 - ChiSquared::new(df).unwrap().cdf(stat);
    (stat, p_value)
}

// ---------------------------------------------------------------------------
// lemma estimators

/// Which probability statement to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmaKind {
    /// Uniform s x t matrix has full rank.
    FullRank { s: usize, t: usize },
    /// Uniform s x s matrix is invertible.
    Invertible { s: usize },
    /// Uniform rank-r E has a full-column-rank right block.
    EInCalE,
    /// The recovered K is uniform (chi-square).
    KUniform,
    /// A uniform instance/solution pair reduces to canonical form.
    CanonicalReducible,
    /// I - X is invertible for uniform N_j and K.
    IXInvertible,
    /// A B is uniform for invertible A and uniform B (chi-square).
    ProductUniform { s: usize, t: usize },
    /// The full reduction pipeline over uniform instances succeeds.
    RSuccess,
}

impl LemmaKind {
    pub fn name(&self) -> &'static str {
        match self {
            LemmaKind::FullRank { .. } => "full_rank",
            LemmaKind::Invertible { .. } => "invertible",
            LemmaKind::EInCalE => "e_in_cal_e",
            LemmaKind::KUniform => "k_uniform",
            LemmaKind::CanonicalReducible => "canonical_reducible",
            LemmaKind::IXInvertible => "ix_invertible",
            LemmaKind::ProductUniform { .. } => "product_uniform",
            LemmaKind::RSuccess => "r_success",
        }
    }

    pub fn from_name(name: &str, s: usize, t: usize) -> Option<LemmaKind> {
        match name {
            "full_rank" => Some(LemmaKind::FullRank { s, t }),
            "invertible" => Some(LemmaKind::Invertible { s }),
            "e_in_cal_e" => Some(LemmaKind::EInCalE),
            "k_uniform" => Some(LemmaKind::KUniform),
            "canonical_reducible" => Some(LemmaKind::CanonicalReducible),
            "ix_invertible" => Some(LemmaKind::IXInvertible),
            "product_uniform" => Some(LemmaKind::ProductUniform { s, t }),
            "r_success" => Some(LemmaKind::RSuccess),
            _ => None,
        }
    }
}

/// Derives a deterministic per-trial stream from (master_seed, tag, index),
/// so results depend only on the master seed and trial count.
pub fn trial_stream(master_seed: u64, tag: &[u8], index: u64) -> PrgStream {
    let mut bytes = [0u8; 16];
    bytes[..8].copy_from_slice(&master_seed.to_le_bytes());
    let seed = Seed::from_bytes(&bytes);
    let mut full_tag = tag.to_vec();
    full_tag.extend_from_slice(&index.to_le_bytes());
    PrgStream::init(&seed, &full_tag)
}

/// A uniform instance/witness pair as produced by the classic generator,
/// drawn from an explicit stream (used by the lemma estimators, which need
/// the raw ingredients rather than the key wrapping).
fn uniform_pair(prg: &mut PrgStream, p: &Params) -> Result<(MinRankInstance, Witness), StatsError> {
    let family: Vec<MatGF> = (0..p.k).map(|_| prg.next_matrix(p.m, p.n, &p.field)).collect();
    let alpha: Vec<Fe> = (0..p.k).map(|_| prg.next_fe(&p.field)).collect();
    let e = MatGF::sample_rank_r(prg, p.m, p.n, p.r, &p.field)?.e;
    let mut m0 = e.clone();
    for (i, &a) in alpha.iter().enumerate() {
        if a != 0 {
            m0 = m0.sub(&family[i].scale(a))?;
        }
    }
    let mut matrices = vec![m0];
    matrices.extend(family);
    Ok((
        MinRankInstance { matrices, params: p.clone() },
        Witness { alpha, e, k_mat: None },
    ))
}

/// Runs `trials` independent trials of the given lemma estimator and compares
/// the empirical frequency against the lemma's bound (one-sided, 3 sigma), or
/// runs a chi-square uniformity test at significance 1e-3 for the
/// distributional kinds. Deterministic given (master_seed, trials).
pub fn estimate_lemma(
    kind: LemmaKind,
    p: &Params,
    trials: u64,
    master_seed: u64,
) -> Result<TrialReport, StatsError> {
    if trials < 1000 {
        return Err(StatsError::InvalidKindParams("need at least 1000 trials".into()));
    }
    let q = p.q;
    let tag = kind.name().as_bytes();
    match kind {
        LemmaKind::FullRank { s, t } => {
            if s == 0 || t == 0 {
                return Err(StatsError::InvalidKindParams("s, t >= 1".into()));
            }
            let mut ok = 0u64;
            for i in 0..trials {
                let mut prg = trial_stream(master_seed, tag, i);
                let a = prg.next_matrix(s, t, &p.field);
                if a.rank() == s.min(t) {
                    ok += 1;
                }
            }
            let bound = BigRational::one() - full_rank_failure_bound(q, s as u32, t as u32);
            Ok(TrialReport::lower_bound(kind.name(), trials, ok, &bound))
        }
        LemmaKind::Invertible { s } => {
            let mut ok = 0u64;
            for i in 0..trials {
                let mut prg = trial_stream(master_seed, tag, i);
                let a = prg.next_matrix(s, s, &p.field);
                if a.rank() == s {
                    ok += 1;
                }
            }
            let bound = BigRational::one() - tau_q_pow(q, 1);
            Ok(TrialReport::lower_bound(kind.name(), trials, ok, &bound))
        }
        LemmaKind::EInCalE => {
            let mut ok = 0u64;
            for i in 0..trials {
                let mut prg = trial_stream(master_seed, tag, i);
                let e = MatGF::sample_rank_r(&mut prg, p.m, p.n, p.r, &p.field)?.e;
                if matches!(e.solve_k_matrix(p.r)?, KOutcome::Unique(_)) {
                    ok += 1;
                }
            }
            let bound = BigRational::one() - tau_q_pow(q, 1);
            Ok(TrialReport::lower_bound(kind.name(), trials, ok, &bound))
        }
        LemmaKind::KUniform => {
            // bin the whole K when the cell count stays small, else its
            // first entry
            let dim = p.r * (p.n - p.r);
            let full_cells = (q as u64).checked_pow(dim as u32).filter(|&c| c <= 256);
            let cells = full_cells.unwrap_or(q as u64) as usize;
            let mut counts = vec![0u64; cells];
            let mut got = 0u64;
            let mut i = 0u64;
            while got < trials {
                let mut prg = trial_stream(master_seed, tag, i);
                i += 1;
                if i > trials * 20 {
                    return Err(StatsError::InsufficientSamples(
                        "conditioning on E in the solvable set rejects too often".into(),
                    ));
                }
                let e = MatGF::sample_rank_r(&mut prg, p.m, p.n, p.r, &p.field)?.e;
                let KOutcome::Unique(k_mat) = e.solve_k_matrix(p.r)? else {
                    continue;
                };
                got += 1;
                let cell = if full_cells.is_some() {
                    k_mat
                        .vectorize()
                        .iter()
                        .fold(0u64, |acc, &x| acc * q as u64 + x as u64)
                } else {
                    k_mat.get(0, 0) as u64
                };
                counts[cell as usize] += 1;
            }
            let probs = vec![1.0 / cells as f64; cells];
            let (_, p_value) = chi_square_gof(&counts, &probs);
            Ok(TrialReport::chi_square(kind.name(), trials, p_value, 1e-3))
        }
        LemmaKind::CanonicalReducible => {
            let mut ok = 0u64;
            for i in 0..trials {
                let mut prg = trial_stream(master_seed, tag, i);
                let (inst, _) = uniform_pair(&mut prg, p)?;
                if matches!(crate::canonical::to_canonical(&inst)?, Reduction::Reduced(_)) {
                    ok += 1;
                }
            }
            let bound = BigRational::one() - tau_q_pow(q, 1);
            Ok(TrialReport::lower_bound(kind.name(), trials, ok, &bound))
        }
        LemmaKind::IXInvertible => {
            let mut ok = 0u64;
            for i in 0..trials {
                let mut prg = trial_stream(master_seed, tag, i);
                let k_mat = prg.next_matrix(p.r, p.n - p.r, &p.field);
                let mut ix = MatGF::identity(p.k, &p.field);
                for j in 0..p.k {
                    let nj = prg.next_matrix(p.m, p.r, &p.field);
                    let pv = nj.mul(&k_mat)?.vectorize();
                    for row in 0..p.k {
                        let cur = ix.get(row, j);
                        ix.set(row, j, crate::gf::fe_sub(cur, pv[row], &p.field));
                    }
                }
                if ix.rank() == p.k {
                    ok += 1;
                }
            }
            let one_minus_tau = BigRational::one() - tau_q_pow(q, 1);
            let bound = &one_minus_tau * &one_minus_tau;
            Ok(TrialReport::lower_bound(kind.name(), trials, ok, &bound))
        }
        LemmaKind::ProductUniform { s, t } => {
            let cells = (q as u64)
                .checked_pow((s * t) as u32)
                .filter(|&c| c <= 4096)
                .ok_or_else(|| {
                    StatsError::InvalidKindParams("q^(s t) too large to bin".into())
                })? as usize;
            let mut counts = vec![0u64; cells];
            for i in 0..trials {
                let mut prg = trial_stream(master_seed, tag, i);
                let a = MatGF::sample_invertible(&mut prg, s, &p.field)?;
                let b = prg.next_matrix(s, t, &p.field);
                let ab = a.mul(&b)?;
                let cell = ab
                    .vectorize()
                    .iter()
                    .fold(0u64, |acc, &x| acc * q as u64 + x as u64);
                counts[cell as usize] += 1;
            }
            let probs = vec![1.0 / cells as f64; cells];
            let (_, p_value) = chi_square_gof(&counts, &probs);
            Ok(TrialReport::chi_square(kind.name(), trials, p_value, 1e-3))
        }
        LemmaKind::RSuccess => {
            let mut ok = 0u64;
            for i in 0..trials {
                let mut prg = trial_stream(master_seed, tag, i);
                let (inst, wit) = uniform_pair(&mut prg, p)?;
                if matches!(reduce_r(&inst, &wit)?, ReduceOutcome::Success { .. }) {
                    ok += 1;
                }
            }
            let one_minus_tau = BigRational::one() - tau_q_pow(q, 1);
            let mut bound = BigRational::one();
            for _ in 0..4 {
                bound *= &one_minus_tau;
            }
            Ok(TrialReport::lower_bound(kind.name(), trials, ok, &bound))
        }
    }
}

/// Per-stage abort frequencies of the reduction pipeline, each compared
/// against its bound: tau(1/q), tau(1/q), and 1 - (1 - tau(1/q))^2.
pub fn abort_stage_reports(
    p: &Params,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<TrialReport>, StatsError> {
    use crate::canonical::AbortStage;
    let mut counts = [0u64; 3];
    for i in 0..trials {
        let mut prg = trial_stream(master_seed, b"abort_stages", i);
        let (inst, wit) = uniform_pair(&mut prg, p)?;
        match reduce_r(&inst, &wit)? {
            ReduceOutcome::Success { .. } => {}
            ReduceOutcome::Abort(AbortStage::EnotInCalE) => counts[0] += 1,
            ReduceOutcome::Abort(AbortStage::NotReducible) => counts[1] += 1,
            ReduceOutcome::Abort(AbortStage::IXSingular) => counts[2] += 1,
        }
    }
    let tau1 = tau_q_pow(p.q, 1);
    let one_minus = BigRational::one() - &tau1;
    let ix_bound = BigRational::one() - &one_minus * &one_minus;
    let names = ["abort_e_not_in_cal_e", "abort_not_reducible", "abort_ix_singular"];
    let bounds = [tau1.clone(), tau1, ix_bound];
    Ok(names
        .iter()
        .zip(counts.iter().zip(bounds.iter()))
        .map(|(name, (&c, bound))| {
            // upper-bound claim: frequency of aborts stays below the bound;
            // flip it into the lower-bound form on the complement
            let complement = BigRational::one() - bound;
            TrialReport::lower_bound(name, trials, trials - c, &complement)
        })
        .collect())
}

// ---------------------------------------------------------------------------
// exhaustive oracle

/// Exhaustively enumerates all alpha in GF(q)^k and returns every solution
/// with rank(M_0 + sum alpha_i M_i) <= r. Toy scale only (q^k <= 2^24).
pub fn brute_solve_minrank(inst: &MinRankInstance) -> Result<Vec<(Vec<Fe>, usize)>, StatsError> {
    let p = &inst.params;
    let total = (p.q as u64).checked_pow(p.k as u32).ok_or(StatsError::TooLarge)?;
    if total > 1 << 24 {
        return Err(StatsError::TooLarge);
    }
    let mut out = Vec::new();
    let mut alpha = vec![0 as Fe; p.k];
    for idx in 0..total {
        let mut x = idx;
        for a in alpha.iter_mut() {
            *a = (x % p.q as u64) as Fe;
            x /= p.q as u64;
        }
        let rank = inst.eval(&alpha)?.rank();
        if rank <= p.r {
            out.push((alpha.clone(), rank));
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// distribution equality between the reduction pipeline and KeyGen3

/// A canonical instance together with its solution and K, the common output
/// shape of the reduction pipeline and KeyGen3 decompression.
pub struct CanonSample {
    pub instance: MinRankInstance,
    pub alpha: Vec<Fe>,
    pub k_mat: MatGF,
}

/// Low-dimensional projections compared between two sample sources.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Projection {
    /// The entry <M_0>_{k+1} (the first entry not forced to zero).
    M0EntryKPlus1,
    /// The pair (<M_1>_{k+1}, <M_0^R>_1).
    PairM1M0Right,
    /// The first solution coordinate.
    Alpha1,
    /// The top-left entry of K.
    K11,
}

impl Projection {
    pub fn all() -> [Projection; 4] {
        [
            Projection::M0EntryKPlus1,
            Projection::PairM1M0Right,
            Projection::Alpha1,
            Projection::K11,
        ]
    }

    pub fn name(&self) -> &'static str {
        match self {
            Projection::M0EntryKPlus1 => "m0_entry_k_plus_1",
            Projection::PairM1M0Right => "pair_m1_m0r",
            Projection::Alpha1 => "alpha_1",
            Projection::K11 => "k_11",
        }
    }

    pub fn cells(&self, q: u32) -> usize {
        match self {
            Projection::PairM1M0Right => (q * q) as usize,
            _ => q as usize,
        }
    }

    pub fn project(&self, sample: &CanonSample) -> Result<usize, StatsError> {
        let p = &sample.instance.params;
        let q = p.q as usize;
        Ok(match self {
            Projection::M0EntryKPlus1 => {
                sample.instance.matrices[0].vec_entry(p.k + 1)? as usize
            }
            Projection::PairM1M0Right => {
                let a = sample.instance.matrices[1].vec_entry(p.k + 1)? as usize;
                let (_, m0r) = sample.instance.matrices[0].split_lr(p.r)?;
                let b = m0r.vec_entry(1)? as usize;
                a * q + b
            }
            Projection::Alpha1 => sample.alpha[0] as usize,
            Projection::K11 => sample.k_mat.get(0, 0) as usize,
        })
    }
}

/// Per-projection outcome of [`distribution_projection_test`].
pub struct ProjectionReport {
    pub per_projection: Vec<(&'static str, f64)>,
    pub report: TrialReport,
}

/// Draws `trials` successful samples from each generator (a generator may
/// return None for a failed attempt) and compares every projection with a
/// two-sample chi-square at significance 1e-3. Passes when no projection
/// rejects.
pub fn distribution_projection_test<'a>(
    gen_a: &'a mut dyn FnMut(u64) -> Result<Option<CanonSample>, StatsError>,
    gen_b: &'a mut dyn FnMut(u64) -> Result<Option<CanonSample>, StatsError>,
    projections: &[Projection],
    trials: u64,
    q: u32,
) -> Result<ProjectionReport, StatsError> {
    let mut counts_a: Vec<Vec<u64>> = projections.iter().map(|p| vec![0; p.cells(q)]).collect();
    let mut counts_b: Vec<Vec<u64>> = projections.iter().map(|p| vec![0; p.cells(q)]).collect();

    for (gen, counts) in [(gen_a, &mut counts_a), (gen_b, &mut counts_b)] {
        let mut got = 0u64;
        let mut i = 0u64;
        while got < trials {
            if i >= trials.saturating_mul(50) {
                break;
            }
            let sample = gen(i)?;
            i += 1;
            let Some(sample) = sample else { continue };
            got += 1;
            for (proj, c) in projections.iter().zip(counts.iter_mut()) {
                c[proj.project(&sample)?] += 1;
            }
        }
        if got < 100 {
            return Err(StatsError::InsufficientSamples(format!(
                "only {got} successes"
            )));
        }
    }

    let mut per = Vec::new();
    let mut all_pass = true;
    let mut min_p = 1.0f64;
    for (idx, proj) in projections.iter().enumerate() {
        let (_, p_value) = chi_square_two_sample(&counts_a[idx], &counts_b[idx]);
        if p_value <= 1e-3 {
            all_pass = false;
        }
        min_p = min_p.min(p_value);
        per.push((proj.name(), p_value));
    }
    let mut report = TrialReport::chi_square("distribution_projection", trials, min_p, 1e-3);
    report.verdict = all_pass;
    Ok(ProjectionReport { per_projection: per, report })
}

/// Sample generator backed by KeyGen3: generate, then decompress the secret
/// key. Always succeeds (the retry loop is internal).
pub fn keygen3_sampler(p: &Params, master_seed: u64) -> impl FnMut(u64) -> Result<Option<CanonSample>, StatsError> + '_ {
    move |i| {
        let mut stream = trial_stream(master_seed, b"kg3_sample", i);
        let root = stream.next_seed(p.lambda);
        let (_, sk) = generator(Variant::V3).generate(&root, p)?;
        let (inst, wit) = generator(Variant::V3).decompress_sk(&sk, p)?;
        Ok(Some(CanonSample {
            instance: inst,
            alpha: wit.alpha,
            k_mat: wit.k_mat.expect("variant 3 witness carries K"),
        }))
    }
}

/// Sample generator backed by the reduction pipeline over uniform instances;
/// returns None when the reduction aborts.
pub fn reduce_r_sampler(p: &Params, master_seed: u64) -> impl FnMut(u64) -> Result<Option<CanonSample>, StatsError> + '_ {
    move |i| {
        let mut prg = trial_stream(master_seed, b"reduce_sample", i);
        let (inst, wit) = uniform_pair(&mut prg, p)?;
        match reduce_r(&inst, &wit)? {
            ReduceOutcome::Success { instance, alpha, k_mat } => Ok(Some(CanonSample {
                instance,
                alpha,
                k_mat,
            })),
            ReduceOutcome::Abort(_) => Ok(None),
        }
    }
}

/// Deliberately biased control: KeyGen3 samples with the first solution
/// coordinate forced to zero, used to confirm the projection test has power.
pub fn biased_alpha_sampler(p: &Params, master_seed: u64) -> impl FnMut(u64) -> Result<Option<CanonSample>, StatsError> + '_ {
    let mut inner = keygen3_sampler(p, master_seed);
    move |i| {
        let Some(mut sample) = inner(i)? else { return Ok(None) };
        sample.alpha[0] = 0;
        Ok(Some(sample))
    }
}

/// Root-seed helper used by harness code that wants keygen over derived
/// seeds.
pub fn derived_root(p: &Params, master_seed: u64, tag: &[u8], i: u64) -> Seed {
    let mut stream = trial_stream(master_seed, tag, i);
    stream.next_seed(p.lambda)
}

/// Decompressed uniform keypair, for harness code exercising the public API.
pub fn keygen1_pair(p: &Params, root: &Seed) -> Result<(MinRankInstance, Witness), StatsError> {
    let sk = SecretKey::Root { variant: Variant::V1, root: root.clone() };
    Ok(generator(Variant::V1).decompress_sk(&sk, p)?)
}
