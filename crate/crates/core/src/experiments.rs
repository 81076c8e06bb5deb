//! Batch experiment runner: the dimension-scan gap study, theorem
//! verification suites, summary statistics and CSV emission.
//!
//! Every sample gets its own derived seed, so output is byte-identical for
//! a fixed (dims, samples, seed, config) regardless of thread scheduling.

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::channels::{self, PhaseVector};
use crate::error::{CoherenceError, Result};
use crate::linalg::CMat;
use crate::measures::{self, CfConfig, SdpConfig};
use crate::seeding;
use crate::states::{self, DensityMatrix};
use num_complex::Complex64;

/// One sample of the gap experiment.
#[derive(Debug, Clone)]
pub struct SimulationRecord {
    pub dim: usize,
    pub sample_index: usize,
    pub cf: f64,
    pub cr_bar: f64,
    pub cl1_bar: f64,
    /// `(cr_bar - cf)/cr_bar`
    pub gap: f64,
    pub seed: u64,
    /// Short failure code; empty on success.
    pub error: String,
}

/// Per-dimension statistics over a batch of records.
#[derive(Debug, Clone)]
pub struct GapSummary {
    pub dim: usize,
    pub n: usize,
    pub max_gap: f64,
    pub mean_gap: f64,
    /// Records with gap < -1e-6; must be 0 in a passing run.
    pub negative_count: usize,
}

/// Maximum tolerated fraction of failed samples before the run itself fails.
pub const MAX_FAILURE_FRACTION: f64 = 0.001;

/// Runs the gap study: for each (dim, sample) draw a Hilbert-Schmidt random
/// state and record `C_F`, the normalized robustness and l1 measures, and
/// the relative gap. Per-sample failures are recorded, not fatal, unless
/// they exceed [`MAX_FAILURE_FRACTION`] of the run.
pub fn run_gap_simulation(
    dims: &[usize],
    samples_per_dim: usize,
    seed: u64,
    cf_config: &CfConfig,
    sdp_config: &SdpConfig,
) -> Result<Vec<SimulationRecord>> {
    if samples_per_dim == 0 {
        return Err(CoherenceError::InvalidParameter("samples must be >= 1".into()));
    }
    for &d in dims {
        if !(2..=16).contains(&d) {
            return Err(CoherenceError::InvalidParameter(format!(
                "dims must lie in 2..=16, got {d}"
            )));
        }
    }
    let tasks: Vec<(usize, usize)> = dims
        .iter()
        .flat_map(|&d| (0..samples_per_dim).map(move |i| (d, i)))
        .collect();

    let mut records: Vec<SimulationRecord> = tasks
        .par_iter()
        .map(|&(dim, sample_index)| {
            let sample_seed = seeding::derive_seed(seed, dim as u64, sample_index as u64);
            let mut cf_cfg = cf_config.clone();
            cf_cfg.seed = seeding::derive_seed(sample_seed, 0xc0f, 0);
            match run_one(dim, sample_seed, &cf_cfg, sdp_config) {
                Ok((cf, cr_bar, cl1_bar)) => SimulationRecord {
                    dim,
                    sample_index,
                    cf,
                    cr_bar,
                    cl1_bar,
                    gap: (cr_bar - cf) / cr_bar,
                    seed: sample_seed,
                    error: String::new(),
                },
                Err(e) => SimulationRecord {
                    dim,
                    sample_index,
                    cf: f64::NAN,
                    cr_bar: f64::NAN,
                    cl1_bar: f64::NAN,
                    gap: f64::NAN,
                    seed: sample_seed,
                    error: error_code(&e),
                },
            }
        })
        .collect();
    records.sort_by_key(|r| (r.dim, r.sample_index));

    let failures = records.iter().filter(|r| !r.error.is_empty()).count();
    if failures as f64 > MAX_FAILURE_FRACTION * records.len() as f64 {
        return Err(CoherenceError::InvalidParameter(format!(
            "{failures}/{} samples failed",
            records.len()
        )));
    }
    Ok(records)
}

fn run_one(
    dim: usize,
    sample_seed: u64,
    cf_config: &CfConfig,
    sdp_config: &SdpConfig,
) -> Result<(f64, f64, f64)> {
    let rho = states::random_density(dim, sample_seed)?;
    let nm = measures::normalized_measures(&rho, cf_config, sdp_config)?;
    Ok((nm.cf, nm.cr_bar, nm.cl1_bar))
}

fn error_code(e: &CoherenceError) -> String {
    match e {
        CoherenceError::SolverNonConvergence { .. } => "sdp_nonconvergence".into(),
        _ => "numerical_failure".into(),
    }
}

/// Per-dimension max/mean gaps and negative-gap counts.
pub fn summarize(records: &[SimulationRecord]) -> Vec<GapSummary> {
    let mut dims: Vec<usize> = records.iter().map(|r| r.dim).collect();
    dims.sort_unstable();
    dims.dedup();
    dims.iter()
        .map(|&dim| {
            let gaps: Vec<f64> = records
                .iter()
                .filter(|r| r.dim == dim && r.error.is_empty())
                .map(|r| r.gap)
                .collect();
            let n = gaps.len();
            let max_gap = gaps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mean_gap = gaps.iter().sum::<f64>() / n as f64;
            let negative_count = gaps.iter().filter(|&&g| g < -1e-6).count();
            GapSummary {
                dim,
                n,
                max_gap,
                mean_gap,
                negative_count,
            }
        })
        .collect()
}

/// Formats a float with 12 significant digits, the fixed precision of all
/// batch output.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:.11e}")
    }
}

/// Writes records as CSV with the fixed header
/// `dim,sample_index,cf,cr_bar,cl1_bar,gap,error`.
pub fn write_csv<W: std::io::Write>(records: &[SimulationRecord], mut out: W) -> Result<()> {
    writeln!(out, "dim,sample_index,cf,cr_bar,cl1_bar,gap,error")?;
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            r.dim,
            r.sample_index,
            format_g12(r.cf),
            format_g12(r.cr_bar),
            format_g12(r.cl1_bar),
            format_g12(r.gap),
            r.error
        )?;
    }
    Ok(())
}

/// One named check inside a verification suite.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &str, max_deviation: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            max_deviation,
            tolerance,
            pass: max_deviation <= tolerance,
        }
    }
}

/// Outcome of a verification suite.
#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub name: String,
    pub samples: usize,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

impl VerificationReport {
    fn new(name: &str, samples: usize, checks: Vec<CheckResult>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        Self {
            name: name.into(),
            samples,
            checks,
            pass,
        }
    }
}

/// A random state satisfying the phase-alignability hypothesis: an
/// entrywise-nonnegative Gram state conjugated by a random diagonal unitary.
pub fn random_alignable_state(d: usize, seed: u64) -> Result<DensityMatrix> {
    let mut rng = seeding::rng_from_seed(seed);
    let g = CMat::from_fn(d, d, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        Complex64::new(x.abs(), 0.0)
    });
    let gram = &g * g.adjoint();
    let trace = gram.trace().re;
    let nonneg = DensityMatrix::new(gram / Complex64::new(trace, 0.0))?;
    let free: Vec<f64> = (1..d)
        .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
        .collect();
    channels::phase_unitary_conjugate(&PhaseVector::from_free(&free), &nonneg)
}

/// Checks the triple equality `C_F = C_R_bar = C_l1_bar` on phase-alignable
/// states of dimension `d`.
pub fn verify_theorem1(
    samples: usize,
    d: usize,
    seed: u64,
    cf_config: &CfConfig,
    sdp_config: &SdpConfig,
) -> Result<VerificationReport> {
    let deviations: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let sample_seed = seeding::derive_seed(seed, d as u64, i as u64);
            let rho = random_alignable_state(d, sample_seed)?;
            let mut cf_cfg = cf_config.clone();
            cf_cfg.seed = seeding::derive_seed(sample_seed, 0xc0f, 0);
            let nm = measures::normalized_measures(&rho, &cf_cfg, sdp_config)?;
            Ok((nm.cf - nm.cr_bar)
                .abs()
                .max((nm.cf - nm.cl1_bar).abs())
                .max((nm.cr_bar - nm.cl1_bar).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(VerificationReport::new(
        "theorem1",
        samples,
        vec![CheckResult::new("triple_equality", max_deviation, 1e-6)],
    ))
}

/// Checks `C_F = C_R_bar` on random qutrits.
pub fn verify_theorem3(
    samples: usize,
    seed: u64,
    cf_config: &CfConfig,
    sdp_config: &SdpConfig,
) -> Result<VerificationReport> {
    let deviations: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let sample_seed = seeding::derive_seed(seed, 3, i as u64);
            let rho = states::random_density(3, sample_seed)?;
            let mut cf_cfg = cf_config.clone();
            cf_cfg.seed = seeding::derive_seed(sample_seed, 0xc0f, 0);
            let nm = measures::normalized_measures(&rho, &cf_cfg, sdp_config)?;
            Ok((nm.cf - nm.cr_bar).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    Ok(VerificationReport::new(
        "theorem3",
        samples,
        vec![CheckResult::new("cf_equals_cr_bar", max_deviation, 1e-6)],
    ))
}

/// Property suite: C_F bounds, convexity, the `d C_F <= 2^mu_d` inequality
/// and the MCMS coherence-number bracket.
pub fn verify_bounds(
    samples: usize,
    seed: u64,
    cf_config: &CfConfig,
) -> Result<VerificationReport> {
    let dims = [2usize, 3, 4, 5, 6];

    // (ii) 1/d <= C_F <= lambda_max
    let bound_devs: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<(f64, f64)> {
            let d = dims[i % dims.len()];
            let sample_seed = seeding::derive_seed(seed, d as u64, i as u64);
            let rho = states::random_density(d, sample_seed)?;
            let mut cf_cfg = cf_config.clone();
            cf_cfg.seed = seeding::derive_seed(sample_seed, 0xc0f, 0);
            let cf = measures::coherence_fraction(&rho, &cf_cfg)?.value;
            let lower = 1.0 / d as f64 - cf;
            let upper = cf - rho.max_eigenvalue()?;
            Ok((lower, upper))
        })
        .collect::<Result<Vec<_>>>()?;
    let lower_dev = bound_devs.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    let upper_dev = bound_devs.iter().map(|v| v.1).fold(f64::NEG_INFINITY, f64::max);

    // (i) convexity sampling on random pairs and mixing weights
    let convexity_dev: f64 = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let d = dims[i % dims.len()];
            let s1 = seeding::derive_seed(seed, d as u64, 2 * i as u64 + 1_000_000);
            let s2 = seeding::derive_seed(seed, d as u64, 2 * i as u64 + 1_000_001);
            let rho1 = states::random_density(d, s1)?;
            let rho2 = states::random_density(d, s2)?;
            let p = 0.1 + 0.8 * ((i % 9) as f64 / 8.0);
            let mix = DensityMatrix::new(
                rho1.matrix() * Complex64::new(p, 0.0)
                    + rho2.matrix() * Complex64::new(1.0 - p, 0.0),
            )?;
            let mut cf_cfg = cf_config.clone();
            cf_cfg.seed = seeding::derive_seed(s1, 0xc0f, 0);
            let cf_mix = measures::coherence_fraction(&mix, &cf_cfg)?.value;
            let cf_1 = measures::coherence_fraction(&rho1, &cf_cfg)?.value;
            let cf_2 = measures::coherence_fraction(&rho2, &cf_cfg)?.value;
            Ok(cf_mix - (p * cf_1 + (1.0 - p) * cf_2))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);

    // (iv) d C_F <= 2^mu_d
    let mu_dev: f64 = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<f64> {
            let d = dims[i % dims.len()];
            let sample_seed = seeding::derive_seed(seed, d as u64, i as u64 + 3_000_000);
            let rho = states::random_density(d, sample_seed)?;
            let mut cf_cfg = cf_config.clone();
            cf_cfg.seed = seeding::derive_seed(sample_seed, 0xc0f, 0);
            let cf = measures::coherence_fraction(&rho, &cf_cfg)?.value;
            let mu = measures::mu_d(&rho)?;
            Ok(d as f64 * cf - 2.0f64.powf(mu))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max);

    // (iii) MCMS bracket (k-1)/d < C_F(rho_m) <= k/d
    let mut mcms_dev = f64::NEG_INFINITY;
    for i in 0..samples {
        let d = dims[i % dims.len()];
        let mut rng = seeding::rng_from_seed(seeding::derive_seed(seed, d as u64, i as u64 + 4_000_000));
        let p: f64 = rng.gen();
        let rho = states::mcms_state(crate::states::McmsParams::new(d, p)?)?;
        let mut cf_cfg = cf_config.clone();
        cf_cfg.seed = i as u64;
        let cf = measures::coherence_fraction(&rho, &cf_cfg)?.value;
        let k = measures::mcms_coherence_number(d, p)? as f64;
        let upper = cf - k / d as f64;
        let lower = (k - 1.0) / d as f64 - cf;
        mcms_dev = mcms_dev.max(upper).max(lower);
    }

    Ok(VerificationReport::new(
        "bounds",
        samples,
        vec![
            CheckResult::new("cf_lower_bound_1_over_d", lower_dev, 1e-10),
            CheckResult::new("cf_upper_bound_lambda_max", upper_dev, 1e-9),
            CheckResult::new("convexity", convexity_dev, 1e-6),
            CheckResult::new("mu_d_bound", mu_dev, 1e-8),
            CheckResult::new("mcms_coherence_number_bracket", mcms_dev, 1e-9),
        ],
    ))
}

/// Analytic gradient versus central finite differences (h = 1e-6) on random
/// (state, phase) pairs for d = 2..6.
pub fn verify_gradient(
    samples_per_dim: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let h = 1e-6;
    let mut max_deviation = 0.0f64;
    let mut total = 0usize;
    for d in 2..=6usize {
        for i in 0..samples_per_dim {
            let sample_seed = seeding::derive_seed(seed, d as u64, i as u64);
            let rho = states::random_density(d, sample_seed)?;
            let mut rng = seeding::rng_from_seed(seeding::derive_seed(sample_seed, 0xfd, 0));
            let free: Vec<f64> = (1..d)
                .map(|_| rng.gen::<f64>() * 2.0 * std::f64::consts::PI)
                .collect();
            let theta = PhaseVector::from_free(&free);
            let grad = measures::cf_gradient(&rho, &theta)?;
            for k in 0..d - 1 {
                let mut up = free.clone();
                up[k] += h;
                let mut down = free.clone();
                down[k] -= h;
                let fd = (measures::cf_objective(&rho, &PhaseVector::from_free(&up))?
                    - measures::cf_objective(&rho, &PhaseVector::from_free(&down))?)
                    / (2.0 * h);
                max_deviation = max_deviation.max((grad[k] - fd).abs());
            }
            total += 1;
        }
    }
    Ok(VerificationReport::new(
        "gradient",
        total,
        vec![CheckResult::new("central_difference_agreement", max_deviation, 1e-6)],
    ))
}

/// SDP optimality certificate checks on random states of dimension <= 6:
/// duality gap, primal feasibility, dual feasibility and dual attainment.
pub fn verify_sdp_certificate(
    samples: usize,
    seed: u64,
    sdp_config: &SdpConfig,
) -> Result<VerificationReport> {
    let dims = [2usize, 3, 4, 5, 6];
    struct Devs {
        gap: f64,
        gap_negative: f64,
        primal: f64,
        dual_diag: f64,
        dual_psd: f64,
        attainment: f64,
    }
    let devs: Vec<Devs> = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<Devs> {
            let d = dims[i % dims.len()];
            let sample_seed = seeding::derive_seed(seed, d as u64, i as u64);
            let rho = states::random_density(d, sample_seed)?;
            let report = measures::robustness(&rho, sdp_config)?;

            let slack = CMat::from_fn(d, d, |a, b| {
                let base = -rho.entry(a, b);
                if a == b {
                    base + Complex64::new(report.sigma_diag[a], 0.0)
                } else {
                    base
                }
            });
            let primal = -crate::linalg::eigh(&slack)?.min_eigenvalue();

            let tau = report.tau.matrix();
            let mut dual_diag = 0.0f64;
            for a in 0..d {
                dual_diag = dual_diag.max((tau[(a, a)] - Complex64::new(1.0, 0.0)).norm());
            }
            let dual_psd = -crate::linalg::eigh(tau)?.min_eigenvalue();

            // <phi+| (tau^T o rho) |phi+> should attain C_R_bar
            let product = crate::linalg::schur_product(&tau.transpose(), rho.matrix())?;
            let overlap = product.iter().sum::<Complex64>().re / d as f64;
            let attainment = (overlap - report.normalized).abs();

            Ok(Devs {
                gap: report.duality_gap,
                gap_negative: -report.duality_gap,
                primal,
                dual_diag,
                dual_psd,
                attainment,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let fold = |f: fn(&Devs) -> f64| devs.iter().map(f).fold(f64::NEG_INFINITY, f64::max);
    Ok(VerificationReport::new(
        "sdp-certificate",
        samples,
        vec![
            CheckResult::new("duality_gap", fold(|d| d.gap), 1e-6),
            CheckResult::new("duality_gap_nonnegative", fold(|d| d.gap_negative), 1e-9),
            CheckResult::new("primal_feasibility", fold(|d| d.primal), 1e-8),
            CheckResult::new("dual_unit_diagonal", fold(|d| d.dual_diag), 1e-7),
            CheckResult::new("dual_psd", fold(|d| d.dual_psd), 1e-7),
            CheckResult::new("dual_attainment", fold(|d| d.attainment), 1e-5),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summarize_cases() {
        let make = |dim, idx, gap| SimulationRecord {
            dim,
            sample_index: idx,
            cf: 0.5,
            cr_bar: 0.5,
            cl1_bar: 0.5,
            gap,
            seed: 0,
            error: String::new(),
        };
        let single = summarize(&[make(3, 0, 0.0)]);
        assert_eq!(single[0].max_gap, 0.0);
        assert_eq!(single[0].mean_gap, 0.0);

        let two = summarize(&[make(4, 0, 0.01), make(4, 1, 0.03)]);
        assert!((two[0].max_gap - 0.03).abs() < 1e-15);
        assert!((two[0].mean_gap - 0.02).abs() < 1e-15);
        assert_eq!(two[0].negative_count, 0);

        let neg = summarize(&[make(4, 0, -1e-3)]);
        assert_eq!(neg[0].negative_count, 1);
    }

    #[test]
    fn csv_is_deterministic_and_has_exact_header() {
        let cf = CfConfig::default();
        let sdp = SdpConfig::default();
        let a = run_gap_simulation(&[2], 5, 1, &cf, &sdp).unwrap();
        let b = run_gap_simulation(&[2], 5, 1, &cf, &sdp).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_csv(&a, &mut buf_a).unwrap();
        write_csv(&b, &mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
        let text = String::from_utf8(buf_a).unwrap();
        assert!(text.starts_with("dim,sample_index,cf,cr_bar,cl1_bar,gap,error\n"));
    }

    #[test]
    fn qubit_run_has_no_gap() {
        let records =
            run_gap_simulation(&[2], 50, 7, &CfConfig::default(), &SdpConfig::default()).unwrap();
        for r in &records {
            assert!(r.gap.abs() <= 1e-7, "sample {} gap {}", r.sample_index, r.gap);
        }
    }

    #[test]
    fn invalid_dims_rejected() {
        let cf = CfConfig::default();
        let sdp = SdpConfig::default();
        assert!(run_gap_simulation(&[1], 5, 0, &cf, &sdp).is_err());
        assert!(run_gap_simulation(&[17], 5, 0, &cf, &sdp).is_err());
        assert!(run_gap_simulation(&[3], 0, 0, &cf, &sdp).is_err());
    }

    #[test]
    fn alignable_states_really_are_alignable() {
        for seed in 0..10 {
            let rho = random_alignable_state(4, seed).unwrap();
            assert!(channels::is_phase_alignable(&rho).is_some(), "seed={seed}");
        }
    }

    #[test]
    fn format_g12_has_12_significant_digits() {
        assert_eq!(format_g12(0.027), "2.70000000000e-2");
        assert_eq!(format_g12(1.0), "1.00000000000e0");
    }
}
