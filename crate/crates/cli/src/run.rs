//! Scenario execution. Each kind maps to calls into the core library and
//! a list of named verdicts.

use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Value};

use specbound_core::asymptotics::{self, kato_norm};
use specbound_core::channels::{self, RadialChannel};
use specbound_core::eigensolve::{self, classify_spurious, SpectralReport, SpuriousPolicy};
use specbound_core::fields::{self, poincare_gauge, PotentialSpec, SampleBox, ScalarFn};
use specbound_core::geometry::{self, Point};
use specbound_core::profiles::FieldProfile;
use specbound_core::threshold::{self, Provenance, ThresholdReport};
use specbound_core::virial::{self, Grid, GridState, Hamiltonian};

use crate::config::*;
use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
}

pub struct Outcome {
    pub outputs: Value,
    pub verdicts: Vec<Verdict>,
}

fn verdict(name: &str, pass: bool) -> Verdict {
    Verdict {
        name: name.to_string(),
        pass,
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

/// Runs `f` over `items`, concurrently with the `parallel` feature, in input order.
fn fan_out<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        items.par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        items.iter().map(f).collect()
    }
}

fn window(w: [f64; 2]) -> Result<(f64, f64), CliError> {
    if w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less) {
        return Err(CliError::Config(format!(
            "window [{}, {}] is empty",
            w[0], w[1]
        )));
    }
    Ok((w[0], w[1]))
}

pub fn run(config: &ScenarioConfig) -> Result<Outcome, CliError> {
    let num = &config.numerics;
    match &config.params {
        Parameters::Threshold(p) => run_threshold(p, num),
        Parameters::OptimizeSplit(p) => {
            let report = threshold::optimize_split(p.beta, p.omega1, p.omega2);
            let unsplit = threshold::compute_lambda(p.beta, p.omega1, p.omega2);
            Ok(Outcome {
                outputs: json!({ "threshold": to_value(&report), "unsplit_lambda": unsplit }),
                verdicts: vec![verdict(
                    "split_not_worse_than_unsplit",
                    report.lambda <= unsplit * (1.0 + 1e-12),
                )],
            })
        }
        Parameters::Pauli(p) => {
            let lp = threshold::pauli_threshold(p.beta, p.omega);
            let general = threshold::compute_lambda(p.beta, p.omega, p.omega);
            Ok(Outcome {
                outputs: json!({ "pauli_lambda": lp, "general_lambda": general }),
                verdicts: vec![verdict("pauli_not_above_general", lp <= general)],
            })
        }
        Parameters::Dirac(p) => {
            let (lo, hi) = threshold::dirac_window(p.beta, p.omega, p.mass);
            Ok(Outcome {
                outputs: json!({ "window": [lo, hi], "pauli_lambda": threshold::pauli_threshold(p.beta, p.omega) }),
                verdicts: vec![verdict(
                    "window_contains_mass",
                    hi >= p.mass.abs() && lo == -hi,
                )],
            })
        }
        Parameters::AharonovBohm(p) => {
            let lambda = threshold::aharonov_bohm_threshold(p.omega1, p.omega2);
            let potential = p.potential.as_ref().map(|v| v.radial_fn());
            let channels: Vec<RadialChannel> =
                p.m.iter()
                    .map(|&m| channels::aharonov_bohm_channel(p.b0, m, potential.clone()))
                    .collect();
            let reports = solve_channels(
                &channels,
                window(p.window)?,
                num,
                (200.0, 20_000, 1e-9),
                Some(lambda),
            )?;
            let ok = reports
                .iter()
                .all(|r| r.consistent_with_threshold == Some(true));
            Ok(Outcome {
                outputs: json!({ "lambda": lambda, "channels": to_value(&reports) }),
                verdicts: vec![verdict("no_genuine_above_threshold", ok)],
            })
        }
        Parameters::MillerSimon(p) => run_miller_simon(p, num),
        Parameters::WignerVonNeumann(p) => run_wvn(p, num),
        Parameters::CustomChannel(p) => {
            let potential = p.potential.as_ref().map(|v| v.radial_fn());
            let channel = match p.reduction {
                ReductionKind::Bare => {
                    let v = potential
                        .ok_or_else(|| CliError::Config("missing field `potential`".into()))?;
                    RadialChannel::bare(v, "custom(bare)")
                }
                ReductionKind::Planar => {
                    let field = p
                        .field
                        .clone()
                        .ok_or_else(|| CliError::Config("missing field `field`".into()))?;
                    let nodes = num.quad_nodes.unwrap_or(16);
                    let b = field.radial_fn();
                    let h: specbound_core::fields::RadialFn = match field.h_closed_form(1.0) {
                        Some(_) => Arc::new(move |r| field.h_closed_form(r).unwrap_or(f64::NAN)),
                        None => Arc::new(move |r| channels::h_profile(b.as_ref(), r, nodes)),
                    };
                    RadialChannel::planar(
                        p.m as f64,
                        h,
                        potential,
                        format!("custom(planar, m={})", p.m),
                    )
                }
            };
            let reports = solve_channels(
                &[channel],
                window(p.window)?,
                num,
                (100.0, 10_000, 1e-9),
                p.threshold,
            )?;
            let mut verdicts = vec![];
            if p.threshold.is_some() {
                verdicts.push(verdict(
                    "no_genuine_above_threshold",
                    reports[0].consistent_with_threshold == Some(true),
                ));
            }
            Ok(Outcome {
                outputs: json!({ "channels": to_value(&reports) }),
                verdicts,
            })
        }
        Parameters::VirialBench(p) => run_virial(p, num),
        Parameters::GaugeAudit(p) => {
            let field = p.field.field();
            let gauge = poincare_gauge(&field, num.quad_nodes.unwrap_or(16))?;
            let sample_box = SampleBox::cube(2, p.extent, p.samples);
            let curl = fields::curl_check(&gauge, &field, num.h.unwrap_or(1e-3), &sample_box);
            let transversal = fields::transversality_defect(&gauge, &sample_box)?;
            Ok(Outcome {
                outputs: json!({ "curl_residual": curl, "transversality_defect": transversal }),
                verdicts: vec![
                    verdict("curl_residual", curl < 1e-5),
                    verdict("transversality", transversal < 1e-10),
                ],
            })
        }
        Parameters::KatoAudit(p) => {
            let prof = p.potential.clone();
            let v: ScalarFn = Arc::new(move |x: &Point| prof.eval(geometry::norm(x)));
            let report = kato_norm(&v, p.dim, num.quad_nodes.unwrap_or(16))?;
            let mut verdicts = vec![verdict("kato_class", report.in_kato_class(1e-3))];
            if let Some(expect) = p.expect_norm {
                let tol = p.expect_tol.unwrap_or(1e-6);
                verdicts.push(verdict("norm_matches", (report.norm - expect).abs() <= tol));
            }
            Ok(Outcome {
                outputs: json!({ "kato": to_value(&report) }),
                verdicts,
            })
        }
        Parameters::WeylAudit(p) => {
            let radii = num
                .shells
                .clone()
                .unwrap_or_else(|| vec![2.0, 4.0, 8.0, 16.0, 32.0]);
            let centers: Vec<Point> = match p.centers {
                CenterRule::Origin => vec![[0.0; 3]; radii.len()],
                CenterRule::Squared => radii.iter().map(|r| [r * r, 0.0, 0.0]).collect(),
            };
            let terms = asymptotics::weyl_vanishing(
                &p.field.field(),
                &centers,
                &radii,
                num.quad_nodes.unwrap_or(16),
            )?;
            let c: Vec<f64> = terms.iter().map(|t| t.c_n).collect();
            let exponent = if c.iter().all(|&v| v > 0.0) {
                virial::log_slope(&radii, &c)
            } else {
                f64::NAN
            };
            let mut verdicts = vec![];
            if let Some(e) = p.expect_exponent {
                verdicts.push(verdict(
                    "growth_exponent",
                    (exponent - e).abs() <= p.exponent_tol.unwrap_or(0.05),
                ));
            }
            if p.vanishing {
                verdicts.push(verdict(
                    "monotone_vanishing",
                    c.windows(2).all(|w| w[1] < w[0]),
                ));
            }
            Ok(Outcome {
                outputs: json!({ "terms": to_value(&terms), "fitted_exponent": exponent }),
                verdicts,
            })
        }
    }
}

fn solve_channels(
    channels: &[RadialChannel],
    window: (f64, f64),
    num: &Numerics,
    defaults: (f64, usize, f64),
    threshold: Option<f64>,
) -> Result<Vec<SpectralReport>, CliError> {
    let r_max = num.r_max.unwrap_or(defaults.0);
    let n = num.n.unwrap_or(defaults.1);
    let tol = num.tol.unwrap_or(defaults.2);
    let results = fan_out(channels, |ch| {
        classify_spurious(ch, window, r_max, n, tol, SpuriousPolicy::default())
    });
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        let mut report = r?;
        if let Some(t) = threshold {
            report.check_threshold(t);
        }
        reports.push(report);
    }
    Ok(reports)
}

fn run_threshold(p: &ThresholdParams, num: &Numerics) -> Result<Outcome, CliError> {
    let radii = num
        .shells
        .clone()
        .unwrap_or_else(|| vec![100.0, 200.0, 400.0, 500.0]);
    let samples = num.shell_samples.unwrap_or(16);
    let dim = p.dim.unwrap_or(3);
    let mut estimates = serde_json::Map::new();
    let mut stabilized = true;
    let mut any_estimate = false;
    let mut pick = |name: &str,
                    direct: Option<f64>,
                    est: Option<asymptotics::AsymptoticEstimate>,
                    source: &str|
     -> Result<(f64, Provenance), CliError> {
        match (direct, est) {
            (Some(v), _) => Ok((v, Provenance::Manual)),
            (None, Some(e)) => {
                any_estimate = true;
                stabilized &= e.stabilized;
                let limit = e.limit;
                estimates.insert(name.to_string(), to_value(&e));
                Ok((limit, Provenance::Estimator(source.to_string())))
            }
            (None, None) => Err(CliError::Config(format!("missing field `{name}`"))),
        }
    };
    let beta_est = match (&p.beta, &p.field) {
        (None, Some(f)) => Some(asymptotics::beta_estimate(&f.field(), &radii, samples)?),
        _ => None,
    };
    let (beta, pb) = pick("beta", p.beta, beta_est, "field")?;
    let o1_est = match (&p.omega1, &p.v1) {
        (None, Some(v)) => {
            let prof = v.clone();
            let f: ScalarFn = Arc::new(move |x: &Point| prof.eval(geometry::norm(x)));
            Some(asymptotics::omega1_estimate(&f, dim, &radii, samples)?)
        }
        _ => None,
    };
    let (omega1, p1) = pick("omega1", p.omega1, o1_est, "v1")?;
    let o2_est = match (&p.omega2, &p.v2) {
        (None, Some(v)) => Some(asymptotics::omega2_estimate(
            &v.potential(dim),
            &radii,
            samples,
        )?),
        _ => None,
    };
    let (omega2, p2) = pick("omega2", p.omega2, o2_est, "v2")?;
    let report = ThresholdReport::new(beta, omega1, omega2).with_provenance([pb, p1, p2]);
    let mut verdicts = vec![verdict("lambda_defined", !report.lambda.is_nan())];
    if any_estimate {
        verdicts.push(verdict("estimates_stabilized", stabilized));
    }
    if let Some(expect) = p.expect_lambda {
        let tol = p.expect_tol.unwrap_or(1e-12);
        verdicts.push(verdict(
            "lambda_matches",
            (report.lambda - expect).abs() <= tol,
        ));
    }
    Ok(Outcome {
        outputs: json!({ "threshold": to_value(&report), "estimates": estimates }),
        verdicts,
    })
}

fn run_miller_simon(p: &MillerSimonParams, num: &Numerics) -> Result<Outcome, CliError> {
    let profile = FieldProfile::InversePower {
        b0: p.b0,
        alpha: p.alpha,
    };
    let b = profile.radial_fn();
    // β = lim sup r b(r)
    let beta = if p.alpha > 1.0 {
        0.0
    } else if p.alpha == 1.0 {
        p.b0.abs()
    } else {
        f64::INFINITY
    };
    let lambda = threshold::compute_lambda(beta, 0.0, 0.0);
    let nodes = num.quad_nodes.unwrap_or(16);
    let channels: Vec<RadialChannel> =
        p.m.iter()
            .map(|&m| channels::miller_simon_channel(b.clone(), m, nodes))
            .collect();
    let reports = solve_channels(
        &channels,
        window(p.window)?,
        num,
        (400.0, 40_000, 1e-10),
        Some(lambda),
    )?;
    let mut verdicts = vec![verdict(
        "no_genuine_above_threshold",
        reports
            .iter()
            .all(|r| r.consistent_with_threshold == Some(true)),
    )];
    let mut oracle_error = None;
    if p.alpha == 1.0 {
        // hydrogen-like: b0² - (m b0)² / (n_r + |m| + ½)² when m b0 > 0
        let mut worst: f64 = 0.0;
        for (m, report) in p.m.iter().zip(&reports) {
            let mb = *m as f64 * p.b0;
            let below: Vec<f64> = report
                .eigenvalues
                .iter()
                .copied()
                .filter(|&e| e < lambda)
                .collect();
            let expected: Vec<f64> = if mb > 0.0 {
                (0..below.len().min(3))
                    .map(|k| lambda - mb * mb / (k as f64 + m.unsigned_abs() as f64 + 0.5).powi(2))
                    .collect()
            } else {
                vec![]
            };
            if expected.len() != below.len().min(3) || (mb > 0.0 && below.is_empty()) {
                worst = f64::INFINITY;
            }
            for (e, o) in below.iter().zip(&expected) {
                worst = worst.max((e - o).abs());
            }
        }
        oracle_error = Some(worst);
        verdicts.push(verdict("coulomb_oracle", worst < 2e-3));
    }
    let mut continuum = Value::Null;
    if let Some(w) = p.continuum_window {
        let reports = solve_channels(
            &channels,
            window(w)?,
            num,
            (400.0, 40_000, 1e-9),
            Some(lambda),
        )?;
        verdicts.push(verdict(
            "continuum_all_spurious",
            reports.iter().all(|r| r.genuine().is_empty()),
        ));
        continuum = to_value(&reports);
    }
    Ok(Outcome {
        outputs: json!({
            "lambda": lambda,
            "channels": to_value(&reports),
            "oracle_error": oracle_error,
            "continuum": continuum,
        }),
        verdicts,
    })
}

fn run_wvn(p: &WignerVonNeumannParams, num: &Numerics) -> Result<Outcome, CliError> {
    let ch = channels::wigner_von_neumann_channel();
    let r_max = num.r_max.unwrap_or(200.0);
    let n = num.n.unwrap_or(200_000);
    let tol = num.tol.unwrap_or(1e-9);
    let report = classify_spurious(
        &ch,
        window(p.window)?,
        r_max,
        n,
        tol,
        SpuriousPolicy::default(),
    )?;
    let near: Vec<f64> = report
        .genuine()
        .into_iter()
        .filter(|e| (e - 1.0).abs() < 5e-3)
        .collect();
    let mut verdicts = vec![verdict(
        "single_embedded_eigenvalue",
        near.len() == 1 && report.genuine().len() == 1,
    )];
    let mut drift = Value::Null;
    if let (Some(r2), Some(&e)) = (p.recheck_r_max, near.first()) {
        let n2 = ((n + 1) as f64 * r2 / r_max).round() as usize - 1;
        let op = eigensolve::discretize(&ch, r2, n2)?;
        let d = eigensolve::nearest_distance(&op, e, tol, 1e-3);
        verdicts.push(verdict("survives_larger_box", d < 1e-3));
        drift = json!({ "r_max": r2, "n": n2, "drift": d });
    }
    Ok(Outcome {
        outputs: json!({ "spectrum": to_value(&report), "recheck": drift }),
        verdicts,
    })
}

fn run_virial(p: &VirialBenchParams, num: &Numerics) -> Result<Outcome, CliError> {
    let grid = Grid::square(num.grid_l.unwrap_or(10.0), num.h.unwrap_or(0.05))?;
    let field = p.field.field();
    let gauge = poincare_gauge(&field, num.quad_nodes.unwrap_or(16))?;
    let potential: PotentialSpec = p.potential.potential(2);
    let ham = Hamiltonian::new(grid, Some(&gauge), &potential)?;
    let (sigma, c, k) = (p.sigma, p.center, p.momentum);
    let phi = GridState::from_fn(grid, move |x| {
        let (a, b) = (x[0] - c[0], x[1] - c[1]);
        Complex64::from_polar(
            (-(a * a + b * b) / (2.0 * sigma * sigma)).exp(),
            k[0] * x[0] + k[1] * x[1],
        )
    });
    let t_list = num.t_list.clone().unwrap_or_else(|| vec![0.1, 0.05, 0.025]);
    let sweep = virial::quotient_sweep(&ham, Some(&gauge), Some(&field), &phi, &t_list)?;
    Ok(Outcome {
        verdicts: vec![
            verdict("gap_slope", sweep.gap_slope >= p.min_slope),
            verdict(
                "extrapolated_residual",
                sweep.relative_residual < p.max_residual,
            ),
        ],
        outputs: json!({ "sweep": to_value(&sweep) }),
    })
}
