//! Executes a validated [`ExperimentConfig`]: every command yields named text
//! outputs, the derived constants and an outcome class, and the run manifest
//! records all of it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Instant;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{parse_shape, Command, ExperimentConfig};
use crate::error::{Error, Result};
use crate::harmonic::{check_subharmonic_bound, conservative_kappa, measure_csv, SlitStrip, TrigPoly, WalkConfig};
use crate::interval::{format_rational, parse_rational};
use crate::iteration::{
    build_holes, build_mollifier, find_k0, plan_chain, random_band_limited, run_chain, sample_points, MollifierCheck,
    MollifierSpec,
};
use crate::operator::{discretize, fit_exponent, fup_norm_with, norm_sweep, NormConfig, SweepEntry, SweepResult};
use crate::porosity::{check_porosity, porosity_profile, CertifierConfig, PorosityParams, PorosityStatus};
use crate::theta::choose_delta;
use crate::weights::{build_weight, check_weight, cover_bands, poisson_integral, WeightConfig};

/// How a completed run should be reported.
#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Success,
    /// Computed fine but certified a negative answer (porosity refuted, check failed).
    Negative(String),
    /// Some outputs are marked as failed rows.
    Partial(String),
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Success => 0,
            Outcome::Partial(_) => 3,
            Outcome::Negative(_) => 4,
        }
    }

    fn status(&self) -> &'static str {
        match self {
            Outcome::Success => "ok",
            Outcome::Partial(_) => "partial",
            Outcome::Negative(_) => "negative",
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    /// `(file name, contents)` in write order.
    pub files: Vec<(String, String)>,
    pub derived: BTreeMap<String, Value>,
    pub outcome: Outcome,
    /// Wall time per stage in seconds.
    pub timings: Vec<(String, f64)>,
}

struct Recorder {
    out: RunOutput,
    clock: Instant,
}

impl Recorder {
    fn new() -> Self {
        Recorder {
            out: RunOutput {
                files: Vec::new(),
                derived: BTreeMap::new(),
                outcome: Outcome::Success,
                timings: Vec::new(),
            },
            clock: Instant::now(),
        }
    }

    fn stage(&mut self, name: &str) {
        let now = Instant::now();
        self.out
            .timings
            .push((name.to_string(), now.duration_since(self.clock).as_secs_f64()));
        self.clock = now;
    }

    fn file(&mut self, name: &str, contents: String) {
        self.out.files.push((name.to_string(), contents));
    }

    fn derive(&mut self, key: &str, v: impl Into<Value>) {
        self.out.derived.insert(key.to_string(), v.into());
    }

    fn negative(&mut self, why: String) {
        if self.out.outcome == Outcome::Success {
            self.out.outcome = Outcome::Negative(why);
        }
    }
}

pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    let mut rec = Recorder::new();
    let (x, y) = config.sets()?;
    rec.stage("sets");
    let missing = || Error::InvalidParameter(format!("missing [{}] section", config.command.as_str()));
    match config.command {
        Command::Porosity => {
            let s = config.porosity.as_ref().ok_or_else(missing)?;
            let params = PorosityParams::new(
                parse_rational(&s.nu)?,
                parse_rational(&s.alpha0)?,
                parse_rational(&s.alpha1)?,
            )?;
            let verdict = check_porosity(&x, &params)?;
            let profile = porosity_profile(&x, &params.alpha0, &params.alpha1, &CertifierConfig::default())?;
            rec.stage("certify");
            let mut csv = String::from("length,min_gap,relative_gap\n");
            for p in &profile.samples {
                let rel = &p.min_gap / &p.length;
                let _ = writeln!(
                    csv,
                    "{},{},{}",
                    format_rational(&p.length),
                    format_rational(&p.min_gap),
                    format_rational(&rel)
                );
            }
            rec.file("porosity_profile.csv", csv);
            let mut report = String::from("status,nu,alpha0,alpha1,margin,witness_lo,witness_hi\n");
            let (wl, wh) = verdict
                .witness
                .as_ref()
                .map(|w| (format_rational(&w.lo), format_rational(&w.hi)))
                .unwrap_or_default();
            let _ = writeln!(
                report,
                "{},{},{},{},{},{wl},{wh}",
                verdict.status.as_str(),
                format_rational(&params.nu),
                format_rational(&params.alpha0),
                format_rational(&params.alpha1),
                format_rational(&verdict.margin)
            );
            rec.file("porosity.csv", report);
            rec.derive("status", verdict.status.as_str());
            rec.derive("nu", format_rational(&params.nu));
            if verdict.status != PorosityStatus::CertifiedPorous {
                rec.negative(format!("porosity verdict {}", verdict.status.as_str()));
            }
        }
        Command::Norm => {
            let s = config.norm.as_ref().ok_or_else(missing)?;
            let cfg = NormConfig {
                tol: s.tol,
                max_iterations: s.max_iterations,
                seed: config.seed,
            };
            let result = discretize(&x, s.n).and_then(|gx| fup_norm_with(&gx, &discretize(&y, s.n)?, &cfg));
            rec.stage("norm");
            if let Ok(r) = &result {
                rec.derive("sigma", r.sigma);
            }
            let failed = result.is_err();
            let sweep = SweepResult {
                entries: vec![SweepEntry { n: s.n, result }],
            };
            rec.file("norm.csv", sweep.to_csv(None));
            if failed {
                rec.out.outcome = Outcome::Partial("power iteration did not converge".into());
            }
        }
        Command::Sweep => {
            let s = config.sweep.as_ref().ok_or_else(missing)?;
            let cfg = NormConfig {
                tol: s.tol,
                max_iterations: s.max_iterations,
                seed: config.seed,
            };
            let sweep = norm_sweep(&x, &y, &s.ns, &cfg)?;
            rec.stage("sweep");
            let points = sweep.points();
            let fit = fit_exponent(&points).ok();
            if let Some(f) = &fit {
                rec.derive("beta", f.beta);
                rec.derive("log_c", f.log_c);
                rec.derive("r_squared", f.r_squared);
            }
            rec.file("sweep.csv", sweep.to_csv(fit.as_ref()));
            let failed = sweep.entries.len() - points.len();
            if failed > 0 {
                rec.out.outcome = Outcome::Partial(format!("{failed} sweep entries failed"));
            }
        }
        Command::Holes => {
            let s = config.holes.as_ref().ok_or_else(missing)?;
            let nu = parse_rational(&s.nu)?;
            let shape = parse_shape(&s.shape).ok_or_else(|| Error::InvalidParameter("shape".into()))?;
            let decomp = match build_holes(&x, s.k, &nu) {
                Ok(d) => d,
                Err(Error::PorosityViolation(iv)) => {
                    rec.file(
                        "holes.csv",
                        format!(
                            "# no hole fits in [{}, {}]\n",
                            format_rational(&iv.lo),
                            format_rational(&iv.hi)
                        ),
                    );
                    rec.negative("porosity violated by a dyadic interval".into());
                    return Ok(finish(rec));
                }
                Err(e) => return Err(e),
            };
            let mut csv = String::from("dyadic_lo,dyadic_hi,hole_lo,hole_hi\n");
            for c in &decomp.choices {
                let _ = writeln!(
                    csv,
                    "{},{},{},{}",
                    format_rational(&c.dyadic.lo),
                    format_rational(&c.dyadic.hi),
                    format_rational(&c.hole.lo),
                    format_rational(&c.hole.hi)
                );
            }
            rec.file("holes.csv", csv);
            rec.stage("holes");
            let x_points = discretize(&x, s.n)?;
            let k0s: Vec<u32> = match s.k0 {
                Some(k0) => vec![k0],
                None => (1..=s.max_k0).collect(),
            };
            let mut table = String::from("k0,max_core,max_shrunk,max_holes,min_x,out_of_band,passes\n");
            let mut found = None;
            for k0 in k0s {
                let moll = match build_mollifier(&decomp, &MollifierSpec { k0, shape }, s.n) {
                    Ok(m) => m,
                    Err(Error::BandTooLarge { .. }) => continue,
                    Err(e) => return Err(e),
                };
                let check = MollifierCheck {
                    k: s.k,
                    max_core: moll.max_on(&sample_points(&decomp.core, s.n)?),
                    max_shrunk: moll.max_on(&sample_points(&decomp.shrunk, s.n)?),
                    max_holes: moll.max_on(&sample_points(&decomp.holes, s.n)?),
                    min_x: moll.min_on(&x_points),
                    out_of_band: moll.out_of_band_mass(),
                };
                let ok = check.passes(k0);
                let _ = writeln!(
                    table,
                    "{k0},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e},{}",
                    check.max_core,
                    check.max_shrunk,
                    check.max_holes,
                    check.min_x,
                    check.out_of_band,
                    u8::from(ok)
                );
                if ok {
                    found = Some(k0);
                    break;
                }
            }
            rec.file("mollifier.csv", table);
            rec.stage("mollifier");
            match found {
                Some(k0) => rec.derive("k0", k0),
                None => rec.negative("no k0 passes the mollifier checks".into()),
            }
        }
        Command::Chain => {
            let s = config.chain.as_ref().ok_or_else(missing)?;
            let nu = parse_rational(&s.nu)?;
            let shape = parse_shape(&s.shape).ok_or_else(|| Error::InvalidParameter("shape".into()))?;
            let plan = match s.k0 {
                Some(k0) => plan_chain(&x, &y, &nu, s.n, k0, s.k_max, shape)?,
                None => match find_k0(&x, &y, &nu, s.n, s.k_max, shape, s.max_k0) {
                    Ok(p) => p,
                    Err(Error::NoK0Found { max }) => {
                        rec.negative(format!("no k0 up to {max} passes the mollifier checks"));
                        return Ok(finish(rec));
                    }
                    Err(e) => return Err(e),
                },
            };
            rec.derive("k0", plan.k0);
            rec.derive("k_total", plan.k_total);
            rec.stage("plan");
            let c = plan.contraction_constant(s.tol)?;
            rec.derive("c", c);
            rec.stage("contraction");
            let mut corpus = String::from("index,max_ratio,flags,x_norm,x_bound\n");
            let mut flags = 0;
            for i in 0..s.corpus {
                let f0 = random_band_limited(&plan.y_band, config.seed.wrapping_add(i as u64));
                let state = run_chain(&plan, &f0, c)?;
                flags += state.flag_count();
                let max_ratio = state.ratios.iter().copied().fold(0.0, f64::max);
                let _ = writeln!(
                    corpus,
                    "{i},{max_ratio:.12e},{},{:.12e},{:.12e}",
                    state.flag_count(),
                    state.x_norm,
                    state.x_bound
                );
                if i == 0 {
                    rec.file("chain.csv", state.to_csv());
                }
            }
            rec.file("corpus.csv", corpus);
            rec.derive("contraction", (1.0 - c * c / 10.0).max(0.0).sqrt());
            rec.derive("flags", flags);
            rec.stage("corpus");
            if !plan.passes() {
                rec.negative("mollifier checks fail for the given k0".into());
            } else if flags > 0 {
                rec.negative(format!("{flags} contraction flags"));
            }
        }
        Command::Harmonic => {
            let s = config.harmonic.as_ref().ok_or_else(missing)?;
            let cfg = WalkConfig {
                walks: s.walks,
                shell: s.shell,
                max_steps: s.max_steps,
                seed: config.seed,
            };
            let mut rows = Vec::new();
            let mut sub = String::from("r,index,lhs,rhs,slack\n");
            let mut kappas = Vec::new();
            let mut worst = f64::INFINITY;
            for &r in &s.r {
                let domain = SlitStrip::new(r, (s.hole[0], s.hole[1]), (0.0, 1.0))?;
                let (kappa, _, mut rs) = conservative_kappa(&domain, &s.t, &cfg)?;
                rows.append(&mut rs);
                kappas.push(json!({"r": r, "kappa": kappa}));
                for i in 0..s.corpus {
                    let g = TrigPoly::random(s.degree, config.seed.wrapping_add(i as u64));
                    let rep = check_subharmonic_bound(&g, &domain, kappa)?;
                    worst = worst.min(rep.slack);
                    let _ = writeln!(sub, "{r},{i},{:.12e},{:.12e},{:.12e}", rep.lhs, rep.rhs, rep.slack);
                }
            }
            rec.stage("walks");
            rec.file("measure.csv", measure_csv(&rows));
            rec.file("subharmonic.csv", sub);
            rec.derive("kappa", Value::Array(kappas));
            if s.corpus > 0 {
                rec.derive("min_slack", worst);
                if worst < 0.0 {
                    rec.negative("subharmonic bound violated".into());
                }
            }
        }
        Command::Cover => {
            let s = config.cover.as_ref().ok_or_else(missing)?;
            let theta = choose_delta(&parse_rational(&s.nu)?)?;
            let ytilde = x.dilate(&pow2(s.k))?;
            let report = cover_bands(&ytilde, s.k, &theta)?;
            rec.stage("cover");
            rec.file("cover.csv", report.to_csv());
            derive_theta(&mut rec, &theta);
            rec.derive("C_fit", report.c_fit);
            rec.derive("slope", report.slope);
            rec.derive("surrogate_sum", report.surrogate_sum());
        }
        Command::Weight => {
            let s = config.weight.as_ref().ok_or_else(missing)?;
            let theta = choose_delta(&parse_rational(&s.nu)?)?;
            let ytilde = x.dilate(&pow2(s.k))?;
            let report = cover_bands(&ytilde, s.k, &theta)?;
            let w = build_weight(
                &report,
                &WeightConfig {
                    ramp_fraction: s.ramp_fraction,
                    patch_radius: s.patch_radius,
                    patch_mesh: s.patch_mesh,
                },
            )?;
            let check = check_weight(&w, &ytilde, &theta);
            rec.stage("weight");
            rec.file("cover.csv", report.to_csv());
            rec.file("weight.txt", w.to_text());
            derive_theta(&mut rec, &theta);
            rec.derive("C_fit", report.c_fit);
            rec.derive("surrogate_sum", report.surrogate_sum());
            rec.derive("poisson_integral", poisson_integral(&w));
            rec.derive("slope_bound", w.slope_bound());
            match check {
                Ok(()) => rec.derive("check", "pass"),
                Err(xi) => {
                    rec.derive("check", "fail");
                    rec.derive("witness", xi);
                    rec.negative(format!("w < |xi| theta(xi) at xi = {xi}"));
                }
            }
        }
    }
    Ok(finish(rec))
}

/// `2^k`, the dilation `h^{-1}` for `h = 2^{-k}`.
fn pow2(k: u32) -> crate::interval::Rational {
    crate::interval::Rational::from_integer(num_bigint::BigInt::from(1u8) << k)
}

fn derive_theta(rec: &mut Recorder, theta: &crate::theta::ThetaWeight) {
    rec.derive("m", theta.m);
    rec.derive("epsilon", theta.epsilon);
    rec.derive("delta", theta.delta);
}

fn finish(mut rec: Recorder) -> RunOutput {
    rec.stage("output");
    rec.out
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Manifest for a finished (or failed) run. Everything except `timings` is a
/// function of the resolved config.
pub fn manifest(config: &ExperimentConfig, output: std::result::Result<&RunOutput, &Error>) -> Value {
    let resolved = serde_json::to_value(config).unwrap_or(Value::Null);
    let hash = sha256_hex(resolved.to_string().as_bytes());
    let mut m = json!({
        "version": env!("CARGO_PKG_VERSION"),
        "schema": config.schema,
        "command": config.command.as_str(),
        "seed": config.seed,
        "config_sha256": hash,
        "config": resolved,
    });
    match output {
        Ok(out) => {
            m["status"] = out.outcome.status().into();
            if let Outcome::Negative(why) | Outcome::Partial(why) = &out.outcome {
                m["reason"] = why.clone().into();
            }
            m["derived"] = serde_json::to_value(&out.derived).unwrap_or(Value::Null);
            m["outputs"] = out
                .files
                .iter()
                .map(|(name, body)| (name.clone(), Value::from(sha256_hex(body.as_bytes()))))
                .collect::<serde_json::Map<_, _>>()
                .into();
            m["timings"] = out
                .timings
                .iter()
                .map(|(k, v)| (k.clone(), Value::from(*v)))
                .collect::<serde_json::Map<_, _>>()
                .into();
        }
        Err(e) => {
            m["status"] = "failed".into();
            m["error"] = e.to_string().into();
        }
    }
    m
}
