use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use hdx_core::cochain::norm_sq;
use hdx_core::generate::{complete, partite, random_mean_zero, random_pure, two_triangles};
use hdx_core::io::{parse_cochain, parse_complex, write_cochain, write_complex};
use hdx_core::oriented::{
    k_level_check, local_minimality_residuals, minimal_representative, minimality_certificate,
};
use hdx_core::spectral::{gamma_profile, is_local_spectral_expander, lambda2_skeleton};
use hdx_core::verify::trickling_down_check;
use hdx_core::{Cochain64, Complex64, HdxError, OrientedCochain, ProperLevels, TheoremContext};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::{Kind, Theorem};

/// Slack below which a sampled bound counts as violated.
const SLACK_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    Core(HdxError),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<HdxError> for CliError {
    fn from(e: HdxError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } => 4,
            CliError::Core(e) if e.is_hypothesis_failure() => 3,
            CliError::Core(
                HdxError::InvalidParams(_)
                | HdxError::DimensionOutOfRange { .. }
                | HdxError::DimensionMismatch(_),
            ) => 2,
            CliError::Core(_) => 4,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_complex(path: &Path) -> CliResult<Complex64> {
    Ok(parse_complex(&read_text(path)?)?)
}

fn load_cochain(x: &Complex64, path: &Path) -> CliResult<Cochain64> {
    Ok(parse_cochain(x, &read_text(path)?)?)
}

fn print_json<S: Serialize>(value: &S) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("report serializes")
    );
}

pub fn generate(kind: &Kind, output: Option<&Path>) -> CliResult<()> {
    let x: Complex64 = match kind {
        Kind::Complete { n, d } => complete(*n, *d)?,
        Kind::Partite { parts, d } => partite(parts, *d)?,
        Kind::Random { n, d, m, seed } => random_pure(*n, *d, *m, *seed)?,
        Kind::TwoTriangles => two_triangles(),
    };
    let text = write_complex(&x);
    match output {
        Some(path) => write_text(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

#[derive(Serialize)]
struct DimensionSummary {
    dim: isize,
    faces: usize,
    weight_sum: f64,
}

#[derive(Serialize)]
struct GammaEntry {
    dim: isize,
    value: f64,
    face: String,
}

#[derive(Serialize)]
struct Verdict {
    lambda: f64,
    pass: bool,
    worst_face: String,
    worst_value: f64,
}

#[derive(Serialize)]
struct AnalyzeReport {
    dim: isize,
    dimensions: Vec<DimensionSummary>,
    gamma: Vec<GammaEntry>,
    lambda2: Option<f64>,
    verdict: Option<Verdict>,
}

pub fn analyze(path: &Path, lambda: Option<f64>, json: bool) -> CliResult<bool> {
    let x = load_complex(path)?;
    let d = x.top_dim();
    let dimensions = (-1..=d)
        .map(|k| {
            Ok(DimensionSummary {
                dim: k,
                faces: x.num_faces(k)?,
                weight_sum: x.weights(k)?.iter().sum(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let profile = gamma_profile(&x)?;
    let gamma = profile
        .iter()
        .map(|(j, value)| GammaEntry {
            dim: j,
            value,
            face: profile.worst_face(j).map(|f| f.to_string()).unwrap_or_default(),
        })
        .collect();
    let lambda2 = if d >= 1 { Some(lambda2_skeleton(&x)?) } else { None };
    let verdict = match lambda {
        Some(l) if !profile.is_empty() => {
            let r = is_local_spectral_expander(&x, l)?;
            Some(Verdict {
                lambda: l,
                pass: r.pass,
                worst_face: r.worst_face.to_string(),
                worst_value: r.worst_value,
            })
        }
        _ => None,
    };
    let report = AnalyzeReport {
        dim: d,
        dimensions,
        gamma,
        lambda2,
        verdict,
    };
    if json {
        print_json(&report);
    } else {
        println!("dimension {}", report.dim);
        for s in &report.dimensions {
            println!(
                "  X({:>2}): {:>6} faces, weight sum {:.15}",
                s.dim, s.faces, s.weight_sum
            );
        }
        for g in &report.gamma {
            println!("  gamma[{:>2}] = {:+.12} at {}", g.dim, g.value, g.face);
        }
        if let Some(l) = report.lambda2 {
            println!("  second eigenvalue of the vertex walk {l:+.12}");
        }
        if let Some(v) = &report.verdict {
            let word = if v.pass { "PASS" } else { "FAIL" };
            println!(
                "{word}: {}-local spectral expander (worst {:+.12} at {})",
                v.lambda, v.worst_value, v.worst_face
            );
        }
    }
    Ok(report.verdict.as_ref().is_none_or(|v| v.pass))
}

#[derive(Serialize)]
struct LevelNorm {
    level: isize,
    norm_sq: f64,
}

#[derive(Serialize)]
struct DecomposeReport {
    dim: isize,
    norm_sq: f64,
    levels: Vec<LevelNorm>,
    reconstruction_residual: f64,
    orthogonality_residual: f64,
    parseval_residual: f64,
    membership_residual: f64,
    pass: bool,
}

pub fn decompose(path: &Path, cochain: &Path, json: bool) -> CliResult<bool> {
    let x = load_complex(path)?;
    let f = load_cochain(&x, cochain)?;
    let levels = ProperLevels::new(&x, f.dim())?;
    let dec = levels.decompose(&x, &f)?;
    let reconstruction_residual = dec.reconstruction_residual(&f)?;
    let orthogonality_residual = dec.orthogonality_residual(&x)?;
    let parseval_residual = dec.parseval_residual(&x, &f)?;
    let membership_residual = dec.membership_residual(&levels)?;
    let report = DecomposeReport {
        dim: f.dim(),
        norm_sq: norm_sq(&x, &f)?,
        levels: dec
            .norms_sq()
            .map(|(level, norm_sq)| LevelNorm { level, norm_sq })
            .collect(),
        reconstruction_residual,
        orthogonality_residual,
        parseval_residual,
        membership_residual,
        pass: reconstruction_residual <= RESIDUAL_TOL
            && orthogonality_residual <= RESIDUAL_TOL
            && parseval_residual <= SLACK_TOL
            && membership_residual <= RESIDUAL_TOL,
    };
    if json {
        print_json(&report);
    } else {
        println!("{}-cochain, squared norm {:.12}", report.dim, report.norm_sq);
        for l in &report.levels {
            let name = if l.level < 0 {
                "constants".to_string()
            } else {
                format!("level {}", l.level)
            };
            println!("  {name:<10} {:.12}", l.norm_sq);
        }
        println!("  reconstruction residual {:.3e}", report.reconstruction_residual);
        println!("  orthogonality residual  {:.3e}", report.orthogonality_residual);
        println!("  parseval residual       {:.3e}", report.parseval_residual);
        println!("  membership residual     {:.3e}", report.membership_residual);
    }
    Ok(report.pass)
}

#[derive(Serialize)]
struct Fixture {
    file: String,
    dim: isize,
    faces: Vec<usize>,
    samples: usize,
    seed: u64,
}

#[derive(Serialize)]
struct SlackEntry {
    k: Option<isize>,
    check: String,
    count: usize,
    min: f64,
}

#[derive(Serialize)]
struct VerifyReport {
    theorem: &'static str,
    fixtures: Vec<Fixture>,
    slacks: Vec<SlackEntry>,
    pass: bool,
}

fn min_slack(values: impl IntoIterator<Item = f64>) -> (usize, f64) {
    values
        .into_iter()
        .fold((0, f64::INFINITY), |(n, m), v| (n + 1, m.min(v)))
}

fn require_dim(ok: bool, what: &str) -> CliResult<()> {
    if ok {
        Ok(())
    } else {
        Err(HdxError::Hypothesis(what.to_string()).into())
    }
}

/// Random mean-zero cochains and proper level basis vectors, in that order.
fn admissible_cochains(
    ctx: &TheoremContext<'_, f64>,
    k: isize,
    samples: usize,
    rng: &mut ChaCha8Rng,
) -> CliResult<(Vec<Cochain64>, Vec<Cochain64>)> {
    let x = ctx.complex();
    let random = (0..samples)
        .map(|_| random_mean_zero(x, k, rng))
        .collect::<hdx_core::Result<Vec<_>>>()?;
    let basis = ctx
        .levels(k)?
        .basis_cochains(x)?
        .into_iter()
        .map(|(_, c)| c)
        .collect();
    Ok((random, basis))
}

fn sampled_slacks(
    ctx: &TheoremContext<'_, f64>,
    ks: impl Iterator<Item = isize>,
    samples: usize,
    rng: &mut ChaCha8Rng,
    slack: impl Fn(&TheoremContext<'_, f64>, &Cochain64) -> hdx_core::Result<Vec<(&'static str, f64)>>,
) -> CliResult<Vec<SlackEntry>> {
    let mut out = Vec::new();
    for k in ks {
        let (random, basis) = admissible_cochains(ctx, k, samples, rng)?;
        for (source, set) in [("random", random), ("basis", basis)] {
            let mut groups: Vec<(&'static str, Vec<f64>)> = Vec::new();
            for f in &set {
                for (name, s) in slack(ctx, f)? {
                    match groups.iter_mut().find(|(n, _)| *n == name) {
                        Some((_, v)) => v.push(s),
                        None => groups.push((name, vec![s])),
                    }
                }
            }
            for (name, values) in groups {
                let (count, min) = min_slack(values);
                out.push(SlackEntry {
                    k: Some(k),
                    check: format!("{name}/{source}"),
                    count,
                    min,
                });
            }
        }
    }
    Ok(out)
}

pub fn verify(path: &Path, theorem: Theorem, samples: usize, seed: u64, json: bool) -> CliResult<bool> {
    let x = load_complex(path)?;
    let d = x.top_dim();
    let ctx = TheoremContext::new(&x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let slacks = match theorem {
        Theorem::Advantage => {
            require_dim(d >= 1, "advantage bound needs top dimension at least one")?;
            sampled_slacks(&ctx, 1..=d, samples, &mut rng, |c, f| {
                Ok(vec![("bound", c.advantage_check(f)?.slack)])
            })?
        }
        Theorem::FineGrained => {
            require_dim(d >= 1, "walk needs top dimension at least one")?;
            sampled_slacks(&ctx, 0..d, samples, &mut rng, |c, f| {
                Ok(vec![("bound", c.fine_grained_check(f)?.slack)])
            })?
        }
        Theorem::AlevLau => {
            require_dim(d >= 1, "walk needs top dimension at least one")?;
            sampled_slacks(&ctx, 0..d, samples, &mut rng, |c, f| {
                let r = c.alev_lau_check(f)?;
                Ok(vec![("bound", r.report.slack), ("dominance", r.improvement)])
            })?
        }
        Theorem::Updown => {
            require_dim(d >= 1, "walk needs top dimension at least one")?;
            sampled_slacks(&ctx, 0..d, samples, &mut rng, |c, f| {
                Ok(vec![("bound", c.updown_corollary_check(f)?.slack)])
            })?
        }
        Theorem::Trickling => {
            let r = trickling_down_check(&x)?;
            vec![
                SlackEntry {
                    k: None,
                    check: "bound".into(),
                    count: 1,
                    min: r.bound - r.actual,
                },
                SlackEntry {
                    k: None,
                    check: "link-average".into(),
                    count: 1,
                    min: 0.0 - r.advantage_residual,
                },
            ]
        }
        Theorem::Bootstrap => {
            require_dim(d >= 2, "recursion needs top dimension at least two")?;
            let mut out = Vec::new();
            for k in 1..d {
                let c = ctx.bootstrap_certificate(k)?;
                for (check, min) in [("first", c.worst_slack_first), ("second", c.worst_slack_second)] {
                    out.push(SlackEntry {
                        k: Some(k),
                        check: check.into(),
                        count: c.entries.len(),
                        min,
                    });
                }
            }
            out
        }
    };
    let pass = slacks.iter().all(|s| s.min >= -SLACK_TOL);
    let report = VerifyReport {
        theorem: theorem.name(),
        fixtures: vec![Fixture {
            file: path.display().to_string(),
            dim: d,
            faces: (0..=d).map(|k| x.num_faces(k)).collect::<hdx_core::Result<_>>()?,
            samples,
            seed,
        }],
        slacks,
        pass,
    };
    if json {
        print_json(&report);
    } else {
        println!("{} on {} (seed {})", report.theorem, path.display(), seed);
        for s in &report.slacks {
            let k = s.k.map(|k| format!("k={k}")).unwrap_or_default();
            println!(
                "  {k:<4} {:<22} n={:<4} min slack {:+.3e}",
                s.check, s.count, s.min
            );
        }
        println!("{}", if pass { "PASS" } else { "FAIL" });
    }
    Ok(pass)
}

#[derive(Serialize)]
struct FaceValue {
    face: Vec<usize>,
    value: f64,
}

#[derive(Serialize)]
struct MinimizeReport {
    dim: isize,
    input_norm: f64,
    norm: f64,
    certificate: f64,
    local_minimality_max: Option<f64>,
    k_level_max: Option<f64>,
    values: Vec<FaceValue>,
    pass: bool,
}

pub fn minimize(path: &Path, cochain: &Path, output: Option<&Path>, json: bool) -> CliResult<bool> {
    let x = load_complex(path)?;
    let f = OrientedCochain::new(load_cochain(&x, cochain)?);
    let k = f.dim();
    let m = minimal_representative(&x, &f)?;
    let certificate = minimality_certificate(&x, &m)?;
    let (local, level) = if k >= 1 {
        let worst = local_minimality_residuals(&x, &m)?
            .into_iter()
            .fold(0.0_f64, |a, (_, r)| a.max(r));
        (Some(worst), Some(k_level_check(&x, &m)?))
    } else {
        (None, None)
    };
    let values = x
        .faces(k)?
        .iter()
        .zip(m.cochain().values().iter())
        .map(|(face, v)| FaceValue {
            face: face.vertices().to_vec(),
            value: *v,
        })
        .collect();
    let pass = certificate <= RESIDUAL_TOL
        && local.is_none_or(|r| r <= RESIDUAL_TOL)
        && level.is_none_or(|r| r <= RESIDUAL_TOL);
    let report = MinimizeReport {
        dim: k,
        input_norm: norm_sq(&x, f.cochain())?.sqrt(),
        norm: norm_sq(&x, m.cochain())?.sqrt(),
        certificate,
        local_minimality_max: local,
        k_level_max: level,
        values,
        pass,
    };
    if let Some(out) = output {
        write_text(out, &write_cochain(&x, m.cochain())?)?;
    }
    if json {
        print_json(&report);
    } else {
        println!(
            "{}-cochain, norm {:.12} -> {:.12}",
            k, report.input_norm, report.norm
        );
        println!("  orthogonality to coboundaries {:.3e}", report.certificate);
        if let (Some(a), Some(b)) = (local, level) {
            println!("  local minimality residual {a:.3e}");
            println!("  level residual            {b:.3e}");
        }
        print!("{}", write_cochain(&x, m.cochain())?);
    }
    Ok(pass)
}
