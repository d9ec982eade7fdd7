use std::fmt::Write as _;

use dubrovin_core::dubrovin::{dubrovin_matrix, BulkPoint, DubrovinMatrix};
use dubrovin_core::engine::{parse_path, Engine, EngineError, SpectrumSample, Sweep};
use dubrovin_core::gw::{build_potential, solve_wdvv, GWTable, WdvvError};
use dubrovin_core::schubert::{YoungDiagram22, BULK_CYCLES};
use dubrovin_core::spectral::{char_poly, discriminant, exceptional_content, CharPoly, DiscriminantResult, SimplicityVerdict};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use thiserror::Error;

use crate::args::{Cli, Command, FamilyArgs, Format, MatrixArgs, SpectrumArgs, SweepArgs};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{flag}: {message}")]
    Usage { flag: &'static str, message: String },
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Wdvv(#[from] WdvvError),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage { .. } => 2,
            _ => 3,
        }
    }

    fn usage(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Usage {
            flag,
            message: message.into(),
        }
    }
}

/// Run a non-serve command and return what goes to stdout.
pub fn run(cli: &Cli) -> Result<String, CliError> {
    let f = cli.format;
    match &cli.command {
        Command::GwTable => gw_table(cli.max_degree, f),
        Command::Matrix(a) => matrix(cli.max_degree, a, f),
        Command::Discriminant(a) => family_report(cli.max_degree, a, f, true),
        Command::Classify(a) => family_report(cli.max_degree, a, f, false),
        Command::Spectrum(a) => spectrum(cli.max_degree, a, f),
        Command::Sweep(a) => sweep(cli.max_degree, a, f),
        Command::Serve(_) => Err(CliError::usage("serve", "not a one-shot command")),
    }
}

fn no_csv(f: Format) -> Result<(), CliError> {
    if f == Format::Csv {
        return Err(CliError::usage(
            "--format",
            "csv is available for gw-table, spectrum and sweep",
        ));
    }
    Ok(())
}

fn check_alpha(alpha: u32, max_degree: u32) -> Result<(), CliError> {
    if alpha > max_degree + 1 {
        return Err(CliError::usage(
            "--alpha",
            format!("must be at most max-degree + 1 = {}", max_degree + 1),
        ));
    }
    Ok(())
}

/// Entries of `M_{<α}` only involve degrees below `α`, so one-shot
/// commands solve no further than that.
fn degree_for(alpha: u32, max_degree: u32) -> u32 {
    alpha.saturating_sub(1).max(1).min(max_degree)
}

fn check_family_cycle(cycle: YoungDiagram22) -> Result<usize, CliError> {
    let i = cycle.index();
    if !BULK_CYCLES.contains(&i) {
        return Err(CliError::usage("--cycle", format!("{cycle} is not one of 2,0 1,1 2,1 2,2")));
    }
    Ok(i)
}

/// Translate engine rejections of user input into usage errors.
fn engine_error(e: EngineError) -> CliError {
    match e {
        EngineError::NotABulkCycle(_) => CliError::usage("--cycle", e.to_string()),
        EngineError::AlphaOutOfRange { .. } => CliError::usage("--alpha", e.to_string()),
        EngineError::EmptyPath => CliError::usage("--path", e.to_string()),
        e => CliError::Engine(e),
    }
}

fn json_line(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string(v).expect("json");
    s.push('\n');
    s
}

fn gw_table(max_degree: u32, f: Format) -> Result<String, CliError> {
    let table = solve_wdvv(max_degree)?;
    Ok(match f {
        Format::Json => json_line(&table.to_json()),
        Format::Text => table.to_text(),
        Format::Csv => gw_csv(&table)?,
    })
}

#[derive(Serialize)]
struct GwRow {
    degree: u32,
    n2: u32,
    n3: u32,
    n4: u32,
    n5: u32,
    value: String,
}

fn gw_csv(table: &GWTable) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for (k, v) in table.entries() {
        let [n2, n3, n4, n5] = k.n_hat;
        w.serialize(GwRow {
            degree: k.degree,
            n2,
            n3,
            n4,
            n5,
            value: v.to_string(),
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    finish_csv(w)
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<String, CliError> {
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Io(e.to_string()))
}

fn matrix(max_degree: u32, a: &MatrixArgs, f: Format) -> Result<String, CliError> {
    no_csv(f)?;
    check_alpha(a.alpha, max_degree)?;
    let point = match a.cycle {
        Some(c) => BulkPoint::family(check_family_cycle(c)?),
        None => BulkPoint::symbolic(),
    };
    let potential = build_potential(&solve_wdvv(degree_for(a.alpha, max_degree))?);
    let m = dubrovin_matrix(&point, &potential, Some(a.alpha)).map_err(EngineError::from)?;
    Ok(match f {
        Format::Json => {
            let mut v = m.to_json();
            v["cycle"] = json!(a.cycle.map(|c| c.to_string()));
            json_line(&v)
        }
        _ => {
            let what = a.cycle.map_or("t2..t5 symbolic".to_string(), |c| format!("cycle {c}"));
            format!("K ⋆ − at alpha = {}, {what}, t0 = 0\n{m}\n", a.alpha)
        }
    })
}

struct FamilyData {
    matrix: DubrovinMatrix,
    char_poly: CharPoly,
    discriminant: DiscriminantResult,
    verdict: SimplicityVerdict,
}

fn family_data(max_degree: u32, a: &FamilyArgs) -> Result<(usize, FamilyData), CliError> {
    check_alpha(a.alpha, max_degree)?;
    let var = check_family_cycle(a.cycle)?;
    let potential = build_potential(&solve_wdvv(degree_for(a.alpha, max_degree))?);
    let matrix = dubrovin_matrix(&BulkPoint::family(var), &potential, Some(a.alpha)).map_err(EngineError::from)?;
    let char_poly = char_poly(&matrix);
    let discriminant = discriminant(&char_poly);
    let verdict = SimplicityVerdict::from_discriminant(discriminant.clone(), a.alpha);
    Ok((
        var,
        FamilyData {
            matrix,
            char_poly,
            discriminant,
            verdict,
        },
    ))
}

fn family_report(max_degree: u32, a: &FamilyArgs, f: Format, full: bool) -> Result<String, CliError> {
    no_csv(f)?;
    let (var, d) = family_data(max_degree, a)?;
    let content = exceptional_content(&d.discriminant, var);
    if f == Format::Json {
        let mut v = json!({
            "cycle": a.cycle.to_string(),
            "parameter": format!("t{var}"),
            "alpha": a.alpha,
            "verdict": d.verdict.to_json(),
            "exceptional_content": content.as_ref().map(|p| p.to_string()),
        });
        if full {
            v["matrix"] = d.matrix.to_json();
            v["char_poly"] = d.char_poly.to_json();
        }
        return Ok(json_line(&v));
    }
    let mut out = String::new();
    writeln!(out, "cycle {} (parameter t{var}), alpha = {}", a.cycle, a.alpha).unwrap();
    if full {
        writeln!(out, "matrix:\n{}", d.matrix).unwrap();
        writeln!(out, "det(λ − M) = {}", d.char_poly).unwrap();
    }
    if d.discriminant.is_zero() {
        writeln!(out, "Δ = 0").unwrap();
    } else {
        writeln!(out, "Δ = {}", d.discriminant).unwrap();
        if let Some(c) = &content {
            writeln!(out, "Δ vanishes identically only where {c} = 0").unwrap();
        }
    }
    writeln!(out, "verdict: {}", d.verdict.kind).unwrap();
    writeln!(out, "full operator: {}", d.verdict.full_operator()).unwrap();
    Ok(out)
}

fn fmt_c(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{:.12} {sign} {:.12}i", z.re, z.im.abs())
}

#[derive(Serialize)]
struct SpectrumRow {
    frame: usize,
    cycle: String,
    t_re: f64,
    t_im: f64,
    index: usize,
    re: f64,
    im: f64,
    track: Option<usize>,
}

fn sample_rows(w: &mut csv::Writer<Vec<u8>>, frame: usize, s: &SpectrumSample, track: impl Fn(usize) -> Option<usize>) -> Result<(), CliError> {
    for (index, z) in s.eigenvalues.iter().enumerate() {
        w.serialize(SpectrumRow {
            frame,
            cycle: s.cycle.to_string(),
            t_re: s.t[0],
            t_im: s.t[1],
            index,
            re: z[0],
            im: z[1],
            track: track(index),
        })
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn sample_text(out: &mut String, s: &SpectrumSample) {
    let t = Complex64::new(s.t[0], s.t[1]);
    let q = Complex64::new(s.q[0], s.q[1]);
    write!(out, "cycle {}  t = {}  q = {}  alpha = {}", s.cycle, fmt_c(t), fmt_c(q), s.alpha).unwrap();
    if let Some(t0) = s.t0 {
        write!(out, "  t0 = {}", fmt_c(Complex64::new(t0[0], t0[1]))).unwrap();
    }
    out.push('\n');
    for (k, z) in s.eigenvalues().iter().enumerate() {
        writeln!(out, "  λ{} = {}", k + 1, fmt_c(*z)).unwrap();
    }
    writeln!(out, "  residual {:.2e}", s.residual).unwrap();
}

/// Compact JSON of a spectrum sample, shared with the HTTP service.
pub fn spectrum_json(s: &SpectrumSample) -> String {
    serde_json::to_string(s).expect("json")
}

pub fn sweep_json(s: &Sweep) -> String {
    serde_json::to_string(s).expect("json")
}

fn spectrum(max_degree: u32, a: &SpectrumArgs, f: Format) -> Result<String, CliError> {
    check_alpha(a.alpha, max_degree)?;
    let engine = Engine::with_families(degree_for(a.alpha, max_degree), &[(a.cycle, a.alpha)]).map_err(engine_error)?;
    let s = engine
        .spectrum(a.cycle, a.t.0, a.t0.map(|z| z.0), a.q.0, a.alpha)
        .map_err(engine_error)?;
    Ok(match f {
        Format::Json => spectrum_json(&s) + "\n",
        Format::Text => {
            let mut out = String::new();
            sample_text(&mut out, &s);
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            sample_rows(&mut w, 0, &s, |_| None)?;
            finish_csv(w)?
        }
    })
}

fn sweep(max_degree: u32, a: &SweepArgs, f: Format) -> Result<String, CliError> {
    check_alpha(a.alpha, max_degree)?;
    let path = parse_path(&a.path).map_err(|e| CliError::usage("--path", e.to_string()))?;
    let engine = Engine::with_families(degree_for(a.alpha, max_degree), &[(a.cycle, a.alpha)]).map_err(engine_error)?;
    let s = engine.sweep(a.cycle, &path, a.q.0, a.alpha).map_err(engine_error)?;
    Ok(match f {
        Format::Json => sweep_json(&s) + "\n",
        Format::Text => {
            let mut out = String::from("reference\n");
            sample_text(&mut out, &s.samples[0]);
            for (k, sample) in s.samples.iter().enumerate().skip(1) {
                writeln!(out, "frame {k}").unwrap();
                sample_text(&mut out, sample);
            }
            out
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            sample_rows(&mut w, 0, &s.samples[0], |_| None)?;
            for (k, sample) in s.samples.iter().enumerate().skip(1) {
                let track = |index: usize| s.tracks.iter().position(|tr| tr[k - 1] == index);
                sample_rows(&mut w, k, sample, track)?;
            }
            finish_csv(w)?
        }
    })
}
