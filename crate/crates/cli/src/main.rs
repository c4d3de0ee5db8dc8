use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use cusplab::config::ExperimentConfig;
use cusplab::eisenstein::{
    eisenstein_direct, eisenstein_fourier, maass_selberg_closed_form, maass_selberg_numeric_rational,
    orbifold_volume, orbifold_volume_rational_numeric, rankin_selberg_check, rankin_selberg_constant, reduce_point,
    residue_at_one, truncated_volume_closed_form, truncated_volume_numeric, EisensteinParams, UnfoldedQuadrature,
};
use cusplab::equidist::{decay_exponent_fit, ExperimentReport, TestFunction};
use cusplab::fields::{make_field, FieldData, PlaceKind};
use cusplab::geometry::{Cusp, PlaceCoord, Point};
use cusplab::specfun::bessel_k;
use cusplab::zeta::{
    completed_zeta, dedekind_zeta, dedekind_zeta_series, functional_equation_residual, phi, strip_grid, ZetaContext,
};

mod svg;

#[derive(Parser, Debug)]
#[command(name = "cusplab", version, about = "Eisenstein series and cusp equidistribution on Hilbert modular groups")]
struct Cli {
    /// Field: 0 for Q, otherwise the squarefree d of Q(sqrt d).
    #[arg(long, global = true, allow_hyphen_values = true)]
    field_d: Option<i64>,
    /// Spectral parameter, e.g. `2`, `1.3+0.5i`, `0.8-12i`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    s: Option<String>,
    /// JSON config (schema 1); flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the output here instead of stdout; `equidist` also writes the
    /// report (`.json`) and plot (`.svg`) next to it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized probes (default 1).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Overrides the default tolerance of `check`.
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print the field data as JSON.
    FieldInfo,
    /// Evaluate one function and print a CSV row.
    Eval {
        #[arg(value_enum)]
        kind: EvalKind,
        /// Point as `x,y` per real place or `re,im,y` per complex place,
        /// places separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
    },
    /// Run an identity check; exits with 1 if any residual is over tolerance.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
    },
    /// Run the decay-exponent experiment.
    Equidist,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum EvalKind {
    Zeta,
    CompletedZeta,
    Phi,
    EisensteinDirect,
    EisensteinFourier,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CheckKind {
    FunctionalEquation,
    MaassSelberg,
    RankinSelberg,
    Volume,
    Residue,
    Bessel,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::default(),
    };
    if let Some(d) = cli.field_d {
        cfg.field_d = d;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(o) = &cli.out {
        cfg.output_path = Some(o.display().to_string());
    }
    let s_flag = cli.s.as_deref().map(parse_complex).transpose()?;
    if let Some(t) = cli.tolerance {
        cfg.check.tolerance = Some(t);
    }
    let field = make_field(cfg.field_d).map_err(|e| anyhow!("{e:?}"))?;
    let out = cfg.output_path.clone().map(PathBuf::from);
    match cli.command {
        Command::FieldInfo => {
            let json = serde_json::to_string_pretty(&field)?;
            emit(out.as_deref(), format!("{json}\n").as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Eval { kind, z } => {
            if let Some(s) = s_flag {
                cfg.eval.s = [s.re, s.im];
            }
            if let Some(z) = z {
                cfg.eval.z = Some(parse_point(&z)?);
            }
            cmd_eval(&field, &cfg, kind, out.as_deref())
        }
        Command::Check { kind } => {
            if let Some(s) = s_flag {
                cfg.check.s = Some([s.re, s.im]);
            }
            cmd_check(&field, &cfg, kind, out.as_deref())
        }
        Command::Equidist => cmd_equidist(&field, &cfg, out.as_deref()),
    }
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> anyhow::Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(bytes)?;
            Ok(())
        }
    }
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new())
}

fn csv_bytes(w: csv::Writer<Vec<u8>>) -> anyhow::Result<Vec<u8>> {
    w.into_inner().map_err(|e| anyhow!("csv: {e}"))
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also with `j`).
fn parse_complex(text: &str) -> anyhow::Result<Complex64> {
    let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if t.is_empty() {
        bail!("empty complex number");
    }
    let Some(body) = t.strip_suffix('i').or_else(|| t.strip_suffix('j')) else {
        return Ok(Complex64::new(t.parse().with_context(|| format!("bad number {text}"))?, 0.0));
    };
    // split at the last sign that is not part of an exponent
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    Ok(Complex64::new(
        re.parse().with_context(|| format!("bad number {text}"))?,
        im.parse().with_context(|| format!("bad number {text}"))?,
    ))
}

fn parse_point(text: &str) -> anyhow::Result<Vec<[f64; 3]>> {
    text.split(';')
        .map(|place| {
            let v: Vec<f64> = place.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>()?;
            match v.len() {
                2 => Ok([v[0], 0.0, v[1]]),
                3 => Ok([v[0], v[1], v[2]]),
                _ => bail!("each place needs x,y or re,im,y"),
            }
        })
        .collect()
}

fn build_point(field: &FieldData, raw: &[[f64; 3]]) -> anyhow::Result<Point> {
    if raw.len() != field.places.len() {
        bail!("point needs {} places, got {}", field.places.len(), raw.len());
    }
    let coords = field
        .places
        .iter()
        .zip(raw)
        .map(|(k, c)| match k {
            PlaceKind::Real => PlaceCoord::real(c[0], c[2]),
            PlaceKind::Complex => PlaceCoord::complex(Complex64::new(c[0], c[1]), c[2]),
        })
        .collect();
    Point::new(field, coords).map_err(|e| anyhow!("{e:?}"))
}

fn default_point(field: &FieldData) -> Vec<[f64; 3]> {
    field
        .places
        .iter()
        .enumerate()
        .map(|(i, k)| match k {
            PlaceKind::Real => [0.28 - 0.4 * i as f64, 0.0, 1.3 - 0.4 * i as f64],
            PlaceKind::Complex => [0.28, 0.1, 1.3],
        })
        .collect()
}

/// Shortest round-trip text, in exponent form outside `[1e-4, 1e15)`.
fn num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn cmd_eval(field: &FieldData, cfg: &ExperimentConfig, kind: EvalKind, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let s = Complex64::new(cfg.eval.s[0], cfg.eval.s[1]);
    let ctx = ZetaContext::new(field);
    let raw = cfg.eval.z.clone().unwrap_or_else(|| default_point(field));
    let direct = |z: &Point| {
        let params = EisensteinParams {
            s,
            norm_bound: cfg.eval.norm_bound,
            fourier_terms: cfg.eval.fourier_terms,
            ..EisensteinParams::new(s)
        };
        eisenstein_direct(field, &Cusp::infinity(field), z, &params)
    };
    let fourier = |z: &Point| -> cusplab::Result<Complex64> {
        let (w, _) = reduce_point(field, z)?;
        eisenstein_fourier(field, &w, s, cfg.eval.fourier_terms)
    };
    let result: anyhow::Result<(Complex64, &str, Option<f64>)> = (|| {
        Ok(match kind {
            EvalKind::Zeta => {
                let v = dedekind_zeta(&ctx, s).map_err(|e| anyhow!("{e:?}"))?;
                let err = if s.re >= 1.5 { dedekind_zeta_series(&ctx, s, 20000).ok().map(|w| (w - v).norm()) } else { None };
                (v, "riemann-times-l", err)
            }
            EvalKind::CompletedZeta => {
                let v = completed_zeta(&ctx, s).map_err(|e| anyhow!("{e:?}"))?;
                let err = functional_equation_residual(&ctx, s).ok().map(|r| r * v.norm());
                (v, "gamma-factor-times-zeta", err)
            }
            EvalKind::Phi => (phi(&ctx, s).map_err(|e| anyhow!("{e:?}"))?, "completed-ratio", None),
            EvalKind::EisensteinDirect => {
                let z = build_point(field, &raw)?;
                let v = direct(&z).map_err(|e| anyhow!("{e:?}"))?;
                (v, "lattice-sum", fourier(&z).ok().map(|w| (w - v).norm()))
            }
            EvalKind::EisensteinFourier => {
                let z = build_point(field, &raw)?;
                let v = fourier(&z).map_err(|e| anyhow!("{e:?}"))?;
                let err = if s.re > 1.0 { direct(&z).ok().map(|w| (w - v).norm()) } else { None };
                (v, "fourier-expansion", err)
            }
        })
    })();
    let kind_name = kind.to_possible_value().expect("named").get_name().to_string();
    let mut w = csv_writer();
    w.write_record(["kind", "field_d", "s_re", "s_im", "value_re", "value_im", "method", "error_estimate", "status"])?;
    let code = match &result {
        Ok((v, method, err)) => {
            w.write_record([
                kind_name,
                field.d.to_string(),
                num(s.re),
                num(s.im),
                num(v.re),
                num(v.im),
                method.to_string(),
                fmt_opt(*err),
                "ok".into(),
            ])?;
            ExitCode::SUCCESS
        }
        Err(e) => {
            w.write_record([
                kind_name,
                field.d.to_string(),
                num(s.re),
                num(s.im),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                format!("error:{e}"),
            ])?;
            ExitCode::from(2)
        }
    };
    emit(out, &csv_bytes(w)?)?;
    Ok(code)
}

struct CheckRow {
    item: String,
    value: f64,
    reference: f64,
    residual: f64,
    tolerance: f64,
}

impl CheckRow {
    fn rel(item: impl Into<String>, value: f64, reference: f64, tolerance: f64) -> Self {
        CheckRow { item: item.into(), value, reference, residual: (value - reference).abs() / reference.abs(), tolerance }
    }

    fn pass(&self) -> bool {
        self.residual.is_finite() && self.residual <= self.tolerance
    }
}

fn lib(e: cusplab::Error) -> anyhow::Error {
    anyhow!("{e:?}")
}

fn cmd_check(field: &FieldData, cfg: &ExperimentConfig, kind: CheckKind, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let tol = |default: f64| cfg.check.tolerance.unwrap_or(default);
    let ctx = ZetaContext::new(field);
    let mut rows = Vec::new();
    match kind {
        CheckKind::FunctionalEquation => {
            for s in strip_grid() {
                let r = functional_equation_residual(&ctx, s).map_err(lib)?;
                rows.push(CheckRow { item: format!("s={s}"), value: r, reference: 0.0, residual: r, tolerance: tol(1e-6) });
            }
        }
        CheckKind::MaassSelberg => {
            let s = cfg.check.s.map_or(Complex64::new(1.5, 0.0), |v| Complex64::new(v[0], v[1]));
            let s2 = Complex64::new(cfg.check.s2[0], cfg.check.s2[1]);
            let t = cfg.check.t;
            let a = maass_selberg_closed_form(field, s, s2, t).map_err(lib)?;
            let b = maass_selberg_closed_form(field, s2, s, t).map_err(lib)?;
            rows.push(CheckRow {
                item: "symmetry".into(),
                value: a.re,
                reference: b.re,
                residual: (a - b).norm() / a.norm(),
                tolerance: 1e-12,
            });
            if field.degree == 1 {
                let n = maass_selberg_numeric_rational(s, s2, t).map_err(lib)?;
                rows.push(CheckRow {
                    item: "numeric".into(),
                    value: n.re,
                    reference: a.re,
                    residual: (n - a).norm() / a.norm(),
                    tolerance: tol(1e-3),
                });
            }
        }
        CheckKind::RankinSelberg => {
            let s = cfg.check.s.map_or(Complex64::new(2.0, 0.0), |v| Complex64::new(v[0], v[1]));
            let f = TestFunction::new(Cusp::infinity(field), cfg.equidist.profile).map_err(lib)?;
            let (lhs, rhs) = rankin_selberg_check(field, &f, s).map_err(lib)?;
            let default = if field.degree == 1 { 1e-4 } else { 1e-3 };
            rows.push(CheckRow {
                item: format!("s={s}"),
                value: lhs.re,
                reference: rhs.re,
                residual: (lhs - rhs).norm() / rhs.norm(),
                tolerance: tol(default),
            });
        }
        CheckKind::Volume => {
            if field.degree == 1 {
                let v = orbifold_volume(field).map_err(lib)?;
                let n = orbifold_volume_rational_numeric().map_err(lib)?;
                rows.push(CheckRow::rel("fundamental-domain", n, v, tol(1e-3)));
            } else {
                let t = cfg.check.t;
                let opts = UnfoldedQuadrature::for_field(field).map_err(lib)?;
                let n = truncated_volume_numeric(field, 2.0, t, &opts).map_err(lib)?;
                let c = truncated_volume_closed_form(field, Complex64::new(2.0, 0.0), t).map_err(lib)?;
                rows.push(CheckRow::rel(format!("truncated-integral T={t}"), n, c.re, tol(1e-3)));
            }
        }
        CheckKind::Residue => {
            let res = residue_at_one(field).map_err(lib)?;
            let reference = rankin_selberg_constant(field) / orbifold_volume(field).map_err(lib)?;
            rows.push(CheckRow::rel("closed-form", res, reference, tol(1e-10)));
            let s = Complex64::new(1.0 + 1e-4, 0.0);
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            let mut probes = vec![default_point(field)];
            probes.push(
                field
                    .places
                    .iter()
                    .map(|_| [rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, 1.0 + rng.gen::<f64>()])
                    .collect(),
            );
            for raw in probes {
                let z = build_point(field, &raw)?;
                let (w, _) = reduce_point(field, &z).map_err(lib)?;
                let e = eisenstein_fourier(field, &w, s, 45).map_err(lib)?;
                let probe = ((s - 1.0) * e).re;
                rows.push(CheckRow::rel(format!("probe {raw:?}"), probe, res, tol(1e-3)));
            }
        }
        CheckKind::Bessel => {
            for nu in [Complex64::new(0.3, 0.0), Complex64::new(0.5, 0.5), Complex64::new(1.2, -2.0)] {
                for y in [0.1, 1.0, 5.0] {
                    let a = bessel_k(nu, y).map_err(lib)?;
                    let b = bessel_k(-nu, y).map_err(lib)?;
                    rows.push(CheckRow {
                        item: format!("symmetry nu={nu} y={y}"),
                        value: a.re,
                        reference: b.re,
                        residual: (a - b).norm() / a.norm(),
                        tolerance: tol(1e-10),
                    });
                }
            }
            for y in [0.1, 1.0, 5.0, 20.0] {
                let a = bessel_k(Complex64::new(0.5, 0.0), y).map_err(lib)?;
                let exact = (std::f64::consts::PI / (2.0 * y)).sqrt() * (-y).exp();
                let mut row = CheckRow::rel(format!("half-order y={y}"), a.re, exact, tol(1e-8));
                row.residual = (a - exact).norm() / exact;
                rows.push(row);
            }
        }
    }
    let kind_name = kind.to_possible_value().expect("named").get_name().to_string();
    let mut w = csv_writer();
    w.write_record(["check", "field_d", "item", "value", "reference", "residual", "tolerance", "pass"])?;
    let mut all = true;
    for r in &rows {
        all &= r.pass();
        w.write_record([
            kind_name.clone(),
            field.d.to_string(),
            r.item.clone(),
            num(r.value),
            num(r.reference),
            num(r.residual),
            num(r.tolerance),
            r.pass().to_string(),
        ])?;
    }
    emit(out, &csv_bytes(w)?)?;
    Ok(if all { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn report_csv(r: &ExperimentReport) -> anyhow::Result<Vec<u8>> {
    let mut w = csv_writer();
    w.write_record(["k", "q", "m_q", "m", "e", "nodes"])?;
    for i in 0..r.ks.len() {
        w.write_record([
            r.ks[i].to_string(),
            num(r.q_grid[i]),
            num(r.m_q[i]),
            num(r.m),
            num(r.errors[i]),
            r.nodes[i].to_string(),
        ])?;
    }
    csv_bytes(w)
}

fn cmd_equidist(field: &FieldData, cfg: &ExperimentConfig, out: Option<&Path>) -> anyhow::Result<ExitCode> {
    let p = &cfg.equidist;
    let f = TestFunction::new(Cusp::infinity(field), p.profile).map_err(lib)?;
    let (k_min, k_max) = p.grid(field.degree);
    let report = decay_exponent_fit(&f, field, k_min, k_max, &p.refinement).map_err(lib)?;
    emit(out, &report_csv(&report)?)?;
    let meta = serde_json::to_string_pretty(&report)?;
    match out {
        Some(path) => {
            fs::write(path.with_extension("json"), format!("{meta}\n"))?;
            if p.svg {
                fs::write(path.with_extension("svg"), svg::decay_plot(&report))?;
            }
        }
        None => {
            let slope = report.fitted_slope.map_or("degenerate".to_string(), |b| format!("{b:.4}"));
            eprintln!("fitted slope {slope}, markers 0.5 and 0.75");
        }
    }
    Ok(ExitCode::SUCCESS)
}
