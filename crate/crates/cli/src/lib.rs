//! Command implementations for the `weylbound` binary.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};

use weylbound::chern::{chern_on_sphere, flux_grid, DEFAULT_GRID, GAP_TOL};
use weylbound::field::{rat, GaussianRational};
use weylbound::poly::parse_rational;
use weylbound::formulas::{
    gn_hilbert_sequence, jozefiak_sequence, lower_bound_from_cherns, multiplicity_formula, parity_consistent,
    partial_sums,
};
use weylbound::localdim::{count_cwp, Verdict};
use weylbound::matfam::{
    build_band_family, build_diagonal_linear, build_spin1_scaled, build_spin_family, spin1_perturbation_1,
    spin1_perturbation_2, MatrixFamily, NumericFamily,
};
use weylbound::minors::LAMBDA0_TOL;
use weylbound::numeric::eigvals;
use weylbound::spectral::{dispersion_line, find_complex_weyl_points_from, find_real_weyl_points, WeylOptions};
use weylbound::swchart::{effective_family, sw_decompose, CLUSTER_TOL, DEFAULT_TOL as SW_TOL};
use weylbound::{Coeff, Poly, SymmetryClass, Var, VERSION};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "weylbound", version, about = "Weyl point counts and bounds for multifold degeneracies")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of complex Weyl points born from the degeneracy.
    CountCwp(Common),
    /// Chern numbers of the bands on a sphere around the degeneracy.
    Chern(Common),
    /// Real and complex Weyl points of the perturbed family.
    FindWeyl(Common),
    /// Schrieffer–Wolff decomposition and effective family.
    Sw(SwArgs),
    /// Closed-form multiplicities and Hilbert sequences.
    Formulas(FormulaArgs),
    /// Full pipeline: counts, Chern numbers, Weyl points and bounds.
    Report(Common),
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    /// Family preset: spin1-scaled, spin-<s>, band, diagonal, twofold-example.
    #[arg(long)]
    pub preset: Option<String>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Perturbation: preset1, preset2, random or none.
    #[arg(long)]
    pub perturb: Option<String>,
    /// Perturbation size.
    #[arg(long)]
    pub t: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Degree cap for the local multiplicity.
    #[arg(long)]
    pub cap: Option<u32>,
    /// Sphere grid for Chern numbers.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Degenerate eigenvalue; found from the family when absent.
    #[arg(long = "lambda0")]
    pub lambda0: Option<String>,
    /// Half-width of the search box.
    #[arg(long = "box")]
    pub box_size: Option<f64>,
    /// Sphere radius for Chern numbers.
    #[arg(long)]
    pub radius: Option<f64>,
    /// Band family coefficients, e.g. `1,2,1`.
    #[arg(long)]
    pub alpha: Option<String>,
    /// Diagonal slopes, e.g. `1,2,3,4`.
    #[arg(long)]
    pub slopes: Option<String>,
    /// JSON report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// CSV path: cell fluxes for `chern`, a dispersion line otherwise.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug, Clone, Default)]
pub struct SwArgs {
    #[command(flatten)]
    pub common: Common,
    /// Sample point for the decomposition, e.g. `0.01,0.02,0.03`.
    #[arg(long)]
    pub point: Option<String>,
    /// Order of the effective family.
    #[arg(long, default_value_t = 2)]
    pub order: u32,
}

#[derive(Args, Debug, Clone)]
pub struct FormulaArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long, default_value = "hermitian")]
    pub class: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Configuration file schema.
#[derive(Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub family: Option<FamilySpec>,
    pub perturbation: Option<FamilySpec>,
    pub t: Option<f64>,
    pub seed: Option<u64>,
    pub cap: Option<u32>,
    pub grid: Option<usize>,
    pub lambda0: Option<String>,
    #[serde(rename = "box")]
    pub box_size: Option<f64>,
    pub radius: Option<f64>,
    pub csv: Option<PathBuf>,
}

#[derive(Deserialize, Debug, Default, Clone)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub preset: Option<String>,
    pub class: Option<String>,
    pub entries: Option<Vec<Vec<String>>>,
    pub alpha: Option<Vec<String>>,
    pub slopes: Option<Vec<String>>,
}

/// Reads a TOML config; parse errors carry `path:line:column`.
pub fn load_config(path: &Path) -> Result<Config> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).map_err(|e| anyhow!("{}:{e}", path.display()))
}

pub fn parse_config(text: &str) -> Result<Config> {
    toml::from_str(text).map_err(|e| {
        let (line, col) = e
            .span()
            .map(|s| {
                let before = &text[..s.start.min(text.len())];
                let line = before.matches('\n').count() + 1;
                let col = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
                (line, col)
            })
            .unwrap_or((0, 0));
        anyhow!("{line}:{col}: {}", e.message())
    })
}

/// Fully resolved inputs of one run.
#[derive(Debug, Clone)]
pub struct Setup {
    pub family: MatrixFamily,
    pub family_label: String,
    pub perturbation: Option<MatrixFamily>,
    pub perturbation_label: String,
    pub t: f64,
    pub lambda0: Coeff,
    pub seed: u64,
    pub cap: Option<u32>,
    pub grid: usize,
    pub box_size: f64,
    pub radius: f64,
    pub csv: Option<PathBuf>,
}

fn split_list(s: &str) -> Vec<String> {
    s.split(',').map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect()
}

fn parse_spin(name: &str) -> Option<u32> {
    let s = name.strip_prefix("spin-")?;
    let q = parse_rational(s).ok()?;
    let two = &q * rat(2, 1);
    two.is_integer().then(|| two.to_integer().try_into().ok()).flatten().filter(|&v: &u32| v > 0)
}

fn twofold_example() -> MatrixFamily {
    MatrixFamily::parse(
        SymmetryClass::Symmetric,
        &[vec!["2", "x", "y"], vec!["x", "0", "0"], vec!["y", "0", "0"]],
    )
    .expect("valid preset")
}

fn build_family(spec: &FamilySpec) -> Result<(MatrixFamily, String)> {
    if let Some(rows) = &spec.entries {
        let class = SymmetryClass::parse(spec.class.as_deref().unwrap_or("hermitian"))?;
        return Ok((MatrixFamily::parse(class, rows)?, "custom".into()));
    }
    let name = spec.preset.as_deref().unwrap_or("spin1-scaled");
    let fam = match name {
        "spin1-scaled" => build_spin1_scaled(),
        "band" => {
            let a = spec.alpha.clone().ok_or_else(|| anyhow!("preset band needs alpha"))?;
            if a.len() != 3 {
                bail!("alpha needs three values, got {}", a.len());
            }
            let q: Vec<_> = a.iter().map(|s| parse_rational(s)).collect::<weylbound::Result<_>>()?;
            build_band_family(&[q[0].clone(), q[1].clone(), q[2].clone()])
        }
        "diagonal" => {
            let s = spec.slopes.clone().unwrap_or_else(|| split_list("1,2,3,4"));
            let q: Vec<_> = s.iter().map(|v| parse_rational(v)).collect::<weylbound::Result<_>>()?;
            build_diagonal_linear(&q)?
        }
        "twofold-example" => twofold_example(),
        other => match parse_spin(other) {
            Some(two_s) => build_spin_family(two_s)?,
            None => bail!("unknown preset {other:?}"),
        },
    };
    Ok((fam, name.to_string()))
}

fn small_rat(rng: &mut ChaCha8Rng) -> num_rational::BigRational {
    rat(rng.random_range(-5..=5), rng.random_range(1..=4))
}

/// Seeded random constant perturbation respecting the family class.
pub fn random_perturbation(fam: &MatrixFamily, seed: u64) -> Result<MatrixFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = fam.n();
    let class = fam.class();
    let mut rows = vec![vec![Poly::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            let c = match class {
                SymmetryClass::Diagonal if i != j => continue,
                SymmetryClass::General => Coeff::from_gaussian(GaussianRational::new(small_rat(&mut rng), small_rat(&mut rng))),
                _ if j < i => continue,
                SymmetryClass::Hermitian if i != j => {
                    Coeff::from_gaussian(GaussianRational::new(small_rat(&mut rng), small_rat(&mut rng)))
                }
                _ => Coeff::from_rational(small_rat(&mut rng)),
            };
            if class != SymmetryClass::General && j > i {
                rows[j][i] = Poly::constant(if class == SymmetryClass::Hermitian { c.conj() } else { c.clone() });
            }
            rows[i][j] = Poly::constant(c);
        }
    }
    Ok(MatrixFamily::new(class, rows)?)
}

fn build_perturbation(name: &str, fam: &MatrixFamily, seed: u64, spec: Option<&FamilySpec>) -> Result<Option<MatrixFamily>> {
    Ok(match name {
        "none" => None,
        "preset1" => Some(spin1_perturbation_1()),
        "preset2" => Some(spin1_perturbation_2()),
        "random" => Some(random_perturbation(fam, seed)?),
        "custom" => Some(build_family(spec.ok_or_else(|| anyhow!("missing perturbation entries"))?)?.0),
        other => bail!("unknown perturbation {other:?}"),
    })
}

/// Multiple eigenvalue of the family at the origin, rationalized.
pub fn default_lambda0(fam: &MatrixFamily) -> Result<Coeff> {
    let m = fam.at_t(&Coeff::zero()).evaluate_full(&[num_complex::Complex64::new(0.0, 0.0); 5]);
    let ev = eigvals(&m);
    for (i, a) in ev.iter().enumerate() {
        if ev.iter().enumerate().any(|(j, b)| j != i && (a - b).norm() < 1e-8) {
            return Coeff::approximate(*a, 1_000_000, 1e-9)
                .ok_or_else(|| anyhow!("cannot rationalize the degenerate eigenvalue {a}; pass --lambda0"));
        }
    }
    bail!("no multiple eigenvalue at the origin; pass --lambda0")
}

impl Setup {
    pub fn resolve(args: &Common, default_perturb: &str) -> Result<Setup> {
        let cfg = match &args.config {
            Some(p) => load_config(p)?,
            None => Config::default(),
        };
        let mut fspec = cfg.family.clone().unwrap_or_default();
        if let Some(p) = &args.preset {
            fspec = FamilySpec { preset: Some(p.clone()), ..Default::default() };
        }
        if let Some(a) = &args.alpha {
            fspec.alpha = Some(split_list(a));
            fspec.preset.get_or_insert_with(|| "band".into());
        }
        if let Some(s) = &args.slopes {
            fspec.slopes = Some(split_list(s));
            fspec.preset.get_or_insert_with(|| "diagonal".into());
        }
        let (family, family_label) = build_family(&fspec)?;
        let seed = args.seed.or(cfg.seed).unwrap_or(0);
        let pname = match (&args.perturb, &cfg.perturbation) {
            (Some(p), _) => p.clone(),
            (None, Some(spec)) if spec.entries.is_some() => "custom".into(),
            (None, Some(spec)) => spec.preset.clone().unwrap_or_else(|| default_perturb.into()),
            (None, None) => default_perturb.into(),
        };
        let perturbation = build_perturbation(&pname, &family, seed, cfg.perturbation.as_ref())?;
        let lambda0 = match args.lambda0.as_ref().or(cfg.lambda0.as_ref()) {
            Some(s) => {
                let p = Poly::parse(s)?;
                if !p.is_constant() {
                    bail!("lambda0 must be a constant, got {s}");
                }
                p.coeff(&[0; 5])
            }
            None => default_lambda0(&family)?,
        };
        Ok(Setup {
            family,
            family_label,
            perturbation,
            perturbation_label: pname,
            t: args.t.or(cfg.t).unwrap_or(0.1),
            lambda0,
            seed,
            cap: args.cap.or(cfg.cap),
            grid: args.grid.or(cfg.grid).unwrap_or(DEFAULT_GRID),
            box_size: args.box_size.or(cfg.box_size).unwrap_or(1.0),
            radius: args.radius.or(cfg.radius).unwrap_or(1.0),
            csv: args.csv.clone().or(cfg.csv),
        })
    }

    pub fn perturbed(&self) -> Result<Option<MatrixFamily>> {
        match &self.perturbation {
            Some(p) => Ok(Some(self.family.perturb(p)?)),
            None => Ok(None),
        }
    }

    pub fn echo(&self) -> Value {
        json!({
            "family": {
                "label": self.family_label,
                "class": self.family.class().name(),
                "entries": self.family.rows_as_strings(),
            },
            "perturbation": {
                "label": self.perturbation_label,
                "entries": self.perturbation.as_ref().map(|p| p.rows_as_strings()),
            },
            "t": self.t,
            "lambda0": self.lambda0.to_string(),
            "seed": self.seed,
            "cap": self.cap,
            "grid": self.grid,
            "box": self.box_size,
            "radius": self.radius,
        })
    }
}

pub fn tolerances() -> Value {
    let w = WeylOptions::default();
    json!({
        "lambda0": LAMBDA0_TOL,
        "newton_residual": w.residual_tol,
        "weyl_gap": w.gap_tol,
        "merge_radius_rel": w.merge_rel,
        "chern_gap": GAP_TOL,
        "sw_residual": SW_TOL,
        "sw_cluster": CLUSTER_TOL,
    })
}

/// Report body plus exit code.
pub struct Outcome {
    pub report: Value,
    pub exit: i32,
}

fn envelope(command: &str, seed: Option<u64>, config: Value, results: Value) -> Value {
    json!({
        "schema_version": SCHEMA_VERSION,
        "version": VERSION,
        "command": command,
        "seed": seed,
        "tolerances": tolerances(),
        "config": config,
        "results": results,
    })
}

struct Timer {
    on: bool,
    marks: Vec<(String, f64)>,
    last: Instant,
}

impl Timer {
    fn new(on: bool) -> Self {
        Self { on, marks: vec![], last: Instant::now() }
    }

    fn mark(&mut self, name: &str) {
        let now = Instant::now();
        self.marks.push((name.into(), (now - self.last).as_secs_f64()));
        self.last = now;
    }

    fn attach(&self, report: &mut Value) {
        if self.on {
            report["timings"] = self.marks.iter().map(|(k, v)| (k.clone(), json!(v))).collect();
        }
    }
}

fn cwp_exit(verdict: Verdict) -> i32 {
    if verdict == Verdict::Inconclusive {
        2
    } else {
        0
    }
}

pub fn cmd_count_cwp(args: &Common) -> Result<Outcome> {
    let s = Setup::resolve(args, "none")?;
    let mut timer = Timer::new(args.timings);
    let res = count_cwp(&s.family, &s.lambda0, s.cap)?;
    timer.mark("count_cwp");
    let exit = cwp_exit(res.verdict);
    let mut report = envelope("count-cwp", Some(s.seed), s.echo(), json!({ "count_cwp": res }));
    timer.attach(&mut report);
    Ok(Outcome { report, exit })
}

/// Band indices of the `λ₀` cluster at the origin, ascending.
fn cluster_bands(fam: &MatrixFamily, lambda0: &Coeff) -> Vec<usize> {
    let m = fam.at_t(&Coeff::zero()).evaluate_full(&[num_complex::Complex64::new(0.0, 0.0); 5]);
    let l0 = lambda0.to_complex();
    let mut ev: Vec<f64> = eigvals(&m).iter().map(|z| z.re).collect();
    ev.sort_by(f64::total_cmp);
    ev.iter()
        .enumerate()
        .filter(|(_, e)| (*e - l0.re).abs() < 1e-8)
        .map(|(i, _)| i)
        .collect()
}

/// Chern numbers of the unperturbed cluster bands and the resulting
/// lower bound; `None` when the family is not a 3-parameter hermitian one.
fn chern_section(s: &Setup) -> Result<Option<Value>> {
    if s.family.arity() != 3 || s.family.class() != SymmetryClass::Hermitian {
        return Ok(None);
    }
    let bands = cluster_bands(&s.family, &s.lambda0);
    let rep = chern_on_sphere(&s.family.numeric(0.0), [0.0; 3], s.radius, &bands, s.grid)?;
    let (bound, warning) = lower_bound_from_cherns(&rep.cherns);
    Ok(Some(json!({
        "report": rep,
        "partial_sums": partial_sums(&rep.cherns),
        "lower_bound": bound,
        "warning": warning,
    })))
}

pub fn cmd_chern(args: &Common) -> Result<Outcome> {
    let s = Setup::resolve(args, "none")?;
    let mut timer = Timer::new(args.timings);
    let (results, num) = match &s.perturbed()? {
        Some(f) => {
            let num = f.numeric(s.t);
            let rep = weylbound::chern::chern_all_bands(&num, [0.0; 3], s.radius, s.grid)?;
            (json!({ "chern": rep, "partial_sums": partial_sums(&rep.cherns) }), num)
        }
        None => (
            chern_section(&s)?.ok_or_else(|| anyhow!("Chern numbers need a 3-parameter hermitian family"))?,
            s.family.numeric(0.0),
        ),
    };
    timer.mark("chern");
    if let Some(path) = &s.csv {
        let rep = results.get("chern").unwrap_or(&results["report"]);
        let bands: Vec<usize> = serde_json::from_value(rep["bands"].clone())?;
        let grid = rep["grid"].as_u64().unwrap_or(s.grid as u64) as usize;
        write_flux_csv(path, &num, s.radius, &bands, grid)?;
    }
    let mut report = envelope("chern", Some(s.seed), s.echo(), results);
    timer.attach(&mut report);
    Ok(Outcome { report, exit: 0 })
}

fn write_flux_csv(path: &Path, num: &NumericFamily, radius: f64, bands: &[usize], grid: usize) -> Result<()> {
    let mut out = String::from("band,kind,i,j,theta,phi,flux\n");
    for c in flux_grid(num, [0.0; 3], radius, bands, grid)? {
        out.push_str(&format!("{},{},{},{},{},{},{}\n", c.band, c.kind, c.i, c.j, c.theta, c.phi, c.flux));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

fn write_csv(path: &Path, fam: &MatrixFamily, t: f64, half: f64) -> Result<()> {
    let num = fam.numeric(t);
    let m = fam.arity();
    let mut from = vec![0.0; m];
    let mut to = vec![0.0; m];
    from[0] = -half;
    to[0] = half;
    let rows = dispersion_line(&num, &from, &to, 200);
    let mut out = String::new();
    let names: Vec<&str> = fam.params().iter().map(|v| v.name()).collect();
    out.push_str(&format!("s,{}", names.join(",")));
    for i in 0..fam.n() {
        out.push_str(&format!(",e{i}"));
    }
    out.push('\n');
    for (s, ev) in rows {
        let p: Vec<String> = (0..m).map(|k| format!("{}", from[k] + s * (to[k] - from[k]))).collect();
        let e: Vec<String> = ev.iter().map(|v| format!("{v}")).collect();
        out.push_str(&format!("{s},{},{}\n", p.join(","), e.join(",")));
    }
    std::fs::write(path, out).with_context(|| format!("writing {}", path.display()))
}

fn weyl_section(s: &Setup, cwp_total: Option<usize>) -> Result<Value> {
    let f = s.perturbed()?.ok_or_else(|| anyhow!("find-weyl needs a perturbation"))?;
    let opts = WeylOptions { seed: s.seed, expected: cwp_total, grid: s.grid, ..Default::default() };
    let real = find_real_weyl_points(&f, s.t, s.box_size, &opts)?;
    let complex = find_complex_weyl_points_from(&f, s.t, s.box_size, &opts, &real.points)?;
    if let Some(path) = &s.csv {
        write_csv(path, &f, s.t, s.box_size)?;
    }
    Ok(json!({ "real": real, "complex": complex }))
}

fn bounds(alg: Option<u64>, real: usize, cwp: Option<usize>) -> Value {
    let parity = cwp.map(|c| parity_consistent(real as u64, c as u64));
    let line = match (alg, cwp) {
        (Some(a), Some(c)) => Some(format!("{a} ≤ ♯WP ≤ {c}")),
        _ => None,
    };
    json!({ "alg": alg, "real_found": real, "cwp": cwp, "line": line, "parity_consistent": parity })
}

pub fn cmd_find_weyl(args: &Common) -> Result<Outcome> {
    let s = Setup::resolve(args, "random")?;
    let mut timer = Timer::new(args.timings);
    let cwp = count_cwp(&s.family, &s.lambda0, s.cap)?;
    timer.mark("count_cwp");
    let weyl = weyl_section(&s, cwp.total)?;
    timer.mark("weyl");
    let real = weyl["real"]["points"].as_array().map_or(0, Vec::len);
    let alg = chern_section(&s)?.and_then(|c| c["lower_bound"].as_u64());
    timer.mark("chern");
    let results = json!({ "count_cwp": cwp, "weyl": weyl, "bounds": bounds(alg, real, cwp.total) });
    let mut report = envelope("find-weyl", Some(s.seed), s.echo(), results);
    timer.attach(&mut report);
    Ok(Outcome { report, exit: cwp_exit(cwp.verdict) })
}

pub fn cmd_report(args: &Common) -> Result<Outcome> {
    let s = Setup::resolve(args, "random")?;
    let mut timer = Timer::new(args.timings);
    let mut results = json!({});
    let mut errors = Vec::new();
    let cwp = match count_cwp(&s.family, &s.lambda0, s.cap) {
        Ok(r) => {
            results["count_cwp"] = json!(r);
            Some(r)
        }
        Err(e) => {
            errors.push(format!("count_cwp: {e}"));
            None
        }
    };
    timer.mark("count_cwp");
    let total = cwp.as_ref().and_then(|r| r.total);
    let alg = match chern_section(&s) {
        Ok(Some(c)) => {
            let lb = c["lower_bound"].as_u64();
            results["chern"] = c;
            lb
        }
        Ok(None) => None,
        Err(e) => {
            errors.push(format!("chern: {e}"));
            None
        }
    };
    timer.mark("chern");
    let mut real = None;
    match weyl_section(&s, total) {
        Ok(w) => {
            real = w["real"]["points"].as_array().map(Vec::len);
            results["weyl"] = w;
        }
        Err(e) => errors.push(format!("weyl: {e}")),
    }
    timer.mark("weyl");
    if let (Some(a), Some(r), Some(_)) = (alg, real, total) {
        results["bounds"] = bounds(Some(a), r, total);
    }
    results["errors"] = json!(errors);
    let exit = match &cwp {
        Some(r) => cwp_exit(r.verdict),
        None => 1,
    };
    let mut report = envelope("report", Some(s.seed), s.echo(), results);
    timer.attach(&mut report);
    Ok(Outcome { report, exit })
}

fn matrix_json(m: &weylbound::numeric::CMat) -> Value {
    json!((0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect::<Vec<_>>())
        .collect::<Vec<_>>())
}

pub fn cmd_sw(args: &SwArgs) -> Result<Outcome> {
    let s = Setup::resolve(&args.common, "none")?;
    let mut timer = Timer::new(args.common.timings);
    let m = s.family.arity();
    let point: Vec<f64> = match &args.point {
        Some(p) => split_list(p).iter().map(|v| v.parse::<f64>()).collect::<std::result::Result<_, _>>()?,
        None => (1..=m).map(|i| 0.01 * i as f64).collect(),
    };
    if point.len() != m {
        bail!("point needs {m} coordinates, got {}", point.len());
    }
    let num = s.family.numeric(0.0);
    let a0 = num.at(&vec![0.0; m]);
    let dec = sw_decompose(&a0, s.lambda0.to_complex(), &num.at(&point), SW_TOL)?;
    let eff = effective_family(&s.family, &s.lambda0, args.order)?;
    timer.mark("sw");
    let results = json!({
        "point": point,
        "decomposition": dec,
        "aeff_block": matrix_json(&dec.aeff_block()),
        "effective": eff,
    });
    let mut report = envelope("sw", Some(s.seed), s.echo(), results);
    timer.attach(&mut report);
    Ok(Outcome { report, exit: 0 })
}

pub fn cmd_formulas(args: &FormulaArgs) -> Result<Outcome> {
    let class = SymmetryClass::parse(&args.class)?;
    let total = multiplicity_formula(args.k, class)?;
    let sequence = match class {
        SymmetryClass::Hermitian | SymmetryClass::General => Some(json!({
            "resolution": "gulliksen-negard",
            "hilbert": gn_hilbert_sequence(args.k)?,
        })),
        SymmetryClass::Symmetric => Some(json!({
            "resolution": "jozefiak",
            "hilbert": jozefiak_sequence(args.k)?,
        })),
        SymmetryClass::Diagonal => None,
    };
    let config = json!({ "k": args.k, "class": class.name() });
    let report = envelope("formulas", None, config, json!({ "total": total, "sequence": sequence }));
    Ok(Outcome { report, exit: 0 })
}

fn out_path(cmd: &Command) -> Option<&PathBuf> {
    match cmd {
        Command::CountCwp(c) | Command::Chern(c) | Command::FindWeyl(c) | Command::Report(c) => c.out.as_ref(),
        Command::Sw(a) => a.common.out.as_ref(),
        Command::Formulas(f) => f.out.as_ref(),
    }
}

/// Runs a parsed command, writes the report, returns the exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let outcome = match &cli.command {
        Command::CountCwp(c) => cmd_count_cwp(c)?,
        Command::Chern(c) => cmd_chern(c)?,
        Command::FindWeyl(c) => cmd_find_weyl(c)?,
        Command::Sw(a) => cmd_sw(a)?,
        Command::Formulas(f) => cmd_formulas(f)?,
        Command::Report(c) => cmd_report(c)?,
    };
    let text = serde_json::to_string_pretty(&outcome.report)? + "\n";
    match out_path(&cli.command) {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(outcome.exit)
}

/// Variables of a family, for messages.
pub fn param_names(fam: &MatrixFamily) -> Vec<&'static str> {
    fam.params().iter().map(|v: &Var| v.name()).collect()
}
