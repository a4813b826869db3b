//! The `dga` command line: parses presentations, runs one computation and
//! writes a versioned JSON report.
//!
//! Exit codes: 0 on success, 1 for invalid input or a failed check, 2 when
//! two independent computations disagree.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use dga_core::derived::ext_window;
use dga_core::dimension::{gd, gd_cutoff, pd, DEFAULT_CUTOFF};
use dga_core::module::DgModule;
use dga_core::presentation::{normalize, parse, parse_designator, AlgebraPresentation, Document};
use dga_core::verify::{self, CheckReport, RandomSpec};
use dga_core::{DgAlgebra, Field, FieldSpec, PrimeField, Rationals};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "dga-report/1";

#[derive(Parser, Debug)]
#[command(name = "dga", version, about = "Derived invariants of finite-dimensional dg quiver algebras")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Coefficient field, `Q` or `F<p>`; overrides the presentation.
    #[arg(long, global = true)]
    pub field: Option<String>,
    /// Largest projective dimension to certify before reporting a lower bound.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub cutoff: Option<i64>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Write the report here instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and normalize a presentation.
    Validate { file: PathBuf },
    /// The degree-zero cohomology algebra.
    H0 { file: PathBuf },
    /// Cohomology of a module, by degree and vertex.
    Cohomology {
        file: PathBuf,
        #[arg(long, default_value = "regular")]
        module: String,
    },
    /// Dimensions of Ext^n(from, to) over a window.
    Ext {
        file: PathBuf,
        #[arg(long, default_value = "simples_sum")]
        from: String,
        #[arg(long, default_value = "simples_sum")]
        to: String,
        /// Inclusive window `a..b`.
        #[arg(long, default_value = "0..8", allow_hyphen_values = true)]
        range: String,
    },
    /// Projective dimension of a module.
    Pd {
        file: PathBuf,
        #[arg(long, default_value = "simples_sum")]
        module: String,
    },
    /// Global dimension.
    Gd { file: PathBuf },
    /// Run a property check on seeded random instances.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    pub check: Check,
    #[arg(long, default_value_t = 5)]
    pub max_vertices: usize,
    #[arg(long, default_value_t = 6)]
    pub max_arrows: usize,
    #[arg(long, default_value_t = 3)]
    pub d_max: i64,
    #[arg(long, default_value_t = 40)]
    pub relation_density: u8,
    #[arg(long, default_value_t = 60)]
    pub differential_density: u8,
    /// Allow oriented cycles.
    #[arg(long)]
    pub cyclic: bool,
    /// All arrows in degree 0 with zero differential.
    #[arg(long)]
    pub trivial_grading: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    TriangleBound,
    TensorBound,
    HomTheorem,
    AcyclicBound,
    ClassicalRegression,
}

impl Check {
    fn default_trials(self) -> u64 {
        match self {
            Check::TriangleBound | Check::AcyclicBound => 100,
            Check::TensorBound => 50,
            Check::HomTheorem | Check::ClassicalRegression => 20,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Check::TriangleBound => "triangle-bound",
            Check::TensorBound => "tensor-bound",
            Check::HomTheorem => "hom-theorem",
            Check::AcyclicBound => "acyclic-bound",
            Check::ClassicalRegression => "classical-regression",
        }
    }
}

/// Failure of a run, carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("dga: {}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command, writes its output and returns the exit code.
pub fn execute(cli: &Cli) -> Result<i32, Failure> {
    let start = Instant::now();
    let outcome = compute(cli).map_err(classify)?;
    let text = match cli.global.format {
        Format::Json => {
            let report = envelope(&outcome, start.elapsed().as_millis() as u64);
            serde_json::to_string_pretty(&report).expect("json") + "\n"
        }
        Format::Csv => outcome.csv.clone().ok_or_else(|| Failure {
            code: 1,
            message: format!("csv output is only available for `ext` and `cohomology`, not `{}`", outcome.command),
        })?,
    };
    match &cli.global.out {
        Some(path) => std::fs::write(path, text).map_err(|e| Failure { code: 1, message: format!("{}: {e}", path.display()) })?,
        None => print!("{text}"),
    }
    Ok(outcome.exit_code)
}

fn classify(e: anyhow::Error) -> Failure {
    let code = match e.downcast_ref::<dga_core::Error>() {
        Some(dga_core::Error::Consistency(_)) => 2,
        _ => 1,
    };
    Failure { code, message: format!("{e:#}") }
}

/// What a command computed, before it is wrapped in a report.
pub struct Outcome {
    pub command: &'static str,
    pub arguments: Value,
    pub input: Option<(String, String)>,
    pub field: FieldSpec,
    pub result: Value,
    pub csv: Option<String>,
    pub exit_code: i32,
}

fn envelope(o: &Outcome, millis: u64) -> Value {
    json!({
        "schema": SCHEMA,
        "tool": { "name": "dga", "version": env!("CARGO_PKG_VERSION") },
        "command": o.command,
        "arguments": o.arguments,
        "input": o.input.as_ref().map(|(file, hash)| json!({ "file": file, "sha256": hash })),
        "field": o.field.to_string(),
        "result": o.result,
        "timing": { "wall_clock_ms": millis },
    })
}

struct Input {
    path: String,
    hash: String,
    presentation: AlgebraPresentation,
}

fn read_algebra(path: &Path) -> anyhow::Result<Input> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    let src = String::from_utf8(bytes.clone()).map_err(|_| anyhow!("{}: not valid UTF-8", path.display()))?;
    let doc = parse(&src).map_err(|e| anyhow!("{}:{e}", path.display()))?;
    let Document::Algebra(presentation) = doc else {
        bail!("{}: expected an algebra presentation, found a module", path.display());
    };
    Ok(Input { path: path.display().to_string(), hash: hex::encode(Sha256::digest(&bytes)), presentation })
}

fn field_for(global: &Global, presentation: Option<&AlgebraPresentation>) -> anyhow::Result<FieldSpec> {
    match &global.field {
        Some(s) => FieldSpec::parse(s).ok_or_else(|| anyhow!("unknown field `{s}` (expected Q or F<p> with p prime < 2^31)")),
        None => Ok(presentation.map_or(FieldSpec::Rational, |p| p.field)),
    }
}

/// Calls `$body` with `$f` bound to a concrete field for `$spec`.
macro_rules! with_field {
    ($spec:expr, |$f:ident| $body:expr) => {
        match $spec {
            FieldSpec::Rational => {
                let $f = Rationals;
                $body
            }
            FieldSpec::Prime(p) => {
                let $f = PrimeField::new(p);
                $body
            }
        }
    };
}

fn compute(cli: &Cli) -> anyhow::Result<Outcome> {
    let g = &cli.global;
    if let Command::Verify(args) = &cli.command {
        let field = field_for(g, None)?;
        let trials = g.trials.unwrap_or_else(|| args.check.default_trials());
        let spec = RandomSpec {
            seed: g.seed,
            max_vertices: args.max_vertices,
            max_arrows: args.max_arrows,
            d_max: args.d_max,
            relation_density: args.relation_density,
            differential_density: args.differential_density,
            acyclic: !args.cyclic,
            trivial_grading: args.trivial_grading,
            field,
        };
        let report = with_field!(field, |f| run_check(args.check, &spec, trials, f, g.cutoff))?;
        let exit_code = if report.is_success() { 0 } else { 1 };
        return Ok(Outcome {
            command: "verify",
            arguments: json!({ "check": args.check.name(), "trials": trials, "seed": g.seed, "cutoff": g.cutoff }),
            input: None,
            field,
            result: serde_json::to_value(&report)?,
            csv: None,
            exit_code,
        });
    }
    let file = match &cli.command {
        Command::Validate { file }
        | Command::H0 { file }
        | Command::Cohomology { file, .. }
        | Command::Ext { file, .. }
        | Command::Pd { file, .. }
        | Command::Gd { file } => file,
        Command::Verify(_) => unreachable!("handled above"),
    };
    let input = read_algebra(file)?;
    let field = field_for(g, Some(&input.presentation))?;
    let (command, arguments, result, csv) = with_field!(field, |f| algebra_command(cli, &input.presentation, f))?;
    Ok(Outcome { command, arguments, input: Some((input.path, input.hash)), field, result, csv, exit_code: 0 })
}

fn run_check<F: Field>(check: Check, spec: &RandomSpec, trials: u64, f: F, cutoff: Option<i64>) -> anyhow::Result<CheckReport> {
    Ok(match check {
        Check::TriangleBound => verify::check_triangle_bound(spec, trials, f)?,
        Check::TensorBound => verify::check_tensor_bound(spec, trials, f)?,
        Check::HomTheorem => verify::check_hom_theorem(spec, trials, f, cutoff)?,
        Check::AcyclicBound => verify::check_acyclic_bound(spec, trials, f)?,
        Check::ClassicalRegression => verify::classical_regression(spec, trials, f)?,
    })
}

type Computed = (&'static str, Value, Value, Option<String>);

fn algebra_command<F: Field>(cli: &Cli, p: &AlgebraPresentation, f: F) -> anyhow::Result<Computed> {
    let a = Arc::new(normalize(p, f.clone())?);
    let cutoff = cli.global.cutoff;
    Ok(match &cli.command {
        Command::Validate { .. } => ("validate", json!({}), describe(&a), None),
        Command::H0 { .. } => ("h0", json!({}), h0(&a)?, None),
        Command::Cohomology { module, .. } => {
            let m = load_module(&a, module)?;
            let mut rows = Vec::new();
            let mut csv = String::from("degree,vertex,dim\n");
            for ((deg, v), n) in m.cohomology_by_vertex() {
                let name = &a.vertices()[v];
                rows.push(json!({ "degree": deg, "vertex": name, "dim": n }));
                let _ = writeln!(csv, "{deg},{name},{n}");
            }
            let by_degree: Map<String, Value> = m.cohomology_dims().into_iter().map(|(d, n)| (d.to_string(), json!(n))).collect();
            let result = json!({ "module": module, "dim": m.dim(), "by_degree": by_degree, "by_vertex": rows });
            ("cohomology", json!({ "module": module }), result, Some(csv))
        }
        Command::Ext { from, to, range, .. } => {
            let (lo, hi) = parse_range(range)?;
            let x = load_module(&a, from)?;
            let y = load_module(&a, to)?;
            let t = ext_window(&x, &y, lo, hi)?;
            let mut csv = String::from("degree,dim\n");
            for (n, d) in &t.dims {
                let _ = writeln!(csv, "{n},{d}");
            }
            let dims: Map<String, Value> = t.dims.iter().map(|(n, d)| (n.to_string(), json!(d))).collect();
            let cochains: Map<String, Value> = t.cochain_dims.iter().map(|(n, d)| (n.to_string(), json!(d))).collect();
            let result = json!({ "window": [lo, hi], "dims": dims, "cochain_dims": cochains, "nonzero_degrees": t.nonzero_degrees() });
            ("ext", json!({ "from": from, "to": to, "range": [lo, hi] }), result, Some(csv))
        }
        Command::Pd { module, .. } => {
            let x = load_module(&a, module)?;
            let (c, provenance, warnings) = module_cutoff(&a, &x, cutoff);
            let r = pd(&x, c)?;
            let result = json!({
                "value": r.value,
                "cutoff": c,
                "cutoff_provenance": provenance,
                "normalization_shift": r.normalization_shift,
                "witness": r.witness,
                "warnings": warnings,
            });
            ("pd", json!({ "module": module, "cutoff": cutoff }), result, None)
        }
        Command::Gd { .. } => {
            let r = gd(&a, cutoff)?;
            let ext: Map<String, Value> = r.ext_diagnostic.dims.iter().map(|(n, d)| (n.to_string(), json!(d))).collect();
            let result = json!({
                "value": r.value,
                "cutoff": r.cutoff,
                "cutoff_provenance": r.provenance,
                "warnings": r.warnings,
                "witness": r.pd_of_simples.witness,
                "ext_simples": ext,
            });
            ("gd", json!({ "cutoff": cutoff }), result, None)
        }
        Command::Verify(_) => unreachable!("verify has no input file"),
    })
}

/// Cutoff for `pd x`: `l(d+1) - bottom(x)` bounds it on an acyclic quiver.
fn module_cutoff<F: Field>(a: &DgAlgebra<F>, x: &DgModule<F>, user: Option<i64>) -> (i64, &'static str, Vec<String>) {
    if let Some(c) = user {
        return (c, "user", Vec::new());
    }
    let (g, _, _) = gd_cutoff(a, Some(DEFAULT_CUTOFF));
    if a.quiver_is_acyclic() {
        ((g - x.bottom_cohomology().unwrap_or(0)).max(0), "acyclic_bound", Vec::new())
    } else {
        (
            DEFAULT_CUTOFF,
            "default",
            vec![format!("quiver has oriented cycles and no cutoff was given; answers above {DEFAULT_CUTOFF} are reported as lower bounds")],
        )
    }
}

fn describe<F: Field>(a: &DgAlgebra<F>) -> Value {
    let degrees: Map<String, Value> = {
        let mut m = Map::new();
        for pc in a.basis() {
            let e = m.entry(pc.degree.to_string()).or_insert(json!(0));
            *e = json!(e.as_u64().unwrap_or(0) + 1);
        }
        m
    };
    json!({
        "valid": true,
        "vertices": a.vertices(),
        "arrows": a.arrows().iter().map(|x| json!({
            "name": x.name, "source": a.vertices()[x.source], "target": a.vertices()[x.target], "degree": x.degree,
        })).collect::<Vec<_>>(),
        "dim": a.dim(),
        "dims_by_degree": degrees,
        "basis": a.basis().iter().map(|b| b.label.clone()).collect::<Vec<_>>(),
        "amplitude": a.amplitude(),
        "acyclic": a.quiver_is_acyclic(),
        "max_path_length": a.quiver_max_path_length(),
        "truncation": a.truncation(),
    })
}

fn h0<F: Field>(a: &DgAlgebra<F>) -> anyhow::Result<Value> {
    let h = dga_core::algebra::h0_algebra(a)?;
    let f = a.field();
    let mut products = Vec::new();
    for (i, row) in h.products.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if v.is_empty() {
                continue;
            }
            let terms: Vec<Value> = v.iter().map(|(k, c)| json!([f.format(c), h.basis_labels[*k]])).collect();
            products.push(json!({ "left": h.basis_labels[i], "right": h.basis_labels[j], "terms": terms }));
        }
    }
    Ok(json!({
        "dim": h.dim(),
        "basis": h.basis_labels,
        "radical_dim": h.radical_dim,
        "nilpotency_index": h.nilpotency_index,
        "products": products,
    }))
}

/// A designator such as `simple(1)`, or a file holding a module presentation.
fn load_module<F: Field>(a: &Arc<DgAlgebra<F>>, spec: &str) -> anyhow::Result<DgModule<F>> {
    let path = Path::new(spec);
    if path.is_file() {
        let src = std::fs::read_to_string(path).with_context(|| format!("cannot read {spec}"))?;
        return match parse(&src).map_err(|e| anyhow!("{spec}:{e}"))? {
            Document::Module(m) => Ok(DgModule::from_presentation(a.clone(), &m)?),
            Document::Algebra(_) => bail!("{spec}: expected a module presentation"),
        };
    }
    let d = parse_designator(spec).map_err(|e| anyhow!("module `{spec}`: {e}"))?;
    Ok(DgModule::from_designator(a.clone(), &d)?)
}

/// Parses an inclusive window `a..b`.
pub fn parse_range(s: &str) -> anyhow::Result<(i64, i64)> {
    let (lo, hi) = s.split_once("..").ok_or_else(|| anyhow!("range `{s}` is not of the form a..b"))?;
    let lo: i64 = lo.trim().parse().map_err(|_| anyhow!("range `{s}`: bad lower end"))?;
    let hi: i64 = hi.trim().parse().map_err(|_| anyhow!("range `{s}`: bad upper end"))?;
    if lo > hi {
        bail!(dga_core::Error::InvalidWindow(lo, hi));
    }
    Ok((lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges() {
        assert_eq!(parse_range("0..8").unwrap(), (0, 8));
        assert_eq!(parse_range("-2..3").unwrap(), (-2, 3));
        assert!(parse_range("3..1").is_err());
        assert!(parse_range("3").is_err());
    }

    #[test]
    fn consistency_errors_exit_with_two() {
        let e = anyhow::Error::from(dga_core::Error::Consistency("x".into()));
        assert_eq!(classify(e).code, 2);
        let e = anyhow::Error::from(dga_core::Error::InvalidCutoff(-1));
        assert_eq!(classify(e).code, 1);
    }
}
