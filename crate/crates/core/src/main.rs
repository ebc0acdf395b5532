use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use serde_json::{json, Value};

use bendlab::acceptance;
use bendlab::bending::{self, Rep, Word};
use bendlab::certify::{self, CertifyOptions};
use bendlab::config::{self, FieldFile, InstanceFile};
use bendlab::error::Error;
use bendlab::forms;
use bendlab::io;
use bendlab::par::Exec;
use bendlab::pipeline::{self, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_OK};
use bendlab::projgeom::{self, CuspModel, CuspType, Domain, ProjPoint};
use bendlab::rational::Rational;
use bendlab::units::{self, UnitSearchProblem};

#[derive(Parser)]
#[command(name = "bendlab", version, about = "Exact computations for thin subgroups obtained by bending")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Special units and unit ranks.
    #[command(subcommand)]
    Units(UnitsCmd),
    /// Exact SO/SU membership.
    #[command(subcommand)]
    Forms(FormsCmd),
    /// Bend a representation and verify the result.
    #[command(subcommand)]
    Bend(BendCmd),
    /// Hilbert distances, cusp figures and orbit ranks.
    #[command(subcommand)]
    Projgeom(ProjgeomCmd),
    /// Thinness certificates for an instance.
    #[command(subcommand)]
    Certify(CertifyCmd),
    /// Run every stage from a pipeline config.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the acceptance suite and compare golden files.
    Selftest {
        /// Only criteria whose name or tags contain this word.
        #[arg(long)]
        filter: Option<String>,
        /// Directory of golden files (defaults to the bundled one).
        #[arg(long)]
        golden: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum UnitsCmd {
    /// Search for a unit with identity embedding above the threshold and all
    /// other embeddings in (0, 1).
    Find {
        #[arg(long)]
        field: PathBuf,
        #[arg(long, default_value = "10")]
        threshold: String,
        #[command(flatten)]
        out: OutArg,
    },
    /// Place counts and Dirichlet ranks of `L = F(s)`.
    Rank {
        #[arg(long)]
        field: PathBuf,
        /// Coefficients of `u`, comma separated.
        #[arg(long)]
        u: String,
        #[command(flatten)]
        out: OutArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    So,
    Su,
}

#[derive(Subcommand)]
enum FormsCmd {
    Check {
        /// TOML with `[field]`, `[form]` and, for `su`, `[extension]`.
        #[arg(long)]
        form: PathBuf,
        /// JSON matrix.
        #[arg(long)]
        matrix: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
    },
}

#[derive(Subcommand)]
enum BendCmd {
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    Verify {
        /// Representation written by `bend run`.
        #[arg(long)]
        rep: PathBuf,
        /// TOML with `[field]`, `[form]` and `[extension]`.
        #[arg(long)]
        form: PathBuf,
        /// TOML with `relators = [...]`.
        #[arg(long)]
        relators: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DomainKind {
    Segment,
    Klein,
    Omega0,
    Omega1,
}

#[derive(Subcommand)]
enum ProjgeomCmd {
    /// Certified Hilbert distances for pairs of points.
    Dist {
        #[arg(long, value_enum)]
        domain: DomainKind,
        /// JSON list of `[x, y]` pairs of homogeneous coordinates.
        #[arg(long)]
        points: Option<PathBuf>,
        #[arg(long, default_value_t = 53)]
        precision: u32,
        /// Klein form coefficients, comma separated.
        #[arg(long, default_value = "1,1")]
        alphas: String,
        #[arg(long, default_value = "-1", allow_hyphen_values = true)]
        lo: String,
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        hi: String,
        /// Dimension for the cusp domains.
        #[arg(long, default_value_t = 2)]
        n: usize,
        /// Write a 2-D section of the cusp domain with horosphere leaves.
        #[arg(long)]
        emit_svg: Option<PathBuf>,
        #[arg(long)]
        sequential: bool,
    },
    /// Rank of the orbit map of the closure of the type-1 parabolic group.
    Orbit {
        #[arg(long)]
        n: usize,
        /// Homogeneous coordinates, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
}

#[derive(Subcommand)]
enum CertifyCmd {
    Run {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        prime: Option<u64>,
        #[arg(long, default_value_t = 6)]
        word_cap: usize,
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        sequential: bool,
    },
}

#[derive(Args)]
struct OutArg {
    /// Write the JSON here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// An error plus the exit code it maps to.
struct Failure {
    stage: &'static str,
    error: Error,
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self.error {
            Error::Parse(_) | Error::Config(_) | Error::Io(_) => EXIT_CONFIG,
            _ if self.stage == "config" => EXIT_CONFIG,
            _ => EXIT_CHECK_FAILED,
        }
    }
}

type CmdResult = Result<i32, Failure>;

fn at(stage: &'static str) -> impl Fn(Error) -> Failure {
    move |error| Failure { stage, error }
}

fn emit(out: Option<&Path>, v: &Value) -> Result<(), Failure> {
    let bytes = pipeline::to_bytes(v);
    match out {
        Some(p) => pipeline::write_atomic(p, &bytes).map_err(at("output")),
        None => {
            print!("{}", String::from_utf8_lossy(&bytes));
            Ok(())
        }
    }
}

fn read_json(path: &Path, what: &str) -> Result<Value, Failure> {
    let bytes = config::read_file(path).map_err(at("config"))?;
    config::parse_json(&bytes, what).map_err(at("config"))
}

fn rationals(list: &str) -> Result<Vec<Rational>, Failure> {
    list.split(',')
        .map(|s| io::parse_rational(s.trim()))
        .collect::<bendlab::Result<Vec<_>>>()
        .map_err(at("config"))
}

fn units_cmd(cmd: UnitsCmd) -> CmdResult {
    match cmd {
        UnitsCmd::Find { field, threshold, out } => {
            let file = FieldFile::load(&field).map_err(at("config"))?;
            let f = file.field.build().map_err(at("config"))?;
            let threshold = io::parse_rational(&threshold).map_err(at("config"))?;
            let fundamentals = file.field.units(&f).map_err(at("config"))?;
            let prob = if fundamentals.is_empty() && f.degree() == 2 {
                UnitSearchProblem::quadratic(f, threshold.clone())
            } else {
                UnitSearchProblem::new(f, fundamentals, threshold.clone())
            }
            .map_err(at("units"))?;
            let su = units::find_special_unit(&prob).map_err(at("units"))?;
            let report = serde_json::to_value(su.report(&threshold, prob.evidence_bits)).unwrap();
            emit(out.out.as_deref(), &report)?;
        }
        UnitsCmd::Rank { field, u, out } => {
            let f = FieldFile::load(&field).and_then(|f| f.field.build()).map_err(at("config"))?;
            let coeffs = rationals(&u)?;
            let u = f.element(coeffs);
            let ext = units::build_extension(f, u).map_err(at("config"))?;
            let report = units::unit_rank_report(&ext).map_err(at("units"))?;
            emit(out.out.as_deref(), &serde_json::to_value(report).unwrap())?;
        }
    }
    Ok(EXIT_OK)
}

fn forms_cmd(cmd: FormsCmd) -> CmdResult {
    let FormsCmd::Check { form, matrix, mode } = cmd;
    let file = InstanceFile::load(&form).map_err(at("config"))?;
    let field = file.field().map_err(at("config"))?;
    let j = file.form(&field).map_err(at("config"))?;
    let m = read_json(&matrix, "matrix file")?;
    let member = match mode {
        Mode::So => {
            let a = io::matrix_from_json(&m, |v| io::element_from_json(&field, v)).map_err(at("config"))?;
            forms::so_membership_base(&field, &a, &j).map_err(at("forms"))?
        }
        Mode::Su => {
            let ext = file.extension(field).map_err(at("config"))?;
            let a = io::ext_matrix_from_json(&ext, &m).map_err(at("config"))?;
            forms::su_membership(&ext, &a, &j).map_err(at("forms"))?
        }
    };
    let mode = match mode {
        Mode::So => "so",
        Mode::Su => "su",
    };
    emit(None, &json!({"mode": mode, "member": member}))?;
    Ok(if member { EXIT_OK } else { EXIT_CHECK_FAILED })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RelatorsFile {
    relators: Vec<String>,
}

fn bend_cmd(cmd: BendCmd) -> CmdResult {
    match cmd {
        BendCmd::Run { instance, out } => {
            let (ext, inst) = InstanceFile::load(&instance)
                .and_then(|f| f.instance())
                .map_err(at("config"))?;
            let rep = bending::bend(&ext, &inst).map_err(at("bend"))?;
            let su = bending::verify_su_containment(&ext, &rep, &inst.form).map_err(at("verify"))?;
            emit(Some(&out), &pipeline::rep_file_json(&ext, &rep))?;
            emit(None, &json!({"rep": out.display().to_string(), "su_containment": su}))?;
            Ok(if su.passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        BendCmd::Verify { rep, form, relators } => {
            let file = InstanceFile::load(&form).map_err(at("config"))?;
            let field = file.field().map_err(at("config"))?;
            let j = file.form(&field).map_err(at("config"))?;
            let ext = file.extension(field).map_err(at("config"))?;
            let v = read_json(&rep, "representation file")?;
            let names: Vec<String> = serde_json::from_value(v["generators"].clone())
                .map_err(|e| Failure { stage: "config", error: Error::Parse(format!("generators: {e}")) })?;
            let mut images = Vec::new();
            for g in names {
                let m = io::ext_matrix_from_json(&ext, &v["images"][&g]).map_err(at("config"))?;
                images.push((g, m));
            }
            let rep = Rep { images };
            let text = String::from_utf8(config::read_file(&relators).map_err(at("config"))?)
                .map_err(|_| Failure { stage: "config", error: Error::Parse("relators file is not UTF-8".into()) })?;
            let rels: RelatorsFile = toml::from_str(&text)
                .map_err(|e| Failure { stage: "config", error: Error::Config(e.message().to_string()) })?;
            let words = rels
                .relators
                .iter()
                .map(|w| Word::parse(w))
                .collect::<bendlab::Result<Vec<_>>>()
                .map_err(at("config"))?;
            let rel = bending::verify_relators(&ext, &rep, &words).map_err(at("verify"))?;
            let su = bending::verify_su_containment(&ext, &rep, &j).map_err(at("verify"))?;
            let ok = rel.passed() && su.passed();
            emit(None, &json!({"relators": rel, "su_containment": su, "passed": ok}))?;
            Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
    }
}

fn point_from_json(v: &Value) -> Result<ProjPoint, Failure> {
    let coords = v
        .as_array()
        .ok_or_else(|| Failure { stage: "config", error: Error::Parse(format!("expected coordinates, got {v}")) })?
        .iter()
        .map(io::rational_from_json)
        .collect::<bendlab::Result<Vec<_>>>()
        .map_err(at("config"))?;
    ProjPoint::new(coords).map_err(at("config"))
}

#[allow(clippy::too_many_arguments)]
fn dist_cmd(
    kind: DomainKind,
    points: Option<PathBuf>,
    precision: u32,
    alphas: &str,
    lo: &str,
    hi: &str,
    n: usize,
    emit_svg: Option<PathBuf>,
    sequential: bool,
) -> CmdResult {
    let domain = match kind {
        DomainKind::Segment => Domain::Segment {
            lo: io::parse_rational(lo).map_err(at("config"))?,
            hi: io::parse_rational(hi).map_err(at("config"))?,
        },
        DomainKind::Klein => Domain::Klein { alphas: rationals(alphas)? },
        DomainKind::Omega0 => CuspModel::new(CuspType::Zero, n).map_err(at("config"))?.domain(),
        DomainKind::Omega1 => CuspModel::new(CuspType::One, n).map_err(at("config"))?.domain(),
    };
    if let Some(path) = emit_svg {
        let kind = match kind {
            DomainKind::Omega0 => CuspType::Zero,
            DomainKind::Omega1 => CuspType::One,
            _ => {
                return Err(Failure {
                    stage: "config",
                    error: Error::Config("--emit-svg needs omega0 or omega1".into()),
                })
            }
        };
        let model = CuspModel::new(kind, 2).map_err(at("config"))?;
        let svg = projgeom::cusp_svg(&model, &[0.25, 0.5, 1.0, 2.0]);
        pipeline::write_atomic(&path, svg.as_bytes()).map_err(at("output"))?;
    }
    let Some(points) = points else {
        return Ok(EXIT_OK);
    };
    let v = read_json(&points, "points file")?;
    let pairs = v
        .as_array()
        .ok_or_else(|| Failure { stage: "config", error: Error::Parse("points file must be a list of pairs".into()) })?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([x, y]) => Ok((point_from_json(x)?, point_from_json(y)?)),
            _ => Err(Failure { stage: "config", error: Error::Parse(format!("expected a pair, got {pair}")) }),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let exec = if sequential { Exec::Sequential } else { Exec::Parallel };
    let out = projgeom::hilbert_batch(&domain, &pairs, precision, exec)
        .into_iter()
        .map(|r| {
            r.map(|iv| serde_json::to_value(bendlab::interval::IntervalRecord::from(&iv)).unwrap())
        })
        .collect::<bendlab::Result<Vec<_>>>()
        .map_err(at("projgeom"))?;
    emit(None, &json!({"domain": domain.name(), "precision": precision, "distances": out}))?;
    Ok(EXIT_OK)
}

fn projgeom_cmd(cmd: ProjgeomCmd) -> CmdResult {
    match cmd {
        ProjgeomCmd::Dist {
            domain,
            points,
            precision,
            alphas,
            lo,
            hi,
            n,
            emit_svg,
            sequential,
        } => dist_cmd(domain, points, precision, &alphas, &lo, &hi, n, emit_svg, sequential),
        ProjgeomCmd::Orbit { n, point } => {
            let x = ProjPoint::new(rationals(&point)?).map_err(at("config"))?;
            let r = projgeom::orbit_openness(&x, n).map_err(at("projgeom"))?;
            emit(None, &serde_json::to_value(r).unwrap())?;
            Ok(EXIT_OK)
        }
    }
}

fn certify_cmd(cmd: CertifyCmd) -> CmdResult {
    let CertifyCmd::Run {
        instance,
        prime,
        word_cap,
        report,
        sequential,
    } = cmd;
    let bytes = config::read_file(&instance).map_err(at("config"))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| Failure { stage: "config", error: Error::Parse("instance is not UTF-8".into()) })?;
    let (ext, inst) = InstanceFile::parse(&text)
        .and_then(|f| f.instance())
        .map_err(at("config"))?;
    let opts = CertifyOptions {
        word_cap,
        prime,
        exec: if sequential { Exec::Sequential } else { Exec::Parallel },
        ..CertifyOptions::default()
    };
    let thin = certify::thinness_report(&ext, &inst, &opts).map_err(at("certify"))?;
    let v = json!({
        "tool": {"name": "bendlab", "version": env!("CARGO_PKG_VERSION")},
        "instance": {"path": instance.display().to_string(), "sha256": pipeline::sha256_hex(&bytes)},
        "parameters": {"word_cap": word_cap, "prime": prime, "proximal_word_length": opts.proximal_word_length},
        "extension": pipeline::extension_json(&ext),
        "report": thin,
    });
    emit(Some(&report), &v)?;
    println!("{}", thin.summary);
    Ok(EXIT_OK)
}

fn selftest(filter: Option<String>, golden: Option<PathBuf>) -> CmdResult {
    let results = acceptance::run(filter.as_deref());
    let mut ok = true;
    for r in &results {
        println!("{}", r.line());
        ok &= r.passed;
    }
    if filter.is_none() || golden.is_some() {
        let dir = golden.unwrap_or_else(acceptance::golden_dir);
        for (name, outcome) in acceptance::check_goldens(&dir) {
            match outcome {
                Ok(()) => println!("[PASS] golden {name}"),
                Err(e) => {
                    ok = false;
                    println!("[FAIL] golden {name}  {e}");
                }
            }
        }
    }
    println!("{}", if ok { "selftest passed" } else { "selftest FAILED" });
    Ok(if ok { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Units(c) => units_cmd(c),
        Command::Forms(c) => forms_cmd(c),
        Command::Bend(c) => bend_cmd(c),
        Command::Projgeom(c) => projgeom_cmd(c),
        Command::Certify(c) => certify_cmd(c),
        Command::Pipeline { config } => {
            let outcome = pipeline::run_pipeline_file(&config);
            if let Some(e) = &outcome.error {
                eprintln!("{}", e.to_json());
            }
            Ok(outcome.exit_code)
        }
        Command::Selftest { filter, golden } => selftest(filter, golden),
    };
    let code = match result {
        Ok(code) => code,
        Err(f) => {
            let code = f.exit_code();
            let err = json!({
                "error": f.error.kind(),
                "message": f.error.to_string(),
                "stage": f.stage,
                "exit_code": code,
            });
            eprintln!("{err}");
            code
        }
    };
    ExitCode::from(code as u8)
}
