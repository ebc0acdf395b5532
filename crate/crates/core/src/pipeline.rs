//! End-to-end run: unit search (or override), extension, bending, exact
//! verification and certification, with deterministic JSON reports.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::bending::{self, Rep};
use crate::certificate::Verdict;
use crate::certify::{self, CertifyOptions};
use crate::config::{self, FieldFile, PipelineConfig};
use crate::error::{Error, Result};
use crate::io;
use crate::numfield::{LPlace, NumberField, QuadExtension};
use crate::par::Exec;
use crate::rational;
use crate::units::{self, UnitSearchProblem};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Pretty JSON with a trailing newline; object keys are sorted, so equal
/// values give identical bytes.
pub fn to_bytes(v: &Value) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(v).expect("json values serialize");
    out.push(b'\n');
    out
}

/// Writes through a sibling temporary file and a rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err)?;
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}

/// A failure tagged with the exit code it maps to.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub error: Error,
}

impl StageError {
    pub fn exit_code(&self) -> i32 {
        match self.stage {
            "config" => EXIT_CONFIG,
            _ => EXIT_CHECK_FAILED,
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "error": self.error.kind(),
            "message": self.error.to_string(),
            "stage": self.stage,
            "exit_code": self.exit_code(),
        })
    }
}

fn at(stage: &'static str) -> impl Fn(Error) -> StageError {
    move |error| StageError { stage, error }
}

pub struct PipelineRun {
    pub report: Value,
    pub rep: Value,
    pub hard_checks_passed: bool,
}

impl PipelineRun {
    pub fn exit_code(&self) -> i32 {
        if self.hard_checks_passed {
            EXIT_OK
        } else {
            EXIT_CHECK_FAILED
        }
    }
}

fn field_json(f: &NumberField) -> Value {
    json!({
        "min_poly": f.min_poly().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
        "identity": f.identity_index(),
        "degree": f.degree(),
        "discriminant": f.discriminant().to_string(),
    })
}

pub fn extension_json(ext: &QuadExtension) -> Value {
    let places: Vec<Value> = ext
        .places()
        .iter()
        .map(|p| match p {
            LPlace::Real { base, sign } => json!({"kind": "real", "base": base, "sign": sign}),
            LPlace::Complex { base } => json!({"kind": "complex", "base": base}),
        })
        .collect();
    json!({
        "u": io::element_to_json(ext.u()),
        "disc": io::element_to_json(ext.disc()),
        "places": places,
    })
}

/// Bent representation file: enough to rebuild `L` and the matrices.
pub fn rep_file_json(ext: &QuadExtension, rep: &Rep) -> Value {
    let mut v = rep.to_json();
    let obj = v.as_object_mut().expect("rep json is an object");
    obj.insert("field".into(), field_json(ext.base()));
    obj.insert("extension".into(), extension_json(ext));
    v
}

/// Runs every stage and builds the report without touching the disk
/// beyond reading inputs.
pub fn execute(cfg: &PipelineConfig, config_bytes: &[u8]) -> std::result::Result<PipelineRun, StageError> {
    let cfg_err = at("config");
    let mut hashes = Map::new();
    hashes.insert("config".into(), sha256_hex(config_bytes).into());
    let mut read = |key: &str, p: &Path| -> std::result::Result<Vec<u8>, StageError> {
        let bytes = config::read_file(&cfg.resolve(p)).map_err(at("config"))?;
        hashes.insert(key.to_string(), sha256_hex(&bytes).into());
        Ok(bytes)
    };
    let field_bytes = read("field", &cfg.inputs.field)?;
    let gen_bytes = read("generators", &cfg.inputs.generators)?;
    let dec_bytes = read("decomposition", &cfg.inputs.decomposition)?;

    let text = |b: &[u8]| String::from_utf8(b.to_vec()).map_err(|_| Error::Parse("input is not UTF-8".into()));
    let field_file = FieldFile::parse(&text(&field_bytes).map_err(&cfg_err)?).map_err(&cfg_err)?;
    let field = field_file.field.build().map_err(&cfg_err)?;
    let form = config::build_form(&field, &cfg.parameters.alphas).map_err(&cfg_err)?;
    let threshold = io::rational_from_json(&serde_json::to_value(&cfg.parameters.threshold).unwrap()).map_err(&cfg_err)?;

    let (u, unit_section) = match &cfg.parameters.unit_override {
        Some(v) => {
            let u = io::element_from_json(&field, &serde_json::to_value(v).unwrap()).map_err(&cfg_err)?;
            let sec = json!({"source": "override", "u": io::element_to_json(&u)});
            (u, sec)
        }
        None => {
            let fundamentals = field_file.field.units(&field).map_err(&cfg_err)?;
            let prob = if fundamentals.is_empty() && field.degree() == 2 {
                UnitSearchProblem::quadratic(field.clone(), threshold.clone())
            } else {
                UnitSearchProblem::new(field.clone(), fundamentals, threshold.clone())
            }
            .map_err(&cfg_err)?;
            let special = units::find_special_unit(&prob).map_err(&cfg_err)?;
            let report = serde_json::to_value(special.report(&threshold, prob.evidence_bits)).unwrap();
            (special.u, json!({"source": "search", "special_unit": report}))
        }
    };
    let ext = units::build_extension(field, u).map_err(&cfg_err)?;
    let generators = config::parse_json(&gen_bytes, "generators file").map_err(&cfg_err)?;
    let generators = generators
        .as_object()
        .ok_or_else(|| Error::Parse("generators file must be an object".into()))
        .map_err(&cfg_err)?
        .iter()
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    let dec = config::load_decomposition(&text(&dec_bytes).map_err(&cfg_err)?).map_err(&cfg_err)?;
    let bend_unit = cfg.parameters.bend_unit.as_ref().map(|v| serde_json::to_value(v).unwrap());
    let inst = config::assemble(&ext, form, &generators, &dec, bend_unit).map_err(&cfg_err)?;
    let rank = units::unit_rank_report(&ext).ok();

    let rep = bending::bend(&ext, &inst).map_err(at("bend"))?;
    let relators = bending::verify_relators(&ext, &rep, &inst.decomposition.relators).map_err(at("verify"))?;
    let su = bending::verify_su_containment(&ext, &rep, &inst.form).map_err(at("verify"))?;
    let opts = CertifyOptions {
        word_cap: cfg.certify.word_cap,
        proximal_word_length: cfg.certify.proximal_word_length,
        precision_budget: cfg.certify.precision,
        prime: cfg.certify.prime,
        bfs_budget: cfg.certify.bfs_budget,
        exec: Exec::default(),
    };
    let thin = certify::thinness_report(&ext, &inst, &opts).map_err(at("certify"))?;

    let hard_checks_passed = relators.passed() && su.passed();
    let mut checks = Map::new();
    checks.insert("centralizer".into(), Verdict::Pass.as_str().into());
    checks.insert("relators".into(), relators.verdict.as_str().into());
    checks.insert("su_containment".into(), su.verdict.as_str().into());
    for c in &thin.certificates {
        checks.entry(c.check.clone()).or_insert_with(|| c.verdict.as_str().into());
    }
    let report = json!({
        "tool": {"name": "bendlab", "version": env!("CARGO_PKG_VERSION")},
        "inputs": {
            "paths": {
                "field": cfg.inputs.field.display().to_string(),
                "generators": cfg.inputs.generators.display().to_string(),
                "decomposition": cfg.inputs.decomposition.display().to_string(),
            },
            "sha256": hashes,
        },
        "parameters": {
            "alphas": inst.form.alphas().iter().map(io::element_to_json).collect::<Vec<_>>(),
            "threshold": rational::format(&threshold),
            "bend_unit": io::ext_to_json(&inst.unit),
            "word_cap": opts.word_cap,
            "proximal_word_length": opts.proximal_word_length,
            "precision": opts.precision_budget,
            "prime": opts.prime,
            "bfs_budget": opts.bfs_budget,
        },
        "field": field_json(ext.base()),
        "unit": unit_section,
        "extension": extension_json(&ext),
        "unit_rank": rank,
        "checks": checks,
        "hard_checks_passed": hard_checks_passed,
        "certificates": {
            "relators": relators,
            "su_containment": su,
            "thinness": thin,
        },
    });
    Ok(PipelineRun {
        report,
        rep: rep_file_json(&ext, &rep),
        hard_checks_passed,
    })
}

pub struct PipelineOutcome {
    pub exit_code: i32,
    pub error: Option<StageError>,
}

/// Runs the pipeline and writes the report (and bent representation) files.
pub fn run_pipeline(cfg: &PipelineConfig, config_bytes: &[u8]) -> PipelineOutcome {
    match execute(cfg, config_bytes) {
        Ok(run) => {
            let mut outputs = vec![(cfg.resolve(&cfg.outputs.report), to_bytes(&run.report))];
            if let Some(p) = &cfg.outputs.rep {
                outputs.push((cfg.resolve(p), to_bytes(&run.rep)));
            }
            for (path, bytes) in outputs {
                if let Err(error) = write_atomic(&path, &bytes) {
                    return PipelineOutcome {
                        exit_code: EXIT_CONFIG,
                        error: Some(StageError { stage: "config", error }),
                    };
                }
            }
            PipelineOutcome {
                exit_code: run.exit_code(),
                error: None,
            }
        }
        Err(e) => PipelineOutcome {
            exit_code: e.exit_code(),
            error: Some(e),
        },
    }
}

/// Loads a config file and runs it.
pub fn run_pipeline_file(path: &Path) -> PipelineOutcome {
    let loaded = config::read_file(path).and_then(|bytes| {
        let text = String::from_utf8(bytes.clone()).map_err(|_| Error::Parse("config is not UTF-8".into()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok((PipelineConfig::parse(&text, &base)?, bytes))
    });
    match loaded {
        Ok((cfg, bytes)) => run_pipeline(&cfg, &bytes),
        Err(error) => PipelineOutcome {
            exit_code: EXIT_CONFIG,
            error: Some(StageError { stage: "config", error }),
        },
    }
}

/// The bundled desk configuration, read from the crate's data directory.
pub fn desk_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join("desk")
}

pub fn desk_run() -> std::result::Result<PipelineRun, StageError> {
    let path = desk_dir().join("pipeline.toml");
    let bytes = config::read_file(&path).map_err(at("config"))?;
    let text = String::from_utf8(bytes.clone()).expect("bundled config is UTF-8");
    let cfg = PipelineConfig::parse(&text, &desk_dir()).map_err(at("config"))?;
    execute(&cfg, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn desk_pipeline_passes() {
        let run = desk_run().unwrap();
        assert_eq!(run.exit_code(), EXIT_OK);
        assert_eq!(run.report["checks"]["su_containment"], "pass");
        let again = desk_run().unwrap();
        assert_eq!(to_bytes(&run.report), to_bytes(&again.report));
    }

    #[test]
    fn hashes_are_hex() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
