//! TOML input files: field descriptions, self-contained instances, and
//! pipeline configurations that point at separate field, generator and
//! decomposition files.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigInt;
use serde::Deserialize;
use serde_json::Value;

use crate::bending::{BendingInstance, Decomposition, DecompositionKind, Rep, Side, Word};
use crate::error::{Error, Result};
use crate::field::Field;
use crate::forms::Form;
use crate::io;
use crate::numfield::{AlgebraicNumber, ExtElement, NumberField, QuadExtension};

fn to_json(v: &toml::Value) -> Value {
    serde_json::to_value(v).expect("toml values are representable as json")
}

fn bigint_from(v: &toml::Value) -> Result<BigInt> {
    match v {
        toml::Value::Integer(i) => Ok(BigInt::from(*i)),
        toml::Value::String(s) => s
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad integer `{s}`"))),
        other => Err(Error::Parse(format!("expected an integer, got {other}"))),
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String> {
    String::from_utf8(read_file(path)?).map_err(|_| Error::Parse(format!("{} is not UTF-8", path.display())))
}

fn parse_toml<T: for<'de> Deserialize<'de>>(text: &str, what: &str) -> Result<T> {
    toml::from_str(text).map_err(|e| Error::Config(format!("{what}: {}", e.message())))
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldSection {
    /// Coefficients of the monic minimal polynomial, constant term first.
    pub min_poly: Vec<toml::Value>,
    #[serde(default)]
    pub identity: usize,
    /// Optional fundamental units as coefficient arrays.
    #[serde(default)]
    pub units: Vec<toml::Value>,
}

impl FieldSection {
    pub fn build(&self) -> Result<NumberField> {
        let coeffs = self.min_poly.iter().map(bigint_from).collect::<Result<Vec<_>>>()?;
        NumberField::new(coeffs, self.identity)
    }

    pub fn units(&self, field: &NumberField) -> Result<Vec<AlgebraicNumber>> {
        self.units
            .iter()
            .map(|u| io::element_from_json(field, &to_json(u)))
            .collect()
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldFile {
    pub field: FieldSection,
}

impl FieldFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text, "field file")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSection {
    pub alphas: Vec<toml::Value>,
}

pub fn build_form(field: &NumberField, alphas: &[toml::Value]) -> Result<Form> {
    let alphas = alphas
        .iter()
        .map(|a| io::element_from_json(field, &to_json(a)))
        .collect::<Result<Vec<_>>>()?;
    Form::new(field, alphas)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionSection {
    /// The unit `u` of `F`; `L = F(s)` with `s^2 - u s + 1 = 0`.
    pub u: toml::Value,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BendSection {
    /// `"1"`, `"s"`, `"-s"`, `"s^k"`, `"-s^k"`, or an explicit element.
    pub unit: Option<toml::Value>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionSection {
    pub kind: String,
    pub stable: Option<String>,
    #[serde(default)]
    pub sides: BTreeMap<String, String>,
    /// Generator order; defaults to the sorted generator names.
    pub generators: Option<Vec<String>>,
    #[serde(default)]
    pub edge_words: Vec<String>,
    #[serde(default)]
    pub relators: Vec<String>,
}

impl DecompositionSection {
    pub fn build(&self, available: &[String]) -> Result<Decomposition> {
        let generators = self.generators.clone().unwrap_or_else(|| available.to_vec());
        let kind = match self.kind.as_str() {
            "hnn" => DecompositionKind::Hnn {
                stable: self
                    .stable
                    .clone()
                    .ok_or_else(|| Error::Config("hnn decomposition needs `stable`".into()))?,
            },
            "amalgam" => {
                let sides = self
                    .sides
                    .iter()
                    .map(|(g, s)| {
                        let side = match s.as_str() {
                            "first" => Side::First,
                            "second" => Side::Second,
                            other => return Err(Error::Config(format!("unknown side `{other}`"))),
                        };
                        Ok((g.clone(), side))
                    })
                    .collect::<Result<BTreeMap<_, _>>>()?;
                DecompositionKind::Amalgam { sides }
            }
            other => return Err(Error::Config(format!("unknown decomposition kind `{other}`"))),
        };
        let words = |ws: &[String]| ws.iter().map(|w| Word::parse(w)).collect::<Result<Vec<_>>>();
        Decomposition::new(kind, generators, words(&self.edge_words)?, words(&self.relators)?)
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DecompositionFile {
    pub decomposition: DecompositionSection,
}

/// A self-contained instance; each command uses the sections it needs.
#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub field: FieldSection,
    pub form: Option<FormSection>,
    pub extension: Option<ExtensionSection>,
    #[serde(default)]
    pub bend: BendSection,
    pub generators: Option<BTreeMap<String, toml::Value>>,
    pub decomposition: Option<DecompositionSection>,
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        parse_toml(text, "instance file")
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&read_text(path)?)
    }

    pub fn field(&self) -> Result<NumberField> {
        self.field.build()
    }

    pub fn form(&self, field: &NumberField) -> Result<Form> {
        let sec = self
            .form
            .as_ref()
            .ok_or_else(|| Error::Config("missing [form] section".into()))?;
        build_form(field, &sec.alphas)
    }

    pub fn extension(&self, field: NumberField) -> Result<QuadExtension> {
        let sec = self
            .extension
            .as_ref()
            .ok_or_else(|| Error::Config("missing [extension] section".into()))?;
        let u = io::element_from_json(&field, &to_json(&sec.u))?;
        QuadExtension::new(field, u)
    }

    /// Field, extension and validated bending instance.
    pub fn instance(&self) -> Result<(QuadExtension, BendingInstance)> {
        let field = self.field()?;
        let form = self.form(&field)?;
        let ext = self.extension(field)?;
        let gens = self
            .generators
            .as_ref()
            .ok_or_else(|| Error::Config("missing [generators] section".into()))?;
        let json: BTreeMap<String, Value> = gens.iter().map(|(k, v)| (k.clone(), to_json(v))).collect();
        let dec = self
            .decomposition
            .as_ref()
            .ok_or_else(|| Error::Config("missing [decomposition] section".into()))?;
        let inst = assemble(&ext, form, &json, dec, self.bend.unit.as_ref().map(to_json))?;
        Ok((ext, inst))
    }
}

/// Builds a bending instance from parsed pieces.
pub fn assemble(
    ext: &QuadExtension,
    form: Form,
    generators: &BTreeMap<String, Value>,
    dec: &DecompositionSection,
    unit: Option<Value>,
) -> Result<BendingInstance> {
    let names: Vec<String> = generators.keys().cloned().collect();
    let decomposition = dec.build(&names)?;
    let mut images = Vec::new();
    for g in &decomposition.generators {
        let v = generators
            .get(g)
            .ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
        let m = io::ext_matrix_from_json(ext, v)?;
        if m.rows() != form.n() + 1 {
            return Err(Error::SizeMismatch(format!(
                "generator `{g}` is {}x{} but the form needs size {}",
                m.rows(),
                m.cols(),
                form.n() + 1
            )));
        }
        images.push((g.clone(), m));
    }
    let unit = match unit {
        None => ext.s(),
        Some(v) => parse_unit(ext, &v)?,
    };
    BendingInstance::new(ext, form, Rep { images }, decomposition, unit)
}

/// `"1"`, `"s"`, `"-s"`, `"s^k"`, `"-s^k"` (k may be negative), or an
/// explicit element of `L`.
pub fn parse_unit(ext: &QuadExtension, v: &Value) -> Result<ExtElement> {
    if let Value::String(s) = v {
        let t = s.trim();
        let (neg, rest) = match t.strip_prefix('-') {
            Some(r) => (true, r.trim()),
            None => (false, t),
        };
        let power = if rest == "1" {
            Some(0)
        } else if rest == "s" {
            Some(1)
        } else if let Some(k) = rest.strip_prefix("s^") {
            Some(
                k.trim()
                    .parse::<i64>()
                    .map_err(|_| Error::Parse(format!("bad unit `{t}`")))?,
            )
        } else {
            None
        };
        if let Some(k) = power {
            let s = if k < 0 { ext.inv(&ext.s()).expect("s is a unit") } else { ext.s() };
            let mut x = ext.one();
            for _ in 0..k.unsigned_abs() {
                x = ext.mul(&x, &s);
            }
            return Ok(if neg { ext.neg(&x) } else { x });
        }
    }
    io::ext_from_json(ext, v)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Inputs {
    pub field: PathBuf,
    pub generators: PathBuf,
    pub decomposition: PathBuf,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Parameters {
    pub alphas: Vec<toml::Value>,
    #[serde(default = "default_threshold")]
    pub threshold: toml::Value,
    /// Skips the unit search and uses this `u`.
    pub unit_override: Option<toml::Value>,
    pub bend_unit: Option<toml::Value>,
}

fn default_threshold() -> toml::Value {
    toml::Value::Integer(10)
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    #[serde(default = "default_word_cap")]
    pub word_cap: usize,
    #[serde(default = "default_word_length")]
    pub proximal_word_length: usize,
    #[serde(default = "default_precision")]
    pub precision: u32,
    pub prime: Option<u64>,
    #[serde(default = "default_budget")]
    pub bfs_budget: usize,
}

fn default_word_cap() -> usize {
    6
}
fn default_word_length() -> usize {
    4
}
fn default_precision() -> u32 {
    256
}
fn default_budget() -> usize {
    crate::certify::DEFAULT_BFS_BUDGET
}

impl Default for CertifySection {
    fn default() -> Self {
        CertifySection {
            word_cap: default_word_cap(),
            proximal_word_length: default_word_length(),
            precision: default_precision(),
            prime: None,
            bfs_budget: default_budget(),
        }
    }
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    pub report: PathBuf,
    pub rep: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    pub parameters: Parameters,
    #[serde(default)]
    pub certify: CertifySection,
    pub outputs: Outputs,
    /// Directory the relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl PipelineConfig {
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self> {
        let mut cfg: PipelineConfig = parse_toml(text, "pipeline config")?;
        cfg.base_dir = base_dir.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::parse(&read_text(path)?, &base)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }
}

pub fn load_decomposition(text: &str) -> Result<DecompositionSection> {
    Ok(parse_toml::<DecompositionFile>(text, "decomposition file")?.decomposition)
}

pub fn parse_json(bytes: &[u8], what: &str) -> Result<Value> {
    serde_json::from_slice(bytes).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;

    const DESK: &str = include_str!("../data/desk/instance.toml");

    #[test]
    fn desk_instance_parses() {
        let inst = InstanceFile::parse(DESK).unwrap();
        let (ext, b) = inst.instance().unwrap();
        assert_eq!(b.form.n(), 2);
        assert_eq!(b.decomposition.generators, vec!["a".to_string(), "b".to_string()]);
        assert_eq!(b.unit, ext.s());
    }

    #[test]
    fn unit_strings() {
        let f = NumberField::rationals();
        let ext = QuadExtension::new(f.clone(), f.from_ints(&[3])).unwrap();
        let s = ext.s();
        assert_eq!(parse_unit(&ext, &Value::from("s^2")).unwrap(), ext.mul(&s, &s));
        assert_eq!(parse_unit(&ext, &Value::from("-s")).unwrap(), ext.neg(&s));
        assert_eq!(parse_unit(&ext, &Value::from("1")).unwrap(), ext.one());
        assert_eq!(parse_unit(&ext, &Value::from("s^-1")).unwrap(), ext.tau(&s));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(
            FieldFile::parse("[field]\nmin_poly = [0, 1]\nidentiy = 0\n"),
            Err(Error::Config(_))
        ));
    }
}
