//! Bent representations of amalgams and HNN extensions, and exact checks
//! of relators and unitary-group containment.

use std::collections::BTreeMap;
use std::fmt;

use serde_json::json;

use crate::certificate::{Certificate, Verdict};
use crate::error::{Error, Result};
use crate::forms::{self, FieldMatrix, Form};
use crate::io;
use crate::matrix::{Matrix, MatrixOps};
use crate::numfield::{ExtElement, QuadExtension};

/// A word in the generators: each letter is a generator name and a nonzero
/// exponent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Word(pub Vec<(String, i64)>);

impl Word {
    /// Parses letters such as `a`, `b^-1`, `c^3`, separated by whitespace
    /// or `*`. The empty word is written `1` or `""`.
    pub fn parse(s: &str) -> Result<Word> {
        let mut letters = Vec::new();
        for tok in s.split(|c: char| c.is_whitespace() || c == '*') {
            if tok.is_empty() || tok == "1" {
                continue;
            }
            let (name, exp) = match tok.split_once('^') {
                Some((n, e)) => (
                    n,
                    e.parse::<i64>().map_err(|_| Error::BadWord(s.to_string()))?,
                ),
                None => (tok, 1),
            };
            let valid = name
                .chars()
                .next()
                .is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_');
            if !valid {
                return Err(Error::BadWord(s.to_string()));
            }
            if exp != 0 {
                letters.push((name.to_string(), exp));
            }
        }
        Ok(Word(letters))
    }

    pub fn generators(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(|(g, _)| g.as_str())
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|(g, e)| (g.clone(), -e)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend(other.0.iter().cloned());
        Word(v)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(g, e)| if *e == 1 { g.clone() } else { format!("{g}^{e}") })
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    First,
    Second,
}

#[derive(Clone, Debug, PartialEq)]
pub enum DecompositionKind {
    /// `Gamma_1 *_Lambda Gamma_2`: second-side generators are conjugated.
    Amalgam { sides: BTreeMap<String, Side> },
    /// `Gamma' *_stable`: the stable letter is multiplied by `B`.
    Hnn { stable: String },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Decomposition {
    pub kind: DecompositionKind,
    pub generators: Vec<String>,
    /// Words whose images the bending matrix must centralize.
    pub edge_words: Vec<Word>,
    pub relators: Vec<Word>,
}

impl Decomposition {
    pub fn new(
        kind: DecompositionKind,
        generators: Vec<String>,
        edge_words: Vec<Word>,
        relators: Vec<Word>,
    ) -> Result<Self> {
        let known = |g: &str| generators.iter().any(|x| x == g);
        for w in edge_words.iter().chain(&relators) {
            if let Some(g) = w.generators().find(|g| !known(g)) {
                return Err(Error::UnknownGenerator(g.to_string()));
            }
        }
        match &kind {
            DecompositionKind::Amalgam { sides } => {
                for g in &generators {
                    if !sides.contains_key(g) {
                        return Err(Error::InvalidDecomposition(format!(
                            "generator `{g}` has no side"
                        )));
                    }
                }
            }
            DecompositionKind::Hnn { stable } => {
                if !known(stable) {
                    return Err(Error::UnknownGenerator(stable.clone()));
                }
                for w in &edge_words {
                    if w.generators().any(|g| g == stable) {
                        return Err(Error::InvalidDecomposition(format!(
                            "edge word `{w}` uses the stable letter"
                        )));
                    }
                }
            }
        }
        Ok(Decomposition {
            kind,
            generators,
            edge_words,
            relators,
        })
    }
}

/// Generator images, in generator order.
#[derive(Clone, Debug, PartialEq)]
pub struct Rep {
    pub images: Vec<(String, FieldMatrix)>,
}

impl Rep {
    pub fn get(&self, name: &str) -> Option<&FieldMatrix> {
        self.images.iter().find(|(g, _)| g == name).map(|(_, m)| m)
    }

    pub fn matrices(&self) -> Vec<FieldMatrix> {
        self.images.iter().map(|(_, m)| m.clone()).collect()
    }

    pub fn size(&self) -> usize {
        self.images.first().map_or(0, |(_, m)| m.rows())
    }

    /// Exact image of a word.
    pub fn eval(&self, ext: &QuadExtension, w: &Word) -> Result<FieldMatrix> {
        let mut acc = Matrix::identity(ext, self.size());
        for (g, e) in &w.0 {
            let m = self.get(g).ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
            let base = if *e < 0 {
                ext.inverse(m).ok_or(Error::Singular)?
            } else {
                m.clone()
            };
            acc = ext.mat_mul(&acc, &ext.mat_pow(&base, e.unsigned_abs()));
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        for (g, m) in &self.images {
            map.insert(g.clone(), io::ext_matrix_to_json(m));
        }
        json!({
            "generators": self.images.iter().map(|(g, _)| g.clone()).collect::<Vec<_>>(),
            "images": map,
        })
    }
}

#[derive(Clone, Debug)]
pub struct BendingInstance {
    pub form: Form,
    pub base_rep: Rep,
    pub decomposition: Decomposition,
    pub unit: ExtElement,
}

impl BendingInstance {
    /// Checks that every generator has an `SO(J)` image over `F`.
    pub fn new(
        ext: &QuadExtension,
        form: Form,
        base_rep: Rep,
        decomposition: Decomposition,
        unit: ExtElement,
    ) -> Result<Self> {
        for g in &decomposition.generators {
            let m = base_rep
                .get(g)
                .ok_or_else(|| Error::UnknownGenerator(g.clone()))?;
            if !forms::so_membership(ext, m, &form)? {
                return Err(Error::InvalidDecomposition(format!(
                    "image of `{g}` is not in SO(J)"
                )));
            }
        }
        Ok(BendingInstance {
            form,
            base_rep,
            decomposition,
            unit,
        })
    }

    pub fn with_unit(&self, unit: ExtElement) -> Self {
        BendingInstance {
            unit,
            ..self.clone()
        }
    }
}

/// `rho_u`: second-side generators conjugated by `B_u` (amalgam), or the
/// stable letter left-multiplied by `B_u` (HNN).
pub fn bend(ext: &QuadExtension, inst: &BendingInstance) -> Result<Rep> {
    let n = inst.form.n();
    let b = forms::bending_matrix(ext, &inst.unit, n)?;
    for w in &inst.decomposition.edge_words {
        let img = inst.base_rep.eval(ext, w)?;
        if !forms::centralizes_block(ext, &b, &img)? {
            return Err(Error::CentralizerViolation(w.to_string()));
        }
    }
    let b_inv = ext.inverse(&b).expect("bending matrices have determinant 1");
    let images = inst
        .decomposition
        .generators
        .iter()
        .map(|g| {
            let m = inst.base_rep.get(g).expect("checked at construction");
            let img = match &inst.decomposition.kind {
                DecompositionKind::Amalgam { sides } => match sides[g] {
                    Side::First => m.clone(),
                    Side::Second => ext.mat_mul(&ext.mat_mul(&b, m), &b_inv),
                },
                DecompositionKind::Hnn { stable } => {
                    if g == stable {
                        ext.mat_mul(&b, m)
                    } else {
                        m.clone()
                    }
                }
            };
            (g.clone(), img)
        })
        .collect();
    Ok(Rep { images })
}

/// Passes iff every relator evaluates to the identity.
pub fn verify_relators(ext: &QuadExtension, rep: &Rep, relators: &[Word]) -> Result<Certificate> {
    let mut failures = Vec::new();
    for (i, r) in relators.iter().enumerate() {
        let m = rep.eval(ext, r)?;
        if !ext.is_identity(&m) {
            failures.push(json!({
                "index": i,
                "relator": r.to_string(),
                "image": io::ext_matrix_to_json(&m),
            }));
        }
    }
    Ok(Certificate::new("relators", Verdict::from_bool(failures.is_empty()))
        .with_evidence("checked", relators.len())
        .with_evidence("failures", failures))
}

/// Passes iff every generator image is in `SU(J, L, tau)`; since that set
/// is a group, this covers the whole image.
pub fn verify_su_containment(ext: &QuadExtension, rep: &Rep, form: &Form) -> Result<Certificate> {
    let mut failing = Vec::new();
    for (g, m) in &rep.images {
        let ok = match forms::su_membership(ext, m, form) {
            Ok(ok) => ok,
            Err(Error::SizeMismatch(_)) => false,
            Err(e) => return Err(e),
        };
        if !ok {
            failing.push(g.clone());
        }
    }
    Ok(
        Certificate::new("su_containment", Verdict::from_bool(failing.is_empty()))
            .with_evidence("generators", rep.images.len())
            .with_evidence("failing", failing),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn word_parsing() {
        let w = Word::parse("a b^-1 * a^2").unwrap();
        assert_eq!(
            w.0,
            vec![("a".into(), 1), ("b".into(), -1), ("a".into(), 2)]
        );
        assert_eq!(w.to_string(), "a b^-1 a^2");
        assert_eq!(Word::parse("1").unwrap(), Word(vec![]));
        assert!(Word::parse("a^x").is_err());
        assert!(Word::parse("3a").is_err());
        assert_eq!(w.concat(&w.inverse()).0.len(), 6);
    }
}
