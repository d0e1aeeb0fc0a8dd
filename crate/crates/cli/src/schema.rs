//! JSON encodings shared by every command.
//!
//! A complex number is a two-element array `[re, im]`, a ket an array of
//! complex numbers and a matrix a row-major array of rows.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};

use waylimit_core::bounds::ConservationPair;
use waylimit_core::spin::YWModel;
use waylimit_core::{Complex64, Ket64, Model64, Operator64, Pair64};

pub const SCHEMA_VERSION: &str = "v1";

pub type JsonComplex = [f64; 2];
pub type JsonKet = Vec<JsonComplex>;
pub type JsonMatrix = Vec<Vec<JsonComplex>>;

/// A real number, or one of the strings `"inf"`, `"-inf"`, `"nan"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum JsonNumber {
    Finite(f64),
    Sentinel(String),
}

impl From<f64> for JsonNumber {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            JsonNumber::Finite(x)
        } else if x.is_nan() {
            JsonNumber::Sentinel("nan".into())
        } else if x > 0.0 {
            JsonNumber::Sentinel("inf".into())
        } else {
            JsonNumber::Sentinel("-inf".into())
        }
    }
}

impl JsonNumber {
    pub fn value(&self) -> Result<f64> {
        match self {
            JsonNumber::Finite(x) => Ok(*x),
            JsonNumber::Sentinel(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => bail!("unknown number sentinel {other:?}"),
            },
        }
    }
}

pub fn encode_ket(v: &Ket64) -> JsonKet {
    v.amps().iter().map(|z| [z.re, z.im]).collect()
}

pub fn encode_matrix(x: &Operator64) -> JsonMatrix {
    x.rows()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn amplitudes(v: &[JsonComplex]) -> Vec<Complex64> {
    v.iter().map(|[re, im]| Complex64::new(*re, *im)).collect()
}

/// Normalized ket of dimension `dim`.
pub fn decode_ket(v: &JsonKet, dim: usize, field: &str) -> Result<Ket64> {
    if v.len() != dim {
        bail!("{field}: expected {dim} amplitudes, found {}", v.len());
    }
    Ket64::new(amplitudes(v)).with_context(|| format!("invalid {field}"))
}

fn decode_unnormalized(v: &JsonKet, dim: usize, field: &str) -> Result<Ket64> {
    if v.len() != dim {
        bail!("{field}: expected {dim} amplitudes, found {}", v.len());
    }
    Ket64::unnormalized(amplitudes(v)).with_context(|| format!("invalid {field}"))
}

/// Square matrix of dimension `dim`, untagged.
pub fn decode_matrix(m: &JsonMatrix, dim: usize, field: &str) -> Result<Operator64> {
    if m.len() != dim {
        bail!("{field}: expected {dim}x{dim} matrix, found {} rows", m.len());
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != dim {
            bail!(
                "{field}[{i}]: expected {dim} columns, found {}",
                row.len()
            );
        }
    }
    Operator64::from_rows(m.iter().map(|r| amplitudes(r)).collect())
        .with_context(|| format!("invalid {field}"))
}

fn hermitian(m: &JsonMatrix, dim: usize, field: &str) -> Result<Operator64> {
    decode_matrix(m, dim, field)?
        .into_hermitian(field)
        .map_err(|e| anyhow!(e))
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub description: String,
}

/// A measurement model with its conservation pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub version: String,
    pub object_dim: usize,
    pub probe_dim: usize,
    #[serde(rename = "A")]
    pub a: JsonMatrix,
    #[serde(rename = "L1")]
    pub l1: JsonMatrix,
    #[serde(rename = "L2")]
    pub l2: JsonMatrix,
    #[serde(rename = "M")]
    pub m: JsonMatrix,
    #[serde(rename = "U")]
    pub u: JsonMatrix,
    pub xi: JsonKet,
    #[serde(default)]
    pub metadata: Metadata,
}

impl ModelFile {
    pub fn from_model(model: &Model64, pair: &Pair64, metadata: Metadata) -> Self {
        ModelFile {
            version: SCHEMA_VERSION.into(),
            object_dim: model.object_dim(),
            probe_dim: model.probe_dim(),
            a: encode_matrix(model.a()),
            l1: encode_matrix(pair.l1()),
            l2: encode_matrix(pair.l2()),
            m: encode_matrix(model.m()),
            u: encode_matrix(model.u()),
            xi: encode_ket(model.xi()),
            metadata,
        }
    }

    /// Validates every field; errors name the offending one.
    pub fn to_model(&self) -> Result<(Model64, Pair64)> {
        check_version(&self.version)?;
        let (od, pd) = (self.object_dim, self.probe_dim);
        if od == 0 || pd == 0 {
            bail!("object_dim and probe_dim must be positive");
        }
        let a = hermitian(&self.a, od, "A")?;
        let l1 = hermitian(&self.l1, od, "L1")?;
        let l2 = hermitian(&self.l2, pd, "L2")?;
        let m = hermitian(&self.m, pd, "M")?;
        let u = decode_matrix(&self.u, od * pd, "U")?
            .into_unitary("U")
            .map_err(|e| anyhow!(e))?;
        let xi = decode_ket(&self.xi, pd, "xi")?;
        let model = Model64::new(a, m, u, xi)?;
        let pair = ConservationPair::new(l1, l2)?;
        Ok((model, pair))
    }
}

/// Two-branch interaction data.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YWModelFile {
    pub version: String,
    pub probe_dim: usize,
    pub xi: JsonKet,
    pub xi_plus: JsonKet,
    pub xi_minus: JsonKet,
    pub eta_plus: JsonKet,
    pub eta_minus: JsonKet,
    #[serde(rename = "M")]
    pub m: JsonMatrix,
    #[serde(default)]
    pub metadata: Metadata,
}

impl YWModelFile {
    pub fn from_model(yw: &YWModel, metadata: Metadata) -> Self {
        YWModelFile {
            version: SCHEMA_VERSION.into(),
            probe_dim: yw.probe_dim(),
            xi: encode_ket(yw.xi()),
            xi_plus: encode_ket(yw.xi_plus()),
            xi_minus: encode_ket(yw.xi_minus()),
            eta_plus: encode_ket(yw.eta_plus()),
            eta_minus: encode_ket(yw.eta_minus()),
            m: encode_matrix(yw.m()),
            metadata,
        }
    }

    pub fn to_model(&self) -> Result<YWModel> {
        check_version(&self.version)?;
        let p = self.probe_dim;
        Ok(YWModel::new(
            decode_ket(&self.xi, p, "xi")?,
            decode_unnormalized(&self.xi_plus, p, "xi_plus")?,
            decode_unnormalized(&self.xi_minus, p, "xi_minus")?,
            decode_unnormalized(&self.eta_plus, p, "eta_plus")?,
            decode_unnormalized(&self.eta_minus, p, "eta_minus")?,
            hermitian(&self.m, p, "M")?,
        )?)
    }
}

fn check_version(v: &str) -> Result<()> {
    if v != SCHEMA_VERSION {
        bail!("unsupported schema version {v:?} (expected {SCHEMA_VERSION:?})");
    }
    Ok(())
}

/// Parses JSON, reporting the line and column of syntax errors.
pub fn parse_json<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| {
        anyhow!(
            "{what}: {} at line {} column {}",
            describe(&e),
            e.line(),
            e.column()
        )
    })
}

fn describe(e: &serde_json::Error) -> String {
    // serde_json appends its own position; keep only the message
    let full = e.to_string();
    match full.rfind(" at line ") {
        Some(i) => full[..i].to_string(),
        None => full,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use waylimit_core::spin::{swap_demo_model, YWModel};

    #[test]
    fn model_file_round_trip_is_exact() {
        let (model, pair) = swap_demo_model::<f64>();
        let file = ModelFile::from_model(&model, &pair, Metadata::default());
        let text = serde_json::to_string(&file).unwrap();
        let back: ModelFile = parse_json(&text, "model").unwrap();
        let (m2, p2) = back.to_model().unwrap();
        assert_eq!(m2.u().entries(), model.u().entries());
        assert_eq!(m2.xi().amps(), model.xi().amps());
        assert_eq!(p2.l2().entries(), pair.l2().entries());
    }

    #[test]
    fn yw_file_round_trip() {
        let yw = YWModel::<f64>::sample();
        let file = YWModelFile::from_model(&yw, Metadata::default());
        let back = file.to_model().unwrap();
        assert_eq!(back.eps_y_sq(), yw.eps_y_sq());
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse_json::<ModelFile>("{\n  \"version\": \"v1\",\n  oops\n}", "model")
            .unwrap_err()
            .to_string();
        assert!(err.contains("line 3 column 3"), "{err}");
    }

    #[test]
    fn wrong_shapes_name_the_field() {
        let (model, pair) = swap_demo_model::<f64>();
        let mut file = ModelFile::from_model(&model, &pair, Metadata::default());
        file.m.pop();
        let err = file.to_model().unwrap_err().to_string();
        assert!(err.starts_with("M:"), "{err}");
        let mut file = ModelFile::from_model(&model, &pair, Metadata::default());
        file.u[1][1] = [0.5, 0.0];
        let err = format!("{:#}", file.to_model().unwrap_err());
        assert!(err.contains("U is not unitary"), "{err}");
        let mut file = ModelFile::from_model(&model, &pair, Metadata::default());
        file.version = "v0".into();
        assert!(file.to_model().is_err());
    }

    #[test]
    fn sentinels() {
        assert_eq!(JsonNumber::from(f64::INFINITY), JsonNumber::Sentinel("inf".into()));
        assert_eq!(serde_json::to_string(&JsonNumber::from(0.5)).unwrap(), "0.5");
        assert_eq!(JsonNumber::Sentinel("inf".into()).value().unwrap(), f64::INFINITY);
    }
}
