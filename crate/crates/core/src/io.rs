//! Metric files and JSON output with round-trip exact floats.
//!
//! ```json
//! {"m": 3, "repr": "T", "T": [[...], ...]}
//! {"m": 3, "repr": "form", "a": [[...], ...]}
//! {"m": 3, "repr": "eigen", "basis": [[...], ...], "gammas": [...]}
//! ```
//!
//! A file may also carry a `"certificate"` holding a natural-reductivity
//! verdict to be replayed instead of the computed one.

use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

use crate::classify::natred::NatRedVerdict;
use crate::coeff::AdaptedSystem;
use crate::error::{Error, Result};
use crate::lie::StructureConstants;
use crate::metric::{MetricForm, MetricT};

/// Environment variable naming an alternative structure-constant table.
pub const STRUCTURE_CONSTANTS_ENV: &str = "LOT_STRUCTURE_CONSTANTS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Repr {
    #[serde(rename = "T")]
    T,
    #[serde(rename = "form")]
    Form,
    #[serde(rename = "eigen")]
    Eigen,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub m: usize,
    pub repr: Repr,
    #[serde(rename = "T", default, skip_serializing_if = "Option::is_none")]
    pub t: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gammas: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<NatRedVerdict>,
}

#[derive(Debug, Clone)]
pub struct LoadedMetric {
    pub t: MetricT,
    pub certificate: Option<NatRedVerdict>,
}

fn missing(field: &str, repr: &str) -> Error {
    Error::InvalidMetric(format!("repr \"{repr}\" requires the field \"{field}\""))
}

fn check_square(rows: &[Vec<f64>], n: usize, what: &str) -> Result<()> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidMetric(format!("{what} must be {n} x {n}")));
    }
    Ok(())
}

impl MetricFile {
    pub fn into_metric(self) -> Result<LoadedMetric> {
        if self.m < 2 {
            return Err(Error::InvalidMetric(format!("m must be at least 2, got {}", self.m)));
        }
        let m = self.m;
        let t = match self.repr {
            Repr::T => {
                let rows = self.t.ok_or_else(|| missing("T", "T"))?;
                check_square(&rows, m, "T")?;
                MetricT::from_rows(&rows)?
            }
            Repr::Form => {
                let rows = self.a.ok_or_else(|| missing("a", "form"))?;
                check_square(&rows, m - 1, "a")?;
                MetricForm::from_rows(&rows)?.to_t()
            }
            Repr::Eigen => {
                let basis = self.basis.ok_or_else(|| missing("basis", "eigen"))?;
                let gammas = self.gammas.ok_or_else(|| missing("gammas", "eigen"))?;
                if basis.len() != m - 1 || gammas.len() != m - 1 || basis.iter().any(|b| b.len() != m) {
                    return Err(Error::InvalidMetric(format!(
                        "eigen repr needs {} basis vectors of length {m} and {} gammas",
                        m - 1,
                        m - 1
                    )));
                }
                let vectors = basis.into_iter().map(nalgebra::DVector::from_vec).collect();
                MetricT::from_system(&AdaptedSystem::new(vectors, gammas)?)?
            }
        };
        if let Some(cert) = &self.certificate {
            check_certificate_shape(cert, m)?;
        }
        Ok(LoadedMetric {
            t,
            certificate: self.certificate,
        })
    }

    pub fn from_t(t: &MetricT) -> Self {
        MetricFile {
            m: t.m(),
            repr: Repr::T,
            t: Some(rows_of(t.t())),
            a: None,
            basis: None,
            gammas: None,
            certificate: None,
        }
    }

    pub fn from_form(f: &MetricForm) -> Self {
        MetricFile {
            m: f.m(),
            repr: Repr::Form,
            t: None,
            a: Some(rows_of(f.a())),
            basis: None,
            gammas: None,
            certificate: None,
        }
    }

    pub fn from_system(sys: &AdaptedSystem) -> Self {
        MetricFile {
            m: sys.m(),
            repr: Repr::Eigen,
            t: None,
            a: None,
            basis: Some(sys.vectors.iter().map(|v| v.iter().copied().collect()).collect()),
            gammas: Some(sys.gammas.clone()),
            certificate: None,
        }
    }
}

fn check_certificate_shape(cert: &NatRedVerdict, m: usize) -> Result<()> {
    let ok = match cert {
        NatRedVerdict::NotNR => true,
        NatRedVerdict::CaseA { beta } => beta.len() == m - 1,
        NatRedVerdict::CaseB { k, beta } => *k < m && beta.len() == m,
        NatRedVerdict::CaseC { alpha, .. } => alpha.len() == m,
    };
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidMetric(format!("certificate does not fit m = {m}")))
    }
}

pub fn rows_of(a: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..a.nrows()).map(|i| a.row(i).iter().copied().collect()).collect()
}

pub fn parse_metric(s: &str) -> Result<LoadedMetric> {
    let file: MetricFile = serde_json::from_str(s)?;
    file.into_metric()
}

pub fn load_metric(path: impl AsRef<Path>) -> Result<LoadedMetric> {
    parse_metric(&std::fs::read_to_string(path)?)
}

/// The table named by `LOT_STRUCTURE_CONSTANTS`, or so(3).
pub fn structure_constants_from_env() -> Result<StructureConstants> {
    match std::env::var_os(STRUCTURE_CONSTANTS_ENV) {
        Some(p) if !p.is_empty() => StructureConstants::from_json_file(p),
        _ => Ok(StructureConstants::so3()),
    }
}

/// Pretty printer writing every float with 17 significant digits.
struct ExactFloats<'a>(PrettyFormatter<'a>);

impl Formatter for ExactFloats<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> std::io::Result<()> {
        if value == 0.0 {
            // keeps the sign of -0.0
            return write!(w, "{}", if value.is_sign_negative() { "-0.0" } else { "0.0" });
        }
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> std::io::Result<()> {
        self.write_f64(w, value as f64)
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> std::io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> std::io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Pretty JSON with floats printed to 17 significant digits.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats(PrettyFormatter::new()));
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json writes UTF-8"))
}

pub fn save_metric(path: impl AsRef<Path>, file: &MetricFile) -> Result<()> {
    std::fs::write(path, to_json_string(file)?)?;
    Ok(())
}

pub fn value_of<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("value serializes")
}
