//! JSON problem and report formats.
//!
//! A problem file describes one factorization task: the form kind, the
//! stem selection, the optional side, the matrix F, the product matrix
//! N, and (for two-product problems) the matrix M. A report file holds
//! the computed factors, all certification residuals, and the settings
//! used. Entries are stored as `[re, im]` pairs in row-major order.

use std::collections::BTreeMap;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matfunc::{SignFunctionSpec, SignKind};
use crate::matrix::ComplexMatrix;
use crate::polar::{CertificationReport, PolarFactors, Side};
use crate::space::{FormKind, ProductPair, ScalarProductSpace, Tolerances};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatrixData {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixData {
    pub fn from_matrix(a: &ComplexMatrix) -> Self {
        MatrixData {
            rows: a.rows(),
            cols: a.cols(),
            entries: a.entries().iter().map(|z| [z.re, z.im]).collect(),
        }
    }

    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix> {
        if self.entries.len() != self.rows * self.cols {
            return Err(Error::Schema {
                field: field.to_string(),
                message: format!(
                    "{} entries for a {}x{} matrix",
                    self.entries.len(),
                    self.rows,
                    self.cols
                ),
            });
        }
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::Schema {
                field: field.to_string(),
                message: "matrix dimensions must be positive".to_string(),
            });
        }
        let data: Vec<Complex64> = self
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(self.rows, self.cols, data).map_err(|_| Error::Schema {
            field: field.to_string(),
            message: "entries must be finite numbers".to_string(),
        })
    }
}

/// Optional per-file tolerance overrides.
#[derive(Clone, Copy, Debug, Default, Serialize, Deserialize)]
pub struct ToleranceOverrides {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_eq: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_class: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol_sing: Option<f64>,
}

impl ToleranceOverrides {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            tol_eq: self.tol_eq.unwrap_or(base.tol_eq),
            tol_class: self.tol_class.unwrap_or(base.tol_class),
            tol_sing: self.tol_sing.unwrap_or(base.tol_sing),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProblemFile {
    pub form: String,
    pub sign_function: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    pub f: MatrixData,
    pub n: MatrixData,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<MatrixData>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<ToleranceOverrides>,
}

/// A fully validated problem ready for the decomposition drivers.
#[derive(Clone, Debug)]
pub struct Problem {
    pub f: ComplexMatrix,
    pub pair: ProductPair,
    pub spec: SignFunctionSpec,
    pub side: Side,
    pub tolerances: Tolerances,
}

pub fn parse_form(s: &str) -> Result<FormKind> {
    match s {
        "real_bilinear" => Ok(FormKind::RealBilinear),
        "complex_bilinear" => Ok(FormKind::ComplexBilinear),
        "sesquilinear" => Ok(FormKind::Sesquilinear),
        other => Err(Error::Schema {
            field: "form".to_string(),
            message: format!(
                "unknown form `{other}` (expected real_bilinear, complex_bilinear, or sesquilinear)"
            ),
        }),
    }
}

pub fn parse_sign(s: &str) -> Result<SignKind> {
    match s {
        "sign1" => Ok(SignKind::Sign1),
        "sign2" => Ok(SignKind::Sign2),
        "sign3" => Ok(SignKind::Sign3),
        other => Err(Error::Schema {
            field: "sign_function".to_string(),
            message: format!("unknown sign function `{other}` (expected sign1, sign2, or sign3)"),
        }),
    }
}

pub fn parse_side(s: &str) -> Result<Side> {
    match s {
        "right" => Ok(Side::Right),
        "left" => Ok(Side::Left),
        other => Err(Error::Schema {
            field: "side".to_string(),
            message: format!("unknown side `{other}` (expected right or left)"),
        }),
    }
}

impl ProblemFile {
    /// Validate the schema and build core types. `overrides` (from the
    /// command line) take precedence over the file's own tolerances.
    pub fn into_problem(self, overrides: &ToleranceOverrides) -> Result<Problem> {
        let form = parse_form(&self.form)?;
        let spec = SignFunctionSpec::Builtin(parse_sign(&self.sign_function)?);
        let side = match self.side.as_deref() {
            None => Side::Right,
            Some(s) => parse_side(s)?,
        };
        let tolerances = overrides.apply(
            self.tolerances
                .unwrap_or_default()
                .apply(Tolerances::default()),
        );
        tolerances.validate()?;
        let f = self.f.to_matrix("f")?;
        let n_matrix = self.n.to_matrix("n")?;
        let n_space = ScalarProductSpace::new(n_matrix, form, &tolerances)?;
        let pair = match self.m {
            None => {
                if f.rows() != f.cols() {
                    return Err(Error::Schema {
                        field: "m".to_string(),
                        message: format!(
                            "a rectangular {}x{} map needs a second product matrix `m`",
                            f.rows(),
                            f.cols()
                        ),
                    });
                }
                ProductPair::square(n_space)
            }
            Some(m_data) => {
                let m_matrix = m_data.to_matrix("m")?;
                let m_space = ScalarProductSpace::new(m_matrix, form, &tolerances)?;
                ProductPair::new(m_space, n_space)?
            }
        };
        Ok(Problem {
            f,
            pair,
            spec,
            side,
            tolerances,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorsData {
    pub w: MatrixData,
    pub s: MatrixData,
    pub sigma: MatrixData,
}

impl FactorsData {
    pub fn from_factors(f: &PolarFactors) -> Self {
        FactorsData {
            w: MatrixData::from_matrix(&f.w),
            s: MatrixData::from_matrix(&f.s),
            sigma: MatrixData::from_matrix(&f.sigma),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportMetadata {
    pub form: String,
    pub sign_function: String,
    pub side: String,
    pub tol_eq: f64,
    pub tol_class: f64,
    pub tol_sing: f64,
    pub version: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ReportFile {
    pub pass: bool,
    pub factors: FactorsData,
    pub residuals: BTreeMap<String, f64>,
    pub metadata: ReportMetadata,
}

pub fn build_report(
    factors: &PolarFactors,
    certification: &CertificationReport,
    form: FormKind,
    tol: &Tolerances,
) -> ReportFile {
    let residuals = certification
        .checks
        .iter()
        .map(|c| (c.name.clone(), c.residual))
        .collect();
    ReportFile {
        pass: certification.pass,
        factors: FactorsData::from_factors(factors),
        residuals,
        metadata: ReportMetadata {
            form: form.as_str().to_string(),
            sign_function: factors.sign.name().to_string(),
            side: factors.side.as_str().to_string(),
            tol_eq: tol.tol_eq,
            tol_class: tol.tol_class,
            tol_sing: tol.tol_sing,
            version: env!("CARGO_PKG_VERSION").to_string(),
        },
    }
}

pub fn read_problem(path: &Path) -> Result<ProblemFile> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_report(path: &Path, report: &ReportFile) -> Result<()> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::Parse(e.to_string()))?;
    std::fs::write(path, text + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_problem_json() -> String {
        r#"{
            "form": "sesquilinear",
            "sign_function": "sign1",
            "side": "right",
            "f": {"rows": 2, "cols": 2, "entries": [[0.0,1.0],[0.0,0.0],[0.0,0.0],[0.0,-4.0]]},
            "n": {"rows": 2, "cols": 2, "entries": [[0.0,0.0],[1.0,0.0],[-1.0,0.0],[0.0,0.0]]}
        }"#
        .to_string()
    }

    #[test]
    fn problem_round_trip() {
        let file: ProblemFile = serde_json::from_str(&sample_problem_json()).unwrap();
        let problem = file.into_problem(&ToleranceOverrides::default()).unwrap();
        assert_eq!(problem.side, Side::Right);
        assert_eq!(problem.pair.form(), FormKind::Sesquilinear);
        assert_eq!(problem.f.rows(), 2);
        assert_eq!(problem.tolerances.tol_eq, Tolerances::default().tol_eq);
    }

    #[test]
    fn schema_errors_name_fields() {
        let mut file: ProblemFile = serde_json::from_str(&sample_problem_json()).unwrap();
        file.form = "euclidean".to_string();
        let err = file
            .clone()
            .into_problem(&ToleranceOverrides::default())
            .unwrap_err();
        assert!(matches!(err, Error::Schema { ref field, .. } if field == "form"));

        let mut file: ProblemFile = serde_json::from_str(&sample_problem_json()).unwrap();
        file.f.entries.pop();
        let err = file
            .into_problem(&ToleranceOverrides::default())
            .unwrap_err();
        assert!(matches!(err, Error::Schema { ref field, .. } if field == "f"));

        // rectangular map without the second product matrix
        let mut file: ProblemFile = serde_json::from_str(&sample_problem_json()).unwrap();
        file.f = MatrixData {
            rows: 2,
            cols: 1,
            entries: vec![[1.0, 0.0], [0.0, 1.0]],
        };
        let err = file
            .into_problem(&ToleranceOverrides::default())
            .unwrap_err();
        assert!(matches!(err, Error::Schema { ref field, .. } if field == "m"));
    }

    #[test]
    fn tolerance_precedence() {
        let mut file: ProblemFile = serde_json::from_str(&sample_problem_json()).unwrap();
        file.tolerances = Some(ToleranceOverrides {
            tol_eq: Some(1e-6),
            tol_class: None,
            tol_sing: None,
        });
        let cli = ToleranceOverrides {
            tol_eq: Some(1e-4),
            tol_class: Some(1e-7),
            tol_sing: None,
        };
        let problem = file.into_problem(&cli).unwrap();
        assert_eq!(problem.tolerances.tol_eq, 1e-4); // command line wins
        assert_eq!(problem.tolerances.tol_class, 1e-7);
        assert_eq!(problem.tolerances.tol_sing, Tolerances::default().tol_sing);
    }

    #[test]
    fn matrix_data_round_trip() {
        let a = ComplexMatrix::from_fn(2, 3, |r, c| {
            Complex64::new(r as f64, c as f64)
        });
        let data = MatrixData::from_matrix(&a);
        let back = data.to_matrix("f").unwrap();
        assert_eq!(back.sub(&a).frobenius_norm(), 0.0);
    }

    #[test]
    fn report_serialization() {
        use crate::matfunc::SignFunctionSpec;
        let factors = PolarFactors {
            w: ComplexMatrix::identity(1),
            s: ComplexMatrix::identity(1),
            sigma: ComplexMatrix::identity(1),
            side: Side::Right,
            sign: SignFunctionSpec::sign1(),
            classification: vec![],
        };
        let cert = CertificationReport {
            checks: vec![crate::polar::CertCheck {
                name: "reconstruction".to_string(),
                residual: 0.0,
                threshold: 1e-8,
                pass: true,
            }],
            pass: true,
        };
        let tol = Tolerances::default();
        let report = build_report(&factors, &cert, FormKind::Sesquilinear, &tol);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        write_report(&path, &report).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let back: ReportFile = serde_json::from_str(&text).unwrap();
        assert!(back.pass);
        assert_eq!(back.residuals["reconstruction"], 0.0);
        assert_eq!(back.metadata.side, "right");
    }
}
