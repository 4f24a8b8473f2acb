//! Problem files: the JSON payloads named on the command line.

use gateaux_core::function_space::DiscreteDomainFunction;
use gateaux_core::{Complex64, ComplexMatrix, ToleranceConfig};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Matrix,
    Function,
}

/// `{"rows": m, "cols": n, "data": [[re, im], ...]}`, row-major.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<[f64; 2]>,
}

/// `{"values": [[re, im], ...]}`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionJson {
    pub values: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub eig_offdiag: Option<f64>,
    pub cluster_rel: Option<f64>,
    pub feas_eps: Option<f64>,
    pub fw_gap_eps: Option<f64>,
    pub psd_tol: Option<f64>,
    pub fd_steps: Option<Vec<f64>>,
    pub grid_phi: Option<usize>,
    pub max_iter: Option<usize>,
}

impl ToleranceOverrides {
    /// Later overrides win.
    pub fn apply(&self, tol: &mut ToleranceConfig) {
        macro_rules! set {
            ($($field:ident),*) => {$(
                if let Some(v) = &self.$field {
                    tol.$field = v.clone();
                }
            )*};
        }
        set!(eig_offdiag, cluster_rel, feas_eps, fw_gap_eps, psd_tol, fd_steps, grid_phi, max_iter);
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub kind: Kind,
    #[serde(rename = "A")]
    pub a: Option<MatrixJson>,
    #[serde(rename = "B")]
    pub b: Option<MatrixJson>,
    #[serde(rename = "Bs")]
    pub bs: Option<Vec<MatrixJson>>,
    #[serde(rename = "G")]
    pub g_mat: Option<MatrixJson>,
    #[serde(rename = "T")]
    pub t: Option<MatrixJson>,
    pub f: Option<FunctionJson>,
    pub g: Option<FunctionJson>,
    pub hs: Option<Vec<FunctionJson>>,
    pub phi: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub tolerances: Option<ToleranceOverrides>,
}

/// Parses a problem file; errors carry the JSON path and the line/column.
pub fn parse_problem(bytes: &[u8]) -> Result<ProblemFile, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(bytes);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if path == "." || path.is_empty() {
            CliError::Input(format!("malformed problem file: {inner}"))
        } else {
            CliError::Input(format!("malformed problem file at `{path}`: {inner}"))
        }
    })
}

fn missing(field: &str) -> CliError {
    CliError::Input(format!("missing field `{field}`"))
}

fn complex(pairs: &[[f64; 2]]) -> Vec<Complex64> {
    pairs.iter().map(|&[re, im]| Complex64::new(re, im)).collect()
}

fn finite(pairs: &[[f64; 2]], field: &str) -> Result<(), CliError> {
    match pairs.iter().position(|p| !(p[0].is_finite() && p[1].is_finite())) {
        Some(i) => Err(CliError::Input(format!("field `{field}`: entry {i} is not finite"))),
        None => Ok(()),
    }
}

impl MatrixJson {
    pub fn to_matrix(&self, field: &str) -> Result<ComplexMatrix, CliError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(CliError::Input(format!(
                "field `{field}`: empty shape {}x{}",
                self.rows, self.cols
            )));
        }
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::Input(format!(
                "field `{field}`: expected {} entries for a {}x{} matrix, found {}",
                self.rows * self.cols,
                self.rows,
                self.cols,
                self.data.len()
            )));
        }
        finite(&self.data, field)?;
        ComplexMatrix::new(self.rows, self.cols, complex(&self.data))
            .map_err(|e| CliError::Input(format!("field `{field}`: {e}")))
    }
}

impl FunctionJson {
    pub fn to_function(&self, field: &str) -> Result<DiscreteDomainFunction, CliError> {
        if self.values.is_empty() {
            return Err(CliError::Input(format!("field `{field}`: empty domain")));
        }
        finite(&self.values, field)?;
        DiscreteDomainFunction::new(complex(&self.values))
            .map_err(|e| CliError::Input(format!("field `{field}`: {e}")))
    }
}

fn same_shape(
    a: &ComplexMatrix,
    other: &ComplexMatrix,
    field: &str,
) -> Result<(), CliError> {
    if a.shape() != other.shape() {
        return Err(CliError::Input(format!(
            "field `{field}`: shape {}x{} does not match `A` ({}x{})",
            other.rows(),
            other.cols(),
            a.rows(),
            a.cols()
        )));
    }
    Ok(())
}

fn same_domain(
    f: &DiscreteDomainFunction,
    other: &DiscreteDomainFunction,
    field: &str,
) -> Result<(), CliError> {
    if f.domain_size() != other.domain_size() {
        return Err(CliError::Input(format!(
            "field `{field}`: {} values do not match `f` ({} values)",
            other.domain_size(),
            f.domain_size()
        )));
    }
    Ok(())
}

impl ProblemFile {
    pub fn expect_kind(&self, kind: Kind) -> Result<(), CliError> {
        if self.kind != kind {
            let name = |k: Kind| match k {
                Kind::Matrix => "matrix",
                Kind::Function => "function",
            };
            return Err(CliError::Input(format!(
                "field `kind`: this command needs \"{}\", found \"{}\"",
                name(kind),
                name(self.kind)
            )));
        }
        Ok(())
    }

    pub fn matrix_a(&self) -> Result<ComplexMatrix, CliError> {
        self.expect_kind(Kind::Matrix)?;
        self.a.as_ref().ok_or_else(|| missing("A"))?.to_matrix("A")
    }

    fn matrix_like_a(&self, a: &ComplexMatrix, m: Option<&MatrixJson>, field: &str) -> Result<ComplexMatrix, CliError> {
        let m = m.ok_or_else(|| missing(field))?.to_matrix(field)?;
        same_shape(a, &m, field)?;
        Ok(m)
    }

    pub fn matrix_b(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, CliError> {
        self.matrix_like_a(a, self.b.as_ref(), "B")
    }

    pub fn matrix_g(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, CliError> {
        self.matrix_like_a(a, self.g_mat.as_ref(), "G")
    }

    pub fn generators(&self, a: &ComplexMatrix) -> Result<Vec<ComplexMatrix>, CliError> {
        let bs = self.bs.as_ref().ok_or_else(|| missing("Bs"))?;
        if bs.is_empty() {
            return Err(CliError::Input("field `Bs`: needs at least one generator".into()));
        }
        bs.iter()
            .enumerate()
            .map(|(j, m)| self.matrix_like_a(a, Some(m), &format!("Bs[{j}]")))
            .collect()
    }

    pub fn state(&self, a: &ComplexMatrix) -> Result<ComplexMatrix, CliError> {
        let t = self.t.as_ref().ok_or_else(|| missing("T"))?.to_matrix("T")?;
        let n = a.cols();
        if t.shape() != (n, n) {
            return Err(CliError::Input(format!(
                "field `T`: expected {n}x{n} to act on the domain of `A`, found {}x{}",
                t.rows(),
                t.cols()
            )));
        }
        Ok(t)
    }

    pub fn function_f(&self) -> Result<DiscreteDomainFunction, CliError> {
        self.expect_kind(Kind::Function)?;
        self.f.as_ref().ok_or_else(|| missing("f"))?.to_function("f")
    }

    pub fn function_g(&self, f: &DiscreteDomainFunction) -> Result<DiscreteDomainFunction, CliError> {
        let g = self.g.as_ref().ok_or_else(|| missing("g"))?.to_function("g")?;
        same_domain(f, &g, "g")?;
        Ok(g)
    }

    pub fn function_generators(&self, f: &DiscreteDomainFunction) -> Result<Vec<DiscreteDomainFunction>, CliError> {
        let hs = self.hs.as_ref().ok_or_else(|| missing("hs"))?;
        if hs.is_empty() {
            return Err(CliError::Input("field `hs`: needs at least one generator".into()));
        }
        hs.iter()
            .enumerate()
            .map(|(j, h)| {
                let field = format!("hs[{j}]");
                let h = h.to_function(&field)?;
                same_domain(f, &h, &field)?;
                Ok(h)
            })
            .collect()
    }

    pub fn scalar(&self, value: Option<f64>, field: &str) -> Result<f64, CliError> {
        let v = value.ok_or_else(|| missing(field))?;
        if !v.is_finite() {
            return Err(CliError::Input(format!("field `{field}`: not finite")));
        }
        Ok(v)
    }
}
