//! Geometry configurations (JSON) and curvature queries.
//!
//! A configuration names a chart binding, gives the metric either as sixteen expression
//! strings or as a conformal factor times a constant diagonal form, declares the signature,
//! and may attach structure fields and sample points.
//!
//! ```json
//! {
//!   "name": "bump",
//!   "chart": { "complex": ["Z1", "Z2"] },
//!   "signature": "neutral",
//!   "conformal_factor": "1 + abs2(Z1)",
//!   "points": [[0.1, 0.2, 0.3, 0.4]]
//! }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, Result};
use crate::expr::{ChartBinding, ExprField};
use crate::jet::Real;
use crate::linalg::{self, M4};
use crate::sampling;
use crate::structures::{self, classify, classify_complex, StructureKind};
use crate::tensor::{curvature, max_abs3, nijenhuis, Chart, CurvaturePackage, MatrixFn, MetricField, Signature, StructureField};
use crate::{linespace, pde, products, spaceforms, topology};

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChartSpec {
    /// four real coordinate names
    Real([String; 4]),
    /// two complex names, `Z1 = x0 + i x1`, `Z2 = x2 + i x3`
    Complex([String; 2]),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SignatureTag {
    Riemannian,
    Neutral,
    Lorentz,
}

impl SignatureTag {
    pub fn signature(self) -> Signature {
        match self {
            SignatureTag::Riemannian => Signature::RIEMANNIAN,
            SignatureTag::Neutral => Signature::NEUTRAL,
            SignatureTag::Lorentz => Signature::LORENTZ,
        }
    }

    fn flat_diagonal(self) -> [f64; 4] {
        match self {
            SignatureTag::Riemannian => [1.0; 4],
            SignatureTag::Neutral => [1.0, 1.0, -1.0, -1.0],
            SignatureTag::Lorentz => [-1.0, 1.0, 1.0, 1.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct StructureSpec {
    pub name: String,
    /// `+1` for paracomplex, `−1` for complex
    pub square: f64,
    pub matrix: [[String; 4]; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub seed: u64,
    pub count: usize,
    pub low: f64,
    pub high: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    pub name: String,
    pub chart: ChartSpec,
    pub signature: SignatureTag,
    #[serde(default)]
    pub metric: Option<[[String; 4]; 4]>,
    /// `Ω` with metric `Ω² · diag(d)`
    #[serde(default)]
    pub conformal_factor: Option<String>,
    /// `d` for the conformal form; defaults to the flat form of the signature
    #[serde(default)]
    pub flat_diagonal: Option<[f64; 4]>,
    #[serde(default)]
    pub structures: Vec<StructureSpec>,
    #[serde(default)]
    pub points: Vec<[f64; 4]>,
    #[serde(default)]
    pub sampler: Option<SamplerSpec>,
}

/// A parsed configuration. Every expression is compiled before anything is evaluated.
#[derive(Debug, Clone)]
pub struct Geometry {
    pub metric: MetricField,
    pub structures: Vec<StructureField>,
    pub points: Vec<[f64; 4]>,
}

#[derive(Debug, Clone)]
struct ExprMatrix([[ExprField; 4]; 4]);

impl MatrixFn for ExprMatrix {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let mut m = linalg::zeros::<T>();
        for (i, row) in self.0.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                m[i][j] = e.eval_real(x)?;
            }
        }
        Ok(m)
    }
}

#[derive(Debug, Clone)]
struct ConformalDiagonal {
    omega: ExprField,
    d: [f64; 4],
}

impl MatrixFn for ConformalDiagonal {
    fn eval<T: Real>(&self, x: &[T; 4]) -> Result<M4<T>> {
        let o = self.omega.eval_real(x)?;
        let o2 = o * o;
        let mut m = linalg::zeros::<T>();
        for k in 0..4 {
            m[k][k] = o2 * self.d[k];
        }
        Ok(m)
    }
}

fn compile_matrix(src: &[[String; 4]; 4], binding: &ChartBinding, what: &str) -> Result<ExprMatrix> {
    let mut cells = Vec::with_capacity(16);
    for (i, row) in src.iter().enumerate() {
        for (j, s) in row.iter().enumerate() {
            let f = ExprField::new(s, binding.clone()).map_err(|e| GeomError::Config(format!("{what} entry ({i},{j}) `{s}`: {e}")))?;
            cells.push(f);
        }
    }
    let mut it = cells.into_iter();
    Ok(ExprMatrix(std::array::from_fn(|_| std::array::from_fn(|_| it.next().expect("16 cells")))))
}

impl GeometryConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| GeomError::Config(e.to_string()))
    }

    /// Validate and compile.
    pub fn build(&self) -> Result<Geometry> {
        let binding = match &self.chart {
            ChartSpec::Real(n) => ChartBinding::Real(n.clone()),
            ChartSpec::Complex(n) => ChartBinding::Complex(n.clone()),
        };
        let mut names = binding.names();
        names.sort_unstable();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return Err(GeomError::Config("chart names must be distinct".into()));
        }
        let chart = Chart::new(&format!("{}-chart", self.name), binding.clone(), |_| true);
        let sig = self.signature.signature();
        let metric = match (&self.metric, &self.conformal_factor) {
            (Some(m), None) => {
                if self.flat_diagonal.is_some() {
                    return Err(GeomError::Config("flat_diagonal only applies to conformal_factor".into()));
                }
                for i in 0..4 {
                    for j in (i + 1)..4 {
                        if m[i][j].trim() != m[j][i].trim() {
                            return Err(GeomError::Config(format!("metric entries ({i},{j}) and ({j},{i}) differ")));
                        }
                    }
                }
                MetricField::new(&self.name, chart.clone(), sig, compile_matrix(m, &binding, "metric")?)
            }
            (None, Some(src)) => {
                let omega =
                    ExprField::new(src, binding.clone()).map_err(|e| GeomError::Config(format!("conformal_factor `{src}`: {e}")))?;
                let d = self.flat_diagonal.unwrap_or(self.signature.flat_diagonal());
                MetricField::new(&self.name, chart.clone(), sig, ConformalDiagonal { omega, d })
            }
            _ => return Err(GeomError::Config("give exactly one of `metric` and `conformal_factor`".into())),
        };
        let mut structures = Vec::with_capacity(self.structures.len());
        for s in &self.structures {
            if s.square != 1.0 && s.square != -1.0 {
                return Err(GeomError::Config(format!("structure `{}`: square must be 1 or -1", s.name)));
            }
            let prog = compile_matrix(&s.matrix, &binding, &format!("structure `{}`", s.name))?;
            structures.push(StructureField::new(&s.name, chart.clone(), s.square, prog));
        }
        let mut points = self.points.clone();
        if let Some(sp) = self.sampler {
            if sp.low.partial_cmp(&sp.high) != Some(std::cmp::Ordering::Less) {
                return Err(GeomError::Config("sampler needs low < high".into()));
            }
            points.extend(sampling::box_points(&mut sampling::rng(sp.seed), sp.count, sp.low, sp.high));
        }
        Ok(Geometry { metric, structures, points })
    }

    pub fn load(path: &Path) -> std::result::Result<Self, ConfigLoadError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigLoadError::Io(format!("{}: {e}", path.display())))?;
        Self::from_json(&text).map_err(ConfigLoadError::Invalid)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigLoadError {
    #[error("cannot read configuration: {0}")]
    Io(String),
    #[error(transparent)]
    Invalid(GeomError),
}

pub const BUILTINS: [&str; 8] = [
    "linespace-G",
    "linespace-G-tilde",
    "linespace-conformal",
    "product-s2xs2-plus",
    "product-s2xs2-minus",
    "fubini-study",
    "geodesic-sphere",
    "flat-neutral",
];

/// Built-in geometries, with their natural structure fields attached.
pub fn builtin(name: &str) -> Result<Geometry> {
    let unit = || products::SurfaceFactor::constant(1.0);
    let (metric, structures) = match name {
        "linespace-G" | "linespace-G-tilde" => {
            let (j0, j1, j2) = linespace::structures_j012();
            let g = if name == "linespace-G" { linespace::metric_g() } else { linespace::metric_g_tilde() };
            (g, vec![j0, j1, j2])
        }
        "linespace-conformal" => (pde::conformal_metric(&pde::ConformalFactor::line_space()), vec![]),
        "product-s2xs2-plus" | "product-s2xs2-minus" => {
            let eps = if name.ends_with("plus") { 1.0 } else { -1.0 };
            let p = products::build_product(unit(), unit(), eps)?;
            (p.metric, vec![p.j1, p.j2, p.j])
        }
        "fubini-study" => (topology::fubini_study(), vec![]),
        "geodesic-sphere" => {
            let sig = spaceforms::AmbientSignature::new(0, 1)?;
            let (j, jp, js) = spaceforms::structures_jjp_jstar(sig)?;
            (spaceforms::metric_gp(sig)?, vec![j, jp, js])
        }
        "flat-neutral" => (crate::tensor::flat_metric("flat-neutral", [1.0, 1.0, -1.0, -1.0]), vec![]),
        other => return Err(GeomError::Config(format!("unknown builtin geometry `{other}` (known: {})", BUILTINS.join(", ")))),
    };
    Ok(Geometry { metric, structures, points: vec![] })
}

#[derive(Debug, Clone, Serialize)]
pub struct StructureReport {
    pub name: String,
    pub square: f64,
    pub square_residual: f64,
    pub kind: StructureKind,
    pub parallel_residual: f64,
    pub nijenhuis_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CurvatureQuery {
    pub geometry: String,
    pub point: [f64; 4],
    pub curvature: CurvaturePackage,
    pub structures: Vec<StructureReport>,
}

/// Full curvature package at `p` plus the classification of attached structures.
pub fn curvature_query(geo: &Geometry, p: &[f64; 4]) -> Result<CurvatureQuery> {
    let c = curvature(&geo.metric, p)?;
    if c.signature != geo.metric.signature {
        return Err(GeomError::Config(format!("declared signature {} but the metric has {} at {p:?}", geo.metric.signature, c.signature)));
    }
    let mut out = Vec::with_capacity(geo.structures.len());
    for j in &geo.structures {
        let m = j.at(p)?;
        let kind = if j.square < 0.0 { classify_complex(&c.metric, &m)? } else { classify(&c.metric, &m)?.kind };
        out.push(StructureReport {
            name: j.name.clone(),
            square: j.square,
            square_residual: j.square_residual(p)?,
            kind,
            parallel_residual: structures::parallel_residual(&geo.metric, j, &[*p])?,
            nijenhuis_residual: max_abs3(&nijenhuis(j, p)?),
        });
    }
    Ok(CurvatureQuery { geometry: geo.metric.name.clone(), point: *p, curvature: c, structures: out })
}
