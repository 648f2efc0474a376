use thiserror::Error;

use crate::expr::ExprError;
use crate::jet::NumError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("singular metric (|det g| = {0:e})")]
    SingularMetric(f64),
    #[error("unsupported signature {0}")]
    UnsupportedSignature(String),
    #[error("point {0:?} is outside chart `{1}`")]
    OutsideChart([f64; 4], String),
    #[error("map image lies outside target chart `{0}`")]
    TargetOutsideChart(String),
    #[error("not an almost paracomplex structure: {0}")]
    NotParacomplex(String),
    #[error("structure is not isometric: {0}")]
    NotIsometric(String),
    #[error("pole of chart: xi = 0 has no image under the reflection")]
    PoleOfChart,
    #[error("point outside the upper hemisphere (|xi| = {0})")]
    OutsideHemisphere(f64),
    #[error("degenerate line: the two points coincide")]
    DegenerateLine,
    #[error("horizontal line: q3 = 0")]
    HorizontalLine,
    #[error("chart degeneracy (pivot {0:e})")]
    ChartDegeneracy(f64),
    #[error("normalization impossible: {0}")]
    NormalizationImpossible(String),
    #[error("frame degeneracy (pivot {0:e})")]
    FrameDegeneracy(f64),
    #[error("indefinite plane (induced metric determinant {0:e})")]
    IndefinitePlane(f64),
    #[error("degenerate span (pivot {0:e})")]
    DegenerateSpan(f64),
    #[error("coincident eigenplanes: e^(i phi1) = e^(i phi2)")]
    CoincidentPlanes,
    #[error("degenerate structure: {0}")]
    DegenerateStructure(String),
    #[error("polar degeneracy: a or b vanishes")]
    PolarDegeneracy,
    #[error("grid too coarse: measure {measure} vs expected {expected}")]
    GridTooCoarse { measure: f64, expected: f64 },
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
