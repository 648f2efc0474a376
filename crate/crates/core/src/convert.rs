//! Coordinate converters on the space of oriented lines, with JSON payloads.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::complex::Cx;
use crate::error::{GeomError, Result};
use crate::linespace::{self, ConformalPoint, LinePoint, PlueckerSextet};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConvertKind {
    XiEtaToConformal,
    ConformalToXiEta,
    PointsToPluecker,
    PlueckerToConformal,
}

impl ConvertKind {
    pub const ALL: [ConvertKind; 4] =
        [ConvertKind::XiEtaToConformal, ConvertKind::ConformalToXiEta, ConvertKind::PointsToPluecker, ConvertKind::PlueckerToConformal];

    pub fn name(self) -> &'static str {
        match self {
            ConvertKind::XiEtaToConformal => "xi-eta-to-conformal",
            ConvertKind::ConformalToXiEta => "conformal-to-xi-eta",
            ConvertKind::PointsToPluecker => "points-to-pluecker",
            ConvertKind::PlueckerToConformal => "pluecker-to-conformal",
        }
    }

    /// Accepts the hyphenated names and the `a→b` spelling.
    pub fn parse(s: &str) -> Option<Self> {
        let norm = s.replace('→', "-to-");
        Self::ALL.into_iter().find(|k| k.name() == norm)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct XiEta {
    xi: [f64; 2],
    eta: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Conformal {
    #[serde(rename = "Z1")]
    z1: [f64; 2],
    #[serde(rename = "Z2")]
    z2: [f64; 2],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TwoPoints {
    s: [f64; 3],
    t: [f64; 3],
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct Sextet {
    p: [f64; 3],
    q: [f64; 3],
}

#[derive(Debug, Serialize)]
struct ConformalOut {
    #[serde(rename = "Z1")]
    z1: [f64; 2],
    #[serde(rename = "Z2")]
    z2: [f64; 2],
    #[serde(rename = "X")]
    x: [f64; 4],
    #[serde(skip_serializing_if = "Option::is_none")]
    roundtrip_residual: Option<f64>,
}

#[derive(Debug, Serialize)]
struct XiEtaOut {
    xi: [f64; 2],
    eta: [f64; 2],
    roundtrip_residual: f64,
}

#[derive(Debug, Serialize)]
struct PlueckerOut {
    p: [f64; 3],
    q: [f64; 3],
    relation: f64,
    /// conformal image, absent for horizontal lines
    #[serde(rename = "X")]
    x: Option<[f64; 4]>,
}

fn pair(c: Cx<f64>) -> [f64; 2] {
    [c.re, c.im]
}

fn conformal_out(cp: &ConformalPoint, roundtrip_residual: Option<f64>) -> ConformalOut {
    ConformalOut { z1: pair(cp.z1), z2: pair(cp.z2), x: cp.chart(), roundtrip_residual }
}

fn payload<T: serde::de::DeserializeOwned>(v: Value) -> Result<T> {
    serde_json::from_value(v).map_err(|e| GeomError::Config(format!("payload: {e}")))
}

/// Run one conversion. Schema problems come back as [`GeomError::Config`].
pub fn convert(kind: ConvertKind, input: Value) -> Result<Value> {
    let out = match kind {
        ConvertKind::XiEtaToConformal => {
            let p: XiEta = payload(input)?;
            let l = LinePoint::new((p.xi[0], p.xi[1]), (p.eta[0], p.eta[1]));
            let cp = linespace::to_conformal(&l)?;
            let back = linespace::from_conformal(&cp);
            let r = (back.xi - l.xi).modulus().max((back.eta - l.eta).modulus());
            serde_json::to_value(conformal_out(&cp, Some(r)))
        }
        ConvertKind::ConformalToXiEta => {
            let p: Conformal = payload(input)?;
            let cp = ConformalPoint { z1: Cx::new(p.z1[0], p.z1[1]), z2: Cx::new(p.z2[0], p.z2[1]) };
            let l = linespace::from_conformal(&cp);
            let again = linespace::to_conformal(&l)?;
            let r = (again.z1 - cp.z1).modulus().max((again.z2 - cp.z2).modulus());
            serde_json::to_value(XiEtaOut { xi: pair(l.xi), eta: pair(l.eta), roundtrip_residual: r })
        }
        ConvertKind::PointsToPluecker => {
            let p: TwoPoints = payload(input)?;
            let px = linespace::pluecker(p.s, p.t)?;
            let x = match linespace::conformal_from_pluecker(&px) {
                Ok(x) => Some(x),
                Err(GeomError::HorizontalLine) => None,
                Err(e) => return Err(e),
            };
            serde_json::to_value(PlueckerOut { p: px.p, q: px.q, relation: px.relation(), x })
        }
        ConvertKind::PlueckerToConformal => {
            let p: Sextet = payload(input)?;
            let px = PlueckerSextet { p: p.p, q: p.q };
            let x = linespace::conformal_from_pluecker(&px)?;
            serde_json::to_value(conformal_out(&ConformalPoint::from_chart(&x), None))
        }
    };
    out.map_err(|e| GeomError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn xi_eta_roundtrip() {
        let v = convert(ConvertKind::XiEtaToConformal, json!({"xi": [0.3, 0.1], "eta": [0.2, -0.4]})).unwrap();
        assert!(v["roundtrip_residual"].as_f64().unwrap() < 1e-10);
        let z = json!({"Z1": v["Z1"].clone(), "Z2": v["Z2"].clone()});
        let back = convert(ConvertKind::ConformalToXiEta, z).unwrap();
        assert!((back["xi"][0].as_f64().unwrap() - 0.3).abs() < 1e-12);
        assert!((back["eta"][1].as_f64().unwrap() + 0.4).abs() < 1e-12);
    }

    #[test]
    fn axis_goes_to_origin() {
        let v = convert(ConvertKind::PointsToPluecker, json!({"s": [0, 0, 0], "t": [0, 0, -1]})).unwrap();
        assert_eq!(v["X"], json!([0.0, 0.0, 0.0, 0.0]));
        let w = convert(ConvertKind::PlueckerToConformal, json!({"p": v["p"].clone(), "q": v["q"].clone()})).unwrap();
        assert_eq!(w["X"], json!([0.0, 0.0, 0.0, 0.0]));
    }

    #[test]
    fn errors() {
        let e = convert(ConvertKind::XiEtaToConformal, json!({"xi": [1.2, 0.0], "eta": [0.0, 0.0]})).unwrap_err();
        assert!(matches!(e, GeomError::OutsideHemisphere(_)));
        let e = convert(ConvertKind::PlueckerToConformal, json!({"p": [0, -1, 0], "q": [1, 0, 0]})).unwrap_err();
        assert_eq!(e, GeomError::HorizontalLine);
        let e = convert(ConvertKind::XiEtaToConformal, json!({"xi": [0.1, 0.0]})).unwrap_err();
        assert!(matches!(e, GeomError::Config(_)));
        let flat = convert(ConvertKind::PointsToPluecker, json!({"s": [0, 0, 1], "t": [1, 0, 1]})).unwrap();
        assert!(flat["X"].is_null());
    }

    #[test]
    fn kind_names() {
        for k in ConvertKind::ALL {
            assert_eq!(ConvertKind::parse(k.name()), Some(k));
        }
        assert_eq!(ConvertKind::parse("xi-eta→conformal"), Some(ConvertKind::XiEtaToConformal));
        assert_eq!(ConvertKind::parse("sideways"), None);
    }
}
