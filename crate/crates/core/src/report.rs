//! Verification reports: named checks with residuals, tolerances and pass flags.

use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::ser::{Formatter, PrettyFormatter};

pub const SCHEMA_VERSION: u32 = 1;
pub const ENGINE_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// pass iff `residual ≤ tolerance`
    AtMost,
    /// pass iff `residual ≥ tolerance`; used for quantities that must stay away from zero
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub id: String,
    pub description: String,
    /// short tag naming the statement the check instantiates
    pub anchor: String,
    #[serde(serialize_with = "tag_nonfinite", deserialize_with = "float_or_tag")]
    pub residual: f64,
    #[serde(serialize_with = "tag_nonfinite", deserialize_with = "float_or_tag")]
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Check {
    fn new(id: &str, description: &str, anchor: &str, residual: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::AtMost => residual <= tolerance,
            Comparison::AtLeast => residual >= tolerance,
        };
        Check {
            id: id.to_string(),
            description: description.to_string(),
            anchor: anchor.to_string(),
            residual,
            tolerance,
            comparison,
            pass,
        }
    }

    /// Pass flag recomputed from the stored numbers.
    pub fn consistent(&self) -> bool {
        self.pass
            == match self.comparison {
                Comparison::AtMost => self.residual <= self.tolerance,
                Comparison::AtLeast => self.residual >= self.tolerance,
            }
    }
}

/// Non-finite values are written as `"inf"`, `"-inf"` or `"nan"`.
fn tag_nonfinite<S: serde::Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    match *v {
        v if v.is_finite() => s.serialize_f64(v),
        v if v.is_nan() => s.serialize_str("nan"),
        v if v > 0.0 => s.serialize_str("inf"),
        _ => s.serialize_str("-inf"),
    }
}

/// Inverse of [`tag_nonfinite`].
fn float_or_tag<'de, D: serde::Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum F {
        Num(f64),
        Tag(String),
    }
    match F::deserialize(d)? {
        F::Num(v) => Ok(v),
        F::Tag(t) => match t.as_str() {
            "inf" => Ok(f64::INFINITY),
            "-inf" => Ok(f64::NEG_INFINITY),
            "nan" => Ok(f64::NAN),
            _ => Err(serde::de::Error::custom(format!("expected a number, got `{t}`"))),
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub suite: String,
    pub engine_version: String,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub checks: Vec<Check>,
    /// suite-specific tables (rows of expected vs computed values, convergence data)
    pub tables: serde_json::Map<String, serde_json::Value>,
    pub summary: Summary,
    pub wall_time_seconds: f64,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failed_ids(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.pass).map(|c| c.id.as_str()).collect()
    }

    pub fn check(&self, id: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.id == id)
    }

    /// Checks whose id starts with `prefix`.
    pub fn group<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = &'a Check> + 'a {
        self.checks.iter().filter(move |c| c.id.starts_with(prefix))
    }

    /// 0 when every check passes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_pass() {
            0
        } else {
            1
        }
    }

    /// JSON with every float written as `{:.16e}`.
    pub fn to_json(&self) -> String {
        to_json_17(self)
    }

    pub fn write(&self, path: &Path) -> io::Result<()> {
        std::fs::write(path, self.to_json())
    }
}

/// Collects checks for one suite. Tolerances are multiplied by `scale` for
/// [`Comparison::AtMost`] and divided by it for [`Comparison::AtLeast`], so a scale
/// above 1 always loosens.
#[derive(Debug)]
pub struct ReportBuilder {
    scale: f64,
    checks: Vec<Check>,
    tables: serde_json::Map<String, serde_json::Value>,
}

impl ReportBuilder {
    pub fn new(scale: f64) -> Self {
        ReportBuilder { scale, checks: Vec::new(), tables: serde_json::Map::new() }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn at_most(&mut self, id: &str, anchor: &str, description: &str, residual: f64, tolerance: f64) {
        self.checks.push(Check::new(id, description, anchor, residual, tolerance * self.scale, Comparison::AtMost));
    }

    pub fn at_least(&mut self, id: &str, anchor: &str, description: &str, value: f64, threshold: f64) {
        self.checks.push(Check::new(id, description, anchor, value, threshold / self.scale, Comparison::AtLeast));
    }

    /// Exact predicate, reported as residual 0 or 1 with tolerance 0. Not scaled.
    pub fn holds(&mut self, id: &str, anchor: &str, description: &str, ok: bool) {
        let r = if ok { 0.0 } else { 1.0 };
        self.checks.push(Check::new(id, description, anchor, r, 0.0, Comparison::AtMost));
    }

    /// A check whose evaluation raised an error is recorded as failing.
    pub fn errored(&mut self, id: &str, anchor: &str, err: &dyn std::fmt::Display) {
        self.checks.push(Check::new(id, &format!("error: {err}"), anchor, f64::INFINITY, 0.0, Comparison::AtMost));
    }

    pub fn table(&mut self, name: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.tables.insert(name.to_string(), v);
    }

    pub fn extend(&mut self, other: ReportBuilder) {
        self.checks.extend(other.checks);
        self.tables.extend(other.tables);
    }

    pub fn finish(self, suite: &str, seed: u64, wall_time_seconds: f64) -> VerificationReport {
        let mut checks = self.checks;
        // stable, so duplicate ids keep their insertion order
        checks.sort_by(|a, b| a.id.cmp(&b.id));
        let passed = checks.iter().filter(|c| c.pass).count();
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            suite: suite.to_string(),
            engine_version: ENGINE_VERSION.to_string(),
            seed,
            tolerance_scale: self.scale,
            summary: Summary { total: checks.len(), passed, failed: checks.len() - passed },
            checks,
            tables: self.tables,
            wall_time_seconds,
        }
    }
}

/// Pretty JSON where floats carry 17 significant digits.
pub fn to_json_17<S: Serialize>(value: &S) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Digits17(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing to memory");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json writes utf-8")
}

struct Digits17<'a>(PrettyFormatter<'a>);

impl Formatter for Digits17<'_> {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        write!(w, "{v:.16e}")
    }
    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(v))
    }
    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }
    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }
    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }
    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }
    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }
    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }
    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }
    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }
    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json_17(&vec![0.1, 1.0, -2.5e-12]);
        assert!(s.contains("1.0000000000000001e-1"));
        assert!(s.contains("1.0000000000000000e0"));
        assert!(s.contains("-2.4999999999999998e-12"));
        let back: Vec<serde_json::Value> = serde_json::from_str(&s).unwrap();
        assert_eq!(back[0].as_f64(), Some(0.1));
    }

    #[test]
    fn builder_scales_tolerances_and_counts() {
        let mut b = ReportBuilder::new(10.0);
        b.at_most("a", "x", "small", 5e-9, 1e-9);
        b.at_least("b", "x", "large", 2e-4, 1e-3);
        b.holds("c", "x", "flag", false);
        let r = b.finish("t", 1, 0.0);
        assert_eq!(r.summary, Summary { total: 3, passed: 2, failed: 1 });
        assert_eq!(r.failed_ids(), vec!["c"]);
        assert!(r.checks.iter().all(Check::consistent));
        assert_eq!(r.exit_code(), 1);
    }

    #[test]
    fn report_roundtrips() {
        let mut b = ReportBuilder::new(1.0);
        b.at_most("z", "x", "d", 1.0 / 3.0, 1.0);
        b.errored("e", "x", &"boom");
        b.table("rows", vec![[1.0, 2.0]]);
        let r = b.finish("t", 42, 0.25);
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.check("e").unwrap().residual, f64::INFINITY);
    }
}
