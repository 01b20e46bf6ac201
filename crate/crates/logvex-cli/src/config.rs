//! JSON config files for bodies and measures. Schemas are versioned with a
//! top-level "schema" field; unknown fields are rejected by serde and
//! misplaced fields (a valid field name on the wrong type) are rejected
//! here with a diagnostic naming the field.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use logvex::{build_pathological_phi, Body, Measure, Phi, Uniform};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyFile {
    pub schema: u32,
    pub body: BodySpec,
}

/// A measure file holds either a phi + L pair (density e^{-phi(||x||_L)})
/// or a uniform_on body (normalized Lebesgue measure on it), never both.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeasureFile {
    pub schema: u32,
    #[serde(default)]
    pub phi: Option<PhiSpec>,
    #[serde(rename = "L", default)]
    pub l: Option<BodySpec>,
    #[serde(default)]
    pub uniform_on: Option<BodySpec>,
}

/// The lp exponent accepts a number or the string "inf"; the latter builds
/// the same body as type "box" with the semi-axes as half-widths.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum POrInf {
    Num(f64),
    Word(String),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodySpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub p: Option<POrInf>,
    #[serde(default)]
    pub semi_axes: Option<Vec<f64>>,
    #[serde(default)]
    pub half_widths: Option<Vec<f64>>,
    #[serde(default)]
    pub normals: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub offsets: Option<Vec<f64>>,
    #[serde(default)]
    pub factor: Option<f64>,
    #[serde(default)]
    pub inner: Option<Box<BodySpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiSpec {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub scale: Option<f64>,
    #[serde(default)]
    pub offset: Option<f64>,
    #[serde(default)]
    pub slope: Option<f64>,
    #[serde(default)]
    pub dim: Option<usize>,
    #[serde(default)]
    pub k_max: Option<usize>,
}

fn req<V>(v: Option<V>, kind: &str, name: &str) -> Result<V, String> {
    v.ok_or_else(|| format!("body/phi type `{kind}` requires field `{name}`"))
}

impl BodySpec {
    fn reject_foreign(&self, allowed: &[&str]) -> Result<(), String> {
        let fields: [(&str, bool); 9] = [
            ("dim", self.dim.is_some()),
            ("radius", self.radius.is_some()),
            ("p", self.p.is_some()),
            ("semi_axes", self.semi_axes.is_some()),
            ("half_widths", self.half_widths.is_some()),
            ("normals", self.normals.is_some()),
            ("offsets", self.offsets.is_some()),
            ("factor", self.factor.is_some()),
            ("inner", self.inner.is_some()),
        ];
        for (name, set) in fields {
            if set && !allowed.contains(&name) {
                return Err(format!("body type `{}` does not take field `{name}`", self.kind));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Body, String> {
        let k = self.kind.as_str();
        let body = match k {
            "euclidean_ball" => {
                self.reject_foreign(&["dim", "radius"])?;
                Body::euclidean_ball(req(self.dim, k, "dim")?, req(self.radius, k, "radius")?)
            }
            "lp_ball" => {
                self.reject_foreign(&["p", "semi_axes"])?;
                let axes = req(self.semi_axes.clone(), k, "semi_axes")?;
                match req(self.p.as_ref(), k, "p")? {
                    POrInf::Num(p) => Body::lp_ball(*p, axes),
                    POrInf::Word(w) if w == "inf" => Body::box_body(axes),
                    POrInf::Word(w) => {
                        return Err(format!("lp exponent must be a number or \"inf\", got \"{w}\""))
                    }
                }
            }
            "box" => {
                self.reject_foreign(&["half_widths"])?;
                Body::box_body(req(self.half_widths.clone(), k, "half_widths")?)
            }
            "symmetric_polytope" => {
                self.reject_foreign(&["normals", "offsets"])?;
                Body::symmetric_polytope(
                    req(self.normals.clone(), k, "normals")?,
                    req(self.offsets.clone(), k, "offsets")?,
                )
            }
            "dilate" => {
                self.reject_foreign(&["factor", "inner"])?;
                let inner = req(self.inner.as_deref(), k, "inner")?.build()?;
                Body::dilate(inner, req(self.factor, k, "factor")?)
            }
            other => {
                return Err(format!(
                    "unknown body type `{other}`; expected euclidean_ball, lp_ball, box, \
                     symmetric_polytope or dilate"
                ))
            }
        };
        body.map_err(|e| e.to_string())
    }
}

impl PhiSpec {
    fn reject_foreign(&self, allowed: &[&str]) -> Result<(), String> {
        let fields: [(&str, bool); 6] = [
            ("p", self.p.is_some()),
            ("scale", self.scale.is_some()),
            ("offset", self.offset.is_some()),
            ("slope", self.slope.is_some()),
            ("dim", self.dim.is_some()),
            ("k_max", self.k_max.is_some()),
        ];
        for (name, set) in fields {
            if set && !allowed.contains(&name) {
                return Err(format!("phi type `{}` does not take field `{name}`", self.kind));
            }
        }
        Ok(())
    }

    pub fn build(&self) -> Result<Phi, String> {
        let k = self.kind.as_str();
        let phi = match k {
            "power" => {
                self.reject_foreign(&["p", "scale", "offset"])?;
                Phi::power(
                    req(self.p, k, "p")?,
                    self.scale.unwrap_or(1.0),
                    self.offset.unwrap_or(0.0),
                )
            }
            "linear" => {
                self.reject_foreign(&["slope", "offset"])?;
                Phi::linear(req(self.slope, k, "slope")?, self.offset.unwrap_or(0.0))
            }
            "gaussian" => {
                self.reject_foreign(&["dim"])?;
                Phi::gaussian_normalized(req(self.dim, k, "dim")?)
            }
            "pathological" => {
                self.reject_foreign(&["k_max"])?;
                return build_pathological_phi(req(self.k_max, k, "k_max")?)
                    .map(|(phi, _)| phi)
                    .map_err(|e| e.to_string());
            }
            other => {
                return Err(format!(
                    "unknown phi type `{other}`; expected power, linear, gaussian or pathological"
                ))
            }
        };
        phi.map_err(|e| e.to_string())
    }
}

pub enum MeasureKind {
    Norm(Measure),
    Uniform(Uniform),
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn check_schema(path: &Path, schema: u32) -> Result<(), String> {
    if schema != SCHEMA {
        return Err(format!(
            "{}: unsupported schema version {schema}, this build reads schema {SCHEMA}",
            path.display()
        ));
    }
    Ok(())
}

pub fn load_body(path: &Path) -> Result<Body, String> {
    let file: BodyFile = parse(path)?;
    check_schema(path, file.schema)?;
    file.body.build().map_err(|e| format!("{}: {e}", path.display()))
}

pub fn load_measure(path: &Path) -> Result<MeasureKind, String> {
    let file: MeasureFile = parse(path)?;
    check_schema(path, file.schema)?;
    match (&file.phi, &file.l, &file.uniform_on) {
        (Some(phi), Some(l), None) => {
            let phi = phi.build().map_err(|e| format!("{}: {e}", path.display()))?;
            let l = l.build().map_err(|e| format!("{}: {e}", path.display()))?;
            Measure::new(phi, l)
                .map(MeasureKind::Norm)
                .map_err(|e| format!("{}: {e}", path.display()))
        }
        (None, None, Some(omega)) => {
            let omega = omega.build().map_err(|e| format!("{}: {e}", path.display()))?;
            Ok(MeasureKind::Uniform(Uniform::new(omega)))
        }
        (Some(_), None, None) => {
            Err(format!("{}: phi-based measures also need the body `L`", path.display()))
        }
        _ => Err(format!(
            "{}: a measure is either {{phi, L}} or {{uniform_on}}, not a mix",
            path.display()
        )),
    }
}

/// The phi of a norm measure, for subcommands that only consume phi.
pub fn load_phi(path: &Path) -> Result<Phi, String> {
    match load_measure(path)? {
        MeasureKind::Norm(m) => Ok(m.phi),
        MeasureKind::Uniform(_) => Err(format!(
            "{}: this subcommand needs a phi-based measure, not uniform_on",
            path.display()
        )),
    }
}
