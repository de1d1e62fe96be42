//! Resolved run configuration and built-in shape specs.

use std::path::PathBuf;

use capacitary_core::geometry::{
    make_bumpy_sphere_mesh, make_ellipsoid_mesh, make_sphere_mesh, TriMesh,
};
use capacitary_core::oracles::ellipsoid_capacity;
use serde_json::{json, Value};

use crate::args::{Format, InputArgs};
use crate::error::CliError;
use crate::report::num;

/// A built-in shape, with an optional refinement level.
#[derive(Debug, Clone, PartialEq)]
pub enum Shape {
    Sphere { radius: f64 },
    Ellipsoid { a: f64, b: f64, c: f64 },
    Bumpy { radius: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShapeSpec {
    pub shape: Shape,
    pub level: Option<u32>,
}

impl ShapeSpec {
    pub fn parse(tokens: &[String]) -> Result<Self, CliError> {
        let (name, rest) = tokens
            .split_first()
            .ok_or_else(|| CliError::Usage("empty shape spec".into()))?;
        let arity = match name.as_str() {
            "sphere" => 1,
            "ellipsoid" => 3,
            "bumpy" => 2,
            other => return Err(CliError::Unsupported(format!("shape \"{other}\""))),
        };
        if rest.len() != arity && rest.len() != arity + 1 {
            return Err(CliError::Usage(format!(
                "shape {name} takes {arity} parameter(s) and an optional level, got {}",
                rest.len()
            )));
        }
        let mut params = Vec::with_capacity(arity);
        for s in &rest[..arity] {
            let v: f64 = s
                .parse()
                .map_err(|_| CliError::Usage(format!("invalid number \"{s}\" in shape spec")))?;
            params.push(v);
        }
        let positive = |v: f64, what: &str| {
            if v > 0.0 && v.is_finite() {
                Ok(v)
            } else {
                Err(CliError::Usage(format!("{what} must be positive, got {v}")))
            }
        };
        let shape = match name.as_str() {
            "sphere" => Shape::Sphere {
                radius: positive(params[0], "radius")?,
            },
            "ellipsoid" => Shape::Ellipsoid {
                a: positive(params[0], "semi-axis a")?,
                b: positive(params[1], "semi-axis b")?,
                c: positive(params[2], "semi-axis c")?,
            },
            _ => Shape::Bumpy {
                radius: positive(params[0], "radius")?,
                amplitude: {
                    let e = params[1];
                    if !(e.abs() < 0.5) {
                        return Err(CliError::Usage(format!(
                            "bumpy amplitude must lie in (-0.5, 0.5), got {e}"
                        )));
                    }
                    e
                },
            },
        };
        let level = match rest.get(arity) {
            None => None,
            Some(s) => Some(s.parse::<u32>().ok().filter(|&l| l <= 7).ok_or_else(|| {
                CliError::Usage(format!("level must be an integer in 0..=7, got \"{s}\""))
            })?),
        };
        Ok(ShapeSpec { shape, level })
    }

    pub fn mesh_at(&self, level: u32) -> Result<TriMesh, CliError> {
        let m = match self.shape {
            Shape::Sphere { radius } => make_sphere_mesh(radius, level),
            Shape::Ellipsoid { a, b, c } => make_ellipsoid_mesh(a, b, c, level),
            Shape::Bumpy { radius, amplitude } => make_bumpy_sphere_mesh(radius, amplitude, level),
        };
        m.map_err(CliError::from_core)
    }

    pub fn mesh(&self) -> Result<TriMesh, CliError> {
        let level = self
            .level
            .ok_or_else(|| CliError::Usage("shape spec needs a refinement level".into()))?;
        self.mesh_at(level)
    }

    /// Exact capacity in R³, when known in closed form.
    pub fn oracle_capacity(&self) -> Option<f64> {
        match self.shape {
            Shape::Sphere { radius } => Some(4.0 * std::f64::consts::PI * radius),
            Shape::Ellipsoid { a, b, c } => ellipsoid_capacity(a, b, c).ok(),
            Shape::Bumpy { .. } => None,
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self.shape, Shape::Sphere { .. })
    }

    pub fn echo(&self) -> Value {
        let mut v = match self.shape {
            Shape::Sphere { radius } => json!({ "kind": "sphere", "radius": num(radius) }),
            Shape::Ellipsoid { a, b, c } => {
                json!({ "kind": "ellipsoid", "a": num(a), "b": num(b), "c": num(c) })
            }
            Shape::Bumpy { radius, amplitude } => {
                json!({ "kind": "bumpy", "radius": num(radius), "amplitude": num(amplitude) })
            }
        };
        v["level"] = json!(self.level);
        v
    }
}

/// Exactly one input source.
#[derive(Debug, Clone, PartialEq)]
pub enum Input {
    Mesh(PathBuf),
    Shape(ShapeSpec),
}

impl Input {
    pub fn from_args(args: &InputArgs) -> Result<Self, CliError> {
        match (&args.mesh, &args.shape) {
            (Some(p), None) => Ok(Input::Mesh(p.clone())),
            (None, Some(tokens)) => Ok(Input::Shape(ShapeSpec::parse(tokens)?)),
            _ => Err(CliError::Usage(
                "give exactly one of --mesh or --shape".into(),
            )),
        }
    }

    pub fn echo(&self) -> Value {
        match self {
            Input::Mesh(p) => json!({ "mesh": p.display().to_string() }),
            Input::Shape(s) => json!({ "shape": s.echo() }),
        }
    }
}

/// Everything a run depends on, echoed into every report.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub subcommand: &'static str,
    pub input: Option<Input>,
    pub quad_order: usize,
    pub far_radius: f64,
    pub tol_f1: Option<f64>,
    pub tol_f2: Option<f64>,
    pub tol_newton: Option<f64>,
    pub format: Format,
    pub output: Option<PathBuf>,
    pub seed: u64,
    pub samples: usize,
}

impl RunConfig {
    pub fn check(&self) -> Result<(), CliError> {
        if ![1, 3, 6, 12].contains(&self.quad_order) {
            return Err(CliError::Usage(format!(
                "--quad-order must be one of 1, 3, 6, 12, got {}",
                self.quad_order
            )));
        }
        if !(self.far_radius >= 10.0 && self.far_radius.is_finite()) {
            return Err(CliError::Usage(format!(
                "--far-radius must be at least 10 mesh diameters, got {}",
                self.far_radius
            )));
        }
        for (name, t) in [
            ("--tol-f1", self.tol_f1),
            ("--tol-f2", self.tol_f2),
            ("--tol-newton", self.tol_newton),
        ] {
            if let Some(t) = t {
                if !(t > 0.0 && t.is_finite()) {
                    return Err(CliError::Usage(format!("{name} must be positive, got {t}")));
                }
            }
        }
        if self.samples == 0 {
            return Err(CliError::Usage("--samples must be positive".into()));
        }
        Ok(())
    }

    pub fn echo(&self) -> Value {
        let mut v = json!({
            "subcommand": self.subcommand,
            "quad_order": self.quad_order,
            "far_radius": num(self.far_radius),
            "tol_f1": self.tol_f1.map(num),
            "tol_f2": self.tol_f2.map(num),
            "tol_newton": self.tol_newton.map(num),
            "format": match self.format { Format::Json => "json", Format::Csv => "csv" },
            "output": self.output.as_ref().map(|p| p.display().to_string()),
            "seed": self.seed,
            "samples": self.samples,
        });
        if let Some(input) = &self.input {
            v["input"] = input.echo();
        }
        v
    }
}

/// `LO-HI` or `a,b,c`.
pub fn parse_levels(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("invalid --levels \"{s}\""));
    let levels: Vec<u32> = if let Some((lo, hi)) = s.split_once('-') {
        let lo: u32 = lo.trim().parse().map_err(|_| bad())?;
        let hi: u32 = hi.trim().parse().map_err(|_| bad())?;
        (lo..=hi).collect()
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<u32>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if levels.is_empty() || levels.iter().any(|&l| l > 7) || levels.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(bad());
    }
    Ok(levels)
}
