//! Serializable description of a family instance, as read from configs.

use serde::{Deserialize, Serialize};

use super::{
    circle, control_flat_plane, control_graph, frenet_apparatus, make_e42, make_s42_curve, make_s42_hyp,
    make_s42_trig, CurveCausality, E42Kind, FamilyTag, GeneratedSurface, GRID_MARGIN,
};
use crate::error::{Error, Result};
use crate::immersion::Rect;
use crate::numerics::Expr;
use crate::verify::OdeProblem;

/// Deepest nesting of sums and products accepted in a function descriptor.
pub const MAX_EXPR_DEPTH: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct E42Params {
    #[serde(default = "zero")]
    pub m: Expr,
    #[serde(rename = "F")]
    pub forcing: Expr,
    pub b0: f64,
    pub db0: f64,
    #[serde(default)]
    pub t0: Option<f64>,
}

fn zero() -> Expr {
    Expr::Const(0.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileParams {
    pub b: Expr,
}

/// Built-in constant-curvature generating curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveShape {
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveParams {
    pub curve: CurveShape,
    pub b: Expr,
    /// Sign in front of the `sinh s` block; spacelike family only.
    #[serde(default)]
    pub eps: Option<f64>,
    #[serde(default)]
    pub t0: Option<f64>,
}

/// One of the six classified families, or a control surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tag")]
pub enum FamilySpec {
    #[serde(rename = "E42-i")]
    E42I(E42Params),
    #[serde(rename = "E42-ii")]
    E42Ii(E42Params),
    #[serde(rename = "S42-trig")]
    S42Trig(ProfileParams),
    #[serde(rename = "S42-hyp")]
    S42Hyp(ProfileParams),
    #[serde(rename = "S42-curve-timelike")]
    S42CurveTimelike(CurveParams),
    #[serde(rename = "S42-curve-spacelike")]
    S42CurveSpacelike(CurveParams),
    #[serde(rename = "control-flat-plane")]
    ControlFlatPlane,
    #[serde(rename = "control-graph")]
    ControlGraph,
}

impl FamilySpec {
    pub fn tag(&self) -> Option<FamilyTag> {
        Some(match self {
            FamilySpec::E42I(_) => FamilyTag::E42I,
            FamilySpec::E42Ii(_) => FamilyTag::E42Ii,
            FamilySpec::S42Trig(_) => FamilyTag::S42Trig,
            FamilySpec::S42Hyp(_) => FamilyTag::S42Hyp,
            FamilySpec::S42CurveTimelike(_) => FamilyTag::S42CurveTimelike,
            FamilySpec::S42CurveSpacelike(_) => FamilyTag::S42CurveSpacelike,
            FamilySpec::ControlFlatPlane | FamilySpec::ControlGraph => return None,
        })
    }

    pub fn label(&self) -> &'static str {
        match self {
            FamilySpec::ControlFlatPlane => "control-flat-plane",
            FamilySpec::ControlGraph => "control-graph",
            other => other.tag().expect("family").as_str(),
        }
    }

    fn exprs(&self) -> Vec<&Expr> {
        match self {
            FamilySpec::E42I(p) | FamilySpec::E42Ii(p) => vec![&p.m, &p.forcing],
            FamilySpec::S42Trig(p) | FamilySpec::S42Hyp(p) => vec![&p.b],
            FamilySpec::S42CurveTimelike(p) | FamilySpec::S42CurveSpacelike(p) => vec![&p.b],
            _ => vec![],
        }
    }

    /// Checks descriptor depth and sign parameters.
    pub fn validate(&self) -> Result<()> {
        for e in self.exprs() {
            if e.depth() > MAX_EXPR_DEPTH {
                return Err(Error::Config(format!(
                    "function descriptor nests sums/products {} deep (max {MAX_EXPR_DEPTH})",
                    e.depth()
                )));
            }
        }
        match self {
            FamilySpec::S42CurveTimelike(p) if p.eps.is_some() => Err(Error::Config(
                "`eps` applies to the S42-curve-spacelike family only".into(),
            )),
            FamilySpec::S42CurveSpacelike(CurveParams { eps: Some(e), .. }) if *e != 1.0 && *e != -1.0 => {
                Err(Error::Config(format!("`eps` must be 1 or -1, got {e}")))
            }
            _ => Ok(()),
        }
    }

    /// Builds the surface on `domain`.
    pub fn build(&self, domain: Rect) -> Result<GeneratedSurface> {
        self.validate()?;
        match self {
            FamilySpec::E42I(p) | FamilySpec::E42Ii(p) => {
                let kind = if matches!(self, FamilySpec::E42I(_)) {
                    E42Kind::I
                } else {
                    E42Kind::Ii
                };
                make_e42(
                    kind,
                    p.m.clone().into_fn(),
                    p.forcing.clone().into_fn(),
                    (p.b0, p.db0),
                    p.t0,
                    domain,
                )
            }
            FamilySpec::S42Trig(p) => make_s42_trig(p.b.clone().into_fn(), domain),
            FamilySpec::S42Hyp(p) => make_s42_hyp(p.b.clone().into_fn(), domain),
            FamilySpec::S42CurveTimelike(p) | FamilySpec::S42CurveSpacelike(p) => {
                let causal = if matches!(self, FamilySpec::S42CurveTimelike(_)) {
                    CurveCausality::Timelike
                } else {
                    CurveCausality::Spacelike
                };
                let span = [domain.t[0] - GRID_MARGIN, domain.t[1] + GRID_MARGIN];
                let curve = frenet_apparatus(circle(causal, p.curve.kappa)?, causal, span, 101)?;
                make_s42_curve(curve, p.b.clone().into_fn(), p.eps.unwrap_or(1.0), p.t0, domain)
            }
            FamilySpec::ControlFlatPlane => Ok(control_flat_plane(domain)),
            FamilySpec::ControlGraph => Ok(control_graph(domain)),
        }
    }

    /// The family's own ODE `b'' - b = F`, when it has one.
    pub fn ode_problem(&self, domain: Rect) -> Option<OdeProblem> {
        match self {
            FamilySpec::E42I(p) | FamilySpec::E42Ii(p) => Some(OdeProblem {
                label: format!("{}: b'' - b = F", self.label()),
                sigma: 1.0,
                rhs: p.forcing.clone().into_fn(),
                t0: p.t0.unwrap_or(domain.t[0]),
                b0: p.b0,
                db0: p.db0,
                span: domain.t,
                exact: None,
            }),
            _ => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_each_shape() {
        let e: FamilySpec =
            serde_json::from_str(r#"{"tag": "E42-i", "m": 0, "F": {"poly": [1, 2]}, "b0": -1, "db0": 0}"#)
                .unwrap();
        assert_eq!(e.tag(), Some(FamilyTag::E42I));
        let t: FamilySpec = serde_json::from_str(r#"{"tag": "S42-trig", "b": {"poly": [0, 1]}}"#).unwrap();
        assert_eq!(t.label(), "S42-trig");
        let c: FamilySpec = serde_json::from_str(
            r#"{"tag": "S42-curve-spacelike", "curve": {"kappa": 0.5}, "b": "cosh", "eps": -1}"#,
        )
        .unwrap();
        assert!(c.validate().is_ok());
        let p: FamilySpec = serde_json::from_str(r#"{"tag": "control-flat-plane"}"#).unwrap();
        assert_eq!(p, FamilySpec::ControlFlatPlane);
    }

    #[test]
    fn rejects_unknown_fields_and_deep_exprs() {
        assert!(serde_json::from_str::<FamilySpec>(r#"{"tag": "S42-trig", "b": 1, "x": 2}"#).is_err());
        assert!(serde_json::from_str::<FamilySpec>(r#"{"tag": "S42-cone", "b": 1}"#).is_err());
        let deep: FamilySpec = serde_json::from_str(
            r#"{"tag": "S42-hyp", "b": {"sum": [{"product": [{"sum": [1, "sin"]}, 2]}]}}"#,
        )
        .unwrap();
        assert!(matches!(deep.validate(), Err(Error::Config(_))));
        let bad_eps: FamilySpec = serde_json::from_str(
            r#"{"tag": "S42-curve-timelike", "curve": {"kappa": 1}, "b": 1, "eps": -1}"#,
        )
        .unwrap();
        assert!(bad_eps.validate().is_err());
    }

    #[test]
    fn echo_round_trips() {
        let e: FamilySpec = serde_json::from_str(
            r#"{"tag": "E42-ii", "m": {"sin": {"amp": 0.2}}, "F": 1, "b0": 0.5, "db0": 0, "t0": 0}"#,
        )
        .unwrap();
        let js = serde_json::to_string(&e).unwrap();
        let back: FamilySpec = serde_json::from_str(&js).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn great_circle_is_vanishing_curvature() {
        let c: FamilySpec =
            serde_json::from_str(r#"{"tag": "S42-curve-timelike", "curve": {"kappa": 0}, "b": 1}"#).unwrap();
        let d = Rect::new([-0.3, 0.3], [0.0, 1.0]).unwrap();
        assert!(matches!(c.build(d), Err(Error::VanishingCurvature { .. })));
    }
}
