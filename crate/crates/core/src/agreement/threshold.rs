use serde::{Deserialize, Serialize};

use super::loa::LoaModel;
use super::{AgreementError, Line};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BandEdge {
    Lower,
    Upper,
    LowerInner,
    LowerOuter,
    UpperInner,
    UpperOuter,
}

impl BandEdge {
    fn is_lower(self) -> bool {
        matches!(self, Self::Lower | Self::LowerInner | Self::LowerOuter)
    }
}

/// Which pair of boundaries the line of equality is tested against.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgeSet {
    /// The limits themselves, no error term.
    Limits,
    /// Limits moved toward the fit by the error term.
    #[default]
    Inner,
    /// Limits moved away from the fit by the error term.
    Outer,
}

impl EdgeSet {
    pub const ALL: [Self; 3] = [Self::Limits, Self::Inner, Self::Outer];

    pub fn edges(self) -> [BandEdge; 2] {
        match self {
            Self::Limits => [BandEdge::Lower, BandEdge::Upper],
            Self::Inner => [BandEdge::LowerInner, BandEdge::UpperInner],
            Self::Outer => [BandEdge::LowerOuter, BandEdge::UpperOuter],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub m1: f64,
    pub edge: BandEdge,
    /// Whether, just above `m1`, the line of equality is on the fit's side
    /// of `edge`.
    pub inside_above: bool,
}

/// A boundary as `alpha + beta * m1`.
pub(crate) fn edge_line(model: &LoaModel, line: Line, edge: BandEdge) -> Line {
    let zs = model.z * model.scale;
    let half = Line::new(zs * model.b, zs * model.a);
    let e = Line::new(model.error_term(1.0) - model.error_term(0.0), model.error_term(0.0));
    let combine = |s_half: f64, s_err: f64| {
        Line::new(
            line.slope + s_half * half.slope + s_err * e.slope,
            line.intercept + s_half * half.intercept + s_err * e.intercept,
        )
    };
    match edge {
        BandEdge::Lower => combine(-1.0, 0.0),
        BandEdge::Upper => combine(1.0, 0.0),
        BandEdge::LowerInner => combine(-1.0, 1.0),
        BandEdge::LowerOuter => combine(-1.0, -1.0),
        BandEdge::UpperInner => combine(1.0, -1.0),
        BandEdge::UpperOuter => combine(1.0, 1.0),
    }
}

/// Every M1 in `range` where `M2 = M1` meets one of the chosen boundaries.
/// Boundaries are straight lines, so each crossing is solved in closed form;
/// a boundary that coincides with the equality line yields no crossing.
pub fn interchange_threshold(
    model: &LoaModel,
    line: impl Into<Line>,
    range: (f64, f64),
    edges: EdgeSet,
) -> Result<Vec<Crossing>, AgreementError> {
    let (lo, hi) = range;
    if !lo.is_finite() || !hi.is_finite() || lo < 0.0 || hi < lo {
        return Err(AgreementError::InvalidArgument(format!("bad m1 range [{lo}, {hi}]")));
    }
    let line = line.into();
    let mut out = Vec::new();
    for edge in edges.edges() {
        let b = edge_line(model, line, edge);
        let denom = 1.0 - b.slope;
        if denom == 0.0 {
            continue;
        }
        let m1 = b.intercept / denom;
        if m1 < lo || m1 > hi {
            continue;
        }
        // equality minus boundary grows with m1 iff denom > 0
        let above_edge_after = denom > 0.0;
        out.push(Crossing {
            m1,
            edge,
            inside_above: above_edge_after == edge.is_lower(),
        });
    }
    out.sort_by(|a, b| a.m1.total_cmp(&b.m1));
    Ok(out)
}
