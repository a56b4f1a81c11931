use serde::{Deserialize, Serialize};

use super::Line;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InfluenceKind {
    /// Above the fitted line: `cf > 0`.
    CrossFieldPositive,
    /// On or below the fitted line, above equality: `A > |cf|`.
    GrowthDominant,
    /// On or below both lines: `A < |cf|`.
    CrossFieldDominant,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InfluenceClass {
    pub kind: InfluenceKind,
    /// `M2 - fitted(M1)`, the signed cross-field effect `cf`.
    pub gap_to_wlp: f64,
    /// `M2 - M1`; the annual growth `A` when positive.
    pub gap_to_equality: f64,
}

/// Assigns a point to exactly one region. The fitted-line test is applied
/// first, so a point above the fit is `CrossFieldPositive` even where the
/// fit runs below equality.
pub fn classify_influence(line: impl Into<Line>, point: (f64, f64)) -> InfluenceClass {
    let (m1, m2) = point;
    let gap_to_wlp = m2 - line.into().at(m1);
    let gap_to_equality = m2 - m1;
    let kind = if gap_to_wlp > 0.0 {
        InfluenceKind::CrossFieldPositive
    } else if gap_to_equality > 0.0 {
        InfluenceKind::GrowthDominant
    } else {
        InfluenceKind::CrossFieldDominant
    };
    InfluenceClass {
        kind,
        gap_to_wlp,
        gap_to_equality,
    }
}
