use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_RULES: &str = include_str!("../../rules/default.rules");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PhysiologicalState {
    Homeostasis,
    AnabolicPower,
    MetabolicStress,
    MechanicalDamage,
    SilentRisk,
    Unclassified,
}

impl PhysiologicalState {
    pub const ALL: [PhysiologicalState; 6] = [
        PhysiologicalState::Homeostasis,
        PhysiologicalState::AnabolicPower,
        PhysiologicalState::MetabolicStress,
        PhysiologicalState::MechanicalDamage,
        PhysiologicalState::SilentRisk,
        PhysiologicalState::Unclassified,
    ];

    /// Rule evaluation order; lower goes first.
    pub fn priority(self) -> u8 {
        match self {
            PhysiologicalState::SilentRisk => 0,
            PhysiologicalState::MechanicalDamage => 1,
            PhysiologicalState::MetabolicStress => 2,
            PhysiologicalState::AnabolicPower => 3,
            PhysiologicalState::Homeostasis => 4,
            PhysiologicalState::Unclassified => 5,
        }
    }

    /// Token used in rule and seed-spec files.
    pub fn token(self) -> &'static str {
        match self {
            PhysiologicalState::Homeostasis => "HOMEOSTASIS",
            PhysiologicalState::AnabolicPower => "ANABOLIC_POWER",
            PhysiologicalState::MetabolicStress => "METABOLIC_STRESS",
            PhysiologicalState::MechanicalDamage => "MECHANICAL_DAMAGE",
            PhysiologicalState::SilentRisk => "SILENT_RISK",
            PhysiologicalState::Unclassified => "UNCLASSIFIED",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            PhysiologicalState::Homeostasis => "Homeostasis",
            PhysiologicalState::AnabolicPower => "Anabolic Power",
            PhysiologicalState::MetabolicStress => "Metabolic Stress",
            PhysiologicalState::MechanicalDamage => "Mechanical Damage",
            PhysiologicalState::SilentRisk => "Silent Risk",
            PhysiologicalState::Unclassified => "Unclassified",
        }
    }
}

impl fmt::Display for PhysiologicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.display_name())
    }
}

impl FromStr for PhysiologicalState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let wanted = s.trim().to_ascii_uppercase().replace([' ', '-'], "_");
        Self::ALL
            .into_iter()
            .find(|st| st.token() == wanted)
            .ok_or_else(|| Error::InvalidConfig(format!("unknown physiological state `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    AtLeast,
    AtMost,
    AbsAtMost,
}

impl Comparator {
    pub fn holds(self, z: f64, threshold: f64) -> bool {
        match self {
            Comparator::AtLeast => z >= threshold,
            Comparator::AtMost => z <= threshold,
            Comparator::AbsAtMost => z.abs() <= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    pub marker: String,
    pub comparator: Comparator,
    pub threshold: f64,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.comparator {
            Comparator::AtLeast => write!(f, "{} >= {}", self.marker, self.threshold),
            Comparator::AtMost => write!(f, "{} <= {}", self.marker, self.threshold),
            Comparator::AbsAtMost => write!(f, "abs({}) <= {}", self.marker, self.threshold),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scope {
    /// The single condition applies to every biomarker; its marker is ignored.
    AllMarkers,
    ListedMarkers,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignatureRule {
    pub state: PhysiologicalState,
    pub conditions: Vec<Condition>,
    pub scope: Scope,
}

impl fmt::Display for SignatureRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.state.token())?;
        match self.scope {
            Scope::AllMarkers => {
                let c = &self.conditions[0];
                match c.comparator {
                    Comparator::AtLeast => write!(f, "all >= {}", c.threshold),
                    Comparator::AtMost => write!(f, "all <= {}", c.threshold),
                    Comparator::AbsAtMost => write!(f, "all abs <= {}", c.threshold),
                }
            }
            Scope::ListedMarkers => {
                let parts: Vec<String> = self.conditions.iter().map(ToString::to_string).collect();
                f.write_str(&parts.join(" & "))
            }
        }
    }
}

fn parse_threshold(text: &str, line: usize) -> Result<f64> {
    let value: f64 = text.trim().parse().map_err(|_| Error::RuleParse {
        line,
        message: format!("`{}` is not a number", text.trim()),
    })?;
    if !value.is_finite() {
        return Err(Error::RuleParse {
            line,
            message: "threshold must be finite".into(),
        });
    }
    Ok(value)
}

fn parse_condition(text: &str, line: usize) -> Result<Condition> {
    let (lhs, comparator, rhs) = if let Some((l, r)) = text.split_once(">=") {
        (l, Comparator::AtLeast, r)
    } else if let Some((l, r)) = text.split_once("<=") {
        (l, Comparator::AtMost, r)
    } else {
        return Err(Error::RuleParse {
            line,
            message: format!("expected `>=` or `<=` in `{}`", text.trim()),
        });
    };
    let lhs = lhs.trim();
    let (marker, comparator) = match lhs.strip_prefix("abs(").and_then(|s| s.strip_suffix(')')) {
        Some(inner) if comparator == Comparator::AtMost => (inner.trim(), Comparator::AbsAtMost),
        Some(_) => {
            return Err(Error::RuleParse {
                line,
                message: "abs() only supports `<=`".into(),
            })
        }
        None => (lhs, comparator),
    };
    if marker.is_empty() || marker.contains(char::is_whitespace) {
        return Err(Error::RuleParse {
            line,
            message: format!("invalid biomarker name `{marker}`"),
        });
    }
    Ok(Condition {
        marker: marker.to_string(),
        comparator,
        threshold: parse_threshold(rhs, line)?,
    })
}

/// Parses a rule file. Blank lines and `#` comments are ignored.
pub fn parse_rules(text: &str) -> Result<Vec<SignatureRule>> {
    let mut rules = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (state, body) = content.split_once(':').ok_or_else(|| Error::RuleParse {
            line,
            message: "expected `STATE: conditions`".into(),
        })?;
        let state: PhysiologicalState = state.parse().map_err(|_| Error::RuleParse {
            line,
            message: format!("unknown state `{}`", state.trim()),
        })?;
        if state == PhysiologicalState::Unclassified {
            return Err(Error::RuleParse {
                line,
                message: "UNCLASSIFIED is the fallback and cannot have a rule".into(),
            });
        }
        let body = body.trim();
        let rule = if let Some(rest) = body.strip_prefix("all ") {
            let rest = rest.trim();
            let (comparator, value) = if let Some(v) = rest.strip_prefix("abs").map(str::trim).and_then(|r| r.strip_prefix("<=")) {
                (Comparator::AbsAtMost, v)
            } else if let Some(v) = rest.strip_prefix(">=") {
                (Comparator::AtLeast, v)
            } else if let Some(v) = rest.strip_prefix("<=") {
                (Comparator::AtMost, v)
            } else {
                return Err(Error::RuleParse {
                    line,
                    message: format!("cannot parse `all {rest}`"),
                });
            };
            SignatureRule {
                state,
                conditions: vec![Condition {
                    marker: "*".into(),
                    comparator,
                    threshold: parse_threshold(value, line)?,
                }],
                scope: Scope::AllMarkers,
            }
        } else {
            let conditions = body
                .split('&')
                .map(|c| parse_condition(c, line))
                .collect::<Result<Vec<_>>>()?;
            SignatureRule {
                state,
                conditions,
                scope: Scope::ListedMarkers,
            }
        };
        rules.push(rule);
    }
    Ok(rules)
}

pub fn default_rules() -> Vec<SignatureRule> {
    parse_rules(DEFAULT_RULES).expect("bundled rule file parses")
}

pub fn format_rules(rules: &[SignatureRule]) -> String {
    rules.iter().map(|r| format!("{r}\n")).collect()
}
