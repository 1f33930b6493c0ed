use std::fmt;

use serde::Serialize;

/// Three-valued evidence, ordered `Unmet < Unknown < Met`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Evidence {
    Unmet,
    #[default]
    Unknown,
    Met,
}

impl Evidence {
    pub const ALL: [Evidence; 3] = [Evidence::Unmet, Evidence::Unknown, Evidence::Met];

    pub fn keyword(self) -> &'static str {
        match self {
            Evidence::Unmet => "unmet",
            Evidence::Unknown => "unknown",
            Evidence::Met => "met",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|e| e.keyword() == word)
    }

    pub fn from_bool(b: bool) -> Self {
        if b {
            Evidence::Met
        } else {
            Evidence::Unmet
        }
    }
}

impl fmt::Display for Evidence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

/// The closed vocabulary of condition facts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionName {
    Control,
    Knowledge,
    MoralShortfall,
    DutyOwed,
    Breach,
    BreachCausedHarm,
    HarmInScope,
    /// Stands in for the undecomposed civil branches (product, vicarious,
    /// contract).
    BasisEstablished,
    ActusReus,
    MensRea,
    ClearlyStated,
    ContextAppropriate,
    Achievable,
    NoConflict,
}

impl ConditionName {
    pub const ALL: [ConditionName; 14] = [
        ConditionName::Control,
        ConditionName::Knowledge,
        ConditionName::MoralShortfall,
        ConditionName::DutyOwed,
        ConditionName::Breach,
        ConditionName::BreachCausedHarm,
        ConditionName::HarmInScope,
        ConditionName::BasisEstablished,
        ConditionName::ActusReus,
        ConditionName::MensRea,
        ConditionName::ClearlyStated,
        ConditionName::ContextAppropriate,
        ConditionName::Achievable,
        ConditionName::NoConflict,
    ];

    /// The four role criteria.
    pub const ROLE_CRITERIA: [ConditionName; 4] = [
        ConditionName::ClearlyStated,
        ConditionName::ContextAppropriate,
        ConditionName::Achievable,
        ConditionName::NoConflict,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            ConditionName::Control => "control",
            ConditionName::Knowledge => "knowledge",
            ConditionName::MoralShortfall => "moral_shortfall",
            ConditionName::DutyOwed => "duty_owed",
            ConditionName::Breach => "breach",
            ConditionName::BreachCausedHarm => "breach_caused_harm",
            ConditionName::HarmInScope => "harm_in_scope",
            ConditionName::BasisEstablished => "basis_established",
            ConditionName::ActusReus => "actus_reus",
            ConditionName::MensRea => "mens_rea",
            ConditionName::ClearlyStated => "clearly_stated",
            ConditionName::ContextAppropriate => "context_appropriate",
            ConditionName::Achievable => "achievable",
            ConditionName::NoConflict => "no_conflict",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|c| c.keyword() == word)
    }

    /// Comma-separated keywords, for diagnostics naming the vocabulary.
    pub fn vocabulary() -> String {
        Self::ALL.map(ConditionName::keyword).join(", ")
    }
}

impl fmt::Display for ConditionName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FactKey {
    pub subject: String,
    pub occurrence: String,
    pub condition: ConditionName,
}

impl FactKey {
    pub fn new(subject: impl Into<String>, occurrence: impl Into<String>, condition: ConditionName) -> Self {
        FactKey {
            subject: subject.into(),
            occurrence: occurrence.into(),
            condition,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ConditionFact {
    pub subject: String,
    pub occurrence: String,
    pub condition: ConditionName,
    pub value: Evidence,
}

impl fmt::Display for ConditionFact {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "fact {}({}, {}) = {}",
            self.condition, self.subject, self.occurrence, self.value
        )
    }
}
