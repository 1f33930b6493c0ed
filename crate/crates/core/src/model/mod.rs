//! Domain types of the responsibility framework: actors, occurrences, the
//! senses of "is responsible for", and attributions tying them together.

mod build;
mod facts;
mod scenario;
mod validity;

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

pub use build::build_scenario;
pub use facts::{ConditionFact, ConditionName, Evidence, FactKey};
pub use scenario::Scenario;
pub use validity::{actor_permits, validate_attribution, validate_producer, Reason, SubjectKind, Verdict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ActorKind {
    AiSystem,
    Human,
    Institution,
}

impl ActorKind {
    pub const ALL: [ActorKind; 3] = [ActorKind::AiSystem, ActorKind::Human, ActorKind::Institution];

    pub fn keyword(self) -> &'static str {
        match self {
            ActorKind::AiSystem => "ai_system",
            ActorKind::Human => "human",
            ActorKind::Institution => "institution",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    /// Whether the actor kind can hold legal or moral duties, be liable, or be
    /// morally responsible.
    pub fn is_agent(self) -> bool {
        !matches!(self, ActorKind::AiSystem)
    }

    pub fn display_name(self) -> &'static str {
        match self {
            ActorKind::AiSystem => "AI-based system",
            ActorKind::Human => "Individual human",
            ActorKind::Institution => "Institution",
        }
    }
}

impl fmt::Display for ActorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Actor {
    pub id: String,
    pub kind: ActorKind,
    pub label: Option<String>,
}

impl Actor {
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OccurrenceKind {
    MachineDecision,
    MachineAction,
    MachineOmission,
    Decision,
    Action,
    Omission,
    Consequence,
}

impl OccurrenceKind {
    pub const ALL: [OccurrenceKind; 7] = [
        OccurrenceKind::MachineDecision,
        OccurrenceKind::MachineAction,
        OccurrenceKind::MachineOmission,
        OccurrenceKind::Decision,
        OccurrenceKind::Action,
        OccurrenceKind::Omission,
        OccurrenceKind::Consequence,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            OccurrenceKind::MachineDecision => "machine_decision",
            OccurrenceKind::MachineAction => "machine_action",
            OccurrenceKind::MachineOmission => "machine_omission",
            OccurrenceKind::Decision => "decision",
            OccurrenceKind::Action => "action",
            OccurrenceKind::Omission => "omission",
            OccurrenceKind::Consequence => "consequence",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }

    pub fn is_machine(self) -> bool {
        matches!(
            self,
            OccurrenceKind::MachineDecision | OccurrenceKind::MachineAction | OccurrenceKind::MachineOmission
        )
    }

    /// Display name; machine outputs carry a trailing star.
    pub fn display_name(self) -> &'static str {
        match self {
            OccurrenceKind::MachineDecision => "Decision*",
            OccurrenceKind::MachineAction => "Action*",
            OccurrenceKind::MachineOmission => "Omission*",
            OccurrenceKind::Decision => "Decision",
            OccurrenceKind::Action => "Action",
            OccurrenceKind::Omission => "Omission",
            OccurrenceKind::Consequence => "Consequence",
        }
    }
}

impl fmt::Display for OccurrenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub id: String,
    pub kind: OccurrenceKind,
    pub label: Option<String>,
    /// The actor whose output this is (the "by" link).
    pub producer: Option<String>,
    /// Marks a consequence as an actionable harm.
    pub harm: bool,
}

impl Occurrence {
    pub fn display_label(&self) -> &str {
        self.label.as_deref().unwrap_or(&self.id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DutyBasis {
    DutyOfCare,
    Absolute,
    Contractual,
    Statutory,
}

impl DutyBasis {
    pub const ALL: [DutyBasis; 4] = [
        DutyBasis::DutyOfCare,
        DutyBasis::Absolute,
        DutyBasis::Contractual,
        DutyBasis::Statutory,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            DutyBasis::DutyOfCare => "duty_of_care",
            DutyBasis::Absolute => "absolute",
            DutyBasis::Contractual => "contractual",
            DutyBasis::Statutory => "statutory",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CivilBranch {
    Negligence,
    Product,
    Vicarious,
    Contract,
}

impl CivilBranch {
    pub const ALL: [CivilBranch; 4] = [
        CivilBranch::Negligence,
        CivilBranch::Product,
        CivilBranch::Vicarious,
        CivilBranch::Contract,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            CivilBranch::Negligence => "negligence",
            CivilBranch::Product => "product",
            CivilBranch::Vicarious => "vicarious",
            CivilBranch::Contract => "contract",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RoleKind {
    Task,
    MoralDuty,
    LegalDuty(Option<DutyBasis>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LiabilityKind {
    Criminal,
    /// `None` is evaluated as negligence.
    Civil(Option<CivilBranch>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoralKind {
    Attributability,
    Accountability,
}

/// A sense of "is responsible for". Subkinds are carried by the variants, so
/// a role, liability or moral sense without a subkind is unrepresentable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sense {
    Causal,
    Role(RoleKind),
    Liability(LiabilityKind),
    Moral(MoralKind),
}

/// The four top-level senses; also the analysis layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SenseFamily {
    Causal,
    Role,
    Liability,
    Moral,
}

impl SenseFamily {
    pub const ALL: [SenseFamily; 4] = [
        SenseFamily::Causal,
        SenseFamily::Role,
        SenseFamily::Liability,
        SenseFamily::Moral,
    ];

    pub fn keyword(self) -> &'static str {
        match self {
            SenseFamily::Causal => "causal",
            SenseFamily::Role => "role",
            SenseFamily::Liability => "liability",
            SenseFamily::Moral => "moral",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.keyword() == word)
    }
}

/// Sense subkinds with legal-duty bases and civil branches collapsed; the
/// rows of the validity matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SenseKind {
    Causal,
    Task,
    MoralDuty,
    LegalDuty,
    Criminal,
    Civil,
    Attributability,
    Accountability,
}

impl SenseKind {
    pub const ALL: [SenseKind; 8] = [
        SenseKind::Causal,
        SenseKind::Task,
        SenseKind::MoralDuty,
        SenseKind::LegalDuty,
        SenseKind::Criminal,
        SenseKind::Civil,
        SenseKind::Attributability,
        SenseKind::Accountability,
    ];

    /// A representative sense for this subkind.
    pub fn sense(self) -> Sense {
        match self {
            SenseKind::Causal => Sense::Causal,
            SenseKind::Task => Sense::Role(RoleKind::Task),
            SenseKind::MoralDuty => Sense::Role(RoleKind::MoralDuty),
            SenseKind::LegalDuty => Sense::Role(RoleKind::LegalDuty(None)),
            SenseKind::Criminal => Sense::Liability(LiabilityKind::Criminal),
            SenseKind::Civil => Sense::Liability(LiabilityKind::Civil(None)),
            SenseKind::Attributability => Sense::Moral(MoralKind::Attributability),
            SenseKind::Accountability => Sense::Moral(MoralKind::Accountability),
        }
    }
}

impl Sense {
    pub fn family(self) -> SenseFamily {
        match self {
            Sense::Causal => SenseFamily::Causal,
            Sense::Role(_) => SenseFamily::Role,
            Sense::Liability(_) => SenseFamily::Liability,
            Sense::Moral(_) => SenseFamily::Moral,
        }
    }

    pub fn kind(self) -> SenseKind {
        match self {
            Sense::Causal => SenseKind::Causal,
            Sense::Role(RoleKind::Task) => SenseKind::Task,
            Sense::Role(RoleKind::MoralDuty) => SenseKind::MoralDuty,
            Sense::Role(RoleKind::LegalDuty(_)) => SenseKind::LegalDuty,
            Sense::Liability(LiabilityKind::Criminal) => SenseKind::Criminal,
            Sense::Liability(LiabilityKind::Civil(_)) => SenseKind::Civil,
            Sense::Moral(MoralKind::Attributability) => SenseKind::Attributability,
            Sense::Moral(MoralKind::Accountability) => SenseKind::Accountability,
        }
    }

    /// Every distinct sense, with bases and branches both absent and present.
    pub fn all() -> Vec<Sense> {
        let mut out = vec![
            Sense::Causal,
            Sense::Role(RoleKind::Task),
            Sense::Role(RoleKind::MoralDuty),
            Sense::Role(RoleKind::LegalDuty(None)),
        ];
        out.extend(DutyBasis::ALL.map(|b| Sense::Role(RoleKind::LegalDuty(Some(b)))));
        out.push(Sense::Liability(LiabilityKind::Criminal));
        out.push(Sense::Liability(LiabilityKind::Civil(None)));
        out.extend(CivilBranch::ALL.map(|b| Sense::Liability(LiabilityKind::Civil(Some(b)))));
        out.push(Sense::Moral(MoralKind::Attributability));
        out.push(Sense::Moral(MoralKind::Accountability));
        out
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Sense::Causal => f.write_str("causal"),
            Sense::Role(RoleKind::Task) => f.write_str("role(task)"),
            Sense::Role(RoleKind::MoralDuty) => f.write_str("role(moral_duty)"),
            Sense::Role(RoleKind::LegalDuty(None)) => f.write_str("role(legal_duty)"),
            Sense::Role(RoleKind::LegalDuty(Some(b))) => {
                write!(f, "role(legal_duty:{})", b.keyword())
            }
            Sense::Liability(LiabilityKind::Criminal) => f.write_str("liability(criminal)"),
            Sense::Liability(LiabilityKind::Civil(None)) => f.write_str("liability(civil)"),
            Sense::Liability(LiabilityKind::Civil(Some(b))) => {
                write!(f, "liability(civil:{})", b.keyword())
            }
            Sense::Moral(MoralKind::Attributability) => f.write_str("moral(attributability)"),
            Sense::Moral(MoralKind::Accountability) => f.write_str("moral(accountability)"),
        }
    }
}

impl Serialize for Sense {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid sense `{0}`")]
pub struct SenseParseError(pub String);

impl FromStr for Sense {
    type Err = SenseParseError;

    /// Accepts the same spelling the scenario language uses, e.g.
    /// `role(legal_duty:contractual)`; whitespace is ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || SenseParseError(s.to_string());
        if compact == "causal" {
            return Ok(Sense::Causal);
        }
        let (family, rest) = compact.split_once('(').ok_or_else(err)?;
        let inner = rest.strip_suffix(')').ok_or_else(err)?;
        let (sub, qualifier) = match inner.split_once(':') {
            Some((a, b)) => (a, Some(b)),
            None => (inner, None),
        };
        let sense = match (family, sub, qualifier) {
            ("role", "task", None) => Sense::Role(RoleKind::Task),
            ("role", "moral_duty", None) => Sense::Role(RoleKind::MoralDuty),
            ("role", "legal_duty", None) => Sense::Role(RoleKind::LegalDuty(None)),
            ("role", "legal_duty", Some(b)) => {
                Sense::Role(RoleKind::LegalDuty(Some(DutyBasis::from_keyword(b).ok_or_else(err)?)))
            }
            ("liability", "criminal", None) => Sense::Liability(LiabilityKind::Criminal),
            ("liability", "civil", None) => Sense::Liability(LiabilityKind::Civil(None)),
            ("liability", "civil", Some(b)) => Sense::Liability(LiabilityKind::Civil(Some(
                CivilBranch::from_keyword(b).ok_or_else(err)?,
            ))),
            ("moral", "attributability", None) => Sense::Moral(MoralKind::Attributability),
            ("moral", "accountability", None) => Sense::Moral(MoralKind::Accountability),
            _ => return Err(err()),
        };
        Ok(sense)
    }
}

/// Asserted relations are established; claimed ones are candidates under
/// evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Asserted,
    Claimed,
}

impl Mode {
    pub fn keyword(self) -> &'static str {
        match self {
            Mode::Asserted => "attribute",
            Mode::Claimed => "claim",
        }
    }
}

/// "Subject is responsible, in this sense, for this occurrence." The status
/// is never stored here; it is derived by the rule evaluator.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Attribution {
    /// Actor id, or an occurrence id for causal attributions.
    pub subject: String,
    pub occurrence: String,
    pub sense: Sense,
    pub mode: Mode,
}

impl Attribution {
    pub fn new(subject: impl Into<String>, occurrence: impl Into<String>, sense: Sense, mode: Mode) -> Self {
        Attribution {
            subject: subject.into(),
            occurrence: occurrence.into(),
            sense,
            mode,
        }
    }
}

impl fmt::Display for Attribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} {} for {}",
            self.mode.keyword(),
            self.sense,
            self.subject,
            self.occurrence
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exactly_three_actor_kinds_and_seven_occurrence_kinds() {
        assert_eq!(ActorKind::ALL.len(), 3);
        assert_eq!(OccurrenceKind::ALL.len(), 7);
        for k in ActorKind::ALL {
            assert_eq!(ActorKind::from_keyword(k.keyword()), Some(k));
        }
        assert_eq!(ActorKind::from_keyword("swarm"), None);
    }

    #[test]
    fn machine_kinds_render_with_star() {
        for k in OccurrenceKind::ALL {
            assert_eq!(k.display_name().ends_with('*'), k.is_machine(), "{k}");
        }
    }

    #[test]
    fn sense_display_parses_back() {
        for s in Sense::all() {
            assert_eq!(s.to_string().parse::<Sense>(), Ok(s));
        }
        assert_eq!(
            " moral( accountability )".parse::<Sense>(),
            Ok(Sense::Moral(MoralKind::Accountability))
        );
        assert!("role".parse::<Sense>().is_err());
        assert!("causal(task)".parse::<Sense>().is_err());
        assert!("role(task:absolute)".parse::<Sense>().is_err());
        assert!("liability(civil:tort)".parse::<Sense>().is_err());
    }

    #[test]
    fn every_sense_maps_to_one_of_eight_subkinds() {
        let kinds: std::collections::BTreeSet<_> = Sense::all().into_iter().map(Sense::kind).collect();
        assert_eq!(kinds.len(), 8);
        for k in SenseKind::ALL {
            assert_eq!(k.sense().kind(), k);
        }
    }
}
