//! Which actor kinds can bear which senses of responsibility, for which
//! kinds of occurrence.

use std::fmt;

use super::{ActorKind, OccurrenceKind, Sense, SenseKind};

/// The kind of a subject: an actor, or an occurrence acting as a cause.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SubjectKind {
    Actor(ActorKind),
    Occurrence(OccurrenceKind),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reason {
    /// AI systems hold tasks only, never moral or legal duties.
    AiNoDuty,
    AiNotLiable,
    AiNotMoralAgent,
    LiabilityNeedsConsequence,
    OccurrenceSubjectCausalOnly,
    ProducerNotAiSystem,
    ProducerNotAgent,
    ConsequenceHasNoProducer,
}

impl Reason {
    pub fn code(self) -> &'static str {
        match self {
            Reason::AiNoDuty => "AI_NO_DUTY",
            Reason::AiNotLiable => "AI_NOT_LIABLE",
            Reason::AiNotMoralAgent => "AI_NOT_MORAL_AGENT",
            Reason::LiabilityNeedsConsequence => "LIABILITY_NEEDS_CONSEQUENCE",
            Reason::OccurrenceSubjectCausalOnly => "OCCURRENCE_SUBJECT_CAUSAL_ONLY",
            Reason::ProducerNotAiSystem => "PRODUCER_NOT_AI_SYSTEM",
            Reason::ProducerNotAgent => "PRODUCER_NOT_AGENT",
            Reason::ConsequenceHasNoProducer => "CONSEQUENCE_HAS_NO_PRODUCER",
        }
    }

    pub fn describe(self) -> &'static str {
        match self {
            Reason::AiNoDuty => "an AI-based system can hold tasks but not moral or legal duties",
            Reason::AiNotLiable => "an AI-based system is not a legal person and cannot be liable",
            Reason::AiNotMoralAgent => "an AI-based system is not a moral agent",
            Reason::LiabilityNeedsConsequence => "liability can only be sought for a consequence",
            Reason::OccurrenceSubjectCausalOnly => "an occurrence can only be causally responsible",
            Reason::ProducerNotAiSystem => "machine outputs must be produced by an AI-based system",
            Reason::ProducerNotAgent => {
                "decisions, actions and omissions must be produced by a human or an institution"
            }
            Reason::ConsequenceHasNoProducer => "consequences are outcomes and have no producer",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Valid,
    Invalid(Reason),
}

impl Verdict {
    pub fn is_valid(self) -> bool {
        matches!(self, Verdict::Valid)
    }

    pub fn reason(self) -> Option<Reason> {
        match self {
            Verdict::Valid => None,
            Verdict::Invalid(r) => Some(r),
        }
    }
}

/// The actor-kind half of the validity matrix: `Err` carries why the cell
/// is invalid.
pub fn actor_permits(actor: ActorKind, sense: SenseKind) -> Result<(), Reason> {
    if actor.is_agent() {
        return Ok(());
    }
    match sense {
        SenseKind::Causal | SenseKind::Task => Ok(()),
        SenseKind::MoralDuty | SenseKind::LegalDuty => Err(Reason::AiNoDuty),
        SenseKind::Criminal | SenseKind::Civil => Err(Reason::AiNotLiable),
        SenseKind::Attributability | SenseKind::Accountability => Err(Reason::AiNotMoralAgent),
    }
}

/// Total over its inputs. Subject restrictions are checked before the
/// occurrence restriction.
pub fn validate_attribution(subject: SubjectKind, sense: Sense, occurrence: OccurrenceKind) -> Verdict {
    let kind = sense.kind();
    let subject_check = match subject {
        SubjectKind::Actor(actor) => actor_permits(actor, kind),
        SubjectKind::Occurrence(_) if kind == SenseKind::Causal => Ok(()),
        SubjectKind::Occurrence(_) => Err(Reason::OccurrenceSubjectCausalOnly),
    };
    if let Err(reason) = subject_check {
        return Verdict::Invalid(reason);
    }
    if matches!(kind, SenseKind::Criminal | SenseKind::Civil) && occurrence != OccurrenceKind::Consequence {
        return Verdict::Invalid(Reason::LiabilityNeedsConsequence);
    }
    Verdict::Valid
}

pub fn validate_producer(occurrence: OccurrenceKind, producer: ActorKind) -> Verdict {
    if occurrence == OccurrenceKind::Consequence {
        Verdict::Invalid(Reason::ConsequenceHasNoProducer)
    } else if occurrence.is_machine() {
        if producer == ActorKind::AiSystem {
            Verdict::Valid
        } else {
            Verdict::Invalid(Reason::ProducerNotAiSystem)
        }
    } else if producer.is_agent() {
        Verdict::Valid
    } else {
        Verdict::Invalid(Reason::ProducerNotAgent)
    }
}
