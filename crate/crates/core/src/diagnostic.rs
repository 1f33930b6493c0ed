//! Coded findings shared by the parser, the scenario builder, the rule
//! evaluator and the detectors.

use std::cmp::Ordering;
use std::fmt;

use serde::Serialize;

/// A location in a source file. Line and column are 1-based and counted in
/// characters; `length` is the number of characters covered.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl SourceSpan {
    pub fn new(file: impl Into<String>, line: usize, column: usize, length: usize) -> Self {
        SourceSpan {
            file: file.into(),
            line,
            column,
            length,
        }
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.file, self.line, self.column)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
    Info,
}

impl Severity {
    pub fn as_str(self) -> &'static str {
        match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
            Severity::Info => "info",
        }
    }
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

macro_rules! codes {
    ($( $(#[$doc:meta])* $variant:ident => $text:literal, $sev:ident; )*) => {
        /// The closed set of diagnostic codes.
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
        pub enum Code {
            $( $(#[$doc])* $variant, )*
        }

        impl Code {
            pub const ALL: &'static [Code] = &[$( Code::$variant, )*];

            pub fn as_str(self) -> &'static str {
                match self {
                    $( Code::$variant => $text, )*
                }
            }

            pub fn severity(self) -> Severity {
                match self {
                    $( Code::$variant => Severity::$sev, )*
                }
            }
        }
    };
}

codes! {
    /// Bad token.
    Lex => "E_LEX", Error;
    /// Grammar violation.
    Syn => "E_SYN", Error;
    DupId => "E_DUP_ID", Error;
    Unresolved => "E_UNRESOLVED", Error;
    /// Attribution rejected by the validity matrix.
    InvalidAttribution => "E001", Error;
    /// Liability attributed for something other than a consequence.
    LiabilityNonConsequence => "E002", Error;
    BadProducer => "E_BAD_PRODUCER", Error;
    BadHarm => "E_BAD_HARM", Error;
    DupFact => "E_DUP_FACT", Error;
    Cycle => "E_CYCLE", Error;
    UnknownVar => "E_UNKNOWN_VAR", Error;
    /// Structural problem in a model block (missing context, non-injective binding, ...).
    Model => "E_MODEL", Error;
    NotActual => "E_NOT_ACTUAL", Error;
    TooLarge => "E_TOO_LARGE", Error;
    EntailLiability => "E_ENTAIL_LIABILITY", Error;
    EntailAccount => "E_ENTAIL_ACCOUNT", Error;
    EntailAttrib => "E_ENTAIL_ATTRIB", Error;
    Mismatch => "E_MISMATCH", Error;
    Io => "E_IO", Error;
    /// A statement repeated verbatim; the copies are merged.
    Duplicate => "W_DUPLICATE", Warning;
    RoleUnclear => "W_ROLE_UNCLEAR", Warning;
    RoleContext => "W_ROLE_CONTEXT", Warning;
    RoleDemanding => "W_ROLE_DEMANDING", Warning;
    RoleConflict => "W_ROLE_CONFLICT", Warning;
    FactConflict => "W_FACT_CONFLICT", Warning;
    LiabilitySink => "W101", Warning;
    CrumpleZone => "W102", Warning;
    ResponsibilityGap => "W103", Warning;
    UncoveredMachine => "W104", Warning;
    /// A claim the validity matrix rejects; it is reported as blocked.
    BlockedClaim => "I001", Info;
    /// An asserted attribution whose conditions are not all established.
    AssertedNotSupported => "I002", Info;
}

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for Code {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub code: Code,
    pub subjects: Vec<String>,
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl Diagnostic {
    pub fn new(code: Code, message: impl Into<String>) -> Self {
        Diagnostic {
            severity: code.severity(),
            code,
            subjects: Vec::new(),
            message: message.into(),
            span: None,
        }
    }

    pub fn with_subjects<I, S>(mut self, subjects: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.subjects = subjects.into_iter().map(Into::into).collect();
        self
    }

    pub fn with_span(mut self, span: Option<SourceSpan>) -> Self {
        self.span = span;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// `FILE:LINE:COL: severity[CODE]: message`, or `FILE: ...` when the
    /// finding has no span.
    pub fn render(&self, file: &str) -> String {
        match &self.span {
            Some(span) => format!(
                "{}:{}:{}: {}[{}]: {}",
                span.file, span.line, span.column, self.severity, self.code, self.message
            ),
            None => format!("{}: {}[{}]: {}", file, self.severity, self.code, self.message),
        }
    }

    fn sort_key(&self) -> (Severity, &'static str, &[String], &str, &Option<SourceSpan>) {
        (
            self.severity,
            self.code.as_str(),
            &self.subjects,
            &self.message,
            &self.span,
        )
    }
}

impl PartialOrd for Diagnostic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Diagnostic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

/// Sorts by (severity, code, subjects) and drops exact duplicates.
pub fn normalize(diagnostics: &mut Vec<Diagnostic>) {
    diagnostics.sort();
    diagnostics.dedup();
}

pub fn has_errors(diagnostics: &[Diagnostic]) -> bool {
    diagnostics.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_unique_and_prefixed_by_severity() {
        let mut seen = std::collections::HashSet::new();
        for code in Code::ALL {
            assert!(seen.insert(code.as_str()), "duplicate {}", code);
            let first = code.as_str().chars().next().unwrap();
            let expected = match code.severity() {
                Severity::Error => 'E',
                Severity::Warning => 'W',
                Severity::Info => 'I',
            };
            assert_eq!(first, expected, "{}", code);
        }
    }

    #[test]
    fn render_with_and_without_span() {
        let d = Diagnostic::new(Code::DupId, "duplicate identifier `op`")
            .with_span(Some(SourceSpan::new("a.resp", 3, 7, 2)));
        assert_eq!(
            d.render("a.resp"),
            "a.resp:3:7: error[E_DUP_ID]: duplicate identifier `op`"
        );
        let d = Diagnostic::new(Code::LiabilitySink, "sink");
        assert_eq!(d.render("b.resp"), "b.resp: warning[W101]: sink");
    }

    #[test]
    fn ordering_puts_errors_first() {
        let mut v = vec![
            Diagnostic::new(Code::BlockedClaim, "i"),
            Diagnostic::new(Code::LiabilitySink, "w"),
            Diagnostic::new(Code::Syn, "e"),
        ];
        normalize(&mut v);
        let sev: Vec<_> = v.iter().map(|d| d.severity).collect();
        assert_eq!(sev, vec![Severity::Error, Severity::Warning, Severity::Info]);
    }
}
