use std::collections::BTreeSet;
use std::fmt;

/// Boolean structural equation right-hand side.
///
/// `And`/`Or` built by the parser always have at least two operands; the
/// canonical printer relies on that to reproduce the parsed tree exactly.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Const(bool),
    Var(String),
    Not(Box<Expr>),
    And(Vec<Expr>),
    Or(Vec<Expr>),
}

impl Expr {
    pub fn var(name: impl Into<String>) -> Self {
        Expr::Var(name.into())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(inner: Expr) -> Self {
        Expr::Not(Box::new(inner))
    }

    /// Collapses the one-operand case so printing stays faithful.
    pub fn and(mut operands: Vec<Expr>) -> Self {
        match operands.len() {
            0 => Expr::Const(true),
            1 => operands.pop().unwrap(),
            _ => Expr::And(operands),
        }
    }

    pub fn or(mut operands: Vec<Expr>) -> Self {
        match operands.len() {
            0 => Expr::Const(false),
            1 => operands.pop().unwrap(),
            _ => Expr::Or(operands),
        }
    }

    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Expr::Const(_) => {}
            Expr::Var(v) => {
                out.insert(v);
            }
            Expr::Not(e) => e.collect_vars(out),
            Expr::And(es) | Expr::Or(es) => es.iter().for_each(|e| e.collect_vars(out)),
        }
    }

    pub fn eval(&self, lookup: &impl Fn(&str) -> bool) -> bool {
        match self {
            Expr::Const(b) => *b,
            Expr::Var(v) => lookup(v),
            Expr::Not(e) => !e.eval(lookup),
            Expr::And(es) => es.iter().all(|e| e.eval(lookup)),
            Expr::Or(es) => es.iter().any(|e| e.eval(lookup)),
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, parent_is_and: bool) -> fmt::Result {
        let needs_parens = match self {
            Expr::Or(_) => true,
            Expr::And(_) => parent_is_and,
            _ => false,
        };
        if needs_parens {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(b) => write!(f, "{b}"),
            Expr::Var(v) => f.write_str(v),
            Expr::Not(inner) => match inner.as_ref() {
                Expr::Const(_) | Expr::Var(_) => write!(f, "!{inner}"),
                _ => write!(f, "!({inner})"),
            },
            Expr::And(es) | Expr::Or(es) => {
                let is_and = matches!(self, Expr::And(_));
                if es.is_empty() {
                    return write!(f, "{is_and}");
                }
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        f.write_str(if is_and { " & " } else { " | " })?;
                    }
                    e.fmt_operand(f, is_and)?;
                }
                Ok(())
            }
        }
    }
}

/// Index-based form used by the enumeration engine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum CompiledExpr {
    Const(bool),
    Var(usize),
    Not(Box<CompiledExpr>),
    And(Vec<CompiledExpr>),
    Or(Vec<CompiledExpr>),
}

impl CompiledExpr {
    pub(crate) fn compile(expr: &Expr, index_of: &impl Fn(&str) -> usize) -> Self {
        match expr {
            Expr::Const(b) => CompiledExpr::Const(*b),
            Expr::Var(v) => CompiledExpr::Var(index_of(v)),
            Expr::Not(e) => CompiledExpr::Not(Box::new(Self::compile(e, index_of))),
            Expr::And(es) => CompiledExpr::And(es.iter().map(|e| Self::compile(e, index_of)).collect()),
            Expr::Or(es) => CompiledExpr::Or(es.iter().map(|e| Self::compile(e, index_of)).collect()),
        }
    }

    #[inline]
    pub(crate) fn eval_bits(&self, bits: u64) -> bool {
        match self {
            CompiledExpr::Const(b) => *b,
            CompiledExpr::Var(i) => bits >> i & 1 == 1,
            CompiledExpr::Not(e) => !e.eval_bits(bits),
            CompiledExpr::And(es) => es.iter().all(|e| e.eval_bits(bits)),
            CompiledExpr::Or(es) => es.iter().any(|e| e.eval_bits(bits)),
        }
    }

    pub(crate) fn eval_slice(&self, values: &[bool]) -> bool {
        match self {
            CompiledExpr::Const(b) => *b,
            CompiledExpr::Var(i) => values[*i],
            CompiledExpr::Not(e) => !e.eval_slice(values),
            CompiledExpr::And(es) => es.iter().all(|e| e.eval_slice(values)),
            CompiledExpr::Or(es) => es.iter().any(|e| e.eval_slice(values)),
        }
    }
}
