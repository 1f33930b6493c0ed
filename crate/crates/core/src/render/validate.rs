//! A small recursive-descent checker for the DOT language, enough to prove
//! that generated graphs are well formed. It also reports which node
//! statements and edges it saw, so callers can check counts.

use std::collections::BTreeMap;

#[derive(Debug, Clone, PartialEq, Eq)]
enum T {
    Id(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Colon,
    Eq,
    Arrow,
    Line,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DotSummary {
    pub directed: bool,
    pub name: Option<String>,
    /// Node statement count per node id.
    pub node_statements: BTreeMap<String, usize>,
    /// Edges in order of appearance, with their attributes.
    pub edges: Vec<(String, String, BTreeMap<String, String>)>,
}

fn tokenize(text: &str) -> Result<Vec<T>, String> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    let mut line_start = true;
    while i < chars.len() {
        let c = chars[i];
        if c == '\n' {
            line_start = true;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if line_start && c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        line_start = false;
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            loop {
                if i + 1 >= chars.len() {
                    return Err("unterminated comment".into());
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    i += 2;
                    break;
                }
                i += 1;
            }
            continue;
        }
        let simple = match c {
            '{' => Some(T::LBrace),
            '}' => Some(T::RBrace),
            '[' => Some(T::LBracket),
            ']' => Some(T::RBracket),
            ';' => Some(T::Semi),
            ',' => Some(T::Comma),
            ':' => Some(T::Colon),
            '=' => Some(T::Eq),
            _ => None,
        };
        if let Some(t) = simple {
            out.push(t);
            i += 1;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'>') {
            out.push(T::Arrow);
            i += 2;
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            out.push(T::Line);
            i += 2;
            continue;
        }
        if c == '"' {
            i += 1;
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err("unterminated string".into()),
                    Some('"') => {
                        i += 1;
                        break;
                    }
                    Some('\\') if chars.get(i + 1).is_some() => {
                        s.push('\\');
                        s.push(chars[i + 1]);
                        i += 2;
                    }
                    Some(ch) => {
                        s.push(*ch);
                        i += 1;
                    }
                }
            }
            out.push(T::Id(s));
            continue;
        }
        if c.is_alphanumeric() || c == '_' || c == '.' || c == '-' {
            let start = i;
            let numeral = c.is_ascii_digit() || c == '.' || c == '-';
            while i < chars.len()
                && (if numeral {
                    chars[i].is_ascii_digit() || chars[i] == '.' || (i == start && chars[i] == '-')
                } else {
                    chars[i].is_alphanumeric() || chars[i] == '_'
                })
            {
                i += 1;
            }
            if i == start {
                return Err(format!("unexpected character {c:?}"));
            }
            out.push(T::Id(chars[start..i].iter().collect()));
            continue;
        }
        return Err(format!("unexpected character {c:?}"));
    }
    Ok(out)
}

struct P {
    toks: Vec<T>,
    pos: usize,
    summary: DotSummary,
}

fn keyword(t: Option<&T>, word: &str) -> bool {
    matches!(t, Some(T::Id(s)) if s.eq_ignore_ascii_case(word))
}

impl P {
    fn peek(&self) -> Option<&T> {
        self.toks.get(self.pos)
    }

    fn bump(&mut self) -> Option<T> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, t: T) -> Result<(), String> {
        match self.bump() {
            Some(got) if got == t => Ok(()),
            got => Err(format!("expected {t:?}, found {got:?}")),
        }
    }

    fn id(&mut self) -> Result<String, String> {
        match self.bump() {
            Some(T::Id(s)) => Ok(s),
            got => Err(format!("expected an identifier, found {got:?}")),
        }
    }

    fn graph(&mut self) -> Result<(), String> {
        if keyword(self.peek(), "strict") {
            self.bump();
        }
        if keyword(self.peek(), "digraph") {
            self.summary.directed = true;
        } else if !keyword(self.peek(), "graph") {
            return Err("expected `graph` or `digraph`".into());
        }
        self.bump();
        if let Some(T::Id(_)) = self.peek() {
            self.summary.name = Some(self.id()?);
        }
        self.expect(T::LBrace)?;
        self.stmt_list()?;
        self.expect(T::RBrace)?;
        if self.pos != self.toks.len() {
            return Err("trailing content after the graph".into());
        }
        Ok(())
    }

    fn stmt_list(&mut self) -> Result<(), String> {
        while !matches!(self.peek(), Some(T::RBrace) | None) {
            self.stmt()?;
            if self.peek() == Some(&T::Semi) {
                self.bump();
            }
        }
        Ok(())
    }

    fn attr_list(&mut self) -> Result<BTreeMap<String, String>, String> {
        let mut attrs = BTreeMap::new();
        while self.peek() == Some(&T::LBracket) {
            self.bump();
            while self.peek() != Some(&T::RBracket) {
                let k = self.id()?;
                self.expect(T::Eq)?;
                let v = self.id()?;
                attrs.insert(k, v);
                if matches!(self.peek(), Some(T::Comma) | Some(T::Semi)) {
                    self.bump();
                }
            }
            self.expect(T::RBracket)?;
        }
        Ok(attrs)
    }

    fn node_id(&mut self) -> Result<String, String> {
        let id = self.id()?;
        if self.peek() == Some(&T::Colon) {
            self.bump();
            self.id()?;
            if self.peek() == Some(&T::Colon) {
                self.bump();
                self.id()?;
            }
        }
        Ok(id)
    }

    fn subgraph(&mut self) -> Result<(), String> {
        if keyword(self.peek(), "subgraph") {
            self.bump();
            if let Some(T::Id(_)) = self.peek() {
                self.bump();
            }
        }
        self.expect(T::LBrace)?;
        self.stmt_list()?;
        self.expect(T::RBrace)
    }

    fn stmt(&mut self) -> Result<(), String> {
        if keyword(self.peek(), "subgraph") || self.peek() == Some(&T::LBrace) {
            self.subgraph()?;
            if matches!(self.peek(), Some(T::Arrow) | Some(T::Line)) {
                return Err("edges between subgraphs are not used".into());
            }
            return Ok(());
        }
        if ["graph", "node", "edge"].iter().any(|k| keyword(self.peek(), k)) {
            self.bump();
            if self.peek() != Some(&T::LBracket) {
                return Err("expected an attribute list".into());
            }
            self.attr_list()?;
            return Ok(());
        }
        let first = self.node_id()?;
        if self.peek() == Some(&T::Eq) {
            self.bump();
            self.id()?;
            return Ok(());
        }
        let mut chain = vec![first];
        while let Some(op) = self.peek().cloned() {
            match op {
                T::Arrow if self.summary.directed => {}
                T::Line if !self.summary.directed => {}
                T::Arrow | T::Line => return Err("edge operator does not match the graph kind".into()),
                _ => break,
            }
            self.bump();
            chain.push(self.node_id()?);
        }
        let attrs = self.attr_list()?;
        if chain.len() == 1 {
            *self.summary.node_statements.entry(chain.pop().unwrap()).or_default() += 1;
        } else {
            for w in chain.windows(2) {
                self.summary.edges.push((w[0].clone(), w[1].clone(), attrs.clone()));
            }
        }
        Ok(())
    }
}

/// Checks `text` against the DOT grammar.
pub fn validate_dot(text: &str) -> Result<DotSummary, String> {
    let toks = tokenize(text)?;
    let mut p = P {
        toks,
        pos: 0,
        summary: DotSummary::default(),
    };
    p.graph()?;
    Ok(p.summary)
}
