//! The presentation file format: a `graph` block with vertices, edges and
//! clique classes, one `factor` block per node, and an optional `options`
//! block. Parsing reports line/column positions; emitting produces a
//! canonical text that parses back to the same structure.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use graphprod::cardinal::SymbolicCardinal;
use graphprod::classify::{FactorSpec, NonAbelianProfile, SymbolicInstance};
use graphprod::descriptor::{AbelianDescriptor, CountableDecl, CountablePart, SIndex};
use graphprod::graph::{CliqueClass, Graph, SymbolicGraph};
use graphprod::group::{ConcreteGroup, FiniteTable};
use graphprod::words::Presentation;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone)]
struct Tok {
    text: String,
    line: usize,
    col: usize,
}

fn tokenize(text: &str) -> Vec<Tok> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let mut col = 0usize;
        let mut cur = String::new();
        let mut cur_col = 0usize;
        for ch in line.chars() {
            col += 1;
            if ch.is_whitespace() || ch == '{' || ch == '}' {
                if !cur.is_empty() {
                    out.push(Tok { text: std::mem::take(&mut cur), line: ln + 1, col: cur_col });
                }
                if ch == '{' || ch == '}' {
                    out.push(Tok { text: ch.to_string(), line: ln + 1, col });
                }
            } else {
                if cur.is_empty() {
                    cur_col = col;
                }
                cur.push(ch);
            }
        }
        if !cur.is_empty() {
            out.push(Tok { text: cur, line: ln + 1, col: cur_col });
        }
    }
    out
}

struct Cursor {
    toks: Vec<Tok>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Result<Tok, ParseError> {
        let t = self.toks.get(self.pos).cloned().ok_or_else(|| self.eof())?;
        self.pos += 1;
        Ok(t)
    }

    fn eof(&self) -> ParseError {
        let (line, col) = self
            .toks
            .last()
            .map(|t| (t.line, t.col + t.text.len()))
            .unwrap_or((1, 1));
        ParseError { line, col, msg: "unexpected end of input".into() }
    }

    fn expect(&mut self, text: &str) -> Result<Tok, ParseError> {
        let t = self.next()?;
        if t.text != text {
            return Err(err(&t, format!("expected `{text}`, found `{}`", t.text)));
        }
        Ok(t)
    }
}

fn err(t: &Tok, msg: impl Into<String>) -> ParseError {
    ParseError { line: t.line, col: t.col, msg: msg.into() }
}

/// Options carried by the file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FileOptions {
    pub seed: u64,
    pub bound_cap: u64,
}

impl Default for FileOptions {
    fn default() -> Self {
        FileOptions { seed: 0, bound_cap: graphprod::classify::DEFAULT_BOUND_CAP }
    }
}

/// A parsed presentation: fully concrete files give a word-engine
/// presentation, anything with classes or symbolic factors gives a
/// classifier instance.
#[derive(Debug, Clone)]
pub enum ParsedPresentation {
    Concrete(Presentation),
    Symbolic(SymbolicInstance),
}

impl ParsedPresentation {
    pub fn instance(&self) -> SymbolicInstance {
        match self {
            ParsedPresentation::Concrete(p) => SymbolicInstance::from_presentation(p),
            ParsedPresentation::Symbolic(i) => i.clone(),
        }
    }

    pub fn concrete(&self) -> Option<&Presentation> {
        match self {
            ParsedPresentation::Concrete(p) => Some(p),
            ParsedPresentation::Symbolic(_) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ParsedFile {
    pub presentation: ParsedPresentation,
    pub options: FileOptions,
}

pub fn parse(text: &str) -> Result<ParsedFile, ParseError> {
    let mut cur = Cursor { toks: tokenize(text), pos: 0 };
    let mut vertices: Vec<String> = Vec::new();
    let mut edges: Vec<(String, String)> = Vec::new();
    let mut classes: Vec<(String, SymbolicCardinal, Tok)> = Vec::new();
    let mut factors: Vec<(String, FactorSpec, Tok)> = Vec::new();
    let mut options = FileOptions::default();
    let mut saw_graph = false;
    while let Some(tok) = cur.peek().cloned() {
        match tok.text.as_str() {
            "graph" => {
                if saw_graph {
                    return Err(err(&tok, "duplicate graph block"));
                }
                saw_graph = true;
                cur.next()?;
                cur.expect("{")?;
                loop {
                    let t = cur.next()?;
                    match t.text.as_str() {
                        "}" => break,
                        "vertex" | "vertices" => {
                            while cur.peek().is_some_and(|t| is_name(&t.text)) {
                                vertices.push(cur.next()?.text);
                            }
                        }
                        "edge" => {
                            let a = name(&mut cur)?;
                            let b = name(&mut cur)?;
                            edges.push((a, b));
                        }
                        "class" => {
                            let id = name(&mut cur)?;
                            let c = cardinal(&mut cur)?;
                            classes.push((id, c, t));
                        }
                        other => return Err(err(&t, format!("unknown graph item `{other}`"))),
                    }
                }
            }
            "factor" => {
                cur.next()?;
                let id = name(&mut cur)?;
                let spec = factor_spec(&mut cur)?;
                factors.push((id, spec, tok));
            }
            "options" => {
                cur.next()?;
                cur.expect("{")?;
                loop {
                    let t = cur.next()?;
                    match t.text.as_str() {
                        "}" => break,
                        "seed" => options.seed = int(&mut cur)?,
                        "bound-cap" => options.bound_cap = int(&mut cur)?,
                        other => return Err(err(&t, format!("unknown option `{other}`"))),
                    }
                }
            }
            other => return Err(err(&tok, format!("unknown section `{other}`"))),
        }
    }
    let graph = Graph::new(vertices.clone(), edges)
        .map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })?;
    let class_list: Vec<CliqueClass> = classes
        .iter()
        .map(|(id, c, _)| CliqueClass { id: id.clone(), multiplicity: c.clone() })
        .collect();
    let sym_graph = SymbolicGraph::new(graph.clone(), class_list).map_err(|e| ParseError {
        line: classes.first().map(|(_, _, t)| t.line).unwrap_or(1),
        col: 1,
        msg: e.to_string(),
    })?;
    let mut by_id: BTreeMap<String, FactorSpec> = BTreeMap::new();
    for (id, spec, t) in &factors {
        if !vertices.contains(id) && !classes.iter().any(|(cid, _, _)| cid == id) {
            return Err(err(t, format!("factor for unknown node `{id}`")));
        }
        if by_id.insert(id.clone(), spec.clone()).is_some() {
            return Err(err(t, format!("duplicate factor for `{id}`")));
        }
    }
    for id in sym_graph.node_ids() {
        if !by_id.contains_key(&id) {
            return Err(ParseError { line: 1, col: 1, msg: format!("node `{id}` has no factor") });
        }
    }
    let all_concrete = classes.is_empty()
        && by_id.values().all(|f| matches!(f, FactorSpec::Concrete(_)));
    let presentation = if all_concrete {
        let concrete: Vec<ConcreteGroup> = vertices
            .iter()
            .map(|v| match &by_id[v] {
                FactorSpec::Concrete(g) => g.clone(),
                _ => unreachable!(),
            })
            .collect();
        let p = Presentation::new(graph, concrete)
            .map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })?;
        ParsedPresentation::Concrete(p)
    } else {
        let inst = SymbolicInstance { graph: sym_graph, factors: by_id };
        inst.validate()
            .map_err(|e| ParseError { line: 1, col: 1, msg: e.to_string() })?;
        ParsedPresentation::Symbolic(inst)
    };
    Ok(ParsedFile { presentation, options })
}

fn is_name(text: &str) -> bool {
    !matches!(
        text,
        "{" | "}"
            | "vertex"
            | "vertices"
            | "edge"
            | "class"
            | "factor"
            | "graph"
            | "options"
    ) && text.chars().all(|c| c.is_alphanumeric() || "_-.".contains(c))
}

fn name(cur: &mut Cursor) -> Result<String, ParseError> {
    let t = cur.next()?;
    if !is_name(&t.text) {
        return Err(err(&t, format!("expected a name, found `{}`", t.text)));
    }
    Ok(t.text)
}

fn int(cur: &mut Cursor) -> Result<u64, ParseError> {
    let t = cur.next()?;
    t.text.parse().map_err(|_| err(&t, format!("expected an integer, found `{}`", t.text)))
}

fn cardinal(cur: &mut Cursor) -> Result<SymbolicCardinal, ParseError> {
    let t = cur.next()?;
    match t.text.as_str() {
        "aleph0" => Ok(SymbolicCardinal::Aleph0),
        "continuum" => Ok(SymbolicCardinal::Continuum),
        "mid" => Ok(SymbolicCardinal::Mid(name(cur)?)),
        other => other
            .parse::<u64>()
            .map(SymbolicCardinal::Fin)
            .map_err(|_| err(&t, format!("expected a cardinal, found `{other}`"))),
    }
}

fn prime_power_token(cur: &mut Cursor) -> Result<(u64, u32), ParseError> {
    let t = cur.next()?;
    let (p, k) = t
        .text
        .split_once('^')
        .ok_or_else(|| err(&t, format!("expected p^k, found `{}`", t.text)))?;
    let p: u64 = p.parse().map_err(|_| err(&t, "bad prime"))?;
    let k: u32 = k.parse().map_err(|_| err(&t, "bad exponent"))?;
    Ok((p, k))
}

fn factor_spec(cur: &mut Cursor) -> Result<FactorSpec, ParseError> {
    let t = cur.next()?;
    match t.text.as_str() {
        "Z" => Ok(FactorSpec::Concrete(ConcreteGroup::IntCyclic)),
        "Zmod" => {
            let (p, k) = prime_power_token(cur)?;
            let modulus = p.checked_pow(k).ok_or_else(|| err(&t, "modulus overflow"))?;
            ConcreteGroup::mod_cyclic(modulus)
                .map(FactorSpec::Concrete)
                .map_err(|e| err(&t, e.to_string()))
        }
        "table" => {
            cur.expect("{")?;
            let mut rows: Vec<Vec<usize>> = Vec::new();
            loop {
                let t = cur.next()?;
                match t.text.as_str() {
                    "}" => break,
                    "row" => {
                        let mut row = Vec::new();
                        while cur.peek().is_some_and(|t| t.text.parse::<usize>().is_ok()) {
                            row.push(cur.next()?.text.parse().unwrap());
                        }
                        rows.push(row);
                    }
                    other => return Err(err(&t, format!("unknown table item `{other}`"))),
                }
            }
            FiniteTable::new(rows)
                .map(|tb| FactorSpec::Concrete(ConcreteGroup::Table(tb)))
                .map_err(|e| err(&t, e.to_string()))
        }
        "sum" => {
            cur.expect("{")?;
            let mut parts = Vec::new();
            loop {
                if cur.peek().map(|t| t.text.as_str()) == Some("}") {
                    cur.next()?;
                    break;
                }
                match factor_spec(cur)? {
                    FactorSpec::Concrete(g) => parts.push(g),
                    _ => return Err(err(&t, "sum components must be concrete")),
                }
            }
            if parts.is_empty() {
                return Err(err(&t, "empty sum"));
            }
            Ok(FactorSpec::Concrete(ConcreteGroup::DirectSum(parts)))
        }
        "symbolic" => {
            cur.expect("{")?;
            let d = abelian_body(cur)?;
            Ok(FactorSpec::Abelian(d))
        }
        "nonabelian" => {
            cur.expect("{")?;
            let mut center_index_countable = true;
            let mut countable = false;
            let mut center: Option<AbelianDescriptor> = None;
            loop {
                let t = cur.next()?;
                match t.text.as_str() {
                    "}" => break,
                    "center-index-countable" => center_index_countable = boolean(cur)?,
                    "countable" => countable = boolean(cur)?,
                    "center" => {
                        let t2 = cur.next()?;
                        match t2.text.as_str() {
                            "unknown" => center = None,
                            "{" => center = Some(abelian_body(cur)?),
                            other => {
                                return Err(err(
                                    &t2,
                                    format!("expected `unknown` or a block, found `{other}`"),
                                ))
                            }
                        }
                    }
                    other => return Err(err(&t, format!("unknown profile item `{other}`"))),
                }
            }
            Ok(FactorSpec::NonAbelian(NonAbelianProfile {
                center_index_countable,
                center,
                countable,
            }))
        }
        other => Err(err(&t, format!("unknown factor kind `{other}`"))),
    }
}

fn boolean(cur: &mut Cursor) -> Result<bool, ParseError> {
    let t = cur.next()?;
    match t.text.as_str() {
        "true" => Ok(true),
        "false" => Ok(false),
        other => Err(err(&t, format!("expected true or false, found `{other}`"))),
    }
}

fn abelian_body(cur: &mut Cursor) -> Result<AbelianDescriptor, ParseError> {
    let mut d = AbelianDescriptor::trivial();
    loop {
        let t = cur.next()?;
        match t.text.as_str() {
            "}" => break,
            "q" => {
                let c = cardinal(cur)?;
                d.add_summand(SIndex::Inf, c);
            }
            "z" => {
                let (p, k) = prime_power_token(cur)?;
                let s = SIndex::cyc(p, k).map_err(|e| err(&t, e.to_string()))?;
                let c = cardinal(cur)?;
                d.add_summand(s, c);
            }
            "pruefer" => {
                let p = int(cur)?;
                let s = SIndex::pruefer(p).map_err(|e| err(&t, e.to_string()))?;
                let c = cardinal(cur)?;
                d.add_summand(s, c);
            }
            "countable" => {
                let t2 = cur.next()?;
                let decl = match t2.text.as_str() {
                    "none" => {
                        d.countable = CountablePart::None;
                        continue;
                    }
                    "unknown" => CountableDecl::default(),
                    "divisible" => CountableDecl::divisible(),
                    "reduced" => CountableDecl::reduced(),
                    "unbounded" => CountableDecl::unbounded(),
                    "bounded" => CountableDecl::bounded(int(cur)?),
                    other => {
                        return Err(err(&t2, format!("unknown countable declaration `{other}`")))
                    }
                };
                d.countable = CountablePart::Countable(decl);
            }
            other => return Err(err(&t, format!("unknown summand kind `{other}`"))),
        }
    }
    Ok(d)
}

fn emit_cardinal(c: &SymbolicCardinal) -> String {
    c.to_string()
}

fn emit_abelian(d: &AbelianDescriptor, indent: &str, out: &mut String) {
    match d.countable {
        CountablePart::None => {}
        CountablePart::Countable(decl) => {
            let word = if decl == CountableDecl::divisible() {
                "divisible".to_string()
            } else if decl == CountableDecl::reduced() {
                "reduced".to_string()
            } else if decl == CountableDecl::unbounded() {
                "unbounded".to_string()
            } else if let (Some(true), Some(n)) = (decl.bounded_divisible, decl.bound) {
                format!("bounded {n}")
            } else {
                "unknown".to_string()
            };
            let _ = writeln!(out, "{indent}countable {word}");
        }
    }
    for (s, lam) in d.lambdas() {
        let _ = writeln!(out, "{indent}{s} {}", emit_cardinal(lam));
    }
}

fn emit_factor(spec: &FactorSpec, out: &mut String) {
    match spec {
        FactorSpec::Concrete(g) => emit_concrete(g, out),
        FactorSpec::Abelian(d) => {
            out.push_str("symbolic {\n");
            emit_abelian(d, "  ", out);
            out.push_str("}\n");
        }
        FactorSpec::NonAbelian(p) => {
            out.push_str("nonabelian {\n");
            let _ = writeln!(out, "  center-index-countable {}", p.center_index_countable);
            let _ = writeln!(out, "  countable {}", p.countable);
            match &p.center {
                None => out.push_str("  center unknown\n"),
                Some(d) => {
                    out.push_str("  center {\n");
                    emit_abelian(d, "    ", out);
                    out.push_str("  }\n");
                }
            }
            out.push_str("}\n");
        }
    }
}

fn emit_concrete(g: &ConcreteGroup, out: &mut String) {
    match g {
        ConcreteGroup::IntCyclic => out.push_str("Z\n"),
        ConcreteGroup::ModCyclic { modulus } => {
            let (p, k) = graphprod::group::prime_power(*modulus).expect("validated");
            let _ = writeln!(out, "Zmod {p}^{k}");
        }
        ConcreteGroup::Table(t) => {
            out.push_str("table {\n");
            for row in t.rows() {
                out.push_str("  row");
                for e in row {
                    let _ = write!(out, " {e}");
                }
                out.push('\n');
            }
            out.push_str("}\n");
        }
        ConcreteGroup::DirectSum(parts) => {
            out.push_str("sum {\n");
            for p in parts {
                out.push_str("  ");
                emit_concrete(p, out);
            }
            out.push_str("}\n");
        }
    }
}

/// Canonical text for a parsed file; `parse(emit(f))` rebuilds `f`.
pub fn emit(file: &ParsedFile) -> String {
    let inst = file.presentation.instance();
    let mut out = String::new();
    out.push_str("graph {\n");
    for v in inst.graph.explicit.vertices() {
        let _ = writeln!(out, "  vertex {v}");
    }
    for (a, b) in inst.graph.explicit.edges() {
        let _ = writeln!(
            out,
            "  edge {} {}",
            inst.graph.explicit.vertex_id(a),
            inst.graph.explicit.vertex_id(b)
        );
    }
    for c in &inst.graph.classes {
        let _ = writeln!(out, "  class {} {}", c.id, emit_cardinal(&c.multiplicity));
    }
    out.push_str("}\n");
    for id in inst.graph.node_ids() {
        let _ = write!(out, "\nfactor {id} ");
        emit_factor(&inst.factors[&id], &mut out);
    }
    let _ = write!(
        out,
        "\noptions {{\n  seed {}\n  bound-cap {}\n}}\n",
        file.options.seed, file.options.bound_cap
    );
    out
}
