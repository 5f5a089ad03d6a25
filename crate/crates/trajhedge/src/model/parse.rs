//! Line-oriented text format for trees, payoffs and processes.
//!
//! ```text
//! # comments start with '#'
//! tree s0=1 horizon=2
//! node r t=0
//! node u t=1
//! child r inc=1 -> u
//! family u poly=0,1 n0=1 const -> up
//! family r poly=0,0,-1 n0=1 const -> down
//! ```
//!
//! A family line denotes children with increments `p(1/n)`, `n ≥ n0`, where
//! `poly=c0,c1,…` lists the coefficients of `p(t) = c0 + c1 t + …`; the
//! optional `-> <id>` names the family (default `<parent>.f<k>`). The line
//! `recur <node> jump=<q>` attaches an unbounded-constancy tail to a leaf.
//!
//! Payoff documents contain `payoff maturity=<m>` followed by
//! `at <node> = <q>` and `at-family <family> poly=<list>` lines; a process
//! document is a sequence of such blocks with maturities `0, 1, …, T`.

use crate::model::{ModelError, PayoffSpec, ProcessSequence, TrajectoryTree, TreeBuilder};
use crate::num::{fmt_q, parse_q, Q};
use crate::poly::Poly;

/// A whitespace-separated token with its 1-based column.
#[derive(Clone, Debug)]
struct Token<'a> {
    text: &'a str,
    column: usize,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    width: usize,
}

impl<'a> Line<'a> {
    fn error(&self, column: usize, message: impl Into<String>) -> ModelError {
        ModelError::Syntax {
            line: self.number,
            column,
            message: message.into(),
        }
    }

    fn token(&self, i: usize, what: &str) -> Result<&Token<'a>, ModelError> {
        self.tokens
            .get(i)
            .ok_or_else(|| self.error(self.width + 1, format!("expected {what}")))
    }

    /// Reads `key=value` from token `i`.
    fn keyed(&self, i: usize, key: &str) -> Result<(&'a str, usize), ModelError> {
        let tok = self.token(i, &format!("`{key}=`"))?;
        match tok.text.split_once('=') {
            Some((k, v)) if k == key => Ok((v, tok.column + key.len() + 1)),
            _ => Err(self.error(tok.column, format!("expected `{key}=`, found `{}`", tok.text))),
        }
    }

    fn rational(&self, i: usize, key: &str) -> Result<Q, ModelError> {
        let (v, col) = self.keyed(i, key)?;
        parse_q(v).map_err(|e| self.error(col, e))
    }

    fn integer(&self, i: usize, key: &str) -> Result<u64, ModelError> {
        let (v, col) = self.keyed(i, key)?;
        v.parse::<u64>()
            .map_err(|_| self.error(col, format!("expected a nonnegative integer, found `{v}`")))
    }

    fn poly(&self, i: usize) -> Result<Poly, ModelError> {
        let (v, col) = self.keyed(i, "poly")?;
        let p = Poly::parse(v).map_err(|e| self.error(col, e))?;
        if let Some(d) = p.degree() {
            if d > 4 {
                return Err(self.error(col, format!("polynomial degree {d} exceeds 4")));
            }
        }
        Ok(p)
    }

    fn expect(&self, i: usize, lit: &str) -> Result<(), ModelError> {
        let tok = self.token(i, &format!("`{lit}`"))?;
        if tok.text == lit {
            Ok(())
        } else {
            Err(self.error(tok.column, format!("expected `{lit}`, found `{}`", tok.text)))
        }
    }

    fn end(&self, i: usize) -> Result<(), ModelError> {
        match self.tokens.get(i) {
            None => Ok(()),
            Some(t) => Err(self.error(t.column, format!("unexpected `{}`", t.text))),
        }
    }
}

fn lines(text: &str) -> Vec<Line<'_>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start: Option<usize> = None;
        for (pos, ch) in content.char_indices().chain(std::iter::once((content.len(), ' '))) {
            if ch.is_whitespace() {
                if let Some(s) = start.take() {
                    tokens.push(Token {
                        text: &content[s..pos],
                        column: content[..s].chars().count() + 1,
                    });
                }
            } else if start.is_none() {
                start = Some(pos);
            }
        }
        if !tokens.is_empty() {
            out.push(Line {
                number: idx + 1,
                tokens,
                width: content.trim_end().chars().count(),
            });
        }
    }
    out
}

/// Parses a trajectory-set document.
pub fn parse_tree(text: &str) -> Result<TrajectoryTree, ModelError> {
    let lines = lines(text);
    let Some(header) = lines.first() else {
        return Err(ModelError::Syntax {
            line: 1,
            column: 1,
            message: "empty document".into(),
        });
    };
    header.expect(0, "tree")?;
    let s0 = header.rational(1, "s0")?;
    let horizon = header.integer(2, "horizon")? as usize;
    header.end(3)?;
    let mut b = TreeBuilder::new(s0, horizon);
    for line in &lines[1..] {
        let kw = &line.tokens[0];
        match kw.text {
            "node" => {
                let id = line.token(1, "node id")?.text;
                let t = line.integer(2, "t")? as usize;
                line.end(3)?;
                b.node(id, t);
            }
            "child" => {
                let p = line.token(1, "parent id")?.text;
                let inc = line.rational(2, "inc")?;
                line.expect(3, "->")?;
                let c = line.token(4, "child id")?.text;
                line.end(5)?;
                b.child(p, inc, c);
            }
            "family" => {
                let p = line.token(1, "parent id")?.text;
                let poly = line.poly(2)?;
                let n0 = line.integer(3, "n0")?;
                let mut i = 4;
                if line.tokens.get(i).is_some_and(|t| t.text == "const") {
                    i += 1;
                }
                let mut label = None;
                if line.tokens.get(i).is_some() {
                    line.expect(i, "->")?;
                    label = Some(line.token(i + 1, "family id")?.text);
                    i += 2;
                }
                line.end(i)?;
                b.family(p, poly, n0, label);
            }
            "recur" => {
                let v = line.token(1, "node id")?.text;
                let jump = line.rational(2, "jump")?;
                line.end(3)?;
                b.recur(v, jump);
            }
            other => {
                return Err(line.error(kw.column, format!("unknown directive `{other}`")));
            }
        }
    }
    b.finish()
}

fn parse_blocks(tree: &TrajectoryTree, text: &str) -> Result<Vec<PayoffSpec>, ModelError> {
    let mut blocks: Vec<PayoffSpec> = Vec::new();
    for line in lines(text) {
        let kw = &line.tokens[0];
        match kw.text {
            "payoff" => {
                let m = line.integer(1, "maturity")? as usize;
                line.end(2)?;
                blocks.push(PayoffSpec {
                    maturity: m,
                    explicit: Default::default(),
                    family: Default::default(),
                });
            }
            "at" | "at-family" => {
                let Some(cur) = blocks.last_mut() else {
                    return Err(line.error(kw.column, "value line before `payoff` header"));
                };
                let id = line.token(1, "id")?;
                if kw.text == "at" {
                    line.expect(2, "=")?;
                    let vt = line.token(3, "value")?;
                    let x = parse_q(vt.text).map_err(|e| line.error(vt.column, e))?;
                    line.end(4)?;
                    let v = tree
                        .node_id(id.text)
                        .map_err(|_| line.error(id.column, format!("unknown node `{}`", id.text)))?;
                    if cur.explicit.insert(v, x).is_some() {
                        return Err(line.error(id.column, format!("node `{}` given twice", id.text)));
                    }
                } else {
                    let p = line.poly(2)?;
                    line.end(3)?;
                    let f = tree
                        .family_id(id.text)
                        .map_err(|_| line.error(id.column, format!("unknown family `{}`", id.text)))?;
                    if cur.family.insert(f, p).is_some() {
                        return Err(line.error(id.column, format!("family `{}` given twice", id.text)));
                    }
                }
            }
            other => return Err(line.error(kw.column, format!("unknown directive `{other}`"))),
        }
    }
    for b in &blocks {
        b.validate(tree)?;
    }
    Ok(blocks)
}

/// Parses a single payoff block.
pub fn parse_payoff(tree: &TrajectoryTree, text: &str) -> Result<PayoffSpec, ModelError> {
    let mut blocks = parse_blocks(tree, text)?;
    match blocks.len() {
        1 => Ok(blocks.remove(0)),
        n => Err(ModelError::Syntax {
            line: 1,
            column: 1,
            message: format!("expected one payoff block, found {n}"),
        }),
    }
}

/// Parses a process document: payoff blocks with maturities `0..=T`.
pub fn parse_process(tree: &TrajectoryTree, text: &str) -> Result<ProcessSequence, ModelError> {
    let p = ProcessSequence::new(parse_blocks(tree, text)?);
    p.validate(tree)?;
    Ok(p)
}

/// Serializes a tree in the text format (parseable by [`parse_tree`]).
pub fn write_tree(tree: &TrajectoryTree) -> String {
    let mut out = format!("tree s0={} horizon={}\n", fmt_q(tree.root_value()), tree.horizon());
    for v in tree.nodes() {
        out += &format!("node {} t={}\n", tree.label(v), tree.node(v).time);
    }
    for v in tree.nodes() {
        let n = tree.node(v);
        for c in &n.children {
            out += &format!(
                "child {} inc={} -> {}\n",
                n.label,
                fmt_q(&tree.node(*c).increment),
                tree.label(*c)
            );
        }
        for f in &n.families {
            let fam = tree.family(*f);
            out += &format!(
                "family {} poly={} n0={} const -> {}\n",
                n.label,
                fam.increment.to_list(),
                fam.n0,
                fam.label
            );
        }
    }
    for v in tree.nodes() {
        if let Some(j) = &tree.node(v).recurrence {
            out += &format!("recur {} jump={}\n", tree.label(v), fmt_q(j));
        }
    }
    out
}

/// Serializes one payoff block.
pub fn write_payoff(tree: &TrajectoryTree, f: &PayoffSpec) -> String {
    let mut out = format!("payoff maturity={}\n", f.maturity);
    for (v, x) in &f.explicit {
        out += &format!("at {} = {}\n", tree.label(*v), fmt_q(x));
    }
    for (fam, p) in &f.family {
        out += &format!("at-family {} poly={}\n", tree.family(*fam).label, p.to_list());
    }
    out
}

/// Serializes a process as consecutive payoff blocks.
pub fn write_process(tree: &TrajectoryTree, f: &ProcessSequence) -> String {
    f.steps.iter().map(|s| write_payoff(tree, s)).collect()
}
