//! Undirected network graphs and the two on-disk formats they are read from.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{NodeId, TopologyError};

/// Input format accepted by [`parse_topology`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyFormat {
    Gml,
    Edgelist,
}

impl std::str::FromStr for TopologyFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gml" => Ok(TopologyFormat::Gml),
            "edgelist" => Ok(TopologyFormat::Edgelist),
            other => Err(format!("unknown topology format `{other}`")),
        }
    }
}

/// Undirected simple graph over dense node ids `0..n`, with a label table and
/// a designated monitor subset.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
    adj: Vec<Vec<NodeId>>,
    edges: Vec<(NodeId, NodeId)>,
    monitors: Vec<NodeId>,
}

impl Graph {
    /// Builds a graph from labels and edges, dropping self-loops and
    /// duplicate edges. Labels must be unique.
    pub fn new(labels: Vec<String>, edges: impl IntoIterator<Item = (NodeId, NodeId)>) -> Result<Self, TopologyError> {
        if labels.is_empty() {
            return Err(TopologyError::Empty);
        }
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(TopologyError::DuplicateLabel(l.clone()));
            }
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(TopologyError::NodeOutOfRange(a.max(b)));
            }
            if a != b {
                set.insert((a.min(b), a.max(b)));
            }
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &set {
            adj[a].push(b);
            adj[b].push(a);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Graph { labels, index, adj, edges: set.into_iter().collect(), monitors: Vec::new() })
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(NodeId, NodeId)] {
        &self.edges
    }

    /// Neighbours of `v` in increasing id order.
    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adj[v]
    }

    pub fn label(&self, v: NodeId) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn node_by_label(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn monitors(&self) -> &[NodeId] {
        &self.monitors
    }

    /// Replaces the monitor set. Ids are deduplicated and sorted.
    pub fn set_monitors(&mut self, monitors: impl IntoIterator<Item = NodeId>) -> Result<(), TopologyError> {
        let set: BTreeSet<NodeId> = monitors.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&m| m >= self.node_count()) {
            return Err(TopologyError::NodeOutOfRange(bad));
        }
        self.monitors = set.into_iter().collect();
        Ok(())
    }

    pub fn is_monitor(&self, v: NodeId) -> bool {
        self.monitors.binary_search(&v).is_ok()
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("nodes", &self.node_count())
            .field("edges", &self.edge_count())
            .field("monitors", &self.monitors)
            .finish()
    }
}

/// Parses a topology in the given format.
pub fn parse_topology(text: &str, format: TopologyFormat) -> Result<Graph, TopologyError> {
    match format {
        TopologyFormat::Gml => parse_gml(text),
        TopologyFormat::Edgelist => parse_edgelist(text),
    }
}

/// Whitespace-separated `a b` pairs, one edge per line. Tokens are labels;
/// ids are assigned in order of first appearance. `#` starts a comment.
pub fn parse_edgelist(text: &str) -> Result<Graph, TopologyError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, NodeId> = HashMap::new();
    let mut edges = Vec::new();
    let mut intern = |tok: &str, labels: &mut Vec<String>| -> NodeId {
        *index.entry(tok.to_string()).or_insert_with(|| {
            labels.push(tok.to_string());
            labels.len() - 1
        })
    };
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            [a] => {
                intern(a, &mut labels);
            }
            [a, b] => {
                let (a, b) = (intern(a, &mut labels), intern(b, &mut labels));
                edges.push((a, b));
            }
            _ => {
                return Err(TopologyError::Parse {
                    line: lineno + 1,
                    message: format!("expected `a b`, found {} tokens", toks.len()),
                })
            }
        }
    }
    Graph::new(labels, edges)
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Key(String),
    Int(i64),
    Real(f64),
    Str(String),
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<(Token, usize)>, TopologyError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '[' => {
                chars.next();
                out.push((Token::Open, line));
            }
            ']' => {
                chars.next();
                out.push((Token::Close, line));
            }
            '"' => {
                chars.next();
                let start = line;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some('"') => break,
                        Some(ch) => {
                            if ch == '\n' {
                                line += 1;
                            }
                            s.push(ch);
                        }
                        None => {
                            return Err(TopologyError::Parse { line: start, message: "unterminated string".into() })
                        }
                    }
                }
                out.push((Token::Str(s), start));
            }
            _ => {
                let mut word = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '[' || c == ']' || c == '"' {
                        break;
                    }
                    word.push(c);
                    chars.next();
                }
                let tok = if let Ok(i) = word.parse::<i64>() {
                    Token::Int(i)
                } else if let Ok(x) = word.parse::<f64>() {
                    Token::Real(x)
                } else if word.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                    Token::Key(word)
                } else {
                    return Err(TopologyError::Parse { line, message: format!("unexpected token `{word}`") });
                };
                out.push((tok, line));
            }
        }
    }
    Ok(out)
}

#[derive(Debug)]
enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Debug)]
struct Entry {
    key: String,
    value: Value,
    line: usize,
}

struct Cursor {
    toks: Vec<(Token, usize)>,
    pos: usize,
}

impl Cursor {
    fn last_line(&self) -> usize {
        self.toks.last().map_or(1, |t| t.1)
    }

    fn list(&mut self, nested: bool) -> Result<Vec<Entry>, TopologyError> {
        let mut entries = Vec::new();
        loop {
            let Some((tok, line)) = self.toks.get(self.pos).cloned() else {
                if nested {
                    return Err(TopologyError::Parse {
                        line: self.last_line(),
                        message: "unexpected end of input, missing `]`".into(),
                    });
                }
                return Ok(entries);
            };
            self.pos += 1;
            let key = match tok {
                Token::Close if nested => return Ok(entries),
                Token::Key(k) => k,
                other => {
                    return Err(TopologyError::Parse { line, message: format!("expected a key, found {other:?}") })
                }
            };
            let Some((vtok, vline)) = self.toks.get(self.pos).cloned() else {
                return Err(TopologyError::Parse { line, message: format!("key `{key}` has no value") });
            };
            self.pos += 1;
            let value = match vtok {
                Token::Int(i) => Value::Int(i),
                Token::Real(x) => Value::Real(x),
                Token::Str(s) => Value::Str(s),
                Token::Open => Value::List(self.list(true)?),
                other => {
                    return Err(TopologyError::Parse {
                        line: vline,
                        message: format!("expected a value for `{key}`, found {other:?}"),
                    })
                }
            };
            entries.push(Entry { key, value, line });
        }
    }
}

fn int_field(entries: &[Entry], key: &str, owner_line: usize) -> Result<i64, TopologyError> {
    match entries.iter().find(|e| e.key == key).map(|e| (&e.value, e.line)) {
        Some((Value::Int(i), _)) => Ok(*i),
        Some((_, line)) => Err(TopologyError::Parse { line, message: format!("`{key}` must be an integer") }),
        None => Err(TopologyError::Parse { line: owner_line, message: format!("missing `{key}`") }),
    }
}

/// Reads the GML subset used by the Internet Topology Zoo: a `graph` list
/// holding `node [ id .. label .. ]` and `edge [ source .. target .. ]`
/// entries. Other keys are ignored. Nodes without a label are labelled by
/// their GML id; repeated labels get the GML id appended.
pub fn parse_gml(text: &str) -> Result<Graph, TopologyError> {
    let mut cursor = Cursor { toks: tokenize(text)?, pos: 0 };
    let top = cursor.list(false)?;
    let graph = top
        .iter()
        .find_map(|e| match (&e.key[..], &e.value) {
            ("graph", Value::List(items)) => Some(items),
            _ => None,
        })
        .ok_or(TopologyError::Parse { line: 1, message: "no `graph [ ... ]` block".into() })?;

    let mut labels = Vec::new();
    let mut seen = HashMap::new();
    let mut gml_ids: HashMap<i64, NodeId> = HashMap::new();
    for e in graph.iter().filter(|e| e.key == "node") {
        let Value::List(fields) = &e.value else {
            return Err(TopologyError::Parse { line: e.line, message: "`node` must be a list".into() });
        };
        let id = int_field(fields, "id", e.line)?;
        if gml_ids.insert(id, labels.len()).is_some() {
            return Err(TopologyError::Parse { line: e.line, message: format!("duplicate node id {id}") });
        }
        let mut label = match fields.iter().find(|f| f.key == "label").map(|f| &f.value) {
            Some(Value::Str(s)) => s.clone(),
            Some(Value::Int(i)) => i.to_string(),
            Some(Value::Real(x)) => x.to_string(),
            _ => id.to_string(),
        };
        if seen.contains_key(&label) {
            label = format!("{label}#{id}");
        }
        seen.insert(label.clone(), ());
        labels.push(label);
    }

    let mut edges = Vec::new();
    for e in graph.iter().filter(|e| e.key == "edge") {
        let Value::List(fields) = &e.value else {
            return Err(TopologyError::Parse { line: e.line, message: "`edge` must be a list".into() });
        };
        let mut ends = [0; 2];
        for (slot, key) in ends.iter_mut().zip(["source", "target"]) {
            let raw = int_field(fields, key, e.line)?;
            *slot = *gml_ids.get(&raw).ok_or(TopologyError::DanglingEndpoint { line: e.line, id: raw })?;
        }
        edges.push((ends[0], ends[1]));
    }
    Graph::new(labels, edges)
}
