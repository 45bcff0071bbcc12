//! Labeled unitrivalent trees and their canonical forms.
//!
//! A [`RootedTree`] is a non-associative bracketing of leaf labels: every
//! internal vertex is trivalent (parent edge plus two children) and every
//! leaf carries a positive integer label. A [`FramedTree`] glues two rooted
//! trees along their root edges, producing an unrooted tree all of whose
//! univalent vertices are labeled. A [`TwistedTree`] instead marks the root
//! vertex of a single bracketing with a twist symbol, written `^inf`.
//!
//! Structural equality (`==`) compares *presentations*; two presentations
//! denote the same tree exactly when their [`canonical`](FramedTree::canonical)
//! keys agree. Canonicalization minimizes over every way of splitting the
//! unrooted tree at an edge and recursively sorting children, so it is
//! invariant under re-bracketing and re-rooting.

use std::fmt;

use thiserror::Error;

/// Leaf labels are positive integers (`1`, `2`, ...).
pub type Label = u32;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("label {label} out of range: this predicate is only defined for labels 1 and 2")]
    LabelOutOfRange { label: Label },
    #[error("family index must be at least 1, got {got}")]
    InvalidFamilyIndex { got: u32 },
    #[error("operation requires a framed or twisted tree, got a bare rooted tree")]
    RootedNotSupported,
}

/// A non-associative bracketing: either a labeled leaf or an ordered pair.
///
/// The pair order is presentation data; semantically children are unordered
/// (canonicalization sorts them) except where an orientation-sensitive
/// computation explicitly consumes the written order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RootedTree {
    Leaf(Label),
    Pair(Box<RootedTree>, Box<RootedTree>),
}

impl RootedTree {
    pub fn leaf(label: Label) -> RootedTree {
        RootedTree::Leaf(label)
    }

    pub fn pair(left: RootedTree, right: RootedTree) -> RootedTree {
        RootedTree::Pair(Box::new(left), Box::new(right))
    }

    pub fn leaf_count(&self) -> usize {
        match self {
            RootedTree::Leaf(_) => 1,
            RootedTree::Pair(a, b) => a.leaf_count() + b.leaf_count(),
        }
    }

    /// Number of trivalent vertices: one per pair node.
    pub fn order(&self) -> u32 {
        (self.leaf_count() - 1) as u32
    }

    pub fn leaf_labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut Vec<Label>) {
        match self {
            RootedTree::Leaf(l) => out.push(*l),
            RootedTree::Pair(a, b) => {
                a.collect_labels(out);
                b.collect_labels(out);
            }
        }
    }

    pub fn label_count(&self, label: Label) -> usize {
        match self {
            RootedTree::Leaf(l) => usize::from(*l == label),
            RootedTree::Pair(a, b) => a.label_count(label) + b.label_count(label),
        }
    }

    /// Canonical spelling of the bracketing with children sorted at every
    /// pair node. Complete invariant for root-preserving isomorphism.
    pub fn canonical_spelling(&self) -> String {
        match self {
            RootedTree::Leaf(l) => l.to_string(),
            RootedTree::Pair(a, b) => {
                let (x, y) = sorted2(a.canonical_spelling(), b.canonical_spelling());
                format!("({x},{y})")
            }
        }
    }
}

fn sorted2(a: String, b: String) -> (String, String) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

impl fmt::Display for RootedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RootedTree::Leaf(l) => write!(f, "{l}"),
            RootedTree::Pair(a, b) => write!(f, "({a},{b})"),
        }
    }
}

/// An unrooted labeled unitrivalent tree, presented as two bracketings glued
/// along their root edges: `<J,K>`.
///
/// `<J,K>` and `<K,J>` denote the same tree; so do presentations split at a
/// different edge. Use [`canonical`](FramedTree::canonical) for semantic
/// identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FramedTree {
    pub left: RootedTree,
    pub right: RootedTree,
}

impl FramedTree {
    pub fn new(left: RootedTree, right: RootedTree) -> FramedTree {
        FramedTree { left, right }
    }

    pub fn leaf_count(&self) -> usize {
        self.left.leaf_count() + self.right.leaf_count()
    }

    /// Number of trivalent vertices; equals leaf count minus 2.
    pub fn order(&self) -> u32 {
        (self.leaf_count() - 2) as u32
    }

    pub fn leaf_labels(&self) -> Vec<Label> {
        let mut out = self.left.leaf_labels();
        out.extend(self.right.leaf_labels());
        out
    }

    /// Sorted leaf label multiset.
    pub fn label_multiset(&self) -> Vec<Label> {
        let mut out = self.leaf_labels();
        out.sort_unstable();
        out
    }

    pub fn label_count(&self, label: Label) -> usize {
        self.left.label_count(label) + self.right.label_count(label)
    }

    /// Canonical key: minimal spelling over every edge at which the unrooted
    /// tree can be split into a glued pair, with children sorted on both
    /// sides. Two framed trees are isomorphic iff their keys are equal.
    pub fn canonical(&self) -> CanonicalKey {
        let g = TreeGraph::build(self);
        let mut best: Option<String> = None;
        for (u, v) in g.edges() {
            let a = g.enc(u, v);
            let b = g.enc(v, u);
            let (x, y) = sorted2(a, b);
            let key = format!("<{x},{y}>");
            if best.as_ref().map_or(true, |cur| key < *cur) {
                best = Some(key);
            }
        }
        CanonicalKey(best.expect("a glued tree always has at least one edge"))
    }

    /// All presentations of this tree: one per edge of the unrooted tree,
    /// with child order inherited from the cyclic structure of `self`.
    pub fn all_presentations(&self) -> Vec<FramedTree> {
        let g = TreeGraph::build(self);
        g.edges()
            .into_iter()
            .map(|(u, v)| FramedTree::new(g.subtree(u, v), g.subtree(v, u)))
            .collect()
    }

    /// Whether every invariant-extraction obstruction test treats this tree
    /// as obstructing ("bad"): at most one leaf not labeled 1, or isomorphic
    /// to the two-ended caterpillar family [`make_t`].
    ///
    /// Only defined over labels `{1, 2}`; other labels error.
    pub fn is_beta_bad(&self) -> Result<bool, TreeError> {
        require_labels_12(&self.label_multiset())?;
        let twos = self.label_count(2);
        if twos <= 1 {
            return Ok(true);
        }
        if twos == 2 {
            let n = self.order();
            if n >= 1 {
                return Ok(self.canonical() == make_t(n)?.canonical());
            }
        }
        Ok(false)
    }
}

impl fmt::Display for FramedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.left, self.right)
    }
}

/// A bracketing whose root vertex carries the twist mark, written `J^inf`.
///
/// The twist vertex is univalent but unlabeled; it never counts toward
/// [`label_count`](TwistedTree::label_count).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TwistedTree {
    pub body: RootedTree,
}

impl TwistedTree {
    pub fn new(body: RootedTree) -> TwistedTree {
        TwistedTree { body }
    }

    pub fn leaf_count(&self) -> usize {
        self.body.leaf_count()
    }

    /// Number of trivalent vertices; equals the body's leaf count minus 1.
    pub fn order(&self) -> u32 {
        self.body.order()
    }

    pub fn leaf_labels(&self) -> Vec<Label> {
        self.body.leaf_labels()
    }

    pub fn label_multiset(&self) -> Vec<Label> {
        let mut out = self.leaf_labels();
        out.sort_unstable();
        out
    }

    pub fn label_count(&self, label: Label) -> usize {
        self.body.label_count(label)
    }

    /// Canonical key. The twist vertex is the unique unlabeled univalent
    /// vertex, so rooting there and sorting children is a complete invariant.
    pub fn canonical(&self) -> CanonicalKey {
        CanonicalKey(format!("{}^inf", self.body.canonical_spelling()))
    }

    /// Bad iff no leaf is labeled 2 (the twist vertex is the one permitted
    /// non-1 univalent vertex). Only defined over labels `{1, 2}`.
    pub fn is_beta_bad(&self) -> Result<bool, TreeError> {
        require_labels_12(&self.label_multiset())?;
        Ok(self.label_count(2) == 0)
    }
}

impl fmt::Display for TwistedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^inf", self.body)
    }
}

fn require_labels_12(labels: &[Label]) -> Result<(), TreeError> {
    for &l in labels {
        if l != 1 && l != 2 {
            return Err(TreeError::LabelOutOfRange { label: l });
        }
    }
    Ok(())
}

/// Any of the three tree flavors, as produced by [`parse_tree`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Tree {
    Rooted(RootedTree),
    Framed(FramedTree),
    Twisted(TwistedTree),
}

impl Tree {
    pub fn order(&self) -> u32 {
        match self {
            Tree::Rooted(t) => t.order(),
            Tree::Framed(t) => t.order(),
            Tree::Twisted(t) => t.order(),
        }
    }

    pub fn label_count(&self, label: Label) -> usize {
        match self {
            Tree::Rooted(t) => t.label_count(label),
            Tree::Framed(t) => t.label_count(label),
            Tree::Twisted(t) => t.label_count(label),
        }
    }

    pub fn canonical(&self) -> CanonicalKey {
        match self {
            Tree::Rooted(t) => CanonicalKey(t.canonical_spelling()),
            Tree::Framed(t) => t.canonical(),
            Tree::Twisted(t) => t.canonical(),
        }
    }

    /// Badness is only defined for glued and twisted trees.
    pub fn is_beta_bad(&self) -> Result<bool, TreeError> {
        match self {
            Tree::Rooted(_) => Err(TreeError::RootedNotSupported),
            Tree::Framed(t) => t.is_beta_bad(),
            Tree::Twisted(t) => t.is_beta_bad(),
        }
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Rooted(t) => t.fmt(f),
            Tree::Framed(t) => t.fmt(f),
            Tree::Twisted(t) => t.fmt(f),
        }
    }
}

/// Canonical spelling of a tree; total order is byte-lexicographic.
///
/// Keys of the three flavors never collide: framed keys start with `<`,
/// twisted keys end with `^inf`, rooted keys do neither.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(String);

impl CanonicalKey {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// The two-ended caterpillar: order `n`, two leaves labeled 2 at the ends,
/// `n` leaves labeled 1 along the spine. Defined for `n >= 1`.
pub fn make_t(n: u32) -> Result<FramedTree, TreeError> {
    if n == 0 {
        return Err(TreeError::InvalidFamilyIndex { got: n });
    }
    Ok(FramedTree::new(RootedTree::leaf(2), chain_to(2, n)))
}

/// The twisted caterpillar: order `i`, twist mark at one end, a single leaf
/// labeled 2 at the other, `i` leaves labeled 1 along the spine. Defined for
/// `i >= 1`.
pub fn make_t_inf(i: u32) -> Result<TwistedTree, TreeError> {
    if i == 0 {
        return Err(TreeError::InvalidFamilyIndex { got: i });
    }
    Ok(TwistedTree::new(chain_to(2, i)))
}

/// `(1,(1,...,(1,end)...))` with `ones` leaves labeled 1.
pub(crate) fn chain_to(end: Label, ones: u32) -> RootedTree {
    let mut t = RootedTree::leaf(end);
    for _ in 0..ones {
        t = RootedTree::pair(RootedTree::leaf(1), t);
    }
    t
}

// ---------------------------------------------------------------------------
// Unrooted graph form with presentation-induced cyclic orders.
// ---------------------------------------------------------------------------

/// Adjacency form of a framed tree. For a trivalent vertex, `adj[v]` lists
/// its three neighbors in the cyclic order induced by the presentation
/// (`[parent, left, right]`); for a leaf it has length 1.
pub(crate) struct TreeGraph {
    pub adj: Vec<Vec<usize>>,
    pub label: Vec<Option<Label>>,
}

const UNSET: usize = usize::MAX;

impl TreeGraph {
    pub fn build(tree: &FramedTree) -> TreeGraph {
        let mut g = TreeGraph {
            adj: Vec::new(),
            label: Vec::new(),
        };
        let a = g.add(&tree.left);
        let b = g.add(&tree.right);
        g.adj[a][0] = b;
        g.adj[b][0] = a;
        g
    }

    /// Adds the bracketing and returns its attachment vertex; slot 0 of that
    /// vertex is left unset for the caller to glue.
    fn add(&mut self, t: &RootedTree) -> usize {
        match t {
            RootedTree::Leaf(l) => {
                self.adj.push(vec![UNSET]);
                self.label.push(Some(*l));
                self.adj.len() - 1
            }
            RootedTree::Pair(a, b) => {
                let va = self.add(a);
                let vb = self.add(b);
                self.adj.push(vec![UNSET, va, vb]);
                self.label.push(None);
                let v = self.adj.len() - 1;
                self.adj[va][0] = v;
                self.adj[vb][0] = v;
                v
            }
        }
    }

    /// Each undirected edge once, as `(u, v)` with `u < v`.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, ns) in self.adj.iter().enumerate() {
            for &v in ns {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// The two neighbors of trivalent `v` other than `from`, in cyclic order
    /// starting after `from`.
    pub fn children(&self, v: usize, from: usize) -> (usize, usize) {
        let ns = &self.adj[v];
        debug_assert_eq!(ns.len(), 3);
        let i = ns
            .iter()
            .position(|&n| n == from)
            .expect("`from` must be adjacent to `v`");
        (ns[(i + 1) % 3], ns[(i + 2) % 3])
    }

    /// Canonical (children-sorted) encoding of the subtree hanging from `v`
    /// away from `from`.
    pub fn enc(&self, v: usize, from: usize) -> String {
        match self.label[v] {
            Some(l) => l.to_string(),
            None => {
                let (c1, c2) = self.children(v, from);
                let (x, y) = sorted2(self.enc(c1, v), self.enc(c2, v));
                format!("({x},{y})")
            }
        }
    }

    /// Materializes the subtree hanging from `v` away from `from`, keeping
    /// the cyclic child order of the underlying presentation.
    pub fn subtree(&self, v: usize, from: usize) -> RootedTree {
        match self.label[v] {
            Some(l) => RootedTree::leaf(l),
            None => {
                let (c1, c2) = self.children(v, from);
                RootedTree::pair(self.subtree(c1, v), self.subtree(c2, v))
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Parsing.
// ---------------------------------------------------------------------------

/// Parses a tree expression.
///
/// Grammar (whitespace insignificant):
///
/// ```text
/// rooted  ::= INT | '(' rooted ',' rooted ')'
/// framed  ::= '<' rooted ',' rooted '>'
/// twisted ::= rooted '^inf'
/// input   ::= framed | twisted | rooted
/// ```
pub fn parse_tree(input: &str) -> Result<Tree, TreeError> {
    let mut p = Parser::new(input);
    p.skip_ws();
    let tree = if p.peek() == Some(b'<') {
        Tree::Framed(p.framed()?)
    } else {
        let body = p.rooted()?;
        p.skip_ws();
        if p.peek() == Some(b'^') {
            p.bump();
            p.skip_ws();
            p.keyword("inf")?;
            Tree::Twisted(TwistedTree::new(body))
        } else {
            Tree::Rooted(body)
        }
    };
    p.skip_ws();
    if let Some(c) = p.peek() {
        return Err(p.err(format!("trailing input starting with '{}'", c as char)));
    }
    Ok(tree)
}

/// Parses an expression that must denote a framed tree.
pub fn parse_framed(input: &str) -> Result<FramedTree, TreeError> {
    match parse_tree(input)? {
        Tree::Framed(t) => Ok(t),
        other => Err(TreeError::Parse {
            pos: 0,
            msg: format!("expected a framed tree '<J,K>', got '{other}'"),
        }),
    }
}

/// Parses an expression that must denote a twisted tree.
pub fn parse_twisted(input: &str) -> Result<TwistedTree, TreeError> {
    match parse_tree(input)? {
        Tree::Twisted(t) => Ok(t),
        other => Err(TreeError::Parse {
            pos: 0,
            msg: format!("expected a twisted tree 'J^inf', got '{other}'"),
        }),
    }
}

struct Parser<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(s: &'a str) -> Parser<'a> {
        Parser {
            bytes: s.as_bytes(),
            pos: 0,
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn bump(&mut self) {
        self.pos += 1;
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(b' ' | b'\t' | b'\n' | b'\r')) {
            self.bump();
        }
    }

    fn err(&self, msg: String) -> TreeError {
        TreeError::Parse { pos: self.pos, msg }
    }

    fn expect(&mut self, c: u8) -> Result<(), TreeError> {
        self.skip_ws();
        match self.peek() {
            Some(got) if got == c => {
                self.bump();
                Ok(())
            }
            Some(got) => {
                Err(self.err(format!("expected '{}', found '{}'", c as char, got as char)))
            }
            None => Err(self.err(format!("expected '{}', found end of input", c as char))),
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), TreeError> {
        for &c in word.as_bytes() {
            match self.peek() {
                Some(got) if got == c => self.bump(),
                Some(got) => {
                    return Err(self.err(format!(
                        "expected keyword '{word}', found '{}'",
                        got as char
                    )))
                }
                None => {
                    return Err(self.err(format!("expected keyword '{word}', found end of input")))
                }
            }
        }
        Ok(())
    }

    fn label(&mut self) -> Result<Label, TreeError> {
        self.skip_ws();
        let start = self.pos;
        while matches!(self.peek(), Some(b'0'..=b'9')) {
            self.bump();
        }
        if self.pos == start {
            return match self.peek() {
                Some(c) => Err(TreeError::Parse {
                    pos: start,
                    msg: format!("expected a label, found '{}'", c as char),
                }),
                None => Err(TreeError::Parse {
                    pos: start,
                    msg: "expected a label, found end of input".into(),
                }),
            };
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("digits are ascii");
        let value: Label = text.parse().map_err(|_| TreeError::Parse {
            pos: start,
            msg: format!("label '{text}' out of range"),
        })?;
        if value == 0 {
            return Err(TreeError::Parse {
                pos: start,
                msg: "labels start at 1".into(),
            });
        }
        Ok(value)
    }

    fn rooted(&mut self) -> Result<RootedTree, TreeError> {
        self.skip_ws();
        if self.peek() == Some(b'(') {
            self.bump();
            let a = self.rooted()?;
            self.expect(b',')?;
            let b = self.rooted()?;
            self.expect(b')')?;
            Ok(RootedTree::pair(a, b))
        } else {
            Ok(RootedTree::Leaf(self.label()?))
        }
    }

    fn framed(&mut self) -> Result<FramedTree, TreeError> {
        self.expect(b'<')?;
        let a = self.rooted()?;
        self.expect(b',')?;
        let b = self.rooted()?;
        self.expect(b'>')?;
        Ok(FramedTree::new(a, b))
    }
}
