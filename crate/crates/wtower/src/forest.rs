//! Weighted multisets of trees with a knowledge frontier, and the order and
//! invariant extraction defined on them.
//!
//! An [`IntersectionForest`] records the unpaired intersection data of a
//! construction: signed framed trees and integer-weighted twisted trees,
//! together with a [`Frontier`] `G` meaning "framed trees of order > G and
//! twisted trees of order > G/2 may additionally be present but are not
//! recorded". `G = inf` means the forest is exhaustive.
//!
//! Two order notions live here. [`tower_order`](IntersectionForest::tower_order)
//! is the largest `n` such that every framed entry has order >= n and every
//! twisted entry has order >= n/2 (capped at `G + 1`).
//! [`cochran_order`](IntersectionForest::cochran_order) is the largest `n`
//! such that every *bad* framed entry has order > n and every *bad* twisted
//! entry has order > n/2 (capped at `G`); badness is
//! [`is_beta_bad`](crate::tree::FramedTree::is_beta_bad). The extracted
//! invariant `beta^i` is the total twist weight on entries isomorphic to the
//! twisted caterpillar [`make_t_inf`]`(i)` and is certified only when the
//! Cochran order reaches `2i`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sign::Sign;
use crate::tree::{make_t_inf, parse_tree, FramedTree, RootedTree, Tree, TreeError, TwistedTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ForestError {
    #[error("forest parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("beta index must be at least 1")]
    InvalidBetaIndex,
    #[error("beta^{index} is not certified: it needs Cochran order {needed}, achieved {achieved}")]
    BetaOrderNotCertified {
        index: u32,
        needed: i64,
        achieved: TowerOrder,
    },
    #[error("Cochran order is infinite: beta_vector needs an explicit depth")]
    DepthRequired,
    #[error("family index must be at least 1, got {got}")]
    InvalidIndex { got: u32 },
    #[error("invalid forest JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Knowledge frontier: `Finite(g)` with `g >= 1`, or exhaustive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Frontier {
    Finite(u32),
    Infinite,
}

impl Frontier {
    pub fn min_with(self, other: Frontier) -> Frontier {
        match (self, other) {
            (Frontier::Infinite, f) | (f, Frontier::Infinite) => f,
            (Frontier::Finite(a), Frontier::Finite(b)) => Frontier::Finite(a.min(b)),
        }
    }
}

impl fmt::Display for Frontier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frontier::Finite(g) => write!(f, "{g}"),
            Frontier::Infinite => write!(f, "inf"),
        }
    }
}

/// A tower/Cochran order: a (possibly negative) integer or infinity.
///
/// `Finite(-1)` arises only for the Cochran order, when a bad entry of
/// order 0 is present so that not even the order-0 condition holds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TowerOrder {
    Finite(i64),
    Infinite,
}

impl TowerOrder {
    pub fn at_least(self, n: i64) -> bool {
        match self {
            TowerOrder::Finite(v) => v >= n,
            TowerOrder::Infinite => true,
        }
    }

    fn cap(self, bound: i64) -> TowerOrder {
        match self {
            TowerOrder::Finite(v) => TowerOrder::Finite(v.min(bound)),
            TowerOrder::Infinite => TowerOrder::Finite(bound),
        }
    }
}

impl fmt::Display for TowerOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TowerOrder::Finite(v) => write!(f, "{v}"),
            TowerOrder::Infinite => write!(f, "inf"),
        }
    }
}

/// One recorded intersection: a signed framed tree or a twist-weighted
/// twisted tree (weight never zero).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ForestEntry {
    Framed { tree: FramedTree, sign: Sign },
    Twisted { tree: TwistedTree, omega: i64 },
}

impl ForestEntry {
    pub fn framed(tree: FramedTree, sign: Sign) -> ForestEntry {
        ForestEntry::Framed { tree, sign }
    }

    /// `omega` must be nonzero; a zero-weight twisted entry is meaningless
    /// and is rejected everywhere (parser, JSON, constructors).
    pub fn twisted(tree: TwistedTree, omega: i64) -> ForestEntry {
        assert!(omega != 0, "twisted entries carry nonzero weight");
        ForestEntry::Twisted { tree, omega }
    }

    pub fn order(&self) -> u32 {
        match self {
            ForestEntry::Framed { tree, .. } => tree.order(),
            ForestEntry::Twisted { tree, .. } => tree.order(),
        }
    }

    pub fn is_beta_bad(&self) -> Result<bool, TreeError> {
        match self {
            ForestEntry::Framed { tree, .. } => tree.is_beta_bad(),
            ForestEntry::Twisted { tree, .. } => tree.is_beta_bad(),
        }
    }

    pub fn tree(&self) -> Tree {
        match self {
            ForestEntry::Framed { tree, .. } => Tree::Framed(tree.clone()),
            ForestEntry::Twisted { tree, .. } => Tree::Twisted(tree.clone()),
        }
    }

    /// Parses a single entry line (`+ <J,K>`, `- <J,K>`, or `w=INT J^inf`).
    pub fn parse(text: &str) -> Result<ForestEntry, ForestError> {
        parse_entry_line(text.trim(), 0)
    }
}

impl fmt::Display for ForestEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ForestEntry::Framed { tree, sign } => write!(f, "{sign} {tree}"),
            ForestEntry::Twisted { tree, omega } => write!(f, "w={omega} {tree}"),
        }
    }
}

/// The recorded intersection data of a construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionForest {
    pub entries: Vec<ForestEntry>,
    pub frontier: Frontier,
}

impl IntersectionForest {
    pub fn new(entries: Vec<ForestEntry>, frontier: Frontier) -> IntersectionForest {
        IntersectionForest { entries, frontier }
    }

    pub fn exhaustive(entries: Vec<ForestEntry>) -> IntersectionForest {
        IntersectionForest::new(entries, Frontier::Infinite)
    }

    /// Largest `n` with every framed entry of order >= n and every twisted
    /// entry of order >= n/2, capped at frontier + 1. Infinite only for an
    /// empty exhaustive forest.
    pub fn tower_order(&self) -> TowerOrder {
        let mut best = TowerOrder::Infinite;
        for e in &self.entries {
            let cap = match e {
                ForestEntry::Framed { tree, .. } => i64::from(tree.order()),
                ForestEntry::Twisted { tree, .. } => 2 * i64::from(tree.order()),
            };
            best = best.cap(cap);
        }
        if let Frontier::Finite(g) = self.frontier {
            best = best.cap(i64::from(g) + 1);
        }
        best
    }

    /// Largest `n` with every bad framed entry of order > n and every bad
    /// twisted entry of order > n/2, capped at the frontier (an unrecorded
    /// framed tree of order frontier + 1 could be bad). Infinite only when
    /// the forest is exhaustive and has no bad entries; `Finite(-1)` when a
    /// bad entry of order 0 is present.
    pub fn cochran_order(&self) -> Result<TowerOrder, ForestError> {
        let mut best = TowerOrder::Infinite;
        for e in &self.entries {
            if !e.is_beta_bad()? {
                continue;
            }
            let cap = match e {
                ForestEntry::Framed { tree, .. } => i64::from(tree.order()) - 1,
                ForestEntry::Twisted { tree, .. } => 2 * i64::from(tree.order()) - 1,
            };
            best = best.cap(cap);
        }
        if let Frontier::Finite(g) = self.frontier {
            best = best.cap(i64::from(g));
        }
        Ok(best)
    }

    /// Total twist weight on entries isomorphic to the twisted caterpillar
    /// of order `i`. Certified only when the Cochran order reaches `2i`.
    pub fn beta(&self, i: u32) -> Result<i64, ForestError> {
        if i == 0 {
            return Err(ForestError::InvalidBetaIndex);
        }
        let achieved = self.cochran_order()?;
        let needed = 2 * i64::from(i);
        if !achieved.at_least(needed) {
            return Err(ForestError::BetaOrderNotCertified {
                index: i,
                needed,
                achieved,
            });
        }
        Ok(self.beta_unchecked(i))
    }

    fn beta_unchecked(&self, i: u32) -> i64 {
        let target = make_t_inf(i).expect("i >= 1").canonical();
        self.entries
            .iter()
            .filter_map(|e| match e {
                ForestEntry::Twisted { tree, omega } if tree.canonical() == target => Some(*omega),
                _ => None,
            })
            .sum()
    }

    /// The map `i -> beta^i` for `1 <= i <= floor(cochran_order / 2)`,
    /// further limited to `up_to` if given. An infinite Cochran order
    /// requires an explicit depth. Empty when the Cochran order is <= 1.
    pub fn beta_vector(
        &self,
        up_to: Option<u32>,
    ) -> Result<std::collections::BTreeMap<u32, i64>, ForestError> {
        let achieved = self.cochran_order()?;
        let limit = match (achieved, up_to) {
            (TowerOrder::Infinite, None) => return Err(ForestError::DepthRequired),
            (TowerOrder::Infinite, Some(d)) => i64::from(d),
            (TowerOrder::Finite(c), None) => c.div_euclid(2),
            (TowerOrder::Finite(c), Some(d)) => c.div_euclid(2).min(i64::from(d)),
        };
        let mut out = std::collections::BTreeMap::new();
        let mut i = 1i64;
        while i <= limit {
            out.insert(i as u32, self.beta_unchecked(i as u32));
            i += 1;
        }
        Ok(out)
    }

    /// Signed count of framed `<1,2>` entries.
    pub fn linking_number(&self) -> i64 {
        let target = FramedTree::new(RootedTree::leaf(1), RootedTree::leaf(2)).canonical();
        self.entries
            .iter()
            .filter_map(|e| match e {
                ForestEntry::Framed { tree, sign } if tree.canonical() == target => {
                    Some(sign.to_i64())
                }
                _ => None,
            })
            .sum()
    }

    /// Parity of the signed count of framed `<1,(1,1)>` entries plus the
    /// total twist weight on `(1,1)^inf` entries; in `{0, 1}`.
    pub fn arf_parity(&self) -> i64 {
        let y = FramedTree::new(
            RootedTree::leaf(1),
            RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1)),
        )
        .canonical();
        let one_one_inf =
            TwistedTree::new(RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1)))
                .canonical();
        let total: i64 = self
            .entries
            .iter()
            .map(|e| match e {
                ForestEntry::Framed { tree, sign } if tree.canonical() == y => sign.to_i64(),
                ForestEntry::Twisted { tree, omega } if tree.canonical() == one_one_inf => *omega,
                _ => 0,
            })
            .sum();
        total.rem_euclid(2)
    }

    /// Renders in the forest file format accepted by [`parse_forest`].
    pub fn render(&self) -> String {
        let mut out = format!("frontier {}\n", self.frontier);
        for e in &self.entries {
            out.push_str(&format!("{e}\n"));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ForestDoc::from(self)).expect("forest serialization")
    }

    pub fn from_json(text: &str) -> Result<IntersectionForest, ForestError> {
        let doc: ForestDoc =
            serde_json::from_str(text).map_err(|e| ForestError::Json(e.to_string()))?;
        doc.try_into()
    }
}

impl fmt::Display for IntersectionForest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// The iterated-construction family: twisted caterpillars of every order
/// `1..=2k+1` with weight +1, plus an oppositely-signed pair of framed
/// caterpillars of order `2k+1` carrying a single 2-label; exhaustive.
///
/// Its Cochran order is exactly `2k` and `beta^i = 1` for `i <= k`.
pub fn infmany_forest(k: u32) -> Result<IntersectionForest, ForestError> {
    if k == 0 {
        return Err(ForestError::InvalidIndex { got: k });
    }
    let mut entries = Vec::new();
    for i in 1..=2 * k + 1 {
        entries.push(ForestEntry::twisted(make_t_inf(i)?, 1));
    }
    let lin = FramedTree::new(RootedTree::leaf(2), crate::tree::chain_to(1, 2 * k + 1));
    debug_assert_eq!(lin.order(), 2 * k + 1);
    debug_assert_eq!(lin.label_count(2), 1);
    entries.push(ForestEntry::framed(lin.clone(), Sign::Plus));
    entries.push(ForestEntry::framed(lin, Sign::Minus));
    Ok(IntersectionForest::exhaustive(entries))
}

/// Parses the forest file format:
///
/// ```text
/// # comment
/// frontier 7        (optional first line; INT >= 1 or "inf"; default inf)
/// + <framed tree>
/// - <framed tree>
/// w=INT twisted^inf
/// ```
pub fn parse_forest(input: &str) -> Result<IntersectionForest, ForestError> {
    let mut frontier = Frontier::Infinite;
    let mut entries = Vec::new();
    let mut seen_content = false;
    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        if let Some(rest) = text.strip_prefix("frontier") {
            if seen_content {
                return Err(ForestError::Parse {
                    line,
                    msg: "frontier header must precede all entries".into(),
                });
            }
            seen_content = true;
            let rest = rest.trim();
            frontier = if rest == "inf" {
                Frontier::Infinite
            } else {
                let g: u32 = rest.parse().map_err(|_| ForestError::Parse {
                    line,
                    msg: format!("expected a positive integer or 'inf', got '{rest}'"),
                })?;
                if g == 0 {
                    return Err(ForestError::Parse {
                        line,
                        msg: "frontier must be at least 1".into(),
                    });
                }
                Frontier::Finite(g)
            };
            continue;
        }
        seen_content = true;
        entries.push(parse_entry_line(text, line)?);
    }
    Ok(IntersectionForest::new(entries, frontier))
}

fn parse_entry_line(text: &str, line: usize) -> Result<ForestEntry, ForestError> {
    if let Some(rest) = text.strip_prefix('+') {
        return Ok(ForestEntry::framed(framed_on_line(rest, line)?, Sign::Plus));
    }
    if let Some(rest) = text.strip_prefix('-') {
        return Ok(ForestEntry::framed(
            framed_on_line(rest, line)?,
            Sign::Minus,
        ));
    }
    if let Some(rest) = text.strip_prefix("w=") {
        let rest = rest.trim_start();
        let split = rest
            .find(|c: char| !(c.is_ascii_digit() || c == '-' || c == '+'))
            .unwrap_or(rest.len());
        let (num, tree_text) = rest.split_at(split);
        let omega: i64 = num.parse().map_err(|_| ForestError::Parse {
            line,
            msg: format!("expected an integer twist weight, got '{num}'"),
        })?;
        if omega == 0 {
            return Err(ForestError::Parse {
                line,
                msg: "twist weight must be nonzero".into(),
            });
        }
        let tree = match parse_tree(tree_text.trim()) {
            Ok(Tree::Twisted(t)) => t,
            Ok(other) => {
                return Err(ForestError::Parse {
                    line,
                    msg: format!("w= lines need a twisted tree 'J^inf', got '{other}'"),
                })
            }
            Err(e) => {
                return Err(ForestError::Parse {
                    line,
                    msg: e.to_string(),
                })
            }
        };
        return Ok(ForestEntry::twisted(tree, omega));
    }
    Err(ForestError::Parse {
        line,
        msg: format!("expected '+', '-', 'w=', or 'frontier', got '{text}'"),
    })
}

fn framed_on_line(text: &str, line: usize) -> Result<FramedTree, ForestError> {
    match parse_tree(text.trim()) {
        Ok(Tree::Framed(t)) => Ok(t),
        Ok(other) => Err(ForestError::Parse {
            line,
            msg: format!("signed lines need a framed tree '<J,K>', got '{other}'"),
        }),
        Err(e) => Err(ForestError::Parse {
            line,
            msg: e.to_string(),
        }),
    }
}

// ---------------------------------------------------------------------------
// JSON mirror.
// ---------------------------------------------------------------------------

#[derive(Serialize, Deserialize)]
struct ForestDoc {
    frontier: serde_json::Value,
    entries: Vec<EntryDoc>,
}

#[derive(Serialize, Deserialize)]
struct EntryDoc {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    sign: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    omega: Option<i64>,
    tree: String,
}

impl From<&IntersectionForest> for ForestDoc {
    fn from(f: &IntersectionForest) -> ForestDoc {
        ForestDoc {
            frontier: match f.frontier {
                Frontier::Finite(g) => serde_json::json!(g),
                Frontier::Infinite => serde_json::json!("inf"),
            },
            entries: f
                .entries
                .iter()
                .map(|e| match e {
                    ForestEntry::Framed { tree, sign } => EntryDoc {
                        kind: "framed".into(),
                        sign: Some(sign.to_i64()),
                        omega: None,
                        tree: tree.to_string(),
                    },
                    ForestEntry::Twisted { tree, omega } => EntryDoc {
                        kind: "twisted".into(),
                        sign: None,
                        omega: Some(*omega),
                        tree: tree.to_string(),
                    },
                })
                .collect(),
        }
    }
}

impl TryFrom<ForestDoc> for IntersectionForest {
    type Error = ForestError;

    fn try_from(doc: ForestDoc) -> Result<IntersectionForest, ForestError> {
        let frontier = match &doc.frontier {
            serde_json::Value::String(s) if s == "inf" => Frontier::Infinite,
            serde_json::Value::Number(n) => {
                let g = n
                    .as_u64()
                    .filter(|&g| g >= 1 && g <= u64::from(u32::MAX))
                    .ok_or_else(|| {
                        ForestError::Json(format!("frontier must be a positive integer, got {n}"))
                    })?;
                Frontier::Finite(g as u32)
            }
            other => {
                return Err(ForestError::Json(format!(
                    "frontier must be a positive integer or \"inf\", got {other}"
                )))
            }
        };
        let mut entries = Vec::new();
        for (i, e) in doc.entries.into_iter().enumerate() {
            let context = |msg: String| ForestError::Json(format!("entry {i}: {msg}"));
            match e.kind.as_str() {
                "framed" => {
                    let sign = e
                        .sign
                        .and_then(Sign::from_i64)
                        .ok_or_else(|| context("framed entries need \"sign\": 1 or -1".into()))?;
                    let tree = match parse_tree(&e.tree) {
                        Ok(Tree::Framed(t)) => t,
                        Ok(_) => return Err(context(format!("'{}' is not a framed tree", e.tree))),
                        Err(err) => return Err(context(err.to_string())),
                    };
                    entries.push(ForestEntry::framed(tree, sign));
                }
                "twisted" => {
                    let omega = e
                        .omega
                        .filter(|&w| w != 0)
                        .ok_or_else(|| context("twisted entries need nonzero \"omega\"".into()))?;
                    let tree = match parse_tree(&e.tree) {
                        Ok(Tree::Twisted(t)) => t,
                        Ok(_) => {
                            return Err(context(format!("'{}' is not a twisted tree", e.tree)))
                        }
                        Err(err) => return Err(context(err.to_string())),
                    };
                    entries.push(ForestEntry::twisted(tree, omega));
                }
                other => return Err(context(format!("unknown entry kind '{other}'"))),
            }
        }
        Ok(IntersectionForest::new(entries, frontier))
    }
}
