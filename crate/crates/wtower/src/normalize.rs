//! Order-raising normalization: eliminates β-bad forest entries by
//! boundary-twisting, Arf-pair cancellation, t-tree exchange, and relation
//! reduction, producing a forest whose Cochran order reaches a requested
//! even target. Every transformation is planned as a [`Move`] and recorded
//! in a [`MoveLog`]; [`replay`]ing the log on the input reproduces the
//! output bit-exactly.
//!
//! Junk created by the geometric counterparts of these moves lives above
//! the target order; it is not materialized but absorbed by lowering the
//! frontier to `target + 1` ([`MoveRule::FrontierAbsorb`]) whenever at
//! least one other move fired.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::forest::{ForestEntry, ForestError, Frontier, IntersectionForest};
use crate::ihx::{canonical_signed, LatticeError, RelationLattice, TreeVector};
use crate::sign::Sign;
use crate::tree::{make_t, make_t_inf, FramedTree, RootedTree, TreeError, TwistedTree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NormalizeError {
    #[error("target must be a positive even integer, got {got}")]
    TargetInvalid { got: u32 },
    #[error("frontier {frontier} is below the target {target}: the Cochran order cannot reach it")]
    FrontierBelowTarget { frontier: u32, target: u32 },
    #[error("framed order-0 entry '{entry}' admits no elimination")]
    ForbiddenOrderZero { entry: String },
    #[error("linking number is {linking}, not 0")]
    NonzeroLinking { linking: i64 },
    #[error("Arf obstruction: the <1,(1,1)>/(1,1)^inf count is odd")]
    ArfObstruction,
    #[error("entry '{entry}' is not eliminable at order {order}: {detail}")]
    NotEliminable {
        entry: String,
        order: u32,
        detail: String,
    },
    #[error("entry '{entry}' is not a two-two caterpillar")]
    NotATTree { entry: String },
    #[error("entry index {index} is out of range for a forest with {len} entries")]
    EntryOutOfRange { index: usize, len: usize },
    #[error("replay failed at move {index}: {msg}")]
    ReplayMismatch { index: usize, msg: String },
    #[error("invalid move log JSON: {0}")]
    Json(String),
    #[error(transparent)]
    Forest(#[from] ForestError),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Which rewriting rule a move applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveRule {
    /// Two β-bad framed entries of the same class with opposite effective
    /// orientations cancel.
    CancelOppositePair,
    /// A `(1,1)^inf` entry of weight ω becomes `ω mod 2` copies of
    /// `+ <1,(1,1)>`.
    BoundaryTwist,
    /// Two `<1,(1,1)>`-class entries cancel regardless of signs
    /// (their class is 2-torsion).
    ArfPairCancel,
    /// A two-two caterpillar `t_n` becomes a twist entry on `t_j^inf`,
    /// `j = ceil(n/2)`, of weight `±1` (n odd) or `±2` (n even).
    TTreeElimination,
    /// A β-bad entry whose class is zero modulo the tree relations is
    /// removed.
    IhxElimination,
    /// A β-bad entry removed under the caller's explicit assumption of
    /// eliminability.
    AssumedElimination,
    /// Junk created above the target is absorbed by lowering the frontier.
    FrontierAbsorb,
}

impl MoveRule {
    pub fn name(self) -> &'static str {
        match self {
            MoveRule::CancelOppositePair => "cancel-opposite-pair",
            MoveRule::BoundaryTwist => "boundary-twist",
            MoveRule::ArfPairCancel => "arf-pair-cancel",
            MoveRule::TTreeElimination => "t-tree-elimination",
            MoveRule::IhxElimination => "ihx-elimination",
            MoveRule::AssumedElimination => "assumed-elimination",
            MoveRule::FrontierAbsorb => "frontier-absorb",
        }
    }

    fn from_name(name: &str) -> Option<MoveRule> {
        Some(match name {
            "cancel-opposite-pair" => MoveRule::CancelOppositePair,
            "boundary-twist" => MoveRule::BoundaryTwist,
            "arf-pair-cancel" => MoveRule::ArfPairCancel,
            "t-tree-elimination" => MoveRule::TTreeElimination,
            "ihx-elimination" => MoveRule::IhxElimination,
            "assumed-elimination" => MoveRule::AssumedElimination,
            "frontier-absorb" => MoveRule::FrontierAbsorb,
            _ => return None,
        })
    }
}

impl fmt::Display for MoveRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One applied rewriting step: the consumed entries are removed (each must
/// be present), the produced entries appended, and the frontier replaced
/// when given.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Move {
    pub rule: MoveRule,
    pub consumed: Vec<ForestEntry>,
    pub produced: Vec<ForestEntry>,
    pub frontier: Option<Frontier>,
}

/// Ordered list of applied moves; the audit trail of a normalization.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MoveLog {
    pub moves: Vec<Move>,
}

impl MoveLog {
    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn to_json(&self) -> String {
        let docs: Vec<MoveDoc> = self.moves.iter().map(MoveDoc::from).collect();
        serde_json::to_string_pretty(&docs).expect("move log serialization")
    }

    pub fn from_json(text: &str) -> Result<MoveLog, NormalizeError> {
        let docs: Vec<MoveDoc> =
            serde_json::from_str(text).map_err(|e| NormalizeError::Json(e.to_string()))?;
        let mut moves = Vec::new();
        for (i, d) in docs.into_iter().enumerate() {
            moves.push(
                d.into_move()
                    .map_err(|msg| NormalizeError::Json(format!("move {i}: {msg}")))?,
            );
        }
        Ok(MoveLog { moves })
    }
}

#[derive(Serialize, Deserialize)]
struct MoveDoc {
    rule: String,
    consumed: Vec<String>,
    produced: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    frontier: Option<serde_json::Value>,
}

impl From<&Move> for MoveDoc {
    fn from(m: &Move) -> MoveDoc {
        MoveDoc {
            rule: m.rule.name().to_string(),
            consumed: m.consumed.iter().map(ForestEntry::to_string).collect(),
            produced: m.produced.iter().map(ForestEntry::to_string).collect(),
            frontier: m.frontier.map(|f| match f {
                Frontier::Finite(g) => serde_json::json!(g),
                Frontier::Infinite => serde_json::json!("inf"),
            }),
        }
    }
}

impl MoveDoc {
    fn into_move(self) -> Result<Move, String> {
        let rule = MoveRule::from_name(&self.rule)
            .ok_or_else(|| format!("unknown rule '{}'", self.rule))?;
        let parse_all = |lines: Vec<String>| -> Result<Vec<ForestEntry>, String> {
            lines
                .into_iter()
                .map(|l| ForestEntry::parse(&l).map_err(|e| e.to_string()))
                .collect()
        };
        let frontier = match self.frontier {
            None => None,
            Some(serde_json::Value::String(s)) if s == "inf" => Some(Frontier::Infinite),
            Some(serde_json::Value::Number(n)) => {
                let g = n
                    .as_u64()
                    .filter(|&g| g >= 1 && g <= u64::from(u32::MAX))
                    .ok_or_else(|| format!("invalid frontier {n}"))?;
                Some(Frontier::Finite(g as u32))
            }
            Some(other) => return Err(format!("invalid frontier {other}")),
        };
        Ok(Move {
            rule,
            consumed: parse_all(self.consumed)?,
            produced: parse_all(self.produced)?,
            frontier,
        })
    }
}

/// Applies a move log to a forest: per move, each consumed entry is removed
/// at its first occurrence, produced entries are appended in order, and the
/// frontier is replaced when the move carries one.
pub fn replay(
    input: &IntersectionForest,
    log: &MoveLog,
) -> Result<IntersectionForest, NormalizeError> {
    let mut f = input.clone();
    for (index, mv) in log.moves.iter().enumerate() {
        apply(&mut f, mv).map_err(|msg| NormalizeError::ReplayMismatch { index, msg })?;
    }
    Ok(f)
}

fn apply(f: &mut IntersectionForest, mv: &Move) -> Result<(), String> {
    for c in &mv.consumed {
        match f.entries.iter().position(|e| e == c) {
            Some(p) => {
                f.entries.remove(p);
            }
            None => return Err(format!("consumed entry '{c}' is not present")),
        }
    }
    f.entries.extend(mv.produced.iter().cloned());
    if let Some(fr) = mv.frontier {
        f.frontier = fr;
    }
    Ok(())
}

/// Global sign convention for the twist weights created by t-tree exchange.
/// `Standard` is anchored so that `+t_2` becomes `w=+2 (1,2)^inf`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TwistConvention {
    #[default]
    Standard,
    Negated,
}

impl TwistConvention {
    fn factor(self) -> i64 {
        match self {
            TwistConvention::Standard => 1,
            TwistConvention::Negated => -1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NormalizeOptions {
    /// Requested Cochran order `2k`: positive and even.
    pub target: u32,
    /// Remove in-range β-bad entries that no rule covers (recorded as
    /// [`MoveRule::AssumedElimination`]) instead of failing.
    pub assume_eliminable: bool,
    pub convention: TwistConvention,
    /// Largest order at which relation reduction is attempted.
    pub ihx_bound: u32,
}

impl NormalizeOptions {
    pub fn new(target: u32) -> NormalizeOptions {
        NormalizeOptions {
            target,
            ..NormalizeOptions::default()
        }
    }
}

impl Default for NormalizeOptions {
    fn default() -> NormalizeOptions {
        NormalizeOptions {
            target: 2,
            assume_eliminable: false,
            convention: TwistConvention::Standard,
            ihx_bound: crate::ihx::DEFAULT_ORDER_BOUND,
        }
    }
}

fn one_one_inf_key() -> crate::tree::CanonicalKey {
    TwistedTree::new(RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1))).canonical()
}

fn y_key() -> crate::tree::CanonicalKey {
    FramedTree::new(
        RootedTree::leaf(1),
        RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1)),
    )
    .canonical()
}

fn y_entry() -> ForestEntry {
    ForestEntry::framed(
        FramedTree::new(
            RootedTree::leaf(1),
            RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1)),
        ),
        Sign::Plus,
    )
}

/// Replaces every `(1,1)^inf` entry of weight ω by `ω mod 2` copies of
/// `+ <1,(1,1)>`. The frontier is left unchanged (the caller absorbs the
/// created junk at its own target; see [`normalize`]).
pub fn boundary_twist_11inf(input: &IntersectionForest) -> (IntersectionForest, MoveLog) {
    let mut f = input.clone();
    let mut moves = Vec::new();
    let target = one_one_inf_key();
    loop {
        let hit = f.entries.iter().find_map(|e| match e {
            ForestEntry::Twisted { tree, omega } if tree.canonical() == target => {
                Some((e.clone(), *omega))
            }
            _ => None,
        });
        let Some((entry, omega)) = hit else { break };
        let copies = omega.rem_euclid(2) as usize;
        let mv = Move {
            rule: MoveRule::BoundaryTwist,
            consumed: vec![entry],
            produced: std::iter::repeat_with(y_entry).take(copies).collect(),
            frontier: None,
        };
        apply(&mut f, &mv).expect("planned move applies");
        moves.push(mv);
    }
    (f, MoveLog { moves })
}

/// Removes `<1,(1,1)>`-class entries pairwise, signs regardless (the class
/// is 2-torsion). Errors when the Arf parity of the forest is odd. When the
/// parity is even but the count is odd (possible only while `(1,1)^inf`
/// entries remain), one entry is left in place.
pub fn cancel_arf_pairs(
    input: &IntersectionForest,
) -> Result<(IntersectionForest, MoveLog), NormalizeError> {
    if input.arf_parity() != 0 {
        return Err(NormalizeError::ArfObstruction);
    }
    let mut f = input.clone();
    let mut moves = Vec::new();
    let key = y_key();
    loop {
        let hits: Vec<ForestEntry> = f
            .entries
            .iter()
            .filter(|e| matches!(e, ForestEntry::Framed { tree, .. } if tree.canonical() == key))
            .take(2)
            .cloned()
            .collect();
        if hits.len() < 2 {
            break;
        }
        let mv = Move {
            rule: MoveRule::ArfPairCancel,
            consumed: hits,
            produced: vec![],
            frontier: None,
        };
        apply(&mut f, &mv).expect("planned move applies");
        moves.push(mv);
    }
    Ok((f, MoveLog { moves }))
}

/// Plans the exchange of the framed caterpillar at `entries[index]` for a
/// twist entry, merging with the first existing twist entry of the same
/// class (summed weights; both dropped on cancellation).
fn plan_t_exchange(
    f: &IntersectionForest,
    index: usize,
    convention: TwistConvention,
) -> Result<Move, NormalizeError> {
    let entry = f
        .entries
        .get(index)
        .ok_or(NormalizeError::EntryOutOfRange {
            index,
            len: f.entries.len(),
        })?;
    let (tree, sign) = match entry {
        ForestEntry::Framed { tree, sign } => (tree, *sign),
        ForestEntry::Twisted { .. } => {
            return Err(NormalizeError::NotATTree {
                entry: entry.to_string(),
            })
        }
    };
    let n = tree.order();
    if n == 0 {
        return Err(NormalizeError::NotATTree {
            entry: entry.to_string(),
        });
    }
    let natural = make_t(n)?;
    if tree.canonical() != natural.canonical() {
        return Err(NormalizeError::NotATTree {
            entry: entry.to_string(),
        });
    }
    let j = n.div_ceil(2);
    let magnitude = if n % 2 == 1 { 1 } else { 2 };
    // The written sign is read relative to the written presentation (an odd
    // re-spelling denotes the opposite oriented class), while the rule's
    // numeric anchor is the natural caterpillar presentation.
    let orientation = canonical_signed(tree).sign * canonical_signed(&natural).sign;
    let omega = sign.to_i64() * orientation * magnitude * convention.factor();
    let byproduct = make_t_inf(j)?;
    let byproduct_key = byproduct.canonical();
    let mut consumed = vec![entry.clone()];
    let existing = f.entries.iter().find_map(|e| match e {
        ForestEntry::Twisted { tree, omega } if tree.canonical() == byproduct_key => {
            Some((e.clone(), *omega))
        }
        _ => None,
    });
    let total = match existing {
        Some((e, w)) => {
            consumed.push(e);
            omega + w
        }
        None => omega,
    };
    let produced = if total == 0 {
        vec![]
    } else {
        vec![ForestEntry::twisted(byproduct, total)]
    };
    Ok(Move {
        rule: MoveRule::TTreeElimination,
        consumed,
        produced,
        frontier: None,
    })
}

/// Exchanges the framed caterpillar `t_n` at `entries[index]` for the twist
/// entry `w = ±1` (n odd) or `±2` (n even) on `t_{ceil(n/2)}^inf`, merged
/// with any existing entry of that class. The frontier is left unchanged.
pub fn eliminate_t_tree(
    input: &IntersectionForest,
    index: usize,
) -> Result<(IntersectionForest, MoveLog), NormalizeError> {
    let mv = plan_t_exchange(input, index, TwistConvention::Standard)?;
    let mut f = input.clone();
    apply(&mut f, &mv).expect("planned move applies");
    Ok((f, MoveLog { moves: vec![mv] }))
}

/// Raises the Cochran order of `input` to at least `options.target` by
/// eliminating every β-bad entry of framed order ≤ target (twisted order
/// ≤ target/2), recording each step. See the module documentation for the
/// rule inventory; junk created above the target is absorbed by lowering
/// the frontier to `target + 1` when any move fired.
pub fn normalize(
    input: &IntersectionForest,
    options: &NormalizeOptions,
) -> Result<(IntersectionForest, MoveLog), NormalizeError> {
    let target = options.target;
    if target == 0 || target % 2 != 0 {
        return Err(NormalizeError::TargetInvalid { got: target });
    }
    let k = target / 2;
    if let Frontier::Finite(g) = input.frontier {
        if g < target {
            return Err(NormalizeError::FrontierBelowTarget {
                frontier: g,
                target,
            });
        }
    }

    let lk_key = FramedTree::new(RootedTree::leaf(1), RootedTree::leaf(2)).canonical();
    for e in &input.entries {
        if let ForestEntry::Framed { tree, .. } = e {
            if tree.order() == 0 && tree.canonical() != lk_key {
                return Err(NormalizeError::ForbiddenOrderZero {
                    entry: e.to_string(),
                });
            }
        }
    }
    let linking = input.linking_number();
    if linking != 0 {
        return Err(NormalizeError::NonzeroLinking { linking });
    }
    if input.arf_parity() != 0 {
        return Err(NormalizeError::ArfObstruction);
    }
    // Badness is only defined over labels {1, 2}; reject others up front so
    // the output's Cochran order is guaranteed computable.
    input.cochran_order()?;

    let mut f = input.clone();
    let mut moves: Vec<Move> = Vec::new();
    let push = |f: &mut IntersectionForest, moves: &mut Vec<Move>, mv: Move| {
        apply(f, &mv).expect("planned move applies");
        moves.push(mv);
    };

    // Boundary-twist every (1,1)^inf entry into Y copies.
    let (twisted_f, twist_log) = boundary_twist_11inf(&f);
    f = twisted_f;
    moves.extend(twist_log.moves);

    // Cancel <1,(1,1)>-class entries pairwise; the count is now even
    // because the parity is 0 and no (1,1)^inf entries remain.
    let (arf_f, arf_log) = cancel_arf_pairs(&f)?;
    f = arf_f;
    moves.extend(arf_log.moves);

    // Cancel oppositely-oriented pairs among in-range β-bad framed entries.
    loop {
        let mut by_key: BTreeMap<String, (Vec<usize>, Vec<usize>)> = BTreeMap::new();
        for (i, e) in f.entries.iter().enumerate() {
            let ForestEntry::Framed { tree, sign } = e else {
                continue;
            };
            if tree.order() > target || !e.is_beta_bad()? {
                continue;
            }
            let sc = crate::ihx::canonical_signed(tree);
            let eff = sign.to_i64() * sc.sign;
            let slot = by_key.entry(sc.key.as_str().to_string()).or_default();
            if eff > 0 {
                slot.0.push(i);
            } else {
                slot.1.push(i);
            }
        }
        let pair = by_key
            .into_values()
            .find(|(p, m)| !p.is_empty() && !m.is_empty());
        let Some((plus, minus)) = pair else { break };
        let mv = Move {
            rule: MoveRule::CancelOppositePair,
            consumed: vec![f.entries[plus[0]].clone(), f.entries[minus[0]].clone()],
            produced: vec![],
            frontier: None,
        };
        push(&mut f, &mut moves, mv);
    }

    // Exchange every remaining in-range two-two caterpillar.
    loop {
        let hit = f.entries.iter().position(|e| {
            matches!(e, ForestEntry::Framed { tree, .. }
                if (1..=target).contains(&tree.order())
                    && make_t(tree.order()).map(|t| t.canonical() == tree.canonical()).unwrap_or(false))
        });
        let Some(i) = hit else { break };
        let mv = plan_t_exchange(&f, i, options.convention)?;
        push(&mut f, &mut moves, mv);
    }

    // Per-entry relation reduction for what is left in range.
    let mut lattices: BTreeMap<Vec<crate::tree::Label>, RelationLattice> = BTreeMap::new();
    loop {
        let mut planned: Option<Move> = None;
        for e in &f.entries {
            let bad = e.is_beta_bad()?;
            match e {
                ForestEntry::Framed { tree, .. } if bad && tree.order() <= target => {
                    let order = tree.order();
                    if order <= options.ihx_bound {
                        let labels = tree.label_multiset();
                        if !lattices.contains_key(&labels) {
                            let l = RelationLattice::with_order_bound(&labels, options.ihx_bound)?;
                            lattices.insert(labels.clone(), l);
                        }
                        let lat = &lattices[&labels];
                        if lat.is_zero(&TreeVector::from_tree(tree, 1))? {
                            planned = Some(Move {
                                rule: MoveRule::IhxElimination,
                                consumed: vec![e.clone()],
                                produced: vec![],
                                frontier: None,
                            });
                            break;
                        }
                    }
                    if options.assume_eliminable {
                        planned = Some(Move {
                            rule: MoveRule::AssumedElimination,
                            consumed: vec![e.clone()],
                            produced: vec![],
                            frontier: None,
                        });
                        break;
                    }
                    let detail = if order > options.ihx_bound {
                        format!("order exceeds the reduction bound {}", options.ihx_bound)
                    } else {
                        "class is nonzero modulo the tree relations".to_string()
                    };
                    return Err(NormalizeError::NotEliminable {
                        entry: e.to_string(),
                        order,
                        detail,
                    });
                }
                ForestEntry::Twisted { tree, .. } if bad && tree.order() <= k => {
                    if options.assume_eliminable {
                        planned = Some(Move {
                            rule: MoveRule::AssumedElimination,
                            consumed: vec![e.clone()],
                            produced: vec![],
                            frontier: None,
                        });
                        break;
                    }
                    return Err(NormalizeError::NotEliminable {
                        entry: e.to_string(),
                        order: tree.order(),
                        detail: "no elimination rule applies to twisted trees without 2-labels"
                            .to_string(),
                    });
                }
                _ => {}
            }
        }
        let Some(mv) = planned else { break };
        push(&mut f, &mut moves, mv);
    }

    // Absorb the junk created by the moves above.
    if !moves.is_empty() {
        let lowered = f.frontier.min_with(Frontier::Finite(target + 1));
        if lowered != f.frontier {
            let mv = Move {
                rule: MoveRule::FrontierAbsorb,
                consumed: vec![],
                produced: vec![],
                frontier: Some(lowered),
            };
            push(&mut f, &mut moves, mv);
        }
    }

    let log = MoveLog { moves };
    debug_assert_eq!(replay(input, &log).expect("planned log replays"), f);
    debug_assert!(f
        .cochran_order()
        .expect("moves only create 1/2-labeled entries")
        .at_least(i64::from(target)));
    Ok((f, log))
}
