//! Effect oracle for tree surgeries: classifies a signed framed tree or a
//! twist-weighted twisted tree over labels {1, 2} and predicts how the β
//! invariants of the underlying two-component link respond to the
//! corresponding surgery.
//!
//! An [`EffectReport`] separates three regimes: determinate shifts
//! (`delta`), orders from which the response is unpredictable
//! (`indeterminate_from`), and surgeries that change the linking number and
//! make β undefined altogether (`undefined`). [`aggregate`] combines a
//! sequence of surgeries, summing determinate shifts and propagating the
//! earliest indeterminacy.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::forest::ForestEntry;
use crate::normalize::TwistConvention;
use crate::tree::{make_t, make_t_inf, FramedTree, RootedTree, TreeError};

/// A surgery is described by the same data as a forest entry: the tree type
/// with a sign (framed) or twisting number (twisted).
pub type ClasperSurgery = ForestEntry;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClasperError {
    #[error("max order must be at least 1, got {got}")]
    InvalidMaxOrder { got: u32 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Exhaustive classification of a surgery over labels {1, 2}.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SurgeryClass {
    /// Framed `<1,2>`: changes the linking number.
    LinkingChanger,
    /// Twisted caterpillar `t_i^inf`: shifts `beta^i` by the twisting,
    /// exactly, at every order.
    TInf { i: u32 },
    /// Framed two-two caterpillar `t_n`.
    Tn { n: u32 },
    /// Framed, exactly two 2-labels, `ones` 1-labels, not a caterpillar.
    FramedTwoTwos { ones: u32 },
    /// Framed with at least three 2-labels.
    FramedManyTwos,
    /// Twisted with exactly one 2-label, not a `t_i^inf`.
    TwistedOneTwo,
    /// Twisted with at least two 2-labels.
    TwistedTwoTwos,
    /// Remaining β-bad types: framed with at most one 2-label (other than
    /// `<1,2>`), or twisted with none.
    BetaBadOther,
}

/// Predicted response of the β invariants to one or more surgeries.
///
/// `delta` holds determinate shifts; its keys are always smaller than
/// `indeterminate_from` when that is set. `undefined` marks a broken
/// linking number, under which β is not defined at all.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EffectReport {
    pub delta: BTreeMap<u32, i64>,
    pub indeterminate_from: Option<u32>,
    pub undefined: bool,
}

impl EffectReport {
    fn clean(delta: BTreeMap<u32, i64>) -> EffectReport {
        EffectReport {
            delta,
            indeterminate_from: None,
            undefined: false,
        }
    }

    fn indeterminate(from: u32) -> EffectReport {
        EffectReport {
            delta: BTreeMap::new(),
            indeterminate_from: Some(from),
            undefined: false,
        }
    }

    /// Drops delta keys at or above the indeterminacy bound, restoring the
    /// type invariant after merges.
    fn enforce_invariant(mut self) -> EffectReport {
        if let Some(b) = self.indeterminate_from {
            self.delta.retain(|&i, _| i < b);
        }
        self
    }
}

/// Classifies one surgery. Errors when a label outside {1, 2} appears.
pub fn classify(s: &ClasperSurgery) -> Result<SurgeryClass, ClasperError> {
    // Validates the label alphabet as a side effect.
    s.is_beta_bad()?;
    Ok(match s {
        ForestEntry::Framed { tree, .. } => {
            let twos = tree.label_count(2) as u32;
            let lk = FramedTree::new(RootedTree::leaf(1), RootedTree::leaf(2)).canonical();
            if tree.canonical() == lk {
                SurgeryClass::LinkingChanger
            } else if twos >= 3 {
                SurgeryClass::FramedManyTwos
            } else if twos == 2 {
                let n = tree.order();
                if n >= 1 && tree.canonical() == make_t(n)?.canonical() {
                    SurgeryClass::Tn { n }
                } else {
                    SurgeryClass::FramedTwoTwos {
                        ones: tree.label_count(1) as u32,
                    }
                }
            } else {
                SurgeryClass::BetaBadOther
            }
        }
        ForestEntry::Twisted { tree, .. } => {
            let twos = tree.label_count(2) as u32;
            if twos == 0 {
                SurgeryClass::BetaBadOther
            } else if twos >= 2 {
                SurgeryClass::TwistedTwoTwos
            } else {
                let i = tree.order();
                if i >= 1 && tree.canonical() == make_t_inf(i)?.canonical() {
                    SurgeryClass::TInf { i }
                } else {
                    SurgeryClass::TwistedOneTwo
                }
            }
        }
    })
}

/// Predicted β response of a single surgery, for invariants up to
/// `max_order`, under the standard twist convention.
pub fn effect(s: &ClasperSurgery, max_order: u32) -> Result<EffectReport, ClasperError> {
    effect_with(s, max_order, TwistConvention::Standard)
}

/// [`effect`] under an explicit twist convention (kept in lockstep with the
/// normalization convention so the two predictions agree).
pub fn effect_with(
    s: &ClasperSurgery,
    max_order: u32,
    convention: TwistConvention,
) -> Result<EffectReport, ClasperError> {
    if max_order == 0 {
        return Err(ClasperError::InvalidMaxOrder { got: max_order });
    }
    let k = max_order;
    let convention_factor = match convention {
        TwistConvention::Standard => 1,
        TwistConvention::Negated => -1,
    };
    Ok(match classify(s)? {
        SurgeryClass::LinkingChanger => EffectReport {
            delta: BTreeMap::new(),
            indeterminate_from: None,
            undefined: true,
        },
        SurgeryClass::TInf { i } => {
            let omega = match s {
                ForestEntry::Twisted { omega, .. } => *omega,
                ForestEntry::Framed { .. } => unreachable!("TInf is a twisted class"),
            };
            let mut delta = BTreeMap::new();
            if i <= k {
                delta.insert(i, omega);
            }
            EffectReport::clean(delta)
        }
        SurgeryClass::FramedTwoTwos { .. }
        | SurgeryClass::FramedManyTwos
        | SurgeryClass::TwistedOneTwo
        | SurgeryClass::TwistedTwoTwos => EffectReport::clean(BTreeMap::new()),
        SurgeryClass::Tn { n } => {
            if n > 2 * k + 1 {
                EffectReport::indeterminate(k + 1)
            } else {
                let (tree, sign) = match s {
                    ForestEntry::Framed { tree, sign } => (tree, sign.to_i64()),
                    ForestEntry::Twisted { .. } => unreachable!("Tn is a framed class"),
                };
                // Same sign reading as the exchange move: written sign times
                // presentation orientation, anchored to the natural
                // caterpillar presentation.
                let orientation = crate::ihx::canonical_signed(tree).sign
                    * crate::ihx::canonical_signed(&make_t(n)?).sign;
                let j = n.div_ceil(2);
                let magnitude = if n % 2 == 1 { 1 } else { 2 };
                let mut delta = BTreeMap::new();
                if j <= k {
                    delta.insert(j, sign * orientation * magnitude * convention_factor);
                }
                EffectReport {
                    delta,
                    indeterminate_from: Some((j + 1).min(k + 1)),
                    undefined: false,
                }
                .enforce_invariant()
            }
        }
        SurgeryClass::BetaBadOther => match s {
            ForestEntry::Framed { tree, .. } => {
                let d = tree.order();
                if d > 2 * k + 1 {
                    EffectReport::indeterminate(k + 1)
                } else {
                    EffectReport::indeterminate(d.div_ceil(2).clamp(1, k + 1))
                }
            }
            ForestEntry::Twisted { tree, .. } => {
                if tree.order() > k {
                    EffectReport::indeterminate(k + 1)
                } else {
                    EffectReport::indeterminate(1)
                }
            }
        },
    })
}

/// Combined response of a surgery sequence: determinate shifts are summed
/// and reported for every order `1..=max_order` below the earliest
/// indeterminacy; `undefined` propagates from any member.
pub fn aggregate(
    sequence: &[ClasperSurgery],
    max_order: u32,
) -> Result<EffectReport, ClasperError> {
    aggregate_with(sequence, max_order, TwistConvention::Standard)
}

/// [`aggregate`] under an explicit twist convention.
pub fn aggregate_with(
    sequence: &[ClasperSurgery],
    max_order: u32,
    convention: TwistConvention,
) -> Result<EffectReport, ClasperError> {
    if max_order == 0 {
        return Err(ClasperError::InvalidMaxOrder { got: max_order });
    }
    let mut delta: BTreeMap<u32, i64> = (1..=max_order).map(|i| (i, 0)).collect();
    let mut bound: Option<u32> = None;
    let mut undefined = false;
    for s in sequence {
        let r = effect_with(s, max_order, convention)?;
        for (i, v) in r.delta {
            *delta.entry(i).or_insert(0) += v;
        }
        bound = match (bound, r.indeterminate_from) {
            (None, b) | (b, None) => b,
            (Some(a), Some(b)) => Some(a.min(b)),
        };
        undefined |= r.undefined;
    }
    Ok(EffectReport {
        delta,
        indeterminate_from: bound,
        undefined,
    }
    .enforce_invariant())
}
