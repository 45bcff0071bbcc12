//! Signed canonical forms of framed trees and integer reduction modulo the
//! local relations (antisymmetry of vertex orientations and the three-term
//! exchange relation at internal edges).
//!
//! A presentation carries an orientation: the cyclic order of branches at
//! each trivalent vertex, as written. [`canonical_signed`] reduces a
//! presentation to its canonical spelling while tracking the parity of
//! branch swaps, and detects trees that admit an orientation-reversing
//! automorphism (whose classes are therefore 2-torsion). [`RelationLattice`]
//! row-reduces the relators over a fixed leaf-label multiset so that
//! [`TreeVector`]s can be put into a canonical residue form; two integer
//! combinations of trees are equal modulo the relations iff their residues
//! coincide.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::tree::{parse_tree, CanonicalKey, FramedTree, Label, RootedTree, Tree, TreeError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LatticeError {
    #[error("a framed tree needs at least two leaf labels, got {got}")]
    TooFewLabels { got: usize },
    #[error("order {order} exceeds the reduction bound {bound}")]
    OrderTooLarge { order: u32, bound: u32 },
    #[error("label multiset mismatch: lattice is over {expected:?}, vector over {got:?}")]
    MixedSupport {
        expected: Vec<Label>,
        got: Vec<Label>,
    },
    #[error("'{key}' is not a canonical framed-tree key: {msg}")]
    InvalidKey { key: String, msg: String },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// Result of signing a presentation: the canonical key, the orientation sign
/// relating the presentation to the canonically spelled one, and whether the
/// tree admits an orientation-reversing automorphism. For a symmetric tree
/// the sign is normalized to `+1` (the class equals its own negative).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedClass {
    pub key: CanonicalKey,
    pub sign: i64,
    pub symmetric: bool,
}

/// Canonical key plus orientation sign of a framed-tree presentation.
///
/// The sign is the swap parity accumulated while sorting every vertex's two
/// branches into canonical order, minimized over root-edge choices; the
/// half-exchange across the root edge moves no vertex ordering and carries
/// no sign. A tree is reported `symmetric` when some vertex has two
/// isomorphic branches (the swap there is an odd automorphism) or when two
/// root edges reach the canonical spelling with opposite parities (their
/// composite is then an odd automorphism).
pub fn canonical_signed(tree: &FramedTree) -> SignedClass {
    let g = crate::tree::TreeGraph::build(tree);
    let key = tree.canonical();
    let mut symmetric = false;
    let mut min_sign: Option<i64> = None;
    for (u, v) in g.edges() {
        let (ea, sa, ma) = signed_enc(&g, u, v);
        let (eb, sb, mb) = signed_enc(&g, v, u);
        symmetric |= ma || mb;
        let (x, y) = if ea <= eb { (ea, eb) } else { (eb, ea) };
        if format!("<{x},{y}>") == key.as_str() {
            let s = sa * sb;
            match min_sign {
                None => min_sign = Some(s),
                Some(prev) if prev != s => symmetric = true,
                Some(_) => {}
            }
        }
    }
    let sign = if symmetric {
        1
    } else {
        min_sign.expect("the canonical key is attained by some edge")
    };
    SignedClass {
        key,
        sign,
        symmetric,
    }
}

/// Children-sorted encoding of the branch at `v` away from `from`, with the
/// swap parity of the sort and a flag for a pair of equal child encodings.
fn signed_enc(g: &crate::tree::TreeGraph, v: usize, from: usize) -> (String, i64, bool) {
    match g.label[v] {
        Some(l) => (l.to_string(), 1, false),
        None => {
            let (c1, c2) = g.children(v, from);
            let (e1, s1, m1) = signed_enc(g, c1, v);
            let (e2, s2, m2) = signed_enc(g, c2, v);
            if e1 == e2 {
                (format!("({e1},{e2})"), 1, true)
            } else if e1 < e2 {
                (format!("({e1},{e2})"), s1 * s2, m1 || m2)
            } else {
                (format!("({e2},{e1})"), -s1 * s2, m1 || m2)
            }
        }
    }
}

/// An integer combination of framed-tree classes over one label multiset.
/// Keys are canonical spellings; zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeVector {
    labels: Vec<Label>,
    coeffs: BTreeMap<CanonicalKey, i64>,
}

impl TreeVector {
    pub fn zero(labels: &[Label]) -> Result<TreeVector, LatticeError> {
        if labels.len() < 2 {
            return Err(LatticeError::TooFewLabels { got: labels.len() });
        }
        for &l in labels {
            if l == 0 {
                return Err(LatticeError::Tree(TreeError::LabelOutOfRange { label: 0 }));
            }
        }
        let mut labels = labels.to_vec();
        labels.sort_unstable();
        Ok(TreeVector {
            labels,
            coeffs: BTreeMap::new(),
        })
    }

    /// `coeff` times the signed class of `tree`.
    pub fn from_tree(tree: &FramedTree, coeff: i64) -> TreeVector {
        let mut v = TreeVector::zero(&tree.label_multiset()).expect("trees have valid labels");
        v.add_tree(tree, coeff)
            .expect("labels match by construction");
        v
    }

    /// Adds `coeff` times the signed class of `tree`.
    pub fn add_tree(&mut self, tree: &FramedTree, coeff: i64) -> Result<(), LatticeError> {
        if tree.label_multiset() != self.labels {
            return Err(LatticeError::MixedSupport {
                expected: self.labels.clone(),
                got: tree.label_multiset(),
            });
        }
        let sc = canonical_signed(tree);
        self.add_key(sc.key, coeff * sc.sign);
        Ok(())
    }

    /// Builds a vector from explicit `(canonical key, coefficient)` pairs,
    /// validating that every key is a canonical framed spelling over the
    /// stated label multiset.
    pub fn from_raw<I>(labels: &[Label], terms: I) -> Result<TreeVector, LatticeError>
    where
        I: IntoIterator<Item = (String, i64)>,
    {
        let mut v = TreeVector::zero(labels)?;
        for (key, coeff) in terms {
            let tree = match parse_tree(&key) {
                Ok(Tree::Framed(t)) => t,
                Ok(_) => {
                    return Err(LatticeError::InvalidKey {
                        key,
                        msg: "not a framed tree".into(),
                    })
                }
                Err(e) => {
                    return Err(LatticeError::InvalidKey {
                        key,
                        msg: e.to_string(),
                    })
                }
            };
            if tree.canonical().as_str() != key {
                return Err(LatticeError::InvalidKey {
                    msg: format!(
                        "not canonically spelled (canonical is '{}')",
                        tree.canonical()
                    ),
                    key,
                });
            }
            if tree.label_multiset() != v.labels {
                return Err(LatticeError::MixedSupport {
                    expected: v.labels.clone(),
                    got: tree.label_multiset(),
                });
            }
            v.add_key(tree.canonical(), coeff);
        }
        Ok(v)
    }

    fn add_key(&mut self, key: CanonicalKey, coeff: i64) {
        let entry = self.coeffs.entry(key.clone()).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn order(&self) -> u32 {
        self.labels.len() as u32 - 2
    }

    pub fn coeff(&self, key: &CanonicalKey) -> i64 {
        self.coeffs.get(key).copied().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalKey, i64)> {
        self.coeffs.iter().map(|(k, &c)| (k, c))
    }

    pub fn is_zero_vector(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add(&self, other: &TreeVector) -> Result<TreeVector, LatticeError> {
        if self.labels != other.labels {
            return Err(LatticeError::MixedSupport {
                expected: self.labels.clone(),
                got: other.labels.clone(),
            });
        }
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.add_key(k.clone(), c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: i64) -> TreeVector {
        let mut out = TreeVector {
            labels: self.labels.clone(),
            coeffs: BTreeMap::new(),
        };
        if c != 0 {
            for (k, x) in self.terms() {
                out.coeffs.insert(k.clone(), c * x);
            }
        }
        out
    }
}

impl fmt::Display for TreeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.coeffs.iter().enumerate() {
            if i == 0 {
                if *c < 0 {
                    f.write_str("-")?;
                }
            } else if *c < 0 {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let a = c.unsigned_abs();
            if a != 1 {
                write!(f, "{a}*")?;
            }
            write!(f, "{k}")?;
        }
        Ok(())
    }
}

/// The three-term relators of `tree`, one per internal edge.
///
/// Presenting the tree at an internal edge as `<(A,B),(C,D)>`, the relator
/// is `<(A,B),(C,D)> - <(A,C),(B,D)> + <(A,D),(B,C)>`, each term taken as a
/// signed class. Trees of order < 2 have no internal edges and no relators.
pub fn ihx_relators(tree: &FramedTree) -> Vec<TreeVector> {
    let g = crate::tree::TreeGraph::build(tree);
    let mut out = Vec::new();
    for (u, v) in g.edges() {
        if g.label[u].is_some() || g.label[v].is_some() {
            continue;
        }
        let (na, nb) = g.children(u, v);
        let (nc, nd) = g.children(v, u);
        let a = g.subtree(na, u);
        let b = g.subtree(nb, u);
        let c = g.subtree(nc, v);
        let d = g.subtree(nd, v);
        let i_term = FramedTree::new(
            RootedTree::pair(a.clone(), b.clone()),
            RootedTree::pair(c.clone(), d.clone()),
        );
        let h_term = FramedTree::new(
            RootedTree::pair(a.clone(), c.clone()),
            RootedTree::pair(b.clone(), d.clone()),
        );
        let x_term = FramedTree::new(RootedTree::pair(a, d), RootedTree::pair(b, c));
        let mut r = TreeVector::from_tree(&i_term, 1);
        r.add_tree(&h_term, -1).expect("same leaves");
        r.add_tree(&x_term, 1).expect("same leaves");
        out.push(r);
    }
    out
}

/// All framed trees over the given leaf label multiset, one canonical
/// presentation per isomorphism class, sorted by canonical key.
pub fn enumerate_framed(labels: &[Label]) -> Result<Vec<FramedTree>, LatticeError> {
    if labels.len() < 2 {
        return Err(LatticeError::TooFewLabels { got: labels.len() });
    }
    for &l in labels {
        if l == 0 {
            return Err(LatticeError::Tree(TreeError::LabelOutOfRange { label: 0 }));
        }
    }
    let mut sorted = labels.to_vec();
    sorted.sort_unstable();
    let mut seen: BTreeMap<CanonicalKey, ()> = BTreeMap::new();
    for (left, right) in splits(&sorted) {
        for a in rooted_over(&left) {
            for b in rooted_over(&right) {
                seen.entry(FramedTree::new(a.clone(), b.clone()).canonical())
                    .or_insert(());
            }
        }
    }
    Ok(seen
        .into_keys()
        .map(|k| match parse_tree(k.as_str()) {
            Ok(Tree::Framed(t)) => t,
            _ => unreachable!("canonical keys parse back to framed trees"),
        })
        .collect())
}

/// Distinct splits of a sorted multiset into two nonempty halves (each
/// unordered pair of halves appears in both orders; dedup happens on keys).
fn splits(sorted: &[Label]) -> Vec<(Vec<Label>, Vec<Label>)> {
    let mut groups: Vec<(Label, usize)> = Vec::new();
    for &l in sorted {
        match groups.last_mut() {
            Some((v, c)) if *v == l => *c += 1,
            _ => groups.push((l, 1)),
        }
    }
    let mut out = Vec::new();
    let mut take = vec![0usize; groups.len()];
    loop {
        let total: usize = take.iter().sum();
        if total > 0 && total < sorted.len() {
            let mut left = Vec::new();
            let mut right = Vec::new();
            for (i, &(v, c)) in groups.iter().enumerate() {
                left.extend(std::iter::repeat(v).take(take[i]));
                right.extend(std::iter::repeat(v).take(c - take[i]));
            }
            out.push((left, right));
        }
        // Odometer step over 0..=c per group.
        let mut i = 0;
        loop {
            if i == groups.len() {
                return out;
            }
            if take[i] < groups[i].1 {
                take[i] += 1;
                break;
            }
            take[i] = 0;
            i += 1;
        }
    }
}

/// Rooted bracketings over a sorted multiset, one per rooted isomorphism
/// class, in canonical child order.
fn rooted_over(sorted: &[Label]) -> Vec<RootedTree> {
    if sorted.len() == 1 {
        return vec![RootedTree::leaf(sorted[0])];
    }
    let mut seen: BTreeMap<String, RootedTree> = BTreeMap::new();
    for (left, right) in splits(sorted) {
        for a in rooted_over(&left) {
            for b in rooted_over(&right) {
                let t = RootedTree::pair(a.clone(), b.clone());
                seen.entry(t.canonical_spelling()).or_insert(t);
            }
        }
    }
    seen.into_values().collect()
}

pub const DEFAULT_ORDER_BOUND: u32 = 4;

/// Row-reduced relator lattice over one leaf-label multiset: the integer
/// span of all three-term relators together with `2 T` for every symmetric
/// tree `T`. Provides a canonical residue for [`TreeVector`]s.
#[derive(Debug)]
pub struct RelationLattice {
    labels: Vec<Label>,
    basis: Vec<FramedTree>,
    keys: Vec<CanonicalKey>,
    index: BTreeMap<CanonicalKey, usize>,
    pivots: BTreeMap<usize, Vec<i64>>,
    symmetric: BTreeSet<usize>,
}

impl RelationLattice {
    /// Builds the lattice with the default order bound.
    pub fn new(labels: &[Label]) -> Result<RelationLattice, LatticeError> {
        RelationLattice::with_order_bound(labels, DEFAULT_ORDER_BOUND)
    }

    /// Builds the lattice, refusing orders above `bound` (basis size and
    /// relator count grow rapidly with the order).
    pub fn with_order_bound(labels: &[Label], bound: u32) -> Result<RelationLattice, LatticeError> {
        if labels.len() < 2 {
            return Err(LatticeError::TooFewLabels { got: labels.len() });
        }
        let order = labels.len() as u32 - 2;
        if order > bound {
            return Err(LatticeError::OrderTooLarge { order, bound });
        }
        let basis = enumerate_framed(labels)?;
        let keys: Vec<CanonicalKey> = basis.iter().map(FramedTree::canonical).collect();
        let index: BTreeMap<CanonicalKey, usize> = keys
            .iter()
            .enumerate()
            .map(|(i, k)| (k.clone(), i))
            .collect();
        let n = basis.len();
        let mut labels_sorted = labels.to_vec();
        labels_sorted.sort_unstable();

        let mut pivots: BTreeMap<usize, Vec<i64>> = BTreeMap::new();
        let mut symmetric = BTreeSet::new();
        for (i, t) in basis.iter().enumerate() {
            if canonical_signed(t).symmetric {
                symmetric.insert(i);
                let mut row = vec![0i64; n];
                row[i] = 2;
                insert_row(&mut pivots, row);
            }
            for r in ihx_relators(t) {
                let mut row = vec![0i64; n];
                for (k, c) in r.terms() {
                    row[*index.get(k).expect("relator terms stay in the basis")] = c;
                }
                insert_row(&mut pivots, row);
            }
        }
        hnf_cleanup(&mut pivots);

        Ok(RelationLattice {
            labels: labels_sorted,
            basis,
            keys,
            index,
            pivots,
            symmetric,
        })
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    /// Canonical presentations of the isomorphism classes, key-sorted.
    pub fn basis(&self) -> &[FramedTree] {
        &self.basis
    }

    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }

    /// Basis positions of the trees with an orientation-reversing
    /// automorphism.
    pub fn symmetric_positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.symmetric.iter().copied()
    }

    /// Number of independent relator rows.
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Canonical residue of `v` modulo the relator lattice: coefficients at
    /// pivot positions are floor-reduced into `[0, pivot)`. Two vectors are
    /// congruent iff their residues are equal; the residue of a relator
    /// combination is zero.
    pub fn reduce(&self, v: &TreeVector) -> Result<TreeVector, LatticeError> {
        if v.labels() != self.labels {
            return Err(LatticeError::MixedSupport {
                expected: self.labels.clone(),
                got: v.labels().to_vec(),
            });
        }
        let mut dense = vec![0i64; self.basis.len()];
        for (k, c) in v.terms() {
            match self.index.get(k) {
                Some(&i) => dense[i] = c,
                None => {
                    return Err(LatticeError::InvalidKey {
                        key: k.as_str().to_string(),
                        msg: "key is not in the enumerated basis".into(),
                    })
                }
            }
        }
        for (&j, p) in &self.pivots {
            let q = dense[j].div_euclid(p[j]);
            if q != 0 {
                for (x, y) in dense.iter_mut().zip(p) {
                    *x -= q * y;
                }
            }
        }
        let mut out = TreeVector::zero(&self.labels)?;
        for (i, &c) in dense.iter().enumerate() {
            if c != 0 {
                out.add_key(self.keys[i].clone(), c);
            }
        }
        Ok(out)
    }

    /// Whether `v` lies in the relator lattice (is zero in the quotient).
    pub fn is_zero(&self, v: &TreeVector) -> Result<bool, LatticeError> {
        Ok(self.reduce(v)?.is_zero_vector())
    }
}

/// `(g, x, y)` with `x*a + y*b = g = gcd(a, b) > 0` (for `(a, b) != (0, 0)`).
fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let r = a.rem_euclid(b.abs());
        let q = (a - r) / b;
        let (g, x, y) = ext_gcd(b, r);
        (g, y, x - q * y)
    }
}

/// Integer row-echelon insertion: combines `r` into the pivot set, keeping
/// each pivot's leading entry positive and the set in echelon form.
fn insert_row(pivots: &mut BTreeMap<usize, Vec<i64>>, mut r: Vec<i64>) {
    loop {
        let j = match r.iter().position(|&x| x != 0) {
            None => return,
            Some(j) => j,
        };
        match pivots.get(&j).cloned() {
            None => {
                if r[j] < 0 {
                    for x in &mut r {
                        *x = -*x;
                    }
                }
                pivots.insert(j, r);
                return;
            }
            Some(p) => {
                let (g, x, y) = ext_gcd(p[j], r[j]);
                let combined: Vec<i64> =
                    p.iter().zip(&r).map(|(&pv, &rv)| x * pv + y * rv).collect();
                let (pj, rj) = (p[j] / g, r[j] / g);
                let reduced: Vec<i64> = p
                    .iter()
                    .zip(&r)
                    .map(|(&pv, &rv)| pj * rv - rj * pv)
                    .collect();
                debug_assert_eq!(combined[j], g);
                debug_assert_eq!(reduced[j], 0);
                pivots.insert(j, combined);
                r = reduced;
            }
        }
    }
}

/// Reduces every entry above each pivot into `[0, pivot)`, making the row
/// set the unique normal form of the lattice it spans.
fn hnf_cleanup(pivots: &mut BTreeMap<usize, Vec<i64>>) {
    let cols: Vec<usize> = pivots.keys().copied().collect();
    for &j in &cols {
        let pivot_row = pivots[&j].clone();
        for &i in &cols {
            if i >= j {
                break;
            }
            let row = pivots.get_mut(&i).expect("column is present");
            let q = row[j].div_euclid(pivot_row[j]);
            if q != 0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    *x -= q * y;
                }
            }
        }
    }
}
