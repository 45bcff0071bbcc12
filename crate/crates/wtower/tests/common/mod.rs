//! Shared brute-force oracles for the integration suites: an independent
//! tree-isomorphism decision procedure (leaf-distance matching), exhaustive
//! spelling enumeration, and random generation / re-spelling of trees.
//!
//! Nothing here consults the library's canonicalization; that independence
//! is the point.
#![allow(dead_code)]

use rand::Rng;
use wtower::clasper::{classify, SurgeryClass};
use wtower::forest::ForestEntry;
use wtower::tree::{make_t_inf, FramedTree, RootedTree, TwistedTree};
use wtower::Sign;

/// Reserved pseudo-label for the twist vertex in oracle graphs. Real labels
/// are always >= 1.
pub const TWIST_MARK: u32 = 0;

/// Plain adjacency-list tree with labels on leaves only.
pub struct LeafGraph {
    pub adj: Vec<Vec<usize>>,
    pub labels: Vec<Option<u32>>,
}

impl LeafGraph {
    fn new() -> LeafGraph {
        LeafGraph {
            adj: Vec::new(),
            labels: Vec::new(),
        }
    }

    fn push_node(&mut self, label: Option<u32>) -> usize {
        self.adj.push(Vec::new());
        self.labels.push(label);
        self.adj.len() - 1
    }

    fn connect(&mut self, a: usize, b: usize) {
        self.adj[a].push(b);
        self.adj[b].push(a);
    }

    pub fn leaves(&self) -> Vec<(usize, u32)> {
        self.labels
            .iter()
            .enumerate()
            .filter_map(|(v, l)| l.map(|l| (v, l)))
            .collect()
    }

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

    fn bfs_dist(&self, from: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.adj.len()];
        let mut queue = std::collections::VecDeque::from([from]);
        dist[from] = 0;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

fn add_rooted(t: &RootedTree, g: &mut LeafGraph) -> usize {
    match t {
        RootedTree::Leaf(l) => g.push_node(Some(*l)),
        RootedTree::Pair(a, b) => {
            let v = g.push_node(None);
            let x = add_rooted(a, g);
            let y = add_rooted(b, g);
            g.connect(v, x);
            g.connect(v, y);
            v
        }
    }
}

pub fn framed_graph(t: &FramedTree) -> LeafGraph {
    let mut g = LeafGraph::new();
    let a = add_rooted(&t.left, &mut g);
    let b = add_rooted(&t.right, &mut g);
    g.connect(a, b);
    g
}

pub fn twisted_graph(t: &TwistedTree) -> LeafGraph {
    let mut g = LeafGraph::new();
    let r = add_rooted(&t.body, &mut g);
    let z = g.push_node(Some(TWIST_MARK));
    g.connect(r, z);
    g
}

/// Pairwise distances between the leaves of `g`, in `g.leaves()` order.
fn leaf_distance_matrix(g: &LeafGraph) -> Vec<Vec<usize>> {
    let leaves = g.leaves();
    leaves
        .iter()
        .map(|&(v, _)| {
            let d = g.bfs_dist(v);
            leaves.iter().map(|&(w, _)| d[w]).collect()
        })
        .collect()
}

/// Decides isomorphism of two leaf-labeled trees by searching for a
/// label-preserving leaf bijection matching all pairwise leaf distances.
/// Sound and complete for trees without degree-2 vertices, which is every
/// graph produced by [`framed_graph`] / [`twisted_graph`].
pub fn leaf_iso(a: &LeafGraph, b: &LeafGraph) -> bool {
    let la = a.leaves();
    let lb = b.leaves();
    if la.len() != lb.len() {
        return false;
    }
    let mut ma: Vec<u32> = la.iter().map(|&(_, l)| l).collect();
    let mut mb: Vec<u32> = lb.iter().map(|&(_, l)| l).collect();
    ma.sort_unstable();
    mb.sort_unstable();
    if ma != mb {
        return false;
    }
    let da = leaf_distance_matrix(a);
    let db = leaf_distance_matrix(b);
    let n = la.len();
    let mut assigned: Vec<Option<usize>> = vec![None; n];
    let mut used = vec![false; n];
    fn search(
        i: usize,
        n: usize,
        la: &[(usize, u32)],
        lb: &[(usize, u32)],
        da: &[Vec<usize>],
        db: &[Vec<usize>],
        assigned: &mut Vec<Option<usize>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || la[i].1 != lb[j].1 {
                continue;
            }
            let ok = (0..i).all(|p| {
                let q = assigned[p].unwrap();
                da[i][p] == db[j][q]
            });
            if ok {
                assigned[i] = Some(j);
                used[j] = true;
                if search(i + 1, n, la, lb, da, db, assigned, used) {
                    return true;
                }
                assigned[i] = None;
                used[j] = false;
            }
        }
        false
    }
    search(0, n, &la, &lb, &da, &db, &mut assigned, &mut used)
}

pub fn iso_framed(a: &FramedTree, b: &FramedTree) -> bool {
    leaf_iso(&framed_graph(a), &framed_graph(b))
}

pub fn iso_twisted(a: &TwistedTree, b: &TwistedTree) -> bool {
    leaf_iso(&twisted_graph(a), &twisted_graph(b))
}

/// Isomorphism-invariant fingerprint used only to pre-bucket candidates
/// before running the (slower) full matching search: the sorted multiset of
/// (label, label, distance) triples over leaf pairs.
pub fn fingerprint(g: &LeafGraph) -> Vec<(u32, u32, usize)> {
    let leaves = g.leaves();
    let d = leaf_distance_matrix(g);
    let mut out = Vec::new();
    for i in 0..leaves.len() {
        for j in i + 1..leaves.len() {
            let (x, y) = (leaves[i].1, leaves[j].1);
            out.push((x.min(y), x.max(y), d[i][j]));
        }
    }
    out.sort_unstable();
    out
}

/// Regrows the rooted tree hanging off `v` away from `from`, randomizing
/// the child order at every vertex.
fn grow(g: &LeafGraph, v: usize, from: usize, rng: &mut impl Rng) -> RootedTree {
    if let Some(l) = g.labels[v] {
        return RootedTree::leaf(l);
    }
    let mut kids: Vec<usize> = g.adj[v].iter().copied().filter(|&w| w != from).collect();
    assert_eq!(kids.len(), 2);
    if rng.gen() {
        kids.swap(0, 1);
    }
    RootedTree::pair(grow(g, kids[0], v, rng), grow(g, kids[1], v, rng))
}

/// A uniformly re-presented spelling of the same unrooted tree: random
/// splitting edge, random child orders on both sides.
pub fn respell_framed(t: &FramedTree, rng: &mut impl Rng) -> FramedTree {
    let g = framed_graph(t);
    let edges = g.edges();
    let (u, v) = edges[rng.gen_range(0..edges.len())];
    FramedTree::new(grow(&g, u, v, rng), grow(&g, v, u, rng))
}

/// Random child orders; the twist vertex stays the root.
pub fn respell_twisted(t: &TwistedTree, rng: &mut impl Rng) -> TwistedTree {
    let g = twisted_graph(t);
    let (z, _) = *g
        .leaves()
        .iter()
        .find(|&&(_, l)| l == TWIST_MARK)
        .expect("twisted graphs carry the mark");
    let r = g.adj[z][0];
    TwistedTree::new(grow(&g, r, z, rng))
}

pub fn random_rooted(rng: &mut impl Rng, leaves: usize, labels: &[u32]) -> RootedTree {
    assert!(leaves >= 1);
    if leaves == 1 {
        RootedTree::leaf(labels[rng.gen_range(0..labels.len())])
    } else {
        let s = rng.gen_range(1..leaves);
        RootedTree::pair(
            random_rooted(rng, s, labels),
            random_rooted(rng, leaves - s, labels),
        )
    }
}

pub fn random_framed(rng: &mut impl Rng, leaves: usize, labels: &[u32]) -> FramedTree {
    assert!(leaves >= 2);
    let s = rng.gen_range(1..leaves);
    FramedTree::new(
        random_rooted(rng, s, labels),
        random_rooted(rng, leaves - s, labels),
    )
}

pub fn random_twisted(rng: &mut impl Rng, body_leaves: usize, labels: &[u32]) -> TwistedTree {
    TwistedTree::new(random_rooted(rng, body_leaves, labels))
}

/// Every spelling (ordered shapes x labelings) of a bracketing with
/// `leaves` leaves over the given alphabet.
pub fn all_rooted(leaves: usize, labels: &[u32]) -> Vec<RootedTree> {
    if leaves == 1 {
        return labels.iter().map(|&l| RootedTree::leaf(l)).collect();
    }
    let mut out = Vec::new();
    for s in 1..leaves {
        for a in all_rooted(s, labels) {
            for b in all_rooted(leaves - s, labels) {
                out.push(RootedTree::pair(a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Every spelling of an unrooted tree with `leaves` leaves.
pub fn all_framed(leaves: usize, labels: &[u32]) -> Vec<FramedTree> {
    let mut out = Vec::new();
    for s in 1..leaves {
        for a in all_rooted(s, labels) {
            for b in all_rooted(leaves - s, labels) {
                out.push(FramedTree::new(a.clone(), b.clone()));
            }
        }
    }
    out
}

/// Every spelling of a twisted tree with `leaves` leaves counting the twist
/// vertex (so bodies have `leaves - 1`).
pub fn all_twisted(leaves: usize, labels: &[u32]) -> Vec<TwistedTree> {
    assert!(leaves >= 2);
    all_rooted(leaves - 1, labels)
        .into_iter()
        .map(TwistedTree::new)
        .collect()
}

pub fn nonzero(rng: &mut impl Rng, lo: i64, hi: i64) -> i64 {
    loop {
        let w = rng.gen_range(lo..=hi);
        if w != 0 {
            return w;
        }
    }
}

pub fn random_sign(rng: &mut impl Rng) -> Sign {
    if rng.gen() {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

/// A random twisted caterpillar entry, re-spelled.
pub fn random_tinf_entry(rng: &mut impl Rng, max_i: u32) -> ForestEntry {
    let i = rng.gen_range(1..=max_i);
    let t = respell_twisted(&make_t_inf(i).unwrap(), rng);
    ForestEntry::twisted(t, nonzero(rng, -3, 3))
}

/// A random framed entry in one of the invariance classes, of order >= 1.
pub fn random_framed_invariance(rng: &mut impl Rng) -> ForestEntry {
    for _ in 0..200 {
        let leaves = rng.gen_range(4..=7);
        let t = random_framed(rng, leaves, &[1, 2]);
        if matches!(
            classify(&ForestEntry::framed(t.clone(), Sign::Plus)),
            Ok(SurgeryClass::FramedTwoTwos { .. } | SurgeryClass::FramedManyTwos)
        ) {
            return ForestEntry::framed(t, random_sign(rng));
        }
    }
    ForestEntry::parse("+ <(2,2),(1,(1,1))>").unwrap()
}

/// A random twisted entry in one of the invariance classes.
pub fn random_twisted_invariance(rng: &mut impl Rng) -> ForestEntry {
    for _ in 0..200 {
        let leaves = rng.gen_range(1..=6);
        let t = random_twisted(rng, leaves, &[1, 2]);
        if matches!(
            classify(&ForestEntry::twisted(t.clone(), 1)),
            Ok(SurgeryClass::TwistedOneTwo | SurgeryClass::TwistedTwoTwos)
        ) {
            return ForestEntry::twisted(t, nonzero(rng, -3, 3));
        }
    }
    ForestEntry::parse("w=2 (1,(2,2))^inf").unwrap()
}

/// A random framed β-bad tree of exactly the given order: either all 1s or
/// a single 2 hanging off a random all-1 bracketing.
pub fn random_bad_framed(rng: &mut impl Rng, order: u32) -> FramedTree {
    let leaves = order as usize + 2;
    if rng.gen() {
        random_framed(rng, leaves, &[1])
    } else {
        FramedTree::new(RootedTree::leaf(2), random_rooted(rng, leaves - 1, &[1]))
    }
}

/// A random forest the normalizer can clean to order `2 * k0` without the
/// assume-eliminable escape hatch: caterpillars in exchange range, clean
/// twisted entries, invariance-class entries, cancelling pairs, even
/// boundary twists, and relation-trivial singles.
pub fn random_eliminable_forest(rng: &mut impl Rng, k0: u32) -> wtower::forest::IntersectionForest {
    use wtower::forest::{Frontier, IntersectionForest};
    use wtower::tree::make_t;

    let target = 2 * k0;
    let mut entries: Vec<ForestEntry> = Vec::new();
    for _ in 0..rng.gen_range(1..=6) {
        match rng.gen_range(0..8) {
            0 | 1 | 2 => entries.push(random_tinf_entry(rng, k0 + 2)),
            3 | 4 => {
                let n = rng.gen_range(1..=target);
                let t = respell_framed(&make_t(n).unwrap(), rng);
                entries.push(ForestEntry::framed(t, random_sign(rng)));
            }
            5 => entries.push(random_framed_invariance(rng)),
            6 => entries.push(random_twisted_invariance(rng)),
            _ => match rng.gen_range(0..3) {
                0 => {
                    let order = rng.gen_range(1..=target);
                    let t = random_bad_framed(rng, order);
                    entries.push(ForestEntry::framed(t.clone(), Sign::Plus));
                    entries.push(ForestEntry::framed(t, Sign::Minus));
                }
                1 => entries.push(ForestEntry::twisted(
                    TwistedTree::new(RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1))),
                    2 * nonzero(rng, -2, 2),
                )),
                _ => entries.push(ForestEntry::framed(
                    FramedTree::new(
                        RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1)),
                        RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1)),
                    ),
                    random_sign(rng),
                )),
            },
        }
    }
    let frontier = if rng.gen() {
        Frontier::Infinite
    } else {
        Frontier::Finite(target + rng.gen_range(0..=4))
    };
    IntersectionForest::new(entries, frontier)
}
