//! End-to-end acceptance checks. Each criterion runs at full stated volume
//! and reports one pass/fail line; the suite fails if any criterion does.

mod common;

use std::collections::{BTreeMap, HashMap};
use std::time::Instant;

use num::{BigInt, BigRational, One};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wtower::clasper::aggregate;
use wtower::eta::{beta_series, example_lk, lambda};
use wtower::forest::{
    infmany_forest, parse_forest, ForestEntry, Frontier, IntersectionForest, TowerOrder,
};
use wtower::ihx::{ihx_relators, RelationLattice, TreeVector};
use wtower::laurent::LaurentPoly;
use wtower::normalize::{normalize, NormalizeOptions};
use wtower::tree::{make_t, FramedTree, RootedTree};

fn criterion_1_beta_series_table() -> Result<(), String> {
    let started = Instant::now();
    let table: [(i64, &[i64]); 6] = [
        (-1, &[2]),
        (0, &[2, -1]),
        (1, &[2, -4, 1]),
        (2, &[2, -9, 6, -1]),
        (3, &[2, -16, 20, -8, 1]),
        (4, &[2, -25, 50, -35, 10, -1]),
    ];
    for (k, row) in table {
        let series = beta_series(&example_lk(k)).map_err(|e| format!("k={k}: {e}"))?;
        let expected: Vec<BigInt> = row.iter().map(|&c| BigInt::from(c)).collect();
        if series.coeffs() != expected.as_slice() {
            return Err(format!(
                "k={k}: series {:?} != expected {:?}",
                series.coeffs(),
                expected
            ));
        }
    }
    let elapsed = started.elapsed();
    if elapsed.as_secs_f64() >= 1.0 {
        return Err(format!("table took {elapsed:?}, budget is 1s"));
    }
    Ok(())
}

fn criterion_2_lambda_closed_form() -> Result<(), String> {
    for k in -5i64..=10 {
        let mut expected = LaurentPoly::zero();
        for (c, e) in [
            (-1, k),
            (-1, -k),
            (2, k + 1),
            (2, -k - 1),
            (-1, k + 2),
            (-1, -k - 2),
        ] {
            expected = expected.add(&LaurentPoly::term(c, e));
        }
        let got = lambda(&example_lk(k));
        if got != expected {
            return Err(format!("k={k}: lambda {got} != {expected}"));
        }
    }
    Ok(())
}

fn criterion_3_single_twist_forest() -> Result<(), String> {
    let f = parse_forest("w=1 (1,2)^inf\n").map_err(|e| e.to_string())?;
    let cochran = f.cochran_order().map_err(|e| e.to_string())?;
    if cochran != TowerOrder::Infinite {
        return Err(format!("cochran order {cochran}, expected inf"));
    }
    for depth in [1u32, 4, 9, 25] {
        let bv = f.beta_vector(Some(depth)).map_err(|e| e.to_string())?;
        let expected: BTreeMap<u32, i64> = (1..=depth).map(|i| (i, i64::from(i == 1))).collect();
        if bv != expected {
            return Err(format!("depth {depth}: beta vector {bv:?}"));
        }
    }
    Ok(())
}

fn criterion_4_iterated_family() -> Result<(), String> {
    for k in 1u32..=10 {
        let f = infmany_forest(k).map_err(|e| format!("k={k}: {e}"))?;
        let cochran = f.cochran_order().map_err(|e| format!("k={k}: {e}"))?;
        if cochran != TowerOrder::Finite(i64::from(2 * k)) {
            return Err(format!(
                "k={k}: cochran order {cochran}, expected {}",
                2 * k
            ));
        }
        let bv = f.beta_vector(None).map_err(|e| format!("k={k}: {e}"))?;
        let expected: BTreeMap<u32, i64> = (1..=k).map(|i| (i, 1)).collect();
        if bv != expected {
            return Err(format!("k={k}: beta vector {bv:?}"));
        }
    }
    Ok(())
}

fn random_symmetric_vanishing(rng: &mut StdRng) -> LaurentPoly {
    let mut wings: Vec<(i64, i64)> = Vec::new();
    if rng.gen() {
        // Dense profile with small coefficients.
        let degree = rng.gen_range(0..=15);
        for e in 1..=degree {
            let c = rng.gen_range(-3i64..=3);
            if c != 0 {
                wings.push((e, c));
            }
        }
    } else {
        // Sparse profile with large coefficients.
        for _ in 0..rng.gen_range(1..=2) {
            wings.push((rng.gen_range(1..=15), rng.gen_range(-50i64..=50)));
        }
    }
    let mut p = LaurentPoly::zero();
    let mut center = BigInt::from(0);
    for (e, c) in wings {
        p.add_term(BigInt::from(c), e);
        p.add_term(BigInt::from(c), -e);
        center -= BigInt::from(2 * c);
    }
    p.add_term(center, 0);
    p
}

fn criterion_5_x_round_trip() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0005);
    let points: Vec<BigRational> = [(3, 2), (-2, 1), (7, 3)]
        .iter()
        .map(|&(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
        .collect();
    for trial in 0..1000 {
        let f = random_symmetric_vanishing(&mut rng);
        assert!(f.is_symmetric() && f.vanishes_at_one());
        let xp = f
            .to_x_poly()
            .map_err(|e| format!("trial {trial}: conversion failed: {e}"))?;
        let back = xp.to_laurent();
        if back != f {
            return Err(format!("trial {trial}: round trip {back} != {f}"));
        }
        for t in &points {
            let lhs = f.eval(t).map_err(|e| format!("trial {trial}: {e}"))?;
            let one = BigRational::one();
            let x = (&one - t) * (&one - t.recip());
            let rhs = xp.eval(&x);
            if lhs != rhs {
                return Err(format!("trial {trial}: eval mismatch at t={t}"));
            }
        }
    }
    Ok(())
}

fn criterion_6_canonical_keys() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0006);
    // Random re-spellings keep the key.
    for trial in 0..10_000 {
        let order = rng.gen_range(0..=8usize);
        if trial % 2 == 0 {
            let t = common::random_framed(&mut rng, order + 2, &[1, 2, 3]);
            let r = common::respell_framed(&t, &mut rng);
            if t.canonical() != r.canonical() {
                return Err(format!("respelled {r} of {t} changed key"));
            }
        } else {
            let t = common::random_twisted(&mut rng, order + 1, &[1, 2, 3]);
            let r = common::respell_twisted(&t, &mut rng);
            if t.canonical() != r.canonical() {
                return Err(format!("respelled {r} of {t} changed key"));
            }
        }
    }

    // Exhaustively at <= 6 leaves: the matching oracle's isomorphism classes
    // and the canonical keys induce the same partition.
    let mut key_to_class: HashMap<String, usize> = HashMap::new();
    let mut next_class = 0usize;
    let mut check = |graphs: Vec<(common::LeafGraph, String, String)>| -> Result<(), String> {
        let mut buckets: HashMap<Vec<(u32, u32, usize)>, Vec<usize>> = HashMap::new();
        for (i, (g, _, _)) in graphs.iter().enumerate() {
            buckets.entry(common::fingerprint(g)).or_default().push(i);
        }
        for members in buckets.values() {
            // Oracle-partition the bucket into isomorphism classes.
            let mut reps: Vec<usize> = Vec::new();
            for &i in members {
                let found = reps
                    .iter()
                    .find(|&&r| common::leaf_iso(&graphs[i].0, &graphs[r].0));
                match found {
                    Some(&r) => {
                        // Same class: keys must agree.
                        if graphs[i].1 != graphs[r].1 {
                            return Err(format!(
                                "isomorphic {} and {} have different keys",
                                graphs[i].2, graphs[r].2
                            ));
                        }
                    }
                    None => {
                        reps.push(i);
                        let key = graphs[i].1.clone();
                        if key_to_class.contains_key(&key) {
                            return Err(format!(
                                "key collision: {} repeats an earlier class's key",
                                graphs[i].2
                            ));
                        }
                        key_to_class.insert(key, next_class);
                        next_class += 1;
                    }
                }
            }
        }
        Ok(())
    };
    for leaves in 2..=6usize {
        let framed: Vec<_> = common::all_framed(leaves, &[1, 2])
            .into_iter()
            .map(|t| {
                (
                    common::framed_graph(&t),
                    t.canonical().as_str().to_string(),
                    t.to_string(),
                )
            })
            .collect();
        check(framed)?;
        let twisted: Vec<_> = common::all_twisted(leaves, &[1, 2])
            .into_iter()
            .map(|t| {
                (
                    common::twisted_graph(&t),
                    t.canonical().as_str().to_string(),
                    t.to_string(),
                )
            })
            .collect();
        check(twisted)?;
    }
    if next_class < 100 {
        return Err(format!(
            "only {next_class} classes enumerated; oracle coverage looks broken"
        ));
    }
    Ok(())
}

fn criterion_7_relation_lattice() -> Result<(), String> {
    let mut multisets: Vec<Vec<u32>> = Vec::new();
    for leaves in 3..=6usize {
        for twos in 0..=leaves {
            let mut labels = vec![1u32; leaves - twos];
            labels.extend(std::iter::repeat(2).take(twos));
            multisets.push(labels);
        }
    }

    let mut prepared: Vec<(RelationLattice, Vec<TreeVector>)> = Vec::new();
    for labels in &multisets {
        let lat = RelationLattice::with_order_bound(labels, 4).map_err(|e| e.to_string())?;
        let mut relators = Vec::new();
        for t in lat.basis() {
            relators.extend(ihx_relators(t));
        }
        // Every relator is in the lattice.
        for r in &relators {
            if !lat.is_zero(r).map_err(|e| e.to_string())? {
                return Err(format!("relator over {labels:?} did not reduce to zero"));
            }
        }
        // Doubled symmetric classes vanish.
        for pos in lat.symmetric_positions() {
            let v = TreeVector::from_tree(&lat.basis()[pos].clone(), 2);
            if !lat.is_zero(&v).map_err(|e| e.to_string())? {
                return Err(format!(
                    "2 * {} over {labels:?} did not reduce to zero",
                    lat.basis()[pos]
                ));
            }
        }
        prepared.push((lat, relators));
    }

    // The single tripod class survives.
    let tripod = FramedTree::new(
        RootedTree::leaf(1),
        RootedTree::pair(RootedTree::leaf(1), RootedTree::leaf(1)),
    );
    let lat = RelationLattice::with_order_bound(&[1, 1, 1], 4).map_err(|e| e.to_string())?;
    if lat
        .is_zero(&TreeVector::from_tree(&tripod, 1))
        .map_err(|e| e.to_string())?
    {
        return Err("tripod class reduced to zero".into());
    }

    // Random relator combinations stay in the lattice.
    let mut rng = StdRng::seed_from_u64(0x5eed_0007);
    let combinable: Vec<&(RelationLattice, Vec<TreeVector>)> = prepared
        .iter()
        .filter(|(_, relators)| !relators.is_empty())
        .collect();
    for trial in 0..1000 {
        let (lat, relators) = combinable[rng.gen_range(0..combinable.len())];
        let mut v = TreeVector::zero(lat.labels()).map_err(|e| e.to_string())?;
        for _ in 0..rng.gen_range(1..=4) {
            let r = &relators[rng.gen_range(0..relators.len())];
            let c = rng.gen_range(-3i64..=3);
            v = v.add(&r.scale(c)).map_err(|e| e.to_string())?;
        }
        if !lat.is_zero(&v).map_err(|e| e.to_string())? {
            return Err(format!(
                "trial {trial}: relator combination escaped the lattice"
            ));
        }
    }
    Ok(())
}

use common::{
    random_bad_framed, random_framed_invariance, random_sign, random_tinf_entry,
    random_twisted_invariance,
};

fn nonzero(rng: &mut StdRng, lo: i64, hi: i64) -> i64 {
    common::nonzero(rng, lo, hi)
}

fn criterion_8_cross_consistency() -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(0x5eed_0008);

    // Part 1: on forests whose β-bad content sits strictly above the
    // certified order, per-entry effect aggregation reproduces the invariant
    // extraction exactly.
    for trial in 0..500 {
        let k = rng.gen_range(1..=4u32);
        let mut entries: Vec<ForestEntry> = Vec::new();
        for _ in 0..rng.gen_range(1..=8) {
            match rng.gen_range(0..7) {
                0 | 1 | 2 => entries.push(random_tinf_entry(&mut rng, 2 * k + 2)),
                3 => entries.push(random_framed_invariance(&mut rng)),
                4 => entries.push(random_twisted_invariance(&mut rng)),
                5 => {
                    let order = rng.gen_range(2 * k + 1..=2 * k + 2);
                    if rng.gen_range(0..4) == 0 {
                        let t = common::respell_framed(&make_t(order).unwrap(), &mut rng);
                        entries.push(ForestEntry::framed(t, random_sign(&mut rng)));
                    } else {
                        entries.push(ForestEntry::framed(
                            random_bad_framed(&mut rng, order),
                            random_sign(&mut rng),
                        ));
                    }
                }
                _ => {
                    let order = rng.gen_range(k + 1..=k + 2);
                    entries.push(ForestEntry::twisted(
                        common::random_twisted(&mut rng, order as usize + 1, &[1]),
                        nonzero(&mut rng, -3, 3),
                    ));
                }
            }
        }
        // Pin the certified order at exactly 2k.
        entries.push(ForestEntry::framed(
            random_bad_framed(&mut rng, 2 * k + 1),
            random_sign(&mut rng),
        ));
        let frontier = if rng.gen() {
            Frontier::Infinite
        } else {
            Frontier::Finite(2 * k + 1 + rng.gen_range(0..=3))
        };
        let f = IntersectionForest::new(entries, frontier);

        let cochran = f
            .cochran_order()
            .map_err(|e| format!("trial {trial}: {e}"))?;
        if cochran != TowerOrder::Finite(i64::from(2 * k)) {
            return Err(format!(
                "trial {trial}: generator produced certified order {cochran}, wanted {}",
                2 * k
            ));
        }
        let bv = f
            .beta_vector(None)
            .map_err(|e| format!("trial {trial}: {e}"))?;
        let agg = aggregate(&f.entries, k).map_err(|e| format!("trial {trial}: {e}"))?;
        if agg.undefined {
            return Err(format!("trial {trial}: aggregate unexpectedly undefined"));
        }
        if !agg.indeterminate_from.map_or(true, |b| b > k) {
            return Err(format!(
                "trial {trial}: indeterminate from {:?} at k={k}",
                agg.indeterminate_from
            ));
        }
        if agg.delta != bv {
            return Err(format!(
                "trial {trial}: aggregate {:?} != extraction {:?}",
                agg.delta, bv
            ));
        }
    }

    // Part 2: for forests the normalizer can clean up unaided, the
    // pre-normalization aggregate's determinate part predicts the
    // post-normalization extraction.
    for trial in 0..200 {
        let k0 = rng.gen_range(1..=2u32);
        let target = 2 * k0;
        let f = common::random_eliminable_forest(&mut rng, k0);

        let agg = aggregate(&f.entries, k0).map_err(|e| format!("trial {trial}: {e}"))?;
        let (cleaned, _log) = normalize(&f, &NormalizeOptions::new(target))
            .map_err(|e| format!("trial {trial}: expected eliminable, got: {e}"))?;
        let bv = cleaned
            .beta_vector(Some(k0))
            .map_err(|e| format!("trial {trial}: {e}"))?;
        if agg.undefined {
            return Err(format!("trial {trial}: aggregate unexpectedly undefined"));
        }
        for (i, v) in &agg.delta {
            if bv.get(i) != Some(v) {
                return Err(format!(
                    "trial {trial}: determinate delta {:?} disagrees with cleaned extraction {:?}",
                    agg.delta, bv
                ));
            }
        }
    }
    Ok(())
}

#[test]
fn all_criteria() {
    let checks: [(&str, fn() -> Result<(), String>); 8] = [
        ("beta series table", criterion_1_beta_series_table),
        ("lambda closed form", criterion_2_lambda_closed_form),
        ("single clean twist forest", criterion_3_single_twist_forest),
        ("iterated family orders", criterion_4_iterated_family),
        ("x-conversion round trip", criterion_5_x_round_trip),
        (
            "canonical keys vs matching oracle",
            criterion_6_canonical_keys,
        ),
        ("relation lattice reduction", criterion_7_relation_lattice),
        (
            "effect/extraction consistency",
            criterion_8_cross_consistency,
        ),
    ];
    let mut failures = Vec::new();
    for (idx, (name, run)) in checks.iter().enumerate() {
        match run() {
            Ok(()) => println!("criterion {} ({name}): pass", idx + 1),
            Err(msg) => {
                println!("criterion {} ({name}): FAIL — {msg}", idx + 1);
                failures.push(format!("criterion {} ({name}): {msg}", idx + 1));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
