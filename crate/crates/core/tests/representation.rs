use proptest::prelude::*;

use learned_hi::hi::{probe_frequency, Fingerprinted};
use learned_hi::structures::{DictEntry, Dictionary, LearnedDictionary};
use learned_hi::threshold::{ThresholdConfig, ThresholdDict};
use learned_hi::{AvlTree, Key, Seed, Weight, ZipZipTree};

fn zipzip_from(keys: &[Key], seed: Seed) -> ZipZipTree {
    let mut t = ZipZipTree::uniform(seed);
    for &k in keys {
        t.insert(DictEntry::new(k, Weight::ONE)).unwrap();
    }
    t
}

proptest! {
    // Fingerprints agree exactly when the pre-order shapes agree.
    #[test]
    fn fingerprint_tracks_shape(
        a in proptest::collection::btree_set(1u64..40, 0..20),
        b in proptest::collection::btree_set(1u64..40, 0..20),
        seed in 0u64..4,
    ) {
        let a: Vec<Key> = a.into_iter().collect();
        let b: Vec<Key> = b.into_iter().collect();
        let ta = zipzip_from(&a, Seed(seed));
        let tb = zipzip_from(&b, Seed(seed));
        prop_assert_eq!(ta.preorder() == tb.preorder(), ta.fingerprint() == tb.fingerprint());
    }

    #[test]
    fn threshold_wrapper_keeps_inner_shape_canonical(
        keys in proptest::collection::vec(1u64..200, 1..60),
    ) {
        let mut dedup = keys.clone();
        dedup.sort_unstable();
        dedup.dedup();
        let build = |order: &[Key]| {
            let mut t = ThresholdDict::new(ZipZipTree::biased(Seed(3)), ThresholdConfig::fixed(200)).unwrap();
            for &k in order {
                t.insert_estimate(k, probe_frequency(k, 200), None).unwrap();
            }
            t
        };
        let mut seen = Vec::new();
        for &k in &keys {
            if !seen.contains(&k) {
                seen.push(k);
            }
        }
        prop_assert_eq!(build(&seen).fingerprint(), build(&dedup).fingerprint());
    }
}

#[test]
fn avl_layout_depends_on_insertion_order() {
    let build = |keys: &[Key]| {
        let mut t = AvlTree::new();
        for &k in keys {
            t.insert(DictEntry::new(k, Weight::ONE)).unwrap();
        }
        t
    };
    let up = build(&[1, 2, 3, 4]);
    let down = build(&[4, 3, 2, 1]);
    assert_eq!(up.keys(), down.keys());
    assert_ne!(up.preorder(), down.preorder());
    assert_ne!(up.fingerprint(), down.fingerprint());
}

#[test]
fn payloads_are_part_of_the_representation() {
    let mut a = ZipZipTree::uniform(Seed(1));
    let mut b = ZipZipTree::uniform(Seed(1));
    a.insert(DictEntry::new(5, Weight::ONE).with_payload(&b"left"[..]))
        .unwrap();
    b.insert(DictEntry::new(5, Weight::ONE).with_payload(&b"right"[..]))
        .unwrap();
    assert_eq!(a.preorder(), b.preorder());
    assert_ne!(a.fingerprint(), b.fingerprint());
    assert_eq!(a.search(5).payload.as_deref(), Some(&b"left"[..]));
}
