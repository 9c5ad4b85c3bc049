//! Binary-search-tree node storage and the read-only walks shared by every tree.
//!
//! Each visited node costs exactly one comparison against the query key.

use crate::hi::fingerprint::FingerprintWriter;
use crate::oracle::{ComparisonTally, Key};

use super::{BoundedSearch, Payload, SearchResult};

pub(crate) type Link<M> = Option<Box<Node<M>>>;

pub(crate) struct Node<M> {
    pub key: Key,
    pub weight: f64,
    pub payload: Option<Payload>,
    pub meta: M,
    pub left: Link<M>,
    pub right: Link<M>,
}

impl<M> Node<M> {
    pub fn new(key: Key, weight: f64, payload: Option<Payload>, meta: M) -> Box<Self> {
        Box::new(Node {
            key,
            weight,
            payload,
            meta,
            left: None,
            right: None,
        })
    }
}

pub(crate) fn search<M>(root: &Link<M>, key: Key) -> SearchResult {
    let mut tally = ComparisonTally::default();
    let mut cur = root.as_deref();
    while let Some(n) = cur {
        tally.tick();
        match key.cmp(&n.key) {
            std::cmp::Ordering::Less => cur = n.left.as_deref(),
            std::cmp::Ordering::Greater => cur = n.right.as_deref(),
            std::cmp::Ordering::Equal => {
                return SearchResult {
                    found: true,
                    comparisons: tally,
                    payload: n.payload.clone(),
                }
            }
        }
    }
    SearchResult {
        found: false,
        comparisons: tally,
        payload: None,
    }
}

pub(crate) fn search_bounded<M>(root: &Link<M>, key: Key, budget: u64) -> BoundedSearch {
    let mut spent = 0u64;
    let mut cur = root.as_deref();
    while let Some(n) = cur {
        if spent == budget {
            return BoundedSearch::Exhausted;
        }
        spent += 1;
        match key.cmp(&n.key) {
            std::cmp::Ordering::Less => cur = n.left.as_deref(),
            std::cmp::Ordering::Greater => cur = n.right.as_deref(),
            std::cmp::Ordering::Equal => {
                return BoundedSearch::Found {
                    comparisons: spent,
                    payload: n.payload.clone(),
                }
            }
        }
    }
    BoundedSearch::Absent { comparisons: spent }
}

pub(crate) fn get<M>(root: &Link<M>, key: Key) -> Option<&Node<M>> {
    let mut cur = root.as_deref();
    while let Some(n) = cur {
        match key.cmp(&n.key) {
            std::cmp::Ordering::Less => cur = n.left.as_deref(),
            std::cmp::Ordering::Greater => cur = n.right.as_deref(),
            std::cmp::Ordering::Equal => return Some(n),
        }
    }
    None
}

pub(crate) fn contains<M>(root: &Link<M>, key: Key) -> bool {
    get(root, key).is_some()
}

pub(crate) fn predecessor<M>(root: &Link<M>, key: Key) -> Option<Key> {
    let mut best = None;
    let mut cur = root.as_deref();
    while let Some(n) = cur {
        if n.key < key {
            best = Some(n.key);
            cur = n.right.as_deref();
        } else {
            cur = n.left.as_deref();
        }
    }
    best
}

/// Pruned in-order walk collecting keys in `[lo, hi]`.
pub(crate) fn range<M>(link: &Link<M>, lo: Key, hi: Key, out: &mut Vec<Key>, tally: &mut u64) {
    let Some(n) = link.as_deref() else {
        return;
    };
    *tally += 1;
    if lo < n.key {
        range(&n.left, lo, hi, out, tally);
    }
    if lo <= n.key && n.key <= hi {
        out.push(n.key);
    }
    if n.key < hi {
        range(&n.right, lo, hi, out, tally);
    }
}

pub(crate) fn for_each_in_order<'a, M, F>(root: &'a Link<M>, mut f: F)
where
    F: FnMut(&'a Node<M>),
{
    let mut stack: Vec<&Node<M>> = Vec::new();
    let mut cur = root.as_deref();
    loop {
        while let Some(n) = cur {
            stack.push(n);
            cur = n.left.as_deref();
        }
        let Some(n) = stack.pop() else { break };
        f(n);
        cur = n.right.as_deref();
    }
}

pub(crate) fn height<M>(link: &Link<M>) -> usize {
    match link.as_deref() {
        None => 0,
        Some(n) => 1 + height(&n.left).max(height(&n.right)),
    }
}

/// Pre-order `(key, depth)` list, depth of the root being 1.
pub(crate) fn preorder<M>(root: &Link<M>) -> Vec<(Key, usize)> {
    let mut out = Vec::new();
    let mut stack = vec![(root.as_deref(), 1usize)];
    while let Some((node, depth)) = stack.pop() {
        if let Some(n) = node {
            out.push((n.key, depth));
            stack.push((n.right.as_deref(), depth + 1));
            stack.push((n.left.as_deref(), depth + 1));
        }
    }
    out
}

/// Pre-order topology with explicit nil markers, then a content digest.
pub(crate) fn write_tree<M, E>(root: &Link<M>, w: &mut FingerprintWriter, encode_meta: E)
where
    E: Fn(&M, &mut FingerprintWriter),
{
    let mut stack = vec![root.as_deref()];
    while let Some(node) = stack.pop() {
        match node {
            None => {
                w.nil();
            }
            Some(n) => {
                w.node().u64(n.key).f64(n.weight);
                encode_meta(&n.meta, w);
                stack.push(n.right.as_deref());
                stack.push(n.left.as_deref());
            }
        }
    }
    let mut entries = Vec::new();
    for_each_in_order(root, |n| entries.push((n.key, n.payload.as_ref())));
    w.contents(entries);
}
