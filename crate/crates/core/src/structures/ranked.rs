//! Trees that are binary-search ordered on keys and heap ordered on a per-key
//! rank. Zip-zip trees and treaps are both instances; they differ only in how a
//! rank is computed from `(seed, key, weight)`.
//!
//! Insertion unzips the search path at the point where the new node's rank
//! wins; deletion zips the two children of the removed node. Rank ties are
//! broken toward the smaller key, so the tree for a given key set is unique.

use std::cmp::Reverse;
use std::fmt;

use crate::error::{Error, Result};
use crate::hi::fingerprint::{FingerprintWriter, Fingerprinted};
use crate::oracle::{Frequency, Key, Seed};

use super::tree::{self, Link, Node};
use super::{check_range, BoundedSearch, DictEntry, Dictionary, SearchResult, Weight};

/// How a node's rank is derived. Higher ranks sit closer to the root.
pub trait RankRule: Clone + fmt::Debug {
    type Rank: Ord + Copy + fmt::Debug;

    fn name(&self) -> &'static str;

    fn rank(&self, seed: Seed, key: Key, weight: Weight) -> Result<Self::Rank>;

    /// Weight recorded in the node (and the fingerprint).
    fn stored_weight(&self, weight: Weight) -> f64 {
        weight.get()
    }

    fn weight_for(&self, f: Frequency) -> Result<Weight> {
        Weight::new(f.get())
    }

    fn encode_rank(rank: &Self::Rank, w: &mut FingerprintWriter);
}

#[derive(Clone, Debug)]
pub struct RankedTree<R: RankRule> {
    rule: R,
    seed: Seed,
    root: Link<R::Rank>,
    len: usize,
}

impl<R: RankRule> RankedTree<R> {
    pub fn with_rule(rule: R, seed: Seed) -> Self {
        RankedTree {
            rule,
            seed,
            root: None,
            len: 0,
        }
    }

    pub fn seed(&self) -> Seed {
        self.seed
    }

    pub fn rule(&self) -> &R {
        &self.rule
    }

    /// Rank stored for `key`, if present.
    pub fn rank_of(&self, key: Key) -> Option<R::Rank> {
        tree::get(&self.root, key).map(|n| n.meta)
    }

    /// Key at the root, if any.
    pub fn root_key(&self) -> Option<Key> {
        self.root.as_ref().map(|n| n.key)
    }

    /// Checks the search-tree and heap orders; returns the first violation.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        fn walk<P: Ord + Copy + fmt::Debug>(
            link: &Link<P>,
            lo: Option<Key>,
            hi: Option<Key>,
            parent: Option<(P, Key)>,
        ) -> std::result::Result<usize, String> {
            let Some(n) = link.as_deref() else {
                return Ok(0);
            };
            if lo.is_some_and(|lo| n.key <= lo) || hi.is_some_and(|hi| n.key >= hi) {
                return Err(format!("key {} violates search order", n.key));
            }
            if let Some((p, pk)) = parent {
                if (n.meta, Reverse(n.key)) > (p, Reverse(pk)) {
                    return Err(format!("key {} outranks its parent {pk}", n.key));
                }
            }
            let here = Some((n.meta, n.key));
            Ok(1 + walk(&n.left, lo, Some(n.key), here)? + walk(&n.right, Some(n.key), hi, here)?)
        }
        let counted = walk(&self.root, None, None, None)?;
        if counted != self.len {
            return Err(format!("len {} but {counted} nodes reachable", self.len));
        }
        Ok(())
    }
}

#[inline]
fn outranks<P: Ord + Copy>(a: &Node<P>, b: &Node<P>) -> bool {
    (a.meta, Reverse(a.key)) > (b.meta, Reverse(b.key))
}

/// Splits a subtree into keys `< key` and keys `> key`.
fn unzip<P: Ord + Copy>(link: Link<P>, key: Key) -> (Link<P>, Link<P>) {
    match link {
        None => (None, None),
        Some(mut n) => {
            if n.key < key {
                let (l, r) = unzip(n.right.take(), key);
                n.right = l;
                (Some(n), r)
            } else {
                let (l, r) = unzip(n.left.take(), key);
                n.left = r;
                (l, Some(n))
            }
        }
    }
}

/// Joins two subtrees where every key of `a` is below every key of `b`.
fn zip<P: Ord + Copy>(a: Link<P>, b: Link<P>) -> Link<P> {
    match (a, b) {
        (None, b) => b,
        (a, None) => a,
        (Some(mut x), Some(mut y)) => {
            if outranks(&x, &y) {
                x.right = zip(x.right.take(), Some(y));
                Some(x)
            } else {
                y.left = zip(Some(x), y.left.take());
                Some(y)
            }
        }
    }
}

fn insert_node<P: Ord + Copy>(link: &mut Link<P>, mut node: Box<Node<P>>) {
    let go_left = match link.as_deref() {
        None => {
            *link = Some(node);
            return;
        }
        Some(cur) if outranks(&node, cur) => None,
        Some(cur) => Some(node.key < cur.key),
    };
    match go_left {
        None => {
            let (l, r) = unzip(link.take(), node.key);
            node.left = l;
            node.right = r;
            *link = Some(node);
        }
        Some(true) => insert_node(&mut link.as_mut().unwrap().left, node),
        Some(false) => insert_node(&mut link.as_mut().unwrap().right, node),
    }
}

fn remove_node<P: Ord + Copy>(link: &mut Link<P>, key: Key) -> Option<Box<Node<P>>> {
    let mut cur = link;
    while cur.as_ref().is_some_and(|n| n.key != key) {
        let n = cur.as_mut().unwrap();
        cur = if key < n.key {
            &mut n.left
        } else {
            &mut n.right
        };
    }
    let mut node = cur.take()?;
    *cur = zip(node.left.take(), node.right.take());
    Some(node)
}

impl<R: RankRule> Fingerprinted for RankedTree<R> {
    fn write_fingerprint(&self, w: &mut FingerprintWriter) {
        w.tag(self.rule.name()).u64(self.len as u64);
        tree::write_tree(&self.root, w, R::encode_rank);
    }
}

impl<R: RankRule> Dictionary for RankedTree<R> {
    fn name(&self) -> &'static str {
        self.rule.name()
    }

    fn weight_for(&self, f: Frequency) -> Result<Weight> {
        self.rule.weight_for(f)
    }

    fn insert(&mut self, entry: DictEntry) -> Result<()> {
        if tree::contains(&self.root, entry.key) {
            return Err(Error::Duplicate(entry.key));
        }
        let rank = self.rule.rank(self.seed, entry.key, entry.weight)?;
        let node = Node::new(
            entry.key,
            self.rule.stored_weight(entry.weight),
            entry.payload,
            rank,
        );
        insert_node(&mut self.root, node);
        self.len += 1;
        Ok(())
    }

    fn delete(&mut self, key: Key) -> Result<DictEntry> {
        let node = remove_node(&mut self.root, key).ok_or(Error::NotFound(key))?;
        self.len -= 1;
        Ok(DictEntry {
            key,
            weight: Weight::new(node.weight)?,
            payload: node.payload,
        })
    }

    fn search(&self, key: Key) -> SearchResult {
        tree::search(&self.root, key)
    }

    fn search_bounded(&self, key: Key, budget: u64) -> BoundedSearch {
        tree::search_bounded(&self.root, key, budget)
    }

    fn contains(&self, key: Key) -> bool {
        tree::contains(&self.root, key)
    }

    fn predecessor(&self, key: Key) -> Option<Key> {
        tree::predecessor(&self.root, key)
    }

    fn range_counted(&self, lo: Key, hi: Key) -> Result<(Vec<Key>, u64)> {
        check_range(lo, hi)?;
        let mut out = Vec::new();
        let mut tally = 0;
        tree::range(&self.root, lo, hi, &mut out, &mut tally);
        Ok((out, tally))
    }

    fn len(&self) -> usize {
        self.len
    }

    fn keys(&self) -> Vec<Key> {
        let mut out = Vec::with_capacity(self.len);
        tree::for_each_in_order(&self.root, |n| out.push(n.key));
        out
    }

    fn height(&self) -> usize {
        tree::height(&self.root)
    }

    fn preorder(&self) -> Vec<(Key, usize)> {
        tree::preorder(&self.root)
    }

    fn weight_sum(&self) -> f64 {
        let mut sum = 0.0;
        tree::for_each_in_order(&self.root, |n| sum += n.weight);
        sum
    }

    fn fresh(&self) -> Self {
        RankedTree::with_rule(self.rule.clone(), self.seed)
    }
}

impl<P> Clone for Node<P>
where
    P: Clone,
{
    fn clone(&self) -> Self {
        Node {
            key: self.key,
            weight: self.weight,
            payload: self.payload.clone(),
            meta: self.meta.clone(),
            left: self.left.clone(),
            right: self.right.clone(),
        }
    }
}

impl<P: fmt::Debug> fmt::Debug for Node<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Node")
            .field("key", &self.key)
            .field("meta", &self.meta)
            .finish_non_exhaustive()
    }
}
