//! Height-balanced BST baseline. Frequencies are ignored entirely.

use crate::error::{Error, Result};
use crate::hi::fingerprint::{FingerprintWriter, Fingerprinted};
use crate::oracle::{Frequency, Key};

use super::tree::{self, Link, Node};
use super::{check_range, BoundedSearch, DictEntry, Dictionary, SearchResult, Weight};

type AvlLink = Link<u32>;

#[derive(Default)]
pub struct AvlTree {
    root: AvlLink,
    len: usize,
}

fn h(link: &AvlLink) -> u32 {
    link.as_ref().map_or(0, |n| n.meta)
}

fn update(n: &mut Node<u32>) {
    n.meta = 1 + h(&n.left).max(h(&n.right));
}

fn balance_factor(n: &Node<u32>) -> i64 {
    i64::from(h(&n.left)) - i64::from(h(&n.right))
}

fn rotate_right(mut n: Box<Node<u32>>) -> Box<Node<u32>> {
    let mut l = n.left.take().expect("rotate_right needs a left child");
    n.left = l.right.take();
    update(&mut n);
    l.right = Some(n);
    update(&mut l);
    l
}

fn rotate_left(mut n: Box<Node<u32>>) -> Box<Node<u32>> {
    let mut r = n.right.take().expect("rotate_left needs a right child");
    n.right = r.left.take();
    update(&mut n);
    r.left = Some(n);
    update(&mut r);
    r
}

fn rebalance(mut n: Box<Node<u32>>) -> Box<Node<u32>> {
    update(&mut n);
    let bf = balance_factor(&n);
    if bf > 1 {
        if n.left.as_deref().is_some_and(|l| balance_factor(l) < 0) {
            n.left = n.left.take().map(rotate_left);
        }
        return rotate_right(n);
    }
    if bf < -1 {
        if n.right.as_deref().is_some_and(|r| balance_factor(r) > 0) {
            n.right = n.right.take().map(rotate_right);
        }
        return rotate_left(n);
    }
    n
}

fn insert(link: AvlLink, node: Box<Node<u32>>) -> Box<Node<u32>> {
    match link {
        None => node,
        Some(mut n) => {
            if node.key < n.key {
                n.left = Some(insert(n.left.take(), node));
            } else {
                n.right = Some(insert(n.right.take(), node));
            }
            rebalance(n)
        }
    }
}

fn take_min(mut n: Box<Node<u32>>) -> (AvlLink, Box<Node<u32>>) {
    match n.left.take() {
        None => (n.right.take(), n),
        Some(l) => {
            let (rest, min) = take_min(l);
            n.left = rest;
            (Some(rebalance(n)), min)
        }
    }
}

fn remove(link: AvlLink, key: Key, removed: &mut Option<Box<Node<u32>>>) -> AvlLink {
    let mut n = link?;
    if key < n.key {
        n.left = remove(n.left.take(), key, removed);
    } else if key > n.key {
        n.right = remove(n.right.take(), key, removed);
    } else {
        let left = n.left.take();
        let right = n.right.take();
        *removed = Some(n);
        return match (left, right) {
            (None, r) => r,
            (l, None) => l,
            (l, Some(r)) => {
                let (rest, mut succ) = take_min(r);
                succ.left = l;
                succ.right = rest;
                Some(rebalance(succ))
            }
        };
    }
    Some(rebalance(n))
}

impl AvlTree {
    pub fn new() -> Self {
        Self::default()
    }

    /// Verifies search order, stored heights and the balance condition.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        fn walk(
            link: &AvlLink,
            lo: Option<Key>,
            hi: Option<Key>,
        ) -> std::result::Result<u32, String> {
            let Some(n) = link.as_deref() else {
                return Ok(0);
            };
            if lo.is_some_and(|lo| n.key <= lo) || hi.is_some_and(|hi| n.key >= hi) {
                return Err(format!("key {} violates search order", n.key));
            }
            let lh = walk(&n.left, lo, Some(n.key))?;
            let rh = walk(&n.right, Some(n.key), hi)?;
            if lh.abs_diff(rh) > 1 {
                return Err(format!("node {} unbalanced ({lh} vs {rh})", n.key));
            }
            if n.meta != 1 + lh.max(rh) {
                return Err(format!("node {} has stale height", n.key));
            }
            Ok(n.meta)
        }
        walk(&self.root, None, None).map(|_| ())
    }
}

impl Fingerprinted for AvlTree {
    fn write_fingerprint(&self, w: &mut FingerprintWriter) {
        w.tag("avl").u64(self.len as u64);
        tree::write_tree(&self.root, w, |height, w| {
            w.u64(u64::from(*height));
        });
    }
}

impl Dictionary for AvlTree {
    fn name(&self) -> &'static str {
        "avl"
    }

    fn weight_for(&self, _f: Frequency) -> Result<Weight> {
        Ok(Weight::ONE)
    }

    fn insert(&mut self, entry: DictEntry) -> Result<()> {
        if tree::contains(&self.root, entry.key) {
            return Err(Error::Duplicate(entry.key));
        }
        let node = Node::new(entry.key, 1.0, entry.payload, 1);
        self.root = Some(insert(self.root.take(), node));
        self.len += 1;
        Ok(())
    }

    fn delete(&mut self, key: Key) -> Result<DictEntry> {
        let mut removed = None;
        self.root = remove(self.root.take(), key, &mut removed);
        let node = removed.ok_or(Error::NotFound(key))?;
        self.len -= 1;
        Ok(DictEntry {
            key,
            weight: Weight::ONE,
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
        h(&self.root) as usize
    }

    fn preorder(&self) -> Vec<(Key, usize)> {
        tree::preorder(&self.root)
    }

    fn weight_sum(&self) -> f64 {
        self.len as f64
    }

    fn fresh(&self) -> Self {
        AvlTree::new()
    }
}
