//! Binary merge hierarchies and their level-indicator encoding.
//!
//! Points are indexed `0..n` in the API and printed with 1-based labels.
//! A level indicator stores one entry per unordered pair `i < j` and level
//! `t = 1..n-1`; entry `(i, j, t)` is 1 when the smallest cluster holding
//! both points has more than `t` leaves, i.e. the pair is separated once every
//! cluster is cut down to at most `t` members. Level 0 is all ones for every
//! tree and is never stored.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sublevel::separation::most_violated_spreading;

/// Largest `n` for which [`enumerate_trees`] runs by default.
pub const DEFAULT_ENUMERATION_CAP: usize = 8;

/// Largest `n` for which [`validate_indicator`] checks the spreading family by
/// scanning every subset.
pub const EXHAUSTIVE_SPREADING_LIMIT: usize = 8;

pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Position of the unordered pair `{i, j}` in pair-major order.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    debug_assert!(i != j && i < n && j < n);
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

/// Unordered pairs `(i, j)` with `i < j`, in the storage order.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// Values over (pair, level) with pair-major, level-minor layout.
#[derive(Clone, Debug, PartialEq)]
pub struct LevelTensor<T> {
    n: usize,
    values: Vec<T>,
}

/// Binary encoding of a tree.
pub type LevelIndicator = LevelTensor<u8>;

/// A point of the LP relaxation: entries in `[0, 1]`.
pub type FractionalHierarchy = LevelTensor<f64>;

impl<T: Copy> LevelTensor<T> {
    pub fn filled(n: usize, value: T) -> Self {
        LevelTensor {
            n,
            values: vec![value; pair_count(n) * n.saturating_sub(1)],
        }
    }

    pub fn from_values(n: usize, values: Vec<T>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        let expected = pair_count(n) * (n - 1);
        if values.len() != expected {
            return Err(Error::InvalidModel(format!(
                "level tensor for n = {n} needs {expected} entries, got {}",
                values.len()
            )));
        }
        Ok(LevelTensor { n, values })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored levels, `n - 1`.
    pub fn levels(&self) -> usize {
        self.n - 1
    }

    /// Flat index of `(i, j, t)`; `t` is 1-based.
    #[inline]
    pub fn index(&self, i: usize, j: usize, t: usize) -> usize {
        debug_assert!(t >= 1 && t < self.n);
        pair_index(self.n, i, j) * (self.n - 1) + (t - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, t: usize) -> T {
        self.values[self.index(i, j, t)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, t: usize, value: T) {
        let k = self.index(i, j, t);
        self.values[k] = value;
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    /// Inverse of [`LevelTensor::index`].
    pub fn coordinates(&self, index: usize) -> (usize, usize, usize) {
        let levels = self.n - 1;
        let (pair, t) = (index / levels, index % levels + 1);
        let (i, j) = pair_from_index(self.n, pair);
        (i, j, t)
    }
}

impl LevelIndicator {
    pub fn to_fractional(&self) -> FractionalHierarchy {
        LevelTensor {
            n: self.n,
            values: self.values.iter().map(|&v| f64::from(v)).collect(),
        }
    }
}

fn pair_from_index(n: usize, mut index: usize) -> (usize, usize) {
    for i in 0..n {
        let row = n - i - 1;
        if index < row {
            return (i, i + 1 + index);
        }
        index -= row;
    }
    panic!("pair index out of range for n = {n}");
}

/// One agglomeration step. Ids `0..n` are leaves; the cluster created by the
/// `k`-th merge gets id `n + k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Merge {
    pub left: usize,
    pub right: usize,
}

/// A labeled binary hierarchy over `n` leaves, stored as its merge sequence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree {
    n: usize,
    merges: Vec<Merge>,
}

impl Tree {
    pub fn new(n: usize, merges: Vec<Merge>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewPoints(n));
        }
        if merges.len() != n - 1 {
            return Err(Error::MalformedTree(format!(
                "{} merges for {n} leaves, expected {}",
                merges.len(),
                n - 1
            )));
        }
        let mut live = vec![true; 2 * n - 1];
        for (k, m) in merges.iter().enumerate() {
            let next_id = n + k;
            for id in [m.left, m.right] {
                if id >= next_id {
                    return Err(Error::MalformedTree(format!(
                        "merge {} references cluster {id} before it exists",
                        k + 1
                    )));
                }
                if !live[id] {
                    return Err(Error::MalformedTree(format!(
                        "merge {} reuses cluster {id}, already merged",
                        k + 1
                    )));
                }
            }
            if m.left == m.right {
                return Err(Error::MalformedTree(format!(
                    "merge {} joins cluster {} with itself",
                    k + 1,
                    m.left
                )));
            }
            live[m.left] = false;
            live[m.right] = false;
        }
        Ok(Tree { n, merges })
    }

    /// Builds a tree from merges given as pairs of member sets (0-based
    /// points). Each set must be exactly a currently live cluster.
    pub fn from_member_merges(n: usize, steps: &[(Vec<usize>, Vec<usize>)]) -> Result<Self> {
        let mut live: Vec<(BTreeSet<usize>, usize)> =
            (0..n).map(|i| (BTreeSet::from([i]), i)).collect();
        let mut merges = Vec::with_capacity(steps.len());
        for (k, (a, b)) in steps.iter().enumerate() {
            let a: BTreeSet<usize> = a.iter().copied().collect();
            let b: BTreeSet<usize> = b.iter().copied().collect();
            let find = |set: &BTreeSet<usize>, live: &[(BTreeSet<usize>, usize)]| {
                live.iter().position(|(m, _)| m == set).ok_or_else(|| {
                    Error::MalformedTree(format!("merge {}: {set:?} is not a live cluster", k + 1))
                })
            };
            let pa = find(&a, &live)?;
            let pb = find(&b, &live)?;
            if pa == pb {
                return Err(Error::MalformedTree(format!(
                    "merge {} joins a cluster with itself",
                    k + 1
                )));
            }
            merges.push(Merge {
                left: live[pa].1,
                right: live[pb].1,
            });
            let union: BTreeSet<usize> = a.union(&b).copied().collect();
            let (hi, lo) = (pa.max(pb), pa.min(pb));
            live.remove(hi);
            live.remove(lo);
            live.push((union, n + k));
        }
        Tree::new(n, merges)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn merges(&self) -> &[Merge] {
        &self.merges
    }

    /// Parenthesized form accepted by `FromStr`, children in merge order.
    pub fn to_nested(&self) -> String {
        let mut text: Vec<String> = (1..=self.n).map(|i| i.to_string()).collect();
        for m in &self.merges {
            let joined = format!("({},{})", text[m.left], text[m.right]);
            text.push(joined);
        }
        text.pop().expect("a tree has at least two leaves")
    }

    /// Sorted members of every cluster id, leaves first.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut clusters: Vec<Vec<usize>> = (0..self.n).map(|i| vec![i]).collect();
        for m in &self.merges {
            let mut union = clusters[m.left].clone();
            union.extend_from_slice(&clusters[m.right]);
            union.sort_unstable();
            clusters.push(union);
        }
        clusters
    }
}

/// Newline-delimited merge list, `t: {a, b} + {c}` with 1-based labels.
/// Meant for debugging, not as a stable interchange format.
impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let clusters = self.clusters();
        let label = |members: &[usize]| {
            let inner: Vec<String> = members.iter().map(|m| (m + 1).to_string()).collect();
            format!("{{{}}}", inner.join(", "))
        };
        for (k, m) in self.merges.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "{}: {} + {}",
                k + 1,
                label(&clusters[m.left]),
                label(&clusters[m.right])
            )?;
        }
        Ok(())
    }
}

/// Parses a parenthesized binary tree with 1-based leaf labels, for example
/// `((1,2),(3,4))`. Every leaf `1..=n` must appear exactly once.
impl FromStr for Tree {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        enum Node {
            Leaf(usize),
            Join(Box<Node>, Box<Node>),
        }

        fn parse(chars: &[char], pos: &mut usize) -> Result<Node> {
            skip_ws(chars, pos);
            match chars.get(*pos) {
                Some('(') => {
                    *pos += 1;
                    let left = parse(chars, pos)?;
                    skip_ws(chars, pos);
                    if chars.get(*pos) != Some(&',') {
                        return Err(Error::MalformedTree(format!("expected ',' at {}", *pos)));
                    }
                    *pos += 1;
                    let right = parse(chars, pos)?;
                    skip_ws(chars, pos);
                    if chars.get(*pos) != Some(&')') {
                        return Err(Error::MalformedTree(format!("expected ')' at {}", *pos)));
                    }
                    *pos += 1;
                    Ok(Node::Join(Box::new(left), Box::new(right)))
                }
                Some(c) if c.is_ascii_digit() => {
                    let start = *pos;
                    while chars.get(*pos).is_some_and(|c| c.is_ascii_digit()) {
                        *pos += 1;
                    }
                    let text: String = chars[start..*pos].iter().collect();
                    let label: usize = text
                        .parse()
                        .map_err(|_| Error::MalformedTree(format!("bad label '{text}'")))?;
                    if label == 0 {
                        return Err(Error::MalformedTree("labels start at 1".into()));
                    }
                    Ok(Node::Leaf(label - 1))
                }
                _ => Err(Error::MalformedTree(format!("unexpected input at {}", *pos))),
            }
        }

        fn skip_ws(chars: &[char], pos: &mut usize) {
            while chars.get(*pos).is_some_and(|c| c.is_whitespace()) {
                *pos += 1;
            }
        }

        // Post-order walk; returns the cluster id of the subtree.
        fn emit(node: &Node, n: usize, merges: &mut Vec<Merge>) -> usize {
            match node {
                Node::Leaf(i) => *i,
                Node::Join(a, b) => {
                    let left = emit(a, n, merges);
                    let right = emit(b, n, merges);
                    merges.push(Merge { left, right });
                    n + merges.len() - 1
                }
            }
        }

        fn leaves(node: &Node, out: &mut Vec<usize>) {
            match node {
                Node::Leaf(i) => out.push(*i),
                Node::Join(a, b) => {
                    leaves(a, out);
                    leaves(b, out);
                }
            }
        }

        let chars: Vec<char> = s.chars().collect();
        let mut pos = 0;
        let root = parse(&chars, &mut pos)?;
        skip_ws(&chars, &mut pos);
        if pos != chars.len() {
            return Err(Error::MalformedTree(format!("trailing input at {pos}")));
        }
        let mut labels = Vec::new();
        leaves(&root, &mut labels);
        let n = labels.len();
        let mut seen = vec![false; n];
        for &l in &labels {
            if l >= n || seen[l] {
                return Err(Error::MalformedTree(format!(
                    "leaf labels must be exactly 1..={n}"
                )));
            }
            seen[l] = true;
        }
        let mut merges = Vec::with_capacity(n.saturating_sub(1));
        emit(&root, n, &mut merges);
        Tree::new(n, merges)
    }
}

/// Leaf count of the lowest common ancestor of every pair.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PairSizeTable {
    n: usize,
    sizes: Vec<u32>,
}

impl PairSizeTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.sizes[pair_index(self.n, i, j)]
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn total(&self) -> u64 {
        self.sizes.iter().map(|&s| u64::from(s)).sum()
    }
}

pub fn lca_sizes(tree: &Tree) -> PairSizeTable {
    let n = tree.n;
    let mut members: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    let mut sizes = vec![0u32; pair_count(n)];
    for m in &tree.merges {
        let size = (members[m.left].len() + members[m.right].len()) as u32;
        for &a in &members[m.left] {
            for &b in &members[m.right] {
                sizes[pair_index(n, a, b)] = size;
            }
        }
        let mut union = std::mem::take(&mut members[m.left]);
        union.append(&mut members[m.right]);
        members.push(union);
    }
    PairSizeTable { n, sizes }
}

pub fn tree_to_indicator(tree: &Tree) -> LevelIndicator {
    indicator_from_sizes(&lca_sizes(tree))
}

pub fn indicator_from_sizes(table: &PairSizeTable) -> LevelIndicator {
    let n = table.n;
    let mut x = LevelIndicator::filled(n, 0);
    for (p, &s) in table.sizes.iter().enumerate() {
        for t in 1..n {
            x.values[p * (n - 1) + t - 1] = u8::from(s as usize > t);
        }
    }
    x
}

/// A violated constraint of the tree polytope. Point indices are 0-based,
/// levels 1-based.
#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// `x(i,j,t) < x(i,j,t+1)`.
    Monotonicity { i: usize, j: usize, t: usize },
    /// `x(i,j,t) + x(j,k,t) < x(i,k,t)`.
    Triangle { i: usize, j: usize, k: usize, t: usize },
    /// Fewer than `|set| - t` members of `set` separated from `i` at level `t`.
    Spreading {
        i: usize,
        t: usize,
        set: Vec<usize>,
        amount: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Monotonicity { i, j, t } => {
                write!(f, "monotonicity(i={}, j={}, t={t})", i + 1, j + 1)
            }
            Violation::Triangle { i, j, k, t } => {
                write!(f, "triangle(i={}, j={}, k={}, t={t})", i + 1, j + 1, k + 1)
            }
            Violation::Spreading { i, t, set, amount } => {
                let labels: Vec<String> = set.iter().map(|m| (m + 1).to_string()).collect();
                write!(
                    f,
                    "spreading(i={}, t={t}, S={{{}}}, by {amount})",
                    i + 1,
                    labels.join(",")
                )
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Verdict {
    pub violations: Vec<Violation>,
}

impl Verdict {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks a binary tensor against monotonicity, the per-level triangle
/// inequality and the spreading family.
pub fn validate_indicator(x: &LevelIndicator) -> Result<Verdict> {
    if let Some((index, &value)) = x.values.iter().enumerate().find(|(_, &v)| v > 1) {
        return Err(Error::NonBinaryEntry { index, value });
    }
    let n = x.n;
    let mut violations = Vec::new();

    for (i, j) in pairs(n) {
        for t in 1..n - 1 {
            if x.get(i, j, t) < x.get(i, j, t + 1) {
                violations.push(Violation::Monotonicity { i, j, t });
            }
        }
    }

    for t in 1..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    if i == j || j == k || i >= k {
                        continue;
                    }
                    if x.get(i, j, t) + x.get(j, k, t) < x.get(i, k, t) {
                        violations.push(Violation::Triangle { i, j, k, t });
                    }
                }
            }
        }
    }

    let y = x.to_fractional();
    for t in 1..n {
        for i in 0..n {
            let worst = if n <= EXHAUSTIVE_SPREADING_LIMIT {
                exhaustive_spreading(&y, i, t)
            } else {
                most_violated_spreading(&y, i, t)
            };
            if let Some((set, amount)) = worst {
                if amount > 0.0 {
                    violations.push(Violation::Spreading { i, t, set, amount });
                }
            }
        }
    }
    Ok(Verdict { violations })
}

/// Scans every `S ∋ i` with `|S| > t` and returns the set maximising
/// `|S| - t - Σ_{j ∈ S\{i}} y(i,j,t)` (smallest such set on ties).
fn exhaustive_spreading(y: &FractionalHierarchy, i: usize, t: usize) -> Option<(Vec<usize>, f64)> {
    let others: Vec<usize> = (0..y.n).filter(|&j| j != i).collect();
    let mut best: Option<(Vec<usize>, f64)> = None;
    for mask in 0u32..(1 << others.len()) {
        let size = mask.count_ones() as usize + 1;
        if size <= t {
            continue;
        }
        let mut sum = 0.0;
        let mut set = vec![i];
        for (b, &j) in others.iter().enumerate() {
            if mask & (1 << b) != 0 {
                sum += y.get(i, j, t);
                set.push(j);
            }
        }
        let amount = (size - t) as f64 - sum;
        let better = match &best {
            None => true,
            Some((s, a)) => amount > *a || (amount == *a && set.len() < s.len()),
        };
        if better {
            set.sort_unstable();
            best = Some((set, amount));
        }
    }
    best
}

/// Streams every labeled binary hierarchy over `n` leaves exactly once.
///
/// Trees are decoded from insertion codes: leaf `k` (0-based, `k >= 2`) is
/// attached above one of the `2k - 1` nodes of the tree built so far, which
/// yields `(2n - 3)!!` distinct hierarchies.
pub fn enumerate_trees(n: usize, cap: usize) -> Result<TreeEnumerator> {
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(TreeEnumerator {
        n,
        code: vec![0; n - 2],
        done: false,
    })
}

/// Number of labeled binary hierarchies, `(2n - 3)!!`.
pub fn tree_count(n: usize) -> u64 {
    (2..n as u64).map(|k| 2 * k - 1).product()
}

pub struct TreeEnumerator {
    n: usize,
    code: Vec<usize>,
    done: bool,
}

impl TreeEnumerator {
    fn decode(&self) -> Tree {
        let n = self.n;
        // Node ids: leaves 0..n, internal nodes n.. in creation order.
        let mut parent: Vec<Option<usize>> = vec![None; 2 * n - 1];
        let mut children: Vec<[usize; 2]> = vec![[0, 0]; n - 1];
        // Existing nodes in the order they may be chosen.
        let mut order: Vec<usize> = vec![0, 1, n];
        children[0] = [0, 1];
        parent[0] = Some(n);
        parent[1] = Some(n);
        let mut next_internal = n + 1;
        for (step, &c) in self.code.iter().enumerate() {
            let leaf = step + 2;
            let v = order[c];
            let w = next_internal;
            next_internal += 1;
            if let Some(p) = parent[v] {
                let slot = &mut children[p - n];
                if slot[0] == v {
                    slot[0] = w;
                } else {
                    slot[1] = w;
                }
            }
            parent[w] = parent[v];
            parent[v] = Some(w);
            parent[leaf] = Some(w);
            children[w - n] = [v, leaf];
            order.push(leaf);
            order.push(w);
        }

        // Sizes and minimum labels of every internal node.
        let internal = n - 1;
        let mut size = vec![0usize; internal];
        let mut min_leaf = vec![usize::MAX; internal];
        fn fill(node: usize, n: usize, ch: &[[usize; 2]], size: &mut [usize], min: &mut [usize]) -> (usize, usize) {
            if node < n {
                return (1, node);
            }
            let [a, b] = ch[node - n];
            let (sa, ma) = fill(a, n, ch, size, min);
            let (sb, mb) = fill(b, n, ch, size, min);
            size[node - n] = sa + sb;
            min[node - n] = ma.min(mb);
            (sa + sb, ma.min(mb))
        }
        let root = (n..2 * n - 1).find(|&v| parent[v].is_none()).expect("tree has a root");
        fill(root, n, &children, &mut size, &mut min_leaf);

        // Children precede parents when sorted by size.
        let mut nodes: Vec<usize> = (n..2 * n - 1).collect();
        nodes.sort_by_key(|&v| (size[v - n], min_leaf[v - n]));
        let mut cluster_id = vec![0usize; 2 * n - 1];
        for (i, id) in cluster_id.iter_mut().enumerate().take(n) {
            *id = i;
        }
        let mut merges = Vec::with_capacity(internal);
        let min_of = |v: usize| if v < n { v } else { min_leaf[v - n] };
        for (k, &v) in nodes.iter().enumerate() {
            let [a, b] = children[v - n];
            let (a, b) = if min_of(a) < min_of(b) { (a, b) } else { (b, a) };
            merges.push(Merge {
                left: cluster_id[a],
                right: cluster_id[b],
            });
            cluster_id[v] = n + k;
        }
        Tree { n, merges }
    }

    fn advance(&mut self) {
        for pos in (0..self.code.len()).rev() {
            let radix = 2 * (pos + 2) - 1;
            self.code[pos] += 1;
            if self.code[pos] < radix {
                return;
            }
            self.code[pos] = 0;
        }
        self.done = true;
    }
}

impl Iterator for TreeEnumerator {
    type Item = Tree;

    fn next(&mut self) -> Option<Tree> {
        if self.done {
            return None;
        }
        let tree = self.decode();
        self.advance();
        Some(tree)
    }
}
