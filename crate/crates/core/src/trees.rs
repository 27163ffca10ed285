//! Rooted-tree expansion of the inverse series.
//!
//! Every order-N coefficient of the inverse is a sum over decorated planar
//! trees: vertices are symmetric tensor entries of the map, leaves are
//! variable occurrences, and every edge carries the index shared by the
//! tensor slots it connects. Planar (ordered-children) enumeration with no
//! factorial prefactor reproduces the fixed-point iteration exactly; the
//! `tree_sum == invert_truncated` equivalence is asserted in tests and is
//! the normalization contract for everything downstream.
//!
//! On top of the enumeration sit the edge orders (ancestor partial order and
//! its depth-first total extension), the alignment filter that removes trees
//! with comparable same-index edge pairs unseparated by a smaller index, the
//! restricted sums, and the factorization identity comparing the full sum
//! with the level-n restricted sum.

use std::collections::HashMap;
use std::rc::Rc;

use crate::error::{Error, Result};
use crate::map::{PolyMap, VertexView};
use crate::poly::{Monomial, Polynomial};
use crate::report::IdentityReport;
use crate::scalar::Scalar;

/// A subtree hanging below one edge: either a leaf (a variable occurrence)
/// or a vertex with its ordered children, each reached through an edge of
/// the recorded index.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Node {
    Leaf,
    Vertex(Vec<(usize, Node)>),
}

/// Decorated planar rooted tree. The root edge enters from outside and
/// carries `root_index` (zero-based component index).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tree {
    pub root_index: usize,
    pub root: Node,
}

impl Node {
    fn leaves(&self) -> usize {
        match self {
            Node::Leaf => 1,
            Node::Vertex(ch) => ch.iter().map(|(_, c)| c.leaves()).sum(),
        }
    }

    fn vertices(&self) -> usize {
        match self {
            Node::Leaf => 0,
            Node::Vertex(ch) => 1 + ch.iter().map(|(_, c)| c.vertices()).sum::<usize>(),
        }
    }

    /// Longest edge chain strictly below this node.
    fn depth(&self) -> usize {
        match self {
            Node::Leaf => 0,
            Node::Vertex(ch) => 1 + ch.iter().map(|(_, c)| c.depth()).max().unwrap_or(0),
        }
    }
}

impl Tree {
    /// Number of leaves = order of the contribution = degree of the monomial.
    pub fn leaves(&self) -> usize {
        self.root.leaves()
    }

    pub fn vertices(&self) -> usize {
        self.root.vertices()
    }

    /// Maximal number of edges in a chain of nested edges (root edge
    /// included), i.e. the longest root-to-leaf path.
    pub fn length(&self) -> usize {
        1 + self.root.depth()
    }

    pub fn edge_list(&self) -> EdgeList {
        let mut edges = EdgeList {
            index: Vec::new(),
            parent: Vec::new(),
            end: Vec::new(),
        };
        edges.visit(self.root_index, &self.root, None);
        edges
    }
}

/// Flattened edge set of one tree in depth-first pre-order. An edge is
/// identified by its pre-order position; the subtree below edge `e` occupies
/// the contiguous id range `e..end(e)`, which makes both orders O(1):
/// ancestor testing by interval containment and the around-tree total order
/// by id comparison.
pub struct EdgeList {
    index: Vec<usize>,
    parent: Vec<Option<usize>>,
    end: Vec<usize>,
}

impl EdgeList {
    fn visit(&mut self, index: usize, node: &Node, parent: Option<usize>) {
        let id = self.index.len();
        self.index.push(index);
        self.parent.push(parent);
        self.end.push(0);
        if let Node::Vertex(children) = node {
            for (child_index, child) in children {
                self.visit(*child_index, child, Some(id));
            }
        }
        self.end[id] = self.index.len();
    }

    pub fn len(&self) -> usize {
        self.index.len()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    /// Index carried by edge `e` (zero-based variable index).
    pub fn index(&self, e: usize) -> usize {
        self.index[e]
    }

    pub fn parent(&self, e: usize) -> Option<usize> {
        self.parent[e]
    }

    /// Strict partial order: `a` precedes `b` when `a` enters an ancestor
    /// vertex of the vertex or leaf that `b` enters.
    pub fn tree_lt(&self, a: usize, b: usize) -> bool {
        a != b && a <= b && b < self.end[a]
    }

    /// Total order extending [`EdgeList::tree_lt`]: depth-first pre-order,
    /// which orders sibling edges left to right.
    pub fn around_lt(&self, a: usize, b: usize) -> bool {
        a < b
    }
}

/// Verdict of the level-`k` alignment filter on one tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlignmentVerdict {
    pub level: usize,
    pub survives: bool,
    /// Pre-order edge ids `(ancestor, descendant)` of the first offending
    /// pair when the tree is filtered out.
    pub witness: Option<(usize, usize)>,
}

/// Level-`k` filter under the standard index order: the tree survives iff
/// for every index `q` among the `k` smallest, no two edges of index `q`
/// are nested with no smaller-index edge strictly between them.
pub fn alignment_filter(t: &Tree, k: usize) -> AlignmentVerdict {
    let n = 1 + t
        .edge_list()
        .index
        .iter()
        .copied()
        .max()
        .unwrap_or(0);
    let rank: Vec<usize> = (0..n).collect();
    alignment_filter_ranked(t, k, &rank)
}

/// Alignment filter with an explicit priority ranking of the indices:
/// `rank[i]` is the position of index `i` in the order the filter uses, so
/// level `k` constrains the indices of rank below `k` and "smaller index"
/// means smaller rank. The identity ranking recovers [`alignment_filter`].
pub fn alignment_filter_ranked(t: &Tree, k: usize, rank: &[usize]) -> AlignmentVerdict {
    let edges = t.edge_list();
    for b in 0..edges.len() {
        let q = edges.index(b);
        if rank[q] >= k {
            continue;
        }
        // climb from b to the root; `between` holds the edges strictly
        // between the current ancestor and b
        let mut between: Vec<usize> = Vec::new();
        let mut cursor = edges.parent(b);
        while let Some(a) = cursor {
            if edges.index(a) == q {
                let separated = between.iter().any(|&c| rank[edges.index(c)] < rank[q]);
                if !separated {
                    return AlignmentVerdict {
                        level: k,
                        survives: false,
                        witness: Some((a, b)),
                    };
                }
            }
            between.push(a);
            cursor = edges.parent(a);
        }
    }
    AlignmentVerdict {
        level: k,
        survives: true,
        witness: None,
    }
}

/// Work limits for exhaustive tree enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumGuard {
    pub max_order: usize,
    pub max_dim: usize,
    pub max_degree: usize,
}

impl Default for EnumGuard {
    fn default() -> Self {
        EnumGuard {
            max_order: 8,
            max_dim: 3,
            max_degree: 3,
        }
    }
}

impl EnumGuard {
    pub fn admit(&self, n: usize, d: usize, order: usize) -> Result<()> {
        if order > self.max_order {
            return Err(Error::GuardExceeded {
                what: "tree enumeration order",
                requested: order,
                limit: self.max_order,
            });
        }
        if n > self.max_dim {
            return Err(Error::GuardExceeded {
                what: "tree enumeration dimension",
                requested: n,
                limit: self.max_dim,
            });
        }
        if d > self.max_degree {
            return Err(Error::GuardExceeded {
                what: "tree enumeration degree",
                requested: d,
                limit: self.max_degree,
            });
        }
        Ok(())
    }
}

/// All ordered arrangements of a sorted multiset, without repeats.
fn distinct_permutations(sorted: &[usize]) -> Vec<Vec<usize>> {
    if sorted.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    let mut previous: Option<usize> = None;
    for pos in 0..sorted.len() {
        let head = sorted[pos];
        if previous == Some(head) {
            continue;
        }
        previous = Some(head);
        let mut rest = sorted.to_vec();
        rest.remove(pos);
        for mut tail in distinct_permutations(&rest) {
            let mut arrangement = vec![head];
            arrangement.append(&mut tail);
            out.push(arrangement);
        }
    }
    out
}

/// All ways to write `total` as an ordered sum of `parts` positive integers.
fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    if parts == 0 {
        return if total == 0 { vec![vec![]] } else { vec![] };
    }
    if parts == 1 {
        return if total >= 1 { vec![vec![total]] } else { vec![] };
    }
    let mut out = Vec::new();
    for first in 1..=total.saturating_sub(parts - 1) {
        for mut rest in compositions(total - first, parts - 1) {
            let mut c = vec![first];
            c.append(&mut rest);
            out.push(c);
        }
    }
    out
}

struct Enumerator {
    /// per component: ordered child-index tuples with a nonzero tensor entry
    arrangements: Vec<Vec<Vec<usize>>>,
    memo: HashMap<(usize, usize), Rc<Vec<Node>>>,
}

impl Enumerator {
    fn new<T: Scalar>(view: &VertexView<T>) -> Self {
        let n = view.dim();
        let arrangements = (0..n)
            .map(|i| {
                let mut all = Vec::new();
                for (tuple, _) in view.tuples(i) {
                    if tuple.len() >= 2 {
                        all.extend(distinct_permutations(tuple));
                    }
                }
                all
            })
            .collect();
        Enumerator {
            arrangements,
            memo: HashMap::new(),
        }
    }

    /// Every subtree hanging below an edge of the given index with exactly
    /// `leaves` leaves.
    fn subtrees(&mut self, index: usize, leaves: usize) -> Rc<Vec<Node>> {
        if let Some(hit) = self.memo.get(&(index, leaves)) {
            return Rc::clone(hit);
        }
        let mut out = Vec::new();
        if leaves == 1 {
            out.push(Node::Leaf);
        }
        if leaves >= 2 {
            let tuples = self.arrangements[index].clone();
            for tuple in tuples {
                let q = tuple.len();
                if q > leaves {
                    continue;
                }
                for split in compositions(leaves, q) {
                    let per_child: Vec<Rc<Vec<Node>>> = tuple
                        .iter()
                        .zip(&split)
                        .map(|(&j, &nk)| self.subtrees(j, nk))
                        .collect();
                    let mut partial: Vec<Vec<(usize, Node)>> = vec![Vec::new()];
                    for (slot, options) in per_child.iter().enumerate() {
                        let mut next = Vec::new();
                        for stem in &partial {
                            for option in options.iter() {
                                let mut grown = stem.clone();
                                grown.push((tuple[slot], option.clone()));
                                next.push(grown);
                            }
                        }
                        partial = next;
                    }
                    out.extend(partial.into_iter().map(Node::Vertex));
                }
            }
        }
        let rc = Rc::new(out);
        self.memo.insert((index, leaves), Rc::clone(&rc));
        rc
    }
}

/// Every decorated tree of the given order (leaf count), for every root
/// index, each planar tree exactly once. Deterministic order: root index
/// ascending, then construction order.
pub fn enumerate_trees<T: Scalar>(v: &PolyMap<T>, order: usize) -> Result<Vec<Tree>> {
    if order < 1 {
        return Err(Error::CapTooSmall);
    }
    if v.has_linear_part() {
        return Err(Error::LinearPartPresent);
    }
    let view = v.vertex_view();
    let mut enumerator = Enumerator::new(&view);
    let mut out = Vec::new();
    for root_index in 0..v.n() {
        for node in enumerator.subtrees(root_index, order).iter() {
            out.push(Tree {
                root_index,
                root: node.clone(),
            });
        }
    }
    Ok(out)
}

/// Contribution of one tree: the product of its vertices' tensor entries
/// times the monomial collecting its leaves. Zero when some vertex has no
/// matching tensor entry.
pub fn tree_value<T: Scalar>(t: &Tree, v: &PolyMap<T>) -> Polynomial<T> {
    tree_value_with_view(t, &v.vertex_view(), v.n())
}

/// Same as [`tree_value`] against a prebuilt tensor view.
pub fn tree_value_with_view<T: Scalar>(
    t: &Tree,
    view: &VertexView<T>,
    n: usize,
) -> Polynomial<T> {
    let mut coeff = T::one();
    let mut exps = vec![0usize; n];
    if accumulate(&t.root, t.root_index, view, &mut coeff, &mut exps) {
        Polynomial::from_terms(n, [(Monomial(exps), coeff)])
    } else {
        Polynomial::zero(n)
    }
}

fn accumulate<T: Scalar>(
    node: &Node,
    in_index: usize,
    view: &VertexView<T>,
    coeff: &mut T,
    exps: &mut Vec<usize>,
) -> bool {
    match node {
        Node::Leaf => {
            exps[in_index] += 1;
            true
        }
        Node::Vertex(children) => {
            let mut sorted: Vec<usize> = children.iter().map(|(j, _)| *j).collect();
            sorted.sort_unstable();
            match view.entry(in_index, &sorted) {
                None => false,
                Some(e) => {
                    *coeff = coeff.clone() * e.clone();
                    children
                        .iter()
                        .all(|(j, child)| accumulate(child, *j, view, coeff, exps))
                }
            }
        }
    }
}

/// Sum of all tree contributions through the given order, one polynomial per
/// root index. Must agree with the truncated fixed-point inverse — that
/// equivalence is this module's contract and is enforced in the test suite.
pub fn tree_sum<T: Scalar>(
    v: &PolyMap<T>,
    cap: usize,
    guard: &EnumGuard,
) -> Result<Vec<Polynomial<T>>> {
    restricted_sum_ranked(v, cap, 0, &(0..v.n()).collect::<Vec<_>>(), guard)
}

/// Sum over the trees surviving the level-`k` alignment filter.
pub fn restricted_sum<T: Scalar>(
    v: &PolyMap<T>,
    cap: usize,
    k: usize,
    guard: &EnumGuard,
) -> Result<Vec<Polynomial<T>>> {
    restricted_sum_ranked(v, cap, k, &(0..v.n()).collect::<Vec<_>>(), guard)
}

/// Restricted sum under an explicit index ranking, see
/// [`alignment_filter_ranked`]. Level 0 means no filtering.
pub fn restricted_sum_ranked<T: Scalar>(
    v: &PolyMap<T>,
    cap: usize,
    k: usize,
    rank: &[usize],
    guard: &EnumGuard,
) -> Result<Vec<Polynomial<T>>> {
    guard.admit(v.n(), v.degree(), cap)?;
    let n = v.n();
    let view = v.vertex_view();
    let mut sums = vec![Polynomial::zero(n); n];
    for order in 1..=cap {
        for tree in enumerate_trees(v, order)? {
            if k > 0 && !alignment_filter_ranked(&tree, k, rank).survives {
                continue;
            }
            let value = tree_value_with_view(&tree, &view, n);
            sums[tree.root_index] = &sums[tree.root_index] + &value;
        }
    }
    Ok(sums)
}

/// Everything the factorization identity check reports.
#[derive(Debug, Clone)]
pub struct FactorizationReport {
    /// Full tree sum == level-n restricted sum, coefficientwise through cap.
    pub identity: IdentityReport,
    /// Largest length among level-n survivors (0 when none).
    pub max_survivor_length: usize,
    /// Survivor length never exceeds `2^n - 1`.
    pub length_bound: IdentityReport,
    /// Survivor monomial degree never exceeds `d^(length-1)`.
    pub degree_per_length: IdentityReport,
}

/// Compare the full tree sum with the level-`n` restricted sum and check the
/// structural bounds on the surviving trees. Refuses maps that fail the
/// Jacobian test: the identity is only claimed under it, so running the
/// check elsewhere would conflate "identity fails" with "hypothesis absent".
pub fn factorization_check<T: Scalar>(
    v: &PolyMap<T>,
    cap: usize,
    guard: &EnumGuard,
) -> Result<FactorizationReport> {
    guard.admit(v.n(), v.degree(), cap)?;
    if !v.keller_check().is_keller {
        return Err(Error::NonKellerInput);
    }
    let n = v.n();
    let full = tree_sum(v, cap, guard)?;
    let restricted = restricted_sum(v, cap, n, guard)?;
    let mut identity = IdentityReport::holds("full_sum_equals_level_n_restricted_sum");
    'search: for i in 0..n {
        let difference = &full[i] - &restricted[i];
        let first = difference.terms().next().map(|(m, _)| m.clone());
        if let Some(m) = first {
            let monomial =
                Polynomial::from_terms(n, [(m.clone(), T::one())]).to_string_with("y");
            identity = IdentityReport::fails(
                "full_sum_equals_level_n_restricted_sum",
                format!(
                    "component {}, monomial {}: unrestricted {}, restricted {}",
                    i + 1,
                    monomial,
                    full[i].coeff(&m),
                    restricted[i].coeff(&m)
                ),
            );
            break 'search;
        }
    }
    let length_limit = (1usize << n) - 1;
    let mut max_survivor_length = 0;
    let mut length_bound = IdentityReport::holds("survivor_length_bound");
    let mut degree_per_length = IdentityReport::holds("survivor_degree_per_length_bound");
    for order in 1..=cap {
        for tree in enumerate_trees(v, order)? {
            if !alignment_filter(&tree, n).survives {
                continue;
            }
            let length = tree.length();
            max_survivor_length = max_survivor_length.max(length);
            if length > length_limit && length_bound.holds {
                length_bound = IdentityReport::fails(
                    "survivor_length_bound",
                    format!("survivor of length {length} exceeds 2^n - 1 = {length_limit}"),
                );
            }
            let degree_limit = v.degree().pow((length - 1) as u32);
            if order > degree_limit && degree_per_length.holds {
                degree_per_length = IdentityReport::fails(
                    "survivor_degree_per_length_bound",
                    format!(
                        "length-{length} survivor has degree {order}, above d^(L-1) = {degree_limit}"
                    ),
                );
            }
        }
    }
    Ok(FactorizationReport {
        identity,
        max_survivor_length,
        length_bound,
        degree_per_length,
    })
}
