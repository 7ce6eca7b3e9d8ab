//! Typed angularly decorated planar rooted trees and the free Ω-Rota–Baxter
//! algebra they span.
//!
//! Text form: `(| x |)` is the corolla with one angle `x`, `[w]T` is an
//! internal edge of type `w` above the root leading to `T`, so
//! `([w](| x |))` is `B⁺_w` of that corolla. The unit is `(|)`.

use std::cmp::Ordering;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, LazyLock, Weak};

use dashmap::DashMap;
use itertools::Itertools;
use rustc_hash::FxBuildHasher;

use crate::cursor::Cursor;
use crate::error::{Error, ParseError, Result};
use crate::omega::{OmegaStructure, Signature};
use crate::rba::{dendriform_from, rb_expansion, OmegaRba};
use crate::scalars::{FormalSum, Scalar};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Child {
    Leaf,
    Edge(usize, Tree),
}

impl Child {
    fn ty(&self) -> Option<usize> {
        match self {
            Child::Leaf => None,
            Child::Edge(t, _) => Some(*t),
        }
    }

    fn subtree(&self) -> Option<&Tree> {
        match self {
            Child::Leaf => None,
            Child::Edge(_, s) => Some(s),
        }
    }

    fn leaves(&self) -> usize {
        self.subtree().map_or(1, Tree::leaves)
    }
}

#[derive(Debug)]
struct Node {
    children: Vec<Child>,
    angles: Vec<usize>,
    hash: u64,
    leaves: usize,
    depth: usize,
}

// Every live node is registered here by structural hash, so structurally
// equal trees are the same allocation.
static INTERNER: LazyLock<DashMap<u64, Vec<Weak<Node>>, FxBuildHasher>> = LazyLock::new(DashMap::default);

fn mix(h: u64, x: u64) -> u64 {
    let z = (h ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    (z ^ (z >> 31)).wrapping_mul(0x94d0_49bb_1331_11eb).rotate_left(17)
}

impl Drop for Node {
    fn drop(&mut self) {
        let empty = match INTERNER.get_mut(&self.hash) {
            Some(mut bucket) => {
                bucket.retain(|w| w.strong_count() > 0);
                bucket.is_empty()
            }
            None => false,
        };
        if empty {
            INTERNER.remove_if(&self.hash, |_, b| b.is_empty());
        }
    }
}

/// A tree other than the bare `|`: a root with `k ≥ 1` children and `k - 1`
/// angle decorations. Trees are hash-consed, so cloning is cheap and
/// equality is pointer equality.
#[derive(Clone)]
pub struct Tree(Arc<Node>);

pub type TreeSum = FormalSum<Tree>;

impl Hash for Tree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        state.write_u64(self.0.hash);
    }
}

impl PartialEq for Tree {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }
}

impl Eq for Tree {}

/// Orders by the structural hash first, then recursively by arity, angles,
/// edge types and subtrees. The hash is a fixed function of the structure,
/// so the order is the same on every run and platform.
impl Ord for Tree {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (&self.0, &other.0);
        a.hash.cmp(&b.hash).then_with(|| {
            a.children
                .len()
                .cmp(&b.children.len())
                .then_with(|| a.angles.cmp(&b.angles))
                .then_with(|| a.children.iter().map(Child::ty).cmp(b.children.iter().map(Child::ty)))
                .then_with(|| a.children.iter().map(Child::subtree).cmp(b.children.iter().map(Child::subtree)))
        })
    }
}

impl PartialOrd for Tree {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl std::fmt::Debug for Tree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Tree").field("children", &self.0.children).field("angles", &self.0.angles).finish()
    }
}

impl Tree {
    fn build(children: Vec<Child>, angles: Vec<usize>) -> Self {
        let mut h = mix(0x243f_6a88_85a3_08d3, angles.len() as u64);
        for &x in &angles {
            h = mix(h, x as u64);
        }
        for c in &children {
            h = match c {
                Child::Leaf => mix(h, 1),
                Child::Edge(w, s) => mix(mix(h, 2 + *w as u64), s.0.hash),
            };
        }
        let leaves = children.iter().map(Child::leaves).sum();
        let depth = 1 + children.iter().filter_map(Child::subtree).map(Tree::depth).max().unwrap_or(0);
        let hash = h;
        let mut node = Some(Node { children, angles, hash, leaves, depth });
        // Anything that might drop a node must wait until the bucket lock is
        // released, since dropping a node takes that lock again.
        let mut others = Vec::new();
        let tree = {
            let mut bucket = INTERNER.entry(hash).or_default();
            let n = node.as_ref().unwrap();
            let mut hit = None;
            for live in bucket.iter().filter_map(Weak::upgrade) {
                if live.angles == n.angles && live.children == n.children {
                    hit = Some(live);
                    break;
                }
                others.push(live);
            }
            hit.unwrap_or_else(|| {
                let fresh = Arc::new(node.take().unwrap());
                bucket.push(Arc::downgrade(&fresh));
                fresh
            })
        };
        drop(others);
        drop(node);
        Tree(tree)
    }

    pub fn new(children: Vec<Child>, angles: Vec<usize>) -> Result<Self> {
        if children.is_empty() || angles.len() + 1 != children.len() {
            return Err(Error::InvalidStructure(format!(
                "a tree with {} children needs {} angles, got {}",
                children.len(),
                children.len().saturating_sub(1),
                angles.len()
            )));
        }
        Ok(Self::build(children, angles))
    }

    pub fn unit() -> Self {
        Self::build(vec![Child::Leaf], vec![])
    }

    /// The depth-one tree whose angles read `angles` from left to right.
    pub fn corolla(angles: &[usize]) -> Self {
        Self::build(vec![Child::Leaf; angles.len() + 1], angles.to_vec())
    }

    pub fn graft(omega: usize, t: Tree) -> Self {
        Self::build(vec![Child::Edge(omega, t)], vec![])
    }

    pub fn children(&self) -> &[Child] {
        &self.0.children
    }

    pub fn angles(&self) -> &[usize] {
        &self.0.angles
    }

    pub fn depth(&self) -> usize {
        self.0.depth
    }

    pub fn branches(&self) -> usize {
        self.0.children.len()
    }

    pub fn leaves(&self) -> usize {
        self.0.leaves
    }

    pub fn internal_edges(&self) -> usize {
        self.children().iter().filter_map(Child::subtree).map(|s| 1 + s.internal_edges()).sum()
    }

    pub fn decorations(&self) -> usize {
        self.angles().len() + self.children().iter().filter_map(Child::subtree).map(Tree::decorations).sum::<usize>()
    }

    /// Replaces every angle label in preorder, left to right.
    pub fn map_angles(&self, f: &mut impl FnMut(usize) -> usize) -> Tree {
        let mut angles = Vec::with_capacity(self.angles().len());
        let mut children = Vec::with_capacity(self.branches());
        for (i, c) in self.children().iter().enumerate() {
            if i > 0 {
                angles.push(f(self.angles()[i - 1]));
            }
            children.push(match c {
                Child::Leaf => Child::Leaf,
                Child::Edge(w, s) => Child::Edge(*w, s.map_angles(f)),
            });
        }
        Self::build(children, angles)
    }

    fn splice(left: &Tree, mid: Child, right: &Tree) -> Tree {
        let (l, r) = (left.children(), right.children());
        let m = l.len() - 1;
        let mut children = Vec::with_capacity(m + r.len());
        children.extend_from_slice(&l[..m]);
        children.push(mid);
        children.extend_from_slice(&r[1..]);
        let mut angles = left.angles().to_vec();
        angles.extend_from_slice(right.angles());
        Self::build(children, angles)
    }
}

pub fn graft_sum(omega: usize, u: &TreeSum) -> TreeSum {
    u.map_basis(|t| Tree::graft(omega, t.clone()))
}

/// All trees of depth at most `depth` and at most `leaves` leaves, with
/// angles in `0..alphabet` and edge types in `0..types`, sorted by leaf
/// count and then by the tree order.
pub fn trees_up_to(alphabet: usize, types: usize, depth: usize, leaves: usize) -> Vec<Tree> {
    if depth == 0 || leaves == 0 {
        return Vec::new();
    }
    let mut options: Vec<(Child, usize)> = vec![(Child::Leaf, 1)];
    for t in trees_up_to(alphabet, types, depth - 1, leaves) {
        let l = t.leaves();
        for w in 0..types {
            options.push((Child::Edge(w, t.clone()), l));
        }
    }
    let mut out = Vec::new();
    let mut children = Vec::new();
    let mut angles = Vec::new();
    extend(&options, alphabet, leaves, &mut children, &mut angles, &mut out);
    out.sort_by(|a, b| a.leaves().cmp(&b.leaves()).then_with(|| a.cmp(b)));
    out
}

/// The unit and every `B⁺_ω(S)` with `S` of depth below `depth` and at most
/// `leaves` leaves.
pub fn single_branch_trees(alphabet: usize, types: usize, depth: usize, leaves: usize) -> Vec<Tree> {
    let mut out = vec![Tree::unit()];
    for s in trees_up_to(alphabet, types, depth.saturating_sub(1), leaves) {
        out.extend((0..types).map(|w| Tree::graft(w, s.clone())));
    }
    out.sort_by(|a, b| a.leaves().cmp(&b.leaves()).then_with(|| a.cmp(b)));
    out
}

fn extend(
    options: &[(Child, usize)],
    alphabet: usize,
    budget: usize,
    children: &mut Vec<Child>,
    angles: &mut Vec<usize>,
    out: &mut Vec<Tree>,
) {
    for (c, l) in options {
        if *l > budget {
            continue;
        }
        children.push(c.clone());
        out.push(Tree::build(children.clone(), angles.clone()));
        if budget > *l {
            for x in 0..alphabet {
                angles.push(x);
                extend(options, alphabet, budget - l, children, angles, out);
                angles.pop();
            }
        }
        children.pop();
    }
}

/// `k𝒯` over a fixed parameter signature, generator alphabet and type labels.
type EdgeKey = (usize, Tree, usize, Tree);

pub struct TreeAlgebra {
    sig: Signature,
    types: Vec<String>,
    alphabet: Vec<String>,
    memo: DashMap<EdgeKey, Arc<FormalSum<Child>>, FxBuildHasher>,
}

const MEMO_LIMIT: usize = 200_000;

impl TreeAlgebra {
    pub fn new(s: &OmegaStructure, alphabet: Vec<String>) -> Result<Self> {
        Ok(Self::with_signature(Signature::of(s)?, s.labels.clone(), alphabet))
    }

    /// The weight-zero algebra: only the EDS tables are read.
    pub fn weight_zero(s: &OmegaStructure, alphabet: Vec<String>) -> Result<Self> {
        Ok(Self::with_signature(Signature::weight_zero(s)?, s.labels.clone(), alphabet))
    }

    pub fn with_signature(sig: Signature, types: Vec<String>, alphabet: Vec<String>) -> Self {
        TreeAlgebra { sig, types, alphabet, memo: DashMap::default() }
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn unit_sum(&self) -> TreeSum {
        FormalSum::basis(Tree::unit())
    }

    pub fn generator(&self, x: usize) -> TreeSum {
        FormalSum::basis(Tree::corolla(&[x]))
    }

    pub fn graft(&self, omega: usize, u: &TreeSum) -> TreeSum {
        graft_sum(omega, u)
    }

    pub fn diamond(&self, u: &TreeSum, v: &TreeSum) -> TreeSum {
        let mut out = FormalSum::zero();
        for (a, c) in u.iter() {
            for (b, d) in v.iter() {
                out.add_scaled(&(c * d), &self.diamond_trees(a, b));
            }
        }
        out
    }

    pub fn diamond_trees(&self, t: &Tree, u: &Tree) -> TreeSum {
        let m = t.branches() - 1;
        match (&t.children()[m], &u.children()[0]) {
            (Child::Leaf, c) | (c, Child::Leaf) => FormalSum::basis(Tree::splice(t, c.clone(), u)),
            (Child::Edge(a, s), Child::Edge(b, s2)) => {
                self.edge_product(*a, s, *b, s2).map_basis(|c| Tree::splice(t, c.clone(), u))
            }
        }
    }

    fn edge_product(&self, a: usize, s: &Tree, b: usize, s2: &Tree) -> Arc<FormalSum<Child>> {
        let key = (a, s.clone(), b, s2.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Arc::clone(&hit);
        }
        let out = Arc::new(self.expand_edges(a, s, b, s2));
        if self.memo.len() >= MEMO_LIMIT {
            self.memo.clear();
        }
        self.memo.insert(key, Arc::clone(&out));
        out
    }

    /// `B⁺_α(S) ⋄ B⁺_β(S')` as a sum of single edges.
    fn expand_edges(&self, a: usize, s: &Tree, b: usize, s2: &Tree) -> FormalSum<Child> {
        let sig = &self.sig;
        let edge = |w: usize| move |r: &Tree| Child::Edge(w, r.clone());
        let first = self.diamond_trees(&Tree::graft(sig.rhd.get(a, b), s.clone()), s2);
        let mut out = first.map_basis(edge(sig.right.get(a, b)));
        let second = self.diamond_trees(s, &Tree::graft(sig.lhd.get(a, b), s2.clone()));
        out = out + second.map_basis(edge(sig.left.get(a, b)));
        let psi = sig.psi(a, b);
        if !psi.is_zero() {
            let inner = self.diamond_trees(s, s2);
            for (g, c) in psi.iter() {
                out.add_scaled(c, &inner.map_basis(edge(*g)));
            }
        }
        out
    }

    pub fn clear_memo(&self) {
        self.memo.clear();
    }

    /// The universal morphism `f̄` for `f` given on generators.
    pub fn evaluate<R: OmegaRba>(&self, u: &TreeSum, f: &dyn Fn(usize) -> R::Elem, r: &R) -> Result<R::Elem> {
        if r.signature() != &self.sig {
            return Err(Error::StructureMismatch);
        }
        let mut out = r.zero();
        for (t, c) in u.iter() {
            out = r.add(&out, &r.scale(c, &self.evaluate_tree(t, f, r)));
        }
        Ok(out)
    }

    fn evaluate_tree<R: OmegaRba>(&self, t: &Tree, f: &dyn Fn(usize) -> R::Elem, r: &R) -> R::Elem {
        let branch = |c: &Child| match c {
            Child::Leaf => None,
            Child::Edge(w, s) => Some(r.p(*w, &self.evaluate_tree(s, f, r))),
        };
        let mut acc = branch(&t.children()[0]).unwrap_or_else(|| r.one());
        for (x, c) in t.angles().iter().zip(&t.children()[1..]) {
            acc = r.mul(&acc, &f(*x));
            if let Some(b) = branch(c) {
                acc = r.mul(&acc, &b);
            }
        }
        acc
    }

    pub fn render_tree(&self, t: &Tree) -> String {
        let mut out = String::from("(");
        for (i, c) in t.children().iter().enumerate() {
            if i > 0 {
                out.push(' ');
                out.push_str(&self.alphabet[t.angles()[i - 1]]);
                out.push(' ');
            }
            match c {
                Child::Leaf => out.push('|'),
                Child::Edge(w, s) => {
                    out.push('[');
                    out.push_str(&self.types[*w]);
                    out.push(']');
                    out.push_str(&self.render_tree(s));
                }
            }
        }
        out.push(')');
        out
    }

    pub fn render_sum(&self, u: &TreeSum) -> String {
        u.render(|t| self.render_tree(t))
    }

    pub fn parse_tree(&self, text: &str) -> std::result::Result<Tree, ParseError> {
        let mut c = Cursor::new(text);
        let t = self.tree(&mut c)?;
        c.finish()?;
        Ok(t)
    }

    /// Parses a linear combination: `+`, `-`, scalars (meaning multiples of
    /// the unit), `*` for the product, `P[w](...)` for the operator and
    /// parentheses for grouping.
    pub fn parse_expr(&self, text: &str) -> std::result::Result<TreeSum, ParseError> {
        let mut c = Cursor::new(text);
        let e = self.expr(&mut c)?;
        c.finish()?;
        Ok(e)
    }

    fn lookup(c: &Cursor, labels: &[String], name: &str, what: &str) -> std::result::Result<usize, ParseError> {
        labels.iter().position(|l| l == name).ok_or_else(|| c.err(format!("unknown {what} label `{name}`")))
    }

    fn tree(&self, c: &mut Cursor) -> std::result::Result<Tree, ParseError> {
        c.expect('(')?;
        let mut children = vec![self.child(c)?];
        let mut angles = Vec::new();
        while !c.eat(')') {
            if c.at_end() {
                return Err(c.err("unclosed tree"));
            }
            let name = c.ident()?;
            angles.push(Self::lookup(c, &self.alphabet, &name, "generator")?);
            children.push(self.child(c)?);
        }
        Ok(Tree::build(children, angles))
    }

    fn child(&self, c: &mut Cursor) -> std::result::Result<Child, ParseError> {
        if c.eat('|') {
            return Ok(Child::Leaf);
        }
        if !c.eat('[') {
            return Err(c.err("expected `|` or `[type]`"));
        }
        let name = c.ident()?;
        let w = Self::lookup(c, &self.types, &name, "type")?;
        c.expect(']')?;
        Ok(Child::Edge(w, self.tree(c)?))
    }

    fn expr(&self, c: &mut Cursor) -> std::result::Result<TreeSum, ParseError> {
        let mut negate = c.eat('-');
        let mut out = FormalSum::zero();
        loop {
            let t = self.term(c)?;
            out = if negate { &out - &t } else { &out + &t };
            if c.eat('+') {
                negate = false;
            } else if c.eat('-') {
                negate = true;
            } else {
                return Ok(out);
            }
        }
    }

    fn term(&self, c: &mut Cursor) -> std::result::Result<TreeSum, ParseError> {
        let mut acc = self.factor(c)?;
        while c.eat('*') {
            let f = self.factor(c)?;
            acc = self.diamond(&acc, &f);
        }
        Ok(acc)
    }

    fn factor(&self, c: &mut Cursor) -> std::result::Result<TreeSum, ParseError> {
        match c.peek() {
            Some(d) if d.is_ascii_digit() => Ok(FormalSum::term(c.scalar()?, Tree::unit())),
            Some('(') if matches!(c.peek_second(), Some('|') | Some('[')) => Ok(FormalSum::basis(self.tree(c)?)),
            Some('(') => {
                c.expect('(')?;
                let e = self.expr(c)?;
                c.expect(')')?;
                Ok(e)
            }
            Some('P') => {
                c.ident()?;
                c.expect('[')?;
                let name = c.ident()?;
                let w = Self::lookup(c, &self.types, &name, "type")?;
                c.expect(']')?;
                c.expect('(')?;
                let e = self.expr(c)?;
                c.expect(')')?;
                Ok(graft_sum(w, &e))
            }
            Some(other) => Err(c.err(format!("unexpected `{other}`"))),
            None => Err(c.err("unexpected end of expression")),
        }
    }
}

impl OmegaRba for TreeAlgebra {
    type Elem = TreeSum;

    fn signature(&self) -> &Signature {
        &self.sig
    }
    fn one(&self) -> TreeSum {
        self.unit_sum()
    }
    fn zero(&self) -> TreeSum {
        FormalSum::zero()
    }
    fn add(&self, a: &TreeSum, b: &TreeSum) -> TreeSum {
        a + b
    }
    fn scale(&self, c: &Scalar, a: &TreeSum) -> TreeSum {
        a.scale(c)
    }
    fn mul(&self, a: &TreeSum, b: &TreeSum) -> TreeSum {
        self.diamond(a, b)
    }
    fn p(&self, omega: usize, a: &TreeSum) -> TreeSum {
        graft_sum(omega, a)
    }
    fn render(&self, a: &TreeSum) -> String {
        self.render_sum(a)
    }
}

/// Ladders `B⁺_{ω₁}⋯B⁺_{ω_k}(g)` over `g ∈ {(|), ⌊x⌋}` with depth at most
/// `bound`; single graftings of generators come first.
pub fn ladder_pool(types: usize, alphabet: usize, bound: usize) -> Vec<Tree> {
    let mut level: Vec<Tree> = (0..alphabet).map(|x| Tree::corolla(&[x])).collect();
    level.insert(0, Tree::unit());
    let base = level.clone();
    let mut levels = vec![level];
    for _ in 1..bound {
        let prev = levels.last().unwrap();
        let next: Vec<Tree> = prev.iter().flat_map(|t| (0..types).map(move |w| Tree::graft(w, t.clone()))).collect();
        levels.push(next);
    }
    let mut pool = Vec::new();
    if let Some(l) = levels.get(1) {
        pool.extend(l.iter().rev().cloned());
    }
    pool.extend(base);
    for l in levels.iter().skip(2) {
        pool.extend(l.iter().cloned());
    }
    pool
}

pub fn is_associative_at(alg: &TreeAlgebra, a: &Tree, b: &Tree, c: &Tree) -> bool {
    let ab = alg.diamond_trees(a, b);
    let bc = alg.diamond_trees(b, c);
    alg.diamond(&ab, &FormalSum::basis(c.clone())) == alg.diamond(&FormalSum::basis(a.clone()), &bc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PoolCheck {
    pub triples: usize,
    pub failure: Option<[Tree; 3]>,
}

/// Associativity on every triple of trees of depth at most `depth` with at
/// most `total` leaves altogether.
///
/// A product only touches the last branch of its left factor and the first
/// branch of its right factor, so when the middle factor has two or more
/// branches both bracketings splice the same pieces. The remaining triples
/// reduce to single-branch trees. Relabeling angles is an algebra morphism,
/// so each shape is checked once with pairwise distinct labels, and only a
/// failing shape is specialized to the actual alphabet.
pub fn check_associativity_up_to(alg: &TreeAlgebra, depth: usize, total: usize) -> PoolCheck {
    let shapes = single_branch_trees(1, alg.types.len(), depth, total.saturating_sub(2));
    let k = alg.alphabet.len();
    let mut triples = 0;
    for a in &shapes {
        for b in shapes.iter().take_while(|b| a.leaves() + b.leaves() < total) {
            for c in shapes.iter().take_while(|c| a.leaves() + b.leaves() + c.leaves() <= total) {
                let (g, angles) = generic_labels(&[a, b, c]);
                if k == 0 && angles > 0 {
                    continue;
                }
                triples += k.pow(angles as u32);
                if is_associative_at(alg, &g[0], &g[1], &g[2]) {
                    continue;
                }
                for t in specializations(&g, angles, k) {
                    if !is_associative_at(alg, &t[0], &t[1], &t[2]) {
                        return PoolCheck { triples, failure: Some([t[0].clone(), t[1].clone(), t[2].clone()]) };
                    }
                }
            }
        }
    }
    PoolCheck { triples, failure: None }
}

fn generic_labels(trees: &[&Tree]) -> (Vec<Tree>, usize) {
    let mut next = 0;
    let mut fresh = |_| {
        next += 1;
        next - 1
    };
    let out = trees.iter().map(|t| t.map_angles(&mut fresh)).collect();
    (out, next)
}

fn specializations(generic: &[Tree], angles: usize, k: usize) -> impl Iterator<Item = Vec<Tree>> + '_ {
    let labelings: Box<dyn Iterator<Item = Vec<usize>>> = if angles == 0 {
        Box::new(std::iter::once(Vec::new()))
    } else {
        Box::new((0..angles).map(|_| 0..k).multi_cartesian_product())
    };
    labelings.map(move |labels| generic.iter().map(|t| t.map_angles(&mut |i| labels[i])).collect())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RbPoolCheck {
    /// Number of `(α, β, u, v)` cases covered.
    pub cases: usize,
    pub failure: Option<(usize, usize, [Tree; 2])>,
}

/// The Rota–Baxter identity read off `sig`, for all `α, β` and all pairs of
/// trees of depth at most `depth` with at most `total` leaves altogether.
/// Uses the same relabeling reduction as [`check_associativity_up_to`],
/// since relabeling angles commutes with every `P_ω`.
pub fn check_rb_identity_up_to(alg: &TreeAlgebra, sig: &Signature, depth: usize, total: usize) -> RbPoolCheck {
    let shapes = trees_up_to(1, alg.types.len(), depth, total.saturating_sub(1));
    let (k, n) = (alg.alphabet.len(), sig.size);
    let holds = |a: usize, b: usize, u: &Tree, v: &Tree| {
        let (u, v) = (FormalSum::basis(u.clone()), FormalSum::basis(v.clone()));
        alg.mul(&alg.p(a, &u), &alg.p(b, &v)) == rb_expansion(alg, sig, a, b, &u, &v)
    };
    let mut cases = 0;
    for u in &shapes {
        for v in shapes.iter().take_while(|v| u.leaves() + v.leaves() <= total) {
            let (g, angles) = generic_labels(&[u, v]);
            if k == 0 && angles > 0 {
                continue;
            }
            cases += n * n * k.pow(angles as u32);
            for (a, b) in (0..n).cartesian_product(0..n) {
                if holds(a, b, &g[0], &g[1]) {
                    continue;
                }
                for t in specializations(&g, angles, k) {
                    if !holds(a, b, &t[0], &t[1]) {
                        return RbPoolCheck { cases, failure: Some((a, b, [t[0].clone(), t[1].clone()])) };
                    }
                }
            }
        }
    }
    RbPoolCheck { cases, failure: None }
}

/// Whether the unit tree is a two-sided identity on every tree of depth at
/// most `depth` with at most `leaves` leaves. Checked on shapes with distinct
/// angle labels, which covers every relabeling.
pub fn unit_law_up_to(alg: &TreeAlgebra, depth: usize, leaves: usize) -> bool {
    let one = alg.unit_sum();
    let k = alg.alphabet.len();
    trees_up_to(1, alg.types.len(), depth, leaves).into_iter().all(|t| {
        let (g, angles) = generic_labels(&[&t]);
        if k == 0 && angles > 0 {
            return true;
        }
        let u = FormalSum::basis(g[0].clone());
        alg.diamond(&one, &u) == u && alg.diamond(&u, &one) == u
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DendriformPoolCheck {
    /// Number of `(α, β, a, b, c)` cases covered.
    pub cases: usize,
    pub failure: Option<DendriformFailure>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DendriformFailure {
    pub alpha: usize,
    pub beta: usize,
    pub tags: Vec<&'static str>,
    pub trees: [Tree; 3],
}

/// The three dendriform identities of `a ≺_ω b = aP_ω(b)`, `a ≻_ω b = P_ω(a)b`
/// for all `α, β` on every triple of trees of depth at most `depth` with at
/// most `total` leaves altogether. Needs a weight-zero algebra.
pub fn check_dendriform_up_to(alg: &TreeAlgebra, depth: usize, total: usize) -> Result<DendriformPoolCheck> {
    let view = dendriform_from(alg)?;
    let shapes = trees_up_to(1, alg.types.len(), depth, total.saturating_sub(2));
    let (k, n) = (alg.alphabet.len(), alg.types.len());
    let basis = |t: &Tree| FormalSum::basis(t.clone());
    let mut cases = 0;
    for a in &shapes {
        for b in shapes.iter().take_while(|b| a.leaves() + b.leaves() < total) {
            for c in shapes.iter().take_while(|c| a.leaves() + b.leaves() + c.leaves() <= total) {
                let (g, angles) = generic_labels(&[a, b, c]);
                if k == 0 && angles > 0 {
                    continue;
                }
                cases += n * n * k.pow(angles as u32);
                for (al, be) in (0..n).cartesian_product(0..n) {
                    if view.violations(al, be, &basis(&g[0]), &basis(&g[1]), &basis(&g[2])).is_empty() {
                        continue;
                    }
                    for t in specializations(&g, angles, k) {
                        let tags = view.violations(al, be, &basis(&t[0]), &basis(&t[1]), &basis(&t[2]));
                        if !tags.is_empty() {
                            let trees = [t[0].clone(), t[1].clone(), t[2].clone()];
                            return Ok(DendriformPoolCheck {
                                cases,
                                failure: Some(DendriformFailure { alpha: al, beta: be, tags, trees }),
                            });
                        }
                    }
                }
            }
        }
    }
    Ok(DendriformPoolCheck { cases, failure: None })
}

/// First triple of the ladder pool on which `⋄` is not associative.
pub fn assoc_counterexample_search(s: &OmegaStructure, gens: &[String], bound: usize) -> Result<Option<[Tree; 3]>> {
    let alg = TreeAlgebra::new(s, gens.to_vec())?;
    Ok(search_pool(&alg, &ladder_pool(s.size, gens.len(), bound)))
}

pub fn search_pool(alg: &TreeAlgebra, pool: &[Tree]) -> Option<[Tree; 3]> {
    for a in pool {
        for b in pool {
            for c in pool {
                if !is_associative_at(alg, a, b, c) {
                    return Some([a.clone(), b.clone(), c.clone()]);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::{build_example, check_lambda_ets, cyclic_group, default_labels, Example, OpTable};
    use crate::rba::{check_rb_identity, rb_expansion};
    use proptest::prelude::*;

    fn xs() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn family(l: Scalar) -> OmegaStructure {
        build_example(&Example::Family { product: cyclic_group(2), lambda: l }).unwrap()
    }

    fn alg(s: &OmegaStructure) -> TreeAlgebra {
        TreeAlgebra::new(s, xs()).unwrap()
    }

    #[test]
    fn depth_and_branches() {
        let a = alg(&family(Scalar::one()));
        let t = |s: &str| a.parse_tree(s).unwrap();
        assert_eq!(t("(|)").depth(), 1);
        assert_eq!(t("(| x |)").depth(), 1);
        assert_eq!(t("([a](|))").depth(), 2);
        assert_eq!(t("([a](| x | y |))").depth(), 2);
        assert_eq!(t("([a]([b](|)))").depth(), 3);
        assert_eq!(t("(|)").branches(), 1);
        assert_eq!(t("(| x [a](| y |))").branches(), 2);
        assert_eq!(t("(| x | y [a](|))").branches(), 3);
        assert_eq!(t("(| x [a](| y |))").leaves(), 3);
    }

    #[test]
    fn parse_render_roundtrip() {
        let a = alg(&family(Scalar::one()));
        for s in ["(|)", "(| x |)", "([b](| x |))", "(| x [a](| y |) y [b]([a](|)))"] {
            assert_eq!(a.render_tree(&a.parse_tree(s).unwrap()), s);
        }
        let e = a.parse_expr("(| x |) + 2/3*(|)").unwrap();
        assert_eq!(e.len(), 2);
        assert_eq!(e.coeff(&Tree::unit()), Scalar::new(2, 3));
        assert_eq!(a.parse_expr(&a.render_sum(&e)).unwrap(), e);
        assert_eq!(a.parse_expr("P[a]((|)) - ([a](|))").unwrap(), FormalSum::zero());
        assert!(a.parse_tree("(| z |)").is_err());
        assert!(a.parse_tree("(| x").is_err());
        let err = a.parse_expr("(| x |) +\n ([q](|))").unwrap_err();
        assert_eq!(err.line, Some(2));
    }

    #[test]
    fn corollas_concatenate() {
        let a = alg(&family(Scalar::one()));
        let u = a.parse_expr("(| x | y |) * (| x |)").unwrap();
        assert_eq!(u, FormalSum::basis(Tree::corolla(&[0, 1, 0])));
    }

    #[test]
    fn single_edges_expand_in_three_terms() {
        let s = family(Scalar::new(3, 2));
        let a = alg(&s);
        let got = a.parse_expr("([a](|)) * ([b](|))").unwrap();
        // a+b = b, a<|b = b, a|>b = a.
        let want = a.parse_expr("([b]([a](|))) + ([b]([b](|))) + 3/2*([b](|))").unwrap();
        assert_eq!(got, want);
    }

    #[test]
    fn unit_is_two_sided() {
        let a = alg(&family(Scalar::one()));
        let one = a.unit_sum();
        for t in trees_up_to(2, 2, 3, 3) {
            let u = FormalSum::basis(t);
            assert_eq!(a.diamond(&one, &u), u);
            assert_eq!(a.diamond(&u, &one), u);
        }
    }

    #[test]
    fn pool_counts() {
        // 1 leaf and depth <= 2: (|), ([a](|)), ([b](|)).
        assert_eq!(trees_up_to(2, 2, 2, 1).len(), 3);
        // Corollas with at most 3 leaves over two letters: 1 + 2 + 4.
        assert_eq!(trees_up_to(2, 2, 1, 3).len(), 7);
        assert!(trees_up_to(2, 2, 3, 4).iter().all(|t| t.depth() <= 3 && t.leaves() <= 4));
    }

    #[test]
    fn associativity_on_examples() {
        for l in [Scalar::zero(), Scalar::one(), Scalar::new(2, 3)] {
            for s in [
                family(l.clone()),
                build_example(&Example::AbelianGroup { product: cyclic_group(2), lambda: l.clone() }).unwrap(),
            ] {
                assert!(check_lambda_ets(&s).holds());
                assert_eq!(assoc_counterexample_search(&s, &xs(), 3).unwrap(), None);
            }
        }
    }

    #[test]
    fn classical_rota_baxter() {
        let one = OpTable::constant(1, 0);
        let s = OmegaStructure::eds(one.clone(), one.clone(), one.clone(), one.clone())
            .unwrap()
            .with_dot(one)
            .unwrap()
            .with_constant_lambda(Scalar::one())
            .unwrap();
        assert_eq!(assoc_counterexample_search(&s, &xs(), 3).unwrap(), None);
    }

    #[test]
    fn broken_rhd_is_detected() {
        let l = default_labels(2);
        let tab = |s: &str| OpTable::parse_compact(s, &l).unwrap();
        let s = OmegaStructure::eds(tab("ab/ba"), tab("ab/ba"), tab("ab/ab"), tab("bb/aa"))
            .unwrap()
            .with_dot(tab("ab/ba"))
            .unwrap()
            .with_constant_lambda(Scalar::one())
            .unwrap();
        assert!(!check_lambda_ets(&s).holds());
        assert!(assoc_counterexample_search(&s, &xs(), 3).unwrap().is_some());
    }

    fn brute_force(a: &TreeAlgebra, depth: usize, total: usize) -> (usize, bool) {
        let all = trees_up_to(a.alphabet.len(), a.types.len(), depth, total);
        let mut n = 0;
        let mut ok = true;
        for x in &all {
            for y in all.iter().filter(|y| x.leaves() + y.leaves() < total) {
                for z in all.iter().filter(|z| x.leaves() + y.leaves() + z.leaves() <= total) {
                    if x.branches() == 1 && y.branches() == 1 && z.branches() == 1 {
                        n += 1;
                    }
                    ok &= is_associative_at(a, x, y, z);
                }
            }
        }
        (n, ok)
    }

    #[test]
    fn reduced_check_matches_brute_force() {
        let l = default_labels(2);
        let tab = |s: &str| OpTable::parse_compact(s, &l).unwrap();
        let broken = OmegaStructure::eds(tab("ab/ba"), tab("ab/ba"), tab("ab/ab"), tab("bb/aa"))
            .unwrap()
            .with_dot(tab("ab/ba"))
            .unwrap()
            .with_constant_lambda(Scalar::one())
            .unwrap();
        for (s, expect) in [(family(Scalar::new(2, 3)), true), (broken, false)] {
            let a = alg(&s);
            for (depth, total) in [(2, 4), (3, 3)] {
                let (n, ok) = brute_force(&a, depth, total);
                let got = check_associativity_up_to(&a, depth, total);
                assert_eq!(ok, expect);
                assert_eq!(got.failure.is_none(), ok, "depth {depth}, total {total}");
                if let Some([x, y, z]) = got.failure {
                    assert!(!is_associative_at(&a, &x, &y, &z));
                    assert!(x.angles().iter().chain(y.angles()).chain(z.angles()).all(|&g| g < 2));
                } else {
                    assert_eq!(got.triples, n);
                }
            }
        }
    }

    #[test]
    fn pooled_rb_identity() {
        let s = family(Scalar::new(2, 3));
        let a = alg(&s);
        let all = trees_up_to(2, 2, 2, 3);
        let pairs = all.iter().flat_map(|u| all.iter().filter(move |v| u.leaves() + v.leaves() <= 3)).count();
        let got = check_rb_identity_up_to(&a, a.signature(), 2, 3);
        assert_eq!(got, RbPoolCheck { cases: 4 * pairs, failure: None });
        let bad = a.signature().with_psi_entry(1, 0, FormalSum::term(Scalar::from_int(5), 1));
        let (al, be, [u, v]) = check_rb_identity_up_to(&a, &bad, 2, 3).failure.unwrap();
        assert_eq!((al, be), (1, 0));
        let (u, v) = (FormalSum::basis(u), FormalSum::basis(v));
        assert_ne!(a.mul(&a.p(1, &u), &a.p(0, &v)), rb_expansion(&a, &bad, 1, 0, &u, &v));
        assert!(unit_law_up_to(&a, 3, 4));
    }

    #[test]
    fn rb_identity_and_perturbation() {
        let s = family(Scalar::one());
        let a = alg(&s);
        let samples: Vec<TreeSum> = trees_up_to(2, 2, 2, 2).into_iter().map(FormalSum::basis).collect();
        assert!(check_rb_identity(&a, a.signature(), &samples).holds());
        let bad = a.signature().with_psi_entry(0, 1, FormalSum::term(Scalar::from_int(5), 1));
        let r = check_rb_identity(&a, &bad, &samples);
        assert!(!r.holds());
        assert!(r.violations.iter().all(|v| v.witness[..2] == [0, 1]));
        let u = &samples[1];
        assert_eq!(a.mul(&a.p(1, u), &a.p(1, u)), rb_expansion(&a, a.signature(), 1, 1, u, u));
    }

    #[test]
    fn weight_zero_drops_the_last_term() {
        let s = family(Scalar::one());
        let a = TreeAlgebra::weight_zero(&s, xs()).unwrap();
        let got = a.parse_expr("([a](|)) * ([b](|))").unwrap();
        assert_eq!(got, a.parse_expr("([b]([a](|))) + ([b]([b](|)))").unwrap());
    }

    #[test]
    fn evaluate_into_itself_is_identity() {
        let s = family(Scalar::new(2, 3));
        let a = alg(&s);
        let f = |x: usize| a.generator(x);
        for t in trees_up_to(2, 2, 3, 3) {
            let u = FormalSum::basis(t);
            assert_eq!(a.evaluate(&u, &f, &a).unwrap(), u);
        }
        let other = TreeAlgebra::weight_zero(&s, xs()).unwrap();
        assert!(matches!(a.evaluate(&a.unit_sum(), &|x| other.generator(x), &other), Err(Error::StructureMismatch)));
    }

    #[test]
    fn evaluate_is_a_morphism() {
        let s = build_example(&Example::AbelianGroup { product: cyclic_group(2), lambda: Scalar::one() }).unwrap();
        let a = alg(&s);
        let sub = [a.parse_expr("(| y | x |)").unwrap(), a.parse_expr("([b](| x |)) - 2*(|)").unwrap()];
        let f = |x: usize| sub[x].clone();
        let pool = trees_up_to(2, 2, 2, 2);
        for t in &pool {
            for u in &pool {
                let (t, u) = (FormalSum::basis(t.clone()), FormalSum::basis(u.clone()));
                let lhs = a.evaluate(&a.diamond(&t, &u), &f, &a).unwrap();
                let rhs = a.diamond(&a.evaluate(&t, &f, &a).unwrap(), &a.evaluate(&u, &f, &a).unwrap());
                assert_eq!(lhs, rhs);
            }
            let t = FormalSum::basis(t.clone());
            assert_eq!(a.evaluate(&graft_sum(1, &t), &f, &a).unwrap(), graft_sum(1, &a.evaluate(&t, &f, &a).unwrap()));
        }
    }

    fn arb_tree() -> impl Strategy<Value = Tree> {
        let leaf = prop::collection::vec(0..2usize, 0..3).prop_map(|a| Tree::corolla(&a));
        leaf.prop_recursive(3, 12, 3, |inner| {
            prop::collection::vec((prop::option::of((0..2usize, inner)), 0..2usize), 1..4).prop_map(|parts| {
                let children = parts
                    .iter()
                    .map(|(c, _)| match c {
                        None => Child::Leaf,
                        Some((w, t)) => Child::Edge(*w, t.clone()),
                    })
                    .collect::<Vec<_>>();
                let angles = parts.iter().skip(1).map(|(_, x)| *x).collect();
                Tree::new(children, angles).unwrap()
            })
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn grading_and_associativity(a in arb_tree(), b in arb_tree(), c in arb_tree()) {
            let alg = alg(&family(Scalar::new(2, 3)));
            let ab = alg.diamond_trees(&a, &b);
            for (t, _) in ab.iter() {
                prop_assert_eq!(t.leaves(), a.leaves() + b.leaves() - 1);
                prop_assert_eq!(t.decorations(), a.decorations() + b.decorations());
            }
            prop_assert!(is_associative_at(&alg, &a, &b, &c));
        }

        #[test]
        fn tree_text_roundtrip(a in arb_tree()) {
            let alg = alg(&family(Scalar::one()));
            prop_assert_eq!(alg.parse_tree(&alg.render_tree(&a)).unwrap(), a);
        }
    }
}
