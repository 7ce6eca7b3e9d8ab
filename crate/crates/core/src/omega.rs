//! Finite parameter structures `(Ω, ←, →, ◁, ▷, ·, λ)` and their axiom checkers.
//!
//! Operations are written in ASCII in tags and formulas: `<-` `->` `<|` `|>`
//! for the four diassociative/extended products, `.` for the weight product
//! and `*` for the ETS product.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::kvfile::{render_index_matrix, render_sum, KvFile};
use crate::scalars::{FormalSum, Scalar};

/// An `n × n` operation table, row = first argument.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OpTable {
    n: usize,
    entries: Vec<usize>,
}

impl OpTable {
    pub fn new(n: usize, entries: Vec<usize>) -> Result<Self> {
        if n == 0 || entries.len() != n * n || entries.iter().any(|&e| e >= n) {
            return Err(Error::InvalidStructure(format!("not a valid {n}x{n} table: {entries:?}")));
        }
        Ok(OpTable { n, entries })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidStructure("table is not square".into()));
        }
        OpTable::new(n, rows.concat())
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Self {
        let entries = (0..n).flat_map(|a| (0..n).map(move |b| (a, b))).map(|(a, b)| f(a, b)).collect();
        OpTable::new(n, entries).expect("function values out of range")
    }

    pub fn constant(n: usize, c: usize) -> Self {
        Self::from_fn(n, |_, _| c)
    }

    pub fn left_projection(n: usize) -> Self {
        Self::from_fn(n, |a, _| a)
    }

    pub fn right_projection(n: usize) -> Self {
        Self::from_fn(n, |_, b| b)
    }

    /// The `code`-th table in the order where `entries`, read as base-`n`
    /// digits with the first entry most significant, counts upward.
    pub fn from_code(n: usize, mut code: usize) -> Self {
        let mut entries = vec![0; n * n];
        for e in entries.iter_mut().rev() {
            *e = code % n;
            code /= n;
        }
        OpTable { n, entries }
    }

    pub fn code(&self) -> usize {
        self.entries.iter().fold(0, |acc, &e| acc * self.n + e)
    }

    /// Every table on an `n`-element set (`n^(n²)` of them).
    pub fn all(n: usize) -> impl Iterator<Item = OpTable> {
        let total = n.pow((n * n) as u32);
        (0..total).map(move |c| OpTable::from_code(n, c))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.entries[a * self.n + b]
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        self.entries.chunks(self.n).map(<[usize]>::to_vec).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |a, b| self.get(b, a))
    }

    /// Conjugates by a carrier bijection: `t'(π a, π b) = π(t(a, b))`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let inv = invert(perm);
        Self::from_fn(self.n, |a, b| perm[self.get(inv[a], inv[b])])
    }

    pub fn is_associative(&self) -> bool {
        triples(self.n).all(|(a, b, c)| self.get(self.get(a, b), c) == self.get(a, self.get(b, c)))
    }

    pub fn is_commutative(&self) -> bool {
        *self == self.transpose()
    }

    /// Compact form `aa/ab` using one-character labels.
    pub fn compact(&self, labels: &[String]) -> String {
        self.rows()
            .iter()
            .map(|r| r.iter().map(|&x| labels[x].as_str()).collect::<String>())
            .collect::<Vec<_>>()
            .join("/")
    }

    pub fn parse_compact(text: &str, labels: &[String]) -> Result<Self> {
        let rows: Vec<Vec<usize>> = text
            .split('/')
            .map(|r| {
                r.trim()
                    .chars()
                    .map(|ch| {
                        labels
                            .iter()
                            .position(|l| l.len() == ch.len_utf8() && l.starts_with(ch))
                            .ok_or_else(|| Error::UnknownLabel(ch.to_string()))
                    })
                    .collect()
            })
            .collect::<Result<_>>()?;
        if rows.len() != labels.len() {
            return Err(Error::InvalidStructure(format!("table `{text}` has wrong size")));
        }
        OpTable::from_rows(&rows)
    }
}

impl fmt::Debug for OpTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render_index_matrix(&self.rows()))
    }
}

pub(crate) fn invert(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (i, &p) in perm.iter().enumerate() {
        inv[p] = i;
    }
    inv
}

pub fn triples(n: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..n).flat_map(move |a| (0..n).flat_map(move |b| (0..n).map(move |c| (a, b, c))))
}

pub fn default_labels(n: usize) -> Vec<String> {
    (0..n)
        .map(|i| if n <= 26 { ((b'a' + i as u8) as char).to_string() } else { format!("e{i}") })
        .collect()
}

/// A finite parameter structure.
///
/// Weight data is either a product `dot` with scalars `lambda`, or a general
/// linear map `psi : kΩ ⊗ kΩ → kΩ`, or absent. `dot` may also be present
/// without `lambda` when `star` is given (ETS data).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OmegaStructure {
    pub size: usize,
    pub labels: Vec<String>,
    pub left: OpTable,
    pub right: OpTable,
    pub lhd: Option<OpTable>,
    pub rhd: Option<OpTable>,
    pub dot: Option<OpTable>,
    pub star: Option<OpTable>,
    pub lambda: Option<Vec<Vec<Scalar>>>,
    pub psi: Option<Vec<Vec<FormalSum<usize>>>>,
}

impl fmt::Debug for OmegaStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

impl OmegaStructure {
    pub fn new(left: OpTable, right: OpTable) -> Result<Self> {
        let n = left.size();
        if right.size() != n {
            return Err(Error::InvalidStructure("tables have different sizes".into()));
        }
        Ok(OmegaStructure {
            size: n,
            labels: default_labels(n),
            left,
            right,
            lhd: None,
            rhd: None,
            dot: None,
            star: None,
            lambda: None,
            psi: None,
        })
    }

    pub fn eds(left: OpTable, right: OpTable, lhd: OpTable, rhd: OpTable) -> Result<Self> {
        Self::new(left, right)?.with_extension(lhd, rhd)
    }

    fn same_size(&self, t: &OpTable) -> Result<()> {
        if t.size() == self.size {
            Ok(())
        } else {
            Err(Error::InvalidStructure("tables have different sizes".into()))
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.size {
            return Err(Error::InvalidStructure("wrong number of labels".into()));
        }
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::InvalidStructure("labels are not distinct".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn with_extension(mut self, lhd: OpTable, rhd: OpTable) -> Result<Self> {
        self.same_size(&lhd)?;
        self.same_size(&rhd)?;
        self.lhd = Some(lhd);
        self.rhd = Some(rhd);
        Ok(self)
    }

    pub fn with_dot(mut self, dot: OpTable) -> Result<Self> {
        self.same_size(&dot)?;
        self.dot = Some(dot);
        Ok(self)
    }

    pub fn with_star(mut self, star: OpTable) -> Result<Self> {
        self.same_size(&star)?;
        self.star = Some(star);
        Ok(self)
    }

    pub fn with_lambda(mut self, lambda: Vec<Vec<Scalar>>) -> Result<Self> {
        if lambda.len() != self.size || lambda.iter().any(|r| r.len() != self.size) {
            return Err(Error::InvalidStructure("lambda must be n x n".into()));
        }
        if self.psi.is_some() {
            return Err(Error::InvalidStructure("lambda and psi are mutually exclusive".into()));
        }
        self.lambda = Some(lambda);
        Ok(self)
    }

    pub fn with_constant_lambda(self, c: Scalar) -> Result<Self> {
        let n = self.size;
        self.with_lambda(vec![vec![c; n]; n])
    }

    pub fn with_psi(mut self, psi: Vec<Vec<FormalSum<usize>>>) -> Result<Self> {
        if psi.len() != self.size || psi.iter().any(|r| r.len() != self.size) {
            return Err(Error::InvalidStructure("psi must be n x n".into()));
        }
        if psi.iter().flatten().flat_map(|s| s.support()).any(|&i| i >= self.size) {
            return Err(Error::InvalidStructure("psi refers to an element out of range".into()));
        }
        if self.lambda.is_some() {
            return Err(Error::InvalidStructure("lambda and psi are mutually exclusive".into()));
        }
        self.psi = Some(psi);
        Ok(self)
    }

    pub fn lhd(&self) -> Result<&OpTable> {
        self.lhd.as_ref().ok_or(Error::MissingTable("lhd"))
    }

    pub fn rhd(&self) -> Result<&OpTable> {
        self.rhd.as_ref().ok_or(Error::MissingTable("rhd"))
    }

    pub fn has_strict_weight(&self) -> bool {
        self.dot.is_some() && self.lambda.is_some()
    }

    pub fn has_weight(&self) -> bool {
        self.has_strict_weight() || self.psi.is_some()
    }

    /// `ψ(α, β)`: the stored map, or `λ_{α,β}·(α·β)` for strict data.
    pub fn psi_map(&self) -> Option<Vec<Vec<FormalSum<usize>>>> {
        if let Some(p) = &self.psi {
            return Some(p.clone());
        }
        let (dot, lambda) = (self.dot.as_ref()?, self.lambda.as_ref()?);
        Some(
            (0..self.size)
                .map(|a| (0..self.size).map(|b| FormalSum::term(lambda[a][b].clone(), dot.get(a, b))).collect())
                .collect(),
        )
    }

    /// Rewrites a general `ψ` whose values are all of the form `c·γ` as strict
    /// data. Zero entries get `λ = 0` and `dot = 0`.
    pub fn strict_factorization(&self) -> Option<OmegaStructure> {
        if self.has_strict_weight() {
            return Some(self.clone());
        }
        let psi = self.psi.as_ref()?;
        let n = self.size;
        let mut dot = vec![0; n * n];
        let mut lambda = vec![vec![Scalar::zero(); n]; n];
        for a in 0..n {
            for b in 0..n {
                let v = &psi[a][b];
                match v.len() {
                    0 => {}
                    1 => {
                        let (g, c) = v.iter().next().unwrap();
                        dot[a * n + b] = *g;
                        lambda[a][b] = c.clone();
                    }
                    _ => return None,
                }
            }
        }
        let mut s = self.clone();
        s.psi = None;
        s.dot = Some(OpTable::new(n, dot).ok()?);
        s.lambda = Some(lambda);
        Some(s)
    }

    pub fn opposite(&self) -> OmegaStructure {
        let t = |o: &Option<OpTable>| o.as_ref().map(OpTable::transpose);
        let n = self.size;
        OmegaStructure {
            size: n,
            labels: self.labels.clone(),
            left: self.right.transpose(),
            right: self.left.transpose(),
            lhd: t(&self.rhd),
            rhd: t(&self.lhd),
            dot: t(&self.dot),
            star: t(&self.star),
            lambda: self.lambda.as_ref().map(|l| transpose_matrix(l)),
            psi: self.psi.as_ref().map(|p| transpose_matrix(p)),
        }
    }

    pub fn is_commutative(&self) -> bool {
        *self == self.opposite()
    }

    /// Transports every table along a carrier bijection; labels stay in place.
    pub fn relabel(&self, perm: &[usize]) -> OmegaStructure {
        let inv = invert(perm);
        let r = |o: &Option<OpTable>| o.as_ref().map(|t| t.relabel(perm));
        let n = self.size;
        let move_matrix = |m: &Vec<Vec<Scalar>>| -> Vec<Vec<Scalar>> {
            (0..n).map(|a| (0..n).map(|b| m[inv[a]][inv[b]].clone()).collect()).collect()
        };
        OmegaStructure {
            size: n,
            labels: self.labels.clone(),
            left: self.left.relabel(perm),
            right: self.right.relabel(perm),
            lhd: r(&self.lhd),
            rhd: r(&self.rhd),
            dot: r(&self.dot),
            star: r(&self.star),
            lambda: self.lambda.as_ref().map(move_matrix),
            psi: self.psi.as_ref().map(|p| {
                (0..n).map(|a| (0..n).map(|b| p[inv[a]][inv[b]].map_basis(|&g| perm[g])).collect()).collect()
            }),
        }
    }

    pub fn element(&self, label: &str) -> Result<usize> {
        self.labels.iter().position(|l| l == label).ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let f = KvFile::parse(text)?;
        f.check_keys(&["size", "labels", "left", "right", "lhd", "rhd", "dot", "star", "lambda", "psi"])?;
        let size_e = f.get("size").ok_or_else(|| ParseError::new("missing `size`"))?;
        let n = size_e.usize()?;
        if n == 0 {
            return Err(size_e.err("size must be positive"));
        }
        let table = |key: &str| -> std::result::Result<Option<OpTable>, ParseError> {
            match f.get(key) {
                None => Ok(None),
                Some(e) => Ok(Some(OpTable::from_rows(&e.index_matrix(n)?).map_err(|x| e.err(x.to_string()))?)),
            }
        };
        let left = table("left")?.ok_or_else(|| ParseError::new("missing `left`"))?;
        let right = table("right")?.ok_or_else(|| ParseError::new("missing `right`"))?;
        let wrap = |r: Result<OmegaStructure>| r.map_err(|e| ParseError::new(e.to_string()));
        let mut s = wrap(OmegaStructure::new(left, right))?;
        if let Some(e) = f.get("labels") {
            s = wrap(s.with_labels(e.words()))?;
        }
        match (table("lhd")?, table("rhd")?) {
            (Some(l), Some(r)) => s = wrap(s.with_extension(l, r))?,
            (None, None) => {}
            _ => return Err(ParseError::new("`lhd` and `rhd` must be given together")),
        }
        s.dot = table("dot")?;
        s.star = table("star")?;
        if let Some(e) = f.get("lambda") {
            s = wrap(s.with_lambda(e.scalar_matrix(n)?))?;
        }
        if let Some(e) = f.get("psi") {
            s = wrap(s.with_psi(e.sum_matrix(n, n)?))?;
        }
        Ok(s)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("size = {}\nlabels = {}\n", self.size, self.labels.join(" "));
        let mut line = |k: &str, t: &Option<OpTable>| {
            if let Some(t) = t {
                out.push_str(&format!("{k} = {}\n", render_index_matrix(&t.rows())));
            }
        };
        line("left", &Some(self.left.clone()));
        line("right", &Some(self.right.clone()));
        line("lhd", &self.lhd);
        line("rhd", &self.rhd);
        line("dot", &self.dot);
        line("star", &self.star);
        if let Some(l) = &self.lambda {
            let rows: Vec<String> =
                l.iter().map(|r| format!("[{}]", r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))).collect();
            out.push_str(&format!("lambda = [{}]\n", rows.join(",")));
        }
        if let Some(p) = &self.psi {
            let rows: Vec<String> =
                p.iter().map(|r| format!("[{}]", r.iter().map(render_sum).collect::<Vec<_>>().join(","))).collect();
            out.push_str(&format!("psi = [{}]\n", rows.join(",")));
        }
        out
    }
}

fn transpose_matrix<T: Clone>(m: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = m.len();
    (0..n).map(|a| (0..n).map(|b| m[b][a].clone()).collect()).collect()
}

/// The data entering the Rota–Baxter identity: the four EDS products and
/// the weight map `ψ`. `psi = None` is weight zero.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Signature {
    pub size: usize,
    pub left: OpTable,
    pub right: OpTable,
    pub lhd: OpTable,
    pub rhd: OpTable,
    pub psi: Option<Vec<Vec<FormalSum<usize>>>>,
}

impl Signature {
    pub fn of(s: &OmegaStructure) -> Result<Self> {
        let psi = s.psi_map().ok_or(Error::MissingWeight)?;
        Ok(Signature { psi: Some(psi), ..Self::weight_zero(s)? })
    }

    pub fn weight_zero(s: &OmegaStructure) -> Result<Self> {
        Ok(Signature {
            size: s.size,
            left: s.left.clone(),
            right: s.right.clone(),
            lhd: s.lhd()?.clone(),
            rhd: s.rhd()?.clone(),
            psi: None,
        })
    }

    pub fn psi(&self, a: usize, b: usize) -> FormalSum<usize> {
        self.psi.as_ref().map_or_else(FormalSum::zero, |p| p[a][b].clone())
    }

    pub fn is_weight_zero(&self) -> bool {
        self.psi.as_ref().is_none_or(|p| p.iter().flatten().all(FormalSum::is_zero))
    }

    /// A copy with one weight entry replaced.
    pub fn with_psi_entry(&self, a: usize, b: usize, value: FormalSum<usize>) -> Self {
        let n = self.size;
        let mut psi = self.psi.clone().unwrap_or_else(|| vec![vec![FormalSum::zero(); n]; n]);
        psi[a][b] = value;
        Signature { psi: Some(psi), ..self.clone() }
    }
}

impl fmt::Debug for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Signature")
            .field("left", &self.left)
            .field("right", &self.right)
            .field("lhd", &self.lhd)
            .field("rhd", &self.rhd)
            .field("psi", &self.psi)
            .finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Level {
    Diassociative,
    Eds,
    LambdaEts,
    Ets,
    LambdaEtsMaps,
    EtsMaps,
    RbIdentity,
    Dendriform,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Status {
    Checked,
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub tag: String,
    pub witness: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AxiomReport {
    pub level: Level,
    pub status: Status,
    pub violations: Vec<Violation>,
}

impl AxiomReport {
    pub fn checked(level: Level) -> Self {
        AxiomReport { level, status: Status::Checked, violations: Vec::new() }
    }

    pub fn not_applicable(level: Level, why: impl Into<String>) -> Self {
        AxiomReport { level, status: Status::NotApplicable(why.into()), violations: Vec::new() }
    }

    pub fn push(&mut self, tag: &str, witness: Vec<usize>) {
        self.violations.push(Violation { tag: tag.to_string(), witness, detail: None });
    }

    pub fn push_detail(&mut self, tag: &str, witness: Vec<usize>, detail: String) {
        self.violations.push(Violation { tag: tag.to_string(), witness, detail: Some(detail) });
    }

    pub fn is_applicable(&self) -> bool {
        self.status == Status::Checked
    }

    /// The structure satisfies the level.
    pub fn holds(&self) -> bool {
        self.is_applicable() && self.violations.is_empty()
    }

    pub fn failing_tags(&self) -> Vec<&str> {
        let mut seen = BTreeSet::new();
        self.violations.iter().map(|v| v.tag.as_str()).filter(|t| seen.insert(*t)).collect()
    }

    pub fn first(&self, tag: &str) -> Option<&Violation> {
        self.violations.iter().find(|v| v.tag == tag)
    }

    pub fn count(&self, tag: &str) -> usize {
        self.violations.iter().filter(|v| v.tag == tag).count()
    }

    pub fn witnesses(&self, tag: &str) -> BTreeSet<Vec<usize>> {
        self.violations.iter().filter(|v| v.tag == tag).map(|v| v.witness.clone()).collect()
    }

    /// Failing witnesses grouped by the map-level tag each pointwise tag
    /// belongs to. Map-level reports group by their own tags.
    pub fn failures_by_group(&self) -> BTreeMap<&'static str, BTreeSet<Vec<usize>>> {
        let mut out: BTreeMap<&'static str, BTreeSet<Vec<usize>>> = BTreeMap::new();
        for v in &self.violations {
            if let Some(g) = group_of(&v.tag) {
                out.entry(g).or_default().insert(v.witness.clone());
            }
        }
        out
    }

    pub fn render(&self, labels: &[String]) -> String {
        let mut out = format!("level: {:?}\n", self.level);
        match &self.status {
            Status::NotApplicable(why) => {
                out.push_str(&format!("status: not applicable ({why})\n"));
                return out;
            }
            Status::Checked if self.violations.is_empty() => {
                out.push_str("status: pass\n");
                return out;
            }
            Status::Checked => out.push_str(&format!("status: FAIL ({} violations)\n", self.violations.len())),
        }
        for tag in self.failing_tags() {
            let first = self.first(tag).unwrap();
            let w: Vec<&str> = first.witness.iter().map(|&i| labels.get(i).map_or("?", String::as_str)).collect();
            let formula = formula_of(tag).map(|f| format!("  [{f}]")).unwrap_or_default();
            let detail = first.detail.as_ref().map(|d| format!("  {d}")).unwrap_or_default();
            out.push_str(&format!(
                "  {tag}: {} violation(s), first at ({}){formula}{detail}\n",
                self.count(tag),
                w.join(", ")
            ));
        }
        out
    }
}

/// Read-only view of the tables, used by the identity definitions.
pub struct Tables<'a> {
    pub l: &'a OpTable,
    pub r: &'a OpTable,
    pub lh: &'a OpTable,
    pub rh: &'a OpTable,
    pub dot: Option<&'a OpTable>,
    pub star: Option<&'a OpTable>,
}

impl Tables<'_> {
    #[inline]
    fn l(&self, a: usize, b: usize) -> usize {
        self.l.get(a, b)
    }
    #[inline]
    fn r(&self, a: usize, b: usize) -> usize {
        self.r.get(a, b)
    }
    #[inline]
    fn lh(&self, a: usize, b: usize) -> usize {
        self.lh.get(a, b)
    }
    #[inline]
    fn rh(&self, a: usize, b: usize) -> usize {
        self.rh.get(a, b)
    }
    #[inline]
    fn d(&self, a: usize, b: usize) -> usize {
        self.dot.expect("dot table").get(a, b)
    }
    #[inline]
    fn s(&self, a: usize, b: usize) -> usize {
        self.star.expect("star table").get(a, b)
    }
}

type ElemEq = fn(&Tables, usize, usize, usize) -> (usize, usize);
type PairEq = fn(&Tables, usize, usize, usize) -> ((usize, usize), (usize, usize));

/// An identity between two elements of Ω, for all triples.
pub struct Identity {
    pub tag: &'static str,
    pub formula: &'static str,
    pub group: &'static str,
    eval: ElemEq,
}

/// An equality of weights `λ_p = λ_q` guarding some conditional identities.
pub struct WeightIdentity {
    pub tag: &'static str,
    pub formula: &'static str,
    pub group: &'static str,
    pairs: PairEq,
    pub conditions: &'static [Identity],
}

macro_rules! ident {
    ($tag:literal, $group:literal, $f:literal, |$t:ident, $a:ident, $b:ident, $c:ident| $lhs:expr, $rhs:expr) => {
        Identity {
            tag: $tag,
            formula: $f,
            group: $group,
            eval: |$t, $a, $b, $c| ($lhs, $rhs),
        }
    };
}

pub static DIASSOCIATIVE: [Identity; 5] = [
    ident!("DA1", "MD2", "(a <- b) <- c = a <- (b <- c)", |t, a, b, c| t.l(t.l(a, b), c), t.l(a, t.l(b, c))),
    ident!("DA2", "MD3", "(a <- b) <- c = a <- (b -> c)", |t, a, b, c| t.l(t.l(a, b), c), t.l(a, t.r(b, c))),
    ident!("DA3", "MD1", "(a -> b) <- c = a -> (b <- c)", |t, a, b, c| t.l(t.r(a, b), c), t.r(a, t.l(b, c))),
    ident!("DA4", "MD4", "(a <- b) -> c = a -> (b -> c)", |t, a, b, c| t.r(t.l(a, b), c), t.r(a, t.r(b, c))),
    ident!("DA5", "MD5", "(a -> b) -> c = a -> (b -> c)", |t, a, b, c| t.r(t.r(a, b), c), t.r(a, t.r(b, c))),
];

pub static EXTENDED: [Identity; 10] = [
    ident!("EDS1", "MD1", "a |> (b <- c) = a |> b", |t, a, b, c| t.rh(a, t.l(b, c)), t.rh(a, b)),
    ident!("EDS2", "MD1", "(a -> b) <| c = b <| c", |t, a, b, c| t.lh(t.r(a, b), c), t.lh(b, c)),
    ident!("EDS3", "MD2", "(a <| b) <- ((a <- b) <| c) = a <| (b <- c)", |t, a, b, c| t
        .l(t.lh(a, b), t.lh(t.l(a, b), c)), t.lh(a, t.l(b, c))),
    ident!("EDS4", "MD2", "(a <| b) <| ((a <- b) <| c) = b <| c", |t, a, b, c| t
        .lh(t.lh(a, b), t.lh(t.l(a, b), c)), t.lh(b, c)),
    ident!("EDS5", "MD3", "(a <| b) -> ((a <- b) <| c) = a <| (b -> c)", |t, a, b, c| t
        .r(t.lh(a, b), t.lh(t.l(a, b), c)), t.lh(a, t.r(b, c))),
    ident!("EDS6", "MD3", "(a <| b) |> ((a <- b) <| c) = b |> c", |t, a, b, c| t
        .rh(t.lh(a, b), t.lh(t.l(a, b), c)), t.rh(b, c)),
    ident!("EDS7", "MD4", "(a |> (b -> c)) <- (b |> c) = (a <- b) |> c", |t, a, b, c| t
        .l(t.rh(a, t.r(b, c)), t.rh(b, c)), t.rh(t.l(a, b), c)),
    ident!("EDS8", "MD4", "(a |> (b -> c)) <| (b |> c) = a <| b", |t, a, b, c| t
        .lh(t.rh(a, t.r(b, c)), t.rh(b, c)), t.lh(a, b)),
    ident!("EDS9", "MD5", "(a |> (b -> c)) -> (b |> c) = (a -> b) |> c", |t, a, b, c| t
        .r(t.rh(a, t.r(b, c)), t.rh(b, c)), t.rh(t.r(a, b), c)),
    ident!("EDS10", "MD5", "(a |> (b -> c)) |> (b |> c) = a |> b", |t, a, b, c| t
        .rh(t.rh(a, t.r(b, c)), t.rh(b, c)), t.rh(a, b)),
];

static COND1: [Identity; 2] = [
    ident!("W1a", "MW1", "a |> b = a |> (b . c)", |t, a, b, c| t.rh(a, b), t.rh(a, t.d(b, c))),
    ident!("W1b", "MW1", "(a -> b) . c = a -> (b . c)", |t, a, b, c| t.d(t.r(a, b), c), t.r(a, t.d(b, c))),
];
static COND2: [Identity; 2] = [
    ident!("W2a", "MW2", "(a <| b) . ((a <- b) <| c) = a <| (b . c)", |t, a, b, c| t
        .d(t.lh(a, b), t.lh(t.l(a, b), c)), t.lh(a, t.d(b, c))),
    ident!("W2b", "MW2", "(a <- b) <- c = a <- (b . c)", |t, a, b, c| t.l(t.l(a, b), c), t.l(a, t.d(b, c))),
];
static COND3: [Identity; 2] = [
    ident!("W3a", "MW3", "(a <- b) . c = a . (b -> c)", |t, a, b, c| t.d(t.l(a, b), c), t.d(a, t.r(b, c))),
    ident!("W3b", "MW3", "a <| b = b |> c", |t, a, b, c| t.lh(a, b), t.rh(b, c)),
];
static COND4: [Identity; 2] = [
    ident!("W4a", "MW4", "a -> (b -> c) = (a . b) -> c", |t, a, b, c| t.r(a, t.r(b, c)), t.r(t.d(a, b), c)),
    ident!("W4b", "MW4", "(a |> (b -> c)) . (b |> c) = (a . b) |> c", |t, a, b, c| t
        .d(t.rh(a, t.r(b, c)), t.rh(b, c)), t.rh(t.d(a, b), c)),
];
static COND5: [Identity; 2] = [
    ident!("W5a", "MW5", "(a . b) <| c = b <| c", |t, a, b, c| t.lh(t.d(a, b), c), t.lh(b, c)),
    ident!("W5b", "MW5", "(a . b) <- c = a . (b <- c)", |t, a, b, c| t.l(t.d(a, b), c), t.d(a, t.l(b, c))),
];
static COND6: [Identity; 1] =
    [ident!("W6a", "MW6", "(a . b) . c = a . (b . c)", |t, a, b, c| t.d(t.d(a, b), c), t.d(a, t.d(b, c)))];

/// Weight equalities; `W6` compares products `λ_p λ_q = λ_r λ_s` and is
/// handled separately.
pub static WEIGHTS: [WeightIdentity; 5] = [
    WeightIdentity {
        tag: "W1",
        formula: "l(a -> b, c) = l(b, c)",
        group: "MW1",
        pairs: |t, a, b, c| ((t.r(a, b), c), (b, c)),
        conditions: &COND1,
    },
    WeightIdentity {
        tag: "W2",
        formula: "l(a <| b, (a <- b) <| c) = l(b, c)",
        group: "MW2",
        pairs: |t, a, b, c| ((t.lh(a, b), t.lh(t.l(a, b), c)), (b, c)),
        conditions: &COND2,
    },
    WeightIdentity {
        tag: "W3",
        formula: "l(a <- b, c) = l(a, b -> c)",
        group: "MW3",
        pairs: |t, a, b, c| ((t.l(a, b), c), (a, t.r(b, c))),
        conditions: &COND3,
    },
    WeightIdentity {
        tag: "W4",
        formula: "l(a |> (b -> c), b |> c) = l(a, b)",
        group: "MW4",
        pairs: |t, a, b, c| ((t.rh(a, t.r(b, c)), t.rh(b, c)), (a, b)),
        conditions: &COND4,
    },
    WeightIdentity {
        tag: "W5",
        formula: "l(a, b) = l(a, b <- c)",
        group: "MW5",
        pairs: |t, a, b, c| ((a, b), (a, t.l(b, c))),
        conditions: &COND5,
    },
];

pub const W6_FORMULA: &str = "l(a, b) l(a . b, c) = l(b, c) l(a, b . c)";

/// Identities of an ETS beyond the extended diassociative ones.
pub static TRIASSOCIATIVE: [Identity; 18] = [
    ident!("S1", "MS1", "(a -> b) * c = b * c", |t, a, b, c| t.s(t.r(a, b), c), t.s(b, c)),
    ident!("T1a", "MS1", "a |> b = a |> (b . c)", |t, a, b, c| t.rh(a, b), t.rh(a, t.d(b, c))),
    ident!("T1b", "MS1", "(a -> b) . c = a -> (b . c)", |t, a, b, c| t.d(t.r(a, b), c), t.r(a, t.d(b, c))),
    ident!("S2", "MS2", "(a <| b) * ((a <- b) <| c) = b * c", |t, a, b, c| t.s(t.lh(a, b), t.lh(t.l(a, b), c)), t
        .s(b, c)),
    ident!("T2a", "MS2", "(a <| b) . ((a <- b) <| c) = a <| (b . c)", |t, a, b, c| t
        .d(t.lh(a, b), t.lh(t.l(a, b), c)), t.lh(a, t.d(b, c))),
    ident!("T2b", "MS2", "(a <- b) <- c = a <- (b . c)", |t, a, b, c| t.l(t.l(a, b), c), t.l(a, t.d(b, c))),
    ident!("S3", "MS3", "(a <- b) * c = a * (b -> c)", |t, a, b, c| t.s(t.l(a, b), c), t.s(a, t.r(b, c))),
    ident!("T3a", "MS3", "(a <- b) . c = a . (b -> c)", |t, a, b, c| t.d(t.l(a, b), c), t.d(a, t.r(b, c))),
    ident!("T3b", "MS3", "a <| b = b |> c", |t, a, b, c| t.lh(a, b), t.rh(b, c)),
    ident!("S4", "MS4", "(a |> (b -> c)) * (b |> c) = a * b", |t, a, b, c| t.s(t.rh(a, t.r(b, c)), t.rh(b, c)), t
        .s(a, b)),
    ident!("T4a", "MS4", "a -> (b -> c) = (a . b) -> c", |t, a, b, c| t.r(a, t.r(b, c)), t.r(t.d(a, b), c)),
    ident!("T4b", "MS4", "(a |> (b -> c)) . (b |> c) = (a . b) |> c", |t, a, b, c| t
        .d(t.rh(a, t.r(b, c)), t.rh(b, c)), t.rh(t.d(a, b), c)),
    ident!("S5", "MS5", "a * b = a * (b <- c)", |t, a, b, c| t.s(a, b), t.s(a, t.l(b, c))),
    ident!("T5a", "MS5", "(a . b) <| c = b <| c", |t, a, b, c| t.lh(t.d(a, b), c), t.lh(b, c)),
    ident!("T5b", "MS5", "(a . b) <- c = a . (b <- c)", |t, a, b, c| t.l(t.d(a, b), c), t.d(a, t.l(b, c))),
    ident!("S6a", "MS6", "a * b = a * (b . c)", |t, a, b, c| t.s(a, b), t.s(a, t.d(b, c))),
    ident!("S6b", "MS6", "(a . b) * c = b * c", |t, a, b, c| t.s(t.d(a, b), c), t.s(b, c)),
    ident!("T6a", "MS6", "(a . b) . c = a . (b . c)", |t, a, b, c| t.d(t.d(a, b), c), t.d(a, t.d(b, c))),
];

/// The map-level tag a pointwise tag is grouped under.
pub fn group_of(tag: &str) -> Option<&'static str> {
    if let Some(m) = MAP_IDENTITIES.iter().chain(ETS_MAP_IDENTITIES.iter()).find(|m| m.tag == tag) {
        return Some(m.tag);
    }
    if tag == "W6" {
        return Some("MW6");
    }
    DIASSOCIATIVE
        .iter()
        .chain(EXTENDED.iter())
        .chain(TRIASSOCIATIVE.iter())
        .chain(WEIGHTS.iter().flat_map(|w| w.conditions.iter()))
        .chain(COND6.iter())
        .find(|i| i.tag == tag)
        .map(|i| i.group)
        .or_else(|| WEIGHTS.iter().find(|w| w.tag == tag).map(|w| w.group))
}

pub fn formula_of(tag: &str) -> Option<&'static str> {
    if tag == "W6" {
        return Some(W6_FORMULA);
    }
    DIASSOCIATIVE
        .iter()
        .chain(EXTENDED.iter())
        .chain(TRIASSOCIATIVE.iter())
        .chain(WEIGHTS.iter().flat_map(|w| w.conditions.iter()))
        .chain(COND6.iter())
        .find(|i| i.tag == tag)
        .map(|i| i.formula)
        .or_else(|| WEIGHTS.iter().find(|w| w.tag == tag).map(|w| w.formula))
        .or_else(|| MAP_IDENTITIES.iter().chain(ETS_MAP_IDENTITIES.iter()).find(|m| m.tag == tag).map(|m| m.formula))
}

fn tables(s: &OmegaStructure) -> Option<Tables<'_>> {
    Some(Tables {
        l: &s.left,
        r: &s.right,
        lh: s.lhd.as_ref()?,
        rh: s.rhd.as_ref()?,
        dot: s.dot.as_ref(),
        star: s.star.as_ref(),
    })
}

fn check_identities(t: &Tables, n: usize, ids: &[&Identity], report: &mut AxiomReport) {
    for (a, b, c) in triples(n) {
        for id in ids {
            let (x, y) = (id.eval)(t, a, b, c);
            if x != y {
                report.push(id.tag, vec![a, b, c]);
            }
        }
    }
}

pub fn check_diassociative(s: &OmegaStructure) -> AxiomReport {
    let mut report = AxiomReport::checked(Level::Diassociative);
    // ◁ and ▷ are not read by these identities.
    let t = Tables { l: &s.left, r: &s.right, lh: &s.left, rh: &s.left, dot: None, star: None };
    check_identities(&t, s.size, &DIASSOCIATIVE.iter().collect::<Vec<_>>(), &mut report);
    report
}

fn eds_identities() -> Vec<&'static Identity> {
    DIASSOCIATIVE.iter().chain(EXTENDED.iter()).collect()
}

pub fn check_eds(s: &OmegaStructure) -> AxiomReport {
    let Some(t) = tables(s) else {
        return AxiomReport::not_applicable(Level::Eds, "lhd and rhd tables are required");
    };
    let mut report = AxiomReport::checked(Level::Eds);
    check_identities(&t, s.size, &eds_identities(), &mut report);
    report
}

/// Pointwise λ-ETS check. Conditional identities are only evaluated when the
/// guarding weight equality holds with a nonzero value.
pub fn check_lambda_ets(s: &OmegaStructure) -> AxiomReport {
    let level = Level::LambdaEts;
    let Some(t) = tables(s) else {
        return AxiomReport::not_applicable(level, "lhd and rhd tables are required");
    };
    let (Some(_), Some(lambda)) = (s.dot.as_ref(), s.lambda.as_ref()) else {
        let why = if s.psi.is_some() { "not a strict λ-ETS" } else { "dot and lambda are required" };
        return AxiomReport::not_applicable(level, why);
    };
    let mut report = AxiomReport::checked(level);
    let eds = eds_identities();
    let l = |p: (usize, usize)| &lambda[p.0][p.1];
    for (a, b, c) in triples(s.size) {
        for id in &eds {
            let (x, y) = (id.eval)(&t, a, b, c);
            if x != y {
                report.push(id.tag, vec![a, b, c]);
            }
        }
        for w in WEIGHTS.iter() {
            let (p, q) = (w.pairs)(&t, a, b, c);
            if l(p) != l(q) {
                report.push(w.tag, vec![a, b, c]);
            } else if !l(p).is_zero() {
                for id in w.conditions {
                    let (x, y) = (id.eval)(&t, a, b, c);
                    if x != y {
                        report.push(id.tag, vec![a, b, c]);
                    }
                }
            }
        }
        let lhs = l((a, b)) * l((t.d(a, b), c));
        let rhs = l((b, c)) * l((a, t.d(b, c)));
        if lhs != rhs {
            report.push("W6", vec![a, b, c]);
        } else if !lhs.is_zero() {
            let (x, y) = (COND6[0].eval)(&t, a, b, c);
            if x != y {
                report.push(COND6[0].tag, vec![a, b, c]);
            }
        }
    }
    report
}

pub fn check_ets(s: &OmegaStructure) -> AxiomReport {
    let level = Level::Ets;
    let Some(t) = tables(s) else {
        return AxiomReport::not_applicable(level, "lhd and rhd tables are required");
    };
    if s.dot.is_none() || s.star.is_none() {
        return AxiomReport::not_applicable(level, "dot and star tables are required");
    }
    let mut report = AxiomReport::checked(level);
    let ids: Vec<&Identity> = eds_identities().into_iter().chain(TRIASSOCIATIVE.iter()).collect();
    check_identities(&t, s.size, &ids, &mut report);
    report
}

/// One elementary step of a tensor-map pipeline acting on `kΩ^{⊗k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// `φ←` on factors `(i, i+1)`.
    Left(usize),
    /// `φ→` on factors `(i, i+1)`.
    Right(usize),
    /// `φ∗ = (·, ∗)` on factors `(i, i+1)`.
    Star(usize),
    /// `ψ` contracting factors `(i, i+1)` into one.
    Psi(usize),
    /// The flip of factors `(i, i+1)`.
    Tau(usize),
}

pub struct MapIdentity {
    pub tag: &'static str,
    pub formula: &'static str,
    /// Steps in application order (rightmost factor of the composite first).
    pub lhs: &'static [Step],
    pub rhs: &'static [Step],
}

use Step::{Left as L, Psi as P, Right as R, Star as S, Tau as T};

pub static MAP_IDENTITIES: [MapIdentity; 11] = [
    MapIdentity {
        tag: "MD1",
        formula: "(t x 1)(1 x L)(t x 1)(R x 1) = (R x 1)(1 x L)",
        lhs: &[R(0), T(0), L(1), T(0)],
        rhs: &[L(1), R(0)],
    },
    MapIdentity {
        tag: "MD2",
        formula: "(1 x L)(t x 1)(1 x L)(t x 1)(L x 1) = (L x 1)(1 x L)",
        lhs: &[L(0), T(0), L(1), T(0), L(1)],
        rhs: &[L(1), L(0)],
    },
    MapIdentity {
        tag: "MD3",
        formula: "(1 x R)(t x 1)(1 x L)(t x 1)(L x 1) = (L x 1)(1 x R)",
        lhs: &[L(0), T(0), L(1), T(0), R(1)],
        rhs: &[R(1), L(0)],
    },
    MapIdentity {
        tag: "MD4",
        formula: "(1 x L)(R x 1)(1 x R) = (R x 1)(1 x t)(L x 1)",
        lhs: &[R(1), R(0), L(1)],
        rhs: &[L(0), T(1), R(0)],
    },
    MapIdentity {
        tag: "MD5",
        formula: "(1 x R)(R x 1)(1 x R) = (R x 1)(1 x t)(R x 1)",
        lhs: &[R(1), R(0), R(1)],
        rhs: &[R(0), T(1), R(0)],
    },
    MapIdentity { tag: "MW1", formula: "R(1 x p) = (p x 1)(1 x t)(R x 1)", lhs: &[P(1), R(0)], rhs: &[R(0), T(1), P(0)] },
    MapIdentity {
        tag: "MW2",
        formula: "(p x 1)(1 x t)(1 x L)(t x 1)(L x 1) = t L (1 x p)",
        lhs: &[L(0), T(0), L(1), T(1), P(0)],
        rhs: &[P(1), L(0), T(0)],
    },
    MapIdentity {
        tag: "MW3",
        formula: "(p x 1)(1 x t)(L x 1) = (p x 1)(1 x R)",
        lhs: &[L(0), T(1), P(0)],
        rhs: &[R(1), P(0)],
    },
    MapIdentity {
        tag: "MW4",
        formula: "(1 x p)(R x 1)(1 x R) = R(p x 1)",
        lhs: &[R(1), R(0), P(1)],
        rhs: &[P(0), R(0)],
    },
    MapIdentity { tag: "MW5", formula: "(p x 1)(1 x L) = L(p x 1)", lhs: &[L(1), P(0)], rhs: &[P(0), L(0)] },
    MapIdentity { tag: "MW6", formula: "p(p x 1) = p(1 x p)", lhs: &[P(0), P(0)], rhs: &[P(1), P(0)] },
];

pub static ETS_MAP_IDENTITIES: [MapIdentity; 6] = [
    MapIdentity {
        tag: "MS1",
        formula: "(t x 1)(1 x S)(t x 1)(R x 1) = (R x 1)(1 x S)",
        lhs: &[R(0), T(0), S(1), T(0)],
        rhs: &[S(1), R(0)],
    },
    MapIdentity {
        tag: "MS2",
        formula: "(1 x S)(t x 1)(1 x L)(t x 1)(L x 1) = (L x 1)(1 x S)",
        lhs: &[L(0), T(0), L(1), T(0), S(1)],
        rhs: &[S(1), L(0)],
    },
    MapIdentity {
        tag: "MS3",
        formula: "(1 x S)(t x 1)(L x 1) = (1 x S)(t x 1)(1 x t)(1 x R)",
        lhs: &[L(0), T(0), S(1)],
        rhs: &[R(1), T(1), T(0), S(1)],
    },
    MapIdentity {
        tag: "MS4",
        formula: "(1 x S)(R x 1)(1 x R) = (R x 1)(1 x t)(S x 1)",
        lhs: &[R(1), R(0), S(1)],
        rhs: &[S(0), T(1), R(0)],
    },
    MapIdentity {
        tag: "MS5",
        formula: "(S x 1)(1 x L) = (t x 1)(1 x L)(t x 1)(S x 1)",
        lhs: &[L(1), S(0)],
        rhs: &[S(0), T(0), L(1), T(0)],
    },
    MapIdentity {
        tag: "MS6",
        formula: "(S x 1)(1 x t)(S x 1) = (1 x t)(S x 1)(1 x S)",
        lhs: &[S(0), T(1), S(0)],
        rhs: &[S(1), S(0), T(1)],
    },
];

struct MapContext<'a> {
    t: Tables<'a>,
    psi: Option<Vec<Vec<FormalSum<usize>>>>,
}

impl MapContext<'_> {
    fn step(&self, step: Step, v: &FormalSum<Vec<usize>>) -> FormalSum<Vec<usize>> {
        v.map_linear(|w| {
            let pair = |f: &dyn Fn(usize, usize) -> (usize, usize), i: usize| {
                let mut out = w.clone();
                let (x, y) = f(w[i], w[i + 1]);
                out[i] = x;
                out[i + 1] = y;
                FormalSum::basis(out)
            };
            match step {
                Step::Left(i) => pair(&|a, b| (self.t.l(a, b), self.t.lh(a, b)), i),
                Step::Right(i) => pair(&|a, b| (self.t.r(a, b), self.t.rh(a, b)), i),
                Step::Star(i) => pair(&|a, b| (self.t.d(a, b), self.t.s(a, b)), i),
                Step::Tau(i) => pair(&|a, b| (b, a), i),
                Step::Psi(i) => {
                    let psi = self.psi.as_ref().expect("psi");
                    psi[w[i]][w[i + 1]].map_basis(|&g| {
                        let mut out = Vec::with_capacity(w.len() - 1);
                        out.extend_from_slice(&w[..i]);
                        out.push(g);
                        out.extend_from_slice(&w[i + 2..]);
                        out
                    })
                }
            }
        })
    }

    fn run(&self, steps: &[Step], v: FormalSum<Vec<usize>>) -> FormalSum<Vec<usize>> {
        steps.iter().fold(v, |acc, &s| self.step(s, &acc))
    }

    fn check(&self, n: usize, ids: &[&MapIdentity], report: &mut AxiomReport) {
        for (a, b, c) in triples(n) {
            for id in ids {
                let v = FormalSum::basis(vec![a, b, c]);
                if self.run(id.lhs, v.clone()) != self.run(id.rhs, v) {
                    report.push(id.tag, vec![a, b, c]);
                }
            }
        }
    }
}

/// Evaluates one map identity on a basis tensor, returning both sides.
pub fn evaluate_map_identity(
    s: &OmegaStructure,
    id: &MapIdentity,
    triple: [usize; 3],
) -> Option<[FormalSum<Vec<usize>>; 2]> {
    let ctx = MapContext { t: tables(s)?, psi: s.psi_map() };
    let v = FormalSum::basis(triple.to_vec());
    Some([ctx.run(id.lhs, v.clone()), ctx.run(id.rhs, v)])
}

/// Map-level λ-ETS check. Accepts strict data or a general `ψ`.
pub fn check_maps_level(s: &OmegaStructure) -> AxiomReport {
    let level = Level::LambdaEtsMaps;
    let Some(t) = tables(s) else {
        return AxiomReport::not_applicable(level, "lhd and rhd tables are required");
    };
    let Some(psi) = s.psi_map() else {
        return AxiomReport::not_applicable(level, "weight data is required");
    };
    let ctx = MapContext { t, psi: Some(psi) };
    let mut report = AxiomReport::checked(level);
    ctx.check(s.size, &MAP_IDENTITIES.iter().collect::<Vec<_>>(), &mut report);
    report
}

pub fn check_ets_maps_level(s: &OmegaStructure) -> AxiomReport {
    let level = Level::EtsMaps;
    let Some(t) = tables(s) else {
        return AxiomReport::not_applicable(level, "lhd and rhd tables are required");
    };
    if t.dot.is_none() || t.star.is_none() {
        return AxiomReport::not_applicable(level, "dot and star tables are required");
    }
    let ctx = MapContext { t, psi: None };
    let mut report = AxiomReport::checked(level);
    let ids: Vec<&MapIdentity> = MAP_IDENTITIES[..5].iter().chain(ETS_MAP_IDENTITIES.iter()).collect();
    ctx.check(s.size, &ids, &mut report);
    report
}

/// The λ-ETS induced by an ETS and a family `μ`: `λ_{α,β} = μ_{α∗β}`.
pub fn ets_to_lambda_ets(s: &OmegaStructure, mu: &[Scalar]) -> Result<OmegaStructure> {
    let report = check_ets(s);
    if !report.holds() {
        let why = match report.violations.first() {
            Some(v) => format!("violates {} at {:?}", v.tag, v.witness),
            None => format!("{:?}", report.status),
        };
        return Err(Error::NotEts(why));
    }
    if mu.len() != s.size {
        return Err(Error::InvalidParams(format!("expected {} values of mu", s.size)));
    }
    let star = s.star.as_ref().expect("checked");
    let lambda = (0..s.size).map(|a| (0..s.size).map(|b| mu[star.get(a, b)].clone()).collect()).collect();
    let mut out = s.clone();
    out.psi = None;
    out.lambda = None;
    out.with_lambda(lambda)
}

/// The constructions of the standard examples.
#[derive(Debug, Clone)]
pub enum Example {
    /// Any EDS with `λ ≡ 0` and an arbitrary product.
    ZeroWeight { eds: Box<OmegaStructure>, dot: OpTable },
    /// `α←β = β→α = β◁α = α▷β = α`, with weight data making `ψ` associative.
    Matching { dot: OpTable, lambda: Vec<Vec<Scalar>> },
    /// A semigroup `(Ω, ⋆)` with constant weight.
    Family { product: OpTable, lambda: Scalar },
    /// An abelian group `(Ω, ⋆)` with `λ_{α,β} = λ δ_{α,β}`.
    AbelianGroup { product: OpTable, lambda: Scalar },
}

pub fn build_example(kind: &Example) -> Result<OmegaStructure> {
    match kind {
        Example::ZeroWeight { eds, dot } => {
            let r = check_eds(eds);
            if !r.holds() {
                return Err(Error::InvalidParams("the given tables do not form an EDS".into()));
            }
            let n = eds.size;
            let mut s = eds.clone();
            s.dot = None;
            s.star = None;
            s.lambda = None;
            s.psi = None;
            s.with_dot(dot.clone())?.with_lambda(vec![vec![Scalar::zero(); n]; n])
        }
        Example::Matching { dot, lambda } => {
            let n = dot.size();
            let s = OmegaStructure::eds(
                OpTable::left_projection(n),
                OpTable::right_projection(n),
                OpTable::right_projection(n),
                OpTable::left_projection(n),
            )?
            .with_dot(dot.clone())?
            .with_lambda(lambda.clone())?;
            let assoc = MapContext { t: tables(&s).expect("eds"), psi: s.psi_map() };
            let mut r = AxiomReport::checked(Level::LambdaEtsMaps);
            assoc.check(n, &[&MAP_IDENTITIES[10]], &mut r);
            if !r.holds() {
                return Err(Error::InvalidParams("the weighted product is not associative".into()));
            }
            Ok(s)
        }
        Example::Family { product, lambda } => {
            if !product.is_associative() {
                return Err(Error::InvalidParams("the product is not associative".into()));
            }
            let n = product.size();
            OmegaStructure::eds(
                product.clone(),
                product.clone(),
                OpTable::right_projection(n),
                OpTable::left_projection(n),
            )?
            .with_dot(product.clone())?
            .with_constant_lambda(lambda.clone())
        }
        Example::AbelianGroup { product, lambda } => {
            let n = product.size();
            let e = (0..n)
                .find(|&e| (0..n).all(|a| product.get(e, a) == a && product.get(a, e) == a))
                .ok_or_else(|| Error::InvalidParams("no identity element".into()))?;
            if !product.is_associative() || !product.is_commutative() {
                return Err(Error::InvalidParams("not an abelian group".into()));
            }
            let inv: Vec<usize> = (0..n)
                .map(|a| (0..n).find(|&b| product.get(a, b) == e))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::InvalidParams("an element has no inverse".into()))?;
            let lambda = (0..n)
                .map(|a| (0..n).map(|b| if a == b { lambda.clone() } else { Scalar::zero() }).collect())
                .collect();
            OmegaStructure::eds(
                OpTable::left_projection(n),
                OpTable::right_projection(n),
                OpTable::from_fn(n, |a, b| product.get(b, inv[a])),
                OpTable::from_fn(n, |a, b| product.get(a, inv[b])),
            )?
            .with_dot(OpTable::left_projection(n))?
            .with_lambda(lambda)
        }
    }
}

/// `(ℤ/n, +)` as an operation table.
pub fn cyclic_group(n: usize) -> OpTable {
    OpTable::from_fn(n, |a, b| (a + b) % n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tab(s: &str) -> OpTable {
        OpTable::parse_compact(s, &default_labels(2)).unwrap()
    }

    fn eds(l: &str, r: &str, lh: &str, rh: &str) -> OmegaStructure {
        OmegaStructure::eds(tab(l), tab(r), tab(lh), tab(rh)).unwrap()
    }

    fn q(p: i64, d: i64) -> Scalar {
        Scalar::new(p, d)
    }

    #[test]
    fn table_codes_roundtrip() {
        for t in OpTable::all(2) {
            assert_eq!(OpTable::from_code(2, t.code()), t);
        }
        assert_eq!(OpTable::all(2).count(), 16);
        assert_eq!(tab("ab/ba").compact(&default_labels(2)), "ab/ba");
        assert_eq!(tab("aa/ab").rows(), vec![vec![0, 0], vec![0, 1]]);
    }

    #[test]
    fn one_element_is_everything() {
        let one = OpTable::constant(1, 0);
        let s = OmegaStructure::eds(one.clone(), one.clone(), one.clone(), one.clone())
            .unwrap()
            .with_dot(one.clone())
            .unwrap()
            .with_star(one)
            .unwrap()
            .with_constant_lambda(Scalar::one())
            .unwrap();
        assert!(check_diassociative(&s).holds());
        assert!(check_eds(&s).holds());
        assert!(check_lambda_ets(&s).holds());
        assert!(check_ets(&s).holds());
        assert!(check_maps_level(&s).holds());
        assert!(check_ets_maps_level(&s).holds());
        assert!(s.is_commutative());
    }

    #[test]
    fn diassociative_examples() {
        let s = OmegaStructure::new(tab("aa/bb"), tab("aa/bb")).unwrap();
        assert!(check_diassociative(&s).holds());
        let bad = OmegaStructure::new(tab("ab/aa"), tab("ab/aa")).unwrap();
        let r = check_diassociative(&bad);
        assert!(!r.holds());
        // (b <- a) <- b = a <- b = b, but b <- (a <- b) = b <- b = a.
        assert_eq!(r.first("DA1").unwrap().witness, vec![1, 0, 1]);
        assert_eq!(r.count("DA1"), 2);
    }

    #[test]
    fn eds_examples() {
        assert!(check_eds(&eds("aa/aa", "aa/aa", "ab/ab", "aa/bb")).holds());
        let fam = build_example(&Example::Family { product: cyclic_group(2), lambda: Scalar::one() }).unwrap();
        assert!(check_eds(&fam).holds());
        let swapped = eds("aa/aa", "aa/aa", "aa/aa", "bb/aa");
        let r = check_eds(&swapped);
        assert!(!r.holds());
        // ← is constant, so the first extended identity still holds.
        assert_eq!(r.count("EDS1"), 0);
        assert!(r.count("EDS10") > 0);
        assert!(check_eds(&OmegaStructure::new(tab("aa/aa"), tab("aa/aa")).unwrap()).status != Status::Checked);
    }

    #[test]
    fn lambda_ets_examples() {
        let base = eds("aa/ab", "aa/ab", "bb/bb", "aa/aa");
        for d in OpTable::all(2) {
            let z = build_example(&Example::ZeroWeight { eds: Box::new(base.clone()), dot: d }).unwrap();
            assert!(check_lambda_ets(&z).holds());
        }
        let fam = build_example(&Example::Family { product: cyclic_group(2), lambda: q(3, 2) }).unwrap();
        assert!(check_lambda_ets(&fam).holds());

        let lam = |x: i64, y: i64| vec![vec![q(x, 1), q(y, 1)], vec![q(x, 1), q(y, 1)]];
        let good = build_example(&Example::Matching { dot: tab("aa/bb"), lambda: lam(1, 2) }).unwrap();
        assert!(check_lambda_ets(&good).holds());
        // λ_{α,β} = λ_α gives a non-associative weighted product.
        let rows = vec![vec![q(1, 1), q(1, 1)], vec![q(2, 1), q(2, 1)]];
        assert!(build_example(&Example::Matching { dot: tab("aa/bb"), lambda: rows.clone() }).is_err());
        let bad = good.clone();
        let bad = OmegaStructure { lambda: Some(rows), ..bad };
        let r = check_lambda_ets(&bad);
        assert_eq!(r.failing_tags(), vec!["W6"]);
        assert!(!check_maps_level(&bad).holds());
        assert_eq!(check_maps_level(&bad).failing_tags(), vec!["MW6"]);
    }

    #[test]
    fn generalized_psi_is_map_level_only() {
        let s = eds("aa/bb", "ab/ab", "ab/ab", "aa/bb");
        let b = FormalSum::basis(1usize);
        let constant_b = s.clone().with_psi(vec![vec![b.clone(), b.clone()], vec![b.clone(), b]]).unwrap();
        assert_eq!(check_lambda_ets(&constant_b).status, Status::NotApplicable("not a strict λ-ETS".into()));
        // A constant product is associative, so any associative ψ passes here.
        assert!(check_maps_level(&constant_b).holds());
        let a = FormalSum::basis(0usize);
        let b = FormalSum::basis(1usize);
        let neg = s.with_psi(vec![vec![b.clone(), a.clone()], vec![b, a]]).unwrap();
        let r = check_maps_level(&neg);
        assert_eq!(r.failing_tags(), vec!["MW6"]);
    }

    #[test]
    fn ets_examples() {
        let a1 = eds("aa/aa", "aa/aa", "aa/aa", "aa/aa").with_star(tab("aa/aa")).unwrap().with_dot(tab("aa/aa")).unwrap();
        assert!(check_ets(&a1).holds());
        let f3 = eds("aa/bb", "ab/ab", "ab/ab", "aa/bb");
        let ok = f3.clone().with_star(tab("aa/aa")).unwrap().with_dot(tab("ab/ba")).unwrap();
        assert!(check_ets(&ok).holds());
        assert!(check_ets_maps_level(&ok).holds());
        let bad = f3.with_star(tab("aa/aa")).unwrap().with_dot(tab("ba/ba")).unwrap();
        assert!(!check_ets(&bad).holds());
        assert!(!check_ets_maps_level(&bad).holds());

        let h1 = eds("ab/ba", "ab/ba", "aa/aa", "aa/aa").with_star(tab("aa/aa")).unwrap();
        let good = h1.clone().with_dot(tab("ab/ba")).unwrap();
        assert!(check_ets_maps_level(&good).holds());
        let worse = h1.with_dot(tab("aa/ab")).unwrap();
        assert!(!check_ets_maps_level(&worse).holds());
        assert!(!check_ets(&worse).holds());
    }

    #[test]
    fn map_level_a1() {
        let s = eds("aa/aa", "aa/aa", "aa/aa", "aa/aa");
        let (l, m) = (Scalar::one(), q(-1, 1));
        let lm = &l + &m;
        let psi = vec![
            vec![FormalSum::term(lm.clone(), 0), FormalSum::term(lm.clone(), 0)],
            vec![FormalSum::term(lm, 0), FormalSum::from_terms([(0, l), (1, m)])],
        ];
        assert!(check_maps_level(&s.with_psi(psi).unwrap()).holds());
    }

    #[test]
    fn opposite_behaviour() {
        let s = eds("aa/aa", "ab/ab", "aa/aa", "aa/aa")
            .with_dot(tab("aa/aa"))
            .unwrap()
            .with_constant_lambda(Scalar::one())
            .unwrap();
        assert_eq!(s.opposite().opposite(), s);
        assert!(!s.is_commutative());
        let op = s.opposite();
        assert_eq!(op.left, tab("aa/bb"));
        assert_eq!(op.right, tab("aa/aa"));
        let h = eds("ab/ba", "ab/ba", "aa/aa", "aa/aa");
        assert!(h.is_commutative());
    }

    #[test]
    fn ets_induces_lambda_ets() {
        let a1 = eds("aa/aa", "aa/aa", "aa/aa", "aa/aa").with_star(tab("bb/bb")).unwrap().with_dot(tab("aa/aa")).unwrap();
        let s = ets_to_lambda_ets(&a1, &[Scalar::one(), Scalar::from_int(5)]).unwrap();
        assert!(s.lambda.as_ref().unwrap().iter().flatten().all(|c| *c == Scalar::from_int(5)));
        assert!(check_lambda_ets(&s).holds());
        let zero = ets_to_lambda_ets(&a1, &[Scalar::zero(), Scalar::zero()]).unwrap();
        assert!(zero.lambda.unwrap().iter().flatten().all(Scalar::is_zero));
        let f3 = eds("aa/bb", "ab/ab", "ab/ab", "aa/bb").with_star(tab("aa/aa")).unwrap().with_dot(tab("ba/ba")).unwrap();
        assert!(matches!(ets_to_lambda_ets(&f3, &[Scalar::one(), Scalar::one()]), Err(Error::NotEts(_))));
    }

    #[test]
    fn example_constructions() {
        let fam = build_example(&Example::Family { product: cyclic_group(2), lambda: Scalar::one() }).unwrap();
        assert_eq!(fam.left, tab("ab/ba"));
        assert_eq!(fam.dot, Some(tab("ab/ba")));
        assert_eq!(fam.lhd, Some(tab("ab/ab")));
        assert_eq!(fam.rhd, Some(tab("aa/bb")));
        let grp = build_example(&Example::AbelianGroup { product: cyclic_group(2), lambda: Scalar::one() }).unwrap();
        assert_eq!(grp.lhd, Some(tab("ab/ba")));
        assert_eq!(grp.rhd, Some(tab("ab/ba")));
        assert_eq!(grp.right, tab("ab/ab"));
        assert_eq!(grp.dot, Some(tab("aa/bb")));
        assert_eq!(grp.lambda.as_ref().unwrap()[0], vec![Scalar::one(), Scalar::zero()]);
        assert!(check_lambda_ets(&grp).holds());
        for n in 1..5 {
            let g = build_example(&Example::AbelianGroup { product: cyclic_group(n), lambda: q(2, 3) }).unwrap();
            assert!(check_lambda_ets(&g).holds());
            assert!(check_maps_level(&g).holds());
            let f = build_example(&Example::Family { product: cyclic_group(n), lambda: q(2, 3) }).unwrap();
            assert!(check_lambda_ets(&f).holds());
        }
        let trivial = build_example(&Example::Matching {
            dot: OpTable::constant(1, 0),
            lambda: vec![vec![Scalar::one()]],
        })
        .unwrap();
        assert!(check_lambda_ets(&trivial).holds());
        assert!(build_example(&Example::Family { product: tab("ab/aa"), lambda: Scalar::one() }).is_err());
        assert!(build_example(&Example::AbelianGroup { product: tab("aa/ab"), lambda: Scalar::one() }).is_err());
    }

    #[test]
    fn group_construction_needs_the_inverse_on_the_other_side() {
        let g = cyclic_group(3);
        let neg = |a: usize| (3 - a) % 3;
        let printed = OmegaStructure::eds(
            OpTable::left_projection(3),
            OpTable::right_projection(3),
            OpTable::from_fn(3, |a, b| g.get(a, neg(b))),
            OpTable::from_fn(3, |a, b| g.get(neg(a), b)),
        )
        .unwrap();
        let r = check_eds(&printed);
        assert_eq!(r.failing_tags(), vec!["EDS4", "EDS6", "EDS8", "EDS10"]);
        let built = build_example(&Example::AbelianGroup { product: g, lambda: Scalar::one() }).unwrap();
        assert!(check_eds(&built).holds());
    }

    #[test]
    fn structure_file_roundtrip() {
        let text = "size = 2\nlabels = a b\nleft  = [[0,0],[0,1]]\nright = [[0,0],[0,1]]\n\
                    lhd   = [[0,0],[0,0]]\nrhd   = [[0,0],[0,0]]\ndot   = [[0,0],[0,1]]\n\
                    star  = [[0,0],[0,0]]\nlambda = [[1,1],[1,1/2]]\n";
        let s = OmegaStructure::parse(text).unwrap();
        assert_eq!(s.lambda.as_ref().unwrap()[1][1], q(1, 2));
        assert_eq!(OmegaStructure::parse(&s.to_text()).unwrap(), s);
        let p = "size = 2\nleft = [[0,0],[0,1]]\nright = [[0,0],[0,1]]\nlhd = [[0,0],[0,0]]\nrhd = [[0,0],[0,0]]\n\
                 psi = [[{0:1},{0:1}],[{0:1},{0:1,1:-1}]]\n";
        let s = OmegaStructure::parse(p).unwrap();
        assert_eq!(s.psi.as_ref().unwrap()[1][1].len(), 2);
        assert_eq!(OmegaStructure::parse(&s.to_text()).unwrap(), s);
        assert!(OmegaStructure::parse("size = 2\nleft = [[0,2],[0,1]]\nright = [[0,0],[0,1]]").is_err());
        assert!(OmegaStructure::parse("size = 2\nleft = [[0,0],[0,1]]").is_err());
        let e = OmegaStructure::parse("size = 2\nleft = [[0,0],[0,1]]\nright = [[0,0],[0,1]]\nbogus = 1").unwrap_err();
        assert_eq!(e.line, Some(4));
    }

    #[test]
    fn relabel_is_an_isomorphism() {
        let s = eds("aa/ab", "aa/ab", "ab/ab", "aa/bb").with_dot(tab("aa/ab")).unwrap().with_constant_lambda(q(1, 2)).unwrap();
        let t = s.relabel(&[1, 0]);
        assert_eq!(t.left, tab("ab/bb"));
        assert_eq!(t.relabel(&[1, 0]), s);
        assert_eq!(check_lambda_ets(&s).holds(), check_lambda_ets(&t).holds());
    }
}
