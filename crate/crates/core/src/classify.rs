//! Exhaustive search over small parameter structures, deduplication up to
//! carrier bijections, and the cardinality-two tables.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, ParseError, Result};
use crate::omega::{
    check_diassociative, check_eds, check_ets, check_lambda_ets, check_maps_level, Level, OmegaStructure,
    OpTable,
};
use crate::scalars::{FormalSum, Scalar};

const ETS_FIXTURE: &str = include_str!("../../../fixtures/ets2.json");
const LAMBDA_FIXTURE: &str = include_str!("../../../fixtures/lambda_ets2.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchLevel {
    Diassociative,
    Eds,
    Ets,
}

impl SearchLevel {
    pub fn level(self) -> Level {
        match self {
            SearchLevel::Diassociative => Level::Diassociative,
            SearchLevel::Eds => Level::Eds,
            SearchLevel::Ets => Level::Ets,
        }
    }
}

impl FromStr for SearchLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diassoc" | "diassociative" => Ok(SearchLevel::Diassociative),
            "eds" => Ok(SearchLevel::Eds),
            "ets" => Ok(SearchLevel::Ets),
            _ => Err(Error::InvalidParams(format!("unknown search level `{s}`"))),
        }
    }
}

impl fmt::Display for SearchLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SearchLevel::Diassociative => "diassoc",
            SearchLevel::Eds => "eds",
            SearchLevel::Ets => "ets",
        })
    }
}

/// The tables of `s` in the order `←, →, ◁, ▷, ∗, ·`, skipping absent ones.
pub fn table_key(s: &OmegaStructure) -> Vec<Vec<usize>> {
    [Some(&s.left), Some(&s.right), s.lhd.as_ref(), s.rhd.as_ref(), s.star.as_ref(), s.dot.as_ref()]
        .into_iter()
        .flatten()
        .map(|t| t.entries().to_vec())
        .collect()
}

/// The lexicographically least relabeling of `s` (tables and weight data
/// move together).
pub fn canonical(s: &OmegaStructure) -> OmegaStructure {
    (0..s.size)
        .permutations(s.size)
        .map(|p| s.relabel(&p))
        .min_by_key(table_key)
        .expect("at least one permutation")
}

/// `s` transported along the swap of a two-element carrier.
pub fn swapped(s: &OmegaStructure) -> OmegaStructure {
    s.relabel(&[1, 0])
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnumerationResult {
    pub level: SearchLevel,
    pub size: usize,
    pub raw_count: usize,
    pub class_count: usize,
    pub survivors: Vec<OmegaStructure>,
    /// Least member of each isomorphism class, in search order.
    pub representatives: Vec<OmegaStructure>,
}

/// Every structure on `n` elements passing the checker of `level`.
///
/// Candidates are all tuples of operation tables. A tuple failing the
/// diassociative identities fails every stronger level too, so the search
/// extends only surviving prefixes; the outcome is the same as filtering the
/// full product. Work is split by the `(←, →)` prefix.
pub fn enumerate(level: SearchLevel, n: usize) -> EnumerationResult {
    let tables: Vec<OpTable> = OpTable::all(n).collect();
    let prefixes: Vec<(usize, usize)> = (0..tables.len()).cartesian_product(0..tables.len()).collect();
    let survivors: Vec<OmegaStructure> =
        prefixes.into_par_iter().flat_map_iter(|(i, j)| extend(level, &tables, &tables[i], &tables[j])).collect();
    let representatives: Vec<OmegaStructure> = survivors.iter().filter(|s| canonical(s) == **s).cloned().collect();
    EnumerationResult {
        level,
        size: n,
        raw_count: survivors.len(),
        class_count: representatives.len(),
        survivors,
        representatives,
    }
}

fn extend(level: SearchLevel, tables: &[OpTable], l: &OpTable, r: &OpTable) -> Vec<OmegaStructure> {
    let base = OmegaStructure::new(l.clone(), r.clone()).expect("tables of equal size");
    if !check_diassociative(&base).holds() {
        return Vec::new();
    }
    if level == SearchLevel::Diassociative {
        return vec![base];
    }
    let mut out = Vec::new();
    for (lh, rh) in tables.iter().cartesian_product(tables) {
        let e = base.clone().with_extension(lh.clone(), rh.clone()).expect("tables of equal size");
        if !check_eds(&e).holds() {
            continue;
        }
        if level == SearchLevel::Eds {
            out.push(e);
            continue;
        }
        for (star, dot) in tables.iter().cartesian_product(tables) {
            let t = e.clone().with_star(star.clone()).and_then(|t| t.with_dot(dot.clone())).expect("tables of equal size");
            if check_ets(&t).holds() {
                out.push(t);
            }
        }
    }
    out
}

/// One structure as a flat record with compact tables and level flags.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct StructureRecord {
    pub labels: Vec<String>,
    pub left: String,
    pub right: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhd: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhd: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub star: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dot: Option<String>,
    pub diassociative: bool,
    pub eds: bool,
    pub ets: bool,
}

pub fn record(s: &OmegaStructure) -> StructureRecord {
    let c = |t: &OpTable| t.compact(&s.labels);
    StructureRecord {
        labels: s.labels.clone(),
        left: c(&s.left),
        right: c(&s.right),
        lhd: s.lhd.as_ref().map(c),
        rhd: s.rhd.as_ref().map(c),
        star: s.star.as_ref().map(c),
        dot: s.dot.as_ref().map(c),
        diassociative: check_diassociative(s).holds(),
        eds: check_eds(s).holds(),
        ets: check_ets(s).holds(),
    }
}

impl EnumerationResult {
    pub fn records(&self) -> Vec<StructureRecord> {
        self.representatives.iter().map(record).collect()
    }

    /// One line per representative, columns `← → ◁ ▷ ∗ ·`.
    pub fn render_text(&self) -> String {
        let mut out = format!(
            "level {}  size {}  structures {}  classes {}\n",
            self.level, self.size, self.raw_count, self.class_count
        );
        let cols = match self.level {
            SearchLevel::Diassociative => 2,
            SearchLevel::Eds => 4,
            SearchLevel::Ets => 6,
        };
        let head = ["<-", "->", "<|", "|>", "*", "."];
        let w = self.size * self.size + self.size - 1;
        out.push_str(&format!("{:>4}", "#"));
        for h in &head[..cols] {
            out.push_str(&format!("  {h:<w$}"));
        }
        out.push('\n');
        for (i, s) in self.representatives.iter().enumerate() {
            let r = record(s);
            let cells = [Some(r.left), Some(r.right), r.lhd, r.rhd, r.star, r.dot];
            out.push_str(&format!("{:>4}", i + 1));
            for c in cells.into_iter().flatten() {
                out.push_str(&format!("  {c:<w$}"));
            }
            out.push('\n');
        }
        out
    }
}

fn json_error(e: serde_json::Error) -> ParseError {
    ParseError::at(e.to_string(), e.line(), e.column())
}

fn labels_of(labels: &[String]) -> Result<Vec<String>> {
    if labels.len() != 2 || labels.iter().any(|l| l.chars().count() != 1) {
        return Err(Error::InvalidStructure("fixtures use two one-character labels".into()));
    }
    Ok(labels.to_vec())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtsRow {
    pub name: String,
    pub left: String,
    pub right: String,
    pub lhd: String,
    pub rhd: String,
    pub star: Vec<String>,
    pub dot: Vec<String>,
    /// Entries as printed where the transcription corrects them.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub printed: BTreeMap<String, Vec<String>>,
}

/// The ETS table on two elements; each row lists its `∗` and `·` options.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EtsFixture {
    pub labels: Vec<String>,
    pub rows: Vec<EtsRow>,
}

impl EtsFixture {
    pub fn builtin() -> Self {
        Self::parse(ETS_FIXTURE).expect("built-in fixture parses")
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        serde_json::from_str(text).map_err(json_error)
    }

    /// Every listed `(←, →, ◁, ▷, ∗, ·)` combination, named `row ∗ ·`.
    pub fn structures(&self) -> Result<Vec<(String, OmegaStructure)>> {
        let labels = labels_of(&self.labels)?;
        let t = |s: &str| OpTable::parse_compact(s, &labels);
        let mut out = Vec::new();
        for row in &self.rows {
            let eds = OmegaStructure::eds(t(&row.left)?, t(&row.right)?, t(&row.lhd)?, t(&row.rhd)?)?
                .with_labels(labels.clone())?;
            for (star, dot) in row.star.iter().cartesian_product(&row.dot) {
                let s = eds.clone().with_star(t(star)?)?.with_dot(t(dot)?)?;
                out.push((format!("{} {star} {dot}", row.name), s));
            }
        }
        Ok(out)
    }
}

/// Comparison of enumerated classes with a fixture, both modulo relabeling.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FixtureDiff {
    /// Fixture entries not found by the search.
    pub missing: Vec<String>,
    /// Classes found by the search but absent from the fixture.
    pub unexpected: Vec<StructureRecord>,
    /// Pairs of fixture entries in the same class.
    pub duplicates: Vec<(String, String)>,
}

impl FixtureDiff {
    pub fn is_exact(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty() && self.duplicates.is_empty()
    }
}

pub fn diff_with_fixture(result: &EnumerationResult, fixture: &EtsFixture) -> Result<FixtureDiff> {
    let mut named: BTreeMap<Vec<Vec<usize>>, String> = BTreeMap::new();
    let mut diff = FixtureDiff::default();
    for (name, s) in fixture.structures()? {
        let key = table_key(&canonical(&s));
        if let Some(prev) = named.get(&key) {
            diff.duplicates.push((prev.clone(), name));
        } else {
            named.insert(key, name);
        }
    }
    let found: BTreeSet<Vec<Vec<usize>>> = result.representatives.iter().map(table_key).collect();
    diff.missing = named.iter().filter(|(k, _)| !found.contains(*k)).map(|(_, n)| n.clone()).collect();
    diff.unexpected =
        result.representatives.iter().filter(|s| !named.contains_key(&table_key(s))).map(record).collect();
    Ok(diff)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaRow {
    pub name: String,
    pub left: String,
    pub right: String,
    pub lhd: String,
    pub rhd: String,
    /// `ψ = λ·L + μ·M`; templates are compact tables where `0` is zero.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<String>,
    /// `ψ = λ·(·)` for every associative product `·`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub any_dot: bool,
}

/// The λ-ETS table on two elements with its commutativity and opposite
/// remarks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LambdaFixture {
    pub labels: Vec<String>,
    pub rows: Vec<LambdaRow>,
    pub commutative: Vec<String>,
    pub opposites: Vec<[String; 2]>,
    pub self_opposite_up_to_swap: Vec<String>,
    pub opposite_by_dot: Vec<String>,
}

type Template = Vec<Vec<Option<usize>>>;

/// A product (for `any_dot` rows) and the `λ`, `μ` templates.
type RowTemplate = (Option<OpTable>, Option<Template>, Option<Template>);

fn parse_template(text: &str, labels: &[String]) -> Result<Template> {
    let cell = |ch: char| match ch {
        '0' => Ok(None),
        _ => labels.iter().position(|l| l.starts_with(ch)).map(Some).ok_or_else(|| Error::UnknownLabel(ch.to_string())),
    };
    let t: Template = text.split('/').map(|r| r.chars().map(cell).collect()).collect::<Result<_>>()?;
    if t.len() != labels.len() || t.iter().any(|r| r.len() != labels.len()) {
        return Err(Error::InvalidStructure(format!("template `{text}` has wrong size")));
    }
    Ok(t)
}

fn table_template(t: &OpTable) -> Template {
    t.rows().into_iter().map(|r| r.into_iter().map(Some).collect()).collect()
}

/// The associative operation tables on `n` elements.
pub fn associative_tables(n: usize) -> Vec<OpTable> {
    OpTable::all(n).filter(OpTable::is_associative).collect()
}

/// One instance of a row: its display name and the structure.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub dot: Option<OpTable>,
    pub structure: OmegaStructure,
}

impl LambdaFixture {
    pub fn builtin() -> Self {
        Self::parse(LAMBDA_FIXTURE).expect("built-in fixture parses")
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        serde_json::from_str(text).map_err(json_error)
    }

    pub fn row(&self, name: &str) -> Result<&LambdaRow> {
        self.rows.iter().find(|r| r.name == name).ok_or_else(|| Error::UnknownLabel(name.to_string()))
    }

    pub fn eds_of(&self, row: &LambdaRow) -> Result<OmegaStructure> {
        let labels = labels_of(&self.labels)?;
        let t = |s: &str| OpTable::parse_compact(s, &labels);
        OmegaStructure::eds(t(&row.left)?, t(&row.right)?, t(&row.lhd)?, t(&row.rhd)?)?.with_labels(labels.clone())
    }

    /// The `(L, M)` templates of a row; rows with `any_dot` give one pair per
    /// associative product.
    fn templates(&self, row: &LambdaRow) -> Result<Vec<RowTemplate>> {
        let labels = labels_of(&self.labels)?;
        if row.any_dot {
            return Ok(associative_tables(labels.len()).into_iter().map(|d| (Some(d.clone()), Some(table_template(&d)), None)).collect());
        }
        let l = row.lambda.as_deref().map(|t| parse_template(t, &labels)).transpose()?;
        let m = row.mu.as_deref().map(|t| parse_template(t, &labels)).transpose()?;
        Ok(vec![(None, l, m)])
    }

    /// The row at `(λ, μ)`; rows with `any_dot` give one instance per
    /// associative product.
    pub fn instances(&self, row: &LambdaRow, lambda: &Scalar, mu: &Scalar) -> Result<Vec<Instance>> {
        let eds = self.eds_of(row)?;
        let n = eds.size;
        let mut out = Vec::new();
        for (dot, l, m) in self.templates(row)? {
            let mut psi = vec![vec![FormalSum::zero(); n]; n];
            for (t, c) in [(l, lambda), (m, mu)] {
                let Some(t) = t else { continue };
                for (a, b) in (0..n).cartesian_product(0..n) {
                    if let Some(g) = t[a][b] {
                        psi[a][b].add_term(g, c);
                    }
                }
            }
            let name = match &dot {
                Some(d) => row.name.replace('·', &d.compact(&eds.labels)),
                None => row.name.clone(),
            };
            out.push(Instance { name, dot, structure: eds.clone().with_psi(psi)? });
        }
        Ok(out)
    }

    /// The distinct EDS classes occurring in the rows.
    pub fn eds_classes(&self) -> Result<BTreeSet<Vec<Vec<usize>>>> {
        self.rows.iter().map(|r| Ok(table_key(&canonical(&self.eds_of(r)?)))).collect()
    }

    /// The row instance whose weight map equals that of `s`, if any, up to
    /// the carrier swap. Parameters are solved for from the coefficients;
    /// `any_dot` rows cover every associative weight map on their EDS.
    pub fn covering_row(&self, s: &OmegaStructure) -> Result<Option<String>> {
        let Some(_) = s.psi_map() else { return Ok(None) };
        for t in [s.clone(), swapped(s)] {
            let psi = t.psi_map().expect("weight data");
            for row in &self.rows {
                let eds = self.eds_of(row)?;
                if (&eds.left, &eds.right, &eds.lhd, &eds.rhd) != (&t.left, &t.right, &t.lhd, &t.rhd) {
                    continue;
                }
                if row.any_dot {
                    if check_maps_level(&t).holds() {
                        return Ok(Some(format!("{} with an associative weight map", row.name)));
                    }
                    continue;
                }
                for (dot, l, m) in self.templates(row)? {
                    if let Some((x, y)) = solve_template(&psi, l.as_ref(), m.as_ref()) {
                        let name = match dot {
                            Some(d) => row.name.replace('·', &d.compact(&eds.labels)),
                            None => row.name.clone(),
                        };
                        return Ok(Some(format!("{name} at λ={x}, μ={y}")));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// Finds `(λ, μ)` with `psi = λ·L + μ·M`, if any.
fn solve_template(psi: &[Vec<FormalSum<usize>>], l: Option<&Template>, m: Option<&Template>) -> Option<(Scalar, Scalar)> {
    let n = psi.len();
    let coeff = |t: Option<&Template>, a: usize, b: usize, g: usize| match t {
        Some(t) if t[a][b] == Some(g) => Scalar::one(),
        _ => Scalar::zero(),
    };
    let eqs: Vec<(Scalar, Scalar, Scalar)> = (0..n)
        .cartesian_product(0..n)
        .cartesian_product(0..n)
        .map(|((a, b), g)| (coeff(l, a, b, g), coeff(m, a, b, g), psi[a][b].coeff(&g)))
        .collect();
    let mut candidates = vec![(Scalar::zero(), Scalar::zero())];
    for (e, f) in eqs.iter().tuple_combinations() {
        let det = &(&e.0 * &f.1) - &(&e.1 * &f.0);
        if !det.is_zero() {
            let x = &(&(&e.2 * &f.1) - &(&e.1 * &f.2)) / &det;
            let y = &(&(&e.0 * &f.2) - &(&e.2 * &f.0)) / &det;
            candidates.push((x, y));
            break;
        }
    }
    for e in &eqs {
        if !e.0.is_zero() {
            candidates.push((&e.2 / &e.0, Scalar::zero()));
        }
        if !e.1.is_zero() {
            candidates.push((Scalar::zero(), &e.2 / &e.1));
        }
    }
    candidates.into_iter().find(|(x, y)| eqs.iter().all(|(p, q, r)| &(&(p * x) + &(q * y)) == r))
}

/// `{0, 1, −1, 1/2}`.
pub fn sample_values() -> Vec<Scalar> {
    vec![Scalar::zero(), Scalar::one(), Scalar::from_int(-1), Scalar::new(1, 2)]
}

/// All pairs of [`sample_values`].
pub fn default_samples() -> Vec<(Scalar, Scalar)> {
    let v = sample_values();
    v.iter().cartesian_product(&v).map(|(a, b)| (a.clone(), b.clone())).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowCheck {
    pub name: String,
    pub lambda: Scalar,
    pub mu: Scalar,
    /// Verdict of the map-level checker.
    pub holds: bool,
    pub failing: Vec<String>,
    /// Verdict of the pointwise checker, when the weight map is strict.
    pub pointwise: Option<bool>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct TableReport {
    pub checks: Vec<RowCheck>,
}

impl TableReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    pub fn failures(&self) -> Vec<&RowCheck> {
        self.checks.iter().filter(|c| !c.holds).collect()
    }

    /// Checks where the two formulations disagree.
    pub fn disagreements(&self) -> Vec<&RowCheck> {
        self.checks.iter().filter(|c| c.pointwise.is_some_and(|p| p != c.holds)).collect()
    }

    pub fn render(&self) -> String {
        let rows = self.checks.iter().map(|c| &c.name).unique().count();
        let mut out = format!(
            "{} rows, {} checks, {} failing, {} disagreements\n",
            rows,
            self.checks.len(),
            self.failures().len(),
            self.disagreements().len()
        );
        for c in self.failures() {
            out.push_str(&format!("FAIL {} at λ={}, μ={}: {}\n", c.name, c.lambda, c.mu, c.failing.join(", ")));
        }
        for c in self.disagreements() {
            out.push_str(&format!("DISAGREE {} at λ={}, μ={}\n", c.name, c.lambda, c.mu));
        }
        out
    }
}

/// Runs the map-level checker on every row at every sample, and the
/// pointwise checker wherever the weight map factors as `λ·(·)`.
pub fn verify_lambda_ets_table(fixture: &LambdaFixture, samples: &[(Scalar, Scalar)]) -> Result<TableReport> {
    let mut report = TableReport::default();
    for row in &fixture.rows {
        for (l, m) in samples {
            for inst in fixture.instances(row, l, m)? {
                let maps = check_maps_level(&inst.structure);
                let pointwise = inst.structure.strict_factorization().map(|s| check_lambda_ets(&s).holds());
                report.checks.push(RowCheck {
                    name: inst.name,
                    lambda: l.clone(),
                    mu: m.clone(),
                    holds: maps.holds(),
                    failing: maps.failing_tags().into_iter().map(str::to_string).collect(),
                    pointwise,
                });
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RemarkCheck {
    pub claim: String,
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RemarkReport {
    pub checks: Vec<RemarkCheck>,
}

impl RemarkReport {
    pub fn holds(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }

    fn push(&mut self, claim: String, holds: bool, note: Option<String>) {
        self.checks.push(RemarkCheck { claim, holds, note });
    }

    pub fn render(&self) -> String {
        self.checks
            .iter()
            .map(|c| {
                let mark = if c.holds { "ok  " } else { "FAIL" };
                match &c.note {
                    Some(n) => format!("{mark} {} ({n})\n", c.claim),
                    None => format!("{mark} {}\n", c.claim),
                }
            })
            .collect()
    }
}

/// Checks the commutativity and opposite remarks at every sample.
///
/// Rows not listed as commutative are checked to be non-commutative at every
/// sample with a nonzero parameter. For `any_dot` rows commutativity follows
/// that of the product when `λ ≠ 0`.
pub fn verify_table_remarks(fixture: &LambdaFixture, samples: &[(Scalar, Scalar)]) -> Result<RemarkReport> {
    let mut report = RemarkReport::default();
    let at = |name: &str, l: &Scalar, m: &Scalar| -> Result<Vec<Instance>> { fixture.instances(fixture.row(name)?, l, m) };

    for row in &fixture.rows {
        let listed = fixture.commutative.contains(&row.name);
        if row.any_dot {
            let mut ok = true;
            for (l, m) in samples.iter().filter(|(l, _)| !l.is_zero()) {
                for inst in fixture.instances(row, l, m)? {
                    let dot = inst.dot.as_ref().expect("any_dot instance");
                    ok &= inst.structure.is_commutative() == dot.is_commutative();
                }
            }
            let claim = format!("{} is commutative exactly when the product is (λ ≠ 0)", row.name);
            report.push(claim, ok, Some("not among the listed commutative rows".into()));
            continue;
        }
        // At λ = μ = 0 an unlisted row may collapse onto a commutative one.
        let generic = |l: &Scalar, m: &Scalar| listed || row.lambda.is_none() || !l.is_zero() || (row.mu.is_some() && !m.is_zero());
        let mut ok = true;
        for (l, m) in samples.iter().filter(|(l, m)| generic(l, m)) {
            for inst in fixture.instances(row, l, m)? {
                ok &= inst.structure.is_commutative() == listed;
            }
        }
        let claim = match (listed, row.lambda.is_some()) {
            (true, _) => format!("{} is commutative", row.name),
            (false, true) => format!("{} is not commutative for nonzero parameters", row.name),
            (false, false) => format!("{} is not commutative", row.name),
        };
        report.push(claim, ok, None);
    }

    for [x, y] in &fixture.opposites {
        let (mut ok, mut up_to_swap) = (true, false);
        for (l, m) in samples {
            for (p, q) in at(x, l, m)?.iter().zip(at(y, l, m)?.iter()) {
                let op = p.structure.opposite();
                if op == q.structure {
                    continue;
                }
                if swapped(&op) == q.structure {
                    up_to_swap = true;
                } else {
                    ok = false;
                }
            }
        }
        let note = up_to_swap.then(|| "equal only after the carrier swap".to_string());
        report.push(format!("the opposite of {x} is {y}"), ok, note);
    }

    for x in &fixture.self_opposite_up_to_swap {
        let mut ok = true;
        for (l, m) in samples {
            for p in at(x, l, m)? {
                let op = p.structure.opposite();
                ok &= op != p.structure && swapped(&op) == p.structure;
            }
        }
        report.push(format!("{x} is not commutative but the swap maps its opposite onto it"), ok, None);
    }

    for x in &fixture.opposite_by_dot {
        let row = fixture.row(x)?;
        let mut ok = true;
        for (l, m) in samples {
            let insts = fixture.instances(row, l, m)?;
            for p in &insts {
                let t = p.dot.as_ref().expect("any_dot instance").transpose();
                let q = insts.iter().find(|q| q.dot.as_ref() == Some(&t));
                ok &= q.is_some_and(|q| q.structure == p.structure.opposite());
            }
        }
        report.push(format!("the opposite of {x} is the same row with the opposite product"), ok, None);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProbeCase {
    pub lambda: Vec<Vec<Scalar>>,
    pub holds: bool,
    pub failing: Vec<String>,
}

/// Runs the pointwise checker on `(eds, dot, λ)` for every `λ` with entries
/// in `values`.
pub fn lambda_constraint_probe(eds: &OmegaStructure, dot: &OpTable, values: &[Scalar]) -> Result<Vec<ProbeCase>> {
    if !check_eds(eds).holds() {
        return Err(Error::InvalidParams("the probe needs an EDS".into()));
    }
    let n = eds.size;
    let base = OmegaStructure { dot: None, star: None, lambda: None, psi: None, ..eds.clone() }.with_dot(dot.clone())?;
    (0..n * n)
        .map(|_| values.iter())
        .multi_cartesian_product()
        .map(|flat| {
            let lambda: Vec<Vec<Scalar>> = flat.chunks(n).map(|r| r.iter().map(|c| (*c).clone()).collect()).collect();
            let s = base.clone().with_lambda(lambda.clone())?;
            let r = check_lambda_ets(&s);
            Ok(ProbeCase { lambda, holds: r.holds(), failing: r.failing_tags().into_iter().map(str::to_string).collect() })
        })
        .collect()
}

/// A strict λ-ETS found by the probe that no fixture row accounts for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Uncovered {
    pub record: StructureRecord,
    pub lambda: Vec<Vec<Scalar>>,
}

/// Probes every two-element EDS class with every product and every `λ` with
/// entries in `values`, keeping the passing structures with all `λ` nonzero
/// that match no fixture row.
pub fn uncovered_strict_structures(fixture: &LambdaFixture, values: &[Scalar]) -> Result<Vec<Uncovered>> {
    let nonzero: Vec<Scalar> = values.iter().filter(|v| !v.is_zero()).cloned().collect();
    let eds = enumerate(SearchLevel::Eds, 2).representatives;
    let labels = labels_of(&fixture.labels)?;
    let jobs: Vec<(OmegaStructure, OpTable)> =
        eds.into_iter().cartesian_product(OpTable::all(2).collect::<Vec<_>>()).map(|(e, d)| (e.with_labels(labels.clone()).expect("two labels"), d)).collect();
    let found: Vec<Result<Vec<Uncovered>>> = jobs
        .into_par_iter()
        .map(|(e, d)| {
            let mut out = Vec::new();
            for case in lambda_constraint_probe(&e, &d, &nonzero)?.into_iter().filter(|c| c.holds) {
                let s = e.clone().with_dot(d.clone())?.with_lambda(case.lambda.clone())?;
                if fixture.covering_row(&s)?.is_none() {
                    out.push(Uncovered { record: record(&s), lambda: case.lambda });
                }
            }
            Ok(out)
        })
        .collect();
    Ok(found.into_iter().collect::<Result<Vec<_>>>()?.into_iter().flatten().collect())
}
