//! Ω-typed words over a finite-dimensional commutative algebra: the
//! commutative free Ω-Rota–Baxter algebra and its universal morphism.
//!
//! Text form of a word: `a0 [w1] a1 [w2] a2`, algebra basis labels separated
//! by bracketed parameter labels. Expressions combine words with `+`, `-`,
//! scalars, `*` for `⋄` and `P[w](...)`.

use std::fmt;
use std::sync::Arc;

use dashmap::DashMap;
use itertools::Itertools;
use rustc_hash::FxBuildHasher;
use serde::{Deserialize, Serialize};

use crate::cursor::Cursor;
use crate::error::{Error, ParseError, Result};
use crate::kvfile::{render_sum, KvFile};
use crate::omega::{OmegaStructure, Signature};
use crate::rba::OmegaRba;
use crate::scalars::{bilinear, FormalSum, Scalar};

/// A finite-dimensional associative algebra given by structure constants
/// on a labelled basis.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiniteAlgebra {
    labels: Vec<String>,
    mult: Vec<Vec<FormalSum<usize>>>,
    unit: Option<usize>,
    commutative: bool,
    adjoined: bool,
}

impl FiniteAlgebra {
    /// Validates shape, the commutativity flag, the unit and associativity.
    pub fn new(labels: Vec<String>, mult: Vec<Vec<FormalSum<usize>>>, unit: Option<usize>, commutative: bool) -> Result<Self> {
        let n = labels.len();
        let bad = |m: String| Err(Error::InvalidAlgebra(m));
        if n == 0 {
            return bad("empty basis".into());
        }
        if labels.iter().duplicates().next().is_some() {
            return bad("duplicate basis labels".into());
        }
        if mult.len() != n || mult.iter().any(|r| r.len() != n) {
            return bad(format!("the multiplication table must be {n}×{n}"));
        }
        if mult.iter().flatten().flat_map(|s| s.support()).any(|&k| k >= n) {
            return bad("a product refers to a basis index out of range".into());
        }
        let a = FiniteAlgebra { labels, mult, unit, commutative, adjoined: false };
        if let Some(u) = unit {
            if u >= n {
                return bad(format!("unit index {u} out of range"));
            }
            if let Some(i) = (0..n).find(|&i| a.mult[u][i] != FormalSum::basis(i) || a.mult[i][u] != FormalSum::basis(i)) {
                return bad(format!("`{}` is not a two-sided unit on `{}`", a.labels[u], a.labels[i]));
            }
        }
        if commutative {
            if let Some((i, j)) = (0..n).tuple_combinations().find(|&(i, j)| a.mult[i][j] != a.mult[j][i]) {
                return bad(format!("flagged commutative but {}·{} ≠ {}·{}", a.labels[i], a.labels[j], a.labels[j], a.labels[i]));
            }
        }
        for (i, j, k) in crate::omega::triples(n) {
            let left = a.mul(&a.mult[i][j], &FormalSum::basis(k));
            let right = a.mul(&FormalSum::basis(i), &a.mult[j][k]);
            if left != right {
                return bad(format!("not associative at ({}, {}, {})", a.labels[i], a.labels[j], a.labels[k]));
            }
        }
        Ok(a)
    }

    /// `span{x}` with `x² = 0`, no unit.
    pub fn square_zero() -> Self {
        Self::new(vec!["x".into()], vec![vec![FormalSum::zero()]], None, true).unwrap()
    }

    /// `ℚ[x]/(x²)` on the basis `1, x`.
    pub fn dual_numbers() -> Self {
        let b = FormalSum::basis;
        Self::new(vec!["1".into(), "x".into()], vec![vec![b(0), b(1)], vec![b(1), FormalSum::zero()]], Some(0), true).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn unit(&self) -> Option<usize> {
        self.unit
    }

    /// Whether this algebra was produced by [`FiniteAlgebra::unitize`], in
    /// which case the unit spans the adjoined copy of the scalars.
    pub fn is_unitization(&self) -> bool {
        self.adjoined
    }

    pub fn is_commutative(&self) -> bool {
        self.commutative
    }

    pub fn basis_product(&self, i: usize, j: usize) -> &FormalSum<usize> {
        &self.mult[i][j]
    }

    pub fn mul(&self, x: &FormalSum<usize>, y: &FormalSum<usize>) -> FormalSum<usize> {
        bilinear(x, y, |&i, &j| self.mult[i][j].clone())
    }

    /// `uA = k ⊕ A` with `(λ + a)(μ + b) = λμ + (λb + μa + ab)`. The new unit
    /// is basis index 0 and `A`'s basis is shifted up by one.
    pub fn unitize(&self) -> FiniteAlgebra {
        let n = self.dim() + 1;
        let mut label = "1".to_string();
        while self.labels.contains(&label) {
            label.insert(0, 'u');
        }
        let labels = std::iter::once(label).chain(self.labels.iter().cloned()).collect();
        let mult = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| match (i, j) {
                        (0, j) => FormalSum::basis(j),
                        (i, 0) => FormalSum::basis(i),
                        (i, j) => self.mult[i - 1][j - 1].map_basis(|k| k + 1),
                    })
                    .collect()
            })
            .collect();
        let mut u = FiniteAlgebra::new(labels, mult, Some(0), self.commutative).expect("unitization of a valid algebra");
        u.adjoined = true;
        u
    }

    pub fn parse(text: &str) -> std::result::Result<Self, ParseError> {
        let f = KvFile::parse(text)?;
        f.check_keys(&["basis", "unit", "commutative", "mult"])?;
        let need = |k: &str| f.get(k).ok_or_else(|| ParseError::new(format!("missing `{k}`")));
        let labels = need("basis")?.words();
        let n = labels.len();
        let unit = match f.get("unit") {
            None => None,
            Some(e) if e.raw == "none" => None,
            Some(e) => {
                let raw = e.raw.as_str();
                Some(labels.iter().position(|l| l == raw).map_or_else(|| e.usize(), Ok)?)
            }
        };
        let commutative = match f.get("commutative") {
            Some(e) => e.boolean()?,
            None => false,
        };
        let mult = need("mult")?.sum_matrix(n, n)?;
        FiniteAlgebra::new(labels, mult, unit, commutative).map_err(|e| ParseError::new(e.to_string()))
    }

    pub fn to_text(&self) -> String {
        let rows: Vec<String> =
            self.mult.iter().map(|r| format!("[{}]", r.iter().map(render_sum).join(","))).collect();
        format!(
            "basis = [{}]\nunit = {}\ncommutative = {}\nmult = [{}]\n",
            self.labels.join(", "),
            self.unit.map_or("none".to_string(), |u| u.to_string()),
            self.commutative,
            rows.join(",")
        )
    }
}

impl fmt::Debug for FiniteAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// `a₀ ⊗_{ω₁} a₁ ⊗ ⋯ ⊗_{ωₙ} aₙ` with basis indices `aᵢ`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct TypedWord {
    entries: Vec<usize>,
    types: Vec<usize>,
}

pub type WordSum = FormalSum<TypedWord>;

impl TypedWord {
    pub fn new(entries: Vec<usize>, types: Vec<usize>) -> Result<Self> {
        if entries.len() != types.len() + 1 {
            return Err(Error::InvalidStructure(format!(
                "a word with {} types needs {} entries, got {}",
                types.len(),
                types.len() + 1,
                entries.len()
            )));
        }
        Ok(TypedWord { entries, types })
    }

    pub fn letter(a: usize) -> Self {
        TypedWord { entries: vec![a], types: vec![] }
    }

    pub fn entries(&self) -> &[usize] {
        &self.entries
    }

    pub fn types(&self) -> &[usize] {
        &self.types
    }

    /// `n + 1` for `n` types.
    pub fn length(&self) -> usize {
        self.entries.len()
    }

    /// `a ⊗_ω self`
    pub fn prepend(&self, a: usize, omega: usize) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len() + 1);
        entries.push(a);
        entries.extend_from_slice(&self.entries);
        let mut types = Vec::with_capacity(self.types.len() + 1);
        types.push(omega);
        types.extend_from_slice(&self.types);
        TypedWord { entries, types }
    }

    fn tail(&self) -> TypedWord {
        TypedWord { entries: self.entries[1..].to_vec(), types: self.types[1..].to_vec() }
    }

    fn with_head(&self, a: usize) -> TypedWord {
        let mut w = self.clone();
        w.entries[0] = a;
        w
    }
}

/// Every pure word of length at most `max_len` over `dim` basis elements and
/// `types` parameter labels, shortest first.
pub fn words_up_to(dim: usize, types: usize, max_len: usize) -> Vec<TypedWord> {
    let mut out = Vec::new();
    for len in 1..=max_len {
        for entries in (0..len).map(|_| 0..dim).multi_cartesian_product() {
            for ts in (1..len).map(|_| 0..types).multi_cartesian_product() {
                out.push(TypedWord { entries: entries.clone(), types: ts });
            }
        }
    }
    out
}

/// Whether a word of `uA` lies in `⧢′(A)`: length one with an entry of `A`,
/// or length at least two.
pub fn sh_prime_filter(w: &TypedWord, ua: &FiniteAlgebra) -> bool {
    w.length() >= 2 || !(ua.is_unitization() && ua.unit() == Some(w.entries[0]))
}

pub fn sh_prime_contains(u: &WordSum, ua: &FiniteAlgebra) -> bool {
    u.support().all(|w| sh_prime_filter(w, ua))
}

/// `⧢(A)` over a parameter signature: typed words with the product `⋄` and
/// `P_ω(a) = 1_A ⊗_ω a`.
pub struct WordAlgebra {
    algebra: FiniteAlgebra,
    sig: Signature,
    types: Vec<String>,
    one: usize,
    memo: DashMap<(TypedWord, TypedWord), Arc<WordSum>, FxBuildHasher>,
}

const MEMO_LIMIT: usize = 200_000;

impl WordAlgebra {
    /// Needs weight data on `s` and a unit in `algebra` (use
    /// [`FiniteAlgebra::unitize`] otherwise).
    pub fn new(s: &OmegaStructure, algebra: FiniteAlgebra) -> Result<Self> {
        Self::with_signature(Signature::of(s)?, s.labels.clone(), algebra)
    }

    pub fn with_signature(sig: Signature, types: Vec<String>, algebra: FiniteAlgebra) -> Result<Self> {
        let one = algebra
            .unit()
            .ok_or_else(|| Error::InvalidAlgebra("P_ω needs a unit; unitize the algebra first".into()))?;
        Ok(WordAlgebra { algebra, sig, types, one, memo: DashMap::default() })
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn types(&self) -> &[String] {
        &self.types
    }

    pub fn letter(&self, a: usize) -> WordSum {
        FormalSum::basis(TypedWord::letter(a))
    }

    /// The element `Σ cᵢ eᵢ` of the algebra as a sum of length-one words.
    pub fn embed(&self, x: &FormalSum<usize>) -> WordSum {
        x.map_basis(|&i| TypedWord::letter(i))
    }

    pub fn diamond(&self, u: &WordSum, v: &WordSum) -> WordSum {
        bilinear(u, v, |a, b| (*self.diamond_words(a, b)).clone())
    }

    pub fn diamond_words(&self, a: &TypedWord, b: &TypedWord) -> Arc<WordSum> {
        let key = (a.clone(), b.clone());
        if let Some(hit) = self.memo.get(&key) {
            return Arc::clone(&hit);
        }
        let out = Arc::new(self.expand(a, b));
        if self.memo.len() >= MEMO_LIMIT {
            self.memo.clear();
        }
        self.memo.insert(key, Arc::clone(&out));
        out
    }

    fn expand(&self, a: &TypedWord, b: &TypedWord) -> WordSum {
        let head = self.algebra.basis_product(a.entries[0], b.entries[0]);
        match (a.types.len(), b.types.len()) {
            (0, 0) => head.map_basis(|&k| TypedWord::letter(k)),
            (_, 0) => head.map_basis(|&k| a.with_head(k)),
            (0, _) => head.map_basis(|&k| b.with_head(k)),
            _ => {
                let (al, be) = (a.types[0], b.types[0]);
                let (a1, b1) = (a.tail(), b.tail());
                let sig = &self.sig;
                let mut tail: FormalSum<(usize, TypedWord)> = FormalSum::zero();
                let mut push = |omega: usize, c: &Scalar, s: &WordSum| {
                    for (w, d) in s.iter() {
                        tail.add_term((omega, w.clone()), &(c * d));
                    }
                };
                let one = Scalar::one();
                push(sig.right.get(al, be), &one, &self.diamond_words(&a1.prepend(self.one, sig.rhd.get(al, be)), &b1));
                push(sig.left.get(al, be), &one, &self.diamond_words(&a1, &b1.prepend(self.one, sig.lhd.get(al, be))));
                let psi = sig.psi(al, be);
                if !psi.is_zero() {
                    let inner = self.diamond_words(&a1, &b1);
                    for (g, c) in psi.iter() {
                        push(*g, c, &inner);
                    }
                }
                let mut out = FormalSum::zero();
                for (k, c) in head.iter() {
                    for ((omega, w), d) in tail.iter() {
                        out.add_term(w.prepend(*k, *omega), &(c * d));
                    }
                }
                out
            }
        }
    }

    pub fn p_omega(&self, omega: usize, u: &WordSum) -> WordSum {
        u.map_basis(|w| w.prepend(self.one, omega))
    }

    pub fn clear_memo(&self) {
        self.memo.clear();
    }

    /// Checks that `f`, given on basis elements and extended linearly, is
    /// multiplicative on all basis pairs and sends the unit to `1_R`. On a
    /// unitization the value of `f` at the adjoined unit is ignored and taken
    /// to be `1_R`.
    pub fn check_morphism<R: OmegaRba>(&self, f: &dyn Fn(usize) -> R::Elem, r: &R) -> Result<()> {
        let a = &self.algebra;
        let g = |i: usize| if a.is_unitization() && i == self.one { r.one() } else { f(i) };
        let lin = |x: &FormalSum<usize>| x.iter().fold(r.zero(), |acc, (&k, c)| r.add(&acc, &r.scale(c, &g(k))));
        if g(self.one) != r.one() {
            return Err(Error::NotMorphism(format!("`{}` is not sent to the unit", a.labels[self.one])));
        }
        for (i, j) in (0..a.dim()).cartesian_product(0..a.dim()) {
            if lin(a.basis_product(i, j)) != r.mul(&g(i), &g(j)) {
                return Err(Error::NotMorphism(format!("f({0}·{1}) ≠ f({0})·f({1})", a.labels[i], a.labels[j])));
            }
        }
        Ok(())
    }

    /// The universal morphism `f̄(a₀ ⊗_α a') = f(a₀) · P_α(f̄(a'))`.
    pub fn evaluate<R: OmegaRba>(&self, u: &WordSum, f: &dyn Fn(usize) -> R::Elem, r: &R) -> Result<R::Elem> {
        if r.signature() != &self.sig {
            return Err(Error::StructureMismatch);
        }
        self.check_morphism(f, r)?;
        let a = &self.algebra;
        let g = |i: usize| if a.is_unitization() && i == self.one { r.one() } else { f(i) };
        let mut out = r.zero();
        for (w, c) in u.iter() {
            let mut acc = g(*w.entries.last().unwrap());
            for (&e, &omega) in w.entries.iter().rev().skip(1).zip(w.types.iter().rev()) {
                acc = r.mul(&g(e), &r.p(omega, &acc));
            }
            out = r.add(&out, &r.scale(c, &acc));
        }
        Ok(out)
    }

    pub fn render_word(&self, w: &TypedWord) -> String {
        let mut out = self.algebra.labels[w.entries[0]].clone();
        for (&t, &e) in w.types.iter().zip(&w.entries[1..]) {
            out.push_str(&format!(" [{}] {}", self.types[t], self.algebra.labels[e]));
        }
        out
    }

    pub fn render_sum(&self, u: &WordSum) -> String {
        u.render(|w| self.render_word(w))
    }

    pub fn parse_word(&self, text: &str) -> std::result::Result<TypedWord, ParseError> {
        let mut c = Cursor::new(text);
        let w = self.word(&mut c)?;
        c.finish()?;
        Ok(w)
    }

    pub fn parse_expr(&self, text: &str) -> std::result::Result<WordSum, ParseError> {
        let mut c = Cursor::new(text);
        let u = self.expr(&mut c)?;
        c.finish()?;
        Ok(u)
    }

    fn word(&self, c: &mut Cursor) -> std::result::Result<TypedWord, ParseError> {
        let label = |c: &mut Cursor, labels: &[String], what: &str| {
            let name = c.ident()?;
            labels.iter().position(|l| *l == name).ok_or_else(|| c.err(format!("unknown {what} label `{name}`")))
        };
        let mut entries = vec![label(c, &self.algebra.labels, "algebra")?];
        let mut types = Vec::new();
        while c.eat('[') {
            types.push(label(c, &self.types, "parameter")?);
            c.expect(']')?;
            entries.push(label(c, &self.algebra.labels, "algebra")?);
        }
        Ok(TypedWord { entries, types })
    }

    fn expr(&self, c: &mut Cursor) -> std::result::Result<WordSum, ParseError> {
        let mut acc = if c.eat('-') { -&self.term(c)? } else { self.term(c)? };
        loop {
            if c.eat('+') {
                acc = acc + self.term(c)?;
            } else if c.eat('-') {
                acc = &acc - &self.term(c)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&self, c: &mut Cursor) -> std::result::Result<WordSum, ParseError> {
        let mut acc = self.factor(c)?;
        while c.eat('*') {
            let rhs = self.factor(c)?;
            acc = self.diamond(&acc, &rhs);
        }
        Ok(acc)
    }

    /// A leading number is a scalar when followed by `*` or `/`, or when it
    /// is not an algebra label.
    fn factor(&self, c: &mut Cursor) -> std::result::Result<WordSum, ParseError> {
        match c.peek() {
            Some('(') => {
                c.expect('(')?;
                let u = self.expr(c)?;
                c.expect(')')?;
                Ok(u)
            }
            Some('P') if c.peek_second() == Some('[') => {
                c.expect('P')?;
                c.expect('[')?;
                let name = c.ident()?;
                let w = self.types.iter().position(|l| *l == name).ok_or_else(|| c.err(format!("unknown parameter label `{name}`")))?;
                c.expect(']')?;
                c.expect('(')?;
                let u = self.expr(c)?;
                c.expect(')')?;
                Ok(self.p_omega(w, &u))
            }
            Some(d) if d.is_ascii_digit() => {
                let mark = c.mark();
                let token = c.ident()?;
                let scalar_next = matches!(c.peek(), Some('*' | '/'));
                if !scalar_next && self.algebra.labels.contains(&token) {
                    c.reset(mark);
                    return Ok(FormalSum::basis(self.word(c)?));
                }
                c.reset(mark);
                let s = c.scalar()?;
                if c.eat('*') {
                    Ok(self.factor(c)?.scale(&s))
                } else {
                    Ok(self.letter(self.one).scale(&s))
                }
            }
            Some(_) => Ok(FormalSum::basis(self.word(c)?)),
            None => Err(c.err("unexpected end of input")),
        }
    }
}

impl OmegaRba for WordAlgebra {
    type Elem = WordSum;

    fn signature(&self) -> &Signature {
        &self.sig
    }
    fn one(&self) -> WordSum {
        self.letter(self.one)
    }
    fn zero(&self) -> WordSum {
        FormalSum::zero()
    }
    fn add(&self, a: &WordSum, b: &WordSum) -> WordSum {
        a + b
    }
    fn scale(&self, c: &Scalar, a: &WordSum) -> WordSum {
        a.scale(c)
    }
    fn mul(&self, a: &WordSum, b: &WordSum) -> WordSum {
        self.diamond(a, b)
    }
    fn p(&self, omega: usize, a: &WordSum) -> WordSum {
        self.p_omega(omega, a)
    }
    fn render(&self, a: &WordSum) -> String {
        self.render_sum(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::{build_example, check_lambda_ets, cyclic_group, Example, OpTable};
    use crate::rba::{check_rb_identity, rb_expansion};
    use proptest::prelude::*;

    fn family(l: Scalar) -> OmegaStructure {
        build_example(&Example::Family { product: cyclic_group(2), lambda: l }).unwrap()
    }

    fn dual(s: &OmegaStructure) -> WordAlgebra {
        WordAlgebra::new(s, FiniteAlgebra::dual_numbers()).unwrap()
    }

    #[test]
    fn lengths() {
        let w = |n: usize| TypedWord::new(vec![0; n + 1], vec![0; n]).unwrap();
        assert_eq!(w(0).length(), 1);
        assert_eq!(w(1).length(), 2);
        assert_eq!(w(3).length(), 4);
        assert!(TypedWord::new(vec![0, 0], vec![]).is_err());
    }

    #[test]
    fn algebra_validation() {
        let b = FormalSum::basis;
        assert!(FiniteAlgebra::new(vec!["1".into(), "x".into()], vec![vec![b(0), b(1)], vec![b(1), b(1)]], Some(0), true).is_ok());
        // k[x]/(x² - x - 1)
        assert!(FiniteAlgebra::new(
            vec!["1".into(), "x".into()],
            vec![vec![b(0), b(1)], vec![b(1), b(0) + b(1)]],
            Some(0),
            true
        )
        .is_ok());
        // Left projection: associative, not commutative.
        let proj = vec![vec![b(0), b(0)], vec![b(1), b(1)]];
        assert!(FiniteAlgebra::new(vec!["e".into(), "f".into()], proj.clone(), None, false).is_ok());
        assert!(FiniteAlgebra::new(vec!["e".into(), "f".into()], proj, None, true).is_err());
        // e·e = f, e·f = e: (e·e)·f = 0 but e·(e·f) = f.
        let z = FormalSum::zero;
        let bad = vec![vec![b(1), b(0)], vec![z(), z()]];
        assert!(FiniteAlgebra::new(vec!["e".into(), "f".into()], bad, None, false).is_err());
        assert!(FiniteAlgebra::new(vec!["e".into()], vec![vec![b(0)]], Some(0), true).is_ok());
        assert!(FiniteAlgebra::new(vec!["e".into()], vec![vec![z()]], Some(0), true).is_err());
    }

    #[test]
    fn unitization() {
        let u = FiniteAlgebra::square_zero().unitize();
        assert_eq!(u.dim(), 2);
        assert_eq!(u.labels(), ["1", "x"]);
        assert_eq!(u.unit(), Some(0));
        assert!(u.is_commutative() && u.is_unitization());
        assert!(u.basis_product(1, 1).is_zero());
        assert_eq!(u, {
            let mut d = FiniteAlgebra::dual_numbers();
            d.adjoined = true;
            d
        });
        let uu = FiniteAlgebra::dual_numbers().unitize();
        assert_eq!(uu.labels(), ["u1", "1", "x"]);
        for i in 0..3 {
            assert_eq!(uu.basis_product(0, i), &FormalSum::basis(i));
        }
    }

    #[test]
    fn filter_for_the_free_object() {
        let ua = FiniteAlgebra::square_zero().unitize();
        assert!(!sh_prime_filter(&TypedWord::letter(0), &ua));
        assert!(sh_prime_filter(&TypedWord::letter(1), &ua));
        assert!(sh_prime_filter(&TypedWord::new(vec![0, 0], vec![1]).unwrap(), &ua));
    }

    #[test]
    fn file_roundtrip() {
        for a in [FiniteAlgebra::dual_numbers(), FiniteAlgebra::square_zero()] {
            assert_eq!(FiniteAlgebra::parse(&a.to_text()).unwrap(), a);
        }
        let a = FiniteAlgebra::parse("basis = [1, x]; unit = 1; commutative = true; mult = [[{0:1},{1:1}],[{1:1},{}]]").unwrap();
        assert_eq!(a, FiniteAlgebra::dual_numbers());
        let e = FiniteAlgebra::parse("basis = [e]; unit = none; mult = [[{0:1, 3:1}]]").unwrap_err();
        assert!(e.message.contains("mult"));
    }

    #[test]
    fn product_cases() {
        let s = family(Scalar::new(1, 2));
        let w = dual(&s);
        let e = |t: &str| w.parse_expr(t).unwrap();
        assert_eq!(e("x * x"), FormalSum::zero());
        assert_eq!(e("x * 1"), e("x"));
        assert_eq!(e("x [a] 1 * x"), FormalSum::zero());
        assert_eq!(e("1 [a] x * x"), e("x [a] x"));
        assert_eq!(e("x * 1 [b] x"), e("x [b] x"));
        // On ℤ/2: a→b = a←b = a·b = b, a▷b = a, a◁b = b.
        let got = e("1 [a] 1 * 1 [b] 1");
        let want = e("1 [b] 1 [a] 1 + 1 [b] 1 [b] 1 + 1/2*(1 [b] 1)");
        assert_eq!(got, want);
        let (pa, pb) = (w.p_omega(0, &w.one()), w.p_omega(1, &w.one()));
        assert_eq!(w.mul(&pa, &pb), rb_expansion(&w, w.signature(), 0, 1, &w.one(), &w.one()));
    }

    #[test]
    fn unit_and_operators() {
        let w = dual(&family(Scalar::one()));
        for v in words_up_to(2, 2, 3) {
            let u = FormalSum::basis(v.clone());
            assert_eq!(w.mul(&w.one(), &u), u);
            assert_eq!(w.mul(&u, &w.one()), u);
            let p = w.p_omega(1, &w.p_omega(0, &u));
            let top = p.support().next().unwrap();
            assert_eq!(top.length(), v.length() + 2);
            assert_eq!(&top.types()[..2], [1, 0]);
        }
    }

    #[test]
    fn needs_weight_and_unit() {
        let s = family(Scalar::one());
        assert!(WordAlgebra::new(&s, FiniteAlgebra::square_zero()).is_err());
        let eds = OmegaStructure::eds(s.left.clone(), s.right.clone(), s.lhd.clone().unwrap(), s.rhd.clone().unwrap()).unwrap();
        assert!(matches!(WordAlgebra::new(&eds, FiniteAlgebra::dual_numbers()), Err(Error::MissingWeight)));
    }

    #[test]
    fn word_text_roundtrip() {
        let w = dual(&family(Scalar::one()));
        for v in words_up_to(2, 2, 3) {
            assert_eq!(w.parse_word(&w.render_word(&v)).unwrap(), v);
        }
        let u = w.parse_expr("2/3*x [a] 1 - 1 [b] x + 1").unwrap();
        assert_eq!(w.parse_expr(&w.render_sum(&u)).unwrap(), u);
        assert_eq!(w.render_sum(&w.parse_expr("2*1").unwrap()), "2*1");
        assert!(w.parse_expr("x [c] x").is_err());
        assert!(w.parse_expr("x [a]").is_err());
    }

    #[test]
    fn noncommutative_parameters_break_commutativity() {
        let lambda = vec![vec![Scalar::one(), Scalar::from_int(2)]; 2];
        let s = build_example(&Example::Matching { dot: OpTable::left_projection(2), lambda }).unwrap();
        assert!(check_lambda_ets(&s).holds());
        assert!(!s.is_commutative());
        let w = dual(&s);
        let pool: Vec<WordSum> = words_up_to(2, 2, 3).into_iter().map(FormalSum::basis).collect();
        let witness = pool.iter().cartesian_product(&pool).find(|(u, v)| w.mul(u, v) != w.mul(v, u));
        assert!(witness.is_some());
    }

    #[test]
    fn universal_morphism() {
        let s = family(Scalar::new(2, 3));
        let a = FiniteAlgebra::square_zero();
        let source = WordAlgebra::new(&s, a.unitize()).unwrap();
        let target = dual(&s);
        let f = |i: usize| target.letter(i).scale(&Scalar::from_int(3));
        source.check_morphism(&f, &target).unwrap();
        let u = source.parse_expr("x [a] 1 [b] x").unwrap();
        let got = source.evaluate(&u, &f, &target).unwrap();
        let x = target.letter(1).scale(&Scalar::from_int(3));
        let want = target.mul(&x, &target.p(0, &target.mul(&target.one(), &target.p(1, &x))));
        assert_eq!(got, want);
        let bad = |i: usize| target.letter(i);
        assert!(dual(&s).check_morphism(&|i| target.letter(1 - i), &target).is_err());
        assert!(source.check_morphism(&bad, &target).is_ok());
    }

    #[test]
    fn rb_identity_on_short_words() {
        for l in [Scalar::zero(), Scalar::one(), Scalar::new(-1, 2)] {
            let w = dual(&family(l));
            let pool: Vec<WordSum> = words_up_to(2, 2, 2).into_iter().map(FormalSum::basis).collect();
            assert!(check_rb_identity(&w, w.signature(), &pool).holds());
        }
    }

    fn arb_word() -> impl Strategy<Value = TypedWord> {
        (1usize..4).prop_flat_map(|len| {
            (prop::collection::vec(0usize..2, len), prop::collection::vec(0usize..2, len - 1))
                .prop_map(|(e, t)| TypedWord::new(e, t).unwrap())
        })
    }

    proptest! {
        #[test]
        fn commutative_associative_graded(a in arb_word(), b in arb_word(), c in arb_word()) {
            let w = dual(&family(Scalar::new(1, 3)));
            let (u, v, x) = (FormalSum::basis(a.clone()), FormalSum::basis(b.clone()), FormalSum::basis(c));
            let uv = w.mul(&u, &v);
            prop_assert_eq!(&uv, &w.mul(&v, &u));
            prop_assert_eq!(w.mul(&uv, &x), w.mul(&u, &w.mul(&v, &x)));
            let top = a.length() + b.length() - 1;
            prop_assert!(uv.support().all(|t| t.length() <= top && t.length() + a.length().min(b.length()) > top));
            let flat = dual(&family(Scalar::zero()));
            prop_assert!(flat.mul(&u, &v).support().all(|t| t.length() == top));
        }
    }
}
