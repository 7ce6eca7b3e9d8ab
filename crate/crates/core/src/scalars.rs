//! Exact rational coefficients and canonical finite linear combinations.

use std::cmp::Ordering;
use std::collections::btree_map::{self, BTreeMap};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::ParseError;

/// A rational number in lowest terms with a positive denominator.
///
/// Values whose numerator and denominator fit in an `i64` are stored
/// inline; anything larger falls back to an arbitrary-precision rational.
#[derive(Clone)]
pub struct Scalar(Repr);

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(BigRational),
}

fn gcd(a: u128, b: u128) -> u128 {
    match (u64::try_from(a), u64::try_from(b)) {
        (Ok(a), Ok(b)) => gcd64(a, b) as u128,
        _ => {
            let (mut a, mut b) = (a, b);
            while b != 0 {
                (a, b) = (b, a % b);
            }
            a
        }
    }
}

fn gcd64(mut a: u64, mut b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a | b;
    }
    let shift = (a | b).trailing_zeros();
    a >>= a.trailing_zeros();
    loop {
        b >>= b.trailing_zeros();
        if a > b {
            std::mem::swap(&mut a, &mut b);
        }
        b -= a;
        if b == 0 {
            return a << shift;
        }
    }
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar(Repr::Small(0, 1))
    }

    pub fn one() -> Self {
        Scalar(Repr::Small(1, 1))
    }

    pub fn from_int(n: i64) -> Self {
        Scalar(Repr::Small(n, 1))
    }

    /// Panics if `den` is zero.
    pub fn new(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(num: i128, den: i128) -> Self {
        if num == 0 {
            return Self::zero();
        }
        if den == 1 {
            if let Ok(p) = i64::try_from(num) {
                return Scalar(Repr::Small(p, 1));
            }
        }
        let g = gcd(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut p, mut q) = (num / g, den / g);
        if q < 0 {
            p = -p;
            q = -q;
        }
        match (i64::try_from(p), i64::try_from(q)) {
            (Ok(p), Ok(q)) => Scalar(Repr::Small(p, q)),
            _ => Scalar(Repr::Big(BigRational::new(BigInt::from(p), BigInt::from(q)))),
        }
    }

    fn from_big(r: BigRational) -> Self {
        match (r.numer().to_i64(), r.denom().to_i64()) {
            (Some(p), Some(q)) => Scalar(Repr::Small(p, q)),
            _ => Scalar(Repr::Big(r)),
        }
    }

    fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(p, q) => BigRational::new_raw(BigInt::from(*p), BigInt::from(*q)),
            Repr::Big(r) => r.clone(),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_one(&self) -> bool {
        matches!(self.0, Repr::Small(1, 1))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(p, _) => *p < 0,
            Repr::Big(r) => r.is_negative(),
        }
    }

    pub fn numerator(&self) -> BigInt {
        match &self.0 {
            Repr::Small(p, _) => BigInt::from(*p),
            Repr::Big(r) => r.numer().clone(),
        }
    }

    pub fn denominator(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, q) => BigInt::from(*q),
            Repr::Big(r) => r.denom().clone(),
        }
    }

    pub fn abs(&self) -> Scalar {
        if self.is_negative() { -self } else { self.clone() }
    }

    pub fn checked_div(&self, other: &Scalar) -> Option<Scalar> {
        if other.is_zero() {
            return None;
        }
        Some(match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => Self::from_i128(*a as i128 * *d as i128, *b as i128 * *c as i128),
            _ => Self::from_big(self.to_big() / other.to_big()),
        })
    }

    fn add_ref(&self, other: &Scalar) -> Scalar {
        match (&self.0, &other.0) {
            (Repr::Small(a, 1), Repr::Small(c, 1)) => Self::from_i128(*a as i128 + *c as i128, 1),
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                match a.checked_mul(d).zip(c.checked_mul(b)).and_then(|(x, y)| x.checked_add(y)) {
                    Some(num) => Self::from_i128(num, b * d),
                    None => Self::from_big(self.to_big() + other.to_big()),
                }
            }
            _ => Self::from_big(self.to_big() + other.to_big()),
        }
    }

    fn mul_ref(&self, other: &Scalar) -> Scalar {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => Self::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128),
            _ => Self::from_big(self.to_big() * other.to_big()),
        }
    }

    fn neg_ref(&self) -> Scalar {
        match &self.0 {
            Repr::Small(p, q) => match p.checked_neg() {
                Some(p) => Scalar(Repr::Small(p, *q)),
                None => Self::from_big(-self.to_big()),
            },
            Repr::Big(r) => Self::from_big(-r),
        }
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Scalar {}

impl Ord for Scalar {
    fn cmp(&self, other: &Self) -> Ordering {
        match (&self.0, &other.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&other.to_big()),
        }
    }
}

impl PartialOrd for Scalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Hash for Scalar {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match &self.0 {
            Repr::Small(p, q) => {
                p.hash(h);
                q.hash(h);
            }
            Repr::Big(r) => r.hash(h),
        }
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(p, 1) => write!(f, "{p}"),
            Repr::Small(p, q) => write!(f, "{p}/{q}"),
            Repr::Big(r) if r.denom().is_one() => write!(f, "{}", r.numer()),
            Repr::Big(r) => write!(f, "{}/{}", r.numer(), r.denom()),
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Scalar {
    type Err = ParseError;

    /// Accepts `p` or `p/q` with optional sign on `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || ParseError::new(format!("invalid scalar literal `{t}`"));
        let (p, q) = match t.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (t, "1"),
        };
        let digits = |x: &str| {
            let body = x.strip_prefix(['-', '+']).unwrap_or(x);
            !body.is_empty() && body.bytes().all(|b| b.is_ascii_digit())
        };
        if !digits(p) || !q.bytes().all(|b| b.is_ascii_digit()) || q.is_empty() {
            return Err(bad());
        }
        let num: BigInt = p.trim_start_matches('+').parse().map_err(|_| bad())?;
        let den: BigInt = q.parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(ParseError::new(format!("zero denominator in `{t}`")));
        }
        Ok(Scalar::from_big(BigRational::new(num, den)))
    }
}

impl Serialize for Scalar {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Scalar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! scalar_binop {
    ($tr:ident, $m:ident, $f:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                $f(self, rhs)
            }
        }
        impl $tr for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                $f(&self, &rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                $f(&self, rhs)
            }
        }
    };
}

scalar_binop!(Add, add, Scalar::add_ref);
scalar_binop!(Sub, sub, |a: &Scalar, b: &Scalar| a.add_ref(&b.neg_ref()));
scalar_binop!(Mul, mul, Scalar::mul_ref);

impl Div<&Scalar> for &Scalar {
    type Output = Scalar;
    /// Panics on division by zero; use [`Scalar::checked_div`] otherwise.
    fn div(self, rhs: &Scalar) -> Scalar {
        self.checked_div(rhs).expect("division by zero")
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        self.neg_ref()
    }
}

impl AddAssign<&Scalar> for Scalar {
    fn add_assign(&mut self, rhs: &Scalar) {
        *self = self.add_ref(rhs);
    }
}

/// A finite linear combination of basis elements with nonzero rational
/// coefficients. The empty combination is zero.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormalSum<B: Ord> {
    terms: BTreeMap<B, Scalar>,
}

impl<B: Ord> Default for FormalSum<B> {
    fn default() -> Self {
        FormalSum { terms: BTreeMap::new() }
    }
}

impl<B: Ord + Clone> FormalSum<B> {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn basis(b: B) -> Self {
        Self::term(Scalar::one(), b)
    }

    pub fn term(c: Scalar, b: B) -> Self {
        let mut s = Self::zero();
        s.add_term(b, &c);
        s
    }

    pub fn from_terms<I: IntoIterator<Item = (B, Scalar)>>(it: I) -> Self {
        let mut s = Self::zero();
        for (b, c) in it {
            s.add_term(b, &c);
        }
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn iter(&self) -> btree_map::Iter<'_, B, Scalar> {
        self.terms.iter()
    }

    pub fn coeff(&self, b: &B) -> Scalar {
        self.terms.get(b).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn support(&self) -> impl Iterator<Item = &B> {
        self.terms.keys()
    }

    /// The basis element if this is exactly `1·b`.
    pub fn as_basis(&self) -> Option<&B> {
        match self.terms.iter().next() {
            Some((b, c)) if self.terms.len() == 1 && c.is_one() => Some(b),
            _ => None,
        }
    }

    pub fn add_term(&mut self, b: B, c: &Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(b) {
            btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, c: &Scalar, other: &FormalSum<B>) {
        if c.is_zero() {
            return;
        }
        for (b, d) in other.iter() {
            self.add_term(b.clone(), &(c * d));
        }
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        scale(c, self)
    }

    /// Applies a linear map given on basis elements.
    pub fn map_linear<C, F>(&self, mut f: F) -> FormalSum<C>
    where
        C: Ord + Clone,
        F: FnMut(&B) -> FormalSum<C>,
    {
        let mut out = FormalSum::zero();
        for (b, c) in self.iter() {
            out.add_scaled(c, &f(b));
        }
        out
    }

    /// Relabels basis elements, merging coefficients that collide.
    pub fn map_basis<C, F>(&self, mut f: F) -> FormalSum<C>
    where
        C: Ord + Clone,
        F: FnMut(&B) -> C,
    {
        let mut out = FormalSum::zero();
        for (b, c) in self.iter() {
            out.add_term(f(b), c);
        }
        out
    }

    /// Renders as `c1*b1 + c2*b2`, omitting unit coefficients; zero is `0`.
    /// Terms appear in the lexicographic order of their rendered basis
    /// elements.
    pub fn render<F: Fn(&B) -> String>(&self, show: F) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut terms: Vec<(String, &Scalar)> = self.iter().map(|(b, c)| (show(b), c)).collect();
        terms.sort();
        let mut out = String::new();
        for (i, (b, c)) in terms.into_iter().enumerate() {
            let (neg, mag) = if c.is_negative() { (true, c.abs()) } else { (false, c.clone()) };
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            if !mag.is_one() {
                out.push_str(&mag.to_string());
                out.push('*');
            }
            out.push_str(&b);
        }
        out
    }
}

impl<B: Ord + Clone> IntoIterator for FormalSum<B> {
    type Item = (B, Scalar);
    type IntoIter = btree_map::IntoIter<B, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.into_iter()
    }
}

impl<'a, B: Ord + Clone> IntoIterator for &'a FormalSum<B> {
    type Item = (&'a B, &'a Scalar);
    type IntoIter = btree_map::Iter<'a, B, Scalar>;
    fn into_iter(self) -> Self::IntoIter {
        self.terms.iter()
    }
}

impl<B: Ord + Clone + fmt::Debug> fmt::Debug for FormalSum<B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(|b| format!("{b:?}")))
    }
}

impl<B: Ord + Clone> Add for &FormalSum<B> {
    type Output = FormalSum<B>;
    fn add(self, rhs: &FormalSum<B>) -> FormalSum<B> {
        add(self, rhs)
    }
}

impl<B: Ord + Clone> Add for FormalSum<B> {
    type Output = FormalSum<B>;
    fn add(mut self, rhs: FormalSum<B>) -> FormalSum<B> {
        for (b, c) in rhs {
            self.add_term(b, &c);
        }
        self
    }
}

impl<B: Ord + Clone> Sub for &FormalSum<B> {
    type Output = FormalSum<B>;
    fn sub(self, rhs: &FormalSum<B>) -> FormalSum<B> {
        let mut out = self.clone();
        out.add_scaled(&Scalar::from_int(-1), rhs);
        out
    }
}

impl<B: Ord + Clone> Neg for &FormalSum<B> {
    type Output = FormalSum<B>;
    fn neg(self) -> FormalSum<B> {
        scale(&Scalar::from_int(-1), self)
    }
}

impl<B: Ord + Clone + Serialize> Serialize for FormalSum<B> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(self.terms.len()))?;
        for (b, c) in &self.terms {
            seq.serialize_element(&(b, c))?;
        }
        seq.end()
    }
}

impl<'de, B: Ord + Clone + Deserialize<'de>> Deserialize<'de> for FormalSum<B> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<(B, Scalar)> = Vec::deserialize(d)?;
        Ok(FormalSum::from_terms(v))
    }
}

pub fn add<B: Ord + Clone>(x: &FormalSum<B>, y: &FormalSum<B>) -> FormalSum<B> {
    let mut out = x.clone();
    for (b, c) in y.iter() {
        out.add_term(b.clone(), c);
    }
    out
}

pub fn scale<B: Ord + Clone>(c: &Scalar, x: &FormalSum<B>) -> FormalSum<B> {
    if c.is_zero() {
        return FormalSum::zero();
    }
    FormalSum {
        terms: x.terms.iter().map(|(b, d)| (b.clone(), c * d)).collect(),
    }
}

/// Bilinear extension of a product given on basis pairs.
pub fn bilinear_extend<B, C, F>(f: F) -> impl Fn(&FormalSum<B>, &FormalSum<B>) -> FormalSum<C>
where
    B: Ord + Clone,
    C: Ord + Clone,
    F: Fn(&B, &B) -> FormalSum<C>,
{
    move |x, y| bilinear(x, y, &f)
}

pub fn bilinear<B, C, F>(x: &FormalSum<B>, y: &FormalSum<B>, f: F) -> FormalSum<C>
where
    B: Ord + Clone,
    C: Ord + Clone,
    F: Fn(&B, &B) -> FormalSum<C>,
{
    let mut out = FormalSum::zero();
    for (a, c) in x.iter() {
        for (b, d) in y.iter() {
            out.add_scaled(&(c * d), &f(a, b));
        }
    }
    out
}
