//! The Ω-Rota–Baxter algebra contract and the weight-zero dendriform view.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::omega::{AxiomReport, Level, Signature};
use crate::scalars::Scalar;

/// An associative algebra with operators `P_ω` indexed by a parameter
/// structure.
pub trait OmegaRba {
    type Elem: Clone + PartialEq + fmt::Debug + Send + Sync;

    fn signature(&self) -> &Signature;
    fn one(&self) -> Self::Elem;
    fn zero(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn scale(&self, c: &Scalar, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn p(&self, omega: usize, a: &Self::Elem) -> Self::Elem;
    fn render(&self, a: &Self::Elem) -> String;
}

/// Right-hand side of the Rota–Baxter identity for `P_α(a) P_β(b)`, read
/// off `sig` (which need not be the algebra's own signature).
pub fn rb_expansion<R: OmegaRba>(r: &R, sig: &Signature, alpha: usize, beta: usize, a: &R::Elem, b: &R::Elem) -> R::Elem {
    let (al, be) = (alpha, beta);
    let first = r.p(sig.right.get(al, be), &r.mul(&r.p(sig.rhd.get(al, be), a), b));
    let second = r.p(sig.left.get(al, be), &r.mul(a, &r.p(sig.lhd.get(al, be), b)));
    let mut out = r.add(&first, &second);
    let psi = sig.psi(al, be);
    if !psi.is_zero() {
        let ab = r.mul(a, b);
        for (g, c) in psi.iter() {
            out = r.add(&out, &r.scale(c, &r.p(*g, &ab)));
        }
    }
    out
}

/// Checks `P_α(a)P_β(b) = P_{α→β}(P_{α▷β}(a)b) + P_{α←β}(aP_{α◁β}(b)) + ψ-term`
/// for all `α, β` and all sample pairs. Witnesses are `[α, β, i, j]`.
pub fn check_rb_identity<R>(r: &R, sig: &Signature, samples: &[R::Elem]) -> AxiomReport
where
    R: OmegaRba + Sync,
{
    let n = sig.size;
    let m = samples.len();
    let cases: Vec<[usize; 4]> = (0..n)
        .flat_map(|a| (0..n).flat_map(move |b| (0..m).flat_map(move |i| (0..m).map(move |j| [a, b, i, j]))))
        .collect();
    let bad: Vec<[usize; 4]> = cases
        .into_par_iter()
        .filter(|&[a, b, i, j]| {
            let (u, v) = (&samples[i], &samples[j]);
            r.mul(&r.p(a, u), &r.p(b, v)) != rb_expansion(r, sig, a, b, u, v)
        })
        .collect();
    let mut report = AxiomReport::checked(Level::RbIdentity);
    for w in bad {
        report.push("RB", w.to_vec());
    }
    report
}

/// `a ≺_ω b = a P_ω(b)` and `a ≻_ω b = P_ω(a) b` on a weight-zero algebra.
pub struct DendriformView<'a, R: OmegaRba> {
    r: &'a R,
}

pub fn dendriform_from<R: OmegaRba>(r: &R) -> Result<DendriformView<'_, R>> {
    if !r.signature().is_weight_zero() {
        return Err(Error::NonzeroWeight("the dendriform view needs a weight-zero algebra".into()));
    }
    Ok(DendriformView { r })
}

impl<R: OmegaRba> DendriformView<'_, R> {
    pub fn algebra(&self) -> &R {
        self.r
    }

    pub fn prec(&self, omega: usize, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.r.mul(a, &self.r.p(omega, b))
    }

    pub fn succ(&self, omega: usize, a: &R::Elem, b: &R::Elem) -> R::Elem {
        self.r.mul(&self.r.p(omega, a), b)
    }

    /// Which of the three identities fail at `(α, β, a, b, c)`.
    pub fn violations(&self, alpha: usize, beta: usize, a: &R::Elem, b: &R::Elem, c: &R::Elem) -> Vec<&'static str> {
        let sig = self.r.signature();
        let (l, r, lh, rh) = (&sig.left, &sig.right, &sig.lhd, &sig.rhd);
        let (al, be) = (alpha, beta);
        let mut out = Vec::new();
        let lhs = self.prec(be, &self.prec(al, a, b), c);
        let rhs = self.r.add(
            &self.prec(r.get(al, be), a, &self.succ(rh.get(al, be), b, c)),
            &self.prec(l.get(al, be), a, &self.prec(lh.get(al, be), b, c)),
        );
        if lhs != rhs {
            out.push("DD1");
        }
        if self.succ(al, a, &self.prec(be, b, c)) != self.prec(be, &self.succ(al, a, b), c) {
            out.push("DD2");
        }
        let lhs = self.succ(al, a, &self.succ(be, b, c));
        let rhs = self.r.add(
            &self.succ(r.get(al, be), &self.succ(rh.get(al, be), a, b), c),
            &self.succ(l.get(al, be), &self.prec(lh.get(al, be), a, b), c),
        );
        if lhs != rhs {
            out.push("DD3");
        }
        out
    }
}

/// Checks the three dendriform identities on the given sample index
/// triples, for all `α, β`. Witnesses are `[α, β, i, j, k]`.
pub fn check_dendriform_on<R>(d: &DendriformView<'_, R>, samples: &[R::Elem], triples: &[[usize; 3]]) -> AxiomReport
where
    R: OmegaRba + Sync,
{
    let n = d.r.signature().size;
    let cases: Vec<(usize, usize, [usize; 3])> =
        triples.iter().flat_map(|&t| (0..n).flat_map(move |a| (0..n).map(move |b| (a, b, t)))).collect();
    let found: Vec<Vec<(&'static str, Vec<usize>)>> = cases
        .into_par_iter()
        .map(|(a, b, [i, j, k])| {
            d.violations(a, b, &samples[i], &samples[j], &samples[k])
                .into_iter()
                .map(|tag| (tag, vec![a, b, i, j, k]))
                .collect()
        })
        .collect();
    let mut report = AxiomReport::checked(Level::Dendriform);
    for (tag, w) in found.into_iter().flatten() {
        report.push(tag, w);
    }
    report
}

pub fn check_dendriform<R>(d: &DendriformView<'_, R>, samples: &[R::Elem]) -> AxiomReport
where
    R: OmegaRba + Sync,
{
    let m = samples.len();
    let triples: Vec<[usize; 3]> =
        (0..m).flat_map(|i| (0..m).flat_map(move |j| (0..m).map(move |k| [i, j, k]))).collect();
    check_dendriform_on(d, samples, &triples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::omega::{build_example, check_eds, cyclic_group, Example, OmegaStructure, OpTable};
    use crate::scalars::FormalSum;
    use crate::trees::{trees_up_to, TreeAlgebra, TreeSum};
    use crate::words::{words_up_to, FiniteAlgebra, WordAlgebra};

    fn xs() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    fn family(l: Scalar) -> OmegaStructure {
        build_example(&Example::Family { product: cyclic_group(2), lambda: l }).unwrap()
    }

    fn tree_samples(alg: &TreeAlgebra) -> Vec<TreeSum> {
        let mut out: Vec<TreeSum> = trees_up_to(2, 2, 2, 2).into_iter().map(FormalSum::basis).collect();
        out.push(alg.parse_expr("2/3*(| x |) - ([b](| y |)) + 1").unwrap());
        out
    }

    #[test]
    fn trees_and_words_satisfy_the_identity() {
        let s = family(Scalar::new(2, 3));
        let sig = Signature::of(&s).unwrap();
        let t = TreeAlgebra::new(&s, xs()).unwrap();
        assert!(check_rb_identity(&t, &sig, &tree_samples(&t)).holds());

        let w = WordAlgebra::new(&s, FiniteAlgebra::dual_numbers()).unwrap();
        let samples: Vec<_> = words_up_to(2, 2, 2).into_iter().map(FormalSum::basis).collect();
        assert!(check_rb_identity(&w, &sig, &samples).holds());
    }

    #[test]
    fn a_wrong_weight_is_detected() {
        let s = family(Scalar::one());
        let t = TreeAlgebra::new(&s, xs()).unwrap();
        let sig = Signature::of(&s).unwrap().with_psi_entry(1, 0, FormalSum::term(Scalar::from_int(2), 1));
        let r = check_rb_identity(&t, &sig, &tree_samples(&t));
        assert!(!r.holds());
        assert!(r.witnesses("RB").iter().all(|w| w[..2] == [1, 0]));
    }

    #[test]
    fn view_unfolds_to_products() {
        let t = TreeAlgebra::weight_zero(&family(Scalar::one()), xs()).unwrap();
        let d = dendriform_from(&t).unwrap();
        let x = t.generator(0);
        let u = t.parse_expr("(| y [a](|))").unwrap();
        assert_eq!(d.prec(1, &x, &u), t.diamond(&x, &t.graft(1, &u)));
        assert_eq!(d.succ(1, &x, &u), t.diamond(&t.graft(1, &x), &u));
    }

    #[test]
    fn needs_weight_zero() {
        let t = TreeAlgebra::new(&family(Scalar::one()), xs()).unwrap();
        assert!(matches!(dendriform_from(&t), Err(Error::NonzeroWeight(_))));
        let t = TreeAlgebra::new(&family(Scalar::zero()), xs()).unwrap();
        assert!(dendriform_from(&t).is_ok());
    }

    #[test]
    fn identities_hold_over_eds() {
        let matching = Example::Matching { dot: OpTable::left_projection(2), lambda: vec![vec![Scalar::zero(); 2]; 2] };
        for s in [family(Scalar::one()), build_example(&matching).unwrap()] {
            let t = TreeAlgebra::weight_zero(&s, xs()).unwrap();
            let samples: Vec<TreeSum> = trees_up_to(2, 2, 2, 2).into_iter().map(FormalSum::basis).collect();
            assert!(check_dendriform(&dendriform_from(&t).unwrap(), &samples).holds());
        }
    }

    #[test]
    fn mutated_table_fails() {
        let mut s = family(Scalar::one());
        s.rhd = Some(OpTable::right_projection(2));
        assert!(!check_eds(&s).holds());
        let t = TreeAlgebra::weight_zero(&s, xs()).unwrap();
        let samples: Vec<TreeSum> = trees_up_to(2, 2, 2, 2).into_iter().map(FormalSum::basis).collect();
        let r = check_dendriform(&dendriform_from(&t).unwrap(), &samples);
        assert!(!r.holds());
    }
}
