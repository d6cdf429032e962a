//! Buchberger completion, Gröbner-basis verification and reduced bases for
//! ideals of `Z/2[w2, w3]` under lex order.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::f2poly::{normal_form, reduce_once_with_quotient, s_polynomial, Monomial, PolyError, Polynomial};
use crate::grassmann_ideal::{build_q, paper_family, IdealError, PaperFamily};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroebnerError {
    #[error("zero ideal: no nonzero generator")]
    ZeroIdeal,
    #[error("not a Gröbner basis: {0}")]
    NotGroebner(SPairCertificate),
    #[error("reduction chain m={m} i={i} j={j} breaks at step {step}: {detail}")]
    ChainMismatch { m: u32, i: u32, j: u32, step: usize, detail: String },
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ComputedByBuchberger,
    PaperFamily,
    LoadedFromCache,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ComputedByBuchberger => "computed-by-buchberger",
            Provenance::PaperFamily => "paper-family",
            Provenance::LoadedFromCache => "loaded-from-cache",
        })
    }
}

/// An S-pair whose remainder is nonzero.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SPairCertificate {
    pub i: usize,
    pub j: usize,
    pub remainder: Polynomial,
}

impl fmt::Display for SPairCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S({}, {}) reduces to {}", self.i, self.j, self.remainder)
    }
}

/// An ordered list of nonzero polynomials together with where it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerBasis {
    pub polys: Vec<Polynomial>,
    pub provenance: Provenance,
    /// The parameter `n` of `J_n`, when the basis belongs to one.
    pub n: Option<u64>,
}

impl GroebnerBasis {
    /// Wraps `polys` after checking the Buchberger criterion.
    pub fn verified(
        polys: Vec<Polynomial>,
        provenance: Provenance,
        n: Option<u64>,
    ) -> Result<Self, GroebnerError> {
        let polys: Vec<Polynomial> = polys.into_iter().filter(|f| !f.is_zero()).collect();
        if polys.is_empty() {
            return Err(GroebnerError::ZeroIdeal);
        }
        if let Some(cert) = is_groebner(&polys).certificate {
            return Err(GroebnerError::NotGroebner(cert));
        }
        Ok(GroebnerBasis { polys, provenance, n })
    }

    /// The closed-form family `P_0..P_m`, verified.
    pub fn from_paper_family(family: &PaperFamily) -> Result<Self, GroebnerError> {
        Self::verified(family.polys.clone(), Provenance::PaperFamily, Some(family.n()))
    }

    pub fn with_n(mut self, n: u64) -> Self {
        self.n = Some(n);
        self
    }

    pub fn leading_terms(&self) -> Vec<Monomial> {
        self.polys.iter().filter_map(Polynomial::lt).collect()
    }

    pub fn normal_form(&self, f: &Polynomial) -> Polynomial {
        normal_form(f, &self.polys)
    }

    pub fn contains(&self, f: &Polynomial) -> bool {
        self.normal_form(f).is_zero()
    }

    /// True when no basis leading term divides `m`.
    pub fn is_standard(&self, m: Monomial) -> bool {
        self.polys.iter().all(|g| !g.lt().expect("nonzero").divides(m))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuchbergerOptions {
    /// Skip a pair `(i, j)` when some `k` has `LT(k) | lcm` and both `(i, k)`
    /// and `(j, k)` have already been treated.
    pub chain_criterion: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuchbergerStats {
    pub pairs_reduced: usize,
    pub coprime_skipped: usize,
    pub chain_skipped: usize,
    pub zero_remainders: usize,
}

pub fn buchberger(gens: &[Polynomial]) -> Result<GroebnerBasis, GroebnerError> {
    buchberger_with(gens, BuchbergerOptions::default()).map(|(gb, _)| gb)
}

/// Pair-queue completion. Pairs are treated in ascending lex order of their
/// LCM (ties by index); remainders are computed against the current basis.
pub fn buchberger_with(
    gens: &[Polynomial],
    opts: BuchbergerOptions,
) -> Result<(GroebnerBasis, BuchbergerStats), GroebnerError> {
    let mut basis: Vec<Polynomial> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
    if basis.is_empty() {
        return Err(GroebnerError::ZeroIdeal);
    }
    let mut lts: Vec<Monomial> = basis.iter().map(|g| g.lt().expect("nonzero")).collect();
    let mut queue: BTreeSet<(Monomial, usize, usize)> = BTreeSet::new();
    let mut pending: HashSet<(usize, usize)> = HashSet::new();
    for j in 0..basis.len() {
        for i in 0..j {
            queue.insert((lts[i].lcm(lts[j]), i, j));
            pending.insert((i, j));
        }
    }
    let key = |a: usize, b: usize| (a.min(b), a.max(b));
    let mut stats = BuchbergerStats::default();

    while let Some((lcm, i, j)) = queue.pop_first() {
        pending.remove(&(i, j));
        if lts[i].is_coprime(lts[j]) {
            stats.coprime_skipped += 1;
            continue;
        }
        if opts.chain_criterion
            && (0..basis.len()).any(|k| {
                k != i
                    && k != j
                    && lts[k].divides(lcm)
                    && !pending.contains(&key(i, k))
                    && !pending.contains(&key(j, k))
            })
        {
            stats.chain_skipped += 1;
            continue;
        }
        stats.pairs_reduced += 1;
        let r = normal_form(&s_polynomial(&basis[i], &basis[j])?, &basis);
        if r.is_zero() {
            stats.zero_remainders += 1;
            continue;
        }
        let k = basis.len();
        let lt = r.lt().expect("nonzero");
        for (idx, &other) in lts.iter().enumerate() {
            queue.insert((other.lcm(lt), idx, k));
            pending.insert((idx, k));
        }
        basis.push(r);
        lts.push(lt);
    }

    Ok((
        GroebnerBasis { polys: basis, provenance: Provenance::ComputedByBuchberger, n: None },
        stats,
    ))
}

/// Outcome of [`is_groebner`]; `certificate` names the first failing pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroebnerCheck {
    pub pairs_checked: usize,
    pub certificate: Option<SPairCertificate>,
}

impl GroebnerCheck {
    pub fn is_ok(&self) -> bool {
        self.certificate.is_none()
    }
}

/// Buchberger's criterion: every pairwise S-polynomial has remainder zero.
///
/// Pairs are reduced in parallel against the shared list; the reported
/// certificate is always the first failing pair in `(i, j)` order.
pub fn is_groebner(polys: &[Polynomial]) -> GroebnerCheck {
    let pairs: Vec<(usize, usize)> = (0..polys.len())
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .filter(|&(i, j)| !polys[i].is_zero() && !polys[j].is_zero())
        .collect();
    let certificate = pairs.par_iter().find_map_first(|&(i, j)| {
        let s = s_polynomial(&polys[i], &polys[j]).expect("nonzero pair");
        let remainder = normal_form(&s, polys);
        (!remainder.is_zero()).then_some(SPairCertificate { i, j, remainder })
    });
    GroebnerCheck { pairs_checked: pairs.len(), certificate }
}

/// The unique reduced basis of the ideal, sorted by descending leading term.
pub fn reduce_basis(gb: &GroebnerBasis) -> GroebnerBasis {
    let mut sorted: Vec<&Polynomial> = gb.polys.iter().filter(|f| !f.is_zero()).collect();
    sorted.sort_by_key(|f| f.lt());
    // a divisor is lex-smaller than its multiples, so it is kept first
    let mut minimal: Vec<Polynomial> = Vec::new();
    for f in sorted {
        let lt = f.lt().expect("nonzero");
        if minimal.iter().all(|g| !g.lt().expect("nonzero").divides(lt)) {
            minimal.push(f.clone());
        }
    }
    let mut reduced: Vec<Polynomial> = (0..minimal.len())
        .map(|k| {
            let others: Vec<Polynomial> = minimal
                .iter()
                .enumerate()
                .filter(|&(idx, _)| idx != k)
                .map(|(_, g)| g.clone())
                .collect();
            normal_form(&minimal[k], &others)
        })
        .collect();
    reduced.sort_by_key(|f| std::cmp::Reverse(f.lt()));
    GroebnerBasis { polys: reduced, provenance: gb.provenance, n: gb.n }
}

pub fn contains(gb: &GroebnerBasis, f: &Polynomial) -> bool {
    gb.contains(f)
}

/// One step of a replayed reduction chain.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainStep {
    /// Index of the family member divided by; `None` for the initial S-polynomial.
    pub divisor: Option<u32>,
    pub quotient: Option<Monomial>,
    pub result: Polynomial,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChainReport {
    pub m: u32,
    pub i: u32,
    pub j: u32,
    pub steps: Vec<ChainStep>,
}

impl ChainReport {
    pub fn reductions(&self) -> usize {
        self.steps.iter().filter(|s| s.divisor.is_some()).count()
    }
}

/// Replays `S(P_i, P_j) = Q(i,j,0) → Q(i,j,1) → … → 0`, where the step from
/// `Q(i,j,l)` divides by `P_{i+l+2}` with quotient
/// `(2^{i+l} - 2^i, 2^j - 2^{i+l+1})`.
pub fn verify_reduction_chain(m: u32, i: u32, j: u32) -> Result<ChainReport, GroebnerError> {
    let family = paper_family(m)?;
    verify_reduction_chain_in(&family, i, j)
}

pub fn verify_reduction_chain_in(
    family: &PaperFamily,
    i: u32,
    j: u32,
) -> Result<ChainReport, GroebnerError> {
    let m = family.m;
    let fail = |step: usize, detail: String| GroebnerError::ChainMismatch { m, i, j, step, detail };
    if !(i < j && j <= m) {
        return Err(fail(0, "need i < j <= m".into()));
    }
    let polys = &family.polys;
    let s = s_polynomial(&polys[i as usize], &polys[j as usize])?;
    let q0 = build_q(i, j, 0, m)?;
    if s != q0 {
        return Err(fail(0, format!("S-polynomial {s} differs from Q(i,j,0) = {q0}")));
    }
    let mut steps = vec![ChainStep { divisor: None, quotient: None, result: s.clone() }];
    let mut current = s;
    for l in 0..(j - i) {
        if current.is_zero() {
            break;
        }
        let step = steps.len();
        let k = i + l + 2;
        if k > m {
            return Err(fail(step, format!("needs P_{k}, beyond P_{m}; remainder {current}")));
        }
        let (next, quotient) = reduce_once_with_quotient(&current, &polys[k as usize])
            .map_err(|e| fail(step, format!("division by P_{k}: {e}")))?;
        let expected_quotient =
            Monomial::new((1 << (i + l)) - (1 << i), (1 << j) - (1 << (i + l + 1)));
        if quotient != expected_quotient {
            return Err(fail(step, format!("quotient {quotient}, expected {expected_quotient}")));
        }
        let expected = build_q(i, j, l + 1, m)?;
        if next != expected {
            return Err(fail(step, format!("got {next}, expected Q(i,j,{}) = {expected}", l + 1)));
        }
        steps.push(ChainStep { divisor: Some(k), quotient: Some(quotient), result: next.clone() });
        current = next;
    }
    if !current.is_zero() {
        return Err(fail(steps.len(), format!("chain ends at nonzero {current}")));
    }
    Ok(ChainReport { m, i, j, steps })
}

/// Replays every chain `0 <= i < j <= m`.
pub fn verify_all_chains(m: u32) -> Result<Vec<ChainReport>, GroebnerError> {
    let family = paper_family(m)?;
    (1..=m)
        .flat_map(|j| (0..j).map(move |i| (i, j)))
        .map(|(i, j)| verify_reduction_chain_in(&family, i, j))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2poly::parse_poly;
    use crate::grassmann_ideal::{ideal_generators, n_for_m};

    fn poly(s: &str) -> Polynomial {
        parse_poly(s).unwrap()
    }

    fn lt_set(gb: &GroebnerBasis) -> BTreeSet<Monomial> {
        gb.leading_terms().into_iter().collect()
    }

    fn lts(pairs: &[(u32, u32)]) -> BTreeSet<Monomial> {
        pairs.iter().map(|&pq| Monomial::from(pq)).collect()
    }

    #[test]
    fn buchberger_n4() {
        let gb = buchberger(&[poly("w2^3 + w3^2"), poly("w2^2*w3")]).unwrap();
        assert_eq!(lt_set(&gb), lts(&[(3, 0), (2, 1), (0, 3)]));
        assert_eq!(gb.polys[2], poly("w3^3"));
        assert!(is_groebner(&gb.polys).is_ok());
    }

    #[test]
    fn buchberger_on_a_basis_adds_nothing() {
        let fam = paper_family(3).unwrap().polys;
        let gb = buchberger(&fam).unwrap();
        assert_eq!(gb.polys, fam);
    }

    #[test]
    fn buchberger_j12() {
        let gb = buchberger(&ideal_generators(12).unwrap().nonzero_generators()).unwrap();
        let red = reduce_basis(&gb);
        assert_eq!(lt_set(&red), lts(&[(7, 0), (6, 1), (4, 3), (0, 7)]));
    }

    #[test]
    fn buchberger_zero_ideal() {
        assert_eq!(buchberger(&[Polynomial::zero()]), Err(GroebnerError::ZeroIdeal));
        assert_eq!(buchberger(&[]), Err(GroebnerError::ZeroIdeal));
    }

    #[test]
    fn chain_criterion_gives_same_reduced_basis() {
        for n in 4..=30 {
            let gens = ideal_generators(n).unwrap().nonzero_generators();
            let (plain, _) = buchberger_with(&gens, BuchbergerOptions::default()).unwrap();
            let (chained, _) =
                buchberger_with(&gens, BuchbergerOptions { chain_criterion: true }).unwrap();
            assert!(is_groebner(&chained.polys).is_ok());
            assert_eq!(reduce_basis(&plain).polys, reduce_basis(&chained).polys, "n={n}");
        }
    }

    #[test]
    fn reduce_basis_matches_family() {
        for m in 2..=4 {
            let n = n_for_m(m);
            let computed = buchberger(&ideal_generators(n).unwrap().nonzero_generators()).unwrap();
            let fam = GroebnerBasis::from_paper_family(&paper_family(m).unwrap()).unwrap();
            let red = reduce_basis(&computed);
            assert_eq!(red.polys, reduce_basis(&fam).polys);
            assert_eq!(reduce_basis(&red).polys, red.polys);
        }
    }

    #[test]
    fn reduced_basis_is_reduced() {
        let gens = ideal_generators(21).unwrap().nonzero_generators();
        let red = reduce_basis(&buchberger(&gens).unwrap());
        let lts = red.leading_terms();
        assert!(lts.windows(2).all(|w| w[0] > w[1]));
        for (k, f) in red.polys.iter().enumerate() {
            for (idx, &lt) in lts.iter().enumerate() {
                if idx != k {
                    assert!(f.terms().iter().all(|&t| !lt.divides(t)));
                }
            }
        }
    }

    #[test]
    fn is_groebner_examples() {
        for m in 2..=5 {
            assert!(is_groebner(&paper_family(m).unwrap().polys).is_ok());
        }
        assert!(is_groebner(&[poly("w2^3 + w3^2")]).is_ok());
        let check = is_groebner(&[poly("w2^3 + w3^2"), poly("w2^2*w3")]);
        let cert = check.certificate.unwrap();
        assert_eq!((cert.i, cert.j), (0, 1));
        assert_eq!(cert.remainder, poly("w3^3"));
        assert!(matches!(
            GroebnerBasis::verified(vec![poly("w2^3 + w3^2"), poly("w2^2*w3")], Provenance::PaperFamily, None),
            Err(GroebnerError::NotGroebner(_))
        ));
    }

    #[test]
    fn contains_examples() {
        let gb = GroebnerBasis::from_paper_family(&paper_family(2).unwrap()).unwrap();
        assert!(contains(&gb, &poly("w2^5")));
        assert!(!contains(&gb, &poly("w2^4")));
        assert_eq!(gb.normal_form(&poly("w2^4")), poly("w2*w3^2"));
        let combo = &(&poly("w2 + w3^4") * &gb.polys[0]) + &(&poly("w2^2*w3") * &gb.polys[1]);
        assert!(contains(&gb, &combo));
    }

    #[test]
    fn chain_examples() {
        let r = verify_reduction_chain(3, 0, 2).unwrap();
        assert_eq!(r.steps.len(), 3);
        assert_eq!(r.reductions(), 2);
        assert_eq!(r.steps[1].divisor, Some(2));
        assert_eq!(r.steps[2].divisor, Some(3));

        let r = verify_reduction_chain(2, 0, 1).unwrap();
        assert_eq!(r.steps[0].result, poly("w3^3"));
        assert_eq!(r.reductions(), 1);
        assert!(r.steps[1].result.is_zero());

        assert!(matches!(
            verify_reduction_chain(3, 2, 1),
            Err(GroebnerError::ChainMismatch { .. })
        ));
    }

    #[test]
    fn all_chains_replay() {
        for m in 2..=5 {
            let reports = verify_all_chains(m).unwrap();
            assert_eq!(reports.len() as u32, m * (m + 1) / 2);
        }
    }

    #[test]
    fn chain_reports_broken_family() {
        let mut family = paper_family(3).unwrap();
        family.polys[2] = &family.polys[2] + &Polynomial::monomial(0, 9);
        assert!(matches!(
            verify_reduction_chain_in(&family, 0, 2),
            Err(GroebnerError::ChainMismatch { .. })
        ));
    }
}
