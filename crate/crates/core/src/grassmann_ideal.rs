//! Generators of the ideal `J_n ⊂ Z/2[w2, w3]` presenting the image of the
//! double-cover map in the mod 2 cohomology of `G~(n,3)`, and the closed-form
//! polynomial families available when `n = 2^{m+1} - 4`.
//!
//! `J_n` is generated by the degree `n+1`, `n+2`, `n+3` components of
//! `1 / (1 + w2 + w3)`, which are
//!
//! ```text
//! g_r = Σ_{r/3 <= s <= r/2} C(s, 3s - r) w2^{3s-r} w3^{r-2s}.
//! ```
//!
//! For the special values of `n` the nonzero coefficients are indexed by the
//! bit patterns of [`crate::binexp`], which gives the explicit polynomials
//! `P(t, i)`, `P_i = P(2^i + n + 1, i)`, `P̂(s, i, j)` and `Q(i, j, l)`.

use thiserror::Error;

use crate::binexp::{self, binom_parity, delta_enumerate, BinExpError, BitString};
use crate::f2poly::{Monomial, Polynomial};

/// Largest `m` accepted by the closed-form constructors.
pub const MAX_M: u32 = 28;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IdealError {
    #[error("n must be at least 4 (got {0})")]
    InvalidN(u64),
    #[error("generator degree {r} is not one of n+1, n+2, n+3 for n = {n}")]
    UnsupportedDegree { n: u64, r: u64 },
    #[error("m must lie in 2..={MAX_M} (got {0})")]
    InvalidM(u32),
    #[error("n = {0} is not of the form 2^(m+1) - 4 with m >= 2")]
    NotSpecial(u64),
    #[error("n = {n} does not match m = {m}")]
    MismatchedM { n: u64, m: u32 },
    #[error("congruence condition fails: {0}")]
    Congruence(String),
    #[error("index out of range: {0}")]
    IndexRange(String),
    #[error("exponent does not fit in a monomial")]
    Overflow,
    #[error(transparent)]
    BinExp(#[from] BinExpError),
}

/// `2^{m+1} - 4`.
pub fn n_for_m(m: u32) -> u64 {
    binexp::n_of(m)
}

/// `Some(m)` when `n + 4 = 2^{m+1}` with `m >= 2`.
pub fn special_m(n: u64) -> Option<u32> {
    let t = n.checked_add(4)?;
    if t.is_power_of_two() && t >= 8 {
        let m = t.trailing_zeros() - 1;
        (m <= MAX_M).then_some(m)
    } else {
        None
    }
}

/// Checks that `n` and `m` describe the same special parameter.
pub fn check_n_m(n: u64, m: u32) -> Result<(), IdealError> {
    if !(2..=MAX_M).contains(&m) {
        return Err(IdealError::InvalidM(m));
    }
    if n_for_m(m) != n {
        return Err(IdealError::MismatchedM { n, m });
    }
    Ok(())
}

fn monomial(p: u64, q: u64) -> Result<Monomial, IdealError> {
    Ok(Monomial::new(
        u32::try_from(p).map_err(|_| IdealError::Overflow)?,
        u32::try_from(q).map_err(|_| IdealError::Overflow)?,
    ))
}

/// Degree-`r` component of `1/(1 + w2 + w3)` over GF(2), for any `r`.
pub fn inverse_component(r: u64) -> Result<Polynomial, IdealError> {
    let mut terms = Vec::new();
    for s in r.div_ceil(3)..=r / 2 {
        if binom_parity(s, 3 * s - r) == 1 {
            terms.push(monomial(3 * s - r, r - 2 * s)?);
        }
    }
    Ok(terms.into_iter().collect())
}

/// `g_r` for `r ∈ {n+1, n+2, n+3}`.
pub fn generator_g(n: u64, r: u64) -> Result<Polynomial, IdealError> {
    if n < 4 {
        return Err(IdealError::InvalidN(n));
    }
    if !(n + 1..=n + 3).contains(&r) {
        return Err(IdealError::UnsupportedDegree { n, r });
    }
    inverse_component(r)
}

/// The three generators of `J_n`, with the special parameter when present.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealPresentation {
    pub n: u64,
    /// `[g_{n+1}, g_{n+2}, g_{n+3}]`
    pub generators: [Polynomial; 3],
    pub special: Option<u32>,
}

impl IdealPresentation {
    pub fn is_special(&self) -> bool {
        self.special.is_some()
    }

    /// Nonzero generators in degree order.
    pub fn nonzero_generators(&self) -> Vec<Polynomial> {
        self.generators.iter().filter(|g| !g.is_zero()).cloned().collect()
    }
}

pub fn ideal_generators(n: u64) -> Result<IdealPresentation, IdealError> {
    Ok(IdealPresentation {
        n,
        generators: [generator_g(n, n + 1)?, generator_g(n, n + 2)?, generator_g(n, n + 3)?],
        special: special_m(n),
    })
}

/// Maps each index pattern to `w2^p w3^{(deg - 2p)/3}`, skipping patterns for
/// which the `w3` exponent is fractional or negative.
fn terms_from_patterns(
    patterns: impl IntoIterator<Item = u64>,
    degree: i128,
) -> Result<Polynomial, IdealError> {
    let mut terms = Vec::new();
    for p in patterns {
        let rest = degree - 2 * i128::from(p);
        if rest >= 0 && rest % 3 == 0 {
            let q = u64::try_from(rest / 3).map_err(|_| IdealError::Overflow)?;
            terms.push(monomial(p, q)?);
        }
    }
    Ok(terms.into_iter().collect())
}

fn check_m(m: u32) -> Result<(), IdealError> {
    if (2..=MAX_M).contains(&m) {
        Ok(())
    } else {
        Err(IdealError::InvalidM(m))
    }
}

/// `P(t, i)`: terms `(p, (t - 2p)/3)` where `ε_m(p)` is a `Δ_{m-i}` pattern
/// followed by `i` zeros. Requires `t ≡ 2(2^m - 2^i) (mod 3)` and `i <= m`.
pub fn build_p(t: u64, i: u32, m: u32) -> Result<Polynomial, IdealError> {
    check_m(m)?;
    if i > m {
        return Err(IdealError::IndexRange(format!("i = {i} > m = {m}")));
    }
    let lead = 2 * ((1i128 << m) - (1i128 << i));
    if (i128::from(t) - lead).rem_euclid(3) != 0 {
        return Err(IdealError::Congruence(format!("t = {t}, i = {i}, m = {m}")));
    }
    let delta = delta_enumerate(m - i)?;
    terms_from_patterns(delta.values().map(|v| v << i), i128::from(t))
}

/// Patterns `(w, 0, 0, 1^l, 0^i)` with `w ∈ Δ_{m-i-l-2}`; empty when
/// `i + l + 2 > m`.
pub fn p_hat_index_set(i: u32, l: u32, m: u32) -> Result<Vec<BitString>, IdealError> {
    check_m(m)?;
    let Some(top_len) = m.checked_sub(i + l + 2) else {
        return Ok(Vec::new());
    };
    let tail = BitString::zeros(2)
        .concat(BitString::ones(l))?
        .concat(BitString::zeros(i))?;
    delta_enumerate(top_len)?
        .members
        .into_iter()
        .map(|w| w.concat(tail).map_err(IdealError::from))
        .collect()
}

/// `P̂(s, i, j)`: terms `(p, (s - 2p)/3)` over [`p_hat_index_set`]`(i, j, m)`.
/// Requires `s ≡ 2^{m+1} - 2^{i+1} (mod 3)`.
pub fn build_p_hat(s: u64, i: u32, j: u32, m: u32) -> Result<Polynomial, IdealError> {
    check_m(m)?;
    let shift = (1i128 << (m + 1)) - (1i128 << (i + 1));
    if (i128::from(s) - shift).rem_euclid(3) != 0 {
        return Err(IdealError::Congruence(format!("s = {s}, i = {i}, m = {m}")));
    }
    let set = p_hat_index_set(i, j, m)?;
    terms_from_patterns(set.into_iter().map(BitString::value), i128::from(s))
}

/// Patterns `(v, u, 1^l, 0^i)` of length `m` with `(v, u) ∈ Δ_{m-i-l}`,
/// `u` of length `j-i-l` and `u` not all ones. An empty `u` counts as all
/// ones, so the set is empty once `l >= j - i`.
pub fn q_index_set(i: u32, j: u32, l: u32, m: u32) -> Result<Vec<BitString>, IdealError> {
    check_m(m)?;
    if !(i < j && j <= m) {
        return Err(IdealError::IndexRange(format!("need i < j <= m, got i={i}, j={j}, m={m}")));
    }
    let Some(u_len) = (j - i).checked_sub(l) else {
        return Ok(Vec::new());
    };
    let tail = BitString::ones(l).concat(BitString::zeros(i))?;
    let mut out = Vec::new();
    for x in delta_enumerate(m - i - l)?.members {
        let (_, u) = x.split(u_len);
        if !u.is_all_ones() {
            out.push(x.concat(tail)?);
        }
    }
    Ok(out)
}

/// `q_{i,j}(p) · 3 = 3·2^j - 2·2^i + n + 1 - 2p`; this returns the degree
/// `3·2^j - 2·2^i + n + 1` shared by all terms of `Q(i, j, l)`.
fn q_degree(i: u32, j: u32, m: u32) -> i128 {
    3 * (1i128 << j) - 2 * (1i128 << i) + i128::from(n_for_m(m)) + 1
}

/// `Q(i, j, l)`: terms `(p, q_{i,j}(p))` over [`q_index_set`]. `Q(i, j, 0)`
/// is the S-polynomial of `P_i` and `P_j`.
pub fn build_q(i: u32, j: u32, l: u32, m: u32) -> Result<Polynomial, IdealError> {
    let set = q_index_set(i, j, l, m)?;
    terms_from_patterns(set.into_iter().map(BitString::value), q_degree(i, j, m))
}

/// The `w2` exponent of `LT(Q(i, j, l))`: `ε_m = (1^{m-i-l-2}, 0, 0, 1^l, 0^i)`.
pub fn q_leading_index(i: u32, l: u32, m: u32) -> Result<u64, IdealError> {
    check_m(m)?;
    let top = m
        .checked_sub(i + l + 2)
        .ok_or_else(|| IdealError::IndexRange(format!("i + l + 2 > m ({i}, {l}, {m})")))?;
    Ok(BitString::ones(top)
        .concat(BitString::zeros(2))?
        .concat(BitString::ones(l))?
        .concat(BitString::zeros(i))?
        .value())
}

/// `P_0, ..., P_m` for `n = 2^{m+1} - 4`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PaperFamily {
    pub m: u32,
    pub polys: Vec<Polynomial>,
}

impl PaperFamily {
    pub fn n(&self) -> u64 {
        n_for_m(self.m)
    }

    /// `2^i + n + 1`, the degree of `P_i`.
    pub fn degree_of(&self, i: u32) -> u64 {
        (1u64 << i) + self.n() + 1
    }
}

/// `P_i = P(2^i + n + 1, i)`.
pub fn family_member(i: u32, m: u32) -> Result<Polynomial, IdealError> {
    check_m(m)?;
    build_p((1u64 << i) + n_for_m(m) + 1, i, m)
}

pub fn paper_family(m: u32) -> Result<PaperFamily, IdealError> {
    check_m(m)?;
    let polys = (0..=m).map(|i| family_member(i, m)).collect::<Result<_, _>>()?;
    Ok(PaperFamily { m, polys })
}

/// `(2^m - 2^i, 2^i - 1)`, the expected leading term of `P_i`.
pub fn expected_family_lt(i: u32, m: u32) -> Monomial {
    Monomial::new((1 << m) - (1 << i), (1 << i) - 1)
}

/// Both sides of the decomposition
/// `LT(P_i) = P(t, i) + P(t, i+2) + Σ_{1<=j<=m-i-2} P̂(t, i, j)` with
/// `t = 2^i + n + 1`. `P(t, i+2)` is taken as zero when `i + 2 > m`.
pub fn leading_term_decomposition(
    i: u32,
    m: u32,
) -> Result<(Polynomial, Polynomial), IdealError> {
    check_m(m)?;
    if i > m {
        return Err(IdealError::IndexRange(format!("i = {i} > m = {m}")));
    }
    let t = (1u64 << i) + n_for_m(m) + 1;
    let lhs = Polynomial::from(build_p(t, i, m)?.leading_term().map_err(|_| {
        IdealError::IndexRange(format!("P({t}, {i}) is zero"))
    })?);
    let mut rhs = build_p(t, i, m)?;
    if i + 2 <= m {
        rhs += &build_p(t, i + 2, m)?;
    }
    for j in 1..=m.saturating_sub(i + 2) {
        rhs += &build_p_hat(t, i, j, m)?;
    }
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2poly::{parse_poly, s_polynomial};

    fn poly(s: &str) -> Polynomial {
        parse_poly(s).unwrap()
    }

    #[test]
    fn generator_examples() {
        assert!(generator_g(4, 5).unwrap().is_zero());
        assert_eq!(generator_g(4, 6).unwrap(), poly("w2^3 + w3^2"));
        assert_eq!(generator_g(4, 7).unwrap(), poly("w2^2*w3"));
        assert_eq!(generator_g(4, 8), Err(IdealError::UnsupportedDegree { n: 4, r: 8 }));
        assert_eq!(generator_g(3, 4), Err(IdealError::InvalidN(3)));
    }

    #[test]
    fn generators_match_power_series_inverse() {
        // (1 + w2 + w3) * Σ_r g_r = 1 up to the truncation degree
        let cap = 40;
        let mut series = Polynomial::zero();
        for r in 0..=cap {
            series += &inverse_component(r).unwrap();
        }
        let prod = poly("1 + w2 + w3").checked_mul_capped(&series, Some(cap)).unwrap();
        assert_eq!(prod, Polynomial::one());
    }

    #[test]
    fn ideal_generator_examples() {
        let j4 = ideal_generators(4).unwrap();
        assert_eq!(j4.special, Some(2));
        assert!(j4.generators[0].is_zero());
        assert_eq!(j4.nonzero_generators(), vec![poly("w2^3 + w3^2"), poly("w2^2*w3")]);

        let j12 = ideal_generators(12).unwrap();
        assert_eq!(j12.special, Some(3));
        assert!(j12.generators[0].is_zero());

        let j5 = ideal_generators(5).unwrap();
        assert_eq!(j5.special, None);
        assert!(j5.generators.iter().all(|g| !g.is_zero()));
    }

    #[test]
    fn special_detection() {
        let special: Vec<u64> = (0..300).filter(|&n| special_m(n).is_some()).collect();
        assert_eq!(special, vec![4, 12, 28, 60, 124, 252]);
        assert_eq!(special_m(60), Some(5));
        assert!(check_n_m(12, 3).is_ok());
        assert_eq!(check_n_m(12, 2), Err(IdealError::MismatchedM { n: 12, m: 2 }));
        assert_eq!(check_n_m(4, 1), Err(IdealError::InvalidM(1)));
    }

    #[test]
    fn generators_are_homogeneous() {
        for n in 4..80 {
            for (k, g) in ideal_generators(n).unwrap().generators.iter().enumerate() {
                if !g.is_zero() {
                    assert_eq!(g.homogeneous_degree(), Some(n + 1 + k as u64));
                }
            }
        }
    }

    #[test]
    fn build_p_examples() {
        assert_eq!(build_p(6, 0, 2).unwrap(), poly("w2^3 + w3^2"));
        assert_eq!(build_p(9, 2, 2).unwrap(), poly("w3^3"));
        assert!(matches!(build_p(7, 0, 2), Err(IdealError::Congruence(_))));
        assert!(matches!(build_p(9, 3, 2), Err(IdealError::IndexRange(_))));
        for m in 2..=8 {
            for i in 0..=m {
                let p = family_member(i, m).unwrap();
                assert_eq!(p.lt(), Some(expected_family_lt(i, m)), "m={m} i={i}");
                assert_eq!(p.homogeneous_degree(), Some((1 << i) + n_for_m(m) + 1));
            }
        }
    }

    #[test]
    fn paper_family_m2() {
        let fam = paper_family(2).unwrap();
        assert_eq!(fam.polys, vec![poly("w2^3 + w3^2"), poly("w2^2*w3"), poly("w3^3")]);
    }

    #[test]
    fn family_agrees_with_lucas_generators() {
        for m in 2..=8 {
            let n = n_for_m(m);
            let fam = paper_family(m).unwrap();
            assert_eq!(fam.polys[0], generator_g(n, n + 2).unwrap(), "m={m}");
            assert_eq!(fam.polys[1], generator_g(n, n + 3).unwrap(), "m={m}");
            assert!(generator_g(n, n + 1).unwrap().is_zero());
        }
    }

    #[test]
    fn consecutive_s_polynomials_give_next_member() {
        for m in 2..=6 {
            let fam = paper_family(m).unwrap().polys;
            for i in 0..(m as usize - 1) {
                assert_eq!(s_polynomial(&fam[i], &fam[i + 1]).unwrap(), fam[i + 2]);
            }
        }
    }

    #[test]
    fn p_hat_patterns_have_the_double_zero() {
        for m in 2..=8 {
            for i in 0..=m {
                for l in 0..=m {
                    for v in p_hat_index_set(i, l, m).unwrap() {
                        let b = v.bits();
                        let k = (m - i - l - 2) as usize;
                        assert_eq!(&b[k..k + 2], &[0, 0]);
                        assert!(b[k + 2..k + 2 + l as usize].iter().all(|&x| x == 1));
                        assert!(b[k + 2 + l as usize..].iter().all(|&x| x == 0));
                    }
                }
            }
        }
    }

    #[test]
    fn leading_term_decomposition_balances() {
        for m in 2..=6 {
            for i in 0..=m {
                let (lhs, rhs) = leading_term_decomposition(i, m).unwrap();
                assert_eq!(lhs, rhs, "m={m} i={i}");
            }
        }
        let (lhs, rhs) = leading_term_decomposition(0, 2).unwrap();
        assert_eq!(lhs, poly("w2^3"));
        assert_eq!(rhs, poly("w2^3"));
        assert!(matches!(build_p_hat(7, 0, 1, 3), Err(IdealError::Congruence(_))));
    }

    #[test]
    fn q_zero_is_the_s_polynomial() {
        for m in 2..=5 {
            let fam = paper_family(m).unwrap().polys;
            for j in 1..=m {
                for i in 0..j {
                    let s = s_polynomial(&fam[i as usize], &fam[j as usize]).unwrap();
                    assert_eq!(build_q(i, j, 0, m).unwrap(), s, "m={m} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn q_index_sets_split() {
        for m in 2..=8 {
            for j in 1..=m {
                for i in 0..j {
                    for l in 0..(j - i) {
                        let mut union = p_hat_index_set(i, l, m).unwrap();
                        let next = q_index_set(i, j, l + 1, m).unwrap();
                        assert!(union.iter().all(|v| !next.contains(v)));
                        union.extend(next);
                        union.sort();
                        assert_eq!(union, q_index_set(i, j, l, m).unwrap(), "{m} {i} {j} {l}");
                    }
                    assert!(q_index_set(i, j, j - i, m).unwrap().is_empty());
                }
            }
        }
    }

    #[test]
    fn q_leading_terms() {
        for m in 2..=7 {
            for j in 1..=m {
                for i in 0..j {
                    for l in 0..(j - i) {
                        let q = build_q(i, j, l, m).unwrap();
                        if i + l + 2 > m {
                            assert!(q.is_zero());
                            continue;
                        }
                        let lt = q.leading_term().unwrap();
                        assert_eq!(u64::from(lt.p), q_leading_index(i, l, m).unwrap());
                    }
                }
            }
        }
        assert!(matches!(build_q(2, 1, 0, 3), Err(IdealError::IndexRange(_))));
    }
}
