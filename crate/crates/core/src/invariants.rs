//! Invariants of the quotient ring `Z/2[w2, w3] / J_n`: cup-length, height of
//! `w2`, the `χ` table, the `α` values, the total Stiefel-Whitney class of the
//! stable normal bundle and the resulting non-immersion dimension.
//!
//! All questions are answered by normal forms against a Gröbner basis of
//! `J_n`. Because the quotient is graded with generators in degrees 2 and 3,
//! any product of `ℓ` positive-degree elements expands into monomials with
//! `p + q >= ℓ`, so the cup-length equals the largest `p + q` of a monomial
//! with nonzero normal form. Scans stop at degree `3n = dim G~(n,3)`.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::f2poly::{Monomial, PolyError, Polynomial};
use crate::grassmann_ideal::{ideal_generators, special_m, IdealError};
use crate::groebner::{buchberger, reduce_basis, GroebnerBasis, GroebnerError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("n = {0} is not of the form 2^(m+1) - 4")]
    NotSpecial(u64),
    #[error("basis belongs to n = {basis}, not n = {requested}")]
    BasisMismatch { basis: u64, requested: u64 },
    #[error("no annihilating power of w2 below cutoff {0}")]
    AlphaCutoff(u32),
    #[error("w2^{0} is still nonzero; the basis cannot belong to J_n")]
    HeightUnbounded(u32),
    #[error("normal form of zero has no annihilator question")]
    ZeroInput,
    #[error(transparent)]
    Groebner(#[from] GroebnerError),
    #[error(transparent)]
    Ideal(#[from] IdealError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

fn check_basis(n: u64, gb: &GroebnerBasis) -> Result<(), InvariantError> {
    match gb.n {
        Some(b) if b != n => Err(InvariantError::BasisMismatch { basis: b, requested: n }),
        _ => Ok(()),
    }
}

fn require_special(n: u64) -> Result<u32, InvariantError> {
    special_m(n).ok_or(InvariantError::NotSpecial(n))
}

fn mono_nf_nonzero(gb: &GroebnerBasis, p: u32, q: u32) -> bool {
    !gb.normal_form(&Polynomial::monomial(p, q)).is_zero()
}

/// Which monomials of degree `<= 3n` survive in the quotient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientGrid {
    pub n: u64,
    /// `rows[p][q]` is true iff `w2^p w3^q` has nonzero normal form.
    rows: Vec<Vec<bool>>,
}

impl QuotientGrid {
    /// Normal form of every `(p, q)` with `2p + 3q <= 3n`, rows in parallel.
    pub fn scan(n: u64, gb: &GroebnerBasis) -> Self {
        let cap = 3 * n;
        let rows = (0..=cap / 2)
            .into_par_iter()
            .map(|p| {
                let q_max = (cap - 2 * p) / 3;
                (0..=q_max).map(|q| mono_nf_nonzero(gb, p as u32, q as u32)).collect()
            })
            .collect();
        QuotientGrid { n, rows }
    }

    pub fn is_nonzero(&self, p: u32, q: u32) -> bool {
        self.rows
            .get(p as usize)
            .and_then(|row| row.get(q as usize))
            .copied()
            .unwrap_or(false)
    }

    pub fn cells(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Surviving monomials.
    pub fn nonzero_monomials(&self) -> impl Iterator<Item = Monomial> + '_ {
        self.rows.iter().enumerate().flat_map(|(p, row)| {
            row.iter()
                .enumerate()
                .filter(|(_, &nz)| nz)
                .map(move |(q, _)| Monomial::new(p as u32, q as u32))
        })
    }

    /// Largest `p + q` among surviving monomials, with the lex-greatest
    /// monomial attaining it.
    pub fn cup_length(&self) -> (u64, Monomial) {
        self.nonzero_monomials()
            .map(|m| (m.length(), m))
            .max()
            .expect("the unit always survives")
    }

    /// Largest surviving `q` with `p = chi1`, or -1.
    pub fn max_q(&self, chi1: u32) -> i64 {
        self.rows
            .get(chi1 as usize)
            .and_then(|row| row.iter().rposition(|&nz| nz))
            .map_or(-1, |q| q as i64)
    }
}

/// `max{p + q : NF(w2^p w3^q) != 0, 2p + 3q <= 3n}` and a lex-greatest witness.
pub fn cup_im_p(n: u64, gb: &GroebnerBasis) -> Result<(u64, Monomial), InvariantError> {
    check_basis(n, gb)?;
    Ok(QuotientGrid::scan(n, gb).cup_length())
}

/// Largest `h` with `w2^h` nonzero in the quotient.
pub fn height_w2(n: u64, gb: &GroebnerBasis) -> Result<u32, InvariantError> {
    check_basis(n, gb)?;
    let limit = u32::try_from(2 * n + 2).unwrap_or(u32::MAX);
    let mut power = Polynomial::one();
    for h in 0..=limit {
        if gb.normal_form(&power).is_zero() {
            return Ok(h.checked_sub(1).expect("1 is not in a proper ideal"));
        }
        power = power.mul_monomial(Monomial::new(1, 0));
    }
    Err(InvariantError::HeightUnbounded(limit))
}

/// `(χ1, χ2)` for `χ1 = 0..=n`, with `χ2` the largest surviving `w3` exponent
/// next to `w2^χ1` (or -1).
pub fn chi_table(n: u64, gb: &GroebnerBasis) -> Result<Vec<(u32, i64)>, InvariantError> {
    check_basis(n, gb)?;
    Ok(chi_table_from_grid(&QuotientGrid::scan(n, gb)))
}

pub fn chi_table_from_grid(grid: &QuotientGrid) -> Vec<(u32, i64)> {
    (0..=grid.n as u32).map(|c| (c, grid.max_q(c))).collect()
}

/// Closed forms for `χ2` on one range `lo <= χ1 < hi`, compared against the
/// computed table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ChiRangeCheck {
    pub i: u32,
    pub lo: u32,
    pub hi: u32,
    /// `2^i - 1`
    pub statement_form: i64,
    /// `2^{i+1} - 2`
    pub proof_form: i64,
    pub computed: Vec<i64>,
    pub matches_statement: bool,
    pub matches_proof: bool,
}

/// Evaluates both closed forms for `χ2` on the ranges
/// `2^{m+1} - 2^{i+1} - 2^{i+2} <= χ1 < 2^{m+1} - 2^i - 2^{i+1}` (clipped at 0),
/// for every `i` whose range is nonempty.
pub fn chi_closed_forms(m: u32, table: &[(u32, i64)]) -> Vec<ChiRangeCheck> {
    let top = 1i64 << (m + 1);
    let mut out = Vec::new();
    for i in 0..=m {
        let lo = (top - (1i64 << (i + 1)) - (1i64 << (i + 2))).max(0);
        let hi = top - (1i64 << i) - (1i64 << (i + 1));
        if hi <= lo {
            continue;
        }
        let computed: Vec<i64> = table
            .iter()
            .filter(|&&(c, _)| (lo..hi).contains(&i64::from(c)))
            .map(|&(_, z)| z)
            .collect();
        let statement_form = (1i64 << i) - 1;
        let proof_form = (1i64 << (i + 1)) - 2;
        out.push(ChiRangeCheck {
            i,
            lo: lo as u32,
            hi: hi as u32,
            statement_form,
            proof_form,
            matches_statement: computed.iter().all(|&z| z == statement_form),
            matches_proof: computed.iter().all(|&z| z == proof_form),
            computed,
        });
    }
    out
}

/// `2^{m+1}`, enough for `min_alpha` since `w2^{n+1} ∈ J_n`.
pub fn alpha_cutoff(m: u32) -> u32 {
    1 << (m + 1)
}

/// Least `α >= 0` with `w2^α · f ∈ J_n`, searched up to `cutoff`.
pub fn min_alpha(f: &Polynomial, gb: &GroebnerBasis, cutoff: u32) -> Result<u32, InvariantError> {
    if f.is_zero() {
        return Err(InvariantError::ZeroInput);
    }
    let mut current = f.clone();
    for alpha in 0..=cutoff {
        if gb.contains(&current) {
            return Ok(alpha);
        }
        current = current.checked_mul_monomial(Monomial::new(1, 0))?;
    }
    Err(InvariantError::AlphaCutoff(cutoff))
}

/// `(1 + w2 + w3)^{n+4} = 1` in the quotient, expanded without truncation.
pub fn sw_inverse_identity(n: u64, gb: &GroebnerBasis) -> Result<bool, InvariantError> {
    require_special(n)?;
    check_basis(n, gb)?;
    power_is_unit(n + 4, gb)
}

/// Whether `(1 + w2 + w3)^e + 1` reduces to zero.
pub fn power_is_unit(e: u64, gb: &GroebnerBasis) -> Result<bool, InvariantError> {
    let total = Polynomial::from_pairs(&[(0, 0), (1, 0), (0, 1)]).checked_pow(e, None)?;
    Ok(gb.contains(&(&total + &Polynomial::one())))
}

fn sw_numerator() -> Polynomial {
    Polynomial::from_pairs(&[(0, 0), (2, 0), (0, 2)])
}

/// Normal form of `(1 + w2² + w3²)(1 + w2 + w3)`, the total Stiefel-Whitney
/// class of the stable normal bundle.
pub fn normal_sw_class(n: u64, gb: &GroebnerBasis) -> Result<Polynomial, InvariantError> {
    require_special(n)?;
    check_basis(n, gb)?;
    let product = sw_numerator().checked_mul(&Polynomial::from_pairs(&[(0, 0), (1, 0), (0, 1)]))?;
    Ok(gb.normal_form(&product))
}

/// The same class computed as `(1 + w2² + w3²) / (1 + w2 + w3)^{n+3}`, with
/// the denominator inverted as a power series truncated at degree `3n`.
pub fn normal_sw_class_by_series(n: u64, gb: &GroebnerBasis) -> Result<Polynomial, InvariantError> {
    require_special(n)?;
    check_basis(n, gb)?;
    let cap = 3 * n;
    let denominator =
        Polynomial::from_pairs(&[(0, 0), (1, 0), (0, 1)]).checked_pow(n + 3, Some(cap))?;
    let inverse = series_inverse(&denominator, cap)?;
    let class = sw_numerator().checked_mul_capped(&inverse, Some(cap))?;
    Ok(gb.normal_form(&class))
}

/// `1/f` in `Z/2[[w2, w3]]` up to degree `cap`; requires constant term 1.
pub fn series_inverse(f: &Polynomial, cap: u64) -> Result<Polynomial, InvariantError> {
    if !f.contains(Monomial::ONE) {
        return Err(InvariantError::ZeroInput);
    }
    let tail = f + &Polynomial::one();
    let mut term = Polynomial::one();
    let mut sum = Polynomial::zero();
    while !term.is_zero() {
        sum += &term;
        term = term.checked_mul_capped(&tail, Some(cap))?;
    }
    Ok(sum)
}

/// Non-immersion dimension from the top surviving normal class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImmersionBound {
    pub n: u64,
    /// Largest degree `d` with `w_d(ν) != 0`.
    pub d_max: u64,
    /// `3n + d_max - 1`: no immersion into this Euclidean dimension.
    pub nonimmersion_dim: u64,
    /// Published non-immersion dimension (17 for n = 4, else 3n + 8).
    pub paper_nonimmersion_claim: u64,
    /// Published immersion dimension (21 for n = 4, else 6n - 3); not computed.
    pub paper_positive_bound: u64,
    /// The computed bound is at least as strong as the published one.
    pub subsumes_paper_claim: bool,
}

pub fn nonimmersion_bound(n: u64, gb: &GroebnerBasis) -> Result<ImmersionBound, InvariantError> {
    let class = normal_sw_class(n, gb)?;
    Ok(immersion_from_class(n, &class))
}

fn immersion_from_class(n: u64, class: &Polynomial) -> ImmersionBound {
    let d_max = class.max_degree().expect("constant term survives");
    let nonimmersion_dim = 3 * n + d_max - 1;
    let (claim, positive) = if n == 4 { (17, 21) } else { (3 * n + 8, 6 * n - 3) };
    ImmersionBound {
        n,
        d_max,
        nonimmersion_dim,
        paper_nonimmersion_claim: claim,
        paper_positive_bound: positive,
        subsumes_paper_claim: nonimmersion_dim >= claim,
    }
}

/// Everything above for one `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CupReport {
    pub n: u64,
    pub m: Option<u32>,
    pub cup_im_p: u64,
    pub witness: Monomial,
    pub height_w2: u32,
    /// `cup_im_p + 1` for special `n`, taken from the cup-length theorem via
    /// Poincaré duality; never computed here.
    pub cup_total_reported: Option<u64>,
    pub cup_total_source: Option<&'static str>,
    pub chi_table: Vec<(u32, i64)>,
    pub chi_forms: Option<Vec<ChiRangeCheck>>,
    pub sw_inverse_identity: Option<bool>,
    pub sw_normal: Option<Polynomial>,
    pub immersion: Option<ImmersionBound>,
}

pub fn report(n: u64, gb: &GroebnerBasis) -> Result<CupReport, InvariantError> {
    check_basis(n, gb)?;
    let m = special_m(n);
    let grid = QuotientGrid::scan(n, gb);
    let (cup, witness) = grid.cup_length();
    let height = height_w2(n, gb)?;
    let chi = chi_table_from_grid(&grid);
    let mut out = CupReport {
        n,
        m,
        cup_im_p: cup,
        witness,
        height_w2: height,
        cup_total_reported: None,
        cup_total_source: None,
        chi_forms: m.map(|m| chi_closed_forms(m, &chi)),
        chi_table: chi,
        sw_inverse_identity: None,
        sw_normal: None,
        immersion: None,
    };
    if m.is_some() {
        out.cup_total_reported = Some(cup + 1);
        out.cup_total_source = Some("theorem-derived");
        out.sw_inverse_identity = Some(sw_inverse_identity(n, gb)?);
        let class = normal_sw_class(n, gb)?;
        out.immersion = Some(immersion_from_class(n, &class));
        out.sw_normal = Some(class);
    }
    Ok(out)
}

/// Reduced Buchberger basis of `J_n`.
pub fn basis_for(n: u64) -> Result<GroebnerBasis, InvariantError> {
    let gens = ideal_generators(n)?.nonzero_generators();
    Ok(reduce_basis(&buchberger(&gens)?).with_n(n))
}
