use std::io::Write;

use grcup_core::grassmann_ideal::{ideal_generators, paper_family, special_m};
use grcup_core::groebner::{is_groebner, reduce_basis, verify_all_chains, ChainReport, GroebnerBasis};
use grcup_core::invariants::{basis_for, report, CupReport, ChiRangeCheck, ImmersionBound};
use grcup_core::{Monomial, Polynomial};
use serde::Serialize;

use crate::cache::{Cache, Lookup};
use crate::table::run_table;
use crate::{Cli, CliError, Command, Format, Options, DEFAULT_VERIFY_NS, ENGINE_VERSION};

pub fn run(cli: &Cli, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let opts = &cli.opts;
    if opts.format == Format::Csv && cli.command != Command::Table {
        return Err(CliError::Usage("--format csv is only available for `table`".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.jobs.map_or(0, |j| j as usize))
        .build()
        .map_err(|e| CliError::Compute(e.to_string()))?;
    // the sweep drives the pool from a helper thread while this one emits
    if cli.command == Command::Table {
        return table(opts, &pool, out);
    }
    pool.install(|| match cli.command {
        Command::Generators => generators(opts, out),
        Command::Basis => basis(opts, out),
        Command::Cup => cup(opts, out),
        Command::Immersion => immersion(opts, out),
        Command::VerifyAll => verify_all(opts, out),
        Command::Table => unreachable!(),
    })
}

fn check_n(n: u64) -> Result<u64, CliError> {
    if n < 4 {
        return Err(CliError::Usage(format!("n must be at least 4, got {n}")));
    }
    Ok(n)
}

fn require_n(opts: &Options) -> Result<u64, CliError> {
    let n = opts.n.ok_or_else(|| CliError::Usage("--n is required".into()))?;
    check_n(n)
}

fn require_special(n: u64, what: &str) -> Result<u32, CliError> {
    special_m(n).ok_or_else(|| {
        CliError::Usage(format!("{what} needs n + 4 to be a power of two (n = 4, 12, 28, ...), got n = {n}"))
    })
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, value).map_err(std::io::Error::from)?;
    writeln!(out)?;
    Ok(())
}

/// Reduced basis for `n`, from the cache when a valid entry exists.
pub fn obtain_basis(n: u64, cache: &Cache) -> Result<GroebnerBasis, CliError> {
    let path = cache.path_for(n);
    match cache.load(n)? {
        Lookup::Hit(gb) => {
            eprintln!("cache hit: {}", path.display());
            return Ok(gb);
        }
        Lookup::Rejected(why) => eprintln!("cache entry {} ignored: {why}; recomputing", path.display()),
        Lookup::Miss => {}
    }
    let gb = basis_for(n)?;
    cache.store(n, &gb.polys)?;
    Ok(gb)
}

/// The reduced basis of the closed-form family, bypassing the cache.
fn family_basis(n: u64) -> Result<GroebnerBasis, CliError> {
    let m = require_special(n, "--paper-family")?;
    let family = paper_family(m)?;
    let gb = GroebnerBasis::from_paper_family(&family).map_err(|e| CliError::Verification(e.to_string()))?;
    eprintln!("basis source: closed-form family P_0..P_{m}");
    Ok(reduce_basis(&gb).with_n(n))
}

fn select_basis(n: u64, opts: &Options) -> Result<GroebnerBasis, CliError> {
    if opts.paper_family {
        family_basis(n)
    } else {
        obtain_basis(n, &Cache::resolve(opts.cache_dir.clone())?)
    }
}

#[derive(Serialize)]
struct GeneratorsOut {
    n: u64,
    special: bool,
    m: Option<u32>,
    g: Vec<Polynomial>,
}

fn generators(opts: &Options, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let n = require_n(opts)?;
    let ideal = ideal_generators(n)?;
    if opts.format == Format::Json {
        let g = ideal.generators.to_vec();
        return write_json(out, &GeneratorsOut { n, special: ideal.is_special(), m: ideal.special, g });
    }
    writeln!(out, "n = {n}")?;
    match ideal.special {
        Some(m) => writeln!(out, "special = true (m = {m})")?,
        None => writeln!(out, "special = false")?,
    }
    for (r, g) in (n + 1..).zip(&ideal.generators) {
        writeln!(out, "g{r} = {g}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ChainOut {
    i: u32,
    j: u32,
    steps: usize,
    reductions: usize,
}

impl From<&ChainReport> for ChainOut {
    fn from(c: &ChainReport) -> Self {
        ChainOut { i: c.i, j: c.j, steps: c.steps.len(), reductions: c.reductions() }
    }
}

#[derive(Serialize)]
struct Verification {
    pairs_checked: usize,
    /// `None` when `n` is not special and no chains exist.
    chains: Option<Vec<ChainOut>>,
    two_way_equal: Option<bool>,
    verified: bool,
}

#[derive(Serialize)]
struct BasisOut {
    n: u64,
    m: Option<u32>,
    engine_version: &'static str,
    basis: Vec<Polynomial>,
    leading_terms: Vec<Monomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verification: Option<Verification>,
}

fn verify_basis(n: u64, gb: &GroebnerBasis) -> Result<Verification, CliError> {
    let check = is_groebner(&gb.polys);
    if let Some(cert) = check.certificate {
        return Err(CliError::Verification(cert.to_string()));
    }
    let (chains, two_way_equal) = match special_m(n) {
        Some(m) => {
            let chains = verify_all_chains(m).map_err(|e| CliError::Verification(e.to_string()))?;
            let family = GroebnerBasis::from_paper_family(&paper_family(m)?)
                .map_err(|e| CliError::Verification(e.to_string()))?;
            let buchberger = basis_for(n)?;
            let equal = reduce_basis(&family).polys == gb.polys && buchberger.polys == gb.polys;
            if !equal {
                return Err(CliError::Verification(format!(
                    "closed-form and Buchberger reduced bases differ at n = {n}"
                )));
            }
            (Some(chains.iter().map(ChainOut::from).collect()), Some(equal))
        }
        None => (None, None),
    };
    Ok(Verification { pairs_checked: check.pairs_checked, chains, two_way_equal, verified: true })
}

fn basis(opts: &Options, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let n = require_n(opts)?;
    let gb = select_basis(n, opts)?;
    let verification = if opts.verify { Some(verify_basis(n, &gb)?) } else { None };
    let m = special_m(n);
    if opts.format == Format::Json {
        let body = BasisOut {
            n,
            m,
            engine_version: ENGINE_VERSION,
            leading_terms: gb.leading_terms(),
            basis: gb.polys,
            verification,
        };
        return write_json(out, &body);
    }
    writeln!(out, "n = {n}")?;
    if let Some(m) = m {
        writeln!(out, "m = {m}")?;
    }
    writeln!(out, "reduced basis ({} polynomials):", gb.polys.len())?;
    for g in &gb.polys {
        let lt = g.lt().expect("nonzero");
        writeln!(out, "  LT ({},{})  {g}", lt.p, lt.q)?;
    }
    if let Some(v) = verification {
        writeln!(out, "s-pairs reducing to 0: {}", v.pairs_checked)?;
        match &v.chains {
            Some(chains) => {
                for c in chains {
                    writeln!(out, "chain S(P{}, P{}) -> 0: {} reductions", c.i, c.j, c.reductions)?;
                }
            }
            None => writeln!(out, "chains: none (n is not special)")?,
        }
        if let Some(eq) = v.two_way_equal {
            writeln!(out, "closed form = buchberger: {eq}")?;
        }
        writeln!(out, "verified: {}", v.verified)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct CupOut {
    n: u64,
    m: Option<u32>,
    engine_version: &'static str,
    cup_im_p: u64,
    witness: Monomial,
    height_w2: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    cup_total_reported: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    cup_total_source: Option<&'static str>,
    chi_table: Vec<(u32, i64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    chi_forms: Option<Vec<ChiRangeCheck>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sw_inverse_identity: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sw_normal: Option<Polynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    immersion: Option<ImmersionOut>,
}

impl From<CupReport> for CupOut {
    fn from(r: CupReport) -> Self {
        CupOut {
            n: r.n,
            m: r.m,
            engine_version: ENGINE_VERSION,
            cup_im_p: r.cup_im_p,
            witness: r.witness,
            height_w2: r.height_w2,
            cup_total_reported: r.cup_total_reported,
            cup_total_source: r.cup_total_source,
            chi_table: r.chi_table,
            chi_forms: r.chi_forms,
            sw_inverse_identity: r.sw_inverse_identity,
            immersion: r.immersion.zip(r.sw_normal.clone()).map(|(b, class)| ImmersionOut::new(r.m, b, class)),
            sw_normal: r.sw_normal,
        }
    }
}

fn cup(opts: &Options, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let n = require_n(opts)?;
    let gb = select_basis(n, opts)?;
    let r = CupOut::from(report(n, &gb)?);
    if opts.format == Format::Json {
        return write_json(out, &r);
    }
    writeln!(out, "n = {n}")?;
    if let Some(m) = r.m {
        writeln!(out, "m = {m}")?;
    }
    writeln!(out, "cup_im_p = {} (witness {})", r.cup_im_p, r.witness)?;
    writeln!(out, "height_w2 = {}", r.height_w2)?;
    if let (Some(total), Some(src)) = (r.cup_total_reported, r.cup_total_source) {
        writeln!(out, "cup_total_reported = {total} ({src})")?;
    }
    let chi: Vec<String> = r.chi_table.iter().map(|(a, b)| format!("{a}:{b}")).collect();
    writeln!(out, "chi2 by chi1 = {}", chi.join(" "))?;
    for f in r.chi_forms.iter().flatten() {
        writeln!(
            out,
            "chi range i={} [{}, {}): 2^(i+1)-2 = {} {}, 2^i-1 = {} {}",
            f.i,
            f.lo,
            f.hi,
            f.proof_form,
            if f.matches_proof { "matches" } else { "differs" },
            f.statement_form,
            if f.matches_statement { "matches" } else { "differs" },
        )?;
    }
    if let Some(ok) = r.sw_inverse_identity {
        writeln!(out, "sw_inverse_identity = {ok}")?;
    }
    if let Some(class) = &r.sw_normal {
        writeln!(out, "w(normal) = {class}")?;
    }
    if let Some(b) = &r.immersion {
        writeln!(out, "nonimmersion_dim = {}", b.nonimmersion_dim)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ImmersionOut {
    n: u64,
    m: Option<u32>,
    engine_version: &'static str,
    sw_normal: Polynomial,
    d_max: u64,
    nonimmersion_dim: u64,
    paper_nonimmersion_claim: u64,
    paper_positive_bound: u64,
    subsumes_paper_claim: bool,
}

impl ImmersionOut {
    fn new(m: Option<u32>, b: ImmersionBound, sw_normal: Polynomial) -> Self {
        ImmersionOut {
            n: b.n,
            m,
            engine_version: ENGINE_VERSION,
            sw_normal,
            d_max: b.d_max,
            nonimmersion_dim: b.nonimmersion_dim,
            paper_nonimmersion_claim: b.paper_nonimmersion_claim,
            paper_positive_bound: b.paper_positive_bound,
            subsumes_paper_claim: b.subsumes_paper_claim,
        }
    }
}

fn immersion(opts: &Options, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let n = require_n(opts)?;
    require_special(n, "immersion")?;
    let gb = select_basis(n, opts)?;
    let r = CupOut::from(report(n, &gb)?);
    let b = r.immersion.expect("special n has an immersion bound");
    if opts.format == Format::Json {
        return write_json(out, &b);
    }
    writeln!(out, "n = {n}")?;
    writeln!(out, "m = {}", b.m.expect("special"))?;
    writeln!(out, "w(normal) = {}", b.sw_normal)?;
    writeln!(out, "d_max = {}", b.d_max)?;
    writeln!(out, "nonimmersion_dim = {}", b.nonimmersion_dim)?;
    writeln!(out, "published_nonimmersion_dim = {}", b.paper_nonimmersion_claim)?;
    writeln!(out, "published_immersion_dim = {}", b.paper_positive_bound)?;
    writeln!(out, "subsumes_published = {}", b.subsumes_paper_claim)?;
    Ok(())
}

fn table(opts: &Options, pool: &rayon::ThreadPool, out: &mut dyn Write) -> Result<(), CliError> {
    let (from, to) = match (opts.n, opts.from, opts.to) {
        (Some(n), None, None) => (n, n),
        (None, Some(a), Some(b)) => (a, b),
        _ => return Err(CliError::Usage("table needs --from and --to (or a single --n)".into())),
    };
    check_n(from)?;
    if from > to {
        return Err(CliError::Usage(format!("--from {from} exceeds --to {to}")));
    }
    let cache = Cache::resolve(opts.cache_dir.clone())?;
    run_table(from, to, opts.format, pool, &cache, out)
}

#[derive(Serialize)]
struct VerifyOut {
    n: u64,
    m: u32,
    engine_version: &'static str,
    family_is_groebner: bool,
    chains: usize,
    chains_ok: bool,
    basis_equal: bool,
    cup_im_p: u64,
    height_w2: u32,
    sw_inverse_identity: bool,
    pass: bool,
}

fn verify_one(n: u64, m: u32, cache: &Cache) -> Result<VerifyOut, CliError> {
    let family = paper_family(m)?;
    let family_gb = GroebnerBasis::from_paper_family(&family);
    let family_is_groebner = family_gb.is_ok();
    let (chains, chains_ok) = match verify_all_chains(m) {
        Ok(c) => (c.len(), true),
        Err(e) => {
            eprintln!("n = {n}: {e}");
            (0, false)
        }
    };
    let computed = obtain_basis(n, cache)?;
    let basis_equal = family_gb.map(|gb| reduce_basis(&gb).polys == computed.polys).unwrap_or(false);
    let r = report(n, &computed)?;
    let sw = r.sw_inverse_identity == Some(true);
    let pass = family_is_groebner && chains_ok && basis_equal && r.cup_im_p == n && u64::from(r.height_w2) == n && sw;
    Ok(VerifyOut {
        n,
        m,
        engine_version: ENGINE_VERSION,
        family_is_groebner,
        chains,
        chains_ok,
        basis_equal,
        cup_im_p: r.cup_im_p,
        height_w2: r.height_w2,
        sw_inverse_identity: sw,
        pass,
    })
}

fn verify_all(opts: &Options, out: &mut (dyn Write + Send)) -> Result<(), CliError> {
    let ns: Vec<u64> = match (opts.n, opts.from, opts.to) {
        (Some(n), None, None) => {
            check_n(n)?;
            require_special(n, "verify-all")?;
            vec![n]
        }
        (None, Some(a), Some(b)) => (check_n(a)?..=b).filter(|&n| special_m(n).is_some()).collect(),
        (None, None, None) => DEFAULT_VERIFY_NS.to_vec(),
        _ => return Err(CliError::Usage("verify-all takes --n or --from/--to".into())),
    };
    let cache = Cache::resolve(opts.cache_dir.clone())?;
    let mut failed = Vec::new();
    let mut results = Vec::new();
    for n in ns {
        let m = special_m(n).expect("filtered to special n");
        let v = verify_one(n, m, &cache)?;
        if !v.pass {
            failed.push(n);
        }
        if opts.format == Format::Text {
            writeln!(
                out,
                "n={} m={} groebner={} chains={}/{} basis_equal={} cup_im_p={} height_w2={} sw_identity={}: {}",
                v.n,
                v.m,
                v.family_is_groebner,
                v.chains,
                if v.chains_ok { "ok" } else { "broken" },
                v.basis_equal,
                v.cup_im_p,
                v.height_w2,
                v.sw_inverse_identity,
                if v.pass { "PASS" } else { "FAIL" }
            )?;
            out.flush()?;
        }
        results.push(v);
    }
    if opts.format == Format::Json {
        write_json(out, &results)?;
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(format!("failing n: {failed:?}")))
    }
}
