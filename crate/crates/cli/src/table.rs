//! The conjecture sweep: rows are computed on a worker pool and emitted in
//! ascending `n` as soon as the prefix is complete.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;

use grcup_core::grassmann_ideal::special_m;
use grcup_core::invariants::{cup_im_p, height_w2};
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::Cache;
use crate::commands::obtain_basis;
use crate::conjecture::{conjecture, matches};
use crate::{CliError, Format, ENGINE_VERSION};

pub const CSV_HEADER: &str = "n,special,m,cup_im_p,height_w2,conjecture,match";

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub n: u64,
    pub m: Option<u32>,
    pub engine_version: &'static str,
    pub special: bool,
    pub cup_im_p: u64,
    pub height_w2: u32,
    pub conjecture: Option<u64>,
    #[serde(rename = "match")]
    pub matches: Option<bool>,
}

pub fn compute_row(n: u64, cache: &Cache) -> Result<Row, CliError> {
    let gb = obtain_basis(n, cache)?;
    let (cup, _) = cup_im_p(n, &gb)?;
    let height = height_w2(n, &gb)?;
    let m = special_m(n);
    let conj = conjecture(n);
    Ok(Row {
        n,
        m,
        engine_version: ENGINE_VERSION,
        special: m.is_some(),
        cup_im_p: cup,
        height_w2: height,
        conjecture: conj,
        matches: matches(m.is_some(), cup, conj),
    })
}

fn blank<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn text_line(cells: [&str; 7]) -> String {
    format!(
        "{:>5}  {:>7}  {:>2}  {:>8}  {:>9}  {:>10}  {:>5}",
        cells[0], cells[1], cells[2], cells[3], cells[4], cells[5], cells[6]
    )
}

fn cells(row: &Row) -> [String; 7] {
    [
        row.n.to_string(),
        row.special.to_string(),
        blank(row.m),
        row.cup_im_p.to_string(),
        row.height_w2.to_string(),
        blank(row.conjecture),
        blank(row.matches),
    ]
}

/// Streams one output format; `begin`, `row` and `end` are called in order.
struct Emitter<'a> {
    out: &'a mut dyn Write,
    format: Format,
    rows: usize,
}

impl Emitter<'_> {
    fn begin(&mut self) -> std::io::Result<()> {
        match self.format {
            Format::Csv => writeln!(self.out, "{CSV_HEADER}")?,
            Format::Text => {
                let header: Vec<&str> = CSV_HEADER.split(',').collect();
                let header: [&str; 7] = header.try_into().expect("seven columns");
                writeln!(self.out, "{}", text_line(header))?
            }
            Format::Json => writeln!(self.out, "[")?,
        }
        self.out.flush()
    }

    fn row(&mut self, row: &Row) -> std::io::Result<()> {
        match self.format {
            Format::Csv => writeln!(self.out, "{}", cells(row).join(","))?,
            Format::Text => {
                let c = cells(row);
                writeln!(self.out, "{}", text_line(c.each_ref().map(String::as_str)))?
            }
            Format::Json => {
                if self.rows > 0 {
                    writeln!(self.out, ",")?;
                }
                serde_json::to_writer(&mut *self.out, row)?;
            }
        }
        self.rows += 1;
        self.out.flush()
    }

    fn end(&mut self) -> std::io::Result<()> {
        if self.format == Format::Json {
            if self.rows > 0 {
                writeln!(self.out)?;
            }
            writeln!(self.out, "]")?;
        }
        self.out.flush()
    }
}

/// Computes rows `from..=to` on `pool` and writes them in order. Rows
/// already written stay written when a later row fails.
pub fn run_table(
    from: u64,
    to: u64,
    format: Format,
    pool: &rayon::ThreadPool,
    cache: &Cache,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut emitter = Emitter { out, format, rows: 0 };
    emitter.begin()?;
    let stop = AtomicBool::new(false);
    let (tx, rx) = mpsc::channel::<(u64, Result<Row, CliError>)>();
    let result = std::thread::scope(|s| {
        let stop = &stop;
        s.spawn(move || {
            pool.install(|| {
                (from..=to).into_par_iter().for_each_with(tx, |tx, n| {
                    if !stop.load(Ordering::Relaxed) {
                        let _ = tx.send((n, compute_row(n, cache)));
                    }
                })
            })
        });
        let mut pending = BTreeMap::new();
        let mut next = from;
        let mut outcome = Ok(());
        for (n, row) in rx {
            if outcome.is_err() {
                continue;
            }
            pending.insert(n, row);
            while let Some(row) = pending.remove(&next) {
                let step = row.and_then(|r| emitter.row(&r).map_err(CliError::from));
                if let Err(e) = step {
                    stop.store(true, Ordering::Relaxed);
                    outcome = Err(e);
                    break;
                }
                next += 1;
            }
        }
        outcome
    });
    result?;
    emitter.end()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table(from: u64, to: u64, format: Format, jobs: usize, cache: &Cache) -> String {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build().unwrap();
        let mut out = Vec::new();
        run_table(from, to, format, &pool, cache, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn first_rows() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let csv = table(4, 6, Format::Csv, 2, &cache);
        assert_eq!(
            csv,
            "n,special,m,cup_im_p,height_w2,conjecture,match\n\
             4,true,2,4,4,5,true\n\
             5,false,,4,4,5,\n\
             6,false,,4,4,5,\n"
        );
    }

    #[test]
    fn blank_conjecture_off_the_first_two_clauses() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let csv = table(10, 11, Format::Csv, 1, &cache);
        for line in csv.lines().skip(1) {
            assert!(line.ends_with(",,"), "{line}");
        }
    }

    #[test]
    fn json_rows_form_an_array() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let json = table(4, 7, Format::Json, 3, &cache);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let rows = v.as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0]["match"], serde_json::json!(true));
        assert_eq!(rows[1]["m"], serde_json::Value::Null);
        assert_eq!(rows[3]["engine_version"], serde_json::json!(ENGINE_VERSION));
    }

    #[test]
    fn output_does_not_depend_on_thread_count() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::new(dir.path());
        let one = table(4, 30, Format::Text, 1, &cache);
        let many = table(4, 30, Format::Text, 7, &cache);
        assert_eq!(one, many);
    }
}
