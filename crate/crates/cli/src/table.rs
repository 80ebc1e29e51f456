//! Grid evaluation with an on-disk cache.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use hecke_core::characters::enumerate_characters;
use hecke_core::cyclotomic::CyclotomicNumber;
use hecke_core::gamma0::{trace_s, TraceQuery};
use hecke_core::gamma1::{trace_gamma1_ms, trace_gamma1_s, Gamma1Query};
use hecke_core::ENGINE_VERSION;

use crate::record::OutputRecord;
use crate::Failure;

/// Inclusive range with a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub start: u64,
    pub end: u64,
    pub step: u64,
}

impl Span {
    pub fn values(self) -> impl Iterator<Item = u64> {
        (self.start..=self.end).step_by(self.step as usize)
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let bad = || format!("bad range {s:?}; expected a, a..b or a..b:step");
        let (range, step) = match s.split_once(':') {
            Some((r, st)) => (r, st.trim().parse().map_err(|_| bad())?),
            None => (s, 1),
        };
        let (start, end) = match range.split_once("..") {
            Some((a, b)) => (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?),
            None => {
                let v = range.trim().parse().map_err(|_| bad())?;
                (v, v)
            }
        };
        if step == 0 || start > end {
            return Err(bad());
        }
        Ok(Span { start, end, step })
    }
}

/// Which characters to use for `Gamma0` cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CharSelection {
    #[default]
    Trivial,
    /// Every `chi` with `chi(-1) = (-1)^k`.
    AllValidParity,
}

impl FromStr for CharSelection {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "trivial" => Ok(CharSelection::Trivial),
            "all-valid-parity" => Ok(CharSelection::AllValidParity),
            _ => Err(format!("unknown character selection {s:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grid {
    pub level: Span,
    pub weight: Span,
    pub index: Span,
    pub chars: CharSelection,
}

impl FromStr for Grid {
    type Err = String;

    /// `N=1..10,k=2..6:2,n=1..10[,chi=all-valid-parity]`.
    fn from_str(s: &str) -> Result<Self, String> {
        let (mut level, mut weight, mut index, mut chars) = (None, None, None, CharSelection::default());
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part.split_once('=').ok_or_else(|| format!("bad grid item {part:?}"))?;
            match key.trim() {
                "N" => level = Some(value.parse()?),
                "k" => weight = Some(value.parse()?),
                "n" => index = Some(value.parse()?),
                "chi" => chars = value.trim().parse()?,
                other => return Err(format!("unknown grid key {other:?}")),
            }
        }
        let need = |x: Option<Span>, name: &str| x.ok_or_else(|| format!("grid needs {name}=..."));
        let grid = Grid {
            level: need(level, "N")?,
            weight: need(weight, "k")?,
            index: need(index, "n")?,
            chars,
        };
        if grid.level.start == 0 || grid.weight.start < 2 || grid.index.start == 0 {
            return Err("grid needs N >= 1, k >= 2, n >= 1".into());
        }
        Ok(grid)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum TableKind {
    /// `tr(T_n, S_k(N, chi))`.
    Trace,
    /// `tr(T_n, S_k(Gamma1(N)))`.
    Gamma1,
    /// `tr(T_n, M_k(Gamma1(N)) + S_k(Gamma1(N)))`.
    Gamma1Ms,
}

impl TableKind {
    fn tag(self) -> &'static str {
        match self {
            TableKind::Trace => "trace",
            TableKind::Gamma1 => "gamma1",
            TableKind::Gamma1Ms => "gamma1-ms",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub kind: TableKind,
    pub level: u64,
    pub weight: u32,
    /// Index in the character enumeration; `None` for `Gamma1` cells.
    pub chi: Option<usize>,
    pub n: u64,
}

impl Cell {
    pub fn key(&self) -> String {
        let chi = self.chi.map_or_else(|| "-".to_string(), |c| c.to_string());
        format!("{}|N={}|k={}|chi={}|n={}", self.kind.tag(), self.level, self.weight, chi, self.n)
    }

    fn file_name(&self) -> String {
        let chi = self.chi.map_or_else(String::new, |c| format!("_chi{c}"));
        format!("{}_N{}_k{}{}_n{}.json", self.kind.tag(), self.level, self.weight, chi, self.n)
    }

    pub fn compute(&self) -> Result<OutputRecord, Failure> {
        let (value, query) = match self.kind {
            TableKind::Trace => {
                let index = self.chi.unwrap_or(0);
                let chi = enumerate_characters(self.level, None)?
                    .into_iter()
                    .nth(index)
                    .ok_or_else(|| Failure::Usage(format!("no character {index} mod {}", self.level)))?;
                let q = TraceQuery::new(self.level, self.weight, chi.clone(), self.n)?;
                let query = json!({
                    "kind": "trace", "level": self.level, "weight": self.weight,
                    "char_index": index, "character": chi, "n": self.n,
                });
                (trace_s(&q)?.value, query)
            }
            TableKind::Gamma1 | TableKind::Gamma1Ms => {
                let q = Gamma1Query::new(self.level, self.weight, self.n)?;
                let (r, space) = if self.kind == TableKind::Gamma1 {
                    (trace_gamma1_s(&q)?, "S")
                } else {
                    (trace_gamma1_ms(&q)?, "MS")
                };
                let query = json!({
                    "kind": "trace-gamma1", "level": self.level, "weight": self.weight,
                    "n": self.n, "space": space,
                });
                (r.value, query)
            }
        };
        Ok(OutputRecord::new(query, value))
    }
}

/// Cells in output order: by `N`, then `k`, then character index, then `n`.
pub fn cells(grid: &Grid, kind: TableKind) -> Result<Vec<Cell>, Failure> {
    let mut out = Vec::new();
    for level in grid.level.values() {
        for weight in grid.weight.values() {
            let weight = u32::try_from(weight).map_err(|_| Failure::Usage("weight too large".into()))?;
            let chis: Vec<Option<usize>> = match (kind, grid.chars) {
                (TableKind::Trace, CharSelection::Trivial) => vec![Some(0)],
                (TableKind::Trace, CharSelection::AllValidParity) => {
                    let sign = if weight % 2 == 0 { 1 } else { -1 };
                    enumerate_characters(level, None)?
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.parity() == sign)
                        .map(|(i, _)| Some(i))
                        .collect()
                }
                _ => vec![None],
            };
            for chi in chis {
                for n in grid.index.values() {
                    out.push(Cell {
                        kind,
                        level,
                        weight,
                        chi,
                        n,
                    });
                }
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub engine_version: String,
    pub record: OutputRecord,
}

pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self, Failure> {
        fs::create_dir_all(dir).map_err(|e| Failure::Other(format!("cache dir {}: {e}", dir.display())))?;
        Ok(Cache { dir: dir.to_path_buf() })
    }

    /// A cached record for `cell`, if present and produced by this engine version.
    pub fn get(&self, cell: &Cell) -> Option<OutputRecord> {
        let text = fs::read_to_string(self.dir.join(cell.file_name())).ok()?;
        let entry: CacheEntry = serde_json::from_str(&text).ok()?;
        (entry.engine_version == ENGINE_VERSION && entry.key == cell.key()).then_some(entry.record)
    }

    pub fn put(&self, cell: &Cell, record: &OutputRecord) -> Result<(), Failure> {
        let entry = CacheEntry {
            key: cell.key(),
            engine_version: ENGINE_VERSION.to_string(),
            record: record.clone(),
        };
        let io = |e: std::io::Error| Failure::Other(format!("cache write: {e}"));
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir).map_err(io)?;
        serde_json::to_writer(&mut tmp, &entry).map_err(|e| Failure::Other(e.to_string()))?;
        tmp.flush().map_err(io)?;
        tmp.persist(self.dir.join(cell.file_name()))
            .map_err(|e| Failure::Other(format!("cache write: {e}")))?;
        Ok(())
    }
}

pub struct TableRun {
    pub records: Vec<(Cell, OutputRecord)>,
    pub computed: usize,
    pub cached: usize,
}

pub fn run(cells: Vec<Cell>, cache: Option<&Cache>, jobs: usize) -> Result<TableRun, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Other(e.to_string()))?;
    let results: Vec<Result<(Cell, OutputRecord, bool), Failure>> = pool.install(|| {
        cells
            .into_par_iter()
            .map(|cell| {
                if let Some(rec) = cache.and_then(|c| c.get(&cell)) {
                    return Ok((cell, rec, true));
                }
                let rec = cell.compute()?;
                if let Some(c) = cache {
                    c.put(&cell, &rec)?;
                }
                Ok((cell, rec, false))
            })
            .collect()
    });
    let mut run = TableRun {
        records: Vec::with_capacity(results.len()),
        computed: 0,
        cached: 0,
    };
    for r in results {
        let (cell, rec, hit) = r?;
        if hit {
            run.cached += 1;
        } else {
            run.computed += 1;
        }
        run.records.push((cell, rec));
    }
    Ok(run)
}

/// Integer value of a record, for CSV output.
pub fn integer_value(rec: &OutputRecord) -> Option<String> {
    let r: Option<num_rational::BigRational> = CyclotomicNumber::to_rational(&rec.result);
    r.filter(|r| r.is_integer()).map(|r| r.to_integer().to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_grid() {
        let g: Grid = "N=1..10,k=2..6:2,n=1..10".parse().unwrap();
        assert_eq!(g.weight.values().collect::<Vec<_>>(), vec![2, 4, 6]);
        assert_eq!(g.level.values().count(), 10);
        assert_eq!(g.chars, CharSelection::Trivial);
        let g: Grid = "N=4,k=3,n=1..5,chi=all-valid-parity".parse().unwrap();
        assert_eq!(g.level, Span { start: 4, end: 4, step: 1 });
        assert_eq!(g.chars, CharSelection::AllValidParity);
        assert!("N=1..10,k=2".parse::<Grid>().is_err());
        assert!("N=0..3,k=2,n=1".parse::<Grid>().is_err());
        assert!("N=5..3,k=2,n=1".parse::<Grid>().is_err());
        assert!("N=1,k=2..4:0,n=1".parse::<Grid>().is_err());
    }

    #[test]
    fn valid_parity_cells() {
        let g: Grid = "N=5,k=2..3,n=1,chi=all-valid-parity".parse().unwrap();
        let cs = cells(&g, TableKind::Trace).unwrap();
        assert_eq!(cs.len(), 4);
        assert!(cs.windows(2).all(|w| (w[0].weight, w[0].chi) < (w[1].weight, w[1].chi)));
    }
}
