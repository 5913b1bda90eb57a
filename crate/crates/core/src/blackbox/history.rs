use std::collections::HashMap;
use std::io::{Read, Write};

use crate::domain::{Domain, Point};
use crate::error::{Error, Result};

use super::{EvalResult, Status};

/// One known point.
#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub point: Point,
    pub result: EvalResult,
}

/// Append-only evaluation history with an exact-point index.
#[derive(Debug, Clone, Default)]
pub struct History {
    entries: Vec<Entry>,
    index: HashMap<Point, usize>,
    n_constraints: usize,
}

impl History {
    pub fn new(n_constraints: usize) -> Self {
        Self {
            entries: Vec::new(),
            index: HashMap::new(),
            n_constraints,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn n_constraints(&self) -> usize {
        self.n_constraints
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn position(&self, p: &Point) -> Option<usize> {
        self.index.get(p).copied()
    }

    pub fn get(&self, p: &Point) -> Option<&Entry> {
        self.position(p).map(|i| &self.entries[i])
    }

    /// Appends a new entry; panics if the point is already known or the
    /// evaluation index does not increase.
    pub fn push(&mut self, point: Point, result: EvalResult) -> usize {
        assert!(!self.index.contains_key(&point), "point already in history");
        if let Some(last) = self.entries.last() {
            assert!(
                result.eval_index > last.result.eval_index,
                "eval_index must increase"
            );
        }
        let i = self.entries.len();
        self.index.insert(point.clone(), i);
        self.entries.push(Entry { point, result });
        i
    }

    /// CSV: `eval_index,point_json,f,h,g1..gJ,status`.
    pub fn write_csv<W: Write>(&self, domain: &Domain, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec![
            "eval_index".to_string(),
            "point_json".into(),
            "f".into(),
            "h".into(),
        ];
        header.extend((1..=self.n_constraints).map(|j| format!("g{j}")));
        header.push("status".into());
        wr.write_record(&header)?;
        for e in &self.entries {
            let mut rec = vec![
                e.result.eval_index.to_string(),
                domain.point_to_json(&e.point),
                fmt_f64(e.result.f),
                fmt_f64(e.result.h),
            ];
            rec.extend(e.result.g.iter().map(|&g| fmt_f64(g)));
            rec.push(e.result.status.to_string());
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv<R: Read>(domain: &Domain, r: R) -> Result<Self> {
        let mut rd = csv::Reader::from_reader(r);
        let headers = rd.headers()?.clone();
        if headers.len() < 5 {
            return Err(Error::Trace("history header too short".into()));
        }
        let n_constraints = headers.len() - 5;
        let mut h = History::new(n_constraints);
        for rec in rd.records() {
            let rec = rec?;
            let parse = |s: &str| -> Result<f64> {
                parse_f64(s).ok_or_else(|| Error::Trace(format!("bad number `{s}`")))
            };
            let eval_index: u64 = rec[0]
                .parse()
                .map_err(|_| Error::Trace(format!("bad eval_index `{}`", &rec[0])))?;
            let point = domain.point_from_json(&rec[1])?;
            let f = parse(&rec[2])?;
            let hv = parse(&rec[3])?;
            let g = (0..n_constraints)
                .map(|j| parse(&rec[4 + j]))
                .collect::<Result<Vec<_>>>()?;
            let status = match &rec[4 + n_constraints] {
                "ok" => Status::Ok,
                "hidden_failure" => Status::HiddenFailure,
                s => return Err(Error::Trace(format!("bad status `{s}`"))),
            };
            h.push(
                point,
                EvalResult {
                    f,
                    g,
                    h: hv,
                    status,
                    eval_index,
                },
            );
        }
        Ok(h)
    }
}

/// Shortest round-trip decimal; `inf` / `-inf` for infinities.
pub(crate) fn fmt_f64(x: f64) -> String {
    if x == f64::INFINITY {
        "inf".into()
    } else if x == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{x:?}")
    }
}

pub(crate) fn parse_f64(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "+inf" | "Infinity" | "infinity" => Some(f64::INFINITY),
        "-inf" | "-Infinity" | "-infinity" => Some(f64::NEG_INFINITY),
        t => t.parse().ok(),
    }
}
