//! Per-evaluation trace and per-iteration log.
//!
//! Evaluation trace (CSV, `#` lines are comments):
//! `eval_index,iter,provenance,point_json,f,h,outcome_of_iter`.
//! Iteration log: `k,outcome,h_max,f_fea,f_inf,h_inf,mesh`.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use crate::blackbox::History;
use crate::blackbox::{fmt_f64, parse_f64};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::mesh::Outcome;

/// Which step produced an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    Doe,
    Spec,
    Quad,
    QntFea,
    QntInf,
    CatFea,
    CatInf,
    Ext,
}

impl Provenance {
    pub const ALL: [Provenance; 8] = [
        Provenance::Doe,
        Provenance::Spec,
        Provenance::Quad,
        Provenance::QntFea,
        Provenance::QntInf,
        Provenance::CatFea,
        Provenance::CatInf,
        Provenance::Ext,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Doe => "DOE",
            Provenance::Spec => "SPEC",
            Provenance::Quad => "QUAD",
            Provenance::QntFea => "QNT_FEA",
            Provenance::QntInf => "QNT_INF",
            Provenance::CatFea => "CAT_FEA",
            Provenance::CatInf => "CAT_INF",
            Provenance::Ext => "EXT",
        }
    }

    pub fn is_poll(self) -> bool {
        matches!(
            self,
            Provenance::QntFea
                | Provenance::QntInf
                | Provenance::CatFea
                | Provenance::CatInf
                | Provenance::Ext
        )
    }
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Provenance::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Trace(format!("unknown provenance `{s}`")))
    }
}

/// One evaluation of the run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub eval_index: u64,
    /// 0 for the design of experiments.
    pub iter: u64,
    pub provenance: Provenance,
    /// Position in the history.
    pub position: usize,
    /// `None` for design points.
    pub outcome: Option<Outcome>,
}

/// Barrier and mesh after one iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct IterationRecord {
    pub k: u64,
    pub outcome: Outcome,
    pub h_max: f64,
    pub f_fea: Option<f64>,
    pub f_inf: Option<f64>,
    pub h_inf: Option<f64>,
    pub mesh: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trace {
    /// Tuned categorical weights, already formatted.
    pub weights: String,
    pub rows: Vec<TraceRow>,
    pub iterations: Vec<IterationRecord>,
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

impl Trace {
    pub fn write_csv<W: Write>(&self, domain: &Domain, history: &History, mut w: W) -> Result<()> {
        writeln!(w, "# weights {}", self.weights)?;
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record([
            "eval_index",
            "iter",
            "provenance",
            "point_json",
            "f",
            "h",
            "outcome_of_iter",
        ])?;
        for r in &self.rows {
            let e = &history.entries()[r.position];
            wr.write_record([
                r.eval_index.to_string(),
                r.iter.to_string(),
                r.provenance.to_string(),
                domain.point_to_json(&e.point),
                fmt_f64(e.result.f),
                fmt_f64(e.result.h),
                r.outcome
                    .map_or_else(|| "init".to_string(), |o| o.to_string()),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn to_csv_string(&self, domain: &Domain, history: &History) -> String {
        let mut buf = Vec::new();
        self.write_csv(domain, history, &mut buf)
            .expect("writing to memory cannot fail");
        String::from_utf8(buf).expect("trace is valid UTF-8")
    }

    pub fn write_iterations<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "outcome", "h_max", "f_fea", "f_inf", "h_inf", "mesh"])?;
        for it in &self.iterations {
            wr.write_record([
                it.k.to_string(),
                it.outcome.to_string(),
                fmt_f64(it.h_max),
                fmt_opt(it.f_fea),
                fmt_opt(it.f_inf),
                fmt_opt(it.h_inf),
                it.mesh.clone(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Checks the barrier laws over an iteration log: `h_max` and the feasible
/// incumbent value never increase, and the infeasible incumbent stays in
/// `(0, h_max]`.
pub fn check_barrier_laws(iterations: &[IterationRecord]) -> std::result::Result<(), String> {
    let mut prev_h = f64::INFINITY;
    let mut prev_f: Option<f64> = None;
    for it in iterations {
        if it.h_max > prev_h {
            return Err(format!(
                "iteration {}: h_max rose from {prev_h} to {}",
                it.k, it.h_max
            ));
        }
        prev_h = it.h_max;
        if let (Some(p), Some(f)) = (prev_f, it.f_fea) {
            if f > p {
                return Err(format!(
                    "iteration {}: feasible incumbent rose from {p} to {f}",
                    it.k
                ));
            }
        }
        if prev_f.is_some() && it.f_fea.is_none() {
            return Err(format!("iteration {}: feasible incumbent vanished", it.k));
        }
        prev_f = it.f_fea.or(prev_f);
        if let Some(h) = it.h_inf {
            if !(h > 0.0 && h <= it.h_max) {
                return Err(format!(
                    "iteration {}: h(x_INF) = {h} outside (0, {}]",
                    it.k, it.h_max
                ));
            }
        }
    }
    Ok(())
}

/// A trace row read back from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub eval_index: u64,
    pub iter: u64,
    pub provenance: Provenance,
    pub point_json: String,
    pub f: f64,
    pub h: f64,
    pub outcome: String,
}

/// Reads an evaluation trace; comment lines are skipped.
pub fn read_trace<R: Read>(r: R) -> Result<Vec<TraceRecord>> {
    let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
    let mut out = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        if rec.len() != 7 {
            return Err(Error::Trace(format!(
                "expected 7 fields, got {}",
                rec.len()
            )));
        }
        let num = |s: &str| parse_f64(s).ok_or_else(|| Error::Trace(format!("bad number `{s}`")));
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::Trace(format!("bad integer `{s}`")))
        };
        out.push(TraceRecord {
            eval_index: int(&rec[0])?,
            iter: int(&rec[1])?,
            provenance: rec[2].parse()?,
            point_json: rec[3].to_string(),
            f: num(&rec[4])?,
            h: num(&rec[5])?,
            outcome: rec[6].to_string(),
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(k: u64, h_max: f64, f_fea: Option<f64>, h_inf: Option<f64>) -> IterationRecord {
        IterationRecord {
            k,
            outcome: Outcome::Unsuccessful,
            h_max,
            f_fea,
            f_inf: h_inf.map(|_| 0.0),
            h_inf,
            mesh: String::new(),
        }
    }

    #[test]
    fn barrier_law_checker() {
        let ok = vec![
            rec(1, 5.0, None, Some(5.0)),
            rec(2, 3.0, Some(2.0), Some(1.0)),
            rec(3, 3.0, Some(1.0), None),
        ];
        assert!(check_barrier_laws(&ok).is_ok());
        assert!(check_barrier_laws(&[rec(1, 1.0, None, None), rec(2, 2.0, None, None)]).is_err());
        assert!(
            check_barrier_laws(&[rec(1, 1.0, Some(1.0), None), rec(2, 1.0, Some(2.0), None)])
                .is_err()
        );
        assert!(check_barrier_laws(&[rec(1, 1.0, None, Some(2.0))]).is_err());
    }

    #[test]
    fn provenance_round_trip() {
        for p in Provenance::ALL {
            assert_eq!(p.as_str().parse::<Provenance>().unwrap(), p);
        }
        assert!("XYZ".parse::<Provenance>().is_err());
    }
}
