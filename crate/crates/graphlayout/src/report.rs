//! CSV reports.
//!
//! - layout rows: `label,p,v_max,e_max,ec,ec_max,ec_max_norm,coloc,gapsum,replication,empty_part`
//! - trace: `run_id,analytic,task,phase,compute_ops,sent,received`, one row per
//!   (phase, task); `sent`/`received` are record counts to/from all peers.
//! - timeline: `run_id,analytic,phase,exchanges,total_compute,max_compute,total_sent,max_sent,max_received`
//! - summary: `run_id,analytic,p,phases,exchanges,total_compute,max_compute,total_sent,max_sent,max_received,result`
//!
//! Wall time is never written, so reruns produce identical files.

use graphlayout_core::analytics::BenchTrace;
use graphlayout_core::metrics::LayoutReport;

use crate::error::{Error, Result};

pub(crate) fn finish(w: csv::Writer<Vec<u8>>) -> Result<String> {
    let bytes = w.into_inner().map_err(|e| Error::Invalid(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn layout_csv(p: usize, rows: &[(String, LayoutReport)]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "label", "p", "v_max", "e_max", "ec", "ec_max", "ec_max_norm", "coloc", "gapsum",
        "replication", "empty_part",
    ])?;
    for (label, r) in rows {
        w.write_record([
            label.clone(),
            p.to_string(),
            r.v_max.to_string(),
            r.e_max.to_string(),
            r.ec.to_string(),
            r.ec_max.to_string(),
            r.ec_max_norm.to_string(),
            r.coloc.to_string(),
            r.gapsum.to_string(),
            r.replication.map(|x| x.to_string()).unwrap_or_default(),
            r.has_empty_part.to_string(),
        ])?;
    }
    finish(w)
}

pub fn trace_csv(run_id: &str, trace: &BenchTrace) -> Result<String> {
    trace.check_conservation()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["run_id", "analytic", "task", "phase", "compute_ops", "sent", "received"])?;
    for (i, ph) in trace.phases.iter().enumerate() {
        for task in 0..trace.p {
            w.write_record([
                run_id.to_string(),
                trace.analytic.name().to_string(),
                task.to_string(),
                i.to_string(),
                ph.compute_ops[task].to_string(),
                ph.sent[task].iter().sum::<u64>().to_string(),
                ph.received[task].iter().sum::<u64>().to_string(),
            ])?;
        }
    }
    finish(w)
}

pub fn timeline_csv(run_id: &str, trace: &BenchTrace) -> Result<String> {
    trace.check_conservation()?;
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "run_id", "analytic", "phase", "exchanges", "total_compute", "max_compute", "total_sent",
        "max_sent", "max_received",
    ])?;
    for (i, ph) in trace.phases.iter().enumerate() {
        let sent: Vec<u64> = ph.sent.iter().map(|r| r.iter().sum()).collect();
        let received: Vec<u64> = ph.received.iter().map(|r| r.iter().sum()).collect();
        w.write_record([
            run_id.to_string(),
            trace.analytic.name().to_string(),
            i.to_string(),
            ph.exchanges.to_string(),
            ph.compute_ops.iter().sum::<u64>().to_string(),
            ph.compute_ops.iter().max().copied().unwrap_or(0).to_string(),
            sent.iter().sum::<u64>().to_string(),
            sent.iter().max().copied().unwrap_or(0).to_string(),
            received.iter().max().copied().unwrap_or(0).to_string(),
        ])?;
    }
    finish(w)
}

/// `result` is a free-form scalar (e.g. the subgraph estimate).
pub fn summary_csv(run_id: &str, trace: &BenchTrace, result: &str) -> Result<String> {
    trace.check_conservation()?;
    let p = trace.p;
    let max_of = |f: &dyn Fn(usize) -> u64| (0..p).map(f).max().unwrap_or(0);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "run_id", "analytic", "p", "phases", "exchanges", "total_compute", "max_compute",
        "total_sent", "max_sent", "max_received", "result",
    ])?;
    w.write_record([
        run_id.to_string(),
        trace.analytic.name().to_string(),
        p.to_string(),
        trace.phases.len().to_string(),
        trace.exchanges().to_string(),
        trace.total_compute().to_string(),
        max_of(&|t| trace.compute_by_task(t)).to_string(),
        trace.total_sent().to_string(),
        max_of(&|t| trace.sent_by_task(t)).to_string(),
        max_of(&|t| trace.received_by_task(t)).to_string(),
        result.to_string(),
    ])?;
    finish(w)
}
