//! Idle-rate accounting, timing, speedup arithmetic and report serialization.

use serde::{Deserialize, Serialize};

/// One warp-level round: how many of the W lanes carried a task.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchEvent {
    pub engine: EngineTag,
    pub level: u32,
    pub active_lanes: u32,
    pub w: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EngineTag {
    Coarse,
    Fine,
}

/// Per-worker event accumulator. Events are folded into (rounds, idle sum)
/// as they arrive; the full stream is kept only when event dumps are on.
#[derive(Debug, Clone, Default)]
pub struct EventAccum {
    pub rounds: u64,
    pub idle_sum: f64,
    pub record: Option<Vec<BatchEvent>>,
}

impl EventAccum {
    pub fn new(record_events: bool) -> Self {
        EventAccum {
            rounds: 0,
            idle_sum: 0.0,
            record: record_events.then(Vec::new),
        }
    }

    /// One round with `active` occupied lanes out of `w`.
    #[inline]
    pub fn log_round(&mut self, engine: EngineTag, level: usize, active: usize, w: usize) {
        debug_assert!(active <= w);
        self.rounds += 1;
        self.idle_sum += (w - active) as f64 / w as f64;
        if let Some(rec) = &mut self.record {
            rec.push(BatchEvent {
                engine,
                level: level as u32,
                active_lanes: active as u32,
                w: w as u32,
            });
        }
    }

    /// A coarse expansion whose combined local-candidate total may span
    /// several W-wide rounds: full rounds at occupancy w, then the remainder.
    /// A zero-candidate expansion still counts as one empty round, which
    /// recovers the per-expansion idle formula whenever the total fits in w.
    pub fn log_expansion(&mut self, level: usize, total_candidates: usize, w: usize) {
        let full = total_candidates / w;
        let rest = total_candidates % w;
        for _ in 0..full {
            self.log_round(EngineTag::Coarse, level, w, w);
        }
        if rest > 0 || total_candidates == 0 {
            self.log_round(EngineTag::Coarse, level, rest, w);
        }
    }

    pub fn merge(&mut self, other: &EventAccum) {
        self.rounds += other.rounds;
        self.idle_sum += other.idle_sum;
        if let (Some(a), Some(b)) = (&mut self.record, &other.record) {
            a.extend_from_slice(b);
        }
    }

    /// Mean idle fraction, or None for an empty stream.
    pub fn idle_rate(&self) -> Option<f64> {
        (self.rounds > 0).then(|| self.idle_sum / self.rounds as f64)
    }
}

/// Mean idle fraction over an explicit event list.
pub fn idle_rate(events: &[BatchEvent]) -> Option<f64> {
    if events.is_empty() {
        return None;
    }
    let sum: f64 = events
        .iter()
        .map(|e| (e.w - e.active_lanes) as f64 / e.w as f64)
        .sum();
    Some(sum / events.len() as f64)
}

/// Speedup of A over B: mean over queries of t_B / t_A. Queries unsolved by
/// either side (None) are excluded pairwise; the exclusion count is returned.
pub fn speedup(times_a: &[Option<f64>], times_b: &[Option<f64>]) -> (Option<f64>, usize) {
    assert_eq!(times_a.len(), times_b.len());
    let mut sum = 0.0;
    let mut solved = 0usize;
    let mut excluded = 0usize;
    for (&a, &b) in times_a.iter().zip(times_b) {
        match (a, b) {
            (Some(ta), Some(tb)) => {
                // clamp to a nanosecond so a zero-resolution timer cannot divide by zero
                let ta = ta.max(1e-9);
                sum += tb / ta;
                solved += 1;
            }
            _ => excluded += 1,
        }
    }
    ((solved > 0).then(|| sum / solved as f64), excluded)
}

/// Configuration echo carried inside every report.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ConfigEcho {
    pub engine: String,
    pub tau: usize,
    pub w: usize,
    pub sigma: usize,
    pub workers: usize,
    pub steal: bool,
    pub filter: bool,
    pub seed: u64,
    pub mode: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunReport {
    pub match_count: u64,
    pub init_time_s: f64,
    pub search_time_s: f64,
    pub per_worker_busy_s: Vec<f64>,
    /// max / mean of per-worker busy time; 1.0 is perfectly balanced.
    pub busy_imbalance: Option<f64>,
    pub idle_rate: Option<f64>,
    pub round_count: u64,
    pub stack_bytes_fine: u64,
    pub stack_bytes_coarse: u64,
    pub entry_bytes: u64,
    pub pool_size: usize,
    pub pool_depth: usize,
    pub steal_count: u64,
    pub timed_out: bool,
    pub config: ConfigEcho,
}

impl RunReport {
    pub fn compute_imbalance(busy: &[f64]) -> Option<f64> {
        if busy.is_empty() {
            return None;
        }
        let mean: f64 = busy.iter().sum::<f64>() / busy.len() as f64;
        if mean <= 0.0 {
            return None;
        }
        let max = busy.iter().cloned().fold(0.0f64, f64::max);
        Some(max / mean)
    }
}

/// Stable CSV header; changing it breaks downstream plot scripts, so it is
/// pinned by a golden test.
pub const CSV_HEADER: &str = "engine,match_count,init_time_s,search_time_s,busy_imbalance,\
idle_rate,round_count,stack_bytes_fine,stack_bytes_coarse,entry_bytes,pool_size,pool_depth,\
steal_count,timed_out,tau,w,sigma,workers,steal,filter,seed,mode";

pub fn csv_row(r: &RunReport) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_default();
    format!(
        "{},{},{:.6},{:.6},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
        r.config.engine,
        r.match_count,
        r.init_time_s,
        r.search_time_s,
        opt(r.busy_imbalance),
        opt(r.idle_rate),
        r.round_count,
        r.stack_bytes_fine,
        r.stack_bytes_coarse,
        r.entry_bytes,
        r.pool_size,
        r.pool_depth,
        r.steal_count,
        r.timed_out,
        r.config.tau,
        r.config.w,
        r.config.sigma,
        r.config.workers,
        r.config.steal,
        r.config.filter,
        r.config.seed,
        r.config.mode,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

pub fn emit_report(report: &RunReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            serde_json::to_string_pretty(report).expect("report serializes")
        }
        ReportFormat::Csv => format!("{CSV_HEADER}\n{}\n", csv_row(report)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_event_nine_of_32() {
        let e = [BatchEvent {
            engine: EngineTag::Fine,
            level: 2,
            active_lanes: 9,
            w: 32,
        }];
        assert_eq!(idle_rate(&e), Some(23.0 / 32.0));
        assert_eq!(idle_rate(&e), Some(0.71875));
    }

    #[test]
    fn all_full_rounds_zero_idle() {
        let e: Vec<BatchEvent> = (0..10)
            .map(|_| BatchEvent {
                engine: EngineTag::Fine,
                level: 0,
                active_lanes: 32,
                w: 32,
            })
            .collect();
        assert_eq!(idle_rate(&e), Some(0.0));
        assert_eq!(idle_rate(&[]), None);
    }

    #[test]
    fn idle_rate_order_invariant() {
        let mut acc_fwd = EventAccum::new(false);
        let mut acc_rev = EventAccum::new(false);
        let actives = [3, 32, 17, 0, 8];
        for &a in &actives {
            acc_fwd.log_round(EngineTag::Fine, 1, a, 32);
        }
        for &a in actives.iter().rev() {
            acc_rev.log_round(EngineTag::Fine, 1, a, 32);
        }
        assert_eq!(acc_fwd.idle_rate(), acc_rev.idle_rate());
    }

    #[test]
    fn expansion_splits_into_rounds() {
        let mut acc = EventAccum::new(true);
        acc.log_expansion(2, 70, 32); // 32 + 32 + 6
        let rec = acc.record.as_ref().unwrap();
        assert_eq!(rec.len(), 3);
        assert_eq!(rec[0].active_lanes, 32);
        assert_eq!(rec[2].active_lanes, 6);

        let mut empty = EventAccum::new(false);
        empty.log_expansion(1, 0, 32);
        assert_eq!(empty.idle_rate(), Some(1.0));

        // |C| <= W recovers the per-expansion formula exactly
        let mut small = EventAccum::new(false);
        small.log_expansion(1, 9, 32);
        assert_eq!(small.idle_rate(), Some(23.0 / 32.0));
    }

    #[test]
    fn speedup_arithmetic() {
        let ones = vec![Some(1.0); 4];
        assert_eq!(speedup(&ones, &ones), (Some(1.0), 0));

        let a = vec![Some(1.0), Some(3.0)];
        let b = vec![Some(2.0), Some(6.0)];
        assert_eq!(speedup(&a, &b), (Some(2.0), 0));

        let a = vec![Some(1.0), Some(2.0)];
        let b = vec![Some(2.0), Some(8.0)];
        assert_eq!(speedup(&a, &b), (Some(3.0), 0));

        let a = vec![Some(1.0), None];
        let b = vec![Some(4.0), Some(8.0)];
        assert_eq!(speedup(&a, &b), (Some(4.0), 1));
    }

    #[test]
    fn report_json_round_trip() {
        let report = RunReport {
            match_count: 24,
            init_time_s: 0.001,
            search_time_s: 0.5,
            per_worker_busy_s: vec![0.2, 0.3],
            busy_imbalance: Some(1.2),
            idle_rate: Some(0.05),
            round_count: 100,
            stack_bytes_fine: 3072,
            stack_bytes_coarse: 51_200,
            entry_bytes: 24,
            pool_size: 12,
            pool_depth: 2,
            steal_count: 0,
            timed_out: false,
            config: ConfigEcho {
                engine: "fine".into(),
                tau: 1_000_000,
                w: 32,
                sigma: 1,
                workers: 4,
                steal: true,
                filter: true,
                seed: 7,
                mode: "count".into(),
            },
        };
        let json = emit_report(&report, ReportFormat::Json);
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);

        let csv = emit_report(&report, ReportFormat::Csv);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn imbalance() {
        assert_eq!(RunReport::compute_imbalance(&[1.0, 1.0]), Some(1.0));
        assert_eq!(RunReport::compute_imbalance(&[3.0, 1.0]), Some(1.5));
        assert_eq!(RunReport::compute_imbalance(&[]), None);
    }
}
