use std::fmt::Write;

use super::BenchResult;

pub const CSV_HEADER: &str =
    "algo,threads,range,keys,mix,run,ops,ops_per_sec,median_ops_per_sec,internal_nodes,leaf_nodes,empty_nodes,seed";

/// Renders results as CSV: the header, one row per run and one `summary`
/// row per result carrying the measured runs' total ops and median counts.
pub fn emit_csv(results: &[BenchResult]) -> String {
    let mut out = String::new();
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in results {
        let s = &r.spec;
        let prefix = format!("{},{},{},{},{}", s.algo, s.threads, s.range, s.keys, s.mix);
        for run in &r.runs {
            let _ = writeln!(
                out,
                "{prefix},{},{},{:.3},{:.3},{},{},{},{}",
                run.run,
                run.ops,
                run.ops_per_sec,
                r.median_ops_per_sec,
                run.counts.internal,
                run.counts.leaf,
                run.counts.empty,
                s.seed
            );
        }
        let c = r.median_counts();
        let ops: u64 = r.measured().iter().map(|x| x.ops).sum();
        let _ = writeln!(
            out,
            "{prefix},summary,{ops},{:.3},{:.3},{},{},{},{}",
            r.median_ops_per_sec, r.median_ops_per_sec, c.internal, c.leaf, c.empty, s.seed
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use std::time::Duration;

    use super::*;
    use crate::bench::{RunResult, WorkloadSpec};
    use crate::tree::NodeCounts;
    use crate::variants::Variant;

    fn result(runs: usize) -> BenchResult {
        let mut spec = WorkloadSpec::new(Variant::QbO, 1000.5, 100, "50:50:0:0".parse().unwrap());
        spec.runs = runs;
        spec.warmup = 0;
        BenchResult {
            runs: (1..=runs)
                .map(|run| RunResult {
                    run,
                    ops: 1000,
                    elapsed: Duration::from_millis(500),
                    ops_per_sec: 2000.0,
                    counts: NodeCounts {
                        internal: 5,
                        leaf: 1,
                        empty: 15,
                    },
                })
                .collect(),
            median_ops_per_sec: 2000.0,
            spec,
        }
    }

    #[test]
    fn one_row_per_run_plus_summary() {
        assert_eq!(emit_csv(&[result(1)]).lines().count(), 1 + 2);
        assert_eq!(emit_csv(&[result(8)]).lines().count(), 1 + 9);
    }

    #[test]
    fn rows_are_plain_ascii_numbers() {
        let csv = emit_csv(&[result(1)]);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(
            lines.next(),
            Some("qb-o,1,1000.5,100,50:50:0:0,1,1000,2000.000,2000.000,5,1,15,1")
        );
        assert_eq!(
            lines.next(),
            Some("qb-o,1,1000.5,100,50:50:0:0,summary,1000,2000.000,2000.000,5,1,15,1")
        );
        assert!(!csv.contains('\r'));
        for line in csv.lines() {
            assert_eq!(line.split(',').count(), 13);
        }
    }
}
