//! ASCII Gantt rendering of schedule traces.

use std::collections::BTreeMap;

use modeswitch::model::{JobId, Time};
use modeswitch::sim::ScheduleTrace;

const LETTERS: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789";
const MAX_COLUMNS: u64 = 120;

/// Render one trace as one row per processor plus a legend. Each column is
/// `step` ticks wide; a column shows the job occupying the processor at the
/// column's first tick, or '.' when idle.
pub fn render(trace: &ScheduleTrace, m: u32, start: Time, end: Time) -> String {
    let end = end.max(start);
    let span = end - start;
    let step = (span.div_ceil(MAX_COLUMNS)).max(1);
    let columns = span.div_ceil(step);

    let mut legend: BTreeMap<&JobId, char> = BTreeMap::new();
    for slice in &trace.slices {
        let next = legend.len();
        legend
            .entry(&slice.job)
            .or_insert_with(|| LETTERS.get(next).map(|&b| b as char).unwrap_or('?'));
    }

    let mut out = String::new();
    for proc in 1..=m {
        out.push_str(&format!("P{proc:<2}|"));
        for col in 0..columns {
            let t = start + col * step;
            let cell = trace
                .slices
                .iter()
                .find(|s| s.processor == proc && s.start <= t && t < s.end)
                .map(|s| legend[&s.job])
                .unwrap_or('.');
            out.push(cell);
        }
        out.push_str("|\n");
    }

    out.push_str(&format!("   t: {start}..{end}"));
    if step > 1 {
        out.push_str(&format!(" ({step} ticks per column)"));
    }
    out.push('\n');
    let mut entries: Vec<(char, &JobId)> = legend.into_iter().map(|(j, c)| (c, j)).collect();
    entries.sort();
    for (letter, job) in entries {
        out.push_str(&format!("   {letter} = {job}\n"));
    }
    out
}
