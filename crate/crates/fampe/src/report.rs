//! Textual result artifacts: score CSV, the JSON-shaped summary object, and
//! the per-alpha ablation table. All floats use Rust's shortest round-trip
//! formatting, so identical numbers always serialize identically.

use fampe_core::evaluation::AlphaBreakdown;

/// One data row of the score CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRow {
    pub sample_id: String,
    pub alpha: f64,
    pub insertion: f64,
    pub deletion: f64,
    pub cutoff: f64,
}

pub fn score_csv(rows: &[ScoreRow]) -> String {
    let mut out = String::from("sample_id,alpha,insertion,deletion,cutoff\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.sample_id, r.alpha, r.insertion, r.deletion, r.cutoff
        ));
    }
    out
}

/// JSON-shaped dataset summary.
pub fn summary_text(
    method: &str,
    mean_insertion: f64,
    mean_deletion: f64,
    n_samples: usize,
    alpha_grid: &[f64],
) -> String {
    let grid: Vec<String> = alpha_grid.iter().map(|a| a.to_string()).collect();
    format!(
        "{{\n  \"method\": \"{method}\",\n  \"mean_insertion\": {mean_insertion},\n  \
         \"mean_deletion\": {mean_deletion},\n  \"n_samples\": {n_samples},\n  \
         \"alpha_grid\": [{}]\n}}\n",
        grid.join(", ")
    )
}

/// Per-alpha ablation table: one row per grid alpha with mean scores and
/// best-alpha frequency percentages, then the max/min-selected `fampe` row
/// and the all-pass `attexplore` baseline row (frequency columns empty).
pub fn ablation_table(
    breakdown: &AlphaBreakdown,
    fampe_row: (f64, f64),
    baseline_row: (f64, f64),
) -> String {
    let mut out =
        String::from("row,mean_insertion,mean_deletion,insertion_freq_pct,deletion_freq_pct\n");
    for (j, alpha) in breakdown.alphas.iter().enumerate() {
        out.push_str(&format!(
            "{alpha},{},{},{},{}\n",
            breakdown.mean_insertion[j],
            breakdown.mean_deletion[j],
            breakdown.insertion_argmax_freq_pct[j],
            breakdown.deletion_argmin_freq_pct[j]
        ));
    }
    out.push_str(&format!("fampe,{},{},,\n", fampe_row.0, fampe_row.1));
    out.push_str(&format!("attexplore,{},{},,\n", baseline_row.0, baseline_row.1));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_the_documented_header_and_one_line_per_row() {
        let rows = vec![ScoreRow {
            sample_id: "disk_0000".into(),
            alpha: 0.5,
            insertion: 0.75,
            deletion: 0.25,
            cutoff: 4.0,
        }];
        assert_eq!(
            score_csv(&rows),
            "sample_id,alpha,insertion,deletion,cutoff\ndisk_0000,0.5,0.75,0.25,4\n"
        );
    }

    #[test]
    fn summary_contains_all_five_fields() {
        let text = summary_text("fampe", 0.5, 0.125, 3, &[0.0, 0.5, 1.0]);
        for needle in [
            "\"method\": \"fampe\"",
            "\"mean_insertion\": 0.5",
            "\"mean_deletion\": 0.125",
            "\"n_samples\": 3",
            "\"alpha_grid\": [0, 0.5, 1]",
        ] {
            assert!(text.contains(needle), "missing {needle} in {text}");
        }
    }

    #[test]
    fn ablation_table_has_grid_rows_plus_two_method_rows() {
        let breakdown = AlphaBreakdown {
            alphas: vec![0.0, 1.0],
            mean_insertion: vec![0.5, 0.625],
            mean_deletion: vec![0.25, 0.125],
            insertion_argmax_freq_pct: vec![25.0, 75.0],
            deletion_argmin_freq_pct: vec![50.0, 50.0],
            best_insertion_alpha_index: vec![],
            best_deletion_alpha_index: vec![],
        };
        let text = ablation_table(&breakdown, (0.75, 0.1), (0.5, 0.2));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 1 + 2 + 2);
        assert_eq!(lines[1], "0,0.5,0.25,25,50");
        assert_eq!(lines[3], "fampe,0.75,0.1,,");
        assert_eq!(lines[4], "attexplore,0.5,0.2,,");
    }
}
