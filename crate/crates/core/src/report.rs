//! Text renderers: ranked benchmark tables (markdown/CSV/TSV), threshold
//! sweep data with an SVG chart, and isoline grids. Rendering is a pure
//! function of (data, options); numbers are rounded here and nowhere else.

use serde::{Deserialize, Serialize};
use std::fmt::Write;

use crate::aggregate::{keys, MetricSummary, RankedTable};
use crate::landmark::{SweepEntry, SweepSeries};
use crate::model::TaskKind;
use crate::relative::IsolineGrid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    #[serde(alias = "md")]
    Markdown,
    Csv,
    Tsv,
}

/// Formatting knobs shared by every renderer. Percent metrics print with
/// `decimals_pct` digits, σ(HF) with `decimals_sigma`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RenderOptions {
    pub format: TableFormat,
    pub decimals_pct: usize,
    pub decimals_sigma: usize,
    pub mark_best: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            format: TableFormat::Markdown,
            decimals_pct: 2,
            decimals_sigma: 3,
            mark_best: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RenderError {
    #[error("table has no method rows")]
    EmptyTable,
    #[error("sweep series has no data")]
    EmptySeries,
}

/// Human column heading for a metric key. The group-extreme columns change
/// name with the task: accuracy (MGA/mGA) vs success rate (MGS/mGS).
fn metric_label(key: &str, kind: TaskKind) -> String {
    match key {
        keys::ACC => "Acc.".into(),
        keys::SDR => "SDR".into(),
        keys::MAX_GROUP => match kind {
            TaskKind::Classification => "MGA".into(),
            TaskKind::Landmark => "MGS".into(),
        },
        keys::MIN_GROUP => match kind {
            TaskKind::Classification => "mGA".into(),
            TaskKind::Landmark => "mGS".into(),
        },
        keys::DA => "DA".into(),
        keys::DS => "DS".into(),
        keys::DEO => "DEO".into(),
        keys::DEODDS => "DEOdds".into(),
        keys::HF => "HF".into(),
        keys::SIGMA_HF => "σ(HF)".into(),
        keys::DELTA_DTO => "ΔDTO".into(),
        other => other.into(),
    }
}

fn format_summary(key: &str, summary: MetricSummary, opts: &RenderOptions) -> String {
    if key == keys::SIGMA_HF {
        format!(
            "{:.prec$} ± {:.prec$}",
            summary.mean,
            summary.std,
            prec = opts.decimals_sigma
        )
    } else {
        format!("{:.prec$}", summary.mean, prec = opts.decimals_pct)
    }
}

/// Renders a ranked table. Markdown marks the best value per column with
/// `**` and the second-best with `_ _`; CSV/TSV stay unmarked and instead
/// carry `best_in` / `second_best_in` columns listing the metric keys a row
/// wins. The baseline row comes first and is never marked.
pub fn render_table(table: &RankedTable, opts: &RenderOptions) -> Result<String, RenderError> {
    if table.rows.is_empty() || table.columns.is_empty() {
        return Err(RenderError::EmptyTable);
    }
    match opts.format {
        TableFormat::Markdown => Ok(render_table_markdown(table, opts)),
        TableFormat::Csv => Ok(render_table_delimited(table, opts, ',')),
        TableFormat::Tsv => Ok(render_table_delimited(table, opts, '\t')),
    }
}

fn render_table_markdown(table: &RankedTable, opts: &RenderOptions) -> String {
    let mut out = String::new();
    write!(out, "| Method |").expect("string write");
    for column in &table.columns {
        write!(out, " {} |", metric_label(column, table.kind)).expect("string write");
    }
    out.push('\n');
    write!(out, "| --- |").expect("string write");
    for _ in &table.columns {
        out.push_str(" --- |");
    }
    out.push('\n');

    let mut push_row = |method_id: &str, cells: &std::collections::BTreeMap<String, MetricSummary>, index: Option<usize>| {
        write!(out, "| {method_id} |").expect("string write");
        for column in &table.columns {
            let cell = match cells.get(column) {
                Some(summary) => {
                    let text = format_summary(column, *summary, opts);
                    match index {
                        Some(i) if opts.mark_best && table.best.get(column) == Some(&i) => {
                            format!("**{text}**")
                        }
                        Some(i) if opts.mark_best && table.second_best.get(column) == Some(&i) => {
                            format!("_{text}_")
                        }
                        _ => text,
                    }
                }
                None => "-".into(),
            };
            write!(out, " {cell} |").expect("string write");
        }
        out.push('\n');
    };

    push_row(&table.baseline.method_id, &table.baseline.cells, None);
    for (i, row) in table.rows.iter().enumerate() {
        push_row(&row.method_id, &row.cells, Some(i));
    }
    out
}

fn render_table_delimited(table: &RankedTable, opts: &RenderOptions, sep: char) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = vec!["method_id".into()];
    for column in &table.columns {
        header.push(column.clone());
        if column == keys::SIGMA_HF {
            header.push(format!("{}_std", keys::SIGMA_HF));
        }
    }
    if opts.mark_best {
        header.push("best_in".into());
        header.push("second_best_in".into());
    }
    out.push_str(&join(&header, sep));
    out.push('\n');

    let mut push_row = |method_id: &str, cells: &std::collections::BTreeMap<String, MetricSummary>, index: Option<usize>| {
        let mut fields: Vec<String> = vec![method_id.to_string()];
        for column in &table.columns {
            match cells.get(column) {
                Some(summary) => {
                    if column == keys::SIGMA_HF {
                        fields.push(format!("{:.prec$}", summary.mean, prec = opts.decimals_sigma));
                        fields.push(format!("{:.prec$}", summary.std, prec = opts.decimals_sigma));
                    } else {
                        fields.push(format!("{:.prec$}", summary.mean, prec = opts.decimals_pct));
                    }
                }
                None => {
                    fields.push(String::new());
                    if column == keys::SIGMA_HF {
                        fields.push(String::new());
                    }
                }
            }
        }
        if opts.mark_best {
            let wins = |marks: &std::collections::BTreeMap<String, usize>| match index {
                Some(i) => table
                    .columns
                    .iter()
                    .filter(|c| marks.get(*c) == Some(&i))
                    .cloned()
                    .collect::<Vec<_>>()
                    .join(";"),
                None => String::new(),
            };
            fields.push(wins(&table.best));
            fields.push(wins(&table.second_best));
        }
        out.push_str(&join(&fields, sep));
        out.push('\n');
    };

    push_row(&table.baseline.method_id, &table.baseline.cells, None);
    for (i, row) in table.rows.iter().enumerate() {
        push_row(&row.method_id, &row.cells, Some(i));
    }
    out
}

fn join(fields: &[String], sep: char) -> String {
    let mut out = String::new();
    for (i, field) in fields.iter().enumerate() {
        if i > 0 {
            out.push(sep);
        }
        out.push_str(field);
    }
    out
}

/// Metric plotted on the sweep chart's y axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMetric {
    Hf,
    SigmaHf,
    DeltaDto,
    MaxGs,
    MinGs,
    Ds,
}

impl SweepMetric {
    fn label(self) -> &'static str {
        match self {
            SweepMetric::Hf => "HF",
            SweepMetric::SigmaHf => "σ(HF)",
            SweepMetric::DeltaDto => "ΔDTO",
            SweepMetric::MaxGs => "MGS",
            SweepMetric::MinGs => "mGS",
            SweepMetric::Ds => "DS",
        }
    }

    fn extract(self, entry: &SweepEntry) -> f64 {
        match self {
            SweepMetric::Hf => entry.comparison.hf,
            SweepMetric::SigmaHf => entry.comparison.sigma_hf,
            SweepMetric::DeltaDto => entry.comparison.delta_dto,
            SweepMetric::MaxGs => entry.method.max_group.percent,
            SweepMetric::MinGs => entry.method.min_group.percent,
            SweepMetric::Ds => entry.method.ds,
        }
    }
}

/// Flattens a sweep into CSV, one row per (method, threshold).
pub fn render_sweep_csv(series: &SweepSeries, opts: &RenderOptions) -> Result<String, RenderError> {
    if series.curves.is_empty() || series.thresholds.is_empty() {
        return Err(RenderError::EmptySeries);
    }
    let mut out = String::from("method_id,threshold,mgs,m_gs,ds,hf,sigma_hf,delta_dto\n");
    for curve in &series.curves {
        for entry in &curve.entries {
            writeln!(
                out,
                "{},{},{:.p$},{:.p$},{:.p$},{:.p$},{:.s$},{:.p$}",
                curve.method_id,
                entry.threshold,
                entry.method.max_group.percent,
                entry.method.min_group.percent,
                entry.method.ds,
                entry.comparison.hf,
                entry.comparison.sigma_hf,
                entry.comparison.delta_dto,
                p = opts.decimals_pct,
                s = opts.decimals_sigma,
            )
            .expect("string write");
        }
    }
    Ok(out)
}

const SVG_WIDTH: f64 = 640.0;
const SVG_HEIGHT: f64 = 400.0;
const MARGIN_LEFT: f64 = 64.0;
const MARGIN_RIGHT: f64 = 150.0;
const MARGIN_TOP: f64 = 32.0;
const MARGIN_BOTTOM: f64 = 48.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
];

/// Draws one polyline per method over (threshold, metric). Output is plain
/// SVG text and is byte-identical across renders of the same input.
pub fn render_sweep_svg(
    series: &SweepSeries,
    metric: SweepMetric,
    _opts: &RenderOptions,
) -> Result<String, RenderError> {
    if series.curves.is_empty() || series.thresholds.is_empty() {
        return Err(RenderError::EmptySeries);
    }

    let (t0, t1) = (series.thresholds[0], *series.thresholds.last().expect("non-empty"));
    let mut v0 = f64::INFINITY;
    let mut v1 = f64::NEG_INFINITY;
    for curve in &series.curves {
        for entry in &curve.entries {
            let v = metric.extract(entry);
            v0 = v0.min(v);
            v1 = v1.max(v);
        }
    }
    // Pad flat or thin ranges so the polyline stays inside the frame.
    if v1 - v0 < 1e-9 {
        v0 -= 1.0;
        v1 += 1.0;
    }

    let plot_w = SVG_WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
    let plot_h = SVG_HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
    let x = |t: f64| {
        if t1 > t0 {
            MARGIN_LEFT + (t - t0) / (t1 - t0) * plot_w
        } else {
            MARGIN_LEFT + plot_w / 2.0
        }
    };
    let y = |v: f64| MARGIN_TOP + (1.0 - (v - v0) / (v1 - v0)) * plot_h;

    let mut svg = String::new();
    write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" viewBox="0 0 {SVG_WIDTH} {SVG_HEIGHT}">"#
    )
    .expect("string write");
    svg.push('\n');
    write!(
        svg,
        r#"<rect x="0" y="0" width="{SVG_WIDTH}" height="{SVG_HEIGHT}" fill="white"/>"#
    )
    .expect("string write");
    svg.push('\n');

    // Frame.
    write!(
        svg,
        r#"<rect x="{MARGIN_LEFT}" y="{MARGIN_TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="dimgray" stroke-width="1"/>"#
    )
    .expect("string write");
    svg.push('\n');

    // Ticks: five per axis, evenly spaced over the data range.
    for i in 0..5 {
        let f = i as f64 / 4.0;
        let tx = t0 + f * (t1 - t0);
        let vx = v0 + f * (v1 - v0);
        let sx = x(tx);
        let sy = y(vx);
        write!(
            svg,
            r#"<line x1="{sx:.2}" y1="{top}" x2="{sx:.2}" y2="{bottom}" stroke="gainsboro" stroke-width="1"/>"#,
            top = MARGIN_TOP,
            bottom = MARGIN_TOP + plot_h
        )
        .expect("string write");
        svg.push('\n');
        write!(
            svg,
            r#"<text x="{sx:.2}" y="{ly:.2}" font-size="11" text-anchor="middle" fill="dimgray">{tx:.3}</text>"#,
            ly = MARGIN_TOP + plot_h + 16.0
        )
        .expect("string write");
        svg.push('\n');
        write!(
            svg,
            r#"<line x1="{left}" y1="{sy:.2}" x2="{right}" y2="{sy:.2}" stroke="gainsboro" stroke-width="1"/>"#,
            left = MARGIN_LEFT,
            right = MARGIN_LEFT + plot_w
        )
        .expect("string write");
        svg.push('\n');
        write!(
            svg,
            r#"<text x="{lx:.2}" y="{ty:.2}" font-size="11" text-anchor="end" fill="dimgray">{vx:.2}</text>"#,
            lx = MARGIN_LEFT - 6.0,
            ty = sy + 4.0
        )
        .expect("string write");
        svg.push('\n');
    }

    // Axis titles.
    write!(
        svg,
        r#"<text x="{cx:.2}" y="{cy:.2}" font-size="12" text-anchor="middle" fill="black">NME threshold</text>"#,
        cx = MARGIN_LEFT + plot_w / 2.0,
        cy = SVG_HEIGHT - 10.0
    )
    .expect("string write");
    svg.push('\n');
    write!(
        svg,
        r#"<text x="14" y="{cy:.2}" font-size="12" text-anchor="middle" fill="black" transform="rotate(-90 14 {cy:.2})">{label}</text>"#,
        cy = MARGIN_TOP + plot_h / 2.0,
        label = metric.label()
    )
    .expect("string write");
    svg.push('\n');

    // One polyline per method, plus a legend swatch.
    for (i, curve) in series.curves.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let mut points = String::new();
        for entry in &curve.entries {
            if !points.is_empty() {
                points.push(' ');
            }
            write!(points, "{:.2},{:.2}", x(entry.threshold), y(metric.extract(entry)))
                .expect("string write");
        }
        write!(
            svg,
            r#"<polyline points="{points}" fill="none" stroke="{color}" stroke-width="2"/>"#
        )
        .expect("string write");
        svg.push('\n');

        let ly = MARGIN_TOP + 14.0 + 18.0 * i as f64;
        let lx = SVG_WIDTH - MARGIN_RIGHT + 12.0;
        write!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{x2}" y2="{ly}" stroke="{color}" stroke-width="2"/>"#,
            x2 = lx + 18.0
        )
        .expect("string write");
        svg.push('\n');
        write!(
            svg,
            r#"<text x="{tx}" y="{ty}" font-size="11" fill="black">{id}</text>"#,
            tx = lx + 24.0,
            ty = ly + 4.0,
            id = curve.method_id
        )
        .expect("string write");
        svg.push('\n');
    }

    svg.push_str("</svg>\n");
    Ok(svg)
}

/// Flattens an isoline grid to CSV. Infeasible cells (min > max) are
/// omitted rather than emitted as blanks.
pub fn render_isolines_csv(grid: &IsolineGrid) -> String {
    let mut out = String::from("min_group,max_group,hf\n");
    for cell in &grid.cells {
        if let Some(hf) = cell.hf {
            writeln!(out, "{:.4},{:.4},{:.4}", cell.min_group, cell.max_group, hf)
                .expect("string write");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aggregate::{RankedRow, RankedTable};
    use crate::landmark::{threshold_sweep, SweepCurve, SweepSeries};
    use crate::model::{LandmarkRecord, Normalization, Point, Split};
    use crate::relative::{hf_isoline_grid, PerformancePoint};
    use std::collections::BTreeMap;

    fn cells(pairs: &[(&str, f64, f64)]) -> BTreeMap<String, MetricSummary> {
        pairs
            .iter()
            .map(|(k, mean, std)| ((*k).to_string(), MetricSummary { mean: *mean, std: *std }))
            .collect()
    }

    fn fixture_table() -> RankedTable {
        RankedTable {
            kind: TaskKind::Classification,
            key: "sigma_hf".into(),
            columns: vec!["acc".into(), "delta_dto".into(), "sigma_hf".into()],
            baseline: RankedRow {
                method_id: "base".into(),
                cells: cells(&[("acc", 75.25, 0.5), ("delta_dto", 0.0, 0.0), ("sigma_hf", 0.5, 0.0)]),
            },
            rows: vec![
                RankedRow {
                    method_id: "afn".into(),
                    cells: cells(&[("acc", 80.5, 1.0), ("delta_dto", 4.29, 0.0), ("sigma_hf", 0.744, 0.039)]),
                },
                RankedRow {
                    method_id: "dann".into(),
                    cells: cells(&[("acc", 78.25, 1.2), ("delta_dto", 2.5, 0.0), ("sigma_hf", 0.7, 0.02)]),
                },
            ],
            best: [("acc", 0), ("delta_dto", 0), ("sigma_hf", 0)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            second_best: [("acc", 1), ("delta_dto", 1), ("sigma_hf", 1)]
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
        }
    }

    #[test]
    fn markdown_table_marks_best_and_second_best() {
        let text = render_table(&fixture_table(), &RenderOptions::default()).unwrap();
        let expected = "\
| Method | Acc. | ΔDTO | σ(HF) |
| --- | --- | --- | --- |
| base | 75.25 | 0.00 | 0.500 ± 0.000 |
| afn | **80.50** | **4.29** | **0.744 ± 0.039** |
| dann | _78.25_ | _2.50_ | _0.700 ± 0.020_ |
";
        assert_eq!(text, expected);
    }

    #[test]
    fn csv_table_uses_marker_columns_instead_of_typography() {
        let opts = RenderOptions { format: TableFormat::Csv, ..RenderOptions::default() };
        let text = render_table(&fixture_table(), &opts).unwrap();
        let expected = "\
method_id,acc,delta_dto,sigma_hf,sigma_hf_std,best_in,second_best_in
base,75.25,0.00,0.500,0.000,,
afn,80.50,4.29,0.744,0.039,acc;delta_dto;sigma_hf,
dann,78.25,2.50,0.700,0.020,,acc;delta_dto;sigma_hf
";
        assert_eq!(text, expected);
    }

    #[test]
    fn tsv_table_switches_the_separator() {
        let opts = RenderOptions { format: TableFormat::Tsv, ..RenderOptions::default() };
        let text = render_table(&fixture_table(), &opts).unwrap();
        assert!(text.starts_with("method_id\tacc\tdelta_dto\tsigma_hf\tsigma_hf_std"));
    }

    #[test]
    fn mark_best_off_renders_plain_cells() {
        let opts = RenderOptions { mark_best: false, ..RenderOptions::default() };
        let text = render_table(&fixture_table(), &opts).unwrap();
        assert!(!text.contains("**"));
        assert!(text.contains("| 80.50 |"));
    }

    #[test]
    fn landmark_tables_relabel_the_extreme_columns() {
        let mut table = fixture_table();
        table.kind = TaskKind::Landmark;
        table.columns = vec!["sdr".into(), "max_group".into(), "min_group".into()];
        let text = render_table(&table, &RenderOptions::default()).unwrap();
        assert!(text.starts_with("| Method | SDR | MGS | mGS |"));
    }

    #[test]
    fn empty_table_is_an_error() {
        let mut table = fixture_table();
        table.rows.clear();
        assert_eq!(
            render_table(&table, &RenderOptions::default()),
            Err(RenderError::EmptyTable)
        );
    }

    fn unit_record(id: &str, group: &str, err: f64) -> LandmarkRecord {
        LandmarkRecord {
            sample_id: id.into(),
            group: group.into(),
            pred: vec![Point::new(err, 0.0)],
            gt: vec![Point::new(0.0, 0.0)],
            norm: None,
            run_id: "r0".into(),
            split: Split::Test,
            checkpoint: None,
        }
    }

    fn fixture_series() -> SweepSeries {
        let baseline = vec![
            unit_record("b0", "dark", 0.02),
            unit_record("b1", "dark", 0.09),
            unit_record("b2", "light", 0.01),
            unit_record("b3", "light", 0.03),
        ];
        let method = vec![
            unit_record("m0", "dark", 0.01),
            unit_record("m1", "dark", 0.045),
            unit_record("m2", "light", 0.005),
            unit_record("m3", "light", 0.015),
        ];
        let grid = vec![0.04, 0.08, 0.13];
        let entries =
            threshold_sweep(&baseline, &method, &grid, &Normalization::Fixed(1.0)).unwrap();
        SweepSeries::new(grid, vec![SweepCurve { method_id: "afn".into(), entries }]).unwrap()
    }

    #[test]
    fn sweep_csv_has_the_fixed_header_and_one_row_per_threshold() {
        let text = render_sweep_csv(&fixture_series(), &RenderOptions::default()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "method_id,threshold,mgs,m_gs,ds,hf,sigma_hf,delta_dto");
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("afn,0.04,"));
        assert!(lines[3].starts_with("afn,0.13,100.00,100.00,0.00,"));
    }

    #[test]
    fn sweep_svg_is_deterministic_and_draws_every_method() {
        let series = fixture_series();
        let opts = RenderOptions::default();
        let a = render_sweep_svg(&series, SweepMetric::Hf, &opts).unwrap();
        let b = render_sweep_svg(&series, SweepMetric::Hf, &opts).unwrap();
        assert_eq!(a, b);
        assert!(a.starts_with("<svg"));
        assert!(a.ends_with("</svg>\n"));
        assert_eq!(a.matches("<polyline").count(), 1);
        assert!(a.contains(">afn</text>"));
        assert!(a.contains("NME threshold"));
    }

    #[test]
    fn empty_series_is_an_error() {
        let empty = SweepSeries { thresholds: vec![], curves: vec![] };
        assert_eq!(
            render_sweep_csv(&empty, &RenderOptions::default()),
            Err(RenderError::EmptySeries)
        );
        assert_eq!(
            render_sweep_svg(&empty, SweepMetric::Hf, &RenderOptions::default()),
            Err(RenderError::EmptySeries)
        );
    }

    #[test]
    fn isoline_csv_lists_only_feasible_cells() {
        let baseline = PerformancePoint::new(50.0, 100.0).unwrap();
        let grid = hf_isoline_grid(baseline, 3).unwrap();
        let text = render_isolines_csv(&grid);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "min_group,max_group,hf");
        assert_eq!(lines.len(), 7); // header + 6 feasible cells
        assert!(lines.contains(&"0.0000,0.0000,0.0000"));
        assert!(lines.contains(&"50.0000,100.0000,50.0000"));
        assert!(lines.contains(&"100.0000,100.0000,60.0000"));
        assert!(!text.contains("100.0000,0.0000"));
    }
}
