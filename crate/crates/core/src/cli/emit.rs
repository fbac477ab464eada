use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::svg::{line_plot, Line};
use crate::error::{Error, Result};
use crate::experiments::{RateCheck, RatioCurve, RealDataTable, Series};
use crate::theory::TheoryRow;

/// Result of any CLI study, ready to be written out.
#[derive(Debug, Clone)]
pub enum StudyOutput {
    Theory(Vec<TheoryRow>),
    RatioCurve(RatioCurve),
    CisCurve(RatioCurve),
    RateCheck(RateCheck),
    RealData(RealDataTable),
}

impl StudyOutput {
    fn is_empty(&self) -> bool {
        match self {
            StudyOutput::Theory(rows) => rows.is_empty(),
            StudyOutput::RatioCurve(c) | StudyOutput::CisCurve(c) => c.rows.is_empty(),
            StudyOutput::RateCheck(r) => r.rows.is_empty(),
            StudyOutput::RealData(t) => t.rows.is_empty(),
        }
    }
}

fn num(x: f64) -> String {
    format!("{x}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(|| "NA".to_string(), num)
}

fn csv_bytes(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let to_err = |e: csv::Error| Error::ConfigInvalid(format!("csv encoding failed: {e}"));
    w.write_record(header).map_err(to_err)?;
    for r in rows {
        w.write_record(&r).map_err(to_err)?;
    }
    w.into_inner().map_err(|e| Error::ConfigInvalid(format!("csv encoding failed: {e}")))
}

pub const THEORY_HEADER: [&str; 7] = ["d", "gamma", "pr", "k_ratio", "cis_ratio_same_k", "cis_ratio_opt_k", "ownn_ratio"];
pub const RATIO_HEADER: [&str; 8] = ["d", "n", "gamma", "gamma_over_d", "metric", "sim_ratio", "stderr", "theory_pr"];
pub const CIS_HEADER: [&str; 8] =
    ["d", "n", "gamma", "gamma_over_d", "k_policy", "sim_cis_ratio", "stderr", "theory_sqrt_pr"];
pub const RATE_HEADER: [&str; 6] = ["d", "gamma", "n", "best_k", "best_mse", "stderr"];
pub const REAL_HEADER: [&str; 6] = ["dataset", "d", "gamma_over_d", "mean_error", "stderr", "best_flag"];

/// The theory sweep as CSV text.
pub fn theory_csv(rows: &[TheoryRow]) -> Result<Vec<u8>> {
    csv_bytes(
        &THEORY_HEADER,
        rows.iter().map(|r| {
            vec![
                r.d.to_string(),
                num(r.gamma),
                num(r.pr),
                num(r.k_ratio),
                num(r.cis_ratio_same_k),
                num(r.cis_ratio_opt_k),
                num(r.ownn_ratio),
            ]
        }),
    )
}

fn curve_csv(c: &RatioCurve, header: &[&str]) -> Result<Vec<u8>> {
    csv_bytes(
        header,
        c.rows.iter().map(|r| {
            vec![
                c.d.to_string(),
                c.n.to_string(),
                num(r.gamma),
                num(r.gamma_over_d),
                r.series.label().to_string(),
                num(r.sim_ratio),
                num(r.stderr),
                opt(r.theory),
            ]
        }),
    )
}

fn curve_svg(c: &RatioCurve, title: &str, series: &[Series]) -> String {
    let mut lines = Vec::new();
    for &s in series {
        let rows: Vec<_> = c.series(s).collect();
        lines.push(Line {
            label: format!("{} simulated", s.label()),
            points: rows.iter().map(|r| (r.gamma_over_d, r.sim_ratio)).collect(),
            dashed: false,
        });
        if rows.iter().any(|r| r.theory.is_some()) {
            lines.push(Line {
                label: format!("{} theory", s.label()),
                points: rows.iter().filter_map(|r| r.theory.map(|t| (r.gamma_over_d, t))).collect(),
                dashed: true,
            });
        }
    }
    line_plot(&format!("{title}, d = {}, n = {}", c.d, c.n), "gamma / d", "ratio to kNN", &lines)
}

/// File name and contents of every output for `out`.
pub fn render(out: &StudyOutput) -> Result<Vec<(String, Vec<u8>)>> {
    if out.is_empty() {
        return Err(Error::EmptyResult);
    }
    let files = match out {
        StudyOutput::Theory(rows) => {
            let d = rows[0].d;
            let svg = line_plot(
                &format!("Asymptotic ratios, d = {d}"),
                "gamma",
                "ratio",
                &[
                    Line { label: "PR".into(), points: rows.iter().map(|r| (r.gamma, r.pr)).collect(), dashed: false },
                    Line {
                        label: "CIS same k".into(),
                        points: rows.iter().map(|r| (r.gamma, r.cis_ratio_same_k)).collect(),
                        dashed: true,
                    },
                ],
            );
            vec![("theory.csv".into(), theory_csv(rows)?), ("theory.svg".into(), svg.into_bytes())]
        }
        StudyOutput::RatioCurve(c) => vec![
            ("ratio_curve.csv".into(), curve_csv(c, &RATIO_HEADER)?),
            ("ratio_curve.svg".into(), curve_svg(c, "Optimal-k risk ratio", &[Series::Mse, Series::Regret]).into_bytes()),
        ],
        StudyOutput::CisCurve(c) => vec![
            ("cis_curve.csv".into(), curve_csv(c, &CIS_HEADER)?),
            (
                "cis_curve.svg".into(),
                curve_svg(c, "CIS ratio", &[Series::CisOptimalK, Series::CisFixedK]).into_bytes(),
            ),
        ],
        StudyOutput::RateCheck(rc) => {
            let csv = csv_bytes(
                &RATE_HEADER,
                rc.rows.iter().map(|r| {
                    vec![
                        r.d.to_string(),
                        num(r.gamma),
                        r.n.to_string(),
                        r.best_k.to_string(),
                        num(r.best_mse),
                        num(r.stderr),
                    ]
                }),
            )?;
            let lines: Vec<Line> = rc
                .slopes
                .iter()
                .map(|s| Line {
                    label: format!("gamma/d = {} (slope {:.3})", s.gamma_over_d, s.slope),
                    points: rc
                        .rows
                        .iter()
                        .filter(|r| r.gamma_over_d == s.gamma_over_d)
                        .map(|r| ((r.n as f64).log2(), r.best_mse.ln()))
                        .collect(),
                    dashed: false,
                })
                .collect();
            let svg = line_plot(&format!("Optimal MSE by n, d = {}", rc.d), "log2 n", "ln MSE", &lines);
            vec![("rate_check.csv".into(), csv), ("rate_check.svg".into(), svg.into_bytes())]
        }
        StudyOutput::RealData(t) => {
            let csv = csv_bytes(
                &REAL_HEADER,
                t.rows.iter().map(|r| {
                    vec![
                        r.dataset.clone(),
                        r.d.to_string(),
                        num(r.gamma_over_d),
                        num(r.mean_error),
                        num(r.stderr),
                        u8::from(r.best_flag).to_string(),
                    ]
                }),
            )?;
            let svg = line_plot(
                &format!("Test error, {}", t.rows[0].dataset),
                "gamma / d",
                "mean test error",
                &[Line {
                    label: "interpolated-NN".into(),
                    points: t.rows.iter().map(|r| (r.gamma_over_d, r.mean_error)).collect(),
                    dashed: false,
                }],
            );
            vec![("real_data.csv".into(), csv), ("real_data.svg".into(), svg.into_bytes())]
        }
    };
    Ok(files)
}

/// Writes `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let tmp = path.with_file_name(format!(".{name}.tmp"));
    let write = || -> std::io::Result<()> {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents)?;
        f.sync_all()?;
        fs::rename(&tmp, path)
    };
    write().map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

/// Renders every output of `out`, plus `resolved_config.json` when a
/// config is given, and writes them into `out_dir`. Nothing is written if
/// rendering fails.
pub fn emit_outputs<C: Serialize>(out: &StudyOutput, out_dir: &Path, config: Option<&C>) -> Result<Vec<PathBuf>> {
    let mut files = render(out)?;
    if let Some(cfg) = config {
        let mut json = serde_json::to_vec_pretty(cfg).map_err(|e| Error::ConfigInvalid(e.to_string()))?;
        json.push(b'\n');
        files.push(("resolved_config.json".into(), json));
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    files
        .into_iter()
        .map(|(name, bytes)| {
            let path = out_dir.join(name);
            write_atomic(&path, &bytes)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::RatioRow;

    fn curve(rows: usize) -> RatioCurve {
        let rows = (0..rows)
            .map(|i| RatioRow {
                gamma: i as f64 * 0.1,
                gamma_over_d: i as f64 * 0.05,
                series: Series::Mse,
                k: 10,
                sim_value: 0.01,
                sim_ratio: 1.0 - i as f64 * 0.01,
                stderr: 0.001,
                theory: (i < 7).then_some(1.0),
            })
            .collect();
        RatioCurve { d: 2, n: 100, rows }
    }

    #[test]
    fn ratio_curve_csv_has_header_and_na() {
        let dir = tempfile::tempdir().unwrap();
        let paths = emit_outputs::<()>(&StudyOutput::RatioCurve(curve(8)), dir.path(), None).unwrap();
        assert_eq!(paths.len(), 2);
        let text = fs::read_to_string(dir.path().join("ratio_curve.csv")).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 9);
        assert_eq!(lines[0], "d,n,gamma,gamma_over_d,metric,sim_ratio,stderr,theory_pr");
        assert!(lines[8].ends_with(",NA"));
        assert!(dir.path().join("ratio_curve.svg").exists());
    }

    #[test]
    fn empty_result_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("out");
        let err = emit_outputs::<()>(&StudyOutput::RatioCurve(curve(0)), &out, None).unwrap_err();
        assert!(matches!(err, Error::EmptyResult));
        assert!(!out.exists());
    }

    #[test]
    fn rerender_is_byte_identical() {
        let a = render(&StudyOutput::CisCurve(curve(5))).unwrap();
        let b = render(&StudyOutput::CisCurve(curve(5))).unwrap();
        assert_eq!(a, b);
    }
}
