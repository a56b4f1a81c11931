//! Acceptance criteria 1-13, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so every line is printed in order; the
//! process exits non-zero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use hcrstat::agreement::{analytic_ci, PAPER_SCALE};
use hcrstat::data::ContingencyTable;
use hcrstat::sim::{band_coverage, heteroscedastic_pairs, normality_rejection_rate, standard_normals, stream_rng};
use hcrstat::stat_tests::{wilcoxon_differences, WilcoxonMethod, WilcoxonOptions};
use hcrstat::{
    chi_squared_test, interchange_threshold, loa_band, paper_reference_data, EdgeSet, Line, LoaModel, LoaOptions,
    NormalityMethod, PairedSeries, Region,
};
use rand::Rng;

const PUBLISHED_LINE: Line = Line { slope: 1.1, intercept: 4.2 };

fn published_model() -> LoaModel {
    LoaModel::from_coefficients(4.85, 0.07, 1.88, 0.02, 84, LoaOptions::paper_compat())
}

fn within(x: f64, target: f64, tol: f64) -> bool {
    (x - target).abs() <= tol
}

fn rel_close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn chi(table: &ContingencyTable) -> (f64, usize, f64) {
    let r = chi_squared_test(table).expect("published table is testable");
    (r.statistic, r.df, r.p_value)
}

fn c1() -> Outcome {
    let (x, df, p) = chi(paper_reference_data().table("table1").unwrap());
    outcome(within(x, 6.07, 0.01) && df == 1 && within(p, 0.014, 0.001), format!("chi2 {x:.4}, df {df}, p {p:.5}"))
}

fn c2() -> Outcome {
    let (x, df, p) = chi(paper_reference_data().table("table2").unwrap());
    outcome(within(x, 2.30, 0.01) && df == 1 && within(p, 0.13, 0.005), format!("chi2 {x:.4}, df {df}, p {p:.5}"))
}

fn c3() -> Outcome {
    let (x, df, p) = chi(paper_reference_data().table("table3").unwrap());
    outcome(
        within(x, 57.56, 0.05) && df == 2 && p < 0.001,
        format!("chi2 {x:.4}, df {df}, p {p:.3e} (table as printed; target 57.56)"),
    )
}

/// `table3` with the Chinese-mainland 2018 cell taken from `table2` (483).
fn c3_supplementary() -> Outcome {
    let printed = paper_reference_data();
    let t = printed.table("table3").unwrap();
    let mut rows = t.rows().to_vec();
    rows[0][0] = 483;
    let table = ContingencyTable::new(rows, t.row_labels().to_vec(), t.col_labels().to_vec()).unwrap();
    let (x, df, p) = chi(&table);
    outcome(within(x, 57.56, 0.05) && df == 2 && p < 0.001, format!("chi2 {x:.4}, df {df}, p {p:.3e} with 483"))
}

fn c4() -> Outcome {
    let g = paper_reference_data().growth();
    let step = g.step(2017, 2018).unwrap();
    let esi = step.growth_without_cross_field() * 100.0;
    // 171% is the 2018 all-category total relative to 2017
    let all = step.ratio_with_cross_field * 100.0;
    outcome(
        within(esi, 14.73, 0.02) && within(all, 171.0, 1.0),
        format!("3538->4059 {esi:.4}%, 6079/3538 {all:.3}%"),
    )
}

fn c5() -> Outcome {
    let s = paper_reference_data().regional_shares();
    let pct = |year: i32, cf: bool, region: Region| {
        s.iter()
            .find(|b| b.year == year && b.include_cross_field == cf)
            .and_then(|b| b.get(region))
            .map(|r| r.percent_2dp())
            .unwrap()
    };
    let got = [
        pct(2017, false, Region::ChineseMainland),
        pct(2018, false, Region::ChineseMainland),
        pct(2017, false, Region::Us),
        pct(2018, false, Region::Us),
        pct(2018, true, Region::Us),
        pct(2017, false, Region::Other),
        pct(2018, false, Region::Other),
        pct(2018, true, Region::Other),
    ];
    let want = [7.09, 6.80, 46.28, 44.69, 43.33, 46.63, 48.51, 48.74];
    let pass = got.iter().zip(&want).all(|(g, w)| (g - w).abs() < 1e-9);
    outcome(pass, format!("{got:?}"))
}

fn c6() -> Outcome {
    let b = loa_band(&published_model(), PUBLISHED_LINE, 100.0).unwrap();
    let pass = within(b.lower, 85.17, 0.005) && within(b.upper, 143.23, 0.005) && within(b.error_term, 9.51, 0.01);
    outcome(pass, format!("[{:.4}, {:.4}], error term {:.4}", b.lower, b.upper, b.error_term))
}

fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn c7() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    for i in 0..1000u64 {
        let mut rng = stream_rng(7, i);
        let n = rng.random_range(5..=200);
        let slope = rng.random_range(-3.0..3.0);
        let noise = rng.random_range(0.5..60.0);
        // counts are nonnegative: m2 stays above 40
        let m1: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..100.0)).collect();
        let m2: Vec<f64> = m1.iter().map(|&x| 400.0 + slope * x + noise * rng.random_range(-1.0..1.0)).collect();
        let p = PairedSeries::from_values(m1.clone(), m2.clone()).unwrap();
        let (Ok(a), Ok(b)) = (hcrstat::fit_wlp(&p, None), hcrstat::fit_wlp(&p.swapped(), None)) else {
            failures.push(format!("instance {i}: fit failed"));
            continue;
        };
        let reciprocal = rel_close(a.slope * b.slope, 1.0);
        let (yx, xy) = (ols_slope(&m1, &m2), 1.0 / ols_slope(&m2, &m1));
        let (lo, hi) = (yx.abs().min(xy.abs()), yx.abs().max(xy.abs()));
        let between = a.slope.abs() >= lo * (1.0 - 1e-9) && a.slope.abs() <= hi * (1.0 + 1e-9);
        let (cx, cy) = (m1.iter().sum::<f64>() / n as f64, m2.iter().sum::<f64>() / n as f64);
        let centroid = rel_close(a.slope * cx + a.intercept, cy);
        let c = 3.7;
        let scaled = PairedSeries::from_values(m1.iter().map(|v| c * v).collect(), m2.iter().map(|v| c * v).collect()).unwrap();
        let s = hcrstat::fit_wlp(&scaled, None).unwrap();
        let equivariant = rel_close(s.slope, a.slope) && rel_close(s.intercept, c * a.intercept);
        if !(reciprocal && between && centroid && equivariant) {
            failures.push(format!(
                "instance {i}: reciprocity {reciprocal}, betweenness {between}, centroid {centroid}, scale {equivariant}"
            ));
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let detail = match failures.first() {
        None => format!("1000 instances, {secs:.2} s"),
        Some(f) => format!("{} failures, first: {f}", failures.len()),
    };
    outcome(failures.is_empty() && secs < 10.0, detail)
}

fn c8() -> Outcome {
    let m1: Vec<f64> = (0..40).map(|i| 3.0 + 2.5 * i as f64).collect();
    let m2: Vec<f64> = m1.iter().map(|v| 1.75 * v + 6.0).collect();
    let fit = hcrstat::fit_wlp(&PairedSeries::from_values(m1, m2).unwrap(), None).unwrap();
    let ci = analytic_ci(&fit, 0.95).unwrap();
    let pass = (fit.slope - 1.75).abs() < 1e-12
        && (fit.intercept - 6.0).abs() < 1e-12
        && ci.slope.width() == 0.0
        && ci.intercept.width() == 0.0;
    outcome(
        pass,
        format!(
            "slope {}, intercept {}, CI widths {} / {}",
            fit.slope,
            fit.intercept,
            ci.slope.width(),
            ci.intercept.width()
        ),
    )
}

fn c9() -> Outcome {
    let six = wilcoxon_differences(&[1.0, 2.0, 3.0, 4.0, 5.0, 6.0], WilcoxonOptions::default()).unwrap();
    let d: Vec<f64> = standard_normals(&mut stream_rng(21, 0), 21).iter().map(|z| z + 0.3).collect();
    let exact = wilcoxon_differences(&d, WilcoxonOptions::default()).unwrap();
    let approx = wilcoxon_differences(
        &d,
        WilcoxonOptions {
            exact_max_n: 0,
            ..WilcoxonOptions::default()
        },
    )
    .unwrap();
    let pass = (six.p_value - 0.03125).abs() < 1e-15
        && six.method == WilcoxonMethod::Exact
        && exact.method == WilcoxonMethod::Exact
        && approx.method == WilcoxonMethod::NormalApprox
        && (exact.p_value - approx.p_value).abs() <= 0.01;
    outcome(
        pass,
        format!("6 pairs p {}, n 21 exact {:.5} vs normal {:.5}", six.p_value, exact.p_value, approx.p_value),
    )
}

fn c10() -> Outcome {
    let start = Instant::now();
    let sw = normality_rejection_rate(NormalityMethod::ShapiroWilk, 21, 10_000, 20_170);
    let ks = normality_rejection_rate(NormalityMethod::KsLilliefors, 84, 10_000, 20_180);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        within(sw, 0.05, 0.01) && within(ks, 0.05, 0.01) && secs < 60.0,
        format!("shapiro-wilk {sw:.4}, lilliefors {ks:.4}, {secs:.2} s"),
    )
}

fn c11() -> Outcome {
    let model = published_model();
    let (m1, m2) = heteroscedastic_pairs(10_000, PUBLISHED_LINE, &model, (0.0, 300.0), &mut stream_rng(11, 0));
    let c = band_coverage(&m1, &m2, PUBLISHED_LINE, &model);
    outcome(within(c, 0.95, 0.02), format!("coverage {c:.4}"))
}

fn c12() -> Outcome {
    let sd = |v: f64| LoaModel::from_coefficients(v / PAPER_SCALE, 0.0, 0.0, 0.0, 50, LoaOptions::paper_compat());
    let tilted = interchange_threshold(&sd(0.1), Line::new(1.2, 0.0), (0.0, 10.0), EdgeSet::Limits).unwrap();
    let identity: usize = EdgeSet::ALL
        .iter()
        .map(|&set| interchange_threshold(&sd(3.0), Line::new(1.0, 0.0), (0.0, 1e4), set).unwrap().len())
        .sum();
    let m = tilted.first().map(|c| c.m1);
    let pass = tilted.len() == 1 && m.is_some_and(|m| (m - 0.98).abs() <= 1e-9) && identity == 0;
    outcome(pass, format!("slope 1.2 crossings {:?}, identity crossings {identity}", tilted.iter().map(|c| c.m1).collect::<Vec<_>>()))
}

fn c13() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    common::write(dir.path(), "panel.csv", &common::synthetic_panel_csv(13));
    let args = |out: &'static str| ["analyze", "--input", "panel.csv", "--seed", "2018", "--resamples", "2000", "--output", out];
    let a = common::run(&args("a.json"), dir.path());
    let b = common::run(&args("b.json"), dir.path());
    if common::code(&a) != 0 || common::code(&b) != 0 {
        return outcome(false, format!("runs exited {} / {}", common::code(&a), common::code(&b)));
    }
    let (x, y) = (std::fs::read(dir.path().join("a.json")).unwrap(), std::fs::read(dir.path().join("b.json")).unwrap());
    outcome(x == y, format!("{} bytes, sha256 {}", x.len(), &hcrstat_cli::sha256_hex(&x)[..16]))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 14] = [
        ("1", c1),
        ("2", c2),
        ("3", c3),
        ("3 (supplementary)", c3_supplementary),
        ("4", c4),
        ("5", c5),
        ("6", c6),
        ("7", c7),
        ("8", c8),
        ("9", c9),
        ("10", c10),
        ("11", c11),
        ("12", c12),
        ("13", c13),
    ];
    let mut failed = Vec::new();
    for (id, check) in criteria {
        let o = check();
        println!("criterion {id}: {} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        if !o.pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("failed: {}", failed.join(", "));
        ExitCode::FAILURE
    }
}
