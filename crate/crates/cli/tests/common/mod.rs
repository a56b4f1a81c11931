#![allow(dead_code)]

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use hcrstat::sim::heteroscedastic_series;
use hcrstat::{Field, Line, LoaModel, LoaOptions, Region};

pub fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hcrstat"))
}

pub fn run(args: &[&str], cwd: &Path) -> Output {
    bin().args(args).current_dir(cwd).output().expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

/// Full 21-field panel for 2017 and 2018: three regions drawn from the
/// published band model, world as their sum.
pub fn synthetic_panel_csv(seed: u64) -> String {
    let model = LoaModel::from_coefficients(4.85, 0.07, 1.88, 0.02, 84, LoaOptions::paper_compat());
    let s = heteroscedastic_series(63, Line::new(1.1, 4.2), &model, (5.0, 300.0), seed);
    let round = |v: f64| v.round().max(0.0) as u64;
    let mut out = String::from("year,region,field,count\n");
    let mut world = [[0u64; 21]; 2];
    for (k, region) in Region::PARTS.into_iter().enumerate() {
        for (j, field) in Field::ESI.into_iter().enumerate() {
            let i = 21 * k + j;
            let (a, b) = (round(s.m1()[i]), round(s.m2()[i]));
            world[0][j] += a;
            world[1][j] += b;
            writeln!(out, "2017,{region},{field},{a}").unwrap();
            writeln!(out, "2018,{region},{field},{b}").unwrap();
        }
    }
    for (j, field) in Field::ESI.into_iter().enumerate() {
        writeln!(out, "2017,world,{field},{}", world[0][j]).unwrap();
        writeln!(out, "2018,world,{field},{}", world[1][j]).unwrap();
    }
    out
}

/// Every 2018 count equal to its 2017 count.
pub fn frozen_panel_csv() -> String {
    let mut out = String::from("year,region,field,count\n");
    for region in Region::ALL {
        for (j, field) in Field::ESI.into_iter().enumerate() {
            let c = 10 + 7 * j as u64 + region as u64;
            for year in [2017, 2018] {
                writeln!(out, "{year},{region},{field},{c}").unwrap();
            }
        }
    }
    out
}

pub fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

pub fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}
