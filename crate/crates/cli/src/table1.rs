//! Reproduction of the four-measure table over the ten canonical examples.

use rayon::prelude::*;
use synergy_core::{build_example, Error, ExampleId, OptimizerConfig};

use crate::report::{measure, InputIdentity, MeasureReport};
use crate::tsv::dump_tsv;

/// Tolerance on `S_max`, WMS, `ΔI` and point values of `S_VK`.
pub const MEASURE_TOLERANCE: f64 = 1e-3;
/// Lowest accepted lower end of the `S_VK` interval where one is reported.
pub const INTERVAL_LOWER: f64 = 0.2704;
pub const INTERVAL_LOWER_SLACK: f64 = 1e-4;
pub const INTERVAL_UPPER: f64 = 0.5;
pub const INTERVAL_UPPER_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExpectedSynergy {
    Point(f64),
    /// `[INTERVAL_LOWER, INTERVAL_UPPER]`.
    Interval,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Expected {
    pub id: ExampleId,
    pub s_max: f64,
    pub wms: f64,
    pub delta_i: f64,
    pub s_vk: ExpectedSynergy,
}

const fn row(id: ExampleId, s_max: f64, wms: f64, delta_i: f64, s_vk: ExpectedSynergy) -> Expected {
    Expected {
        id,
        s_max,
        wms,
        delta_i,
        s_vk,
    }
}

use ExpectedSynergy::{Interval, Point};

pub const EXPECTED: [Expected; 10] = [
    row(ExampleId::Rdn, 0.0, -1.0, 0.0, Point(0.0)),
    row(ExampleId::Unq, 1.0, 0.0, 0.0, Point(0.0)),
    row(ExampleId::Xor, 1.0, 1.0, 1.0, Point(1.0)),
    row(ExampleId::XorDuplicate, 1.0, 1.0, 1.0, Point(1.0)),
    row(ExampleId::XorLoses, 0.0, 0.0, 0.0, Point(0.0)),
    row(ExampleId::RdnXor, 1.0, 0.0, 1.0, Point(1.0)),
    row(ExampleId::And, 0.5, 0.189, 0.104, Interval),
    row(ExampleId::RdnUnqXor, 2.0, 0.0, 1.0, Point(1.0)),
    row(ExampleId::AndDuplicate, 0.5, -0.123, 0.038, Interval),
    row(ExampleId::XorMultiCoal, 1.0, 1.0, 1.0, Point(1.0)),
];

pub fn expected(id: ExampleId) -> &'static Expected {
    EXPECTED.iter().find(|e| e.id == id).expect("every example has a row")
}

pub fn example_report(id: ExampleId, cfg: &OptimizerConfig) -> Result<MeasureReport, Error> {
    let table = build_example(id);
    let identity = InputIdentity::new("example", id.name(), dump_tsv(&table).as_bytes());
    measure(&table, identity, cfg, false)
}

/// All ten reports in canonical order, evaluated in parallel.
pub fn run(cfg: &OptimizerConfig) -> Vec<(ExampleId, Result<MeasureReport, Error>)> {
    ExampleId::ALL
        .par_iter()
        .map(|&id| (id, example_report(id, cfg)))
        .collect()
}

/// Every disagreement between a report and the expected row, one message each.
pub fn check(id: ExampleId, report: &MeasureReport) -> Vec<String> {
    let e = expected(id);
    let mut out = Vec::new();
    for (label, got, want) in [
        ("S_max", report.s_max.get(), e.s_max),
        ("WMS", report.wms.get(), e.wms),
        ("ΔI", report.delta_i.get(), e.delta_i),
    ] {
        if (got - want).abs() > MEASURE_TOLERANCE {
            out.push(format!("{id}: {label} = {got:.6}, expected {want}"));
        }
    }
    let s = &report.s_vk;
    match e.s_vk {
        Point(want) => {
            if (s.best.get() - want).abs() > MEASURE_TOLERANCE {
                out.push(format!("{id}: S_VK = {:.6}, expected {want}", s.best.get()));
            }
        }
        Interval => {
            let (lo, best, hi) = (s.lower.get(), s.best.get(), s.upper.get());
            if lo < INTERVAL_LOWER - INTERVAL_LOWER_SLACK {
                out.push(format!("{id}: S_VK lower end {lo:.6} below {INTERVAL_LOWER}"));
            }
            if (hi - INTERVAL_UPPER).abs() > INTERVAL_UPPER_SLACK {
                out.push(format!("{id}: S_VK upper end {hi:.6}, expected {INTERVAL_UPPER}"));
            }
            if !(lo <= best && best <= hi + INTERVAL_UPPER_SLACK) {
                out.push(format!("{id}: S_VK best {best:.6} outside [{lo:.6}, {hi:.6}]"));
            }
        }
    }
    out
}

fn cell(v: f64) -> String {
    format!("{v:>10.6}")
}

/// One header line and one line per example; interval rows show `[lower, upper]`.
pub fn render(results: &[(ExampleId, Result<MeasureReport, Error>)]) -> String {
    let mut out = format!(
        "{:<14}{:>10}{:>10}{:>10}  {}\n",
        "example", "S_max", "WMS", "ΔI", "S_VK"
    );
    for (id, result) in results {
        match result {
            Ok(r) => {
                let synergy = match expected(*id).s_vk {
                    Interval => format!(
                        "[{:.6}, {:.6}] best {:.6}",
                        r.s_vk.lower.get(),
                        r.s_vk.upper.get(),
                        r.s_vk.best.get()
                    ),
                    Point(_) => format!("{:.6}", r.s_vk.best.get()),
                };
                out.push_str(&format!(
                    "{:<14}{}{}{}  {}\n",
                    id.name(),
                    cell(r.s_max.get()),
                    cell(r.wms.get()),
                    cell(r.delta_i.get()),
                    synergy
                ));
            }
            Err(e) => out.push_str(&format!("{:<14}error: {e}\n", id.name())),
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expected_rows_follow_canonical_order() {
        let ids: Vec<ExampleId> = EXPECTED.iter().map(|e| e.id).collect();
        assert_eq!(ids, ExampleId::ALL);
    }

    #[test]
    fn sign_fault_in_wms_is_caught_and_named() {
        let mut r = example_report(ExampleId::Rdn, &OptimizerConfig::default()).unwrap();
        assert!(check(ExampleId::Rdn, &r).is_empty());
        r.wms = synergy_core::Bits::new(-r.wms.get());
        let failures = check(ExampleId::Rdn, &r);
        assert_eq!(failures.len(), 1);
        assert!(failures[0].starts_with("Rdn: WMS"), "{failures:?}");
    }

    #[test]
    fn interval_rules() {
        let mut r = example_report(ExampleId::And, &OptimizerConfig::default()).unwrap();
        assert!(check(ExampleId::And, &r).is_empty(), "{:?}", check(ExampleId::And, &r));
        r.s_vk.lower = synergy_core::Bits::new(0.2);
        assert_eq!(check(ExampleId::And, &r).len(), 1);
    }
}
