//! CSV emission with fixed float formatting so identical runs produce
//! byte-identical outputs.

use brenier::verify::CheckReport;
use std::fmt::Write as _;

/// C-style `%.12e`: 12 fractional digits, two-digit signed exponent.
pub fn fmt_e(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let s = format!("{x:.12e}");
    let (mantissa, exp) = s.split_once('e').expect("exponential format");
    let e: i32 = exp.parse().expect("exponent");
    let sign = if e < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", e.abs())
}

/// One CSV row per report instance, with the auxiliary pairs flattened
/// into a `key=value;...` column.
pub fn reports_to_csv(reports: &[CheckReport]) -> String {
    let mut out = String::from("check,instance,lhs,rhs,ratio,tolerance,pass,aux,inputs\n");
    for r in reports {
        let mut aux = String::new();
        for (i, (k, v)) in r.aux.iter().enumerate() {
            if i > 0 {
                aux.push(';');
            }
            let _ = write!(aux, "{k}={}", fmt_e(*v));
        }
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.check,
            r.instance,
            fmt_e(r.lhs),
            fmt_e(r.rhs),
            fmt_e(r.ratio),
            fmt_e(r.tolerance),
            r.pass,
            aux,
            r.inputs
        );
    }
    out
}

/// Per-check aggregation: instance count, failures, worst finite ratio.
pub fn summary_csv(reports: &[CheckReport]) -> String {
    let mut order: Vec<&str> = Vec::new();
    for r in reports {
        if !order.contains(&r.check.as_str()) {
            order.push(&r.check);
        }
    }
    let mut out = String::from("check,instances,failures,max_ratio\n");
    for check in order {
        let rows: Vec<&CheckReport> = reports.iter().filter(|r| r.check == check).collect();
        let failures = rows.iter().filter(|r| !r.pass).count();
        let max_ratio = rows
            .iter()
            .filter(|r| r.ratio.is_finite())
            .map(|r| r.ratio)
            .fold(f64::NEG_INFINITY, f64::max);
        let _ = writeln!(
            out,
            "{},{},{},{}",
            check,
            rows.len(),
            failures,
            if max_ratio.is_finite() {
                fmt_e(max_ratio)
            } else {
                "nan".into()
            }
        );
    }
    out
}

/// Human-readable pass/fail table printed after `verify`.
pub fn summary_table(reports: &[CheckReport]) -> String {
    let mut order: Vec<&str> = Vec::new();
    for r in reports {
        if !order.contains(&r.check.as_str()) {
            order.push(&r.check);
        }
    }
    let mut out = String::new();
    for check in order {
        let rows: Vec<&CheckReport> = reports.iter().filter(|r| r.check == check).collect();
        let failures = rows.iter().filter(|r| !r.pass).count();
        let status = if failures == 0 { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "{status}  {check:<28} {:>5} instances, {failures} failures",
            rows.len()
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e_format_is_c_style() {
        assert_eq!(fmt_e(1.0), "1.000000000000e+00");
        assert_eq!(fmt_e(-0.001234), "-1.234000000000e-03");
        assert_eq!(fmt_e(6.022e23), "6.022000000000e+23");
        assert_eq!(fmt_e(f64::NAN), "nan");
        assert_eq!(fmt_e(0.0), "0.000000000000e+00");
    }

    #[test]
    fn csv_layout() {
        let r = CheckReport::ratio_check("demo", "i=0", 1.0, 2.0, 1e-6, vec![("k".into(), 3.0)], "seed=7");
        let csv = reports_to_csv(&[r]);
        assert!(csv.starts_with("check,instance,"));
        assert!(csv.contains("demo,i=0,1.000000000000e+00,2.000000000000e+00"));
        assert!(csv.contains("k=3.000000000000e+00"));
    }
}
