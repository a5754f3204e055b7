//! Command implementations behind the `minfilt` binary.
//!
//! Each command returns its full output as a string so the binary only has
//! to route it and pick the exit code.

use std::fmt::{self, Write as _};

use minfilt::cost::{PublishedRow, PUBLISHED_TABLE};
use minfilt::verify::{check_equivalence, DEFAULT_RANGE};
use minfilt::{
    count_naive, count_proposed, fir_filter, generate_plan, naive_fir, precompute_diagonal, savings_report,
    validate_plan, KernelPlan, Signal, Taps,
};

pub const PUBLISHED_SIZES: [usize; 5] = [3, 5, 7, 9, 11];

/// A usage or input problem; the binary exits with status 2.
#[derive(Debug)]
pub struct InputError(pub String);

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for InputError {}

impl From<minfilt::Error> for InputError {
    fn from(e: minfilt::Error) -> Self {
        InputError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, InputError>;

fn check_m(m: usize) -> Result<()> {
    if m == 0 {
        return Err(InputError("tap count must be at least 1".into()));
    }
    Ok(())
}

pub fn cmd_plan(m: usize) -> Result<String> {
    check_m(m)?;
    Ok(generate_plan(m)?.to_json() + "\n")
}

pub struct VerifyOutput {
    pub text: String,
    pub passed: bool,
}

/// Oracle equivalence for each size, or for a single plan loaded from a file.
pub fn cmd_verify(m_list: &[usize], trials: usize, seed: u64, plan_file: Option<&str>) -> Result<VerifyOutput> {
    if trials == 0 {
        return Err(InputError("--trials must be at least 1".into()));
    }
    let plans: Vec<KernelPlan> = match plan_file {
        Some(json) => {
            let plan = KernelPlan::from_json(json)?;
            if !m_list.is_empty() && m_list != [plan.m()] {
                return Err(InputError(format!(
                    "plan file is for m={}, but -m asks for {m_list:?}",
                    plan.m()
                )));
            }
            vec![plan]
        }
        None => {
            let sizes = if m_list.is_empty() {
                &PUBLISHED_SIZES[..]
            } else {
                m_list
            };
            for &m in sizes {
                check_m(m)?;
            }
            sizes
                .iter()
                .map(|&m| generate_plan(m))
                .collect::<minfilt::Result<_>>()?
        }
    };

    let mut text = String::new();
    let mut passed = true;
    for plan in &plans {
        let m = plan.m();
        let report = validate_plan(plan);
        for v in &report.violations {
            passed = false;
            writeln!(text, "m={m}\tplan=invalid\t{v}").unwrap();
        }
        // a plan with broken dimensions cannot be executed
        if report
            .violations
            .iter()
            .any(|v| matches!(v, minfilt::Violation::Dimension { .. }))
            || m == 0
        {
            continue;
        }
        let r = check_equivalence(plan, trials, seed, DEFAULT_RANGE)?;
        passed &= r.passed();
        let verdict = |failures: usize| if failures == 0 { "pass" } else { "FAIL" };
        writeln!(
            text,
            "m={m}\texact={}\tfloat={}\tmax_rel_err={:e}\ttrials={trials}",
            verdict(r.exact_failures),
            verdict(r.float_failures),
            r.max_rel_err
        )
        .unwrap();
        if let Some(f) = r.first_failure {
            writeln!(text, "m={m}\tidentity violation: {f}").unwrap();
        }
    }
    text.push_str(if passed { "all pass\n" } else { "FAILED\n" });
    Ok(VerifyOutput { text, passed })
}

/// Numbers, one per line; blank lines and `#` comments are ignored.
pub fn parse_samples(text: &str, what: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let v: f64 = body
            .parse()
            .map_err(|_| InputError(format!("{what}: line {}: not a number: {body:?}", i + 1)))?;
        if !v.is_finite() {
            return Err(InputError(format!("{what}: line {}: value is not finite", i + 1)));
        }
        out.push(v);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Naive,
    Minimal,
}

pub fn cmd_filter(signal_text: &str, taps_text: &str, m: Option<usize>, mode: Mode) -> Result<String> {
    let taps = parse_samples(taps_text, "taps")?;
    let samples = parse_samples(signal_text, "input")?;
    if taps.is_empty() {
        return Err(InputError("taps: no coefficients".into()));
    }
    if let Some(m) = m {
        check_m(m)?;
        if m != taps.len() {
            return Err(InputError(format!(
                "-m {m} but the taps file has {} coefficients",
                taps.len()
            )));
        }
    }
    if samples.len() < taps.len() {
        return Err(InputError(format!(
            "input has {} samples, fewer than the {} taps",
            samples.len(),
            taps.len()
        )));
    }
    let taps = Taps::new(taps)?;
    let signal = Signal::new(samples)?;
    let y = match mode {
        Mode::Naive => naive_fir(&signal, &taps)?,
        Mode::Minimal => {
            let plan = generate_plan(taps.m())?;
            fir_filter(&precompute_diagonal(&plan, &taps)?, &signal)?
        }
    };
    let mut out = String::new();
    for v in y {
        writeln!(out, "{v}").unwrap();
    }
    Ok(out)
}

const TABLE_HEADER: &str =
    "M\tnaive_mult\tnaive_adders\tprop_mult\tadders_2in\tadders_3in\tadders_4in\tadders_5in\tsavings_pct";

/// Complexity table as TSV, followed by the published values verbatim.
pub fn cmd_table(m_list: &[usize]) -> Result<String> {
    let sizes = if m_list.is_empty() {
        &PUBLISHED_SIZES[..]
    } else {
        m_list
    };
    for &m in sizes {
        check_m(m)?;
    }
    let savings = savings_report(sizes)?;

    let mut out = String::new();
    writeln!(out, "{TABLE_HEADER}").unwrap();
    let mut wide = Vec::new();
    for (&m, row) in sizes.iter().zip(&savings) {
        let naive = count_naive(m);
        let prop = count_proposed(&generate_plan(m)?);
        writeln!(
            out,
            "{m}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{:.1}",
            naive.multipliers,
            naive.adders_with_fan_in(m),
            prop.multipliers,
            prop.adders_with_fan_in(2),
            prop.adders_with_fan_in(3),
            prop.adders_with_fan_in(4),
            prop.adders_with_fan_in(5),
            row.savings_pct
        )
        .unwrap();
        for (&fan_in, &count) in prop.adders.range(6..) {
            wide.push(format!(
                "# M={m}: {count} adders of fan-in {fan_in} not shown in the columns above"
            ));
        }
    }
    for line in wide {
        writeln!(out, "{line}").unwrap();
    }

    out.push('\n');
    writeln!(out, "# published values, verbatim (* = disputed cell)").unwrap();
    writeln!(out, "{}", &TABLE_HEADER[..TABLE_HEADER.rfind('\t').unwrap()]).unwrap();
    for row in &PUBLISHED_TABLE {
        writeln!(out, "{}", published_line(row)).unwrap();
    }
    writeln!(
        out,
        "# * the 5-input column lists 2 for M=3 and none for M=5; the 3-tap dataflow has no adder wider than 3, \
         while each 5-tap output sums 5 products, so the derived rows place the 2 at M=5"
    )
    .unwrap();
    Ok(out)
}

fn published_line(row: &PublishedRow) -> String {
    let mut cells = vec![
        row.m.to_string(),
        row.naive_mult.to_string(),
        row.naive_adders.to_string(),
        row.prop_mult.to_string(),
    ];
    for (i, cell) in row.adders.iter().enumerate() {
        let mut s = cell.map_or_else(|| "–".to_string(), |n| n.to_string());
        if row.is_disputed(i + 2) {
            s.push('*');
        }
        cells.push(s);
    }
    cells.join("\t")
}
