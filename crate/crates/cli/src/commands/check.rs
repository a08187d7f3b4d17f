use std::io::Write;
use std::path::Path;

use arad::catalog::{evaluate_many, list_relations, relation, Confidence, Verdict};

use crate::args::{GlobalOpts, ReadingOpts};
use crate::error::CliResult;
use crate::format::{parse_complex, sci};
use crate::report::{
    to_json, CheckConfig, CheckReport, EvalConfig, OutcomeRow, Summary, TOOL, VERSION,
};
use crate::{emit, eval_options, load_instance, write_out, Status};

pub fn run(
    g: &GlobalOpts,
    file: &Path,
    relations: &[String],
    reading: &ReadingOpts,
    z1: Option<&str>,
    z2: Option<&str>,
    out: &mut dyn Write,
) -> CliResult<Status> {
    let mut opts = eval_options(g, reading)?;
    opts.z1 = z1.map(parse_complex).transpose()?;
    opts.z2 = z2.map(parse_complex).transpose()?;
    let explicit =
        !(relations.is_empty() || relations.iter().any(|r| r.eq_ignore_ascii_case("all")));
    let ids: Vec<&str> = if explicit {
        relations
            .iter()
            .map(|r| relation(r).map(|rel| rel.id))
            .collect::<arad::Result<_>>()?
    } else {
        list_relations().iter().map(|r| r.id).collect()
    };
    let inst = load_instance(file, g)?;
    let outcomes = evaluate_many(&ids, &inst, &opts)?;

    let input = file.display().to_string();
    let mut summary = Summary::default();
    let rows: Vec<OutcomeRow> = outcomes
        .iter()
        .map(|o| {
            summary.add(o.verdict, o.confidence);
            let witness = (o.verdict == Verdict::Fail).then(|| input.clone());
            OutcomeRow::new(o, &o.relation, witness)
        })
        .collect();

    let status = if summary.verified_failures > 0 {
        Status::VerifiedFailure
    } else if explicit && outcomes.iter().any(|o| !o.missing.is_empty()) {
        Status::MissingOperators
    } else if explicit && outcomes.iter().any(|o| !o.non_member.is_empty()) {
        Status::NonMember
    } else {
        Status::Pass
    };

    let report = CheckReport {
        tool: TOOL,
        version: VERSION,
        command: "check",
        input,
        config: CheckConfig {
            eval: EvalConfig::new(&opts, g.tol),
            relations: ids.iter().map(|s| s.to_string()).collect(),
        },
        outcomes: rows,
        summary,
    };
    let json = to_json(&report);
    write_out(g, &json)?;
    if g.json {
        emit(out, &json)?;
    } else {
        emit(out, &table(&report))?;
    }
    Ok(status)
}

fn table(r: &CheckReport) -> String {
    let mut s = format!(
        "{:<5} {:<8} {:<12} {:>11} {:>11} {:>11} {:>11}  {}\n",
        "ID", "VERDICT", "CONFIDENCE", "LHS", "RHS", "SLACK", "TOL", "NOTE"
    );
    for o in &r.outcomes {
        let conf = match o.confidence {
            Confidence::Verified => "verified",
            Confidence::ReportOnly => "report-only",
        };
        let note = o
            .reason
            .clone()
            .or_else(|| o.clause.clone())
            .unwrap_or_default();
        s += &format!(
            "{:<5} {:<8} {:<12} {:>11} {:>11} {:>11} {:>11}  {}\n",
            o.relation,
            o.verdict.to_string(),
            conf,
            sci(o.lhs),
            sci(o.rhs),
            sci(o.slack),
            sci(o.tolerance),
            note
        );
    }
    let m = &r.summary;
    s += &format!(
        "{} evaluated: {} pass, {} fail ({} verified), {} skipped\n",
        m.evaluated, m.pass, m.fail, m.verified_failures, m.skipped
    );
    s
}
