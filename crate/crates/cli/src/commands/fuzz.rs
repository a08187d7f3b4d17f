use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use arad::catalog::{
    evaluate_many, list_relations, relation, CheckOutcome, Confidence, EvalOptions, Kind,
    NormReading, Verdict,
};
use arad::{gen_instance, Profile};

use crate::args::{Fault, GlobalOpts, ReadingOpts};
use crate::error::{CliError, CliResult};
use crate::format::{sci, write_atomic};
use crate::report::{
    to_json, EvalConfig, Failure, FuzzConfig, FuzzReport, RelationTally, Summary, Worst, TOOL,
    VERSION,
};
use crate::shrink::shrink;
use crate::{emit, eval_options, write_out, Status};

pub struct FuzzArgs<'a> {
    pub profile: &'a str,
    pub count: usize,
    pub relations: &'a [String],
    pub corpus: &'a Path,
    pub max_shrink: usize,
    pub reading: &'a ReadingOpts,
    pub fault: Option<Fault>,
}

const PLAIN_SUFFIX: &str = "-plain";
/// Failures listed per section in the human table.
const TABLE_FAILURES: usize = 20;

/// Relations run under one set of options, labelled in the report.
struct Pass<'a> {
    ids: Vec<&'static str>,
    opts: EvalOptions,
    suffix: &'a str,
}

pub fn run(g: &GlobalOpts, a: &FuzzArgs, out: &mut dyn Write) -> CliResult<Status> {
    let profile = Profile::named(a.profile)?;
    if a.count == 0 {
        return Err(CliError::Input("--count must be positive".into()));
    }
    let mut opts = eval_options(g, a.reading)?;
    opts.fault_negate_slack = a.fault == Some(Fault::NegateSlack);
    let ids: Vec<&'static str> =
        if a.relations.is_empty() || a.relations.iter().any(|r| r.eq_ignore_ascii_case("all")) {
            list_relations().iter().map(|r| r.id).collect()
        } else {
            a.relations
                .iter()
                .map(|r| relation(r.trim()).map(|rel| rel.id))
                .collect::<arad::Result<_>>()?
        };

    // Relations whose plain-norm reading is report-only also run that way.
    let plain_opts = EvalOptions {
        norm_reading: NormReading::Plain,
        ..opts.clone()
    };
    let plain_ids: Vec<&'static str> = if opts.norm_reading == NormReading::ASeminorm {
        ids.iter()
            .copied()
            .filter(|id| {
                let rel = relation(id).expect("ids are catalog ids");
                rel.confidence_under(&opts) == Confidence::Verified
                    && rel.confidence_under(&plain_opts) == Confidence::ReportOnly
            })
            .collect()
    } else {
        Vec::new()
    };
    let passes = [
        Pass {
            ids: ids.clone(),
            opts: opts.clone(),
            suffix: "",
        },
        Pass {
            ids: plain_ids.clone(),
            opts: plain_opts,
            suffix: PLAIN_SUFFIX,
        },
    ];

    let mut tallies: BTreeMap<String, RelationTally> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut failures = Vec::new();
    let mut report_only = Vec::new();
    let mut summary = Summary::default();

    for i in 0..a.count {
        let seed = g.seed.wrapping_add(i as u64);
        let inst = gen_instance(&profile, seed)?;
        for pass in passes.iter().filter(|p| !p.ids.is_empty()) {
            let outcomes = evaluate_many(&pass.ids, &inst, &pass.opts)?;
            for o in outcomes {
                let label = format!("{}{}", o.relation, pass.suffix);
                summary.add(o.verdict, o.confidence);
                let tally = tallies.entry(label.clone()).or_insert_with(|| {
                    order.push(label.clone());
                    RelationTally {
                        relation: label.clone(),
                        confidence: o.confidence,
                        pass: 0,
                        fail: 0,
                        skipped: 0,
                        worst: None,
                    }
                });
                record(tally, &o, seed);
                if o.verdict != Verdict::Fail {
                    continue;
                }
                let verified = o.confidence == Confidence::Verified;
                // Report-only relations can fail often; only their first
                // failure per label is shrunk.
                let first = report_only.iter().all(|f: &Failure| f.relation != label);
                let budget = if verified || first { a.max_shrink } else { 0 };
                let relation_id = o.relation.clone();
                let shrunk = shrink(
                    &relation_id,
                    &profile,
                    seed,
                    inst.clone(),
                    o,
                    &pass.opts,
                    budget,
                );
                let witness = format!("{label}-seed{seed}.json");
                let mut body = shrunk.instance.to_file().to_json_pretty();
                body.push('\n');
                write_atomic(&a.corpus.join(&witness), body.as_bytes())?;
                let f = failure(
                    &label,
                    seed,
                    i,
                    &inst,
                    &shrunk.outcome,
                    witness,
                    shrunk.instance.dim(),
                    shrunk.steps,
                );
                if verified {
                    failures.push(f);
                } else {
                    report_only.push(f);
                }
            }
        }
    }

    let report = FuzzReport {
        tool: TOOL,
        version: VERSION,
        command: "fuzz",
        config: FuzzConfig {
            profile: profile.name.clone(),
            count: a.count,
            seed: g.seed,
            max_shrink: a.max_shrink,
            eval: EvalConfig::new(&opts, g.tol),
            relations: ids.iter().map(|s| s.to_string()).collect(),
            plain_variants: plain_ids
                .iter()
                .map(|s| format!("{s}{PLAIN_SUFFIX}"))
                .collect(),
            injected_fault: a.fault.map(|_| "negate-slack".to_string()),
        },
        relations: order.iter().map(|l| tallies[l].clone()).collect(),
        failures,
        report_only,
        summary,
    };
    let json = to_json(&report);
    write_out(g, &json)?;
    if g.json {
        emit(out, &json)?;
    } else {
        emit(out, &table(&report))?;
    }
    Ok(if report.summary.verified_failures > 0 {
        Status::VerifiedFailure
    } else {
        Status::Pass
    })
}

fn ratio(o: &CheckOutcome) -> Option<f64> {
    let (slack, tol) = (o.slack?, o.tolerance?);
    Some(match o.kind {
        Kind::Inequality => -slack / tol,
        Kind::Equality => slack / tol,
    })
}

fn record(t: &mut RelationTally, o: &CheckOutcome, seed: u64) {
    match o.verdict {
        Verdict::Pass => t.pass += 1,
        Verdict::Fail => t.fail += 1,
        Verdict::Skipped => {
            t.skipped += 1;
            return;
        }
    }
    let Some(r) = ratio(o) else { return };
    if t.worst.as_ref().is_some_and(|w| w.ratio >= r) {
        return;
    }
    t.worst = Some(Worst {
        seed,
        ratio: r,
        clause: o.clause.clone().unwrap_or_else(|| o.relation.clone()),
        lhs: o.lhs.unwrap_or(f64::NAN),
        rhs: o.rhs.unwrap_or(f64::NAN),
        slack: o.slack.unwrap_or(f64::NAN),
        tolerance: o.tolerance.unwrap_or(f64::NAN),
    });
}

#[allow(clippy::too_many_arguments)]
fn failure(
    label: &str,
    seed: u64,
    index: usize,
    inst: &arad::Instance,
    o: &CheckOutcome,
    witness: String,
    witness_dim: usize,
    shrink_steps: usize,
) -> Failure {
    Failure {
        relation: label.to_string(),
        seed,
        index,
        dim: inst.dim(),
        rank: inst.rank(),
        clause: o.clause.clone().unwrap_or_else(|| o.relation.clone()),
        lhs: o.lhs.unwrap_or(f64::NAN),
        rhs: o.rhs.unwrap_or(f64::NAN),
        slack: o.slack.unwrap_or(f64::NAN),
        tolerance: o.tolerance.unwrap_or(f64::NAN),
        witness,
        witness_dim,
        shrink_steps,
    }
}

fn table(r: &FuzzReport) -> String {
    let mut s = format!(
        "{:<10} {:<12} {:>6} {:>6} {:>6} {:>11}\n",
        "ID", "CONFIDENCE", "PASS", "FAIL", "SKIP", "WORST"
    );
    for t in &r.relations {
        let conf = match t.confidence {
            Confidence::Verified => "verified",
            Confidence::ReportOnly => "report-only",
        };
        s += &format!(
            "{:<10} {:<12} {:>6} {:>6} {:>6} {:>11}\n",
            t.relation,
            conf,
            t.pass,
            t.fail,
            t.skipped,
            sci(t.worst.as_ref().map(|w| w.ratio))
        );
    }
    for (title, list) in [
        ("verified failures", &r.failures),
        ("report-only failures", &r.report_only),
    ] {
        if list.is_empty() {
            continue;
        }
        s += &format!("{title}:\n");
        for f in list.iter().take(TABLE_FAILURES) {
            s += &format!(
                "  {} seed {} ({}x{} rank {}): slack {} tol {}, witness {} (dim {}, {} shrink steps)\n",
                f.relation,
                f.seed,
                f.dim,
                f.dim,
                f.rank,
                sci(Some(f.slack)),
                sci(Some(f.tolerance)),
                f.witness,
                f.witness_dim,
                f.shrink_steps
            );
        }
        if list.len() > TABLE_FAILURES {
            s += &format!(
                "  ... {} more in the JSON report\n",
                list.len() - TABLE_FAILURES
            );
        }
    }
    let m = &r.summary;
    s += &format!(
        "{} instances, {} evaluated: {} pass, {} fail ({} verified, {} report-only), {} skipped\n",
        r.config.count,
        m.evaluated,
        m.pass,
        m.fail,
        m.verified_failures,
        m.report_only_failures,
        m.skipped
    );
    s
}
