use std::io::Write;
use std::path::Path;

use arad::radius::{crawford, numerical_radius, range_boundary};

use crate::args::{GlobalOpts, RangeFormat};
use crate::error::{CliError, CliResult};
use crate::format::{sig12, write_atomic};
use crate::report::{to_json, RangePoint, RangeReport, TOOL, VERSION};
use crate::{emit, load_instance, pick_operator, sweep_config, Status};

pub fn run(
    g: &GlobalOpts,
    file: &Path,
    op: Option<&str>,
    points: usize,
    format: Option<RangeFormat>,
    out: &mut dyn Write,
) -> CliResult<Status> {
    let cfg = sweep_config(g)?;
    let inst = load_instance(file, g)?;
    let (name, t) = pick_operator(&inst, op)?;
    if !inst.space.in_b_a(t)? {
        return Err(CliError::Domain(format!(
            "{name} is not in B_A: its A-numerical range is unbounded"
        )));
    }
    let boundary = range_boundary(&inst.space, t, points)?;
    let report = RangeReport {
        tool: TOOL,
        version: VERSION,
        command: "range",
        input: file.display().to_string(),
        operator: name,
        w_a: numerical_radius(&inst.space, t, &cfg)?.value,
        c_a: crawford(&inst.space, t, &cfg)?,
        points: boundary
            .iter()
            .map(|p| RangePoint {
                theta: p.theta,
                re: p.z.re,
                im: p.z.im,
            })
            .collect(),
    };

    let format = format.unwrap_or_else(|| {
        let ext = g
            .out
            .as_deref()
            .and_then(|p| p.extension())
            .and_then(|e| e.to_str());
        match ext {
            Some(e) if e.eq_ignore_ascii_case("json") => RangeFormat::Json,
            Some(_) => RangeFormat::Csv,
            None if g.json => RangeFormat::Json,
            None => RangeFormat::Csv,
        }
    });
    let text = match format {
        RangeFormat::Json => to_json(&report),
        RangeFormat::Csv => csv(&report),
    };
    match &g.out {
        Some(path) => {
            write_atomic(path, text.as_bytes())?;
            if g.json {
                emit(out, &to_json(&report))?;
            } else {
                emit(
                    out,
                    &format!(
                        "w_A = {}, c_A = {}, {} points written to {}\n",
                        sig12(report.w_a),
                        sig12(report.c_a),
                        report.points.len(),
                        path.display()
                    ),
                )?;
            }
        }
        None => emit(out, &text)?,
    }
    Ok(Status::Pass)
}

fn csv(r: &RangeReport) -> String {
    let mut s = format!(
        "# w_A = {}, c_A = {}\ntheta,re,im\n",
        sig12(r.w_a),
        sig12(r.c_a)
    );
    for p in &r.points {
        s += &format!("{:.17e},{:.17e},{:.17e}\n", p.theta, p.re, p.im);
    }
    s
}
