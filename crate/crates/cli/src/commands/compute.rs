use std::io::Write;
use std::path::Path;

use arad::radius::{crawford, m_a, numerical_radius, op_seminorm};

use crate::args::{GlobalOpts, Quantity};
use crate::error::{CliError, CliResult};
use crate::format::{complex12, sig12};
use crate::report::{to_json, ComputeReport, ComputeValue, TOOL, VERSION};
use crate::{emit, load_instance, pick_operator, sweep_config, write_out, Status};

pub fn run(
    g: &GlobalOpts,
    file: &Path,
    quantity: Quantity,
    op: Option<&str>,
    out: &mut dyn Write,
) -> CliResult<Status> {
    let cfg = sweep_config(g)?;
    let inst = load_instance(file, g)?;
    let (name, t) = pick_operator(&inst, op)?;
    let space = &inst.space;
    let member = space.in_b_a(t)?;
    let non_member = || {
        CliError::Domain(format!(
            "{name} is not in B_A: its A-numerical radius is unbounded"
        ))
    };
    let value = match quantity {
        Quantity::Seminorm => ComputeValue::Real(op_seminorm(space, t)?),
        Quantity::Radius | Quantity::Crawford | Quantity::MA if !member => return Err(non_member()),
        Quantity::Radius => ComputeValue::Real(numerical_radius(space, t, &cfg)?.value),
        Quantity::Crawford => ComputeValue::Real(crawford(space, t, &cfg)?),
        Quantity::MA => ComputeValue::Real(m_a(space, t, &cfg)?),
        Quantity::Sharp if !member => {
            return Err(CliError::Domain(format!(
                "{name} is not in B_A: no A-adjoint"
            )))
        }
        Quantity::Sharp => {
            let s = space.sharp(t)?;
            ComputeValue::Matrix(
                s.row_iter()
                    .map(|r| r.iter().map(|&z| z.into()).collect())
                    .collect(),
            )
        }
        Quantity::Member => ComputeValue::Bool(member),
    };
    let report = ComputeReport {
        tool: TOOL,
        version: VERSION,
        command: "compute",
        input: file.display().to_string(),
        operator: name,
        quantity: quantity.name(),
        member,
        value,
    };
    let json = to_json(&report);
    write_out(g, &json)?;
    if g.json {
        return emit(out, &json).map(|_| Status::Pass);
    }
    let text = match &report.value {
        ComputeValue::Real(v) => format!("{}\n", sig12(*v)),
        ComputeValue::Bool(b) => format!("{b}\n"),
        ComputeValue::Matrix(rows) => rows
            .iter()
            .map(|r| {
                let cells: Vec<String> = r
                    .iter()
                    .map(|z| complex12(num_complex::Complex64::new(z.re, z.im)))
                    .collect();
                cells.join("  ") + "\n"
            })
            .collect(),
    };
    emit(out, &text)?;
    Ok(Status::Pass)
}
