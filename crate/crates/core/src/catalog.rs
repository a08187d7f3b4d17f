//! Catalog of checkable relations between seminorms, numerical radii and
//! Crawford numbers, with slack-based verdicts.
//!
//! Every inequality is evaluated in the form `lhs <= rhs` and reports
//! `slack = rhs - lhs`; equalities report `slack = |lhs - rhs|`. A relation
//! with several clauses reports the clause closest to failing, measured as
//! a multiple of its tolerance.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::block::{assemble, inflate_space};
use crate::error::{Error, Result};
use crate::instance::{Instance, InstanceFile};
use crate::kernel::{c, identity, norm2, CMat, I};
use crate::radius::{self, RealPartReading, ThetaSweepConfig};
use crate::space::SemiSpace;

pub const EQ_REL_TOL: f64 = 1e-7;
pub const INEQ_REL_TOL: f64 = 1e-8;
/// Relations with a sweep nested inside another sweep.
pub const NESTED_REL_TOL: f64 = 1e-6;

/// Angles used for the phase-invariance clause of R9.
pub const R9_PHASES: [f64; 3] = [0.7, 2.1, 4.4];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Equality,
    Inequality,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Confidence {
    Verified,
    ReportOnly,
}

/// How unsubscripted operator norms are read in R17 and R18.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormReading {
    #[default]
    ASeminorm,
    Plain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Relation {
    pub id: &'static str,
    pub kind: Kind,
    pub confidence: Confidence,
    /// Operator slots read from the instance. Relations with a data-driven
    /// roster (R2, R30, R31) document it in `arity_note`.
    pub operators: &'static [&'static str],
    pub arity_note: &'static str,
    pub description: &'static str,
}

impl Relation {
    /// Confidence after applying the reading choices in `opts`.
    pub fn confidence_under(&self, opts: &EvalOptions) -> Confidence {
        match self.id {
            "R17" | "R18" if opts.norm_reading == NormReading::Plain => Confidence::ReportOnly,
            _ => self.confidence,
        }
    }
}

macro_rules! rel {
    ($id:literal, $kind:ident, $conf:ident, [$($op:literal),*], $note:literal, $desc:literal) => {
        Relation {
            id: $id,
            kind: Kind::$kind,
            confidence: Confidence::$conf,
            operators: &[$($op),*],
            arity_note: $note,
            description: $desc,
        }
    };
}

static CATALOG: [Relation; 31] = [
    rel!("R1", Inequality, Verified, ["T"], "",
        "||T||_A / 2 <= w_A(T) <= ||T||_A"),
    rel!("R2", Equality, Verified, [], "every operator with T^2 = 0 or AT = T*A",
        "w_A(T) = ||T||_A / 2 if T^2 = 0; w_A(T) = ||T||_A if T is A-selfadjoint"),
    rel!("R3", Equality, Verified, ["T"], "",
        "w_A(T) = w_A(T#)"),
    rel!("R4", Equality, Verified, ["T"], "",
        "||T#T||_A = ||TT#||_A = ||T||_A^2 = ||T#||_A^2"),
    rel!("R5", Equality, Verified, ["T1", "T2"], "",
        "||T1# T2||_A = ||T2# T1||_A"),
    rel!("R6", Equality, Verified, ["T1", "T2", "T3", "T4"], "",
        "[[T1, T2], [T3, T4]]# = [[T1#, T3#], [T2#, T4#]] (relative residual vs 0)"),
    rel!("R7", Inequality, Verified, ["T1", "T2", "T3", "T4"], "",
        "max{w(T1), w(T4)} = w(diag(T1, T4)) <= w([[T1, T2], [T3, T4]])"),
    rel!("R8", Inequality, Verified, ["T1", "T2", "T3", "T4"], "",
        "w([[O, T2], [T3, O]]) <= w([[T1, T2], [T3, T4]])"),
    rel!("R9", Equality, Verified, ["T1", "T2"], "",
        "w([[O, T1], [T2, O]]) = w([[O, T2], [T1, O]]) = w([[O, T1], [e^{it} T2, O]]); \
         w([[T1, T2], [T2, T1]]) = max{w(T1 + T2), w(T1 - T2)}; w([[O, T2], [T2, O]]) = w(T2)"),
    rel!("R10", Inequality, Verified, ["T1", "T2"], "",
        "max{w(T1), w(T2)} <= w([[T1, T2], [-T2, -T1]]) <= w(T1) + w(T2)"),
    rel!("R11", Equality, Verified, ["T1", "T2"], "",
        "w([[T2, -T1], [T1, T2]]) = max{w(T1 + iT2), w(T1 - iT2)}"),
    rel!("R12", Inequality, Verified, ["T", "S"], "",
        "w(TS +- ST#) <= 2 ||T||_A w(S)"),
    rel!("R13", Equality, Verified, ["T"], "scalars z1, z2 (default 1, -1); skipped when rank A = 0",
        "||[[z1 I, T], [O, z2 I]]|| = sqrt((s + sqrt(s^2 - 4|z1|^2|z2|^2)) / 2), s = |z1|^2 + |z2|^2 + ||T||_A^2"),
    rel!("R14", Inequality, Verified, ["T"], "",
        "sqrt(||TT# + T#T||_A + 2c(T^2)) / 2 <= w(T) <= sqrt(||TT# + T#T||_A + 2w(T^2)) / 2"),
    rel!("R15", Equality, Verified, ["T"], "skipped when rank A = 0",
        "for U = [[I, T], [O, -I]] and v = ||U||: 2w(U) = v + 1/v, w(U) = sqrt(||T||_A^2 + 4) / 2, \
         v = (||T||_A + sqrt(||T||_A^2 + 4)) / 2"),
    rel!("R16", Equality, Verified, ["T"], "skipped when rank A = 0",
        "for U = [[I, T], [O, -I]]: ||Re(U)|| = w(U), ||Im(U)|| = (v - 1/v) / 2 with v = ||U||"),
    rel!("R17", Inequality, Verified, ["T"], "report-only under the plain norm reading",
        "w_A(T) <= (||T|| + ||T^2||^{1/2}) / 2"),
    rel!("R18", Inequality, Verified, ["T1", "T2", "T3", "T4"], "report-only under the plain norm reading",
        "max{w(T2T3)^{1/2}, w(T3T2)^{1/2}} <= w([[O, T2], [T3, O]]) <= (||T|| + ||T^2||^{1/2}) / 2, \
         T = [[T1, T2], [T3, T4]]"),
    rel!("R19", Inequality, Verified, ["T", "S", "X", "Y"], "",
        "w(TXS# +- SYT#) <= 2 ||T||_A ||S||_A w([[O, X], [Y, O]])"),
    rel!("R20", Inequality, Verified, ["Q", "S"], "",
        "w(QS# +- SQ) <= 2 ||S||_A w(Q)"),
    rel!("R21", Equality, Verified, ["T"], "",
        "w(PT) = w(TP) = w(T), P the projector onto the range of A"),
    rel!("R22", Inequality, Verified, ["T1", "T2", "T3", "T4"], "",
        "w([[T1, T2], [T3, T4]]) >= max{a, b} / 2, a = max{w(T1+T2+T3+T4), w(T1+T4-T2-T3)}, \
         b = max{w(T1+T4 +- i(T2-T3))}"),
    rel!("R23", Inequality, Verified, ["T1", "T2"], "",
        "w([[T1, T2], [O, O]]) >= max{w(T1 + iT2), w(T1 - iT2)} / 2"),
    rel!("R24", Inequality, Verified, ["T"], "",
        "w(T) / 2 <= min{w([[P, Q], [O, O]]), w([[O, P], [Q, O]])}, P = Re_A(T), Q = Im_A(T)"),
    rel!("R25", Equality, Verified, ["X", "Y"], "",
        "w([[O, X], [Y, O]]) = sup_t ||e^{it} X + e^{-it} Y#||_A / 2"),
    rel!("R26", Inequality, Verified, ["T1", "T2"], "",
        "w([[O, T1], [T2, O]])^4 <= ||P||^2/16 + w(T2T1)^2/4 + w(PT2T1 + T2T1P)/8, P = T1#T1 + T2T2#"),
    rel!("R27", Inequality, Verified, ["T1", "T2"], "",
        "w(T1T2) <= sqrt(||P||^2 + 4w(T2T1)^2 + 2w(T2T1P + PT2T1)) / 4, P = T1#T1 + T2T2#"),
    rel!("R28", Inequality, ReportOnly, ["T1", "T2"], "",
        "w([[O, T1], [T2, O]])^4 >= ||P||^2/16 + c(PT2T1 + T2T1P)/8 + m(T2T1)^2/4, P = T1#T1 + T2T2#"),
    rel!("R29", Inequality, ReportOnly, ["T1", "T2", "T3", "T4"], "",
        "max{w(T1), w(T4)} and the quartic bounds of R26/R28 for (T2, T3) bracket w([[T1, T2], [T3, T4]]), \
         P = T2#T2 + T3T3#"),
    rel!("R30", Inequality, Verified, [], "block grid B11..Bkk, else T1..T4 as a 2x2 grid",
        "w(diag(T11, ..., Tkk)) <= w([Tij])"),
    rel!("R31", Inequality, Verified, [], "T1..Tm with m = max(2, block_shape)",
        "w(diag(S, ..., S)) <= m w(diag(T1, ..., Tm)), S = T1 + ... + Tm"),
];

pub fn list_relations() -> &'static [Relation] {
    &CATALOG
}

pub fn relation(id: &str) -> Result<&'static Relation> {
    CATALOG
        .iter()
        .find(|r| r.id.eq_ignore_ascii_case(id))
        .ok_or_else(|| Error::UnknownRelation(id.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOptions {
    pub sweep: ThetaSweepConfig,
    pub norm_reading: NormReading,
    /// Reads P in R29 literally as `T1#T1 + T2T2#`.
    pub r29_literal_p: bool,
    #[serde(skip)]
    pub m_a_reading: RealPartReading,
    /// Overrides the instance scalars of R13.
    #[serde(skip)]
    pub z1: Option<Complex64>,
    #[serde(skip)]
    pub z2: Option<Complex64>,
    /// Test fixture: flips the sign of every reported slack.
    #[doc(hidden)]
    #[serde(skip)]
    pub fault_negate_slack: bool,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            sweep: ThetaSweepConfig::default(),
            norm_reading: NormReading::ASeminorm,
            r29_literal_p: false,
            m_a_reading: RealPartReading::ASharp,
            z1: None,
            z2: None,
            fault_negate_slack: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub relation: String,
    pub kind: Kind,
    pub confidence: Confidence,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub clause: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rhs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slack: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Why the relation was skipped.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    /// Operators the instance lacked.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub missing: Vec<String>,
    /// Operands that lie outside `B_A`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub non_member: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<InstanceFile>,
}

impl CheckOutcome {
    pub fn is_verified_failure(&self) -> bool {
        self.verdict == Verdict::Fail && self.confidence == Confidence::Verified
    }
}

/// One evaluated side-by-side comparison inside a relation.
#[derive(Debug, Clone)]
struct Clause {
    label: String,
    kind: Kind,
    lhs: f64,
    rhs: f64,
    rel_tol: f64,
}

impl Clause {
    fn le(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            kind: Kind::Inequality,
            lhs,
            rhs,
            rel_tol: INEQ_REL_TOL,
        }
    }

    fn eq(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            kind: Kind::Equality,
            lhs,
            rhs,
            rel_tol: EQ_REL_TOL,
        }
    }

    fn with_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }

    fn tolerance(&self) -> f64 {
        self.rel_tol * 1f64.max(self.lhs.abs()).max(self.rhs.abs())
    }

    fn slack(&self) -> f64 {
        match self.kind {
            Kind::Inequality => self.rhs - self.lhs,
            Kind::Equality => (self.lhs - self.rhs).abs(),
        }
    }

    /// Positive when violated, in units of the tolerance.
    fn violation(&self) -> f64 {
        let (slack, tol) = (self.slack(), self.tolerance());
        match self.kind {
            Kind::Inequality => -slack / tol,
            Kind::Equality => slack / tol,
        }
    }
}

enum Skip {
    Missing(Vec<String>),
    NonMember(String),
    Reason(String),
}

impl From<Error> for Skip {
    fn from(e: Error) -> Self {
        Skip::Reason(e.to_string())
    }
}

type Eval<T> = std::result::Result<T, Skip>;

/// Radius cache key: block size of the space and the matrix entries' bits.
type RadiusKey = (usize, Vec<u64>);

fn radius_key(k: usize, t: &CMat) -> RadiusKey {
    let bits = t
        .iter()
        .flat_map(|z| [z.re.to_bits(), z.im.to_bits()])
        .collect();
    (k, bits)
}

/// Evaluation context, shared by the relations evaluated on one instance:
/// caches inflated spaces and numerical radii by matrix content.
struct Ctx<'a> {
    inst: &'a Instance,
    opts: &'a EvalOptions,
    inflated: RefCell<HashMap<usize, SemiSpace>>,
    radii: RefCell<HashMap<RadiusKey, f64>>,
}

impl<'a> Ctx<'a> {
    fn new(inst: &'a Instance, opts: &'a EvalOptions) -> Self {
        Self {
            inst,
            opts,
            inflated: RefCell::new(HashMap::new()),
            radii: RefCell::new(HashMap::new()),
        }
    }

    fn space(&self) -> &SemiSpace {
        &self.inst.space
    }

    fn n(&self) -> usize {
        self.inst.dim()
    }

    /// The named operators, all required to be members.
    fn ops<const N: usize>(&self, names: [&str; N]) -> Eval<[&'a CMat; N]> {
        let missing: Vec<String> = names
            .iter()
            .filter(|n| self.inst.op(n).is_none())
            .map(|n| n.to_string())
            .collect();
        if !missing.is_empty() {
            return Err(Skip::Missing(missing));
        }
        let ops = names.map(|n| self.inst.op(n).expect("checked above"));
        for (name, t) in names.iter().zip(ops.iter()) {
            if !self.space().in_b_a(t)? {
                return Err(Skip::NonMember(name.to_string()));
            }
        }
        Ok(ops)
    }

    fn cached_radius(&self, k: usize, t: &CMat, f: impl FnOnce() -> Result<f64>) -> Result<f64> {
        let key = radius_key(k, t);
        if let Some(&v) = self.radii.borrow().get(&key) {
            return Ok(v);
        }
        let v = f()?;
        self.radii.borrow_mut().insert(key, v);
        Ok(v)
    }

    fn w(&self, t: &CMat) -> Result<f64> {
        self.cached_radius(1, t, || {
            Ok(radius::numerical_radius(self.space(), t, &self.opts.sweep)?.value)
        })
    }

    fn w_of(&self, name: &str) -> Result<f64> {
        self.w(self.inst.op(name).expect("operators are resolved first"))
    }

    fn norm(&self, t: &CMat) -> Result<f64> {
        radius::op_seminorm(self.space(), t)
    }

    fn sharp(&self, t: &CMat) -> Result<CMat> {
        self.space().sharp(t)
    }

    fn with_inflated<T>(&self, k: usize, f: impl FnOnce(&SemiSpace) -> Result<T>) -> Result<T> {
        if !self.inflated.borrow().contains_key(&k) {
            let s = inflate_space(self.space(), k)?;
            self.inflated.borrow_mut().insert(k, s);
        }
        let map = self.inflated.borrow();
        f(&map[&k])
    }

    fn grid(&self, k: usize, blocks: &[CMat]) -> Result<CMat> {
        assemble(k, self.n(), blocks)
    }

    /// `w` over the inflated space of a `k x k` grid given row-major.
    fn wb(&self, k: usize, blocks: &[CMat]) -> Result<f64> {
        let t = self.grid(k, blocks)?;
        let cfg = self.opts.sweep;
        self.cached_radius(k, &t, || {
            self.with_inflated(k, |s| Ok(radius::numerical_radius(s, &t, &cfg)?.value))
        })
    }

    fn normb(&self, k: usize, blocks: &[CMat]) -> Result<f64> {
        let t = self.grid(k, blocks)?;
        self.with_inflated(k, |s| radius::op_seminorm(s, &t))
    }

    fn zero(&self) -> CMat {
        CMat::zeros(self.n(), self.n())
    }

    fn offdiag(&self, x: &CMat, y: &CMat) -> [CMat; 4] {
        [self.zero(), x.clone(), y.clone(), self.zero()]
    }

    fn w_offdiag(&self, x: &CMat, y: &CMat) -> Result<f64> {
        self.wb(2, &self.offdiag(x, y))
    }

    fn rank_positive(&self, id: &str) -> Eval<()> {
        if self.space().rank() == 0 {
            return Err(Skip::Reason(format!(
                "{id} needs a nonzero weight: every seminorm vanishes at rank 0"
            )));
        }
        Ok(())
    }
}

/// Evaluates one relation on an instance.
pub fn evaluate(id: &str, inst: &Instance, opts: &EvalOptions) -> Result<CheckOutcome> {
    Ok(evaluate_in(relation(id)?, &Ctx::new(inst, opts)))
}

/// Evaluates several relations on one instance, sharing computed radii.
/// Outcomes follow the order of `ids`.
pub fn evaluate_many(
    ids: &[&str],
    inst: &Instance,
    opts: &EvalOptions,
) -> Result<Vec<CheckOutcome>> {
    let rels = ids
        .iter()
        .map(|id| relation(id))
        .collect::<Result<Vec<_>>>()?;
    let ctx = Ctx::new(inst, opts);
    Ok(rels.into_iter().map(|r| evaluate_in(r, &ctx)).collect())
}

/// Evaluates every relation, in catalog order.
pub fn evaluate_all(inst: &Instance, opts: &EvalOptions) -> Vec<CheckOutcome> {
    let ctx = Ctx::new(inst, opts);
    CATALOG.iter().map(|r| evaluate_in(r, &ctx)).collect()
}

fn evaluate_in(rel: &Relation, ctx: &Ctx) -> CheckOutcome {
    let (inst, opts) = (ctx.inst, ctx.opts);
    let confidence = rel.confidence_under(opts);
    let mut out = CheckOutcome {
        relation: rel.id.to_string(),
        kind: rel.kind,
        confidence,
        verdict: Verdict::Skipped,
        clause: None,
        lhs: None,
        rhs: None,
        slack: None,
        tolerance: None,
        reason: None,
        missing: Vec::new(),
        non_member: Vec::new(),
        witness: None,
    };
    match clauses(rel.id, ctx) {
        Err(Skip::Missing(names)) => {
            out.reason = Some(format!("missing {}", names.join(", ")));
            out.missing = names;
        }
        Err(Skip::NonMember(name)) => {
            out.reason = Some(format!("{name} is not in B_A"));
            out.non_member = vec![name];
        }
        Err(Skip::Reason(r)) => out.reason = Some(r),
        Ok(list) if list.is_empty() => {
            out.reason = Some("no operator satisfies the structural precondition".into());
        }
        Ok(list) => {
            let worst = list
                .iter()
                .fold(None::<&Clause>, |acc, cl| match acc {
                    Some(a) if a.violation() >= cl.violation() => Some(a),
                    _ => Some(cl),
                })
                .expect("nonempty");
            let mut slack = worst.slack();
            if opts.fault_negate_slack {
                slack = -slack;
            }
            let tol = worst.tolerance();
            let pass = match worst.kind {
                Kind::Inequality => slack >= -tol,
                Kind::Equality => slack <= tol,
            };
            out.kind = worst.kind;
            out.clause = Some(worst.label.clone());
            out.lhs = Some(worst.lhs);
            out.rhs = Some(worst.rhs);
            out.slack = Some(slack);
            out.tolerance = Some(tol);
            out.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
            if !pass {
                out.witness = Some(inst.to_file());
            }
        }
    }
    out
}

fn sum(ts: &[&CMat]) -> CMat {
    ts.iter().skip(1).fold(ts[0].clone(), |acc, t| acc + *t)
}

fn scaled(t: &CMat, z: Complex64) -> CMat {
    t.map(|v| v * z)
}

fn clauses(id: &str, cx: &Ctx) -> Eval<Vec<Clause>> {
    let cfg = &cx.opts.sweep;
    let s = cx.space();
    Ok(match id {
        "R1" => {
            let [t] = cx.ops(["T"])?;
            let (w, nrm) = (cx.w_of("T")?, cx.norm(t)?);
            vec![
                Clause::le("lower", 0.5 * nrm, w),
                Clause::le("upper", w, nrm),
            ]
        }
        "R2" => {
            let mut out = Vec::new();
            for (name, t) in &cx.inst.operators {
                if !s.in_b_a(t)? {
                    continue;
                }
                let sq = norm2(&(t * t));
                let tn = norm2(t);
                if sq <= 1e-12 * (tn * tn).max(1.0) {
                    let (w, nrm) = (cx.w_of(name)?, cx.norm(t)?);
                    out.push(Clause::eq(format!("{name}: square-zero"), w, 0.5 * nrm));
                }
                if s.is_a_selfadjoint(t)? {
                    let (w, nrm) = (cx.w_of(name)?, cx.norm(t)?);
                    out.push(Clause::eq(format!("{name}: A-selfadjoint"), w, nrm));
                }
            }
            out
        }
        "R3" => {
            let [t] = cx.ops(["T"])?;
            vec![Clause::eq(
                "w(T) = w(T#)",
                cx.w_of("T")?,
                cx.w(&cx.sharp(t)?)?,
            )]
        }
        "R4" => {
            let [t] = cx.ops(["T"])?;
            let ts = cx.sharp(t)?;
            let n2 = cx.norm(t)?.powi(2);
            vec![
                Clause::eq("||T#T||", cx.norm(&(&ts * t))?, n2),
                Clause::eq("||TT#||", cx.norm(&(t * &ts))?, n2),
                Clause::eq("||T#||^2", cx.norm(&ts)?.powi(2), n2),
            ]
        }
        "R5" => {
            let [t1, t2] = cx.ops(["T1", "T2"])?;
            let a = cx.norm(&(cx.sharp(t1)? * t2))?;
            let b = cx.norm(&(cx.sharp(t2)? * t1))?;
            vec![Clause::eq("||T1#T2|| = ||T2#T1||", a, b)]
        }
        "R6" => {
            let [t1, t2, t3, t4] = cx.ops(["T1", "T2", "T3", "T4"])?;
            let t = cx.grid(2, &[t1.clone(), t2.clone(), t3.clone(), t4.clone()])?;
            let expected = cx.grid(
                2,
                &[cx.sharp(t1)?, cx.sharp(t3)?, cx.sharp(t2)?, cx.sharp(t4)?],
            )?;
            let direct = cx.with_inflated(2, |s2| s2.sharp(&t))?;
            let resid = norm2(&(&direct - &expected)) / norm2(&expected).max(1.0);
            vec![Clause::eq("relative residual", resid, 0.0)]
        }
        "R7" => {
            let [t1, t2, t3, t4] = cx.ops(["T1", "T2", "T3", "T4"])?;
            let z = cx.zero();
            let m = cx.w_of("T1")?.max(cx.w_of("T4")?);
            let d = cx.wb(2, &[t1.clone(), z.clone(), z, t4.clone()])?;
            let full = cx.wb(2, &[t1.clone(), t2.clone(), t3.clone(), t4.clone()])?;
            vec![
                Clause::eq("max = w(diag)", m, d),
                Clause::le("w(diag) <= w(full)", d, full),
            ]
        }
        "R8" => {
            let [t1, t2, t3, t4] = cx.ops(["T1", "T2", "T3", "T4"])?;
            let off = cx.w_offdiag(t2, t3)?;
            let full = cx.wb(2, &[t1.clone(), t2.clone(), t3.clone(), t4.clone()])?;
            vec![Clause::le("w(offdiag) <= w(full)", off, full)]
        }
        "R9" => {
            let [t1, t2] = cx.ops(["T1", "T2"])?;
            let base = cx.w_offdiag(t1, t2)?;
            let mut out = vec![Clause::eq("swap", base, cx.w_offdiag(t2, t1)?)];
            for th in R9_PHASES {
                let rotated = scaled(t2, c(th.cos(), th.sin()));
                out.push(Clause::eq(
                    format!("phase {th}"),
                    cx.w_offdiag(t1, &rotated)?,
                    base,
                ));
            }
            let circ = cx.wb(2, &[t1.clone(), t2.clone(), t2.clone(), t1.clone()])?;
            let rhs = cx.w(&(t1 + t2))?.max(cx.w(&(t1 - t2))?);
            out.push(Clause::eq("circulant", circ, rhs));
            out.push(Clause::eq(
                "[[O, T2], [T2, O]]",
                cx.w_offdiag(t2, t2)?,
                cx.w_of("T2")?,
            ));
            out
        }
        "R10" => {
            let [t1, t2] = cx.ops(["T1", "T2"])?;
            let mid = cx.wb(2, &[t1.clone(), t2.clone(), -t2, -t1])?;
            let (w1, w2) = (cx.w_of("T1")?, cx.w_of("T2")?);
            vec![
                Clause::le("lower", w1.max(w2), mid),
                Clause::le("upper", mid, w1 + w2),
            ]
        }
        "R11" => {
            let [t1, t2] = cx.ops(["T1", "T2"])?;
            let lhs = cx.wb(2, &[t2.clone(), -t1, t1.clone(), t2.clone()])?;
            let it2 = scaled(t2, I);
            let rhs = cx.w(&(t1 + &it2))?.max(cx.w(&(t1 - &it2))?);
            vec![Clause::eq("rotation block", lhs, rhs)]
        }
        "R12" => {
            let [t, s_] = cx.ops(["T", "S"])?;
            let ts = cx.sharp(t)?;
            let bound = 2.0 * cx.norm(t)? * cx.w_of("S")?;
            let (a, b) = (t * s_, s_ * &ts);
            vec![
                Clause::le("+", cx.w(&(&a + &b))?, bound),
                Clause::le("-", cx.w(&(&a - &b))?, bound),
            ]
        }
        "R13" => {
            let [t] = cx.ops(["T"])?;
            cx.rank_positive("R13")?;
            let z1 = cx
                .opts
                .z1
                .or(cx.inst.scalars.get("z1").copied())
                .unwrap_or(c(1.0, 0.0));
            let z2 = cx
                .opts
                .z2
                .or(cx.inst.scalars.get("z2").copied())
                .unwrap_or(c(-1.0, 0.0));
            let id = identity(cx.n());
            let direct = cx.normb(2, &[scaled(&id, z1), t.clone(), cx.zero(), scaled(&id, z2)])?;
            vec![Clause::eq(
                "closed form",
                direct,
                r13_closed_form(z1, z2, cx.norm(t)?),
            )]
        }
        "R14" => {
            let [t] = cx.ops(["T"])?;
            let ts = cx.sharp(t)?;
            let p = cx.norm(&(t * &ts + &ts * t))?;
            let t2 = t * t;
            let w = cx.w_of("T")?;
            let lo = 0.5 * (p + 2.0 * radius::crawford(s, &t2, cfg)?).sqrt();
            let hi = 0.5 * (p + 2.0 * cx.w(&t2)?).sqrt();
            vec![Clause::le("lower", lo, w), Clause::le("upper", w, hi)]
        }
        "R15" | "R16" => {
            let [t] = cx.ops(["T"])?;
            cx.rank_positive(id)?;
            let id_ = identity(cx.n());
            let blocks = [id_.clone(), t.clone(), cx.zero(), -id_];
            let nu = cx.normb(2, &blocks)?;
            let w = cx.wb(2, &blocks)?;
            if id == "R15" {
                let tn = cx.norm(t)?;
                let root = (tn * tn + 4.0).sqrt();
                vec![
                    Clause::eq("2w = v + 1/v", 2.0 * w, nu + nu.recip()),
                    Clause::eq("w = sqrt(||T||^2 + 4)/2", w, 0.5 * root),
                    Clause::eq("v = (||T|| + sqrt(||T||^2 + 4))/2", nu, 0.5 * (tn + root)),
                ]
            } else {
                let big = cx.grid(2, &blocks)?;
                let (re, im) = cx.with_inflated(2, |s2| {
                    let re = radius::op_seminorm(s2, &s2.re_a(&big)?)?;
                    let im = radius::op_seminorm(s2, &s2.im_a(&big)?)?;
                    Ok((re, im))
                })?;
                vec![
                    Clause::eq("||Re|| = w", re, w),
                    Clause::eq("||Im|| = (v - 1/v)/2", im, 0.5 * (nu - nu.recip())),
                ]
            }
        }
        "R17" => {
            let [t] = cx.ops(["T"])?;
            let t2 = t * t;
            let (a, b) = match cx.opts.norm_reading {
                NormReading::ASeminorm => (cx.norm(t)?, cx.norm(&t2)?),
                NormReading::Plain => (norm2(t), norm2(&t2)),
            };
            vec![Clause::le("upper", cx.w_of("T")?, 0.5 * (a + b.sqrt()))]
        }
        "R18" => {
            let [t1, t2, t3, t4] = cx.ops(["T1", "T2", "T3", "T4"])?;
            let full = cx.grid(2, &[t1.clone(), t2.clone(), t3.clone(), t4.clone()])?;
            let sq = &full * &full;
            let (a, b) = match cx.opts.norm_reading {
                NormReading::ASeminorm => cx.with_inflated(2, |s2| {
                    Ok((
                        radius::op_seminorm(s2, &full)?,
                        radius::op_seminorm(s2, &sq)?,
                    ))
                })?,
                NormReading::Plain => (norm2(&full), norm2(&sq)),
            };
            let off = cx.w_offdiag(t2, t3)?;
            let lo = cx.w(&(t2 * t3))?.sqrt().max(cx.w(&(t3 * t2))?.sqrt());
            vec![
                Clause::le("lower", lo, off),
                Clause::le("upper", off, 0.5 * (a + b.sqrt())),
            ]
        }
        "R19" => {
            let [t, s_, x, y] = cx.ops(["T", "S", "X", "Y"])?;
            let bound = 2.0 * cx.norm(t)? * cx.norm(s_)? * cx.w_offdiag(x, y)?;
            let a = t * x * cx.sharp(s_)?;
            let b = s_ * y * cx.sharp(t)?;
            vec![
                Clause::le("+", cx.w(&(&a + &b))?, bound),
                Clause::le("-", cx.w(&(&a - &b))?, bound),
            ]
        }
        "R20" => {
            let [q, s_] = cx.ops(["Q", "S"])?;
            let bound = 2.0 * cx.norm(s_)? * cx.w_of("Q")?;
            let (a, b) = (q * cx.sharp(s_)?, s_ * q);
            vec![
                Clause::le("+", cx.w(&(&a + &b))?, bound),
                Clause::le("-", cx.w(&(&a - &b))?, bound),
            ]
        }
        "R21" => {
            let [t] = cx.ops(["T"])?;
            let p = s.range_projector();
            let w = cx.w_of("T")?;
            vec![
                Clause::eq("w(PT) = w(T)", cx.w(&(p * t))?, w),
                Clause::eq("w(TP) = w(T)", cx.w(&(t * p))?, w),
            ]
        }
        "R22" => {
            let [t1, t2, t3, t4] = cx.ops(["T1", "T2", "T3", "T4"])?;
            let full = cx.wb(2, &[t1.clone(), t2.clone(), t3.clone(), t4.clone()])?;
            let d = t1 + t4;
            let alpha = cx.w(&sum(&[t1, t2, t3, t4]))?.max(cx.w(&(&d - t2 - t3))?);
            let it = scaled(&(t2 - t3), I);
            let beta = cx.w(&(&d + &it))?.max(cx.w(&(&d - &it))?);
            vec![
                Clause::le("alpha", 0.5 * alpha, full),
                Clause::le("beta", 0.5 * beta, full),
            ]
        }
        "R23" => {
            let [t1, t2] = cx.ops(["T1", "T2"])?;
            let z = cx.zero();
            let lhs = cx.wb(2, &[t1.clone(), t2.clone(), z.clone(), z])?;
            let it2 = scaled(t2, I);
            let m = cx.w(&(t1 + &it2))?.max(cx.w(&(t1 - &it2))?);
            vec![Clause::le("lower", 0.5 * m, lhs)]
        }
        "R24" => {
            let [t] = cx.ops(["T"])?;
            let (p, q) = (s.re_a(t)?, s.im_a(t)?);
            let z = cx.zero();
            let half = 0.5 * cx.w_of("T")?;
            vec![
                Clause::le(
                    "[[P, Q], [O, O]]",
                    half,
                    cx.wb(2, &[p.clone(), q.clone(), z.clone(), z])?,
                ),
                Clause::le("[[O, P], [Q, O]]", half, cx.w_offdiag(&p, &q)?),
            ]
        }
        "R25" => {
            let [x, y] = cx.ops(["X", "Y"])?;
            let lhs = cx.w_offdiag(x, y)?;
            let rhs = 0.5 * radius::max_phase_seminorm(s, x, &cx.sharp(y)?, cfg)?;
            vec![Clause::eq("phase formula", lhs, rhs).with_tol(NESTED_REL_TOL)]
        }
        "R26" | "R27" | "R28" => {
            let [t1, t2] = cx.ops(["T1", "T2"])?;
            let p = cx.sharp(t1)? * t1 + t2 * cx.sharp(t2)?;
            let pn = cx.norm(&p)?;
            let t21 = t2 * t1;
            let w21 = cx.w(&t21)?;
            let mix = &p * &t21 + &t21 * &p;
            match id {
                "R26" => {
                    let lhs = cx.w_offdiag(t1, t2)?.powi(4);
                    let rhs = pn * pn / 16.0 + w21 * w21 / 4.0 + cx.w(&mix)? / 8.0;
                    vec![Clause::le("quartic upper", lhs, rhs)]
                }
                "R27" => {
                    let lhs = cx.w(&(t1 * t2))?;
                    let rhs = 0.25 * (pn * pn + 4.0 * w21 * w21 + 2.0 * cx.w(&mix)?).sqrt();
                    vec![Clause::le("upper", lhs, rhs)]
                }
                _ => {
                    let rhs = cx.w_offdiag(t1, t2)?.powi(4);
                    let m = radius::m_a_with(s, &t21, cfg, cx.opts.m_a_reading)?;
                    let lhs = pn * pn / 16.0 + radius::crawford(s, &mix, cfg)? / 8.0 + m * m / 4.0;
                    vec![Clause::le("quartic lower", lhs, rhs)]
                }
            }
        }
        "R29" => {
            let [t1, t2, t3, t4] = cx.ops(["T1", "T2", "T3", "T4"])?;
            let p = if cx.opts.r29_literal_p {
                cx.sharp(t1)? * t1 + t2 * cx.sharp(t2)?
            } else {
                cx.sharp(t2)? * t2 + t3 * cx.sharp(t3)?
            };
            let pn = cx.norm(&p)?;
            let t32 = t3 * t2;
            let mix = &p * &t32 + &t32 * &p;
            let diag = cx.w_of("T1")?.max(cx.w_of("T4")?);
            let full = cx.wb(2, &[t1.clone(), t2.clone(), t3.clone(), t4.clone()])?;
            let w32 = cx.w(&t32)?;
            let up = (pn * pn / 16.0 + cx.w(&mix)? / 8.0 + w32 * w32 / 4.0).powf(0.25);
            let m = radius::m_a_with(s, &t32, cfg, cx.opts.m_a_reading)?;
            let low = (pn * pn / 16.0 + radius::crawford(s, &mix, cfg)? / 8.0 + m * m / 4.0)
                .max(0.0)
                .powf(0.25);
            vec![
                Clause::le("upper", full, diag + up),
                Clause::le("lower", diag.max(low), full),
            ]
        }
        "R30" => {
            let (k, blocks) = match cx.inst.block_shape {
                Some(k) if k >= 2 => {
                    let names: Vec<String> = (1..=k)
                        .flat_map(|i| (1..=k).map(move |j| format!("B{i}{j}")))
                        .collect();
                    (k, resolve(cx, &names)?)
                }
                _ => (2, resolve(cx, &["T1", "T2", "T3", "T4"].map(String::from))?),
            };
            let n = cx.n();
            let pinched: Vec<CMat> = blocks
                .iter()
                .enumerate()
                .map(|(idx, b)| {
                    if idx / k == idx % k {
                        b.clone()
                    } else {
                        CMat::zeros(n, n)
                    }
                })
                .collect();
            vec![Clause::le(
                "pinching",
                cx.wb(k, &pinched)?,
                cx.wb(k, &blocks)?,
            )]
        }
        "R31" => {
            let m = cx.inst.block_shape.unwrap_or(2).max(2);
            let names: Vec<String> = (1..=m).map(|i| format!("T{i}")).collect();
            let ts = resolve(cx, &names)?;
            let total = sum(&ts.iter().collect::<Vec<_>>());
            let n = cx.n();
            let diag_of = |ds: &[CMat]| -> Vec<CMat> {
                (0..m * m)
                    .map(|idx| {
                        if idx / m == idx % m {
                            ds[idx / m].clone()
                        } else {
                            CMat::zeros(n, n)
                        }
                    })
                    .collect()
            };
            let lhs = cx.wb(m, &diag_of(&vec![total; m]))?;
            let rhs = m as f64 * cx.wb(m, &diag_of(&ts))?;
            vec![Clause::le("diag sum", lhs, rhs)]
        }
        other => return Err(Skip::Reason(format!("no evaluator for {other}"))),
    })
}

/// Resolves a dynamic roster of member operators.
fn resolve(cx: &Ctx, names: &[String]) -> Eval<Vec<CMat>> {
    let missing: Vec<String> = names
        .iter()
        .filter(|n| cx.inst.op(n).is_none())
        .cloned()
        .collect();
    if !missing.is_empty() {
        return Err(Skip::Missing(missing));
    }
    let mut out = Vec::with_capacity(names.len());
    for name in names {
        let t = cx.inst.op(name).expect("checked above");
        if !cx.space().in_b_a(t)? {
            return Err(Skip::NonMember(name.to_string()));
        }
        out.push(t.clone());
    }
    Ok(out)
}

/// Largest singular value of `[[|z1|, t], [0, |z2|]]`.
pub fn r13_closed_form(z1: Complex64, z2: Complex64, t_norm: f64) -> f64 {
    let (a, b) = (z1.norm_sqr(), z2.norm_sqr());
    let s = a + b + t_norm * t_norm;
    let disc = (s * s - 4.0 * a * b).max(0.0);
    ((s + disc.sqrt()) / 2.0).sqrt()
}
