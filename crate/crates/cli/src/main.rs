//! Command-line front end: deterministic key=value reports over the
//! computation engine. Exit codes partition the error classes:
//! 1 usage, 2 parse, 3 matrix/graph validation, 4 order violation,
//! 5 dimension mismatch, 6 operation failure.

mod formats;
mod report;

use std::process::ExitCode;
use std::sync::Arc;

use ck_core::cocycle::{chain_identities, witness_search, CocycleChain};
use ck_core::element::Generator;
use ck_core::endo::EndoError;
use ck_core::ktheory;
use ck_core::literal;
use ck_core::matrix::ZeroOneMatrix;
use ck_core::oracle::TruncatedRep;
use ck_core::rokhlin::{build_averaged_unitary, RokhlinModel};
use ck_core::shift::{corner_formula_check, phi_iterated, phi_power};
use ck_core::CKElement;

use formats::FormatError;
use report::Report;

const USAGE: &str = "usage: ckalg <command> [flags]

commands:
  analyze      --matrix FILE | --graph FILE   [--verify-oracle] [--explain]
  ktheory      --matrix FILE                  [--explain]
  action       --matrix FILE --action FILE [--verify] [--cocycle K]
               [--witness K] [--fixed K] [--eps E] [--budget B] [--seed S]
  witness      --matrix FILE --action FILE --level K --eps E
               [--budget B] [--seed S]
  rokhlin-demo --r R --order N [--blocks 1|2]
  shift        --matrix FILE --element LIT [--phi-power K]
               [--corner I J K] [--zeta-order N] [--verify-oracle]

reports are sorted key=value lines; --explain appends prose notes.";

fn main() -> ExitCode {
    let args: Vec<String> = std::env::args().skip(1).collect();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("ckalg: {message}");
            ExitCode::from(code)
        }
    }
}

type Failure = (u8, String);

fn usage(message: &str) -> Failure {
    (1, format!("{message}\n{USAGE}"))
}

struct Flags {
    values: std::collections::BTreeMap<String, Vec<String>>,
}

impl Flags {
    fn parse(args: &[String]) -> Result<Self, Failure> {
        let mut values: std::collections::BTreeMap<String, Vec<String>> =
            std::collections::BTreeMap::new();
        let mut i = 0;
        while i < args.len() {
            let flag = &args[i];
            if !flag.starts_with("--") {
                return Err(usage(&format!("unexpected argument {flag}")));
            }
            let name = flag.trim_start_matches("--").to_string();
            let arity = match name.as_str() {
                "verify" | "explain" | "verify-oracle" => 0,
                "corner" => 3,
                _ => 1,
            };
            let mut vals = Vec::new();
            for k in 0..arity {
                let v = args
                    .get(i + 1 + k)
                    .ok_or_else(|| usage(&format!("--{name} expects {arity} value(s)")))?;
                vals.push(v.clone());
            }
            i += 1 + arity;
            values.insert(name, vals);
        }
        Ok(Flags { values })
    }

    fn has(&self, name: &str) -> bool {
        self.values.contains_key(name)
    }

    fn get(&self, name: &str) -> Option<&str> {
        self.values.get(name).and_then(|v| v.first()).map(String::as_str)
    }

    fn get_all(&self, name: &str) -> Option<&[String]> {
        self.values.get(name).map(Vec::as_slice)
    }

    fn parse_num<T: std::str::FromStr>(&self, name: &str) -> Result<Option<T>, Failure> {
        match self.get(name) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| usage(&format!("--{name}: cannot parse {v}"))),
        }
    }

    fn require<T: std::str::FromStr>(&self, name: &str) -> Result<T, Failure> {
        self.parse_num(name)?
            .ok_or_else(|| usage(&format!("--{name} is required")))
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| (2, format!("cannot read {path}: {e}")))
}

fn format_failure(e: FormatError) -> Failure {
    match e {
        FormatError::Parse(m) => (2, m),
        FormatError::Matrix(m) => (3, m.to_string()),
        FormatError::Graph(g) => (3, g.to_string()),
    }
}

fn endo_failure(e: EndoError) -> Failure {
    match e {
        EndoError::OrderViolation { generator } => {
            (4, format!("generator {generator} violates its declared order"))
        }
        EndoError::WrongLength { expected, got } => {
            (5, format!("dimension mismatch: expected {expected}, got {got}"))
        }
        other => (6, other.to_string()),
    }
}

fn op_failure(e: impl std::fmt::Display) -> Failure {
    (6, e.to_string())
}

fn load_matrix(flags: &Flags) -> Result<Arc<ZeroOneMatrix>, Failure> {
    let path = flags
        .get("matrix")
        .ok_or_else(|| usage("--matrix is required"))?;
    let text = read_file(path)?;
    Ok(formats::parse_matrix(&text).map_err(format_failure)?.shared())
}

fn run(args: &[String]) -> Result<(), Failure> {
    let command = args.first().ok_or_else(|| usage("missing command"))?;
    let flags = Flags::parse(&args[1..])?;
    match command.as_str() {
        "analyze" => cmd_analyze(&flags),
        "ktheory" => cmd_ktheory(&flags),
        "action" => cmd_action(&flags),
        "witness" => cmd_witness(&flags),
        "rokhlin-demo" => cmd_rokhlin_demo(&flags),
        "shift" => cmd_shift(&flags),
        other => Err(usage(&format!("unknown command {other}"))),
    }
}

fn cmd_analyze(flags: &Flags) -> Result<(), Failure> {
    let mut report = Report::new();
    let matrix = if let Some(path) = flags.get("graph") {
        let text = read_file(path)?;
        let graph = formats::parse_graph(&text).map_err(format_failure)?;
        report.set("graph_edges", graph.edges().len());
        report.set("graph_vertices", graph.vertices().len());
        report.set(
            "strongly_connected_aperiodic",
            graph.is_strongly_connected_aperiodic(),
        );
        report.note("the matrix analyzed below is the edge matrix of the graph");
        graph.edge_matrix().map_err(|e| (3, e.to_string()))?.shared()
    } else {
        load_matrix(flags)?
    };
    report.set("valid", true);
    report.set("n", matrix.n());
    let exponent = matrix.aperiodicity_exponent();
    report.set("aperiodic", exponent.is_some());
    match exponent {
        Some(m) => {
            report.set("m", m);
            report.set("kirchberg", "reported");
            report.note(
                "aperiodic matrices yield unital Kirchberg algebras; \
                 this classification fact is reported, not verified here",
            );
        }
        None => report.set("kirchberg", "not-applicable"),
    }
    report.set("permutation", matrix.is_permutation());
    report.set("classes", matrix.column_classes().len());
    report.set(
        "commutant_dim_level1",
        CKElement::diagonal_commutant_basis(&matrix, 1).len(),
    );
    if flags.has("verify-oracle") {
        report.set("relations_oracle", check_relations_oracle(&matrix)?);
    }
    report.print(flags.has("explain"));
    Ok(())
}

/// Checks the defining relations against the truncated representation.
fn check_relations_oracle(matrix: &Arc<ZeroOneMatrix>) -> Result<&'static str, Failure> {
    let rep = TruncatedRep::new(matrix, 8);
    let one = CKElement::unit(matrix);
    let mut ok = true;
    let mut sum = CKElement::zero(matrix);
    for i in matrix.letters() {
        let si = CKElement::generator(matrix, Generator::S(i)).map_err(op_failure)?;
        let qi = CKElement::generator(matrix, Generator::Q(i)).map_err(op_failure)?;
        let pi = CKElement::generator(matrix, Generator::P(i)).map_err(op_failure)?;
        sum = sum.add(&pi).map_err(op_failure)?;
        let lhs = si.adjoint().multiply(&si).map_err(op_failure)?;
        ok &= rep.oracle_check(&lhs, &qi, 2, 1e-9).map_err(op_failure)?;
        for j in matrix.letters() {
            if i == j {
                continue;
            }
            let sj = CKElement::generator(matrix, Generator::S(j)).map_err(op_failure)?;
            let prod = si.adjoint().multiply(&sj).map_err(op_failure)?;
            let zero = CKElement::zero(matrix);
            ok &= rep.oracle_check(&prod, &zero, 2, 1e-9).map_err(op_failure)?;
        }
    }
    ok &= rep.oracle_check(&sum, &one, 2, 1e-9).map_err(op_failure)?;
    Ok(if ok { "pass" } else { "fail" })
}

fn cmd_ktheory(flags: &Flags) -> Result<(), Failure> {
    let matrix = load_matrix(flags)?;
    let report_data = ktheory::is_o2(&matrix);
    let mut report = Report::new();
    report.set("K0", report_data.kgroups.k0_string());
    report.set("K1", report_data.kgroups.k1_string());
    report.set("O2", report_data.is_o2);
    report.set("aperiodic", report_data.aperiodicity_exponent.is_some());
    if let Some(m) = report_data.aperiodicity_exponent {
        report.set("m", m);
    }
    report.note(report_data.explanation);
    report.print(flags.has("explain"));
    Ok(())
}

fn cmd_action(flags: &Flags) -> Result<(), Failure> {
    let matrix = load_matrix(flags)?;
    let action_path = flags
        .get("action")
        .ok_or_else(|| usage("--action is required"))?;
    let spec = formats::parse_action(&read_file(action_path)?).map_err(format_failure)?;
    for row in &spec.eigen_rows {
        if row.exponents.len() != matrix.n() {
            return Err((
                5,
                format!(
                    "dimension mismatch: action rows have {} entries, matrix size is {}",
                    row.exponents.len(),
                    matrix.n()
                ),
            ));
        }
    }
    let action = spec.verify(&matrix).map_err(endo_failure)?;
    let mut report = Report::new();
    report.set("action", "verified");
    report.set(
        "group",
        action
            .spec()
            .group_orders
            .iter()
            .map(u32::to_string)
            .collect::<Vec<_>>()
            .join("x"),
    );
    for t in 0..action.generator_count() {
        report.set(
            &format!("unitary[{t}]"),
            literal::render_element(action.unitary(t).element()),
        );
    }
    if let Some(k) = flags.parse_num::<usize>("cocycle")? {
        for t in 0..action.generator_count() {
            let chain = CocycleChain::build(action.unitary(t), k).map_err(op_failure)?;
            chain_identities(&chain, action.spec().group_orders[t]).map_err(op_failure)?;
        }
        report.set("identities", "pass");
        report.set("cocycle_k", k);
    }
    if let Some(k) = flags.parse_num::<usize>("fixed")? {
        let basis = action.fixed_point_core_basis(k, false);
        report.set(&format!("fixed_core_dim[{k}]"), basis.len());
        let commutant = action.fixed_point_core_basis(k, true);
        report.set(&format!("fixed_commutant_dim[{k}]"), commutant.len());
    }
    if let Some(level) = flags.parse_num::<usize>("witness")? {
        run_witness(&mut report, &action, level, flags)?;
    }
    report.print(flags.has("explain"));
    Ok(())
}

fn run_witness(
    report: &mut Report,
    action: &ck_core::VerifiedAction,
    level: usize,
    flags: &Flags,
) -> Result<(), Failure> {
    let eps: f64 = flags.parse_num("eps")?.unwrap_or(1e-9);
    let seed: u64 = flags.parse_num("seed")?.unwrap_or(0);
    let budget: usize = flags.parse_num("budget")?.unwrap_or(10_000);
    report.set("witness_level", level);
    report.set_f64("witness_eps", eps, 12);
    report.set("seed", seed);
    for t in 0..action.generator_count() {
        let trace = witness_search(action, t, level, eps, budget, seed).map_err(op_failure)?;
        for (k, d) in trace.defects.iter().enumerate() {
            let key = if action.generator_count() == 1 {
                format!("witness_defect[{k}]")
            } else {
                format!("witness{t}_defect[{k}]")
            };
            report.set_f64(&key, *d, 9);
        }
    }
    Ok(())
}

fn cmd_witness(flags: &Flags) -> Result<(), Failure> {
    let matrix = load_matrix(flags)?;
    let action_path = flags
        .get("action")
        .ok_or_else(|| usage("--action is required"))?;
    let spec = formats::parse_action(&read_file(action_path)?).map_err(format_failure)?;
    let action = spec.verify(&matrix).map_err(endo_failure)?;
    let level: usize = flags.require("level")?;
    let mut report = Report::new();
    run_witness(&mut report, &action, level, flags)?;
    report.print(flags.has("explain"));
    Ok(())
}

fn cmd_rokhlin_demo(flags: &Flags) -> Result<(), Failure> {
    let r: usize = flags.require("r")?;
    let order: u32 = flags.require("order")?;
    if r < 2 || order == 0 {
        return Err(usage("--r must be at least 2 and --order positive"));
    }
    let blocks: usize = flags.parse_num("blocks")?.unwrap_or(1);
    let model = match blocks {
        1 => RokhlinModel::scalar_cycles(r, order),
        2 => RokhlinModel::block2_cycles(r, order),
        _ => return Err(usage("--blocks must be 1 or 2")),
    };
    let (_, result) = build_averaged_unitary(&model).map_err(op_failure)?;
    let mut report = Report::new();
    report.set("blocks", blocks);
    report.set("r", r);
    report.set("order", order);
    report.set_f64("defect", result.defect, 4);
    report.set_f64("bound", result.bound, 4);
    report.set("pass", result.passes);
    report.note(format!(
        "assembled unitary deviates from exactness by {:.3e}",
        result.unitarity_error
    ));
    report.print(flags.has("explain"));
    Ok(())
}

fn cmd_shift(flags: &Flags) -> Result<(), Failure> {
    let matrix = load_matrix(flags)?;
    let zeta: u32 = flags.parse_num("zeta-order")?.unwrap_or(12);
    let literal_text = flags
        .get("element")
        .ok_or_else(|| usage("--element is required"))?;
    let x = literal::parse_element(&matrix, literal_text, zeta).map_err(|e| (2, e.to_string()))?;
    let mut report = Report::new();
    report.set("element", literal::render_element(&x));
    if let Some(k) = flags.parse_num::<usize>("phi-power")? {
        let image = phi_power(&x, k);
        report.set("power", k);
        report.set("image", literal::render_element(&image));
        if flags.has("verify-oracle") {
            let iterated = phi_iterated(&x, k);
            let max_len = image
                .terms()
                .keys()
                .map(|(mu, nu)| mu.len().max(nu.len()))
                .max()
                .unwrap_or(0);
            let rep = TruncatedRep::new(&matrix, max_len + 3);
            let ok = rep
                .oracle_check(&image, &iterated, 2, 1e-9)
                .map_err(op_failure)?;
            report.set("oracle", if ok { "pass" } else { "fail" });
        }
    }
    if let Some(params) = flags.get_all("corner") {
        let parse = |s: &String| -> Result<usize, Failure> {
            s.parse().map_err(|_| usage("--corner expects integers"))
        };
        let class_i = parse(&params[0])?;
        let class_j = parse(&params[1])?;
        let k = parse(&params[2])?;
        let corner = corner_formula_check(&matrix, class_i, class_j, k, &x).map_err(op_failure)?;
        report.set("corner_equal", corner.equal);
        report.set(
            "corner_witnesses",
            corner
                .witnesses
                .iter()
                .map(|w| literal::render_word(w))
                .collect::<Vec<_>>()
                .join(","),
        );
        report.set("corner_lhs", literal::render_element(&corner.lhs));
        report.set("corner_rhs", literal::render_element(&corner.rhs));
    }
    report.print(flags.has("explain"));
    Ok(())
}
