//! Acceptance suite. Prints one PASS or FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::BTreeMap;
use std::io::Write as _;
use std::panic;
use std::path::PathBuf;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use qexgraph::analysis::{
    group_matchings_by_term, solve_weights, solve_weights_numeric, srv_feasibility, srv_table,
    w_weight_closed_form, FeasibilityKind,
};
use qexgraph::constructors::{
    ame_graph, dicke_weight_classes, general_dicke_graph, ghz_graph, srv_graph,
    symmetric_dicke_graph, synthesize, w_graph, w_weight_classes, ConstructError, TRIGGER,
};
use qexgraph::io::{read_graph, write_graph};
use qexgraph::{
    enumerate_perfect_matchings, is_maximally_entangled, max_disjoint_perfect_matchings, normalize,
    reference_state, schmidt_rank_vector, state_from_graph, states_equal, strip_trigger, Complex64,
    EdgeSpec, ExperimentGraph, ModeColor, QuantumState, TargetSpec, Term,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL: f64 = 1e-9;
const TIME_LIMIT: Duration = Duration::from_secs(10);

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn simulate(graph: &ExperimentGraph) -> Result<QuantumState, String> {
    let raw = state_from_graph(graph).map_err(|e| e.to_string())?;
    normalize(&raw).map_err(|e| e.to_string())
}

fn reference(target: TargetSpec) -> Result<QuantumState, String> {
    reference_state(&target).map_err(|e| e.to_string())
}

fn ghz_family() -> Outcome {
    for n in [4, 6, 8, 10, 12] {
        let target = TargetSpec::Ghz { n, d: 2 };
        let s = synthesize(&target).map_err(|e| e.to_string())?;
        ensure(s.report.matching_count == 2, || {
            format!("{target}: {} matchings", s.report.matching_count)
        })?;
        ensure(states_equal(&s.state, &reference(target)?, TOL), || {
            format!("{target}: state {}", s.state)
        })?;
        let srv = schmidt_rank_vector(&s.state).map_err(|e| e.to_string())?;
        ensure(srv.0 == vec![2; n], || format!("{target}: SRV {srv}"))?;
    }
    let g = ghz_graph(4, 3).map_err(|e| e.to_string())?;
    let disjoint = max_disjoint_perfect_matchings(&g).count;
    ensure(disjoint == 3, || {
        format!("GHZ(4,3): {disjoint} disjoint matchings")
    })?;
    ensure(
        states_equal(
            &simulate(&g)?,
            &reference(TargetSpec::Ghz { n: 4, d: 3 })?,
            TOL,
        ),
        || "GHZ(4,3) state differs".into(),
    )?;
    for (n, d) in [(6, 3), (4, 4)] {
        ensure(
            matches!(ghz_graph(n, d), Err(ConstructError::Unrealizable { .. })),
            || format!("ghz_graph({n},{d}) was not refused as unrealizable"),
        )?;
    }
    Ok("n=4..12 verified with 2 matchings and SRV all 2s; (4,3) has 3 disjoint matchings; (6,3) and (4,4) refused".into())
}

fn complete_graph(n: usize) -> ExperimentGraph {
    let mut specs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            specs.push(EdgeSpec::new(u, v, 0, 0, 1.0));
        }
    }
    ExperimentGraph::build((0..n).map(|i| format!("v{i}")), specs).unwrap()
}

fn matching_oracle() -> Outcome {
    let mut k12 = Duration::ZERO;
    for n in [2, 4, 6, 8, 10, 12] {
        let g = complete_graph(n);
        let start = Instant::now();
        let count = enumerate_perfect_matchings(&g).len();
        if n == 12 {
            k12 = start.elapsed();
        }
        let expected: usize = (1..n).step_by(2).product();
        ensure(count == expected, || {
            format!("K{n}: {count} matchings, expected {expected}")
        })?;
    }
    ensure(k12 < TIME_LIMIT, || format!("K12 took {k12:?}"))?;
    Ok(format!(
        "K2..K12 match (n-1)!!, K12 gives 10395 in {k12:.2?}"
    ))
}

fn w_family() -> Outcome {
    for n in [4, 6, 8, 10] {
        let g = w_graph(n).map_err(|e| e.to_string())?;
        for class in w_weight_classes(&g).iter().filter(|c| c.id == "beta") {
            for id in &class.edges {
                let w = g.edges()[id.0].weight;
                ensure(w == Complex64::new((n - 1) as f64, 0.0), || {
                    format!("W{n}: beta edge weight {w}")
                })?;
            }
        }
        ensure(
            states_equal(&simulate(&g)?, &reference(TargetSpec::W { n })?, TOL),
            || format!("W{n}: state differs from reference"),
        )?;
        for m in enumerate_perfect_matchings(&g) {
            let half_red = m
                .edges(&g)
                .filter(|e| e.count_mode(ModeColor(1)) == 1)
                .count();
            ensure(half_red == 1, || {
                format!("W{n}: matching with {half_red} half-red edges")
            })?;
        }

        let unit = state_from_graph(&general_dicke_graph(n, 1).map_err(|e| e.to_string())?)
            .map_err(|e| e.to_string())?;
        let hub = Term::from_modes((0..n).map(|i| u32::from(i == n - 1)));
        for leaf in 0..n - 1 {
            let term = Term::from_modes((0..n).map(|i| u32::from(i == leaf)));
            let ratio = unit.amplitude(&hub) / unit.amplitude(&term);
            ensure(
                (ratio.re - (n - 1) as f64).abs() < TOL && ratio.im.abs() < TOL,
                || format!("W{n}: unit-weight ratio {ratio}"),
            )?;
        }
    }
    Ok("W4..W10 equal the reference with beta = n-1; unit weights give (n-1):1; one half-red edge per matching".into())
}

fn symmetric_dicke() -> Outcome {
    for n in [4, 6] {
        let g = symmetric_dicke_graph(n).map_err(|e| e.to_string())?;
        ensure(
            states_equal(
                &simulate(&g)?,
                &reference(TargetSpec::Dicke { n, m: n / 2 })?,
                TOL,
            ),
            || format!("Dicke({n},{}) differs from reference", n / 2),
        )?;
        let multiplicity: usize = (1..=n / 2).product();
        for (term, group) in group_matchings_by_term(&g).map_err(|e| e.to_string())? {
            ensure(group.len() == multiplicity, || {
                format!("{term}: {} matchings", group.len())
            })?;
        }
    }
    Ok("Dicke(4,2) and Dicke(6,3) equal the reference with (n/2)! matchings per term".into())
}

fn solver() -> Outcome {
    let g = general_dicke_graph(6, 2).map_err(|e| e.to_string())?;
    let classes = dicke_weight_classes(&g, 2);
    let pinned: BTreeMap<String, f64> = [("delta".to_string(), 1.0)].into();
    let solution = solve_weights(&g, &classes, &pinned).map_err(|e| e.to_string())?;
    let mut value = vec![0.0; g.edges().len()];
    for class in &classes {
        for id in &class.edges {
            value[id.0] = solution.weights[&class.id];
        }
    }
    let weighted = g
        .reweighted(|e| Complex64::new(value[e.id.0], 0.0))
        .map_err(|e| e.to_string())?;
    let state = simulate(&weighted)?;
    ensure(
        solution.spread < TOL && is_maximally_entangled(&state, TOL),
        || format!("D(6,2) spread {:e}", solution.spread),
    )?;
    ensure(
        states_equal(&state, &reference(TargetSpec::Dicke { n: 6, m: 2 })?, TOL),
        || "D(6,2) differs from reference".into(),
    )?;

    for n in [4, 6, 8, 10] {
        let w = general_dicke_graph(n, 1).map_err(|e| e.to_string())?;
        let classes = w_weight_classes(&w);
        let pinned: BTreeMap<String, f64> =
            [("alpha".to_string(), 1.0), ("gamma".to_string(), 1.0)].into();
        let numeric = solve_weights_numeric(&w, &classes, &pinned).map_err(|e| e.to_string())?;
        let closed = w_weight_closed_form(n).map_err(|e| e.to_string())?;
        let beta = numeric.weights["beta"];
        ensure((beta - closed.beta).abs() < TOL, || {
            format!("W{n}: numeric beta {beta}, closed form {}", closed.beta)
        })?;
    }
    let w: Vec<String> = solution
        .weights
        .iter()
        .map(|(k, v)| format!("{k}={v:.4}"))
        .collect();
    Ok(format!(
        "D(6,2) balanced with spread {:.1e} ({}); numeric beta = n-1 for W4..W10",
        solution.spread,
        w.join(", ")
    ))
}

fn srv() -> Outcome {
    let half = Complex64::new(0.5, 0.0);
    let eq5 = QuantumState::from_terms(
        3,
        ["000", "101", "210", "311"].map(|t| (t.parse::<Term>().unwrap(), half)),
    )
    .map_err(|e| e.to_string())?;
    let srv = schmidt_rank_vector(&eq5).map_err(|e| e.to_string())?;
    ensure(srv.0 == vec![4, 2, 2], || {
        format!("example state SRV {srv}")
    })?;

    let expect = [
        ((6, 3, 3), FeasibilityKind::Feasible),
        ((4, 2, 2), FeasibilityKind::Feasible),
        ((6, 3, 2), FeasibilityKind::InfeasiblePairSources),
        ((7, 3, 2), FeasibilityKind::NonexistentState),
    ];
    for ((a, b, c), kind) in expect {
        let v = srv_feasibility(a, b, c).map_err(|e| e.to_string())?;
        ensure(v.kind == kind, || format!("({a},{b},{c}): {v}"))?;
    }

    let mut built = 0;
    for v in srv_table(8).into_iter().filter(|v| v.is_feasible()) {
        let (a, b, c) = (v.a, v.b, v.c);
        let g = srv_graph(a, b, c).map_err(|e| format!("({a},{b},{c}): {e}"))?;
        let state = simulate(&g)?;
        ensure(state.modes_of(TRIGGER).len() == 1, || {
            format!("({a},{b},{c}): trigger varies")
        })?;
        let logical = strip_trigger(&state, TRIGGER).map_err(|e| e.to_string())?;
        ensure(logical.len() == a, || {
            format!("({a},{b},{c}): {} terms", logical.len())
        })?;
        ensure(is_maximally_entangled(&logical, TOL), || {
            format!("({a},{b},{c}): unequal amplitudes")
        })?;
        let srv = schmidt_rank_vector(&logical).map_err(|e| e.to_string())?;
        ensure(srv.0 == vec![a, b, c], || {
            format!("({a},{b},{c}): SRV {srv}")
        })?;
        built += 1;
    }
    Ok(format!("example state is (4,2,2); named cells classified; {built} feasible cells with A <= 8 verified"))
}

fn ame() -> Outcome {
    let g = ame_graph(3, 2).map_err(|e| e.to_string())?;
    let count = enumerate_perfect_matchings(&g).len();
    ensure(count == 4, || format!("{count} perfect matchings"))?;
    let half = Complex64::new(0.5, 0.0);
    let figure = QuantumState::from_terms(
        4,
        ["0000", "0110", "1010", "1100"].map(|t| (t.parse::<Term>().unwrap(), half)),
    )
    .map_err(|e| e.to_string())?;
    let state = simulate(&g)?;
    ensure(states_equal(&state, &figure, TOL), || {
        format!("state {state}")
    })?;
    let logical = strip_trigger(&state, TRIGGER).map_err(|e| e.to_string())?;
    ensure(
        states_equal(
            &logical,
            &reference(TargetSpec::Ame { parties: 3, d: 2 })?,
            TOL,
        ),
        || "logical state differs from AME(3,2)".into(),
    )?;
    ensure(
        matches!(ame_graph(3, 3), Err(ConstructError::Unrealizable { .. })),
        || "AME(3,3) not refused".into(),
    )?;
    Ok("AME(3,2) graph has 4 matchings and gives the figure state; AME(3,3) refused".into())
}

fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    max_edges: usize,
    max_mode: u32,
    complex: bool,
) -> ExperimentGraph {
    let edges = rng.random_range(0..=max_edges);
    let specs = (0..edges)
        .map(|_| {
            let u = rng.random_range(0..n);
            let v = (u + rng.random_range(1..n)) % n;
            let weight = if complex {
                Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0))
            } else {
                Complex64::new(1.0, 0.0)
            };
            EdgeSpec::new(
                u,
                v,
                rng.random_range(0..=max_mode),
                rng.random_range(0..=max_mode),
                0.0,
            )
            .with_weight(weight)
        })
        .collect::<Vec<_>>();
    ExperimentGraph::build((0..n).map(|i| format!("v{i}")), specs).unwrap()
}

fn four_vertex_bound() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut most = 0;
    for trial in 0..1000 {
        let g = random_graph(&mut rng, 4, 20, 3, false);
        let count = max_disjoint_perfect_matchings(&g).count;
        ensure(count <= 3, || {
            format!("graph {trial} packs {count} disjoint matchings")
        })?;
        most = most.max(count);
    }
    Ok(format!(
        "1000 random 4-vertex multigraphs, at most {most} disjoint matchings"
    ))
}

fn cli(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut argv = vec!["qexgraph"];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = qexgraph_cli::run(argv, &mut stdin.as_bytes(), &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn binary(args: &[&str], stdin: &str) -> Result<(i32, Vec<u8>), String> {
    let mut child = Command::new(env!("CARGO_BIN_EXE_qexgraph"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|e| e.to_string())?;
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .map_err(|e| e.to_string())?;
    let output = child.wait_with_output().map_err(|e| e.to_string())?;
    Ok((output.status.code().unwrap_or(-1), output.stdout))
}

fn feasible_matrix() -> Vec<Vec<String>> {
    let mut specs: Vec<Vec<String>> = Vec::new();
    let mut push = |flags: &[(&str, usize)], target: &str| {
        let mut v = vec!["--target".to_string(), target.to_string()];
        for (flag, value) in flags {
            v.push(format!("--{flag}"));
            v.push(value.to_string());
        }
        specs.push(v);
    };
    for n in [4, 6, 8, 10, 12] {
        push(&[("n", n), ("d", 2)], "ghz");
    }
    push(&[("n", 4), ("d", 3)], "ghz");
    for n in [4, 6, 8, 10] {
        push(&[("n", n)], "w");
    }
    for (n, m) in [(4, 2), (6, 3), (6, 2), (6, 1)] {
        push(&[("n", n), ("m", m)], "dicke");
    }
    push(&[("n", 3), ("d", 2)], "ame");
    for v in srv_table(8).into_iter().filter(|v| v.is_feasible()) {
        push(&[("A", v.a), ("B", v.b), ("C", v.c)], "srv");
    }
    specs
}

fn round_trips() -> Outcome {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-round-trip");
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..50 {
        let n = 2 * rng.random_range(1..=5);
        let g = random_graph(&mut rng, n, 16, 11, true);
        let path = dir.join(format!("graph-{i}.json"));
        write_graph(&path, &g).map_err(|e| e.to_string())?;
        let back = read_graph(&path).map_err(|e| e.to_string())?;
        ensure(back == g, || format!("graph {i} changed on round trip"))?;
    }

    let matrix = feasible_matrix();
    for spec in &matrix {
        let mut synth = vec!["synth"];
        synth.extend(spec.iter().map(String::as_str));
        let (code, document, err) = cli(&synth, "");
        ensure(code == 0, || {
            format!("synth {}: exit {code}: {err}", spec.join(" "))
        })?;
        let mut verify = vec!["verify", "-"];
        verify.extend(spec.iter().map(String::as_str));
        let (code, _, err) = cli(&verify, &document);
        ensure(code == 0, || {
            format!("verify {}: exit {code}: {err}", spec.join(" "))
        })?;
    }

    let (_, ghz, _) = cli(&["synth", "--target", "ghz", "--n", "6"], "");
    let (_, w, _) = cli(&["synth", "--target", "w", "--n", "6"], "");
    let runs: Vec<(Vec<&str>, &str)> = vec![
        (
            vec!["synth", "--target", "dicke", "--n", "6", "--m", "2"],
            "",
        ),
        (
            vec![
                "synth", "--target", "srv", "--A", "6", "--B", "3", "--C", "3",
            ],
            "",
        ),
        (vec!["simulate"], &w),
        (vec!["srv"], &ghz),
        (vec!["classify"], &w),
        (vec!["export-dot"], &w),
        (vec!["export-experiment"], &ghz),
        (vec!["feasible", "6", "3", "2"], ""),
        (vec!["table", "--max-a", "8"], ""),
        (vec!["table", "--max-a", "8", "--format", "csv"], ""),
    ];
    for (args, stdin) in &runs {
        let first = binary(args, stdin)?;
        let second = binary(args, stdin)?;
        ensure(first == second, || {
            format!("`{}` output differs between runs", args.join(" "))
        })?;
        ensure(!first.1.is_empty(), || {
            format!("`{}` printed nothing", args.join(" "))
        })?;
    }
    Ok(format!(
        "50 file round trips; verify(synth) exits 0 for all {} feasible specs; {} commands byte-stable",
        matrix.len(),
        runs.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("GHZ family", ghz_family),
        ("matching oracle", matching_oracle),
        ("W family", w_family),
        ("symmetric Dicke", symmetric_dicke),
        ("general Dicke and solver", solver),
        ("SRV", srv),
        ("AME", ame),
        ("four-vertex bound", four_vertex_bound),
        ("round trips", round_trips),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = Vec::new();
    for (index, (title, check)) in criteria.into_iter().enumerate() {
        let id = index + 1;
        let start = Instant::now();
        let outcome = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if elapsed > TIME_LIMIT {
                Err(format!("{detail}; took longer than {TIME_LIMIT:?}"))
            } else {
                Ok(detail)
            }
        });
        match outcome {
            Ok(detail) => println!("PASS {id} {title}: {detail} ({elapsed:.2?})"),
            Err(why) => {
                println!("FAIL {id} {title}: {why} ({elapsed:.2?})");
                failed.push(id);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: 9/9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
