use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabcert::io;
use stabcert::nonlocality::{self, phi_plus, Behavior};
use stabcert::qudit_graph::{graph_protocol_verify, lemma3_pattern_scan};
use stabcert::sim::dense::pauli_matrix;
use stabcert::sim::{self, dense_projector, dense_run_protocol, tableau_run_protocol};
use stabcert::stabilizer::random::random_group;
use stabcert::stabilizer::{gme_min_generators, max_gme_dimension};
use stabcert::witness::{
    find_witness, pattern_exists_by_enumeration, post_measurement_stabilizers, synthesize_protocol, witness_map, WitnessCertificate,
    WitnessPair,
};
use stabcert::{Error, Letter, SiteLabel};
use std::f64::consts::PI;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

const FIDELITY_TOLERANCE: f64 = 1e-9;
const BOUND_TOLERANCE: f64 = 1e-3;
const CHAINED_TOLERANCE: f64 = 1e-6;
const FIVE_QUBIT_BUDGET: Duration = Duration::from_secs(10);
const FIG1_BUDGET: Duration = Duration::from_secs(5);

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn s(i: usize) -> SiteLabel {
    SiteLabel::unchecked(i)
}

fn cli(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_stabcert")).args(args).output().expect("run stabcert");
    (out.status.code().unwrap_or(-1), String::from_utf8(out.stdout).expect("utf-8 output"))
}

fn json(text: &str) -> serde_json::Value {
    serde_json::from_str(text).expect("valid JSON")
}

type Check = Result<String, String>;
type Criterion = fn() -> Check;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn five_qubit_end_to_end() -> Check {
    let start = Instant::now();
    let path = fixture("five_qubit.stab");
    let path = path.to_str().unwrap();

    let (code, out) = cli(&["gme", path]);
    ensure(code == 0 && json(&out)["gme"] == true, format!("gme exit {code}, output {out}"))?;

    let (code, out) = cli(&["witness", path]);
    let cert: WitnessCertificate = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(code == 0 && cert.pairs.len() == 10 && cert.missing_pairs.is_empty(), format!("witness exit {code}, {} pairs", cert.pairs.len()))?;
    cert.recheck().map_err(|e| e.to_string())?;

    let (code, out) = cli(&["verify", path, "--mode", "both"]);
    let report: sim::CertificateReport = serde_json::from_str(&out).map_err(|e| e.to_string())?;
    ensure(code == 0 && report.passed, format!("verify exit {code}"))?;
    ensure(report.pairs.len() == 10, "expected 10 pair reports")?;
    let mut worst = 1.0f64;
    for p in &report.pairs {
        ensure(p.branch_count == 8 && p.branches_checked == 8 && !p.sampled, format!("pair {:?} checked {} branches", p.pair, p.branches_checked))?;
        ensure(p.max_sign_mismatch == 0 && p.zero_probability_mismatch == 0, format!("pair {:?} engines disagree", p.pair))?;
        let f = p.min_fidelity.ok_or("missing fidelity")?;
        worst = worst.min(f);
        ensure(f >= 1.0 - FIDELITY_TOLERANCE, format!("pair {:?} fidelity {f}", p.pair))?;
    }

    let g = io::read_stab(Path::new(path)).map_err(|e| e.to_string())?;
    let w = WitnessPair::from_vectors(&g, (s(1), s(4)), vec![0, 0, 1, 0], vec![0, 0, 0, 1]).map_err(|e| e.to_string())?;
    let protocol = synthesize_protocol(&w).map_err(|e| e.to_string())?;
    let bases: Vec<(usize, Letter)> = protocol.measured.iter().map(|m| (m.site.index(), m.basis)).collect();
    ensure(bases == vec![(2, Letter::X), (3, Letter::X), (5, Letter::Z)], format!("bases {bases:?}"))?;

    let elapsed = start.elapsed();
    ensure(elapsed < FIVE_QUBIT_BUDGET, format!("took {elapsed:?}"))?;
    Ok(format!("10/10 pairs × 8 branches, min fidelity {worst:.12}, bases 2:X 3:X 5:Z, {elapsed:.2?}"))
}

fn aggregate_numerics() -> Check {
    let (code, out) = cli(&["bound", "--n", "5", "--pairs", "all=0.874"]);
    let v = json(&out);
    let raw = v["raw"].as_f64().ok_or("no raw")?;
    let clamped = v["clamped"].as_f64().ok_or("no clamped")?;
    ensure(code == 0 && (raw - 0.685).abs() <= BOUND_TOLERANCE && (clamped - 0.685).abs() <= BOUND_TOLERANCE, format!("bound {raw} {clamped}"))?;
    let by_hand = 1.0 - 10.0 * (1.0 - 0.874) / 4.0;
    ensure((raw - by_hand).abs() < 1e-12, "library disagrees with direct arithmetic")?;

    let (code, out) = cli(&["thresholds", "--n", "5", "--d", "2"]);
    let v = json(&out);
    ensure(code == 0, format!("thresholds exit {code}"))?;
    ensure(v["pair_requirement"].as_f64() == Some(0.6), format!("pair requirement {}", v["pair_requirement"]))?;
    ensure(v["n_min"].as_u64() == Some(4) && v["m"].as_u64() == Some(11), format!("n_min {} m {}", v["n_min"], v["m"]))?;
    Ok(format!("bound raw {raw:.6} clamped {clamped:.6}; thresholds 0.6, n_min 4, m 11"))
}

fn closed_form(n: usize) -> f64 {
    2.0 * n as f64 * (PI / (4.0 * n as f64)).sin().powi(2)
}

/// Grid search through the full Born-rule behavior with `θ_1 = 0`.
fn grid_minimum(n: usize, steps: usize) -> f64 {
    let step = 2.0 * PI / steps as f64;
    let mut best = f64::INFINITY;
    for mut idx in 0..steps.pow(2 * n as u32 - 1) {
        let mut angles = vec![0.0; 2 * n];
        for a in angles.iter_mut().skip(1) {
            *a = (idx % steps) as f64 * step;
            idx /= steps;
        }
        let b = Behavior::equatorial(&phi_plus(), &angles[..n], &angles[n..]).unwrap();
        best = best.min(nonlocality::chained_value(&b, n, 2).unwrap());
    }
    best
}

fn chained_optimizer() -> Check {
    for (n, steps) in [(2, 24), (3, 12)] {
        let grid = grid_minimum(n, steps);
        ensure((grid - closed_form(n)).abs() < 1e-12, format!("grid at n={n} gives {grid}, closed form {}", closed_form(n)))?;
    }
    let mut worst = 0.0f64;
    for n in 2..=10 {
        let r = nonlocality::quantum_chained_minimum(n, 2).map_err(|e| e.to_string())?;
        let gap = (r.value - closed_form(n)).abs();
        worst = worst.max(gap);
        ensure(gap <= CHAINED_TOLERANCE, format!("n={n}: optimizer {} vs closed form {}", r.value, closed_form(n)))?;
    }
    Ok(format!("grid oracle agrees at n=2,3; n=2..10 max deviation {worst:.2e}"))
}

fn figure_regression() -> Check {
    let start = Instant::now();
    let rows = nonlocality::fig1(4..=40).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let m = |n: usize| rows.iter().find(|r| r.n_parties == n).map(|r| r.m);
    ensure(m(4) == Some(9) && m(5) == Some(11) && m(40) == Some(53), format!("m(4)={:?} m(5)={:?} m(40)={:?}", m(4), m(5), m(40)))?;
    ensure(rows.windows(2).all(|w| w[0].m <= w[1].m), "m decreases somewhere")?;
    ensure(elapsed < FIG1_BUDGET, format!("fig1 took {elapsed:?}"))?;
    let fig2 = nonlocality::fig2(5, 4..=60).map_err(|e| e.to_string())?;
    let first = fig2.first().ok_or("empty fig2")?;
    ensure(first.m == 11 && (first.p_nl_lower - 0.2388).abs() <= BOUND_TOLERANCE, format!("fig2 first row {first:?}"))?;
    Ok(format!("m(4)=9 m(5)=11 m(40)=53 in {elapsed:.2?}; fig2 n=4 → (11, {:.4})", first.p_nl_lower))
}

fn random_sizes(rng: &mut ChaCha8Rng, max_n: usize, max_k: usize) -> (usize, usize) {
    let n = rng.random_range(2..=max_n);
    (n, rng.random_range(1..=n.min(max_k)))
}

fn fact1() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(501);
    for _ in 0..1000 {
        let (n, k) = random_sizes(&mut rng, 12, 12);
        let g = random_group(n, k, &mut rng);
        ensure(g.commutation_matrices().sums_to_zero(), format!("library sum non-zero for {:?}", g.generators()))?;
        let letters: Vec<Vec<Letter>> = g.generators().iter().map(|p| p.letters()).collect();
        for a in 0..k {
            for b in 0..k {
                let parity = (0..n).filter(|&site| letters[a][site].anticommutes(letters[b][site])).count() % 2;
                ensure(parity == 0, format!("generators {a} and {b} anticommute on an odd number of sites"))?;
            }
        }
    }
    Ok("Σ_α C^α = 0 on 1000 groups by matrix sum and by letter counting".into())
}

fn witness_equivalence() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(502);
    let (mut gme, mut agree, mut disagreements) = (0, 0, Vec::new());
    let mut groups = Vec::new();
    for _ in 0..200 {
        let (n, k) = random_sizes(&mut rng, 6, 4);
        groups.push(random_group(n, k, &mut rng));
    }
    groups.push(io::read_stab(&fixture("no_pair_witness.stab")).map_err(|e| e.to_string())?);
    let total = groups.len();
    for g in &groups {
        let n = g.n_qubits();
        let is_gme = g.is_gme().map_err(|e| e.to_string())?.gme;
        let mut all_found = true;
        for a in 1..=n {
            for b in a + 1..=n {
                let found = match find_witness(g, s(a), s(b)) {
                    Ok(_) => true,
                    Err(Error::NotGme { .. } | Error::NoWitness { .. }) => false,
                    Err(e) => return Err(e.to_string()),
                };
                let oracle = pattern_exists_by_enumeration(g, s(a), s(b)).map_err(|e| e.to_string())?;
                if is_gme {
                    ensure(found == oracle, format!("search and enumeration disagree on ({a}, {b}) for {:?}", g.generators()))?;
                }
                all_found &= found;
            }
        }
        gme += is_gme as usize;
        if is_gme == all_found {
            agree += 1;
        } else {
            disagreements.push(g.generators().iter().map(ToString::to_string).collect::<Vec<_>>().join(" "));
        }
    }
    let msg = format!("{agree}/{total} groups agree ({gme} GME; 200 random plus the recorded counterexample); search matches enumeration on every pair");
    if disagreements.is_empty() {
        Ok(msg)
    } else {
        Err(format!("{msg}; GME without all-pairs witnesses: {} groups, first ⟨{}⟩", disagreements.len(), disagreements[0]))
    }
}

fn tableau_dense_agreement() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(503);
    let (mut triples, mut zero) = (0, 0);
    while triples < 500 {
        let (n, k) = random_sizes(&mut rng, 8, 8);
        let g = random_group(n, k, &mut rng);
        let Ok(map) = witness_map(&g) else { continue };
        let found: Vec<_> = map.values().flatten().collect();
        if found.is_empty() {
            continue;
        }
        let rho = dense_projector(&g).map_err(|e| e.to_string())?;
        for _ in 0..4 {
            let w = found[rng.random_range(0..found.len())];
            let p = synthesize_protocol(w).map_err(|e| e.to_string())?;
            let o = p.outcomes_for_branch(rng.random_range(0..1u64 << p.measured.len()));
            let tableau = tableau_run_protocol(&g, &p, &o);
            let dense = dense_run_protocol(&rho, &p, &o);
            match (tableau, dense) {
                (Err(Error::Contradiction { .. }), Err(Error::ZeroProbability)) => zero += 1,
                (Ok((si, sj)), Ok((sigma, _))) => {
                    ensure((si.clone(), sj.clone()) == post_measurement_stabilizers(&p, &o).map_err(|e| e.to_string())?, "tableau differs from sign tables")?;
                    for op in [&si, &sj] {
                        let e = sigma.expectation(op).map_err(|e| e.to_string())?;
                        ensure((e.re - 1.0).abs() < 1e-9 && e.im.abs() < 1e-9, format!("⟨{op}⟩ = {e}"))?;
                    }
                }
                (t, d) => return Err(format!("engines disagree: tableau {t:?}, dense {:?}", d.map(|x| x.1))),
            }
            triples += 1;
        }
    }
    Ok(format!("{triples} triples agree, {zero} of them impossible in both engines"))
}

fn projector_rank() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(504);
    for _ in 0..60 {
        let (n, k) = random_sizes(&mut rng, 8, 8);
        let g = random_group(n, k, &mut rng);
        let dim = g.subspace_dimension().map_err(|e| e.to_string())? as usize;
        let rank = dense_projector(&g).map_err(|e| e.to_string())?.rank(1e-9);
        let size = 1usize << n;
        let mut sum = DMatrix::<Complex64>::zeros(size, size);
        for elem in g.enumerate().map_err(|e| e.to_string())? {
            sum += pauli_matrix(&elem).map_err(|e| e.to_string())?;
        }
        let trace = sum.trace().re / (1u64 << k) as f64;
        ensure(rank == dim, format!("N={n} k={k}: rank {rank}, dimension {dim}"))?;
        ensure((trace - dim as f64).abs() < 1e-9, format!("N={n} k={k}: trace of group average {trace}, dimension {dim}"))?;
    }
    Ok("dimension = projector rank = trace of group average on 60 groups".into())
}

fn qudit_graphs() -> Check {
    let mut lines = Vec::new();
    for (file, q_expected) in [("path3_d2.graph", 2), ("triangle_d3.graph", 3), ("edge_d4_gamma2.graph", 2), ("edge_d6_gamma4.graph", 3)] {
        let gf = io::parse_graph(&io::read_file(&fixture(file)).map_err(|e| e.to_string())?, file).map_err(|e| e.to_string())?;
        let n = gf.graph.n_vertices();
        for a in 1..=n {
            for b in a + 1..=n {
                if gf.graph.multiplicity(s(a), s(b)) % gf.d == 0 {
                    continue;
                }
                let r = graph_protocol_verify(&gf.graph, gf.d, s(a), s(b), FIDELITY_TOLERANCE).map_err(|e| e.to_string())?;
                ensure(r.passed && r.min_fidelity >= 1.0 - FIDELITY_TOLERANCE, format!("{file} pair ({a}, {b}) min fidelity {}", r.min_fidelity))?;
                ensure(r.branches.len() == (gf.d as usize).pow(n as u32 - 2), format!("{file}: {} branches", r.branches.len()))?;
                if file.starts_with("edge") {
                    ensure(r.q == q_expected, format!("{file}: q = {}", r.q))?;
                }
            }
        }
        lines.push(file.trim_end_matches(".graph"));
    }
    let text = io::read_file(&fixture("qutrit_ghz.qstab")).map_err(|e| e.to_string())?;
    let ghz = io::parse_qudit_stab(&text, 3, "qutrit_ghz").map_err(|e| e.to_string())?;
    for (a, b) in [(1, 2), (1, 3), (2, 3)] {
        let hit = lemma3_pattern_scan(&ghz, s(a), s(b)).map_err(|e| e.to_string())?;
        ensure(hit.is_none(), format!("qutrit GHZ has a pattern for ({a}, {b})"))?;
    }
    Ok(format!("{} pass all branches; qutrit GHZ has no pattern for any pair", lines.join(", ")))
}

fn max_dimension() -> Check {
    let formula = |n: u64| 1u64 << (n - ((1.0 + ((8 * n - 7) as f64).sqrt()) / 2.0).ceil() as u64);
    for (n, expected) in [(4u64, 2u64), (11, 64)] {
        let got = max_gme_dimension(n).map_err(|e| e.to_string())?;
        ensure(got == expected && got == formula(n), format!("N={n}: {got}, expected {expected}"))?;
    }
    for n in 4..=60u64 {
        ensure(max_gme_dimension(n).map_err(|e| e.to_string())? == formula(n), format!("N={n} differs from the float formula"))?;
        ensure(gme_min_generators(n) * (gme_min_generators(n) - 1) / 2 >= n - 1, format!("k({n}) too small"))?;
    }
    Ok("N=4 → 2, N=11 → 64, integer and float evaluations agree for N ≤ 60".into())
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("1 five-qubit code end-to-end", five_qubit_end_to_end),
        ("2 aggregate bound and thresholds", aggregate_numerics),
        ("3 chained optimizer", chained_optimizer),
        ("4 figure regression", figure_regression),
        ("5a commutation matrices sum to zero", fact1),
        ("5b GME iff witnesses for all pairs", witness_equivalence),
        ("5c tableau and dense agree", tableau_dense_agreement),
        ("5d projector rank", projector_rank),
        ("6 qudit graph states", qudit_graphs),
        ("7 maximal GME dimension", max_dimension),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let result = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|e| {
            Err(e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_default())
        });
        match result {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
