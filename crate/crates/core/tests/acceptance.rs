//! Acceptance checks. Runs without the test harness so that every
//! criterion prints one PASS/FAIL line; exits non-zero if any fails.

mod common;

use std::f64::consts::FRAC_1_SQRT_2;
use std::panic;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use cqa::algebra::{numbered_alphabet, relation_series_count, FrobeniusSides};
use cqa::dsl::{self, Evaluator};
use cqa::teleport::{entangling_block, ALICE_STATES};
use cqa::{
    build_component, build_tp, check_frobenius, from_relation, parallel, reference_trace, series,
    Alphabet, CAutomaton, Component, ComplexMatrix, CorrectionSign, Label, Relation, Scalar, StateVector,
    TeleportInput, Teleporter, DEFAULT_TOLERANCE,
};
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn c(re: f64, im: f64) -> Scalar {
    Scalar::new(re, im)
}

fn inputs() -> Vec<TeleportInput> {
    let r = FRAC_1_SQRT_2;
    let mut out = vec![
        TeleportInput::new(c(1.0, 0.0), c(0.0, 0.0)).unwrap(),
        TeleportInput::new(c(0.0, 0.0), c(1.0, 0.0)).unwrap(),
        TeleportInput::new(c(r, 0.0), c(r, 0.0)).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(0x7e1e_9047);
    while out.len() < 23 {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n < 1e-3 {
            continue;
        }
        out.push(TeleportInput::new(c(v[0] / n, v[1] / n), c(v[2] / n, v[3] / n)).unwrap());
    }
    out
}

fn basis(n: usize, k: usize) -> StateVector {
    StateVector::basis(n, k)
}

fn alice(name: &str) -> StateVector {
    basis(7, ALICE_STATES.iter().position(|&s| s == name).unwrap())
}

/// `coef · alice ⊗ q1 ⊗ q2 ⊗ q3 ⊗ bob`, built with Kronecker products.
/// One-dimensional wire factors contribute nothing and are omitted.
fn term(coef: Scalar, a: &str, bits: [usize; 3], bob: usize) -> StateVector {
    alice(a)
        .kron(&basis(2, bits[0]))
        .kron(&basis(2, bits[1]))
        .kron(&basis(2, bits[2]))
        .kron(&basis(2, bob))
        .scale(coef)
}

fn sum(terms: Vec<StateVector>) -> StateVector {
    terms.into_iter().reduce(|x, y| x.try_add(&y).unwrap()).unwrap()
}

/// The five displayed lines of the protocol.
fn displayed_lines(input: &TeleportInput, phase11: f64) -> Vec<StateVector> {
    let (a, b) = (input.alpha(), input.beta());
    let r = c(FRAC_1_SQRT_2, 0.0);
    let h = c(0.5, 0.0);
    let qubit = StateVector::new(vec![a, b]).unwrap();
    let bell = StateVector::real(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2]);
    let s0 = alice("x1").kron(&qubit).kron(&bell).kron(&basis(2, 0));
    let s1 = sum(vec![
        term(r * a, "x2", [0, 0, 0], 0),
        term(r * a, "x2", [0, 1, 1], 0),
        term(r * b, "x2", [1, 1, 0], 0),
        term(r * b, "x2", [1, 0, 1], 0),
    ]);
    let s2 = sum(vec![
        term(h * a, "x3", [0, 0, 0], 0),
        term(h * a, "x3", [1, 0, 0], 0),
        term(h * a, "x3", [0, 1, 1], 0),
        term(h * a, "x3", [1, 1, 1], 0),
        term(h * b, "x3", [0, 1, 0], 0),
        term(-h * b, "x3", [1, 1, 0], 0),
        term(h * b, "x3", [0, 0, 1], 0),
        term(-h * b, "x3", [1, 0, 1], 0),
    ]);
    let s3 = sum(vec![
        term(h * a, "x00", [0, 0, 0], 0),
        term(h * b, "x00", [0, 0, 1], 0),
        term(h * a, "x01", [0, 1, 1], 0),
        term(h * b, "x01", [0, 1, 0], 0),
        term(h * a, "x10", [1, 0, 0], 0),
        term(-h * b, "x10", [1, 0, 1], 0),
        term(h * a, "x11", [1, 1, 1], 0),
        term(-h * b, "x11", [1, 1, 0], 0),
    ]);
    let branch = |name: &str, i: usize, j: usize, phase: f64| {
        alice(name).kron(&basis(2, i)).kron(&basis(2, j)).kron(&qubit).kron(&basis(2, 1)).scale(h * phase)
    };
    let s4 = sum(vec![
        branch("x00", 0, 0, 1.0),
        branch("x01", 0, 1, 1.0),
        branch("x10", 1, 0, 1.0),
        branch("x11", 1, 1, phase11),
    ]);
    vec![s0, s1, s2, s3, s4]
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let inputs = inputs();
    let mut worst: f64 = 0.0;
    for sign in [CorrectionSign::AsPrinted, CorrectionSign::MatchTrace] {
        let tp = Teleporter::new(sign);
        for input in &inputs {
            let run = tp.run(input, 4);
            let reference = reference_trace(input, sign);
            let oracle = displayed_lines(input, sign.branch_phase());
            for (k, ((got, r), o)) in run.steps.iter().zip(&reference.steps).zip(&oracle).enumerate() {
                let d1 = got.max_abs_diff(r).unwrap();
                let d2 = got.max_abs_diff(o).unwrap();
                worst = worst.max(d1).max(d2);
                if d1 > 1e-9 || d2 > 1e-9 {
                    return Err(format!("{sign:?} step {k}: differs from the oracle by {}", d1.max(d2)));
                }
            }
        }
    }
    // Steps 1 to 3 do not depend on the correction sign.
    let (p, m) = (Teleporter::new(CorrectionSign::AsPrinted), Teleporter::new(CorrectionSign::MatchTrace));
    for input in &inputs {
        let (a, b) = (p.run(input, 4), m.run(input, 4));
        if a.steps[..4] != b.steps[..4] {
            return Err("steps 0..3 depend on the correction sign".into());
        }
        // Step 4 differs by a sign on the x11 branch and nowhere else.
        for k in 0..a.steps[4].dim() {
            let on_x11 = k / 16 == 6;
            let (x, y) = (a.steps[4].get(k), b.steps[4].get(k));
            let expected = if on_x11 { -y } else { y };
            if (x - expected).norm() > 1e-12 {
                return Err(format!("step 4 entry {k}: {x} vs {y}"));
            }
        }
    }
    let elapsed = start.elapsed();
    if elapsed > Duration::from_secs(1) {
        return Err(format!("took {elapsed:?}"));
    }
    Ok(format!("23 inputs x 2 signs, max deviation {worst:.1e}, {elapsed:?}"))
}

fn criterion_2() -> Verdict {
    let block = entangling_block();
    let cnot = ComplexMatrix::real(&[
        &[1.0, 0.0, 0.0, 0.0],
        &[0.0, 1.0, 0.0, 0.0],
        &[0.0, 0.0, 0.0, 1.0],
        &[0.0, 0.0, 1.0, 0.0],
    ]);
    let m = block.transition(&Label::tuple(["c", "eps"]), &Label::idle()).map_err(|e| e.to_string())?;
    if m != &cnot {
        return Err(format!("((c,eps),eps) is\n{m}"));
    }
    if !block.is_quantum(1e-9) {
        return Err("composite is not quantum".into());
    }
    if !build_component(Component::Q3, CorrectionSign::AsPrinted).is_quantum(1e-9) {
        return Err("Q3 is not quantum".into());
    }
    Ok("CNOT exact; composite and Q3 quantum".into())
}

/// Δ_A with the pair `(a, (a, a))` redirected to `(a, target)`.
fn redirected_diagonal(a: &Alphabet, i: usize, target: usize) -> Relation {
    let n = a.len();
    Relation::diagonal(a).toggled(i, i * n + i).toggled(i, target)
}

fn criterion_3() -> Verdict {
    for n in [1, 2, 3, 5] {
        if !check_frobenius(&numbered_alphabet(n), 1e-12) {
            return Err(format!("fails for |A|={n}"));
        }
    }
    let mut mutants = 0;
    for n in [2, 3, 5] {
        let a = numbered_alphabet(n);
        let nabla = from_relation(&Relation::diagonal(&a).opposite());
        for i in 0..n {
            for target in (0..n * n).filter(|&t| t != i * n + i) {
                let delta = from_relation(&redirected_diagonal(&a, i, target));
                let sides = FrobeniusSides::build(&a, &delta, &nabla).map_err(|e| e.to_string())?;
                if sides.holds(1e-12) {
                    return Err(format!("mutant |A|={n}, pair {i} -> {target} still passes"));
                }
                mutants += 1;
            }
        }
    }
    Ok(format!("holds for |A| in {{1,2,3,5}}; all {mutants} single-pair mutants of the diagonal fail"))
}

fn timed(label: &str, f: impl FnOnce() -> bool) -> Result<Duration, String> {
    let start = Instant::now();
    let ok = f();
    let t = start.elapsed();
    if !ok {
        return Err(format!("{label} is wrong"));
    }
    if t > Duration::from_millis(10) {
        return Err(format!("{label} took {t:?}"));
    }
    Ok(t)
}

fn criterion_4() -> Verdict {
    let tol = DEFAULT_TOLERANCE;
    let get = |c| build_component(c, CorrectionSign::AsPrinted);
    let (q1, q2, q3, alice, bob) =
        (get(Component::Q1), get(Component::Q2), get(Component::Q3), get(Component::Alice), get(Component::Bob));
    let checks = [
        timed("Q1 quantum", || q1.is_quantum(tol))?,
        timed("Q2 quantum", || q2.is_quantum(tol))?,
        timed("Q3 quantum", || q3.is_quantum(tol))?,
        timed("Alice classical", || alice.is_classical(tol))?,
        timed("Bob classical", || bob.is_classical(tol))?,
        timed("Q1 not classical", || !q1.is_classical(tol))?,
        timed("Alice not quantum", || !alice.is_quantum(tol))?,
    ];
    let slowest = checks.iter().max().unwrap();
    Ok(format!("7 classifications correct, slowest {slowest:?}"))
}

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn law(name: &str, ok: bool, detail: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if ok {
        Ok(())
    } else {
        Err(TestCaseError::fail(format!("{name}: {}", detail())))
    }
}

fn diff(p: &CAutomaton, q: &CAutomaton) -> f64 {
    p.max_transition_diff(q).unwrap_or(f64::INFINITY)
}

fn criterion_5() -> Verdict {
    const CASES: u32 = 256;
    let mut r = runner(CASES);
    r.run(&common::chain(3, common::complex_entry()), |v| {
        let (p, q, s) = (&v[0], &v[1], &v[2]);
        let lhs = series(&series(p, q).unwrap(), s).unwrap();
        let rhs = series(p, &series(q, s).unwrap()).unwrap();
        law("series associativity", lhs.interfaces_match(&rhs) && diff(&lhs, &rhs) <= 1e-12, || {
            format!("difference {}", diff(&lhs, &rhs))
        })
    })
    .map_err(|e| e.to_string())?;

    let mut r = runner(CASES);
    r.run(&common::independent(3, common::dyadic_entry()), |v| {
        let (p, q, s) = (&v[0], &v[1], &v[2]);
        let lhs = parallel(&parallel(p, q), s);
        let rhs = parallel(p, &parallel(q, s));
        law("parallel associativity", lhs.equals(&rhs, 0.0), || format!("difference {}", diff(&lhs, &rhs)))
    })
    .map_err(|e| e.to_string())?;

    let mut r = runner(CASES);
    r.run(&common::independent(1, common::complex_entry()), |v| {
        let p = &v[0];
        let left_id = from_relation(&Relation::identity(p.left()));
        let right_id = from_relation(&Relation::identity(p.right()));
        let l = series(&left_id, p).unwrap();
        let rr = series(p, &right_id).unwrap();
        law("left identity", l.dim() == p.dim() && l.equals(p, 0.0), || format!("difference {}", diff(&l, p)))?;
        law("right identity", rr.dim() == p.dim() && rr.equals(p, 0.0), || format!("difference {}", diff(&rr, p)))
    })
    .map_err(|e| e.to_string())?;

    let mut r = runner(CASES);
    let pairs = (common::chain(2, common::complex_entry()), common::chain(2, common::complex_entry()));
    r.run(&pairs, |(ps, qs)| {
        let (p, p2, q, q2) = (&ps[0], &ps[1], &qs[0], &qs[1]);
        let lhs = series(&parallel(p, q), &parallel(p2, q2)).unwrap();
        let rhs = parallel(&series(p, p2).unwrap(), &series(q, q2).unwrap());
        let ok_alphabets = lhs.left() == rhs.left() && lhs.right() == rhs.right();
        let dims = [p.dim(), q.dim(), p2.dim(), q2.dim()];
        let mut worst: f64 = 0.0;
        for i in 0..lhs.left().len() {
            for j in 0..lhs.right().len() {
                let permuted = lhs.transition_at(i, j).permute_factors(&dims, &[0, 2, 1, 3]).unwrap();
                worst = worst.max(permuted.max_abs_diff(rhs.transition_at(i, j)).unwrap());
            }
        }
        law("interchange", ok_alphabets && worst <= 1e-12, || format!("difference {worst}"))
    })
    .map_err(|e| e.to_string())?;

    Ok(format!("{CASES} cases each: series assoc, parallel assoc, identities, interchange"))
}

fn random_relation(rng: &mut ChaCha8Rng, a: &Alphabet, b: &Alphabet) -> Relation {
    let density = rng.gen_range(0.0..1.0);
    let pairs: Vec<(usize, usize)> =
        (0..a.len()).flat_map(|i| (0..b.len()).map(move |j| (i, j))).collect();
    Relation::from_indices(a.clone(), b.clone(), pairs.into_iter().filter(|_| rng.gen_bool(density)))
}

fn criterion_6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut entries = 0;
    for _ in 0..100 {
        let sizes: [usize; 4] = std::array::from_fn(|_| rng.gen_range(1..=4));
        let al: Vec<Alphabet> = sizes.iter().enumerate().map(|(k, &n)| common::alphabet(&format!("t{k}_"), n)).collect();
        let rho = random_relation(&mut rng, &al[0], &al[1]);
        let sigma = random_relation(&mut rng, &al[1], &al[2]);
        let tau = random_relation(&mut rng, &al[2], &al[3]);
        let two = relation_series_count(&rho, &sigma).map_err(|e| e.to_string())?;
        let three = series(&two, &from_relation(&tau)).map_err(|e| e.to_string())?;
        for i in 0..sizes[0] {
            for k in 0..sizes[2] {
                let count = (0..sizes[1]).filter(|&j| rho.contains_indices(i, j) && sigma.contains_indices(j, k)).count();
                if two.transition_at(i, k).get(0, 0) != c(count as f64, 0.0) {
                    return Err(format!("entry ({i},{k}) of rho;sigma is not {count}"));
                }
                entries += 1;
            }
            for l in 0..sizes[3] {
                let count = (0..sizes[1])
                    .flat_map(|j| (0..sizes[2]).map(move |k| (j, k)))
                    .filter(|&(j, k)| {
                        rho.contains_indices(i, j) && sigma.contains_indices(j, k) && tau.contains_indices(k, l)
                    })
                    .count();
                if three.transition_at(i, l).get(0, 0) != c(count as f64, 0.0) {
                    return Err(format!("entry ({i},{l}) of rho;sigma;tau is not {count}"));
                }
                entries += 1;
            }
        }
    }
    Ok(format!("100 random triples, {entries} entries equal their witness counts"))
}

fn criterion_7() -> Verdict {
    let mut worst: f64 = 0.0;
    for sign in [CorrectionSign::AsPrinted, CorrectionSign::MatchTrace] {
        let tp = Teleporter::new(sign);
        for input in inputs() {
            let report = tp.run(&input, 5);
            worst = worst.max(report.steps[5].norm());
        }
    }
    if worst >= 1e-12 {
        return Err(format!("fifth step has norm {worst}"));
    }
    Ok(format!("fifth step is zero for every input (max norm {worst:.1e})"))
}

fn teleport_source() -> String {
    std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/programs/teleport.cqa")).unwrap()
}

/// A random single edit: delete, duplicate or insert a character, or cut
/// the source short.
fn mutate(src: &str, rng: &mut ChaCha8Rng) -> String {
    const NOISE: &[char] = &['{', '}', '(', ')', '[', ']', ',', ';', ':', '=', '*', '-', '>', '$', '@', '1', 'x'];
    let chars: Vec<char> = src.chars().collect();
    let at = rng.gen_range(0..chars.len());
    let mut out = chars.clone();
    match rng.gen_range(0..4) {
        0 => {
            out.remove(at);
        }
        1 => out.insert(at, chars[at]),
        2 => out.insert(at, NOISE[rng.gen_range(0..NOISE.len())]),
        _ => out.truncate(at),
    }
    out.into_iter().collect()
}

fn criterion_8() -> Verdict {
    let src = teleport_source();
    let program = dsl::parse(&src).map_err(|e| e.to_string())?;
    let tp = dsl::evaluate(&program, "TP").map_err(|e| e.to_string())?;
    let built = build_tp(CorrectionSign::AsPrinted);
    if !tp.equals(&built, 0.0) {
        return Err(format!("program TP differs from the built network by {:?}", tp.max_transition_diff(&built)));
    }

    let lines = src.lines().count() + 1;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut errors, mut tries) = (0, 0);
    while errors < 50 {
        tries += 1;
        if tries > 10_000 {
            return Err("could not produce 50 failing mutants".into());
        }
        let mutant = mutate(&src, &mut rng);
        let outcome = panic::catch_unwind(|| match dsl::parse(&mutant) {
            Ok(p) => {
                let _ = Evaluator::new(&p).all();
                None
            }
            Err(e) => Some(e),
        });
        match outcome {
            Err(_) => return Err(format!("panic on mutant:\n{mutant}")),
            Ok(None) => {}
            Ok(Some(e)) => {
                if e.line == 0 || e.col == 0 || e.line > lines || e.message.is_empty() {
                    return Err(format!("bad position {}:{} in `{}`", e.line, e.col, e.message));
                }
                errors += 1;
            }
        }
    }
    Ok(format!("program TP equals the built network at tolerance 0; 50 parse errors positioned ({tries} mutants)"))
}

fn criterion_9() -> Verdict {
    let q1 = build_component(Component::Q1, CorrectionSign::AsPrinted);
    let found = q1.enumerate_behaviours(&basis(2, 0), 1, DEFAULT_TOLERANCE).map_err(|e| e.to_string())?;
    let pairs: Vec<(String, String)> =
        found.iter().map(|b| (b.left_word[0].to_string(), b.right_word[0].to_string())).collect();
    let expected: Vec<(String, String)> = [("eps", "eps"), ("c", "eps"), ("h", "eps"), ("m0", "eps")]
        .iter()
        .map(|&(a, b)| (a.to_string(), b.to_string()))
        .collect();
    if pairs != expected {
        return Err(format!("got {pairs:?}"));
    }
    Ok("(eps,eps) (c,eps) (h,eps) (m0,eps)".into())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("teleportation trace", criterion_1),
        ("CNOT emergence and quantum composite", criterion_2),
        ("Frobenius equations and negative control", criterion_3),
        ("classification matrix", criterion_4),
        ("algebraic laws", criterion_5),
        ("relation composition counts", criterion_6),
        ("termination of the network", criterion_7),
        ("DSL fidelity", criterion_8),
        ("behaviour enumeration", criterion_9),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.iter().enumerate() {
        let verdict = panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        match verdict {
            Ok(detail) => println!("PASS criterion {} ({name}): {detail}", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {} ({name}): {detail}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
