//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit when any
//! criterion fails.

use std::time::{Duration, Instant};

use quadloop::exact::{rat, rat_int};
use quadloop::isotropy::{deepening_search, is_isotropic, BoxOutcome, SearchConfig, DEFAULT_SEARCH_LIMIT};
use quadloop::loops::{first_repeat, verify_invariant, Loop};
use quadloop::pell::solve_pell;
use quadloop::qform::{diagonalize, LinearForm};
use quadloop::synthesis::synthesize_batch;
use quadloop::{Execution, Int, Matrix, QuadraticEquation, QuadraticForm, Rat, Vector};
use quadloop_cli::{run, Outcome, EXIT_NO_LOOP, EXIT_OK};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CIRCLE_LIMIT: Duration = Duration::from_secs(1);
const KERNEL_LIMIT: Duration = Duration::from_secs(2);
const SWEEP_LIMIT: Duration = Duration::from_secs(60);
const PROPERTY_LIMIT: Duration = Duration::from_secs(120);
const VERIFY_ITERATIONS: usize = 100;
const TERNARY_RANGE: i64 = 20;
const RANDOM_EQUATIONS: usize = 200;
const RANDOM_MATRICES: usize = 500;
const RANDOM_FIVE_FORMS: usize = 100;
const SEED: u64 = 0x5eed_1005;

const CIRCLE: &str = "x^2+y^2-3*x-y=0";
const KERNEL: &str = "-11*x^2+y^2-3*z^2+2*x*y-12*x*z+x+z=-1";
const CIRCLE_REFERENCE: &str = r#"{"kind":"affine","dim":2,"update":[["3/5","-4/5"],["4/5","3/5"]],"init":["2","-1"],"translation":["1","-1"],"vars":["x","y"]}"#;
const KERNEL_REFERENCE: &str = r#"{"kind":"linear","dim":3,"update":[["1","0","0"],["27/4","2","3"],["35/12","1","2"]],"init":["2","-1","-4"],"vars":["x","y","z"]}"#;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn cli(args: &[&str], stdin: &str) -> Outcome {
    run(
        std::iter::once("quadloop").chain(args.iter().copied()),
        &mut stdin.as_bytes(),
    )
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:.2?}, limit {limit:?}"))
    }
}

fn doc_field(json: &str, key: &str) -> String {
    let v: serde_json::Value = serde_json::from_str(json).unwrap();
    v[key].to_string()
}

fn circle() -> Verdict {
    let start = Instant::now();
    let o = cli(&["synth", "--format", "json", CIRCLE], "");
    if o.code != EXIT_OK {
        return Err(format!("synth exited {}: {}", o.code, o.stderr));
    }
    let update = doc_field(&o.stdout, "update");
    let translation = doc_field(&o.stdout, "translation");
    let init = doc_field(&o.stdout, "init");
    if update != r#"[["3/5","-4/5"],["4/5","3/5"]]"# || translation != r#"["1","-1"]"# {
        return Err(format!("update {update}, translation {translation}"));
    }
    let emitted = cli(&["verify", "--loop", "-", "--equation", CIRCLE], &o.stdout);
    let reference = cli(&["verify", "--loop", "-", "--equation", CIRCLE], CIRCLE_REFERENCE);
    if emitted.code != EXIT_OK || reference.code != EXIT_OK {
        return Err(format!(
            "verify: emitted {}, reference {}",
            emitted.stdout.trim(),
            reference.stdout.trim()
        ));
    }
    let t = within(start, CIRCLE_LIMIT)?;
    let how = if init == r#"["2","-1"]"# {
        "exact loop reproduced".to_string()
    } else {
        format!("init {init} instead of [2,-1]; emitted and reference loops both verify")
    };
    Ok(format!("{how}, {VERIFY_ITERATIONS} iterations, {t:.2?}"))
}

fn kernel() -> Verdict {
    let start = Instant::now();
    let reference = cli(&["verify", "--loop", "-", "--equation", KERNEL], KERNEL_REFERENCE);
    if reference.code != EXIT_OK {
        return Err(format!("reference loop: {}", reference.stdout.trim()));
    }
    let o = cli(&["synth", "--format", "json", KERNEL], "");
    if o.code != EXIT_OK {
        return Err(format!("synth exited {}: {}", o.code, o.stderr));
    }
    let emitted = cli(&["verify", "--loop", "-", "--equation", KERNEL], &o.stdout);
    if emitted.code != EXIT_OK || !emitted.stderr.is_empty() {
        return Err(format!(
            "emitted loop: {} {}",
            emitted.stdout.trim(),
            emitted.stderr.trim()
        ));
    }
    let cert = emitted
        .stdout
        .lines()
        .find(|l| l.starts_with("orbit:"))
        .unwrap_or("")
        .to_string();
    let t = within(start, KERNEL_LIMIT)?;
    Ok(format!("reference and emitted loops verify; {cert}; {t:.2?}"))
}

fn pell_table() -> Verdict {
    let cases = [
        ((1, 1), (rat(3, 5), rat(4, 5))),
        ((1, 3), (rat(-11, 13), rat(4, 13))),
        ((3, 1), (rat(1, 7), rat(12, 7))),
        ((1, -1), (rat(5, 3), rat(4, 3))),
    ];
    for ((a, b), (alpha, beta)) in cases {
        let sol = solve_pell(&rat_int(a), &rat_int(b)).map_err(|e| e.to_string())?;
        if (sol.alpha.clone(), sol.beta.clone()) != (alpha.clone(), beta.clone()) {
            return Err(format!("a={a} b={b}: got ({}, {})", sol.alpha, sol.beta));
        }
        if &alpha * &alpha + rat(b, a) * &beta * &beta != rat_int(1) {
            return Err(format!("a={a} b={b}: point off the conic"));
        }
    }
    Ok("four fallback points exact".into())
}

fn negatives() -> Verdict {
    for eq in ["x^2+y^2=-1", "x^2+y^2=3", "x^2=2"] {
        let o = cli(&["synth", eq], "");
        if o.code != EXIT_NO_LOOP {
            return Err(format!("{eq}: exit {}", o.code));
        }
    }
    Ok("three equations exit 1".into())
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

fn isqrt(n: i64) -> i64 {
    let mut r = (n as f64).sqrt() as i64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

/// Square-free, pairwise coprime form with the same isotropy.
fn normal_ternary(mut c: [i64; 3]) -> [i64; 3] {
    loop {
        for x in c.iter_mut() {
            let mut k = 2;
            while k * k <= x.abs() {
                while *x % (k * k) == 0 {
                    *x /= k * k;
                }
                k += 1;
            }
        }
        let g = gcd(gcd(c[0], c[1]), c[2]);
        c.iter_mut().for_each(|x| *x /= g);
        let pair = [(0, 1, 2), (0, 2, 1), (1, 2, 0)]
            .into_iter()
            .find(|&(i, j, _)| gcd(c[i], c[j]) > 1);
        let Some((i, j, l)) = pair else {
            return c;
        };
        let g = gcd(c[i], c[j]);
        c[i] /= g;
        c[j] /= g;
        c[l] *= g;
    }
}

/// A zero exists iff one exists with `|x| ≤ √|bc|`, `|y| ≤ √|ac|`.
fn holzer_search(c: [i64; 3]) -> bool {
    let [a, b, c] = normal_ternary(c);
    for x in 0..=isqrt((b * c).abs()) {
        for y in 0..=isqrt((a * c).abs()) {
            let rest = -(a * x * x + b * y * y);
            if (x, y) != (0, 0) && rest % c == 0 && rest / c >= 0 && isqrt(rest / c).pow(2) == rest / c {
                return true;
            }
        }
    }
    false
}

fn ternary_sweep() -> Verdict {
    let start = Instant::now();
    let range: Vec<i64> = (-TERNARY_RANGE..=TERNARY_RANGE).filter(|&n| n != 0).collect();
    let (mut forms, mut isotropic) = (0usize, 0usize);
    for &a in &range {
        for &b in &range {
            for &c in &range {
                let decided = is_isotropic(&[Int::from(a), Int::from(b), Int::from(c)]).map_err(|e| e.to_string())?;
                if decided != holzer_search([a, b, c]) {
                    return Err(format!("mismatch on ({a}, {b}, {c})"));
                }
                forms += 1;
                isotropic += decided as usize;
            }
        }
    }
    let t = within(start, SWEEP_LIMIT)?;
    Ok(format!("{forms} forms, {isotropic} isotropic, 0 mismatches, {t:.2?}"))
}

fn random_rat(rng: &mut ChaCha8Rng) -> Rat {
    Rat::new(Int::from(rng.gen_range(-9i64..=9)), Int::from(rng.gen_range(1i64..=4)))
}

fn random_symmetric(rng: &mut ChaCha8Rng, d: usize, zero_bias: f64) -> Matrix {
    let mut m = Matrix::zeros(d, d);
    for i in 0..d {
        for j in i..d {
            let q = if rng.gen_bool(zero_bias) {
                rat_int(0)
            } else {
                random_rat(rng)
            };
            m[(i, j)] = q.clone();
            m[(j, i)] = q;
        }
    }
    m
}

/// Equation through a random rational point. A point that is the only real
/// solution (definite form, zero gradient) admits no loop and is redrawn.
fn point_first(rng: &mut ChaCha8Rng) -> QuadraticEquation {
    loop {
        let d = rng.gen_range(2..=5);
        let zero_bias = if rng.gen_bool(0.3) { 0.6 } else { 0.1 };
        let a = random_symmetric(rng, d, zero_bias);
        let linear = rng.gen_bool(0.7);
        let b = Vector::new(
            (0..d)
                .map(|_| if linear { random_rat(rng) } else { rat_int(0) })
                .collect(),
        );
        let p = Vector::new((0..d).map(|_| random_rat(rng)).collect());
        let c = a.quadratic_value(&p) + b.dot(&p);
        let two = rat_int(2);
        let gradient = &(&a * &p).scale(&two) + &b;
        let diag = diagonalize(&QuadraticForm::new(a.clone()).unwrap()).diag;
        let zero = rat_int(0);
        let definite = diag.iter().all(|x| x > &zero) || diag.iter().all(|x| x < &zero);
        if gradient.is_zero() && definite {
            continue;
        }
        return QuadraticEquation::new(QuadraticForm::new(a).unwrap(), LinearForm::new(b), c).unwrap();
    }
}

fn property_suite() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let eqs: Vec<QuadraticEquation> = (0..RANDOM_EQUATIONS).map(|_| point_first(&mut rng)).collect();
    let start = Instant::now();
    let results = synthesize_batch(&eqs, &SearchConfig::default(), Execution::Parallel);
    let mut affine = 0;
    for (k, (eq, res)) in eqs.iter().zip(results).enumerate() {
        let out = res.map_err(|e| format!("equation {k} (d={}): {e}", eq.dim()))?;
        let report = verify_invariant(&out.body, eq, VERIFY_ITERATIONS - 1).map_err(|e| e.to_string())?;
        if let Some(i) = report.first_violation {
            return Err(format!("equation {k}: invariant fails at state {i}"));
        }
        if let Some(i) = first_repeat(&out.body, VERIFY_ITERATIONS) {
            return Err(format!("equation {k}: state {i} repeats"));
        }
        affine += matches!(out.body, Loop::Affine(_)) as usize;
    }
    let t = within(start, PROPERTY_LIMIT)?;
    Ok(format!(
        "{RANDOM_EQUATIONS} equations ({affine} affine loops), {VERIFY_ITERATIONS} distinct exact states each, {t:.2?}"
    ))
}

fn diagonalization() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    for k in 0..RANDOM_MATRICES {
        let d = rng.gen_range(1..=6);
        let zero_bias = rng.gen_range(0.0..0.7);
        let a = random_symmetric(&mut rng, d, zero_bias);
        let diag = diagonalize(&QuadraticForm::new(a.clone()).unwrap());
        let congruent = &(&diag.sigma.transpose() * &a) * &diag.sigma;
        if !congruent.is_diagonal() || congruent.diagonal_entries() != diag.diag {
            return Err(format!("matrix {k}: σᵀAσ not the reported diagonal"));
        }
        if diag.sigma.determinant().map_err(|e| e.to_string())? == rat_int(0) {
            return Err(format!("matrix {k}: σ singular"));
        }
    }
    Ok(format!("{RANDOM_MATRICES} matrices, σᵀAσ diagonal with σ invertible"))
}

fn five_forms() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 5);
    let cfg = SearchConfig::default();
    let mut largest = 0;
    for k in 0..RANDOM_FIVE_FORMS {
        let coeffs: Vec<i64> = loop {
            let v: Vec<i64> = (0..5)
                .map(|_| rng.gen_range(1i64..=100) * if rng.gen_bool(0.5) { 1 } else { -1 })
                .collect();
            if v.iter().any(|&a| a > 0) && v.iter().any(|&a| a < 0) {
                break v;
            }
        };
        let ints: Vec<Int> = coeffs.iter().map(|&a| Int::from(a)).collect();
        if !is_isotropic(&ints).map_err(|e| e.to_string())? {
            return Err(format!("form {k} {coeffs:?} decided anisotropic"));
        }
        let w = match deepening_search(&ints, cfg.budget, DEFAULT_SEARCH_LIMIT, None, Execution::Parallel) {
            BoxOutcome::Found(w) => w,
            other => return Err(format!("form {k} {coeffs:?}: {other:?}")),
        };
        let value: i128 = coeffs
            .iter()
            .zip(&w)
            .map(|(&a, &x)| a as i128 * x as i128 * x as i128)
            .sum();
        if value != 0 || w.iter().all(|&x| x == 0) {
            return Err(format!("form {k} {coeffs:?}: bad witness {w:?}"));
        }
        largest = largest.max(w.iter().copied().max().unwrap_or(0));
    }
    Ok(format!(
        "{RANDOM_FIVE_FORMS} forms isotropic, witnesses verified, largest max-norm {largest}"
    ))
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("circle through the origin", circle),
        ("degenerate ternary with kernel", kernel),
        ("Pell fallback table", pell_table),
        ("negative decisions", negatives),
        ("ternary isotropy against Holzer search", ternary_sweep),
        ("random solvable equations", property_suite),
        ("random diagonalizations", diagonalization),
        ("five-variable mixed-sign forms", five_forms),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name}: {detail}", i + 1);
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
