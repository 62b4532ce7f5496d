//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use cod_core::analysis::{max_rate, min_delay};
use cod_core::equivalence::{apply_op, canonicalize, scramble};
use cod_core::fixtures::example_433;
use cod_core::generator::{
    build_extension_system, construct_g, extend_g, extended_design, row_ids, theta, ExtensionResult,
};
use cod_core::io::{read_certificate, read_design, write_design};
use cod_core::oracle::{enumerate_cods, Placement, SearchSpec};
use cod_core::{verify_numeric, verify_symbolic, BitVec, CodMatrix};

type Verdict = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Verdict + 'a>);

fn cod(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_cod"))
        .args(args)
        .output()
        .expect("cod binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

fn load(path: &Path) -> Result<CodMatrix, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    read_design(&text).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn generation(dir: &Path) -> Verdict {
    let start = Instant::now();
    for m in 1..=5u64 {
        let path = dir.join(format!("g{m}.json"));
        let (code, _) = cod(&[
            "generate",
            "-m",
            &m.to_string(),
            "-o",
            path.to_str().unwrap(),
        ]);
        ensure(code == 0, || format!("generate -m {m} exited {code}"))?;
        let g = load(&path)?;
        let expected = (
            binom(2 * m, m - 1) as usize,
            2 * m as usize - 1,
            binom(2 * m - 1, m - 1) as usize,
        );
        ensure(g.params() == expected, || {
            format!("m={m}: {:?} != {expected:?}", g.params())
        })?;
        ensure(verify_symbolic(&g).ok, || {
            format!("m={m} fails verification")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "m=1..5 dims exact and orthogonal in {:.2}s",
        elapsed.as_secs_f64()
    ))
}

fn worked_example() -> Verdict {
    let e = example_433();
    ensure(verify_symbolic(&e).ok, || {
        "worked example fails verification".into()
    })?;
    let patterns: Vec<String> = (0..e.p())
        .map(|r| e.zero_pattern(r).unwrap().to_string())
        .collect();
    let expected = ["111", "110", "101", "011"];
    ensure(patterns == expected, || {
        format!("zero patterns {patterns:?}")
    })?;
    Ok("orthogonal; zero patterns 111 110 101 011".into())
}

fn even_extension(dir: &Path) -> Verdict {
    let path = dir.join("ext2.json");
    let (code, _) = cod(&["extend", "-m", "2", "-o", path.to_str().unwrap()]);
    ensure(code == 0, || format!("extend -m 2 exited {code}"))?;
    let ext = load(&path)?;
    ensure(ext.params() == (4, 4, 3), || {
        format!("shape {:?}", ext.params())
    })?;
    ensure(verify_symbolic(&ext).ok, || {
        "extension fails verification".into()
    })?;
    let ExtensionResult::Column {
        solution_count_log2,
        ..
    } = extend_g(2).map_err(|e| e.to_string())?
    else {
        return Err("no column at m=2".into());
    };
    ensure(solution_count_log2 == 1, || {
        format!("log2 count {solution_count_log2}")
    })?;
    // brute force over every assignment of the unknowns
    let system = build_extension_system(&construct_g(2).unwrap()).map_err(|e| e.to_string())?;
    let unknowns = system.unknowns().to_vec();
    let solutions = (0u32..1 << unknowns.len())
        .filter(|bits| {
            let assignment: BTreeMap<BitVec, bool> = unknowns
                .iter()
                .enumerate()
                .map(|(t, &u)| (u, bits >> t & 1 == 1))
                .collect();
            system.satisfied_by(&assignment)
        })
        .count();
    ensure(solutions == 2, || {
        format!("{solutions} brute-force solutions")
    })?;
    Ok("[4,4,3] orthogonal; 2 sign assignments (log2 = 1)".into())
}

fn odd_nonexistence(dir: &Path) -> Verdict {
    let mut lengths = Vec::new();
    for m in [1usize, 3, 5] {
        let path = dir.join(format!("cert{m}.json"));
        let p = path.to_str().unwrap();
        let (code, _) = cod(&["extend", "-m", &m.to_string(), "--certificate", p]);
        ensure(code == 1, || format!("extend -m {m} exited {code}"))?;
        let text = std::fs::read_to_string(&path).map_err(|e| e.to_string())?;
        let (cm, cert) = read_certificate(&text).map_err(|e| e.to_string())?;
        ensure(cm == m, || format!("certificate m = {cm}"))?;
        let parity = cert.cycle.iter().fold(false, |acc, c| acc ^ c.parity);
        ensure(parity, || format!("m={m}: parity sum 0"))?;
        let system = build_extension_system(&construct_g(m).unwrap()).map_err(|e| e.to_string())?;
        cert.check(Some(&system))
            .map_err(|e| format!("m={m}: {e}"))?;
        let (vcode, _) = cod(&["verify", "--certificate", p]);
        ensure(vcode == 0, || {
            format!("verify --certificate for m={m} exited {vcode}")
        })?;
        lengths.push(format!("m={m}: {} steps", cert.cycle.len()));
    }
    Ok(format!(
        "odd-parity cycles re-validated ({})",
        lengths.join(", ")
    ))
}

fn uniqueness() -> Verdict {
    let mut notes = Vec::new();
    for m in 2..=4 {
        let start = Instant::now();
        let g = construct_g(m).unwrap();
        let reference = write_design(&canonicalize(&g).map_err(|e| e.to_string())?);
        for seed in 0..100 {
            let (s, _) = scramble(&g, seed, 50).map_err(|e| e.to_string())?;
            let c = write_design(&canonicalize(&s).map_err(|e| e.to_string())?);
            ensure(c == reference, || format!("m={m} seed={seed} differs"))?;
        }
        let elapsed = start.elapsed();
        if m == 4 {
            ensure(elapsed < Duration::from_secs(60), || {
                format!("m=4 took {elapsed:?}")
            })?;
        }
        notes.push(format!("m={m} {:.2}s", elapsed.as_secs_f64()));
    }
    Ok(format!(
        "100 scrambles x 50 ops byte-identical ({})",
        notes.join(", ")
    ))
}

fn oracle() -> Verdict {
    let start = Instant::now();
    let r =
        enumerate_cods(&SearchSpec::new(4, 3, 3, Placement::Forced)).map_err(|e| e.to_string())?;
    ensure(r.classes.len() == 1, || {
        format!("[4,3,3]: {} classes", r.classes.len())
    })?;
    ensure(
        r.contains(&example_433()).map_err(|e| e.to_string())?,
        || "worked example not in the class".into(),
    )?;
    ensure(
        r.contains(&construct_g(2).unwrap())
            .map_err(|e| e.to_string())?,
        || "G3 not in the class".into(),
    )?;
    let free =
        enumerate_cods(&SearchSpec::new(1, 2, 1, Placement::Free)).map_err(|e| e.to_string())?;
    ensure(free.valid == 0, || format!("[1,2,1]: {} valid", free.valid))?;
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(60), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "[4,3,3]: 1 class of {} designs; [1,2,1]: 0 of {} candidates; {:.2}s",
        r.valid,
        free.candidates,
        elapsed.as_secs_f64()
    ))
}

fn bounds_table() -> Verdict {
    let rates = ["1", "3/4", "3/4", "2/3", "2/3", "5/8", "5/8", "3/5", "3/5"];
    let delays = [2u64, 4, 4, 15, 30, 56, 56, 210, 420];
    for (idx, n) in (2..=10usize).enumerate() {
        let rate = max_rate(n).map_err(|e| e.to_string())?.to_string();
        let delay = min_delay(n).map_err(|e| e.to_string())?;
        ensure(rate == rates[idx] && delay == delays[idx], || {
            format!("n={n}: rate {rate} delay {delay}")
        })?;
        let (code, out) = cod(&["bounds", "-n", &n.to_string()]);
        let expected_rate = format!("max rate: {}", rates[idx]);
        let expected_delay = format!("min delay: {}", delays[idx]);
        ensure(
            code == 0 && out.contains(&expected_rate) && out.contains(&expected_delay),
            || format!("cod bounds -n {n}: exit {code}, {out:?}"),
        )?;
    }
    Ok("n=2..10 rates and delays exact (library and CLI)".into())
}

fn properties() -> Verdict {
    let mut pairs = 0;
    for m in 1..=4 {
        let rows = row_ids(m).unwrap();
        let e = BitVec::ones(2 * m).unwrap();
        for (a, &alpha) in rows.iter().enumerate() {
            for &beta in &rows[a + 1..] {
                for i in 1..2 * m {
                    for j in i + 1..2 * m {
                        let shared = alpha.get(i) && alpha.get(j) && beta.get(i) && beta.get(j);
                        if !shared || (alpha ^ beta) != e.flip(i).flip(j) {
                            continue;
                        }
                        pairs += 1;
                        let t = |v: BitVec, c: usize| theta(v, c).unwrap();
                        for c in [i, j] {
                            let rhs =
                                ((alpha ^ beta).partial_weight(c, 2 * m).unwrap() + c) % 2 == 1;
                            ensure(t(alpha, c) ^ t(beta, c) == rhs, || {
                                format!("sign identity fails at m={m} {alpha} {beta} col {c}")
                            })?;
                        }
                        let sum = t(alpha, i) ^ t(beta, i) ^ t(alpha, j) ^ t(beta, j);
                        ensure(sum, || {
                            format!("parity sum 0 at m={m} {alpha} {beta} ({i},{j})")
                        })?;
                    }
                }
            }
        }
    }

    let mut designs: Vec<CodMatrix> = (1..=5).map(|m| construct_g(m).unwrap()).collect();
    designs.push(example_433());
    designs.push(extended_design(2).unwrap().unwrap());
    designs.push(extended_design(4).unwrap().unwrap());
    for draw in 0..1000u64 {
        let base = &designs[draw as usize % designs.len()];
        let (_, ops) = scramble(base, draw, 1).map_err(|e| e.to_string())?;
        let out = apply_op(base, &ops[0]).map_err(|e| e.to_string())?;
        ensure(verify_symbolic(&out).ok, || {
            format!("draw {draw}: {} breaks orthogonality", ops[0])
        })?;
    }
    let mut worst: f64 = 0.0;
    for (idx, d) in designs.iter().enumerate() {
        let report = verify_numeric(d, 10, idx as u64, 1e-9);
        ensure(report.ok, || {
            format!("design {idx}: residual {:e}", report.max_residual)
        })?;
        worst = worst.max(report.max_residual);
    }
    Ok(format!(
        "{pairs} Alamouti pairs checked; 1000 op draws valid; max numeric residual {worst:.1e}"
    ))
}

fn main() -> ExitCode {
    let dir = tempfile::tempdir().expect("temporary directory");
    let criteria: Vec<Criterion> = vec![
        (
            "1 generation & verification",
            Box::new(|| generation(dir.path())),
        ),
        ("2 worked [4,3,3] example", Box::new(worked_example)),
        (
            "3 extension, even m",
            Box::new(|| even_extension(dir.path())),
        ),
        (
            "4 extension, odd m",
            Box::new(|| odd_nonexistence(dir.path())),
        ),
        ("5 uniqueness round-trip", Box::new(uniqueness)),
        ("6 oracle cross-validation", Box::new(oracle)),
        ("7 bounds table", Box::new(bounds_table)),
        ("8 property suites", Box::new(properties)),
    ];
    let mut failed = 0;
    for (name, check) in &criteria {
        match check() {
            Ok(detail) => println!("PASS  criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  criterion {name}: {why}");
            }
        }
    }
    println!(
        "acceptance: {} passed, {failed} failed",
        criteria.len() - failed
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
