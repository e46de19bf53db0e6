//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs without the libtest harness so every line reaches the output even
//! when all criteria pass. Exits nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use num_bigint::BigUint;
use num_traits::Zero;
use popclass::classify::symmetry_orbit;
use popclass::genfunc::{residual, AlgebraicGF};
use popclass::reproduce::{algebraic_fixtures, mclass_generating_functions, reproduce, ReproduceContext};
use popclass::{
    basis_of_pop, counting_sequence, enumerate_posets, pop_contains, EnumConfig, PermClass, Permutation, Poset,
};

type Outcome = Result<Vec<String>, String>;

/// Runs reproduce pipelines and collects the names of failed checks.
fn pipelines(ctx: &ReproduceContext, ids: &[&str]) -> Outcome {
    let mut failures = Vec::new();
    let mut summary = Vec::new();
    for id in ids {
        let result = reproduce(id, ctx).map_err(|e| format!("{id}: {e}"))?;
        summary.push(format!("{id}: {} checks", result.checks.len()));
        for check in result.checks.iter().filter(|c| !c.pass) {
            failures.push(format!("{id}/{}: {}", check.name, check.detail));
        }
    }
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(failures.join("; "))
    }
}

fn all_perms_up_to(n: usize) -> Vec<Permutation> {
    (0..=n).flat_map(Permutation::all_of_size).collect()
}

fn pop_containment_cross_oracle() -> Result<String, String> {
    let perms = all_perms_up_to(7);
    let mut checked = 0usize;
    for k in 1..=4 {
        for poset in enumerate_posets(k).map_err(|e| e.to_string())? {
            let class = basis_of_pop(&poset);
            for pi in &perms {
                if pop_contains(pi, &poset) == class.contains_perm(pi) {
                    return Err(format!("{pi} disagrees on {}", poset.to_text()));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} poset/permutation pairs"))
}

/// Linear extensions counted by filtering all orderings of the labels.
fn brute_linear_extensions(poset: &Poset) -> usize {
    let relations = poset.relations();
    Permutation::all_of_size(poset.size())
        .filter(|order| {
            let mut position = vec![0usize; poset.size() + 1];
            for (i, &label) in order.values().iter().enumerate() {
                position[label as usize] = i;
            }
            relations.iter().all(|&(a, b)| position[a as usize] < position[b as usize])
        })
        .count()
}

fn euler_numbers() -> Result<String, String> {
    const EULER: [usize; 8] = [1, 1, 1, 2, 5, 16, 61, 272];
    let mut checked = 0;
    for (n, &expected) in EULER.iter().enumerate().skip(1) {
        for zigzag in Poset::zigzags(n).map_err(|e| e.to_string())? {
            let count = zigzag.count_linear_extensions();
            if count != expected || brute_linear_extensions(&zigzag) != expected {
                return Err(format!("{} has {count} linear extensions", zigzag.to_text()));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} zig-zags"))
}

fn symmetry_invariance(classes: &[PermClass]) -> Result<String, String> {
    let config = EnumConfig::default();
    let mut checked = 0;
    for class in classes {
        let reference = counting_sequence(class, 8, &config).map_err(|e| e.to_string())?;
        for image in symmetry_orbit(class) {
            if counting_sequence(&image, 8, &config).map_err(|e| e.to_string())? != reference {
                return Err(format!("{image} differs from {class}"));
            }
            checked += 1;
        }
    }
    Ok(format!("{checked} symmetric images"))
}

fn residuals() -> Result<String, String> {
    let mut fixtures: Vec<(String, AlgebraicGF)> = algebraic_fixtures()
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|(name, gf)| (name.to_string(), gf))
        .collect();
    for entry in mclass_generating_functions().map_err(|e| e.to_string())? {
        fixtures.push((format!("{:?}", entry.labels[0]), AlgebraicGF::from_rational(&entry.gf)));
    }
    for (name, gf) in &fixtures {
        let series = popclass::algebraic_series(gf, 14).map_err(|e| format!("{name}: {e}"))?;
        if residual(gf, &series).iter().any(|c| !c.is_zero()) {
            return Err(format!("{name} leaves a nonzero residual"));
        }
    }
    Ok(format!("{} fixtures", fixtures.len()))
}

fn growth_vs_filter(classes: &[PermClass]) -> Result<String, String> {
    let config = EnumConfig::default();
    let perms: Vec<Vec<Permutation>> = (0..=7).map(|n| Permutation::all_of_size(n).collect()).collect();
    for class in classes {
        let grown = counting_sequence(class, 7, &config).map_err(|e| e.to_string())?;
        for (n, level) in perms.iter().enumerate() {
            let filtered = level.iter().filter(|p| class.contains_perm(p)).count();
            if grown.terms()[n] != BigUint::from(filtered) {
                return Err(format!("{class} at size {n}: {} vs {filtered}", grown.terms()[n]));
            }
        }
    }
    Ok(format!("{} classes", classes.len()))
}

fn properties() -> Outcome {
    let mut classes: Vec<PermClass> = Vec::new();
    for k in 1..=3 {
        classes.extend(enumerate_posets(k).map_err(|e| e.to_string())?.map(|q| basis_of_pop(&q)));
    }
    for text in ["1342, 2431", "123, 3142", "4231", "2413, 3142", "1324"] {
        classes.push(text.parse().map_err(|e| format!("{e}"))?);
    }
    let results = [
        ("pop containment cross-oracle", pop_containment_cross_oracle()),
        ("euler numbers", euler_numbers()),
        ("symmetry invariance", symmetry_invariance(&classes)),
        ("residuals", residuals()),
        ("growth vs filter", growth_vs_filter(&classes)),
    ];
    let mut summary = Vec::new();
    let mut failures = Vec::new();
    for (name, result) in results {
        match result {
            Ok(detail) => summary.push(format!("{name}: {detail}")),
            Err(e) => failures.push(format!("{name}: {e}")),
        }
    }
    if failures.is_empty() {
        Ok(summary)
    } else {
        Err(failures.join("; "))
    }
}

fn main() -> ExitCode {
    let ctx = ReproduceContext::default();
    let criteria: [(&str, &dyn Fn() -> Outcome); 12] = [
        ("basis examples", &|| pipelines(&ctx, &["thm1"])),
        ("landscape census", &|| pipelines(&ctx, &["landscape5"])),
        ("height two iff regular insertion encoding", &|| pipelines(&ctx, &["thm2"])),
        ("G1 refutation", &|| pipelines(&ctx, &["gk1"])),
        ("G2 and its table", &|| pipelines(&ctx, &["gk2", "table3"])),
        ("G3 and its table", &|| pipelines(&ctx, &["gk3", "table4"])),
        ("G4 and its table", &|| pipelines(&ctx, &["gk4", "table5-a212198"])),
        ("G5 shifted cubic", &|| pipelines(&ctx, &["gk5"])),
        ("G6 prefix evidence", &|| pipelines(&ctx, &["gk6"])),
        ("M-class rational functions", &|| pipelines(&ctx, &["fig2"])),
        ("Wilf partitions", &|| pipelines(&ctx, &["wilf5", "wilf6"])),
        ("property suites", &properties),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed().as_secs_f64();
        match outcome {
            Ok(summary) => println!("PASS {:>2} {name} [{elapsed:.1}s] {}", i + 1, summary.join(", ")),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name} [{elapsed:.1}s] {reason}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
