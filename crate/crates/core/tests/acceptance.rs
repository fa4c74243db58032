//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use latval::suites;
use latval::CheckReport;

const SEED: u64 = 20_240_601;

struct Criterion {
    id: u32,
    name: &'static str,
    limit: Option<Duration>,
    run: fn() -> Result<CheckReport, String>,
}

fn ok(r: Result<CheckReport, suites::SuiteError>) -> Result<CheckReport, String> {
    r.map_err(|e| e.to_string())
}

const CRITERIA: &[Criterion] = &[
    Criterion {
        id: 1,
        name: "modularity of six instances, 1000 pairs each, exact",
        limit: Some(Duration::from_secs(10)),
        run: || ok(suites::modularity(1000, SEED)),
    },
    Criterion {
        id: 2,
        name: "pseudometric and contraction, 1000 samples, exact",
        limit: None,
        run: || {
            let mut r = CheckReport::new();
            r.merge("pseudometric", ok(suites::pseudometric(1000, SEED))?);
            r.merge("contraction", ok(suites::contraction(1000, SEED))?);
            Ok(r)
        },
    },
    Criterion {
        id: 3,
        name: "totient identity on 1..=500 squared",
        limit: Some(Duration::from_secs(5)),
        run: || ok(suites::totient()),
    },
    Criterion {
        id: 4,
        name: "Fubini on 500 random step functions, 20 slices each",
        limit: Some(Duration::from_secs(30)),
        run: || Ok(suites::fubini(500, SEED, 20)),
    },
    Criterion {
        id: 5,
        name: "quotient of 50 finite systems is Hausdorff with a valuation",
        limit: None,
        run: || ok(suites::quotient_suite(50, SEED)),
    },
    Criterion {
        id: 6,
        name: "completion stage value and stagewise modularity to stage 50",
        limit: None,
        run: || ok(suites::pi_stage()),
    },
    Criterion {
        id: 7,
        name: "sqrt2 witness at depth 40",
        limit: None,
        run: || Ok(suites::sqrt2(40)),
    },
    Criterion {
        id: 8,
        name: "dyadic uniformity on 10^4 triples, broken halving rejected",
        limit: None,
        run: || Ok(suites::uniformity(10_000, SEED)),
    },
    Criterion {
        id: 9,
        name: "dense approximation at eps-index 2, 4, 8 to stage 30",
        limit: None,
        run: || ok(suites::density(&[2, 4, 8], 30)),
    },
    Criterion {
        id: 10,
        name: "weak-convergence subsequence, 20 terms",
        limit: None,
        run: || ok(suites::weak_conv(20)),
    },
    Criterion {
        id: 11,
        name: "pairing round trip to 10^5, 100 decoded codes, 50 stumps",
        limit: None,
        run: || Ok(suites::borel(100_000, SEED, 100_000)),
    },
    Criterion {
        id: 12,
        name: "negative controls rejected",
        limit: None,
        run: || ok(suites::negative_controls(1000, SEED)),
    },
];

fn main() -> ExitCode {
    let mut failures = 0;
    for c in CRITERIA {
        let start = Instant::now();
        let result = (c.run)();
        let took = start.elapsed();
        let (pass, detail) = match &result {
            Ok(rep) if rep.all_pass() => {
                let checks: u64 = rep.properties.values().map(|t| t.pass).sum();
                (true, format!("{checks} checks"))
            }
            Ok(rep) => (false, format!("failing: {}", failing(rep))),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = c.limit.is_none_or(|l| took <= l);
        let limit = c.limit.map(|l| format!(" (limit {}s)", l.as_secs())).unwrap_or_default();
        let verdict = if pass && in_time { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict}: {} [{detail}; {:.2}s{limit}]", c.id, c.name, took.as_secs_f64());
        if verdict == "FAIL" {
            failures += 1;
        }
    }
    println!("{} of {} criteria passed", CRITERIA.len() - failures, CRITERIA.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn failing(rep: &CheckReport) -> String {
    rep.properties
        .iter()
        .filter(|(_, t)| t.fail > 0)
        .map(|(n, t)| format!("{n} ({})", t.counterexample.as_deref().unwrap_or("no witness")))
        .collect::<Vec<_>>()
        .join(", ")
}
