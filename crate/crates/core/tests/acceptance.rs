//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qmodal::enumerate::{classify, compositions_of};
use qmodal::genfun::{multimodal_gf, rank_u_gf, unimodal_gf, FamilyTag, GeneratedSeries};
use qmodal::verify::{check_family_against_oracle, run_theorem_suite, CheckId, Status, SuiteParams, VerificationReport};

struct Outcome {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Outcome { failures: Vec::new(), notes: Vec::new() }
    }

    fn absorb(&mut self, report: &VerificationReport) {
        let skipped = report.notes.iter().filter(|n| n.contains("skipped")).count();
        if skipped > 0 {
            self.notes.push(format!("{}: {skipped} cases skipped", report.check_id));
        }
        for n in report.notes.iter().filter(|n| !n.contains("skipped") && !n.contains("excluded")) {
            self.notes.push(format!("{}: {n}", report.check_id));
        }
        if report.status == Status::Fail {
            for d in &report.discrepancies {
                self.failures.push(format!(
                    "{}: {} expected {} got {}",
                    report.check_id, d.location, d.expected, d.actual
                ));
            }
            if report.discrepancies.is_empty() {
                self.failures.push(format!("{}: failed", report.check_id));
            }
        }
    }

    fn check(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }
}

fn suite(ids: &[CheckId], params: &SuiteParams) -> Outcome {
    let mut out = Outcome::new();
    for &id in ids {
        out.absorb(&run_theorem_suite(id, params));
    }
    out
}

fn families() -> Vec<FamilyTag> {
    let mut tags = vec![
        FamilyTag::Partition,
        FamilyTag::PartitionDistinct,
        FamilyTag::Composition,
        FamilyTag::CompositionFirstMax,
    ];
    for k in 1..=4 {
        tags.extend([FamilyTag::Unimodal(k), FamilyTag::StronglyUnimodal(k), FamilyTag::Multimodal(k)]);
    }
    tags.extend([
        FamilyTag::MultimodalAll,
        FamilyTag::StrongMultimodal(None),
        FamilyTag::SemistrongMultimodal(None),
    ]);
    tags
}

fn criterion1() -> Outcome {
    let mut out = Outcome::new();
    for tag in families() {
        out.absorb(&check_family_against_oracle(tag, 14, 14));
    }
    out
}

fn criterion2() -> Outcome {
    suite(&[CheckId::Thm4], &SuiteParams { nmax: Some(20), ..SuiteParams::default() })
}

fn criterion3() -> Outcome {
    let mut out = suite(&[CheckId::Thm3], &SuiteParams { order: Some(30), ..SuiteParams::default() });
    let cor = suite(&[CheckId::CorThm3], &SuiteParams { order: Some(25), ..SuiteParams::default() });
    out.failures.extend(cor.failures);
    out.notes.extend(cor.notes);
    out
}

fn criterion4() -> Outcome {
    suite(
        &[CheckId::Prop1, CheckId::Prop2, CheckId::Formula2],
        &SuiteParams { order: Some(25), ..SuiteParams::default() },
    )
}

fn criterion5() -> Outcome {
    suite(&[CheckId::Unigen2], &SuiteParams::default())
}

fn criterion6() -> Outcome {
    suite(&[CheckId::Sec4EvenM], &SuiteParams::default())
}

fn criterion7() -> Outcome {
    suite(&[CheckId::Thm5], &SuiteParams { tables: 100, ..SuiteParams::default() })
}

fn criterion8() -> Outcome {
    suite(&[CheckId::Cor6], &SuiteParams::default())
}

fn triangular(series: &GeneratedSeries) -> bool {
    series.terms().iter().all(|(z, q, _)| z.unsigned_abs() as usize <= *q)
}

fn criterion9() -> Outcome {
    let mut out = Outcome::new();
    let mut tags = families();
    tags.extend([FamilyTag::StrongMultimodal(Some(2)), FamilyTag::SemistrongMultimodal(Some(3)), FamilyTag::RankU]);
    for tag in tags {
        out.check(triangular(&tag.series(14)), format!("{tag}: coefficient outside |z| <= q"));
    }

    let mut seen = 0usize;
    for n in 1..=12 {
        for c in compositions_of(n) {
            seen += 1;
            match classify(&c) {
                Ok(Some(d)) => {
                    if d.reassemble() != c || d.size() != n {
                        out.failures.push(format!("classify round trip broke on {c}"));
                    }
                }
                Ok(None) => {}
                Err(e) => out.failures.push(format!("classify {c}: {e}")),
            }
        }
    }
    out.check(seen == (1 << 12) - 1, format!("expected 4095 compositions, saw {seen}"));

    let rank = rank_u_gf(12);
    out.check(rank.reflect() == rank, "rank series not symmetric under z -> 1/z");

    for k in 1..=4u32 {
        let (u, m) = (unimodal_gf(k, 14), multimodal_gf(k, 14));
        for q in 0..=14 {
            for z in 0..=q {
                let (a, b) = (u.coeff(z, q).unwrap(), m.coeff(z, q).unwrap());
                if a > b {
                    out.failures.push(format!("k={k} z^{z} q^{q}: unimodal {a} > multimodal {b}"));
                }
            }
        }
    }
    out
}

type Criterion = (&'static str, Duration, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("1 family series match exhaustive counts to size 14", Duration::from_secs(30), criterion1),
        ("2 peak-split counts agree for N <= 20", Duration::from_secs(60), criterion2),
        ("3 telescoping products and partition sums", Duration::from_secs(20), criterion3),
        ("4 first-part and bounded-part identities to order 25", Duration::from_secs(10), criterion4),
        ("5 U(-1; root of unity) finite sum vs radial probe", Duration::from_secs(300), criterion5),
        ("6 even-m strong and semistrong finite sums", Duration::from_secs(600), criterion6),
        ("7 periodic product sums, 100 seeded tables", Duration::from_secs(10), criterion7),
        ("8 M_k(z; root of unity) finite formula", Duration::from_secs(900), criterion8),
        ("9 structural invariants", Duration::from_secs(60), criterion9),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let started = Instant::now();
        let mut out = run();
        let elapsed = started.elapsed();
        if elapsed > budget {
            out.failures.push(format!("runtime {elapsed:.1?} over budget {budget:?}"));
        }
        let verdict = if out.failures.is_empty() { "PASS" } else { "FAIL" };
        println!("{verdict} criterion {name} ({elapsed:.2?})");
        for n in &out.notes {
            println!("    note: {n}");
        }
        for f in out.failures.iter().take(20) {
            println!("    {f}");
        }
        if out.failures.len() > 20 {
            println!("    ... {} more", out.failures.len() - 20);
        }
        if !out.failures.is_empty() {
            failed += 1;
        }
    }
    println!("{} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
