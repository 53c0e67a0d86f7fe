//! End-to-end acceptance checks over the bundled example corpus, one test
//! per criterion. Each prints a single pass/fail line.

use charloci::suites;

fn report(criterion: usize, label: &str, r: &suites::SuiteResult) {
    let status = if r.pass() { "pass" } else { "FAIL" };
    println!("criterion {criterion} ({label}): {status}");
    for f in &r.failures {
        println!("    {f}");
    }
    assert!(r.pass(), "criterion {criterion} ({label}) failed");
}

#[test]
fn criterion_1_base_change() {
    report(1, "base change", &suites::suite_base_change(50, 7).unwrap());
}

#[test]
fn criterion_2_jump_locus_soundness() {
    report(2, "jump-locus soundness", &suites::suite_jump_loci(50, 7).unwrap());
}

#[test]
fn criterion_3_structure_theorem() {
    report(3, "structure theorem", &suites::suite_structure().unwrap());
}

#[test]
fn criterion_4_codimension_bounds() {
    report(4, "codimension bounds", &suites::suite_codim().unwrap());
}

#[test]
fn criterion_5_generic_vanishing() {
    report(5, "generic vanishing", &suites::suite_generic_vanishing().unwrap());
}

#[test]
fn criterion_6_surprise() {
    report(6, "least-degree support", &suites::suite_surprise().unwrap());
}

#[test]
fn criterion_7_exchange() {
    report(7, "t-structure exchange", &suites::suite_exchange(7).unwrap());
}

#[test]
fn criterion_8_intersection_complex() {
    report(8, "intersection complex", &suites::suite_ic().unwrap());
}

#[test]
fn criterion_9_kernel_correctness() {
    report(9, "kernel correctness", &suites::suite_kernel(7).unwrap());
}

#[test]
fn bundled_examples_pass_expectations() {
    let r = suites::suite_examples().unwrap();
    let status = if r.pass() { "pass" } else { "FAIL" };
    println!("examples corpus: {status}");
    for f in &r.failures {
        println!("    {f}");
    }
    assert!(r.pass());
}
