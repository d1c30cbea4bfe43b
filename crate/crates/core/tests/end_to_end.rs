use polyspace_core::emit::{netlist, write_design_file};
use polyspace_core::verify::check_hdl;
use polyspace_core::*;

fn build(f: FunctionId, bits: u32, r: u32) -> (BoundTable, Build) {
    let spec = ProblemSpec::builtin(f, bits, AccuracyMode::OneUlp).unwrap();
    let table = make_bound_table(&spec).unwrap();
    let b = build_design(&table, r, &BuildOptions::default()).unwrap();
    (table, b)
}

#[test]
fn ten_bit_designs_pass_and_match_hdl() {
    for (f, r) in [
        (FunctionId::Reciprocal, 6),
        (FunctionId::Log2, 6),
        (FunctionId::Exp2, 5),
        (FunctionId::Exp2, 3),
    ] {
        let (_, b) = build(f, 10, r);
        assert!(b.report.passed(), "{f} R={r}: {}", b.report.to_text());
        assert_eq!(b.report.inputs, 1024);
        assert_eq!(b.hardware.unpack(), b.design.coefficients);
        assert_eq!(check_hdl(&b.hardware), Ok(()), "{f} R={r}");
    }
}

#[test]
fn linear_design_has_no_squarer() {
    let (_, b) = build(FunctionId::Reciprocal, 10, 6);
    assert!(b.catalog.linear_sufficient());
    assert_eq!(b.design.plans.a.width, 0);
    assert!(!netlist(&b.hardware).has_squarer());
    assert!(!emit_hdl(&b.hardware, "recip").contains(" * xt"));
}

#[test]
fn quadratic_design_has_squarer() {
    let (_, b) = build(FunctionId::Exp2, 10, 3);
    assert!(b.design.plans.a.width > 0);
    assert!(netlist(&b.hardware).has_squarer());
}

#[test]
fn outputs_are_deterministic() {
    let (_, a) = build(FunctionId::Reciprocal, 10, 6);
    let (_, b) = build(FunctionId::Reciprocal, 10, 6);
    assert_eq!(emit_hdl(&a.hardware, "m"), emit_hdl(&b.hardware, "m"));
    assert_eq!(
        write_design_file(&a.hardware),
        write_design_file(&b.hardware)
    );
    let single = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let (_, c) = single.install(|| build(FunctionId::Reciprocal, 10, 6));
    assert_eq!(
        write_design_file(&a.hardware),
        write_design_file(&c.hardware)
    );
}

#[test]
fn design_file_roundtrips_through_verification() {
    let (table, b) = build(FunctionId::Log2, 10, 6);
    let parsed = parse_design_file(&write_design_file(&b.hardware)).unwrap();
    assert_eq!(parsed, b.hardware);
    assert!(check_design(&parsed, &table, CheckMode::Exhaustive)
        .unwrap()
        .passed());
}
