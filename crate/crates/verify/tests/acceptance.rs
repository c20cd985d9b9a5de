use ppgroup_verify::run_all;

#[test]
fn acceptance() {
    let results = run_all(42);
    for r in &results {
        println!("{}", r.line());
        for f in r.failures.iter().skip(1).take(9) {
            println!("    {f}");
        }
    }
    let failed: Vec<_> = results.iter().filter(|r| !r.passed).map(|r| r.id).collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
