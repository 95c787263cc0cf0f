//! All acceptance criteria at their stated resolutions and tolerances, one
//! line per criterion.

use transport1d::criteria::{Suite, CRITERIA};

#[test]
fn acceptance() {
    let suite = Suite::default();
    println!();
    let mut failed = Vec::new();
    for id in CRITERIA {
        let r = suite.run(id);
        println!("{}", r.line());
        if !r.pass {
            failed.push(id);
        }
    }
    println!("{}/{} criteria passed", CRITERIA.len() - failed.len(), CRITERIA.len());
    assert!(failed.is_empty(), "failed: {failed:?}");
}
