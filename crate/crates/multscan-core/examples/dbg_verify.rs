fn main() {
    let table = multscan_core::arith::sieve(1_000_000).unwrap();
    for name in ["characters", "toeplitz", "pretense", "dynamics"] {
        match multscan_core::verify::run_suite(name, 42, &table) {
            Ok(reports) => {
                for s in reports {
                    for c in &s.checks {
                        println!("{} :: {} -> {} ({})", s.suite, c.name, c.passed, c.detail);
                    }
                }
            }
            Err(e) => println!("{name}: ERROR {e}"),
        }
    }
}
