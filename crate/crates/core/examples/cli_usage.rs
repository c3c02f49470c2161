// Driving the command-line interface in-process.
//
//     cargo run --example cli_usage

pub fn run_example() -> depapprox::Result<()> {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = depapprox::cli::run(
        ["depapprox", "cumulants", "--model", r#"{"kind":"two_runs","n":1000,"p":0.05}"#],
        &mut out,
        &mut err,
    );
    println!("exit {code}\n{}", String::from_utf8_lossy(&out));
    assert_eq!(code, 0);
    Ok(())
}

fn main() -> depapprox::Result<()> {
    run_example()
}
