use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let out = emduality::cli::run(&args);
    if let Some(msg) = &out.message {
        eprintln!("{msg}");
    }
    if let Some(report) = &out.report {
        // A closed pipe is not an error of the run.
        let _ = writeln!(std::io::stdout(), "{}", report.to_json());
    }
    std::process::exit(out.code);
}
