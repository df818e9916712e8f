use coarse_ext::cli;
use coarse_ext::io::render_report;

fn main() {
    cli::configure_threads();
    let result = cli::run(std::env::args().skip(1));
    if !result.report.is_null() {
        println!("{}", render_report(&result.report));
    }
    std::process::exit(result.exit_code);
}
