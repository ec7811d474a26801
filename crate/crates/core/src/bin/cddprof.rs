fn main() {
    let args: Vec<String> = std::env::args().collect();
    std::process::exit(cddprof::cli::run(&args));
}
