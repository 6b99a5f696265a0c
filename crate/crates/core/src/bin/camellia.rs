fn main() {
    std::process::exit(camellia::harness::cli::run_cli(std::env::args_os()));
}
