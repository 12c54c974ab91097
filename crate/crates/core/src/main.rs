fn main() {
    std::process::exit(bilevel_lm::cli::run_cli(std::env::args_os()));
}
