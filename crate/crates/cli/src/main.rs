fn main() {
    std::process::exit(bayesopt_cli::run_cli(std::env::args_os()));
}
