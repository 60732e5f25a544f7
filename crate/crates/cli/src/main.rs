fn main() {
    std::process::exit(minkowski_principal_cli::run_cli(std::env::args_os()));
}
