fn main() {
    std::process::exit(nonstoq::cli::run_cli(std::env::args_os()));
}
