fn main() {
    std::process::exit(kolmo_cli::run_cli(std::env::args_os()));
}
