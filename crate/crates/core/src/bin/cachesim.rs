fn main() {
    std::process::exit(cachesim::cli::run_cli(std::env::args_os()));
}
