fn main() {
    std::process::exit(covprio_cli::run(std::env::args_os()));
}
