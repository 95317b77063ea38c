fn main() {
    std::process::exit(nag_cli::run(std::env::args_os()));
}
