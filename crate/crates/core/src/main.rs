fn main() {
    std::process::exit(conslaw_core::cli::run(std::env::args_os()));
}
