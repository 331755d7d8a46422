fn main() {
    std::process::exit(discopula::cli::run(std::env::args_os()));
}
