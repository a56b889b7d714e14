fn main() {
    std::process::exit(hermite_decay::cli::run(std::env::args_os()));
}
