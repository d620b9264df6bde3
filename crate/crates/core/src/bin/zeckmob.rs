fn main() {
    std::process::exit(zeckmob::cli::run(std::env::args_os()));
}
