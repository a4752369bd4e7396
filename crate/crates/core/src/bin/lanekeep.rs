fn main() {
    std::process::exit(lanekeep::cli::run(std::env::args_os()));
}
