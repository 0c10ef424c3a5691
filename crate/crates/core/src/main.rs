fn main() {
    std::process::exit(qbayes::cli::run(std::env::args_os()));
}
