fn main() {
    std::process::exit(nareor::cli::run(std::env::args_os()));
}
