fn main() {
    std::process::exit(pbmvboost::cli::run(std::env::args_os()));
}
