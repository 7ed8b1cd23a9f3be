fn main() {
    std::process::exit(halfline_kdv::cli::run(std::env::args_os()));
}
