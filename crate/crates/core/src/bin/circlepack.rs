fn main() {
    std::process::exit(circlepack::cli::run(std::env::args_os()));
}
