fn main() {
    std::process::exit(zerodetect::cli::run(std::env::args_os()));
}
