fn main() {
    std::process::exit(predasym::cli::run(std::env::args_os()));
}
