fn main() {
    std::process::exit(fullgroup::cli::run(std::env::args_os()));
}
