fn main() {
    std::process::exit(rotiter::cli::run(std::env::args_os()));
}
