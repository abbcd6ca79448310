fn main() {
    std::process::exit(matchstick_cli::run(std::env::args_os()));
}
