fn main() {
    std::process::exit(viscowave::cli::run(std::env::args_os()));
}
