fn main() {
    std::process::exit(graphlayout::cli::run(std::env::args_os()));
}
