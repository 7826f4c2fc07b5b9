fn main() {
    std::process::exit(eigenframe::cli::run(std::env::args_os()));
}
