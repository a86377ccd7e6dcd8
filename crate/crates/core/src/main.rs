fn main() {
    std::process::exit(minlen::cli::run(std::env::args_os()));
}
