fn main() {
    std::process::exit(revelation::cli::run(std::env::args_os()));
}
