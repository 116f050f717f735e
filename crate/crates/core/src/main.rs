fn main() {
    std::process::exit(corrent::cli::run(std::env::args_os()));
}
